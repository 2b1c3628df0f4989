"""Exact linear algebra: Gaussian elimination over the rationals and Smith
normal form over the integers.

Matrices are plain lists of lists.  Sizes here are small (tens of rows), so
clarity beats asymptotics throughout.
"""

from fractions import Fraction


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(M):
    return [list(col) for col in zip(*M)] if M else []


def matmul(A, B):
    if not A or not B:
        return []
    n, k, m = len(A), len(B), len(B[0])
    Bt = transpose(B)
    return [[sum(A[i][t] * Bt[j][t] for t in range(k)) for j in range(m)]
            for i in range(n)]


def mat_vec(A, v):
    return [sum(row[j] * v[j] for j in range(len(v))) for row in A]


# --------------------------------------------------------------- over Q

def rref(M):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = [[Fraction(x) for x in row] for row in M]
    if not R:
        return R, []
    rows, cols = len(R), len(R[0])
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if pivot is None:
            continue
        R[r], R[pivot] = R[pivot], R[r]
        pv = R[r][c]
        R[r] = [x / pv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def rank(M) -> int:
    return len(rref(M)[1])


def nullspace(M):
    """Basis of the right kernel, as Fraction vectors."""
    if not M:
        return []
    R, pivots = rref(M)
    cols = len(M[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(v)
    return basis


def solve(M, b):
    """One rational solution of M x = b, or None when inconsistent."""
    aug = [list(row) + [bb] for row, bb in zip(M, b)]
    R, pivots = rref(aug)
    cols = len(M[0]) if M else 0
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = R[r][cols]
    return x


# --------------------------------------------------------------- over Z

def smith_normal_form(M):
    """U M V = D diagonal with d_i | d_{i+1}; U, V unimodular.

    Returns (D, U, V).  Entries must be integers.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if A else 0
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        # row_dst -= q * row_src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, q):
        for row in A:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the trailing block to the pivot slot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    add_row(t, i, q)
                    if A[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    add_col(t, j, q)
                    if A[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
        # divisibility of the rest of the block
        fixed = False
        for i in range(t + 1, m):
            if fixed:
                break
            for j in range(t + 1, n):
                if A[i][j] % A[t][t] != 0:
                    add_row(i, t, -1)  # row_t += row_i
                    fixed = True
                    break
        if fixed:
            continue
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return A, U, V


def integer_kernel(M):
    """Basis of the integer right kernel of M (a saturated lattice basis)."""
    if not M or not M[0]:
        n = len(M[0]) if M else 0
        return [[1 if i == j else 0 for j in range(n)] for i in range(n)] if n else []
    D, _, V = smith_normal_form(M)
    m, n = len(M), len(M[0])
    basis = []
    for j in range(n):
        d = D[j][j] if j < min(m, n) else 0
        if d == 0:
            basis.append([V[i][j] for i in range(n)])
    return basis


def integer_solve(M, b):
    """One integer solution of M x = b, or None when there is none."""
    if not M:
        return []
    D, U, V = smith_normal_form(M)
    m, n = len(M), len(M[0])
    y = mat_vec(U, [int(x) for x in b])
    z = [0] * n
    for i in range(m):
        d = D[i][i] if i < min(m, n) else 0
        if d == 0:
            if y[i] != 0:
                return None
        else:
            if y[i] % d != 0:
                return None
            z[i] = y[i] // d
    return mat_vec(V, z)


def unimodular_inverse(M):
    """Inverse of an integer matrix with determinant +-1, as integers."""
    n = len(M)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)]
           for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    inv = []
    for i in range(n):
        row = []
        for j in range(n):
            x = R[i][n + j]
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(x))
        inv.append(row)
    return inv


def lattice_member(columns, v) -> bool:
    """Is v an integer combination of the given integer column vectors?"""
    if not columns:
        return all(x == 0 for x in v)
    m = len(columns[0])
    B = [[columns[j][i] for j in range(len(columns))] for i in range(m)]
    D, U, _ = smith_normal_form(B)
    w = mat_vec(U, [int(x) for x in v])
    n = len(columns)
    for i in range(m):
        d = D[i][i] if i < min(m, n) else 0
        if d == 0:
            if w[i] != 0:
                return False
        elif w[i] % d != 0:
            return False
    return True
