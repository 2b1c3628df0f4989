"""Path holonomy through a decorated complex and peripheral eigenvalues.

A path between face markers decomposes into rotations inside a face and
turns around edges.  Each piece acts on the projective basis attached to
the marker by an explicit 3x3 matrix: a rotation by T(X) where X is the
3-ratio of the face, a left turn around (i, j) by the diagonal matrix
E(z_ij, z_ji), and a right turn by the upper triangular product
T E T T spelled out in compile_word.  Crossing a glued face identifies
the marker bases entrywise, so it contributes no matrix.

Paths are compiled to words first and matrices come later; the same
words yield the multiplicative exponents of the two distinguished
eigenvalues of a peripheral loop, which double as boundary equation
rows for the gluing solver.

A closed loop near a vertex preserves its flag, so its word multiplies
to an upper triangular matrix with diagonal proportional to
(1/C*, 1, C).  The closed forms: C takes a factor z_ij per left turn
around (i, j) and 1/z_ij per right turn; C* takes z_ji per left turn
and, per right turn, one factor 1/z for each of the seven coordinates
in the expansion of z_ji times the two adjacent 3-ratios, whose signs
cancel in pairs.
"""

from dataclasses import dataclass

from .arith import is_exact, to_complex
from .complex3 import LinkPath, link_homology_basis
from .errors import InvalidShape, InvalidTripleRatio
from .intlinalg import identity, matmul

__all__ = [
    "t_matrix", "e_matrix", "compile_word", "word_matrix",
    "path_holonomy", "diagonal_invariants", "eigenvalue_exponents",
    "evaluate_exponents", "LinkEigenvalues", "peripheral_invariants",
    "triangular_defect",
]


# ------------------------------------------------------- matrix pieces

def t_matrix(X):
    """Cyclic rotation of a face marker; order 3 up to scale."""
    if X == 0:
        raise InvalidTripleRatio("rotation needs a nonzero 3-ratio")
    return [[X, X + 1, 1], [-X, -X, 0], [X, 0, 0]]


def e_matrix(zij, zji):
    """Left turn around the edge (i, j): diag(1/z_ji, 1, z_ij)."""
    if zij == 0 or zji == 0:
        raise InvalidShape("turn needs nonzero edge coordinates")
    return [[1 / zji, 0, 0], [0, 1, 0], [0, 0, zij]]


def scale_normalize(M):
    """Divide a floating matrix by its largest entry; exact ones pass."""
    entries = [x for row in M for x in row]
    if all(is_exact(x) for x in entries):
        return [list(row) for row in M]
    top = max(entries, key=lambda x: abs(complex(x)))
    return [[complex(x) / complex(top) for x in row] for row in M]


def triangular_defect(M) -> float:
    """Largest below-diagonal modulus relative to the largest entry."""
    scale = max(abs(complex(x)) for row in M for x in row)
    low = max(abs(complex(M[i][j])) for i in range(3) for j in range(3)
              if i > j)
    return low / scale if scale else 0.0


# ------------------------------------------------------ word compiler

def compile_word(path: LinkPath):
    """The path as a sequence of matrix letters in traversal order.

    Letters are ("T", t, (i, j, k)) for a rotation by the 3-ratio of the
    triple and ("E", t, (i, j)) for diag(1/z_ji, 1, z_ij).  A right turn
    from the frame (a, b, c) is the marker chain
    (a,b,c) -> (b,c,a) -> (c,a,b) -> (c,a,d)... folded into its four
    letter closed form: two rotations by the frame's own 3-ratio, the
    backwards turn E(z_ca, z_ac), and a rotation by the 3-ratio of the
    landing triple (a, d, c).
    """
    word = []
    for step in path.steps:
        kind, t, (a, b, c) = step
        if kind == "left":
            word.append(("E", t, (a, b)))
        elif kind == "right":
            d = 6 - a - b - c
            word.append(("T", t, (a, b, c)))
            word.append(("T", t, (a, b, c)))
            word.append(("E", t, (c, a)))
            word.append(("T", t, (a, d, c)))
        elif kind == "rot":
            word.append(("T", t, (a, b, c)))
        else:
            raise ValueError("unknown step kind %r" % (kind,))
    return tuple(word)


def _tables_of(decoration):
    if hasattr(decoration, "z_tables"):
        return list(decoration.z_tables())
    return list(decoration)


def word_matrix(word, tables):
    """Evaluate a compiled word, left multiplying letter by letter."""
    out = identity(3)
    for letter in word:
        tag, t, arg = letter
        zt = tables[t]
        if tag == "T":
            m = t_matrix(zt.z_face(*arg))
        else:
            i, j = arg
            m = e_matrix(zt.z_edge(i, j), zt.z_edge(j, i))
        out = matmul(m, out)
    return out


def path_holonomy(cx, decoration, path: LinkPath, closed=False):
    """Holonomy matrix of a marker path, up to scale.

    Validates the path against the complex first, so malformed or
    backtracking step lists fail before any arithmetic.
    """
    path.validate(cx, closed=closed)
    return scale_normalize(word_matrix(compile_word(path),
                                       _tables_of(decoration)))


def diagonal_invariants(M):
    """(C, C*) of an upper triangular holonomy, middle entry scaled to 1."""
    return M[2][2] / M[1][1], M[1][1] / M[0][0]


# ---------------------------------------------- eigenvalue closed forms

def _bump(d, key, c):
    d[key] = d.get(key, 0) + c
    if not d[key]:
        del d[key]


def eigenvalue_exponents(path: LinkPath):
    """Exponent dictionaries for (C, C*), keyed by edge coordinate.

    Works on pure turn paths; a rotation letter has no triangular
    matrix, so paths containing one are rejected.  Keys are (t, i, j)
    meaning z_ij of tetrahedron t.
    """
    c, cstar = {}, {}
    for step in path.steps:
        kind, t, (a, b, cc) = step
        if kind == "left":
            _bump(c, (t, a, b), 1)
            _bump(cstar, (t, b, a), 1)
        elif kind == "right":
            d = 6 - a - b - cc
            _bump(c, (t, a, cc), -1)
            for i, j in ((cc, a), (a, b), (cc, b), (d, b), (a, d),
                         (b, d), (cc, d)):
                _bump(cstar, (t, i, j), -1)
        else:
            raise ValueError("eigenvalues need a pure turn path")
    return c, cstar


def evaluate_exponents(exponents, tables):
    out = 1
    for (t, i, j), e in sorted(exponents.items()):
        out = out * tables[t].z_edge(i, j) ** e
    return out


# --------------------------------------------------- per link summary

@dataclass
class LinkEigenvalues:
    """Distinguished eigenvalues of the basis loops of one link.

    Torus links carry values A, B (last eigenvalues of the two basis
    loops) and their starred first-eigenvalue partners; annulus links
    carry C, Cstar for the core loop.
    """

    link: int
    kind: str
    values: dict

    def all_one(self) -> bool:
        return all(v == 1 for v in self.values.values())


def peripheral_invariants(cx, decoration):
    """Eigenvalue data for every torus and annulus link of the complex.

    Uses the closed forms on the homology basis walks; the matrix route
    gives the same numbers and is exercised by the tests.
    """
    tables = _tables_of(decoration)
    out = []
    for idx, link in enumerate(cx.links):
        if link.kind not in ("torus", "annulus"):
            continue
        basis = link_homology_basis(link)
        ca, csa = eigenvalue_exponents(basis.a)
        values = {}
        if link.kind == "torus":
            cb, csb = eigenvalue_exponents(basis.b)
            values["A"] = evaluate_exponents(ca, tables)
            values["Astar"] = evaluate_exponents(csa, tables)
            values["B"] = evaluate_exponents(cb, tables)
            values["Bstar"] = evaluate_exponents(csb, tables)
        else:
            values["C"] = evaluate_exponents(ca, tables)
            values["Cstar"] = evaluate_exponents(csa, tables)
        out.append(LinkEigenvalues(idx, link.kind, values))
    return tuple(out)
