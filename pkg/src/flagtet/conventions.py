"""Shared combinatorial conventions for a single ordered tetrahedron.

Vertices are 0, 1, 2, 3.  A tetrahedron carries 12 ordered-edge symbols
a_ij (i != j) and 4 face symbols, one per omitted vertex.  Face 3-ratios
are cyclically invariant and invert under reversal, so each face has a
canonical even-ordered triple; the boundary of the tetrahedron is the sum
of the four odd-ordered triples.

All parity statements refer to (i, j, k, l) as a permutation of (0,1,2,3).
"""

from itertools import permutations

VERTICES = (0, 1, 2, 3)

# ordered edges, lexicographic
EDGES = tuple((i, j) for i in VERTICES for j in VERTICES if i != j)

# canonical even-ordered triple of the face omitting l
EVEN_FACE_TRIPLE = {3: (0, 1, 2), 2: (0, 3, 1), 1: (0, 2, 3), 0: (1, 3, 2)}

# boundary-oriented (odd) triple of the face omitting l
BOUNDARY_FACE_TRIPLE = {3: (0, 2, 1), 2: (0, 1, 3), 1: (0, 3, 2), 0: (1, 2, 3)}

# linear order on the 16 per-tetrahedron symbols: 12 edges then 4 faces;
# the generator ("f", l) carries the boundary orientation of the face,
# and ("e", i, j) is the edge oriented from j to i with value z_ij
A_COORDS = tuple([("e",) + e for e in EDGES] + [("f", l) for l in VERTICES])
A_INDEX = {sym: n for n, sym in enumerate(A_COORDS)}
N_COORDS = len(A_COORDS)  # 16


def perm_parity(seq) -> int:
    """0 for even, 1 for odd."""
    seq = list(seq)
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return inv % 2


def is_even(*seq) -> bool:
    return perm_parity(seq) == 0


def completion(i: int, j: int):
    """The pair (k, l) with (i, j, k, l) an even permutation of (0,1,2,3)."""
    k, l = (v for v in VERTICES if v not in (i, j))
    if perm_parity((i, j, k, l)) == 0:
        return k, l
    return l, k


def opposite_edge(i: int, j: int):
    """Unordered complement {k, l} of an edge, returned sorted."""
    return tuple(v for v in VERTICES if v not in (i, j))


def face_class(i: int, j: int, k: int):
    """Canonical face data (l, s) for the triple (i, j, k).

    l is the omitted vertex and s = +1 when (i, j, k) is an even cyclic
    ordering (so the symbol equals the canonical one), s = -1 when it is
    the reversed ordering (symbol is the canonical one inverted).
    """
    (l,) = (v for v in VERTICES if v not in (i, j, k))
    s = 1 if perm_parity((i, j, k, l)) == 0 else -1
    return l, s


def even_permutations():
    return [p for p in permutations(VERTICES) if perm_parity(p) == 0]


def invert_perm(perm):
    inv = [0] * len(perm)
    for n, v in enumerate(perm):
        inv[v] = n
    return tuple(inv)


def compose_perm(p, q):
    """(p o q)(x) = p[q[x]]."""
    return tuple(p[q[x]] for x in range(len(q)))
