import random
from fractions import Fraction

import pytest

from flagtet.flags import AffineFlag, Flag, FlagTetrahedron, normalize_tetrahedron


def rational(rng, lo=-9, hi=9, den=9):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_shapes(rng):
    out = []
    while len(out) < 4:
        q = rational(rng)
        if q != 0 and q != 1:
            out.append(q)
    return tuple(out)


def random_gl3(rng):
    while True:
        g = [[rational(rng, -6, 6, 6) for _ in range(3)] for _ in range(3)]
        if _det(g) != 0:
            return g


def _det(g):
    return (g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]))


def _adjugate(g):
    a, b, c = g[0]
    d, e, f = g[1]
    h, i, j = g[2]
    return [[e * j - f * i, c * i - b * j, b * f - c * e],
            [f * h - d * j, a * j - c * h, c * d - a * f],
            [d * i - e * h, b * h - a * i, a * e - b * d]]


def apply_gl3(g, flag, cls=Flag):
    x = tuple(sum(g[r][c] * flag.x[c] for c in range(3)) for r in range(3))
    adj = _adjugate(g)
    f = tuple(sum(flag.f[r] * adj[r][c] for r in range(3)) for c in range(3))
    return cls(x, f)


def random_tetrahedron(rng) -> FlagTetrahedron:
    """Generic rational tetrahedron in random position."""
    base = normalize_tetrahedron(*random_shapes(rng))
    g = random_gl3(rng)
    return FlagTetrahedron([apply_gl3(g, fl) for fl in base.flags])


def random_affine_flags(rng):
    """Affine lifts with random nonzero scales on points and covectors."""
    tet = random_tetrahedron(rng)
    out = []
    for fl in tet.flags:
        sx = rational(rng, 1, 7, 5)
        sf = rational(rng, 1, 7, 5)
        out.append(AffineFlag(tuple(sx * c for c in fl.x),
                              tuple(sf * c for c in fl.f)))
    return out


@pytest.fixture
def rng():
    return random.Random(20260822)


@pytest.fixture
def nprng():
    import numpy as np
    return np.random.default_rng(20260822)
