"""Holonomy matrices, compiled words and peripheral eigenvalues."""

import cmath

import numpy as np
import pytest

from flagtet.arith import QuadExt
from flagtet.complex3 import (LinkPath, bundled_document, link_homology_basis,
                              parse_triangulation)
from flagtet.errors import Backtracking, InvalidShape, InvalidTripleRatio
from flagtet.flags import derive_z_table
from flagtet import holonomy as H
from flagtet.gluing import Decoration, figure_eight_structures


@pytest.fixture(scope="module")
def fig8():
    return parse_triangulation(bundled_document("fig8"))


@pytest.fixture(scope="module")
def fig8_basis(fig8):
    return link_homology_basis(fig8.links[0])


@pytest.fixture(scope="module")
def structures(fig8):
    out = {}
    for name, pts in figure_eight_structures().items():
        out[name] = [Decoration(fig8, [p[:4], p[4:]]) for p in pts]
    return out


def random_tables(rng, n=1):
    def shape():
        while True:
            z = complex(rng.normal(), rng.normal())
            if abs(z) > 0.3 and abs(z - 1) > 0.3:
                return z
    return [derive_z_table(shape(), shape(), shape(), shape())
            for _ in range(n)]


def as_array(M):
    return np.array([[complex(x) for x in row] for row in M])


# ------------------------------------------------------------- matrices

class TestMatrices:
    def test_t_matrix_at_one(self):
        assert H.t_matrix(1) == [[1, 2, 1], [-1, -1, 0], [1, 0, 0]]

    def test_t_matrix_rejects_zero(self):
        with pytest.raises(InvalidTripleRatio):
            H.t_matrix(0)

    def test_t_cubed_is_scalar(self, nprng):
        for _ in range(100):
            X = complex(nprng.normal(), nprng.normal())
            if abs(X) < 1e-3:
                continue
            T = as_array(H.t_matrix(X))
            C = T @ T @ T
            off = C - C[0, 0] * np.eye(3)
            assert np.abs(off).max() < 1e-9 * np.abs(C).max()

    def test_t_cubed_scalar_exact(self):
        X = QuadExt(1, 1, -3)
        T = H.t_matrix(X)
        from flagtet.intlinalg import matmul
        C = matmul(T, matmul(T, T))
        lam = C[0][0]
        assert C == [[lam, 0, 0], [0, lam, 0], [0, 0, lam]]

    def test_e_matrix_identity(self):
        assert H.e_matrix(1, 1) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_e_matrix_rejects_zero(self):
        with pytest.raises(InvalidShape):
            H.e_matrix(0, 1)

    def test_e_matrix_omega(self):
        w = QuadExt(1, 1, -3) / 2
        E = H.e_matrix(w, w)
        assert E[0][0] == w.conj() and E[2][2] == w

    def test_e_matrix_multiplicative(self, nprng):
        a, b, c, d = (complex(nprng.normal(), nprng.normal()) + 2
                      for _ in range(4))
        lhs = as_array(H.e_matrix(a, b)) @ as_array(H.e_matrix(c, d))
        rhs = as_array(H.e_matrix(a * c, b * d))
        assert np.abs(lhs - rhs).max() < 1e-12


# ----------------------------------------------------------------- words

class TestWords:
    def test_left_step_word(self):
        word = H.compile_word(LinkPath((("left", 0, (0, 1, 2)),)))
        assert word == (("E", 0, (0, 1)),)

    def test_rot_step_word(self):
        word = H.compile_word(LinkPath((("rot", 0, (0, 1, 2)),)))
        assert word == (("T", 0, (0, 1, 2)),)

    def test_right_step_word_shape(self):
        word = H.compile_word(LinkPath((("right", 0, (0, 1, 2)),)))
        assert [w[0] for w in word] == ["T", "T", "E", "T"]
        assert word[2] == ("E", 0, (2, 0))
        assert word[3] == ("T", 0, (0, 3, 2))

    def test_left_turn_matrix_is_diagonal(self, nprng):
        zt = random_tables(nprng)[0]
        M = H.word_matrix(H.compile_word(LinkPath((("left", 0, (0, 1, 2)),))),
                          [zt])
        assert M[0][1] == M[0][2] == M[1][0] == M[1][2] == 0
        assert M[2][2] / M[1][1] == zt.z_edge(0, 1)
        assert M[1][1] / M[0][0] == pytest.approx(zt.z_edge(1, 0))

    def test_right_turn_matrix_diagonal(self, nprng):
        # turning right around (a, c) = (0, 2) from the frame (0, 1, 2)
        zt = random_tables(nprng)[0]
        M = H.word_matrix(
            H.compile_word(LinkPath((("right", 0, (0, 1, 2)),))), [zt])
        assert H.triangular_defect(M) < 1e-14
        C, Cs = H.diagonal_invariants(M)
        assert C == pytest.approx(1 / zt.z_edge(0, 2))
        expect = zt.z_edge(2, 0) * zt.z_face(0, 1, 2) * zt.z_face(0, 2, 3)
        assert 1 / Cs == pytest.approx(expect)

    def test_unknown_step_kind(self):
        with pytest.raises(ValueError):
            H.compile_word(LinkPath((("hop", 0, (0, 1, 2)),)))


# ------------------------------------------------------ path holonomy

class TestPathHolonomy:
    def test_malformed_path_raises(self, fig8, structures):
        path = LinkPath((("left", 0, (0, 1, 2)), ("left", 0, (0, 1, 2))))
        with pytest.raises(Backtracking):
            H.path_holonomy(fig8, structures["omega"][0], path)

    def test_basis_loops_unipotent_exact(self, fig8, fig8_basis, structures):
        for decos in structures.values():
            for deco in decos:
                for path in (fig8_basis.a, fig8_basis.b):
                    M = H.path_holonomy(fig8, deco, path, closed=True)
                    assert M[1][0] == M[2][0] == M[2][1] == 0
                    C, Cs = H.diagonal_invariants(M)
                    assert C == 1 and Cs == 1

    def test_closed_form_equals_matrix_exact(self, fig8, fig8_basis,
                                             structures):
        for decos in structures.values():
            for deco in decos:
                tables = deco.z_tables()
                for path in (fig8_basis.a, fig8_basis.b):
                    M = H.path_holonomy(fig8, deco, path, closed=True)
                    C, Cs = H.diagonal_invariants(M)
                    ce, cse = H.eigenvalue_exponents(path)
                    assert H.evaluate_exponents(ce, tables) == C
                    assert H.evaluate_exponents(cse, tables) == Cs

    def test_closed_form_equals_matrix_random(self, fig8, fig8_basis, nprng):
        for _ in range(10):
            tables = random_tables(nprng, 2)
            for path in (fig8_basis.a, fig8_basis.b):
                M = H.path_holonomy(fig8, tables, path, closed=True)
                assert H.triangular_defect(M) < 1e-12
                C, Cs = H.diagonal_invariants(M)
                ce, cse = H.eigenvalue_exponents(path)
                assert H.evaluate_exponents(ce, tables) == pytest.approx(C)
                assert H.evaluate_exponents(cse, tables) == pytest.approx(
                    Cs, rel=1e-9)

    def test_concatenation_multiplies(self, fig8, fig8_basis, nprng):
        tables = random_tables(nprng, 2)
        ab = LinkPath(fig8_basis.a.steps + fig8_basis.b.steps)
        ab.validate(fig8, closed=True)
        for part in (0, 1):
            va = H.evaluate_exponents(
                H.eigenvalue_exponents(fig8_basis.a)[part], tables)
            vb = H.evaluate_exponents(
                H.eigenvalue_exponents(fig8_basis.b)[part], tables)
            vab = H.evaluate_exponents(
                H.eigenvalue_exponents(ab)[part], tables)
            assert vab == pytest.approx(va * vb)

    def test_diagonal_conjugation_invariant(self, fig8, fig8_basis, nprng):
        tables = random_tables(nprng, 2)
        M = as_array(H.path_holonomy(fig8, tables, fig8_basis.a, closed=True))
        for _ in range(100):
            U = np.triu(nprng.normal(size=(3, 3))
                        + 1j * nprng.normal(size=(3, 3)))
            if abs(np.prod(np.diag(U))) < 1e-3:
                continue
            conj = np.linalg.inv(U) @ M @ U
            assert np.abs(np.diag(conj) - np.diag(M)).max() < 1e-8

    def test_rotation_in_closed_form_rejected(self):
        with pytest.raises(ValueError):
            H.eigenvalue_exponents(LinkPath((("rot", 0, (0, 1, 2)),)))


# -------------------------------------------- peripheral eigenvalues

# eigenvalue closed forms for a meridian and longitude pair on the cusp
# torus of the bundled figure eight document: factors (tet, i, j) -> exponent.
# The meridian alternates eight turns, left in tet 0 and right in tet 1;
# the longitude makes one turn in each.
FIG8_A = {(0, 3, 0): 1, (1, 2, 1): -1, (0, 2, 0): 1, (1, 1, 3): -1,
          (0, 1, 2): 1, (1, 0, 3): -1, (0, 0, 2): 1, (1, 3, 1): -1}
FIG8_B = {(0, 3, 2): 1, (1, 3, 0): -1}

# witness loops realizing the words above, as (start state, first turn, turns)
MERIDIAN_START = ((0, (0, 2, 3)), "left", 8)
LONGITUDE_START = ((0, (3, 2, 1)), "left", 2)


def alternating_loop(cx, start, first, turns):
    from flagtet.complex3 import _marker_partner
    state, steps = start, []
    for n in range(turns):
        kind = (first, "right" if first == "left" else "left")[n % 2]
        step = (kind, state[0], state[1])
        steps.append(step)
        state = _marker_partner(cx, LinkPath.step_end(step))
    assert state == start
    return LinkPath(tuple(steps))
_ASTAR_TERMS = (
    ((0, 0, 3), -1), ((1, 0, 3), 1), ((1, 3, 0), 1), ((1, 2, 1), -1),
    ((0, 0, 2), -1), ((1, 0, 2), 1), ((1, 2, 0), 1), ((1, 1, 3), -1),
    ((0, 2, 1), -1), ((1, 1, 2), 1), ((1, 2, 1), 1), ((1, 0, 3), -1),
    ((0, 2, 0), -1), ((1, 2, 0), 1), ((1, 0, 2), 1), ((1, 3, 1), -1),
)
FIG8_BSTAR = {(0, 2, 3): -1, (1, 1, 2): 1, (1, 2, 1): 1, (1, 3, 0): -1}


def _accumulate(terms):
    out = {}
    for key, c in terms:
        out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v}


FIG8_ASTAR = _accumulate(_ASTAR_TERMS)


class TestPeripheralInvariants:
    def test_words_realized_by_loops(self, fig8, nprng):
        # the transcribed words are the C closed forms of actual loops, and
        # the starred words are the reciprocal C* closed forms
        tables = random_tables(nprng, 2)
        for (start, first, turns), cw, csw in (
                (MERIDIAN_START, FIG8_A, FIG8_ASTAR),
                (LONGITUDE_START, FIG8_B, FIG8_BSTAR)):
            path = alternating_loop(fig8, start, first, turns)
            path.validate(fig8, closed=True)
            ce, cse = H.eigenvalue_exponents(path)
            assert ce == cw
            got = 1 / H.evaluate_exponents(cse, tables)
            want = H.evaluate_exponents(csw, tables)
            assert got == pytest.approx(want, rel=1e-9)

    def test_verbatim_words_trivial_on_structures(self, structures):
        for decos in structures.values():
            for deco in decos:
                tables = deco.z_tables()
                for word in (FIG8_A, FIG8_B, FIG8_ASTAR, FIG8_BSTAR):
                    assert H.evaluate_exponents(word, tables) == 1

    def test_all_one_on_structures(self, fig8, structures):
        for decos in structures.values():
            for deco in decos:
                (link,) = H.peripheral_invariants(fig8, deco)
                assert link.kind == "torus" and link.link == 0
                assert link.all_one()
                assert set(link.values) == {"A", "B", "Astar", "Bstar"}

    def test_not_all_one_generic(self, fig8, nprng):
        tables = random_tables(nprng, 2)
        (link,) = H.peripheral_invariants(fig8, tables)
        assert not link.all_one()

    def test_matches_matrix_route(self, fig8, fig8_basis, nprng):
        tables = random_tables(nprng, 2)
        (link,) = H.peripheral_invariants(fig8, tables)
        Ma = H.path_holonomy(fig8, tables, fig8_basis.a, closed=True)
        A, Astar = H.diagonal_invariants(Ma)
        assert link.values["A"] == pytest.approx(A)
        assert link.values["Astar"] == pytest.approx(Astar, rel=1e-9)
