"""Skew pairings, interior homology and the two boundary comparison maps.

The exact integer identities here (kernel membership, multiplication by
four, the -4 pullback, the per-tetrahedron composition table) certify the
homological boundary comparison; the holonomy square and the wedge
boundary checks tie the same matrices to the analytic data.
"""

from fractions import Fraction

import pytest

from flagtet.arith import QuadExt
from flagtet.bloch import beta, delta
from flagtet.complex3 import (bundled_document, link_homology_basis,
                              parse_triangulation)
from flagtet.conventions import (A_COORDS, A_INDEX, BOUNDARY_FACE_TRIPLE,
                                 EDGES, VERTICES, completion)
from flagtet.errors import (NonRationalSupport, UnsupportedLinks,
                            VerificationFailed)
from flagtet.flags import ACoordinates, AffineFlag, normalize_tetrahedron
from flagtet.gluing import (Decoration, build_equations, continue_family,
                            figure_eight_structures)
from flagtet.intlinalg import mat_vec, matmul, rank, transpose
from flagtet import nzsymp as NZ

from tests.conftest import random_affine_flags


@pytest.fixture(scope="module")
def fig8():
    return parse_triangulation(bundled_document("fig8"))


@pytest.fixture(scope="module")
def single():
    return parse_triangulation(bundled_document("single_tet"))


@pytest.fixture(scope="module")
def two_tet():
    return parse_triangulation(bundled_document("two_tet"))


@pytest.fixture(scope="module")
def doubled():
    # mirror double of one tetrahedron: all four links are spheres
    swap = {0: 1, 1: 0, 2: 2, 3: 3}
    doc = {"tetrahedra": 2, "gluings": [
        {"tet": 0, "face": f, "to_tet": 1, "to_face": swap[f],
         "vertex_map": [1, 0, 2, 3]} for f in range(4)]}
    return parse_triangulation(doc)


def omega_decorations(cx):
    return [Decoration(cx, [p[:4], p[4:]])
            for p in figure_eight_structures()["omega"]]


def exact_table(rng):
    while True:
        try:
            return ACoordinates(random_affine_flags(rng))
        except Exception:
            continue


def glued_pair_tables(rng, cx):
    """Affine tables for both tetrahedra sharing flags across the glued
    face, so the face products cancel exactly."""
    pi = cx.pairing[(0, 3)][2]
    while True:
        flags0 = random_affine_flags(rng)
        try:
            t0 = ACoordinates(flags0)
        except Exception:
            continue
        shared = {pi[v]: flags0[v] for v in (0, 1, 2)}
        for _ in range(40):
            fresh = random_affine_flags(rng)
            flags1 = [shared.get(v, fresh[v]) for v in range(4)]
            try:
                return t0, ACoordinates(flags1)
            except Exception:
                continue


# ------------------------------------------------- single tetrahedron level

class TestEpsilon:
    def test_skew_and_integral(self):
        eps = NZ.epsilon_matrix()
        assert len(eps) == 16 and all(len(r) == 16 for r in eps)
        for a in range(16):
            assert eps[a][a] == 0
            for b in range(16):
                assert isinstance(eps[a][b], int)
                assert eps[a][b] == -eps[b][a]

    def test_rank_eight(self):
        assert rank(NZ.epsilon_matrix()) == 8

    def test_face_rows_follow_pattern(self):
        eps = NZ.epsilon_matrix()
        for l in VERTICES:
            i, j, k = BOUNDARY_FACE_TRIPLE[l]
            F = A_INDEX[("f", l)]
            assert eps[F][A_INDEX[("e", k, i)]] == 1
            assert eps[F][A_INDEX[("e", i, k)]] == -1
            assert eps[A_INDEX[("e", j, i)]][F] == 1

    def test_pure_edge_terms(self):
        eps = NZ.epsilon_matrix()
        for l in VERTICES:
            i, j, k = BOUNDARY_FACE_TRIPLE[l]
            assert eps[A_INDEX[("e", i, j)]][A_INDEX[("e", i, k)]] == 1
            assert eps[A_INDEX[("e", k, i)]][A_INDEX[("e", k, j)]] == 1

    def test_face_face_blocks_vanish(self):
        eps = NZ.epsilon_matrix()
        for l in VERTICES:
            for m in VERTICES:
                assert eps[A_INDEX[("f", l)]][A_INDEX[("f", m)]] == 0

    def test_kernel_basis_spans_the_kernel(self):
        eps = NZ.epsilon_matrix()
        vecs = NZ.kernel_basis()
        assert len(vecs) == 8
        for v in vecs:
            assert all(x == 0 for x in mat_vec(eps, v))
        assert rank(vecs) == 8

    def test_spec_index(self):
        spec = NZ.epsilon_spec()
        assert spec.index == tuple(A_COORDS)


class TestOmegaStar:
    def test_integral_skew_nondegenerate(self):
        om = NZ.omega_star_matrix()
        assert len(om) == 8
        for a in range(8):
            assert om[a][a] == 0
            for b in range(8):
                assert isinstance(om[a][b], int)
                assert om[a][b] == -om[b][a]
        assert rank(om) == 8

    def test_spec_index_is_the_retained_edges(self):
        spec = NZ.omega_star_spec()
        assert spec.index == NZ.RETAINED_EDGES


class TestTetraH:
    def test_shape(self):
        H = NZ.tetra_h_matrix()
        assert len(H) == 16 and all(len(r) == 24 for r in H)

    def test_second_component_doubles_the_edge(self):
        H = NZ.tetra_h_matrix()
        for pos, (i, j) in enumerate(EDGES):
            col = [H[r][2 * pos + 1] for r in range(16)]
            expect = [0] * 16
            expect[A_INDEX[("e", i, j)]] = 2
            assert col == expect

    def test_first_component_edge_and_faces(self):
        H = NZ.tetra_h_matrix()
        for pos, (i, j) in enumerate(EDGES):
            col = [H[r][2 * pos] for r in range(16)]
            k, l = completion(i, j)
            expect = [0] * 16
            expect[A_INDEX[("e", j, i)]] = 2
            # faces through the edge, missing vertices l and k
            expect[A_INDEX[("f", l)]] = 1
            expect[A_INDEX[("f", k)]] = 1
            assert col == expect


@pytest.fixture(scope="module")
def composed():
    H = NZ.tetra_h_matrix()
    eps = NZ.epsilon_matrix()
    G = [[NZ.DUAL_CROSSING_SIGN * v for v in row]
         for row in transpose(matmul(eps, H))]
    return matmul(G, H)


@pytest.fixture(scope="module")
def gram():
    H = NZ.tetra_h_matrix()
    return matmul(transpose(H), matmul(NZ.epsilon_matrix(), H))


class TestTetraComposition:
    """The per-tetrahedron composed map and the pairing of arc images."""

    @staticmethod
    def column(M, arc, comp):
        pos = 2 * EDGES.index(arc) + comp
        out = {}
        for p, dual in enumerate(EDGES):
            for c in (0, 1):
                v = M[2 * p + c][pos]
                if v:
                    out[(dual, c)] = v
        return out

    def test_first_basis_vector_table(self, composed):
        # arc at vertex 0 around the edge to 1, lattice vector (1, 0)
        assert self.column(composed, (0, 1), 0) == {
            ((0, 2), 0): -4, ((0, 2), 1): 2,
            ((0, 3), 0): 4, ((0, 3), 1): -2,
            ((1, 2), 1): 2, ((1, 3), 1): -2,
            ((2, 0), 1): -2, ((2, 1), 1): 2,
            ((3, 0), 1): 2, ((3, 1), 1): -2,
        }

    def test_second_basis_vector_table(self, composed):
        # the same arc with lattice vector (0, 1): the far blocks move to
        # the other dual coordinate, the near block transposes
        assert self.column(composed, (0, 1), 1) == {
            ((0, 2), 0): 2, ((0, 2), 1): -4,
            ((0, 3), 0): -2, ((0, 3), 1): 4,
            ((1, 2), 0): 2, ((1, 3), 0): -2,
            ((2, 0), 0): -2, ((2, 1), 0): 2,
            ((3, 0), 0): 2, ((3, 1), 0): -2,
        }

    def test_no_output_on_the_arc_itself_or_its_reverse(self, composed):
        for arc in EDGES:
            for comp in (0, 1):
                col = self.column(composed, arc, comp)
                for c in (0, 1):
                    assert (arc, c) not in col
                    assert ((arc[1], arc[0]), c) not in col

    @staticmethod
    def block(P, x, y):
        px, py = EDGES.index(x), EDGES.index(y)
        return [[P[2 * px + a][2 * py + c] for c in (0, 1)] for a in (0, 1)]

    def test_gram_blocks_by_arc_relation(self, gram):
        two_gram = [[4, -2], [-2, 4]]
        off = [[0, 2], [2, 0]]
        neg = lambda M: [[-v for v in row] for row in M]
        for x in EDGES:
            for y in EDGES:
                b = self.block(gram, x, y)
                if x == y or x == (y[1], y[0]) or set(x).isdisjoint(set(y)):
                    assert b == [[0, 0], [0, 0]]
                elif x[0] == y[0]:
                    assert b in (two_gram, neg(two_gram))
                else:
                    assert b in (off, neg(off))

    def test_adjacent_arc_gram_values(self, gram):
        assert self.block(gram, (0, 1), (0, 2)) == [[-4, 2], [2, -4]]
        assert self.block(gram, (0, 1), (0, 3)) == [[4, -2], [-2, 4]]
        assert self.block(gram, (0, 2), (0, 3)) == [[-4, 2], [2, -4]]
        assert self.block(gram, (0, 1), (2, 0)) == [[0, -2], [-2, 0]]


# --------------------------------------------------- glued complex matrices

class TestBuildF:
    def test_fig8_columns_and_rank(self, fig8):
        F = NZ.build_F(fig8)
        labels = NZ.f_column_labels(fig8)
        assert labels == (
            ("edge", 0, "fwd"), ("edge", 0, "rev"),
            ("edge", 1, "fwd"), ("edge", 1, "rev"),
            ("face", (0, 0), (1, 1)), ("face", (0, 1), (1, 2)),
            ("face", (0, 2), (1, 3)), ("face", (0, 3), (1, 0)))
        assert len(F) == 32 and len(F[0]) == 8
        assert rank(F) == 8

    def test_edge_columns_follow_the_wheel(self, fig8):
        F = NZ.build_F(fig8)
        gidx = NZ.generator_index(fig8.n)
        labels = NZ.f_column_labels(fig8)
        col = labels.index(("edge", 0, "fwd"))
        t, (i, j) = fig8.edge_classes[0][0]
        wheel = fig8.edge_wheel(t, i, j)
        support = {r for r in range(32) if F[r][col]}
        expect = {gidx[(tt, ("e", a, b))] for (tt, (a, b)) in wheel}
        assert support == expect
        assert all(F[r][col] == 1 for r in support)

    def test_two_tet_has_one_face_column(self, two_tet):
        F = NZ.build_F(two_tet)
        assert NZ.f_column_labels(two_tet) == (("face", (0, 3), (1, 3)),)
        assert len(F[0]) == 1

    def test_single_tet_has_no_columns(self, single):
        assert NZ.f_column_labels(single) == ()

    @pytest.mark.parametrize("name", ["fig8", "two_tet"])
    def test_image_is_isotropic(self, name):
        cx = parse_triangulation(bundled_document(name))
        F = NZ.build_F(cx)
        eps = NZ.epsilon_complex(cx.n)
        T = matmul(transpose(F), matmul(eps, F))
        assert all(v == 0 for row in T for v in row)


class TestHomology:
    def test_fig8(self, fig8):
        rep = NZ.homology_HJ(fig8)
        assert rep["case"] == "closed"
        assert rep["rank"] == 4
        assert rep["rank_dual"] == 4
        assert rep["torsion"] == [3]
        assert rep["kernel_dim"] == 26
        assert rep["n_relations"] == 24
        assert rep["expected_rank"] == 4
        assert rep["matches_expected"]
        assert len(rep["basis"]) == 4

    def test_fig8_basis_vectors_are_cycles(self, fig8):
        rep = NZ.homology_HJ(fig8)
        F = NZ.build_F(fig8)
        fpe = matmul(transpose(F), NZ.epsilon_complex(fig8.n))
        for v in rep["basis"]:
            assert all(x == 0 for x in mat_vec(fpe, v))

    def test_single_tetrahedron(self, single):
        rep = NZ.homology_HJ(single)
        assert rep["case"] == "boundary"
        assert rep["rank"] == 8
        assert rep["dim_j_sigma"] == 8
        assert rep["expected_rank"] == 8
        assert rep["matches_expected"]
        assert rep["torsion"] == [3]

    def test_two_tetrahedra(self, two_tet):
        rep = NZ.homology_HJ(two_tet)
        assert rep["case"] == "boundary"
        assert rep["rank"] == 14
        assert rep["dim_j_sigma"] == 14
        assert rep["expected_rank"] == 14
        assert rep["matches_expected"]
        assert rep["torsion"] == [3, 3]

    def test_boundary_count_uses_link_kinds(self, single):
        rep = NZ.homology_HJ(single)
        assert rep["nu_torus"] == 0 and rep["nu_annulus"] == 0

    def test_sphere_links_rejected(self, doubled):
        assert [l.kind for l in doubled.links] == ["sphere"] * 4
        with pytest.raises(UnsupportedLinks):
            NZ.homology_HJ(doubled)


class TestBoundarySurface:
    def test_generators(self, single):
        gens = NZ.sigma_generators(single)
        faces = [g for g in gens if g[0] == "F"]
        edges = [g for g in gens if g[0] == "E"]
        # one generator per boundary face, one per directed edge class
        assert len(faces) == 4 and len(edges) == 12

    def test_spec_rank(self, single, two_tet):
        assert rank(NZ.sigma_spec(single).matrix) == 8
        assert rank(NZ.sigma_spec(two_tet).matrix) == 14

    def test_single_tet_reduces_to_the_tetra_wedge(self, single, rng):
        tab = exact_table(rng)
        w = NZ.w_sigma(single, [tab])
        assert w == delta(beta(tab.tetrahedron))

    def test_consensus_rejects_unrelated_tables(self, two_tet, rng):
        t0 = exact_table(rng)
        t1 = exact_table(rng)
        with pytest.raises(VerificationFailed):
            NZ.sigma_a_values(two_tet, [t0, t1])


class TestBuildHAndG:
    def test_fig8_column_labels(self, fig8):
        labels = NZ.h_column_labels(fig8)
        assert len(labels) == 48
        link = fig8.links[0]
        assert labels[0] == (link.class_id, link.arcs[0], 0)
        assert labels[1] == (link.class_id, link.arcs[0], 1)

    def test_columns_match_the_entry_rule(self, fig8):
        H = NZ.build_h(fig8)
        gidx = NZ.generator_index(fig8.n)
        for pos, (cid, (t, i, j), comp) in enumerate(NZ.h_column_labels(fig8)):
            expect = [0] * 32
            for sym, c in NZ._h_entries(i, j, comp):
                expect[gidx[(t, sym)]] += c
            assert [H[r][pos] for r in range(32)] == expect

    def test_g_is_the_signed_adjoint(self, fig8):
        G = NZ.build_g(fig8)
        A = transpose(matmul(NZ.epsilon_complex(fig8.n), NZ.build_h(fig8)))
        assert G == [[NZ.DUAL_CROSSING_SIGN * v for v in row] for row in A]

    def test_no_columns_without_torus_or_annulus_links(self, two_tet):
        assert NZ.h_column_labels(two_tet) == ()


# ------------------------------------------------------------ verifications

class TestMultBy4:
    def test_fig8_report(self, fig8):
        rep = NZ.verify_mult_by_4(fig8)
        assert rep["ok"] and rep["mult_by_4_ok"] and rep["pullback_ok"]
        assert rep["adjoint_ok"]
        assert rep["basis_order"] == [(0, "a", 0), (0, "a", 1),
                                      (0, "b", 0), (0, "b", 1)]
        assert rep["mult_matrix"] == [[8, 0, -4, 0], [-4, 0, 8, 0],
                                      [0, 8, 0, -4], [0, -4, 0, 8]]
        assert rep["pullback_matrix"] == [[0, 0, -8, 4], [0, 0, 4, -8],
                                          [8, -4, 0, 0], [-4, 8, 0, 0]]
        assert rep["pullback_matrix"] == rep["pullback_expected"]

    def test_fig8_lemma_checks(self, fig8):
        lemma = NZ.verify_mult_by_4(fig8)["lemma_checks"]
        assert lemma["h_cycles_in_kernel"] is True
        assert lemma["h_boundaries_membership"] == "integer"
        assert lemma["g_kernel_to_cycles"] is True
        assert lemma["g_boundaries_orthogonal"] is True

    def test_rejects_complexes_without_torus_links(self, single, two_tet):
        with pytest.raises(VerificationFailed):
            NZ.verify_mult_by_4(single)
        with pytest.raises(VerificationFailed):
            NZ.verify_mult_by_4(two_tet)

    def test_rejects_sphere_links(self, doubled):
        with pytest.raises(UnsupportedLinks):
            NZ.verify_mult_by_4(doubled)


class TestHolonomySquare:
    def test_exact_at_every_standard_structure(self, fig8):
        for name, pts in figure_eight_structures().items():
            for p in pts:
                deco = Decoration(fig8, [p[:4], p[4:]])
                rep = NZ.verify_holonomy_square(fig8, deco)
                assert rep["exact"] and rep["ok"]
                assert rep["max_error"] == 0.0
                assert len(rep["rows"]) == 4

    def test_numeric_along_a_deformation(self, fig8):
        system = build_equations(fig8)
        omega = figure_eight_structures()["omega"][0]
        start = Decoration(fig8, [omega[:4], omega[4:]])
        family = continue_family(system, start, tangent=0, steps=6,
                                 step=2e-2)
        for deco in family[1:]:
            rep = NZ.verify_holonomy_square(fig8, deco)
            assert not rep["exact"]
            assert rep["ok"] and rep["max_error"] <= 1e-9

    def test_rejects_non_solutions(self, fig8, nprng):
        vec = nprng.normal(size=8) + 1j * nprng.normal(size=8)
        deco = Decoration.from_vector(fig8, vec)
        with pytest.raises(VerificationFailed):
            NZ.verify_holonomy_square(fig8, deco)


class TestBoundaryFormula:
    def test_single_tetrahedron_exact(self, single, rng):
        tab = exact_table(rng)
        rep = NZ.verify_boundary_formula(single, [tab])
        assert rep["mode"] == "exact"
        assert rep["ok"]

    def test_two_tetrahedra_exact(self, two_tet, rng):
        t0, t1 = glued_pair_tables(rng, two_tet)
        rep = NZ.verify_boundary_formula(two_tet, [t0, t1])
        assert rep["mode"] == "exact"
        assert rep["ok"]

    def test_unrelated_tables_fail_the_gluing_products(self, two_tet, rng):
        t0 = exact_table(rng)
        t1 = exact_table(rng)
        with pytest.raises(VerificationFailed):
            NZ.verify_boundary_formula(two_tet, [t0, t1])

    def test_non_rational_support_raises(self, single):
        w = QuadExt(Fraction(1, 2), Fraction(1, 2), -3)
        tet = normalize_tetrahedron(w, w.conj(), w, w.conj())
        tab = ACoordinates([AffineFlag(fl.x, fl.f) for fl in tet.flags])
        with pytest.raises(NonRationalSupport):
            NZ.verify_boundary_formula(single, [tab])

    def test_closed_complex_reports_structurally(self, fig8):
        rep = NZ.verify_boundary_formula(fig8, None)
        assert rep["mode"] == "structural"
        assert rep["ok"] and rep["pullback_ok"] and rep["mult_by_4_ok"]
        words = rep["basis_words"]
        assert len(words) == 1
        assert set(words[0]["a"] + words[0]["b"]) <= {"L", "R"}
        assert len(words[0]["a"]) > 0 and len(words[0]["b"]) > 0

    def test_wrong_table_count_raises(self, two_tet, rng):
        with pytest.raises(TypeError):
            NZ.verify_boundary_formula(two_tet, [exact_table(rng)])


class TestExport:
    def test_matrix_text_round_trip(self, fig8):
        F = NZ.build_F(fig8)
        text = NZ.matrix_text(F)
        back = [[int(v) for v in line.split()] for line in text.splitlines()]
        assert back == F
