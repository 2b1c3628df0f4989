"""Flags, affine flags and tetrahedra of flags.

A flag is a projective point with an incident projective line, encoded as a
vector x and a covector f with f(x) = 0.  An ordered generic 4-tuple of
flags carries 12 edge cross-ratios z_ij and 4 face 3-ratios; the 3-ratio of
a face is recorded on its canonical even-ordered triple and inverts under
reversal.

Vertices are indexed 0..3.  Scalars may be exact (int, Fraction, QuadExt)
or floating complex; exact inputs give exact coordinates.
"""

from fractions import Fraction

from .arith import QuadExt, to_complex
from .conventions import (BOUNDARY_FACE_TRIPLE, EDGES, EVEN_FACE_TRIPLE,
                          VERTICES, completion, face_class)
from .errors import (DegenerateConfiguration, InvalidShape, NotOnSphere,
                     SigmaUndefined)

# relative genericity threshold for floating scalars
FLOAT_TOL = 1e-10


def dot(f, x):
    return f[0] * x[0] + f[1] * x[1] + f[2] * x[2]


def det3(u, v, w):
    return (u[0] * (v[1] * w[2] - v[2] * w[1])
            - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]))


def conjugate(x):
    if isinstance(x, QuadExt):
        return x.conj() if x.m < 0 else x
    if isinstance(x, complex):
        return x.conjugate()
    return x


def _is_floating(*vs):
    return any(isinstance(c, (float, complex)) for v in vs for c in v)


def _norm(v) -> float:
    return max(abs(to_complex(c)) for c in v)


def _nonzero(value, scale, floating):
    if floating:
        return abs(to_complex(value)) > FLOAT_TOL * scale
    return value != 0


class Flag:
    """Projective point with an incident line; f(x) = 0."""

    def __init__(self, x, f):
        x, f = tuple(x), tuple(f)
        if len(x) != 3 or len(f) != 3:
            raise ValueError("flags live in dimension 3")
        floating = _is_floating(x, f)
        nx, nf = (_norm(x), _norm(f)) if floating else (1.0, 1.0)
        if nx == 0 or (not floating and all(c == 0 for c in x)):
            raise DegenerateConfiguration("zero point vector")
        if nf == 0 or (not floating and all(c == 0 for c in f)):
            raise DegenerateConfiguration("zero covector")
        pairing = dot(f, x)
        if floating:
            if abs(to_complex(pairing)) > 1e-12 * nx * nf:
                raise DegenerateConfiguration("f(x) != 0: not a flag")
        elif pairing != 0:
            raise DegenerateConfiguration("f(x) != 0: not a flag")
        self.x = x
        self.f = f

    def __repr__(self):
        return "Flag(x=%r, f=%r)" % (self.x, self.f)


class AffineFlag(Flag):
    """A flag with chosen scales: not identified up to rescaling."""


def triple_ratio(F1: Flag, F2: Flag, F3: Flag):
    """Projective invariant of a generic ordered triple of flags.

    Cyclically invariant; swapping two arguments inverts it.
    """
    flags = (F1, F2, F3)
    floating = _is_floating(*(f.x for f in flags), *(f.f for f in flags))
    num, den = 1, 1
    for a in range(3):
        b = (a + 1) % 3
        pn = dot(flags[a].f, flags[b].x)
        pd = dot(flags[b].f, flags[a].x)
        scale = _norm(flags[a].f) * _norm(flags[b].x) if floating else 1.0
        if not _nonzero(pn, scale, floating) or not _nonzero(
                pd, _norm(flags[b].f) * _norm(flags[a].x) if floating else 1.0, floating):
            raise DegenerateConfiguration("vanishing pairing f_i(x_j)")
        num = num * pn
        den = den * pd
    return num / den


class ZTable:
    """The 12 edge and 4 face coordinates of one tetrahedron.

    Face values are stored on the canonical even triples; looking up a
    reversed triple returns the inverse.
    """

    def __init__(self, edges, faces, check=True):
        self.edges = dict(edges)
        self.faces = dict(faces)
        if check:
            for e in EDGES:
                v = self.edges[e]
                if v == 0 or v == 1:
                    raise InvalidShape("edge coordinate %s is %s" % (e, v))
            for l in VERTICES:
                if self.faces[l] == 0:
                    raise InvalidShape("vanishing face coordinate")

    def z_edge(self, i, j):
        return self.edges[(i, j)]

    def z_face(self, i, j, k):
        l, s = face_class(i, j, k)
        v = self.faces[l]
        return v if s == 1 else 1 / v

    def shapes(self):
        return (self.edges[(0, 1)], self.edges[(1, 0)],
                self.edges[(2, 3)], self.edges[(3, 2)])

    def __eq__(self, other):
        return (isinstance(other, ZTable) and self.edges == other.edges
                and self.faces == other.faces)


def derive_z_table(z01, z10, z23, z32) -> ZTable:
    """All 16 coordinates from the four shape parameters.

    The three cross-ratios leaving a vertex determine each other, and every
    face 3-ratio is minus the product of the cross-ratios entering its
    omitted vertex.
    """
    primary = {(0, 1): z01, (1, 0): z10, (2, 3): z23, (3, 2): z32}
    edges = {}
    for (i, j), s in primary.items():
        if s == 0 or s == 1:
            raise InvalidShape("shape parameter in {0, 1}")
        k, l = completion(i, j)
        edges[(i, j)] = s
        edges[(i, k)] = 1 / (1 - s)
        edges[(i, l)] = 1 - 1 / s
    faces = {}
    for l in VERTICES:
        i, j, k = EVEN_FACE_TRIPLE[l]
        faces[l] = -(edges[(i, l)] * edges[(j, l)] * edges[(k, l)])
    return ZTable(edges, faces)


class FlagTetrahedron:
    """Ordered generic 4-tuple of flags with cached coordinates."""

    def __init__(self, flags):
        flags = tuple(flags)
        if len(flags) != 4:
            raise ValueError("need exactly four flags")
        self.flags = flags
        xs = [fl.x for fl in flags]
        fs = [fl.f for fl in flags]
        self._floating = _is_floating(*xs, *fs)
        # genericity: no three points collinear, all cross pairings nonzero
        for l in VERTICES:
            i, j, k = EVEN_FACE_TRIPLE[l]
            d = det3(xs[i], xs[j], xs[k])
            scale = (_norm(xs[i]) * _norm(xs[j]) * _norm(xs[k])
                     if self._floating else 1.0)
            if not _nonzero(d, scale, self._floating):
                raise DegenerateConfiguration(
                    "points %s are collinear" % ((i, j, k),))
        for i in VERTICES:
            for j in VERTICES:
                if i != j:
                    pv = dot(fs[i], xs[j])
                    scale = (_norm(fs[i]) * _norm(xs[j])
                             if self._floating else 1.0)
                    if not _nonzero(pv, scale, self._floating):
                        raise DegenerateConfiguration(
                            "f_%d(x_%d) = 0" % (i, j))
        self._dets = {}
        edges = {(i, j): self._edge(i, j) for (i, j) in EDGES}
        faces = {}
        for l in VERTICES:
            i, j, k = EVEN_FACE_TRIPLE[l]
            faces[l] = triple_ratio(flags[i], flags[j], flags[k])
        self.z_table = ZTable(edges, faces)

    def _det(self, i, j, k):
        key = (i, j, k)
        if key not in self._dets:
            xs = self.flags
            self._dets[key] = det3(xs[i].x, xs[j].x, xs[k].x)
        return self._dets[key]

    def _edge(self, i, j):
        # z_ij = f_i(x_k) det(x_i,x_j,x_l) / (f_i(x_l) det(x_i,x_j,x_k)),
        # (i,j,k,l) even
        k, l = completion(i, j)
        f_i = self.flags[i].f
        num = dot(f_i, self.flags[k].x) * self._det(i, j, l)
        den = dot(f_i, self.flags[l].x) * self._det(i, j, k)
        return num / den

    def z_edge(self, i, j):
        return self.z_table.z_edge(i, j)

    def z_face(self, i, j, k):
        return self.z_table.z_face(i, j, k)

    def shapes(self):
        return self.z_table.shapes()


def edge_cross_ratio(tet: FlagTetrahedron, i: int, j: int):
    return tet.z_edge(i, j)


def normalize_tetrahedron(z01, z10, z23, z32) -> FlagTetrahedron:
    """The standard representative with the given shape parameters.

    Its vertices sit at the coordinate points and (1,1,1); extracting the
    four shapes gives back the inputs.
    """
    for s in (z01, z10, z23, z32):
        if s == 0 or s == 1:
            raise InvalidShape("shape parameter in {0, 1}")
    one = Fraction(1)
    t0 = one - 1 / z01
    t1 = one - z10
    t2 = z23
    t3 = 1 / (one - z32)
    flags = (
        Flag((1, 0, 0), (0, t0, -1)),
        Flag((0, 1, 0), (t1, 0, -1)),
        Flag((0, 0, 1), (t2, -1, 0)),
        Flag((1, 1, 1), (t3, one - t3, -1)),
    )
    return FlagTetrahedron(flags)


def a_coordinates(affine_flags) -> "ACoordinates":
    return ACoordinates(affine_flags)


class ACoordinates:
    """Pairings and determinants of a tetrahedron of affine flags.

    Face values are stored on the boundary-oriented triples, matching the
    face generators; a reversed triple negates the determinant.
    """

    def __init__(self, affine_flags):
        flags = tuple(affine_flags)
        tet = FlagTetrahedron(flags)  # genericity check
        self.tetrahedron = tet
        self.a_edges = {(i, j): dot(flags[i].f, flags[j].x)
                        for (i, j) in EDGES}
        self.a_faces = {}
        for l in VERTICES:
            i, j, k = BOUNDARY_FACE_TRIPLE[l]
            self.a_faces[l] = det3(flags[i].x, flags[j].x, flags[k].x)

    def a_edge(self, i, j):
        return self.a_edges[(i, j)]

    def a_face(self, i, j, k):
        l, s = face_class(i, j, k)
        v = self.a_faces[l]
        # stored orientation is the boundary one, which is odd
        return v if s == -1 else -v

    def vector16(self):
        """Values on the canonical 16 generators (12 edges, 4 boundary
        faces)."""
        return [self.a_edges[e] for e in EDGES] + [self.a_faces[l]
                                                   for l in VERTICES]

    def face_ratio(self, i, j, k):
        # z_ijk = a_ij a_jk a_ki / (a_ik a_ji a_kj)
        ae = self.a_edges
        return (ae[(i, j)] * ae[(j, k)] * ae[(k, i)]) / (
            ae[(i, k)] * ae[(j, i)] * ae[(k, j)])


def veronese_flag(p) -> Flag:
    """Flag tangent to the conic xz = y^2 at the image of [u : v].

    The covector pairs against the bilinear form of the conic.
    """
    u, v = p
    if u == 0 and v == 0:
        raise DegenerateConfiguration("[0 : 0] is not a projective point")
    return Flag((u * u, u * v, v * v), (v * v, -2 * u * v, u * u))


def hermitian_pairing(x, y):
    """The signature (2,1) pairing with antidiagonal matrix."""
    return (x[0] * conjugate(y[2]) + x[1] * conjugate(y[1])
            + x[2] * conjugate(y[0]))


def cr_flag(x) -> Flag:
    """Flag at a null point: the line is the complex tangent line there."""
    x = tuple(x)
    q = hermitian_pairing(x, x)
    if _is_floating(x):
        scale = _norm(x) ** 2
        if abs(to_complex(q)) > 1e-12 * scale:
            raise NotOnSphere("Hermitian norm %r is not null" % (q,))
    elif q != 0:
        raise NotOnSphere("Hermitian norm %r is not null" % (q,))
    f = (conjugate(x[2]), conjugate(x[1]), conjugate(x[0]))
    return Flag(x, f)


def sigma_involution(zt: ZTable) -> ZTable:
    """Conjugation-like involution whose fixed points are the hyperbolic
    tetrahedra; inverts every face 3-ratio."""
    edges = {}
    for (i, j) in EDGES:
        k, l = completion(i, j)
        zilj = zt.z_face(i, l, j)
        zijk = zt.z_face(i, j, k)
        if 1 + zilj == 0 or 1 + zijk == 0:
            raise SigmaUndefined("face 3-ratio equals -1")
        edges[(i, j)] = (zt.z_edge(j, i) * (1 + zilj)) / (zilj * (1 + zijk))
    faces = {l: 1 / zt.faces[l] for l in VERTICES}
    return ZTable(edges, faces)
