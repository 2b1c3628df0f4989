"""Pre-Bloch elements, the wedge group over the rationals, and volumes.

The scissors-congruence side of the package: formal sums [z], the
Bloch-Wigner volume, the exact wedge x /\ y in Q* /\ Q* with 2-torsion
discarded but flagged, the boundary map delta([z]) = z /\ (1-z), and the
face invariants W built from affine coordinates.
"""

import cmath
import math
from fractions import Fraction

from .arith import bloch_wigner, factor_signed, is_exact, to_complex
from .conventions import BOUNDARY_FACE_TRIPLE, VERTICES
from .errors import (DegenerateFiveTerm, FamilyTooShort, InvalidShape,
                     NonRationalSupport, OddPairing)


def _scalar_key(z):
    # hashable canonical key; exact scalars hash compatibly already
    return z


def scalar_to_json(z):
    from .arith import QuadExt
    if isinstance(z, QuadExt):
        return "%s+%s√%s" % (z.a, z.b, z.m)
    if isinstance(z, Fraction) or isinstance(z, int):
        q = Fraction(z)
        return "%d/%d" % (q.numerator, q.denominator)
    return repr(z)


class PreBlochElement:
    """Finite integer combination of scalars, none equal to 0 or 1."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        out = {}
        for z, c in (terms or {}).items():
            if z == 0 or z == 1:
                raise InvalidShape("pre-Bloch generator in {0, 1}")
            if c:
                k = _scalar_key(z)
                out[k] = out.get(k, 0) + c
        self.terms = {z: c for z, c in out.items() if c}

    @classmethod
    def generator(cls, z, coefficient=1):
        return cls({z: coefficient})

    def __add__(self, other):
        out = dict(self.terms)
        for z, c in other.terms.items():
            out[z] = out.get(z, 0) + c
        return PreBlochElement(out)

    def __neg__(self):
        return PreBlochElement({z: -c for z, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int):
        return PreBlochElement({z: n * c for z, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, PreBlochElement) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "PreBloch(0)"
        bits = ("%+d[%r]" % (c, z) for z, c in self.terms.items())
        return "PreBloch(%s)" % " ".join(bits)

    def support(self):
        return list(self.terms)

    def to_json(self):
        return [{"value": scalar_to_json(z), "coefficient": c}
                for z, c in self.terms.items()]


def beta(t) -> PreBlochElement:
    """The pre-Bloch class: sum of [shape] over the four vertex parameters,
    summed over all tetrahedra for a decorated complex."""
    tables = None
    if hasattr(t, "z_tables"):
        tables = list(t.z_tables())
    elif hasattr(t, "z_table"):
        tables = [t.z_table]
    elif hasattr(t, "shapes"):
        tables = [t]
    if tables is None:
        raise TypeError("expected a tetrahedron, table or decoration")
    out = PreBlochElement()
    for zt in tables:
        for s in zt.shapes():
            out = out + PreBlochElement.generator(s)
    return out


def volume(x: PreBlochElement) -> float:
    return sum(c * bloch_wigner(to_complex(z))
               for z, c in x.terms.items()) / 4.0


def five_term(x, y) -> PreBlochElement:
    """[x] - [y] + [y/x] - [(1-1/x)/(1-1/y)] + [(1-x)/(1-y)].

    Defined when x, y avoid {0, 1} and x != y; its volume vanishes and its
    wedge boundary is exactly zero.
    """
    for v in (x, y):
        if v == 0 or v == 1:
            raise DegenerateFiveTerm("argument in {0, 1}")
    if x == y:
        raise DegenerateFiveTerm("equal arguments collapse the relation")
    args = (x, y, y / x, (1 - 1 / x) / (1 - 1 / y), (1 - x) / (1 - y))
    signs = (1, -1, 1, -1, 1)
    out = PreBlochElement()
    for v, s in zip(args, signs):
        out = out + PreBlochElement.generator(v, s)
    return out


# ------------------------------------------------------------- wedge group

def _rational(z) -> Fraction:
    if isinstance(z, bool) or not is_exact(z):
        raise NonRationalSupport("exact wedge needs rational scalars, got %r"
                                 % (z,))
    if not isinstance(z, (int, Fraction)):
        raise NonRationalSupport("exact wedge is over the rationals, got %r"
                                 % (z,))
    return Fraction(z)


class WedgeElement:
    """Normal form in Q* /\ Q* modulo 2-torsion.

    Free part: integer combination of p /\ q over primes p < q.  The
    (-1) /\ p components are 2-torsion; they are dropped and the drop is
    recorded in `torsion_dropped`.  Equality compares free parts.
    """

    __slots__ = ("free", "torsion_dropped")

    def __init__(self, free=None, torsion_dropped=False):
        self.free = {pq: c for pq, c in (free or {}).items() if c}
        self.torsion_dropped = bool(torsion_dropped)

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def wedge(cls, x, y) -> "WedgeElement":
        x, y = _rational(x), _rational(y)
        sx, ex = factor_signed(x)
        sy, ey = factor_signed(y)
        free = {}
        for p, a in ex.items():
            for q, b in ey.items():
                if p == q:
                    continue
                key, coeff = ((p, q), a * b) if p < q else ((q, p), -a * b)
                free[key] = free.get(key, 0) + coeff
        # (-1) /\ p parities decide whether torsion is discarded
        dropped = False
        if sy < 0 and any(a % 2 for a in ex.values()):
            dropped = True
        if sx < 0 and any(b % 2 for b in ey.values()):
            dropped = True
        return cls(free, dropped)

    def __add__(self, other):
        free = dict(self.free)
        for pq, c in other.free.items():
            free[pq] = free.get(pq, 0) + c
        return WedgeElement(free, self.torsion_dropped or other.torsion_dropped)

    def __neg__(self):
        return WedgeElement({pq: -c for pq, c in self.free.items()},
                            self.torsion_dropped)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int):
        return WedgeElement({pq: n * c for pq, c in self.free.items()},
                            self.torsion_dropped)

    def __eq__(self, other):
        return isinstance(other, WedgeElement) and self.free == other.free

    def __bool__(self):
        return bool(self.free)

    def is_zero(self):
        return not self.free

    def __repr__(self):
        if not self.free:
            return "Wedge(0%s)" % ("; torsion dropped" if self.torsion_dropped
                                   else "")
        bits = ("%+d(%d∧%d)" % (c, p, q)
                for (p, q), c in sorted(self.free.items()))
        return "Wedge(%s%s)" % (" ".join(bits),
                                "; torsion dropped" if self.torsion_dropped
                                else "")

    def to_json(self):
        return {"free": [{"p": p, "q": q, "coefficient": c}
                         for (p, q), c in sorted(self.free.items())],
                "torsion_dropped": self.torsion_dropped}


def delta(x: PreBlochElement) -> WedgeElement:
    """Boundary map [z] -> z /\ (1-z), exact over the rationals."""
    out = WedgeElement.zero()
    for z, c in x.terms.items():
        q = _rational(z)
        out = out + c * WedgeElement.wedge(q, 1 - q)
    return out


class BilinearPairingSpec:
    """Skew integer matrix over a fixed index set."""

    def __init__(self, index, matrix):
        self.index = tuple(index)
        n = len(self.index)
        self.matrix = [list(map(int, row)) for row in matrix]
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise ValueError("matrix shape does not match index set")
        for a in range(n):
            for b in range(n):
                if self.matrix[a][b] != -self.matrix[b][a]:
                    raise OddPairing("pairing matrix is not skew-symmetric")


def pairing_wedge(values, spec: BilinearPairingSpec) -> WedgeElement:
    """Half the double sum of eps_ab v_a /\ v_b.

    Skewness cancels the half against double counting, so the result is an
    exact integer combination.
    """
    vals = [values[k] for k in spec.index]
    out = WedgeElement.zero()
    n = len(vals)
    for a in range(n):
        for b in range(a + 1, n):
            c = spec.matrix[a][b]
            if c:
                out = out + c * WedgeElement.wedge(vals[a], vals[b])
    return out


def w_face(a, face) -> WedgeElement:
    """Wedge invariant of one oriented face from affine coordinates."""
    i, j, k = face
    ae = a.a_edge
    big = (ae(k, i) * ae(j, k) * ae(i, j)) / (ae(i, k) * ae(k, j) * ae(j, i))
    out = WedgeElement.wedge(a.a_face(i, j, k), big)
    out = out + WedgeElement.wedge(ae(i, j), ae(i, k))
    out = out + WedgeElement.wedge(ae(k, i), ae(k, j))
    out = out + WedgeElement.wedge(ae(j, k), ae(j, i))
    return out


def w_total(a) -> WedgeElement:
    """Sum of the four boundary-oriented face invariants."""
    out = WedgeElement.zero()
    for l in VERTICES:
        out = out + w_face(a, BOUNDARY_FACE_TRIPLE[l])
    return out


# ------------------------------------------------- volume variation check

def _im_dlog_wedge_log(f_prev, f_next, g_mid, g_prev, g_next, f_mid, h):
    # Im(dlog /\ log)(f /\ g) ~ Im(log|g| dlog f - log|f| dlog g)
    dlf = cmath.log(f_next / f_prev) / (2 * h)
    dlg = cmath.log(g_next / g_prev) / (2 * h)
    return (math.log(abs(g_mid)) * dlf - math.log(abs(f_mid)) * dlg).imag


def volume_variation_check(members, step) -> dict:
    """Central-difference volume derivative against the peripheral 1-form.

    Each member is a mapping with keys "volume" (float) and "pairs", a list
    of mappings with complex entries "A", "B", "Astar", "Bstar" for each
    symplectic basis pair.  Returns the worst absolute and relative
    deviation over the interior members.
    """
    if len(members) < 3:
        raise FamilyTooShort("need at least three members for a derivative")
    h = float(step)
    worst = 0.0
    worst_rel = 0.0
    rows = []
    for n in range(1, len(members) - 1):
        prev, mid, nxt = members[n - 1], members[n], members[n + 1]
        dvol = (nxt["volume"] - prev["volume"]) / (2 * h)
        form = 0.0
        for pp, pm, pn in zip(prev["pairs"], mid["pairs"], nxt["pairs"]):
            for fa, fb, w in (("A", "B", 2), ("Astar", "Bstar", 2),
                              ("Astar", "B", 1), ("A", "Bstar", 1)):
                form += w * _im_dlog_wedge_log(
                    pp[fa], pn[fa], pm[fb], pp[fb], pn[fb], pm[fa], h)
        form /= 12.0
        dev = abs(dvol - form)
        scale = max(abs(dvol), abs(form), 1e-30)
        rows.append({"index": n, "finite_difference": dvol,
                     "one_form": form, "deviation": dev})
        worst = max(worst, dev)
        worst_rel = max(worst_rel, dev / scale)
    return {"rows": rows, "max_deviation": worst,
            "max_relative_deviation": worst_rel, "step": h}
