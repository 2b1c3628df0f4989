"""Consistency equations of a decorated complex and their solver.

A decoration holds four shape parameters per tetrahedron, one per
vertex: the cross-ratio at vertex i along the edge toward its partner
under the pairing 0<->1, 2<->3.  The remaining two cross-ratios at a
vertex are the pencil functions 1/(1-s) and 1-1/s of the same value,
so every edge coordinate z_ij is one of three fixed functions of a
single variable, and every equation is an integer exponent list over
(variable, function) pairs with a scalar target.

Equations come in three kinds.  Each interior edge class contributes
two: the product of z_ij over its wheel and the product of z_ji over
the same wheel, both equal to 1.  Each glued face contributes one: the
product of the six coordinates pointing at the two omitted vertices.
The minus signs of the two 3-ratio expansions cancel, which is why no
equation carries a sign.  Peripheral rows reuse the eigenvalue
exponents of the homology basis walks and equate them to prescribed
targets, all 1 in the unipotent case.

The same exponent lists are evaluated two ways.  Exactly: as field
products compared with the target, no tolerance.  Numerically: as sums
of logarithms with a nearest integer winding correction, solved by a
damped Newton iteration whose step is the minimum norm least squares
solution, so underdetermined systems move orthogonally to their
solution variety.
"""

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import QuadExt, is_exact, to_complex
from .bloch import scalar_to_json
from .complex3 import link_homology_basis
from .conventions import VERTICES, completion
from .errors import (NoConvergence, PathSingular, PoleEncountered,
                     SingularJacobian)
from .flags import derive_z_table
from .holonomy import eigenvalue_exponents

__all__ = [
    "Decoration", "Equation", "EquationSystem", "SolveOptions",
    "build_equations", "residual", "newton_solve", "solve_batch",
    "seed_vectors", "perturbed_vectors", "continue_family",
    "cluster_vectors", "figure_eight_structures", "classify_structure",
]

VERTEX_PARTNER = (1, 0, 3, 2)

TWO_PI = 2 * np.pi


def shape_function(i: int, j: int) -> int:
    """Which pencil function gives z_ij from the vertex i variable.

    0 is the identity, 1 is s -> 1/(1-s), 2 is s -> 1-1/s.
    """
    p = VERTEX_PARTNER[i]
    if j == p:
        return 0
    k, l = completion(i, p)
    if j == k:
        return 1
    if j == l:
        return 2
    raise ValueError("no edge coordinate z_%d%d" % (i, j))


def z_factor(t: int, i: int, j: int):
    return 4 * t + i, shape_function(i, j)


def _apply_function(func, s):
    if func == 0:
        return s
    if func == 1:
        return 1 / (1 - s)
    return 1 - 1 / s


# ----------------------------------------------------------- decoration

class Decoration:
    """Shape parameters for every tetrahedron of a complex.

    Scalars may be exact (Fraction, QuadExt) or floating complex; the
    full coordinate tables are derived on demand and cached.
    """

    def __init__(self, cx, shapes):
        shapes = tuple(tuple(row) for row in shapes)
        if len(shapes) != cx.n or any(len(row) != 4 for row in shapes):
            raise ValueError("need one shape 4-tuple per tetrahedron")
        self.complex = cx
        self.shapes = shapes
        self._tables = None

    @classmethod
    def from_vector(cls, cx, vec):
        vec = list(vec)
        if len(vec) != 4 * cx.n:
            raise ValueError("vector length is not four per tetrahedron")
        return cls(cx, [vec[4 * t:4 * t + 4] for t in range(cx.n)])

    def vector(self):
        return [s for row in self.shapes for s in row]

    def complex_vector(self) -> np.ndarray:
        return np.array([to_complex(s) for row in self.shapes for s in row])

    def is_exact(self) -> bool:
        return all(is_exact(s) for row in self.shapes for s in row)

    def z_tables(self):
        if self._tables is None:
            self._tables = tuple(derive_z_table(*row) for row in self.shapes)
        return self._tables

    def z_table(self, t):
        return self.z_tables()[t]

    def conjugated(self) -> "Decoration":
        out = []
        for row in self.shapes:
            new = []
            for s in row:
                if isinstance(s, QuadExt):
                    new.append(s.conj())
                elif is_exact(s):
                    new.append(s)
                else:
                    new.append(complex(s).conjugate())
            out.append(new)
        return Decoration(self.complex, out)

    def to_json(self):
        return [[scalar_to_json(s) for s in row] for row in self.shapes]

    def __repr__(self):
        return "Decoration(%d tetrahedra)" % len(self.shapes)


# ------------------------------------------------------------ equations

def _accumulate(pairs):
    out = {}
    for key, c in pairs:
        out[key] = out.get(key, 0) + c
    return tuple(sorted((k, c) for k, c in out.items() if c))


class Equation:
    """One multiplicative condition: product of factors equals target."""

    __slots__ = ("kind", "label", "factors", "target")

    def __init__(self, kind, label, factor_pairs, target=1):
        self.kind = kind
        self.label = label
        self.factors = _accumulate(factor_pairs)
        self.target = target

    def evaluate(self, shapes):
        """The monomial value at a flat shape list, exact or numeric."""
        out = 1
        for (var, func), c in self.factors:
            out = out * _apply_function(func, shapes[var]) ** c
        return out

    def __repr__(self):
        return "Equation(%s: %s)" % (self.kind, self.label)


def _exponent_factors(exponents):
    return [(z_factor(t, i, j), c) for (t, i, j), c in exponents.items()]


def _target_value(targets, link_index, name):
    if targets == "unipotent":
        return 1
    row = targets.get(link_index, {})
    return row.get(name, 1)


def build_equations(cx, boundary_targets=None) -> "EquationSystem":
    """Edge, face and optional peripheral rows for a parsed complex.

    boundary_targets is None for the internal system alone, "unipotent"
    for trivial peripheral eigenvalues, or a mapping from link index to
    a mapping of eigenvalue names (A, B, Astar, Bstar for torus links;
    C, Cstar for annuli) to target scalars, defaulting to 1.
    """
    eqs = []
    for idx, cls in enumerate(cx.edge_classes):
        t, (i, j) = min(cls)
        if not cx.is_interior_edge(t, i, j):
            continue
        wheel = cx.edge_wheel(t, i, j)
        fwd = [(z_factor(tt, a, b), 1) for tt, (a, b) in wheel]
        rev = [(z_factor(tt, b, a), 1) for tt, (a, b) in wheel]
        eqs.append(Equation("edge", "edge%d.fwd" % idx, fwd))
        eqs.append(Equation("edge", "edge%d.rev" % idx, rev))
    seen = set()
    for (t, f) in sorted(cx.pairing):
        t2, f2, _ = cx.pairing[(t, f)]
        key = frozenset(((t, f), (t2, f2)))
        if key in seen:
            continue
        seen.add(key)
        fac = [(z_factor(t, v, f), 1) for v in VERTICES if v != f]
        fac += [(z_factor(t2, v, f2), 1) for v in VERTICES if v != f2]
        eqs.append(Equation("face", "face%d.%d-%d.%d" % (t, f, t2, f2), fac))
    bases = {}
    if boundary_targets is not None:
        for idx, link in enumerate(cx.links):
            if link.kind not in ("torus", "annulus"):
                continue
            basis = link_homology_basis(link)
            bases[idx] = basis
            names = (("A", "Astar", basis.a), ("B", "Bstar", basis.b)) \
                if link.kind == "torus" else (("C", "Cstar", basis.a),)
            for plain, starred, path in names:
                ce, cse = eigenvalue_exponents(path)
                eqs.append(Equation(
                    "peripheral", "link%d.%s" % (idx, plain),
                    _exponent_factors(ce),
                    _target_value(boundary_targets, idx, plain)))
                eqs.append(Equation(
                    "peripheral", "link%d.%s" % (idx, starred),
                    _exponent_factors(cse),
                    _target_value(boundary_targets, idx, starred)))
    system = EquationSystem(cx, eqs)
    system.bases = bases
    return system


class EquationSystem:
    """Compiled equation list with vectorized numeric evaluation."""

    def __init__(self, cx, equations):
        self.complex = cx
        self.equations = tuple(equations)
        self.n_vars = 4 * cx.n
        self.bases = {}
        self._compile()

    def _compile(self):
        ptr = [0]
        var, func, coeff, logt = [], [], [], []
        for eq in self.equations:
            for (v, f), c in eq.factors:
                var.append(v)
                func.append(f)
                coeff.append(c)
            ptr.append(len(var))
            logt.append(cmath.log(to_complex(eq.target)))
        self._ptr = np.array(ptr)
        self._var = np.array(var, dtype=int)
        self._func = np.array(func, dtype=int)
        self._coeff = np.array(coeff, dtype=float)
        self._logt = np.array(logt, dtype=complex)

    def __len__(self):
        return len(self.equations)

    def labels(self):
        return [eq.label for eq in self.equations]

    # ------------------------------------------------- numeric route

    def residual_batch(self, S):
        """Log residuals and their winding integers at shape rows S.

        S has one row per start point; entries at poles produce
        non-finite residuals rather than raising.
        """
        S = np.asarray(S, dtype=complex)
        B = S.shape[0]
        K = len(self.equations)
        if K == 0:
            return (np.zeros((B, 0), dtype=complex),
                    np.zeros((B, 0), dtype=int))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            table = np.stack((np.log(S), -np.log(1 - S), np.log(1 - 1 / S)))
            terms = table[self._func, :, self._var] * self._coeff[:, None]
            raw = np.add.reduceat(terms, self._ptr[:-1], axis=0).T
        raw = raw - self._logt[None, :]
        with np.errstate(invalid="ignore"):
            w = np.round(raw.imag / TWO_PI)
        w = np.where(np.isfinite(w), w, 0.0)
        return raw - 1j * TWO_PI * w, w.astype(int)

    def jacobian_batch(self, S):
        """Derivative of the log residuals in the log shape variables."""
        S = np.asarray(S, dtype=complex)
        B = S.shape[0]
        K = len(self.equations)
        m = self.n_vars
        if K == 0:
            return np.zeros((B, 0, m), dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            dtab = np.stack((np.ones_like(S), S / (1 - S), 1 / (S - 1)))
            dterm = dtab[self._func, :, self._var] * self._coeff[:, None]
        eq_of = np.repeat(np.arange(K), np.diff(self._ptr))
        flat = np.zeros((K * m, B), dtype=complex)
        np.add.at(flat, eq_of * m + self._var, dterm)
        return flat.reshape(K, m, B).transpose(2, 0, 1)

    # --------------------------------------------------- exact route

    def evaluate_exact(self, decoration):
        """(label, value, target) per equation, as exact field products."""
        shapes = decoration.vector()
        return [(eq.label, eq.evaluate(shapes), eq.target)
                for eq in self.equations]


def residual(system: EquationSystem, decoration) -> np.ndarray:
    """Componentwise log residual vector at one decoration."""
    vec = decoration.complex_vector() \
        if isinstance(decoration, Decoration) \
        else np.asarray(decoration, dtype=complex)
    F, _ = system.residual_batch(vec[None, :])
    if not np.isfinite(F).all():
        raise PoleEncountered("a derived coordinate hit 0, 1 or infinity")
    return F[0]


# --------------------------------------------------------------- Newton

@dataclass
class SolveOptions:
    tol: float = 1e-12
    max_iter: int = 100
    halvings: int = 20
    svd_tol: float = 1e-10
    disc: float = 1e-8

    def admissible(self, S):
        """Mask of rows whose shapes stay clear of 0, 1 and infinity."""
        ok = np.isfinite(S).all(axis=1)
        ok &= (np.abs(S) > self.disc).all(axis=1)
        ok &= (np.abs(S - 1) > self.disc).all(axis=1)
        ok &= (np.abs(S) < 1 / self.disc).all(axis=1)
        return ok


STATUS_CONVERGED = 0
STATUS_STALLED = 1
STATUS_EXHAUSTED = 2


@dataclass
class SolveResult:
    """Batched Newton outcome; row i describes start vector i."""

    shapes: np.ndarray
    status: np.ndarray
    iterations: np.ndarray
    residual_norm: np.ndarray
    windings: np.ndarray

    def converged(self):
        return self.status == STATUS_CONVERGED

    def solutions(self):
        return self.shapes[self.converged()]


def _norms(F):
    if F.shape[1] == 0:
        return np.zeros(F.shape[0])
    out = np.abs(F).max(axis=1)
    return np.where(np.isfinite(out), out, np.inf)


def solve_batch(system: EquationSystem, starts,
                options: SolveOptions = None) -> SolveResult:
    """Damped least squares Newton from every row of starts.

    Runs all rows in lockstep on the log shape variables.  A step is
    the minimum norm solution of the linearized system; it is halved
    until the residual norm drops and the shapes stay off the excluded
    discs, and a row with no acceptable halving stalls.  Rows are
    deactivated once converged, stalled or out of iterations.
    """
    opts = options or SolveOptions()
    S = np.array(starts, dtype=complex)
    B, m = S.shape
    if m != system.n_vars:
        raise ValueError("start vectors have the wrong width")
    with np.errstate(divide="ignore", invalid="ignore"):
        U = np.log(S)
    F, W = system.residual_batch(np.exp(U))
    norm = _norms(F)
    status = np.full(B, STATUS_EXHAUSTED)
    status[norm <= opts.tol] = STATUS_CONVERGED
    bad = ~opts.admissible(S)
    status[bad & (status != STATUS_CONVERGED)] = STATUS_STALLED
    iters = np.zeros(B, dtype=int)
    for _ in range(opts.max_iter):
        active = np.flatnonzero(status == STATUS_EXHAUSTED)
        if active.size == 0:
            break
        J = system.jacobian_batch(np.exp(U[active]))
        finite = np.isfinite(J).all(axis=(1, 2))
        status[active[~finite]] = STATUS_STALLED
        active = active[finite]
        if active.size == 0:
            break
        J = J[finite]
        delta = -np.matmul(np.linalg.pinv(J, rcond=opts.svd_tol),
                           F[active][:, :, None])[:, :, 0]
        lam = np.ones(active.size)
        accepted = np.zeros(active.size, dtype=bool)
        for _ in range(opts.halvings + 1):
            todo = ~accepted
            if not todo.any():
                break
            rows = active[todo]
            trial = U[rows] + lam[todo, None] * delta[todo]
            with np.errstate(over="ignore"):
                St = np.exp(trial)
            Ft, Wt = system.residual_batch(St)
            ok = opts.admissible(St) & (_norms(Ft) < norm[rows])
            take = np.flatnonzero(todo)[ok]
            U[active[take]] = trial[ok]
            F[active[take]] = Ft[ok]
            W[active[take]] = Wt[ok]
            norm[active[take]] = _norms(Ft)[ok]
            accepted[take] = True
            lam[~accepted] *= 0.5
        iters[active[accepted]] += 1
        status[active[~accepted]] = STATUS_STALLED
        done = active[norm[active] <= opts.tol]
        status[done] = STATUS_CONVERGED
    return SolveResult(np.exp(U), status, iters, norm, W)


def newton_solve(system: EquationSystem, decoration,
                 options: SolveOptions = None) -> Decoration:
    """Solve from a single decoration; exact inputs that already satisfy
    the system come back unchanged with zero iterations."""
    opts = options or SolveOptions()
    vec = decoration.complex_vector() \
        if isinstance(decoration, Decoration) \
        else np.asarray([to_complex(s) for s in decoration])
    res = solve_batch(system, vec[None, :], opts)
    if res.status[0] == STATUS_CONVERGED:
        if res.iterations[0] == 0 and isinstance(decoration, Decoration):
            return decoration
        return Decoration.from_vector(system.complex, res.shapes[0])
    J = system.jacobian_batch(res.shapes[:1])[0]
    if np.isfinite(J).all():
        rank = int(np.linalg.matrix_rank(J, tol=opts.svd_tol))
        if rank == 0:
            raise SingularJacobian("Jacobian rank 0 at the final iterate")
    raise NoConvergence(
        "residual %.3e after %d iterations"
        % (res.residual_norm[0], res.iterations[0]))


# ------------------------------------------------------- seeds, clusters

def seed_vectors(system: EquationSystem, count, rng) -> np.ndarray:
    """Random start shapes: log moduli normal, arguments uniform."""
    size = (count, system.n_vars)
    return np.exp(rng.normal(0.0, 0.6, size) +
                  1j * rng.uniform(-np.pi, np.pi, size))


def perturbed_vectors(decoration, count, amplitude, rng) -> np.ndarray:
    """Starts near a decoration: uniform complex noise on each shape."""
    center = decoration.complex_vector() \
        if isinstance(decoration, Decoration) else np.asarray(decoration)
    size = (count, center.size)
    noise = rng.uniform(-amplitude, amplitude, size) \
        + 1j * rng.uniform(-amplitude, amplitude, size)
    return center[None, :] + noise


def cluster_vectors(vectors, radius):
    """Greedy clustering under the max norm; order-deterministic.

    Returns a list of mappings with the first member as representative,
    the member count and the member row indices.
    """
    clusters = []
    for idx, v in enumerate(np.asarray(vectors)):
        for cl in clusters:
            if np.abs(v - cl["representative"]).max() <= radius:
                cl["count"] += 1
                cl["members"].append(idx)
                break
        else:
            clusters.append({"representative": v, "count": 1,
                             "members": [idx]})
    return clusters


# ------------------------------------------------------- continuation

def _kernel_basis(J, svd_tol):
    _, sv, Vh = np.linalg.svd(J)
    rank = int((sv > svd_tol).sum())
    return rank, Vh[rank:].conj()


def continue_family(system: EquationSystem, decoration, tangent=0,
                    steps=20, step=1e-2,
                    options: SolveOptions = None):
    """Follow the solution variety from a solved decoration.

    tangent picks a kernel direction of the Jacobian at the start,
    either by index or as an explicit coefficient vector over the
    kernel basis.  Each step is a predictor along the carried tangent
    and a minimum norm Newton correction; a change in Jacobian rank or
    the loss of the tangent direction aborts with PathSingular.
    """
    opts = options or SolveOptions()
    vec = decoration.complex_vector() \
        if isinstance(decoration, Decoration) \
        else np.asarray(decoration, dtype=complex)
    F, _ = system.residual_batch(vec[None, :])
    if _norms(F)[0] > opts.tol:
        raise ValueError("continuation must start at a solved decoration")
    J = system.jacobian_batch(vec[None, :])[0]
    rank0, kernel = _kernel_basis(J, opts.svd_tol)
    if len(kernel) == 0:
        raise PathSingular("no tangent direction: the Jacobian has "
                           "full rank %d" % rank0)
    if np.ndim(tangent) == 0:
        direction = kernel[int(tangent)]
    else:
        direction = np.asarray(tangent, dtype=complex) @ kernel
    direction = direction / np.linalg.norm(direction)
    out = [decoration if isinstance(decoration, Decoration)
           else Decoration.from_vector(system.complex, vec)]
    u = np.log(vec)
    for n in range(steps):
        u_pred = u + step * direction
        res = solve_batch(system, np.exp(u_pred)[None, :], opts)
        if res.status[0] != STATUS_CONVERGED:
            raise PathSingular("corrector failed at step %d" % (n + 1))
        u = np.log(res.shapes[0])
        J = system.jacobian_batch(res.shapes[:1])[0]
        rank, kernel = _kernel_basis(J, opts.svd_tol)
        if rank != rank0:
            raise PathSingular(
                "Jacobian rank moved from %d to %d at step %d"
                % (rank0, rank, n + 1))
        overlap = kernel @ direction.conj()
        if np.linalg.norm(overlap) < 0.5:
            raise PathSingular("tangent direction lost at step %d" % (n + 1))
        direction = overlap.conj() @ kernel
        direction = direction / np.linalg.norm(direction)
        out.append(Decoration.from_vector(system.complex, res.shapes[0]))
    return out


# ------------------------------------------- known figure eight points

def _omega():
    return QuadExt(Fraction(1, 2), Fraction(1, 2), -3)


def _q7(a, b, den):
    return QuadExt(Fraction(a, den), Fraction(b, den), -7)


def figure_eight_structures():
    """The unipotent solution set of the bundled figure eight document.

    Three families of exact shape vectors in the order (first
    tetrahedron shapes, second tetrahedron shapes).  Each family is
    closed under entrywise conjugation; the omega family collects the
    two points whose entries lie in the Eisenstein field, the other
    two live in the field with discriminant -7.
    """
    w = _omega()
    wb = w.conj()
    omega_pts = [
        (w,) * 8,
        (w, wb, w, wb, w, wb, w, wb),
    ]
    first = [(_q7(5, -1, 4), _q7(3, -1, 8), _q7(5, 1, 4), _q7(3, 1, 8),
              _q7(3, -1, 8), _q7(5, -1, 4), _q7(3, 1, 8), _q7(5, 1, 4))]
    second = [(_q7(-1, 1, 4), _q7(3, -1, 2), _q7(-1, -1, 4), _q7(3, 1, 2),
               _q7(3, 1, 2), _q7(-1, -1, 4), _q7(3, -1, 2), _q7(-1, 1, 4))]
    out = {}
    for name, pts in (("omega", omega_pts), ("sqrt7.first", first),
                      ("sqrt7.second", second)):
        full = list(pts)
        for p in pts:
            q = tuple(s.conj() for s in p)
            if q not in full:
                full.append(q)
        out[name] = tuple(full)
    return out


def classify_structure(vector, tol=1e-6):
    """Name of the standard family a shape vector belongs to, or None."""
    v = np.asarray([to_complex(s) for s in vector])
    for name, points in figure_eight_structures().items():
        for p in points:
            target = np.array([to_complex(s) for s in p])
            if v.shape == target.shape and np.abs(v - target).max() <= tol:
                return name
    return None
