"""Quasi-simplicial 3-complexes: tetrahedra glued in pairs along faces.

A document names N tetrahedra, each carrying the fixed vertex order
(0,1,2,3), and a list of face gluings.  Face f of a tetrahedron is the face
omitting vertex f.  A gluing carries a vertex bijection, written as a
permutation of (0,1,2,3) sending the glued face onto the target face.  The
permutation must be odd, so that the gluing reverses the boundary
orientation of the face and the tetrahedra stay coherently oriented.

Derived at parse time:

* edge classes: orbits of unordered tetrahedron edges under the gluings.
  An interior edge has a cyclic wheel of (tetrahedron, oriented edge)
  slots around it, one wheel per orientation; a boundary edge has a fan.
* vertex classes and their link surfaces, triangulated by one triangle per
  tetrahedron corner.
* on each link, the transverse cell structure whose edges are the arcs
  c[t,i,j] turning left around the edge ij (oriented from j to i) inside
  tetrahedron t, and the dual structure whose edges join triangle centers
  to wheel points.  Chains in either structure are dicts keyed by the arc
  (t,i,j); the intersection number of a chain with a dual chain is the dot
  product of coefficients.

Paths in the complex are tracked through marked points: (t, (a,b,c))
stands for the projective frame near vertex a on the face {a,b,c} of
tetrahedron t.  A left turn around the edge (a,b) sends (a,b,c) to
(a,b,d); a right turn around (a,c) sends it to (a,d,c); a rotation sends
it to (b,c,a).  Turns need the even frame, (a,b,c,d) an even permutation.
A glued face identifies a marker with its relabeling in the partner
tetrahedron, and consecutive steps compose only through that
identification.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import intlinalg
from .conventions import VERTICES, completion, invert_perm, perm_parity
from .errors import (Backtracking, BoundaryEdge, NonOrientable,
                     OrderingMismatch, SchemaError, SphereLink,
                     UnmatchedFace, UnsupportedLinks)

_GLUING_KEYS = ("tet", "face", "to_tet", "to_face", "vertex_map")


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        root = self.parent.setdefault(x, x)
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return tuple(tuple(sorted(v)) for _, v in sorted(out.items()))


def _check_int(value, what, upper=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError("%s must be an integer, got %r" % (what, value))
    if upper is not None and not 0 <= value < upper:
        raise SchemaError("%s out of range: %r" % (what, value))
    return value


def parse_triangulation(document):
    """Build a TriangulationComplex from a JSON document (dict or text)."""
    doc = document
    if isinstance(doc, (bytes, bytearray)):
        doc = doc.decode("utf-8", errors="replace")
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaError("not valid JSON: %s" % exc) from None
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object")
    unknown = set(doc) - {"tetrahedra", "gluings"}
    if unknown:
        raise SchemaError("unknown keys: %s" % ", ".join(sorted(unknown)))
    if "tetrahedra" not in doc:
        raise SchemaError("missing key 'tetrahedra'")
    n = _check_int(doc["tetrahedra"], "'tetrahedra'")
    if n < 1:
        raise SchemaError("'tetrahedra' must be positive")
    rows = doc.get("gluings", [])
    if not isinstance(rows, list):
        raise SchemaError("'gluings' must be a list")

    pairing = {}
    for row in rows:
        if not isinstance(row, dict) or set(row) != set(_GLUING_KEYS):
            raise SchemaError("gluing row must have keys %s" % (_GLUING_KEYS,))
        t = _check_int(row["tet"], "'tet'", n)
        f = _check_int(row["face"], "'face'", 4)
        t2 = _check_int(row["to_tet"], "'to_tet'", n)
        f2 = _check_int(row["to_face"], "'to_face'", 4)
        vm = row["vertex_map"]
        if not isinstance(vm, (list, tuple)) or len(vm) != 4:
            raise SchemaError("vertex_map must be a list of 4 integers")
        for v in vm:
            _check_int(v, "vertex_map entry", 4)
        pi = tuple(vm)
        if sorted(pi) != [0, 1, 2, 3]:
            raise SchemaError("vertex_map is not a permutation: %r" % (vm,))
        if pi[f] != f2:
            raise OrderingMismatch(
                "vertex_map %r does not carry face %d of tet %d onto face %d"
                % (vm, f, t, f2))
        if perm_parity(pi) == 0:
            raise NonOrientable(
                "gluing of tet %d face %d has an even vertex bijection, so "
                "it does not reverse the face orientation; relabel one side"
                % (t, f))
        for side, target in (((t, f), (t2, f2, pi)),
                             ((t2, f2), (t, f, invert_perm(pi)))):
            if side in pairing and pairing[side] != target:
                raise UnmatchedFace("face %r glued more than once" % (side,))
            pairing[side] = target
    return TriangulationComplex(n, pairing)


def bundled_document(name: str) -> dict:
    """Load a packaged example triangulation document by name."""
    from importlib import resources
    if name.endswith(".json"):
        name = name[:-5]
    path = resources.files("flagtet").joinpath("data").joinpath(name + ".json")
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SchemaError("no bundled triangulation named %r" % name) from None
    return json.loads(text)


class TriangulationComplex:
    """Immutable glued complex with eagerly derived classes and links."""

    def __init__(self, n: int, pairing: dict):
        self.n = n
        self.pairing = dict(pairing)
        self.boundary_faces = tuple(sorted(
            (t, f) for t in range(n) for f in VERTICES
            if (t, f) not in self.pairing))
        self._build_edge_classes()
        self._build_vertex_classes()
        self.links = tuple(LinkSurface(self, idx)
                           for idx in range(len(self.vertex_classes)))

    # ------------------------------------------------------ serialization

    def to_document(self) -> dict:
        rows = []
        for (t, f), (t2, f2, pi) in sorted(self.pairing.items()):
            if (t, f) <= (t2, f2):
                rows.append({"tet": t, "face": f, "to_tet": t2,
                             "to_face": f2, "vertex_map": list(pi)})
        return {"tetrahedra": self.n, "gluings": rows}

    def canonical_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True,
                          separators=(", ", ": "))

    # ------------------------------------------------------ edge classes

    def _build_edge_classes(self):
        uf = _UnionFind()
        for t in range(self.n):
            for i in VERTICES:
                for j in VERTICES:
                    if i < j:
                        uf.find((t, (i, j)))
        for (t, f), (t2, f2, pi) in self.pairing.items():
            verts = [v for v in VERTICES if v != f]
            for a in verts:
                for b in verts:
                    if a < b:
                        img = tuple(sorted((pi[a], pi[b])))
                        uf.union((t, (a, b)), (t2, img))
        self.edge_classes = uf.classes()
        self.edge_class_index = {}
        for idx, cls in enumerate(self.edge_classes):
            for member in cls:
                self.edge_class_index[member] = idx

    def edge_class_of(self, t: int, i: int, j: int) -> int:
        return self.edge_class_index[(t, tuple(sorted((i, j))))]

    def _wheel_step(self, t, i, j, backwards=False):
        # forwards crosses the head face of the left turn around (i, j),
        # backwards its tail face
        k, l = completion(i, j)
        face = l if backwards else k
        glued = self.pairing.get((t, face))
        if glued is None:
            return None
        t2, _, pi = glued
        return (t2, (pi[i], pi[j]))

    def edge_wheel(self, t: int, i: int, j: int):
        """Cyclic wheel of (tet, oriented edge) slots around an interior
        edge, starting at (t, (i, j)).

        The reversed orientation walks the same wheel the other way.
        Raises BoundaryEdge when the walk reaches an unglued face.
        """
        start = (t, (i, j))
        out = []
        cur = start
        while True:
            out.append(cur)
            nxt = self._wheel_step(cur[0], *cur[1])
            if nxt is None:
                raise BoundaryEdge(
                    "edge (%d; %d%d) meets the boundary" % (t, i, j))
            if nxt == start:
                return out
            cur = nxt

    def edge_fan(self, t: int, i: int, j: int):
        """Fan of (tet, oriented edge) slots around a boundary edge."""
        start = (t, (i, j))
        back = []
        cur = start
        while True:
            prev = self._wheel_step(cur[0], *cur[1], backwards=True)
            if prev is None:
                break
            if prev == start:
                raise ValueError(
                    "edge (%d; %d%d) is interior; it has a wheel, not a fan"
                    % (t, i, j))
            back.append(prev)
            cur = prev
        fwd = [start]
        cur = start
        while True:
            nxt = self._wheel_step(cur[0], *cur[1])
            if nxt is None:
                break
            fwd.append(nxt)
            cur = nxt
        return list(reversed(back)) + fwd

    def is_interior_edge(self, t: int, i: int, j: int) -> bool:
        cur = (t, (i, j))
        while True:
            cur = self._wheel_step(cur[0], *cur[1])
            if cur is None:
                return False
            if cur == (t, (i, j)):
                return True

    # ----------------------------------------------------- vertex classes

    def _build_vertex_classes(self):
        uf = _UnionFind()
        for t in range(self.n):
            for i in VERTICES:
                uf.find((t, i))
        for (t, f), (t2, f2, pi) in self.pairing.items():
            for i in VERTICES:
                if i != f:
                    uf.union((t, i), (t2, pi[i]))
        self.vertex_classes = uf.classes()
        self.vertex_class_index = {}
        for idx, cls in enumerate(self.vertex_classes):
            for member in cls:
                self.vertex_class_index[member] = idx

    def link_of(self, t: int, i: int) -> "LinkSurface":
        return self.links[self.vertex_class_index[(t, i)]]


# --------------------------------------------------------------- markers

def _frame_missing(frame):
    a, b, c = frame
    return 6 - a - b - c


def _even_frame(a, rest, side):
    b, c = rest
    if perm_parity((a, b, c, side)) == 0:
        return (a, b, c)
    return (a, c, b)


def _marker_partner(cx, marker):
    """The same marked point relabeled across a glued face, or None."""
    t, frame = marker
    glued = cx.pairing.get((t, _frame_missing(frame)))
    if glued is None:
        return None
    t2, _, pi = glued
    return (t2, tuple(pi[v] for v in frame))


@dataclass(frozen=True)
class LinkPath:
    """A path through marked points, as explicit turn and rotation steps.

    Each step is ("left", t, (a,b,c)), ("right", t, (a,b,c)) or
    ("rot", t, (a,b,c)), acting from the marker it names.  Left turns
    around (a,b) end at (a,b,d); right turns around (a,c) end at (a,d,c);
    rotations end at (b,c,a).
    """

    steps: tuple

    @staticmethod
    def step_end(step):
        kind, t, (a, b, c) = step
        d = 6 - a - b - c
        if kind == "left":
            return (t, (a, b, d))
        if kind == "right":
            return (t, (a, d, c))
        if kind == "rot":
            return (t, (b, c, a))
        raise ValueError("unknown step kind %r" % (kind,))

    @staticmethod
    def step_arc(step):
        """(arc key, coefficient) for a turn step, None for a rotation."""
        kind, t, (a, b, c) = step
        if kind == "left":
            return (t, a, b), 1
        if kind == "right":
            return (t, a, c), -1
        return None

    def start(self):
        return (self.steps[0][1], self.steps[0][2])

    def markers(self):
        """Markers visited: each step's start, then the final end."""
        out = [(t, frame) for _, t, frame in self.steps]
        out.append(self.step_end(self.steps[-1]))
        return tuple(out)

    def is_closed(self, cx) -> bool:
        end = self.step_end(self.steps[-1])
        return self.start() in (end, _marker_partner(cx, end))

    def validate(self, cx, closed=False):
        """Check step legality and marker chaining; Backtracking on failure."""
        if not self.steps:
            raise Backtracking("empty path")
        for step in self.steps:
            if len(step) != 3:
                raise Backtracking("malformed step %r" % (step,))
            kind, t, frame = step
            if kind not in ("left", "right", "rot"):
                raise Backtracking("unknown step kind %r" % (kind,))
            if not isinstance(t, int) or not 0 <= t < cx.n \
                    or len(frame) != 3 or len(set(frame)) != 3 \
                    or not set(frame) <= set(VERTICES):
                raise Backtracking("malformed marker in %r" % (step,))
            if kind in ("left", "right"):
                a, b, c = frame
                if perm_parity((a, b, c, 6 - a - b - c)) != 0:
                    raise Backtracking(
                        "turn from the odd frame %r; cross the face first"
                        % (step,))
        pairs = list(zip(self.steps, self.steps[1:]))
        if closed:
            pairs.append((self.steps[-1], self.steps[0]))
        for prev, nxt in pairs:
            end = self.step_end(prev)
            here = (nxt[1], nxt[2])
            if here == end or here == _marker_partner(cx, end):
                continue
            raise Backtracking(
                "markers do not chain: %r ends at %r, next starts at %r"
                % (prev, end, here))
        return True

    def chain(self) -> dict:
        """The path as a chain of left-turn arcs, keyed (t, i, j)."""
        out = {}
        for step in self.steps:
            arc = self.step_arc(step)
            if arc is not None:
                key, coeff = arc
                out[key] = out.get(key, 0) + coeff
        return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------- link surface

class LinkSurface:
    """The link of a vertex class, with its triangulation and cell data.

    Triangles are the corners (t, i) of the class.  The side of triangle
    (t, i) on face f is keyed (t, i, f); glued sides are identified.  The
    arc c[t,i,j] crosses the triangle from the side its left turn enters
    through to the side it leaves through.  Wheel points are orbits of
    triangle corners (t, i, j).
    """

    def __init__(self, cx: TriangulationComplex, class_id: int):
        self.complex = cx
        self.class_id = class_id
        self.corners = cx.vertex_classes[class_id]

        side_uf = _UnionFind()
        corner_uf = _UnionFind()
        self.side_partner = {}
        for (t, i) in self.corners:
            for f in VERTICES:
                if f == i:
                    continue
                side_uf.find((t, i, f))
                glued = cx.pairing.get((t, f))
                if glued is None:
                    self.side_partner[(t, i, f)] = None
                else:
                    t2, f2, pi = glued
                    self.side_partner[(t, i, f)] = (t2, pi[i], f2)
                    side_uf.union((t, i, f), (t2, pi[i], f2))
            for j in VERTICES:
                if j != i:
                    corner_uf.find((t, i, j))
        for (t, i, f), partner in self.side_partner.items():
            if partner is None:
                continue
            t2, i2, f2 = partner
            pi = cx.pairing[(t, f)][2]
            for j in VERTICES:
                if j not in (i, f):
                    corner_uf.union((t, i, j), (t2, i2, pi[j]))

        self.side_orbits = side_uf.classes()
        self.side_orbit_index = {}
        for idx, orbit in enumerate(self.side_orbits):
            for member in orbit:
                self.side_orbit_index[member] = idx
        self.boundary_sides = tuple(sorted(
            s for s, p in self.side_partner.items() if p is None))

        self.wheel_orbits = corner_uf.classes()
        self.wheel_orbit_index = {}
        for idx, orbit in enumerate(self.wheel_orbits):
            for member in orbit:
                self.wheel_orbit_index[member] = idx
        self.interior_wheels = tuple(
            idx for idx, orbit in enumerate(self.wheel_orbits)
            if all(self.side_partner[(t, i, f)] is not None
                   for (t, i, j) in orbit
                   for f in VERTICES if f not in (i, j)))

        self.arcs = tuple((t, i, j) for (t, i) in self.corners
                          for j in VERTICES if j != i)
        self.arc_index = {arc: pos for pos, arc in enumerate(self.arcs)}
        self.arc_ends = {}
        for (t, i, j) in self.arcs:
            k, l = completion(i, j)
            self.arc_ends[(t, i, j)] = (
                self.side_orbit_index[(t, i, l)],
                self.side_orbit_index[(t, i, k)])

        # triangulation count: corner points, sides, triangles
        self.euler = (len(self.wheel_orbits) - len(self.side_orbits)
                      + len(self.corners))
        self.closed = not self.boundary_sides
        if self.closed:
            if self.euler == 2:
                self.kind = "sphere"
            elif self.euler == 0:
                self.kind = "torus"
            else:
                self.kind = "genus-%d" % ((2 - self.euler) // 2)
        else:
            self.kind = "annulus" if self.euler == 0 else "boundary"

        # two-cells of the transverse structure: one around each triangle
        # center, one around each interior wheel point
        self.cells2 = []
        for (t, i) in self.corners:
            self.cells2.append((("center", t, i),
                                {(t, i, j): 1 for j in VERTICES if j != i}))
        for idx in self.interior_wheels:
            self.cells2.append((("wheel", idx),
                                {m: -1 for m in self.wheel_orbits[idx]}))
        self._homology_cache = None

    # chains are dicts keyed by arc; vectors follow self.arcs order
    def chain_vector(self, chain: dict):
        v = [0] * len(self.arcs)
        for key, coeff in chain.items():
            v[self.arc_index[key]] += coeff
        return v

    def boundary_matrix(self):
        rows = [[0] * len(self.arcs) for _ in self.side_orbits]
        for pos, arc in enumerate(self.arcs):
            tail, head = self.arc_ends[arc]
            rows[head][pos] += 1
            rows[tail][pos] -= 1
        return rows

    def intersection(self, chain: dict, dual_chain: dict) -> int:
        """Pairing of a chain of arcs with a chain of dual edges.

        The dual edge keyed (t,i,j) joins the center of triangle (t,i) to
        the wheel point of the corner (t,i,j) and crosses exactly the arc
        c[t,i,j], positively.
        """
        total = 0
        for key, coeff in chain.items():
            total += coeff * dual_chain.get(key, 0)
        return total

    def dual_boundary(self, dual_chain: dict):
        """Boundary of a dual chain: coefficients on wheels and centers."""
        out = {}
        for (t, i, j), coeff in dual_chain.items():
            w = ("wheel", self.wheel_orbit_index[(t, i, j)])
            c = ("center", t, i)
            out[w] = out.get(w, 0) + coeff
            out[c] = out.get(c, 0) - coeff
        return {k: v for k, v in out.items() if v}

    # ---------------------------------------------------------- homology

    def _homology(self):
        if self._homology_cache is not None:
            return self._homology_cache
        d1 = self.boundary_matrix()
        kernel = intlinalg.integer_kernel(d1)
        k = len(kernel)
        kmat = [[kernel[col][row] for col in range(k)]
                for row in range(len(self.arcs))]
        rels = []
        for _, chain in self.cells2:
            x = intlinalg.integer_solve(kmat, self.chain_vector(chain))
            if x is None:
                raise AssertionError("two-cell boundary is not a cycle")
            rels.append(x)
        relmat = [[rels[col][row] for col in range(len(rels))]
                  for row in range(k)]
        D, U, _ = intlinalg.smith_normal_form(relmat)
        diag = [D[i][i] if i < min(k, len(rels)) else 0 for i in range(k)]
        free_pos = [i for i in range(k) if diag[i] == 0]
        uinv = intlinalg.unimodular_inverse(U) if k else []
        basis_chains = []
        for pos in free_pos:
            coeffs = [uinv[i][pos] for i in range(k)]
            vec = [sum(coeffs[col] * kernel[col][row] for col in range(k))
                   for row in range(len(self.arcs))]
            basis_chains.append(vec)
        self._homology_cache = {
            "kernel": kernel, "kmat": kmat, "U": U, "diag": diag,
            "free_pos": free_pos, "basis": basis_chains,
        }
        return self._homology_cache

    def homology_rank(self) -> int:
        return len(self._homology()["free_pos"])

    def cycle_class(self, chain: dict):
        """Coordinates of a cycle in the free homology basis."""
        h = self._homology()
        x = intlinalg.integer_solve(h["kmat"], self.chain_vector(chain))
        if x is None:
            raise ValueError("chain is not a cycle")
        y = intlinalg.mat_vec(h["U"], x)
        for i, d in enumerate(h["diag"]):
            if d > 1 and y[i] % d:
                raise ValueError("cycle has a torsion component")
        return tuple(y[i] for i in h["free_pos"])

    # -------------------------------------------------- marker walk layer

    def _states(self):
        """Even frames (t,(a,b,c)), one per (corner, resting side)."""
        out = []
        for (t, i) in self.corners:
            for side in VERTICES:
                if side == i:
                    continue
                rest = tuple(v for v in VERTICES if v not in (i, side))
                out.append((t, _even_frame(i, rest, side)))
        return out

    def _move(self, state, letter):
        """One turn plus the face identification that follows it.

        Returns (next_state, step, arc_key, sign, vertex_map, next_tet),
        or None when the turn exits through an unglued face.
        """
        t, (a, b, c) = state
        if letter == "L":
            step = ("left", t, (a, b, c))
            arc, sign = (t, a, b), 1
        else:
            step = ("right", t, (a, b, c))
            arc, sign = (t, a, c), -1
        end = LinkPath.step_end(step)
        crossed = _marker_partner(self.complex, end)
        if crossed is None:
            return None
        pi = self.complex.pairing[(end[0], _frame_missing(end[1]))][2]
        return (crossed, step, arc, sign, pi, crossed[0])

    def _circuits(self, base=None):
        """Closed marker walks through a base state, as move lists.

        Breadth-first out and in trees through the base give one circuit
        per reachable state and per move between reachable states; any
        closed walk through the base decomposes against their classes.
        """
        states = self._states()
        if not states:
            return [], None
        if base is None:
            base = min(states)
        succ = {}
        for s in states:
            succ[s] = [m for m in (self._move(s, "L"), self._move(s, "R"))
                       if m is not None]
        out_tree = {base: []}
        queue = [base]
        while queue:
            s = queue.pop(0)
            for m in succ[s]:
                if m[0] not in out_tree:
                    out_tree[m[0]] = out_tree[s] + [m]
                    queue.append(m[0])
        pred = {}
        for s in states:
            for m in succ[s]:
                pred.setdefault(m[0], []).append((s, m))
        in_tree = {base: []}
        queue = [base]
        while queue:
            s = queue.pop(0)
            for (p, m) in pred.get(s, []):
                if p not in in_tree:
                    in_tree[p] = [m] + in_tree[s]
                    queue.append(p)
        circuits = []
        for s in states:
            if s not in out_tree or s not in in_tree:
                continue
            walk = out_tree[s] + in_tree[s]
            if walk:
                circuits.append(walk)
            for m in succ[s]:
                if m[0] in in_tree:
                    circuits.append(out_tree[s] + [m] + in_tree[m[0]])
        circuits.sort(key=lambda moves: (len(moves),
                                         [m[1] for m in moves]))
        return circuits, base

    def _walk_chain(self, moves) -> dict:
        chain = {}
        for (_, _, arc, sign, _, _) in moves:
            chain[arc] = chain.get(arc, 0) + sign
        return {k: v for k, v in chain.items() if v}

    def _walk_class(self, moves):
        return self.cycle_class(self._walk_chain(moves))

    def _moves_to_path(self, moves) -> LinkPath:
        return LinkPath(tuple(m[1] for m in moves))

    def _dual_of_walk(self, moves) -> dict:
        """A dual cycle parallel to the walk: center to wheel point in
        each tetrahedron, continuing across the glued face."""
        dual = {}
        for (_, _, arc, _, pi, t2) in moves:
            t, a, j = arc
            dual[arc] = dual.get(arc, 0) + 1
            nxt = (t2, pi[a], pi[j])
            dual[nxt] = dual.get(nxt, 0) - 1
        return {k: v for k, v in dual.items() if v}


@dataclass
class LinkBasis:
    """Basis cycles of a torus or annulus link.

    For a torus, a and b are closed walk paths with intersection number
    +1, computed as chain_a against dual_b.  For an annulus, a is the
    core walk, b is None, and dual_b is a transverse dual path running
    between the two boundary circles, again pairing to +1 with chain_a.
    """

    kind: str
    a: LinkPath
    b: object
    chain_a: dict
    chain_b: object
    dual_a: object
    dual_b: dict
    pairing: int


def link_homology_basis(link: LinkSurface) -> LinkBasis:
    """Deterministic basis cycles of a torus or annulus link."""
    if link.kind == "sphere":
        raise SphereLink("link of class %d is a sphere" % link.class_id)
    if link.kind == "torus":
        return _torus_basis(link)
    if link.kind == "annulus":
        return _annulus_basis(link)
    raise UnsupportedLinks(
        "no basis for the %s link of class %d" % (link.kind, link.class_id))


def _candidate_walks(link):
    """Circuits and their pairwise concatenations, with classes."""
    circuits, _ = link._circuits()
    seen = set()
    singles = []
    for moves in circuits:
        cl = link._walk_class(moves)
        key = (cl, tuple(m[1] for m in moves))
        if key in seen:
            continue
        seen.add(key)
        singles.append((cl, moves))
    yield from singles
    short = singles[:24]
    for i, (cli, mi) in enumerate(short):
        for clj, mj in short[i:]:
            yield (tuple(x + y for x, y in zip(cli, clj)), mi + mj)


def _torus_basis(link: LinkSurface) -> LinkBasis:
    if link.homology_rank() != 2:
        raise UnsupportedLinks("torus link with homology rank %d"
                               % link.homology_rank())
    cands = list(_candidate_walks(link))
    best = None
    for i in range(len(cands)):
        for j in range(len(cands)):
            if j == i:
                continue
            (u, mu), (v, mv) = cands[i], cands[j]
            if u[0] * v[1] - u[1] * v[0] == 1:
                best = (mu, mv)
                break
        if best is not None:
            break
    if best is None:
        raise UnsupportedLinks("no unimodular pair of peripheral walks")
    a_moves, b_moves = best
    a_chain = link._walk_chain(a_moves)
    b_chain = link._walk_chain(b_moves)
    a_dual = link._dual_of_walk(a_moves)
    b_dual = link._dual_of_walk(b_moves)
    if link.dual_boundary(a_dual) or link.dual_boundary(b_dual):
        raise AssertionError("walk dual is not a cycle")
    if link.intersection(a_chain, a_dual) or link.intersection(b_chain, b_dual):
        raise AssertionError("walk crosses its own parallel copy")
    r = link.intersection(a_chain, b_dual)
    if abs(r) != 1:
        raise AssertionError("basis pairing is %d, not a unit" % r)
    if r < 0:
        a_moves, b_moves = b_moves, a_moves
        a_chain, b_chain = b_chain, a_chain
        a_dual, b_dual = b_dual, a_dual
    a_path = link._moves_to_path(a_moves)
    b_path = link._moves_to_path(b_moves)
    a_path.validate(link.complex, closed=True)
    b_path.validate(link.complex, closed=True)
    return LinkBasis(kind="torus", a=a_path, b=b_path,
                     chain_a=a_chain, chain_b=b_chain,
                     dual_a=a_dual, dual_b=b_dual,
                     pairing=link.intersection(a_chain, b_dual))


def _boundary_components(link: LinkSurface):
    """Map each boundary side to a boundary circle representative."""
    uf = _UnionFind()
    for side in link.boundary_sides:
        uf.find(side)
    for orbit_idx, orbit in enumerate(link.wheel_orbits):
        if orbit_idx in link.interior_wheels:
            continue
        ends = [(t, i, f)
                for (t, i, j) in orbit
                for f in VERTICES if f not in (i, j)
                if link.side_partner[(t, i, f)] is None]
        for s in ends[1:]:
            uf.union(ends[0], s)
    return {side: uf.find(side) for side in link.boundary_sides}


def _annulus_basis(link: LinkSurface) -> LinkBasis:
    if link.homology_rank() != 1:
        raise UnsupportedLinks("annulus link with homology rank %d"
                               % link.homology_rank())
    core_moves = None
    for cl, moves in _candidate_walks(link):
        if abs(cl[0]) == 1:
            core_moves = moves
            break
    if core_moves is None:
        raise UnsupportedLinks("no peripheral walk generates the core")
    core_path = link._moves_to_path(core_moves)
    core_path.validate(link.complex, closed=True)
    core_chain = link._walk_chain(core_moves)

    comp = _boundary_components(link)
    comps = sorted(set(comp.values()))
    if len(comps) != 2:
        raise UnsupportedLinks("annulus link with %d boundary circles"
                               % len(comps))
    fan_of = {}
    for orbit_idx, orbit in enumerate(link.wheel_orbits):
        if orbit_idx in link.interior_wheels:
            continue
        (t, i, j) = orbit[0]
        for f in VERTICES:
            if f not in (i, j) and link.side_partner[(t, i, f)] is None:
                fan_of[orbit_idx] = comp[(t, i, f)]
                break
    # breadth-first through dual edges from one boundary circle to the
    # other
    start = next(o for o in sorted(fan_of) if fan_of[o] == comps[0])
    prev = {("wheel", start): None}
    queue = [("wheel", start)]
    goal = None
    while queue and goal is None:
        node = queue.pop(0)
        for arc in link.arcs:
            t, i, j = arc
            w = ("wheel", link.wheel_orbit_index[arc])
            c = ("center", t, i)
            for frm, to, coeff in ((c, w, 1), (w, c, -1)):
                if frm != node or to in prev:
                    continue
                prev[to] = (node, arc, coeff)
                if to[0] == "wheel" and fan_of.get(to[1]) == comps[1]:
                    goal = to
                    break
                queue.append(to)
            if goal is not None:
                break
    if goal is None:
        raise UnsupportedLinks("no transverse dual path across the annulus")
    cut = {}
    node = goal
    while prev[node] is not None:
        node, arc, coeff = prev[node]
        cut[arc] = cut.get(arc, 0) + coeff
    cut = {k: v for k, v in cut.items() if v}
    r = link.intersection(core_chain, cut)
    if abs(r) != 1:
        raise AssertionError("annulus pairing is %d, not a unit" % r)
    if r < 0:
        cut = {k: -v for k, v in cut.items()}
    return LinkBasis(kind="annulus", a=core_path, b=None,
                     chain_a=core_chain, chain_b=None,
                     dual_a=None, dual_b=cut, pairing=1)
