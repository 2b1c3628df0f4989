"""Command line front end: solve gluing equations, verify invariants,
compute volumes.

Three subcommands on triangulation documents.  Reports are canonical
JSON on stdout (sorted keys, fixed layout) so that identical inputs and
seeds give byte-identical output; timing goes to stderr.  Exit codes:
0 success, 2 unreadable input, 3 no convergence, 4 a named verification
failure.
"""

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction

import numpy as np

from . import nzsymp
from .arith import QuadExt, to_complex
from .bloch import beta, delta, pairing_wedge, scalar_to_json, volume, w_total
from .complex3 import bundled_document, parse_triangulation
from .errors import (FlagTetError, NoConvergence, NonRationalSupport,
                     PathSingular, SingularJacobian, UnsupportedLinks,
                     VerificationFailed)
from .flags import ACoordinates, AffineFlag, normalize_tetrahedron
from .gluing import (Decoration, SolveOptions, build_equations,
                     classify_structure, cluster_vectors, continue_family,
                     figure_eight_structures, seed_vectors, solve_batch)
from .holonomy import peripheral_invariants

SCHEMA = "flagtet-report/1"
EXIT_PARSE = 2
EXIT_NO_CONVERGENCE = 3
EXIT_VERIFICATION = 4

SNAP_TOL = 1e-10
CLUSTER_RADIUS = 1e-6


class ParseFailure(Exception):
    pass


# -------------------------------------------------------------- I/O helpers

def _load_document(path):
    """Triangulation document plus its content digest.

    A plain name of a bundled document (with or without .json) works when
    no such file exists, so the examples run from any directory.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError:
        stem = path[:-5] if path.endswith(".json") else path
        try:
            doc = bundled_document(stem)
        except Exception:
            raise ParseFailure("cannot read %r" % path)
        raw = json.dumps(doc, sort_keys=True).encode()
        return doc, hashlib.sha256(raw).hexdigest()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseFailure("not a JSON document: %s" % e)
    return doc, hashlib.sha256(raw).hexdigest()


def _parse_complex(path):
    doc, digest = _load_document(path)
    try:
        cx = parse_triangulation(doc)
    except FlagTetError as e:
        raise ParseFailure("invalid triangulation: %s" % e)
    return cx, digest


def _scalar_from_json(v):
    """Reads back the scalar encodings the reports emit.

    Numbers stay exact when integral; two-element lists are re + i im;
    "p/q" is a rational and "a+b√m" a quadratic integer over Q.
    """
    if isinstance(v, bool):
        raise ParseFailure("boolean is not a shape scalar")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        if "√" in v:
            left, m = v.split("√", 1)
            a, b = left.split("+", 1)
            return QuadExt(Fraction(a), Fraction(b), int(m))
        return Fraction(v)
    raise ParseFailure("cannot read shape scalar %r" % v)


def _complex_pair(z):
    z = to_complex(z)
    return [z.real, z.imag]


def _jsonable(obj):
    """Recursively coerce report values into canonical JSON types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (QuadExt, Fraction)):
        return scalar_to_json(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _emit(report, args, started):
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2,
                      ensure_ascii=False) + "\n"
    sys.stdout.write(text)
    out = getattr(args, "json", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    # timing is diagnostic only: it stays out of the report so the report
    # bytes depend on nothing but the inputs and the seed
    print("# wall time %.1f ms" % (1000 * (time.monotonic() - started)),
          file=sys.stderr)


def _options(args):
    return SolveOptions(tol=args.tol, max_iter=args.max_iter)


def _boundary_argument(value):
    if value is None or value == "unipotent":
        return value
    doc, _ = _load_document(value)
    if not isinstance(doc, dict):
        raise ParseFailure("boundary targets must be a JSON object")
    out = {}
    for key, row in doc.items():
        out[int(key)] = {name: _scalar_from_json(v)
                         for name, v in row.items()}
    return out


# ------------------------------------------------------------------- solve

def _solution_entry(cx, vec, snap):
    deco = Decoration.from_vector(cx, vec)
    entry = {
        "shapes": [[_complex_pair(s) for s in row] for row in deco.shapes],
        "classification": classify_structure(vec),
        "volume": volume(beta(deco)),
    }
    if snap is not None:
        entry["snapped"] = snap
    return entry


def _try_snap(system, vec):
    """Exact candidate within snapping distance, re-verified exactly."""
    if system.n_vars != 8:
        return None
    target = np.asarray(vec, dtype=complex)
    for name, points in figure_eight_structures().items():
        for idx, p in enumerate(points):
            cand = np.array([to_complex(s) for s in p])
            if np.abs(cand - target).max() > SNAP_TOL:
                continue
            deco = Decoration.from_vector(system.complex, p)
            if all(value == eq_target for _, value, eq_target
                   in system.evaluate_exact(deco)):
                return {"name": name, "index": idx,
                        "shapes": [scalar_to_json(s) for s in p]}
    return None


def cmd_solve(args):
    started = time.monotonic()
    cx, digest = _parse_complex(args.file)
    targets = _boundary_argument(args.boundary)
    system = build_equations(cx, targets)
    report = {
        "schema": SCHEMA,
        "command": "solve",
        "input": {"file": args.file, "digest": digest,
                  "tetrahedra": cx.n, "boundary": args.boundary},
        "seed": args.seed,
        "equations": len(system),
    }
    if len(system) == 0:
        report["status"] = "trivial"
        report["solutions"] = []
        report["trace"] = {"starts": 0, "converged": 0, "stalled": 0,
                           "exhausted": 0, "max_iterations": 0}
        _emit(report, args, started)
        return 0
    rng = np.random.default_rng(args.seed)
    starts = seed_vectors(system, args.seeds, rng)
    opts = _options(args)
    res = solve_batch(system, starts, opts)
    conv = res.converged()
    report["trace"] = {
        "starts": int(len(starts)),
        "converged": int(conv.sum()),
        "stalled": int((res.status == 1).sum()),
        "exhausted": int((res.status == 2).sum()),
        "max_iterations": int(res.iterations.max()) if len(starts) else 0,
        "max_residual_converged":
            float(res.residual_norm[conv].max()) if conv.any() else None,
    }
    if not conv.any():
        report["status"] = "no-convergence"
        report["solutions"] = []
        _emit(report, args, started)
        return EXIT_NO_CONVERGENCE
    clusters = cluster_vectors(res.solutions(), CLUSTER_RADIUS)
    solutions = []
    for cl in clusters:
        vec = cl["representative"]
        snap = _try_snap(system, vec) if args.snap else None
        entry = _solution_entry(cx, vec, snap)
        entry["count"] = cl["count"]
        solutions.append(entry)
    report["status"] = "ok"
    report["solutions"] = solutions
    if args.continue_steps:
        start_vec = clusters[0]["representative"]
        try:
            family = continue_family(system, start_vec,
                                     steps=args.continue_steps,
                                     step=args.step, options=opts)
        except (PathSingular, SingularJacobian, NoConvergence) as e:
            report["family"] = {"error": str(e)}
            _emit(report, args, started)
            return EXIT_NO_CONVERGENCE
        report["family"] = {
            "steps": args.continue_steps,
            "step": args.step,
            "members": [{"index": i, "volume": volume(beta(d)),
                         "shapes": [[_complex_pair(s) for s in row]
                                    for row in d.shapes]}
                        for i, d in enumerate(family)],
        }
    _emit(report, args, started)
    return 0


# ------------------------------------------------------------------ verify

def _random_rational_tables(count, seed):
    """Generic rational affine tetrahedra for the exact wedge battery."""
    rng = random.Random(seed)

    def scalar(lo=-9, hi=9, den=9):
        return Fraction(rng.randint(lo, hi), rng.randint(1, den))

    out = []
    while len(out) < count:
        shapes = []
        while len(shapes) < 4:
            q = scalar()
            if q not in (0, 1):
                shapes.append(q)
        try:
            tet = normalize_tetrahedron(*shapes)
            lifts = []
            for fl in tet.flags:
                sx, sf = scalar(1, 7, 5), scalar(1, 7, 5)
                lifts.append(AffineFlag(tuple(sx * c for c in fl.x),
                                        tuple(sf * c for c in fl.f)))
            out.append(ACoordinates(lifts))
        except FlagTetError:
            continue
    return out


def _suite_bloch(args):
    """delta(beta), the face sum and both pairing routes must agree on
    random rational tetrahedra, exactly, modulo dropped 2-torsion."""
    verdicts = []
    espec = nzsymp.epsilon_spec()
    ospec = nzsymp.omega_star_spec()
    for pos, ac in enumerate(_random_rational_tables(args.random,
                                                     args.seed)):
        w = w_total(ac)
        checks = (
            ("wedge.pairing16", pairing_wedge(nzsymp.a_value_map(ac),
                                              espec) == w),
            ("wedge.delta_beta", delta(beta(ac.tetrahedron)) == w),
            ("wedge.pairing8",
             pairing_wedge(nzsymp.z_value_map(ac.tetrahedron.z_table),
                           ospec) == w),
        )
        for name, ok in checks:
            if not ok:
                verdicts.append({"name": name, "ok": False,
                                 "instance": pos})
                return verdicts
    verdicts.append({"name": "wedge.master_oracle", "ok": True,
                     "instances": args.random})
    return verdicts


def _is_bundled_fig8(cx):
    fig8 = parse_triangulation(bundled_document("fig8"))
    return cx.n == fig8.n and cx.pairing == fig8.pairing


def _suite_gluing(cx, args):
    verdicts = []
    system = build_equations(cx, "unipotent")
    if _is_bundled_fig8(cx):
        found = 0
        ok = True
        for name, points in figure_eight_structures().items():
            for p in points:
                deco = Decoration.from_vector(cx, p)
                rows = system.evaluate_exact(deco)
                if all(value == target for _, value, target in rows):
                    found += 1
                else:
                    ok = False
        verdicts.append({"name": "gluing.standard_structures", "ok": ok,
                         "solutions": found})
        if not ok:
            return verdicts
    if len(system) == 0:
        verdicts.append({"name": "gluing.trivial", "ok": True})
        return verdicts
    rng = np.random.default_rng(args.seed)
    res = solve_batch(system, seed_vectors(system, args.seeds, rng),
                      _options(args))
    conv = res.converged()
    verdicts.append({"name": "gluing.converged", "ok": bool(conv.any()),
                     "converged": int(conv.sum()),
                     "starts": int(args.seeds)})
    if conv.any():
        worst = float(res.residual_norm[conv].max())
        verdicts.append({"name": "gluing.residual",
                         "ok": worst <= args.tol, "worst": worst})
    return verdicts


def _suite_nz(cx, args):
    verdicts = []
    rep = nzsymp.homology_HJ(cx)
    verdicts.append({"name": "nz.homology_rank",
                     "ok": bool(rep["matches_expected"]),
                     "rank": rep["rank"], "expected": rep["expected_rank"],
                     "torsion": rep["torsion"]})
    if not rep["matches_expected"]:
        return verdicts
    if rep["case"] == "closed":
        mult = nzsymp.verify_mult_by_4(cx)
        verdicts.append({"name": "nz.mult_by_4",
                         "ok": bool(mult["mult_by_4_ok"])})
        verdicts.append({"name": "nz.pullback",
                         "ok": bool(mult["pullback_ok"]),
                         "matrix": mult["pullback_matrix"]})
        formula = nzsymp.verify_boundary_formula(cx, None)
        verdicts.append({"name": "nz.boundary_formula",
                         "ok": bool(formula["ok"]),
                         "mode": formula["mode"],
                         "basis_words": formula["basis_words"]})
    return verdicts


def cmd_verify(args):
    started = time.monotonic()
    report = {"schema": SCHEMA, "command": "verify", "suite": args.suite,
              "seed": args.seed, "verdicts": [], "failed": None}
    cx = None
    if args.file is not None:
        cx, digest = _parse_complex(args.file)
        report["input"] = {"file": args.file, "digest": digest,
                           "tetrahedra": cx.n}
    suites = ("bloch", "gluing", "nz") if args.suite == "all" \
        else (args.suite,)
    if cx is None and any(s in ("gluing", "nz") for s in suites):
        if args.suite == "all":
            suites = ("bloch",)
            report["note"] = "no file given; structural suites skipped"
        else:
            raise ParseFailure("suite %r needs a triangulation file"
                               % args.suite)
    try:
        for suite in suites:
            if suite == "bloch":
                report["verdicts"] += _suite_bloch(args)
            elif suite == "gluing":
                report["verdicts"] += _suite_gluing(cx, args)
            else:
                report["verdicts"] += _suite_nz(cx, args)
    except (VerificationFailed, UnsupportedLinks) as e:
        report["failed"] = {"name": "%s.%s" % (suite, type(e).__name__),
                            "message": str(e)}
        _emit(report, args, started)
        return EXIT_VERIFICATION
    for v in report["verdicts"]:
        if not v["ok"]:
            report["failed"] = {"name": v["name"]}
            _emit(report, args, started)
            return EXIT_VERIFICATION
    _emit(report, args, started)
    return 0


# ------------------------------------------------------------------ volume

def _volume_decoration(cx, args):
    given = [v for v in (args.solution, args.shapes, args.structure)
             if v is not None]
    if len(given) != 1:
        raise ParseFailure(
            "give exactly one of --solution, --shapes, --structure")
    if args.structure is not None:
        families = figure_eight_structures()
        if args.structure not in families:
            raise ParseFailure("unknown structure %r; known: %s"
                               % (args.structure,
                                  ", ".join(sorted(families))))
        points = families[args.structure]
        if not 0 <= args.index < len(points):
            raise ParseFailure("structure index out of range (0..%d)"
                               % (len(points) - 1))
        vec = points[args.index]
        if len(vec) != 4 * cx.n:
            raise ParseFailure("structure has %d shapes, complex needs %d"
                               % (len(vec), 4 * cx.n))
        return Decoration.from_vector(cx, vec)
    if args.solution is not None:
        doc, _ = _load_document(args.solution)
    else:
        try:
            doc = json.loads(args.shapes)
        except json.JSONDecodeError as e:
            raise ParseFailure("inline shapes are not JSON: %s" % e)
    if not isinstance(doc, list):
        raise ParseFailure("shape data must be a list of 4-tuples")
    rows = [[_scalar_from_json(v) for v in row] for row in doc]
    try:
        return Decoration(cx, rows)
    except (ValueError, FlagTetError) as e:
        raise ParseFailure(str(e))


def cmd_volume(args):
    started = time.monotonic()
    cx, digest = _parse_complex(args.file)
    deco = _volume_decoration(cx, args)
    if args.conjugate:
        deco = deco.conjugated()
    cls = beta(deco)
    peripheral = []
    for item in peripheral_invariants(cx, deco):
        peripheral.append({"link": item.link, "kind": item.kind,
                           "values": {k: _complex_pair(v)
                                      for k, v in item.values.items()},
                           "all_one": item.all_one()})
    report = {
        "schema": SCHEMA,
        "command": "volume",
        "input": {"file": args.file, "digest": digest,
                  "tetrahedra": cx.n},
        "exact": deco.is_exact(),
        "conjugated": bool(args.conjugate),
        "volume": volume(cls),
        "beta_support": cls.to_json(),
        "peripheral": peripheral,
    }
    _emit(report, args, started)
    return 0


# ------------------------------------------------------------- entry point

def _build_parser():
    top = argparse.ArgumentParser(
        prog="flagtet",
        description="Flag decorations of triangulated 3-manifolds: "
                    "solve gluing equations, verify exact invariants, "
                    "compute volumes.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0,
                       help="seed for every random draw (default 0)")
        p.add_argument("--tol", type=float, default=1e-12,
                       help="residual tolerance (default 1e-12)")
        p.add_argument("--max-iter", type=int, default=100,
                       help="Newton iteration cap (default 100)")
        p.add_argument("--json", metavar="OUT",
                       help="also write the report to this file")

    ps = sub.add_parser("solve", help="solve the gluing equations")
    ps.add_argument("file", help="triangulation document")
    ps.add_argument("--boundary", default=None, metavar="SPEC",
                    help="'unipotent' or a JSON file of eigenvalue "
                         "targets; omit for the interior system alone")
    ps.add_argument("--seeds", type=int, default=50,
                    help="number of random starts (default 50)")
    ps.add_argument("--snap", action="store_true",
                    help="replace solutions near a known exact structure "
                         "by it, after exact re-verification")
    ps.add_argument("--continue", dest="continue_steps", type=int,
                    default=0, metavar="N",
                    help="follow the solution variety N steps")
    ps.add_argument("--step", type=float, default=1e-2,
                    help="continuation step size (default 1e-2)")
    common(ps)
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify", help="run verification batteries")
    pv.add_argument("file", nargs="?", default=None,
                    help="triangulation document (optional for "
                         "--suite bloch)")
    pv.add_argument("--suite", choices=("bloch", "nz", "gluing", "all"),
                    default="all")
    pv.add_argument("--random", type=int, default=100,
                    help="random instances for the wedge battery "
                         "(default 100)")
    pv.add_argument("--seeds", type=int, default=50,
                    help="random starts for the gluing battery "
                         "(default 50)")
    common(pv)
    pv.set_defaults(func=cmd_verify)

    pw = sub.add_parser("volume", help="volume and peripheral data of a "
                                       "decorated solution")
    pw.add_argument("file", help="triangulation document")
    pw.add_argument("--solution", metavar="SOL",
                    help="JSON file with one shape 4-tuple per "
                         "tetrahedron")
    pw.add_argument("--shapes", metavar="JSON",
                    help="inline JSON shape data")
    pw.add_argument("--structure", metavar="NAME",
                    help="name of a known exact structure family")
    pw.add_argument("--index", type=int, default=0,
                    help="member of the structure family (default 0)")
    pw.add_argument("--conjugate", action="store_true",
                    help="conjugate the decoration entrywise")
    common(pw)
    pw.set_defaults(func=cmd_volume)
    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseFailure as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_PARSE
    except (NoConvergence, PathSingular) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except FlagTetError as e:
        print("error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
