"""Command-line entry point.

Every command writes CSV (17 significant digits) or JSON (sorted keys) to
``--output`` or stdout. Exit status is 0 on success, 2 for invalid input or
an unwritable output path, and 3 when an internal invariant fails; in the
last case the invariant's identifier is printed to stderr.
"""
from __future__ import annotations

import argparse
import io
import itertools
import json
import math
import sys

import numpy as np

from . import checks, evolution, paths, propagator, spectral
from .errors import InvariantViolation, check
from .geometry import Mode, LatticeScales, face_null_normal, jacobian, step_vectors, tetrad
from .spin import IDENTITY, Chirality, PlanarRule, parse_rule

FLOAT = "%.17g"
EVOLVE_CAP = 64
VERIFY_TOL = 1e-12
KERNEL_TOL = 1e-10


# ---------------------------------------------------------------------------
# parsing and output helpers


def _floats(text, n=None):
    vals = [float(x) for x in str(text).split(",") if x.strip()]
    if n is not None and len(vals) != n:
        raise ValueError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _ints(text, n=None):
    vals = [int(x) for x in str(text).split(",") if x.strip()]
    if n is not None and len(vals) != n:
        raise ValueError(f"expected {n} comma-separated integers, got {text!r}")
    return vals


def _spinor(text):
    vals = [complex(x.strip().replace(" ", "")) for x in str(text).split(",")]
    if len(vals) != 2:
        raise ValueError(f"a spinor needs two components, got {text!r}")
    return np.array(vals)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(c if isinstance(c, str) else
                           str(int(c)) if isinstance(c, (int, np.integer)) and not isinstance(c, bool)
                           else FLOAT % c for c in row) + "\n")
    return buf.getvalue()


def _emit(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _note(args, message):
    if not getattr(args, "quiet", False):
        print(message, file=sys.stderr)


def _matrix_cells(m):
    m = np.asarray(m).reshape(-1)
    out = []
    for z in m:
        out += [float(z.real), float(z.imag)]
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(args):
    scan = spectral.spectrum_scan(args.grid, constrained=args.constrained,
                                  exclude_center=args.exclude_center, alpha=args.alpha)
    if args.alpha >= 3:
        top, _ = scan.max_modulus()
        check("spectral.norm_bound", top <= 1 + 1e-9, f"max |lambda| = {top!r}")
    if args.format == "json":
        pts = [{"theta": th, "lambda": list(ev)} for th, ev in zip(scan.theta, scan.eigenvalues)]
        _emit(_dump_json({"grid": scan.grid, "constrained": scan.constrained,
                          "alpha": scan.alpha, "points": pts}), args.output)
    else:
        buf = io.StringIO()
        spectral.write_scan_csv(scan, buf)
        _emit(buf.getvalue(), args.output)


def cmd_gap(args):
    if args.grid < 40:
        raise ValueError(f"gap search needs a grid of at least 40 points, got {args.grid}")
    scan = spectral.spectrum_scan(args.grid, constrained=True, alpha=args.alpha)
    top, argmax = scan.max_modulus()
    grid_gap = spectral.real_axis_gap(scan=scan)
    refined = spectral.refine_real_axis_gap(alpha=args.alpha)
    if args.alpha == 3:
        check("spectral.norm_bound", top <= 1 + 1e-12, f"max |lambda| = {top!r}")
    report = {
        "alpha": args.alpha,
        "grid": args.grid,
        "max_modulus": top,
        "argmax_theta": argmax,
        "bound_violated": top > 1 + 1e-9,
        "grid_gap": grid_gap.value,
        "grid_gap_theta": grid_gap.theta,
        "refined_gap": refined.value,
        "refined_theta": refined.theta,
    }
    if args.format == "csv":
        header = list(report)
        row = []
        for k in header:
            v = report[k]
            row.append(";".join(FLOAT % x for x in v) if isinstance(v, (tuple, list, np.ndarray))
                       else str(v).lower() if isinstance(v, (bool, np.bool_)) else v)
        _emit(_csv(header, [row]), args.output)
    else:
        _emit(_dump_json(report), args.output)


def _slice_rows(step, component, f):
    for key in f.sites():
        v = f.values[key]
        yield [step, component, *key, v[0].real, v[0].imag, v[1].real, v[1].imag]


def _evolve_delta(args, mode):
    spinor = _spinor(args.spinor)
    if args.mode == "weyl":
        state = evolution.delta_source(spinor, args.chirality, mode)
        step = evolution.step_weyl
        parts = lambda s: [(s.chirality.value, s)]
    elif args.mode == "dirac":
        state = evolution.DiracSliceField(
            evolution.delta_source(spinor, Chirality.RIGHT, mode),
            evolution.delta_source(_spinor(args.l_spinor), Chirality.LEFT, mode),
            args.mass, args.epsilon)
        step = evolution.step_dirac
        parts = lambda s: [("right", s.r_field), ("left", s.l_field)]
    else:
        if mode is not Mode.FOUR_D:
            raise ValueError("majorana evolution is only defined in 4d mode")
        state = evolution.MajoranaSliceField(evolution.delta_source(spinor, Chirality.RIGHT),
                                             args.mass, args.epsilon,
                                             evolution.MajoranaVariant(args.variant))
        step = evolution.step_majorana
        parts = lambda s: [("majorana", s.field)]
    states = [state]
    for _ in range(args.steps):
        states.append(step(states[-1]))
    norms = [evolution.norm2(s) for s in states]
    if args.mode == "weyl":
        for a, b in zip(norms, norms[1:]):
            check("evolution.norm_nonincreasing", b <= a * (1 + 1e-12), f"{b!r} > {a!r}")
    result = {"mode": args.mode, "dimension": mode.value, "steps": args.steps, "norm2": norms}
    if args.verify:
        result["verify_max_deviation"] = _verify_delta(args, spinor, states[-1])
        check("evolution.path_expansion", result["verify_max_deviation"] <= VERIFY_TOL,
              f"deviation {result['verify_max_deviation']!r}")
    if args.format == "csv":
        nd = mode.ndir
        header = ["step", "component"] + [f"n{i}" for i in range(1, nd + 1)] + \
            ["re_psi1", "im_psi1", "re_psi2", "im_psi2"]
        rows = []
        for s in states:
            for comp, f in parts(s):
                rows.extend(_slice_rows(f.time_step, comp, f))
        _emit(_csv(header, rows), args.output)
        _note(args, "norm2: " + " ".join(FLOAT % n for n in norms))
    else:
        result["snapshots"] = [{comp: evolution.field_to_json(f) for comp, f in parts(s)}
                               for s in states]
        _emit(_dump_json(result), args.output)


def _verify_delta(args, spinor, final):
    """Compare the evolved slice with an explicit path-sum expansion."""
    n = args.steps
    if args.mode == "weyl":
        if final.mode is not Mode.FOUR_D:
            raise ValueError("--verify for weyl runs is implemented in 4d mode")
        expect = {d: propagator.kernel_pathsum(d, args.chirality) @ spinor
                  for d in final.values}
        got = [(final.values[d], expect[d]) for d in final.values]
    elif args.mode == "dirac":
        if final.r_field.mode is not Mode.FOUR_D:
            raise ValueError("--verify for dirac runs is implemented in 4d mode")
        r, l = paths.dirac_expansion(n, spinor, _spinor(args.l_spinor), args.mass, args.epsilon)
        got = [(final.r_field.values[d], r[d]) for d in r] + \
              [(final.l_field.values[d], l[d]) for d in l]
    else:
        ex = paths.majorana_expansion(n, spinor, args.mass, args.epsilon, args.variant)
        got = [(final.field.values[d], ex[d]) for d in ex]
    return max((float(np.max(np.abs(a - b))) for a, b in got), default=0.0)


def _evolve_plane_wave(args, mode):
    if args.mode == "majorana":
        raise ValueError("a plane wave is not preserved by charge conjugation; "
                         "use --source delta for majorana runs")
    if mode is not Mode.FOUR_D:
        raise ValueError("plane-wave sources are implemented in 4d mode")
    modes = _ints(args.k_modes, 3)
    k = evolution.commensurate_wavevector(modes, args.period, args.epsilon)
    theta = spectral.lattice_angles(k, args.epsilon)
    spinor = _spinor(args.spinor)
    if args.mode == "weyl":
        fields = [evolution.plane_wave(theta, spinor, args.period, 0, args.chirality)]
        for _ in range(args.steps):
            fields.append(evolution.periodic_step_weyl(fields[-1]))
        norms = [evolution.norm2(f) for f in fields]
        for a, b in zip(norms, norms[1:]):
            check("evolution.norm_nonincreasing", b <= a * (1 + 1e-12), f"{b!r} > {a!r}")
        data = [f.data for f in fields]
    else:
        r = evolution.plane_wave(theta, spinor, args.period, 0, Chirality.RIGHT)
        l = evolution.plane_wave(theta, _spinor(args.l_spinor), args.period, 0, Chirality.LEFT)
        states = [(r, l)]
        for _ in range(args.steps):
            states.append(evolution.periodic_step_dirac(*states[-1], args.mass, args.epsilon))
        norms = [evolution.norm2(a) + evolution.norm2(b) for a, b in states]
        data = [np.concatenate([a.data, b.data], axis=-1) for a, b in states]
    # amplitude at the origin site, phase-corrected to the plane-wave frame
    origin = [d[(0, 0, 0)] * np.exp(1j * theta[-1] * t) for t, d in enumerate(data)]
    result = {"mode": args.mode, "source": "plane-wave", "steps": args.steps,
              "period": args.period, "k": k, "theta": theta, "norm2": norms,
              "origin_amplitude": origin}
    if args.format == "csv":
        ncomp = len(origin[0])
        header = ["step", "norm2"] + [f"{p}_psi{j + 1}" for j in range(ncomp) for p in ("re", "im")]
        rows = [[t, n, *[x for z in o for x in (z.real, z.imag)]]
                for t, (n, o) in enumerate(zip(norms, origin))]
        _emit(_csv(header, rows), args.output)
    else:
        _emit(_dump_json(result), args.output)


def cmd_evolve(args):
    if args.steps < 0:
        raise ValueError("number of steps must be non-negative")
    if args.steps > args.cap:
        raise ValueError(f"{args.steps} steps exceeds the evolution cap of {args.cap}")
    if args.mass < 0:
        raise ValueError("mass must be non-negative")
    if not args.epsilon > 0:
        raise ValueError("time step epsilon must be positive")
    mode = Mode.parse(args.dimension)
    if args.source == "delta":
        _evolve_delta(args, mode)
    else:
        _evolve_plane_wave(args, mode)


def _paths_4d(args):
    if args.displacement is not None:
        it = paths.enumerate_paths(displacement=_ints(args.displacement, 4), cap=args.cap)
    else:
        it = paths.enumerate_paths(args.steps, cap=args.cap)
    rows, dev_bend, dev_scalar = [], 0.0, 0.0
    for path in it:
        if not path:
            continue
        st = paths.path_stats(path)
        bend = paths.amplitude_bend_rule(st, args.chirality)
        scalar = paths.scalar_amplitude(path, path[0], path[-1], args.rule, args.chirality)
        elem = paths.matrix_element(path, path[0], path[-1], args.rule, args.chirality)
        if parse_rule(args.rule).value == "B":
            dev_bend = max(dev_bend, abs(bend - elem))
        dev_scalar = max(dev_scalar, abs(scalar - elem))
        rows.append([paths.path_string(path), st.n_steps, st.n_bends, st.handed_excess,
                     bend.real, bend.imag, scalar.real, scalar.imag, elem.real, elem.imag])
    header = ["path", "n_steps", "n_bends", "handed_excess", "re_bend_rule", "im_bend_rule",
              "re_scalar", "im_scalar", "re_matrix_element", "im_matrix_element"]
    summary = {"rows": len(rows), "max_bend_rule_deviation": dev_bend,
               "max_scalar_deviation": dev_scalar}
    check("paths.bend_rule", dev_bend <= VERIFY_TOL, f"deviation {dev_bend!r}")
    check("paths.scalar_chain", dev_scalar <= VERIFY_TOL, f"deviation {dev_scalar!r}")
    return header, rows, summary


def _paths_planar(args):
    variant = parse_rule(args.variant)
    if not isinstance(variant, PlanarRule):
        raise ValueError(f"2+1 mode needs a planar variant, got {args.variant!r}")
    if args.displacement is not None:
        it = paths.enumerate_paths(displacement=_ints(args.displacement, 3), mode=Mode.PLANAR,
                                   cap=args.cap)
    else:
        it = paths.enumerate_paths(args.steps, mode=Mode.PLANAR, cap=args.cap)
    expected = paths.PLANAR_BEND_FACTORS[variant]
    rows, dev_elem, dev_factor = [], 0.0, 0.0
    for path in it:
        if not path:
            continue
        factors = paths.planar_bend_factors(path, variant)
        for f in factors:
            dev_factor = max(dev_factor, abs(abs(f) - 0.5))
            if variant is PlanarRule.SYMMETRIC:
                dev_factor = max(dev_factor, abs(f - expected))
        amp = paths.planar_amplitudes(path, variant)
        elem = paths.matrix_element(path, path[0], path[-1], variant)
        dev_elem = max(dev_elem, abs(amp - elem))
        prod = complex(np.prod(factors)) if factors else 1 + 0j
        ratio = (4.0 / 3.0) ** len(path)
        rows.append([paths.path_string(path), len(path), len(factors), prod.real, prod.imag,
                     amp.real, amp.imag, elem.real, elem.imag, ratio])
    header = ["path", "n_steps", "n_bends", "re_bend_product", "im_bend_product",
              "re_amplitude", "im_amplitude", "re_matrix_element", "im_matrix_element",
              "step_weight_ratio"]
    summary = {"rows": len(rows), "variant": variant.value,
               "expected_bend_factor": expected,
               "max_matrix_element_deviation": dev_elem,
               "max_bend_factor_deviation": dev_factor,
               "step_weight": Mode.PLANAR.step_weight,
               "step_weight_note": "step_weight_ratio = (2/3)^N / 2^-N"}
    check("paths.planar_matrix_element", dev_elem <= VERIFY_TOL, f"deviation {dev_elem!r}")
    check("paths.planar_bend_factor", dev_factor <= VERIFY_TOL, f"deviation {dev_factor!r}")
    return header, rows, summary


def cmd_paths(args):
    if (args.steps is None) == (args.displacement is None):
        raise ValueError("give exactly one of --steps or --displacement")
    mode = Mode.parse(args.dimension)
    header, rows, summary = (_paths_4d if mode is Mode.FOUR_D else _paths_planar)(args)
    if args.format == "json":
        _emit(_dump_json({"summary": summary,
                          "rows": [dict(zip(header, r)) for r in rows]}), args.output)
    else:
        _emit(_csv(header, rows), args.output)
        _note(args, json.dumps(_jsonable(summary), sort_keys=True))


def _table_rows(route, table):
    for key in sorted(table.entries):
        yield [route, *key, *_matrix_cells(table.entries[key])]


def cmd_propagator(args):
    if args.converge:
        return _propagator_converge(args)
    if args.t is None:
        raise ValueError("--t is required unless --converge is given")
    t = args.t
    tables = {"dp": propagator.kernel_dp(t, args.chirality)}
    routes = [r.strip() for r in args.routes.split(",") if r.strip()]
    for r in routes:
        if r not in ("dp", "pathsum", "fourier"):
            raise ValueError(f"unknown route {r!r}")
    if "pathsum" in routes:
        tables["pathsum"] = propagator.kernel_pathsum_table(t, args.chirality, args.cap)
    if "fourier" in routes:
        tables["fourier"] = propagator.kernel_fourier_table(t, args.grid, args.chirality)
    tables = {r: tables[r] for r in routes}
    dp = propagator.kernel_dp(t, args.chirality)
    sum_residual = float(np.max(np.abs(dp.total() - IDENTITY)))
    check("propagator.kernel_sum_identity", sum_residual <= 1e-12, f"residual {sum_residual!r}")
    deviations = {}
    names = list(tables)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            deviations[f"{a}_vs_{b}"] = propagator.max_deviation(tables[a], tables[b])
    if args.verify:
        worst = max(deviations.values(), default=0.0)
        check("propagator.triple_equivalence", worst <= KERNEL_TOL, f"deviation {worst!r}")
    summary = {"t": t, "chirality": Chirality.parse(args.chirality).value,
               "max_deviations": deviations, "kernel_sum_residual": sum_residual,
               "frobenius_mass": propagator.frobenius_mass(dp)}
    if args.format == "json":
        _emit(_dump_json({"summary": summary,
                          "tables": {r: tb.to_json() for r, tb in tables.items()}}), args.output)
    else:
        header = ["route", "n1", "n2", "n3", "n4"] + [
            f"{p}_k{a}{b}" for a in (1, 2) for b in (1, 2) for p in ("re", "im")]
        rows = [row for r, tb in tables.items() for row in _table_rows(r, tb)]
        _emit(_csv(header, rows), args.output)
        _note(args, json.dumps(_jsonable(summary), sort_keys=True))


def _propagator_converge(args):
    k = _floats(args.k, 3)
    eps = propagator.halving_sequence(args.epsilon0, args.halvings)
    rep = propagator.continuum_convergence_study(k, eps)
    check("propagator.convergence_monotone", rep.monotone, f"deviations {rep.deviations!r}")
    check("propagator.convergence_order", rep.fitted_order >= 1, f"order {rep.fitted_order!r}")
    if args.format == "json":
        _emit(_dump_json({"k": rep.k, "epsilon": rep.epsilons, "deviation": rep.deviations,
                          "negative_branch_deviation": rep.negative_branch_deviations,
                          "local_order": rep.orders, "fitted_order": rep.fitted_order}),
              args.output)
    else:
        rows = [[r["epsilon"], r["deviation"], r["fitted_order"]] for r in rep.rows()]
        _emit(_csv(["epsilon", "deviation", "fitted_order"], rows), args.output)
        _note(args, f"fitted order {rep.fitted_order:.6f}")


def cmd_selfcheck(args):
    results = checks.selfcheck(args.samples, args.seed)
    if args.format == "json":
        _emit(_dump_json([r.__dict__ for r in results]), args.output)
    else:
        _emit(checks.format_table(results) + "\n", args.output)
    failed = [r.identifier for r in results if not r.passed]
    if failed:
        raise InvariantViolation(failed[0], f"{len(failed)} check(s) failed")


def cmd_geometry(args):
    mode = Mode.parse(args.dimension)
    alpha = mode.default_alpha if args.alpha is None else args.alpha
    te = tetrad(mode)
    sv = step_vectors(alpha, mode)
    faces = []
    for face in itertools.combinations(range(1, mode.ndir + 1), mode.ndir - 1):
        fn = face_null_normal(face, alpha, mode)
        faces.append({"face": list(face), "normal": fn.normal, "norm2": fn.norm2,
                      "inner_products": fn.inner_products})
    report = {"dimension": mode.value, "alpha": alpha, "tetrad": te.vectors,
              "residuals": te.residuals(), "step_vectors": sv.vectors, "faces": faces}
    if mode is Mode.FOUR_D:
        sc = LatticeScales(args.epsilon, alpha)
        report.update({"epsilon": args.epsilon, "a": sc.a, "cube_edge": sc.cube_edge,
                       "volume_per_point": sc.vp, "jacobian": jacobian(alpha)})
    _emit(_dump_json(report), args.output)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="checkerboard",
                                description="Null-face lattice Weyl/Dirac/Majorana numerics.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt="csv"):
        sp.add_argument("-o", "--output", default="-", help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("-q", "--quiet", action="store_true", help="suppress stderr summaries")

    sp = sub.add_parser("spectrum", help="eigenvalues of A(theta) over an angle grid")
    sp.add_argument("--grid", type=int, default=40)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--constrained", dest="constrained", action="store_true", default=True)
    g.add_argument("--unconstrained", dest="constrained", action="store_false")
    sp.add_argument("--exclude-center", type=int, default=0)
    sp.add_argument("--alpha", type=float, default=3.0)
    common(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("gap", help="real-axis spectral gap and norm bound")
    sp.add_argument("--grid", type=int, default=40)
    sp.add_argument("--alpha", type=float, default=3.0)
    common(sp, "json")
    sp.set_defaults(func=cmd_gap)

    sp = sub.add_parser("evolve", help="evolve a delta or plane-wave source")
    sp.add_argument("--mode", choices=("weyl", "dirac", "majorana"), default="weyl")
    sp.add_argument("--steps", type=int, default=1)
    sp.add_argument("--source", choices=("delta", "plane-wave"), default="delta")
    sp.add_argument("--spinor", default="1,0", help="source spinor, e.g. '1,0' or '0.6,0.8j'")
    sp.add_argument("--l-spinor", default="0,0", help="left-handed source spinor (dirac)")
    sp.add_argument("--chirality", default="right")
    sp.add_argument("--mass", type=float, default=0.0)
    sp.add_argument("--epsilon", type=float, default=1.0)
    sp.add_argument("--variant", default="conjugate_then_propagate",
                    choices=[v.value for v in evolution.MajoranaVariant])
    sp.add_argument("--dimension", default="4d", choices=[m.value for m in Mode])
    sp.add_argument("--k-modes", default="1,0,0", help="torus mode numbers (plane-wave)")
    sp.add_argument("--period", type=int, default=16)
    sp.add_argument("--verify", action="store_true",
                    help="compare the final slice with an explicit path expansion")
    sp.add_argument("--cap", type=int, default=EVOLVE_CAP)
    common(sp, "json")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("paths", help="enumerate paths and compare amplitude calculi")
    sp.add_argument("--steps", type=int)
    sp.add_argument("--displacement")
    sp.add_argument("--dimension", "--mode", dest="dimension", default="4d",
                    choices=[m.value for m in Mode])
    sp.add_argument("--chirality", default="right")
    sp.add_argument("--rule", default="B", choices=("A", "B"))
    sp.add_argument("--variant", default="symmetric", choices=[v.value for v in PlanarRule])
    sp.add_argument("--cap", type=int, default=paths.DEFAULT_CAP)
    common(sp)
    sp.set_defaults(func=cmd_paths)

    sp = sub.add_parser("propagator", help="kernel tables and continuum convergence")
    sp.add_argument("--t", type=int)
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--grid", type=int)
    sp.add_argument("--routes", default="dp,pathsum,fourier")
    sp.add_argument("--chirality", default="right")
    sp.add_argument("--cap", type=int, default=paths.DEFAULT_CAP)
    sp.add_argument("--converge", action="store_true")
    sp.add_argument("--k", default="0.3,0.2,0.1")
    sp.add_argument("--epsilon0", type=float, default=0.5)
    sp.add_argument("--halvings", type=int, default=5)
    common(sp)
    sp.set_defaults(func=cmd_propagator)

    sp = sub.add_parser("selfcheck", help="run the algebraic identity suites")
    sp.add_argument("--samples", type=int, default=10_000)
    common(sp)
    sp.set_defaults(func=cmd_selfcheck)

    sp = sub.add_parser("geometry", help="tetrad, step vectors and face normals")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--epsilon", type=float, default=1.0)
    sp.add_argument("--dimension", default="4d", choices=[m.value for m in Mode])
    common(sp, "json")
    sp.set_defaults(func=cmd_geometry)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violated: {exc.identifier}", file=sys.stderr)
        if str(exc) != exc.identifier:
            print(str(exc), file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
