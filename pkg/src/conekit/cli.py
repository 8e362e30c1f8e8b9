"""``conekit`` command line.

Reports go to stdout as JSON and a human summary to stderr.  Exit codes:
0 when every check passes (or the solver converged), 1 when a property check
fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .comparison import VectorialComparison, check_transfer, transfer_psi, verify_vectorial
from .cone import Cone, validate_cone
from .cone_metric import (
    InducedMetric,
    space_from_dict,
    verify_cone_metric_axioms,
    verify_induced_metric,
)
from .fixedpoint import (
    SelfMap,
    check_condition_C,
    check_condition_C1,
    picard_solve,
    remark23_implication,
    theorem21_implication,
    verify_scalar_contraction,
    verify_uniqueness,
    verify_vector_contraction,
)
from .report import SuiteReport, _jsonable
from .scalarize import Scalarizer, check_lemma1, check_lemma2, check_oracle

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(command: str, reports: list[SuiteReport], passed: bool | None = None, **extra) -> int:
    if passed is None:
        passed = all(r.passed for r in reports)
    out = {"command": command, "passed": passed, "reports": [r.to_dict() for r in reports], **extra}
    print(json.dumps(_jsonable(out), indent=2))
    for r in reports:
        print(r.summary(), file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAILED


def _space_and_scalarizer(path):
    space = space_from_dict(_load(path))
    return space, Scalarizer(space.cone)


def _point(space, raw: str):
    return raw if space.is_finite else float(raw)


def cmd_check_cone(args) -> int:
    cone = Cone.from_dict(_load(args.cone), strict=False)
    return _emit("check-cone", [validate_cone(cone, args.samples, args.seed)])


def cmd_check_lemmas(args) -> int:
    s = Scalarizer(Cone.from_dict(_load(args.cone)))
    reps = [
        check_oracle(s, args.samples, args.seed),
        check_lemma1(s, args.samples, args.seed),
        check_lemma2(s, args.samples, args.seed),
    ]
    return _emit("check-lemmas", reps)


def cmd_induce(args) -> int:
    space, s = _space_and_scalarizer(args.space)
    m = InducedMetric(space, s)
    if space.is_finite:
        labels = space.points
        D = m.table()
    else:
        if args.points:
            pts = [float(v) for v in args.points.split(",")]
        else:
            pts = sorted(np.random.default_rng(args.seed).uniform(-10, 10, 5).round(3).tolist())
        labels = pts
        D = m.distances(np.repeat(pts, len(pts)), np.tile(pts, len(pts))).reshape(len(pts), len(pts))
    table = {"points": labels, "d_p": D.tolist(), "cone": space.cone.to_dict()}
    Path(args.pairs).write_text(json.dumps(_jsonable(table), indent=2))
    reps = [
        verify_cone_metric_axioms(space, args.samples, args.seed),
        verify_induced_metric(m, args.samples, args.seed),
    ]
    figures = []
    if args.figures:
        from .plotting import plot_distance_table

        figures.append(str(plot_distance_table([str(v) for v in labels], D, Path(args.figures) / "induced_metric.png")))
    return _emit("induce", reps, table=args.pairs, figures=figures)


def cmd_verify(args) -> int:
    space, s = _space_and_scalarizer(args.space)
    f = SelfMap.from_dict(_load(args.map), space)
    vc = VectorialComparison.from_dict(_load(args.phi), space.cone)
    m = InducedMetric(space, s)
    psi = transfer_psi(vc, s)
    grid = np.logspace(-3, 3, 50)
    reps = [
        verify_vectorial(vc, seed=args.seed),
        check_transfer(vc, s, grid),
        verify_vector_contraction(f, vc, args.samples, args.seed),
        verify_scalar_contraction(f, psi, m, args.samples, args.seed),
        theorem21_implication(f, vc, s, args.samples, args.seed),
    ]
    figures = []
    if args.figures:
        from .fixedpoint import _pairs, _scalar_mask
        from .plotting import plot_transfer

        a, b = _pairs(space, None, min(args.samples, 2000), args.seed)
        d = m.scalarizer.xi(space.p[a, b] if space.is_finite else space.distances(a, b))
        _, _, fd, _ = _scalar_mask(f, psi, m, a, b)
        t_max = float(np.max(d)) if np.size(d) and np.max(d) > 0 else 1.0
        figures.append(str(plot_transfer(psi, Path(args.figures) / "transfer.png", t_max, (d, fd))))
    return _emit("verify", reps, figures=figures)


def cmd_solve(args) -> int:
    space, s = _space_and_scalarizer(args.space)
    f = SelfMap.from_dict(_load(args.map), space)
    m = InducedMetric(space, s)
    run = picard_solve(f, m, _point(space, args.x0), args.tol, args.max_iter)
    reps = []
    if args.starts:
        starts = [_point(space, v) for v in args.starts.split(",")]
        reps.append(verify_uniqueness(f, m, starts, args.tol, args.max_iter))
    figures = []
    if args.figures:
        from .plotting import plot_residuals

        figures.append(str(plot_residuals(run.residuals, Path(args.figures) / "residuals.png", args.tol)))
    passed = run.converged and all(r.passed for r in reps)
    code = _emit("solve", reps, passed=passed, solution=run.to_dict(), figures=figures)
    status = "converged" if run.converged else "did not converge"
    print(f"picard: {status} after {run.iterations} iterations, x* = {run.fixed_point}", file=sys.stderr)
    return code


def cmd_check_c(args) -> int:
    space, s = _space_and_scalarizer(args.space)
    f = SelfMap.from_dict(_load(args.f), space)
    g = SelfMap.from_dict(_load(args.g), space)
    vc = VectorialComparison.from_dict(_load(args.phi), space.cone)
    m = InducedMetric(space, s)
    c = check_condition_C(f, g, vc, samples=args.samples, seed=args.seed)
    c1 = check_condition_C1(f, g, transfer_psi(vc, s), m, samples=args.samples, seed=args.seed)
    r23 = remark23_implication(f, g, vc, s, samples=args.samples, seed=args.seed)
    return _emit("check-c", [c, c1, r23], C_holds=c.passed, C1_holds=c1.passed)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conekit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, samples):
        sp.add_argument("--samples", type=int, default=samples)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("check-cone", help="sampled cone-axiom validation")
    sp.add_argument("cone")
    common(sp, 1000)
    sp.set_defaults(func=cmd_check_cone)

    sp = sub.add_parser("check-lemmas", help="scalarization property suites")
    sp.add_argument("cone")
    common(sp, 10_000)
    sp.set_defaults(func=cmd_check_lemmas)

    sp = sub.add_parser("induce", help="emit the induced scalar distance table")
    sp.add_argument("space")
    sp.add_argument("--pairs", required=True, help="output JSON file for the d_p table")
    sp.add_argument("--points", help="comma-separated points (weighted line only)")
    sp.add_argument("--figures", help="directory for figures")
    common(sp, 10_000)
    sp.set_defaults(func=cmd_induce)

    sp = sub.add_parser("verify", help="vector and scalar contraction checks")
    sp.add_argument("space")
    sp.add_argument("map")
    sp.add_argument("phi")
    sp.add_argument("--figures", help="directory for figures")
    common(sp, 10_000)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("solve", help="Picard iteration to the fixed point")
    sp.add_argument("space")
    sp.add_argument("map")
    sp.add_argument("--x0", required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=10_000)
    sp.add_argument("--starts", help="comma-separated starts for a uniqueness check")
    sp.add_argument("--figures", help="directory for figures")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("check-c", help="conditions (C) and (C1) for a pair of maps")
    sp.add_argument("space")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("phi")
    common(sp, 10_000)
    sp.set_defaults(func=cmd_check_c)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, KeyError, ValueError, TypeError) as exc:
        print(f"conekit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
