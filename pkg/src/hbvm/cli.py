"""Command-line surface: tableau construction, spectrum and verification
reports, trajectory integration, order measurement, and stability scans.

Every command is a thin shell over the library; machine output is JSON or
CSV with 17-significant-digit reals.  Exit codes: 0 success, 1 failed
check or non-convergent solver, 2 bad arguments (nothing written).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .integrator import (
    SolverConfig,
    StageConvergenceError,
    convergence_order,
    energy_drift,
    integrate,
    trajectory_to_csv,
)
from .legendre import NodeFamily
from .problems import catalog, get_problem
from .spectral import (
    a_stability_scan,
    classify_spectrum,
    isospectral_check,
    verification_sweep,
)
from .tableau import (
    HbvmSpec,
    hbvm_tableau,
    tableau_from_json,
    tableau_to_json,
)

_FMT = ".17g"


def _color(text: str, code: str) -> str:
    if os.environ.get("HBVM_NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _ok(flag: bool) -> str:
    return _color("PASS", "32") if flag else _color("FAIL", "31")


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not serialisable: {type(obj)}")


def _dump_json(obj) -> str:
    # json never calls default() for floats, so round-trip formatting is
    # applied by pre-rendering them as fixed-width literals.
    def render(x):
        if isinstance(x, float):
            if math.isfinite(x):
                return format(x, _FMT)
            return json.dumps(x)  # Infinity / NaN, json module convention
        if isinstance(x, bool) or x is None:
            return json.dumps(x)
        if isinstance(x, (int, str)):
            return json.dumps(x)
        if isinstance(x, complex):
            return render([x.real, x.imag])
        if isinstance(x, (np.floating, np.integer, np.complexfloating)):
            return render(x.item())
        if isinstance(x, np.ndarray):
            return render(x.tolist())
        if isinstance(x, dict):
            items = ", ".join(f"{json.dumps(k)}: {render(v)}" for k, v in x.items())
            return "{" + items + "}"
        if isinstance(x, (list, tuple)):
            return "[" + ", ".join(render(v) for v in x) + "]"
        raise TypeError(f"not serialisable: {type(x)}")

    return render(obj) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_spec(args) -> HbvmSpec:
    family = NodeFamily(args.family)
    nodes = None
    if family is NodeFamily.CUSTOM:
        if not args.nodes:
            raise ValueError("custom family requires --nodes")
        nodes = tuple(float(v) for v in args.nodes.split(","))
    elif args.nodes:
        raise ValueError("--nodes is only valid with --family custom")
    return HbvmSpec(k=args.k, s=args.s, family=family, nodes=nodes)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(mode=args.solver.replace("-", "_"), tol=args.tol,
                        max_iter=args.max_iter)


# -- subcommands -------------------------------------------------------------


def cmd_tableau(args) -> int:
    spec = _parse_spec(args)
    tab = hbvm_tableau(spec)
    _write(args.out, tableau_to_json(tab))
    return 0


def cmd_spectrum(args) -> int:
    spec = _parse_spec(args)
    report = isospectral_check(spec, args.tol)
    passed = report.passes(args.tol)
    payload = {
        "spec": {"k": spec.k, "s": spec.s, "family": spec.family.value},
        "eigenvalues": list(report.eigenvalues),
        "zero_count": report.zero_count,
        "expected_zero_count": spec.k - spec.s,
        "nonzero": list(report.nonzero),
        "reference": list(report.reference),
        "max_match_distance": report.max_match_distance,
        "passed": passed,
    }
    _write(args.out, _dump_json(payload))
    print(f"spectrum k={spec.k} s={spec.s} {spec.family.value}: "
          f"{report.zero_count} zero eigenvalues, "
          f"match distance {report.max_match_distance:.3e} {_ok(passed)}")
    return 0 if passed else 1


def cmd_verify(args) -> int:
    entries = verification_sweep(args.smax, args.kmax, args.tol, args.seed)
    if args.tableau_file:
        with open(args.tableau_file) as fh:
            tab = tableau_from_json(fh.read())
        if tab.s is None:
            raise ValueError("tableau file does not declare s")
        report = classify_spectrum(tab.A, tab.s, tab.family or "file")
        entries.append({
            "spec": {"k": tab.k, "s": tab.s,
                     "family": f"file:{args.tableau_file}", "seed": None},
            "zero_count": report.zero_count,
            "expected_zero_count": tab.k - tab.s,
            "max_match_distance": report.max_match_distance,
            "subspace_residual": None,
            "filter_residual": None,
            "wtransform_residuals": None,
            "a_stability_max_deviation": None,
            "passed": report.passes(args.tol),
        })
    _write(args.out, _dump_json(entries))
    n_fail = sum(not e["passed"] for e in entries)
    for e in entries:
        if not e["passed"]:
            print(f"  {e['spec']}: {_ok(False)} "
                  f"(match {e['max_match_distance']:.3e})")
    print(f"verify: {len(entries)} specs, {len(entries) - n_fail} passed, "
          f"{n_fail} failed {_ok(n_fail == 0)}")
    return 0 if n_fail == 0 else 1


def cmd_integrate(args) -> int:
    problem = get_problem(args.problem)
    spec = _parse_spec(args)
    cfg = _solver_config(args)
    try:
        traj = integrate(spec, problem.system, problem.default_y0, args.h,
                         args.steps, cfg, mode=args.mode)
    except StageConvergenceError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return 1
    _write(args.out, trajectory_to_csv(traj))
    max_dev, final_dev = energy_drift(traj)
    h0 = abs(traj.energies[0])
    rel = max_dev / h0 if h0 > 0 else max_dev
    print(f"integrate {problem.name} k={spec.k} s={spec.s} mode={args.mode}: "
          f"{args.steps} steps, max |H - H0| = {max_dev:.3e} "
          f"(relative {rel:.3e})")
    return 0


def cmd_order(args) -> int:
    problem = get_problem(args.problem)
    spec = _parse_spec(args)
    cfg = _solver_config(args)
    h_list = [args.hmax / 2 ** i for i in range(args.levels)]
    try:
        fit = convergence_order(spec, problem, args.t_end, h_list, cfg,
                                mode=args.mode)
    except StageConvergenceError as exc:
        print(f"order run failed: {exc}", file=sys.stderr)
        return 1
    print(f"order {problem.name} k={spec.k} s={spec.s} "
          f"(expected {2 * spec.s}):")
    print("  h                 error")
    for h, err in zip(fit.step_sizes, fit.errors):
        print(f"  {h:<16.10g}  {err:.6e}")
    print(f"  measured slope: {fit.slope:.4f}  "
          f"({fit.n_trimmed} point(s) at rounding floor trimmed)")
    if args.out:
        payload = {
            "problem": problem.name,
            "spec": {"k": spec.k, "s": spec.s, "family": spec.family.value},
            "expected_order": 2 * spec.s,
            "slope": fit.slope,
            "step_sizes": list(fit.step_sizes),
            "errors": list(fit.errors),
            "n_trimmed": fit.n_trimmed,
        }
        _write(args.out, _dump_json(payload))
    return 0


def cmd_stability(args) -> int:
    spec = _parse_spec(args)
    tab = hbvm_tableau(spec)
    scan = a_stability_scan(tab)
    payload = {
        "spec": {"k": spec.k, "s": spec.s, "family": spec.family.value},
        "imag_axis_max_deviation": scan.imag_axis_max_deviation,
        "lhp_max_modulus": scan.lhp_max_modulus,
        "max_deviation": scan.max_deviation,
        "poles": list(scan.poles),
    }
    if args.out:
        _write(args.out, _dump_json(payload))
    passed = scan.max_deviation <= args.tol
    print(f"stability k={spec.k} s={spec.s} {spec.family.value}: "
          f"max ||R(iy)|-1| = {scan.imag_axis_max_deviation:.3e}, "
          f"max |R| over left half-plane = {scan.lhp_max_modulus:.12f} "
          f"{_ok(passed)}")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hbvm",
        description="Energy-preserving implicit Runge-Kutta toolbox",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_spec_args(p, k_default=None, s_default=None):
        p.add_argument("--k", type=int, required=k_default is None,
                       default=k_default, help="number of stages")
        p.add_argument("--s", type=int, required=s_default is None,
                       default=s_default, help="polynomial degree")
        p.add_argument("--family", choices=[f.value for f in NodeFamily],
                       default="gauss")
        p.add_argument("--nodes", help="comma-separated custom nodes in (0, 1]")

    def add_solver_args(p):
        p.add_argument("--solver", choices=["fixed-point", "newton"],
                       default="fixed-point")
        p.add_argument("--tol", type=float, default=1e-13,
                       help="stage residual tolerance")
        p.add_argument("--max-iter", type=int, default=100)

    p = sub.add_parser("tableau", help="emit a tableau as JSON")
    add_spec_args(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_tableau)

    p = sub.add_parser("spectrum", help="classify a stage-matrix spectrum")
    add_spec_args(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run structural checks over the spec matrix")
    p.add_argument("--smax", type=int, default=4)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=42,
                   help="seed for the random custom node sets")
    p.add_argument("--tableau-file", help="also check a serialised tableau")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("integrate", help="integrate a catalog problem to CSV")
    p.add_argument("--problem", required=True,
                   help="one of: " + ", ".join(pr.name for pr in catalog()))
    add_spec_args(p)
    p.add_argument("--h", type=float, required=True, help="step size")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--mode", choices=["rk", "gamma"], default="rk")
    add_solver_args(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("order", help="measure the convergence order")
    p.add_argument("--problem", required=True)
    add_spec_args(p)
    p.add_argument("--hmax", type=float, default=0.1)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--t-end", type=float, default=2.0 * np.pi)
    p.add_argument("--mode", choices=["rk", "gamma"], default="rk")
    add_solver_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("stability", help="scan the linear stability function")
    add_spec_args(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stability)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
