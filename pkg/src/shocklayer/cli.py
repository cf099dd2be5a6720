"""Command-line front end: solves, sweeps, trajectories and studies to files.

Outputs are CSV (RFC-4180, header row, 17 significant digits) plus a
versioned summary.json manifest that records everything needed to reproduce
the run.  Exit codes: 0 converged and physically valid, 2 converged but
invalid (the concentrated-layer description broke down), 1 solver failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .model import (
    GasModel,
    NonPositiveBaseError,
    ProblemConfig,
    chaplygin_min_mach,
    compute_coefficients,
)
from .postprocess import (
    DEFAULT_EXCLUSION,
    FieldProfile,
    IntegrandUnavailableError,
    SingularityTooStrongError,
    compute_h,
    default_field_grid,
    integrate_trajectory,
    recover_fields,
)
from .solver import (
    ContinuationError,
    NewtonConfig,
    continuation_solve,
    default_continuation_steps,
)
from .spectral import (
    SpectralCoefficients,
    quasi_l1_norm,
    residual_function,
)
from .validation import (
    StudyReport,
    chaplygin_reference_check,
    error_study,
    galerkin_oracle,
    monotonicity_study,
    solution_shape_metrics,
    wc_extremum_study,
)

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_SOLVER_FAILURE = 1
EXIT_INVALID = 2
EXIT_USAGE = 64

_ANGLE_RE = re.compile(r"^(?P<sign>[+-]?)(?P<mult>\d+(?:\.\d+)?)?pi(?:/(?P<den>\d+(?:\.\d+)?))?$")


class _Parser(argparse.ArgumentParser):
    """argparse with the sysexits usage code instead of 2.

    The negative-number matcher also admits '-pi/36'-style angles so they
    are not mistaken for option flags.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(
            r"^-(\d+(\.\d*)?|\d*\.?\d*pi(/\d+(\.\d+)?)?)$"
        )

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def parse_angle(text: str) -> float:
    """Angle in radians from a decimal or a 'pi/K'-style fraction.

    Accepts e.g. '0.5', 'pi', 'pi/6', '2pi/9', '-pi/36'.
    """
    s = text.strip().lower().replace(" ", "")
    m = _ANGLE_RE.match(s)
    if m:
        val = math.pi * float(m.group("mult") or 1.0)
        if m.group("den"):
            val /= float(m.group("den"))
        return -val if m.group("sign") == "-" else val
    try:
        return float(s)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}; use radians or pi/K syntax") from None


def parse_gas(text: str) -> GasModel:
    s = text.strip().lower()
    if s == "hypersonic":
        return GasModel.hypersonic_limit()
    if s.startswith("chaplygin:"):
        return GasModel.chaplygin(float(s.split(":", 1)[1]))
    raise ValueError(f"unknown gas {text!r}; use 'hypersonic' or 'chaplygin:MACH'")


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _default_out() -> str:
    return os.environ.get("SHOCKLAYER_OUT", "out")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _add_solve_flags(p: argparse.ArgumentParser, with_out: bool = True) -> None:
    p.add_argument("--theta0", type=parse_angle, help="semi-vertex angle (radians or pi/K)")
    p.add_argument("--alpha0", type=parse_angle, help="attack angle (radians or pi/K)")
    p.add_argument("--N", type=int, default=8, help="cosine truncation order (default 8)")
    p.add_argument(
        "--gas", type=parse_gas, default=GasModel.hypersonic_limit(),
        help="'hypersonic' (default) or 'chaplygin:MACH'",
    )
    p.add_argument("--tol", type=float, default=1e-12, help="Newton step tolerance")
    p.add_argument("--max-iter", type=int, default=50, help="Newton iteration cap")
    p.add_argument("--grid", type=int, default=2048, help="output grid size (default 2048)")
    p.add_argument(
        "--steps", type=int, default=None,
        help="continuation stages in attack angle (default: one per pi/36)",
    )
    if with_out:
        p.add_argument("--out", type=Path, default=None, help="output directory")


def build_parser() -> _Parser:
    parser = _Parser(prog="shocklayer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one configuration and write field files")
    _add_solve_flags(p_solve)
    p_solve.add_argument(
        "--from-manifest", type=Path, default=None,
        help="re-run the configuration recorded in an earlier summary.json",
    )

    p_sweep = sub.add_parser("sweep", help="solve a parameter grid, one directory per case")
    p_sweep.add_argument("--theta0", type=str, help="comma list of angles")
    p_sweep.add_argument("--alpha0", type=str, help="comma list of angles")
    p_sweep.add_argument("--N", type=str, default="8", help="comma list of truncation orders")
    p_sweep.add_argument("--gas", type=parse_gas, default=GasModel.hypersonic_limit())
    p_sweep.add_argument("--tol", type=float, default=1e-12)
    p_sweep.add_argument("--max-iter", type=int, default=50)
    p_sweep.add_argument("--grid", type=int, default=2048)
    p_sweep.add_argument("--steps", type=int, default=None)
    p_sweep.add_argument("--jobs", type=int, default=1, help="concurrent cases (default 1)")
    p_sweep.add_argument("--out", type=Path, default=None)

    p_traj = sub.add_parser("trajectory", help="integrate a particle path on the cone")
    _add_solve_flags(p_traj)
    p_traj.add_argument("--phi0", type=parse_angle, required=True, help="start azimuth")
    p_traj.add_argument("--r0", type=float, required=True, help="start radius (positive)")
    p_traj.add_argument("--phi-end", type=parse_angle, default=None, help="stop azimuth")
    p_traj.add_argument(
        "--solve-dir", type=Path, default=None,
        help="reuse coefficients.csv and summary.json from a prior solve",
    )

    p_val = sub.add_parser("validate", help="run a consistency or reproduction study")
    p_val.add_argument(
        "study", choices=["oracle", "error", "wc-extrema", "monotonicity", "chaplygin"]
    )
    p_val.add_argument("--theta0", type=parse_angle, default=math.pi / 6)
    p_val.add_argument("--alpha0", type=parse_angle, default=math.pi / 36)
    p_val.add_argument(
        "--alpha0-list", type=str, default="pi/36,pi/18,pi/12,pi/9",
        help="comma list for the extremum study",
    )
    p_val.add_argument(
        "--theta0-list", type=str, default="pi/9,pi/6,pi/4",
        help="comma list for the monotonicity study",
    )
    p_val.add_argument("--mach", type=float, default=3.0)
    p_val.add_argument("--N", type=int, default=8)
    p_val.add_argument("--out", type=Path, default=None, help="study report JSON path")
    return parser


def _angle_list(text: str) -> list[float]:
    items = [t for t in (text or "").split(",") if t.strip()]
    if not items:
        raise _UsageError("empty angle list")
    return [parse_angle(t) for t in items]


def _int_list(text: str) -> list[int]:
    items = [t for t in (text or "").split(",") if t.strip()]
    if not items:
        raise _UsageError("empty list")
    return [int(t) for t in items]


def _gas_dict(gas: GasModel) -> dict:
    return {"kind": gas.kind, "mach": gas.mach, "p0": gas.p0}


def _gas_from_dict(d: dict) -> GasModel:
    if d["kind"] == "chaplygin":
        return GasModel.chaplygin(d["mach"])
    return GasModel.hypersonic_limit()


def _solve_one(config: ProblemConfig, tol: float, max_iter: int, steps: int | None):
    cfg = NewtonConfig(max_iterations=max_iter, tolerance=tol)
    steps = steps if steps is not None else default_continuation_steps(config.alpha0)
    coeffs, reports = continuation_solve(config, steps, cfg)
    return coeffs, reports, steps


def _degraded_profile(coeffs, config, grid) -> FieldProfile:
    # y-recovery failed: keep the algebraic fields, blank the quotient ones.
    from .model import pressure_wc
    from .spectral import eval_series

    f, fdot, _ = eval_series(coeffs, grid)
    nan = np.full(grid.size, np.nan)
    return FieldProfile(
        grid, f, fdot, compute_h(coeffs, config, grid), nan, nan, nan, nan,
        pressure_wc(f, grid, config), np.zeros(grid.size, dtype=bool), coeffs, config,
    )


def _run_solve(
    config: ProblemConfig,
    out_dir: Path,
    tol: float,
    max_iter: int,
    grid_size: int,
    steps: int | None,
) -> dict:
    """Solve, write fields/coefficients/residual CSVs and the manifest."""
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _utc_now()
    try:
        coeffs, reports, steps_used = _solve_one(config, tol, max_iter, steps)
    except ContinuationError as err:
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "shocklayer", "version": __version__},
            "created_utc": started,
            "config": _config_dict(config, tol, max_iter, grid_size, steps),
            "error": str(err),
        }
        (out_dir / "summary.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        return {"exit": EXIT_SOLVER_FAILURE, "manifest": manifest}

    grid = default_field_grid(grid_size)
    postprocess_error = None
    if config.alpha0 == 0.0:
        profile = recover_fields(coeffs, config, grid)
    else:
        try:
            profile = recover_fields(coeffs, config, grid)
        except (SingularityTooStrongError, IntegrandUnavailableError) as err:
            postprocess_error = str(err)
            profile = _degraded_profile(coeffs, config, grid)

    cols = profile.columns()
    write_csv(
        out_dir / "fields.csv",
        list(cols.keys()),
        (
            [_fmt(cols[k][i]) if k != "valid" else ("1" if cols[k][i] else "0") for k in cols]
            for i in range(grid.size)
        ),
    )
    write_csv(
        out_dir / "coefficients.csv",
        ["n", "b_n"],
        ([str(n), _fmt(bn)] for n, bn in enumerate(coeffs.b)),
    )
    resid_grid = np.linspace(-math.pi, math.pi, grid_size, endpoint=False)
    ode = compute_coefficients(config)
    resid = residual_function(coeffs, ode, resid_grid)
    write_csv(
        out_dir / "residual.csv",
        ["phi", "e_n"],
        ([_fmt(p), _fmt(e)] for p, e in zip(resid_grid, resid)),
    )

    shape = solution_shape_metrics(coeffs, config, grid)
    try:
        min_mach = chaplygin_min_mach(config, profile.f, grid)
    except NonPositiveBaseError:
        min_mach = None
    # exit-code validity tracks visible physical breakdown; the strict
    # truncation-scale shape flags are reported alongside for the studies
    f_visible_nonneg = bool(shape["f_min_rel"] >= -1e-2)
    valid = bool(shape["wc_positive"] and f_visible_nonneg)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "shocklayer", "version": __version__},
        "created_utc": started,
        "config": _config_dict(config, tol, max_iter, grid_size, steps_used),
        "outputs": {
            "fields": "fields.csv",
            "coefficients": "coefficients.csv",
            "residual": "residual.csv",
        },
        "validity": {
            "wc_positive": shape["wc_positive"],
            "f_nonnegative": f_visible_nonneg,
            "f_nonnegative_strict": shape["f_nonnegative"],
            "boundary_pinned": shape["boundary_pinned"],
            "valid": valid,
            "closed_form_branch": config.alpha0 == 0.0,
            "postprocess_error": postprocess_error,
        },
        "metrics": {
            "quasi_l1": quasi_l1_norm(resid),
            "max_abs_residual": float(np.max(np.abs(resid))),
            "f_max": shape["f_max"],
            "f_min": shape["f_min"],
            "f0_defect": shape["f0_defect"],
            "fpi_defect": shape["fpi_defect"],
            "wc_min": shape["wc_min"],
            "wc_max": shape["wc_max"],
            "wc_const": shape["wc_min"] if config.alpha0 == 0.0 else None,
            "chaplygin_min_mach": min_mach,
            "newton_iterations": [r.iterations for r in reports],
            "final_step_norm": reports[-1].final_step_norm,
            "final_residual_norm": reports[-1].final_residual_norm,
        },
    }
    (out_dir / "summary.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return {
        "exit": EXIT_OK if valid else EXIT_INVALID,
        "manifest": manifest,
        "coeffs": coeffs,
        "profile": profile,
        "config": config,
    }


def _config_dict(config, tol, max_iter, grid_size, steps) -> dict:
    return {
        "theta0": config.theta0,
        "alpha0": config.alpha0,
        "N": config.N,
        "gas": _gas_dict(config.gas),
        "newton_tolerance": tol,
        "newton_max_iterations": max_iter,
        "grid_size": grid_size,
        "continuation_steps": steps,
    }


def _config_from_manifest(manifest: dict):
    c = manifest["config"]
    config = ProblemConfig(
        theta0=c["theta0"], alpha0=c["alpha0"], gas=_gas_from_dict(c["gas"]), N=c["N"]
    )
    return config, c["newton_tolerance"], c["newton_max_iterations"], c["grid_size"], c[
        "continuation_steps"
    ]


def cmd_solve(args) -> int:
    if args.from_manifest is not None:
        manifest = json.loads(args.from_manifest.read_text(encoding="utf-8"))
        config, tol, max_iter, grid_size, steps = _config_from_manifest(manifest)
    else:
        if args.theta0 is None or args.alpha0 is None:
            raise _UsageError("solve requires --theta0 and --alpha0 (or --from-manifest)")
        config = ProblemConfig(theta0=args.theta0, alpha0=args.alpha0, gas=args.gas, N=args.N)
        tol, max_iter, grid_size, steps = args.tol, args.max_iter, args.grid, args.steps
    out_dir = args.out if args.out is not None else Path(_default_out())
    result = _run_solve(config, out_dir, tol, max_iter, grid_size, steps)
    if result["exit"] == EXIT_SOLVER_FAILURE:
        print(f"solver failure: {result['manifest']['error']}", file=sys.stderr)
    else:
        v = result["manifest"]["validity"]
        print(
            f"solved theta0={config.theta0:.6f} alpha0={config.alpha0:.6f} N={config.N}: "
            f"valid={v['valid']} (Wc>0: {v['wc_positive']}, f>=0: {v['f_nonnegative']}, "
            f"pinned: {v['boundary_pinned']}) -> {out_dir}"
        )
    return result["exit"]


def _sweep_case(payload: dict) -> dict:
    config = ProblemConfig(
        theta0=payload["theta0"],
        alpha0=payload["alpha0"],
        gas=_gas_from_dict(payload["gas"]),
        N=payload["N"],
    )
    result = _run_solve(
        config,
        Path(payload["dir"]),
        payload["tol"],
        payload["max_iter"],
        payload["grid"],
        payload["steps"],
    )
    return {
        "dir": payload["dir"],
        "theta0": payload["theta0"],
        "alpha0": payload["alpha0"],
        "N": payload["N"],
        "exit": result["exit"],
        "valid": result["manifest"].get("validity", {}).get("valid", False),
    }


def cmd_sweep(args) -> int:
    thetas = _angle_list(args.theta0)
    alphas = _angle_list(args.alpha0)
    orders = _int_list(args.N)
    out_dir = args.out if args.out is not None else Path(_default_out())
    out_dir.mkdir(parents=True, exist_ok=True)
    cases = []
    for theta0 in thetas:
        for alpha0 in alphas:
            for N in orders:
                tag = f"case_t{theta0:.6f}_a{alpha0:.6f}_N{N}".replace("-", "m")
                cases.append(
                    {
                        "theta0": theta0,
                        "alpha0": alpha0,
                        "N": N,
                        "gas": _gas_dict(args.gas),
                        "tol": args.tol,
                        "max_iter": args.max_iter,
                        "grid": args.grid,
                        "steps": args.steps,
                        "dir": str(out_dir / tag),
                    }
                )
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_case, cases))
    else:
        results = [_sweep_case(c) for c in cases]
    index = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "shocklayer", "version": __version__},
        "created_utc": _utc_now(),
        "cases": results,
    }
    (out_dir / "index.json").write_text(json.dumps(index, indent=2), encoding="utf-8")
    failures = [r for r in results if r["exit"] == EXIT_SOLVER_FAILURE]
    print(f"sweep: {len(results)} cases, {len(failures)} solver failures -> {out_dir}")
    return EXIT_OK if not failures else EXIT_SOLVER_FAILURE


def cmd_trajectory(args) -> int:
    if args.r0 <= 0:
        raise _UsageError("--r0 must be positive")
    out_dir = args.out if args.out is not None else Path(_default_out())
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.solve_dir is not None:
        manifest = json.loads((args.solve_dir / "summary.json").read_text(encoding="utf-8"))
        config, _, _, grid_size, _ = _config_from_manifest(manifest)
        b = np.array(
            [
                float(row["b_n"])
                for row in csv.DictReader(
                    (args.solve_dir / "coefficients.csv").open(encoding="utf-8")
                )
            ]
        )
        coeffs = SpectralCoefficients(config.N, b)
        profile = recover_fields(coeffs, config, default_field_grid(grid_size))
    else:
        if args.theta0 is None or args.alpha0 is None:
            raise _UsageError("trajectory requires --theta0/--alpha0 or --solve-dir")
        config = ProblemConfig(theta0=args.theta0, alpha0=args.alpha0, gas=args.gas, N=args.N)
        coeffs, _, _ = _solve_one(config, args.tol, args.max_iter, args.steps)
        profile = recover_fields(coeffs, config, default_field_grid(args.grid))
    try:
        traj = integrate_trajectory(profile, args.phi0, args.r0, args.phi_end)
    except (IntegrandUnavailableError, ValueError) as err:
        print(f"trajectory error: {err}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    x1, x2, x3 = traj.cartesian()
    write_csv(
        out_dir / "trajectory.csv",
        ["phi", "r", "x1", "x2", "x3"],
        (
            [_fmt(traj.phi[i]), _fmt(traj.r[i]), _fmt(x1[i]), _fmt(x2[i]), _fmt(x3[i])]
            for i in range(traj.phi.size)
        ),
    )
    print(
        f"trajectory from phi0={traj.phi0:.6f}, r0={traj.r0}: {traj.phi.size} samples, "
        f"r_end={traj.r[-1]:.6f} -> {out_dir / 'trajectory.csv'}"
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.study == "oracle":
        rng = np.random.default_rng(20240401)
        worst = 0.0
        for _ in range(100):
            theta0 = rng.uniform(0.1, 1.3)
            alpha0 = rng.uniform(0.0, theta0)
            N = int(rng.integers(5, 11))
            coeffs = SpectralCoefficients(N, rng.uniform(-1e-3, 1e-3, N + 1))
            ode = compute_coefficients(ProblemConfig(theta0=theta0, alpha0=alpha0, N=N))
            phi = rng.uniform(-math.pi, math.pi, 512)
            worst = max(worst, galerkin_oracle(coeffs, ode, phi=phi))
        report = StudyReport(
            "oracle",
            {"trials": 100, "samples": 512, "seed": 20240401},
            {"max_discrepancy": 1e-12},
            cases=[{"max_discrepancy": worst, "passed": worst <= 1e-12}],
            passed=worst <= 1e-12,
        )
    elif args.study == "error":
        report = error_study(args.theta0, args.alpha0)
    elif args.study == "wc-extrema":
        report = wc_extremum_study(args.theta0, _angle_list(args.alpha0_list), args.N)
    elif args.study == "monotonicity":
        report = monotonicity_study(args.alpha0, _angle_list(args.theta0_list), args.N)
    else:
        report = chaplygin_reference_check(args.theta0, args.mach)
    text = report.to_json()
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK if report.passed else EXIT_SOLVER_FAILURE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "trajectory":
            return cmd_trajectory(args)
        return cmd_validate(args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ContinuationError as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE


if __name__ == "__main__":
    sys.exit(main())
