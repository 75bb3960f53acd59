"""Command-line interface.

Subcommands: run, sweep, collapse, boundary {eval|solve|fit}, oracle-check,
dump-hamiltonian.  Exit codes: 0 success, 1 validation failure (checks ran
and failed), 2 usage/config error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .analysis import (
    BoundaryParams,
    QPP_CRITICAL_POINTS,
    SP_CRITICAL_POINTS,
    ceff_two_size,
    collapse_variables,
    fit_c0,
    fit_ceff,
    fit_collapse,
    boundary_value,
    solve_boundary,
)
from .config import ConfigError, apply_overrides, load_config, parse_config
from .ensemble import write_point_outputs, sweep_grid, _write_json_atomic, _fmt
from .exceptions import CapacityError, InfeasibleLevelError, NoSolutionError, NumericalError
from .lattice import build_hamiltonian, build_potential
from .monitor import MonitorConfig
from .oracle import lockstep_trajectory
from .seeding import REALIZATION_STREAM, TRAJECTORY_STREAM, generator, stream_key

CEFF_TABLE_COLUMNS = "L,L2,gamma,potential_type,potential_param,method,c_eff,c_eff_err,s0,residual"


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_parsed(args) -> dict:
    cfg = load_config(args.config)
    apply_overrides(cfg, args.override or [])
    return parse_config(cfg)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def _run_manifest(out_dir: Path, spec, workers, result, checksums) -> None:
    _write_json_atomic(
        out_dir / "manifest.json",
        {
            "spec": spec.to_dict(),
            "spec_hash": spec.spec_hash(),
            "workers": workers,
            "code_version": __version__,
            "trajectory_seeds": list(result.trajectory_seeds),
            "total_events": result.total_events,
            "checksums": checksums,
        },
    )


def cmd_run(args) -> int:
    from .ensemble import run_ensemble

    parsed = _load_parsed(args)
    spec = parsed["ensemble_spec"]
    out_dir: Path = parsed["output_dir"]
    manifest_path = out_dir / "manifest.json"
    if manifest_path.exists():
        old = json.loads(manifest_path.read_text(encoding="utf-8"))
        checksums = old.get("checksums") or {}
        if (
            old.get("spec_hash") == spec.spec_hash()
            and checksums
            and all(
                (out_dir / name).exists()
                and hashlib.sha256((out_dir / name).read_bytes()).hexdigest() == digest
                for name, digest in checksums.items()
            )
        ):
            print(f"outputs in {out_dir} are up to date (spec hash match); skipping")
            return 0
    result = run_ensemble(spec, workers=parsed["workers"])
    checksums = write_point_outputs(out_dir, spec, result)
    if not parsed["profile"]:
        (out_dir / "entropy_profile.csv").unlink(missing_ok=True)
        checksums.pop("entropy_profile.csv", None)
    _run_manifest(out_dir, spec, parsed["workers"], result, checksums)
    print(f"wrote {out_dir}/summary.csv (S_half = {result.s_half_mean:.4f} ± {result.s_half_stderr:.4f})")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _read_csv_rows(path: Path) -> list[dict]:
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:] if line]


def _profile_from_csv(point_dir: Path) -> tuple[int, np.ndarray, np.ndarray]:
    rows = _read_csv_rows(point_dir / "entropy_profile.csv")
    L = int(rows[0]["L"])
    mean = np.empty(L - 1)
    err = np.empty(L - 1)
    for row in rows:
        ell = int(row["ell"])
        mean[ell - 1] = float(row["S_mean"])
        err[ell - 1] = float(row["S_stderr"])
    return L, mean, err


def _s_half_from_csv(point_dir: Path) -> tuple[float, float]:
    row = _read_csv_rows(point_dir / "summary.csv")[0]
    return float(row["S_half_mean"]), float(row["S_half_stderr"])


def write_ceff_table(out_dir: Path, points: list[dict], sizes: tuple[int, ...], base) -> Path:
    """c_eff estimates per sweep point.

    With exactly a doubling size pair the table holds one two-size estimate
    per (gamma, potential) pair; otherwise one profile-fit row per point.
    """
    pot_kind = base.model.potential.kind
    lines = [CEFF_TABLE_COLUMNS]
    doubling_pair = len(sizes) == 2 and sizes[1] == 2 * sizes[0]
    if doubling_pair:
        by_params: dict[tuple[float, float], dict[int, tuple[float, float]]] = {}
        for pt in points:
            key = (pt["gamma"], pt["potential_param"])
            by_params.setdefault(key, {})[pt["L"]] = _s_half_from_csv(pt["dir"])
        for (gamma, param), halves in by_params.items():
            (s_lo, e_lo), (s_hi, e_hi) = halves[sizes[0]], halves[sizes[1]]
            c = ceff_two_size(s_lo, s_hi)
            c_err = 3.0 / np.log(2.0) * float(np.hypot(e_lo, e_hi))
            lines.append(
                f"{sizes[0]},{sizes[1]},{_fmt(gamma)},{pot_kind},{_fmt(param)},"
                f"two_size,{_fmt(c)},{_fmt(c_err)},nan,nan"
            )
    else:
        for pt in points:
            L, mean, err = _profile_from_csv(pt["dir"])
            fit = fit_ceff(mean, L, errors=err)
            lines.append(
                f"{L},,{_fmt(pt['gamma'])},{pot_kind},{_fmt(pt['potential_param'])},"
                f"profile_fit,{_fmt(fit.c_eff)},{_fmt(fit.c_eff_err)},{_fmt(fit.s0)},{_fmt(fit.residual)}"
            )
    path = out_dir / "ceff_table.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def cmd_sweep(args) -> int:
    parsed = _load_parsed(args)
    sweep = parsed["sweep"]
    if sweep is None:
        raise ConfigError("sweep: section required for the sweep command")
    points = sweep_grid(sweep, workers=parsed["workers"], log=lambda msg: print(msg, flush=True))
    table = write_ceff_table(Path(sweep.output_dir), points, sweep.sizes, sweep.base)
    print(f"wrote {table}")
    return 0


# ---------------------------------------------------------------------------
# collapse
# ---------------------------------------------------------------------------


def cmd_collapse(args) -> int:
    rows = _read_csv_rows(Path(args.input))
    rows = [r for r in rows if r["method"] == "profile_fit"]
    for fix in args.fix or []:
        if "=" not in fix:
            return _fail(2, f"--fix {fix!r} is not key=value")
        key, value = fix.split("=", 1)
        if key not in ("L", "gamma", "potential_param", "potential_type"):
            return _fail(2, f"--fix key {key!r} not a ceff_table column")
        if key == "potential_type":
            rows = [r for r in rows if r[key] == value]
        else:
            rows = [r for r in rows if float(r[key]) == float(value)]
    scan_col = args.scan
    xc_lo, xc_hi = args.xc_box
    pts = []
    for r in rows:
        x = float(r[scan_col])
        if x > xc_hi:
            pts.append((x, float(r["L"]), float(r["c_eff"])))
    pts = np.asarray(pts)
    if pts.size == 0 or np.unique(pts[:, 1]).size < 2:
        return _fail(2, "collapse needs points from >= 2 system sizes above the x_c search box")
    try:
        result = fit_collapse(pts, (xc_lo, xc_hi), tuple(args.nu_box), tuple(args.alpha_box))
    except ValueError as err:
        return _fail(2, str(err))
    X, Y, Ls = collapse_variables(pts, result.x_c, result.nu, result.alpha)
    payload = {
        "x_c": result.x_c,
        "nu": result.nu,
        "alpha": result.alpha,
        "quality": result.quality,
        "boundary_warning": result.boundary_warning,
        "scan": scan_col,
        "filters": args.fix or [],
        "points": [
            {"x": float(p[0]), "L": int(p[1]), "c_eff": float(p[2]), "X": float(x), "Y": float(y)}
            for p, x, y in zip(pts, X, Y)
        ],
    }
    _write_json_atomic(Path(args.out), payload)
    flag = " [boundary-fit warning]" if result.boundary_warning else ""
    print(
        f"x_c={result.x_c:.4f} nu={result.nu:.4f} alpha={result.alpha:.4f} "
        f"quality={result.quality:.3e}{flag}"
    )
    return 0


# ---------------------------------------------------------------------------
# boundary
# ---------------------------------------------------------------------------


def _boundary_params(args) -> BoundaryParams:
    kwargs = {}
    for name in ("a", "b", "c", "d", "e", "c0", "g0"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = value
    return BoundaryParams(**kwargs)


def _strength(args) -> float:
    for name in ("strength", "delta", "v", "w"):
        value = getattr(args, name, None)
        if value is not None:
            return value
    raise ConfigError("boundary eval needs a potential strength (--strength/--delta/--v/--w)")


def cmd_boundary(args) -> int:
    params = _boundary_params(args)
    if args.boundary_cmd == "eval":
        value = boundary_value(args.gamma, _strength(args), args.kind, params)
        print(f"{value:.4f}")
        return 0
    if args.boundary_cmd == "solve":
        critical = solve_boundary(args.gamma, args.kind, params)
        print(f"{critical:.10f}")
        return 0
    # fit
    if args.points:
        rows = _read_csv_rows(Path(args.points))
        points = [(float(r["strength"]), float(r["gamma_c"])) for r in rows]
    else:
        points = list(SP_CRITICAL_POINTS if args.kind == "sp" else QPP_CRITICAL_POINTS)
    c0, residual = fit_c0(points, args.kind, params)
    print(f"c0={c0:.4f} rms_residual={residual:.4f}")
    print("note: the printed level 3 from the general parameter set is infeasible "
          "(the boundary function is bounded by 2); the calibrated level above is used instead.")
    if args.out:
        fitted = BoundaryParams(a=params.a, b=params.b, c=params.c, d=params.d, e=params.e, c0=c0, g0=params.g0)
        curve = []
        for gamma in np.linspace(0.0, 1.0, 101):
            try:
                curve.append({"gamma": float(gamma), "critical_strength": solve_boundary(float(gamma), args.kind, fitted)})
            except (NoSolutionError, InfeasibleLevelError):
                continue
        _write_json_atomic(
            Path(args.out),
            {
                "kind": args.kind,
                "a": params.a,
                "b": params.b,
                "c": params.c,
                "d": params.d,
                "e": params.e,
                "c0": c0,
                "rms_residual": residual,
                "points": [{"strength": p, "gamma_c": g} for p, g in points],
                "curve": curve,
            },
        )
        print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# oracle-check
# ---------------------------------------------------------------------------


def cmd_oracle_check(args) -> int:
    ham = build_hamiltonian(1.0, np.zeros(args.L))
    config = MonitorConfig(
        gamma=args.gamma,
        t_max=args.t_max if args.t_max is not None else 2.0 * args.L,
        protocol=args.protocol,
    )
    reports = []
    for i in range(args.seeds):
        seed = stream_key(args.master_seed, TRAJECTORY_STREAM, i)
        report = lockstep_trajectory(ham, config, seed, divergence_tol=max(args.tol, 1e-6))
        reports.append(report)
    worst = max(r.max_deviation for r in reports)
    payload = {
        "L": args.L,
        "gamma": args.gamma,
        "protocol": args.protocol,
        "tolerance": args.tol,
        "max_deviation": worst,
        "seeds": [
            {
                "seed": r.seed,
                "events": r.event_count,
                "max_entropy_dev": r.max_entropy_dev,
                "max_occupation_dev": r.max_occupation_dev,
                "max_mutual_info_dev": r.max_mutual_info_dev,
                "max_correlation_dev": r.max_correlation_dev,
            }
            for r in reports
        ],
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    if worst >= args.tol:
        print(f"FAIL: max deviation {worst:.3e} >= tolerance {args.tol:.3e}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# dump-hamiltonian
# ---------------------------------------------------------------------------


def cmd_dump_hamiltonian(args) -> int:
    parsed = _load_parsed(args)
    spec = parsed["ensemble_spec"]
    out_dir = Path(args.out) if args.out else parsed["output_dir"]
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = generator(stream_key(spec.master_seed, REALIZATION_STREAM, 0))
    p = build_potential(spec.model.potential, spec.model.L, rng)
    ham = build_hamiltonian(spec.model.J, p)
    eigenvalues = np.linalg.eigvalsh(ham.h)
    spectrum = ["index,eigenvalue"] + [f"{i},{_fmt(e)}" for i, e in enumerate(eigenvalues)]
    (out_dir / "spectrum.csv").write_text("\n".join(spectrum) + "\n", encoding="utf-8")
    matrix_lines = [",".join(_fmt(v) for v in np.real(row)) for row in ham.h]
    (out_dir / "hamiltonian.csv").write_text("\n".join(matrix_lines) + "\n", encoding="utf-8")
    print(f"wrote {out_dir}/spectrum.csv and {out_dir}/hamiltonian.csv")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monfermi", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument(
            "--override",
            action="append",
            metavar="SECTION.KEY=VALUE",
            help="override a config entry (JSON-literal values)",
        )

    p_run = sub.add_parser("run", help="run one trajectory ensemble and write CSVs")
    add_config_args(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep and fit c_eff per point")
    add_config_args(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_col = sub.add_parser("collapse", help="BKT data collapse of a c_eff table")
    p_col.add_argument("--input", required=True, help="ceff_table.csv from a sweep")
    p_col.add_argument("--scan", choices=("gamma", "potential_param"), required=True)
    p_col.add_argument("--fix", action="append", metavar="KEY=VALUE", help="row filter")
    p_col.add_argument("--xc-box", nargs=2, type=float, required=True, metavar=("LO", "HI"))
    p_col.add_argument("--nu-box", nargs=2, type=float, default=(1.0, 10.0), metavar=("LO", "HI"))
    p_col.add_argument("--alpha-box", nargs=2, type=float, default=(0.5, 6.0), metavar=("LO", "HI"))
    p_col.add_argument("--out", default="collapse_fit.json")
    p_col.set_defaults(func=cmd_collapse)

    p_b = sub.add_parser("boundary", help="phase-boundary evaluation / inversion / calibration")
    sub_b = p_b.add_subparsers(dest="boundary_cmd", required=True)
    for name in ("eval", "solve", "fit"):
        pb = sub_b.add_parser(name)
        pb.add_argument("--kind", choices=("sp", "qpp", "anderson"), required=True)
        for pname in ("a", "b", "c", "d", "e", "c0", "g0"):
            pb.add_argument(f"--{pname}", type=float, default=None)
        if name == "eval":
            pb.add_argument("--gamma", type=float, required=True)
            pb.add_argument("--strength", type=float, default=None)
            pb.add_argument("--delta", type=float, default=None)
            pb.add_argument("--v", type=float, default=None)
            pb.add_argument("--w", type=float, default=None)
        elif name == "solve":
            pb.add_argument("--gamma", type=float, required=True)
        else:
            pb.add_argument("--points", help="CSV with columns strength,gamma_c (defaults to built-in tables)")
            pb.add_argument("--out", help="write boundary_fit.json here")
        pb.set_defaults(func=cmd_boundary)

    p_oc = sub.add_parser("oracle-check", help="lockstep Gaussian-vs-ED validation")
    p_oc.add_argument("--L", type=int, default=8)
    p_oc.add_argument("--gamma", type=float, required=True)
    p_oc.add_argument("--seeds", type=int, default=20)
    p_oc.add_argument("--tol", type=float, default=1e-8)
    p_oc.add_argument("--protocol", choices=("born_projective", "lindblad_jump"), default="born_projective")
    p_oc.add_argument("--t-max", type=float, default=None)
    p_oc.add_argument("--master-seed", type=int, default=0)
    p_oc.add_argument("--out", help="write the JSON report here")
    p_oc.set_defaults(func=cmd_oracle_check)

    p_dump = sub.add_parser("dump-hamiltonian", help="dump the single-particle matrix and spectrum")
    add_config_args(p_dump)
    p_dump.add_argument("--out", help="output directory (defaults to config output.dir)")
    p_dump.set_defaults(func=cmd_dump_hamiltonian)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CapacityError, InfeasibleLevelError) as err:
        return _fail(2, str(err))
    except NoSolutionError as err:
        print(f"no-solution: {err}")
        return 0
    except NumericalError as err:
        return _fail(3, str(err))
    except ValueError as err:
        return _fail(2, str(err))


if __name__ == "__main__":
    sys.exit(main())
