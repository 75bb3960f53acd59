"""Trajectory ensembles, parameter sweeps, and CSV/JSON persistence.

Ensemble averages are bit-reproducible: every trajectory is a pure function
of a key split from the master seed, per-trajectory results are collected in
trajectory-index order, and the final reduction is numpy's pairwise mean, so
the output is independent of worker count and scheduling.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from ._version import __version__
from .lattice import PotentialSpec, build_hamiltonian, build_potential, build_propagator
from .gaussian import neel_state
from .monitor import MonitorConfig, SteadyObservables, run_trajectory, steady_average
from .seeding import REALIZATION_STREAM, TRAJECTORY_STREAM, generator, stream_key

REALIZATION_POLICIES = ("fixed", "per_trajectory")


@dataclass(frozen=True)
class ModelSpec:
    """Chain size, hopping, and potential family of one parameter point."""

    L: int
    J: float = 1.0
    potential: PotentialSpec = field(default_factory=PotentialSpec.none)

    def __post_init__(self) -> None:
        if self.L < 2 or self.L % 2 != 0:
            raise ValueError(f"L must be even and >= 2, got {self.L}")
        if not math.isfinite(self.J) or self.J == 0:
            raise ValueError(f"hopping J must be finite and nonzero, got {self.J}")


@dataclass(frozen=True)
class EnsembleSpec:
    """Everything that determines an ensemble's output, and nothing else.

    Execution details (worker count, output paths) deliberately stay outside
    so the spec hash identifies the physics.  A ``monitor.t_max`` of None is
    resolved here to the ballistic-saturation default 2 L / |J|.
    """

    model: ModelSpec
    monitor: MonitorConfig
    n_traj: int = 200
    master_seed: int = 0
    realization_policy: str = "per_trajectory"
    mutual_info: bool | None = None
    correlations: bool = True

    def __post_init__(self) -> None:
        if self.n_traj < 1:
            raise ValueError(f"n_traj must be >= 1, got {self.n_traj}")
        if self.realization_policy not in REALIZATION_POLICIES:
            raise ValueError(
                f"unknown realization policy {self.realization_policy!r}, "
                f"expected one of {REALIZATION_POLICIES}"
            )
        if self.mutual_info and self.model.L % 8 != 0:
            raise ValueError(
                f"mutual information needs L divisible by 8, got L={self.model.L}"
            )
        if self.monitor.t_max is None:
            object.__setattr__(
                self, "monitor", replace(self.monitor, t_max=2.0 * self.model.L / abs(self.model.J))
            )

    @property
    def want_mutual_info(self) -> bool:
        return self.model.L % 8 == 0 if self.mutual_info is None else self.mutual_info

    def to_dict(self) -> dict:
        return {
            "model": {
                "L": self.model.L,
                "J": self.model.J,
                "potential": dataclasses.asdict(self.model.potential),
            },
            "monitor": dataclasses.asdict(self.monitor),
            "n_traj": self.n_traj,
            "master_seed": self.master_seed,
            "realization_policy": self.realization_policy,
            "mutual_info": self.want_mutual_info,
            "correlations": self.correlations,
        }

    def spec_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class EnsembleResult:
    """Steady-state statistics over trajectories, with provenance."""

    s_mean: np.ndarray
    s_stderr: np.ndarray
    s_half_mean: float
    s_half_stderr: float
    mi_mean: float | None
    mi_stderr: float | None
    corr_mean: np.ndarray | None
    corr_stderr: np.ndarray | None
    n_traj: int
    total_events: int
    trajectory_seeds: tuple[int, ...]
    spec_hash: str
    master_seed: int
    code_version: str = __version__


def realization_draw(
    spec: EnsembleSpec, trajectory_index: int, rng: np.random.Generator
) -> tuple[np.ndarray, PotentialSpec]:
    """Potential values for one trajectory.

    Under the ``per_trajectory`` policy each trajectory gets a fresh phase
    (quasi-periodic) or fresh on-site energies (Anderson); under ``fixed``
    one shared realization is used (callers pass the realization-0 stream).
    Deterministic potentials are returned as-is.
    """
    pot = spec.model.potential
    if pot.kind == "quasiperiodic" and spec.realization_policy == "per_trajectory":
        pot = replace(pot, theta=float(rng.uniform(0.0, 2.0 * math.pi)))
    p = build_potential(pot, spec.model.L, rng)
    return p, pot


def _realization_index(spec: EnsembleSpec, trajectory_index: int) -> int:
    if spec.realization_policy == "per_trajectory" and spec.model.potential.is_random:
        return trajectory_index
    return 0


@lru_cache(maxsize=4)
def _shared_engine(p_bytes: bytes, J: float, dt: float):
    """Hamiltonian + propagator per realization, built once per worker process
    and shared read-only across the trajectories of that realization."""
    p = np.frombuffer(p_bytes, dtype=float)
    ham = build_hamiltonian(J, p)
    return ham, build_propagator(ham, dt)


def _trajectory_payload(spec: EnsembleSpec, i: int) -> tuple[int, int, SteadyObservables, int]:
    """Run trajectory i of the ensemble and return its steady averages."""
    r_index = _realization_index(spec, i)
    real_rng = generator(stream_key(spec.master_seed, REALIZATION_STREAM, r_index))
    p, realized = realization_draw(spec, i, real_rng)
    ham, prop = _shared_engine(p.tobytes(), spec.model.J, spec.monitor.dt)
    traj_key = stream_key(spec.master_seed, TRAJECTORY_STREAM, i)
    record = run_trajectory(
        ham,
        neel_state(spec.model.L),
        spec.monitor,
        traj_key,
        propagator=prop,
        mutual_info=spec.want_mutual_info,
        correlations=spec.correlations,
        realization={"index": r_index, "potential": dataclasses.asdict(realized)},
    )
    steady = steady_average(record, spec.monitor)
    return traj_key, record.event_count, steady, r_index


def _stderr(values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    if n < 2:
        return np.zeros(values.shape[1:]) if values.ndim > 1 else 0.0
    return np.std(values, axis=0, ddof=1) / math.sqrt(n)


def run_ensemble(spec: EnsembleSpec, workers: int = 1) -> EnsembleResult:
    """Run all trajectories (optionally in a process pool) and aggregate.

    Failures abort with the failing trajectory's key in the message so the
    trajectory can be replayed in isolation.
    """
    indices = list(range(spec.n_traj))
    if workers <= 1 or spec.n_traj == 1:
        payloads = [_trajectory_payload(spec, i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, spec.n_traj // (4 * workers))
            payloads = list(
                pool.map(_trajectory_payload, [spec] * spec.n_traj, indices, chunksize=chunk)
            )

    seeds = tuple(p[0] for p in payloads)
    total_events = int(sum(p[1] for p in payloads))
    profiles = np.stack([p[2].entropy_profile for p in payloads])
    s_half = np.array([p[2].s_half for p in payloads])

    mi_mean = mi_stderr = None
    if spec.want_mutual_info:
        mi = np.array([p[2].mutual_info for p in payloads])
        mi_mean, mi_stderr = float(np.mean(mi)), float(_stderr(mi))
    corr_mean = corr_stderr = None
    if spec.correlations:
        corr = np.stack([p[2].correlations for p in payloads])
        corr_mean, corr_stderr = np.mean(corr, axis=0), _stderr(corr)

    return EnsembleResult(
        s_mean=np.mean(profiles, axis=0),
        s_stderr=_stderr(profiles),
        s_half_mean=float(np.mean(s_half)),
        s_half_stderr=float(_stderr(s_half)),
        mi_mean=mi_mean,
        mi_stderr=mi_stderr,
        corr_mean=corr_mean,
        corr_stderr=corr_stderr,
        n_traj=spec.n_traj,
        total_events=total_events,
        trajectory_seeds=seeds,
        spec_hash=spec.spec_hash(),
        master_seed=spec.master_seed,
    )


# ---------------------------------------------------------------------------
# CSV / JSON persistence
# ---------------------------------------------------------------------------

ENTROPY_PROFILE_COLUMNS = "L,gamma,potential_type,potential_param,ell,S_mean,S_stderr"
SUMMARY_COLUMNS = (
    "L,gamma,potential_type,potential_param,S_half_mean,S_half_stderr,"
    "MI_mean,MI_stderr,n_traj,master_seed"
)
CORRELATIONS_COLUMNS = "L,gamma,potential_type,potential_param,ell,C_mean,C_stderr"


def _fmt(x) -> str:
    """Full round-trip precision, '.' decimal separator."""
    return repr(float(x))


def _point_prefix(spec: EnsembleSpec) -> str:
    pot = spec.model.potential
    return f"{spec.model.L},{_fmt(spec.monitor.gamma)},{pot.kind},{_fmt(pot.strength)}"


def write_entropy_profile_csv(path: Path, spec: EnsembleSpec, result: EnsembleResult) -> None:
    prefix = _point_prefix(spec)
    lines = [ENTROPY_PROFILE_COLUMNS]
    for ell in range(1, spec.model.L):
        lines.append(
            f"{prefix},{ell},{_fmt(result.s_mean[ell - 1])},{_fmt(result.s_stderr[ell - 1])}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def summary_row(spec: EnsembleSpec, result: EnsembleResult) -> str:
    mi_mean = result.mi_mean if result.mi_mean is not None else float("nan")
    mi_stderr = result.mi_stderr if result.mi_stderr is not None else float("nan")
    return (
        f"{_point_prefix(spec)},{_fmt(result.s_half_mean)},{_fmt(result.s_half_stderr)},"
        f"{_fmt(mi_mean)},{_fmt(mi_stderr)},{result.n_traj},{result.master_seed}"
    )


def write_summary_csv(path: Path, rows: list[str]) -> None:
    path.write_text("\n".join([SUMMARY_COLUMNS] + rows) + "\n", encoding="utf-8")


def write_correlations_csv(path: Path, spec: EnsembleSpec, result: EnsembleResult) -> None:
    prefix = _point_prefix(spec)
    lines = [CORRELATIONS_COLUMNS]
    if result.corr_mean is not None:
        for ell in range(1, result.corr_mean.shape[0] + 1):
            lines.append(
                f"{prefix},{ell},{_fmt(result.corr_mean[ell - 1])},{_fmt(result.corr_stderr[ell - 1])}"
            )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_point_outputs(out_dir: Path, spec: EnsembleSpec, result: EnsembleResult) -> dict[str, str]:
    """Write the three per-point CSVs; returns file checksums."""
    out_dir.mkdir(parents=True, exist_ok=True)
    write_entropy_profile_csv(out_dir / "entropy_profile.csv", spec, result)
    write_summary_csv(out_dir / "summary.csv", [summary_row(spec, result)])
    if spec.correlations:
        write_correlations_csv(out_dir / "correlations.csv", spec, result)
    return {
        name: hashlib.sha256((out_dir / name).read_bytes()).hexdigest()
        for name in ("entropy_profile.csv", "summary.csv", "correlations.csv")
        if (out_dir / name).exists()
    }


def _write_json_atomic(path: Path, payload: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    """Grid over measurement rate, potential strength, and chain size."""

    gammas: tuple[float, ...]
    potential_params: tuple[float, ...]
    sizes: tuple[int, ...]
    base: EnsembleSpec
    output_dir: Path

    def __post_init__(self) -> None:
        for name, axis in (("gammas", self.gammas), ("potential_params", self.potential_params), ("sizes", self.sizes)):
            if len(axis) == 0:
                raise ValueError(f"sweep axis {name} is empty")
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise ValueError(f"sweep axis {name} must be strictly increasing, got {axis}")
        if self.base.model.potential.kind == "none" and any(p != 0 for p in self.potential_params):
            raise ValueError("cannot sweep potential strength with potential kind 'none'")

    def grid(self) -> list[tuple[int, float, float, int]]:
        """(size, gamma, param, point_index) in deterministic order."""
        points = []
        k = 0
        for L in self.sizes:
            for g in self.gammas:
                for p in self.potential_params:
                    points.append((L, g, p, k))
                    k += 1
        return points

    def point_spec(self, L: int, gamma: float, param: float) -> EnsembleSpec:
        pot = self.base.model.potential
        strength_field = {"stark": "delta", "quasiperiodic": "v", "anderson": "w"}.get(pot.kind)
        if strength_field is not None:
            pot = replace(pot, **{strength_field: param})
        model = replace(self.base.model, L=L, potential=pot)
        # Re-resolve t_max per size when the base left it automatic.
        monitor = replace(self.base.monitor, gamma=gamma, t_max=None) if self.base.monitor.t_max is None else replace(self.base.monitor, gamma=gamma)
        return replace(self.base, model=model, monitor=monitor)


def _load_manifest(path: Path) -> dict:
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    return {"points": {}}


def _point_done(manifest: dict, pid: str, spec_hash: str, point_dir: Path) -> bool:
    entry = manifest.get("points", {}).get(pid)
    if not entry or entry.get("status") != "done" or entry.get("spec_hash") != spec_hash:
        return False
    for name, digest in entry.get("checksums", {}).items():
        f = point_dir / name
        if not f.exists() or hashlib.sha256(f.read_bytes()).hexdigest() != digest:
            return False
    return True


def sweep_grid(sweep: SweepSpec, workers: int = 1, log=None) -> list[dict]:
    """Run (or resume) every grid point; returns per-point param/path metadata.

    Completed points are recognized by spec-hash match plus file checksums and
    skipped, so an interrupted sweep can be re-run to an identical final state.
    """
    out = Path(sweep.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.json"
    manifest = _load_manifest(manifest_path)
    manifest.setdefault("points", {})
    manifest["code_version"] = __version__
    manifest["sweep"] = {
        "gammas": list(sweep.gammas),
        "potential_params": list(sweep.potential_params),
        "sizes": list(sweep.sizes),
        "base": sweep.base.to_dict(),
    }

    rows: list[str] = []
    meta: list[dict] = []
    for L, gamma, param, k in sweep.grid():
        pid = f"point_{k:04d}"
        point_dir = out / "points" / pid
        spec = sweep.point_spec(L, gamma, param)
        spec_hash = spec.spec_hash()
        if _point_done(manifest, pid, spec_hash, point_dir):
            if log:
                log(f"{pid}: done (cached), L={L} gamma={gamma} param={param}")
        else:
            if log:
                log(f"{pid}: running L={L} gamma={gamma} param={param} ...")
            result = run_ensemble(spec, workers=workers)
            checksums = write_point_outputs(point_dir, spec, result)
            manifest["points"][pid] = {
                "status": "done",
                "spec_hash": spec_hash,
                "params": {"L": L, "gamma": gamma, "potential_param": param},
                "checksums": checksums,
            }
            _write_json_atomic(manifest_path, manifest)
        point_summary = (point_dir / "summary.csv").read_text(encoding="utf-8").splitlines()
        rows.extend(point_summary[1:])
        meta.append(
            {
                "point_id": pid,
                "L": L,
                "gamma": gamma,
                "potential_param": param,
                "dir": point_dir,
                "spec_hash": spec_hash,
            }
        )
    write_summary_csv(out / "summary.csv", rows)
    _write_json_atomic(manifest_path, manifest)
    return meta
