"""The four figure kinds: heatmap, scaling, crossing, collapse.

Inputs are the CSV/JSON files written by the simulation pipeline:

* ``heatmap``  - c_eff over (gamma, potential strength) from ceff_table.csv,
  with the semi-analytical boundary curve from boundary_fit.json overlaid
  dashed.
* ``scaling``  - half-chain entropy vs size from summary.csv, log-log axes.
* ``crossing`` - c_eff vs the scanned parameter, one curve per size, from
  ceff_table.csv; optional entropy-profile inset from entropy_profile.csv.
* ``collapse`` - the rescaled master curve Y vs X per size from
  collapse_fit.json (X and Y are stored by the fit, not recomputed here).

Rendering is deterministic: fixed style, no timestamps in image metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = ("heatmap", "scaling", "crossing", "collapse")

_STYLE = {
    "figure.figsize": (5.0, 3.8),
    "figure.dpi": 150,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "monfermi-viz",
}


class SchemaError(ValueError):
    """An input file is missing or does not match its declared schema."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: figure kind, input files, output path."""

    kind: str
    input: Path
    out: Path
    boundary: Path | None = None
    profiles: Path | None = None
    title: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}, expected one of {FIGURE_KINDS}")
        if not Path(self.input).exists():
            raise SchemaError(f"input file {self.input} does not exist")
        if self.kind == "heatmap" and self.boundary is not None and not Path(self.boundary).exists():
            raise SchemaError(f"boundary file {self.boundary} does not exist")


def read_csv(path: Path, required: tuple[str, ...]) -> dict[str, list[str]]:
    """Parse a header CSV into columns, validating the required column names."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: file is empty")
    header = lines[0].split(",")
    for column in required:
        if column not in header:
            raise SchemaError(f"{path}: missing required column {column!r}")
    rows = [line.split(",") for line in lines[1:] if line]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {name: [row[i] for row in rows] for i, name in enumerate(header)}


def _floats(columns: dict, name: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in columns[name]])
    except ValueError as err:
        raise SchemaError(f"column {name!r} holds a non-numeric value: {err}") from err


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _build_heatmap(spec: FigureSpec, fig, ax) -> None:
    cols = read_csv(spec.input, ("L", "gamma", "potential_type", "potential_param", "method", "c_eff"))
    gammas = _floats(cols, "gamma")
    params = _floats(cols, "potential_param")
    ceffs = _floats(cols, "c_eff")
    methods = cols["method"]
    sizes = _floats(cols, "L")
    if "two_size" in methods:
        keep = np.array([m == "two_size" for m in methods])
    else:
        keep = sizes == sizes.max()  # best single-size estimate per point
    gammas, params, ceffs = gammas[keep], params[keep], ceffs[keep]

    gamma_axis = np.unique(gammas)
    param_axis = np.unique(params)
    grid = np.full((param_axis.size, gamma_axis.size), np.nan)
    for g, p, c in zip(gammas, params, ceffs):
        grid[np.searchsorted(param_axis, p), np.searchsorted(gamma_axis, g)] = c
    mesh = ax.pcolormesh(gamma_axis, param_axis, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="effective central charge")
    if spec.boundary is not None:
        payload = json.loads(Path(spec.boundary).read_text(encoding="utf-8"))
        curve = payload.get("curve", [])
        if curve:
            ax.plot(
                [pt["gamma"] for pt in curve],
                [pt["critical_strength"] for pt in curve],
                "k--",
                linewidth=1.4,
                label="phase boundary",
            )
            ax.legend(loc="upper right")
        pot = (cols["potential_type"][0] or "").strip()
        ax.set_ylim(param_axis.min(), param_axis.max())
    ax.set_xlabel("measurement rate")
    ax.set_ylabel("potential strength")


def _build_scaling(spec: FigureSpec, fig, ax) -> None:
    cols = read_csv(
        spec.input, ("L", "gamma", "potential_type", "potential_param", "S_half_mean", "S_half_stderr")
    )
    sizes = _floats(cols, "L")
    gammas = _floats(cols, "gamma")
    params = _floats(cols, "potential_param")
    s_mean = _floats(cols, "S_half_mean")
    s_err = _floats(cols, "S_half_stderr")
    for gamma, param in sorted(set(zip(gammas, params))):
        sel = (gammas == gamma) & (params == param)
        order = np.argsort(sizes[sel])
        ax.errorbar(
            sizes[sel][order],
            s_mean[sel][order],
            yerr=s_err[sel][order],
            marker="o",
            markersize=3.5,
            capsize=2,
            label=f"rate {gamma:g}, strength {param:g}",
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("chain length")
    ax.set_ylabel("half-chain entropy (nats)")
    ax.legend(fontsize=7)


def _build_crossing(spec: FigureSpec, fig, ax) -> None:
    cols = read_csv(spec.input, ("L", "gamma", "potential_param", "method", "c_eff", "c_eff_err"))
    keep = np.array([m == "profile_fit" for m in cols["method"]])
    if not np.any(keep):
        raise SchemaError(f"{spec.input}: no profile_fit rows; crossing plots need per-size fits")
    sizes = _floats(cols, "L")[keep]
    gammas = _floats(cols, "gamma")[keep]
    params = _floats(cols, "potential_param")[keep]
    ceffs = _floats(cols, "c_eff")[keep]
    errs = _floats(cols, "c_eff_err")[keep]
    scan, scan_label = (gammas, "measurement rate")
    if np.unique(gammas).size == 1 and np.unique(params).size > 1:
        scan, scan_label = (params, "potential strength")
    for L in np.unique(sizes):
        sel = sizes == L
        order = np.argsort(scan[sel])
        ax.errorbar(
            scan[sel][order],
            ceffs[sel][order],
            yerr=errs[sel][order],
            marker="s",
            markersize=3.5,
            capsize=2,
            label=f"L = {int(L)}",
        )
    ax.set_xlabel(scan_label)
    ax.set_ylabel("effective central charge")
    ax.legend(fontsize=7)
    if spec.profiles is not None:
        pcols = read_csv(spec.profiles, ("L", "ell", "S_mean"))
        L = float(pcols["L"][0])
        ells = _floats(pcols, "ell")
        s = _floats(pcols, "S_mean")
        inset = ax.inset_axes([0.58, 0.55, 0.38, 0.4])
        chord = (L / np.pi) * np.sin(np.pi * ells / L)
        inset.semilogx(chord, s, ".", markersize=2.5)
        inset.set_xlabel("chord length", fontsize=6)
        inset.set_ylabel("S", fontsize=6)
        inset.tick_params(labelsize=5)
        inset.grid(False)


def _build_collapse(spec: FigureSpec, fig, ax) -> None:
    payload = json.loads(Path(spec.input).read_text(encoding="utf-8"))
    for key in ("x_c", "nu", "alpha", "points"):
        if key not in payload:
            raise SchemaError(f"{spec.input}: missing required field {key!r}")
    points = payload["points"]
    if not points:
        raise SchemaError(f"{spec.input}: no collapse points")
    for key in ("X", "Y", "L"):
        if key not in points[0]:
            raise SchemaError(f"{spec.input}: points lack the stored field {key!r}")
    X = np.array([p["X"] for p in points])
    Y = np.array([p["Y"] for p in points])
    Ls = np.array([p["L"] for p in points])
    for L in np.unique(Ls):
        sel = Ls == L
        order = np.argsort(X[sel])
        ax.plot(X[sel][order], Y[sel][order], "o-", markersize=3, linewidth=0.8, label=f"L = {int(L)}")
    ax.set_xlabel("ln L - nu / sqrt(x - x_c)")
    ax.set_ylabel("g(L) x c_eff")
    ax.legend(fontsize=7, title=f"x_c = {payload['x_c']:.3f}, nu = {payload['nu']:.2f}")


_BUILDERS = {
    "heatmap": _build_heatmap,
    "scaling": _build_scaling,
    "crossing": _build_crossing,
    "collapse": _build_collapse,
}


def build_figure(spec: FigureSpec):
    """Construct the matplotlib Figure for `spec` (not yet saved)."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            _BUILDERS[spec.kind](spec, fig, ax)
        except Exception:
            plt.close(fig)
            raise
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Build and save the figure; returns the output path.

    Saved without dates in the metadata so identical inputs give identical
    bytes.
    """
    fig = build_figure(spec)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    suffix = out.suffix.lower()
    metadata = {"Date": None} if suffix == ".svg" else None
    try:
        with plt.rc_context(_STYLE):  # svg.hashsalt must be active at save time
            fig.savefig(out, metadata=metadata)
    finally:
        plt.close(fig)
    return out
