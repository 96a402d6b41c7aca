"""Observables: energy moments, sublattice susceptibility, finite-size
correlation length, and Wilson loops.

A ``MeasurementPlan`` holds the precomputed index tables a run needs (one
color class with its phase factors for the vertex model; families of square
loops for the gauge models). ``ObservableSeries`` carries one rung's
accumulated thermal averages plus equal-weight block means for error bars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complexes import COLOR_NAMES, ColorComplex, CubicComplex, RED
from .models import CouplingModel, ModelKind


@dataclass(frozen=True)
class WilsonLoopSpec:
    """All axis-aligned square loops of one linear size on a complex.

    ``edge_ids[q]`` lists the 4l edges of loop q; loops cover the 3
    orientations x all translations. On the bcc complex the traversed edges
    are corner-sublattice cubic edges, which connect vertices of exactly two
    colors, keeping the loop product gauge-invariant.
    """

    l: int
    edge_ids: np.ndarray  # (n_loops, 4l) int32

    @property
    def perimeter(self) -> int:
        return 4 * self.l

    @property
    def min_area(self) -> int:
        return self.l * self.l


@dataclass(frozen=True)
class MeasurementPlan:
    """Index tables consumed by the sweep-time measurement kernels."""

    num_spins: int
    sublattice: np.ndarray | None = None  # spin indices of the color class
    cos_k: np.ndarray | None = None
    sin_k: np.ndarray | None = None
    sublattice_color: int | None = None
    loops: tuple[WilsonLoopSpec, ...] = ()

    @property
    def wilson_ls(self) -> tuple[int, ...]:
        return tuple(spec.l for spec in self.loops)


def sublattice_tables(cc: ColorComplex, color: int = RED, axis: int = 0):
    """Spin indices of one color class with e^{i k0 r} phase factors.

    k0 = 2 pi / L along ``axis``; positions are the doubled coordinates
    halved, so the phase advances by 2 pi / L per cell.
    """
    if not 0 <= color < 4:
        raise ValueError(f"color must index {COLOR_NAMES}, got {color}")
    idx = np.flatnonzero(cc.colors == color).astype(np.int32)
    pos = cc.coords[idx, axis] / 2.0
    phase = 2.0 * math.pi * pos / cc.L
    return idx, np.cos(phase), np.sin(phase)


def square_loops(geometry, l: int) -> WilsonLoopSpec:
    """Square loops of linear size l over all translations and orientations."""
    if isinstance(geometry, ColorComplex):
        edge_of = geometry.corner_edge_index
        L = geometry.L
    elif isinstance(geometry, CubicComplex):
        edge_of = geometry.edge_index
        L = geometry.L
    else:
        raise TypeError(f"no loop support for {type(geometry).__name__}")
    if not 1 <= l <= L // 2:
        raise ValueError(f"loop size must satisfy 1 <= l <= L/2 = {L // 2}, got {l}")

    n_cells = L**3
    cells = np.stack(np.meshgrid(np.arange(L), np.arange(L), np.arange(L), indexing="ij"), axis=-1)
    cells = cells.reshape(-1, 3)

    def cell_id(c):
        return ((c[..., 0] % L) * L + c[..., 1] % L) * L + c[..., 2] % L

    eye = np.eye(3, dtype=np.int64)
    families = []
    for mu in range(3):
        for nu in range(mu + 1, 3):
            ids = np.empty((n_cells, 4 * l), dtype=np.int32)
            col = 0
            for i in range(l):
                ids[:, col] = edge_of[cell_id(cells + i * eye[mu]), mu]
                col += 1
            for j in range(l):
                ids[:, col] = edge_of[cell_id(cells + l * eye[mu] + j * eye[nu]), nu]
                col += 1
            for i in range(l):
                ids[:, col] = edge_of[cell_id(cells + i * eye[mu] + l * eye[nu]), mu]
                col += 1
            for j in range(l):
                ids[:, col] = edge_of[cell_id(cells + j * eye[nu]), nu]
                col += 1
            families.append(ids)
    return WilsonLoopSpec(l=l, edge_ids=np.concatenate(families))


def plan_for_model(model: CouplingModel, max_loop: int | None = None) -> MeasurementPlan:
    """Standard plan: sublattice magnetization for the vertex model, Wilson
    loops for the gauge models, energy always."""
    geo = model.geometry
    if model.kind == ModelKind.FOUR_BODY_VERTEX and isinstance(geo, ColorComplex):
        idx, cos_k, sin_k = sublattice_tables(geo)
        return MeasurementPlan(
            num_spins=model.num_spins,
            sublattice=idx,
            cos_k=cos_k,
            sin_k=sin_k,
            sublattice_color=RED,
        )
    if model.kind in (ModelKind.SIX_BODY_EDGE, ModelKind.RPIM) and geo is not None:
        lmax = geo.L // 2 if max_loop is None else min(max_loop, geo.L // 2)
        loops = tuple(square_loops(geo, l) for l in range(1, lmax + 1))
        return MeasurementPlan(num_spins=model.num_spins, loops=loops)
    return MeasurementPlan(num_spins=model.num_spins)


# --- per-rung accumulated series ---------------------------------------------


@dataclass
class ObservableSeries:
    """Thermal averages of one rung (one disorder sample) with block means.

    ``blocks`` maps an observable name to its (n_blocks,) block means; the
    headline means are computed from total sums, so they are exact regardless
    of block layout.
    """

    T: float
    num_spins: int
    n_samples: int
    e_mean: float
    e2_mean: float
    m0sq_mean: float | None = None
    mksq_mean: float | None = None
    wilson_means: dict[int, float] = field(default_factory=dict)
    blocks: dict[str, np.ndarray] = field(default_factory=dict)
    sublattice_size: int | None = None
    sublattice_color: int | None = None

    def require_samples(self, n: int = 2) -> None:
        if self.n_samples < n:
            raise ValueError(f"need at least {n} samples, have {self.n_samples}")


def specific_heat(series: ObservableSeries, T: float | None = None, N: int | None = None) -> float:
    """c = (<E^2> - <E>^2) / (N T^2) from one rung's thermal series."""
    series.require_samples(2)
    T = series.T if T is None else T
    N = series.num_spins if N is None else N
    var = series.e2_mean - series.e_mean**2
    return var / (N * T * T)


def susceptibility(series: ObservableSeries, k, sublattice: int | None = None) -> float:
    """chi(k) = <|sum_u s_u e^{i k r_u}|^2> / N for k in {0, k0}."""
    series.require_samples(1)
    if sublattice is not None and series.sublattice_color is not None:
        if sublattice != series.sublattice_color:
            raise ValueError(
                f"series was measured on color {series.sublattice_color}, not {sublattice}"
            )
    key = _wavevector_key(k)
    value = series.m0sq_mean if key == "zero" else series.mksq_mean
    if value is None:
        raise ValueError("series carries no sublattice magnetization channel")
    return value / series.num_spins


def _wavevector_key(k) -> str:
    if isinstance(k, str):
        if k in ("zero", "k0"):
            return k
        raise ValueError(f"unknown wavevector {k!r}")
    arr = np.atleast_1d(np.asarray(k, dtype=float))
    if np.allclose(arr, 0.0):
        return "zero"
    return "k0"


def correlation_length(chi0: float, chik0: float, L: int) -> float | None:
    """Two-point finite-size correlation length from the chi(0)/chi(k0) ratio.

    Returns None when chi0 < chik0 (noise-dominated; xi undefined rather than
    clamped).
    """
    if chik0 <= 0.0:
        raise ValueError(f"chi(k0) must be positive, got {chik0}")
    if chi0 < chik0:
        return None
    k0 = 2.0 * math.pi / L
    return math.sqrt(chi0 / chik0 - 1.0) / (2.0 * math.sin(k0 / 2.0))


def wilson_average(series: ObservableSeries, l: int) -> float:
    """Thermal average of the size-l square-loop product (translations and
    orientations already averaged at measurement time)."""
    if l == 0:
        return 1.0
    series.require_samples(1)
    if l not in series.wilson_means:
        raise ValueError(f"no loops of size {l} were measured")
    return series.wilson_means[l]


def loggable_wilson(values: np.ndarray, errors: np.ndarray, n_sigma: float = 2.0) -> np.ndarray:
    """Mask of Wilson averages safely above the noise floor |W| >= n_sigma*err."""
    values = np.asarray(values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return (values > 0) & (np.abs(values) >= n_sigma * errors)


def block_error(block_means: np.ndarray) -> float:
    """Standard error of the mean from equal-weight block means."""
    b = np.asarray(block_means, dtype=float)
    n = len(b)
    if n < 2:
        return float("nan")
    return float(b.std(ddof=1) / math.sqrt(n))
