"""Critical-point extraction: Nishimori line, duality, specific-heat-peak
finite-size scaling, correlation-length crossings, Wilson-loop fits,
bootstrap errors, and phase-diagram assembly.

All fits are pure functions over in-memory tables; errors come either from
the caller's per-point uncertainties (propagated by parametric bootstrap) or
from the bootstrap-over-samples estimator.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq, minimize_scalar


def nishimori_beta(p: float) -> float:
    """beta(p) = -1/2 log(p / (1-p)); infinite at p in {0, 1}."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"beta(p) is infinite at p={p}; need 0 < p < 1")
    return -0.5 * math.log(p / (1.0 - p))


def nishimori_temperature(p: float) -> float:
    """T(p) = 1/beta(p) on the Nishimori line (p < 1/2)."""
    if not 0.0 < p < 0.5:
        raise ValueError(f"T(p) requires 0 < p < 1/2, got {p}")
    return 1.0 / nishimori_beta(p)


def dual_temperature(t: float) -> float:
    """Kramers-Wannier partner temperature: beta* = -1/2 log tanh(beta)."""
    if t <= 0:
        raise ValueError(f"temperature must be positive, got {t}")
    beta = 1.0 / t
    beta_dual = -0.5 * math.log(math.tanh(beta))
    return 1.0 / beta_dual


@dataclass
class CriticalPointEstimate:
    p: float
    t_c: float
    error: float
    method: str  # heat_peak_fss | xi_crossing | wilson_fit
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.error > 0:
            raise ValueError(f"estimate must carry a positive error, got {self.error}")

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "Tc": self.t_c,
            "err": self.error,
            "method": self.method,
            "diagnostics": _plain(self.diagnostics),
        }


@dataclass
class NoTransition:
    """First-class negative result: no crossing/sign change in range."""

    p: float
    method: str
    reason: str = ""
    diagnostics: dict = field(default_factory=dict)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


# --- peak location -----------------------------------------------------------


def locate_peak(t: np.ndarray, values: np.ndarray, errors=None, n_boot: int = 400, seed: int = 0):
    """Peak position of a sampled curve by local quadratic interpolation,
    with a parametric-bootstrap error from the per-point uncertainties."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(t) < 3:
        raise ValueError("need at least 3 points to locate a peak")
    errors = np.zeros_like(values) if errors is None else np.asarray(errors, dtype=float)

    def one(vals):
        i = int(np.argmax(vals))
        lo, hi = max(0, i - 2), min(len(t), i + 3)
        if hi - lo < 3:
            return float(t[i])
        coef = np.polyfit(t[lo:hi], vals[lo:hi], 2)
        if coef[0] >= 0:
            return float(t[i])
        vertex = -coef[1] / (2 * coef[0])
        return float(np.clip(vertex, t[lo], t[hi - 1]))

    center = one(values)
    if np.all(errors == 0) or n_boot < 2:
        return center, 0.0
    rng = np.random.default_rng(seed)
    draws = [one(values + rng.standard_normal(len(values)) * errors) for _ in range(n_boot)]
    return center, float(np.std(draws, ddof=1))


# --- specific-heat-peak finite-size scaling ------------------------------------


def heat_peak_fss(peaks, p: float = 0.0, n_boot: int = 400, seed: int = 0) -> CriticalPointEstimate:
    """Fit T_c(L) = a L^-b + T_c to specific-heat peak positions.

    ``peaks``: iterable of (L, T_L, err); needs >= 3 sizes. The shift
    exponent b is scanned (weighted linear least squares in (a, T_c) at each
    b), and the quoted error is the spread of T_c under parametric
    resampling of the peak positions.
    """
    peaks = sorted((float(L), float(tl), float(e)) for L, tl, e in peaks)
    if len(peaks) < 3:
        raise ValueError(f"need >= 3 system sizes, got {len(peaks)}")
    sizes = np.array([q[0] for q in peaks])
    t_l = np.array([q[1] for q in peaks])
    errs = np.array([q[2] for q in peaks])
    w = 1.0 / np.maximum(errs, 1e-12) ** 2

    def solve(b, values):
        x = np.stack([sizes ** (-b), np.ones_like(sizes)], axis=1)
        xtw = x.T * w
        coef, *_ = np.linalg.lstsq(xtw @ x, xtw @ values, rcond=None)
        resid = values - x @ coef
        return coef, float(np.sum(w * resid**2))

    def chi2(logb, values):
        return solve(math.exp(logb), values)[1]

    def fit(values):
        res = minimize_scalar(
            chi2, bounds=(math.log(0.05), math.log(8.0)), args=(values,), method="bounded"
        )
        b = math.exp(res.x)
        (a, tc), c2 = solve(b, values)
        return a, b, tc, c2

    a, b, tc, c2 = fit(t_l)
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(n_boot):
        draws.append(fit(t_l + rng.standard_normal(len(t_l)) * errs)[2])
    err = float(np.std(draws, ddof=1)) if n_boot >= 2 else 0.0
    # scale up when the shift ansatz under-fits (pre-asymptotic sizes)
    dof = len(peaks) - 3
    if dof > 0 and c2 > dof:
        err *= math.sqrt(c2 / dof)
    err = max(err, 1e-12)
    return CriticalPointEstimate(
        p=p,
        t_c=float(tc),
        error=err,
        method="heat_peak_fss",
        diagnostics={
            "amplitude": float(a),
            "shift_exponent": float(b),
            "nu_estimate": float(1.0 / b),
            "chi2": c2,
            "dof": len(peaks) - 3,
            "peaks": [list(q) for q in peaks],
        },
    )


# --- correlation-length crossings ------------------------------------------------


def xi_crossing(curves: dict, p: float = 0.0, n_boot: int = 200, seed: int = 0):
    """Crossing temperature of xi_L/L curves for different L.

    ``curves``: {L: (T, xi_over_L, err)}. Each curve is interpolated with a
    monotone piecewise cubic; pairwise crossings are bisected and combined
    with inverse-variance weights. Returns a CriticalPointEstimate, or
    NoTransition when fewer than half of the size pairs cross in range, or a
    NoTransition marked indeterminate for coincident curves.
    """
    if len(curves) < 2:
        raise ValueError("need at least two system sizes")
    interp = {}
    ranges = {}
    data = {}
    for L, (t, y, e) in sorted(curves.items()):
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        e = np.asarray(e, dtype=float)
        order = np.argsort(t)
        t, y, e = t[order], y[order], e[order]
        data[L] = (t, y, e)
        interp[L] = PchipInterpolator(t, y)
        ranges[L] = (t[0], t[-1])

    sizes = sorted(curves)
    pairs = [(a, b) for i, a in enumerate(sizes) for b in sizes[i + 1 :]]
    results = []
    rng = np.random.default_rng(seed)
    scale = max(np.abs(y).max() for _, y, _ in data.values())

    for la, lb in pairs:
        lo = max(ranges[la][0], ranges[lb][0])
        hi = min(ranges[la][1], ranges[lb][1])
        if not lo < hi:
            raise ValueError(f"curves for L={la} and L={lb} have disjoint T ranges")

        def cross_once(fa, fb):
            grid = np.linspace(lo, hi, 512)
            diff = fa(grid) - fb(grid)
            if np.all(np.abs(diff) <= 1e-9 * max(scale, 1e-30)):
                return "identical"
            sign = np.sign(diff)
            flips = np.flatnonzero(np.diff(sign) != 0)
            if len(flips) == 0:
                return None
            # most transversal sign change
            slopes = [abs(diff[i + 1] - diff[i]) for i in flips]
            i = flips[int(np.argmax(slopes))]
            return float(brentq(lambda x: fa(x) - fb(x), grid[i], grid[i + 1]))

        center = cross_once(interp[la], interp[lb])
        if center == "identical":
            return NoTransition(
                p=p,
                method="xi_crossing",
                reason="indeterminate: curves coincide within tolerance",
                diagnostics={"pair": (la, lb)},
            )
        if center is None:
            results.append((la, lb, None, None))
            continue
        draws = []
        for _ in range(n_boot):
            fa = PchipInterpolator(
                data[la][0], data[la][1] + rng.standard_normal(len(data[la][1])) * data[la][2]
            )
            fb = PchipInterpolator(
                data[lb][0], data[lb][1] + rng.standard_normal(len(data[lb][1])) * data[lb][2]
            )
            c = cross_once(fa, fb)
            if isinstance(c, float):
                draws.append(c)
        err = float(np.std(draws, ddof=1)) if len(draws) >= 2 else (hi - lo)
        results.append((la, lb, center, max(err, 1e-9)))

    crossed = [r for r in results if r[2] is not None]
    if len(crossed) * 2 < len(results) or not crossed:
        return NoTransition(
            p=p,
            method="xi_crossing",
            reason=f"no crossing in range for {len(results) - len(crossed)}/{len(results)} pairs",
            diagnostics={"pairs": [(a, b) for a, b, c, _ in results if c is None]},
        )
    centers = np.array([c for _, _, c, _ in crossed])
    errs = np.array([e for _, _, _, e in crossed])
    w = 1.0 / errs**2
    t_c = float(np.sum(w * centers) / np.sum(w))
    err = float(math.sqrt(1.0 / np.sum(w)))
    err = max(err, float(np.std(centers, ddof=1)) if len(centers) > 1 else err)
    return CriticalPointEstimate(
        p=p,
        t_c=t_c,
        error=max(err, 1e-9),
        method="xi_crossing",
        diagnostics={"pairs": [(a, b, c, e) for a, b, c, e in crossed]},
    )


# --- Wilson-loop scaling fits ------------------------------------------------------


@dataclass
class WilsonFit:
    a: float
    b: float
    c: float
    a_err: float
    b_err: float
    c_err: float
    chi2: float
    dof: int

    @property
    def disordered(self) -> bool:
        """Area-law signature: positive linear coefficient."""
        return self.a > 0


def wilson_fit(points) -> WilsonFit:
    """Weighted least squares of -log<W(gamma_l)>/l ~ a l + b + c log l.

    ``points``: iterable of (l, y, err) with >= 4 loop sizes surviving the
    noise-floor cut.
    """
    pts = sorted((float(l), float(y), float(e)) for l, y, e in points)
    if len(pts) < 4:
        raise ValueError(f"need >= 4 loop sizes, got {len(pts)}")
    l = np.array([q[0] for q in pts])
    y = np.array([q[1] for q in pts])
    e = np.maximum(np.array([q[2] for q in pts]), 1e-12)
    x = np.stack([l, np.ones_like(l), np.log(l)], axis=1)
    w = 1.0 / e**2
    xtwx = x.T @ (x * w[:, None])
    try:
        cov = np.linalg.inv(xtwx)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by >=4 check
        raise ValueError("underdetermined Wilson fit") from exc
    coef = cov @ (x.T @ (w * y))
    resid = y - x @ coef
    chi2 = float(np.sum(w * resid**2))
    sig = np.sqrt(np.diag(cov))
    return WilsonFit(
        a=float(coef[0]),
        b=float(coef[1]),
        c=float(coef[2]),
        a_err=float(sig[0]),
        b_err=float(sig[1]),
        c_err=float(sig[2]),
        chi2=chi2,
        dof=len(pts) - 3,
    )


def sign_change_location(x: np.ndarray, a: np.ndarray, a_err: np.ndarray | None = None):
    """Location where a sampled coefficient a(x) crosses zero (linear
    interpolation between the bracketing samples), or None."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    sign = np.sign(a)
    flips = np.flatnonzero(np.diff(sign) != 0)
    if len(flips) == 0:
        return None
    i = int(flips[0])
    x0 = x[i] - a[i] * (x[i + 1] - x[i]) / (a[i + 1] - a[i])
    if a_err is None:
        return float(x0), abs(x[i + 1] - x[i]) / 2
    slope = abs((a[i + 1] - a[i]) / (x[i + 1] - x[i]))
    err = float(math.hypot(a_err[i], a_err[i + 1]) / max(slope, 1e-12))
    return float(x0), max(err, 1e-9)


# --- bootstrap ----------------------------------------------------------------------


def bootstrap(data, statistic=None, n_resamples: int = 1000, seed: int = 0):
    """Bootstrap mean and error of a statistic over a sample set.

    Resamples N points with replacement n times; returns (q_bar, err) with
    q_bar the resample mean and err = sqrt(sum (q_bar - q_i)^2 / (n-1)).
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    if n < 2:
        raise ValueError("bootstrap needs at least 2 samples")
    if n_resamples < 100:
        raise ValueError("use at least 100 resamples")
    statistic = (lambda d: float(np.mean(d))) if statistic is None else statistic
    rng = np.random.default_rng(seed)
    qs = np.empty(n_resamples)
    for i in range(n_resamples):
        qs[i] = statistic(data[rng.integers(0, n, size=n)])
    q_bar = float(qs.mean())
    err = float(math.sqrt(np.sum((q_bar - qs) ** 2) / (n_resamples - 1)))
    return q_bar, err


# --- phase diagram -------------------------------------------------------------------


@dataclass
class PhaseDiagram:
    kind: str
    points: list  # CriticalPointEstimate, sorted by p
    no_transition_ps: list
    p_c_bracket: tuple | None
    nishimori_samples: list

    @property
    def p_c_mid(self) -> float | None:
        if self.p_c_bracket is None:
            return None
        return 0.5 * (self.p_c_bracket[0] + self.p_c_bracket[1])

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "points": [pt.to_json_dict() for pt in self.points],
            "no_transition": sorted(self.no_transition_ps),
            "p_c_bracket": list(self.p_c_bracket) if self.p_c_bracket else None,
            "p_c_mid": self.p_c_mid,
            "nishimori_samples": self.nishimori_samples,
        }


def assemble_phase_diagram(estimates, kind: str, nishimori_grid=None) -> PhaseDiagram:
    """Order boundary estimates, bracket p_c between the largest p with a
    transition and the smallest p without one, and attach the Nishimori line."""
    estimates = list(estimates)
    if not estimates:
        raise ValueError("no estimates to assemble")
    points = sorted(
        (e for e in estimates if isinstance(e, CriticalPointEstimate)), key=lambda e: e.p
    )
    missing = sorted(e.p for e in estimates if isinstance(e, NoTransition))
    bracket = None
    if points and missing:
        lo = max(e.p for e in points)
        candidates = [p for p in missing if p > lo]
        if candidates:
            bracket = (lo, min(candidates))
    if nishimori_grid is None:
        nishimori_grid = np.round(np.linspace(0.05, 0.45, 41), 6)
    samples = [[float(p), nishimori_temperature(float(p))] for p in nishimori_grid]
    return PhaseDiagram(
        kind=kind,
        points=points,
        no_transition_ps=missing,
        p_c_bracket=bracket,
        nishimori_samples=samples,
    )


def save_phase_diagram(diagram: PhaseDiagram, path) -> None:
    with open(path, "w") as fh:
        json.dump(diagram.to_json_dict(), fh, sort_keys=True, indent=1)
        fh.write("\n")


# --- observable tables ----------------------------------------------------------------

TABLE_FIELDS = ["p", "L", "T", "observable", "value", "error", "n_disorder"]


def write_observable_table(path, rows) -> None:
    """CSV with columns (p, L, T, observable, value, error, n_disorder)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TABLE_FIELDS)
        for row in rows:
            writer.writerow(
                [
                    repr(float(row["p"])),
                    int(row["L"]),
                    repr(float(row["T"])),
                    row["observable"],
                    repr(float(row["value"])),
                    repr(float(row["error"])),
                    int(row["n_disorder"]),
                ]
            )


def read_observable_table(path) -> list[dict]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                {
                    "p": float(row["p"]),
                    "L": int(row["L"]),
                    "T": float(row["T"]),
                    "observable": row["observable"],
                    "value": float(row["value"]),
                    "error": float(row["error"]),
                    "n_disorder": int(row["n_disorder"]),
                }
            )
    return out


def table_curve(rows, observable: str, p: float, L: int):
    """(T, value, error) arrays for one observable at one (p, L)."""
    sel = [
        r
        for r in rows
        if r["observable"] == observable
        and math.isclose(r["p"], p, abs_tol=1e-12)
        and r["L"] == L
    ]
    sel.sort(key=lambda r: r["T"])
    return (
        np.array([r["T"] for r in sel]),
        np.array([r["value"] for r in sel]),
        np.array([r["error"] for r in sel]),
    )


def wilson_fit_points(rows, p: float, L: int, T: float, n_sigma: float = 2.0):
    """(l, -log<W>/l, err) triples surviving the noise floor at one (p, L, T)."""
    pts = []
    for r in rows:
        name = r["observable"]
        if not name.startswith("wilson_l"):
            continue
        if r["L"] != L or not math.isclose(r["p"], p, abs_tol=1e-12):
            continue
        if not math.isclose(r["T"], T, rel_tol=1e-9):
            continue
        l = int(name[len("wilson_l") :])
        v, e = r["value"], r["error"]
        if v > 0 and abs(v) >= n_sigma * e:
            pts.append((l, -math.log(v) / l, e / (v * l)))
    return sorted(pts)


# --- disorder aggregation over run records ------------------------------------


def aggregate_records(records, n_boot: int = 500, seed: int = 0) -> list[dict]:
    """Disorder-average a set of RunRecords (same model, L, p, ladder) into
    observable-table rows.

    Thermal averages are taken per disorder sample first; errors are
    bootstrap over disorder samples, or over measurement blocks when only
    one sample exists (p = 0 runs).
    """
    if not records:
        return []
    meta = records[0].meta
    p = meta["model"].get("disorder", {}).get("p", 0.0)
    L = meta["model"]["lattice"]["L"]
    n = meta["model"]["num_spins"]
    temps = records[0].temps
    base = {k: v for k, v in meta["model"].items() if k != "disorder"}
    for rec in records[1:]:
        other = {k: v for k, v in rec.meta["model"].items() if k != "disorder"}
        if not np.allclose(rec.temps, temps) or other != base:
            raise ValueError("records disagree on model/ladder; cannot aggregate")
    n_dis = len(records)
    rows = []
    rng = np.random.default_rng(seed)

    def stat_err(per_sample, blocks_per_sample, statistic):
        """Bootstrap over samples, or over blocks for a single sample."""
        if n_dis >= 2:
            _, err = bootstrap(
                np.asarray(per_sample), statistic, n_resamples=max(n_boot, 100),
                seed=int(rng.integers(2**63)),
            )
            return err
        _, err = bootstrap(
            np.asarray(blocks_per_sample[0]), statistic, n_resamples=max(n_boot, 100),
            seed=int(rng.integers(2**63)),
        )
        return err

    for k in range(records[0].n_rungs):
        series = [rec.series(k) for rec in records]
        t = series[0].T

        def emit(name, value, error):
            rows.append(
                {
                    "p": p,
                    "L": L,
                    "T": t,
                    "observable": name,
                    "value": float(value),
                    "error": float(error),
                    "n_disorder": n_dis,
                }
            )

        # energy per spin
        e_s = [s.e_mean / n for s in series]
        e_blocks = [s.blocks["e"] / n for s in series]
        emit("e_per_spin", np.mean(e_s), stat_err(e_s, e_blocks, lambda d: float(np.mean(d))))

        # specific heat: thermal variance per sample, then disorder mean
        c_s = [(s.e2_mean - s.e_mean**2) / (n * t * t) for s in series]
        c_blocks = [
            np.stack([s.blocks["e"], s.blocks["e2"]], axis=1) for s in series
        ]

        def c_stat(d):
            e, e2 = np.mean(d[:, 0]), np.mean(d[:, 1])
            return (e2 - e * e) / (n * t * t)

        emit(
            "specific_heat",
            np.mean(c_s),
            stat_err(c_s, c_blocks, c_stat if n_dis == 1 else (lambda d: float(np.mean(d)))),
        )

        if series[0].m0sq_mean is not None:
            chi0_s = np.array([s.m0sq_mean / n for s in series])
            chik_s = np.array([s.mksq_mean / n for s in series])
            emit("chi0", chi0_s.mean(), stat_err(
                chi0_s, [s.blocks["m0sq"] / n for s in series], lambda d: float(np.mean(d))
            ))
            emit("chik", chik_s.mean(), stat_err(
                chik_s, [s.blocks["mksq"] / n for s in series], lambda d: float(np.mean(d))
            ))
            chi0, chik = chi0_s.mean(), chik_s.mean()
            if chik > 0 and chi0 >= chik:
                xi = math.sqrt(chi0 / chik - 1.0) / (2.0 * math.sin(math.pi / L))

                def xi_stat(d):
                    c0, ck = np.mean(d[:, 0]), np.mean(d[:, 1])
                    if ck <= 0 or c0 < ck:
                        return 0.0
                    return math.sqrt(c0 / ck - 1.0) / (2.0 * math.sin(math.pi / L)) / L

                pair_s = np.stack([chi0_s, chik_s], axis=1)
                pair_blocks = [
                    np.stack([s.blocks["m0sq"] / n, s.blocks["mksq"] / n], axis=1) for s in series
                ]
                emit("xi_over_L", xi / L, stat_err(pair_s, pair_blocks, xi_stat))

        for l in sorted(series[0].wilson_means):
            w_s = [s.wilson_means[l] for s in series]
            w_blocks = [s.blocks[f"w_{l}"] for s in series]
            emit(
                f"wilson_l{l}",
                np.mean(w_s),
                stat_err(w_s, w_blocks, lambda d: float(np.mean(d))),
            )
    return rows
