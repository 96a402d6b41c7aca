"""Parallel-tempering Metropolis Monte Carlo.

One PT round = a scan-order Metropolis sweep of every rung followed by a
round of adjacent-pair swap attempts on alternating (even/odd) pairs.
Equilibration runs for 2**tau rounds whose energies are accumulated into
logarithmic windows of doubling length; the run is flagged equilibrated when
the last two windows agree within combined statistical error on (nearly) all
rungs. Measurement rounds then accumulate per-rung observables into
equal-weight blocks for error estimation.

Determinism contract: every stochastic decision comes from a per-rung
xoshiro256+ stream (plus one dedicated swap stream), so trajectories and all
outputs depend only on the seed, never on thread or worker counts.
"""

from __future__ import annotations

import hashlib
import io
import math
import json
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .models import CouplingModel, model_dump, term_products
from .observables import MeasurementPlan, ObservableSeries, plan_for_model

CHECKPOINT_MAGIC = b"RCIMCKP\x01"
CHECKPOINT_VERSION = 1
RECORD_SCHEMA = 1


class CheckpointError(RuntimeError):
    pass


@dataclass(frozen=True)
class TemperatureLadder:
    """Strictly increasing temperatures T_1 < ... < T_{N_T}."""

    temperatures: np.ndarray
    mode: str = "explicit"

    def __post_init__(self):
        t = np.asarray(self.temperatures, dtype=np.float64)
        object.__setattr__(self, "temperatures", t)
        if t.ndim != 1 or len(t) < 1:
            raise ValueError("ladder needs at least one temperature")
        if t[0] <= 0:
            raise ValueError(f"temperatures must be positive, got T_1={t[0]}")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("temperatures must be strictly increasing")

    @property
    def n_rungs(self) -> int:
        return len(self.temperatures)

    @property
    def betas(self) -> np.ndarray:
        return 1.0 / self.temperatures


def build_ladder(
    t_min: float,
    t_max: float,
    n_t: int,
    mode: str = "geometric",
    *,
    temps=None,
    model: CouplingModel | None = None,
    pilot_rounds: int = 600,
    n_iters: int = 3,
    seed: int = 0,
) -> TemperatureLadder:
    """Build a temperature ladder.

    geometric: T_k = T_min (T_max/T_min)^((k-1)/(N_T-1)).
    explicit:  use ``temps`` as given.
    adaptive:  start geometric, then iteratively reposition interior rungs so
               pilot-run swap rates flatten (endpoints pinned).
    """
    if mode == "explicit":
        if temps is None:
            raise ValueError("explicit mode requires temps")
        return TemperatureLadder(np.asarray(temps, dtype=float), mode="explicit")
    if not (0 < t_min < t_max):
        raise ValueError(f"need 0 < T_min < T_max, got ({t_min}, {t_max})")
    if n_t < 2:
        raise ValueError(f"need at least 2 rungs, got {n_t}")
    ladder = np.geomspace(t_min, t_max, n_t)
    ladder[0], ladder[-1] = t_min, t_max
    if mode == "geometric":
        return TemperatureLadder(ladder, mode="geometric")
    if mode != "adaptive":
        raise ValueError(f"unknown ladder mode {mode!r}")
    if model is None:
        raise ValueError("adaptive mode needs a model for pilot runs")
    for _ in range(n_iters):
        rates = _pilot_swap_rates(model, ladder, pilot_rounds, seed)
        # Repositioning: treat 1 - A_k as the cost of crossing gap k and place
        # interior rungs at equal cumulative cost (interpolated in log T).
        cost = np.clip(1.0 - rates, 0.05, None)
        cum = np.concatenate([[0.0], np.cumsum(cost)])
        cum /= cum[-1]
        targets = np.linspace(0.0, 1.0, n_t)
        ladder = np.exp(np.interp(targets, cum, np.log(ladder)))
        ladder[0], ladder[-1] = t_min, t_max
    return TemperatureLadder(ladder, mode="adaptive")


def _pilot_swap_rates(model, temps, rounds, seed) -> np.ndarray:
    ladder = TemperatureLadder(np.asarray(temps, dtype=float))
    ens = init_ensemble(model, ladder, seed=seed)
    for r in range(rounds):
        sweep_ensemble(ens)
        attempt_swaps(ens, ladder, r % 2)
    with np.errstate(invalid="ignore"):
        rates = ens.swap_accepts / np.maximum(ens.swap_attempts, 1)
    return rates


@dataclass
class RunSchedule:
    """2**tau equilibration rounds, then measurement rounds."""

    tau: int
    measure_sweeps: int | None = None
    stride: int = 1
    checkpoint_interval: int = 0
    seed: int = 0
    n_blocks: int = 16

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.measure_sweeps is None:
            self.measure_sweeps = 1 << self.tau
        if self.measure_sweeps < 0:
            raise ValueError("measure_sweeps must be >= 0")
        if self.checkpoint_interval < 0:
            raise ValueError("checkpoint_interval must be >= 0")

    @property
    def equilibration_sweeps(self) -> int:
        return 1 << self.tau

    @property
    def n_samples(self) -> int:
        return self.measure_sweeps // self.stride


class RngStream:
    """Single xoshiro256+ stream with the same layout the kernels use."""

    def __init__(self, seed: int):
        self.state = kernels.seed_streams(np.uint64(seed), 1)

    def uniform(self, n: int = 1) -> np.ndarray:
        return kernels.uniform_doubles(self.state, 0, n)


@dataclass
class ReplicaEnsemble:
    """One spin configuration per rung sharing a single disorder sample.

    ``perm[k]`` is the storage row currently held by rung k; swaps permute
    ``perm`` so cached term products stay attached to their configuration.
    """

    model: CouplingModel
    temperatures: np.ndarray
    spins: np.ndarray  # (n_rungs, num_spins) int8, indexed by row
    prods: np.ndarray  # (n_rungs, n_terms) int8
    energies: np.ndarray  # (n_rungs,) int64, indexed by row
    perm: np.ndarray  # (n_rungs,) int64
    rng: np.ndarray  # (n_rungs + 1, 4) uint64
    accept_table: np.ndarray  # (n_rungs, max_inc + 1)
    swap_attempts: np.ndarray  # (n_rungs - 1,) int64
    swap_accepts: np.ndarray

    @property
    def n_rungs(self) -> int:
        return len(self.temperatures)

    def energies_by_rung(self) -> np.ndarray:
        return self.energies[self.perm]

    def state_by_rung(self, k: int) -> np.ndarray:
        return self.spins[self.perm[k]]

    def recomputed_energies(self) -> np.ndarray:
        return np.array(
            [-int(term_products(self.model, self.spins[row]).sum()) for row in range(len(self.spins))],
            dtype=np.int64,
        )

    def check_energy_cache(self) -> bool:
        return bool(np.array_equal(self.recomputed_energies(), self.energies))

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.spins[self.perm].tobytes())
        h.update(self.energies[self.perm].tobytes())
        return h.hexdigest()


def _acceptance_table(model: CouplingModel, temps: np.ndarray) -> np.ndarray:
    max_inc = model.max_incidence() if model.num_spins else 0
    d = np.arange(max_inc + 1, dtype=np.float64)
    return np.exp(-2.0 * d[None, :] / np.asarray(temps, dtype=float)[:, None])


def init_ensemble(
    model: CouplingModel,
    ladder: TemperatureLadder,
    seed: int = 0,
    start: str = "random",
) -> ReplicaEnsemble:
    """Fresh ensemble; spins drawn from a seed-derived stream ('random') or
    all up ('up')."""
    n_rungs = ladder.n_rungs
    if start == "random":
        init_rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
        spins = np.where(init_rng.random((n_rungs, model.num_spins)) < 0.5, -1, 1).astype(np.int8)
    elif start == "up":
        spins = np.ones((n_rungs, model.num_spins), dtype=np.int8)
    else:
        raise ValueError(f"unknown start {start!r}")
    prods = np.empty((n_rungs, model.n_terms), dtype=np.int8)
    energies = np.empty(n_rungs, dtype=np.int64)
    for row in range(n_rungs):
        prods[row] = term_products(model, spins[row])
        energies[row] = -int(prods[row].sum())
    return ReplicaEnsemble(
        model=model,
        temperatures=ladder.temperatures.copy(),
        spins=spins,
        prods=prods,
        energies=energies,
        perm=np.arange(n_rungs, dtype=np.int64),
        rng=kernels.seed_streams(np.uint64(seed), n_rungs + 1),
        accept_table=_acceptance_table(model, ladder.temperatures),
        swap_attempts=np.zeros(max(n_rungs - 1, 0), dtype=np.int64),
        swap_accepts=np.zeros(max(n_rungs - 1, 0), dtype=np.int64),
    )


def sweep_ensemble(ens: ReplicaEnsemble) -> None:
    kernels.pt_sweep(
        ens.spins,
        ens.prods,
        ens.energies,
        ens.perm,
        ens.model.spin_ptr,
        ens.model.spin_terms,
        ens.accept_table,
        ens.rng,
    )


def metropolis_sweep(model: CouplingModel, state: np.ndarray, T: float, rng: RngStream):
    """One scan-order Metropolis sweep of a single configuration.

    Mutates and returns (state, energy); each spin is proposed once, accepted
    with probability min(1, exp(-dE/T)).
    """
    if T <= 0:
        raise ValueError(f"temperature must be positive, got {T}")
    state2d = np.ascontiguousarray(state, dtype=np.int8).reshape(1, -1)
    if state2d.shape[1] != model.num_spins:
        raise ValueError("state length mismatch")
    prods = term_products(model, state2d[0]).reshape(1, -1)
    energies = np.array([-int(prods.sum())], dtype=np.int64)
    accept = _acceptance_table(model, np.array([T]))
    kernels.pt_sweep(
        state2d,
        prods,
        energies,
        np.zeros(1, dtype=np.int64),
        model.spin_ptr,
        model.spin_terms,
        accept,
        rng.state,
    )
    state[:] = state2d[0]
    return state, int(energies[0])


def swap_probability(e_k: float, e_k1: float, t_k: float, t_k1: float) -> float:
    """min(1, exp((E_k - E_{k+1}) (1/T_k - 1/T_{k+1})))."""
    x = (e_k - e_k1) * (1.0 / t_k - 1.0 / t_k1)
    return 1.0 if x >= 0 else float(np.exp(x))


def attempt_swaps(ens: ReplicaEnsemble, ladder: TemperatureLadder, parity) -> ReplicaEnsemble:
    """One round of adjacent-pair swap attempts on pairs (k, k+1), k = parity mod 2."""
    par = {"even": 0, "odd": 1}.get(parity, parity)
    if par not in (0, 1):
        raise ValueError(f"parity must be 'even'/'odd'/0/1, got {parity!r}")
    kernels.swap_round(
        ens.energies,
        ens.perm,
        ladder.betas,
        ens.rng,
        par,
        ens.swap_attempts,
        ens.swap_accepts,
    )
    return ens


# --- equilibration log-binning ------------------------------------------------

N_SUBBLOCKS = 8


def _window_of(round_index: int) -> tuple[int, int]:
    """(window, offset) of an equilibration round; round 0 is burn-in."""
    w = round_index.bit_length() - 1
    return w, round_index - (1 << w)


def _window_stats(sub_sums: np.ndarray, sub_counts: np.ndarray):
    """Window mean and standard error from sub-block means."""
    total = sub_sums.sum(axis=-1)
    n = sub_counts.sum()
    mean = total / n
    used = sub_counts > 0
    if used.sum() >= 2:
        bm = sub_sums[..., used] / sub_counts[used]
        se = bm.std(axis=-1, ddof=1) / np.sqrt(used.sum())
    else:
        se = np.full(mean.shape, np.nan)
    return mean, se


def _subblock_counts(tau: int) -> np.ndarray:
    counts = np.zeros((tau, N_SUBBLOCKS), dtype=np.int64)
    for w in range(tau):
        for off in range(1 << w):
            counts[w, (off * N_SUBBLOCKS) >> w] += 1
    return counts


@dataclass
class RunRecord:
    """Binned observable series plus metadata for one (model, ladder) run."""

    meta: dict
    temps: np.ndarray
    block_counts: np.ndarray  # (n_blocks,) samples per block
    block_sums: dict[str, np.ndarray]  # name -> (n_rungs, n_blocks)
    eq_mean: np.ndarray  # (n_rungs, tau) window means of E
    eq_se: np.ndarray

    @property
    def n_rungs(self) -> int:
        return len(self.temps)

    @property
    def n_samples(self) -> int:
        return int(self.block_counts.sum())

    @property
    def equilibrated(self) -> bool:
        return bool(self.meta["equilibration"]["flag"])

    def wilson_ls(self) -> list[int]:
        return [int(name[2:]) for name in self.block_sums if name.startswith("w_")]

    def series(self, rung: int) -> ObservableSeries:
        n = self.n_samples
        sums = {k: v[rung] for k, v in self.block_sums.items()}
        means = {k: (v.sum() / n if n else float("nan")) for k, v in sums.items()}
        with np.errstate(invalid="ignore", divide="ignore"):
            blocks = {
                k: np.where(self.block_counts > 0, v / self.block_counts, np.nan)
                for k, v in sums.items()
            }
        return ObservableSeries(
            T=float(self.temps[rung]),
            num_spins=int(self.meta["model"]["num_spins"]),
            n_samples=n,
            e_mean=means.get("e", float("nan")),
            e2_mean=means.get("e2", float("nan")),
            m0sq_mean=means.get("m0sq"),
            mksq_mean=means.get("mksq"),
            wilson_means={int(k[2:]): v for k, v in means.items() if k.startswith("w_")},
            blocks=blocks,
            sublattice_size=self.meta.get("plan", {}).get("sublattice_size"),
            sublattice_color=self.meta.get("plan", {}).get("sublattice_color"),
        )


def run_pt(
    model: CouplingModel,
    ladder: TemperatureLadder,
    schedule: RunSchedule,
    plan: MeasurementPlan | None = None,
    start: str = "random",
    resume_from=None,
    checkpoint_path=None,
    extra_meta: dict | None = None,
) -> RunRecord:
    """Equilibrate, measure, and bin observables for one disorder sample."""
    if plan is None:
        plan = plan_for_model(model)
    n_rungs = ladder.n_rungs
    tau = schedule.tau
    total_eq = schedule.equilibration_sweeps
    n_samples = schedule.n_samples
    n_blocks = min(schedule.n_blocks, n_samples) if n_samples else 0
    total_rounds = total_eq + schedule.measure_sweeps

    names = ["e", "e2"]
    if plan.sublattice is not None:
        names += ["m0sq", "mksq"]
    names += [f"w_{spec.l}" for spec in plan.loops]

    meta = {
        "schema": RECORD_SCHEMA,
        "model": model_dump(model),
        "ladder": {"mode": ladder.mode, "temperatures": ladder.temperatures.tolist()},
        "schedule": {
            "tau": tau,
            "measure_sweeps": schedule.measure_sweeps,
            "stride": schedule.stride,
            "seed": schedule.seed,
            "n_blocks": n_blocks,
        },
        "start": start,
        "plan": {
            "sublattice_color": plan.sublattice_color,
            "sublattice_size": None if plan.sublattice is None else int(len(plan.sublattice)),
            "wilson_ls": list(plan.wilson_ls),
        },
    }
    if extra_meta:
        meta.update(extra_meta)

    if resume_from is not None:
        ens, rounds_done, ew_sum, ew_sub, block_counts, block_sums = _load_checkpoint(
            resume_from, model, meta
        )
    else:
        ens = init_ensemble(model, ladder, seed=schedule.seed, start=start)
        rounds_done = 0
        ew_sum = np.zeros((n_rungs, tau), dtype=np.float64)
        ew_sub = np.zeros((n_rungs, tau, N_SUBBLOCKS), dtype=np.float64)
        block_counts = np.zeros(max(n_blocks, 1), dtype=np.int64)
        block_sums = {name: np.zeros((n_rungs, max(n_blocks, 1))) for name in names}

    scratch = np.empty(n_rungs, dtype=np.float64)
    scratch2 = np.empty(n_rungs, dtype=np.float64)

    for r in range(rounds_done, total_rounds):
        sweep_ensemble(ens)
        if n_rungs > 1:
            attempt_swaps(ens, ladder, r % 2)
        if r < total_eq:
            if r >= 1:
                w, off = _window_of(r)
                e = ens.energies_by_rung().astype(np.float64)
                ew_sum[:, w] += e
                ew_sub[:, w, (off * N_SUBBLOCKS) >> w] += e
        else:
            t = r - total_eq
            if (t + 1) % schedule.stride == 0:
                s = t // schedule.stride
                b = s * n_blocks // n_samples
                block_counts[b] += 1
                e = ens.energies_by_rung().astype(np.float64)
                block_sums["e"][:, b] += e
                block_sums["e2"][:, b] += e * e
                if plan.sublattice is not None:
                    kernels.measure_sublattice(
                        ens.spins, ens.perm, plan.sublattice, plan.cos_k, plan.sin_k,
                        scratch, scratch2,
                    )
                    block_sums["m0sq"][:, b] += scratch
                    block_sums["mksq"][:, b] += scratch2
                for spec in plan.loops:
                    kernels.measure_loops(ens.spins, ens.perm, spec.edge_ids, scratch)
                    block_sums[f"w_{spec.l}"][:, b] += scratch
        if (
            checkpoint_path is not None
            and schedule.checkpoint_interval
            and (r + 1) % schedule.checkpoint_interval == 0
        ):
            _save_checkpoint(
                checkpoint_path, meta, ens, r + 1, ew_sum, ew_sub, block_counts, block_sums
            )

    if not ens.check_energy_cache():  # pragma: no cover - internal consistency
        raise RuntimeError("energy cache diverged from recomputed energies")

    sub_counts = _subblock_counts(tau)
    eq_mean = np.full((n_rungs, tau), np.nan)
    eq_se = np.full((n_rungs, tau), np.nan)
    for w in range(tau):
        eq_mean[:, w], eq_se[:, w] = _window_stats(ew_sub[:, w, :], sub_counts[w])
    meta["equilibration"] = _equilibration_report(eq_mean, eq_se, tau)
    meta["swaps"] = {
        "attempts": ens.swap_attempts.tolist(),
        "accepts": ens.swap_accepts.tolist(),
    }
    meta["final_digest"] = ens.digest()

    return RunRecord(
        meta=meta,
        temps=ladder.temperatures.copy(),
        block_counts=block_counts if n_blocks else np.zeros(0, dtype=np.int64),
        block_sums=block_sums if n_blocks else {},
        eq_mean=eq_mean,
        eq_se=eq_se,
    )


def _equilibration_report(eq_mean, eq_se, tau, z_threshold=2.0) -> dict:
    """Compare the last two log windows per rung.

    A rung passes when the window means agree within z_threshold combined
    standard errors. Because the errors come from 8 sub-block means, an
    equilibrated rung still exceeds 2 sigma about 8.5% of the time (t with 7
    dof), so the run is flagged non-equilibrated only when the number of
    failing rungs exceeds that chance rate by 3 binomial sigmas.
    """
    if tau < 2:
        return {"flag": False, "fraction_passing": 0.0, "z": [], "note": "tau < 2"}
    m1, m2 = eq_mean[:, tau - 1], eq_mean[:, tau - 2]
    se = np.sqrt(eq_se[:, tau - 1] ** 2 + eq_se[:, tau - 2] ** 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.abs(m1 - m2) / se
    z = np.where((m1 == m2), 0.0, z)
    ok = np.isfinite(z) & (z <= z_threshold)
    n = len(z)
    q = 0.085  # two-sided P(|t_7| > 2)
    allowed = n * q + 3.0 * math.sqrt(n * q * (1.0 - q)) + 0.5
    failures = int(n - ok.sum())
    return {
        "flag": bool(failures <= allowed),
        "failures": failures,
        "allowed_failures": round(allowed, 2),
        "fraction_passing": float(ok.mean()) if n else 0.0,
        "z_threshold": z_threshold,
        "z": [round(float(v), 4) if np.isfinite(v) else None for v in z],
    }


# --- checkpointing -------------------------------------------------------------


def _save_checkpoint(path, meta, ens, rounds_done, ew_sum, ew_sub, block_counts, block_sums):
    buf = io.BytesIO()
    arrays = {
        "spins": ens.spins,
        "prods": ens.prods,
        "energies": ens.energies,
        "perm": ens.perm,
        "rng": ens.rng,
        "swap_attempts": ens.swap_attempts,
        "swap_accepts": ens.swap_accepts,
        "rounds_done": np.int64(rounds_done),
        "ew_sum": ew_sum,
        "ew_sub": ew_sub,
        "block_counts": block_counts,
        "meta_json": np.frombuffer(
            json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8
        ),
    }
    for name, arr in block_sums.items():
        arrays[f"obs_{name}"] = arr
    np.savez(buf, **arrays)
    payload = buf.getvalue()
    header = CHECKPOINT_MAGIC + np.uint32(CHECKPOINT_VERSION).tobytes()
    crc = np.uint32(zlib.crc32(payload)).tobytes()
    tmp = str(path) + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(header + crc + payload)
    import os

    os.replace(tmp, path)


def _load_checkpoint(path, model, expected_meta):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path}: bad magic; not a checkpoint file")
    version = int(np.frombuffer(blob[8:12], dtype=np.uint32)[0])
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    crc_stored = int(np.frombuffer(blob[12:16], dtype=np.uint32)[0])
    payload = blob[16:]
    if zlib.crc32(payload) & 0xFFFFFFFF != crc_stored:
        raise CheckpointError(f"{path}: checksum mismatch; checkpoint is corrupted")
    data = np.load(io.BytesIO(payload))
    meta = json.loads(bytes(data["meta_json"]).decode())
    for key in ("model", "ladder", "schedule", "plan", "start"):
        if meta.get(key) != expected_meta.get(key):
            raise CheckpointError(f"{path}: checkpoint {key} does not match this run")
    temps = np.asarray(meta["ladder"]["temperatures"], dtype=float)
    ens = ReplicaEnsemble(
        model=model,
        temperatures=temps,
        spins=data["spins"].copy(),
        prods=data["prods"].copy(),
        energies=data["energies"].copy(),
        perm=data["perm"].copy(),
        rng=data["rng"].copy(),
        accept_table=_acceptance_table(model, temps),
        swap_attempts=data["swap_attempts"].copy(),
        swap_accepts=data["swap_accepts"].copy(),
    )
    block_sums = {
        name[len("obs_") :]: data[name].copy() for name in data.files if name.startswith("obs_")
    }
    return (
        ens,
        int(data["rounds_done"]),
        data["ew_sum"].copy(),
        data["ew_sub"].copy(),
        data["block_counts"].copy(),
        block_sums,
    )


# --- record serialization -------------------------------------------------------


def save_run_record(record: RunRecord, basepath) -> None:
    """Write <base>.json (metadata + equilibration bins) and <base>.csv
    (per rung x block observable means)."""
    base = str(basepath)
    doc = dict(record.meta)
    doc["eq_mean"] = [[_jsonf(v) for v in row] for row in record.eq_mean]
    doc["eq_se"] = [[_jsonf(v) for v in row] for row in record.eq_se]
    with open(base + ".json", "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")

    names = sorted(record.block_sums)
    with open(base + ".csv", "w", newline="") as fh:
        fh.write(",".join(["rung", "T", "block", "count"] + names) + "\n")
        for k in range(record.n_rungs):
            for b in range(len(record.block_counts)):
                cnt = int(record.block_counts[b])
                means = [
                    repr(float(record.block_sums[name][k, b]) / cnt) if cnt else "nan"
                    for name in names
                ]
                fh.write(
                    ",".join([str(k), repr(float(record.temps[k])), str(b), str(cnt)] + means)
                    + "\n"
                )


def _jsonf(v: float):
    return None if not np.isfinite(v) else float(v)


def load_run_record(basepath) -> RunRecord:
    base = str(basepath)
    with open(base + ".json") as fh:
        doc = json.load(fh)
    eq_mean = np.array(
        [[np.nan if v is None else v for v in row] for row in doc.pop("eq_mean")], dtype=float
    )
    eq_se = np.array(
        [[np.nan if v is None else v for v in row] for row in doc.pop("eq_se")], dtype=float
    )
    temps = np.asarray(doc["ladder"]["temperatures"], dtype=float)
    rows = []
    with open(base + ".csv") as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            rows.append(line.strip().split(","))
    names = header[4:]
    n_rungs = len(temps)
    n_blocks = max(len(rows) // max(n_rungs, 1), 1) if rows else 0
    block_counts = np.zeros(n_blocks, dtype=np.int64)
    block_sums = {name: np.zeros((n_rungs, n_blocks)) for name in names}
    for row in rows:
        k, b, cnt = int(row[0]), int(row[2]), int(row[3])
        block_counts[b] = cnt
        for j, name in enumerate(names):
            val = float(row[4 + j])
            block_sums[name][k, b] = val * cnt if cnt else 0.0
    if eq_mean.size == 0:
        eq_mean = eq_mean.reshape(n_rungs, 0)
        eq_se = eq_se.reshape(n_rungs, 0)
    return RunRecord(
        meta=doc,
        temps=temps,
        block_counts=block_counts,
        block_sums=block_sums,
        eq_mean=eq_mean,
        eq_se=eq_se,
    )
