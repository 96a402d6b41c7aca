"""Exact small-instance computations: partition functions by enumeration,
error-class probabilities, optimal decoding, domain-wall free energies, and
numerical verification of the success-implies-divergence lemma.

Everything here is an independent oracle for the Monte Carlo path: partition
functions come from Gray-code enumeration of all spin states (as an exact
density of states), class probabilities from direct enumeration of the
stabilizer group, and homology from dense GF(2) elimination with
deterministic pivoting.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .complexes import ChainComplex, ChainKind, chain_complex_from_dense
from .models import (
    CouplingModel,
    DisorderConfig,
    ModelKind,
    model_from_terms,
)

MAX_ENUM_SPINS = 24


# --- GF(2) linear algebra -----------------------------------------------------


def gf2_rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) with deterministic pivoting
    (first nonzero row in column order)."""
    r = (np.asarray(m, dtype=np.uint8) % 2).copy()
    n_rows, n_cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        if row >= n_rows:
            break
        hot = np.flatnonzero(r[row:, col])
        if len(hot) == 0:
            continue
        pr = row + hot[0]
        if pr != row:
            r[[row, pr]] = r[[pr, row]]
        elim = np.flatnonzero(r[:, col])
        elim = elim[elim != row]
        r[elim] ^= r[row]
        pivots.append(col)
        row += 1
    return r, pivots


def gf2_rank(m: np.ndarray) -> int:
    return len(gf2_rref(m)[1])


def gf2_nullspace(m: np.ndarray) -> np.ndarray:
    """Rows form a basis of {x : m x = 0}; deterministic order by free column."""
    m = np.asarray(m, dtype=np.uint8) % 2
    n_cols = m.shape[1]
    r, pivots = gf2_rref(m)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = np.zeros((len(free), n_cols), dtype=np.uint8)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for row_idx, pc in enumerate(pivots):
            if r[row_idx, fc]:
                basis[i, pc] = 1
    return basis


def gf2_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One solution x of a x = b over GF(2), or None if infeasible."""
    a = np.asarray(a, dtype=np.uint8) % 2
    b = np.asarray(b, dtype=np.uint8) % 2
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    r, pivots = gf2_rref(aug)
    n_cols = a.shape[1]
    if n_cols in pivots:
        return None
    x = np.zeros(n_cols, dtype=np.uint8)
    for row_idx, pc in enumerate(pivots):
        x[pc] = r[row_idx, n_cols]
    return x


def gf2_in_span(rows: np.ndarray, v: np.ndarray) -> bool:
    if rows.size == 0:
        return not np.any(np.asarray(v) % 2)
    return gf2_solve(np.asarray(rows).T, v) is not None


# --- small CSS codes ----------------------------------------------------------


@dataclass
class SmallCSSCode:
    """Chain complex small enough for exact enumeration, with homology
    representatives of ker d1 / im d2 (the zero class first)."""

    name: str
    chain: ChainComplex
    d2: np.ndarray  # dense (n1, n2)
    d1: np.ndarray  # dense (n0, n1)
    h1_generators: np.ndarray  # (k, n1) representatives generating H1
    log2_kernel_d2: int  # dim ker d2 (stabilizer-map kernel)
    rank_d1: int

    @property
    def n1(self) -> int:
        return self.chain.n1

    @property
    def n2(self) -> int:
        return self.chain.n2

    @property
    def h1_order(self) -> int:
        return 1 << len(self.h1_generators)

    def h1_representatives(self) -> np.ndarray:
        """(|H1|, n1) array; row index is the XOR-combination bitmask."""
        k = len(self.h1_generators)
        reps = np.zeros((1 << k, self.n1), dtype=np.uint8)
        for mask in range(1 << k):
            v = np.zeros(self.n1, dtype=np.uint8)
            for i in range(k):
                if (mask >> i) & 1:
                    v ^= self.h1_generators[i]
            reps[mask] = v
        return reps

    @classmethod
    def from_chain(cls, chain: ChainComplex, name: str = "") -> "SmallCSSCode":
        if chain.n2 > MAX_ENUM_SPINS:
            raise ValueError(
                f"enumeration limited to {MAX_ENUM_SPINS} spins, chain has {chain.n2}"
            )
        d2 = chain.d2_dense()
        d1 = chain.d1_dense()
        if np.any((d1.astype(np.int64) @ d2.astype(np.int64)) % 2):
            raise ValueError("d1 @ d2 != 0; not a chain complex")
        ker_d1 = gf2_nullspace(d1)
        im_basis_rows, piv = gf2_rref(d2.T)
        im_basis = im_basis_rows[: len(piv)]
        gens = []
        current = im_basis.copy()
        for v in ker_d1:
            if not gf2_in_span(current, v):
                gens.append(v)
                current = np.concatenate([current, v.reshape(1, -1)])
        h1_generators = (
            np.array(gens, dtype=np.uint8) if gens else np.zeros((0, chain.n1), dtype=np.uint8)
        )
        return cls(
            name=name,
            chain=chain,
            d2=d2,
            d1=d1,
            h1_generators=h1_generators,
            log2_kernel_d2=chain.n2 - len(piv),
            rank_d1=gf2_rank(d1),
        )


def disorder_model(code: SmallCSSCode, eps: np.ndarray) -> CouplingModel:
    """Compile the code's chain with explicit disorder bits into a model."""
    eps = np.asarray(eps, dtype=np.uint8) % 2
    if len(eps) != code.n1:
        raise ValueError(f"disorder length {len(eps)} != n1 {code.n1}")
    counts = code.d2.sum(axis=1)
    if code.n1 and np.ptp(counts) != 0:
        raise ValueError("oracle models require uniform term arity")
    arity = int(counts[0]) if code.n1 else 0
    term_spins = (
        np.array([np.flatnonzero(code.d2[j]) for j in range(code.n1)], dtype=np.int32).reshape(
            code.n1, arity
        )
        if code.n1
        else np.zeros((0, 0), dtype=np.int32)
    )
    signs = np.where(eps == 0, 1, -1).astype(np.int8)
    model = model_from_terms(term_spins, signs, code.n2, ModelKind.GENERIC)
    return CouplingModel(
        kind=model.kind,
        num_spins=model.num_spins,
        term_spins=model.term_spins,
        term_signs=model.term_signs,
        spin_ptr=model.spin_ptr,
        spin_terms=model.spin_terms,
        disorder=None,
        chain=code.chain,
    )


# --- exact partition functions ------------------------------------------------


def exact_partition(model: CouplingModel, beta: float) -> float:
    """log Z by exact enumeration (log-sum-exp over the density of states)."""
    if model.num_spins > MAX_ENUM_SPINS:
        raise ValueError(f"too many spins for enumeration: {model.num_spins}")
    g = kernels.density_of_states(
        model.term_signs, model.spin_ptr, model.spin_terms, model.num_spins
    )
    n_terms = model.n_terms
    energies = np.arange(-n_terms, n_terms + 1, dtype=np.float64)
    mask = g > 0
    logs = np.log(g[mask]) - beta * energies[mask]
    return float(_logsumexp(logs))


def exact_moments(model: CouplingModel, beta: float) -> dict:
    """Exact <E>, <E^2> and log Z at inverse temperature beta."""
    if model.num_spins > MAX_ENUM_SPINS:
        raise ValueError(f"too many spins for enumeration: {model.num_spins}")
    g = kernels.density_of_states(
        model.term_signs, model.spin_ptr, model.spin_terms, model.num_spins
    )
    n_terms = model.n_terms
    energies = np.arange(-n_terms, n_terms + 1, dtype=np.float64)
    mask = g > 0
    e = energies[mask]
    logw = np.log(g[mask]) - beta * e
    log_z = _logsumexp(logw)
    w = np.exp(logw - log_z)
    e_mean = float(np.sum(w * e))
    e2_mean = float(np.sum(w * e * e))
    return {"log_z": float(log_z), "e_mean": e_mean, "e2_mean": e2_mean, "e_var": e2_mean - e_mean**2}


def _logsumexp(logs: np.ndarray) -> float:
    m = np.max(logs)
    return float(m + np.log(np.sum(np.exp(logs - m))))


# --- class probabilities --------------------------------------------------------


def _d2_columns_csr(code: SmallCSSCode):
    cols = [np.flatnonzero(code.d2[:, i]).astype(np.int32) for i in range(code.n2)]
    ptr = np.zeros(code.n2 + 1, dtype=np.int64)
    for i, c in enumerate(cols):
        ptr[i + 1] = ptr[i] + len(c)
    idx = np.concatenate(cols).astype(np.int32) if cols else np.zeros(0, dtype=np.int32)
    return ptr, idx


def class_log_weight(code: SmallCSSCode, eps: np.ndarray, p: float) -> float:
    """log of the stabilizer-group sum  sum_w Pr(eps + d2 w)  over all w in C2.

    This is the quantity that equals (1-p)^{n1} e^{-beta(p) n1} Z_eps(beta(p))
    exactly; it counts each class element |ker d2| times.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    eps = np.asarray(eps, dtype=np.uint8) % 2
    ptr, idx = _d2_columns_csr(code)
    counts = kernels.coset_weight_counts(ptr, idx, eps)
    w = np.arange(code.n1 + 1, dtype=np.float64)
    mask = counts > 0
    logs = np.log(counts[mask]) + w[mask] * math.log(p) + (code.n1 - w[mask]) * math.log1p(-p)
    return _logsumexp(logs)


def class_probability(code: SmallCSSCode, eps: np.ndarray, p: float, normalized: bool = True) -> float:
    """Probability of the equivalence class of ``eps``.

    With ``normalized`` (default) the stabilizer-kernel multiplicity
    |ker d2| is divided out so that class probabilities sum to 1 over all
    classes; the raw stabilizer-group sum is available via normalized=False
    (or class_log_weight).
    """
    if p == 0.0:
        # zero-weight coset element or nothing
        return 1.0 if gf2_in_span(gf2_rref(code.d2.T)[0], eps) else 0.0
    log_w = class_log_weight(code, eps, p)
    if normalized:
        log_w -= code.log2_kernel_d2 * math.log(2.0)
    return math.exp(log_w)


# --- decoding -------------------------------------------------------------------


@dataclass
class DecodeResult:
    representative: np.ndarray
    class_index: int  # H1 combination bitmask relative to the base solution
    log_probs: np.ndarray  # per H1 class, normalized measure
    tied_classes: list[int] = field(default_factory=list)

    @property
    def tied(self) -> bool:
        return len(self.tied_classes) > 1


def optimal_decode(code: SmallCSSCode, sigma: np.ndarray, p: float, tol: float = 1e-12) -> DecodeResult:
    """Representative of the most probable error class consistent with sigma.

    Ties (within relative tolerance) break toward the lowest class index and
    are reported in ``tied_classes``.
    """
    sigma = np.asarray(sigma, dtype=np.uint8) % 2
    phi0 = gf2_solve(code.d1, sigma)
    if phi0 is None:
        raise ValueError("syndrome is not in the image of d1; infeasible")
    reps = code.h1_representatives()
    logs = np.array(
        [
            class_log_weight(code, (phi0 + lam) % 2, p) - code.log2_kernel_d2 * math.log(2.0)
            for lam in reps
        ]
    )
    best = int(np.argmax(logs))
    ties = [int(i) for i in range(len(logs)) if logs[i] >= logs[best] - tol]
    best = ties[0]
    return DecodeResult(
        representative=(phi0 + reps[best]) % 2,
        class_index=best,
        log_probs=logs,
        tied_classes=ties,
    )


def syndrome_class_table(code: SmallCSSCode, p: float):
    """All syndromes in im d1 with the normalized probability of every
    H1 class consistent with each; rows sum to the syndrome probability."""
    im_basis_rows, piv = gf2_rref(code.d1.T)
    basis = im_basis_rows[: len(piv)]
    r1 = len(basis)
    if r1 > 20:
        raise ValueError(f"too many syndromes to enumerate: 2^{r1}")
    reps = code.h1_representatives()
    n_sigma = 1 << r1
    q = np.zeros((n_sigma, len(reps)))
    syndromes = np.zeros((n_sigma, code.d1.shape[0]), dtype=np.uint8)
    for mask in range(n_sigma):
        sigma = np.zeros(code.d1.shape[0], dtype=np.uint8)
        for i in range(r1):
            if (mask >> i) & 1:
                sigma ^= basis[i]
        syndromes[mask] = sigma
        phi0 = gf2_solve(code.d1, sigma)
        for j, lam in enumerate(reps):
            q[mask, j] = class_probability(code, (phi0 + lam) % 2, p)
    return syndromes, q


def success_probability(code: SmallCSSCode, p: float) -> float:
    """Probability that optimal decoding succeeds: sum over syndromes of the
    decoded class probability."""
    if p == 0.0:
        return 1.0
    _, q = syndrome_class_table(code, p)
    return float(q.max(axis=1).sum())


# --- free energy costs ------------------------------------------------------------


def _require_nontrivial_cycle(code: SmallCSSCode, lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=np.uint8) % 2
    if np.any(code.d1 @ lam % 2):
        raise ValueError("lambda is not a cycle (d1 lambda != 0)")
    if gf2_solve(code.d2, lam) is not None:
        raise ValueError("lambda is a stabilizer boundary (trivial class)")
    return lam


def free_energy_cost(model: CouplingModel, eps: np.ndarray, lam: np.ndarray, beta: float) -> float:
    """Delta_lambda(eps) = -log Z_{eps+lam} + log Z_eps at inverse temperature beta."""
    chain = model.chain
    if chain is None:
        raise ValueError("model must carry its chain complex")
    code = SmallCSSCode.from_chain(chain)
    lam = _require_nontrivial_cycle(code, lam)
    eps = np.asarray(eps, dtype=np.uint8) % 2
    return _wall_cost(code, model, eps, lam, beta)


def _wall_cost(code, model, eps, lam, beta) -> float:
    log_z = exact_partition(model, beta)
    log_z_shift = exact_partition(disorder_model(code, (eps + lam) % 2), beta)
    return float(log_z - log_z_shift)


def average_free_energy_cost(
    code: SmallCSSCode,
    lam: np.ndarray,
    beta: float,
    p: float,
    n_samples: int = 0,
    seed: int = 0,
) -> float:
    """<Delta_lambda> weighted by Pr(eps): exact enumeration over C1 when
    n_samples == 0 (requires small n1), otherwise Monte Carlo over disorder."""
    lam = _require_nontrivial_cycle(code, lam)
    if n_samples == 0:
        if code.n1 > 20:
            raise ValueError(f"exact disorder average needs n1 <= 20, have {code.n1}")
        total = 0.0
        for bits in itertools.product((0, 1), repeat=code.n1):
            eps = np.array(bits, dtype=np.uint8)
            w = int(eps.sum())
            pr = (p**w) * ((1 - p) ** (code.n1 - w))
            if pr == 0.0:
                continue
            total += pr * _wall_cost(code, disorder_model(code, eps), eps, lam, beta)
        return total
    rng = np.random.default_rng(seed)
    acc = 0.0
    for _ in range(n_samples):
        eps = (rng.random(code.n1) < p).astype(np.uint8)
        acc += _wall_cost(code, disorder_model(code, eps), eps, lam, beta)
    return acc / n_samples


# --- the sandwich lemma --------------------------------------------------------------


def lemma_check(code: SmallCSSCode, p: float, tol: float = 1e-12) -> dict:
    """Numerically verify, by exact enumeration, the inequalities

        Pr(succ) >= sum_cls Pr(cls)^2 / sum_{l'} Pr(cls+l')  >= 2 Pr(succ) - 1

    and, for every nontrivial homology class l,

        <Delta_l> >= (1 - |H1|) - log sum_cls Pr(cls) Pr(cls+l) / sum_{l'} Pr(cls+l').
    """
    _, q = syndrome_class_table(code, p)
    n_h1 = q.shape[1]
    totals = q.sum(axis=1)  # per-syndrome probability
    partition_sum = float(totals.sum())
    pr_succ = float(q.max(axis=1).sum())
    middle = float(np.sum(q * q / totals[:, None]))

    beta = -0.5 * math.log(p / (1.0 - p))
    wall_checks = []
    for lam_idx in range(1, n_h1):
        q_shift = q[:, np.arange(n_h1) ^ lam_idx]
        avg_wall = float(np.sum(q * np.log(q / q_shift)))
        rhs = (1 - n_h1) - math.log(float(np.sum(q * q_shift / totals[:, None])))
        wall_checks.append(
            {
                "lambda_index": lam_idx,
                "avg_wall_cost": avg_wall,
                "lower_bound": rhs,
                "holds": bool(avg_wall >= rhs - tol),
            }
        )

    report = {
        "code": code.name,
        "p": p,
        "beta": beta,
        "h1_order": n_h1,
        "partition_sum": partition_sum,
        "partition_ok": bool(abs(partition_sum - 1.0) <= 1e-12),
        "pr_succ": pr_succ,
        "middle": middle,
        "upper_holds": bool(pr_succ >= middle - tol),
        "lower_holds": bool(middle >= 2.0 * pr_succ - 1.0 - tol),
        "upper_slack": pr_succ - middle,
        "lower_slack": middle - (2.0 * pr_succ - 1.0),
        "wall_bounds": wall_checks,
    }
    report["all_hold"] = bool(
        report["partition_ok"]
        and report["upper_holds"]
        and report["lower_holds"]
        and all(w["holds"] for w in wall_checks)
    )
    return report


# --- gauge sector counting -------------------------------------------------------


def gauge_sector_report(code: SmallCSSCode, generator_vectors: np.ndarray) -> dict:
    """Check that the symmetry generators exhaust (a subgroup of) ker d2 and
    count ground-state sectors.

    For disorder-free models every term is satisfiable simultaneously, so the
    minimal-energy states are exactly {x : d2^T ... } -- concretely the kernel
    of the term/spin incidence map, of size 2^dim. The generated gauge group
    divides it into 2^(dim kernel - dim generated) sectors.
    """
    gen = np.asarray(generator_vectors, dtype=np.uint8) % 2
    # generators must leave every term invariant: even overlap with every row
    overlap = (code.d2 @ gen.T) % 2
    if np.any(overlap):
        raise ValueError("a generator has odd overlap with an interaction term")
    dim_kernel = code.n2 - gf2_rank(code.d2)
    dim_generated = gf2_rank(gen)
    return {
        "ground_state_count_log2": dim_kernel,
        "gauge_group_log2": dim_generated,
        "sectors_log2": dim_kernel - dim_generated,
        "consistent": bool(dim_generated <= dim_kernel),
    }


# --- toy codes -------------------------------------------------------------------


def repetition_chain(n: int) -> ChainComplex:
    """Cyclic n-bit repetition code: no spins, pairwise parity checks."""
    d1 = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        d1[i, i] = 1
        d1[i, (i + 1) % n] = 1
    d2 = np.zeros((n, 0), dtype=np.uint8)
    return chain_complex_from_dense(d2, d1)


def toric_chain(L: int = 2) -> ChainComplex:
    """2D toric code on an L x L torus: faces -> edges -> vertices."""
    n_v = L * L

    def vid(x, y):
        return (x % L) * L + (y % L)

    def eid(x, y, axis):
        return vid(x, y) * 2 + axis

    d2 = np.zeros((2 * n_v, n_v), dtype=np.uint8)  # face column = its 4 edges
    d1 = np.zeros((n_v, 2 * n_v), dtype=np.uint8)  # edge column = its endpoints
    for x in range(L):
        for y in range(L):
            f = vid(x, y)
            for e in (eid(x, y, 0), eid(x, y, 1), eid(x + 1, y, 1), eid(x, y + 1, 0)):
                d2[e, f] ^= 1
            d1[vid(x, y), eid(x, y, 0)] ^= 1
            d1[vid(x + 1, y), eid(x, y, 0)] ^= 1
            d1[vid(x, y), eid(x, y, 1)] ^= 1
            d1[vid(x, y + 1), eid(x, y, 1)] ^= 1
    return chain_complex_from_dense(d2, d1)


def two_term_chain() -> ChainComplex:
    """Two arity-4 terms sharing two spins; trivial d1 (identity tests only)."""
    d2 = np.array(
        [[1, 1, 1, 1, 0, 0], [0, 0, 1, 1, 1, 1]], dtype=np.uint8
    )
    d1 = np.zeros((1, 2), dtype=np.uint8)
    return chain_complex_from_dense(d2, d1)


def toy_codes() -> dict[str, SmallCSSCode]:
    return {
        "rep3": SmallCSSCode.from_chain(repetition_chain(3), name="rep3"),
        "rep5": SmallCSSCode.from_chain(repetition_chain(5), name="rep5"),
        "toric2": SmallCSSCode.from_chain(toric_chain(2), name="toric2"),
        "two_term": SmallCSSCode.from_chain(two_term_chain(), name="two_term"),
    }


# --- suites ----------------------------------------------------------------------


def identity_suite(codes=None, n_pairs: int = 20, seed: int = 7, tol: float = 1e-10) -> dict:
    """Check  sum_w Pr(eps + d2 w) = (1-p)^{n1} e^{-beta(p) n1} Z_eps(beta(p))
    for random (eps, p) pairs, comparing two independent enumerations."""
    if codes is None:
        all_codes = toy_codes()
        codes = [all_codes["two_term"], all_codes["toric2"], all_codes["rep3"]]
    rng = np.random.default_rng(seed)
    cases = []
    worst = 0.0
    for i in range(n_pairs):
        code = codes[i % len(codes)]
        p = float(rng.uniform(0.05, 0.45))
        eps = (rng.random(code.n1) < 0.5).astype(np.uint8)
        beta = -0.5 * math.log(p / (1.0 - p))
        lhs = class_log_weight(code, eps, p)
        model = disorder_model(code, eps)
        rhs = code.n1 * math.log1p(-p) - beta * code.n1 + exact_partition(model, beta)
        diff = abs(lhs - rhs)
        worst = max(worst, diff)
        cases.append({"code": code.name, "p": p, "log_diff": diff})
    return {"max_log_diff": worst, "tol": tol, "ok": bool(worst <= tol), "cases": cases}


def mc_cross_check_suite(seed: int = 11) -> dict:
    """Validate the Monte Carlo path against exact enumeration.

    (a) single-tetrahedron model: the empirical state distribution from a
        long Metropolis run matches exp(-beta H)/Z by chi-squared test at
        T in {1, 2, 5};
    (b) plaquette model at L=2 (24 spins): PT-measured <E> and specific heat
        agree with the density-of-states values within 3 standard errors.
    """
    from scipy.stats import chisquare

    from .complexes import ChainKind, build_cubic_complex, to_chain_complex
    from .models import ModelKind, compile_model, sample_disorder, single_term_model, term_products
    from .mc import RunSchedule, build_ladder, run_pt
    from .observables import block_error, specific_heat

    report: dict = {"chi2": [], "rpim": []}

    model = single_term_model(4)
    n_spins = model.num_spins
    states = np.arange(1 << n_spins)
    spins_tab = 1 - 2 * ((states[:, None] >> np.arange(n_spins)[None, :]) & 1)
    h_all = -(spins_tab.prod(axis=1) * int(model.term_signs[0]))
    stride, n_samples = 10, 60000
    for i, t in enumerate((1.0, 2.0, 5.0)):
        probs = np.exp(-h_all / t)
        probs /= probs.sum()
        spins = np.ones(n_spins, dtype=np.int8)
        prods = term_products(model, spins)
        accept = np.exp(-2.0 * np.arange(model.max_incidence() + 1) / t)
        rng = kernels.seed_streams(np.uint64(seed + i), 1)
        counts = np.zeros(1 << n_spins, dtype=np.int64)
        kernels.sweep_histogram(
            spins, prods, model.spin_ptr, model.spin_terms, accept, rng,
            n_samples * stride, stride, counts,
        )
        stat, pvalue = chisquare(counts, probs * counts.sum())
        report["chi2"].append({"T": t, "chi2": float(stat), "p_value": float(pvalue)})
    report["chi2_ok"] = bool(all(c["p_value"] > 0.01 for c in report["chi2"]))

    cubic = build_cubic_complex(2)
    chain = to_chain_complex(cubic, ChainKind.RPIM)
    disorder = sample_disorder(chain, 0.0, seed)
    rpim = compile_model(chain, disorder, ModelKind.RPIM)
    ladder = build_ladder(0.9, 2.0, 6, "geometric")
    schedule = RunSchedule(tau=12, seed=seed, stride=1)
    record = run_pt(rpim, ladder, schedule)
    for k in range(ladder.n_rungs):
        series = record.series(k)
        t = series.T
        exact = exact_moments(rpim, 1.0 / t)
        e_err = block_error(series.blocks["e"])
        c_mc = specific_heat(series)
        c_exact = exact["e_var"] / (rpim.num_spins * t * t)
        c_blocks = (
            series.blocks["e2"] - series.blocks["e"] ** 2
        ) / (rpim.num_spins * t * t)
        c_err = block_error(c_blocks)
        report["rpim"].append(
            {
                "T": t,
                "e_mc": series.e_mean,
                "e_exact": exact["e_mean"],
                "e_sigma": float(abs(series.e_mean - exact["e_mean"]) / e_err),
                "c_mc": c_mc,
                "c_exact": c_exact,
                "c_sigma": float(abs(c_mc - c_exact) / c_err),
            }
        )
    report["rpim_ok"] = bool(
        all(r["e_sigma"] <= 3.0 and r["c_sigma"] <= 3.0 for r in report["rpim"])
    )
    report["ok"] = report["chi2_ok"] and report["rpim_ok"]
    return report


def lemma_suite(codes=None, p_grid=None, tol: float = 1e-12) -> dict:
    if codes is None:
        all_codes = toy_codes()
        codes = [all_codes["rep3"], all_codes["rep5"], all_codes["toric2"]]
    if p_grid is None:
        p_grid = [round(0.05 * i, 2) for i in range(1, 10)]  # 0.05 .. 0.45
    results = []
    for code in codes:
        for p in p_grid:
            rep = lemma_check(code, float(p), tol=tol)
            results.append(rep)
    return {"ok": all(r["all_hold"] for r in results), "n_checks": len(results), "results": results}
