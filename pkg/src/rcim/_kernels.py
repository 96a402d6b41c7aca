"""Numba kernels: Metropolis sweeps, replica exchange, measurements, and
exact state-space enumeration.

Every stochastic kernel draws from explicit per-stream xoshiro256+ states, so
trajectories depend only on the seeds and never on the numba thread count:
stream k belongs to temperature rung k, the last stream to swap decisions,
and parallel loops write only to their own rung's rows.

Spins and quenched couplings are int8 +-1; term products are cached per
configuration so a single-spin update touches only the incident terms, and
all energies are exact int64.
"""

from __future__ import annotations

import os

# This environment's TBB is too old for numba, which warns loudly; OpenMP
# behaves identically for our per-rung prange loops.
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

import numpy as np
from numba import njit, prange

_U64 = np.uint64
_INV53 = 1.0 / (1 << 53)


@njit(cache=True)
def seed_streams(seed: np.uint64, n_streams: int) -> np.ndarray:
    """Expand one seed into n xoshiro256+ states via splitmix64."""
    out = np.empty((n_streams, 4), dtype=np.uint64)
    x = _U64(seed)
    for i in range(n_streams):
        for j in range(4):
            x += _U64(0x9E3779B97F4A7C15)
            z = x
            z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
            out[i, j] = z ^ (z >> _U64(31))
    return out


@njit(inline="always")
def _next_u64(rng: np.ndarray, k: int) -> np.uint64:
    s0, s1, s2, s3 = rng[k, 0], rng[k, 1], rng[k, 2], rng[k, 3]
    result = s0 + s3
    t = s1 << _U64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = (s3 << _U64(45)) | (s3 >> _U64(19))
    rng[k, 0], rng[k, 1], rng[k, 2], rng[k, 3] = s0, s1, s2, s3
    return result


@njit(inline="always")
def _next_double(rng: np.ndarray, k: int) -> float:
    return float(_next_u64(rng, k) >> _U64(11)) * _INV53


@njit(cache=True)
def uniform_doubles(rng: np.ndarray, k: int, n: int) -> np.ndarray:
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        out[i] = _next_double(rng, k)
    return out


@njit(parallel=True, cache=True)
def pt_sweep(
    spins,  # (n_rows, n_spins) int8
    prods,  # (n_rows, n_terms) int8, sign_j * prod of term spins
    energies,  # (n_rows,) int64
    perm,  # (n_rungs,) int64: rung -> configuration row
    spin_ptr,  # (n_spins+1,) int64
    spin_terms,  # int32
    accept,  # (n_rungs, max_inc+1) float64: exp(-2 d / T_k)
    rng,  # (>= n_rungs, 4) uint64
):
    """One scan-order Metropolis sweep of every rung."""
    n_rungs = len(perm)
    n_spins = spins.shape[1]
    for k in prange(n_rungs):
        row = perm[k]
        for i in range(n_spins):
            d = 0
            for a in range(spin_ptr[i], spin_ptr[i + 1]):
                d += prods[row, spin_terms[a]]
            if d > 0 and _next_double(rng, k) >= accept[k, d]:
                continue
            spins[row, i] = -spins[row, i]
            for a in range(spin_ptr[i], spin_ptr[i + 1]):
                j = spin_terms[a]
                prods[row, j] = -prods[row, j]
            energies[row] += 2 * d


@njit(cache=True)
def swap_round(energies, perm, betas, rng, parity, attempts, accepts):
    """Attempt swaps of adjacent pairs (k, k+1) with k = parity mod 2.

    Acceptance follows exp((E_k - E_{k+1}) (1/T_k - 1/T_{k+1})), capped at 1;
    decisions come from the dedicated stream after the rung streams.
    """
    n = len(betas)
    for k in range(parity, n - 1, 2):
        e_lo = energies[perm[k]]
        e_hi = energies[perm[k + 1]]
        x = float(e_lo - e_hi) * (betas[k] - betas[k + 1])
        attempts[k] += 1
        if x >= 0.0 or _next_double(rng, n) < np.exp(x):
            tmp = perm[k]
            perm[k] = perm[k + 1]
            perm[k + 1] = tmp
            accepts[k] += 1


@njit(parallel=True, cache=True)
def measure_sublattice(spins, perm, idx, cosk, sink, out_m0sq, out_mksq):
    """|sum_u s_u|^2 at k=0 and at the measurement wavevector, per rung."""
    n_rungs = len(perm)
    for k in prange(n_rungs):
        row = perm[k]
        m0 = 0
        mc = 0.0
        ms = 0.0
        for t in range(len(idx)):
            s = spins[row, idx[t]]
            m0 += s
            mc += s * cosk[t]
            ms += s * sink[t]
        out_m0sq[k] = float(m0) * float(m0)
        out_mksq[k] = mc * mc + ms * ms


@njit(parallel=True, cache=True)
def measure_loops(spins, perm, loops, out_mean):
    """Mean product of spins over a family of equal-length loops, per rung."""
    n_rungs = len(perm)
    n_loops, loop_len = loops.shape
    for k in prange(n_rungs):
        row = perm[k]
        total = 0
        for q in range(n_loops):
            p = 1
            for a in range(loop_len):
                p *= spins[row, loops[q, a]]
            total += p
        out_mean[k] = total / n_loops


@njit(cache=True)
def sweep_histogram(
    spins, prods, spin_ptr, spin_terms, accept_row, rng, n_sweeps, stride, counts
):
    """Single-replica sweeps accumulating a visited-state histogram.

    ``counts`` has length 2**n_spins; state id bit i set iff spin i is -1.
    """
    n_spins = len(spins)
    for sweep in range(n_sweeps):
        for i in range(n_spins):
            d = 0
            for a in range(spin_ptr[i], spin_ptr[i + 1]):
                d += prods[spin_terms[a]]
            if d > 0 and _next_double(rng, 0) >= accept_row[d]:
                continue
            spins[i] = -spins[i]
            for a in range(spin_ptr[i], spin_ptr[i + 1]):
                j = spin_terms[a]
                prods[j] = -prods[j]
        if (sweep + 1) % stride == 0:
            sid = 0
            for i in range(n_spins):
                if spins[i] < 0:
                    sid |= 1 << i
            counts[sid] += 1


@njit(cache=True)
def density_of_states(term_signs, spin_ptr, spin_terms, num_spins):
    """Exact degeneracy g(E) by Gray-code enumeration of all 2**num_spins states.

    Returns counts indexed by E + n_terms (energies are integers in
    [-n_terms, n_terms]).
    """
    n_terms = len(term_signs)
    prods = term_signs.copy()
    e = np.int64(0)
    for j in range(n_terms):
        e -= prods[j]
    g = np.zeros(2 * n_terms + 1, dtype=np.int64)
    g[e + n_terms] += 1
    total = np.int64(1) << num_spins
    for step in range(1, total):
        i = 0
        while (step >> i) & 1 == 0:
            i += 1
        s = np.int64(0)
        for a in range(spin_ptr[i], spin_ptr[i + 1]):
            j = spin_terms[a]
            prods[j] = -prods[j]
            s += prods[j]
        e -= 2 * s
        g[e + n_terms] += 1
    return g


@njit(cache=True)
def coset_weight_counts(col_ptr, col_idx, eps):
    """Exact counts of |eps + d2 w| over all w in C2, by Gray code.

    ``col_ptr``/``col_idx`` is the CSR of d2 columns (C2 element -> supported
    interaction indices). Returns counts indexed by Hamming weight.
    """
    n1 = len(eps)
    n2 = len(col_ptr) - 1
    cur = eps.copy()
    w = np.int64(0)
    for j in range(n1):
        w += cur[j]
    counts = np.zeros(n1 + 1, dtype=np.int64)
    counts[w] += 1
    total = np.int64(1) << n2
    for step in range(1, total):
        i = 0
        while (step >> i) & 1 == 0:
            i += 1
        for a in range(col_ptr[i], col_ptr[i + 1]):
            j = col_idx[a]
            if cur[j] == 1:
                cur[j] = 0
                w -= 1
            else:
                cur[j] = 1
                w += 1
        counts[w] += 1
    return counts
