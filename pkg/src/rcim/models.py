"""Coupling models: chain complex + quenched disorder -> interaction tables.

A compiled model is a list of fixed-arity terms (spin index tuples) with
quenched signs; the energy of a spin configuration is

    H = - sum_j sign_j * prod_{i in term j} s_i,

an exact integer for +-1 spins. The same compiler serves the 4-body vertex
model, the 6-body edge model and the plaquette gauge model, which differ only
in which chain complex they are compiled from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .complexes import (
    COLOR_NAMES,
    ChainComplex,
    ChainKind,
    ColorComplex,
    CubicComplex,
)


class ModelKind(Enum):
    FOUR_BODY_VERTEX = "four_body_vertex"
    SIX_BODY_EDGE = "six_body_edge"
    RPIM = "rpim"
    GENERIC = "generic"  # explicit term lists (toy/oracle systems)


ARITY = {ModelKind.FOUR_BODY_VERTEX: 4, ModelKind.SIX_BODY_EDGE: 6, ModelKind.RPIM: 4}

CHAIN_FOR_KIND = {
    ModelKind.FOUR_BODY_VERTEX: ChainKind.X_CORRECTION,
    ModelKind.SIX_BODY_EDGE: ChainKind.Z_CORRECTION,
    ModelKind.RPIM: ChainKind.RPIM,
}


@dataclass(frozen=True)
class DisorderConfig:
    """Quenched disorder: one bit per interaction term, flip probability p."""

    epsilon: np.ndarray  # (n_terms,) uint8
    p: float
    seed: int | None

    def __post_init__(self):
        if not 0.0 <= self.p <= 0.5:
            raise ValueError(f"disorder strength p must lie in [0, 0.5], got {self.p}")


@dataclass(frozen=True)
class CouplingModel:
    """Compiled interaction table with quenched signs.

    ``term_spins[j]`` lists the spins coupled by term j (fixed arity per
    kind); ``term_signs[j] = (-1)**epsilon_j``. ``spin_ptr``/``spin_terms``
    is the CSR reverse index from a spin to the terms containing it.
    """

    kind: ModelKind
    num_spins: int
    term_spins: np.ndarray  # (n_terms, arity) int32
    term_signs: np.ndarray  # (n_terms,) int8
    spin_ptr: np.ndarray  # (num_spins + 1,) int64
    spin_terms: np.ndarray  # int32
    disorder: DisorderConfig | None = None
    chain: ChainComplex | None = field(repr=False, default=None)

    @property
    def n_terms(self) -> int:
        return len(self.term_spins)

    @property
    def arity(self) -> int:
        return self.term_spins.shape[1]

    @property
    def geometry(self):
        return self.chain.geometry if self.chain is not None else None

    def max_incidence(self) -> int:
        return int(np.diff(self.spin_ptr).max())


def sample_disorder(chain: ChainComplex, p: float, seed: int | None = None) -> DisorderConfig:
    """Draw i.i.d. term-flip bits with probability p, reproducibly from seed."""
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"disorder strength p must lie in [0, 0.5], got {p}")
    rng = np.random.default_rng(seed)
    eps = (rng.random(chain.n1) < p).astype(np.uint8)
    return DisorderConfig(epsilon=eps, p=float(p), seed=seed)


def _reverse_index(term_spins: np.ndarray, num_spins: int) -> tuple[np.ndarray, np.ndarray]:
    n_terms, arity = term_spins.shape
    spins = term_spins.reshape(-1).astype(np.int64)
    terms = np.repeat(np.arange(n_terms, dtype=np.int32), arity)
    order = np.lexsort((terms, spins))
    ptr = np.zeros(num_spins + 1, dtype=np.int64)
    np.add.at(ptr, spins + 1, 1)
    np.cumsum(ptr, out=ptr)
    return ptr, terms[order]


def compile_model(chain: ChainComplex, disorder: DisorderConfig, kind: ModelKind) -> CouplingModel:
    """Compile the chain complex and a disorder sample into a coupling table.

    Term j couples exactly the C2 basis elements i with [d2 i]_j = 1; its sign
    is (-1)**epsilon_j. The declared kind is checked against the arity the
    chain actually produces, which catches a transposed chain orientation.
    """
    if len(disorder.epsilon) != chain.n1:
        raise ValueError(
            f"disorder length {len(disorder.epsilon)} does not match n1={chain.n1}"
        )
    rows = chain.d2_rows()
    arity = ARITY[kind]
    counts = rows.counts()
    if not np.all(counts == arity):
        bad = np.unique(counts)
        raise ValueError(
            f"{kind.value} expects arity-{arity} terms, chain produced arities {bad.tolist()}"
        )
    term_spins = rows.idx.reshape(chain.n1, arity).astype(np.int32)
    term_signs = np.where(disorder.epsilon == 0, 1, -1).astype(np.int8)
    ptr, terms = _reverse_index(term_spins, chain.n2)
    return CouplingModel(
        kind=kind,
        num_spins=chain.n2,
        term_spins=term_spins,
        term_signs=term_signs,
        spin_ptr=ptr,
        spin_terms=terms,
        disorder=disorder,
        chain=chain,
    )


def model_from_terms(term_spins, term_signs, num_spins: int, kind: ModelKind) -> CouplingModel:
    """Build a standalone model from explicit terms (small test systems)."""
    term_spins = np.atleast_2d(np.asarray(term_spins, dtype=np.int32))
    term_signs = np.asarray(term_signs, dtype=np.int8)
    if len(term_signs) != len(term_spins):
        raise ValueError("one sign per term required")
    if term_spins.size and (term_spins.min() < 0 or term_spins.max() >= num_spins):
        raise ValueError("term spin index out of range")
    ptr, terms = _reverse_index(term_spins, num_spins)
    return CouplingModel(
        kind=kind,
        num_spins=num_spins,
        term_spins=term_spins,
        term_signs=term_signs,
        spin_ptr=ptr,
        spin_terms=terms,
    )


def single_term_model(arity: int = 4, sign: int = 1) -> CouplingModel:
    kind = ModelKind.SIX_BODY_EDGE if arity == 6 else ModelKind.FOUR_BODY_VERTEX
    return model_from_terms([list(range(arity))], [sign], arity, kind)


def all_up(model: CouplingModel) -> np.ndarray:
    return np.ones(model.num_spins, dtype=np.int8)


def term_products(model: CouplingModel, state: np.ndarray) -> np.ndarray:
    """sign_j * prod of spins in each term, as int8."""
    state = np.asarray(state, dtype=np.int64)
    prods = state[model.term_spins].prod(axis=1) * model.term_signs
    return prods.astype(np.int8)


def energy(model: CouplingModel, state: np.ndarray) -> int:
    """H = -sum_j sign_j prod_{i in j} s_i (exact integer)."""
    if len(state) != model.num_spins:
        raise ValueError(f"state length {len(state)} != num_spins {model.num_spins}")
    return int(-term_products(model, state).sum())

def delta_energy(model: CouplingModel, state: np.ndarray, spin_index: int) -> int:
    """Energy change of flipping one spin, from its incident terms only."""
    lo, hi = model.spin_ptr[spin_index], model.spin_ptr[spin_index + 1]
    incident = model.spin_terms[lo:hi]
    state = np.asarray(state, dtype=np.int64)
    prods = state[model.term_spins[incident]].prod(axis=1) * model.term_signs[incident]
    return int(2 * prods.sum())


# --- symmetry generators ----------------------------------------------------


@dataclass(frozen=True)
class ColorPairFlip:
    """Flip all vertex spins of two color classes (4-body global symmetry)."""

    color_a: int
    color_b: int


@dataclass(frozen=True)
class EdgeStarFlip:
    """Flip the edge spins from one vertex to its neighbors of two given
    colors (6-body local gauge symmetry)."""

    vertex: int
    colors: tuple[int, int]


@dataclass(frozen=True)
class VertexStarFlip:
    """Flip all edge spins incident on one cubic-lattice vertex (gauge
    symmetry of the plaquette model)."""

    vertex: int


def generator_spin_indices(model: CouplingModel, generator) -> np.ndarray:
    """Resolve a symmetry generator to the spin indices it flips."""
    geo = model.geometry
    if geo is None:
        raise ValueError("model has no source geometry; cannot resolve generators")

    if isinstance(generator, ColorPairFlip):
        if model.kind != ModelKind.FOUR_BODY_VERTEX:
            raise ValueError("color-pair flips apply to the 4-body vertex model")
        a, b = generator.color_a, generator.color_b
        if a == b or not (0 <= a < 4 and 0 <= b < 4):
            raise ValueError(f"need two distinct colors, got {a}, {b}")
        return np.flatnonzero((geo.colors == a) | (geo.colors == b)).astype(np.int32)

    if isinstance(generator, EdgeStarFlip):
        if model.kind != ModelKind.SIX_BODY_EDGE:
            raise ValueError("edge-star flips apply to the 6-body edge model")
        v = generator.vertex
        ca, cb = generator.colors
        own = int(geo.colors[v])
        if ca == cb or own in (ca, cb):
            raise ValueError(
                f"colors must be two distinct colors other than the vertex's own "
                f"({COLOR_NAMES[own]})"
            )
        at_v = np.flatnonzero((geo.edges[:, 0] == v) | (geo.edges[:, 1] == v))
        other = np.where(geo.edges[at_v, 0] == v, geo.edges[at_v, 1], geo.edges[at_v, 0])
        keep = np.isin(geo.colors[other], (ca, cb))
        return at_v[keep].astype(np.int32)

    if isinstance(generator, VertexStarFlip):
        if model.kind != ModelKind.RPIM:
            raise ValueError("vertex-star flips apply to the plaquette model")
        if not isinstance(geo, CubicComplex):
            raise ValueError("plaquette model requires cubic geometry")
        v = generator.vertex
        at_v = np.flatnonzero((geo.edges[:, 0] == v) | (geo.edges[:, 1] == v))
        return at_v.astype(np.int32)

    raise TypeError(f"unknown generator {type(generator).__name__}")


def apply_symmetry(model: CouplingModel, state: np.ndarray, generator) -> np.ndarray:
    """Return the state with the generator's spins flipped; energy-invariant."""
    idx = generator_spin_indices(model, generator)
    out = np.array(state, dtype=np.int8, copy=True)
    out[idx] = -out[idx]
    return out


# --- serialization ----------------------------------------------------------


def model_dump(model: CouplingModel) -> dict:
    """JSON description sufficient to rebuild the model bit-exactly."""
    dump = {
        "schema": 1,
        "kind": model.kind.value,
        "num_spins": int(model.num_spins),
        "n_terms": int(model.n_terms),
        "arity_histogram": {str(model.arity): int(model.n_terms)} if model.n_terms else {},
    }
    if model.disorder is not None:
        dump["disorder"] = {"p": model.disorder.p, "seed": model.disorder.seed}
    geo = model.geometry
    if isinstance(geo, ColorComplex):
        dump["lattice"] = {"type": "bcc", "L": geo.L}
    elif isinstance(geo, CubicComplex):
        dump["lattice"] = {"type": "cubic", "L": geo.L}
    return dump


def model_load(dump: dict) -> CouplingModel:
    """Rebuild a lattice-backed model from ``model_dump`` output."""
    from .complexes import build_bcc_complex, build_cubic_complex, to_chain_complex

    if dump.get("schema") != 1:
        raise ValueError(f"unsupported model dump schema {dump.get('schema')!r}")
    kind = ModelKind(dump["kind"])
    lat = dump.get("lattice")
    if lat is None:
        raise ValueError("dump does not describe a lattice-backed model")
    if lat["type"] == "bcc":
        geo = build_bcc_complex(lat["L"])
    elif lat["type"] == "cubic":
        geo = build_cubic_complex(lat["L"])
    else:
        raise ValueError(f"unknown lattice type {lat['type']!r}")
    chain = to_chain_complex(geo, CHAIN_FOR_KIND[kind])
    dis = sample_disorder(chain, dump["disorder"]["p"], dump["disorder"]["seed"])
    model = compile_model(chain, dis, kind)
    if model.num_spins != dump["num_spins"] or model.n_terms != dump["n_terms"]:
        raise ValueError("rebuilt model does not match dump")
    return model
