"""Lattice complexes: the 4-colorable tetrahedral bcc complex and the periodic
cubic complex, plus their GF(2) chain complexes.

The bcc complex is built from two interleaved cubic sublattices ("corner" and
"center"). All coordinates are doubled to integers so that corner vertices sit
at even points and center vertices at odd points; one cubic cell then has side
2 in doubled units. Every tetrahedron pairs a corner-sublattice cubic edge with
one of the four perpendicular center-sublattice cubic edges flanking it, plus
the four nearest-neighbor edges connecting them.

Per cell of linear size L this gives the closed-3-torus counts

    vertices 2L^3, edges 14L^3, triangles 24L^3, tetrahedra 12L^3,

every vertex lying in 24 tetrahedra and 14 edges.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp

COLOR_NAMES = ("R", "G", "B", "Y")
RED, GREEN, BLUE, YELLOW = 0, 1, 2, 3


class ChainKind(Enum):
    """Which statistical-mechanical role the chain complex plays."""

    X_CORRECTION = "x_correction"  # spins on vertices, 4-body tetrahedron terms
    Z_CORRECTION = "z_correction"  # spins on edges, 6-body tetrahedron terms
    RPIM = "rpim"  # spins on cubic-lattice edges, 4-body plaquette terms


class CsrLists:
    """Compact item -> members incidence (CSR-style index lists)."""

    __slots__ = ("ptr", "idx")

    def __init__(self, ptr: np.ndarray, idx: np.ndarray):
        self.ptr = ptr
        self.idx = idx

    def __len__(self) -> int:
        return len(self.ptr) - 1

    def __getitem__(self, i: int) -> np.ndarray:
        return self.idx[self.ptr[i] : self.ptr[i + 1]]

    def counts(self) -> np.ndarray:
        return np.diff(self.ptr)

    @classmethod
    def from_pairs(cls, items: np.ndarray, members: np.ndarray, n_items: int) -> "CsrLists":
        """Build from parallel (item, member) arrays; members sorted within each item."""
        order = np.lexsort((members, items))
        items = items[order]
        members = members[order]
        ptr = np.zeros(n_items + 1, dtype=np.int64)
        np.add.at(ptr, items + 1, 1)
        np.cumsum(ptr, out=ptr)
        return cls(ptr, members.astype(np.int32))


@dataclass(frozen=True)
class ColorComplex:
    """Tetrahedral bcc complex on a 3-torus with 4-colored vertices.

    Coordinates are doubled integers modulo 2L; the corner sublattice occupies
    even points, the center sublattice odd points. ``n_faces`` counts the
    triangular faces for validation only; triangles are not stored.
    """

    L: int
    coords: np.ndarray  # (2L^3, 3) int32, doubled coordinates
    colors: np.ndarray  # (2L^3,) uint8 indexing COLOR_NAMES
    edges: np.ndarray  # (14L^3, 2) int32 endpoint vertices (geometric 1-cells)
    tets: np.ndarray  # (12L^3, 4) int32 vertices ordered (P, Q, C0, C1)
    tet_edges: np.ndarray  # (12L^3, 6) int32 edge indices
    vertex_tets: CsrLists
    edge_tets: CsrLists
    n_faces: int
    corner_edge_index: np.ndarray  # (L^3, 3) edge index of corner edge (cell, axis)
    corner_cells: np.ndarray = field(repr=False, default=None)  # (L^3, 3) int32 cell coords

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_tets(self) -> int:
        return len(self.tets)

    def corner_index(self, a, b, c) -> np.ndarray:
        """Vertex index of the corner-sublattice vertex in cell (a, b, c)."""
        L = self.L
        return ((np.asarray(a) % L) * L + np.asarray(b) % L) * L + np.asarray(c) % L

    def summary(self) -> dict:
        """JSON-friendly counts, coloring histogram and incidence checksums."""
        hist = {COLOR_NAMES[k]: int(np.sum(self.colors == k)) for k in range(4)}
        return {
            "lattice": "bcc",
            "L": self.L,
            "counts": {
                "vertices": self.n_vertices,
                "edges": self.n_edges,
                "faces": self.n_faces,
                "tetrahedra": self.n_tets,
            },
            "euler_characteristic": self.n_vertices - self.n_edges + self.n_faces - self.n_tets,
            "colors": hist,
            "checksums": {
                "edges": _digest(self.edges),
                "tetrahedra": _digest(self.tets),
                "tet_edges": _digest(self.tet_edges),
            },
        }


@dataclass(frozen=True)
class CubicComplex:
    """Periodic simple-cubic complex: vertices, edges, square faces, cubes."""

    L: int
    coords: np.ndarray  # (L^3, 3) int32
    edges: np.ndarray  # (3L^3, 2) int32 vertex pairs, index = vertex*3 + axis
    faces: np.ndarray  # (3L^3, 4) int32 edge indices per face
    cubes: np.ndarray  # (L^3, 6) int32 face indices per cube
    edge_faces: CsrLists
    edge_index: np.ndarray  # (L^3, 3) edge index of (vertex, axis)

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def summary(self) -> dict:
        return {
            "lattice": "cubic",
            "L": self.L,
            "counts": {
                "vertices": self.n_vertices,
                "edges": self.n_edges,
                "faces": self.n_faces,
                "cubes": len(self.cubes),
            },
            "checksums": {
                "edges": _digest(self.edges),
                "faces": _digest(self.faces),
            },
        }


@dataclass(frozen=True)
class ChainComplex:
    """Two GF(2) boundary maps C2 -> C1 -> C0 with d1 @ d2 = 0.

    ``d2`` has shape (n1, n2): column i is the support, over interaction/qubit
    indices, of basis element i of C2. ``d1`` has shape (n0, n1). The source
    geometry is kept so downstream code can resolve symmetry generators and
    measurement tables.
    """

    kind: ChainKind
    n2: int
    n1: int
    n0: int
    d2: sp.csr_matrix  # (n1, n2) uint8
    d1: sp.csr_matrix  # (n0, n1) uint8
    geometry: object = field(repr=False, default=None)

    def d2_rows(self) -> CsrLists:
        """Row i of d2 = the C2 basis elements supporting interaction i."""
        m = self.d2.tocsr()
        return CsrLists(m.indptr.astype(np.int64), m.indices.astype(np.int32))

    def d2_dense(self) -> np.ndarray:
        return np.asarray(self.d2.todense(), dtype=np.uint8)

    def d1_dense(self) -> np.ndarray:
        return np.asarray(self.d1.todense(), dtype=np.uint8)

    def check_boundary_condition(self) -> bool:
        """True iff d1 @ d2 = 0 over GF(2)."""
        prod = (self.d1.astype(np.int64) @ self.d2.astype(np.int64)).toarray() % 2
        return not prod.any()


def _digest(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr, dtype=np.int64).tobytes()).hexdigest()[:16]


def build_bcc_complex(L: int) -> ColorComplex:
    """Construct the 4-colored tetrahedral bcc complex of linear size L.

    L must be even and >= 2: the alternating 2-coloring of each cubic
    sublattice only closes up on the torus for even L.

    Simplices are geometric cells of the torus, indexed deterministically:

    * edges: corner cubic edges (cell*3 + axis), then center cubic edges,
      then nearest-neighbor edges (cell*8 + offset-bits); at L=2 distinct
      geometric edges may share the same endpoint pair, which is why edges
      are not identified with vertex pairs.
    * tetrahedra: (corner edge)*4 + flank, where the four flanks are the
      center cubic edges perpendicular to and crossing the corner edge.
    """
    if not isinstance(L, (int, np.integer)) or L < 2:
        raise ValueError(f"L must be an integer >= 2, got {L!r}")
    if L % 2 != 0:
        raise ValueError(f"L must be even for a consistent 4-coloring on the torus, got {L}")
    L = int(L)
    n_cells = L**3

    # Cell coordinates in lexicographic (a, b, c) order; vertex index layout is
    # corners [0, L^3) then centers [L^3, 2L^3), each lex-ordered by cell.
    cells = np.stack(np.meshgrid(np.arange(L), np.arange(L), np.arange(L), indexing="ij"), axis=-1)
    cells = cells.reshape(-1, 3).astype(np.int32)
    coords = np.concatenate([2 * cells, 2 * cells + 1])

    parity = cells.sum(axis=1) % 2
    colors = np.concatenate(
        [np.where(parity == 0, RED, GREEN), np.where(parity == 0, BLUE, YELLOW)]
    ).astype(np.uint8)

    def cell_id(c):
        return ((c[..., 0] % L) * L + c[..., 1] % L) * L + c[..., 2] % L

    eye = np.eye(3, dtype=np.int32)
    vid = np.arange(n_cells, dtype=np.int32)

    def corner_edge(cell_ids, axis):
        return cell_ids.astype(np.int32) * 3 + axis

    def center_edge(cell_ids, axis):
        return 3 * n_cells + cell_ids.astype(np.int32) * 3 + axis

    def nn_edge(center_cells, delta):
        bits = delta[0] * 4 + delta[1] * 2 + delta[2]
        return 6 * n_cells + cell_id(center_cells).astype(np.int32) * 8 + bits

    edges = np.empty((14 * n_cells, 2), dtype=np.int32)
    for axis in range(3):
        nb = cell_id(cells + eye[axis]).astype(np.int32)
        edges[corner_edge(vid, axis), 0] = vid
        edges[corner_edge(vid, axis), 1] = nb
        edges[center_edge(vid, axis), 0] = vid + n_cells
        edges[center_edge(vid, axis), 1] = nb + n_cells
    for bits in range(8):
        delta = np.array([bits >> 2 & 1, bits >> 1 & 1, bits & 1], dtype=np.int32)
        nb = cell_id(cells + delta).astype(np.int32)
        rows = 6 * n_cells + vid * 8 + bits
        edges[rows, 0] = vid + n_cells
        edges[rows, 1] = nb

    # Tetrahedra: corner edge (P, Q) along mu crossed with each of the four
    # perpendicular center edges flanking it. Flank (moving nu, offset d) is
    # the center edge along nu based at cell - e_nu - (1-d) e_rho.
    n_tets = 12 * n_cells
    tets = np.empty((n_tets, 4), dtype=np.int32)
    tet_edges = np.empty((n_tets, 6), dtype=np.int32)
    for mu in range(3):
        nu1, nu2 = [ax for ax in range(3) if ax != mu]
        p_cells = cells
        q_cells = cells + eye[mu]
        flank = 0
        for moving, fixed in ((nu1, nu2), (nu2, nu1)):
            for d in (0, 1):
                rows = (vid * 3 + mu) * 4 + flank
                c0_cells = cells - eye[moving] - (1 - d) * eye[fixed]
                c1_cells = c0_cells + eye[moving]
                tets[rows, 0] = cell_id(p_cells)
                tets[rows, 1] = cell_id(q_cells)
                tets[rows, 2] = cell_id(c0_cells) + n_cells
                tets[rows, 3] = cell_id(c1_cells) + n_cells
                tet_edges[rows, 0] = corner_edge(vid, mu)
                tet_edges[rows, 1] = center_edge(cell_id(c0_cells), moving)
                # nn edges from each center endpoint to each corner endpoint;
                # the offsets are componentwise in {0,1} by construction.
                tet_edges[rows, 2] = nn_edge(c0_cells, _delta(p_cells, c0_cells))
                tet_edges[rows, 3] = nn_edge(c0_cells, _delta(q_cells, c0_cells))
                tet_edges[rows, 4] = nn_edge(c1_cells, _delta(p_cells, c1_cells))
                tet_edges[rows, 5] = nn_edge(c1_cells, _delta(q_cells, c1_cells))
                flank += 1

    vertex_tets = CsrLists.from_pairs(
        tets.reshape(-1).astype(np.int64),
        np.repeat(np.arange(n_tets, dtype=np.int32), 4),
        2 * n_cells,
    )
    edge_tets = CsrLists.from_pairs(
        tet_edges.reshape(-1).astype(np.int64),
        np.repeat(np.arange(n_tets, dtype=np.int32), 6),
        len(edges),
    )

    # Triangular faces are the (corner edge, flanking center) and (center edge,
    # flanking corner) pairs, 12 L^3 of each kind; counted for the Euler
    # characteristic, not stored.
    n_faces = 24 * n_cells

    corner_edge_index = (vid[:, None] * 3 + np.arange(3)[None, :]).astype(np.int32)

    return ColorComplex(
        L=L,
        coords=coords,
        colors=colors,
        edges=edges,
        tets=tets,
        tet_edges=tet_edges,
        vertex_tets=vertex_tets,
        edge_tets=edge_tets,
        n_faces=n_faces,
        corner_edge_index=corner_edge_index,
        corner_cells=cells,
    )


def _delta(to_cells: np.ndarray, from_cells: np.ndarray) -> np.ndarray:
    d = to_cells - from_cells
    if d.min() < 0 or d.max() > 1:
        raise AssertionError("nearest-neighbor offset outside {0,1}^3")  # pragma: no cover
    return d[0] if d.ndim > 1 else d


def build_cubic_complex(L: int) -> CubicComplex:
    """Construct the periodic simple-cubic complex of linear size L >= 2."""
    if not isinstance(L, (int, np.integer)) or L < 2:
        raise ValueError(f"L must be an integer >= 2, got {L!r}")
    L = int(L)
    n_cells = L**3
    cells = np.stack(np.meshgrid(np.arange(L), np.arange(L), np.arange(L), indexing="ij"), axis=-1)
    cells = cells.reshape(-1, 3).astype(np.int32)

    def cell_id(c):
        return ((c[..., 0] % L) * L + c[..., 1] % L) * L + c[..., 2] % L

    eye = np.eye(3, dtype=np.int32)
    vid = np.arange(n_cells, dtype=np.int32)

    # Edge index = vertex*3 + axis (deterministic (vertex, axis) lex order).
    edges = np.empty((3 * n_cells, 2), dtype=np.int32)
    edge_index = np.empty((n_cells, 3), dtype=np.int32)
    for axis in range(3):
        nb = cell_id(cells + eye[axis]).astype(np.int32)
        edges[axis::3, 0] = vid
        edges[axis::3, 1] = nb
        edge_index[:, axis] = vid * 3 + axis

    # Face index = vertex*3 + plane, planes ordered (xy, xz, yz); the face at
    # base v in plane (mu, nu) has edges (v,mu), (v+e_mu,nu), (v+e_nu,mu), (v,nu).
    planes = [(0, 1), (0, 2), (1, 2)]
    faces = np.empty((3 * n_cells, 4), dtype=np.int32)
    for p, (mu, nu) in enumerate(planes):
        vmu = cell_id(cells + eye[mu])
        vnu = cell_id(cells + eye[nu])
        faces[p::3, 0] = edge_index[:, mu]
        faces[p::3, 1] = edge_index[vmu, nu]
        faces[p::3, 2] = edge_index[vnu, mu]
        faces[p::3, 3] = edge_index[:, nu]

    # Cube at base v is bounded by the three faces based at v and the three
    # based at v + e_axis for the respective perpendicular planes.
    cubes = np.empty((n_cells, 6), dtype=np.int32)
    for p, (mu, nu) in enumerate(planes):
        other = 3 - mu - nu
        cubes[:, p] = vid * 3 + p
        cubes[:, 3 + p] = cell_id(cells + eye[other]).astype(np.int32) * 3 + p

    edge_faces = CsrLists.from_pairs(
        faces.reshape(-1).astype(np.int64),
        np.repeat(np.arange(len(faces), dtype=np.int32), 4),
        len(edges),
    )

    return CubicComplex(
        L=L,
        coords=cells,
        edges=edges,
        faces=faces,
        cubes=cubes,
        edge_faces=edge_faces,
        edge_index=edge_index,
    )


def _csr_from_lists(lists: CsrLists, shape: tuple[int, int], by_row: bool) -> sp.csr_matrix:
    """CSR matrix with ones at (item, member) or (member, item) positions."""
    n_items = len(lists)
    rows = np.repeat(np.arange(n_items, dtype=np.int64), lists.counts())
    cols = lists.idx.astype(np.int64)
    if not by_row:
        rows, cols = cols, rows
    data = np.ones(len(cols), dtype=np.uint8)
    return sp.csr_matrix((data, (rows, cols)), shape=shape, dtype=np.uint8)


def to_chain_complex(complex_obj, kind: ChainKind) -> ChainComplex:
    """Compile a lattice complex into the GF(2) chain complex for ``kind``.

    X_CORRECTION: C2 = vertices, C1 = tetrahedra, C0 = edges.
    Z_CORRECTION: C2 = edges, C1 = tetrahedra, C0 = vertices.
    RPIM: C2 = cubic edges, C1 = square faces, C0 = cubes.
    """
    if isinstance(complex_obj, ColorComplex):
        if kind == ChainKind.RPIM:
            raise ValueError("RPIM chain complex requires a CubicComplex")
        cc = complex_obj
        n_v, n_t, n_e = cc.n_vertices, cc.n_tets, cc.n_edges
        tet_vert = sp.csr_matrix(
            (
                np.ones(4 * n_t, dtype=np.uint8),
                (np.repeat(np.arange(n_t, dtype=np.int64), 4), cc.tets.reshape(-1).astype(np.int64)),
            ),
            shape=(n_t, n_v),
        )
        edge_tet = _csr_from_lists(cc.edge_tets, (n_e, n_t), by_row=True)
        tet_edge = sp.csr_matrix(
            (
                np.ones(6 * n_t, dtype=np.uint8),
                (
                    np.repeat(np.arange(n_t, dtype=np.int64), 6),
                    cc.tet_edges.reshape(-1).astype(np.int64),
                ),
            ),
            shape=(n_t, n_e),
        )
        if kind == ChainKind.X_CORRECTION:
            return ChainComplex(
                kind=kind, n2=n_v, n1=n_t, n0=n_e, d2=tet_vert, d1=edge_tet, geometry=cc
            )
        if kind == ChainKind.Z_CORRECTION:
            return ChainComplex(
                kind=kind, n2=n_e, n1=n_t, n0=n_v, d2=tet_edge, d1=tet_vert.T.tocsr(), geometry=cc
            )
        raise ValueError(f"unsupported kind {kind} for ColorComplex")

    if isinstance(complex_obj, CubicComplex):
        if kind != ChainKind.RPIM:
            raise ValueError(f"{kind} requires a ColorComplex")
        cu = complex_obj
        n_e, n_f, n_c = cu.n_edges, cu.n_faces, len(cu.cubes)
        face_edge = sp.csr_matrix(
            (
                np.ones(4 * n_f, dtype=np.uint8),
                (np.repeat(np.arange(n_f, dtype=np.int64), 4), cu.faces.reshape(-1).astype(np.int64)),
            ),
            shape=(n_f, n_e),
        )
        cube_face = sp.csr_matrix(
            (
                np.ones(6 * n_c, dtype=np.uint8),
                (np.repeat(np.arange(n_c, dtype=np.int64), 6), cu.cubes.reshape(-1).astype(np.int64)),
            ),
            shape=(n_c, n_f),
        )
        return ChainComplex(
            kind=kind, n2=n_e, n1=n_f, n0=n_c, d2=face_edge, d1=cube_face, geometry=cu
        )

    raise TypeError(f"unsupported complex type {type(complex_obj).__name__}")


def chain_complex_from_dense(d2: np.ndarray, d1: np.ndarray, kind: ChainKind | None = None) -> ChainComplex:
    """Wrap explicit dense GF(2) boundary matrices (for small test codes)."""
    d2 = np.asarray(d2, dtype=np.uint8) % 2
    d1 = np.asarray(d1, dtype=np.uint8) % 2
    n1, n2 = d2.shape
    n0 = d1.shape[0]
    if d1.shape[1] != n1:
        raise ValueError(f"d1 columns ({d1.shape[1]}) must match d2 rows ({n1})")
    chain = ChainComplex(
        kind=kind or ChainKind.X_CORRECTION,
        n2=n2,
        n1=n1,
        n0=n0,
        d2=sp.csr_matrix(d2),
        d1=sp.csr_matrix(d1),
    )
    if not chain.check_boundary_condition():
        raise ValueError("d1 @ d2 != 0 over GF(2)")
    return chain


def save_summary(complex_obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(complex_obj.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")
