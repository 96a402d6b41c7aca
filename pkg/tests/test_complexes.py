import json

import numpy as np
import pytest

from rcim.complexes import (
    ChainKind,
    build_bcc_complex,
    build_cubic_complex,
    chain_complex_from_dense,
    to_chain_complex,
)


@pytest.fixture(scope="module")
def bcc2():
    return build_bcc_complex(2)


@pytest.fixture(scope="module")
def bcc4():
    return build_bcc_complex(4)


class TestBccCounts:
    def test_l2_counts(self, bcc2):
        assert bcc2.n_vertices == 16
        assert bcc2.n_tets == 96
        assert bcc2.n_edges == 112
        assert bcc2.n_faces == 192

    def test_euler_characteristic_l2(self, bcc2):
        assert bcc2.n_vertices - bcc2.n_edges + bcc2.n_faces - bcc2.n_tets == 0

    @pytest.mark.parametrize("L", [2, 4, 6, 8])
    def test_count_identities(self, L):
        cc = build_bcc_complex(L)
        assert cc.n_vertices == 2 * L**3
        assert cc.n_edges == 14 * L**3
        assert cc.n_faces == 24 * L**3
        assert cc.n_tets == 12 * L**3

    def test_vertex_in_24_tets(self, bcc2, bcc4):
        for cc in (bcc2, bcc4):
            assert np.all(cc.vertex_tets.counts() == 24)

    def test_edge_tet_membership(self, bcc4):
        counts = bcc4.edge_tets.counts()
        # cubic-sublattice edges sit in 4 tetrahedra, nearest-neighbor in 6
        assert np.all(np.isin(counts, (4, 6)))
        assert int(np.sum(counts == 4)) == 6 * 4**3
        assert int(np.sum(counts == 6)) == 8 * 4**3


class TestColoring:
    @pytest.mark.parametrize("L", [2, 4])
    def test_every_tet_carries_four_colors(self, L):
        cc = build_bcc_complex(L)
        cols = np.sort(cc.colors[cc.tets], axis=1)
        assert np.array_equal(cols, np.tile([0, 1, 2, 3], (cc.n_tets, 1)))

    @pytest.mark.parametrize("L", [2, 4])
    def test_no_edge_joins_same_color(self, L):
        cc = build_bcc_complex(L)
        assert np.all(cc.colors[cc.edges[:, 0]] != cc.colors[cc.edges[:, 1]])

    def test_color_histogram_even_split(self, bcc4):
        hist = np.bincount(bcc4.colors, minlength=4)
        assert np.all(hist == bcc4.n_vertices // 4)


class TestTranslationInvariance:
    @staticmethod
    def _shift(cc, delta):
        L = cc.L
        cells = cc.coords // 2
        shifted = (cells + delta) % L
        flat = (shifted[:, 0] * L + shifted[:, 1]) * L + shifted[:, 2]
        return np.where(np.arange(cc.n_vertices) < L**3, flat, flat + L**3)

    def test_cell_shift_permutes_simplices(self, bcc4):
        cc = bcc4
        for delta in ([1, 0, 0], [0, 1, 0], [0, 0, 1]):
            sigma = self._shift(cc, np.array(delta))
            mapped = set(map(tuple, np.sort(sigma[cc.tets], axis=1)))
            orig = set(map(tuple, np.sort(cc.tets, axis=1)))
            assert mapped == orig
            mapped_e = set(map(tuple, np.sort(sigma[cc.edges], axis=1)))
            orig_e = set(map(tuple, np.sort(cc.edges, axis=1)))
            assert mapped_e == orig_e

    def test_two_cell_shift_preserves_colors(self, bcc4):
        # one-cell shifts swap the two colors inside each sublattice;
        # two-cell shifts preserve the parity and hence the coloring
        sigma = self._shift(bcc4, np.array([2, 0, 0]))
        assert np.array_equal(bcc4.colors[sigma], bcc4.colors)


class TestCubic:
    def test_l2_counts(self):
        cu = build_cubic_complex(2)
        assert (cu.n_vertices, cu.n_edges, cu.n_faces) == (8, 24, 24)

    def test_faces_have_four_edges(self):
        cu = build_cubic_complex(2)
        assert cu.faces.shape[1] == 4
        assert all(len(set(row)) == 4 for row in cu.faces)

    @pytest.mark.parametrize("L", [2, 3])
    def test_each_edge_in_four_faces(self, L):
        cu = build_cubic_complex(L)
        assert np.all(cu.edge_faces.counts() == 4)

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            build_cubic_complex(1)


class TestValidation:
    @pytest.mark.parametrize("L", [1, 3, 5, 0, -2])
    def test_bcc_rejects_odd_or_nonpositive(self, L):
        with pytest.raises(ValueError):
            build_bcc_complex(L)

    def test_bcc_rejects_non_integer(self):
        with pytest.raises(ValueError):
            build_bcc_complex(4.0)


class TestChainComplexes:
    @pytest.mark.parametrize("kind", [ChainKind.X_CORRECTION, ChainKind.Z_CORRECTION])
    @pytest.mark.parametrize("L", [2, 4])
    def test_boundary_condition_bcc(self, L, kind):
        chain = to_chain_complex(build_bcc_complex(L), kind)
        assert chain.check_boundary_condition()

    @pytest.mark.parametrize("L", [2, 3])
    def test_boundary_condition_rpim(self, L):
        chain = to_chain_complex(build_cubic_complex(L), ChainKind.RPIM)
        assert chain.check_boundary_condition()

    def test_x_correction_shapes_and_weights(self, bcc2):
        chain = to_chain_complex(bcc2, ChainKind.X_CORRECTION)
        assert (chain.n2, chain.n1, chain.n0) == (16, 96, 112)
        col_w2 = np.asarray(chain.d2.sum(axis=0)).ravel()
        assert np.all(col_w2 == 24)
        col_w1 = np.asarray(chain.d1.sum(axis=0)).ravel()
        assert np.all(col_w1 == 6)

    def test_z_correction_shapes_and_weights(self, bcc2):
        chain = to_chain_complex(bcc2, ChainKind.Z_CORRECTION)
        assert (chain.n2, chain.n1, chain.n0) == (112, 96, 16)
        col_w2 = np.asarray(chain.d2.sum(axis=0)).ravel()
        assert set(col_w2.tolist()) == {4, 6}
        assert np.all(np.asarray(chain.d1.sum(axis=0)).ravel() == 4)

    def test_rpim_chain(self):
        chain = to_chain_complex(build_cubic_complex(2), ChainKind.RPIM)
        assert (chain.n2, chain.n1, chain.n0) == (24, 24, 8)
        assert np.all(np.asarray(chain.d2.sum(axis=0)).ravel() == 4)

    def test_kind_complex_mismatch(self, bcc2):
        with pytest.raises(ValueError):
            to_chain_complex(bcc2, ChainKind.RPIM)
        with pytest.raises(ValueError):
            to_chain_complex(build_cubic_complex(2), ChainKind.X_CORRECTION)

    def test_from_dense_validates(self):
        with pytest.raises(ValueError):
            chain_complex_from_dense(np.array([[1], [0]]), np.array([[1, 0]]))


class TestSummaries:
    def test_bcc_summary_golden(self, bcc2, tmp_path):
        summary = bcc2.summary()
        assert summary["counts"] == {
            "vertices": 16,
            "edges": 112,
            "faces": 192,
            "tetrahedra": 96,
        }
        assert summary["euler_characteristic"] == 0
        assert summary["colors"] == {"R": 4, "G": 4, "B": 4, "Y": 4}
        # construction is deterministic: checksums are stable across builds
        again = build_bcc_complex(2).summary()
        assert summary == again
        path = tmp_path / "summary.json"
        with open(path, "w") as fh:
            json.dump(summary, fh)
        assert json.loads(path.read_text()) == summary

    def test_cubic_summary(self):
        s = build_cubic_complex(2).summary()
        assert s["counts"] == {"vertices": 8, "edges": 24, "faces": 24, "cubes": 8}
