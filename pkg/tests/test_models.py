import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcim.complexes import ChainKind, build_bcc_complex, build_cubic_complex, to_chain_complex
from rcim.models import (
    ColorPairFlip,
    EdgeStarFlip,
    ModelKind,
    VertexStarFlip,
    all_up,
    apply_symmetry,
    compile_model,
    delta_energy,
    energy,
    model_dump,
    model_load,
    sample_disorder,
    single_term_model,
)


@pytest.fixture(scope="module")
def x_chain():
    return to_chain_complex(build_bcc_complex(2), ChainKind.X_CORRECTION)


@pytest.fixture(scope="module")
def z_chain():
    return to_chain_complex(build_bcc_complex(2), ChainKind.Z_CORRECTION)


@pytest.fixture(scope="module")
def rpim_chain():
    return to_chain_complex(build_cubic_complex(2), ChainKind.RPIM)


def make(chain, kind, p=0.0, seed=1):
    return compile_model(chain, sample_disorder(chain, p, seed), kind)


class TestDisorder:
    def test_p_zero_is_clean(self, x_chain):
        assert not sample_disorder(x_chain, 0.0, 3).epsilon.any()

    def test_flip_fraction_matches_p(self):
        chain = to_chain_complex(build_bcc_complex(8), ChainKind.X_CORRECTION)
        dis = sample_disorder(chain, 0.27, seed=5)
        n = chain.n1
        assert n == 12 * 8**3
        frac = dis.epsilon.mean()
        sigma = np.sqrt(0.27 * 0.73 / n)
        assert abs(frac - 0.27) < 3 * sigma

    def test_seed_determinism(self, x_chain):
        a = sample_disorder(x_chain, 0.3, seed=11)
        b = sample_disorder(x_chain, 0.3, seed=11)
        assert np.array_equal(a.epsilon, b.epsilon)

    @pytest.mark.parametrize("p", [-0.1, 0.51, 1.0])
    def test_rejects_bad_p(self, x_chain, p):
        with pytest.raises(ValueError):
            sample_disorder(x_chain, p, 0)


class TestCompile:
    def test_four_body(self, x_chain):
        m = make(x_chain, ModelKind.FOUR_BODY_VERTEX)
        assert m.n_terms == 96
        assert m.arity == 4
        assert np.all(m.term_signs == 1)
        assert m.num_spins == 16

    def test_six_body(self, z_chain):
        m = make(z_chain, ModelKind.SIX_BODY_EDGE)
        assert m.n_terms == 96
        assert m.arity == 6
        assert m.num_spins == 112

    def test_rpim(self, rpim_chain):
        m = make(rpim_chain, ModelKind.RPIM)
        assert m.n_terms == 24
        assert m.arity == 4
        assert m.num_spins == 24

    def test_arity_mismatch_is_structural_error(self, x_chain):
        with pytest.raises(ValueError, match="arity"):
            make(x_chain, ModelKind.SIX_BODY_EDGE)

    def test_incidence_counts(self, x_chain, z_chain, rpim_chain):
        m4 = make(x_chain, ModelKind.FOUR_BODY_VERTEX)
        assert np.all(np.diff(m4.spin_ptr) == 24)
        m6 = make(z_chain, ModelKind.SIX_BODY_EDGE)
        assert set(np.diff(m6.spin_ptr).tolist()) == {4, 6}
        mr = make(rpim_chain, ModelKind.RPIM)
        assert np.all(np.diff(mr.spin_ptr) == 4)

    def test_signs_follow_disorder(self, x_chain):
        dis = sample_disorder(x_chain, 0.4, seed=2)
        m = compile_model(x_chain, dis, ModelKind.FOUR_BODY_VERTEX)
        assert np.array_equal(m.term_signs == -1, dis.epsilon == 1)


class TestEnergy:
    def test_all_up_ground_state(self, x_chain, rpim_chain):
        m = make(x_chain, ModelKind.FOUR_BODY_VERTEX)
        assert energy(m, all_up(m)) == -96
        mr = make(rpim_chain, ModelKind.RPIM)
        assert energy(mr, all_up(mr)) == -24

    def test_single_term_flip_parity(self):
        m = single_term_model(4)
        s = all_up(m)
        assert energy(m, s) == -1
        s[2] = -1
        assert energy(m, s) == 1

    def test_all_up_deltas(self, x_chain, rpim_chain):
        m = make(x_chain, ModelKind.FOUR_BODY_VERTEX)
        s = all_up(m)
        # every vertex sits in 24 satisfied terms, each flipping -1 -> +1
        assert all(delta_energy(m, s, i) == 48 for i in range(m.num_spins))
        mr = make(rpim_chain, ModelKind.RPIM)
        assert all(delta_energy(mr, all_up(mr), i) == 8 for i in range(mr.num_spins))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_delta_matches_full_recomputation(self, seed):
        chain = to_chain_complex(build_bcc_complex(2), ChainKind.Z_CORRECTION)
        m = compile_model(chain, sample_disorder(chain, 0.3, seed), ModelKind.SIX_BODY_EDGE)
        rng = np.random.default_rng(seed)
        s = np.where(rng.random(m.num_spins) < 0.5, -1, 1).astype(np.int8)
        i = int(rng.integers(m.num_spins))
        before = energy(m, s)
        expected_delta = delta_energy(m, s, i)
        s[i] = -s[i]
        assert energy(m, s) - before == expected_delta


class TestSymmetries:
    @pytest.mark.parametrize("pair", [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    def test_color_pair_flip_preserves_energy(self, x_chain, pair):
        m = make(x_chain, ModelKind.FOUR_BODY_VERTEX, p=0.4, seed=8)
        rng = np.random.default_rng(pair[0] * 7 + pair[1])
        s = np.where(rng.random(m.num_spins) < 0.5, -1, 1).astype(np.int8)
        s2 = apply_symmetry(m, s, ColorPairFlip(*pair))
        assert energy(m, s2) == energy(m, s)
        assert not np.array_equal(s2, s)

    def test_edge_star_flip_preserves_energy(self, z_chain):
        m = make(z_chain, ModelKind.SIX_BODY_EDGE, p=0.35, seed=9)
        geo = m.geometry
        rng = np.random.default_rng(10)
        for v in rng.choice(geo.n_vertices, size=6, replace=False):
            own = int(geo.colors[v])
            others = [c for c in range(4) if c != own]
            for colors in [(others[0], others[1]), (others[1], others[2])]:
                s = np.where(rng.random(m.num_spins) < 0.5, -1, 1).astype(np.int8)
                s2 = apply_symmetry(m, s, EdgeStarFlip(int(v), colors))
                assert energy(m, s2) == energy(m, s)

    def test_vertex_star_flip_preserves_energy(self, rpim_chain):
        m = make(rpim_chain, ModelKind.RPIM, p=0.4, seed=12)
        rng = np.random.default_rng(3)
        for v in range(8):
            s = np.where(rng.random(m.num_spins) < 0.5, -1, 1).astype(np.int8)
            s2 = apply_symmetry(m, s, VertexStarFlip(v))
            assert energy(m, s2) == energy(m, s)
            assert int(np.sum(s2 != s)) == 6

    def test_global_flip_invariance(self, x_chain, z_chain, rpim_chain):
        for chain, kind in [
            (x_chain, ModelKind.FOUR_BODY_VERTEX),
            (z_chain, ModelKind.SIX_BODY_EDGE),
            (rpim_chain, ModelKind.RPIM),
        ]:
            m = make(chain, kind, p=0.3, seed=4)
            rng = np.random.default_rng(5)
            s = np.where(rng.random(m.num_spins) < 0.5, -1, 1).astype(np.int8)
            assert energy(m, -s) == energy(m, s)

    def test_invalid_generators_rejected(self, x_chain, z_chain):
        m4 = make(x_chain, ModelKind.FOUR_BODY_VERTEX)
        with pytest.raises(ValueError):
            apply_symmetry(m4, all_up(m4), ColorPairFlip(1, 1))
        with pytest.raises(ValueError):
            apply_symmetry(m4, all_up(m4), VertexStarFlip(0))
        m6 = make(z_chain, ModelKind.SIX_BODY_EDGE)
        own = int(m6.geometry.colors[0])
        with pytest.raises(ValueError):
            apply_symmetry(m6, all_up(m6), EdgeStarFlip(0, (own, (own + 1) % 4)))


class TestDump:
    def test_round_trip(self, rpim_chain):
        m = make(rpim_chain, ModelKind.RPIM, p=0.25, seed=77)
        dump = model_dump(m)
        assert dump["arity_histogram"] == {"4": 24}
        m2 = model_load(dump)
        assert np.array_equal(m2.term_signs, m.term_signs)
        assert np.array_equal(m2.term_spins, m.term_spins)
