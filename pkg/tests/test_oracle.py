import numpy as np
import pytest

from dpa.core import ModelParams, SeedGraph
from dpa.oracle import (
    DPTable,
    OracleResourceError,
    dp_D2,
    dp_E_in,
    dp_E_out,
    dp_EX,
    enumerate_exact,
    mix_binomial,
    tri_off,
    tri_size,
)
from dpa.theory import g_edge_density


PSTAR = ModelParams(0.25, 0.5, 0.25, 1.0, 1.0)
PDAG = ModelParams(0.2, 0.5, 0.3, 2.0, 1.0)
LOOP = SeedGraph(1, ((0, 0),))


class TestTrianglePacking:
    def test_offsets(self):
        assert tri_off(0) == 0
        assert tri_off(1) == 1
        assert tri_off(3) == 6
        assert tri_size(0) == 1
        assert tri_size(3) == 10

    def test_plane_and_at(self):
        tab = dp_E_in(PSTAR, LOOP, 5, 2)
        assert tab.plane(3).shape == (3, 4)
        with pytest.raises(IndexError):
            tab.plane(6)
        with pytest.raises(IndexError):
            tab.at(3, 4)


class TestExpectedDegreeCounts:
    def test_one_step_by_hand(self):
        # loop seed: a vertex step either points the newcomer at the
        # old vertex (degrees 2 and 0) or hangs a fresh target off it
        # (degrees 1 and 1); the edge-only step doubles the loop
        tab = dp_E_in(PSTAR, LOOP, 1, 3)
        assert tab.at(1, 1) == pytest.approx([0.5, 1.0, 0.5, 0.0], abs=1e-15)
        assert tab.at(1, 0) == pytest.approx([0.0, 0.0, 1.0, 0.0], abs=1e-15)

    @pytest.mark.parametrize("params", [PSTAR, PDAG])
    def test_matches_enumeration_conditionally(self, params):
        ex = enumerate_exact(params, None, 4)
        assert ex.total_probability() == pytest.approx(1.0, abs=1e-12)
        tab = dp_E_in(params, None, 4, 6)
        for N in range(5):
            if ex.prob_N(N) == 0.0:
                continue
            got = tab.at(4, N)
            for d in range(7):
                assert abs(got[d] - ex.e_n_in(d, N)) < 1e-12

    @pytest.mark.parametrize("params", [PSTAR, PDAG])
    def test_matches_enumeration_mixed(self, params):
        ex = enumerate_exact(params, None, 4)
        mixed = mix_binomial(dp_E_in(params, None, 4, 6))
        for d in range(7):
            assert abs(mixed[4][d] - ex.e_n_in(d)) < 1e-12

    def test_out_side_matches_enumeration(self):
        ex = enumerate_exact(PDAG, None, 4)
        tab = dp_E_out(PDAG, None, 4, 6)
        for N in range(5):
            if ex.prob_N(N) == 0.0:
                continue
            got = tab.at(4, N)
            for d in range(7):
                assert abs(got[d] - ex.e_n_out(d, N)) < 1e-12

    def test_conservation(self):
        # counts sum to the vertex total, degree-weighted counts to the
        # edge total, in every (T, N) cell
        tab = dp_E_in(PSTAR, LOOP, 30, 31)
        d = np.arange(32, dtype=np.float64)
        for T in (1, 7, 30):
            pl = tab.plane(T)
            N = np.arange(T + 1, dtype=np.float64)
            assert pl.sum(axis=0) == pytest.approx(1.0 + N, abs=1e-10)
            assert (d[:, None] * pl).sum(axis=0) == pytest.approx(
                np.full(T + 1, 1.0 + T), abs=1e-10
            )

    def test_role_swap_symmetry(self):
        # out-degrees of (alpha, gamma, d_in, d_out) follow the same law
        # as in-degrees with the roles exchanged; the loop seed is its
        # own reversal
        q = ModelParams(0.3, 0.2, 0.5, 0.7, 1.3)
        q_swapped = ModelParams(0.5, 0.2, 0.3, 1.3, 0.7)
        t1 = dp_E_out(q, LOOP, 12, 6).values
        t2 = dp_E_in(q_swapped, LOOP, 12, 6).values
        assert np.array_equal(t1, t2)

    def test_zero_offset_count_is_linear(self):
        # with delta_in = 0 a zero-in-degree vertex can never be hit,
        # so their count is exactly the number of source-adding steps
        pz = ModelParams(0.3, 0.4, 0.3, 0.0, 2.0)
        tab = dp_E_in(pz, None, 10, 3)
        for T in range(11):
            for N in range(T + 1):
                assert tab.at(T, N)[0] == pytest.approx(0.5 * N, abs=1e-12)


class TestPairCounts:
    @pytest.mark.parametrize("params", [PSTAR, PDAG])
    def test_matches_enumeration(self, params):
        ex = enumerate_exact(params, None, 4)
        tab = dp_D2(params, None, 4, 3, 3)
        for N in range(5):
            if ex.prob_N(N) == 0.0:
                continue
            got = tab.at(4, N)
            for d1 in range(4):
                for d2 in range(4):
                    assert abs(got[d1, d2] - ex.e_pair_in(d1, d2, N)) < 1e-12

    def test_variance_nonnegative(self):
        e_tab = dp_E_in(PSTAR, LOOP, 12, 5)
        d2_tab = dp_D2(PSTAR, LOOP, 12, 5, 5)
        for T in (6, 12):
            for N in range(T + 1):
                e = e_tab.at(T, N)
                d2 = d2_tab.at(T, N)
                for d in range(6):
                    var = d2[d, d] + e[d] - e[d] * e[d]
                    assert var >= -1e-12

    def test_symmetric_in_degrees(self):
        tab = dp_D2(PDAG, None, 8, 4, 4)
        pl = tab.plane(8)
        assert np.allclose(pl, np.swapaxes(pl, 0, 1), atol=1e-12)


class TestEdgeClassCounts:
    def test_seed_plane_counts_non_loop_edges(self):
        s2 = SeedGraph(2, ((0, 1),))
        tab = dp_EX(PSTAR, s2, 2, 3, 3)
        assert tab.at(0, 0)[1, 1] == 1.0
        assert tab.at(0, 0).sum() == 1.0
        # a loop seed contributes nothing
        assert dp_EX(PSTAR, LOOP, 2, 3, 3).at(0, 0).sum() == 0.0

    def test_truncation_gap_is_order_one(self):
        # the recurrence drops 1/T terms, so small-T values sit near
        # the exact ones but not on them
        ex = enumerate_exact(PSTAR, None, 4)
        tab = dp_EX(PSTAR, None, 4, 3, 3)
        gap = 0.0
        for N in range(5):
            if ex.prob_N(N) == 0.0:
                continue
            got = tab.at(4, N)
            for d1 in range(1, 4):
                for d2 in range(1, 4):
                    gap = max(gap, abs(got[d1, d2] - ex.e_x(d1, d2, N)))
        assert 0.1 < gap < 3.0

    def test_per_step_count_converges_to_edge_density(self):
        # the O(1) truncation error washes out of E_X / T like 1/T
        target = g_edge_density(0.5, 2, 2, PSTAR)
        errs = []
        for T in (250, 500, 1000):
            mixed = mix_binomial(dp_EX(PSTAR, None, T, 2, 2))
            errs.append(abs(mixed[T][2, 2] / T - target) / target)
        assert errs[1] < 0.6 * errs[0]
        assert errs[2] < 0.6 * errs[1]
        assert errs[2] < 5e-3


class TestMixing:
    def test_no_edge_only_steps_collapses_mixture(self):
        p = ModelParams(0.5, 0.0, 0.5, 1.0, 1.0)
        tab = dp_E_in(p, LOOP, 6, 4)
        mixed = mix_binomial(tab)
        for T in range(7):
            assert np.array_equal(mixed[T], tab.at(T, T))

    def test_mixed_mass_tracks_expected_vertices(self):
        tab = dp_E_in(PSTAR, LOOP, 20, 21)
        mixed = mix_binomial(tab)
        for T in (5, 20):
            assert mixed[T].sum() == pytest.approx(1.0 + 0.5 * T, rel=1e-12)


class TestGuards:
    def test_horizon_cap(self):
        with pytest.raises(OracleResourceError):
            dp_E_in(PSTAR, LOOP, 2001, 2)
        with pytest.raises(ValueError):
            dp_E_in(PSTAR, LOOP, -1, 2)

    def test_entry_budget(self):
        with pytest.raises(OracleResourceError):
            dp_EX(PSTAR, LOOP, 100, 100, 100)

    def test_enumeration_limits(self):
        with pytest.raises(ValueError):
            enumerate_exact(PSTAR, None, 7)
        with pytest.raises(ValueError):
            enumerate_exact(PSTAR, SeedGraph(4, ((0, 1),)), 4)
