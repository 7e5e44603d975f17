"""Stochastic simulator: seeding, single-step semantics, ensembles."""
import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from netspread.graphs import Graph, gen_binomial, gen_lattice4, gen_powerlaw
from netspread.meanfield import LinkProbs, NodeParams
from netspread.montecarlo import (
    DEAD,
    HAS_INFO,
    NO_INFO,
    STATE_NAMES,
    WARNED,
    EnsembleResult,
    initial_states,
    mc_ensemble,
    mc_run,
    mc_step,
    mix_seed,
)

from oracles import bfs_ball, splitmix_finalizer


def pair_params(**overrides) -> NodeParams:
    base = dict(r=np.ones(2), delta=np.zeros(2), gamma=np.zeros(2),
                nu=np.ones(2), chi=np.zeros(2))
    base.update({k: np.full(2, float(v)) for k, v in overrides.items()})
    return NodeParams(**base)


class TestSeeding:
    def test_state_codes_are_stable(self):
        assert (NO_INFO, HAS_INFO, WARNED, DEAD) == (0, 1, 2, 3)
        assert STATE_NAMES == ("no_info", "has_info", "warned", "dead")

    def test_mix_seed_matches_reference_finalizer(self):
        for master, k in [(0, 0), (42, 0), (42, 1), (2**64 - 1, 5), (7, 123)]:
            assert mix_seed(master, k) == splitmix_finalizer(master ^ k)

    def test_mix_seed_frozen_vectors(self):
        assert mix_seed(0, 0) == 0
        assert mix_seed(42, 0) == 12058926934050108962
        assert mix_seed(42, 1) == 5695472266747893962
        assert mix_seed(2**64 - 1, 5) == 10663088712343502407

    def test_mix_seed_decorrelates_consecutive_runs(self):
        outs = {mix_seed(42, k) for k in range(1000)}
        assert len(outs) == 1000

    def test_initial_states_exact_count(self):
        rng = np.random.default_rng(0)
        states = initial_states(50, 0.2, rng)
        assert states.shape == (50,)
        assert int(np.sum(states == HAS_INFO)) == 10
        assert int(np.sum(states == NO_INFO)) == 40

    def test_initial_states_rounds_to_nearest(self):
        rng = np.random.default_rng(1)
        assert int(np.sum(initial_states(10, 0.26, rng) == HAS_INFO)) == 3
        assert int(np.sum(initial_states(10, 0.0, rng) == HAS_INFO)) == 0
        assert int(np.sum(initial_states(10, 1.0, rng) == HAS_INFO)) == 10


class TestStepSemantics:
    def test_deterministic_flood_is_bfs_ball(self):
        g = gen_powerlaw(60, 2, 9)
        params = NodeParams.homogeneous(60, r=1.0, delta=0.0, gamma=0.0)
        links = LinkProbs.homogeneous(g, 1.0)
        rng = np.random.default_rng(3)
        states = np.full(60, NO_INFO, dtype=np.int64)
        states[0] = HAS_INFO
        for t in range(1, 4):
            states = mc_step(states, g, links, params, rng)
            got = set(np.flatnonzero(states == HAS_INFO).tolist())
            assert got == bfs_ball(g, 0, t)

    def test_no_transmission_without_carriers(self):
        g = gen_binomial(20, 0.3, 4)
        params = NodeParams.homogeneous(20, r=1.0, delta=0.0, gamma=0.0)
        states = np.full(20, NO_INFO, dtype=np.int64)
        nxt = mc_step(states, g, LinkProbs.homogeneous(g, 1.0), params,
                      np.random.default_rng(0))
        assert np.all(nxt == NO_INFO)

    def test_death_overrides_receipt(self):
        # The receiver dies in the same step it would have accepted the info.
        g = Graph.from_edges(2, [(0, 1)])
        params = pair_params(delta=1.0)
        nxt = mc_step(np.array([HAS_INFO, NO_INFO]), g,
                      LinkProbs.homogeneous(g, 1.0), params,
                      np.random.default_rng(0))
        assert nxt.tolist() == [DEAD, DEAD]

    def test_resurrection_returns_to_no_info(self):
        g = Graph.from_edges(2, [(0, 1)])
        params = pair_params(gamma=1.0)
        nxt = mc_step(np.array([DEAD, DEAD]), g, LinkProbs.homogeneous(g, 1.0),
                      params, np.random.default_rng(0))
        assert nxt.tolist() == [NO_INFO, NO_INFO]

    def test_refusal_enters_warned_and_sticks_without_reversion(self):
        g = Graph.from_edges(2, [(0, 1)])
        params = pair_params(nu=0.0, chi=0.0)
        links = LinkProbs.homogeneous(g, 1.0)
        rng = np.random.default_rng(0)
        s1 = mc_step(np.array([HAS_INFO, NO_INFO]), g, links, params, rng)
        assert s1.tolist() == [HAS_INFO, WARNED]
        s2 = mc_step(s1, g, links, params, rng)
        assert s2.tolist() == [HAS_INFO, WARNED]

    def test_full_reversion_rate_clears_warned(self):
        g = Graph.from_edges(2, [(0, 1)])
        params = pair_params(nu=0.0, chi=1.0)
        links = LinkProbs.homogeneous(g, 1.0)
        rng = np.random.default_rng(0)
        s1 = mc_step(np.array([HAS_INFO, NO_INFO]), g, links, params, rng)
        assert s1.tolist() == [HAS_INFO, WARNED]
        s2 = mc_step(s1, g, links, params, rng)
        assert s2.tolist() == [HAS_INFO, NO_INFO]

    def test_warned_nodes_never_accept(self):
        g = Graph.from_edges(2, [(0, 1)])
        params = pair_params(nu=1.0, chi=0.0)
        nxt = mc_step(np.array([HAS_INFO, WARNED]), g,
                      LinkProbs.homogeneous(g, 1.0), params,
                      np.random.default_rng(0))
        assert nxt.tolist() == [HAS_INFO, WARNED]

    def test_zero_link_probability_blocks_spread(self):
        g = gen_binomial(15, 0.4, 2)
        params = NodeParams.homogeneous(15, r=1.0, delta=0.0, gamma=0.0)
        states = np.full(15, NO_INFO, dtype=np.int64)
        states[0] = HAS_INFO
        nxt = mc_step(states, g, LinkProbs.homogeneous(g, 0.0), params,
                      np.random.default_rng(5))
        assert np.sum(nxt == HAS_INFO) == 1

    def test_silent_carriers_do_not_spread(self):
        g = gen_binomial(15, 0.4, 2)
        params = NodeParams.homogeneous(15, r=0.0, delta=0.0, gamma=0.0)
        states = np.full(15, NO_INFO, dtype=np.int64)
        states[0] = HAS_INFO
        nxt = mc_step(states, g, LinkProbs.homogeneous(g, 1.0), params,
                      np.random.default_rng(5))
        assert np.sum(nxt == HAS_INFO) == 1


class TestRuns:
    def test_trajectory_shape_and_simplex(self):
        g = gen_lattice4(5, 5)
        params = NodeParams.homogeneous(25, r=1.0, delta=0.2, gamma=0.1)
        traj = mc_run(g, LinkProbs.homogeneous(g, 0.3), params,
                      init=0.2, steps=40, seed=11)
        assert traj.shape == (41, 4)
        assert np.all(traj >= 0.0) and np.all(traj <= 1.0)
        assert np.allclose(traj.sum(axis=1), 1.0, rtol=0.0, atol=1e-12)
        assert traj[0, HAS_INFO] == pytest.approx(0.2, abs=1e-12)
        assert traj[0, WARNED] == 0.0 and traj[0, DEAD] == 0.0

    def test_same_seed_reproduces_exactly(self):
        g = gen_binomial(40, 0.1, 8)
        params = NodeParams.homogeneous(40, r=1.0, delta=0.1, gamma=0.05)
        links = LinkProbs.homogeneous(g, 0.3)
        a = mc_run(g, links, params, init=0.1, steps=30, seed=77)
        b = mc_run(g, links, params, init=0.1, steps=30, seed=77)
        assert np.array_equal(a, b)
        c = mc_run(g, links, params, init=0.1, steps=30, seed=78)
        assert not np.array_equal(a, c)

    def test_subcritical_lattice_always_dies_out(self):
        # Survivability score 0.855 < 1: every run hits zero carriers.
        g = gen_lattice4(5, 5)
        params = NodeParams.homogeneous(25, r=1.0, delta=0.65, gamma=0.3)
        links = LinkProbs.homogeneous(g, 0.4)
        for k in range(200):
            traj = mc_run(g, links, params, init=0.2, steps=60, seed=1000 + k)
            assert traj[-1, HAS_INFO] == 0.0


class TestEnsembles:
    def make(self, seed=7, runs=50):
        g = gen_lattice4(5, 5)
        params = NodeParams.homogeneous(25, r=1.0, delta=0.65, gamma=0.3)
        links = LinkProbs.homogeneous(g, 0.4)
        return mc_ensemble(g, links, params, init=0.2, steps=30,
                           runs=runs, seed=seed)

    def test_frozen_ensemble_row(self):
        ens = self.make()
        assert ens.runs == 50 and ens.seed == 7
        assert ens.mean.shape == (31, 4) and ens.std.shape == (31, 4)
        assert np.allclose(
            ens.mean[5], [0.3304, 0.0032, 0.0, 0.6664], rtol=0.0, atol=1e-12)
        assert ens.mean[:, HAS_INFO].sum() == pytest.approx(0.456, abs=1e-12)

    def test_initial_row_has_zero_spread(self):
        ens = self.make()
        assert ens.mean[0, HAS_INFO] == pytest.approx(0.2, abs=1e-12)
        assert np.all(ens.std[0] <= 1e-15)

    def test_ensemble_deterministic_in_master_seed(self):
        a, b = self.make(seed=123), self.make(seed=123)
        assert np.array_equal(a.mean, b.mean) and np.array_equal(a.std, b.std)
        c = self.make(seed=124)
        assert not np.array_equal(a.mean, c.mean)

    def test_higher_link_probability_spreads_more(self):
        g = gen_binomial(100, 0.05, 21)
        params = NodeParams.homogeneous(100, r=1.0, delta=0.1, gamma=0.1)
        lo = mc_ensemble(g, LinkProbs.homogeneous(g, 0.02), params,
                         init=0.1, steps=50, runs=100, seed=5)
        hi = mc_ensemble(g, LinkProbs.homogeneous(g, 0.08), params,
                         init=0.1, steps=50, runs=100, seed=5)
        lo_mass = lo.mean[:, HAS_INFO].sum()
        hi_mass = hi.mean[:, HAS_INFO].sum()
        assert lo_mass == pytest.approx(1.8847, abs=1e-12)
        assert hi_mass == pytest.approx(8.7566, abs=1e-12)
        assert lo_mass < hi_mass

    def test_csv_format(self):
        ens = self.make()
        buf = io.StringIO()
        ens.write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ("t,frac_noinfo_mean,frac_hasinfo_mean,"
                            "frac_warned_mean,frac_dead_mean,frac_hasinfo_std")
        assert len(lines) == 32
        first = lines[1].split(",")
        assert first[0] == "0"
        assert first[2] == "2.000000000000e-01"
        assert float(first[5]) <= 1e-15


# ---------------------------------------------------------------------------
# Property-based invariants
# ---------------------------------------------------------------------------

@given(
    master=st.integers(min_value=0, max_value=2**64 - 1),
    k=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_mix_seed_matches_finalizer_property(master, k):
    assert mix_seed(master, k) == splitmix_finalizer(master ^ k)
    assert 0 <= mix_seed(master, k) < 2**64


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_run_rows_stay_on_simplex(seed):
    g = gen_binomial(20, 0.2, seed)
    params = NodeParams.homogeneous(20, r=1.0, delta=0.3, gamma=0.2)
    traj = mc_run(g, LinkProbs.homogeneous(g, 0.5), params,
                  init=0.25, steps=15, seed=seed)
    assert np.allclose(traj.sum(axis=1), 1.0, rtol=0.0, atol=1e-12)
    assert np.all((traj >= 0.0) & (traj <= 1.0))


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_immortal_model_never_loses_info_property(seed):
    # delta = 0 and nu = 1: the carrier count never decreases.
    g = gen_binomial(20, 0.25, seed)
    params = NodeParams.homogeneous(20, r=0.6, delta=0.0, gamma=0.0)
    traj = mc_run(g, LinkProbs.homogeneous(g, 0.5), params,
                  init=0.1, steps=20, seed=seed)
    carriers = traj[:, HAS_INFO]
    assert np.all(np.diff(carriers) >= -1e-15)
