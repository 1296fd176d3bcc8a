import numpy as np
import pytest

from gossipsim import dynamics
from gossipsim.dynamics import (NodeStateConfig, active_arc_count, init_config,
                                simulate)
from gossipsim.graph import gen_complete, gen_er, gen_torus
from gossipsim.persuasion import parse_phi

LINEAR = parse_phi("linear")


class TestInitConfig:
    def test_exact_count(self):
        cfg = init_config(100, 0.237, seed=1)
        assert cfg.ones_count == 23
        assert cfg.z == 0.23

    def test_deterministic(self):
        a = init_config(50, 0.4, seed=9)
        b = init_config(50, 0.4, seed=9)
        assert np.array_equal(a.states, b.states)

    def test_extremes(self):
        assert init_config(10, 0.0, seed=1).ones_count == 0
        assert init_config(10, 1.0, seed=1).ones_count == 10

    def test_bad_z0_rejected(self):
        with pytest.raises(ValueError):
            init_config(10, 1.5, seed=1)
        with pytest.raises(ValueError):
            init_config(10, -0.1, seed=1)


class TestActiveArcs:
    def test_complete_with_loops_closed_form(self):
        g = gen_complete(30, with_self_loops=True)
        cfg = init_config(30, 0.4, seed=3)
        k = cfg.ones_count
        assert active_arc_count(cfg, g) == k * (30 - k)

    def test_self_loops_never_active(self):
        g_loops = gen_complete(20, with_self_loops=True)
        g_plain = gen_complete(20, with_self_loops=False)
        cfg = init_config(20, 0.5, seed=4)
        assert active_arc_count(cfg, g_loops) == active_arc_count(cfg, g_plain)

    def test_all_zero_or_all_one_has_none(self):
        g = gen_er(30, 0.2, seed=5)
        assert active_arc_count(init_config(30, 0.0, seed=1), g) == 0
        assert active_arc_count(init_config(30, 1.0, seed=1), g) == 0


class TestSimulate:
    def test_determinism(self):
        g = gen_er(100, 0.1, seed=2)
        init = init_config(100, 0.3, seed=3)
        a = simulate(g, LINEAR, 8.0, init, 5.0, seed=11)
        b = simulate(g, LINEAR, 8.0, init, 5.0, seed=11)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.z, b.z)
        assert a.event_count == b.event_count

    def test_different_seed_differs(self):
        g = gen_er(100, 0.1, seed=2)
        init = init_config(100, 0.3, seed=3)
        a = simulate(g, LINEAR, 8.0, init, 5.0, seed=11)
        b = simulate(g, LINEAR, 8.0, init, 5.0, seed=12)
        assert a.event_count != b.event_count or not np.array_equal(a.z, b.z)

    def test_incremental_arc_count_matches_brute_force(self):
        # kernel cross-checks its incremental bookkeeping on every event
        g = gen_er(60, 0.15, seed=7)
        init = init_config(60, 0.3, seed=8)
        traj = simulate(g, LINEAR, 8.0, init, 5.0, seed=13, debug_check_every=1)
        assert traj.event_count > 0  # mismatch would have raised

    def test_z_steps_by_one_over_n(self):
        g = gen_er(50, 0.2, seed=1)
        init = init_config(50, 0.3, seed=1)
        traj = simulate(g, LINEAR, 8.0, init, 3.0, seed=5, sample_stride=1)
        jumps = np.diff(traj.z)
        jumps = jumps[jumps != 0]
        assert np.allclose(np.abs(jumps), 1 / 50)

    def test_xi_in_unit_interval(self):
        g = gen_er(50, 0.2, seed=1)
        init = init_config(50, 0.3, seed=1)
        traj = simulate(g, LINEAR, 8.0, init, 3.0, seed=5)
        assert np.all(traj.xi >= 0)
        assert np.all(traj.xi <= 1)

    def test_absorption_at_zero(self):
        g = gen_er(50, 0.2, seed=1)
        init = init_config(50, 0.04, seed=1)  # 2 ones, beta below critical
        traj = simulate(g, LINEAR, 1.0, init, 100.0, seed=6)
        assert traj.absorbed_at is not None
        assert traj.z[-1] == 0.0
        # the absorbed state persists: every sample past absorption is zero
        after = traj.times >= traj.absorbed_at
        assert np.all(traj.z[after] == 0.0)

    def test_all_zero_start_is_absorbed_immediately(self):
        g = gen_er(50, 0.2, seed=1)
        traj = simulate(g, LINEAR, 10.0, init_config(50, 0.0, seed=1), 5.0, seed=7)
        assert traj.absorbed_at == 0.0
        assert traj.event_count == 0

    def test_complete_graph_xi_identity(self):
        g = gen_complete(200, with_self_loops=True)
        init = init_config(200, 0.4, seed=2)
        traj = simulate(g, LINEAR, 10.0, init, 5.0, seed=9, sample_stride=1)
        assert np.allclose(traj.xi, traj.z * (1 - traj.z), atol=1e-14)

    def test_implicit_and_explicit_complete_agree(self):
        implicit = gen_complete(3000, with_self_loops=True)
        assert implicit.is_complete
        small = gen_complete(100, with_self_loops=True)
        init = init_config(100, 0.3, seed=4)
        t1 = simulate(small, LINEAR, 10.0, init, 2.0, seed=21)
        assert t1.xi_at(2.0) == pytest.approx(t1.value_at(2.0) * (1 - t1.value_at(2.0)))

    def test_phi_zero_constant_means_pure_death(self):
        g = gen_er(80, 0.2, seed=3)
        init = init_config(80, 0.5, seed=3)
        traj = simulate(g, parse_phi("constant:0.0"), 10.0, init, 200.0, seed=8)
        assert traj.absorbed_at is not None
        assert np.all(np.diff(traj.z[traj.z > 0]) <= 1e-12)


class TestSisDomination:
    def test_phi_of_one_dominates_in_mean(self):
        # phi(z) = z <= 1 = phi(1): the constant-rate chain is a SIS-type
        # dominator, so mean Z under linear phi stays below it + 3 SE
        g = gen_er(40, 0.25, seed=6)
        grid = (0.5, 1.0, 2.0)
        reps = 300
        lin = np.zeros((reps, len(grid)))
        sis = np.zeros((reps, len(grid)))
        for r in range(reps):
            init = init_config(40, 0.3, seed=1000 + r)
            a = simulate(g, LINEAR, 6.0, init, 2.0, seed=2000 + r)
            b = simulate(g, parse_phi("constant:1.0"), 6.0, init, 2.0, seed=2000 + r)
            lin[r] = [a.value_at(t) for t in grid]
            sis[r] = [b.value_at(t) for t in grid]
        diff = lin.mean(axis=0) - sis.mean(axis=0)
        se = np.sqrt(lin.var(axis=0) / reps + sis.var(axis=0) / reps)
        assert np.all(diff <= 3 * se)


class TestHoldingTimes:
    def test_complete_graph_event_rate_matches_chain(self):
        # at fixed k the total jump rate is k + beta*k*(N-k)/N * phi(k/N);
        # holding times between events must average its reciprocal
        n, beta, k = 100, 5.0, 50
        g = gen_complete(n, with_self_loops=True)
        states = np.zeros(n, dtype=np.int8)
        states[:k] = 1
        init = NodeStateConfig(states=states)
        rate = k + beta * k * (n - k) / n * (k / n)
        waits = []
        for r in range(400):
            traj = simulate(g, LINEAR, beta, init, 10.0, seed=r, sample_stride=1)
            # samples interleave grid points with event records; the first
            # time Z moves is the exact first event time
            first = np.flatnonzero(traj.z != traj.z[0])[0]
            waits.append(traj.times[first])
        mean_wait = np.mean(waits)
        se = np.std(waits, ddof=1) / np.sqrt(len(waits))
        assert abs(mean_wait - 1 / rate) < 4 * se
