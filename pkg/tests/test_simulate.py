import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kstest

from bbsplit.graph import WeightedGraph, make_line
from bbsplit.kernel import SplitParam, stationary_dist, enumerate_states
from bbsplit.simulate import (beta_from_uniform, bbsp_step, log_negbin_pmf, negbin_prob, sample_negbin_conditioned,
                              simulate_bbsp, simulate_unrestricted_line_coupled)
from bbsplit.stream import EventStream, expand_uniform, replica_rng


def test_stream_deterministic():
    g = make_line(4)
    a, b = EventStream(g, 5, 2), EventStream(g, 5, 2)
    assert [a.event(i) for i in range(1000)] == [b.event(i) for i in range(1000)]
    assert [a.coin(i) for i in range(1, 50)] == [b.coin(i) for i in range(1, 50)]
    assert EventStream(g, 5, 3).event(0) != a.event(0)


def test_stream_random_access_matches_iteration():
    g = make_line(3)
    s = EventStream(g, 1)
    evs = list(s.events(50.0))
    fresh = EventStream(g, 1)
    assert evs[-1] == fresh.event(len(evs) - 1)
    assert all(e.time <= 50.0 for e in evs) and s.event(len(evs)).time > 50.0


def test_interarrivals_exponential_rate_one():
    s = EventStream(make_line(2), 9)
    t = np.array([s.event(i).time for i in range(20_000)])
    gaps = np.diff(np.concatenate([[0.0], t]))
    assert kstest(gaps, "expon").pvalue > 1e-3


def test_raw_rate_scales_clock():
    g = WeightedGraph(2, ((1, 2, 4.0),))
    s = EventStream(g, 9, raw_rate=True)
    t = s.event(19_999).time
    assert t / 20_000 == pytest.approx(0.25, rel=0.03)


def test_edge_frequencies_follow_weights():
    g = WeightedGraph(3, ((1, 2, 1.0), (2, 3, 3.0)))
    s = EventStream(g, 4)
    n = 100_000
    hits = sum(s.event(i).edge == 0 for i in range(n)) / n
    assert abs(hits - 0.25) <= 4 * np.sqrt(0.25 * 0.75 / n)


def test_expand_uniform_deterministic():
    assert expand_uniform(0.123).random() == expand_uniform(0.123).random()
    assert expand_uniform(0.123).random() != expand_uniform(0.124).random()


def test_bbsp_step():
    p = SplitParam(1, 1)
    assert bbsp_step(p, (0, 0, 3), (1, 2), 0.4) == (0, 0, 3)
    outs = {bbsp_step(p, (2, 0), (1, 2), u) for u in np.linspace(0.01, 0.99, 99)}
    assert outs == {(2, 0), (1, 1), (0, 2)}
    with pytest.raises(KeyError):
        bbsp_step(p, (1, 0, 1), (1, 3), 0.5, g=make_line(3))


def test_bbsp_step_uniform_on_two_particles():
    p = SplitParam(1, 1)
    G = 30_000
    res = [bbsp_step(p, (2, 0), (1, 2), (i + 0.5) / G)[0] for i in range(G)]
    np.testing.assert_allclose(np.bincount(res) / G, [1 / 3] * 3, atol=1e-3)


def test_simulate_t0_and_conservation():
    g = make_line(4)
    p = SplitParam(3, 2)
    traj = simulate_bbsp(g, p, (3, 0, 1, 0), EventStream(g, 1), 0.0)
    assert traj.current == (3, 0, 1, 0) and traj.events_applied == 0
    traj = simulate_bbsp(g, p, (3, 0, 1, 0), EventStream(g, 1), 40.0, sample_times=[1, 10, 40])
    assert [t for t, _ in traj.samples] == [1, 10, 40]
    assert all(sum(x) == 4 for _, x in traj.samples)


def test_long_run_uniform_on_two_vertices():
    g = make_line(2)
    p = SplitParam(1, 1)
    reps = 100_000
    # each replica's state after one ring is a fresh draw, so t = 30 is far past mixing
    counts = np.zeros(3)
    states = enumerate_states(2, 2)
    for r in range(reps):
        s = EventStream(g, 77, r)
        counts[states.index(simulate_bbsp(g, p, (2, 0), s, 30.0).current)] += 1
    pi_ = stationary_dist(g, p, 2)
    z = np.abs(counts / reps - pi_) / np.sqrt(pi_ * (1 - pi_) / reps)
    assert z.max() <= 4


def test_coupled_identical_starts():
    n = 4
    g = make_line(n)
    lo, hi = simulate_unrestricted_line_coupled(n, SplitParam(1, 1), (2, 0, 1, 0), (2, 0, 1, 0), EventStream(g, 3), 20)
    assert lo.current == hi.current


def test_coupled_zero_low_stays_zero():
    n = 3
    g = make_line(n)
    lo, hi = simulate_unrestricted_line_coupled(n, SplitParam(1, 2), (0, 0, 0), (4, 1, 0), EventStream(g, 3), 20)
    assert lo.current == (0, 0, 0) and sum(hi.current) == 5


def test_coupled_rejects_unordered():
    g = make_line(3)
    with pytest.raises(ValueError):
        simulate_unrestricted_line_coupled(3, SplitParam(1, 1), (1, 0, 0), (0, 1, 0), EventStream(g, 0), 1)


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 3)), min_size=4, max_size=4),
       st.sampled_from(["1/2", "1", "5"]), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_coupled_domination_property(pairs, s, seed):
    n = 4
    low0 = tuple(a for a, _ in pairs)
    high0 = tuple(a + b for a, b in pairs)
    g = make_line(n)
    # check=True asserts domination after every event
    lo, hi = simulate_unrestricted_line_coupled(n, SplitParam.parse(s), low0, high0, EventStream(g, seed), 15.0,
                                                check=True, sample_times=[5.0, 15.0])
    assert all(a <= b for a, b in zip(lo.current, hi.current))
    assert sum(lo.current) == sum(low0) and sum(hi.current) == sum(high0)


def test_coupled_domination_many_runs():
    n = 4
    g = make_line(n)
    rng = replica_rng(8)
    p = SplitParam(1, 1)
    for r in range(10_000):
        low0 = rng.integers(0, 3, n)
        high0 = low0 + rng.integers(0, 3, n)
        simulate_unrestricted_line_coupled(n, p, tuple(low0), tuple(high0), EventStream(g, 8, r), 3.0, check=True)


def test_beta_from_uniform():
    p = SplitParam(1, 1)
    assert beta_from_uniform(p, 0.3) == pytest.approx(0.3)
    assert beta_from_uniform(SplitParam(2, 1), 0.5) == pytest.approx(0.5)


def test_negbin_helpers():
    p = SplitParam(3, 2)
    q = negbin_prob(p, 4, 6)
    # mean s (1 - q) / q equals m / n_sites
    assert 1.5 * (1 - q) / q == pytest.approx(6 / 4)
    from scipy.stats import nbinom
    assert log_negbin_pmf(3, p, q) == pytest.approx(nbinom.logpmf(3, 1.5, q))


@pytest.mark.parametrize("method", ["rejection", "polya"])
def test_conditioned_negbin_is_dirichlet_multinomial(method):
    from scipy.stats import dirichlet_multinomial
    p = SplitParam(1, 2)
    rng = replica_rng(2)
    n_sites, m, reps = 2, 3, 20_000
    draws = np.array([sample_negbin_conditioned(p, n_sites, m, rng, method)[0] for _ in range(reps)])
    freq = np.bincount(draws, minlength=m + 1) / reps
    exact = np.array([dirichlet_multinomial.pmf([k, m - k], [0.5, 0.5], m) for k in range(m + 1)])
    z = np.abs(freq - exact) / np.sqrt(exact * (1 - exact) / reps)
    assert z.max() <= 4
