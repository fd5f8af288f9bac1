import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbsplit.chameleon import (NONE, ChameleonConsistencyError, ChameleonState, _step, chameleon_step,
                               depink_due, depink_jump, end_round, placement_bounds, recommended_round_length,
                               run_chameleon, start_round)
from bbsplit.checks import check_paired_survival, check_placement_enumeration, scenario_state, uniform_for_outcome
from bbsplit.graph import make_cycle, make_line
from bbsplit.kernel import SplitParam, betabin_sample
from bbsplit.stream import EventStream, replica_rng

S1 = SplitParam(1, 1)


def make_state(param, black, red, pink, T=float("inf")):
    total = param.colour_total(len(black), sum(black) + 1)
    st_ = ChameleonState(param, list(black), list(red), list(pink), [NONE] * (total + 1), [NONE] * (total + 1),
                         T, n_red=sum(red), n_pink=sum(pink))
    return start_round(st_)


def test_bounds_degenerate_edge():
    b = placement_bounds(S1, 1, 0, 1, 0, 0, 0, 0)
    assert (b.red_lo_v, b.red_hi_v, b.pink_lo_v, b.pink_hi_v, b.target_ink_v, b.lower_prob) == (0, 0, 0, 0, 0, 0.5)


@pytest.mark.parametrize("s", ["1/2", "1", "5"])
def test_bounds_all_red(s):
    p = SplitParam.parse(s)
    for bv, bw in [(0, 0), (2, 1), (0, 3)]:
        N = bv + bw
        for k in range(N + 1):
            b = placement_bounds(p, bv, bw, k, p.colour(bv), 0, p.colour(bw), 0)
            assert b.target_ink_v == pytest.approx(p.colour(k), abs=1e-12)
            assert b.red_hi_v == p.colour(k) == b.red_lo_v
            assert b.ink_lo == b.ink_hi == pytest.approx(b.target_ink_v)


def test_bounds_reject_bad_counts():
    with pytest.raises(ValueError):
        placement_bounds(S1, 0, 0, 0, 2, 0, 0, 0)
    with pytest.raises(ValueError):
        placement_bounds(S1, 1, 0, 2, 0, 0, 0, 0)


def test_sandwich_and_margin_enumeration():
    res = check_placement_enumeration()
    assert res.detail["sandwich_violations"] == 0 and res.detail["margin_violations"] == 0
    assert res.detail["cases"] > 500_000


def test_paired_survival_small():
    assert check_paired_survival(runs=20_000).value == 0


def test_independent_scatter_would_overflow():
    """Reds scattered independently of the old-pink choice can exceed a vertex's capacity.

    Empty blacks, one pink on v and one red on w: the low option puts the pink
    on v, the high option puts the red on v, and v holds only one non-black.
    """
    b = placement_bounds(S1, 0, 0, 0, 0, 1, 1, 0)
    assert (b.red_lo_v, b.red_hi_v, b.pink_lo_v, b.pink_hi_v) == (0, 1, 1, 0)
    assert b.red_hi_v + b.pink_lo_v > S1.colour(0)
    # the coupled step only produces the two feasible placements
    seen = set()
    for i in range(2000):
        st_ = make_state(S1, [0, 0], [0, 1], [1, 0])
        _step(st_, 0, 1, 0.5, (i + 0.5) / 2000, False)
        st_.check()
        seen.add((st_.red[0], st_.pink[0]))
    assert seen == {(0, 1), (1, 0)}


def test_pure_black_move():
    st_ = make_state(S1, [2, 0, 1], [0, 0, 2], [0, 0, 0])
    before = st_.labels_white()
    chameleon_step(S1, st_, (1, 2), 0.2, 0.3)
    assert st_.black[:2] == [betabin_sample(2, S1, 0.2), 2 - betabin_sample(2, S1, 0.2)]
    assert st_.red == [0, 0, 2] and st_.pink == [0, 0, 0]
    assert st_.labels_red() == (3, 3, 0, 0, 0, 0)
    assert len(st_.labels_white()) == len(before)
    st_.check()


def test_initial_state_and_labels():
    st_ = ChameleonState.initial(S1, (1, 0, 1, 0, 1, 0, 0), 3)
    assert st_.red == [0, 0, 2, 0, 0, 0, 0]
    assert st_.n_labels == 2
    assert st_.labels_red()[:2] == (3, 3) and st_.labels_white()[:2] == (1, 1)
    assert st_.total == 3 * 1 + 7
    zero = make_state(S1, [1, 1], [0, 0], [0, 0])
    assert zero.n_labels == 0


def test_more_reds_than_whites_pairs_every_white():
    st_ = ChameleonState.initial(S1, (3, 0), 1)
    assert st_.n_red == 4 and st_.n_white == 1 and st_.n_labels == 1


def test_end_round_without_pinks():
    st_ = ChameleonState.initial(S1, (1, 1), 1)
    assert not depink_due(st_)
    assert not end_round(st_, 1)
    assert st_.round_index == 1 and st_.n_red == 2


def test_end_round_depinks_both_ways():
    for coin, red_after in ((1, 3), (0, 1)):
        st_ = make_state(S1, [1, 1], [1, 0], [1, 1])
        assert depink_due(st_)
        assert end_round(st_, coin)
        assert st_.n_pink == 0 and st_.n_red == red_after and st_.depink_count == 1


def test_depink_jump_small():
    # n = 2, m = 3, a = b = 1: total non-black is 4
    assert [depink_jump(S1, 4, r) for r in (1, 2, 3)] == [1, 1, 1]
    assert depink_jump(S1, 10, 4) == 2 and depink_jump(S1, 10, 0) == 0


def test_recommended_round_length():
    assert recommended_round_length(make_line(2)) == pytest.approx(2.0)
    assert recommended_round_length(make_line(3)) == pytest.approx(10.0)
    # difference walk on C_4 moves +-1 at rate 1/4 each: h(1) = 6, h(2) = 8
    assert recommended_round_length(make_cycle(4)) == pytest.approx(16.0)


def _ink_twice(st_):
    return 2 * sum(st_.red) + sum(st_.pink)


@given(st.integers(0, 2**31), st.sampled_from(["1/2", "1", "3/2", "2"]), st.booleans())
@settings(max_examples=150, deadline=None)
def test_step_preserves_invariants(seed, s, modified):
    p = SplitParam.parse(s)
    rng = replica_rng(seed)
    st_ = scenario_state(rng, p, n_extra=2)
    for _ in range(20):
        i = int(rng.integers(0, st_.n - 1))
        before = _ink_twice(st_)
        total_black = sum(st_.black)
        _step(st_, i, i + 1, float(rng.random()), float(rng.random()), modified)
        st_.check()
        assert _ink_twice(st_) == before
        assert sum(st_.black) == total_black
        assert st_.n_pink % 2 == 0


def test_one_step_expectation_single_scenario():
    p = SplitParam(1, 1)
    st0 = make_state(p, [1, 1, 0], [1, 1, 0], [0, 0, 1])
    st0.pink[2] = 0
    st0.n_pink = 0
    start_round(st0)
    for k in range(3):
        ub = uniform_for_outcome(2, p, k)
        b = placement_bounds(p, 1, 1, k, 1, 0, 1, 0)
        n = 20_000
        inks = []
        for i in range(n):
            s = st0.copy()
            _step(s, 0, 1, ub, (i + 0.5) / n, False)
            inks.append(s.red[0] + s.pink[0] / 2)
        inks = np.array(inks)
        assert abs(inks.mean() - b.target_ink_v) <= 4 * inks.std() / np.sqrt(n) + 1e-9


def test_run_records_and_absorbs():
    g = make_line(3)
    T = recommended_round_length(g)
    run = run_chameleon(g, S1, (1, 1, 0), 1, T, EventStream(g, 0), record="full", check=True)
    assert run.absorbed and run.fill in (True, False)
    assert run.state.total_ink in (0, S1.colour_total(3, 3))
    assert run.ink_changes_between_depinkings == 0
    assert len(run.trace) == run.events
    assert all(abs(t / T - round(t / T)) < 1e-12 for t in run.depink_times)


def test_run_sampling_and_t_max():
    g = make_line(4)
    run = run_chameleon(g, S1, (1, 0, 1, 0), 2, 3.0, EventStream(g, 5), t_max=7.0, stop_on_absorb=False,
                        sample_times=[0.0, 2.5, 7.0])
    assert [t for t, _, _ in run.samples] == [0.0, 2.5, 7.0]
    assert run.samples[0][2] == (0.0, 1.0, 0.0, 0.0)
    assert run.state.round_index == 2


def test_run_is_deterministic():
    g = make_cycle(4)
    a = run_chameleon(g, S1, (1, 0, 1, 0), 1, 16.0, EventStream(g, 9, 3), record="full")
    b = run_chameleon(g, S1, (1, 0, 1, 0), 1, 16.0, EventStream(g, 9, 3), record="full")
    assert a.trace == b.trace and a.fill == b.fill


def test_run_rejects_bad_args():
    g = make_line(2)
    with pytest.raises(ValueError):
        run_chameleon(g, S1, (1, 1), 1, 0.0, EventStream(g, 0))
    with pytest.raises(ValueError):
        run_chameleon(g, S1, (1, 1), 1, 1.0, EventStream(g, 0), mode="fast")


def test_consistency_check_catches_corruption():
    st_ = ChameleonState.initial(S1, (1, 1), 1)
    st_.red[0] = 5
    with pytest.raises(ChameleonConsistencyError):
        st_.check()
