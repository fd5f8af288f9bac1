"""Verification suite: exact identities, distributional facts and Monte Carlo checks.

Every check returns a CheckResult. Exact checks compare the float code path
against rational arithmetic or closed forms; Monte Carlo checks report the
worst z-score against the stated band.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import exp, log, sqrt

import numpy as np

from .analysis import (build_chain, chebyshev_lower_check, conditioned_negbin_law, eigen_decay,
                       exact_mixing_time, line_eigenfunction, line_eigenvalue)
from .chameleon import (NONE, ChameleonState, _step, depink_jump, place_lower_bounds,
                        placement_bounds, recommended_round_length, run_chameleon, start_round)
from .graph import make_cycle, make_line
from .kernel import (SplitParam, betabin_pmf, betabin_pmf_exact, edge_transition_prob,
                     enumerate_states, equilibrium_weight_exact, stationary_dist,
                     _ranked_cdf)
from .marked import lower_endpoint_prob, marked_placement_prob, simulate_marked
from .meeting import exact_meeting_times, mc_meeting_time, tau0_upper_proxy
from .simulate import simulate_bbsp
from .stream import EventStream, replica_rng

S_GRID = ("1/2", "1", "3/2", "2", "5", "40")


@dataclass
class CheckResult:
    name: str
    anchor: str
    status: str  # pass, fail or info
    value: float
    threshold: float
    runtime: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def line(self) -> str:
        return f"[{self.status.upper():4}] {self.name}: value={self.value:.4g} threshold={self.threshold:.4g}"

    def to_dict(self) -> dict:
        return asdict(self)


def _grid():
    return [SplitParam.parse(s) for s in S_GRID]


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.runtime = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _result(name, anchor, ok, value, threshold, **detail) -> CheckResult:
    return CheckResult(name, anchor, "pass" if ok else "fail", float(value), float(threshold), detail=detail)


def uniform_for_outcome(N: int, param: SplitParam, k: int) -> float:
    """A uniform that the ranked inverse CDF maps to outcome k (midpoint of its interval)."""
    if N == 0:
        return 0.5
    order, cum = _ranked_cdf(N, param.numerator, param.denominator)
    r = order.index(k)
    lo = cum[r - 1] if r else 0.0
    return float((lo + cum[r]) / 2)


# exact identity suite

@_timed
def check_detailed_balance(cases=((2, 2), (2, 3), (3, 3))) -> CheckResult:
    worst = 0.0
    for param in _grid():
        for n, m in cases:
            g = make_line(n)
            states = enumerate_states(n, m)
            pi_ = stationary_dist(g, param, m, states)
            index = {x: i for i, x in enumerate(states)}
            for a, b in g.edge_pairs0():
                for x in states:
                    N = x[a] + x[b]
                    for k in range(N + 1):
                        y = list(x)
                        y[a], y[b] = k, N - k
                        y = tuple(y)
                        fwd = pi_[index[x]] * edge_transition_prob(param, N, x[a], k)
                        bwd = pi_[index[y]] * edge_transition_prob(param, N, k, x[a])
                        worst = max(worst, abs(fwd - bwd))
    return _result("detailed balance of the equilibrium law", "equilibrium is reversible for every edge kernel",
                   worst <= 1e-10, worst, 1e-10)


@_timed
def check_equilibrium_exact() -> CheckResult:
    """Float equilibrium versus the exact rational product form."""
    worst = 0.0
    for param in _grid():
        for n, m in ((2, 2), (2, 3), (3, 3), (3, 4)):
            states = enumerate_states(n, m)
            w = [equilibrium_weight_exact(x, param) for x in states]
            tot = sum(w)
            exact = np.array([float(x / tot) for x in w])
            worst = max(worst, float(np.abs(exact - stationary_dist(n, param, m, states)).max()))
    return _result("equilibrium law against exact product form", "integer product form of the equilibrium",
                   worst <= 1e-12, worst, 1e-12)


@_timed
def check_heat_kernel(max_n: int = 12) -> CheckResult:
    worst = 0.0
    for param in _grid():
        for N in range(max_n + 1):
            big = betabin_pmf(N + 1, param)
            small = betabin_pmf(N, param)
            exact_big = betabin_pmf_exact(N + 1, param)
            exact_small = betabin_pmf_exact(N, param)
            for k in range(N + 1):
                lhs = (k + 1) * big[k + 1] + (N - k + 1) * big[k]
                worst = max(worst, abs(lhs - (N + 1) * small[k]))
                ex = (k + 1) * exact_big[k + 1] + (N - k + 1) * exact_big[k] - (N + 1) * exact_small[k]
                if ex != 0:
                    worst = max(worst, 1.0)
    return _result("heat-kernel identity", "adding one particle to an edge", worst <= 1e-12, worst, 1e-12)


@_timed
def check_pmf_exact(max_n: int = 12) -> CheckResult:
    """Log-space pmf against rational pmf, and symmetry."""
    worst = 0.0
    for param in _grid():
        for N in range(max_n + 1):
            p = betabin_pmf(N, param)
            ex = np.array([float(x) for x in betabin_pmf_exact(N, param)])
            worst = max(worst, float(np.abs(p - ex).max()), float(np.abs(p - p[::-1]).max()))
    return _result("beta-binomial pmf exactness and symmetry", "updates are symmetric", worst <= 1e-12, worst, 1e-12)


@_timed
def check_colour_flow(max_n: int = 8) -> CheckResult:
    worst = 0.0
    for param in _grid():
        for N in range(max_n + 1):
            for bv in range(N + 1):
                state = (bv, N - bv)
                for k in range(N + 1):
                    new = (k, N - k)
                    pvv = marked_placement_prob(param, (1, 2), state, new, 1, 1)
                    pwv = marked_placement_prob(param, (1, 2), state, new, 2, 1)
                    lhs = param.colour(bv) * pvv + param.colour(N - bv) * pwv
                    worst = max(worst, abs(lhs - param.colour(k)))
                    # exact version through the (N+1)-particle kernel ratio
                    ex = (Fraction(k + 1, N + 1) * betabin_pmf_exact(N + 1, param)[k + 1]
                          / betabin_pmf_exact(N, param)[k])
                    worst = max(worst, abs(float(ex) - pvv))
    return _result("colour-flow identity", "expected colour entering v matches new colour count",
                   worst <= 1e-12, worst, 1e-12)


@_timed
def check_contraction(max_n: int = 8) -> CheckResult:
    """Marked kernel summed over the mark's position equals the unmarked kernel with one more particle."""
    worst = 0.0
    for param in _grid():
        for N in range(max_n + 1):
            pmf = betabin_pmf(N, param)
            big = betabin_pmf_exact(N + 1, param)
            for k in range(N + 1):
                stay = pmf[k] * lower_endpoint_prob(param, N, k)
                move = pmf[k + 1] * (1 - lower_endpoint_prob(param, N, k + 1)) if k < N else 0.0
                worst = max(worst, abs(stay + move - float(big[k + 1])))
                # alternative description: uniform choice of the mark among N+1 particles
                alt_v = (k + 1) / (N + 1) * float(big[k + 1])
                alt_w = (N - k + 1) / (N + 1) * float(big[k])
                worst = max(worst, abs(stay - alt_v), abs(pmf[k] * (1 - lower_endpoint_prob(param, N, k)) - alt_w))
    return _result("marked projection identity", "forgetting the mark gives the unmarked process",
                   worst <= 1e-12, worst, 1e-12)


@_timed
def check_placement_enumeration(max_n: int = 6, tol: float = 1e-12) -> CheckResult:
    """Sandwich and margin bounds for the low-option weight over all feasible edge configurations.

    Every quantity depends on the red and pink totals on the edge, and a total
    pair is feasible exactly when it fits in the two capacities, so the sweep
    covers all per-vertex configurations.
    """
    cases = 0
    sandwich_bad = 0
    margin_bad = 0
    for param in _grid():
        for N in range(max_n + 1):
            for bv in range(N + 1):
                bw = N - bv
                c_v, c_w = param.colour(bv), param.colour(bw)
                for k in range(N + 1):
                    p = lower_endpoint_prob(param, N, k)
                    margin = min(p, 1 - p)
                    for R in range(c_v + c_w + 1):
                        for P in range(c_v + c_w - R + 1):
                            rv = min(R, c_v)
                            pv = min(P, c_v - rv)
                            bnd = placement_bounds(param, bv, bw, k, rv, pv, R - rv, P - pv)
                            cases += 1
                            if not (bnd.ink_lo - tol <= bnd.target_ink_v <= bnd.ink_hi + tol):
                                sandwich_bad += 1
                            q = bnd.lower_prob
                            if not (margin - tol <= q <= 1 - margin + tol):
                                margin_bad += 1
    bad = sandwich_bad + margin_bad
    return _result("placement weight sandwich and margin bounds", "low-option weight exists and stays away from 0 and 1",
                   bad == 0, bad, 0, cases=cases, sandwich_violations=sandwich_bad, margin_violations=margin_bad)


def random_edge_scenario(rng: np.random.Generator, param: SplitParam, max_n: int = 6):
    """Random black move plus red/pink/white counts and pairing on an edge.

    Returns (black_v, black_w, new_black_v, red_v, pink_v, red_w, pink_w, k_paired, n_nonpaired_labelled).
    """
    N = int(rng.integers(0, max_n + 1))
    bv = int(rng.integers(0, N + 1))
    k = int(rng.integers(0, N + 1))
    c_v, c_w = param.colour(bv), param.colour(N - bv)
    rv = int(rng.integers(0, c_v + 1))
    pv = int(rng.integers(0, c_v - rv + 1)) // 2 * 2 if rng.random() < 0.5 else 0
    rw = int(rng.integers(0, c_w + 1))
    pw = int(rng.integers(0, c_w - rw + 1)) if rng.random() < 0.5 else 0
    whites = c_v - rv - pv + c_w - rw - pw
    paired = int(rng.integers(0, min(rv + rw, whites) + 1))
    lab_np = int(rng.integers(0, rv + rw - paired + 1))
    return bv, N - bv, k, rv, pv, rw, pw, paired, lab_np


@_timed
def check_paired_survival(runs: int = 100_000, seed: int = 20240601) -> CheckResult:
    """After the lower limits are placed, at least min(k, cap_v, cap_w) paired reds remain."""
    rng = replica_rng(seed, 0)
    grid = _grid()
    bad = 0
    for _ in range(runs):
        param = grid[int(rng.integers(len(grid)))]
        bv, bw, k, rv, pv, rw, pw, paired, lab_np = random_edge_scenario(rng, param)
        bnd = placement_bounds(param, bv, bw, k, rv, pv, rw, pw)
        R = rv + rw
        n_np = R - paired
        nonpaired = [0] * (n_np - lab_np) + list(range(1, lab_np + 1))
        paired_ids = list(range(lab_np + 1, lab_np + 1 + paired))
        _, _, rest = place_lower_bounds(rng, nonpaired, paired_ids, bnd.red_lo_v, bnd.red_lo_w)
        left = sum(1 for l in rest if l > lab_np)
        if left < min(paired, param.colour(k), param.colour(N_minus(bv, bw, k))):
            bad += 1
    return _result("paired reds survive lower-limit placement", "enough paired reds remain in the pool",
                   bad == 0, bad, 0, runs=runs)


def N_minus(bv: int, bw: int, k: int) -> int:
    return bv + bw - k


# distributional suite

@_timed
def check_distributional() -> CheckResult:
    worst = 0.0
    failures = []
    for param in _grid():
        p1 = betabin_pmf(1, param)
        worst = max(worst, float(np.abs(p1 - 0.5).max()))
        floor = param.even_split_floor
        for N in range(2, 65):
            p = betabin_pmf(N, param)
            ks = [k for k in range(N + 1) if 3 * k >= N and 3 * k <= 2 * N]
            if p[ks].sum() < floor:
                failures.append(("near-even", str(param), N))
        p2 = betabin_pmf(2, param)
        s = param.real
        merge = p2[0] + p2[2]
        worst = max(worst, abs(merge - (1 - s / (1 + 2 * s))))
        if merge < 2 * floor:
            failures.append(("merge", str(param)))
    u = betabin_pmf(2, SplitParam(1, 1))
    worst = max(worst, float(np.abs(u - 1 / 3).max()))
    ok = worst <= 1e-12 and not failures
    return _result("beta-binomial distributional facts", "one particle is a fair coin; near-even mass; merge chance",
                   ok, worst, 1e-12, failures=failures)


# chameleon dynamics suite

def _l3_starts(param: SplitParam, m: int = 3, n: int = 3):
    out = []
    for x in enumerate_states(n, m - 1):
        for v in range(1, n + 1):
            out.append((x, v))
    return out


def _z(mean: float, target: float, se: float) -> float:
    if se == 0:
        return 0.0 if abs(mean - target) < 1e-12 else float("inf")
    return abs(mean - target) / se


@_timed
def check_ink_jump_chain(runs: int = 10_000, seed: int = 11) -> CheckResult:
    """Ink constant between depinkings; depinking moves are exactly +-jump with fair direction."""
    param = SplitParam(1, 1)
    g = make_line(3)
    T = recommended_round_length(g)
    starts = _l3_starts(param)
    total = param.colour_total(3, 3)
    changes = 0
    bad_jump = 0
    ups = 0
    jumps = 0
    absorbed_bad = 0
    d1 = []
    for r in range(runs):
        black0, x = starts[r % len(starts)]
        run = run_chameleon(g, param, black0, x, T, EventStream(g, seed, r), t_max=1e7)
        changes += run.ink_changes_between_depinkings
        prev = run.initial_ink
        for val in run.depink_inks:
            step = depink_jump(param, total, int(prev))
            if abs(val - prev) != step:
                bad_jump += 1
            if val > prev:
                ups += 1
            jumps += 1
            prev = val
        if not run.absorbed or run.state.total_ink not in (0, total):
            absorbed_bad += 1
        if run.depink_times:
            d1.append(run.depink_times[0])
    frac = ups / max(jumps, 1)
    z = abs(frac - 0.5) / (0.5 / sqrt(max(jumps, 1)))
    ok = changes == 0 and bad_jump == 0 and z <= 3 and absorbed_bad == 0
    res = _result("ink constancy and depinking jump chain", "ink only changes at depinking times, by +-jump with even odds",
                  ok, z, 3.0, runs=runs, ink_changes=changes, bad_jumps=bad_jump, jumps=jumps,
                  up_fraction=frac, unabsorbed=absorbed_bad)
    K = 8 * param.denominator / param.even_split_floor ** 2
    vals = np.exp(np.array(d1) / (K * T))
    res.detail["depink_moment"] = float(vals.mean())
    res.detail["depink_moment_bound"] = 12 * param.denominator / param.even_split_floor ** 2
    return res


@_timed
def check_fill(runs: int = 10_000, seed: int = 12) -> CheckResult:
    param = SplitParam(1, 1)
    g = make_line(2)
    T = recommended_round_length(g)
    fills = 0
    for r in range(runs):
        run = run_chameleon(g, param, (1, 1), 1, T, EventStream(g, seed, r))
        fills += bool(run.fill)
    target = param.colour(1) / param.colour_total(2, 3)
    mean = fills / runs
    z = _z(mean, target, sqrt(target * (1 - target) / runs))
    return _result("fill probability", "ink absorbs at the top with chance initial ink over total",
                   z <= 3, z, 3.0, frequency=mean, target=target, runs=runs)


@_timed
def check_ink_martingale(runs: int = 10_000, seed: int = 13, times=(1.0, 5.0, 20.0)) -> CheckResult:
    param = SplitParam(1, 1)
    g = make_line(3)
    T = recommended_round_length(g)
    black0, x = (1, 1, 0), 1
    vals = np.zeros((runs, len(times)))
    for r in range(runs):
        run = run_chameleon(g, param, black0, x, T, EventStream(g, seed, r), t_max=max(times),
                            stop_on_absorb=False, sample_times=times)
        vals[r] = [sum(ink) for _, _, ink in run.samples]
    target = param.colour(black0[x - 1])
    zs = [_z(vals[:, i].mean(), target, vals[:, i].std(ddof=1) / sqrt(runs)) for i in range(len(times))]
    return _result("ink is a martingale", "expected total ink stays at its start value",
                   max(zs) <= 3, max(zs), 3.0, means=vals.mean(axis=0).tolist(), target=target)


def scenario_state(rng: np.random.Generator, param: SplitParam, n_extra: int = 1):
    """Random chameleon state on a line with the ringing edge (1, 2) and spectator vertices."""
    n = 2 + n_extra
    while True:
        black = [int(b) for b in rng.integers(0, 3, size=n)]
        c = [param.colour(b) for b in black]
        red = [int(rng.integers(0, ci + 1)) for ci in c]
        pink = [int(rng.integers(0, ci - ri + 1)) for ci, ri in zip(c, red)]
        if sum(pink) % 2:
            pink[int(np.argmax(pink))] -= 1
        if red[0] + red[1] > 0:
            break
    total = param.colour_total(n, sum(black) + 1)
    st = ChameleonState(param, black, red, pink, [NONE] * (total + 1), [NONE] * (total + 1),
                        float("inf"), n_red=sum(red), n_pink=sum(pink))
    start_round(st)
    # scatter the labels uniformly over the particles of each colour
    white = st.white()
    reds = [v for v in range(n) for _ in range(red[v])]
    whites = [v for v in range(n) for _ in range(white[v])]
    rs = rng.permutation(len(reds))
    ws = rng.permutation(len(whites))
    for l in range(1, st.n_labels + 1):
        st.lab_red[l] = reds[rs[l - 1]]
        st.lab_white[l] = whites[ws[l - 1]]
    st.check()
    return st


@_timed
def check_one_step(scenarios: int = 10, draws: int = 100_000, seed: int = 14) -> CheckResult:
    """Expected ink at v after one ring equals the target from the marked placement law."""
    rng = replica_rng(seed, 0)
    grid = [SplitParam(1, 1), SplitParam(1, 2), SplitParam(3, 2), SplitParam(2, 1)]
    worst = 0.0
    rows = []
    for sc in range(scenarios):
        param = grid[sc % len(grid)]
        st0 = scenario_state(rng, param)
        N = st0.black[0] + st0.black[1]
        k = int(rng.integers(0, N + 1))
        ub = uniform_for_outcome(N, param, k)
        bnd = placement_bounds(param, st0.black[0], st0.black[1], k, st0.red[0], st0.pink[0],
                               st0.red[1], st0.pink[1])
        inks = np.empty(draws)
        ucs = rng.random(draws)
        for d in range(draws):
            st = st0.copy()
            _step(st, 0, 1, ub, float(ucs[d]), False)
            inks[d] = st.red[0] + st.pink[0] / 2
        se = inks.std(ddof=1) / sqrt(draws)
        z = _z(inks.mean(), bnd.target_ink_v, se)
        worst = max(worst, z)
        rows.append({"state": [st0.black, st0.red, st0.pink], "new_black_v": k, "mean": float(inks.mean()),
                     "target": bnd.target_ink_v, "z": z, "lower_prob": bnd.lower_prob})
    return _result("one-step expected ink", "expected ink after one step matches the marked placement law",
                   worst <= 4, worst, 4.0, scenarios=rows)


@_timed
def check_bridge(replicas: int = 200_000, seed: int = 15, t: float = 2.0,
                 start=((2, 0, 0), 3)) -> CheckResult:
    """P(unmarked = z, mark = y) against E[ink(y) / initial ink ; black = z] on coupled streams."""
    param = SplitParam(1, 1)
    g = make_line(3)
    T = recommended_round_length(g)
    black0, x = start
    states = enumerate_states(3, sum(black0))
    index = {s: i for i, s in enumerate(states)}
    c0 = param.colour(black0[x - 1])
    acc = np.zeros((len(states), 3))
    acc2 = np.zeros((len(states), 3))
    for r in range(replicas):
        stream = EventStream(g, seed, r)
        mt = simulate_marked(g, param, black0, x, stream, t)
        run = run_chameleon(g, param, black0, x, T, stream, t_max=t, stop_on_absorb=False)
        d = np.zeros((len(states), 3))
        d[index[mt.current], mt.marked - 1] += 1.0
        ink = run.state.ink()
        d[index[tuple(run.state.black)]] -= np.array(ink) / c0
        acc += d
        acc2 += d * d
    mean = acc / replicas
    var = acc2 / replicas - mean ** 2
    se = np.sqrt(np.maximum(var, 0) / (replicas - 1))
    zs = np.where(se > 0, np.abs(mean) / np.where(se > 0, se, 1), np.where(np.abs(mean) > 1e-12, np.inf, 0))
    worst = float(zs.max())
    return _result("marked process to chameleon bridge", "chameleon ink reproduces the law of the mark",
                   worst <= 4, worst, 4.0, max_abs_diff=float(np.abs(mean).max()), replicas=replicas)


@_timed
def check_red_decay(runs: int = 10_000, seed: int = 16) -> CheckResult:
    """Modified mode: mean red count at the end of one round is at most (1 - loss rate) times the start."""
    param = SplitParam(1, 1)
    g = make_line(3)
    T = recommended_round_length(g)
    black0, x = (1, 1, 0), 1
    start = ChameleonState.initial(param, black0, x, T)
    r0 = start.n_red
    assert r0 <= start.n_white
    ends = np.empty(runs)
    for r in range(runs):
        run = run_chameleon(g, param, black0, x, T, EventStream(g, seed, r), mode="modified",
                            t_max=T * (1 - 1e-12), stop_on_absorb=False)
        ends[r] = run.state.n_red
    loss = param.even_split_floor ** 2 / (4 * param.denominator)
    bound = (1 - loss) * r0
    se = ends.std(ddof=1) / sqrt(runs)
    slack = (ends.mean() - bound) / se if se > 0 else (0.0 if ends.mean() <= bound else float("inf"))
    return _result("modified-mode red decay per round", "red count shrinks by a fixed fraction per round",
                   ends.mean() <= bound + 3 * se, slack, 3.0, mean_end=float(ends.mean()), start=r0, bound=bound)


# meeting and mixing

@_timed
def check_meeting(replicas: int = 100_000, seed: int = 17) -> CheckResult:
    g = make_line(2)
    exact = exact_meeting_times(g).expected_meeting[0, 1]
    err = abs(exact - 1.0)
    mean, se = mc_meeting_time(g, 1, 2, replica_rng(seed, 0), replicas)
    z = _z(mean, 1.0, se)
    return _result("meeting time on two vertices", "two walks on one edge meet at its first ring",
                   err <= 1e-9 and z <= 3, z, 3.0, exact=float(exact), exact_error=err, mc_mean=mean, mc_se=se)


@_timed
def check_mixing_two_vertices() -> CheckResult:
    chain = build_chain(make_line(2), SplitParam(1, 1), 2)
    t = exact_mixing_time(chain, 0.25)
    err = abs(t - log(8 / 3))
    return _result("exact mixing time on two vertices", "one ring re-randomizes the pair", err <= 1e-6, err, 1e-6,
                   t_mix=t)


# lower-bound machinery

@_timed
def check_eigen_decay() -> CheckResult:
    worst = 0.0
    for n, m in ((3, 2), (3, 3), (4, 3), (4, 4)):
        for param in (SplitParam(1, 1), SplitParam(1, 2), SplitParam(3, 1)):
            chain = build_chain(make_line(n), param, m)
            lam = line_eigenvalue(n)
            times = np.array([0.1, 0.5, 1.0, 3.0]) / abs(lam)
            starts = [conditioned_negbin_law(chain)]
            for x in chain.states[:: max(1, len(chain.states) // 4)]:
                mu = np.zeros(len(chain.states))
                mu[chain.index[x]] = 1
                starts.append(mu)
            for mu in starts:
                exact, pred = eigen_decay(chain, mu, times)
                worst = max(worst, float(np.abs(exact - pred).max()))
    return _result("eigenfunction decay on the line", "sine partial-sum function is an eigenfunction",
                   worst <= 1e-8, worst, 1e-8)


@_timed
def check_lower_bound_sets() -> CheckResult:
    bad = 0
    rows = []
    for n, m in ((3, 3), (4, 4), (5, 3)):
        chain = build_chain(make_line(n), SplitParam(1, 1), m)
        lam = abs(line_eigenvalue(n))
        for f in (0.1, 0.5, 1.0, 2.0, 4.0):
            res = chebyshev_lower_check(chain, f / lam)
            bad += not res.ok
            rows.append({"n": n, "m": m, "t": res.t, "tv": res.tv, "bound": res.bound})
    return _result("set-difference lower bound", "TV dominates the eigenfunction level-set difference",
                   bad == 0, bad, 0, rows=rows)


@_timed
def check_eigen_mc(replicas: int = 20_000, seed: int = 18, times=(2.0, 5.0, 10.0)) -> CheckResult:
    param = SplitParam(1, 1)
    n, m = 4, 6
    g = make_line(n)
    x0 = (3, 3, 0, 0)
    f0 = line_eigenfunction(x0, n, m)
    vals = np.zeros((replicas, len(times)))
    for r in range(replicas):
        traj = simulate_bbsp(g, param, x0, EventStream(g, seed, r), max(times), sample_times=times)
        vals[r] = [line_eigenfunction(x, n, m) for _, x in traj.samples]
    lam = line_eigenvalue(n)
    zs = []
    for i, t in enumerate(times):
        zs.append(_z(vals[:, i].mean(), exp(lam * t) * f0, vals[:, i].std(ddof=1) / sqrt(replicas)))
    return _result("Monte Carlo eigenfunction decay", "mean eigenfunction decays at the eigenvalue rate",
                   max(zs) <= 3, max(zs), 3.0, means=vals.mean(axis=0).tolist(),
                   predicted=[exp(lam * t) * f0 for t in times], variance=vals.var(axis=0).tolist())


@_timed
def check_tau0_slope() -> CheckResult:
    ns = np.array([4, 8, 16])
    taus = np.array([tau0_upper_proxy(make_line(int(n))) for n in ns])
    slope = float(np.polyfit(np.log(ns), np.log(taus), 1)[0])
    return _result("average hitting time growth on lines", "cubic growth on the line", abs(slope - 3) <= 0.3,
                   slope, 3.0, taus=taus.tolist())


@_timed
def check_cycle_mixing_shape(replicas: int = 4000, seed: int = 19) -> CheckResult:
    """Informational: MC mixing time on small cycles against n^2 log(n+m)."""
    from .analysis import mc_tv_mixing
    param = SplitParam(1, 1)
    rows = []
    for n in (4, 6):
        m = n
        g = make_cycle(n)
        times = list(np.linspace(0.5, 30, 60))
        start = tuple([m] + [0] * (n - 1))
        res = mc_tv_mixing(g, param, m, start, times, replicas, seed)
        tmix = next((t for t, d, b in zip(res["times"], res["tv"], res["bias_bound"]) if d - b <= 0.25), float("nan"))
        shape = n ** 2 * log(n + m)
        rows.append({"n": n, "m": m, "t_mix_mc": tmix, "shape": shape, "ratio": tmix / shape})
    ratios = [r["ratio"] for r in rows]
    in_band = all(0.1 <= r <= 10 for r in ratios)
    return CheckResult("cycle mixing against upper-bound shape", "quadratic-log shape on the cycle", "info",
                       max(ratios), 10.0, detail={"rows": rows, "within_factor_10": in_band})


def quick_checks():
    return [check_detailed_balance, check_equilibrium_exact, check_heat_kernel, check_pmf_exact,
            check_colour_flow, check_placement_enumeration, check_contraction, check_distributional,
            check_mixing_two_vertices, check_eigen_decay, check_lower_bound_sets, check_tau0_slope,
            lambda: check_paired_survival(runs=10_000)]


def full_checks():
    return quick_checks()[:-1] + [check_paired_survival, check_ink_jump_chain, check_fill, check_ink_martingale,
                                  check_one_step, check_bridge, check_red_decay, check_meeting, check_eigen_mc,
                                  check_cycle_mixing_shape]
