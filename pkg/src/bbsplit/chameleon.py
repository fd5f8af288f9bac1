"""The chameleon process: black particles follow the unmarked process while red,
pink and white particles track where the marked particle is likely to be.

Ink at a vertex is red + pink/2. Rounds of length T pair reds with whites by
label; a labelled pair that shares a ringing edge may be recoloured pink, and
at the end of a round with enough pinks every pink turns red or white on a
fair coin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

from .graph import WeightedGraph
from .kernel import SplitParam, betabin_sample
from .marked import lower_endpoint_prob
from .meeting import max_meeting_time
from .stream import EventStream, expand_uniform

NONE = -1


class ChameleonConsistencyError(AssertionError):
    pass


@dataclass(frozen=True)
class PlacementBounds:
    """Per-step placement limits for one ringing edge, seen from the lower endpoint v."""

    red_lo_v: int
    red_hi_v: int
    red_lo_w: int
    red_hi_w: int
    pink_lo_v: int
    pink_hi_v: int
    target_ink_v: float
    lower_prob: float

    @property
    def flexible_reds(self) -> int:
        return self.red_hi_v - self.red_lo_v

    @property
    def ink_lo(self) -> float:
        return self.red_lo_v + self.pink_lo_v / 2

    @property
    def ink_hi(self) -> float:
        return self.red_hi_v + self.pink_hi_v / 2


def placement_bounds(param: SplitParam, black_v: int, black_w: int, new_black_v: int,
                     red_v: int, pink_v: int, red_w: int, pink_w: int) -> PlacementBounds:
    """Limits on reds and old pinks at v after the black move, and the weight on the low option.

    ``lower_prob`` is chosen so that placing the low limits with that
    probability (and the high limits otherwise) gives v the expected ink that
    the marked particle's placement law dictates.
    """
    N = black_v + black_w
    c_v, c_w = param.colour(black_v), param.colour(black_w)
    if red_v + pink_v > c_v or red_w + pink_w > c_w or min(red_v, pink_v, red_w, pink_w) < 0:
        raise ValueError("red and pink counts exceed the non-black capacity")
    if not 0 <= new_black_v <= N:
        raise ValueError("new black count outside 0..N")
    cp_v, cp_w = param.colour(new_black_v), param.colour(N - new_black_v)
    R = red_v + red_w
    P = pink_v + pink_w
    lo_v = max(R - cp_w, 0)
    hi_v = min(cp_v, R)
    hi_w = R - lo_v
    lo_w = R - hi_v
    plo_v = max(P - cp_w + hi_w, 0)
    phi_v = min(cp_v - hi_v, P)
    p_lower = lower_endpoint_prob(param, N, new_black_v)
    # the mark lands on v with the same chance from either endpoint
    target = (R + P / 2) * p_lower
    top = hi_v + phi_v / 2
    den = top - (lo_v + plo_v / 2)
    q_low = (top - target) / den if den > 0 else 0.5
    return PlacementBounds(lo_v, hi_v, lo_w, hi_w, plo_v, phi_v, target, q_low)


@dataclass
class ChameleonState:
    """Mutable, single-owner chameleon configuration (0-based vertex storage).

    ``lab_red[l]`` and ``lab_white[l]`` hold the vertex of the red and white
    carrying label l (1-based labels, slot 0 unused) or NONE.
    """

    param: SplitParam
    black: list[int]
    red: list[int]
    pink: list[int]
    lab_red: list[int]
    lab_white: list[int]
    round_length: float
    round_index: int = 0
    depink_count: int = 0
    time: float = 0.0
    n_labels: int = 0
    n_red: int = 0
    n_pink: int = 0

    @classmethod
    def initial(cls, param: SplitParam, black, x: int, round_length: float = float("inf")) -> "ChameleonState":
        """All non-black particles at x (1-based) red, everything else white, then label."""
        black = list(black)
        n = len(black)
        total = param.colour_total(n, sum(black) + 1)
        red = [0] * n
        red[x - 1] = param.colour(black[x - 1])
        st = cls(param, black, red, [0] * n, [NONE] * (total + 1), [NONE] * (total + 1),
                 round_length, n_red=red[x - 1])
        start_round(st)
        return st

    @property
    def n(self) -> int:
        return len(self.black)

    @property
    def total(self) -> int:
        return self.param.colour_total(self.n, sum(self.black) + 1)

    @property
    def n_white(self) -> int:
        return self.total - self.n_red - self.n_pink

    def white(self) -> list[int]:
        c = self.param.colour
        return [c(b) - r - p for b, r, p in zip(self.black, self.red, self.pink)]

    def ink(self) -> list[float]:
        return [r + p / 2 for r, p in zip(self.red, self.pink)]

    @property
    def ink_twice(self) -> int:
        return 2 * self.n_red + self.n_pink

    @property
    def total_ink(self) -> float:
        return self.n_red + self.n_pink / 2

    def labels_red(self) -> tuple[int, ...]:
        """1-based vertex per label 1..total, 0 for none."""
        return tuple(v + 1 for v in self.lab_red[1:])

    def labels_white(self) -> tuple[int, ...]:
        return tuple(v + 1 for v in self.lab_white[1:])

    def copy(self) -> "ChameleonState":
        return ChameleonState(self.param, list(self.black), list(self.red), list(self.pink),
                              list(self.lab_red), list(self.lab_white), self.round_length,
                              self.round_index, self.depink_count, self.time, self.n_labels,
                              self.n_red, self.n_pink)

    def check(self):
        c = self.param.colour
        for v, (b, r, p) in enumerate(zip(self.black, self.red, self.pink)):
            if r < 0 or p < 0 or r + p > c(b):
                raise ChameleonConsistencyError(f"vertex {v + 1}: red {r}, pink {p}, capacity {c(b)}")
        if sum(self.red) != self.n_red or sum(self.pink) != self.n_pink:
            raise ChameleonConsistencyError("colour totals out of sync")
        white = self.white()
        for l in range(1, len(self.lab_red)):
            vr, vw = self.lab_red[l], self.lab_white[l]
            if (vr == NONE) != (vw == NONE):
                raise ChameleonConsistencyError(f"label {l} is half-paired")
        for v in range(self.n):
            if sum(1 for x in self.lab_red if x == v) > self.red[v]:
                raise ChameleonConsistencyError(f"more red labels than reds at {v + 1}")
            if sum(1 for x in self.lab_white if x == v) > white[v]:
                raise ChameleonConsistencyError(f"more white labels than whites at {v + 1}")


def start_round(st: ChameleonState) -> ChameleonState:
    """Pair min(#red, #white) reds and whites, labelling both in vertex order."""
    white = st.white()
    n_lab = min(st.n_red, st.n_white)
    total = len(st.lab_red) - 1
    lab_r = [NONE] * (total + 1)
    lab_w = [NONE] * (total + 1)
    for counts, lab in ((st.red, lab_r), (white, lab_w)):
        l = 1
        for v, c in enumerate(counts):
            for _ in range(c):
                if l > n_lab:
                    break
                lab[l] = v
                l += 1
    st.lab_red, st.lab_white, st.n_labels = lab_r, lab_w, n_lab
    return st


def depink_due(st: ChameleonState) -> bool:
    return st.n_pink >= min(st.n_red, st.n_white)


def end_round(st: ChameleonState, coin: int) -> bool:
    """Apply the end-of-round rule, relabel, and report whether a depinking happened."""
    fired = depink_due(st)
    if fired:
        if coin:
            st.red = [r + p for r, p in zip(st.red, st.pink)]
            st.n_red += st.n_pink
        st.pink = [0] * st.n
        st.n_pink = 0
        st.depink_count += 1
    st.round_index += 1
    start_round(st)
    return fired


def depink_jump(param: SplitParam, total: int, ink: int) -> int:
    """Size of the ink move at a depinking that starts from ``ink`` red-equivalents."""
    return ceil(min(ink, total - ink) / 3)


def chameleon_step(param: SplitParam, st: ChameleonState, e, u_b: float, u_c: float,
                   modified: bool = False) -> ChameleonState:
    """Ring edge e=(v, w) (1-based) and update the state in place.

    Blacks move by the ranked inverse CDF of u_b; every other choice comes
    from a counter-based generator keyed by u_c. After the lower limits are
    placed, a draw decides between the split branch (probability
    2*min(q, 1-q), q the low-option weight) and the direct branch. The
    split branch may recolour paired red/white couples pink, one pink per
    endpoint. The reds still in the pile then all go to one side: a fair
    coin picks it in the split branch, and q picks it in the direct branch.
    Old pinks take the limit that matches that side. Sending reds and old
    pinks as one block keeps both endpoints within capacity, and the chance
    of the low option is still q, so the expected ink at v is unchanged.
    """
    v, w = sorted(e)
    return _step(st, v - 1, w - 1, u_b, u_c, modified)


def _shuffled(g, items: list) -> list:
    if len(items) < 2:
        return list(items)
    return [items[i] for i in g.permutation(len(items))]


def place_lower_bounds(g, nonpaired: list, paired: list, lo_v: int, lo_w: int):
    """Pick lo_v + lo_w reds, non-paired ones first, and split them uniformly between v and w.

    Returns (reds to v, reds to w, reds left in the pile).
    """
    pool = _shuffled(g, nonpaired) + _shuffled(g, paired)
    need = lo_v + lo_w
    chosen = _shuffled(g, pool[:need])
    return chosen[:lo_v], chosen[lo_v:], pool[need:]


def _step(st: ChameleonState, i: int, j: int, u_b: float, u_c: float, modified: bool,
          bounds_out: list | None = None) -> ChameleonState:
    param = st.param
    black, red, pink = st.black, st.red, st.pink
    lab_r, lab_w = st.lab_red, st.lab_white
    Bv, Bw = black[i], black[j]
    N = Bv + Bw
    kp = betabin_sample(N, param, u_b) if N else 0
    Rv, Rw, Pv, Pw = red[i], red[j], pink[i], pink[j]
    R, P = Rv + Rw, Pv + Pw
    cp_v, cp_w = param.colour(kp), param.colour(N - kp)
    Wv = param.colour(Bv) - Rv - Pv
    Ww = param.colour(Bw) - Rw - Pw
    if R == 0 and P == 0:
        # only whites on the edge
        lw_edge = [l for l in range(1, st.n_labels + 1) if lab_w[l] == i or lab_w[l] == j]
        if lw_edge:
            _place_whites(expand_uniform(u_c), lw_edge, Wv + Ww, cp_v, lab_w, i, j)
        black[i], black[j] = kp, N - kp
        return st
    bnd = placement_bounds(param, Bv, Bw, kp, Rv, Pv, Rw, Pw)
    if bounds_out is not None:
        bounds_out.append(bnd)
    q_low = min(max(bnd.lower_prob, 0.0), 1.0)
    g = expand_uniform(u_c)
    # the first two draws are reserved: branch choice, then side choice
    branch = float(g.random())
    side = float(g.random())
    on_edge = (i, j)
    new_pink = 0
    placed_v: list[int] = []   # labels of reds ending on v
    placed_w: list[int] = []
    pinkened: list[int] = []
    if R > 0:
        lab_edge = [l for l in range(1, st.n_labels + 1) if lab_r[l] in on_edge]
        lab_v = sum(1 for l in lab_edge if lab_r[l] == i)
        lab_w_cnt = len(lab_edge) - lab_v
        paired = [l for l in lab_edge if lab_w[l] in on_edge]
        # unlabelled reds are anonymous and carry label 0
        nonpaired = [0] * (Rv - lab_v + Rw - lab_w_cnt) + [l for l in lab_edge if lab_w[l] not in on_edge]
        to_v, to_w, rest = place_lower_bounds(g, nonpaired, paired, bnd.red_lo_v, bnd.red_lo_w)
        placed_v.extend(to_v)
        placed_w.extend(to_w)
        go_split = branch < 2 * min(q_low, 1 - q_low)
        if go_split:
            left_paired = [l for l in rest if l and lab_w[l] in on_edge]
            k = len(left_paired)
            if modified:
                cap = k
            else:
                q = min(st.n_red, st.n_white)
                cap = ceil((q + st.n_pink / 2) / 3) - st.n_pink // 2
            n_new = max(0, min(k, cap))
            if n_new:
                pinkened = _shuffled(g, left_paired)[:n_new]
                gone = set(pinkened)
                rest = [l for l in rest if not (l and l in gone)]
                new_pink = n_new
            to_v = side < 0.5
        else:
            to_v = q_low < 0.5
        (placed_v if to_v else placed_w).extend(rest)
        old_pink_v = bnd.pink_hi_v if to_v else bnd.pink_lo_v
    else:
        old_pink_v = bnd.pink_lo_v if branch < q_low else bnd.pink_hi_v
    red_v, red_w = len(placed_v), len(placed_w)
    pink_v = new_pink + old_pink_v
    pink_w = new_pink + (P - old_pink_v)
    white_v = cp_v - red_v - pink_v
    white_w = cp_w - red_w - pink_w
    if white_v < 0 or white_w < 0 or white_v + white_w != Wv + Ww - new_pink:
        raise ChameleonConsistencyError(
            f"infeasible placement on edge ({i + 1}, {j + 1}): whites {white_v}, {white_w}")
    for l in pinkened:
        lab_r[l] = NONE
        lab_w[l] = NONE
    for l in placed_v:
        if l:
            lab_r[l] = i
    for l in placed_w:
        if l:
            lab_r[l] = j
    lw_edge = [l for l in range(1, st.n_labels + 1) if lab_w[l] == i or lab_w[l] == j]
    if lw_edge:
        _place_whites(g, lw_edge, white_v + white_w, cp_v - red_v - pink_v, lab_w, i, j)
    black[i], black[j] = kp, N - kp
    red[i], red[j] = red_v, red_w
    pink[i], pink[j] = pink_v, pink_w
    st.n_red -= new_pink
    st.n_pink += 2 * new_pink
    return st


def _place_whites(g, labelled: list[int], n_white: int, n_white_v: int, lab_w: list[int], i: int, j: int):
    """Send a uniform n_white_v of the n_white pooled whites to v; only labelled ones are tracked."""
    if n_white_v <= 0:
        for l in labelled:
            lab_w[l] = j
        return
    if n_white_v >= n_white:
        for l in labelled:
            lab_w[l] = i
        return
    # labelled whites occupy slots 0..len-1 of the pool
    picks = g.permutation(n_white)[: len(labelled)]
    for l, slot in zip(labelled, picks.tolist()):
        lab_w[l] = i if slot < n_white_v else j


@dataclass
class ChameleonRun:
    absorbed: bool
    fill: bool | None
    time: float
    events: int
    initial_ink: float
    depink_times: list[float] = field(default_factory=list)
    depink_inks: list[float] = field(default_factory=list)
    ink_changes_between_depinkings: int = 0
    samples: list[tuple[float, tuple[int, ...], tuple[float, ...]]] = field(default_factory=list)
    trace: list[tuple[float, float, int, int, int]] = field(default_factory=list)
    state: ChameleonState | None = None


def recommended_round_length(g: WeightedGraph) -> float:
    """Twice the largest expected meeting time on the half-weight graph."""
    return 2.0 * max_meeting_time(g)


def run_chameleon(g: WeightedGraph, param: SplitParam, black0, x: int, T: float, stream: EventStream,
                  mode: str = "standard", t_max: float = float("inf"), stop_on_absorb: bool = True,
                  sample_times=None, record: str = "ink", check: bool = False,
                  state: ChameleonState | None = None) -> ChameleonRun:
    """Run the chameleon process until ink absorbs or t_max passes.

    Round boundaries at multiples of T are handled before any ring at the
    same instant. ``record='full'`` keeps a per-event trace of
    (time, total ink, #red, #pink, depink count).
    """
    if T <= 0:
        raise ValueError("round length must be positive")
    if mode not in ("standard", "modified"):
        raise ValueError(f"unknown mode {mode!r}")
    modified = mode == "modified"
    st = state if state is not None else ChameleonState.initial(param, black0, x, T)
    st.round_length = T
    total = st.total
    pairs = g.edge_pairs0()
    times = sorted(sample_times or [])
    si = 0
    run = ChameleonRun(False, None, 0.0, 0, st.total_ink, state=st)
    full = record == "full"
    next_round = (st.round_index + 1) * T
    i_ev = 0

    def absorbed() -> bool:
        return st.ink_twice == 0 or st.ink_twice == 2 * total

    def take_samples(upto: float, inclusive: bool):
        nonlocal si
        while si < len(times) and (times[si] < upto or (inclusive and times[si] <= upto)):
            run.samples.append((times[si], tuple(st.black), tuple(st.ink())))
            si += 1

    while True:
        ev = stream.event(i_ev)
        while next_round <= ev.time and next_round <= t_max:
            take_samples(next_round, False)
            before = st.ink_twice
            if end_round(st, stream.coin(st.round_index + 1)):
                run.depink_times.append(next_round)
                run.depink_inks.append(st.total_ink)
            elif st.ink_twice != before:
                run.ink_changes_between_depinkings += 1
            st.time = next_round
            next_round = (st.round_index + 1) * T
            if stop_on_absorb and absorbed():
                break
        if stop_on_absorb and absorbed():
            run.absorbed = True
            break
        if ev.time > t_max:
            break
        take_samples(ev.time, False)
        a, b = pairs[ev.edge]
        before = st.ink_twice
        _step(st, a, b, ev.ub, ev.uc, modified)
        if st.ink_twice != before:
            run.ink_changes_between_depinkings += 1
        if check:
            st.check()
        st.time = ev.time
        i_ev += 1
        if full:
            run.trace.append((ev.time, st.total_ink, st.n_red, st.n_pink, st.depink_count))
    if not run.absorbed and absorbed():
        run.absorbed = True
    if run.absorbed:
        run.fill = st.ink_twice == 2 * total
    if t_max != float("inf"):
        take_samples(t_max, True)
    run.time = st.time
    run.events = i_ev
    return run
