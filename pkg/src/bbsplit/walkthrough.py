"""Two-step worked example of the chameleon process next to the marked process on the line of 7.

The example starts a round with all non-black particles at the marked vertex
red, rings {1,2} at time 1 (blacks unchanged, a labelled white moves) and
{2,3} at time 2 (the mark lands on 2, one pink appears on each endpoint).
The uniforms driving both rings are found by a deterministic grid search.
"""

from __future__ import annotations

from itertools import product

from .chameleon import ChameleonState, chameleon_step
from .kernel import SplitParam, betabin_sample
from .marked import mark_update, unmarked_update

BLACK0 = (1, 0, 1, 0, 1, 0, 0)
MARKED0 = 3


def panel(label: str, time: float, edge, st: ChameleonState, unmarked, marked: int) -> dict:
    st.check()
    return {
        "panel": label,
        "time": time,
        "edge": list(edge) if edge else None,
        "marked_process": {"unmarked": list(unmarked), "marked": marked},
        "black": list(st.black),
        "red": list(st.red),
        "pink": list(st.pink),
        "white": st.white(),
        "red_labels": list(st.labels_red()[: st.n_labels]),
        "white_labels": list(st.labels_white()[: st.n_labels]),
        "ink": st.ink(),
    }


def _grid(size: int):
    return [(i + 0.5) / size for i in range(size)]


def _first_ring(param: SplitParam, st: ChameleonState, size: int):
    """Blacks unchanged on {1,2} and exactly one labelled white moves from 1 to 2."""
    before = st.labels_white()
    for ub, uc in product(_grid(size), repeat=2):
        if betabin_sample(st.black[0] + st.black[1], param, ub) != st.black[0]:
            continue
        trial = st.copy()
        chameleon_step(param, trial, (1, 2), ub, uc)
        after = trial.labels_white()
        moved = [l for l, (x, y) in enumerate(zip(before, after), 1) if x != y]
        if moved == [1] and before[0] == 1 and after[0] == 2:
            return ub, uc, trial
    raise RuntimeError("no uniforms on the grid realise the first ring")


def _second_ring(param: SplitParam, st: ChameleonState, unmarked, marked: int, size: int):
    """Mark moves to 2 and label 1 turns into one pink on each of vertices 2 and 3."""
    for ub, uc in product(_grid(size), repeat=2):
        if mark_update(param, ub, uc, (2, 3), unmarked, marked) != 2:
            continue
        trial = st.copy()
        chameleon_step(param, trial, (2, 3), ub, uc)
        if trial.pink[1] == 1 and trial.pink[2] == 1 and trial.n_pink == 2:
            return ub, uc, trial
    raise RuntimeError("no uniforms on the grid realise the second ring")


def replay_walkthrough(grid: int = 64) -> dict:
    """Transcript of the three panels, with the uniforms used at each ring."""
    param = SplitParam(1, 1)
    st = ChameleonState.initial(param, BLACK0, MARKED0)
    unmarked = BLACK0
    marked = MARKED0
    assert st.red[MARKED0 - 1] == param.colour(BLACK0[MARKED0 - 1]) == st.n_red
    assert st.n_red < st.n_white and st.n_labels == st.n_red
    panels = [panel("initial", 0.0, None, st, unmarked, marked)]

    ub1, uc1, st = _first_ring(param, st, grid)
    marked = mark_update(param, ub1, uc1, (1, 2), unmarked, marked)
    unmarked = unmarked_update(param, ub1, (1, 2), unmarked)
    assert tuple(st.black) == unmarked == BLACK0
    panels.append(panel("after ring on {1,2}", 1.0, (1, 2), st, unmarked, marked))
    panels[-1]["uniforms"] = {"ub": ub1, "uc": uc1}

    ub2, uc2, st = _second_ring(param, st, unmarked, marked, grid)
    marked = mark_update(param, ub2, uc2, (2, 3), unmarked, marked)
    unmarked = unmarked_update(param, ub2, (2, 3), unmarked)
    assert tuple(st.black) == unmarked and marked == 2
    panels.append(panel("after ring on {2,3}", 2.0, (2, 3), st, unmarked, marked))
    panels[-1]["uniforms"] = {"ub": ub2, "uc": uc2}
    return {"graph": "line:7", "s": str(param), "panels": panels}
