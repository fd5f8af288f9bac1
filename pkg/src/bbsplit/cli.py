"""Command-line harness: simulations, exact computations, the verify suite and the worked example."""

from __future__ import annotations

import argparse
import csv
import io
import json
import subprocess
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from . import checks
from .analysis import (bound_report, build_chain, exact_mixing_time, exact_tv_curve, line_eigenvalue,
                       line_lower_bound, mc_tv_mixing)
from .chameleon import recommended_round_length, run_chameleon
from .config import ConfigError, ExperimentConfig
from .graph import GraphError
from .marked import simulate_marked
from .meeting import exact_meeting_times, mc_meeting_time
from .simulate import simulate_bbsp
from .stream import EventStream, replica_rng
from .walkthrough import replay_walkthrough

FLAG_KEYS = ("graph", "n", "s", "m", "seed", "replicas", "t_end", "sample_times", "T", "mode", "record",
             "start", "marked", "eps", "c_eps", "raw_rate")


def version_string() -> str:
    try:
        v = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        v = "0.0.0"
    try:
        out = subprocess.run(["git", "describe", "--always", "--tags"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{v}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return v


class Table:
    def __init__(self, header: list[str]):
        self.header = header
        self.rows: list[list] = []

    def add(self, *row):
        self.rows.append(list(row))


def _cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    return str(x)


def emit(result: dict, table: Table | None, cfg: ExperimentConfig | None, out: str | None):
    meta = {"version": version_string()}
    if cfg is not None:
        meta["config"] = cfg.to_dict()
        meta["config_hash"] = cfg.digest()
    if out and out.endswith(".csv"):
        if table is None:
            raise SystemExit("this command has no tabular output; use a .json path")
        buf = io.StringIO()
        buf.write(f"# version={meta['version']}\n")
        if cfg is not None:
            buf.write(f"# config_hash={meta['config_hash']}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.header)
        for row in table.rows:
            w.writerow([_cell(x) for x in row])
        Path(out).write_text(buf.getvalue())
        return
    doc = dict(meta, **result)
    if table is not None:
        doc["table"] = {"header": table.header, "rows": table.rows}
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _vertex_cols(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{v}" for v in range(1, n + 1)]


def _times(cfg: ExperimentConfig) -> list[float]:
    return list(cfg.sample_times) or [cfg.t_end]


def cmd_simulate(cfg: ExperimentConfig):
    g, param = cfg.graph_obj(), cfg.param
    times = _times(cfg)
    tab = Table(["replica", "t"] + _vertex_cols("x", g.n))
    for r in range(cfg.replicas):
        traj = simulate_bbsp(g, param, cfg.start_state(), EventStream(g, cfg.seed, r, cfg.raw_rate),
                             max(times), sample_times=times)
        for t, x in traj.samples:
            tab.add(r, t, *x)
    return {"command": "simulate"}, tab


def cmd_mabb(cfg: ExperimentConfig):
    g, param = cfg.graph_obj(), cfg.param
    times = _times(cfg)
    start = _unmarked_start(cfg)
    tab = Table(["replica", "t"] + _vertex_cols("x", g.n) + ["marked"])
    for r in range(cfg.replicas):
        traj = simulate_marked(g, param, start, cfg.marked, EventStream(g, cfg.seed, r, cfg.raw_rate),
                               max(times), sample_times=times)
        for t, x, mk in traj.samples:
            tab.add(r, t, *x, mk)
    return {"command": "mabb", "unmarked_start": list(start)}, tab


def _unmarked_start(cfg: ExperimentConfig) -> tuple[int, ...]:
    """Counts of the m-1 unmarked particles; ``start`` includes the marked one."""
    if cfg.start is None:
        return tuple([cfg.m - 1] + [0] * (cfg.n - 1))
    x = list(cfg.start)
    if x[cfg.marked - 1] < 1:
        raise ConfigError("start must hold the marked particle at the marked vertex")
    x[cfg.marked - 1] -= 1
    return tuple(x)


def cmd_cham(cfg: ExperimentConfig):
    """With sample times, ink profiles at those times; otherwise one summary row per run to absorption."""
    g, param = cfg.graph_obj(), cfg.param
    T = cfg.T or recommended_round_length(g)
    black = _unmarked_start(cfg)
    sampled = bool(cfg.sample_times)
    if sampled:
        tab = Table(["replica", "t"] + _vertex_cols("black", g.n) + _vertex_cols("ink", g.n))
    else:
        tab = Table(["replica", "absorbed", "fill", "time", "events", "depinkings", "initial_ink", "final_ink"])
    fills = absorbed = 0
    for r in range(cfg.replicas):
        run = run_chameleon(g, param, black, cfg.marked, T, EventStream(g, cfg.seed, r, cfg.raw_rate),
                            mode=cfg.mode, t_max=max(cfg.sample_times) if sampled else float("inf"),
                            stop_on_absorb=not sampled, sample_times=cfg.sample_times or None,
                            record=cfg.record)
        absorbed += run.absorbed
        fills += bool(run.fill)
        if sampled:
            for t, b, ink in run.samples:
                tab.add(r, t, *b, *ink)
        else:
            tab.add(r, int(run.absorbed), "" if run.fill is None else int(run.fill), run.time, run.events,
                    len(run.depink_times), run.initial_ink, run.state.total_ink)
    total = param.colour_total(g.n, cfg.m)
    summary = {"command": "cham", "round_length": T, "black_start": list(black),
               "absorbed": absorbed, "fills": fills,
               "fill_target": param.colour(black[cfg.marked - 1]) / total}
    return summary, tab


def cmd_meet(cfg: ExperimentConfig):
    g = cfg.graph_obj()
    sol = exact_meeting_times(g, cfg.raw_rate)
    tab = Table(["i", "j", "expected_meeting"])
    for i in range(g.n):
        for j in range(g.n):
            tab.add(i + 1, j + 1, float(sol.expected_meeting[i, j]))
    res = {"command": "meet", "max_expected_meeting": sol.max_entry}
    if cfg.replicas > 1:
        i, j = cfg.marked, g.n if cfg.marked != g.n else 1
        mean, se = mc_meeting_time(g, i, j, replica_rng(cfg.seed), cfg.replicas, cfg.raw_rate)
        res["monte_carlo"] = {"i": i, "j": j, "mean": mean, "se": se,
                              "exact": float(sol.expected_meeting[i - 1, j - 1])}
    return res, tab


def cmd_mix_exact(cfg: ExperimentConfig):
    g, param = cfg.graph_obj(), cfg.param
    chain = build_chain(g, param, cfg.m, cfg.raw_rate)
    times = _times(cfg)
    curve = exact_tv_curve(chain, cfg.start_state(), times)
    tab = Table(["t", "tv"])
    for t, d in zip(times, curve):
        tab.add(t, float(d))
    return {"command": "mix-exact", "states": len(chain.states),
            "t_mix": exact_mixing_time(chain, cfg.eps), "eps": cfg.eps}, tab


def cmd_mix_mc(cfg: ExperimentConfig):
    g, param = cfg.graph_obj(), cfg.param
    times = _times(cfg)
    res = mc_tv_mixing(g, param, cfg.m, cfg.start_state(), times, cfg.replicas, cfg.seed)
    tab = Table(["t", "tv", "bias_bound"])
    for row in zip(res["times"], res["tv"], res["bias_bound"]):
        tab.add(*row)
    return {"command": "mix-mc", "replicas": cfg.replicas, "states": res["states"]}, tab


def cmd_lower_bound(cfg: ExperimentConfig):
    res = line_lower_bound(cfg.n, cfg.m, cfg.param, cfg.eps, cfg.c_eps)
    res["eigenvalue"] = line_eigenvalue(cfg.n)
    return dict({"command": "lower-bound"}, **res), None


def cmd_bounds(cfg: ExperimentConfig):
    rep = bound_report(cfg.graph_obj(), cfg.param, cfg.m, cfg.eps)
    return dict({"command": "bounds"}, **rep.to_dict()), None


def cmd_verify(level: str, out: str | None) -> int:
    suite = checks.quick_checks() if level == "quick" else checks.full_checks()
    results = []
    for fn in suite:
        r = fn()
        print(r.line(), file=sys.stderr)
        results.append(r)
    failed = [r.name for r in results if not r.passed]
    doc = {"level": level, "passed": not failed, "failed": failed,
           "checks": [_jsonable(r.to_dict()) for r in results]}
    emit(doc, None, None, out)
    return 1 if failed else 0


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


COMMANDS = {
    "simulate": cmd_simulate,
    "mabb": cmd_mabb,
    "cham": cmd_cham,
    "meet": cmd_meet,
    "mix-exact": cmd_mix_exact,
    "mix-mc": cmd_mix_mc,
    "lower-bound": cmd_lower_bound,
    "bounds": cmd_bounds,
}


def _add_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value file or JSON file; flags override it")
    p.add_argument("--graph", help="line, cycle, complete or file:PATH")
    p.add_argument("--n", type=int)
    p.add_argument("--s", help="split parameter as b/a or an integer")
    p.add_argument("--m", type=int, help="number of particles (including the marked one)")
    p.add_argument("--seed", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--sample-times", dest="sample_times", help="comma separated times")
    p.add_argument("--T", dest="T", type=float, help="round length (default: twice the max meeting time)")
    p.add_argument("--mode", choices=("standard", "modified"))
    p.add_argument("--record", choices=("ink", "full"))
    p.add_argument("--start", help="comma separated initial counts")
    p.add_argument("--marked", type=int, help="vertex of the marked particle")
    p.add_argument("--eps", type=float)
    p.add_argument("--c-eps", dest="c_eps", type=float)
    p.add_argument("--raw-rate", dest="raw_rate", action="store_true", default=None,
                   help="run clocks at the summed edge weight instead of total rate 1")
    p.add_argument("--out", help="output path (.csv or .json); JSON on stdout by default")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbsplit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_flags(sub.add_parser(name))
    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("level", nargs="?", choices=("quick", "full"), default="quick")
    v.add_argument("--out")
    r = sub.add_parser("replay-appendix-c", help="two-step worked example on the line of 7")
    r.add_argument("--grid", type=int, default=64)
    r.add_argument("--out")
    return parser


def config_from_args(args) -> ExperimentConfig:
    raw = {}
    if args.config:
        raw.update(ExperimentConfig.load(args.config).to_dict())
    for key in FLAG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    if args.command in ("mabb", "cham"):
        raw.setdefault("process", "mabb" if args.command == "mabb" else "chameleon")
    return ExperimentConfig.from_mapping(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.level, args.out)
        if args.command == "replay-appendix-c":
            emit(replay_walkthrough(args.grid), None, None, args.out)
            return 0
        cfg = config_from_args(args)
        result, table = COMMANDS[args.command](cfg)
        emit(result, table, cfg, args.out)
    except (ConfigError, GraphError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
