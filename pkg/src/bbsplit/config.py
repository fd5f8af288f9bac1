"""Experiment configuration: a flat key=value text form, with JSON accepted as well."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .graph import graph_from_spec
from .kernel import SplitParam

PROCESSES = ("bbsp", "mabb", "chameleon")
MODES = ("standard", "modified")
RECORDS = ("ink", "full")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Everything that determines a run. Text form: one ``key = value`` per line, ``#`` comments.

    Lists (start, sample_times) are comma separated. ``T`` and ``start`` may be
    left empty for their defaults (twice the max meeting time, all particles
    on vertex 1).
    """

    graph: str = "line"
    n: int = 2
    s: str = "1"
    m: int = 2
    process: str = "bbsp"
    mode: str = "standard"
    T: float | None = None
    seed: int = 0
    replicas: int = 1
    t_end: float = 1.0
    sample_times: tuple[float, ...] = ()
    start: tuple[int, ...] | None = None
    marked: int = 1
    record: str = "ink"
    raw_rate: bool = False
    eps: float = 0.25
    c_eps: float = 0.0

    def __post_init__(self):
        self.validate()

    @property
    def param(self) -> SplitParam:
        return SplitParam.parse(self.s)

    def graph_obj(self):
        return graph_from_spec(self.graph, self.n)

    def start_state(self) -> tuple[int, ...]:
        if self.start is not None:
            return tuple(self.start)
        return tuple([self.m] + [0] * (self.n - 1))

    def validate(self):
        try:
            param = SplitParam.parse(self.s)
        except ValueError as err:
            raise ConfigError(f"s must be a fraction like 3/2 or an integer, got {self.s!r}") from err
        self.s = str(param)
        if self.process not in PROCESSES:
            raise ConfigError(f"process must be one of {PROCESSES}, got {self.process!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.record not in RECORDS:
            raise ConfigError(f"record must be one of {RECORDS}, got {self.record!r}")
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.m < 1:
            raise ConfigError("m must be at least 1")
        if self.replicas < 1:
            raise ConfigError("replicas must be positive")
        if self.t_end < 0 or any(t < 0 for t in self.sample_times):
            raise ConfigError("times must be non-negative")
        if self.T is not None and self.T <= 0:
            raise ConfigError("T must be positive")
        if not 0 < self.eps < 1:
            raise ConfigError("eps must lie in (0, 1)")
        if self.start is not None:
            if len(self.start) != self.n or min(self.start) < 0:
                raise ConfigError(f"start needs {self.n} non-negative counts")
            if sum(self.start) != self.m:
                raise ConfigError(f"start holds {sum(self.start)} particles but m = {self.m}")
        if not 1 <= self.marked <= self.n:
            raise ConfigError("marked must be a vertex 1..n")
        self.sample_times = tuple(sorted(float(t) for t in self.sample_times))

    # serialisation

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sample_times"] = list(self.sample_times)
        d["start"] = None if self.start is None else list(self.start)
        return d

    def to_text(self) -> str:
        lines = []
        for k, v in self.to_dict().items():
            if v is None:
                v = ""
            elif isinstance(v, list):
                v = ",".join(_fmt(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            else:
                v = _fmt(v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for key, val in raw.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}; known keys: {', '.join(known)}")
            kw[key] = _coerce(key, val)
        return cls(**kw)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        stripped = text.strip()
        if stripped.startswith("{"):
            return cls.from_mapping(json.loads(stripped))
        raw = {}
        for no, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {no}: expected key = value")
            k, v = line.split("=", 1)
            raw[k.strip()] = v.strip()
        return cls.from_mapping(raw)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text())


def _fmt(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def _coerce(key: str, val):
    if isinstance(val, str):
        val = val.strip()
    try:
        if key in ("n", "m", "seed", "replicas", "marked"):
            return int(val)
        if key in ("t_end", "eps", "c_eps"):
            return float(val)
        if key == "T":
            return None if val in ("", None) else float(val)
        if key == "raw_rate":
            if isinstance(val, bool):
                return val
            return str(val).lower() in ("1", "true", "yes")
        if key == "sample_times":
            if isinstance(val, str):
                return tuple(float(x) for x in val.split(",") if x.strip())
            return tuple(float(x) for x in val)
        if key == "start":
            if val in ("", None):
                return None
            if isinstance(val, str):
                return tuple(int(x) for x in val.split(","))
            return tuple(int(x) for x in val)
        if key == "s":
            return str(val)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad value for {key}: {val!r}") from err
    return val
