"""Reader for the sectioned ``key = value`` scenario format.

The grammar is in ``docs/scenario-grammar.ebnf``. Parsing is strict: unknown
sections, unknown keys, duplicate keys and missing required keys are all
errors that carry a line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from .civiltime import CivilTime, DstRule
from .clocknet import ClockModel, Link, Message, Node, Scenario, SyncSession, Tick
from .errors import ParseError, SimultaneityError

_HEADER = re.compile(r"^\[\s*([a-z_]+)((?:\s+[A-Za-z0-9_.\-]+)*)\s*\]\s*$")
_ASSIGN = re.compile(r"^([a-z_][a-z0-9_]*)\s*=\s*(.*?)\s*$")

# section kind -> (number of names in the header, required keys, optional keys)
SECTIONS: dict[str, tuple[int, set, set]] = {
    "scenario": (0, set(), {"name", "seed", "conventions", "description"}),
    "node": (1, set(), {"position_ns", "offset_ns", "rate_ppb", "noise_ns"}),
    "link": (2, set(), {"delay_ns", "delay_ab_ns", "delay_ba_ns", "jitter_ns"}),
    "message": (1, {"src", "dst", "at_ns"}, {"count", "interval_ns"}),
    "tick": (1, {"node", "at_ns"}, set()),
    "sync": (1, {"master", "slave"}, {"start_ns", "repetitions", "interval_ns", "residence_ns"}),
    "dst": (0, {"start", "end"}, {"base_offset_s", "dst_offset_s"}),
    "smear": (0, set(), {"table", "window_s", "placement", "leap_index", "sample_step_s"}),
    "rates": (0, set(), {"preset", "speed_m_s", "phi_delta_m2_s2"}),
    "chsh": (0, set(), {"n_angles", "refine"}),
}
SINGLETONS = {"scenario", "dst", "smear", "rates", "chsh"}


@dataclass
class _Section:
    kind: str
    names: list[str]
    line: int
    values: dict = field(default_factory=dict)  # key -> (value, line, column)


@dataclass(frozen=True)
class SmearConfig:
    table: str = "synthetic_one_leap.csv"
    window_s: int = 86_400
    placement: str = "end"
    leap_index: int = 0
    sample_step_s: int = 3600


@dataclass(frozen=True)
class RatesConfig:
    preset: Optional[str] = "gps"
    speed_m_s: Optional[float] = None
    phi_delta_m2_s2: Optional[float] = None


@dataclass(frozen=True)
class ChshConfig:
    n_angles: int = 90
    refine: int = 6


@dataclass(frozen=True)
class ScenarioDocument:
    name: str
    scenario: Scenario
    description: str = ""
    dst: Optional[DstRule] = None
    smear: Optional[SmearConfig] = None
    rates: Optional[RatesConfig] = None
    chsh: Optional[ChshConfig] = None


class _Reader:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def fail(self, message: str, line: int, column: int = 1):
        raise ParseError(message, line, column, self.source)

    def sections(self) -> list[_Section]:
        out: list[_Section] = []
        seen_singletons: dict[str, int] = {}
        seen_named: set = set()
        for lineno, raw in enumerate(self.text.splitlines(), start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            indent = len(raw) - len(raw.lstrip()) + 1
            if stripped.startswith("["):
                m = _HEADER.match(stripped)
                if not m:
                    self.fail("malformed section header", lineno, indent)
                kind, names = m.group(1), m.group(2).split()
                if kind not in SECTIONS:
                    self.fail(f"unknown section [{kind}]", lineno, indent + 1)
                arity = SECTIONS[kind][0]
                if len(names) != arity:
                    self.fail(f"[{kind}] takes {arity} name(s), got {len(names)}", lineno, indent)
                if kind in SINGLETONS:
                    if kind in seen_singletons:
                        self.fail(f"[{kind}] repeated (first at line {seen_singletons[kind]})", lineno, indent)
                    seen_singletons[kind] = lineno
                else:
                    ident = (kind, tuple(names))
                    if ident in seen_named:
                        self.fail(f"duplicate section [{kind} {' '.join(names)}]", lineno, indent)
                    seen_named.add(ident)
                out.append(_Section(kind, names, lineno))
                continue
            m = _ASSIGN.match(stripped)
            if not m:
                self.fail("expected 'key = value'", lineno, indent)
            if not out:
                self.fail("assignment outside any section", lineno, indent)
            section = out[-1]
            key, value = m.group(1), m.group(2)
            _, required, optional = SECTIONS[section.kind]
            if key not in required | optional:
                self.fail(f"unknown key {key!r} in [{section.kind}]", lineno, indent)
            if key in section.values:
                self.fail(f"duplicate key {key!r}", lineno, indent)
            if value == "":
                self.fail(f"empty value for {key!r}", lineno, indent + len(key))
            section.values[key] = (value, lineno, raw.index(value, raw.index("=") + 1) + 1)
        for section in out:
            missing = SECTIONS[section.kind][1] - section.values.keys()
            if missing:
                self.fail(f"[{section.kind}] missing required key(s) {sorted(missing)}", section.line)
        return out

    def int_(self, section: _Section, key: str, default=None) -> int:
        if key not in section.values:
            return default
        value, line, col = section.values[key]
        try:
            return int(value.replace("_", ""), 10)
        except ValueError:
            self.fail(f"{key}: expected an integer, got {value!r}", line, col)

    def float_(self, section: _Section, key: str, default=None) -> float:
        if key not in section.values:
            return default
        value, line, col = section.values[key]
        try:
            return float(value.replace("_", ""))
        except ValueError:
            self.fail(f"{key}: expected a number, got {value!r}", line, col)

    def str_(self, section: _Section, key: str, default=None) -> str:
        return section.values[key][0] if key in section.values else default

    def decimals(self, section: _Section, key: str) -> tuple:
        if key not in section.values:
            return ()
        value, line, col = section.values[key]
        try:
            return tuple(Fraction(v.strip()) for v in value.split(","))
        except ValueError:
            self.fail(f"{key}: expected comma-separated decimals", line, col)

    def civil(self, section: _Section, key: str) -> CivilTime:
        value, line, col = section.values[key]
        try:
            return CivilTime.parse(value)
        except SimultaneityError as exc:
            self.fail(str(exc), line, col)


def parse_scenario(text: str, source: str = "<scenario>") -> ScenarioDocument:
    r = _Reader(text, source)
    sections = r.sections()
    nodes, links, traffic = [], [], []
    name, description, seed, conventions = Path(source).stem, "", 0, ()
    dst = smear = rates = chsh = None
    for s in sections:
        if s.kind == "scenario":
            name = r.str_(s, "name", name)
            description = r.str_(s, "description", "")
            seed = r.int_(s, "seed", 0)
            conventions = r.decimals(s, "conventions")
        elif s.kind == "node":
            clock = ClockModel(r.int_(s, "offset_ns", 0), r.int_(s, "rate_ppb", 0), r.int_(s, "noise_ns", 0))
            nodes.append(Node(s.names[0], clock, r.int_(s, "position_ns")))
        elif s.kind == "link":
            both = r.int_(s, "delay_ns")
            ab, ba = r.int_(s, "delay_ab_ns", both), r.int_(s, "delay_ba_ns", both)
            if ab is None or ba is None:
                r.fail("[link] needs delay_ns or both delay_ab_ns and delay_ba_ns", s.line)
            links.append(Link(s.names[0], s.names[1], ab, ba, r.int_(s, "jitter_ns", 0)))
        elif s.kind == "message":
            count, interval = r.int_(s, "count", 1), r.int_(s, "interval_ns", 0)
            if count < 1:
                r.fail("count must be >= 1", s.line)
            at = r.int_(s, "at_ns")
            for k in range(count):
                mid = s.names[0] if count == 1 else f"{s.names[0]}.{k}"
                traffic.append(Message(mid, r.str_(s, "src"), r.str_(s, "dst"), at + k * interval))
        elif s.kind == "tick":
            traffic.append(Tick(s.names[0], r.str_(s, "node"), r.int_(s, "at_ns")))
        elif s.kind == "sync":
            traffic.append(
                SyncSession(
                    s.names[0],
                    r.str_(s, "master"),
                    r.str_(s, "slave"),
                    r.int_(s, "start_ns", 0),
                    r.int_(s, "repetitions", 1),
                    r.int_(s, "interval_ns", 1_000_000),
                    r.int_(s, "residence_ns", 0),
                )
            )
        elif s.kind == "dst":
            try:
                dst = DstRule(
                    r.civil(s, "start"), r.civil(s, "end"), r.int_(s, "base_offset_s", 0), r.int_(s, "dst_offset_s", 3600)
                )
            except SimultaneityError as exc:
                r.fail(str(exc), s.line)
        elif s.kind == "smear":
            smear = SmearConfig(
                r.str_(s, "table", SmearConfig.table),
                r.int_(s, "window_s", SmearConfig.window_s),
                r.str_(s, "placement", SmearConfig.placement),
                r.int_(s, "leap_index", 0),
                r.int_(s, "sample_step_s", SmearConfig.sample_step_s),
            )
        elif s.kind == "rates":
            preset = r.str_(s, "preset")
            speed, phi = r.float_(s, "speed_m_s"), r.float_(s, "phi_delta_m2_s2")
            if preset is None and (speed is None or phi is None):
                r.fail("[rates] needs preset = gps or both speed_m_s and phi_delta_m2_s2", s.line)
            if preset not in (None, "gps"):
                value, line, col = s.values["preset"]
                r.fail(f"unknown rates preset {value!r}", line, col)
            rates = RatesConfig(preset, speed, phi)
        elif s.kind == "chsh":
            chsh = ChshConfig(r.int_(s, "n_angles", 90), r.int_(s, "refine", 6))
    scenario = Scenario(tuple(nodes), tuple(links), tuple(traffic), conventions, seed)
    try:
        scenario.validate()
    except SimultaneityError as exc:
        raise ParseError(str(exc), 1, 1, source) from None
    return ScenarioDocument(name, scenario, description, dst, smear, rates, chsh)


def load_scenario(path) -> ScenarioDocument:
    path = Path(path)
    return parse_scenario(path.read_text(), str(path))


def bundled_scenarios() -> list[str]:
    files = resources.files("simultaneity.scenarios")
    return sorted(p.name[: -len(".scn")] for p in files.iterdir() if p.name.endswith(".scn"))


def bundled_scenario_path(name: str):
    return resources.files("simultaneity.scenarios").joinpath(f"{name}.scn")


def load_bundled(name: str) -> ScenarioDocument:
    path = bundled_scenario_path(name)
    return parse_scenario(path.read_text(), f"{name}.scn")
