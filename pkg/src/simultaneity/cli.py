"""Command-line front end: ``simultaneity {simulate,convert,sweep,chsh,rates}``.

Exit codes: 0 success, 1 validation/configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import tempfile
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import causal, chsh, civiltime, clocknet, config, conventions, metrics, syncproto
from .errors import ConfigError, SimultaneityError, ValidationError
from .sweep import build_conventions, convention_sweep, exact

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2
ANALYSES = ("sync", "audit", "metrics")


@dataclass
class RunManifest:
    scenario: str
    out: Optional[Path] = None
    analyses: tuple[str, ...] = ANALYSES
    epsilon_grid: tuple = ()
    kappa_grid: tuple = ()
    boost_grid: tuple = ()
    seed: Optional[int] = None
    force: bool = False
    explicit_analyses: bool = False

    def load(self) -> config.ScenarioDocument:
        path = Path(self.scenario)
        if path.exists():
            doc = config.load_scenario(path)
        elif self.scenario in config.bundled_scenarios():
            doc = config.load_bundled(self.scenario)
        else:
            raise ValidationError(
                f"scenario {self.scenario!r} is neither a file nor a bundled scenario "
                f"({', '.join(config.bundled_scenarios())})"
            )
        if self.seed is not None:
            scenario = replace(doc.scenario, seed=self.seed)
            scenario.validate()
            doc = replace(doc, scenario=scenario)
        return doc


def parse_grid(text: str) -> tuple:
    """``"0.1,0.5,0.9"`` or ``"start:stop:step"`` (inclusive) as exact fractions."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (Fraction(p) for p in text.split(":"))
            if step <= 0:
                raise ValidationError(f"grid step must be positive in {text!r}")
            out, k = [], 0
            while start + k * step <= stop:
                out.append(start + k * step)
                k += 1
            return tuple(out)
        return tuple(Fraction(p.strip()) for p in text.split(",") if p.strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"malformed grid {text!r}") from None


# -- file output -----------------------------------------------------------


class _AtomicDir:
    """Write into a hidden sibling directory, then rename it into place."""

    def __init__(self, target: Path, force: bool):
        self.target = target
        self.force = force

    def __enter__(self) -> Path:
        if self.target.exists() and not self.force:
            raise ValidationError(f"output directory {self.target} exists (use --force to replace it)")
        self.target.parent.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(tempfile.mkdtemp(prefix=f".{self.target.name}.", dir=self.target.parent))
        return self.tmp

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is not None:
            shutil.rmtree(self.tmp, ignore_errors=True)
            return
        os.chmod(self.tmp, 0o755)
        if self.target.exists():
            stale = self.target.with_name(f".{self.target.name}.stale")
            os.rename(self.target, stale)
            os.rename(self.tmp, self.target)
            shutil.rmtree(stale)
        else:
            os.rename(self.tmp, self.target)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


# -- analyses --------------------------------------------------------------


def smear_report(cfg: config.SmearConfig) -> dict:
    table = _leap_table(cfg.table)
    events = civiltime.leap_events(table)
    if not events:
        raise ValidationError(f"leap table {cfg.table} has no leap second to smear")
    if not 0 <= cfg.leap_index < len(events):
        raise ValidationError(f"leap_index {cfg.leap_index} out of range (table has {len(events)})")
    leap = events[cfg.leap_index]
    start, end = civiltime.smear_window(leap, cfg.window_s, cfg.placement)
    step = cfg.sample_step_s * civiltime.NS
    samples = []
    t = start - step
    while t <= end + step:
        tai = civiltime.TaiInstant(t)
        samples.append(
            {
                "tai": tai.label().isoformat(),
                "utc": civiltime.render_utc(tai, table),
                "unsmeared_ns": civiltime.unsmeared(tai, leap),
                "smeared_ns": civiltime.smear(tai, leap, cfg.window_s, cfg.placement),
            }
        )
        t += step
    s0 = civiltime.smear(civiltime.TaiInstant(start), leap, cfg.window_s, cfg.placement)
    s1 = civiltime.smear(civiltime.TaiInstant(end), leap, cfg.window_s, cfg.placement)
    return {
        "leap_utc_day_end": str(table.entries[cfg.leap_index + 1][0]),
        "sign": leap.sign,
        "window_s": cfg.window_s,
        "placement": cfg.placement,
        "cumulative_adjustment_ns": (end - start) - (s1 - s0),
        "boundaries_match": s0 == civiltime.unsmeared(civiltime.TaiInstant(start), leap)
        and s1 == civiltime.unsmeared(civiltime.TaiInstant(end), leap),
        "max_rate_deviation_ppb": civiltime.smear_rate_ppb(cfg.window_s),
        "samples": samples,
    }


def _leap_table(name_or_path: Optional[str]) -> civiltime.LeapTable:
    if name_or_path is None:
        return civiltime.load_leap_table()
    path = Path(name_or_path)
    if path.exists():
        return civiltime.load_leap_table(path)
    try:
        return civiltime.bundled_leap_table(name_or_path)
    except FileNotFoundError:
        raise ValidationError(f"leap table {name_or_path!r} not found") from None


def rates_report(cfg: config.RatesConfig) -> dict:
    if cfg.preset == "gps":
        rates = conventions.gps_rates()
    else:
        rates = conventions.relativistic_rate(cfg.speed_m_s, cfg.phi_delta_m2_s2)
    return rates.as_dict()


def chsh_report(n_angles: int = 90, refine: int = 6) -> dict:
    if n_angles < 4:
        raise ValidationError("n_angles must be >= 4")
    value, angles = chsh.grid_search(n_angles, refine)
    return {
        "lhv_max": chsh.lhv_max(),
        "quantum_max": value,
        "tsirelson_bound": chsh.TSIRELSON,
        "optimal_angles_rad": dict(zip(("a", "a_prime", "b", "b_prime"), angles)),
        "n_angles": n_angles,
        "refine": refine,
    }


def simulate(manifest: RunManifest) -> Path:
    doc = manifest.load()
    scenario = doc.scenario
    trace = clocknet.run(scenario)
    do_audit = "audit" in manifest.analyses and (scenario.positioned or manifest.explicit_analyses)
    if do_audit and not scenario.positioned and scenario.nodes:
        raise ConfigError("audit requested but some nodes have no position")
    with _AtomicDir(manifest.out, manifest.force) as out:
        (out / "trace.csv").write_text(clocknet.trace_to_csv(trace))
        (out / "trace.json").write_text(clocknet.trace_to_json(trace))
        if "sync" in manifest.analyses:
            (out / "sync.csv").write_text(syncproto.sync_csv(syncproto.collect_exchanges(trace)))
        if do_audit:
            eps = manifest.epsilon_grid or scenario.conventions or causal.DEFAULT_EPSILONS
            boosts = tuple(float(v) for v in manifest.boost_grid) or causal.DEFAULT_BOOSTS
            report = causal.fito_audit(trace, scenario if scenario.nodes else {}, eps, boosts)
            (out / "fito_audit.json").write_text(report.to_json())
        if "metrics" in manifest.analyses:
            (out / "forbidden_zone.json").write_text(metrics.forbidden_zone(trace, scenario).to_json())
            (out / "owd.csv").write_text(metrics.owd_csv(metrics.samples_from_trace(trace)))
        if doc.smear:
            (out / "smear.json").write_text(_dump(smear_report(doc.smear)))
        if doc.rates:
            (out / "rates.json").write_text(_dump(rates_report(doc.rates)))
        if doc.chsh:
            (out / "chsh.json").write_text(_dump(chsh_report(doc.chsh.n_angles, doc.chsh.refine)))
        (out / "manifest.json").write_text(
            _dump(
                {
                    "scenario": doc.name,
                    "seed": scenario.seed,
                    "analyses": sorted(manifest.analyses),
                    "events": len(trace),
                }
            )
        )
    return manifest.out


SCALES = ("TAI", "UTC", "LOCAL")


def convert(text: str, src: str, dst: str, table: civiltime.LeapTable, rule=None) -> list[str]:
    """Convert a time label between scales; returns one string, or two if ambiguous."""
    src, dst = src.upper(), dst.upper()
    for scale in (src, dst):
        if scale not in SCALES:
            raise ValidationError(f"unknown scale {scale!r}; choose from {SCALES}")
    if "LOCAL" in (src, dst) and rule is None:
        raise ValidationError("LOCAL needs a scenario with a [dst] section")
    label = civiltime.CivilTime.parse(text)
    if src == dst:
        if src == "UTC":
            civiltime.utc_to_tai(label, table)  # rejects labels that never existed
        return [label.isoformat()]
    if src == "TAI":
        utc = [civiltime.tai_to_utc(civiltime.TaiInstant.from_label(label), table)]
    elif src == "LOCAL":
        utc = list(civiltime.local_to_utc(label, rule).candidates)
    else:
        utc = [label]
    out = []
    for u in utc:
        if dst == "UTC":
            out.append(u.isoformat())
        elif dst == "TAI":
            out.append(civiltime.utc_to_tai(u, table).label().isoformat())
        else:
            out.append(civiltime.apply_dst(u, rule).label.isoformat())
    return out


# -- argument handling -----------------------------------------------------


def _analyses(text: Optional[str]) -> tuple[str, ...]:
    if text is None:
        return ANALYSES
    names = tuple(sorted({a.strip() for a in text.split(",") if a.strip()}))
    unknown = set(names) - set(ANALYSES)
    if unknown:
        raise ValidationError(f"unknown analyses {sorted(unknown)}; choose from {ANALYSES}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simultaneity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    grids = argparse.ArgumentParser(add_help=False)
    grids.add_argument("--epsilon-grid", help="e.g. 0.1,0.5,0.9 or 0.05:0.95:0.05")
    grids.add_argument("--kappa-grid", help="kappa values in (-1, 1), mapped to epsilon")
    grids.add_argument("--boost-grid", help="frame velocities in (-1, 1)")
    grids.add_argument("--seed", type=int, help="override the scenario seed")

    p = sub.add_parser("simulate", parents=[grids], help="run a scenario and write trace and reports")
    p.add_argument("--scenario", required=True, help="scenario file or bundled scenario name")
    p.add_argument("--out", required=True, type=Path, help="output directory (created atomically)")
    p.add_argument("--analyses", help=f"comma list from {','.join(ANALYSES)}")
    p.add_argument("--force", action="store_true", help="replace an existing output directory")

    p = sub.add_parser("convert", help="convert a time label between TAI, UTC and LOCAL")
    p.add_argument("time")
    p.add_argument("--from", dest="src", default="TAI", help="source scale (TAI, UTC, LOCAL)")
    p.add_argument("--to", dest="dst", default="UTC", help="target scale (TAI, UTC, LOCAL)")
    p.add_argument("--leap-table", help="leap table CSV (default: bundled history)")
    p.add_argument("--scenario", help="scenario with a [dst] section, for LOCAL")

    p = sub.add_parser("sweep", parents=[grids], help="tabulate observables across conventions")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", type=Path, help="write sweep.csv and summary.json here instead of stdout")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("chsh", help="classical and quantum CHSH maxima as JSON")
    p.add_argument("--n-angles", type=int, default=90)
    p.add_argument("--refine", type=int, default=6)

    p = sub.add_parser("rates", help="relativistic clock-rate terms (GPS preset by default)")
    p.add_argument("--speed", type=float, help="orbital speed, m/s")
    p.add_argument("--phi-delta", type=float, help="potential difference, m^2/s^2")
    return parser


def _manifest(args) -> RunManifest:
    return RunManifest(
        scenario=args.scenario,
        out=getattr(args, "out", None),
        analyses=_analyses(getattr(args, "analyses", None)),
        explicit_analyses=getattr(args, "analyses", None) is not None,
        epsilon_grid=parse_grid(args.epsilon_grid) if args.epsilon_grid else (),
        kappa_grid=parse_grid(args.kappa_grid) if args.kappa_grid else (),
        boost_grid=parse_grid(args.boost_grid) if args.boost_grid else (),
        seed=args.seed,
        force=getattr(args, "force", False),
    )


def _run(args, stdout) -> int:
    if args.command == "simulate":
        manifest = _manifest(args)
        for eps in manifest.epsilon_grid:
            conventions.check_epsilon(eps)
        out = simulate(manifest)
        print(f"wrote {out}", file=stdout)
        return EXIT_OK
    if args.command == "convert":
        table = _leap_table(args.leap_table)
        rule = config.load_scenario(args.scenario).dst if args.scenario else None
        for line in convert(args.time, args.src, args.dst, table, rule):
            print(line, file=stdout)
        return EXIT_OK
    if args.command == "sweep":
        manifest = _manifest(args)
        doc = manifest.load()
        eps = manifest.epsilon_grid
        if not (eps or manifest.kappa_grid or manifest.boost_grid):
            eps = doc.scenario.conventions or causal.DEFAULT_EPSILONS
        convs = build_conventions(eps, manifest.kappa_grid, manifest.boost_grid)
        result = convention_sweep(doc.scenario, convs)
        if manifest.out:
            with _AtomicDir(manifest.out, manifest.force) as out:
                (out / "sweep.csv").write_text(result.to_csv())
                (out / "summary.json").write_text(_dump(result.summary))
        else:
            stdout.write(result.to_csv())
        print(json.dumps(result.summary, sort_keys=True), file=stdout if manifest.out else sys.stderr)
        if result.summary["exchanges"] and not result.summary["single_clock_observables_invariant"]:
            return EXIT_RUNTIME
        return EXIT_OK
    if args.command == "chsh":
        stdout.write(_dump(chsh_report(args.n_angles, args.refine)))
        return EXIT_OK
    if args.command == "rates":
        if (args.speed is None) != (args.phi_delta is None):
            raise ValidationError("--speed and --phi-delta go together")
        cfg = config.RatesConfig("gps") if args.speed is None else config.RatesConfig(None, args.speed, args.phi_delta)
        stdout.write(_dump(rates_report(cfg)))
        return EXIT_OK
    raise AssertionError(args.command)


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        return _run(args, stdout)
    except (SimultaneityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, ArithmeticError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
