import csv
import datetime as dt
import hashlib
import io
import json
import random
import subprocess
import sys
import time

import pytest

from simultaneity import cli, config
from simultaneity.causal import DEFAULT_EPSILONS


def run(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), stdout=buf)
    return code, buf.getvalue()


def digest(directory):
    h = hashlib.sha256()
    for p in sorted(directory.iterdir()):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()


# -- simulate --------------------------------------------------------------


def test_simulate_ptp_asymmetry(tmp_path):
    code, _ = run("simulate", "--scenario", "ptp-asymmetry", "--out", str(tmp_path / "o"))
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "o" / "sync.csv").open()))
    assert len(rows) == 8
    # perfect clocks, delays 1500 / 500: offset estimate (1500 - 500) / 2
    assert {int(r["offset"]) for r in rows} == {500}
    assert {int(r["delay"]) for r in rows} == {1000}


def test_simulate_forbidden_zone(tmp_path):
    assert run("simulate", "--scenario", "forbidden-zone", "--out", str(tmp_path / "o"))[0] == 0
    report = json.loads((tmp_path / "o" / "forbidden_zone.json").read_text())
    assert report["violating_samples"] > 0 and report["predicted_violation"]
    for link in report["per_link"].values():
        assert (link["violations"] > 0) == link["predicted_violation"]


def test_simulate_fito_flip(tmp_path):
    assert run("simulate", "--scenario", "fito-flip", "--out", str(tmp_path / "o"))[0] == 0
    audit = json.loads((tmp_path / "o" / "fito_audit.json").read_text())
    assert audit["timelike_violations"] == 0 and audit["flipped_pairs"] > 0


def test_simulate_empty_traffic(tmp_path):
    assert run("simulate", "--scenario", "empty-traffic", "--out", str(tmp_path / "o"))[0] == 0
    assert (tmp_path / "o" / "trace.csv").read_text() == "kind,node,msg_id,true_time_ns,displayed_ns\n"
    assert json.loads((tmp_path / "o" / "forbidden_zone.json").read_text())["total_samples"] == 0


def test_simulate_is_byte_deterministic(tmp_path):
    for name in ("symmetric-sweep", "forbidden-zone"):
        a, b = tmp_path / f"{name}-a", tmp_path / f"{name}-b"
        assert run("simulate", "--scenario", name, "--out", str(a))[0] == 0
        assert run("simulate", "--scenario", name, "--out", str(b))[0] == 0
        assert digest(a) == digest(b)


def test_seed_override_changes_noisy_trace(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("simulate", "--scenario", "symmetric-sweep", "--out", str(a))
    run("simulate", "--scenario", "symmetric-sweep", "--out", str(b), "--seed", "12345")
    assert (a / "trace.csv").read_text() != (b / "trace.csv").read_text()


def test_simulate_refuses_existing_dir(tmp_path):
    out = tmp_path / "o"
    assert run("simulate", "--scenario", "ptp-asymmetry", "--out", str(out))[0] == 0
    assert run("simulate", "--scenario", "ptp-asymmetry", "--out", str(out))[0] == 1
    assert run("simulate", "--scenario", "ptp-asymmetry", "--out", str(out), "--force")[0] == 0
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".")]


def test_every_bundled_scenario_under_10s(tmp_path):
    for name in config.bundled_scenarios():
        start = time.perf_counter()
        assert run("simulate", "--scenario", name, "--out", str(tmp_path / name))[0] == 0, name
        assert time.perf_counter() - start < 10, name


def test_scenario_file_path(tmp_path):
    p = tmp_path / "x.scn"
    p.write_text("[node A]\nposition_ns = 0\n[tick t]\nnode = A\nat_ns = 5\n")
    assert run("simulate", "--scenario", str(p), "--out", str(tmp_path / "o"))[0] == 0


def test_audit_without_positions_is_validation_error(tmp_path):
    p = tmp_path / "x.scn"
    p.write_text("[node A]\n[tick t]\nnode = A\nat_ns = 5\n")
    assert run("simulate", "--scenario", str(p), "--out", str(tmp_path / "o"), "--analyses", "audit")[0] == 1
    assert run("simulate", "--scenario", str(p), "--out", str(tmp_path / "p"))[0] == 0


# -- convert ---------------------------------------------------------------


def test_convert_synthetic_leap_renders_60():
    # one leap at the end of 2000-06-30; TAI is UTC + 11 s afterwards
    code, out = run("convert", "2000-07-01T00:00:10", "--from", "TAI", "--to", "UTC", "--leap-table", "synthetic_one_leap.csv")
    assert code == 0 and out.strip() == "2000-06-30T23:59:60"


def test_convert_identity():
    for scale in ("TAI", "UTC"):
        code, out = run("convert", "2010-05-05T01:02:03", "--from", scale, "--to", scale)
        assert code == 0 and out.strip() == "2010-05-05T01:02:03"
    # identity on UTC still rejects a leap second the table never inserted
    assert run("convert", "2010-05-05T23:59:60", "--from", "UTC", "--to", "UTC")[0] == 1


def test_convert_round_trips():
    r = random.Random(11)
    start = dt.datetime(1972, 1, 1)
    for _ in range(100):
        label = (start + dt.timedelta(seconds=r.randrange(58 * 365 * 86_400))).isoformat()
        _, tai = run("convert", label, "--from", "UTC", "--to", "TAI")
        _, back = run("convert", tai.strip(), "--from", "TAI", "--to", "UTC")
        assert back.strip() == label


def test_convert_local_ambiguous_and_gap(tmp_path):
    scn = str(config.bundled_scenario_path("dst-example"))
    code, out = run("convert", "2024-11-03T01:30:00", "--from", "LOCAL", "--to", "UTC", "--scenario", scn)
    assert code == 0 and len(out.split()) == 2
    code, _ = run("convert", "2024-03-10T02:30:00", "--from", "LOCAL", "--to", "UTC", "--scenario", scn)
    assert code == 1
    code, out = run("convert", "2024-07-01T17:00:00", "--from", "UTC", "--to", "LOCAL", "--scenario", scn)
    assert out.strip() == "2024-07-01T13:00:00"


def test_convert_errors():
    assert run("convert", "1960-01-01T00:00:00", "--from", "UTC", "--to", "TAI")[0] == 1
    assert run("convert", "2000-01-01T00:00:00", "--from", "GPS")[0] == 1
    assert run("convert", "not-a-time")[0] == 1
    assert run("convert", "2000-01-01T00:00:00", "--to", "LOCAL")[0] == 1


# -- sweep -----------------------------------------------------------------


def sweep_rows(*extra):
    code, out = run("sweep", "--scenario", "symmetric-sweep", *extra)
    assert code == 0
    return list(csv.DictReader(io.StringIO(out)))


def test_sweep_rtt_constant():
    rows = sweep_rows("--epsilon-grid", "0.05:0.95:0.05")
    assert len({r["convention"] for r in rows}) == 19
    for ex in {r["exchange"] for r in rows}:
        assert len({r["rtt_ns"] for r in rows if r["exchange"] == ex}) == 1


def test_sweep_kappa_matches_epsilon_rows():
    eps = ",".join(str(e) for e in DEFAULT_EPSILONS)
    kap = ",".join(str(1 - 2 * e) for e in DEFAULT_EPSILONS)
    a, b = sweep_rows("--epsilon-grid", eps), sweep_rows(f"--kappa-grid={kap}")
    cols = ("epsilon", "exchange", "rtt_ns", "owd_forward_ns", "owd_reverse_ns", "pdv_forward_ns", "flipped_spacelike_pairs")
    assert [[r[c] for c in cols] for r in a] == [[r[c] for c in cols] for r in b]


def test_sweep_boost_grid():
    rows = sweep_rows("--boost-grid=-0.9,0.9")
    assert {r["convention"] for r in rows} == {"v=-0.9", "v=0.9"}
    assert all(r["owd_forward_ns"] == "" for r in rows)


def test_sweep_single_node_empty_ordering(tmp_path):
    p = tmp_path / "one.scn"
    p.write_text("[node A]\nposition_ns = 0\n[tick t]\nnode = A\nat_ns = 0\n")
    code, out = run("sweep", "--scenario", str(p), "--epsilon-grid", "0.5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["flipped_spacelike_pairs"] == ""


def test_sweep_to_directory(tmp_path):
    code, out = run("sweep", "--scenario", "ptp-asymmetry", "--out", str(tmp_path / "s"))
    assert code == 0
    summary = json.loads((tmp_path / "s" / "summary.json").read_text())
    assert summary["single_clock_observables_invariant"]


def test_sweep_rejects_boundary_epsilon():
    assert run("sweep", "--scenario", "ptp-asymmetry", "--epsilon-grid", "0,0.5")[0] == 1


# -- chsh and rates ----------------------------------------------------------


def test_chsh_json():
    code, out = run("chsh", "--n-angles", "90", "--refine", "4")
    d = json.loads(out)
    assert code == 0 and d["lhv_max"] == 2
    assert abs(d["quantum_max"] - d["tsirelson_bound"]) < 1e-4


def test_rates_preset_and_custom():
    d = json.loads(run("rates")[1])
    assert abs(d["net_us_per_day"] - 38.5) < 0.5
    d = json.loads(run("rates", "--speed", "0", "--phi-delta", "0")[1])
    assert d["net_us_per_day"] == 0
    assert run("rates", "--speed", "3874")[0] == 1


# -- exit codes ----------------------------------------------------------------


def test_exit_codes(tmp_path):
    assert run("simulate", "--scenario", "no-such-thing", "--out", str(tmp_path / "o"))[0] == 1
    assert run("bogus")[0] == 1
    bad = tmp_path / "bad.scn"
    bad.write_text("[node A]\nspeed = 3\n")
    assert run("simulate", "--scenario", str(bad), "--out", str(tmp_path / "o"))[0] == 1
    assert run("convert", "2000-01-01T00:00:00", "--leap-table", str(tmp_path / "missing.csv"))[0] == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "simultaneity", "rates"], capture_output=True, text=True)
    assert proc.returncode == 0 and "velocity_us_per_day" in proc.stdout
