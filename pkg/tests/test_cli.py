import csv
import io
import subprocess
import sys

import pytest

from mapfdl.bench import SUMMARY_COLUMNS, TIMING_COLUMNS, parse_config, run_benchmark
from mapfdl.cli import main

TINY_BENCH = """\
# small enough for the unit suite
width = 6
height = 6
block_probability = 0.2
agents = 1..3:1
instances = 3
distance_min = 2
distance_max = 4
deadline = 5
time_limit = 20
seed = 11
"""


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return _run


def fixture_args(fixtures_dir, stem, scen=None):
    return fixtures_dir / f"{stem}.map", fixtures_dir / f"{scen or stem}.scen"


def test_solve_running_example(run, fixtures_dir, tmp_path):
    plan = tmp_path / "out.plan"
    code, out, _ = run("solve", *fixture_args(fixtures_dir, "running"), "--deadline", 2, "--plan", plan)
    assert code == 0
    assert out.splitlines()[0] == "M_succ = 1"
    assert "status = optimal" in out
    assert plan.read_text() == "deadline 2\nagent 1: unsuccessful\nagent 2: 1,0 1,1 1,1\n"


@pytest.mark.parametrize("flags", [["--no-reduction"], ["--per-commodity", "off"], ["--formulation", "full"]])
def test_solve_flags(run, fixtures_dir, tmp_path, flags):
    code, out, _ = run("solve", *fixture_args(fixtures_dir, "corridor"), "--deadline", 2,
                       "--plan", tmp_path / "p", *flags)
    assert code == 0
    assert out.startswith("M_succ = 1\n")


def test_solve_default_plan_path(run, fixtures_dir, tmp_path):
    for name in ("corridor.map", "corridor.scen"):
        (tmp_path / name).write_text((fixtures_dir / name).read_text())
    code, out, _ = run("solve", tmp_path / "corridor.map", tmp_path / "corridor.scen", "--deadline", 2)
    assert code == 0
    assert (tmp_path / "corridor.plan").exists()


def test_deadline_zero_all_at_goal(run, fixtures_dir, tmp_path):
    code, out, _ = run("solve", *fixture_args(fixtures_dir, "corridor", "at_goal"), "--deadline", 0,
                       "--plan", tmp_path / "p")
    assert code == 0
    assert out.startswith("M_succ = 2\n")


def test_malformed_map(run, fixtures_dir, tmp_path):
    code, _, err = run("solve", fixtures_dir / "bad_char.map", fixtures_dir / "at_goal.scen", "--deadline", 1,
                       "--plan", tmp_path / "p")
    assert code == 1
    assert "line 6" in err and "unknown cell" in err


def test_negative_deadline_and_missing_file(run, fixtures_dir, tmp_path):
    code, _, err = run("solve", *fixture_args(fixtures_dir, "corridor"), "--deadline", -1)
    assert code == 1 and "deadline" in err
    code, _, err = run("solve", tmp_path / "nope.map", fixtures_dir / "corridor.scen", "--deadline", 2)
    assert code == 1 and err.startswith("error:")


def test_timeout_exit_code(run, tmp_path, monkeypatch):
    code, _, _ = run("generate", "--width", 10, "--height", 10, "--agents", 8, "--distance-min", 6,
                     "--distance-max", 8, "--deadline", 8, "--seed", 5,
                     "--map-out", tmp_path / "g.map", "--scenario-out", tmp_path / "g.scen")
    assert code == 0
    monkeypatch.setenv("MAPFDL_TIME_LIMIT", "1e-9")
    code, out, _ = run("solve", tmp_path / "g.map", tmp_path / "g.scen", "--deadline", 8)
    assert code == 2
    assert "status = timeout" in out
    # the incumbent plan still passes verification
    code, out, _ = run("verify", tmp_path / "g.map", tmp_path / "g.scen", tmp_path / "g.plan", "--deadline", 8)
    assert code == 0


def test_verify_detects_collision(run, fixtures_dir, tmp_path):
    plan = tmp_path / "bad.plan"
    plan.write_text("deadline 4\nagent 1: 0,1 1,1 2,1 3,1 4,1\nagent 2: 2,1 3,1 3,1 3,1 3,1\n")
    code, out, _ = run("verify", *fixture_args(fixtures_dir, "corridor"), plan, "--deadline", 4)
    assert code == 3
    assert "vertex" in out
    plan.write_text("deadline 2\nagent 1: 0,1 1,1 2,1\nagent 2: unsuccessful\n")
    code, out, _ = run("verify", *fixture_args(fixtures_dir, "corridor"), plan, "--deadline", 2)
    assert code == 3
    assert "goal" in out


def test_verify_valid_plan(run, fixtures_dir, tmp_path):
    plan = tmp_path / "ok.plan"
    run("solve", *fixture_args(fixtures_dir, "running"), "--deadline", 2, "--plan", plan)
    code, out, _ = run("verify", *fixture_args(fixtures_dir, "running"), plan, "--deadline", 2)
    assert code == 0
    assert out.strip() == "valid: 1 successful agents"


def test_generate_is_deterministic(run, tmp_path):
    texts = []
    for k in range(2):
        m, s = tmp_path / f"{k}.map", tmp_path / f"{k}.scen"
        code, _, _ = run("generate", "--width", 12, "--height", 9, "--agents", 3, "--distance-min", 3,
                         "--distance-max", 6, "--deadline", 6, "--seed", 42, "--map-out", m, "--scenario-out", s)
        assert code == 0
        texts.append((m.read_text(), s.read_text()))
    assert texts[0] == texts[1]
    assert texts[0][0].startswith("type octile\nheight 9\nwidth 12\nmap\n")


@pytest.mark.parametrize("fmt, marker", [("mps", "ENDATA"), ("lp", "Binaries"), ("dot", "digraph")])
def test_export(run, fixtures_dir, tmp_path, fmt, marker):
    out = tmp_path / f"model.{fmt}"
    code, _, _ = run("export", *fixture_args(fixtures_dir, "running"), "--deadline", 2, "--format", fmt, "--out", out)
    assert code == 0
    assert marker in out.read_text()


def test_solve_exports_mps(run, fixtures_dir, tmp_path):
    mps = tmp_path / "m.mps"
    run("solve", *fixture_args(fixtures_dir, "running"), "--deadline", 2, "--plan", tmp_path / "p",
        "--export-mps", mps)
    exported = tmp_path / "e.mps"
    run("export", *fixture_args(fixtures_dir, "running"), "--deadline", 2, "--out", exported)
    assert mps.read_text() == exported.read_text()


def test_verbose_solver_record(run, fixtures_dir, tmp_path):
    _, _, err = run("solve", *fixture_args(fixtures_dir, "running"), "--deadline", 2, "--plan", tmp_path / "p",
                    "--verbose")
    assert "status=optimal objective=1" in err


def test_module_entry_point(fixtures_dir, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mapfdl.cli", "solve", *map(str, fixture_args(fixtures_dir, "running")),
                           "--deadline", "2", "--plan", str(tmp_path / "p")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("M_succ = 1")


# -- bench --------------------------------------------------------------------

def _strip_timing(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: v for k, v in r.items() if k not in TIMING_COLUMNS} for r in rows]


def test_bench_cli(run, tmp_path):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(TINY_BENCH)
    out_csv, inst_csv = tmp_path / "s.csv", tmp_path / "i.csv"
    code, out, _ = run("bench", cfg, "--csv", out_csv, "--instances-csv", inst_csv)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out_csv.read_text())))
    assert tuple(rows[0]) == SUMMARY_COLUMNS
    assert [r["agents"] for r in rows] == ["1", "2", "3"]
    assert len(inst_csv.read_text().splitlines()) == 1 + 9

    # every number in the table comes from the CSV
    table = out.splitlines()
    assert table[0].split("|")[1:] and [c.strip() for c in table[0].split("|")[1:]] == ["1", "2", "3"]
    rates = [c.strip() for c in table[1].split("|")[1:]]
    assert rates == [f"{float(r['success_rate']):g}%" for r in rows]
    means = [c.strip() for c in table[2].split("|")[1:]]
    assert means == [f"{float(r['mean_time']):g}" for r in rows]
    medians = [c.strip() for c in table[3].split("|")[1:]]
    assert medians == [f"{float(r['median_time']):g}" for r in rows]
    for r in rows:
        assert float(r["success_rate"]) == round(100 * int(r["solved"]) / int(r["instances"]), 1)


def test_bench_sequential_csv_is_reproducible():
    config = parse_config(TINY_BENCH)
    a, b = run_benchmark(config), run_benchmark(config)
    assert _strip_timing(a.summary_csv()) == _strip_timing(b.summary_csv())
    assert _strip_timing(a.instances_csv()) == _strip_timing(b.instances_csv())
    strip = [{k: v for k, v in r.__dict__.items() if k != "time"} for r in a.rows]
    assert strip == [{k: v for k, v in r.__dict__.items() if k != "time"} for r in b.rows]


def test_bench_parallel_matches_sequential():
    seq = run_benchmark(parse_config(TINY_BENCH))
    par = run_benchmark(parse_config(TINY_BENCH, workers=2))
    assert _strip_timing(seq.instances_csv()) == _strip_timing(par.instances_csv())


def test_bench_zero_agents():
    result = run_benchmark(parse_config(TINY_BENCH.replace("agents = 1..3:1", "agents = 0")))
    (row,) = result.summary()
    assert row["success_rate"] == 100.0
    assert row["mean_time"] < 0.05


@pytest.mark.parametrize("text", ["widht = 3", "agents = two", "reduction = maybe", "nonsense"])
def test_bench_config_errors(text):
    with pytest.raises(ValueError, match="config line 1"):
        parse_config(text)


def test_bench_config_values():
    cfg = parse_config("agents = 10..100:10\nreduction = off\nformulation = full\n", seed=3)
    assert cfg.agents == tuple(range(10, 101, 10))
    assert (cfg.reduction, cfg.formulation, cfg.seed) == (False, "full", 3)
