import pytest

from seedtree.cli import main
from seedtree.experiment import FIELDS, ExperimentConfig, format_csv, parse_csv, run, sweep
from seedtree.matching import loads
from seedtree.traces import ingest_trace

SMALL = dict(n_items=63, requests=600)


def test_config_validation():
    for bad in (dict(capacity=0), dict(capacity=65), dict(occupancy=1.0), dict(repeats=0), dict(locality=0.95)):
        with pytest.raises(ValueError):
            run(ExperimentConfig(**SMALL, **bad))


def test_run_repeats_and_determinism():
    cfg = ExperimentConfig(capacity=2, occupancy=0.5, locality=0.6, repeats=2, **SMALL)
    rows = run(cfg)
    assert [r.run for r in rows] == [0, 1]
    for r in rows:
        assert r.total_cost == r.access_cost + r.reconfig_cost
        assert r.ratio == pytest.approx(r.total_cost / r.lower_bound)
        assert r.ratio <= 43
    assert format_csv(rows) == format_csv(run(cfg))


def test_sweep_counts_and_order():
    base = ExperimentConfig(repeats=2, **SMALL)
    rows = sweep(base, [4, 2, 3], [0.5, 0.25, 0.75], [0.3])
    assert len(rows) == 9 * 2
    keys = [(r.c, r.f, r.locality, r.run) for r in rows]
    assert keys == sorted(keys)


def test_one_cell_sweep_equals_run():
    base = ExperimentConfig(capacity=3, occupancy=0.5, locality=0.3, **SMALL)
    assert sweep(base, [3], [0.5], [0.3]) == run(base)


def test_sweep_names_failing_cell():
    from seedtree.experiment import SweepError

    with pytest.raises(SweepError, match="f=1.5"):
        sweep(ExperimentConfig(**SMALL), [2], [0.5, 1.5], [0.0])


def test_parallel_matches_serial():
    base = ExperimentConfig(repeats=2, **SMALL)
    assert sweep(base, [2, 4], [0.5], [0.6], jobs=2) == sweep(base, [2, 4], [0.5], [0.6])


def test_cli_simulate_csv_is_byte_stable(tmp_path):
    args = ["simulate", "--capacity", "2", "--items", "63", "--requests", "500", "--locality", "0.6", "--repeats", "2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
    assert header.split(",") == FIELDS
    assert len(parse_csv(text)) == 2


def test_cli_sweep(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--capacity", "2,4", "--occupancy", "0.25,0.5", "--locality", "0,0.9",
                 "--items", "31", "--requests", "200", "-o", str(out)]) == 0
    assert len(parse_csv(out.read_text())) == 8


def test_cli_gen_trace_round_trip(tmp_path):
    out = tmp_path / "t.txt"
    assert main(["gen-trace", "--items", "50", "--requests", "400", "--locality", "0", "--seed", "3", "-o", str(out)]) == 0
    canon = tmp_path / "u.txt"
    assert main(["ingest", "--trace", str(out), "-o", str(canon)]) == 0
    assert out.read_bytes() == canon.read_bytes()


def test_cli_ingest_pairs(tmp_path):
    src = tmp_path / "p.csv"
    src.write_text("# src,dst\n1,100\n2,200\n2,300\n2,200\n3,100\n")
    out = tmp_path / "t.txt"
    assert main(["ingest", "--trace", str(src), "--format", "pairs", "-o", str(out)]) == 0
    t = ingest_trace(out)
    assert t.tolist() == [0, 1, 0] and t.n_items == 2


def test_cli_export_matchings(tmp_path):
    out = tmp_path / "m.txt"
    assert main(["export-matchings", "--capacity", "3", "--items", "20", "-o", str(out)]) == 0
    text = out.read_text()
    assert sum(line.startswith("[") for line in text.splitlines()) == 2 + 3
    assert loads(text).capacity == 3


def test_cli_error_exit_code(tmp_path, capsys):
    assert main(["ingest", "--trace", str(tmp_path / "missing"), "-o", str(tmp_path / "x")]) != 0
    assert "error" in capsys.readouterr().err
    assert main(["simulate", "--occupancy", "2", "--items", "10", "--requests", "20"]) != 0
