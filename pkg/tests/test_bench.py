import csv
import math
from dataclasses import replace

import numpy as np
import pytest

from kernelsum import bench, cli
from kernelsum.exceptions import DomainError, OracleBudgetError
from kernelsum.kernels import KernelSpec


def test_gen_data_properties():
    x, y, w = bench.gen_data(400, 300, 5, seed=2)
    x2, y2, w2 = bench.gen_data(400, 300, 5, seed=2)
    assert np.array_equal(x, x2) and np.array_equal(y, y2) and np.array_equal(w, w2)
    assert abs(x.mean()) <= 3 * 0.1 / math.sqrt(400 * 5)
    assert np.all((w >= 0) & (w <= 1))
    with pytest.raises(DomainError):
        bench.gen_data(0, 3, 2)


def test_exact_method_has_zero_error():
    cfg = bench.ExperimentConfig(KernelSpec.gaussian(1.0, 4), N=60, M=50, method="exact")
    assert bench.run(cfg).err_per_summand == 0.0


def test_oracle_budget_refusal():
    cfg = bench.ExperimentConfig(KernelSpec.gaussian(1.0, 4), N=200, M=200, oracle_budget=1e4)
    with pytest.raises(OracleBudgetError):
        bench.run(cfg)
    rec = bench.run(replace(cfg, compute_error=False, P=10))
    assert math.isnan(rec.err_per_summand)


def test_repetitions_redraw_directions_only():
    cfg = bench.ExperimentConfig(KernelSpec.gaussian(1.0, 6), N=80, M=70, P=20, reps=4)
    rec = bench.run(cfg)
    assert len(set(rec.errors)) == 4
    assert rec.err_std == pytest.approx(np.std(rec.errors))
    assert rec.t_setup_s >= 0 and rec.t_sum_s >= 0


def test_csv_is_deterministic_without_timings():
    cfg = bench.ExperimentConfig(KernelSpec.laplacian(1.0, 6), N=80, M=70, P=20, reps=2)
    rows = [bench.format_csv([bench.run(cfg)]).splitlines() for _ in range(2)]
    strip = lambda line: line.rsplit(",", 2)[0]
    assert rows[0][0] == ",".join(bench.CSV_COLUMNS)
    assert strip(rows[0][1]) == strip(rows[1][1])


def test_empty_sweep_writes_header(tmp_path):
    out = tmp_path / "s.csv"
    cfg = bench.ExperimentConfig(KernelSpec.gaussian(1.0, 3))
    assert bench.sweep(cfg, "P", [], out=out) == []
    assert out.read_text() == ",".join(bench.CSV_COLUMNS) + "\n"


def test_sweep_records_failures_and_continues(tmp_path):
    out = tmp_path / "s.csv"
    cfg = bench.ExperimentConfig(KernelSpec.gaussian(1.0, 3), N=50, M=50, P=10, oracle_budget=3000)
    records = bench.sweep(cfg, "N", [40, 100, 30], out=out)
    assert len(records) == 3
    assert "failed: OracleBudgetError" in records[1].params
    rows = bench.read_csv(out)
    assert [r["N"] for r in rows] == ["40", "100", "30"]
    assert rows[1]["err_per_summand"] == "nan" and rows[2]["err_per_summand"] != "nan"


def test_d_sweep_changes_kernel_dimension():
    cfg = bench.ExperimentConfig(KernelSpec.negdist(2), N=40, M=40, P=16)
    records = bench.sweep(cfg, "d", [2, 9])
    assert [r.d for r in records] == [2, 9]


def test_compare_shares_instance():
    cfg = bench.ExperimentConfig(KernelSpec.gaussian(1.0, 5), N=60, M=60, P=32)
    records = bench.compare(cfg)
    assert [r.method for r in records] == ["slice", "rff1", "rff2"]
    assert all(r.P_or_D == 32 for r in records)


def test_gnuplot_script_references_columns():
    script = bench.gnuplot_script("out.csv", "P_or_D")
    assert "$7" in script and ":10" in script


def test_loglog_slope():
    P = np.array([64, 256, 1024])
    assert bench.loglog_slope(P, 3 / np.sqrt(P)) == pytest.approx(-0.5)


def test_cli_run_and_gen_data(tmp_path, capsys):
    assert cli.main(["run", "--n", "50", "--d", "4", "--proj", "8", "--kernel", "matern",
                     "--p", "1", "--beta", "0.5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split(",") == list(bench.CSV_COLUMNS)
    row = next(csv.DictReader(lines))
    assert row["kernel"] == "matern" and row["P_or_D"] == "8"
    path = tmp_path / "data.npz"
    assert cli.main(["gen-data", "--n", "7", "--m", "5", "--d", "3", "--out", str(path)]) == 0
    with np.load(path) as data:
        assert data["x"].shape == (7, 3) and data["y"].shape == (5, 3)


def test_cli_sweep_and_errors(tmp_path, capsys):
    out, gp = tmp_path / "s.csv", tmp_path / "s.gp"
    assert cli.main(["sweep", "--param", "P", "--values", "8,16", "--n", "40", "--d", "3",
                     "--kernel", "negdist", "--out", str(out), "--gnuplot", str(gp)]) == 0
    assert len(bench.read_csv(out)) == 2 and gp.exists()
    assert cli.main(["run", "--n", "2000", "--oracle-budget", "1e5", "--d", "3"]) == 2
    assert "budget" in capsys.readouterr().err
    assert cli.main(["compare", "--kernel", "negdist", "--n", "20", "--d", "3"]) == 2
