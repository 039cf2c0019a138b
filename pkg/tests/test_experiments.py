import json
import math

import numpy as np
import pytest

from gstatinv import cli
from gstatinv.config import Config, ConfigError, dump_toml, index_grid, load_config
from gstatinv.experiments import (
    LINEFIT_COLUMNS,
    SWEEP_COLUMNS,
    ExperimentGrid,
    LineFitResult,
    SweepResult,
    invert_psi,
    run_heatmap_sweep,
    run_linefit,
    sweep_grids,
)

SMALL = """
seed = 3

[psi]
n_samples = 128

[sweep]
families = ["tsallis"]
n_indices = 2
contamination = [0.0, 0.4]
seeds = [0, 1]

[linefit]
families = ["renyi"]
n_indices = 3
seeds = [0, 1]
max_iterations = 50
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "cfg.toml"
    p.write_text(SMALL)
    return p


def test_defaults_valid():
    cfg = load_config()
    assert cfg.psi.n_samples == 512 and cfg.sweep.n_indices == 20
    assert len(cfg.sweep.contamination) == 9


@pytest.mark.parametrize("text", [
    "bogus = 1",
    "[psi]\nwavelet = 'ormsby'",
    "[solver]\nmax_iterations = 'ten'",
    "[sweep]\ncontamination = [0.9]",
    "[psi]\nfamily = 'tsallis'\nindex = 3.5",
    "[linefit]\nfamilies = ['boltzmann']",
    "seed = -1",
    "not toml ===",
])
def test_config_errors(tmp_path, text):
    p = tmp_path / "c.toml"
    p.write_text(text)
    with pytest.raises(ConfigError):
        load_config(p)


def test_config_toml_round_trip(tmp_path, small_cfg):
    cfg = load_config(small_cfg)
    p = tmp_path / "again.toml"
    p.write_text(dump_toml(cfg))
    assert load_config(p) == cfg
    assert Config.from_mapping(cfg.to_dict()) == cfg


def test_index_grid():
    g = index_grid("renyi", 20)
    assert len(g) == 20 and g[0] == 1.0 and g[-1] == 0.3334
    assert index_grid("kaniadakis", 3) == [0.0, 0.3333, 0.6666]
    assert index_grid("tsallis", 5, (2.0,)) == [2.0]
    assert math.isnan(index_grid("gaussian", 5)[0])


def test_grid_rejects_bad_cells():
    with pytest.raises(ConfigError):
        ExperimentGrid("renyi", (0.2,), (0.0,), (0,))
    with pytest.raises(ConfigError):
        ExperimentGrid("renyi", (0.5,), (0.95,), (0,))
    cells = list(ExperimentGrid("tsallis", (1.0, 2.0), (0.0, 0.1), (0, 1)).cells())
    assert len(cells) == 8 and cells[0] == ("tsallis", 1.0, 0.0, 0) and cells[-1] == ("tsallis", 2.0, 0.1, 1)


def test_single_cell_grid_equals_direct_inversion(small_cfg):
    cfg = load_config(small_cfg)
    res = run_heatmap_sweep(ExperimentGrid("kaniadakis", (0.5,), (0.3,), (1,)), cfg)
    run = invert_psi(cfg.psi, cfg.solver, "kaniadakis", 0.5, 0.3, 1, cfg.seed)
    (row,) = res.rows
    assert row.pearson_r == run.metrics.pearson_r
    assert row.mae == run.metrics.mae
    assert row.iterations == run.estimate.iterations_used


def test_observed_data_shared_across_families(small_cfg):
    cfg = load_config(small_cfg)
    a = invert_psi(cfg.psi, cfg.solver, "renyi", 0.5, 0.4, 0, cfg.seed)
    b = invert_psi(cfg.psi, cfg.solver, "tsallis", 2.0, 0.4, 0, cfg.seed)
    np.testing.assert_array_equal(a.observed, b.observed)


def test_sweep_serial_equals_parallel(small_cfg):
    cfg = load_config(small_cfg)
    grids = sweep_grids(cfg)
    serial = run_heatmap_sweep(grids, cfg, workers=1).to_csv_text()
    parallel = run_heatmap_sweep(grids, cfg, workers=2).to_csv_text()
    assert serial == parallel
    assert serial.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    assert len(serial.splitlines()) == 1 + 2 * 2 * 2


def test_sweep_csv_round_trip(tmp_path, small_cfg):
    cfg = load_config(small_cfg)
    res = run_heatmap_sweep(sweep_grids(cfg), cfg)
    p = tmp_path / "s.csv"
    res.write_csv(p)
    back = SweepResult.read_csv(p)
    assert back.to_csv_text() == res.to_csv_text()
    idx, con, mat = back.median_matrix("tsallis")
    assert mat.shape == (2, 2) and np.all(np.isfinite(mat))


def test_linefit_result(small_cfg):
    cfg = load_config(small_cfg)
    res = run_linefit(cfg)
    assert len(res) == 3 * 2
    assert res.to_csv_text().splitlines()[0] == ",".join(LINEFIT_COLUMNS)
    (fam, (v, m)), = res.best().items()
    assert fam == "renyi" and m == min(res.mean_mae().values())


# --- CLI --------------------------------------------------------------------


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


def test_cli_psi(tmp_path, small_cfg, capsys):
    out = tmp_path / "psi"
    assert run_cli("psi", "--config", small_cfg, "--out", out, "--family", "tsallis",
                   "--index", 2.9999, "--contamination", 0.2) == 0
    metrics = json.loads((out / "psi_metrics.json").read_text())
    assert metrics["pearson_r"] > 0.9
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "psi"
    assert manifest["config"]["psi"]["family"] == "tsallis"
    assert {"psi_model.csv", "psi_data.csv", "psi_traces.png"} <= set(manifest["files"])
    assert "R=" in capsys.readouterr().out


def test_cli_sweep_and_plot(tmp_path, small_cfg):
    out = tmp_path / "sw"
    assert run_cli("sweep", "--config", small_cfg, "--out", out, "--no-plots") == 0
    assert not (out / "heatmap_tsallis.png").exists()
    assert run_cli("plot", "--config", small_cfg, "--out", out) == 0
    assert (out / "heatmap_tsallis.png").stat().st_size > 0
    assert json.loads((out / "plots_manifest.json").read_text())["images"] == ["heatmap_tsallis.png"]


def test_cli_linefit(tmp_path, small_cfg):
    out = tmp_path / "lf"
    assert run_cli("linefit", "--config", small_cfg, "--out", out) == 0
    assert len(LineFitResult.read_csv(out / "linefit.csv")) == 6
    assert (out / "linefit_dm.png").exists() and (out / "linefit_fits.png").exists()


@pytest.mark.parametrize("argv", [
    ["psi", "--family", "tsallis", "--index", "3.5"],
    ["sweep", "--contamination", "0.95"],
    ["psi", "--seed", "-4"],
    ["psi", "--config", "/nonexistent.toml"],
])
def test_cli_config_errors(tmp_path, argv):
    assert run_cli(*argv, "--out", tmp_path) == 2


def test_cli_unknown_command():
    assert run_cli("frobnicate") == 2


def test_cli_runtime_failure(tmp_path):
    # plot with no CSVs present
    assert run_cli("plot", "--out", tmp_path / "empty") == 3
    bad = tmp_path / "bad.toml"
    bad.write_text(f"[psi]\nmodel_file = '{tmp_path / 'missing.txt'}'\n")
    assert run_cli("psi", "--config", bad, "--out", tmp_path / "o") == 3
