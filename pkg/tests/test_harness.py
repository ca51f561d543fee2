import json
import subprocess
import sys

import numpy as np
import pytest

from stripesim.config import SystemConfig, format_config
from stripesim.harness import (
    compute_costs,
    parse_dsnr,
    parse_ld,
    result_key,
    run_experiment,
    sweep_snr_ld,
    write_cost_table,
    write_outputs,
    write_sweep,
)

SMALL = SystemConfig(L=6, N=2, K=4, tau_p=4, tau_c=100, drops=3,
                     room_x=60.0, room_y=60.0, seed=5)


def read(path):
    return path.read_text()


def test_run_is_deterministic_in_memory():
    a = run_experiment(SMALL, uc_modes=("off", "on"))
    b = run_experiment(SMALL, uc_modes=("off", "on"))
    for key in a.keys():
        np.testing.assert_array_equal(a.se[key], b.se[key])
        np.testing.assert_array_equal(a.sinr_mean[key], b.sinr_mean[key])
    assert a.manifest.drop_seeds == b.manifest.drop_seeds


def test_outputs_byte_identical_across_runs(tmp_path):
    r1 = run_experiment(SMALL, uc_modes=("off", "on"))
    r2 = run_experiment(SMALL, uc_modes=("off", "on"))
    d1, d2 = tmp_path / "a", tmp_path / "b"
    f1 = write_outputs(r1, d1)
    f2 = write_outputs(r2, d2)
    assert [p.name for p in f1] == [p.name for p in f2]
    for p1, p2 in zip(f1, f2):
        assert read(p1) == read(p2), p1.name


def test_parallel_jobs_do_not_change_outputs(tmp_path):
    r1 = run_experiment(SMALL, uc_modes=("off", "on"), jobs=1)
    r2 = run_experiment(SMALL, uc_modes=("off", "on"), jobs=2)
    f1 = write_outputs(r1, tmp_path / "serial")
    f2 = write_outputs(r2, tmp_path / "parallel")
    for p1, p2 in zip(f1, f2):
        assert read(p1) == read(p2), p1.name


def test_se_samples_schema_and_row_count(tmp_path):
    res = run_experiment(SMALL, schemes=("mrc", "qlmmse"),
                         uc_modes=("off", "on"))
    files = write_outputs(res, tmp_path)
    table = read(tmp_path / "se_samples.csv").strip().splitlines()
    assert table[0] == "drop,user,scheme,uc,sinr_mean,se"
    assert len(table) - 1 == SMALL.drops * SMALL.K * 2 * 2
    first = table[1].split(",")
    assert first[0] == "0" and first[2] == "mrc" and first[3] == "off"
    # all SE entries nonnegative and finite
    se = np.array([float(r.split(",")[5]) for r in table[1:]])
    assert np.all(se >= 0) and np.all(np.isfinite(se))


def test_cdf_files_monotone(tmp_path):
    res = run_experiment(SMALL, schemes=("mrc",), uc_modes=("off",))
    write_outputs(res, tmp_path)
    rows = read(tmp_path / "cdf_mrc_off.csv").strip().splitlines()[1:]
    assert len(rows) == SMALL.drops * SMALL.K
    vals = np.array([[float(x) for x in r.split(",")] for r in rows])
    assert np.all(np.diff(vals[:, 0]) >= 0)
    assert np.all(np.diff(vals[:, 1]) > 0)
    assert vals[-1, 1] == 1.0


def test_summary_json_contents(tmp_path):
    res = run_experiment(SMALL, uc_modes=("off", "on"))
    write_outputs(res, tmp_path)
    s = json.loads(read(tmp_path / "summary.json"))
    assert s["master_seed"] == SMALL.seed
    assert len(s["drop_seeds"]) == SMALL.drops
    assert s["schemes"] == ["mrc", "lmmse", "nlmmse", "qlmmse"]
    assert s["uc_modes"] == ["off", "on"]
    assert s["skipped_blocks"] == 0
    assert s["total_blocks"] == SMALL.drops * SMALL.blocks_per_drop
    assert s["config"]["L"] == SMALL.L
    for key in ("mrc_off", "qlmmse_on"):
        assert set(s["results"][key]) == {"mean", "p10"}
        assert s["results"][key]["mean"] > 0
    assert s["cost"]["qlmmse_off"]["c_serial"] == 0
    assert s["cost"]["qlmmse_off"]["c_cpu"] > 0


def test_cost_csv_matches_standalone_cost_table(tmp_path):
    res = run_experiment(SMALL, uc_modes=("off", "on"))
    write_outputs(res, tmp_path / "run")
    costs = compute_costs(SMALL, uc_modes=("off", "on"))
    write_cost_table(costs, tmp_path / "solo")
    assert read(tmp_path / "run" / "cost.csv") \
        == read(tmp_path / "solo" / "cost.csv")


def test_cost_rows_have_uc_suffix(tmp_path):
    costs = compute_costs(SMALL, schemes=("mrc",), uc_modes=("off", "on"))
    path = write_cost_table(costs, tmp_path)
    rows = read(path).strip().splitlines()
    assert rows[0] == "scheme,fronthaul_reals,c_serial,c_parallel,c_total"
    names = [r.split(",")[0] for r in rows[1:]]
    assert names == ["mrc", "mrc_uc"]


def test_qlmmse_exact_flag_improves_short_blocks():
    cfg = SMALL.replace(tau_c=24, tau_p=4, drops=4)
    sampled = run_experiment(cfg, schemes=("qlmmse",))
    exact = run_experiment(cfg, schemes=("qlmmse",), qlmmse_exact=True)
    assert exact.se["qlmmse_off"].mean() > sampled.se["qlmmse_off"].mean()


def test_parse_dsnr():
    assert parse_dsnr("-10:5:10") == (-10.0, -5.0, 0.0, 5.0, 10.0)
    assert parse_dsnr("0") == (0.0,)
    assert parse_dsnr("1.5, -2") == (1.5, -2.0)
    with pytest.raises(ValueError):
        parse_dsnr("0:0:10")
    with pytest.raises(ValueError):
        parse_dsnr("1:2")


def test_parse_ld():
    assert parse_ld("54,216,inf") == (54, 216, "inf")
    with pytest.raises(ValueError):
        parse_ld("0")
    with pytest.raises(ValueError):
        parse_ld("abc")


def test_sweep_zero_offset_matches_base_run():
    cfg = SMALL.replace(drops=2)
    rows = sweep_snr_ld(cfg, (0.0,), (cfg.L_D,), schemes=("mrc", "lmmse"))
    base = run_experiment(cfg, schemes=("mrc", "lmmse"))
    for scheme in ("mrc", "lmmse"):
        got = [m for s, d, ld, m in rows if s == scheme][0]
        assert got == pytest.approx(
            float(np.mean(base.se[result_key(scheme, "off")])), rel=1e-12)


def test_sweep_exact_row_bounds_finite_rows():
    cfg = SMALL.replace(drops=2)
    rows = sweep_snr_ld(cfg, (0.0,), (16, 96, "inf"), schemes=("qlmmse",))
    means = {ld: m for s, d, ld, m in rows}
    assert means["inf"] >= means["96"] >= 0
    assert means["inf"] >= means["16"]


def test_sweep_snr_scaling_monotone():
    cfg = SMALL.replace(drops=2)
    rows = sweep_snr_ld(cfg, (-20.0, 20.0), (cfg.L_D,), schemes=("mrc",))
    lo = [m for s, d, ld, m in rows if d == -20.0][0]
    hi = [m for s, d, ld, m in rows if d == 20.0][0]
    assert hi > lo


def test_sweep_csv_format(tmp_path):
    rows = [("mrc", 0.0, "216", 1.234567891), ("qlmmse", -5.0, "inf", 2.0)]
    path = write_sweep(rows, tmp_path)
    text = read(path).strip().splitlines()
    assert text[0] == "scheme,dsnr_db,ld,mean_se"
    assert text[1] == "mrc,0,216,1.23456789"
    assert text[2] == "qlmmse,-5,inf,2"


def test_unknown_scheme_rejected():
    with pytest.raises(ValueError):
        run_experiment(SMALL, schemes=("zf",))
    with pytest.raises(ValueError):
        run_experiment(SMALL, uc_modes=("maybe",))


# ----------------------------------------------------------------- CLI

def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "stripesim.cli", *args],
                          capture_output=True, text=True)


def test_cli_simulate_and_cost(tmp_path):
    cfg_path = tmp_path / "small.cfg"
    cfg_path.write_text(format_config(SMALL))
    out = run_cli("simulate", "--config", str(cfg_path), "--drops", "2",
                  "--schemes", "mrc,qlmmse", "--uc", "off,on",
                  "--out", str(tmp_path / "run"))
    assert out.returncode == 0, out.stderr
    assert (tmp_path / "run" / "se_samples.csv").exists()
    assert (tmp_path / "run" / "summary.json").exists()
    assert "qlmmse_on" in out.stdout
    cost = run_cli("cost", "--config", str(cfg_path),
                   "--out", str(tmp_path / "cost"))
    assert cost.returncode == 0, cost.stderr
    rows = read(tmp_path / "cost" / "cost.csv").strip().splitlines()
    assert rows[0].startswith("scheme,")


def test_cli_sweep(tmp_path):
    cfg_path = tmp_path / "small.cfg"
    cfg_path.write_text(format_config(SMALL.replace(drops=2)))
    out = run_cli("sweep", "--config", str(cfg_path), "--dsnr", "0",
                  "--ld", "16,inf", "--schemes", "qlmmse",
                  "--out", str(tmp_path / "sweep"))
    assert out.returncode == 0, out.stderr
    rows = read(tmp_path / "sweep" / "sweep.csv").strip().splitlines()
    assert len(rows) == 3


def test_cli_rejects_bad_config(tmp_path):
    cfg_path = tmp_path / "bad.cfg"
    cfg_path.write_text("L = 0\n")
    out = run_cli("simulate", "--config", str(cfg_path),
                  "--out", str(tmp_path / "x"))
    assert out.returncode == 2
    assert "L" in out.stderr


def test_cli_seed_override_changes_results(tmp_path):
    cfg_path = tmp_path / "small.cfg"
    cfg_path.write_text(format_config(SMALL.replace(drops=2)))
    outs = []
    for seed in ("3", "4"):
        dest = tmp_path / ("run" + seed)
        r = run_cli("simulate", "--config", str(cfg_path), "--seed", seed,
                    "--schemes", "mrc", "--out", str(dest))
        assert r.returncode == 0, r.stderr
        outs.append(read(dest / "se_samples.csv"))
    assert outs[0] != outs[1]
