import csv
import io
import json
import math
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from miso_wiretap.cli import EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_OK, main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SCHEMA = json.loads((Path(__file__).resolve().parent.parent / "docs" / "run_record.schema.json").read_text())


def write_config(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj, indent=2))
    return str(p)


SMALL = {
    "n_T": 3,
    "snr_db": 10,
    "mode": "statistical",
    "sigma_R": {"jakes": {"phi": 0.6}},
    "sigma_E": {"jakes": {"phi": 0.3, "scale": 0.3}},
    "solver": {"max_iters": 3000},
}


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_solve_writes_schema_valid_record(tmp_path):
    out, trace = tmp_path / "rec.json", tmp_path / "trace.csv"
    code = main(["solve", "--config", write_config(tmp_path, SMALL), "--out", str(out), "--trace", str(trace)])
    assert code == EXIT_OK
    rec = json.loads(out.read_text())
    jsonschema.validate(rec, SCHEMA)
    assert rec["converged"]
    assert rec["rate_bits"] == pytest.approx(rec["rate_nats"] / math.log(2), rel=1e-12)
    assert sum(rec["q_eigenvalues"]) == pytest.approx(1, abs=1e-10)
    rows = read_csv(trace.read_text())
    assert list(rows[0]) == ["iter", "rate_nats"]
    assert len(rows) == rec["iterations"] + 1
    assert float(rows[-1]["rate_nats"]) == pytest.approx(rec["rate_nats"], rel=1e-8)


def test_solve_is_deterministic(tmp_path):
    cfg = write_config(tmp_path, dict(SMALL, solver={"n_starts": 3, "seed": 5}))
    recs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        main(["solve", "--config", cfg, "--out", str(out), "--threads", str(k + 1)])
        rec = json.loads(out.read_text())
        rec.pop("wall_time")
        recs.append(json.dumps(rec, sort_keys=True))
    assert recs[0] == recs[1]


def test_equal_covariances_give_zero_rate(tmp_path):
    out = tmp_path / "rec.json"
    assert main(["solve", "--config", str(CONFIGS / "equal_covariances.json"), "--out", str(out)]) == EXIT_OK
    rec = json.loads(out.read_text())
    assert rec["rate_nats"] == pytest.approx(0, abs=1e-14)
    assert rec["reason"].startswith("degenerate")


def test_non_convergence_exit_code_still_writes(tmp_path):
    out = tmp_path / "rec.json"
    cfg = write_config(tmp_path, dict(SMALL, solver={"max_iters": 2}))
    assert main(["solve", "--config", cfg, "--out", str(out)]) == EXIT_NOT_CONVERGED
    rec = json.loads(out.read_text())
    assert rec["converged"] is False and rec["iterations"] == 2
    jsonschema.validate(rec, SCHEMA)


def test_config_errors_exit_2(tmp_path, capsys):
    bad = write_config(tmp_path, dict(SMALL, typo=1))
    assert main(["solve", "--config", bad]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "typo" in err and "line" in err
    assert main(["solve", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    # scan-z is only defined for the full-CSI mode
    assert main(["scan-z", "--config", str(CONFIGS / "statistical_n4.json")]) == EXIT_CONFIG
    assert main(["sweep", "--config", bad, "--param", "snr_db", "--values", "1,2"]) == EXIT_CONFIG
    good = write_config(tmp_path, SMALL, "good.json")
    assert main(["sweep", "--config", good, "--param", "snr_db", "--values", "a,b"]) == EXIT_CONFIG


def test_scan_z_coarse_grid(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code = main(["scan-z", "--config", str(CONFIGS / "full_csi_n4.json"), "--grid-step", "0.5", "--out", str(out)])
    assert code == EXIT_OK
    rows = read_csv(out.read_text())
    assert [float(r["z"]) for r in rows] == [0.0, 0.5, 1.0]
    assert list(rows[0]) == ["z", "phi_z", "rate_nats"]
    assert capsys.readouterr().err.startswith("best z=")


def test_scan_z_default_grid_convex_phi(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    assert main(["scan-z", "--config", str(CONFIGS / "full_csi_n4.json"), "--out", str(out)]) == EXIT_OK
    rows = read_csv(out.read_text())
    assert len(rows) == 101
    phi = np.array([float(r["phi_z"]) for r in rows])
    assert np.min(phi[2:] - 2 * phi[1:-1] + phi[:-2]) >= -1e-7
    # nine significant digits, plain decimal point
    assert all(len(r["rate_nats"].replace("-", "").replace(".", "").lstrip("0")) <= 9 for r in rows)
    summary = capsys.readouterr().err
    best_z = float(summary.split()[1].split("=")[1])
    assert best_z == pytest.approx(0.55, abs=0.02)


def test_sweep_rows_in_order_and_single_value_matches_solve(tmp_path):
    cfg = write_config(tmp_path, SMALL)
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--config", cfg, "--param", "snr_db", "--values", "10,0,5", "--out", str(out),
                 "--threads", "3"])
    assert code == EXIT_OK
    rows = read_csv(out.read_text())
    assert list(rows[0]) == ["param_value", "rate_nats", "rate_bits", "rank_q", "trace_q_theta"]
    assert [float(r["param_value"]) for r in rows] == [10.0, 0.0, 5.0]
    rec_out = tmp_path / "rec.json"
    main(["solve", "--config", cfg, "--out", str(rec_out)])
    rec = json.loads(rec_out.read_text())
    assert float(rows[0]["rate_nats"]) == pytest.approx(rec["rate_nats"], rel=1e-8)
    assert float(rows[1]["rate_nats"]) < float(rows[2]["rate_nats"]) < float(rows[0]["rate_nats"])


def test_sweep_over_list_valued_snr_requires_snr_param(tmp_path):
    cfg = write_config(tmp_path, dict(SMALL, snr_db=[0, 10]))
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", cfg, "--param", "phi_R", "--values", "0.5,0.7", "--out", str(out)]) == EXIT_OK
    rates = [float(r["rate_nats"]) for r in read_csv(out.read_text())]
    assert rates[0] < rates[1]


def test_validate_small_sample_report(tmp_path):
    out = tmp_path / "val.json"
    cfg = write_config(tmp_path, SMALL)
    code = main(["validate", "--config", cfg, "--samples", "1000", "--out", str(out)])
    rep = json.loads(out.read_text())
    assert set(rep) == {"closed_form_nats", "mc_estimate_nats", "mc_std_error", "n_samples", "z_score",
                        "threshold_sigmas", "pass", "converged"}
    assert rep["n_samples"] == 1000 and rep["mc_std_error"] > 0
    assert code == (EXIT_OK if rep["pass"] else 1)
    assert main(["validate", "--config", cfg, "--samples", "10"]) == EXIT_CONFIG


def test_seed_override_changes_sampled_channel(tmp_path):
    obj = dict(SMALL, mode="full_csi", h_R={"sample": {"seed": 1}}, sigma_R=None)
    obj.pop("sigma_R")
    cfg = write_config(tmp_path, obj)
    rates = []
    for seed in ("1", "2"):
        out = tmp_path / f"r{seed}.json"
        main(["solve", "--config", cfg, "--seed", seed, "--out", str(out)])
        rates.append(json.loads(out.read_text())["rate_nats"])
    assert rates[0] != rates[1]
