import json

import pytest

from permlab.cli import main


@pytest.fixture
def brownian_psi(tmp_path):
    path = tmp_path / "brownian.json"
    path.write_text(json.dumps({"kind": "gaussian_plus", "C": 0.5, "atoms": []}))
    return str(path)


def test_potential_eval_quadratic(brownian_psi, tmp_path, capsys):
    out = tmp_path / "u.csv"
    rc = main(["potential", "eval", "--psi", brownian_psi, "--beta", "0.5",
               "--kind", "u", "--x", "1", "--out", str(out)])
    assert rc == 0
    header, row = out.read_text().strip().splitlines()
    assert header == "x,y,value,err_bound"
    value = float(row.split(",")[2])
    assert value == pytest.approx(0.3678794, rel=1e-6)


def test_potential_eval_deterministic(brownian_psi, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = ["potential", "eval", "--psi", brownian_psi, "--beta", "0.5",
            "--kind", "sigma2", "--x", "0.5", "0.1"]
    main(args + ["--out", str(out1)])
    main(args + ["--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_potential_eval_family(tmp_path):
    spec = tmp_path / "scale.json"
    spec.write_text(json.dumps({"family": "scale",
                                "s": {"kind": "affine", "a": 1.0, "b": 0.0}}))
    out = tmp_path / "scale.csv"
    rc = main(["potential", "eval", "--family", "scale", "--spec", str(spec),
               "--x", "1.0", "--y", "2.0", "--out", str(out)])
    assert rc == 0
    row = out.read_text().strip().splitlines()[1]
    assert float(row.split(",")[2]) == pytest.approx(2.0)


def test_kernel_analyze(tmp_path):
    base = tmp_path / "base.json"
    base.write_text(json.dumps({"family": "exp_decay", "beta": 0.5, "C": 0.5}))
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"kind": "atoms", "atoms": [[1.0, 1.0]]}))
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"kind": "const", "c": 1.0}))
    out = tmp_path / "report.json"
    rc = main(["kernel", "analyze", "--base", str(base), "--f", str(f),
               "--g", str(g), "--grid", "1.0,0.7,20,0.7", "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["mmatrix_ok"] is True
    assert report["nu"] >= 1.0 - 1e-12
    assert report["det_ratio"] <= 1e-10
    assert report["m"] == 13


def test_lil_run(tmp_path):
    cfg = {
        "base": {"family": "exp_decay", "beta": 0.5, "C": 0.5},
        "schedule": [10, 14],
        "grid": {"d": 0.0, "theta": 0.3, "q": 0.5},
        "k": 1,
        "paths": 500,
        "seed": 7,
    }
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "report.csv"
    rc = main(["lil", "run", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,m_n,epsilon,freq_lower,freq_upper,nu,paths"
    assert len(lines) == 1 + 2 * 3
    rc2 = main(["lil", "run", "--config", str(cfg_path), "--out",
                str(tmp_path / "again.csv")])
    assert (tmp_path / "again.csv").read_bytes() == out.read_bytes()


def test_lil_run_rejects_unknown_keys(tmp_path):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"paths": 10, "seed": 1, "mystery": 2}))
    with pytest.raises(SystemExit):
        main(["lil", "run", "--config", str(cfg_path)])


@pytest.fixture
def model_path(tmp_path):
    model = {
        "states": [0, 1],
        "m": [1.0, 1.0],
        "generator": [[-1.0, 0.3], [0.3, -0.8]],
        "mu": [0.5, 0.0],
    }
    path = tmp_path / "model.json"
    path.write_text(json.dumps(model))
    return str(path)


def test_rebirth_sim(model_path, tmp_path):
    out = tmp_path / "lt.csv"
    rc = main(["rebirth", "sim", "--model", model_path, "--paths", "20000",
               "--seed", "3", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "state,mean_local_time,std_error,expected"
    assert len(lines) == 4
    for line in lines[1:]:
        _, mean, se, want = line.split(",")
        assert abs(float(mean) - float(want)) <= 5 * float(se)


def test_rebirth_check_ek(model_path, tmp_path):
    out = tmp_path / "ek.json"
    rc = main(["rebirth", "check-ek", "--model", model_path, "--y", "0",
               "--paths", "20000", "--seed", "5", "--out", str(out)])
    report = json.loads(out.read_text())
    assert rc == 0
    assert abs(report["z"]) <= 4.0


def test_malformed_spec_exits_with_usage_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "stable", "index": 1.5, "junk": 1}))
    with pytest.raises(SystemExit) as err:
        main(["potential", "eval", "--psi", str(bad), "--beta", "1.0",
              "--x", "1"])
    assert err.value.code == 2


def test_verify_core_suite_exits_zero(capsys):
    rc = main(["verify", "--suite", "core"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.count("[PASS]") == 10


def test_tol_scale_flag_accepted(brownian_psi, tmp_path):
    out = tmp_path / "u.csv"
    rc = main(["--tol-scale", "100", "potential", "eval", "--psi",
               brownian_psi, "--beta", "0.5", "--kind", "u", "--x", "1",
               "--out", str(out)])
    assert rc == 0


def test_lil_run_with_border_functions(tmp_path):
    cfg = {
        "base": {"family": "scale", "s": {"kind": "affine", "a": 1.0, "b": 0.0}},
        "schedule": [20],
        "grid": {"d": 1.0, "theta": 0.85, "q": 0.95, "direction": -1},
        "k": 1,
        "paths": 300,
        "seed": 5,
        "f": {"kind": "scale_concave", "p": 3.0, "x0": 1.0},
        "g": {"kind": "scale_concave", "p": 4.0, "x0": 1.0},
    }
    cfg_path = tmp_path / "flat.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "flat.csv"
    rc = main(["lil", "run", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    nu = float(lines[1].split(",")[5])
    assert nu >= 1.0 and nu - 1.0 < 0.01
