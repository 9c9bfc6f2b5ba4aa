import json
from pathlib import Path

import numpy as np
import pytest

from perceptronium import ConfigError, TachyonicModeError, cli
from perceptronium import experiments as ex
from perceptronium.emergent import lattice_dispersion, nearest_neighbor_couplings
from perceptronium.hilbert import matrix_to_json

BUNDLED = Path(__file__).resolve().parent.parent / "goldens"


def data_rows(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_config_validation():
    with pytest.raises(ConfigError, match="unknown experiment"):
        ex.ExperimentConfig.from_dict({"experiment": "nope"})
    with pytest.raises(ConfigError, match="seed"):
        ex.ExperimentConfig.from_dict({"experiment": "snip_optimize"})
    with pytest.raises(ConfigError, match="bogus"):
        ex.ExperimentConfig.from_dict({"experiment": "dispersion", "params": {"bogus": 1}})
    with pytest.raises(ConfigError, match="side"):
        ex.ExperimentConfig.from_dict({"experiment": "dispersion", "params": {"side": 99}})
    cfg = ex.ExperimentConfig.from_dict({"experiment": "dispersion"})
    assert cfg.params == {"side": 4, "mu": 1.0, "gamma": 1.0}


@pytest.mark.parametrize("name", sorted(ex.RANDOMIZED))
def test_randomized_experiments_require_seed(name):
    with pytest.raises(ConfigError):
        ex.ExperimentConfig.from_dict({"experiment": name})


def test_config_hash_ignores_output_path():
    a = ex.ExperimentConfig.from_dict({"experiment": "dispersion", "output_path": "a.csv"})
    b = ex.ExperimentConfig.from_dict({"experiment": "dispersion", "output_path": "b.csv"})
    c = ex.ExperimentConfig.from_dict({"experiment": "dispersion", "params": {"side": 3}})
    assert a.config_hash() == b.config_hash() != c.config_hash()


def test_metadata_header():
    cfg = ex.ExperimentConfig.from_dict({"experiment": "code_phi"})
    text = ex.render_csv(ex.run(cfg), cfg)
    meta = [ln for ln in text.splitlines() if ln.startswith("#")]
    keys = {ln[1:].split(":")[0].strip() for ln in meta}
    assert {"tool", "experiment", "seed", "config_hash", "config", "tolerance"} <= keys
    assert data_rows(text)[0] == "param,phi_bits,cut"


@pytest.mark.parametrize(
    "cfg",
    [
        {"experiment": "random_code_sweep", "seed": 3, "params": {"n_values": [6, 8]}},
        {"experiment": "apodization_compare", "params": {"b_values": [3, 4], "alpha_values": [0, 1]}},
        {"experiment": "ising_phi", "params": {"points": 6}},
    ],
)
def test_rows_identical_across_runs_and_threads(cfg, monkeypatch):
    c = ex.ExperimentConfig.from_dict(cfg)
    monkeypatch.setenv(ex.THREADS_ENV, "1")
    first = ex.render_csv(ex.run(c), c)
    monkeypatch.setenv(ex.THREADS_ENV, "4")
    second = ex.render_csv(ex.run(c), c)
    assert first == second


def test_bad_thread_env(monkeypatch):
    monkeypatch.setenv(ex.THREADS_ENV, "many")
    with pytest.raises(ConfigError):
        ex.run({"experiment": "code_phi", "params": {"k_values": [1, 2]}})


def test_cli_hamming(capsys):
    code, out, _ = run_cli(["run", "code_phi", "--code", "hamming84"], capsys)
    assert code == 0
    rows = [r.split(",") for r in data_rows(out)[1:]]
    assert [(int(k), float(p)) for k, p, _ in rows] == [(1, 1), (2, 2), (3, 3), (4, 2)]


def test_cli_quantum_phi_max(capsys):
    code, out, _ = run_cli(["quantum_phi_max", "--n", "4", "--seed", "0"], capsys)
    assert code == 0
    header, row = data_rows(out)[0].split(","), data_rows(out)[1].split(",")
    rec = dict(zip(header, row))
    assert float(rec["best_phi"]) == pytest.approx(0.2516, abs=5e-4)
    assert np.allclose([float(x) for x in rec["spectrum"].split(";")], [1 / 3, 1 / 3, 1 / 3, 0])


def test_cli_dispersion(capsys, tmp_path):
    out_file = tmp_path / "disp.csv"
    code, out, _ = run_cli(["run", "dispersion", "--side", "4", "--mu", "1", "--gamma", "1", "-o", str(out_file)], capsys)
    assert code == 0 and out == ""
    assert [p.name for p in tmp_path.iterdir()] == ["disp.csv"]
    rows = data_rows(out_file.read_text())[1:]
    assert len(rows) == 64
    c = nearest_neighbor_couplings(1, 1)
    for r in rows:
        kx, ky, kz, w2 = map(float, r.split(","))
        assert w2 == pytest.approx(lattice_dispersion(c, [kx, ky, kz]), abs=1e-9)


def test_cli_config_file_and_overrides(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"experiment": "code_phi", "params": {"code": "parity", "n": 6}}))
    code, out, _ = run_cli(["code_phi", "--config", str(path), "--n", "4"], capsys)
    assert code == 0
    assert [r.split(",")[1] for r in data_rows(out)[1:]] == ["1", "1"]


def test_cli_code_file(capsys, tmp_path):
    path = tmp_path / "code.txt"
    path.write_text("0000\n1111\n")
    code, out, _ = run_cli(["code_phi", "--code", "file", "--code-file", str(path)], capsys)
    assert code == 0 and data_rows(out)[1].startswith("1,1,")


def test_cli_integration_demo_with_hamiltonian_file(capsys, tmp_path):
    h = np.diag([0.0, 1.0, 2.0, 3.0])
    path = tmp_path / "h.json"
    path.write_text(json.dumps(matrix_to_json(h)))
    code, out, _ = run_cli(["integration_energy_demo", "--seed", "1", "--hamiltonian-file", str(path), "--unitaries", "20"], capsys)
    assert code == 0
    rec = dict(zip(data_rows(out)[0].split(","), data_rows(out)[1].split(",")))
    assert float(rec["integration_energy"]) < 1e-12


def test_cli_config_errors(capsys, tmp_path):
    assert run_cli(["code_phi", "--code", "random"], capsys)[0] == 1
    assert run_cli(["code_phi", "--n", "99"], capsys)[0] == 1
    assert run_cli(["quantum_phi_max", "--n", "4", "--l", "3", "--seed", "0"], capsys)[0] == 1
    assert run_cli(["code_phi", "--code", "file"], capsys)[0] == 1
    assert run_cli(["code_phi", "--config", str(tmp_path / "missing.json")], capsys)[0] == 1
    assert run_cli(["no_such_experiment"], capsys)[0] == 1
    code, _, err = run_cli(["dispersion", "--side", "0"], capsys)
    assert code == 1 and "side" in err


def test_cli_numerical_error(capsys, monkeypatch):
    def boom(cfg):
        raise TachyonicModeError("negative squared frequency")

    monkeypatch.setitem(ex.EXPERIMENTS, "dispersion", boom)
    code, _, err = run_cli(["dispersion"], capsys)
    assert code == 2 and "TachyonicModeError" in err


def test_bundled_goldens_verify(capsys):
    assert BUNDLED.is_dir()
    code, out, _ = run_cli(["verify", str(BUNDLED)], capsys)
    assert code == 0
    assert "fail=0" in out and "skip=0" in out


def test_perturbed_seed_only_breaks_seeded_experiments():
    entries = ex.verify(BUNDLED, seed_override=987)
    failed = {e.experiment for e in entries if e.status == "FAIL"}
    passed = {e.experiment for e in entries if e.status == "PASS"}
    assert failed == ex.RANDOMIZED
    assert passed == set(ex.EXPERIMENTS) - ex.RANDOMIZED


def test_missing_goldens_are_skipped_and_override_recorded(tmp_path, capsys):
    ex.write_goldens(tmp_path, ["dispersion", "code_phi"])
    report = tmp_path / "report.json"
    code, out, _ = run_cli(["verify", str(tmp_path), "--tol", "1e-6", "--report", str(report)], capsys)
    assert code == 0
    rep = json.loads(report.read_text())
    assert rep["tolerance_override"] == 1e-6
    status = {e["experiment"]: e["status"] for e in rep["entries"]}
    assert status["dispersion"] == status["code_phi"] == "PASS"
    assert sum(s == "SKIP" for s in status.values()) == len(ex.EXPERIMENTS) - 2
    assert "tolerance_override=1e-06" in out


def test_tampered_golden_fails(tmp_path, capsys):
    (path,) = ex.write_goldens(tmp_path, ["code_phi"])
    text = path.read_text().replace("3,3,", "3,2.5,")
    path.write_text(text)
    code, out, _ = run_cli(["verify", str(tmp_path)], capsys)
    assert code == 2 and "FAIL" in out


def test_empty_golden_dir_errors(tmp_path, capsys):
    assert run_cli(["verify", str(tmp_path / "absent")], capsys)[0] == 1
