import json

import pytest

from sbmbp.cli import EXIT_INVALID, EXIT_NONCONVERGED, EXIT_OK, main
from sbmbp.io import parse_network, read_marginals


@pytest.fixture
def network_file(tmp_path):
    assert main(["generate", "--n", "400", "--q", "2", "--c", "3", "--epsilon", "3",
                 "--delta", "0.2", "--seed", "5", "--out", str(tmp_path)]) == EXIT_OK
    return tmp_path / "network.txt"


def test_generate(network_file):
    net = parse_network(network_file)
    assert net.n == 400 and net.spec.q == 2


def test_generate_from_config(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("n: 300\nq: 3\nc: 4.0\nepsilon: 2.0\ndelta: 0.1\nseed: 2\n")
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    net = parse_network(tmp_path / "o" / "network.txt")
    assert net.n == 300 and net.spec.q == 3
    # flags override the file
    assert main(["generate", "--config", str(cfg), "--n", "200", "--out", str(tmp_path / "p")]) == EXIT_OK
    assert parse_network(tmp_path / "p" / "network.txt").n == 200


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 10, "colour": 3}))
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_INVALID


def test_invalid_parameters_exit_2(tmp_path, capsys):
    code = main(["generate", "--q", "2", "--c", "1", "--epsilon", "9", "--out", str(tmp_path)])
    assert code == EXIT_INVALID
    assert "error" in capsys.readouterr().err
    assert main(["infer", "--n", "100", "--seed", "-1", "--out", str(tmp_path)]) == EXIT_INVALID


def test_infer(network_file, tmp_path):
    out = tmp_path / "inf"
    assert main(["infer", "--network", str(network_file), "--init", "prior", "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "infer.json").read_text())
    assert summary["report"]["converged"] is True
    assert read_marginals(out / "marginals.csv").shape == (400, 2)


def test_infer_nonconvergence_exit_3(tmp_path):
    code = main(["infer", "--n", "3000", "--q", "2", "--c", "3", "--epsilon", "3.46",
                 "--max-sweeps", "2", "--out", str(tmp_path)])
    assert code == EXIT_NONCONVERGED


def test_classify(network_file, tmp_path):
    out = tmp_path / "cls"
    assert main(["classify", "--network", str(network_file), "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "classify.json").read_text())
    assert set(summary) == {"degree", "radius2"}
    assert (out / "radius2_marginals.csv").exists()


def test_oracle(tmp_path):
    assert main(["generate", "--n", "8", "--q", "2", "--c", "1.5", "--epsilon", "1",
                 "--seed", "3", "--out", str(tmp_path)]) == EXIT_OK
    out = tmp_path / "orc"
    assert main(["oracle", "--network", str(tmp_path / "network.txt"), "--model", "poisson",
                 "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "oracle.json").read_text())
    assert summary["model"] == "poisson"
    assert main(["oracle", "--n", "40", "--q", "5", "--c", "1", "--out", str(out)]) == EXIT_INVALID


def test_sweep_and_diagnose(tmp_path):
    out = tmp_path / "sw"
    code = main(["sweep", "--n", "600", "--q", "2", "--c", "3", "--delta", "0.1",
                 "--axis1", "epsilon=1,3", "--trials", "2", "--inits", "random,planted",
                 "--seed", "9", "--out", str(out)])
    assert code == EXIT_OK
    for name in ("records.csv", "timings.csv", "heatmap.csv", "diagnosis.json", "sweep.json"):
        assert (out / name).exists()
    assert main(["diagnose", "--records", str(out / "records.csv"), "--axis", "epsilon",
                 "--out", str(tmp_path / "dg")]) == EXIT_OK
    diag = json.loads((tmp_path / "dg" / "diagnosis.json").read_text())
    assert len(diag["cells"]) == 2
    again = tmp_path / "again"
    assert main(["sweep", "--replay", str(out / "sweep.json"), "--out", str(again)]) == EXIT_OK
    assert (again / "records.csv").read_bytes() == (out / "records.csv").read_bytes()


def test_sweep_needs_axis(tmp_path):
    assert main(["sweep", "--out", str(tmp_path)]) == EXIT_INVALID


def test_hysteresis(tmp_path):
    out = tmp_path / "hy"
    code = main(["hysteresis", "--n", "800", "--q", "3", "--c", "6", "--disassortative", "true",
                 "--axis", "c", "--start", "6", "--stop", "5", "--step", "0.5", "--out", str(out)])
    assert code == EXIT_OK
    summary = json.loads((out / "diagnosis.json").read_text())
    assert len(summary["values"]) == 3
    assert len((out / "records.csv").read_text().splitlines()) == 1 + 6


def test_requires_subcommand():
    with pytest.raises(SystemExit):
        main([])
