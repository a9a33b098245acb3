import csv
import json

import numpy as np
import pytest

from sbmbp import bp
from sbmbp.exceptions import NetworkFormatError
from sbmbp.io import (
    parse_network,
    read_marginals,
    write_json,
    write_marginals,
    write_messages,
    write_network,
)
from sbmbp.model import BlockModelSpec, Network


def test_round_trip(tmp_path, small_sbm):
    path = tmp_path / "net.txt"
    write_network(small_sbm, path)
    back = parse_network(path)
    assert back == small_sbm
    np.testing.assert_array_equal(back.spec.affinity, small_sbm.spec.affinity)


def test_empty_graph_file(tmp_path):
    net = Network(3, np.empty((0, 2)), [0, 1, 0], BlockModelSpec(3, [0.5, 0.5], np.ones((2, 2))))
    path = tmp_path / "empty.txt"
    write_network(net, path)
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    assert lines == ["3 2", "1 2 1", "0"]
    assert parse_network(path) == net


def _write(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    return p


@pytest.mark.parametrize(
    "text, lineno, fragment",
    [
        ("3 2\n1 2 1\n2\n0 1\n0 1\n", 5, "duplicate"),
        ("3 2\n1 2 1\n1\n1 0\n", 4, "i < j"),
        ("3 2\n1 2\n0\n", 2, "expected 3 labels"),
        ("3 2\n1 3 1\n0\n", 2, "labels must lie"),
        ("3 2\n1 2 1\n2\n0 1\n", 3, "declares 2 edges"),
        ("3 x\n1 2 1\n0\n", 1, "integers"),
        ("3 2\n1 2 1\n1\n0 1 2\n", 4, "two node ids"),
    ],
)
def test_parse_errors_carry_line_numbers(tmp_path, text, lineno, fragment):
    with pytest.raises(NetworkFormatError, match=fragment) as err:
        parse_network(_write(tmp_path, text))
    assert err.value.lineno == lineno
    assert str(err.value).startswith(f"line {lineno}:")


def test_parse_bad_spec_comment(tmp_path):
    text = "2 2\n1 2\n1\n0 1\n# gamma=0.5,0.5\n"
    with pytest.raises(NetworkFormatError, match="affinity"):
        parse_network(_write(tmp_path, text))


def test_marginals_round_trip(tmp_path):
    m = np.random.default_rng(0).dirichlet(np.ones(3), size=7)
    path = tmp_path / "m.csv"
    write_marginals(m, path)
    with open(path) as fh:
        header = next(csv.reader(fh))
    assert header == ["node", "group", "value"]
    np.testing.assert_array_equal(read_marginals(path), m)


def test_messages_dump(tmp_path, small_sbm):
    state = bp.init_messages(small_sbm, "random", 1)
    path = tmp_path / "msg.csv"
    write_messages(state, small_sbm, path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 * small_sbm.m * small_sbm.spec.q
    first = rows[0]
    # groups are written 1-based, like the labels in network files
    i, j = int(first["src"]), int(first["dst"])
    assert float(first["value"]) == state.message(small_sbm, i, j)[int(first["group"]) - 1]


def test_json_handles_numpy_and_nonfinite(tmp_path):
    path = tmp_path / "r.json"
    write_json({"a": np.float64(1.5), "b": np.int64(2), "c": float("nan"), "d": np.arange(2)}, path)
    data = json.loads(path.read_text())
    assert data == {"a": 1.5, "b": 2, "c": "nan", "d": [0, 1]}
