"""Plain-text network files and CSV/JSON dumps of inference results.

Network file layout::

    n q
    s_1 s_2 ... s_n          (1-based planted labels)
    m
    i j                      (m lines, 0-based, i < j)
    # key=value              (spec: gamma, affinity row-major)
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import NetworkFormatError
from .model import BlockModelSpec, Network


def _floats(values):
    return ",".join(repr(float(v)) for v in values)


def write_network(net, path):
    if net.labels is None:
        raise ValueError("only networks with planted labels can be written")
    q = net.spec.q if net.spec is not None else int(net.labels.max()) + 1
    lines = [f"{net.n} {q}", " ".join(str(int(s) + 1) for s in net.labels), str(net.m)]
    lines.extend(f"{i} {j}" for i, j in net.edges)
    if net.spec is not None:
        lines.append(f"# n={net.spec.n}")
        lines.append(f"# gamma={_floats(net.spec.gamma)}")
        lines.append(f"# affinity={_floats(net.spec.affinity.ravel())}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _ints(text, lineno, what):
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise NetworkFormatError(f"expected integers for {what}", lineno) from None


def parse_network(path):
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    body = [(k + 1, line) for k, line in enumerate(raw) if line.strip() and not line.startswith("#")]
    comments = [(k + 1, line) for k, line in enumerate(raw) if line.startswith("#")]
    if len(body) < 2:
        raise NetworkFormatError("missing header or label line", len(raw) or 1)

    lineno, line = body[0]
    header = _ints(line, lineno, "header")
    if len(header) != 2 or header[0] < 1 or header[1] < 1:
        raise NetworkFormatError("header must be 'n q' with positive values", lineno)
    n, q = header

    lineno, line = body[1]
    labels = _ints(line, lineno, "labels")
    if len(labels) != n:
        raise NetworkFormatError(f"expected {n} labels, found {len(labels)}", lineno)
    if min(labels) < 1 or max(labels) > q:
        raise NetworkFormatError(f"labels must lie in 1..{q}", lineno)

    if len(body) < 3:
        raise NetworkFormatError("missing edge count line", body[-1][0])
    lineno, line = body[2]
    count = _ints(line, lineno, "edge count")
    if len(count) != 1 or count[0] < 0:
        raise NetworkFormatError("edge count must be one non-negative integer", lineno)
    m = count[0]
    edge_lines = body[3:]
    if len(edge_lines) != m:
        raise NetworkFormatError(
            f"header declares {m} edges but {len(edge_lines)} follow", lineno
        )

    edges = np.empty((m, 2), dtype=np.int64)
    seen = set()
    for k, (lineno, line) in enumerate(edge_lines):
        pair = _ints(line, lineno, "edge")
        if len(pair) != 2:
            raise NetworkFormatError("edge line must hold two node ids", lineno)
        i, j = pair
        if not 0 <= i < j < n:
            raise NetworkFormatError(f"edge ({i}, {j}) needs 0 <= i < j < {n}", lineno)
        if (i, j) in seen:
            raise NetworkFormatError(f"duplicate edge ({i}, {j})", lineno)
        seen.add((i, j))
        edges[k] = i, j

    meta = {}
    for lineno, line in comments:
        text = line[1:].strip()
        if not text:
            continue
        if "=" not in text:
            raise NetworkFormatError("comment lines must hold key=value", lineno)
        key, value = text.split("=", 1)
        meta[key.strip()] = (lineno, value.strip())

    spec = None
    if "gamma" in meta or "affinity" in meta:
        try:
            gamma = [float(v) for v in meta["gamma"][1].split(",")]
            flat = [float(v) for v in meta["affinity"][1].split(",")]
        except KeyError as exc:
            raise NetworkFormatError(f"spec comment lacks {exc.args[0]}", comments[-1][0]) from None
        except ValueError:
            raise NetworkFormatError("bad number in spec comment", meta["gamma"][0]) from None
        if len(gamma) != q or len(flat) != q * q:
            raise NetworkFormatError("spec dimensions do not match q", meta["affinity"][0])
        try:
            spec = BlockModelSpec(n, np.array(gamma), np.array(flat).reshape(q, q))
        except ValueError as exc:
            raise NetworkFormatError(str(exc), meta["gamma"][0]) from None

    return Network(n, edges, np.array(labels, dtype=np.int64) - 1, spec)


def write_marginals(marginals, path):
    marginals = np.asarray(marginals)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "group", "value"])
        for i, row in enumerate(marginals):
            for a, v in enumerate(row):
                w.writerow([i, a + 1, repr(float(v))])


def read_marginals(path):
    rows = list(csv.DictReader(open(path, encoding="utf-8")))
    if not rows:
        return np.empty((0, 0))
    n = max(int(r["node"]) for r in rows) + 1
    q = max(int(r["group"]) for r in rows)
    out = np.zeros((n, q))
    for r in rows:
        out[int(r["node"]), int(r["group"]) - 1] = float(r["value"])
    return out


def write_messages(state, net, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "group", "value"])
        for p, (i, j) in enumerate(zip(net.owners, net.indices)):
            for a, v in enumerate(state.messages[p]):
                w.writerow([int(i), int(j), a + 1, repr(float(v))])


def _jsonable(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(record, path):
    Path(path).write_text(json.dumps(_jsonable(record), indent=2) + "\n", encoding="utf-8")
