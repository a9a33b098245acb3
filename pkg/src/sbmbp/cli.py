"""Command line entry point: ``sbmbp <command> [options]``.

Every option can also come from ``--config`` (YAML or JSON, keys spelled
with underscores); explicit flags win over the file.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import bp, local, metrics, oracle
from .exceptions import (
    InstanceTooLargeError,
    InvalidParameterError,
    NetworkFormatError,
    ZeroEvidenceError,
)
from .io import parse_network, write_json, write_marginals, write_network
from .model import SymmetricFamily, degree_profile, sample_network

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGED = 3

log = logging.getLogger("sbmbp")

DEFAULTS = {
    "n": 30000,
    "q": 2,
    "c": 3.0,
    "epsilon": 0.0,
    "delta": 0.0,
    "zeta": None,
    "disassortative": False,
    "seed": 0,
    "threads": 1,
    "out": ".",
    "init": "random",
    "tol": bp.DEFAULT_TOL,
    "max_sweeps": bp.DEFAULT_MAX_SWEEPS,
    "exact_sizes": False,
    "network": None,
    "method": "both",
    "model": "tree",
    "axis1": None,
    "axis2": None,
    "trials": 5,
    "inits": "random",
    "finite_steps": "",
    "axis": "c",
    "start": None,
    "stop": None,
    "step": 0.25,
    "records": None,
    "row_axis": None,
    "gap_threshold": 0.05,
    "noise_factor": 3.0,
    "replay": None,
    "metric": "Q",
}


def _csv_list(value, cast=str):
    if value is None or value == "":
        return ()
    if isinstance(value, (list, tuple)):
        return tuple(cast(v) for v in value)
    return tuple(cast(v.strip()) for v in str(value).split(",") if v.strip())


def _load_config(path):
    if path is None:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InvalidParameterError("config file must hold a mapping")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
    return data


def _resolve(args):
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(args.config))
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            cfg[key] = value
    return cfg


def _family(cfg):
    zeta = _csv_list(cfg["zeta"], float) or None
    return SymmetricFamily(
        q=int(cfg["q"]), c=float(cfg["c"]), epsilon=float(cfg["epsilon"]),
        delta=float(cfg["delta"]), zeta=zeta, disassortative=bool(cfg["disassortative"]),
    )


def _network(cfg):
    if cfg["network"]:
        net = parse_network(cfg["network"])
        if net.spec is None:
            raise InvalidParameterError("network file carries no gamma/affinity comments")
        return net
    spec = _family(cfg).spec(int(cfg["n"]))
    return sample_network(spec, int(cfg["seed"]), exact_sizes=bool(cfg["exact_sizes"]))


def _outdir(cfg):
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(cfg):
    net = _network(cfg)
    path = _outdir(cfg) / "network.txt"
    write_network(net, path)
    print(f"wrote {path} (n={net.n}, m={net.m})")
    return EXIT_OK


def cmd_infer(cfg):
    net = _network(cfg)
    state, report = bp.run_to_convergence(
        net, cfg["init"], float(cfg["tol"]), int(cfg["max_sweeps"]), seed=int(cfg["seed"])
    )
    out = _outdir(cfg)
    write_marginals(state.marginals, out / "marginals.csv")
    summary = {"report": report.to_dict(), "init": cfg["init"], "seed": int(cfg["seed"])}
    if net.labels is not None:
        summary["overlap"] = metrics.overlap_report(state.marginals, net.labels, net.spec.gamma).to_dict()
    write_json(summary, out / "infer.json")
    print(json.dumps(summary))
    if not report.converged:
        log.error("BP did not converge in %d sweeps (residual %.3g)", report.sweeps, report.residual)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_classify(cfg):
    if cfg["method"] not in ("degree", "radius2", "both"):
        raise InvalidParameterError("method must be degree, radius2 or both")
    net = _network(cfg)
    gamma, affinity = net.spec.gamma, net.spec.affinity
    c_a, _ = degree_profile(gamma, affinity)
    out = _outdir(cfg)
    summary = {}
    methods = ("degree", "radius2") if cfg["method"] == "both" else (cfg["method"],)
    for name in methods:
        if name == "degree":
            marg = local.degree_classifier(net, gamma, c_a)
        else:
            marg = local.radius2_classifier(net, gamma, affinity, c_a)
        write_marginals(marg, out / f"{name}_marginals.csv")
        if net.labels is not None:
            summary[name] = metrics.overlap_report(marg, net.labels, gamma).to_dict()
    write_json(summary, out / "classify.json")
    print(json.dumps(summary))
    return EXIT_OK


def cmd_oracle(cfg):
    net = _network(cfg)
    model = cfg["model"]
    logz = oracle.exact_log_evidence(net, model=model)
    marg = oracle.exact_marginals(net, model=model)
    state, report = bp.run_to_convergence(
        net, "prior", float(cfg["tol"]), int(cfg["max_sweeps"]), seed=int(cfg["seed"]),
        nonedge_field=(model != "tree"),
    )
    out = _outdir(cfg)
    write_marginals(marg, out / "exact_marginals.csv")
    summary = {
        "model": model,
        "log_evidence": logz,
        "bp_log_likelihood": report.log_likelihood,
        "max_marginal_diff": float(np.max(np.abs(marg - state.marginals))),
        "bp_converged": report.converged,
    }
    write_json(summary, out / "oracle.json")
    print(json.dumps(summary))
    return EXIT_OK


def _sweep_spec(cfg):
    from .experiments import Axis, SweepSpec

    if cfg["replay"]:
        # a sweep.json from an earlier run fixes the whole grid and seed
        data = json.loads(Path(cfg["replay"]).read_text(encoding="utf-8"))
        try:
            return SweepSpec.from_dict(data)
        except (KeyError, TypeError) as exc:
            raise InvalidParameterError(f"bad replay file: {exc}") from exc
    if not cfg["axis1"]:
        raise InvalidParameterError("sweep needs --axis1 (name:start:stop:step or name=v1,v2)")
    return SweepSpec(
        family=_family(cfg),
        axis1=Axis.parse(cfg["axis1"]),
        axis2=Axis.parse(cfg["axis2"]) if cfg["axis2"] else None,
        n=int(cfg["n"]),
        trials=int(cfg["trials"]),
        inits=_csv_list(cfg["inits"]),
        finite_steps=_csv_list(cfg["finite_steps"], int),
        tol=float(cfg["tol"]),
        max_sweeps=int(cfg["max_sweeps"]),
        seed=int(cfg["seed"]),
        exact_sizes=bool(cfg["exact_sizes"]),
    )


def cmd_sweep(cfg):
    from .experiments import diagnose, emit, sweep

    spec = _sweep_spec(cfg)
    bad = spec.validate()
    for (i1, i2), msg in sorted(bad.items()):
        log.warning("cell (%d, %d) skipped: %s", i1, i2, msg)
    if len(bad) == len(spec.cells()):
        raise InvalidParameterError("every grid cell violates the model preconditions")
    done = [0]
    total = len(spec.cells()) * spec.trials

    def progress(_):
        done[0] += 1
        log.info("job %d/%d", done[0], total)

    records = sweep(spec, threads=int(cfg["threads"]), progress=progress)
    row_axis = cfg["row_axis"] or (spec.axis2.name if spec.axis2 else None)
    diag = diagnose(records, spec.axis1.name, row_axis, float(cfg["gap_threshold"]),
                    float(cfg["noise_factor"]), metric=cfg["metric"])
    files = emit(records, diag, cfg["out"], spec)
    print(f"wrote {len(records)} records to {files['records']}")
    return EXIT_OK


def cmd_hysteresis(cfg):
    from .experiments import emit, hysteresis_loop

    fam = _family(cfg)
    start = float(cfg["start"] if cfg["start"] is not None else getattr(fam, cfg["axis"]))
    if cfg["stop"] is None:
        raise InvalidParameterError("hysteresis needs --stop")
    loop = hysteresis_loop(
        fam, cfg["axis"], start, float(cfg["stop"]), float(cfg["step"]), int(cfg["n"]),
        seed=int(cfg["seed"]), init=cfg["init"], tol=float(cfg["tol"]),
        max_sweeps=int(cfg["max_sweeps"]),
    )
    summary = loop.to_dict()
    summary["max_consecutive_gap_0.05"] = loop.max_consecutive(0.05)
    files = emit(loop.down + loop.up, summary, cfg["out"], {k: cfg[k] for k in sorted(cfg)})
    print(f"loop area {loop.area:.4f}; wrote {files['records']}")
    return EXIT_OK


def cmd_diagnose(cfg):
    from .experiments import diagnose, read_records

    if not cfg["records"]:
        raise InvalidParameterError("diagnose needs --records")
    records = read_records(cfg["records"])
    diag = diagnose(records, cfg["axis"], cfg["row_axis"], float(cfg["gap_threshold"]),
                    float(cfg["noise_factor"]), metric=cfg["metric"])
    path = _outdir(cfg) / "diagnosis.json"
    write_json(diag.to_dict(), path)
    print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "infer": cmd_infer,
    "classify": cmd_classify,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "hysteresis": cmd_hysteresis,
    "diagnose": cmd_diagnose,
}


def _bool(text):
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common")
    g.add_argument("--config", help="YAML or JSON file with option values")
    g.add_argument("--out", help="output directory")
    g.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    g.add_argument("--threads", type=int, help="worker processes for sweeps")
    g.add_argument("-v", "--verbose", action="store_true")
    m = common.add_argument_group("model")
    m.add_argument("--n", type=int)
    m.add_argument("--q", type=int)
    m.add_argument("--c", type=float)
    m.add_argument("--epsilon", type=float)
    m.add_argument("--delta", type=float)
    m.add_argument("--zeta", help="comma-separated group offsets")
    m.add_argument("--disassortative", type=_bool, help="planted coloring (true/false)")
    m.add_argument("--exact-sizes", dest="exact_sizes", type=_bool)
    m.add_argument("--network", help="read this network file instead of sampling")
    r = common.add_argument_group("inference")
    r.add_argument("--init", choices=bp.INIT_MODES)
    r.add_argument("--tol", type=float)
    r.add_argument("--max-sweeps", dest="max_sweeps", type=int)

    parser = argparse.ArgumentParser(prog="sbmbp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="sample a network")
    sub.add_parser("infer", parents=[common], help="run BP to convergence on one network")
    p = sub.add_parser("classify", parents=[common], help="local degree-based classifiers")
    p.add_argument("--method", choices=("degree", "radius2", "both"))
    p = sub.add_parser("oracle", parents=[common], help="exact enumeration on a small network")
    p.add_argument("--model", choices=oracle.WEIGHT_MODELS)
    p = sub.add_parser("sweep", parents=[common], help="grid sweep with diagnostics")
    p.add_argument("--axis1", help="name:start:stop:step or name=v1,v2")
    p.add_argument("--axis2")
    p.add_argument("--trials", type=int)
    p.add_argument("--inits", help="comma-separated init modes")
    p.add_argument("--finite-steps", dest="finite_steps", help="comma-separated t values")
    p.add_argument("--replay", help="rerun the grid stored in an earlier sweep.json")
    p.add_argument("--row-axis", dest="row_axis")
    p.add_argument("--gap-threshold", dest="gap_threshold", type=float)
    p.add_argument("--noise-factor", dest="noise_factor", type=float)
    p.add_argument("--metric", choices=("Q", "Q_mu", "Q_perm"), help="overlap used by the diagnostics")
    p = sub.add_parser("hysteresis", parents=[common], help="adiabatic down/up sweep")
    p.add_argument("--axis", choices=("c", "epsilon"))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p = sub.add_parser("diagnose", parents=[common], help="phase diagnosis of a records.csv")
    p.add_argument("--records")
    p.add_argument("--axis")
    p.add_argument("--row-axis", dest="row_axis")
    p.add_argument("--gap-threshold", dest="gap_threshold", type=float)
    p.add_argument("--noise-factor", dest="noise_factor", type=float)
    p.add_argument("--metric", choices=("Q", "Q_mu", "Q_perm"), help="overlap used by the diagnostics")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _resolve(args)
        if int(cfg["seed"]) < 0 or int(cfg["seed"]) >= 1 << 64:
            raise InvalidParameterError("seed must be an unsigned 64-bit integer")
        if int(cfg["threads"]) < 1:
            raise InvalidParameterError("threads must be >= 1")
        return COMMANDS[args.command](cfg)
    except (InvalidParameterError, NetworkFormatError, InstanceTooLargeError,
            ZeroEvidenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
