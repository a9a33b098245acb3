"""Grid sweeps over the symmetric block-model family."""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .. import bp
from ..exceptions import DegenerateMessageError, InvalidParameterError
from ..metrics import overlap_report
from ..model import SymmetricFamily, sample_network
from .seeds import derive_seed

AXIS_NAMES = ("epsilon", "delta", "c")
INIT_ORDER = {"random": 0, "prior": 1, "planted": 2}


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidParameterError(f"axis must be one of {AXIS_NAMES}, got {self.name!r}")
        if not self.values:
            raise InvalidParameterError(f"axis {self.name} has no values")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def from_range(cls, name, start, stop, step):
        """Inclusive range; a negative step walks downwards."""
        if step == 0:
            raise InvalidParameterError("axis step must be non-zero")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise InvalidParameterError(f"empty range {start}:{stop}:{step}")
        return cls(name, tuple(round(start + k * step, 12) for k in range(count)))

    @classmethod
    def parse(cls, text):
        """``name:start:stop:step`` or ``name=v1,v2,...``."""
        if "=" in text:
            name, vals = text.split("=", 1)
            return cls(name.strip(), tuple(float(v) for v in vals.split(",")))
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidParameterError(f"bad axis {text!r}; use name:start:stop:step or name=v1,v2")
        return cls.from_range(parts[0].strip(), *(float(p) for p in parts[1:]))


@dataclass
class SweepSpec:
    family: SymmetricFamily
    axis1: Axis
    axis2: Axis = None
    n: int = 30000
    trials: int = 5
    inits: tuple = ("random",)
    finite_steps: tuple = ()
    tol: float = bp.DEFAULT_TOL
    max_sweeps: int = bp.DEFAULT_MAX_SWEEPS
    seed: int = 0
    exact_sizes: bool = False

    def __post_init__(self):
        self.inits = tuple(self.inits)
        self.finite_steps = tuple(int(t) for t in self.finite_steps)
        for init in self.inits:
            if init not in bp.INIT_MODES:
                raise InvalidParameterError(f"unknown init {init!r}")
        if self.trials < 1 or self.n < 1:
            raise InvalidParameterError("n and trials must be positive")

    def cell_family(self, i1, i2):
        changes = {self.axis1.name: self.axis1.values[i1]}
        if self.axis2 is not None:
            changes[self.axis2.name] = self.axis2.values[i2]
        return self.family.replace(**changes)

    def cells(self):
        n2 = 1 if self.axis2 is None else len(self.axis2.values)
        return [(i1, i2) for i1 in range(len(self.axis1.values)) for i2 in range(n2)]

    def validate(self):
        """``{(i1, i2): message}`` for every cell violating the family's preconditions."""
        bad = {}
        for i1, i2 in self.cells():
            try:
                self.cell_family(i1, i2).spec(self.n)
            except InvalidParameterError as exc:
                bad[(i1, i2)] = str(exc)
        return bad

    def to_dict(self):
        out = asdict(self)
        out["family"] = self.family.to_dict()
        out["axis1"] = {"name": self.axis1.name, "values": list(self.axis1.values)}
        out["axis2"] = (
            None if self.axis2 is None
            else {"name": self.axis2.name, "values": list(self.axis2.values)}
        )
        out["inits"] = list(self.inits)
        out["finite_steps"] = list(self.finite_steps)
        return out

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        fam = dict(d.pop("family"))
        if fam.get("zeta") is not None:
            fam["zeta"] = tuple(fam["zeta"])
        a1 = d.pop("axis1")
        a2 = d.pop("axis2", None)
        return cls(
            family=SymmetricFamily(**fam),
            axis1=Axis(a1["name"], tuple(a1["values"])),
            axis2=None if a2 is None else Axis(a2["name"], tuple(a2["values"])),
            **d,
        )


@dataclass
class RunRecord:
    """One inference run: cell parameters, seed, init and its outcome.

    ``steps`` is -1 for converged runs, else the finite step count ``t``.
    """

    i1: int
    i2: int
    q: int
    n: int
    c: float
    epsilon: float
    delta: float
    disassortative: bool
    trial: int
    seed: int
    init: str
    steps: int = -1
    branch: str = ""
    edits: int = 0
    Q: float = float("nan")
    Q_mu: float = float("nan")
    Q_perm: float = float("nan")
    baseline_Q: float = float("nan")
    baseline_Qmu: float = float("nan")
    sweeps: int = 0
    residual: float = float("nan")
    converged: bool = False
    log_likelihood: float = float("nan")
    error: str = ""
    wall_time: float = field(default=0.0, compare=False)

    @classmethod
    def columns(cls, timing=False):
        names = [f.name for f in fields(cls)]
        return names if timing else [n for n in names if n != "wall_time"]

    def sort_key(self):
        return (self.i1, self.i2, self.trial, self.branch, INIT_ORDER.get(self.init, 9), self.steps)


def _base_record(spec_or_family, n, i1, i2, trial, seed, init):
    fam = spec_or_family
    eps = fam.epsilon
    if fam.disassortative:
        # the effective c_in - c_out of the planted coloring
        try:
            eps = -float(fam.affinity()[0, 1])
        except InvalidParameterError:
            eps = float("nan")
    return RunRecord(i1=i1, i2=i2, q=fam.q, n=n, c=float(fam.c), epsilon=float(eps),
                     delta=float(fam.delta), disassortative=bool(fam.disassortative),
                     trial=trial, seed=seed, init=init)


def fill_outcome(rec, state, net, report=None):
    rep = overlap_report(state.marginals, net.labels, net.spec.gamma)
    for k, v in rep.to_dict().items():
        setattr(rec, k, v)
    if report is not None:
        rec.sweeps = report.sweeps
        rec.residual = report.residual
        rec.converged = report.converged
        rec.log_likelihood = report.log_likelihood
    return rec


def run_cell(spec, i1, i2, trial):
    """All records for one grid cell and trial; one network shared by every init."""
    fam = spec.cell_family(i1, i2)
    seed = derive_seed(spec.seed, i1, i2, trial)
    try:
        model = fam.spec(spec.n)
    except InvalidParameterError as exc:
        out = []
        for init in spec.inits:
            rec = _base_record(fam, spec.n, i1, i2, trial, seed, init)
            rec.error = f"invalid: {exc}"
            out.append(rec)
        return out
    net = sample_network(model, derive_seed(seed, 0), exact_sizes=spec.exact_sizes)
    out = []
    for init in spec.inits:
        run_seed = derive_seed(seed, 1, INIT_ORDER[init])
        rec = _base_record(fam, spec.n, i1, i2, trial, seed, init)
        t0 = time.perf_counter()
        try:
            state, report = bp.run_to_convergence(net, init, spec.tol, spec.max_sweeps, seed=run_seed)
            fill_outcome(rec, state, net, report)
        except DegenerateMessageError as exc:
            rec.error = f"degenerate: {exc}"
        rec.wall_time = time.perf_counter() - t0
        out.append(rec)
        for t in spec.finite_steps:
            rec = _base_record(fam, spec.n, i1, i2, trial, seed, init)
            rec.steps = t
            t0 = time.perf_counter()
            try:
                state = bp.run_finite(net, t, init, seed=run_seed)
                fill_outcome(rec, state, net)
                rec.sweeps = t
                rec.log_likelihood = bp.log_likelihood(state, net)
            except DegenerateMessageError as exc:
                rec.error = f"degenerate: {exc}"
            rec.wall_time = time.perf_counter() - t0
            out.append(rec)
    return out


def _run_job(args):
    return run_cell(*args)


def sweep(spec, threads=1, progress=None):
    """Run every cell x trial x init; records come back in canonical order."""
    jobs = [(spec, i1, i2, t) for i1, i2 in spec.cells() for t in range(spec.trials)]
    records = []
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for recs in pool.map(_run_job, jobs):
                records.extend(recs)
                if progress:
                    progress(recs)
    else:
        for job in jobs:
            recs = _run_job(job)
            records.extend(recs)
            if progress:
                progress(recs)
    records.sort(key=RunRecord.sort_key)
    return records
