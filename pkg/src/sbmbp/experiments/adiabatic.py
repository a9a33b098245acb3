"""Adiabatic parameter sweeps: edit the network a little, warm-start BP."""

import time
from dataclasses import dataclass, field

import numpy as np

from .. import bp
from ..exceptions import DegenerateMessageError, InvalidParameterError
from ..model import Network, sample_network
from .seeds import derive_seed
from .sweep import _base_record, fill_outcome

ADIABATIC_AXES = ("c", "epsilon")


def _pair_counts(sizes, a, b):
    if a == b:
        return sizes[a] * (sizes[a] - 1) / 2.0
    return float(sizes[a]) * float(sizes[b])


def _stochastic_round(x, rng):
    base = np.floor(x)
    return int(base + (rng.random() < x - base))


def _add_pairs(existing, members_a, members_b, k, n, rng):
    """``k`` uniform absent pairs between two member sets, as sorted keys ``i*n+j``."""
    added = np.empty(0, dtype=np.int64)
    while added.size < k:
        need = k - added.size
        draw = max(2 * need, 16)
        i = rng.choice(members_a, size=draw)
        j = rng.choice(members_b, size=draw)
        lo, hi = np.minimum(i, j), np.maximum(i, j)
        keys = lo * n + hi
        keys = keys[lo != hi]
        keys = keys[~np.isin(keys, existing)]
        keys = keys[~np.isin(keys, added)]
        _, first = np.unique(keys, return_index=True)
        keys = keys[np.sort(first)][:need]
        added = np.concatenate([added, keys])
    return added


def edit_network(net, new_spec, rng):
    """Minimal edit of ``net`` toward ``new_spec`` with labels held fixed.

    For each unordered group pair the expected edge count changes by
    ``(c'_ab - c_ab) N_ab / n``; that difference is rounded stochastically
    and realized by adding uniformly random absent pairs or deleting
    uniformly random present edges of the pair type.
    Returns ``(new_network, number_of_edits)``.
    """
    if net.labels is None or net.spec is None:
        raise InvalidParameterError("adiabatic edits need a labeled network with a spec")
    if new_spec.n != net.n or not np.array_equal(new_spec.gamma, net.spec.gamma):
        raise InvalidParameterError("adiabatic edits keep n and the group prior fixed")
    n, q, labels = net.n, new_spec.q, net.labels
    rng = np.random.default_rng(rng)
    sizes = np.bincount(labels, minlength=q)
    members = [np.flatnonzero(labels == a) for a in range(q)]
    keys = net.edges[:, 0] * n + net.edges[:, 1]
    la, lb = labels[net.edges[:, 0]], labels[net.edges[:, 1]]
    type_lo, type_hi = np.minimum(la, lb), np.maximum(la, lb)
    keep = np.ones(keys.size, dtype=bool)
    new_keys = []
    edits = 0
    for a in range(q):
        for b in range(a, q):
            diff = (new_spec.affinity[a, b] - net.spec.affinity[a, b]) / n
            k = _stochastic_round(abs(diff) * _pair_counts(sizes, a, b), rng)
            if k == 0:
                continue
            if diff < 0:
                present = np.flatnonzero((type_lo == a) & (type_hi == b))
                k = min(k, present.size)
                keep[rng.choice(present, size=k, replace=False)] = False
            else:
                k = min(k, int(_pair_counts(sizes, a, b)) - int(np.sum((type_lo == a) & (type_hi == b))))
                new_keys.append(_add_pairs(keys, members[a], members[b], k, n, rng))
            edits += k
    all_keys = np.concatenate([keys[keep]] + new_keys)
    edges = np.stack([all_keys // n, all_keys % n], axis=1)
    return Network(n, edges, labels, new_spec), edits


def transfer_state(state, old_net, new_net):
    """Carry messages across an edit; new directed edges start at the source marginal."""
    n = new_net.n
    old_keys = old_net.owners * n + old_net.indices
    new_keys = new_net.owners * n + new_net.indices
    pos = np.searchsorted(old_keys, new_keys)
    pos = np.minimum(pos, max(old_keys.size - 1, 0))
    hit = old_keys[pos] == new_keys if old_keys.size else np.zeros(new_keys.size, dtype=bool)
    msgs = state.marginals[new_net.owners].copy()
    msgs[hit] = state.messages[pos[hit]]
    marg = state.marginals.copy()
    return bp.MessageSet(msgs, marg, bp.compute_field(marg, new_net.spec.affinity, n))


@dataclass
class Trajectory:
    records: list = field(default_factory=list)
    network: object = None
    state: object = None


def adiabatic_sweep(family, axis, values, n, seed=0, init="planted", tol=bp.DEFAULT_TOL,
                    max_sweeps=bp.DEFAULT_MAX_SWEEPS, branch="", start=None, progress=None):
    """Walk ``axis`` through ``values`` editing one network and warm-starting BP.

    ``start`` is an optional ``(network, state)`` to continue from; otherwise a
    network is sampled at the first value and BP is initialized with ``init``.
    A step that fails to converge is recorded and the walk continues from its
    last messages.
    """
    if axis not in ADIABATIC_AXES:
        raise InvalidParameterError(f"adiabatic axis must be one of {ADIABATIC_AXES}")
    values = [float(v) for v in values]
    if not values:
        raise InvalidParameterError("adiabatic sweep needs at least one value")
    steps = np.diff(values)
    if np.any(steps > 0) and np.any(steps < 0):
        raise InvalidParameterError("adiabatic axis values must be monotone")
    fams = [family.replace(**{axis: v}) for v in values]
    specs = [f.spec(n) for f in fams]
    traj = Trajectory()
    if start is None:
        net = sample_network(specs[0], derive_seed(seed, 0))
        state = None
    else:
        net, state = start
    for k, (fam, spec) in enumerate(zip(fams, specs)):
        step_seed = derive_seed(seed, 1, k)
        rng = np.random.default_rng(step_seed)
        rec = _base_record(fam, n, k, 0, 0, seed, init)
        rec.branch = branch
        t0 = time.perf_counter()
        if state is None:
            warm = init
        else:
            new_net, rec.edits = edit_network(net, spec, rng)
            warm = transfer_state(state, net, new_net)
            net = new_net
        try:
            state, report = bp.run_to_convergence(net, warm, tol, max_sweeps, seed=rng)
            fill_outcome(rec, state, net, report)
        except DegenerateMessageError as exc:
            rec.error = f"degenerate: {exc}"
            state = warm if isinstance(warm, bp.MessageSet) else None
        rec.wall_time = time.perf_counter() - t0
        traj.records.append(rec)
        if progress:
            progress(rec)
    traj.network, traj.state = net, state
    return traj


@dataclass
class HysteresisLoop:
    down: list
    up: list
    values: list
    gap: list
    area: float

    def max_consecutive(self, threshold, interior=True):
        """Longest run of steps with ``down - up >= threshold``."""
        gaps = self.gap[1:-1] if interior else self.gap
        best = run = 0
        for g in gaps:
            run = run + 1 if g >= threshold else 0
            best = max(best, run)
        return best

    def to_dict(self):
        return {"values": self.values, "gap": self.gap, "area": self.area}


def hysteresis_loop(family, axis, start, stop, step, n, seed=0, init="planted",
                    tol=bp.DEFAULT_TOL, max_sweeps=bp.DEFAULT_MAX_SWEEPS, metric="Q_perm",
                    progress=None):
    """Down from ``start`` to ``stop`` then back up on the same evolving network.

    The loop area is the trapezoid integral of ``down - up`` over the axis,
    positive when the down branch lies above. Branches are compared on
    ``metric``; the default ``Q_perm`` ignores a relabeled accurate state,
    which the up branch can land in when the groups are nearly symmetric.
    """
    if step <= 0:
        raise InvalidParameterError("step must be positive")
    count = int(np.floor(abs(stop - start) / step + 1e-9)) + 1
    sign = -1.0 if stop < start else 1.0
    out = [round(start + sign * k * step, 12) for k in range(count)]
    back = out[::-1]
    down = adiabatic_sweep(family, axis, out, n, derive_seed(seed, 0), init, tol, max_sweeps,
                           branch="down", progress=progress)
    up = adiabatic_sweep(family, axis, back, n, derive_seed(seed, 1), init, tol, max_sweeps,
                         branch="up", start=(down.network, down.state), progress=progress)
    q_down = np.array([getattr(r, metric) for r in down.records])
    q_up = np.array([getattr(r, metric) for r in up.records])[::-1]
    gap = q_down - q_up
    order = np.argsort(out)
    xs, g = np.asarray(out)[order], gap[order]
    area = float(np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(xs)))
    return HysteresisLoop(down.records, up.records, out, gap.tolist(), area)
