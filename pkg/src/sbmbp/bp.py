"""Belief propagation for the sparse stochastic block model.

Messages follow the cavity update

    mu_a^{i->j} ∝ gamma_a exp(-h_a) prod_{k in N(i)\\j} sum_b c_ab mu_b^{k->i}

with the non-edge field ``h_a = sum_b c_ab mean_k(mu_b^k)``. Setting
``nonedge_field=False`` drops the ``exp(-h_a)`` factor, which turns BP into
exact sum-product for the tree-only weight model (used against the
enumeration oracle).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from ._validation import check_prior
from .exceptions import DegenerateMessageError, InvalidParameterError

INIT_MODES = ("random", "prior", "planted")
DEFAULT_TOL = 1e-6
DEFAULT_MAX_SWEEPS = 2000


@dataclass
class MessageSet:
    """Mutable BP state for one network.

    ``messages[p]`` is the message along directed edge position ``p`` (see
    :class:`~sbmbp.model.Network`), ``marginals[i]`` the belief of node ``i``
    and ``field`` the current non-edge field ``h``.
    """

    messages: np.ndarray
    marginals: np.ndarray
    field: np.ndarray

    def copy(self):
        return MessageSet(self.messages.copy(), self.marginals.copy(), self.field.copy())

    def message(self, net, i, j):
        return self.messages[net.edge_position(i, j)]


@dataclass
class ConvergenceReport:
    sweeps: int
    residual: float
    converged: bool
    log_likelihood: float

    def to_dict(self):
        return {
            "sweeps": int(self.sweeps),
            "residual": float(self.residual),
            "converged": bool(self.converged),
            "log_likelihood": float(self.log_likelihood),
        }


def _model_arrays(net, gamma=None, affinity=None):
    if gamma is None or affinity is None:
        if net.spec is None:
            raise InvalidParameterError("network has no spec; pass gamma and affinity")
        gamma = net.spec.gamma if gamma is None else gamma
        affinity = net.spec.affinity if affinity is None else affinity
    gamma = check_prior(gamma)
    affinity = np.ascontiguousarray(affinity, dtype=float)
    if affinity.shape != (gamma.size, gamma.size):
        raise InvalidParameterError("affinity does not match the number of groups")
    return gamma, affinity


def compute_field(marginals, affinity, n=None):
    """``h_a = (1/n) sum_k sum_b c_ab mu_b^k``."""
    marginals = np.asarray(marginals, dtype=float)
    n = marginals.shape[0] if n is None else n
    mbar = marginals.sum(axis=0) / n
    return np.asarray(affinity) @ mbar


def init_messages(net, mode="prior", seed=None, gamma=None, affinity=None):
    """Initial state: ``prior`` (all messages = gamma), ``planted`` (one-hot on
    the true label of the sender) or ``random`` (uniform entries, normalized).
    """
    gamma, affinity = _model_arrays(net, gamma, affinity)
    q, two_m = gamma.size, 2 * net.m
    if mode == "prior":
        messages = np.tile(gamma, (two_m, 1))
        marginals = np.tile(gamma, (net.n, 1))
    elif mode == "planted":
        if net.labels is None:
            raise InvalidParameterError("planted initialization needs planted labels")
        onehot = np.eye(q)[net.labels]
        messages = onehot[net.owners]
        marginals = onehot
    elif mode == "random":
        rng = np.random.default_rng(seed)
        messages = rng.random((two_m, q))
        messages /= messages.sum(axis=1, keepdims=True)
        marginals = rng.random((net.n, q))
        marginals /= marginals.sum(axis=1, keepdims=True)
    else:
        raise InvalidParameterError(f"unknown init mode {mode!r}; use one of {INIT_MODES}")
    messages = np.ascontiguousarray(messages, dtype=float)
    marginals = np.ascontiguousarray(marginals, dtype=float)
    return MessageSet(messages, marginals, compute_field(marginals, affinity))


def _raise_degenerate(net, bad):
    if bad >= 0:
        i, j = int(net.owners[bad]), int(net.indices[bad])
        raise DegenerateMessageError(f"message {i}->{j} has zero normalizer", edge=(i, j))
    node = -2 - bad
    raise DegenerateMessageError(f"marginal of node {node} has zero normalizer", edge=(node,))


def bp_sweep(state, net, seed=None, gamma=None, affinity=None, nonedge_field=True, damping=0.0):
    """One asynchronous sweep over nodes in a random order.

    Returns the mean absolute change over all message entries.
    """
    gamma, affinity = _model_arrays(net, gamma, affinity)
    rng = np.random.default_rng(seed)
    order = rng.permutation(net.n).astype(np.int64)
    mbar = state.marginals.sum(axis=0) / net.n
    total, bad = _kernels.async_sweep(
        order, net.indptr, net.reverse, state.messages, state.marginals, mbar,
        gamma, affinity, float(net.n), bool(nonedge_field), float(damping),
    )
    if bad != -1:
        _raise_degenerate(net, bad)
    state.field = compute_field(state.marginals, affinity, net.n)
    if net.m == 0:
        return 0.0
    return total / state.messages.size


def log_likelihood(state, net, gamma=None, affinity=None, nonedge_field=True):
    """Bethe log-likelihood of a BP state (minus the Bethe free energy).

    ``L = sum_i log Z_i - sum_(ij) log Z_ij + (1/2n) sum_ab c_ab S_a S_b``
    with ``S_a = sum_i mu_a^i``; the last term, and the field inside ``Z_i``,
    are dropped when ``nonedge_field`` is off. For the tree-only weight model
    on a tree this equals the exact log evidence.
    """
    gamma, affinity = _model_arrays(net, gamma, affinity)
    msg = state.messages
    # incoming[p, a] = sum_b c_ab mu_b along directed edge p
    incoming = msg @ affinity.T
    with np.errstate(divide="ignore"):
        log_in = np.log(incoming)
        log_gamma = np.log(gamma)
    S = np.zeros((net.n, gamma.size))
    # node i collects the factors arriving over reverse edges of its own slots
    np.add.at(S, net.owners, log_in[net.reverse])
    base = log_gamma[None, :] + S
    if nonedge_field:
        h = compute_field(state.marginals, affinity, net.n)
        base = base - h[None, :]
    log_zi = logsumexp(base, axis=1)
    if not np.all(np.isfinite(log_zi)):
        raise DegenerateMessageError("a node normalizer Z_i is zero")
    fwd = net.owners < net.indices
    z_ij = np.einsum("pa,pa->p", msg[fwd], incoming[net.reverse[fwd]])
    if np.any(z_ij <= 0):
        raise DegenerateMessageError("an edge normalizer Z_ij is zero")
    L = log_zi.sum() - np.log(z_ij).sum()
    if nonedge_field:
        totals = state.marginals.sum(axis=0)
        L += totals @ affinity @ totals / (2.0 * net.n)
    return float(L)


def edge_marginal(state, net, i, j, affinity=None):
    """Two-node belief ``mu_ab^{ij} ∝ c_ab mu_a^{i->j} mu_b^{j->i}``."""
    if affinity is None:
        _, affinity = _model_arrays(net)
    affinity = np.asarray(affinity, dtype=float)
    p = net.edge_position(i, j)
    joint = affinity * np.outer(state.messages[p], state.messages[net.reverse[p]])
    z = joint.sum()
    if z <= 0:
        raise DegenerateMessageError(f"edge ({i}, {j}) has zero normalizer", edge=(i, j))
    return joint / z


def converge(state, net, tol=DEFAULT_TOL, max_sweeps=DEFAULT_MAX_SWEEPS, seed=None,
             gamma=None, affinity=None, nonedge_field=True, damping=0.0):
    """Sweep ``state`` in place until the residual drops to ``tol``."""
    if tol <= 0:
        raise InvalidParameterError(f"tol must be positive, got {tol}")
    gamma, affinity = _model_arrays(net, gamma, affinity)
    rng = np.random.default_rng(seed)
    residual, sweeps = np.inf, 0
    while sweeps < max_sweeps:
        residual = bp_sweep(state, net, rng, gamma, affinity, nonedge_field, damping)
        sweeps += 1
        if residual <= tol:
            break
    L = log_likelihood(state, net, gamma, affinity, nonedge_field)
    return ConvergenceReport(sweeps, float(residual), bool(residual <= tol), L)


def run_to_convergence(net, init="random", tol=DEFAULT_TOL, max_sweeps=DEFAULT_MAX_SWEEPS,
                       seed=None, gamma=None, affinity=None, nonedge_field=True, damping=0.0):
    """Initialize (or warm-start from a :class:`MessageSet`) and converge.

    One seed drives both the random initialization and the sweep orders.
    """
    rng = np.random.default_rng(seed)
    if isinstance(init, MessageSet):
        state = init.copy()
    else:
        state = init_messages(net, init, rng, gamma, affinity)
    report = converge(state, net, tol, max_sweeps, rng, gamma, affinity, nonedge_field, damping)
    return state, report


def run_finite(net, t, init="prior", seed=None, gamma=None, affinity=None, nonedge_field=True):
    """Exactly ``t`` synchronous BP steps.

    Each generation is computed from the previous one only, and the non-edge
    field is held at its value for the initial marginals, so the step-``t``
    marginal of a node depends on nothing beyond its radius-``t``
    neighborhood. Step-``t`` marginals use the step-``t-1`` incoming messages.
    """
    if t < 0:
        raise InvalidParameterError(f"step count must be >= 0, got {t}")
    gamma, affinity = _model_arrays(net, gamma, affinity)
    state = init_messages(net, init, seed, gamma, affinity)
    weights = gamma * np.exp(-state.field) if nonedge_field else gamma.copy()
    msg = state.messages
    buf = np.empty_like(msg)
    marg = np.empty_like(state.marginals)
    for _ in range(t):
        bad = _kernels.sync_step(net.indptr, net.reverse, msg, buf, marg, weights, affinity)
        if bad != -1:
            _raise_degenerate(net, bad)
        msg, buf = buf, msg
    if t > 0:
        state.messages = msg
        state.marginals = marg
    return state
