"""Brute-force posterior over all ``q**n`` group assignments (small graphs only)."""

import numpy as np
from scipy.special import logsumexp

from .exceptions import InstanceTooLargeError, InvalidParameterError, ZeroEvidenceError

WEIGHT_MODELS = ("tree", "poisson", "bernoulli")
MAX_ASSIGNMENTS = 10**7
_CHUNK = 1 << 18


def _log_pair_table(affinity, model, n):
    with np.errstate(divide="ignore"):
        log_edge = np.log(affinity)
        if model == "bernoulli":
            log_edge = log_edge - np.log(n)
            p = affinity / n
            if np.any(p > 1):
                raise InvalidParameterError("c_ab / n exceeds 1")
            log_non = np.log1p(-p)
        elif model == "poisson":
            log_non = -affinity / n
        else:
            log_non = None
    return log_edge, log_non


def _enumerate(net, gamma, affinity, model):
    """Yield ``(digits, log_weight)`` chunks in mixed-radix order."""
    if model not in WEIGHT_MODELS:
        raise InvalidParameterError(f"unknown weight model {model!r}; use one of {WEIGHT_MODELS}")
    n, q = net.n, gamma.size
    total = q**n
    if total > MAX_ASSIGNMENTS:
        raise InstanceTooLargeError(f"{q}^{n} = {total} assignments exceeds {MAX_ASSIGNMENTS}")
    log_edge, log_non = _log_pair_table(affinity, model, n)
    with np.errstate(divide="ignore"):
        log_gamma = np.log(gamma)
    ei, ej = net.edges[:, 0], net.edges[:, 1]
    if log_non is not None:
        iu, ju = np.triu_indices(n, k=1)
        adj = np.zeros((n, n), dtype=bool)
        adj[ei, ej] = True
        # Poisson weights every pair; Bernoulli only the absent ones
        keep = ~adj[iu, ju] if model == "bernoulli" else np.ones(iu.size, dtype=bool)
        ni, nj = iu[keep], ju[keep]
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % q
        logw = log_gamma[digits].sum(axis=1)
        if ei.size:
            logw = logw + log_edge[digits[:, ei], digits[:, ej]].sum(axis=1)
        if log_non is not None and ni.size:
            logw = logw + log_non[digits[:, ni], digits[:, nj]].sum(axis=1)
        yield digits, logw


def _model_args(net, spec):
    spec = spec if spec is not None else net.spec
    if spec is None:
        raise InvalidParameterError("no block-model spec given")
    return np.asarray(spec.gamma, float), np.asarray(spec.affinity, float)


def exact_log_evidence(net, spec=None, model="tree"):
    """``log`` of the summed weight of all assignments."""
    gamma, affinity = _model_args(net, spec)
    parts = [logsumexp(logw) for _, logw in _enumerate(net, gamma, affinity, model)]
    out = logsumexp(parts)
    if not np.isfinite(out):
        raise ZeroEvidenceError("every assignment has zero weight")
    return float(out)


def exact_marginals(net, spec=None, model="tree"):
    """Per-node posterior marginals by enumeration.

    Weights: ``tree`` = prod gamma * prod_edges c; ``poisson`` additionally
    multiplies ``exp(-c/n)`` over all pairs ``i < j``; ``bernoulli`` uses
    ``c/n`` on edges and ``1 - c/n`` on non-edges.
    """
    gamma, affinity = _model_args(net, spec)
    q = gamma.size
    shift = -np.inf
    acc = np.zeros((net.n, q))
    for digits, logw in _enumerate(net, gamma, affinity, model):
        top = logw.max()
        if not np.isfinite(top):
            continue
        if top > shift:
            acc *= np.exp(shift - top) if np.isfinite(shift) else 0.0
            shift = top
        w = np.exp(logw - shift)
        for a in range(q):
            acc[:, a] += (digits == a).T.astype(float) @ w
    if not np.isfinite(shift):
        raise ZeroEvidenceError("every assignment has zero weight (e.g. uncolorable graph)")
    return acc / acc.sum(axis=1, keepdims=True)
