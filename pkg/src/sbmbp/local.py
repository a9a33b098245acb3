"""Closed-form Bayes classifiers that look only at a node's neighborhood.

``degree_classifier`` uses the node's own degree (radius 1);
``radius2_classifier`` adds its neighbors' degrees (radius 2). Both are the
exact posteriors under Poisson degrees and match one and two synchronous BP
steps from prior messages.
"""

import numpy as np
from scipy.special import softmax

from ._validation import check_prior
from .exceptions import InvalidParameterError


def _log_degree_weights(gamma, c_a, degrees):
    """``log(gamma_a e^{-c_a} c_a^d)`` per row of ``degrees``, with 0^0 = 1."""
    gamma = check_prior(gamma)
    c_a = np.asarray(c_a, dtype=float)
    if c_a.shape != gamma.shape:
        raise InvalidParameterError("group degrees must have one entry per group")
    if np.any(c_a < 0):
        raise InvalidParameterError("group degrees must be non-negative")
    d = np.asarray(degrees, dtype=float)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        power = np.where(d == 0, 0.0, d * np.log(c_a)[None, :])
    return np.log(gamma)[None, :] - c_a[None, :] + power


def _normalize_rows(log_w, what):
    bad = ~np.isfinite(log_w.max(axis=1))
    if np.any(bad):
        raise InvalidParameterError(
            f"{what}: node {int(np.flatnonzero(bad)[0])} has zero weight for every group"
        )
    return softmax(log_w, axis=1)


def degree_classifier(net, gamma, c_a):
    """Posterior ``Pr[s_i = a | d_i] ∝ gamma_a e^{-c_a} c_a^{d_i}``."""
    return _normalize_rows(_log_degree_weights(gamma, c_a, net.degrees), "degree classifier")


def first_order_messages(net, gamma, c_a):
    """Per-node message ``∝ gamma_a e^{-c_a} c_a^{d_i - 1}``, the same for every
    neighbor. Isolated nodes send nothing; their row uses exponent 0.
    """
    excess = np.maximum(net.degrees - 1, 0)
    return _normalize_rows(_log_degree_weights(gamma, c_a, excess), "first-order messages")


def radius2_classifier(net, gamma, affinity, c_a):
    """Posterior given the node's degree and its neighbors' degrees.

    ``mu_a^i ∝ gamma_a e^{-c_a} prod_k sum_b c_ab gamma_b e^{-c_b} c_b^{d_k - 1}``.
    Per-neighbor sums are taken over normalized first-order messages; the
    dropped constants do not depend on ``a``.
    """
    affinity = np.asarray(affinity, dtype=float)
    sent = first_order_messages(net, gamma, c_a)
    with np.errstate(divide="ignore"):
        log_factor = np.log(sent @ affinity.T)
    log_w = _log_degree_weights(gamma, c_a, np.zeros(net.n))
    total = np.zeros_like(log_w)
    np.add.at(total, net.owners, log_factor[net.indices])
    return _normalize_rows(log_w + total, "radius-2 classifier")
