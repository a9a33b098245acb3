"""Compiled inner loops for belief propagation.

Directed edges live in the CSR layout of :class:`~sbmbp.model.Network`:
``msg[p]`` is the message from ``owner(p)`` to ``indices[p]`` and
``msg[reverse[p]]`` is the message travelling back.
"""

import numpy as np
from numba import njit


# Floor for computed message entries. A true BP message is strictly positive
# unless an input is exactly zero; an entry that underflows would otherwise
# turn into a hard zero and later into a spurious contradiction.
TINY = 1e-300


@njit(cache=True)
def node_update(i, indptr, reverse, msg_in, weights, C, out_msgs, out_marg, v, pre, suf):
    """Compute every outgoing message of node ``i`` and its marginal.

    ``weights[a]`` is ``gamma_a`` times the non-edge field factor. Products
    over neighbors are accumulated as log prefix/suffix sums, so no division
    by a possibly-zero incoming factor is needed and nothing underflows.
    Returns the local index of the first degenerate outgoing message, ``d``
    if the marginal is degenerate, or -1 when all normalizers are positive.
    """
    q = weights.size
    start = indptr[i]
    d = indptr[i + 1] - start
    for k in range(d):
        e_in = reverse[start + k]
        for a in range(q):
            s = 0.0
            for b in range(q):
                s += C[a, b] * msg_in[e_in, b]
            v[k, a] = np.log(s) if s > 0.0 else -np.inf
    for a in range(q):
        pre[0, a] = np.log(weights[a]) if weights[a] > 0.0 else -np.inf
        suf[d, a] = 0.0
    for k in range(d):
        for a in range(q):
            pre[k + 1, a] = pre[k, a] + v[k, a]
    for k in range(d - 1, -1, -1):
        for a in range(q):
            suf[k, a] = suf[k + 1, a] + v[k, a]
    for k in range(d):
        if _exp_normalize(pre[k], suf[k + 1], out_msgs[k]) <= 0.0:
            return k
        for a in range(q):
            if out_msgs[k, a] < TINY:
                out_msgs[k, a] = TINY
    if _exp_normalize(pre[d], suf[d], out_marg) <= 0.0:
        return d
    return -1


@njit(cache=True)
def _exp_normalize(x, y, out):
    """``out = exp(x + y)`` scaled to sum 1; returns 0 if every term is zero."""
    top = -np.inf
    for a in range(out.size):
        top = max(top, x[a] + y[a])
    if top == -np.inf:
        return 0.0
    s = 0.0
    for a in range(out.size):
        out[a] = np.exp(x[a] + y[a] - top)
        s += out[a]
    for a in range(out.size):
        out[a] /= s
    return s


@njit(cache=True)
def _field_weights(gamma, C, mbar, use_field, out):
    q = gamma.size
    for a in range(q):
        if use_field:
            h = 0.0
            for b in range(q):
                h += C[a, b] * mbar[b]
            out[a] = gamma[a] * np.exp(-h)
        else:
            out[a] = gamma[a]


@njit(cache=True)
def async_sweep(order, indptr, reverse, msg, marg, mbar, gamma, C, n, use_field, damping):
    """One asynchronous sweep in node order ``order``, updating in place.

    ``mbar`` (mean marginal) is adjusted after every node so the field stays
    current. Returns ``(sum of |change| over message entries, bad position)``
    where the position is -1 unless a normalizer vanished.
    """
    q = gamma.size
    maxdeg = 0
    for i in range(indptr.size - 1):
        maxdeg = max(maxdeg, indptr[i + 1] - indptr[i])
    v = np.empty((maxdeg, q))
    pre = np.empty((maxdeg + 1, q))
    suf = np.empty((maxdeg + 1, q))
    out = np.empty((maxdeg, q))
    new_marg = np.empty(q)
    weights = np.empty(q)
    total = 0.0
    for idx in range(order.size):
        i = order[idx]
        _field_weights(gamma, C, mbar, use_field, weights)
        bad = node_update(i, indptr, reverse, msg, weights, C, out, new_marg, v, pre, suf)
        start = indptr[i]
        d = indptr[i + 1] - start
        if bad >= 0:
            return total, start + bad if bad < d else -2 - i
        for k in range(d):
            for a in range(q):
                new = (1.0 - damping) * out[k, a] + damping * msg[start + k, a]
                total += abs(new - msg[start + k, a])
                msg[start + k, a] = new
        for a in range(q):
            mbar[a] += (new_marg[a] - marg[i, a]) / n
            marg[i, a] = new_marg[a]
    return total, -1


@njit(cache=True)
def sync_step(indptr, reverse, msg_old, msg_new, marg_new, weights, C):
    """All messages and marginals from the previous generation ``msg_old``."""
    q = weights.size
    n = indptr.size - 1
    maxdeg = 0
    for i in range(n):
        maxdeg = max(maxdeg, indptr[i + 1] - indptr[i])
    v = np.empty((maxdeg, q))
    pre = np.empty((maxdeg + 1, q))
    suf = np.empty((maxdeg + 1, q))
    out = np.empty((maxdeg, q))
    new_marg = np.empty(q)
    for i in range(n):
        bad = node_update(i, indptr, reverse, msg_old, weights, C, out, new_marg, v, pre, suf)
        start = indptr[i]
        d = indptr[i + 1] - start
        if bad >= 0:
            return start + bad if bad < d else -2 - i
        for k in range(d):
            for a in range(q):
                msg_new[start + k, a] = out[k, a]
        for a in range(q):
            marg_new[i, a] = new_marg[a]
    return -1
