"""Overlap between planted labels and inferred marginals."""

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import gamma_bar


@dataclass
class OverlapReport:
    Q: float
    Q_mu: float
    Q_perm: float
    baseline_Q: float
    baseline_Qmu: float

    def to_dict(self):
        return asdict(self)


def assign(marginals):
    """Most likely group per node; ties go to the lowest group index."""
    return np.argmax(np.asarray(marginals), axis=1)


def overlap(marginals, planted):
    """Fraction of nodes whose most likely group is the planted one."""
    return float(np.mean(assign(marginals) == np.asarray(planted)))


def marginal_overlap(marginals, planted):
    """Mean posterior mass on the planted group."""
    marginals = np.asarray(marginals)
    planted = np.asarray(planted)
    return float(marginals[np.arange(planted.size), planted].mean())


def permutation_max_overlap(marginals, planted, q=None):
    """Overlap maximized over relabelings of the planted groups."""
    marginals = np.asarray(marginals)
    q = marginals.shape[1] if q is None else q
    confusion = np.zeros((q, q))
    np.add.at(confusion, (assign(marginals), np.asarray(planted)), 1.0)
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return float(confusion[rows, cols].sum() / len(planted))


def weak_limits(q, delta=0.0, gamma=None):
    """Overlaps at ``epsilon -> 0``: ``(max_a gamma_a, gamma_bar)``.

    Without ``gamma`` the equally spaced sizes give the closed forms
    ``(1 + (q-1) delta / 2) / q`` and ``(1 + (q^2-1) delta^2 / 12) / q``.
    """
    if gamma is None:
        return (1 + 0.5 * (q - 1) * delta) / q, (1 + (q * q - 1) * delta**2 / 12) / q
    gamma = np.asarray(gamma, dtype=float)
    return float(gamma.max()), gamma_bar(gamma)


def overlap_report(marginals, planted, gamma):
    gamma = np.asarray(gamma, dtype=float)
    q = gamma.size
    base_q, base_mu = weak_limits(q, gamma=gamma)
    return OverlapReport(
        Q=overlap(marginals, planted),
        Q_mu=marginal_overlap(marginals, planted),
        Q_perm=permutation_max_overlap(marginals, planted, q),
        baseline_Q=float(base_q),
        baseline_Qmu=float(base_mu),
    )
