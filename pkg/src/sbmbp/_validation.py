"""Input validation helpers shared by the functional and estimator APIs."""

import numpy as np
from sklearn.utils import check_random_state  # noqa: F401  (re-exported)

from .exceptions import InvalidParameterError

PRIOR_ATOL = 1e-12
NORM_ATOL = 1e-9


def check_prior(gamma):
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 1:
        raise InvalidParameterError("group prior must be a 1-d vector")
    if gamma.size < 2:
        raise InvalidParameterError(f"need at least 2 groups, got {gamma.size}")
    if not np.all(np.isfinite(gamma)):
        raise InvalidParameterError("group prior has non-finite entries")
    bad = np.flatnonzero((gamma <= 0) | (gamma >= 1))
    if bad.size:
        a = int(bad[0])
        raise InvalidParameterError(
            f"group {a + 1} has prior {gamma[a]!r}, outside (0, 1)"
        )
    if abs(gamma.sum() - 1.0) > PRIOR_ATOL:
        raise InvalidParameterError(f"group prior sums to {gamma.sum()!r}, not 1")
    return gamma


def check_affinity(c, q=None, n=None):
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidParameterError(f"affinity must be square, got shape {c.shape}")
    if q is not None and c.shape[0] != q:
        raise InvalidParameterError(
            f"affinity is {c.shape[0]}x{c.shape[0]} but there are {q} groups"
        )
    if not np.all(np.isfinite(c)):
        raise InvalidParameterError("affinity has non-finite entries")
    if np.any(c < 0):
        raise InvalidParameterError("affinity has negative entries")
    if not np.array_equal(c, c.T):
        raise InvalidParameterError("affinity is not symmetric")
    if n is not None and np.any(c > n):
        a, b = np.unravel_index(np.argmax(c), c.shape)
        raise InvalidParameterError(
            f"c[{a + 1},{b + 1}]={c[a, b]!r} exceeds n={n}, so p_ab > 1"
        )
    return c


def check_labels(labels, n, q):
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise InvalidParameterError(f"expected {n} labels, got shape {labels.shape}")
    if labels.size and not np.issubdtype(labels.dtype, np.integer):
        raise InvalidParameterError("labels must be integers")
    labels = labels.astype(np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= q):
        raise InvalidParameterError(f"labels must lie in 0..{q - 1}")
    return labels


def check_marginals(marginals, n=None, q=None, atol=NORM_ATOL):
    marginals = np.asarray(marginals, dtype=float)
    if marginals.ndim != 2:
        raise InvalidParameterError("marginals must be an (n, q) array")
    if n is not None and marginals.shape[0] != n:
        raise InvalidParameterError(
            f"marginals cover {marginals.shape[0]} nodes, expected {n}"
        )
    if q is not None and marginals.shape[1] != q:
        raise InvalidParameterError(
            f"marginals cover {marginals.shape[1]} groups, expected {q}"
        )
    if np.any(marginals < 0) or not np.allclose(marginals.sum(axis=1), 1.0, atol=atol):
        raise InvalidParameterError("marginal rows must be probability vectors")
    return marginals


def check_network(X):
    """Coerce ``X`` to a :class:`~sbmbp.model.Network`.

    Accepts a Network, or a scipy sparse / dense symmetric adjacency matrix
    (no labels, no spec attached).
    """
    from .model import Network

    if isinstance(X, Network):
        return X
    import scipy.sparse as sp

    if sp.issparse(X) or isinstance(X, np.ndarray):
        A = sp.coo_matrix(X)
        if A.shape[0] != A.shape[1]:
            raise InvalidParameterError("adjacency matrix must be square")
        mask = A.row < A.col
        edges = np.column_stack([A.row[mask], A.col[mask]])
        return Network(A.shape[0], edges)
    raise InvalidParameterError(
        f"expected a Network or adjacency matrix, got {type(X).__name__}"
    )
