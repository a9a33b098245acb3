"""scikit-learn style wrappers around the functional API.

The "data" passed to ``fit`` is a network (a :class:`~sbmbp.model.Network`
or a symmetric adjacency matrix); ``y`` optionally holds planted labels.
Model parameters (``gamma``, ``affinity``) are hyperparameters, as inference
here always assumes them known. When they are left as ``None`` they are
taken from the network's spec.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_is_fitted

from . import bp, local, metrics
from ._validation import check_affinity, check_network, check_prior
from .exceptions import InvalidParameterError
from .model import Network, degree_profile, sample_network


def _resolve_params(est, net):
    gamma, affinity = est.gamma, est.affinity
    if gamma is None or affinity is None:
        if net is None or net.spec is None:
            raise InvalidParameterError(
                f"{type(est).__name__} needs gamma and affinity when the network has no spec"
            )
        gamma = net.spec.gamma if gamma is None else gamma
        affinity = net.spec.affinity if affinity is None else affinity
    gamma = check_prior(gamma)
    return gamma, check_affinity(affinity, q=gamma.size)


def _with_labels(net, y):
    if y is None:
        return net
    return Network(net.n, net.edges, np.asarray(y), net.spec)


class BeliefPropagation(ClusterMixin, BaseEstimator):
    """Converged belief propagation on one network.

    Parameters
    ----------
    gamma, affinity : array-like, optional
        Group prior and ``c_ab`` matrix. Default to the network's spec.
    init : {"random", "prior", "planted"}
        Initial messages. ``"planted"`` needs labels (network or ``y``).
    tol, max_sweeps : convergence control (mean absolute message change).
    damping : float
        Mixing with the previous message; for diagnostics only.
    nonedge_field : bool
        Include the ``exp(-h_a)`` non-edge factor.
    random_state : int or None
        Seeds random initialization and sweep orders.

    Attributes
    ----------
    marginals_ : (n, q) array
    labels_ : (n,) array, argmax of the marginals
    state_ : MessageSet
    report_ : ConvergenceReport
    n_sweeps_, converged_, log_likelihood_
    """

    def __init__(self, gamma=None, affinity=None, init="random", tol=bp.DEFAULT_TOL,
                 max_sweeps=bp.DEFAULT_MAX_SWEEPS, damping=0.0, nonedge_field=True,
                 random_state=None):
        self.gamma = gamma
        self.affinity = affinity
        self.init = init
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.damping = damping
        self.nonedge_field = nonedge_field
        self.random_state = random_state

    def fit(self, X, y=None):
        if self.init not in bp.INIT_MODES:
            raise InvalidParameterError(f"init must be one of {bp.INIT_MODES}")
        if not 0.0 <= self.damping < 1.0:
            raise InvalidParameterError("damping must lie in [0, 1)")
        net = _with_labels(check_network(X), y)
        gamma, affinity = _resolve_params(self, net)
        state, report = bp.run_to_convergence(
            net, self.init, tol=self.tol, max_sweeps=self.max_sweeps,
            seed=self.random_state, gamma=gamma, affinity=affinity,
            nonedge_field=self.nonedge_field, damping=self.damping,
        )
        self.state_ = state
        self.report_ = report
        self.marginals_ = state.marginals
        self.labels_ = metrics.assign(state.marginals)
        self.n_sweeps_ = report.sweeps
        self.converged_ = report.converged
        self.log_likelihood_ = report.log_likelihood
        self.network_ = net
        return self

    def predict_proba(self, X=None):
        """Marginals of the fitted network (``X`` must be that network)."""
        check_is_fitted(self, "marginals_")
        if X is not None:
            net = check_network(X)
            same = net is self.network_ or (
                net.n == self.network_.n and np.array_equal(net.edges, self.network_.edges)
            )
            if not same:
                raise NotFittedError("BP is transductive; call fit on this network first")
        return self.marginals_

    def score(self, X, y):
        """Overlap ``Q`` of the fitted assignment against labels ``y``."""
        return metrics.overlap(self.predict_proba(X), y)


class _LocalClassifier(TransformerMixin, BaseEstimator):
    def __init__(self, gamma=None, affinity=None):
        self.gamma = gamma
        self.affinity = affinity

    def fit(self, X=None, y=None):
        net = None if X is None else check_network(X)
        gamma, affinity = _resolve_params(self, net)
        self.gamma_ = gamma
        self.affinity_ = affinity
        self.group_degrees_, self.mean_degree_ = degree_profile(gamma, affinity)
        self.n_features_in_ = gamma.size
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "gamma_")
        return self._posterior(check_network(X))

    def transform(self, X):
        return self.predict_proba(X)

    def predict(self, X):
        return metrics.assign(self.predict_proba(X))

    def score(self, X, y):
        return metrics.overlap(self.predict_proba(X), y)


class DegreeClassifier(_LocalClassifier):
    """Bayes posterior of each node's group given only its degree."""

    def _posterior(self, net):
        return local.degree_classifier(net, self.gamma_, self.group_degrees_)


class Radius2Classifier(_LocalClassifier):
    """Bayes posterior given a node's degree and its neighbors' degrees."""

    def _posterior(self, net):
        return local.radius2_classifier(net, self.gamma_, self.affinity_, self.group_degrees_)


class FiniteStepBP(TransformerMixin, BaseEstimator):
    """``n_steps`` synchronous BP steps; a radius-``n_steps`` local classifier."""

    def __init__(self, n_steps=1, gamma=None, affinity=None, init="prior",
                 nonedge_field=True, random_state=None):
        self.n_steps = n_steps
        self.gamma = gamma
        self.affinity = affinity
        self.init = init
        self.nonedge_field = nonedge_field
        self.random_state = random_state

    def fit(self, X=None, y=None):
        if self.n_steps < 0:
            raise InvalidParameterError("n_steps must be >= 0")
        self.fitted_ = True
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "fitted_")
        net = check_network(X)
        gamma, affinity = _resolve_params(self, net)
        state = bp.run_finite(net, self.n_steps, self.init, seed=self.random_state,
                              gamma=gamma, affinity=affinity, nonedge_field=self.nonedge_field)
        return state.marginals

    def transform(self, X):
        return self.predict_proba(X)

    def predict(self, X):
        return metrics.assign(self.predict_proba(X))


class BlockModelSampler(BaseEstimator):
    """Draws networks from a :class:`~sbmbp.model.BlockModelSpec`."""

    def __init__(self, spec, exact_sizes=False, random_state=None):
        self.spec = spec
        self.exact_sizes = exact_sizes
        self.random_state = random_state

    def sample(self, random_state=None):
        seed = self.random_state if random_state is None else random_state
        return sample_network(self.spec, seed, exact_sizes=self.exact_sizes)
