import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sbmbp import bp, local
from sbmbp.estimators import (
    BeliefPropagation,
    BlockModelSampler,
    DegreeClassifier,
    FiniteStepBP,
    Radius2Classifier,
)
from sbmbp.exceptions import InvalidParameterError
from sbmbp.model import Network, SymmetricFamily, degree_profile, sample_network


@pytest.fixture(scope="module")
def net():
    fam = SymmetricFamily(q=2, c=3.0, epsilon=4.0, delta=0.3)
    return sample_network(fam.spec(2000), 7)


def test_get_params_and_clone():
    est = BeliefPropagation(init="prior", tol=1e-8, random_state=3)
    params = est.get_params()
    assert params["init"] == "prior" and params["tol"] == 1e-8
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(max_sweeps=5)
    assert est.max_sweeps == 5


def test_bp_fit_matches_functional_api(net):
    est = BeliefPropagation(random_state=4).fit(net)
    state, report = bp.run_to_convergence(net, "random", seed=4)
    np.testing.assert_array_equal(est.marginals_, state.marginals)
    assert est.n_sweeps_ == report.sweeps
    assert est.converged_
    assert est.log_likelihood_ == report.log_likelihood
    np.testing.assert_array_equal(est.labels_, est.marginals_.argmax(axis=1))
    assert est.fit_predict(net).shape == (net.n,)


def test_bp_accepts_adjacency_with_explicit_params(net):
    A = net.adjacency()
    est = BeliefPropagation(gamma=net.spec.gamma, affinity=net.spec.affinity, init="prior",
                            random_state=0)
    est.fit(A)
    ref = BeliefPropagation(init="prior", random_state=0).fit(net)
    np.testing.assert_allclose(est.marginals_, ref.marginals_)


def test_bp_needs_params_without_spec(net):
    with pytest.raises(InvalidParameterError):
        BeliefPropagation().fit(net.adjacency())


def test_bp_planted_init_from_y(net):
    bare = Network(net.n, net.edges, None, net.spec)
    est = BeliefPropagation(init="planted", random_state=0).fit(bare, net.labels)
    assert est.score(bare, net.labels) > 0.7


def test_bp_transductive_predict(net):
    est = BeliefPropagation(random_state=1).fit(net)
    assert est.predict_proba() is est.marginals_
    assert est.predict_proba(net) is est.marginals_
    other = sample_network(net.spec, 99)
    with pytest.raises(NotFittedError):
        est.predict_proba(other)
    with pytest.raises(NotFittedError):
        BeliefPropagation().predict_proba(net)


@pytest.mark.parametrize("kw", [{"init": "zeros"}, {"damping": 1.0}, {"damping": -0.1}])
def test_bp_rejects_bad_params(net, kw):
    with pytest.raises(InvalidParameterError):
        BeliefPropagation(**kw).fit(net)


def test_local_classifiers(net):
    c_a, mean = degree_profile(net.spec)
    deg = DegreeClassifier().fit(net)
    np.testing.assert_allclose(deg.group_degrees_, c_a)
    assert deg.mean_degree_ == pytest.approx(mean)
    np.testing.assert_array_equal(
        deg.transform(net), local.degree_classifier(net, net.spec.gamma, c_a)
    )
    r2 = Radius2Classifier(gamma=net.spec.gamma, affinity=net.spec.affinity).fit()
    np.testing.assert_array_equal(
        r2.predict_proba(net), local.radius2_classifier(net, net.spec.gamma, net.spec.affinity, c_a)
    )
    assert r2.predict(net).shape == (net.n,)
    assert 0 <= r2.score(net, net.labels) <= 1
    with pytest.raises(NotFittedError):
        DegreeClassifier().predict_proba(net)


def test_finite_step_bp(net):
    est = FiniteStepBP(n_steps=2).fit()
    r2 = Radius2Classifier().fit(net)
    np.testing.assert_allclose(est.transform(net), r2.transform(net), atol=1e-12)
    with pytest.raises(InvalidParameterError):
        FiniteStepBP(n_steps=-1).fit()


def test_sampler(net):
    s = BlockModelSampler(net.spec, random_state=7)
    assert s.sample() == net
    assert s.sample(8) != net
