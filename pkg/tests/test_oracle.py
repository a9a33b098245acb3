import numpy as np
import pytest

from sbmbp import bp, oracle
from sbmbp.exceptions import InstanceTooLargeError, InvalidParameterError, ZeroEvidenceError
from sbmbp.model import BlockModelSpec, Network


def _edge_net(model_n=2):
    spec = BlockModelSpec(model_n, [0.5, 0.5], [[4.0, 2.0], [2.0, 4.0]])
    return Network(model_n, [(0, 1)], spec=spec)


@pytest.mark.parametrize("model", oracle.WEIGHT_MODELS)
def test_single_node_is_prior(model):
    spec = BlockModelSpec(1, [0.3, 0.7], np.full((2, 2), 0.5))
    net = Network(1, np.empty((0, 2)), spec=spec)
    np.testing.assert_allclose(oracle.exact_marginals(net, model=model)[0], [0.3, 0.7], atol=1e-15)


def test_single_node_tree_evidence_is_zero():
    spec = BlockModelSpec(1, [0.3, 0.7], np.ones((2, 2)))
    net = Network(1, np.empty((0, 2)), spec=spec)
    assert oracle.exact_log_evidence(net) == pytest.approx(0.0, abs=1e-15)


def test_single_edge_hand_enumeration():
    net = _edge_net()
    np.testing.assert_allclose(oracle.exact_marginals(net), [[0.5, 0.5], [0.5, 0.5]])
    assert oracle.exact_log_evidence(net) == pytest.approx(np.log(0.25 * 12), abs=1e-14)


def test_poisson_and_bernoulli_single_edge():
    spec = BlockModelSpec(3, [0.5, 0.5], [[2.0, 1.0], [1.0, 2.0]])
    net = Network(3, [(0, 1)], spec=spec)
    g = np.array([0.5, 0.5])
    c = net.spec.affinity
    n = 3
    tot_p = tot_b = 0.0
    for s in np.ndindex(2, 2, 2):
        prior = np.prod(g[list(s)])
        pairs = [(0, 1), (0, 2), (1, 2)]
        wp = prior * c[s[0], s[1]] * np.prod([np.exp(-c[s[i], s[j]] / n) for i, j in pairs])
        wb = prior * c[s[0], s[1]] / n * np.prod(
            [1 - c[s[i], s[j]] / n for i, j in pairs if (i, j) != (0, 1)]
        )
        tot_p += wp
        tot_b += wb
    assert oracle.exact_log_evidence(net, model="poisson") == pytest.approx(np.log(tot_p), abs=1e-13)
    assert oracle.exact_log_evidence(net, model="bernoulli") == pytest.approx(np.log(tot_b), abs=1e-13)


def test_uncolorable_triangle():
    spec = BlockModelSpec(3, [0.5, 0.5], [[0.0, 2.0], [2.0, 0.0]])
    net = Network(3, [(0, 1), (1, 2), (0, 2)], spec=spec)
    with pytest.raises(ZeroEvidenceError):
        oracle.exact_marginals(net)
    with pytest.raises(ZeroEvidenceError):
        oracle.exact_log_evidence(net)


def test_size_cap():
    spec = BlockModelSpec(11, np.full(5, 0.2), np.ones((5, 5)))
    net = Network(11, np.empty((0, 2)), spec=spec)
    with pytest.raises(InstanceTooLargeError):
        oracle.exact_marginals(net)


def test_unknown_model_and_missing_spec():
    with pytest.raises(InvalidParameterError):
        oracle.exact_marginals(_edge_net(), model="ising")
    with pytest.raises(InvalidParameterError):
        oracle.exact_marginals(Network(2, [(0, 1)]))


def test_tree_bp_equivalence(tree_factory):
    net = tree_factory(8, 3, 4)
    state, report = bp.run_to_convergence(net, "random", tol=1e-14, seed=0, nonedge_field=False)
    np.testing.assert_allclose(state.marginals, oracle.exact_marginals(net), atol=1e-12)
    assert report.log_likelihood == pytest.approx(oracle.exact_log_evidence(net), abs=1e-10)


def test_marginals_equivariant_under_relabeling(tree_factory):
    net = tree_factory(7, 3, 8)
    perm = np.array([1, 2, 0])
    spec_p = BlockModelSpec(net.n, net.spec.gamma[perm], net.spec.affinity[np.ix_(perm, perm)])
    a = oracle.exact_marginals(net, model="poisson")
    b = oracle.exact_marginals(net, spec_p, model="poisson")
    np.testing.assert_allclose(b, a[:, perm], atol=1e-14)
    np.testing.assert_allclose(a.sum(axis=1), 1.0, atol=1e-14)


def test_tree_vs_poisson_gap_shrinks_with_n():
    gaps = []
    for n in (4, 8, 12):
        # path plus isolated nodes: fixed topology, growing n
        spec = BlockModelSpec(n, [0.4, 0.6], [[3.0, 0.5], [0.5, 2.0]])
        net = Network(n, [(0, 1), (1, 2), (2, 3)], spec=spec)
        gaps.append(np.abs(oracle.exact_marginals(net) - oracle.exact_marginals(net, model="poisson")).max())
    assert gaps[0] > gaps[1] > gaps[2]


def test_bernoulli_rejects_probability_above_one():
    with pytest.raises(InvalidParameterError, match="exceeds 1"):
        oracle.exact_marginals(_edge_net(3), model="bernoulli")
