"""Belief propagation for sparse stochastic block models with unequal groups."""

from .bp import (
    ConvergenceReport,
    MessageSet,
    bp_sweep,
    edge_marginal,
    init_messages,
    log_likelihood,
    run_finite,
    run_to_convergence,
)
from .estimators import (
    BeliefPropagation,
    BlockModelSampler,
    DegreeClassifier,
    FiniteStepBP,
    Radius2Classifier,
)
from .exceptions import (
    DegenerateMessageError,
    InstanceTooLargeError,
    InvalidParameterError,
    NetworkFormatError,
    ZeroEvidenceError,
)
from .io import parse_network, write_network
from .local import degree_classifier, radius2_classifier
from .metrics import (
    OverlapReport,
    marginal_overlap,
    overlap,
    overlap_report,
    permutation_max_overlap,
    weak_limits,
)
from .model import (
    BlockModelSpec,
    Network,
    SymmetricFamily,
    affinity_from_strength,
    degree_profile,
    disassortative_affinity,
    gamma_bar,
    group_sizes,
    sample_network,
)
from .oracle import exact_log_evidence, exact_marginals

__version__ = "0.1.0"
