"""Loss-aware selection of Bayesian-network structure from categorical data."""

__version__ = "0.1.0"

from .dataset import (
    CategoricalDataset,
    ContingencyCounts,
    VariableSpec,
    count,
    load_csv,
    sample_network,
    save_csv,
    to_csv,
)
from .decision import Posterior, RiskReport, bayes_action, map_action, map_report, risk
from .estimator import StructureSelector, as_dataset
from .exceptions import (
    AlgebraError,
    CapacityError,
    IncompleteSampleError,
    ValidationError,
    VerificationFailure,
)
from .loss import (
    DisintegrableLoss,
    LossSpec,
    LossTable,
    PairwiseLoss,
    expand_local,
    fit_pairwise,
    lattice_zero_one,
    loss_sum,
    state_count_loss,
    uniform_complexity_loss,
    zero_one,
)
from .modelspace import (
    CandidateParents,
    DagModel,
    LocalModel,
    VariableOrdering,
    enumerate_lattice,
    global_sum,
    model_sum,
)
from .oracle import FoldResult, exhaustive_select, fold_sequential_tree, polya_urn_marginal
from .scoring import (
    DirichletPrior,
    LocalPosterior,
    PriorScheme,
    arc_probability,
    bayes_factor,
    family_log_marginal,
    global_log_marginal,
    local_posterior,
)
from .search import (
    ArcDecision,
    LearnConfig,
    LearnDiagnostics,
    arc_decision,
    k2_greedy,
    learn,
    select_local,
)
