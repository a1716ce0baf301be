"""Dirichlet-multinomial marginal likelihoods and lattice posteriors.

All likelihood arithmetic stays in the natural-log domain (log-Gamma terms,
log-sum-exp normalization); raw Gamma products overflow once n reaches the
hundreds. Summation order is fixed to the canonical lattice order so results
are bit-reproducible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from .dataset import CategoricalDataset, ContingencyCounts, count
from .exceptions import ValidationError
from .modelspace import (
    DEFAULT_PARENT_CAP,
    CandidateParents,
    DagModel,
    enumerate_lattice,
    mask_to_positions,
)


class PriorScheme(enum.Enum):
    UNIFORM_PRECISION = "uniform"
    FIXED_CELL = "fixed"


@dataclass(frozen=True)
class DirichletPrior:
    """Hyperparameter scheme for every family's parameter vectors.

    UNIFORM_PRECISION spreads `total_precision` evenly over the family's
    cells, so each family carries the same total prior mass and all prior
    predictive probabilities are uniform. FIXED_CELL puts
    `fixed_cell_value` in every cell (the K2 convention uses 1).
    """

    total_precision: float = 1.0
    scheme: PriorScheme = PriorScheme.UNIFORM_PRECISION
    fixed_cell_value: float = 1.0

    def __post_init__(self):
        if self.total_precision <= 0:
            raise ValidationError("total prior precision must be positive")
        if self.fixed_cell_value <= 0:
            raise ValidationError("fixed cell value must be positive")

    def cell_value(self, n_configs: int, cardinality: int) -> float:
        """alpha_ijk for a family with the given table shape."""
        if self.scheme is PriorScheme.UNIFORM_PRECISION:
            return self.total_precision / (cardinality * n_configs)
        return self.fixed_cell_value


@dataclass(frozen=True)
class LocalPosterior:
    """Normalized posterior over one child's parent-subset lattice.

    Vectors are aligned with the canonical lattice enumeration of `masks`.
    """

    child: int
    candidates: tuple[int, ...]
    masks: tuple[int, ...]
    log_scores: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValidationError("lattice posterior does not sum to 1")
        if (probs < 0).any():
            raise ValidationError("lattice posterior has a negative probability")
        # Every subset has positive posterior mass; linear-domain entries may
        # still underflow to 0.0, so positivity is checked on the log scale.
        if not np.isfinite(np.asarray(self.log_scores, dtype=float)).all():
            raise ValidationError("lattice posterior has a non-finite log score")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def q(self) -> int:
        return len(self.candidates)


def family_log_marginal(counts: ContingencyCounts, prior: DirichletPrior) -> float:
    """Log marginal likelihood contribution of one (child, parents) family.

    Closed form: sum over parent configs j of
    lnG(a_j) - lnG(a_j + n_j) + sum_k [lnG(a_jk + n_jk) - lnG(a_jk)].
    """
    a_cell = prior.cell_value(counts.n_configs, counts.child_cardinality)
    a_row = a_cell * counts.child_cardinality
    row_terms = gammaln(a_row) - gammaln(a_row + counts.config_totals)
    cell_terms = gammaln(a_cell + counts.table) - gammaln(a_cell)
    return float(row_terms.sum() + cell_terms.sum())


def global_log_marginal(dataset: CategoricalDataset, dag: DagModel,
                        prior: DirichletPrior) -> float:
    """Sum of family scores over every variable of the DAG."""
    total = 0.0
    for child in range(len(dataset.variables)):
        total += family_log_marginal(count(dataset, child, dag.parents[child]), prior)
    return total


def bayes_factor(dataset: CategoricalDataset, m0: DagModel, m1: DagModel,
                 prior: DirichletPrior) -> float:
    """p(D|m0) / p(D|m1)."""
    return math.exp(
        global_log_marginal(dataset, m0, prior) - global_log_marginal(dataset, m1, prior)
    )


def local_posterior(
    dataset: CategoricalDataset,
    family: CandidateParents,
    prior: DirichletPrior,
    model_prior: Sequence[float] | None = None,
    cap: int = DEFAULT_PARENT_CAP,
) -> LocalPosterior:
    """Posterior over all 2^q parent subsets of one child.

    `model_prior` gives a positive weight per subset in lattice order;
    omitted means uniform. Probabilities are normalized by log-sum-exp.
    """
    masks = enumerate_lattice(family.q, cap)
    if model_prior is None:
        log_prior = np.zeros(len(masks))
    else:
        weights = np.asarray(model_prior, dtype=float)
        if weights.shape != (len(masks),):
            raise ValidationError(
                f"model prior must supply {len(masks)} weights, got {weights.shape}"
            )
        if (weights <= 0).any():
            raise ValidationError("model prior must be positive on the full lattice")
        log_prior = np.log(weights)

    log_scores = np.empty(len(masks))
    for i, mask in enumerate(masks):
        parents = [family.candidates[j] for j in mask_to_positions(mask)]
        log_scores[i] = family_log_marginal(count(dataset, family.child, parents), prior)
    log_post = log_prior + log_scores
    probs = np.exp(log_post - logsumexp(log_post))
    probs = probs / probs.sum()
    return LocalPosterior(family.child, family.candidates, masks, log_scores, probs)


def arc_probability(lp: LocalPosterior, position: int) -> float:
    """Posterior probability that the candidate arc at `position` is present."""
    if not 0 <= position < lp.q:
        raise ValidationError(f"candidate position {position} out of range")
    sel = [i for i, m in enumerate(lp.masks) if m >> position & 1]
    # rounding in the sum can overshoot 1 by an ulp; clamp to the unit interval
    return min(1.0, max(0.0, float(lp.probs[sel].sum())))
