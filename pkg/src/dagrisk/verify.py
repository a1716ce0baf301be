"""Randomized equivalence suites pitting the main path against the oracles.

Each suite returns (trials run, list of failure manifests); a failure
manifest carries enough to reproduce the trial (seed, sizes, parameters).
The CLI `verify` subcommand drives these and exits nonzero on any mismatch.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .dataset import CategoricalDataset, VariableSpec
from .exceptions import ValidationError
from .loss import DisintegrableLoss, LossSpec, PairwiseLoss, expand_local
from .modelspace import CandidateParents, DagModel, VariableOrdering, enumerate_lattice
from .oracle import exhaustive_select, fold_sequential_tree, polya_urn_marginal
from .scoring import DirichletPrior, LocalPosterior, PriorScheme, global_log_marginal
from .search import ArcDecision, LearnConfig, arc_decision, learn

_REL_TOL = 1e-9


def random_dataset(rng: np.random.Generator, n_vars: int, n_rows: int,
                   max_card: int = 3) -> CategoricalDataset:
    """Uniform random complete sample; every category is forced to appear."""
    cards = rng.integers(2, max_card + 1, size=n_vars)
    rows = np.empty((n_rows, n_vars), dtype=np.int64)
    for i, c in enumerate(cards):
        col = rng.integers(0, c, size=n_rows)
        col[: c] = np.arange(c)  # guarantee full support
        rows[:, i] = col
    variables = tuple(
        VariableSpec(f"X{i + 1}", tuple(f"v{k}" for k in range(cards[i])))
        for i in range(n_vars)
    )
    return CategoricalDataset(variables, rows)


def _random_prior(rng: np.random.Generator) -> DirichletPrior:
    if rng.random() < 0.5:
        return DirichletPrior(total_precision=float(rng.uniform(0.5, 4.0)))
    return DirichletPrior(
        scheme=PriorScheme.FIXED_CELL, fixed_cell_value=float(rng.uniform(0.5, 2.0))
    )


def _random_dag(rng: np.random.Generator, dataset: CategoricalDataset,
                max_parents: int = 3) -> DagModel:
    n_vars = len(dataset.variables)
    parents = []
    for i in range(n_vars):
        pool = list(range(i))
        size = int(rng.integers(0, min(len(pool), max_parents) + 1))
        chosen = sorted(rng.choice(pool, size=size, replace=False)) if size else []
        parents.append(tuple(int(p) for p in chosen))
    return DagModel(dataset.names, tuple(parents))


def run_polya_suite(trials: int, seed: int, max_rows: int = 30) -> tuple[int, list[dict]]:
    """Closed-form Gamma score vs the sequential-predictive (urn) score,
    plus case-permutation invariance of the urn."""
    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(trials):
        n_vars = int(rng.integers(2, 5))
        n_rows = int(rng.integers(4, max_rows + 1))
        dataset = random_dataset(rng, n_vars, n_rows)
        dag = _random_dag(rng, dataset)
        prior = _random_prior(rng)

        closed = global_log_marginal(dataset, dag, prior)
        urn = polya_urn_marginal(dataset, dag, prior)
        perm = rng.permutation(n_rows)
        shuffled = CategoricalDataset(dataset.variables, dataset.rows[perm])
        urn_perm = polya_urn_marginal(shuffled, dag, prior)

        scale = max(abs(closed), 1.0)
        if abs(closed - urn) > _REL_TOL * scale or abs(urn - urn_perm) > _REL_TOL * scale:
            failures.append({
                "suite": "polya-urn",
                "trial": trial,
                "seed": seed,
                "closed_form": closed,
                "urn": urn,
                "urn_permuted": urn_perm,
            })
    return trials, failures


def random_lattice_posterior(rng: np.random.Generator, child: int,
                             q: int) -> LocalPosterior:
    masks = enumerate_lattice(q)
    probs = rng.dirichlet(np.ones(len(masks)))
    probs = probs / probs.sum()
    return LocalPosterior(
        child=child,
        candidates=tuple(range(1, q + 1)),
        masks=masks,
        log_scores=np.log(probs),
        probs=probs,
    )


def linear_select_mask(lp: LocalPosterior, loss: DisintegrableLoss) -> int:
    """Per-arc rule applied to an explicit lattice posterior."""
    mask = 0
    for j in range(lp.q):
        sel = [i for i, m in enumerate(lp.masks) if m >> j & 1]
        p_arc = float(lp.probs[sel].sum())
        if arc_decision(p_arc, loss.pairwise[j]) is ArcDecision.INCLUDE:
            mask |= 1 << j
    return mask


def run_linear_rule_suite(trials: int, seed: int,
                          qs: Sequence[int] = (1, 2, 3, 4, 5, 6)) -> tuple[int, list[dict]]:
    """Per-arc selection vs exhaustive risk minimization over the expanded table."""
    rng = np.random.default_rng(seed)
    failures = []
    total = 0
    for q in qs:
        for trial in range(trials):
            total += 1
            lp = random_lattice_posterior(rng, child=0, q=q)
            pairwise = tuple(
                PairwiseLoss(float(rng.uniform(0.05, 3.0)), float(rng.uniform(0.05, 3.0)))
                for _ in range(q)
            )
            loss = DisintegrableLoss(tuple(range(q)), pairwise)
            linear = linear_select_mask(lp, loss)
            exhaustive, _ = exhaustive_select(lp, expand_local(loss))
            if linear != exhaustive.mask:
                failures.append({
                    "suite": "linear-rule",
                    "q": q,
                    "trial": trial,
                    "seed": seed,
                    "linear_mask": linear,
                    "exhaustive_mask": exhaustive.mask,
                })
    return total, failures


def run_fold_suite(trials: int, seed: int, max_rows: int = 50) -> tuple[int, list[dict]]:
    """learn() vs literal decision-tree folding on 3-variable instances."""
    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(trials):
        dataset = random_dataset(rng, 3, int(rng.integers(5, max_rows + 1)))
        names = dataset.names
        overrides = {}
        for child in range(3):
            for parent in range(child):
                overrides[f"{names[child]}:{names[parent]}"] = {
                    "l0": float(rng.uniform(0.05, 3.0)),
                    "l1": float(rng.uniform(0.05, 3.0)),
                }
        loss = LossSpec.from_json_dict({"type": "disintegrable", "arcs": overrides})
        config = LearnConfig(
            ordering=VariableOrdering((0, 1, 2)),
            prior=_random_prior(rng),
            loss=loss,
        )
        dag, diag = learn(dataset, config)
        folded = fold_sequential_tree(dataset, config)
        if dag.parents != folded.chosen.parents or \
                abs(diag.total_bayes_risk - folded.global_bayes_risk) > 1e-10:
            failures.append({
                "suite": "fold",
                "trial": trial,
                "seed": seed,
                "learn_parents": dag.parents,
                "fold_parents": folded.chosen.parents,
                "learn_risk": diag.total_bayes_risk,
                "fold_risk": folded.global_bayes_risk,
            })
    return trials, failures
