"""Brute-force reference implementations used only for verification.

Nothing here shares scoring or loss-expansion arithmetic with the main
path: the marginal likelihood is evaluated case by case through sequential
predictive updates, loss entries are rebuilt from pairwise losses by direct
symmetric-difference loops, and the sequential decision tree is folded back
literally, branch by branch. Clarity over speed throughout; tiny instances
only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .dataset import CategoricalDataset
from .decision import RiskReport
from .exceptions import CapacityError, ValidationError
from .modelspace import DagModel, LocalModel, enumerate_lattice, mask_to_positions
from .scoring import DirichletPrior, LocalPosterior, PriorScheme
from .loss import DisintegrableLoss, LossTable
from .search import LearnConfig


def _cell_precision(prior: DirichletPrior, n_configs: int, cardinality: int) -> float:
    # Intentionally re-derived here instead of calling the scoring module.
    if prior.scheme is PriorScheme.UNIFORM_PRECISION:
        return prior.total_precision / (cardinality * n_configs)
    return prior.fixed_cell_value


def _urn_family(dataset: CategoricalDataset, child: int, parents: Sequence[int],
                prior: DirichletPrior) -> float:
    """Family log marginal via the chain rule over cases."""
    cards = dataset.cardinalities
    n_configs = 1
    for p in parents:
        n_configs *= cards[p]
    a_cell = _cell_precision(prior, n_configs, cards[child])
    a_row = a_cell * cards[child]
    cell_counts: dict[tuple, int] = {}
    row_counts: dict[tuple, int] = {}
    terms = []
    for row in dataset.rows:
        config = tuple(int(row[p]) for p in parents)
        k = int(row[child])
        n_cell = cell_counts.get((config, k), 0)
        n_row = row_counts.get(config, 0)
        terms.append(math.log((a_cell + n_cell) / (a_row + n_row)))
        cell_counts[(config, k)] = n_cell + 1
        row_counts[config] = n_row + 1
    return math.fsum(terms)


def polya_urn_marginal(dataset: CategoricalDataset, dag: DagModel,
                       prior: DirichletPrior) -> float:
    """Global log marginal likelihood as a product of sequential predictives."""
    return math.fsum(
        _urn_family(dataset, child, dag.parents[child], prior)
        for child in range(len(dataset.variables))
    )


def exhaustive_select(lp: LocalPosterior, loss: LossTable) -> tuple[LocalModel, RiskReport]:
    """Minimize expected loss by scanning every action of the full table."""
    if loss.size != len(lp.masks):
        raise ValidationError(
            f"loss table has {loss.size} states but the lattice has {len(lp.masks)}"
        )
    risks = []
    for action in range(loss.size):
        risks.append(math.fsum(
            float(lp.probs[s]) * float(loss.entries[s, action])
            for s in range(loss.size)
        ))
    best_val = min(risks)
    ties = tuple(i for i, r in enumerate(risks) if r == best_val)
    # Lattice order is level-then-mask, so the first tie has fewest arcs.
    chosen = ties[0]
    report = RiskReport(tuple(risks), chosen, best_val, ties)
    return LocalModel(lp.child, lp.candidates, lp.masks[chosen]), report


@dataclass(frozen=True)
class FoldResult:
    chosen: DagModel
    global_bayes_risk: float
    tree_size: int


def _pairwise_entry(loss: DisintegrableLoss, state: int, action: int) -> float:
    total = 0.0
    for j in range(loss.q):
        in_state = state >> j & 1
        in_action = action >> j & 1
        if in_action and not in_state:
            total += loss.pairwise[j].spurious
        elif in_state and not in_action:
            total += loss.pairwise[j].missing
    return total


def fold_sequential_tree(dataset: CategoricalDataset, config: LearnConfig) -> FoldResult:
    """Backward induction on the full sequential decision tree.

    Every branch carries its cumulated loss explicitly; decision nodes are
    replaced by the minimal expected cumulated loss and folded back to the
    root. The loss must be arc-wise (disintegrable) per child.
    """
    names = dataset.names
    cards = dataset.cardinalities
    n_vars = len(names)

    child_masks: list[tuple[int, ...]] = []
    child_probs: list[list[float]] = []
    child_losses: list[DisintegrableLoss] = []
    candidates: list[tuple[int, ...]] = []
    total_lattice = 1
    for child in range(n_vars):
        cand = config.candidates_for(child)
        candidates.append(cand)
        loss = config.loss.for_child(
            names[child], [names[c] for c in cand], [cards[c] for c in cand]
        )
        if not isinstance(loss, DisintegrableLoss):
            raise ValidationError(
                "the folding oracle requires an arc-wise (disintegrable) loss"
            )
        child_losses.append(loss)
        masks = enumerate_lattice(len(cand), cap=config.cap)
        child_masks.append(masks)
        total_lattice *= len(masks)
        if total_lattice > 10**6:
            raise CapacityError("decision tree too large for the folding oracle")
        # Lattice posterior re-derived through the urn scorer.
        logs = [
            _urn_family(dataset, child,
                        [cand[j] for j in mask_to_positions(m)], prior=config.prior)
            for m in masks
        ]
        peak = max(logs)
        weights = [math.exp(v - peak) for v in logs]
        norm = math.fsum(weights)
        child_probs.append([w / norm for w in weights])

    nodes = 0

    def fold(level: int, cum: float) -> tuple[float, tuple[int, ...]]:
        nonlocal nodes
        nodes += 1
        if level == n_vars:
            return cum, ()
        masks = child_masks[level]
        probs = child_probs[level]
        loss = child_losses[level]
        best_val = None
        best_mask = 0
        best_tail: tuple[int, ...] = ()
        for a_mask in masks:  # level-then-mask order fixes the tie-break
            terms = []
            tail: tuple[int, ...] | None = None
            for m_idx, m_mask in enumerate(masks):
                sub_val, sub_tail = fold(level + 1, cum + _pairwise_entry(loss, m_mask, a_mask))
                if tail is None:
                    tail = sub_tail
                terms.append(probs[m_idx] * sub_val)
            val = math.fsum(terms)
            if best_val is None or val < best_val:
                best_val, best_mask, best_tail = val, a_mask, tail
        return best_val, (best_mask,) + best_tail

    root_val, chosen_masks = fold(0, 0.0)
    locals_ = [
        LocalModel(child, candidates[child], chosen_masks[child])
        for child in range(n_vars)
    ]
    parents = tuple(m.parents for m in locals_)
    dag = DagModel(names, parents)
    return FoldResult(dag, root_val, nodes)
