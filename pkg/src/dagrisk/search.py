"""Decomposed structure selection under a fixed variable ordering.

Each child is an independent decision problem over its parent-subset
lattice. With an arc-wise (disintegrable) loss the Bayes subset follows from
q per-arc risk comparisons; with a general table selection is exhaustive
over the expanded lattice. A K2-style greedy maximizer of the family score
is included as a loss-unaware baseline.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .dataset import CategoricalDataset
from .decision import Posterior, bayes_action
from .exceptions import CapacityError, ValidationError
from .loss import DisintegrableLoss, LossSpec, LossTable, PairwiseLoss
from .modelspace import (
    DEFAULT_PARENT_CAP,
    CandidateParents,
    DagModel,
    LocalModel,
    VariableOrdering,
    global_sum,
)
from .scoring import (
    DirichletPrior,
    PriorScheme,
    arc_probability,
    family_log_marginal,
    local_posterior,
)
from .dataset import count


class ArcDecision(enum.Enum):
    INCLUDE = "include"
    EXCLUDE = "exclude"
    TIE = "tie"


def arc_risk_delta(p_arc: float, pl: PairwiseLoss) -> float:
    """Risk advantage of including the arc: omit-cost weight minus add-cost
    weight, positive when inclusion is strictly better."""
    return pl.missing * p_arc - pl.spurious * (1.0 - p_arc)


def arc_decision(p_arc: float, pl: PairwiseLoss) -> ArcDecision:
    """Per-arc Bayes comparison; a tie is resolved as exclude by callers."""
    if not 0.0 <= p_arc <= 1.0:
        raise ValidationError("arc probability must lie in [0, 1]")
    delta = arc_risk_delta(p_arc, pl)
    if delta > 0:
        return ArcDecision.INCLUDE
    if delta < 0:
        return ArcDecision.EXCLUDE
    return ArcDecision.TIE


@dataclass(frozen=True)
class ArcDiagnostic:
    parent: int
    probability: float
    delta: float | None
    decision: ArcDecision


@dataclass(frozen=True)
class ChildDiagnostics:
    child: int
    q: int
    lattice_size: int
    arcs: tuple[ArcDiagnostic, ...]
    selected_mask: int
    local_bayes_risk: float

    def to_json_dict(self, names: Sequence[str]) -> dict:
        return {
            "child": names[self.child],
            "q": self.q,
            "lattice_size": self.lattice_size,
            "arcs": [
                {
                    "parent": names[a.parent],
                    "P": a.probability,
                    "delta": a.delta,
                    "decision": a.decision.value,
                }
                for a in self.arcs
            ],
            "local_bayes_risk": self.local_bayes_risk,
        }


@dataclass(frozen=True)
class LearnDiagnostics:
    children: tuple[ChildDiagnostics, ...]
    total_bayes_risk: float

    def to_json_dict(self, names: Sequence[str]) -> dict:
        return {
            "children": [c.to_json_dict(names) for c in self.children],
            "total_bayes_risk": self.total_bayes_risk,
        }


@dataclass(frozen=True)
class LearnConfig:
    """Everything learn() needs besides the data."""

    ordering: VariableOrdering
    prior: DirichletPrior = DirichletPrior()
    loss: LossSpec = field(default_factory=LossSpec.zero_one)
    candidate_overrides: Mapping[int, tuple[int, ...]] | None = None
    model_prior: Mapping[int, Sequence[float]] | None = None
    cap: int = DEFAULT_PARENT_CAP

    def candidates_for(self, child: int) -> tuple[int, ...]:
        if self.candidate_overrides and child in self.candidate_overrides:
            return tuple(self.candidate_overrides[child])
        return self.ordering.predecessors(child)


def select_local(
    dataset: CategoricalDataset,
    family: CandidateParents,
    prior: DirichletPrior,
    model_prior: Sequence[float] | None,
    loss: DisintegrableLoss | LossTable,
    cap: int = DEFAULT_PARENT_CAP,
) -> tuple[LocalModel, ChildDiagnostics]:
    """Bayes-optimal parent subset for one child.

    Arc-wise losses use the linear per-arc rule (q comparisons); general
    tables fall back to exhaustive minimization over the lattice. The two
    paths agree whenever both apply.
    """
    lp = local_posterior(dataset, family, prior, model_prior, cap=cap)
    arc_probs = [arc_probability(lp, j) for j in range(family.q)]

    if isinstance(loss, DisintegrableLoss):
        if loss.q != family.q:
            raise ValidationError(
                f"loss has {loss.q} arcs but the family has {family.q} candidates"
            )
        mask = 0
        arcs = []
        for j, p_arc in enumerate(arc_probs):
            delta = arc_risk_delta(p_arc, loss.pairwise[j])
            decision = arc_decision(p_arc, loss.pairwise[j])
            if decision is ArcDecision.INCLUDE:
                mask |= 1 << j
            arcs.append(ArcDiagnostic(family.candidates[j], p_arc, delta, decision))
        terms = [
            loss.pairwise[j].spurious * (1.0 - arc_probs[j])
            if mask >> j & 1
            else loss.pairwise[j].missing * arc_probs[j]
            for j in range(family.q)
        ]
        bayes_risk = math.fsum(terms)
    elif isinstance(loss, LossTable):
        if loss.size != len(lp.masks):
            raise ValidationError(
                f"loss table has {loss.size} states but the lattice has {len(lp.masks)}"
            )
        arc_counts = loss.arc_counts or tuple(m.bit_count() for m in lp.masks)
        report = bayes_action(loss, Posterior(lp.probs, arc_counts=arc_counts))
        mask = lp.masks[report.bayes_action]
        bayes_risk = report.bayes_risk
        arcs = []
        for j, p_arc in enumerate(arc_probs):
            decision = ArcDecision.INCLUDE if mask >> j & 1 else ArcDecision.EXCLUDE
            arcs.append(ArcDiagnostic(family.candidates[j], p_arc, None, decision))
    else:
        raise ValidationError(f"unsupported loss object {type(loss).__name__}")

    model = LocalModel(family.child, family.candidates, mask)
    diag = ChildDiagnostics(
        child=family.child,
        q=family.q,
        lattice_size=len(lp.masks),
        arcs=tuple(arcs),
        selected_mask=mask,
        local_bayes_risk=bayes_risk,
    )
    return model, diag


def learn(dataset: CategoricalDataset, config: LearnConfig) -> tuple[DagModel, LearnDiagnostics]:
    """Select every child's parents independently and compose the DAG.

    Independence across children holds because the posterior factorizes per
    family and the loss adds up arc-wise; the composition is a deterministic
    reduction in variable order.
    """
    names = dataset.names
    cards = dataset.cardinalities
    locals_: list[LocalModel] = []
    diags: list[ChildDiagnostics] = []
    for child in range(len(names)):
        candidates = config.candidates_for(child)
        if len(candidates) > config.cap:
            raise CapacityError(
                f"variable {names[child]!r} has {len(candidates)} candidate "
                f"parents, exceeding the cap of {config.cap}"
            )
        family = CandidateParents(child, candidates)
        child_loss = config.loss.for_child(
            names[child],
            [names[c] for c in candidates],
            [cards[c] for c in candidates],
        )
        model_prior = None
        if config.model_prior and child in config.model_prior:
            model_prior = config.model_prior[child]
        model, diag = select_local(
            dataset, family, config.prior, model_prior, child_loss, cap=config.cap
        )
        locals_.append(model)
        diags.append(diag)
    dag = global_sum(locals_, config.ordering, names)
    total = math.fsum(d.local_bayes_risk for d in diags)
    return dag, LearnDiagnostics(tuple(diags), total)


def k2_greedy(
    dataset: CategoricalDataset,
    ordering: VariableOrdering,
    prior: DirichletPrior | None = None,
    max_parents: int = DEFAULT_PARENT_CAP,
) -> DagModel:
    """Greedy per-child parent addition maximizing the family score.

    Loss-unaware baseline. Defaults to the fixed-cell prior with value 1,
    the algorithm's historical convention.
    """
    if max_parents < 0:
        raise ValidationError("max_parents must be nonnegative")
    if prior is None:
        prior = DirichletPrior(scheme=PriorScheme.FIXED_CELL, fixed_cell_value=1.0)
    names = dataset.names
    parents: list[tuple[int, ...]] = []
    for child in range(len(names)):
        chosen: list[int] = []
        remaining = list(ordering.predecessors(child))
        best = family_log_marginal(count(dataset, child, chosen), prior)
        while remaining and len(chosen) < max_parents:
            scores = [
                family_log_marginal(count(dataset, child, chosen + [c]), prior)
                for c in remaining
            ]
            top = int(np.argmax(scores))
            if scores[top] <= best:
                break
            best = scores[top]
            chosen.append(remaining.pop(top))
        parents.append(tuple(chosen))
    return DagModel(names, tuple(parents))
