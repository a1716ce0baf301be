"""Expected loss over an explicit model set and Bayes-action selection.

Risks are computed in plain arithmetic: posteriors arrive normalized and
losses are bounded user inputs. Column sums use math.fsum so mathematically
tied risks compare equal bit-for-bit. Ties resolve toward the action whose
model has fewer arcs, then the lower index; only loss ratios matter, so
scaling a table by a positive constant never changes the selected action.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ValidationError
from .loss import LossTable, zero_one


@dataclass(frozen=True)
class Posterior:
    """A probability vector over an ordered model set.

    `arc_counts` (arcs per model) feeds the fewest-arcs tie-break; omitted
    means ties resolve by index alone.
    """

    probs: np.ndarray
    arc_counts: tuple[int, ...] | None = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValidationError("posterior must be a nonempty vector")
        if (probs < 0).any():
            raise ValidationError("posterior has a negative probability")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValidationError("posterior does not sum to 1")
        if self.arc_counts is not None and len(self.arc_counts) != probs.size:
            raise ValidationError("arc_counts length mismatch")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def size(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class RiskReport:
    """Per-action expected losses with the selected action and its ties."""

    risks: tuple[float, ...]
    bayes_action: int
    bayes_risk: float
    ties: tuple[int, ...]

    def __post_init__(self):
        if self.bayes_action not in self.ties:
            raise ValidationError("selected action must be among the ties")
        if self.bayes_risk != min(self.risks):
            raise ValidationError("bayes risk must be the minimum risk")

    def to_json_dict(self) -> dict:
        return {
            "risks": list(self.risks),
            "bayes_action": self.bayes_action,
            "bayes_risk": self.bayes_risk,
            "ties": list(self.ties),
        }


def risk(loss: LossTable, post: Posterior, action: int) -> float:
    """Expected loss of one action: its loss column dotted with the posterior."""
    if loss.size != post.size:
        raise ValidationError(
            f"loss table has {loss.size} states but posterior has {post.size}"
        )
    if not 0 <= action < loss.size:
        raise ValidationError(f"action index {action} out of range")
    return math.fsum(post.probs * loss.entries[:, action])


def _select(risks: Sequence[float], arc_counts: Sequence[int] | None) -> RiskReport:
    best = min(risks)
    ties = tuple(i for i, r in enumerate(risks) if r == best)
    if arc_counts is None:
        chosen = ties[0]
    else:
        chosen = min(ties, key=lambda i: (arc_counts[i], i))
    return RiskReport(tuple(risks), chosen, best, ties)


def bayes_action(loss: LossTable, post: Posterior) -> RiskReport:
    """Minimize expected loss over every action of the table."""
    if loss.size != post.size:
        raise ValidationError(
            f"loss table has {loss.size} states but posterior has {post.size}"
        )
    risks = [math.fsum(post.probs * loss.entries[:, a]) for a in range(loss.size)]
    arc_counts = loss.arc_counts
    if arc_counts is None:
        arc_counts = post.arc_counts
    return _select(risks, arc_counts)


def map_action(post: Posterior) -> int:
    """Posterior argmax; equivalent to Bayes selection under 0-1 loss."""
    return map_report(post).bayes_action


def map_report(post: Posterior) -> RiskReport:
    """Full report for the 0-1 decision (risks are 1 - p)."""
    return bayes_action(zero_one(post.size), post)
