"""Loss tables and the arc-wise sum that generates disintegrable losses.

A lattice-shaped table is indexed by parent-subset masks in the canonical
enumeration order, so it lines up with LocalPosterior vectors without any
permutation bookkeeping. General (non-disintegrable) tables carry no arc
structure and only support exhaustive selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .exceptions import AlgebraError, ValidationError
from .modelspace import DEFAULT_PARENT_CAP, enumerate_lattice, lattice_index


@dataclass(frozen=True)
class PairwiseLoss:
    """Per-arc losses: `spurious` for adding the arc when absent in truth
    (l0j), `missing` for omitting it when present (lj0)."""

    spurious: float
    missing: float

    def __post_init__(self):
        if self.spurious <= 0 or self.missing <= 0:
            raise ValidationError("pairwise losses must be strictly positive")


@dataclass(frozen=True)
class LossTable:
    """Square state-by-action loss matrix with a zero diagonal.

    `arcs` is set for lattice-shaped tables (states are subset masks of
    those arcs in canonical order); `None` for opaque general tables.
    """

    entries: np.ndarray
    arcs: tuple[Hashable, ...] | None = None
    state_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValidationError("loss table must be square")
        if (np.diag(entries) != 0).any():
            raise ValidationError("loss table diagonal must be zero")
        if (entries < 0).any():
            raise ValidationError("loss entries must be nonnegative")
        if self.arcs is not None and entries.shape[0] != 1 << len(self.arcs):
            raise ValidationError("lattice loss table size must be 2^#arcs")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def masks(self) -> tuple[int, ...] | None:
        if self.arcs is None:
            return None
        return enumerate_lattice(len(self.arcs), cap=len(self.arcs))

    @property
    def arc_counts(self) -> tuple[int, ...] | None:
        """Arcs per state, for the fewest-arcs tie-break; None when opaque."""
        masks = self.masks
        if masks is None:
            return None
        return tuple(m.bit_count() for m in masks)


@dataclass(frozen=True)
class DisintegrableLoss:
    """One PairwiseLoss per candidate arc of a single child.

    Generates the full lattice table via the arc-wise sum; entries depend
    only on the arc differences between truth and action.
    """

    arcs: tuple[Hashable, ...]
    pairwise: tuple[PairwiseLoss, ...]

    def __post_init__(self):
        if len(self.arcs) != len(self.pairwise):
            raise ValidationError("one pairwise loss per arc is required")
        if len(set(self.arcs)) != len(self.arcs):
            raise ValidationError("duplicate arc identifier")

    @property
    def q(self) -> int:
        return len(self.arcs)


def zero_one(g: int) -> LossTable:
    """Unit loss for any wrong choice among g models."""
    if g < 1:
        raise ValidationError("at least one model is required")
    return LossTable(np.ones((g, g)) - np.eye(g))


def lattice_zero_one(arcs: Sequence[Hashable]) -> LossTable:
    """0-1 loss over a child's parent-subset lattice."""
    g = 1 << len(arcs)
    return LossTable(np.ones((g, g)) - np.eye(g), arcs=tuple(arcs))


EMPTY_LOSS = LossTable(np.zeros((1, 1)), arcs=())


def loss_sum(a: LossTable, b: LossTable) -> LossTable:
    """Combine two lattice tables over disjoint arc sets.

    States and actions of the result are the product lattice; the entry for
    a combined (state, action) is the sum of the two component entries.
    """
    if a.arcs is None or b.arcs is None:
        raise AlgebraError("loss sum is only defined for lattice-shaped tables")
    if set(a.arcs) & set(b.arcs):
        raise AlgebraError("loss sum requires disjoint arc sets")
    arcs = a.arcs + b.arcs
    qa = len(a.arcs)
    masks = enumerate_lattice(len(arcs), cap=len(arcs))
    idx_a = lattice_index(qa, cap=qa)
    idx_b = lattice_index(len(b.arcs), cap=len(b.arcs))
    mask_a = (1 << qa) - 1
    rows_a = np.array([idx_a[m & mask_a] for m in masks])
    rows_b = np.array([idx_b[m >> qa] for m in masks])
    entries = a.entries[np.ix_(rows_a, rows_a)] + b.entries[np.ix_(rows_b, rows_b)]
    return LossTable(entries, arcs=arcs)


def pairwise_table(arc: Hashable, pl: PairwiseLoss) -> LossTable:
    """The 2x2 table discriminating arc-present from arc-absent."""
    return LossTable(np.array([[0.0, pl.spurious], [pl.missing, 0.0]]), arcs=(arc,))


def expand_local(d: DisintegrableLoss, cap: int = DEFAULT_PARENT_CAP) -> LossTable:
    """Full lattice table generated by a child's pairwise losses.

    Closed form: entry(S, T) = sum over arcs added by T of l0j plus sum over
    arcs omitted by T of lj0, accumulated in arc order (bit-identical to the
    iterated arc-wise sum).
    """
    q = d.q
    masks = np.array(enumerate_lattice(q, cap))
    s = masks[:, None]
    t = masks[None, :]
    entries = np.zeros((len(masks), len(masks)))
    for j in range(q):
        added = ((t >> j) & 1).astype(bool) & ~((s >> j) & 1).astype(bool)
        omitted = ((s >> j) & 1).astype(bool) & ~((t >> j) & 1).astype(bool)
        entries += np.where(added, d.pairwise[j].spurious,
                            np.where(omitted, d.pairwise[j].missing, 0.0))
    return LossTable(entries, arcs=d.arcs)


def state_count_loss(cardinalities: Sequence[int], h: float, k: float) -> LossTable:
    """Complexity-aware table pricing arc errors by parent state counts.

    Whenever the action adds at least one arc absent in truth, every arc
    difference costs k per state of that arc's source; a pure omission
    (action a subset of truth) costs h per omitted arc.
    """
    if h <= 0 or k <= 0:
        raise ValidationError("h and k must be positive")
    cards = tuple(int(c) for c in cardinalities)
    q = len(cards)
    masks = enumerate_lattice(q, cap=max(q, 1))
    m = len(masks)
    entries = np.zeros((m, m))
    for si, s in enumerate(masks):
        for ti, t in enumerate(masks):
            if s == t:
                continue
            added = t & ~s
            omitted = s & ~t
            if added:
                diff = added | omitted
                entries[si, ti] = k * sum(cards[j] for j in range(q) if diff >> j & 1)
            else:
                entries[si, ti] = h * omitted.bit_count()
    return LossTable(entries, arcs=tuple(range(q)))


def uniform_complexity_loss(q: int, h: float) -> LossTable:
    """Flat complexity penalty: any wrong choice costs 1 when the truth is
    the null model, and h per true arc otherwise."""
    if q < 1:
        raise ValidationError("q must be at least 1")
    if h <= 0:
        raise ValidationError("h must be positive")
    masks = enumerate_lattice(q, cap=q)
    m = len(masks)
    entries = np.zeros((m, m))
    for si, s in enumerate(masks):
        for ti, t in enumerate(masks):
            if s == t:
                continue
            entries[si, ti] = 1.0 if s == 0 else h * s.bit_count()
    return LossTable(entries, arcs=tuple(range(q)))


def fit_pairwise(table: LossTable) -> DisintegrableLoss:
    """Recover pairwise losses reproducing a lattice table, or raise.

    Solves the independent constraints (null row gives each l0j, null column
    gives each lj0) and verifies every remaining entry; the error names the
    first violated (state, action) pair.
    """
    if table.arcs is None:
        raise AlgebraError("only lattice-shaped tables can be disintegrated")
    q = len(table.arcs)
    idx = lattice_index(q, cap=q)
    pairwise = []
    for j in range(q):
        spurious = float(table.entries[idx[0], idx[1 << j]])
        missing = float(table.entries[idx[1 << j], idx[0]])
        if spurious <= 0 or missing <= 0:
            raise AlgebraError(
                f"arc {table.arcs[j]!r}: generator entries must be positive"
            )
        pairwise.append(PairwiseLoss(spurious, missing))
    candidate = DisintegrableLoss(table.arcs, tuple(pairwise))
    expanded = expand_local(candidate, cap=max(q, 1))
    mismatch = np.argwhere(~np.isclose(expanded.entries, table.entries, rtol=0, atol=1e-12))
    if mismatch.size:
        si, ti = mismatch[0]
        masks = table.masks
        raise AlgebraError(
            "table is not disintegrable: entry at state "
            f"{masks[si]:#b}, action {masks[ti]:#b} is {table.entries[si, ti]!r} "
            f"but the pairwise expansion gives {expanded.entries[si, ti]!r}"
        )
    return candidate


# ---------------------------------------------------------------------------
# Loss specification files


@dataclass(frozen=True)
class LossSpec:
    """Parsed loss specification; builds the per-child loss on demand.

    JSON forms: {"type":"zero-one"} |
    {"type":"disintegrable","default":{"l0":x,"l1":y},
     "arcs":{"child:parent":{"l0":x,"l1":y}, ...}} |
    {"type":"state-count","h":x,"k":y} |
    {"type":"table","states":[...],"entries":[[...]]}
    where l0 is the spurious-arc loss and l1 the missing-arc loss.
    """

    kind: str
    default_pairwise: PairwiseLoss | None = None
    arc_overrides: Mapping[str, PairwiseLoss] | None = None
    h: float | None = None
    k: float | None = None
    table: LossTable | None = None

    @classmethod
    def zero_one(cls) -> "LossSpec":
        return cls(kind="zero-one")

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "LossSpec":
        kind = obj.get("type")
        if kind == "zero-one":
            return cls(kind="zero-one")
        if kind == "disintegrable":
            default = obj.get("default")
            default_pl = None
            if default is not None:
                default_pl = PairwiseLoss(float(default["l0"]), float(default["l1"]))
            overrides = {
                key: PairwiseLoss(float(v["l0"]), float(v["l1"]))
                for key, v in obj.get("arcs", {}).items()
            }
            if default_pl is None and not overrides:
                raise ValidationError("disintegrable loss spec needs a default or arcs")
            return cls(kind="disintegrable", default_pairwise=default_pl,
                       arc_overrides=overrides)
        if kind == "state-count":
            return cls(kind="state-count", h=float(obj["h"]), k=float(obj["k"]))
        if kind == "table":
            entries = np.asarray(obj["entries"], dtype=float)
            labels = tuple(obj.get("states", ()))
            return cls(kind="table",
                       table=LossTable(entries, state_labels=labels or None))
        raise ValidationError(f"unknown loss type {kind!r}")

    def for_child(
        self,
        child_name: str,
        candidate_names: Sequence[str],
        candidate_cards: Sequence[int],
    ) -> DisintegrableLoss | LossTable:
        """Concrete loss for one child's lattice."""
        q = len(candidate_names)
        if self.kind == "zero-one":
            return lattice_zero_one(tuple(candidate_names))
        if self.kind == "disintegrable":
            pairwise = []
            for name in candidate_names:
                key = f"{child_name}:{name}"
                pl = (self.arc_overrides or {}).get(key, self.default_pairwise)
                if pl is None:
                    raise ValidationError(
                        f"no pairwise loss for arc {key!r} and no default given"
                    )
                pairwise.append(pl)
            return DisintegrableLoss(tuple(candidate_names), tuple(pairwise))
        if self.kind == "state-count":
            return state_count_loss(candidate_cards, self.h, self.k)
        if self.kind == "table":
            if self.table.size != 1 << q:
                raise ValidationError(
                    f"loss table has {self.table.size} states but child "
                    f"{child_name!r} has a lattice of {1 << q}"
                )
            return self.table
        raise ValidationError(f"unknown loss type {self.kind!r}")
