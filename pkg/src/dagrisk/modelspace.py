"""Orderings, candidate-parent sets, local parent subsets and whole DAGs.

Local models for one child form the Boolean lattice over its candidate list,
encoded as bitmasks (bit j set = candidate at position j included). The
canonical enumeration is by level (number of arcs), then by ascending mask;
scoring vectors and loss tables all share this order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .exceptions import AlgebraError, CapacityError, ValidationError

DEFAULT_PARENT_CAP = 12


def enumerate_lattice(q: int, cap: int = DEFAULT_PARENT_CAP) -> tuple[int, ...]:
    """All 2^q subset masks, by level then ascending mask value."""
    if q < 0:
        raise ValidationError("q must be nonnegative")
    if q > cap:
        raise CapacityError(f"{q} candidate parents exceed the cap of {cap}")
    return tuple(sorted(range(1 << q), key=lambda m: (m.bit_count(), m)))


def lattice_index(q: int, cap: int = DEFAULT_PARENT_CAP) -> dict[int, int]:
    """Mask -> position in canonical enumeration order."""
    return {m: i for i, m in enumerate(enumerate_lattice(q, cap))}


def mask_to_positions(mask: int) -> tuple[int, ...]:
    return tuple(j for j in range(mask.bit_length()) if mask >> j & 1)


@dataclass(frozen=True)
class VariableOrdering:
    """A permutation of variable indices; earlier variables are eligible
    parents of later ones."""

    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise ValidationError("ordering is not a permutation of 0..I-1")

    def position(self, var: int) -> int:
        return self.order.index(var)

    def predecessors(self, var: int) -> tuple[int, ...]:
        pos = self.position(var)
        return self.order[:pos]


@dataclass(frozen=True)
class CandidateParents:
    """The candidate list for one child, all preceding it in the ordering."""

    child: int
    candidates: tuple[int, ...]

    def __post_init__(self):
        if self.child in self.candidates:
            raise ValidationError("child cannot be its own candidate parent")
        if len(set(self.candidates)) != len(self.candidates):
            raise ValidationError("duplicate candidate parent")

    @property
    def q(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class LocalModel:
    """A parent subset for one child, as a bitmask over candidate positions."""

    child: int
    candidates: tuple[int, ...]
    mask: int = 0

    def __post_init__(self):
        if not 0 <= self.mask < (1 << len(self.candidates)):
            raise ValidationError("subset mask out of range for the candidate list")

    @property
    def parents(self) -> tuple[int, ...]:
        return tuple(self.candidates[j] for j in mask_to_positions(self.mask))

    @property
    def level(self) -> int:
        return self.mask.bit_count()


def model_sum(a: LocalModel, b: LocalModel) -> LocalModel:
    """Union of two parent subsets of the same child."""
    if a.child != b.child or a.candidates != b.candidates:
        raise AlgebraError("model sum requires the same child and candidate list")
    return LocalModel(a.child, a.candidates, a.mask | b.mask)


@dataclass(frozen=True)
class DagModel:
    """A DAG as per-variable parent tuples, consistent with one ordering."""

    names: tuple[str, ...]
    parents: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.parents) != len(self.names):
            raise ValidationError("one parent list per variable is required")
        n = len(self.names)
        for i, ps in enumerate(self.parents):
            for p in ps:
                if not 0 <= p < n or p == i:
                    raise ValidationError(f"invalid parent index {p} for {self.names[i]!r}")
        self.topological_order()  # raises on cycles

    def topological_order(self) -> tuple[int, ...]:
        n = len(self.names)
        indeg = [len(ps) for ps in self.parents]
        children: list[list[int]] = [[] for _ in range(n)]
        for i, ps in enumerate(self.parents):
            for p in ps:
                children[p].append(i)
        order = [i for i in range(n) if indeg[i] == 0]
        head = 0
        while head < len(order):
            for ch in children[order[head]]:
                indeg[ch] -= 1
                if indeg[ch] == 0:
                    order.append(ch)
            head += 1
        if len(order) != n:
            raise ValidationError("graph contains a cycle")
        return tuple(order)

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple((p, i) for i, ps in enumerate(self.parents) for p in ps)

    def to_dot(self) -> str:
        lines = ["digraph model {"]
        for name in self.names:
            lines.append(f'  "{name}";')
        for i, ps in enumerate(self.parents):
            for p in ps:
                lines.append(f'  "{self.names[p]}" -> "{self.names[i]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict[str, list[str]]:
        return {self.names[i]: [self.names[p] for p in ps]
                for i, ps in enumerate(self.parents)}

    @classmethod
    def from_json_dict(cls, obj: Mapping[str, Sequence[str]],
                       names: Sequence[str] | None = None) -> "DagModel":
        """Build from {variable: [parents...]}; `names` fixes variable order."""
        if names is None:
            names = list(obj)
        names = tuple(names)
        index = {n: i for i, n in enumerate(names)}
        for v in obj:
            if v not in index:
                raise ValidationError(f"unknown variable {v!r} in DAG file")
        parents = []
        for n in names:
            ps = obj.get(n, [])
            for p in ps:
                if p not in index:
                    raise ValidationError(f"unknown parent {p!r} of {n!r} in DAG file")
            parents.append(tuple(index[p] for p in ps))
        return cls(names, tuple(parents))


def global_sum(locals_: Sequence[LocalModel], ordering: VariableOrdering,
               names: Sequence[str]) -> DagModel:
    """Compose one local model per variable into a DAG.

    Acyclicity holds by construction: every candidate must precede its
    child in the ordering.
    """
    n = len(ordering.order)
    if len(locals_) != n:
        raise ValidationError("exactly one local model per variable is required")
    by_child = {m.child: m for m in locals_}
    if len(by_child) != n:
        raise ValidationError("duplicate or missing child among local models")
    parents: list[tuple[int, ...]] = [()] * n
    for child, local in by_child.items():
        pos = ordering.position(child)
        preceding = set(ordering.order[:pos])
        for p in local.parents:
            if p not in preceding:
                raise ValidationError(
                    f"local model for variable {child} cites parent {p}, "
                    "which does not precede it in the ordering"
                )
        parents[child] = local.parents
    return DagModel(tuple(names), tuple(parents))


def decompose(dag: DagModel, candidates: Mapping[int, tuple[int, ...]]) -> list[LocalModel]:
    """Inverse of global_sum for given candidate lists."""
    out = []
    for child, ps in enumerate(dag.parents):
        cand = candidates[child]
        mask = 0
        for p in ps:
            if p not in cand:
                raise ValidationError(
                    f"parent {p} of variable {child} is not among its candidates"
                )
            mask |= 1 << cand.index(p)
        out.append(LocalModel(child, tuple(cand), mask))
    return out


def read_ordering(text: str, names: Sequence[str]) -> VariableOrdering:
    """Parse a single comma-separated line of variable names."""
    wanted = [t.strip() for t in text.strip().splitlines()[0].split(",")] if text.strip() else []
    index = {n: i for i, n in enumerate(names)}
    if sorted(wanted) != sorted(names):
        raise ValidationError("ordering must list every variable name exactly once")
    return VariableOrdering(tuple(index[w] for w in wanted))


def write_ordering(ordering: VariableOrdering, names: Sequence[str]) -> str:
    return ",".join(names[i] for i in ordering.order) + "\n"
