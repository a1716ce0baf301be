"""Categorical data ingestion and sufficient statistics.

A dataset is an immutable table of category indices. Category index k for a
variable follows the order in which labels first appear in the source file,
so table layouts are stable across modules. Parent configurations are always
enumerated row-major over the declared parent list (first parent is the most
significant digit); counts, hyperparameters and CPTs all rely on this.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .exceptions import IncompleteSampleError, ValidationError


@dataclass(frozen=True)
class VariableSpec:
    """A named categorical variable with at least two categories."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 2:
            raise ValidationError(
                f"variable {self.name!r} has {len(self.labels)} observed "
                "category(ies); at least 2 are required"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"variable {self.name!r} has duplicate labels")

    @property
    def cardinality(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class CategoricalDataset:
    """A complete sample of n cases over categorical variables.

    `rows` holds category indices, shape (n, I). Immutable after
    construction; safe to share across threads.
    """

    variables: tuple[VariableSpec, ...]
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[1] != len(self.variables):
            raise ValidationError(
                f"rows have shape {rows.shape}, expected (n, {len(self.variables)})"
            )
        for i, var in enumerate(self.variables):
            if rows.shape[0] and (rows[:, i].min() < 0 or rows[:, i].max() >= var.cardinality):
                raise ValidationError(
                    f"variable {var.name!r}: category index out of range"
                )
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"unknown variable {name!r}") from None


@dataclass(frozen=True)
class ContingencyCounts:
    """Counts n(child=k | parent config j) for one (child, parents) family."""

    child: int
    parents: tuple[int, ...]
    table: np.ndarray  # shape (n_configs, child cardinality)
    config_totals: np.ndarray  # shape (n_configs,)

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        totals = np.asarray(self.config_totals, dtype=np.int64)
        if table.ndim != 2 or totals.shape != (table.shape[0],):
            raise ValidationError("contingency table shape mismatch")
        if (table < 0).any():
            raise ValidationError("negative count")
        if not np.array_equal(table.sum(axis=1), totals):
            raise ValidationError("config totals do not match per-state counts")
        table.setflags(write=False)
        totals.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "config_totals", totals)

    @property
    def n_configs(self) -> int:
        return self.table.shape[0]

    @property
    def child_cardinality(self) -> int:
        return self.table.shape[1]

    @property
    def n(self) -> int:
        return int(self.config_totals.sum())


def _config_index(rows: np.ndarray, parents: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Row-major configuration index over the parent list."""
    if not parents:
        return np.zeros(rows.shape[0], dtype=np.int64)
    cols = [rows[:, p] for p in parents]
    return np.ravel_multi_index(cols, dims)


def count(dataset: CategoricalDataset, child: int, parents: Sequence[int]) -> ContingencyCounts:
    """Sufficient statistics for one family. Pure; independent of row order."""
    parents = tuple(parents)
    n_vars = len(dataset.variables)
    for idx in (child, *parents):
        if not 0 <= idx < n_vars:
            raise ValidationError(f"variable index {idx} out of range")
    if child in parents:
        raise ValidationError(
            f"invalid family: child {dataset.variables[child].name!r} listed among its parents"
        )
    if len(set(parents)) != len(parents):
        raise ValidationError("duplicate parent in family")
    cards = dataset.cardinalities
    dims = [cards[p] for p in parents]
    n_configs = int(np.prod(dims)) if parents else 1
    c = cards[child]
    j = _config_index(dataset.rows, parents, dims)
    flat = np.bincount(j * c + dataset.rows[:, child], minlength=n_configs * c)
    table = flat.reshape(n_configs, c)
    return ContingencyCounts(child, parents, table, table.sum(axis=1))


def load_csv(source: str | Path | IO, has_header: bool = True) -> CategoricalDataset:
    """Parse a comma-separated complete sample.

    Labels get category indices in order of first appearance. Without a
    header, variables are named X1..XJ.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    lines = text.splitlines()
    if not lines:
        raise ValidationError("empty input")

    records = [line.split(",") for line in lines]
    if has_header:
        names = [h.strip() for h in records[0]]
        body = records[1:]
        first_data_line = 2
    else:
        names = [f"X{i + 1}" for i in range(len(records[0]))]
        body = records
        first_data_line = 1
    width = len(names)
    if len(set(names)) != width:
        raise ValidationError("duplicate column name in header")

    label_order: list[dict[str, int]] = [dict() for _ in range(width)]
    rows = np.empty((len(body), width), dtype=np.int64)
    for r, record in enumerate(body):
        lineno = first_data_line + r
        if len(record) != width:
            raise ValidationError(
                f"parse error at line {lineno}: expected {width} fields, got {len(record)}"
            )
        for c_i, value in enumerate(record):
            if value == "":
                raise IncompleteSampleError(
                    f"incomplete sample: empty field at line {lineno} "
                    "(complete data are a precondition of every score)"
                )
            codes = label_order[c_i]
            rows[r, c_i] = codes.setdefault(value, len(codes))

    variables = tuple(
        VariableSpec(name, tuple(codes)) for name, codes in zip(names, label_order)
    )
    return CategoricalDataset(variables, rows)


def to_csv(dataset: CategoricalDataset) -> str:
    """Serialize as UTF-8 CSV: header line, then rows in stored order."""
    out = io.StringIO()
    out.write(",".join(dataset.names) + "\n")
    labels = [v.labels for v in dataset.variables]
    for row in dataset.rows:
        out.write(",".join(labels[i][row[i]] for i in range(len(labels))) + "\n")
    return out.getvalue()


def save_csv(dataset: CategoricalDataset, path: str | Path) -> None:
    Path(path).write_text(to_csv(dataset), encoding="utf-8")


def sample_network(
    variables: Sequence[VariableSpec],
    dag,
    cpts: Sequence[np.ndarray],
    n: int,
    seed: int,
) -> CategoricalDataset:
    """Forward (ancestral) sampling of a discrete network.

    `cpts[i]` has one probability row per configuration of `dag.parents[i]`
    (row-major over the parent list) and one column per state of variable i.
    Identical seed gives an identical dataset.
    """
    variables = tuple(variables)
    cards = [v.cardinality for v in variables]
    n_vars = len(variables)
    tables = []
    for i, var in enumerate(variables):
        cpt = np.asarray(cpts[i], dtype=float)
        dims = [cards[p] for p in dag.parents[i]]
        n_configs = int(np.prod(dims)) if dims else 1
        if cpt.shape != (n_configs, cards[i]):
            raise ValidationError(
                f"CPT for {var.name!r} has shape {cpt.shape}, "
                f"expected ({n_configs}, {cards[i]})"
            )
        if not np.allclose(cpt.sum(axis=1), 1.0, rtol=0, atol=1e-9):
            raise ValidationError(f"CPT rows for {var.name!r} do not sum to 1")
        if (cpt < 0).any():
            raise ValidationError(f"CPT for {var.name!r} has a negative entry")
        tables.append(cpt)

    rng = np.random.default_rng(seed)
    rows = np.zeros((n, n_vars), dtype=np.int64)
    for i in dag.topological_order():
        parents = dag.parents[i]
        dims = [cards[p] for p in parents]
        j = _config_index(rows, parents, dims)
        cum = np.cumsum(tables[i][j], axis=1)
        u = rng.random(n)
        rows[:, i] = np.minimum((u[:, None] > cum).sum(axis=1), cards[i] - 1)
    return CategoricalDataset(variables, rows)
