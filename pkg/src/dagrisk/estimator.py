"""Scikit-learn style front end for structure selection.

Wraps learn() in an estimator so the selector composes with the usual
tooling (get_params/set_params, clone, pipelines that only need fit).
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .dataset import CategoricalDataset, VariableSpec
from .exceptions import ValidationError
from .loss import LossSpec
from .modelspace import DEFAULT_PARENT_CAP, VariableOrdering
from .scoring import DirichletPrior, PriorScheme, global_log_marginal
from .search import LearnConfig, learn


def as_dataset(X, feature_names: Sequence[str] | None = None) -> CategoricalDataset:
    """Coerce array-like categorical input into a CategoricalDataset.

    Values are treated as opaque category labels; indices follow first
    appearance down each column. Pandas column names are honored.
    """
    if isinstance(X, CategoricalDataset):
        return X
    if hasattr(X, "columns") and hasattr(X, "to_numpy"):
        feature_names = [str(c) for c in X.columns]
        X = X.to_numpy()
    arr = np.asarray(X, dtype=object)
    if arr.ndim != 2:
        raise ValidationError("X must be a 2d array of categorical values")
    n, width = arr.shape
    if feature_names is None:
        feature_names = [f"X{i + 1}" for i in range(width)]
    codes: list[dict[str, int]] = [dict() for _ in range(width)]
    rows = np.empty((n, width), dtype=np.int64)
    for r in range(n):
        for c in range(width):
            value = arr[r, c]
            if value is None or (isinstance(value, float) and np.isnan(value)):
                raise ValidationError(f"missing value at row {r}, column {c}")
            key = str(value)
            rows[r, c] = codes[c].setdefault(key, len(codes[c]))
    variables = tuple(
        VariableSpec(name, tuple(col)) for name, col in zip(feature_names, codes)
    )
    return CategoricalDataset(variables, rows)


class StructureSelector(BaseEstimator):
    """Select a Bayesian-network DAG from complete categorical data.

    Parameters
    ----------
    ordering : sequence of column names or indices, or None
        Eligible-parent order; earlier variables may be parents of later
        ones. None uses column order.
    alpha : float
        Total Dirichlet prior precision per family (uniform scheme).
    prior_scheme : "uniform" | "fixed"
    fixed_cell : float
        Per-cell hyperparameter for the fixed scheme.
    loss : "zero-one" | dict | LossSpec
        Loss specification (dict uses the JSON loss-file schema).
    parent_cap : int
        Maximum candidate parents per child (local lattices are 2^q).

    Attributes
    ----------
    dag_ : DagModel
    diagnostics_ : LearnDiagnostics
    """

    def __init__(self, ordering=None, alpha=1.0, prior_scheme="uniform",
                 fixed_cell=1.0, loss="zero-one", parent_cap=DEFAULT_PARENT_CAP):
        self.ordering = ordering
        self.alpha = alpha
        self.prior_scheme = prior_scheme
        self.fixed_cell = fixed_cell
        self.loss = loss
        self.parent_cap = parent_cap

    def _prior(self) -> DirichletPrior:
        return DirichletPrior(
            total_precision=self.alpha,
            scheme=PriorScheme(self.prior_scheme),
            fixed_cell_value=self.fixed_cell,
        )

    def _loss_spec(self) -> LossSpec:
        if isinstance(self.loss, LossSpec):
            return self.loss
        if self.loss == "zero-one":
            return LossSpec.zero_one()
        if isinstance(self.loss, Mapping):
            return LossSpec.from_json_dict(self.loss)
        raise ValidationError(f"unsupported loss parameter {self.loss!r}")

    def _ordering(self, dataset: CategoricalDataset) -> VariableOrdering:
        if self.ordering is None:
            return VariableOrdering(tuple(range(len(dataset.variables))))
        order = []
        for item in self.ordering:
            order.append(item if isinstance(item, int) else dataset.index_of(str(item)))
        return VariableOrdering(tuple(order))

    def fit(self, X, y=None):
        dataset = as_dataset(X)
        config = LearnConfig(
            ordering=self._ordering(dataset),
            prior=self._prior(),
            loss=self._loss_spec(),
            cap=self.parent_cap,
        )
        self.dag_, self.diagnostics_ = learn(dataset, config)
        self.feature_names_in_ = np.asarray(dataset.names, dtype=object)
        self.n_features_in_ = len(dataset.variables)
        return self

    def score(self, X, y=None) -> float:
        """Global log marginal likelihood of the fitted DAG on X."""
        if not hasattr(self, "dag_"):
            raise ValidationError("estimator is not fitted")
        dataset = as_dataset(X, feature_names=list(self.feature_names_in_))
        return global_log_marginal(dataset, self.dag_, self._prior())
