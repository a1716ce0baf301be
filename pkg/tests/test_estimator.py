import numpy as np
import pytest
from sklearn.base import clone

from dagrisk import StructureSelector, ValidationError, as_dataset
from dagrisk.dataset import to_csv


def benchmark_array(benchmark_dataset):
    labels = [v.labels for v in benchmark_dataset.variables]
    return np.array([
        [labels[c][code] for c, code in enumerate(row)]
        for row in benchmark_dataset.rows
    ], dtype=object)


def test_as_dataset_round_trip(benchmark_dataset):
    arr = benchmark_array(benchmark_dataset)
    ds = as_dataset(arr, feature_names=list(benchmark_dataset.names))
    assert to_csv(ds) == to_csv(benchmark_dataset)


def test_as_dataset_rejects_missing_values():
    X = np.array([["a", "b"], ["a", None], ["c", "d"]], dtype=object)
    with pytest.raises(ValidationError, match="row 1"):
        as_dataset(X)


def test_as_dataset_rejects_1d():
    with pytest.raises(ValidationError, match="2d"):
        as_dataset(np.array(["a", "b"], dtype=object))


def test_fit_recovers_benchmark(benchmark_dataset):
    est = StructureSelector().fit(benchmark_dataset)
    assert est.dag_.parents == ((), (0,), (0,), (1, 2), (3,))
    assert est.n_features_in_ == 5
    assert list(est.feature_names_in_) == ["X1", "X2", "X3", "X4", "X5"]
    assert est.diagnostics_.total_bayes_risk >= 0


def test_fit_on_object_array(benchmark_dataset):
    arr = benchmark_array(benchmark_dataset)
    est = StructureSelector().fit(arr)
    assert est.dag_.parents == ((), (0,), (0,), (1, 2), (3,))
    # default column names
    assert list(est.feature_names_in_) == ["X1", "X2", "X3", "X4", "X5"]


def test_ordering_by_name(benchmark_dataset):
    est = StructureSelector(ordering=["X1", "X2", "X3", "X4", "X5"])
    est.fit(benchmark_dataset)
    assert est.dag_.parents == ((), (0,), (0,), (1, 2), (3,))


def test_loss_dict_parameter(benchmark_dataset):
    est = StructureSelector(
        loss={"type": "disintegrable", "default": {"l0": 50.0, "l1": 1.0}}
    )
    est.fit(benchmark_dataset)
    base = StructureSelector().fit(benchmark_dataset)
    heavy_arcs = {(p, c) for c, ps in enumerate(est.dag_.parents) for p in ps}
    base_arcs = {(p, c) for c, ps in enumerate(base.dag_.parents) for p in ps}
    assert heavy_arcs <= base_arcs


def test_get_params_and_clone():
    est = StructureSelector(alpha=2.0, parent_cap=6)
    params = est.get_params()
    assert params["alpha"] == 2.0
    assert params["parent_cap"] == 6
    cloned = clone(est)
    assert cloned.get_params() == params
    est.set_params(alpha=0.5)
    assert est.alpha == 0.5


def test_score_requires_fit(benchmark_dataset):
    with pytest.raises(ValidationError, match="not fitted"):
        StructureSelector().score(benchmark_dataset)


def test_score_is_global_log_marginal(benchmark_dataset):
    from dagrisk import DirichletPrior, global_log_marginal

    est = StructureSelector().fit(benchmark_dataset)
    val = est.score(benchmark_dataset)
    expected = global_log_marginal(benchmark_dataset, est.dag_, DirichletPrior())
    assert val == pytest.approx(expected, rel=1e-12)
    assert val < 0
