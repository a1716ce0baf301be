import io
import math

import numpy as np
import pytest

from dagrisk import (
    CandidateParents,
    DirichletPrior,
    PriorScheme,
    ValidationError,
    arc_probability,
    bayes_factor,
    count,
    family_log_marginal,
    global_log_marginal,
    load_csv,
    local_posterior,
)
from dagrisk.modelspace import DagModel
from dagrisk.oracle import polya_urn_marginal
from dagrisk.verify import random_dataset


def test_empty_dataset_scores_zero(empty_dataset):
    prior = DirichletPrior(total_precision=2.0)
    assert family_log_marginal(count(empty_dataset, 0, []), prior) == 0.0
    assert family_log_marginal(count(empty_dataset, 0, [1]), prior) == 0.0
    dag = DagModel(("A", "B"), ((), ()))
    assert global_log_marginal(empty_dataset, dag, prior) == 0.0


def test_binary_family_closed_form():
    # binary child, no parents, counts (1,1), alpha=2 uniform: ln(1/6)
    ds = load_csv(io.StringIO("A\na1\na2\n"))
    score = family_log_marginal(count(ds, 0, []), DirichletPrior(total_precision=2.0))
    assert score == pytest.approx(math.log(1 / 6), rel=1e-12)


def test_empty_graph_hand_score(tiny_dataset):
    # each marginal histogram with counts (2,1), alpha=2: ln(1/12)
    prior = DirichletPrior(total_precision=2.0)
    dag = DagModel(("A", "B"), ((), ()))
    assert global_log_marginal(tiny_dataset, dag, prior) == pytest.approx(
        2 * math.log(1 / 12), rel=1e-12
    )


def test_score_additivity(tiny_dataset):
    prior = DirichletPrior()
    dag = DagModel(("A", "B"), ((1,), ()))
    total = global_log_marginal(tiny_dataset, dag, prior)
    by_family = family_log_marginal(count(tiny_dataset, 0, [1]), prior) + \
        family_log_marginal(count(tiny_dataset, 1, []), prior)
    assert total == by_family


def test_polya_urn_equivalence_small():
    rng = np.random.default_rng(0)
    for _ in range(20):
        ds = random_dataset(rng, int(rng.integers(2, 4)), int(rng.integers(3, 15)))
        dag = DagModel(ds.names, tuple(tuple(range(i)) for i in range(len(ds.names))))
        for prior in (DirichletPrior(2.0), DirichletPrior(
                scheme=PriorScheme.FIXED_CELL, fixed_cell_value=1.0)):
            closed = global_log_marginal(ds, dag, prior)
            urn = polya_urn_marginal(ds, dag, prior)
            assert closed == pytest.approx(urn, rel=1e-9)


def test_local_posterior_uniform_on_empty(empty_dataset):
    lp = local_posterior(empty_dataset, CandidateParents(1, (0,)), DirichletPrior())
    assert np.allclose(lp.probs, 0.5)
    lp0 = local_posterior(empty_dataset, CandidateParents(1, ()), DirichletPrior())
    assert lp0.probs.tolist() == [1.0]


def test_local_posterior_single_candidate_is_bayes_factor(tiny_dataset):
    prior = DirichletPrior(total_precision=2.0)
    lp = local_posterior(tiny_dataset, CandidateParents(0, (1,)), prior)
    m0 = DagModel(("A", "B"), ((), ()))
    m1 = DagModel(("A", "B"), ((1,), ()))
    r = bayes_factor(tiny_dataset, m0, m1, prior)
    assert lp.probs[0] / lp.probs[1] == pytest.approx(r, rel=1e-12)


def test_local_posterior_matches_high_precision_normalizer():
    import mpmath as mp

    rng = np.random.default_rng(4)
    ds = random_dataset(rng, 4, 25)
    prior = DirichletPrior(total_precision=1.5)
    lp = local_posterior(ds, CandidateParents(3, (0, 1, 2)), prior)
    with mp.workdps(60):
        weights = [mp.e ** mp.mpf(v) for v in lp.log_scores]
        norm = mp.fsum(weights)
        expected = [float(w / norm) for w in weights]
    assert np.allclose(lp.probs, expected, rtol=1e-10, atol=0)


def test_model_prior_scale_invariance(tiny_dataset):
    prior = DirichletPrior()
    family = CandidateParents(0, (1,))
    base = local_posterior(tiny_dataset, family, prior, model_prior=[1.0, 3.0])
    scaled = local_posterior(tiny_dataset, family, prior, model_prior=[7.0, 21.0])
    assert np.allclose(base.probs, scaled.probs, rtol=0, atol=1e-12)


def test_model_prior_must_cover_lattice(tiny_dataset):
    with pytest.raises(ValidationError, match="positive"):
        local_posterior(tiny_dataset, CandidateParents(0, (1,)), DirichletPrior(),
                        model_prior=[1.0, 0.0])


def test_bayes_factor_identity_and_reciprocal(tiny_dataset):
    prior = DirichletPrior()
    m0 = DagModel(("A", "B"), ((), ()))
    m1 = DagModel(("A", "B"), ((1,), ()))
    assert bayes_factor(tiny_dataset, m0, m0, prior) == 1.0
    r = bayes_factor(tiny_dataset, m0, m1, prior)
    assert bayes_factor(tiny_dataset, m1, m0, prior) == pytest.approx(1 / r, rel=1e-12)


def test_bayes_factor_prefers_dependence_under_strong_association():
    from dagrisk import VariableSpec, sample_network

    variables = [VariableSpec("X2", ("u", "v")), VariableSpec("X1", ("p", "q"))]
    dag = DagModel(("X2", "X1"), ((), (0,)))
    cpts = [np.array([[0.5, 0.5]]), np.array([[0.9, 0.1], [0.1, 0.9]])]
    ds = sample_network(variables, dag, cpts, 500, seed=2)
    independence = DagModel(("X2", "X1"), ((), ()))
    assert bayes_factor(ds, independence, dag, DirichletPrior(2.0)) < 1.0


def test_arc_probability_uniform_and_brute_force(empty_dataset):
    lp = local_posterior(empty_dataset, CandidateParents(1, (0,)), DirichletPrior())
    assert arc_probability(lp, 0) == pytest.approx(0.5)

    rng = np.random.default_rng(9)
    ds = random_dataset(rng, 4, 30)
    lp = local_posterior(ds, CandidateParents(3, (0, 1, 2)), DirichletPrior())
    for j in range(3):
        brute = sum(
            float(lp.probs[i]) for i, m in enumerate(lp.masks) if m >> j & 1
        )
        assert arc_probability(lp, j) == pytest.approx(brute, rel=1e-12)


def test_arc_probability_q2_identity():
    from dagrisk.scoring import LocalPosterior

    probs = np.array([0.4, 0.3, 0.2, 0.1])  # null, {3}, {2}, {3,2}
    lp = LocalPosterior(0, (3, 2), (0, 1, 2, 3), np.log(probs), probs)
    assert arc_probability(lp, 1) == pytest.approx(0.2 + 0.1, rel=1e-15)
    assert arc_probability(lp, 0) == pytest.approx(0.3 + 0.1, rel=1e-15)


def test_prior_validation():
    with pytest.raises(ValidationError):
        DirichletPrior(total_precision=0.0)
    with pytest.raises(ValidationError):
        DirichletPrior(fixed_cell_value=-1.0)
