import numpy as np
import pytest

from dagrisk import (
    ArcDecision,
    CapacityError,
    DirichletPrior,
    LearnConfig,
    LossSpec,
    PairwiseLoss,
    VariableOrdering,
    arc_decision,
    k2_greedy,
    learn,
    load_csv,
    local_posterior,
    select_local,
)
from dagrisk.loss import DisintegrableLoss, lattice_zero_one
from dagrisk.modelspace import CandidateParents
from dagrisk.search import arc_risk_delta
import io


def test_arc_decision_symmetric_tie():
    pl = PairwiseLoss(1.0, 1.0)
    assert arc_decision(0.5, pl) is ArcDecision.TIE
    assert arc_decision(0.5 + 1e-9, pl) is ArcDecision.INCLUDE
    assert arc_decision(0.5 - 1e-9, pl) is ArcDecision.EXCLUDE


def test_arc_decision_asymmetric_threshold():
    # include iff missing*P > spurious*(1-P); threshold here is 1/3
    pl = PairwiseLoss(1.0, 2.0)
    assert arc_risk_delta(0.4, pl) == pytest.approx(0.2, abs=1e-15)
    assert arc_decision(0.4, pl) is ArcDecision.INCLUDE
    assert arc_decision(0.25, pl) is ArcDecision.EXCLUDE


def test_arc_decision_rejects_bad_probability():
    with pytest.raises(Exception, match=r"\[0, 1\]"):
        arc_decision(1.5, PairwiseLoss(1, 1))


def test_select_local_linear_matches_exhaustive(benchmark_dataset):
    prior = DirichletPrior()
    rng = np.random.default_rng(9)
    for child in (3, 4):
        cands = tuple(range(child))
        family = CandidateParents(child, cands)
        pairwise = tuple(
            PairwiseLoss(float(rng.uniform(0.2, 3)), float(rng.uniform(0.2, 3)))
            for _ in cands
        )
        d = DisintegrableLoss(cands, pairwise)
        m_linear, diag_linear = select_local(
            benchmark_dataset, family, prior, None, d
        )
        from dagrisk.loss import expand_local

        m_table, diag_table = select_local(
            benchmark_dataset, family, prior, None, expand_local(d)
        )
        assert m_linear.mask == m_table.mask
        assert diag_linear.local_bayes_risk == pytest.approx(
            diag_table.local_bayes_risk, rel=1e-12
        )


def test_select_local_zero_one_is_map(benchmark_dataset):
    prior = DirichletPrior()
    family = CandidateParents(3, (0, 1, 2))
    loss = lattice_zero_one(("X1", "X2", "X3"))
    model, diag = select_local(benchmark_dataset, family, prior, None, loss)
    lp = local_posterior(benchmark_dataset, family, prior, None)
    assert model.mask == lp.masks[int(np.argmax(lp.probs))]
    assert diag.local_bayes_risk == pytest.approx(1 - lp.probs.max(), rel=1e-12)


def test_select_local_empty_data_prefers_null_when_spurious_costly(empty_dataset):
    # with no data every arc probability is the prior's; uniform model prior
    # over a 2-model lattice gives P = 1/2, so l0 > l1 forces exclusion
    family = CandidateParents(1, (0,))
    d = DisintegrableLoss((0,), (PairwiseLoss(2.0, 1.0),))
    model, diag = select_local(empty_dataset, family, DirichletPrior(), None, d)
    assert model.mask == 0
    assert diag.arcs[0].decision is ArcDecision.EXCLUDE


def test_learn_two_variable_dependence():
    text = "A,B\n" + "".join(
        f"a{i % 2},b{i % 2}\n" for i in range(40)
    ) + "a0,b1\na1,b0\n"
    ds = load_csv(io.StringIO(text))
    ordering = VariableOrdering((0, 1))
    dag, diags = learn(ds, LearnConfig(ordering=ordering))
    assert dag.parents == ((), (0,))
    assert diags.total_bayes_risk < 0.05


def test_learn_empty_dataset_yields_null_dag(empty_dataset):
    spec = LossSpec.from_json_dict(
        {"type": "disintegrable", "default": {"l0": 2.0, "l1": 1.0}}
    )
    ordering = VariableOrdering((0, 1))
    dag, _ = learn(empty_dataset, LearnConfig(ordering=ordering, loss=spec))
    assert dag.parents == ((), ())


def test_learn_respects_cap():
    text = "A,B,C\n" + "a0,b0,c0\n" + "a1,b1,c1\n"
    ds = load_csv(io.StringIO(text))
    with pytest.raises(CapacityError, match="'C'"):
        learn(ds, LearnConfig(ordering=VariableOrdering((0, 1, 2)), cap=1))


def test_learn_candidate_overrides(benchmark_dataset):
    config = LearnConfig(
        ordering=VariableOrdering((0, 1, 2, 3, 4)),
        candidate_overrides={4: (3,), 3: (1, 2)},
    )
    dag, _ = learn(benchmark_dataset, config)
    assert set(dag.parents[3]) <= {1, 2}
    assert set(dag.parents[4]) <= {3}


def test_learn_benchmark_diagnostics_shape(benchmark_dataset):
    config = LearnConfig(ordering=VariableOrdering((0, 1, 2, 3, 4)))
    dag, diags = learn(benchmark_dataset, config)
    d = diags.to_json_dict(benchmark_dataset.names)
    assert len(d["children"]) == 5
    assert d["total_bayes_risk"] == pytest.approx(diags.total_bayes_risk)
    child3 = d["children"][3]
    assert child3["child"] == "X4"
    assert child3["lattice_size"] == 8


def test_k2_no_parents_allowed(benchmark_dataset):
    dag = k2_greedy(benchmark_dataset, VariableOrdering((0, 1, 2, 3, 4)),
                    max_parents=0)
    assert dag.parents == ((),) * 5


def test_k2_recovers_benchmark(benchmark_dataset):
    dag = k2_greedy(benchmark_dataset, VariableOrdering((0, 1, 2, 3, 4)))
    assert tuple(tuple(sorted(p)) for p in dag.parents) == ((), (0,), (0,), (1, 2), (3,))


def test_k2_single_candidate_tracks_bayes_factor(tiny_dataset):
    from dagrisk import PriorScheme, count, family_log_marginal

    prior = DirichletPrior(scheme=PriorScheme.FIXED_CELL, fixed_cell_value=1.0)
    dag = k2_greedy(tiny_dataset, VariableOrdering((0, 1)), prior=prior)
    with_arc = family_log_marginal(count(tiny_dataset, 1, (0,)), prior)
    without = family_log_marginal(count(tiny_dataset, 1, ()), prior)
    if with_arc > without:
        assert dag.parents[1] == (0,)
    else:
        assert dag.parents[1] == ()


def test_learn_spurious_penalty_yields_subgraph(benchmark_dataset):
    ordering = VariableOrdering((0, 1, 2, 3, 4))
    dag_01, _ = learn(benchmark_dataset, LearnConfig(ordering=ordering))
    heavy = LossSpec.from_json_dict(
        {"type": "disintegrable", "default": {"l0": 50.0, "l1": 1.0}}
    )
    dag_heavy, _ = learn(benchmark_dataset, LearnConfig(ordering=ordering, loss=heavy))
    arcs_01 = {(p, c) for c, ps in enumerate(dag_01.parents) for p in ps}
    arcs_heavy = {(p, c) for c, ps in enumerate(dag_heavy.parents) for p in ps}
    assert arcs_heavy <= arcs_01


def test_learn_relabel_equivariance(benchmark_dataset):
    # renaming categories must not change the selected structure
    ds = benchmark_dataset
    rows = ds.rows.copy()
    flipped = rows.copy()
    flipped[:, 2] = 1 - rows[:, 2]  # swap the two labels of X3
    from dagrisk import CategoricalDataset, VariableSpec

    variables = list(ds.variables)
    variables[2] = VariableSpec(ds.names[2], tuple(reversed(ds.variables[2].labels)))
    ds2 = CategoricalDataset(tuple(variables), flipped)
    config = LearnConfig(ordering=VariableOrdering((0, 1, 2, 3, 4)))
    dag1, _ = learn(ds, config)
    dag2, _ = learn(ds2, config)
    assert dag1.parents == dag2.parents
