"""Command-line surface: score, learn, posterior, verify, sample.

Exit codes: 0 success, 1 verification failure, 2 input validation,
3 capacity exceeded. Every command that writes files also writes a run
manifest; outputs are deterministic given the manifest (fixed seeds, fixed
summation orders) apart from the manifest's own timestamp.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import CategoricalDataset, VariableSpec, load_csv, sample_network, save_csv
from .exceptions import CapacityError, ValidationError, VerificationFailure
from .loss import LossSpec
from .modelspace import CandidateParents, DagModel, VariableOrdering, read_ordering
from .scoring import (
    DirichletPrior,
    PriorScheme,
    arc_probability,
    family_log_marginal,
    global_log_marginal,
    local_posterior,
)
from .dataset import count
from .modelspace import mask_to_positions
from .search import LearnConfig, learn
from . import verify as verify_suites

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_VALIDATION = 2
EXIT_CAPACITY = 3


def _add_prior_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=1.0,
                        help="total Dirichlet prior precision per family")
    parser.add_argument("--prior-scheme", choices=["uniform", "fixed"],
                        default="uniform")
    parser.add_argument("--fixed-cell", type=float, default=1.0,
                        help="per-cell hyperparameter for the fixed scheme")


def _prior_from(args) -> DirichletPrior:
    return DirichletPrior(
        total_precision=args.alpha,
        scheme=PriorScheme(args.prior_scheme),
        fixed_cell_value=args.fixed_cell,
    )


def _prior_manifest(args) -> dict:
    return {
        "alpha": args.alpha,
        "scheme": args.prior_scheme,
        "fixed_cell": args.fixed_cell,
    }


def _write_manifest(out_dir: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["tool_version"] = __version__
    payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    (out_dir / "manifest.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _load_dag(path: str, dataset: CategoricalDataset) -> DagModel:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON at line {exc.lineno}") from None
    return DagModel.from_json_dict(obj, names=dataset.names)


def _load_ordering(value: str, dataset: CategoricalDataset) -> VariableOrdering:
    path = Path(value)
    text = path.read_text(encoding="utf-8") if path.exists() else value
    return read_ordering(text, dataset.names)


def _load_loss(value: str) -> LossSpec:
    if value == "zero-one":
        return LossSpec.zero_one()
    try:
        obj = json.loads(Path(value).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"loss spec file not found: {value}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{value}: invalid JSON at line {exc.lineno}") from None
    return LossSpec.from_json_dict(obj)


def cmd_score(args) -> int:
    dataset = load_csv(args.data)
    dag = _load_dag(args.dag, dataset)
    prior = _prior_from(args)
    families = []
    for child in range(len(dataset.names)):
        parents = dag.parents[child]
        families.append({
            "child": dataset.names[child],
            "parents": [dataset.names[p] for p in parents],
            "log_marginal": family_log_marginal(count(dataset, child, parents), prior),
        })
    report = {
        "global_log_marginal": global_log_marginal(dataset, dag, prior),
        "families": families,
    }
    print(json.dumps(report, indent=2))
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "score.json").write_text(json.dumps(report, indent=2) + "\n")
        _write_manifest(out_dir, {
            "command": "score",
            "inputs": {"data": args.data, "dag": args.dag},
            "prior": _prior_manifest(args),
        })
    return EXIT_OK


def cmd_learn(args) -> int:
    dataset = load_csv(args.data)
    ordering = _load_ordering(args.ordering, dataset)
    loss = _load_loss(args.loss)
    config = LearnConfig(
        ordering=ordering,
        prior=_prior_from(args),
        loss=loss,
        cap=args.cap,
    )
    dag, diagnostics = learn(dataset, config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "dag.dot").write_text(dag.to_dot(), encoding="utf-8")
    (out_dir / "dag.json").write_text(
        json.dumps(dag.to_json_dict(), indent=2) + "\n", encoding="utf-8"
    )
    (out_dir / "diagnostics.json").write_text(
        json.dumps(diagnostics.to_json_dict(dataset.names), indent=2) + "\n",
        encoding="utf-8",
    )
    _write_manifest(out_dir, {
        "command": "learn",
        "inputs": {"data": args.data, "ordering": args.ordering, "loss": args.loss},
        "prior": _prior_manifest(args),
        "cap": args.cap,
    })
    if args.format == "dot":
        print(dag.to_dot(), end="")
    else:
        print(json.dumps(dag.to_json_dict(), indent=2))
    return EXIT_OK


def cmd_posterior(args) -> int:
    dataset = load_csv(args.data)
    prior = _prior_from(args)
    child = dataset.index_of(args.child)
    candidates = tuple(
        dataset.index_of(name.strip()) for name in args.candidates.split(",") if name.strip()
    )
    family = CandidateParents(child, candidates)
    lp = local_posterior(dataset, family, prior, cap=args.cap)
    report = {
        "child": args.child,
        "candidates": [dataset.names[c] for c in candidates],
        "subsets": [
            {
                "parents": [dataset.names[candidates[j]] for j in mask_to_positions(mask)],
                "log_score": float(lp.log_scores[i]),
                "prob": float(lp.probs[i]),
            }
            for i, mask in enumerate(lp.masks)
        ],
        "arc_probabilities": {
            dataset.names[candidates[j]]: arc_probability(lp, j)
            for j in range(family.q)
        },
        "prob_sum": float(lp.probs.sum()),
    }
    print(json.dumps(report, indent=2))
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "posterior.json").write_text(json.dumps(report, indent=2) + "\n")
        _write_manifest(out_dir, {
            "command": "posterior",
            "inputs": {"data": args.data, "child": args.child,
                       "candidates": args.candidates},
            "prior": _prior_manifest(args),
        })
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials == 0:
        print("warning: 0 trials requested; all suites pass vacuously")
        return EXIT_OK
    suites = [
        ("polya-urn", lambda: verify_suites.run_polya_suite(args.trials, args.seed)),
        ("linear-rule", lambda: verify_suites.run_linear_rule_suite(args.trials, args.seed + 1)),
        ("fold", lambda: verify_suites.run_fold_suite(args.trials, args.seed + 2)),
    ]
    all_failures = []
    for name, runner in suites:
        total, failures = runner()
        status = "pass" if not failures else "FAIL"
        print(f"{name}: {total - len(failures)}/{total} {status}")
        all_failures.extend(failures)
    if all_failures:
        print("first failing manifest:")
        print(json.dumps(all_failures[0], indent=2, default=str))
        return EXIT_VERIFY
    return EXIT_OK


def cmd_sample(args) -> int:
    try:
        spec = json.loads(Path(args.cpt).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{args.cpt}: invalid JSON at line {exc.lineno}") from None
    names = list(spec)
    dag = DagModel.from_json_dict(
        {name: spec[name].get("parents", []) for name in names}, names=names
    )
    variables = []
    cpts = []
    for i, name in enumerate(names):
        table = np.asarray(spec[name]["table"], dtype=float)
        if table.ndim != 2:
            raise ValidationError(f"CPT table for {name!r} must be 2d")
        card = table.shape[1]
        labels = spec[name].get("labels") or [f"{name.lower()}{k + 1}" for k in range(card)]
        variables.append(VariableSpec(name, tuple(labels)))
        cpts.append(table)
    dataset = sample_network(variables, dag, cpts, args.n, args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_csv(dataset, out_dir / "data.csv")
    _write_manifest(out_dir, {
        "command": "sample",
        "inputs": {"dag_cpt": args.cpt},
        "n": args.n,
        "seed": args.seed,
    })
    print(str(out_dir / "data.csv"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dagrisk",
        description="Loss-aware Bayesian network structure selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="log marginal likelihood of a DAG")
    p.add_argument("--data", required=True)
    p.add_argument("--dag", required=True, help="JSON file {variable: [parents...]}")
    p.add_argument("--out-dir", default=None)
    _add_prior_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("learn", help="select a DAG by expected-loss minimization")
    p.add_argument("--data", required=True)
    p.add_argument("--ordering", required=True,
                   help="ordering file or inline comma-separated names")
    p.add_argument("--loss", default="zero-one",
                   help='"zero-one" or a loss spec JSON file')
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--format", choices=["dot", "json"], default="json")
    _add_prior_flags(p)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("posterior", help="lattice posterior for one child")
    p.add_argument("--data", required=True)
    p.add_argument("--child", required=True)
    p.add_argument("--candidates", required=True, help="comma-separated names")
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--out-dir", default=None)
    _add_prior_flags(p)
    p.set_defaults(func=cmd_posterior)

    p = sub.add_parser("verify", help="run the oracle-equivalence suites")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="forward-sample a network to CSV")
    p.add_argument("--cpt", required=True,
                   help='JSON {variable: {"parents": [...], "table": [[...]]}}')
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except VerificationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
