"""Command-line surface: augment a dataset against a rule file, run a
multi-draw experiment from a JSON config, inspect/resolve/perturb rule
files, and emit the bundled synthetic benchmark.

Exit codes: 0 success, 2 validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .data import load_dataset, load_schema, save_dataset, save_schema
from .engine import EngineConfig, run_augmentation
from .errors import RuleaugError, ValidationError
from .harness import (
    ExperimentConfig,
    extract_seed_rules,
    make_blob_benchmark,
    perturb_rules,
    resolve_trainer,
    run_experiment,
)
from .rules import (
    FeedbackRuleSet,
    coverage,
    detect_conflicts,
    load_rules,
    render_rules,
    resolve_conflicts,
)

import numpy as np


def _dump_json(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _cmd_augment(args) -> int:
    started = time.perf_counter()
    schema = load_schema(args.schema)
    d = load_dataset(args.data, args.schema)
    frs = load_rules(args.rules, schema)
    trainer = resolve_trainer(args.model)
    config = EngineConfig(
        max_iterations=args.tau,
        oversample_fraction=args.q,
        n_neighbors=args.k,
        per_iteration=args.eta,
        selector=args.selector,
        strategy=args.strategy,
        seed=args.seed,
    )
    result = run_augmentation(config, d, frs, trainer)
    save_dataset(result.dataset, args.out)

    if args.report:
        report = {
            "command": "augment",
            "config": {
                "data": str(args.data),
                "schema": str(args.schema),
                "rules": str(args.rules),
                "model": args.model,
                "tau": args.tau,
                "q": args.q,
                "k": args.k,
                "eta": args.eta,
                "selector": args.selector,
                "strategy": args.strategy,
                "seed": args.seed,
            },
            "batch_size": result.batch_size,
            "quota": result.quota,
            "initial": result.initial_report.to_dict(),
            "modified": result.modified_report.to_dict(),
            "final": result.final_report.to_dict(),
            "instances_added": result.added,
            "iterations": len(result.traces),
            "accepted_iterations": result.accepted_count,
            "terminated": result.terminated,
            "trace": [t.to_dict() for t in result.traces],
            "wall_time": time.perf_counter() - started,
        }
        _dump_json(report, args.report)

    print(
        f"added {result.added} instances over {len(result.traces)} iterations "
        f"({result.accepted_count} accepted); loss {result.modified_report.value:.4f}"
        f" -> {result.final_report.value:.4f}; wrote {args.out}"
    )
    return 0


def _cmd_experiment(args) -> int:
    started = time.perf_counter()
    cfg_doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    cfg = ExperimentConfig.from_json_dict(cfg_doc)
    report = run_experiment(cfg)
    report["command"] = "experiment"
    report["config"] = cfg_doc
    report["wall_time"] = time.perf_counter() - started
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "report.json"
    _dump_json(report, out_path)
    agg = report["aggregate"]["delta_score_final_vs_initial"]
    print(f"{cfg.runs} runs; holdout score delta {agg['mean']:+.4f} +/- {agg['std']:.4f}; wrote {out_path}")
    return 0


def _cmd_rules_check(args) -> int:
    schema = load_schema(args.schema)
    frs = load_rules(args.rules, schema)
    print(f"{len(frs)} rules parsed")
    conflicts = detect_conflicts(frs, schema)
    for a, b in conflicts:
        print(f"conflict: {a} <-> {b}")
    if not conflicts:
        print("no conflicts")
    if args.data:
        d = load_dataset(args.data, args.schema)
        for rule in frs.rules:
            cov = len(coverage(rule, d))
            print(f"{rule.id}: covers {cov}/{len(d)} rows ({cov / len(d):.3f})")
    return 0


def _cmd_rules_resolve(args) -> int:
    schema = load_schema(args.schema)
    frs = load_rules(args.rules, schema)
    resolved = resolve_conflicts(frs, schema, policy=args.policy, mixture_weight=args.weight)
    Path(args.out).write_text(render_rules(resolved), encoding="utf-8")
    print(f"wrote {len(resolved)} rules to {args.out}")
    return 0


def _cmd_rules_perturb(args) -> int:
    schema = load_schema(args.schema)
    d = load_dataset(args.data, args.schema)
    if args.rules:
        seeds = list(load_rules(args.rules, schema).rules)
    else:
        seeds = extract_seed_rules(d, args.tree_depth)
    rng = np.random.default_rng(args.seed)
    pool = perturb_rules(seeds, d, args.count, (args.lo, args.hi), rng)
    Path(args.out).write_text(render_rules(FeedbackRuleSet(tuple(pool))), encoding="utf-8")
    print(f"wrote {len(pool)} rules to {args.out}")
    return 0


def _cmd_make_benchmark(args) -> int:
    d, rule_text = make_blob_benchmark(args.rows, seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_dataset(d, out_dir / "data.csv")
    save_schema(d.schema, out_dir / "schema.json")
    (out_dir / "rules.txt").write_text(rule_text, encoding="utf-8")
    print(f"wrote {len(d)} rows, schema and rules to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ruleaug", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_aug = sub.add_parser("augment", help="augment a dataset to align a model with rules")
    p_aug.add_argument("--data", required=True)
    p_aug.add_argument("--schema", required=True)
    p_aug.add_argument("--rules", required=True)
    p_aug.add_argument("--model", required=True, choices=["logreg", "forest", "tree"])
    p_aug.add_argument("--tau", type=int, default=200, help="iteration budget")
    p_aug.add_argument("--q", type=float, default=0.5, help="oversampling fraction")
    p_aug.add_argument("--k", type=int, default=5, help="neighbor count")
    p_aug.add_argument("--eta", type=int, default=None, help="instances per iteration override")
    p_aug.add_argument("--selector", choices=["random", "ip"], default="random")
    p_aug.add_argument("--strategy", choices=["none", "relabel", "drop"], default="relabel")
    p_aug.add_argument("--seed", type=int, default=42)
    p_aug.add_argument("--out", required=True, help="augmented dataset CSV")
    p_aug.add_argument("--report", default=None, help="run report JSON")
    p_aug.set_defaults(func=_cmd_augment)

    p_exp = sub.add_parser("experiment", help="run a multi-draw experiment from a JSON config")
    p_exp.add_argument("--config", required=True)
    p_exp.add_argument("--out-dir", required=True)
    p_exp.set_defaults(func=_cmd_experiment)

    p_rules = sub.add_parser("rules", help="validate, resolve or perturb rule files")
    rules_sub = p_rules.add_subparsers(dest="rules_command", required=True)

    p_check = rules_sub.add_parser("check", help="parse rules and report conflicts/coverage")
    p_check.add_argument("--rules", required=True)
    p_check.add_argument("--schema", required=True)
    p_check.add_argument("--data", default=None)
    p_check.set_defaults(func=_cmd_rules_check)

    p_resolve = rules_sub.add_parser("resolve", help="rewrite a rule file conflict-free")
    p_resolve.add_argument("--rules", required=True)
    p_resolve.add_argument("--schema", required=True)
    p_resolve.add_argument("--policy", choices=["exclude_intersection", "mixture"], default="exclude_intersection")
    p_resolve.add_argument("--weight", type=float, default=0.5)
    p_resolve.add_argument("--out", required=True)
    p_resolve.set_defaults(func=_cmd_rules_resolve)

    p_perturb = rules_sub.add_parser("perturb", help="generate a perturbed rule pool")
    p_perturb.add_argument("--schema", required=True)
    p_perturb.add_argument("--data", required=True)
    p_perturb.add_argument("--rules", default=None, help="seed rules (default: extract from a tree)")
    p_perturb.add_argument("--tree-depth", type=int, default=3)
    p_perturb.add_argument("--count", type=int, required=True)
    p_perturb.add_argument("--lo", type=float, default=0.05)
    p_perturb.add_argument("--hi", type=float, default=0.25)
    p_perturb.add_argument("--seed", type=int, default=42)
    p_perturb.add_argument("--out", required=True)
    p_perturb.set_defaults(func=_cmd_rules_perturb)

    p_bench = sub.add_parser("make-benchmark", help="write the bundled two-blob benchmark")
    p_bench.add_argument("--out-dir", required=True)
    p_bench.add_argument("--rows", type=int, default=400)
    p_bench.add_argument("--seed", type=int, default=7)
    p_bench.set_defaults(func=_cmd_make_benchmark)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuleaugError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
