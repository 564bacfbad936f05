"""Desk-scale experiment protocol: seed rules extracted from a decision
tree, rule-pool generation by perturbation, coverage-fraction splits,
multi-run experiments with aggregated holdout metrics, and a bundled
two-blob synthetic benchmark."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .data import CATEGORICAL, NUMERIC, Attribute, Dataset, Schema, split_with_tcf
from .engine import EngineConfig, run_augmentation
from .errors import ConfigError, ExecutionError, RuleError
from .models import TrainerSpec, _fit_tree
from .objective import holdout_score
from .rules import (
    Clause,
    FeedbackRule,
    FeedbackRuleSet,
    LabelDistribution,
    Predicate,
    clause_mask,
    clause_region,
    detect_conflicts,
    render_rules,
)

# rng purposes, disjoint from the engine's
_POOL, _DRAW, _SPLIT, _ENGINE = range(10, 14)


def _stream(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, purpose, index])


# -- seed rules from a fitted tree -------------------------------------------

def extract_seed_rules(d: Dataset, max_depth: int = 3) -> list[FeedbackRule]:
    """Fit the built-in decision tree and turn each root-to-leaf path into a
    deterministic rule predicting the leaf's majority class."""
    num, cat, codes = d.encoded()
    tree = _fit_tree(d.schema, num, cat, codes, max_depth)
    if "leaf" in tree:
        raise RuleError("decision tree has a single leaf; no rules to extract")
    rules = []
    for preds, leaf_code in _tree_paths(tree, d.schema, ()):
        clause = Clause(_simplify(preds, d.schema))
        label = d.schema.labels[leaf_code]
        rules.append(FeedbackRule(f"s{len(rules) + 1}", clause, LabelDistribution.delta(label)))
    return rules


def _tree_paths(node: dict, schema: Schema, preds: tuple):
    if "leaf" in node:
        yield preds, node["leaf"]
        return
    attr = schema.attributes[node["attr"]]
    if node["kind"] == "num":
        left = Predicate(attr.name, "<=", float(node["value"]))
        right = Predicate(attr.name, ">", float(node["value"]))
    else:
        category = attr.categories[node["value"]]
        left = Predicate(attr.name, "=", category)
        right = Predicate(attr.name, "!=", category)
    yield from _tree_paths(node["left"], schema, preds + (left,))
    yield from _tree_paths(node["right"], schema, preds + (right,))


def _simplify(preds: tuple, schema: Schema) -> tuple[Predicate, ...]:
    """Collapse per-attribute path conditions to their tightest form."""
    out: list[Predicate] = []
    seen_upper: dict[str, float] = {}
    seen_lower: dict[str, float] = {}
    eq_attrs = {p.attribute for p in preds if p.operator == "="}
    for p in preds:
        if p.operator == "<=":
            if p.attribute not in seen_upper or p.value < seen_upper[p.attribute]:
                seen_upper[p.attribute] = p.value
        elif p.operator == ">":
            if p.attribute not in seen_lower or p.value > seen_lower[p.attribute]:
                seen_lower[p.attribute] = p.value
        elif p.operator == "!=" and p.attribute in eq_attrs:
            continue  # equality on the same attribute already implies it
        elif p not in out:
            out.append(p)
    for name, v in seen_lower.items():
        out.append(Predicate(name, ">", v))
    for name, v in seen_upper.items():
        out.append(Predicate(name, "<=", v))
    order = schema.attribute_index
    out.sort(key=lambda p: (order[p.attribute], p.operator, str(p.value)))
    return tuple(out)


# -- rule perturbation ---------------------------------------------------------

_REVERSED_OP = {"<": ">", ">": "<", "<=": ">=", ">=": "<=", "=": "!=", "!=": "="}


def perturb_rules(
    seed_rules: list[FeedbackRule],
    d: Dataset,
    count: int,
    bounds: tuple[float, float],
    rng: np.random.Generator,
    max_attempts: int | None = None,
) -> list[FeedbackRule]:
    """Build a rule pool by repeatedly applying one random perturbation to a
    random seed rule: reverse an operator, redraw a predicate value from the
    observed range, or borrow a condition from another rule. Candidates are
    kept only when satisfiable and inside the coverage-fraction bounds."""
    lo, hi = bounds
    if not (0 <= lo < hi <= 1):
        raise ConfigError("coverage bounds must satisfy 0 <= lo < hi <= 1")
    if not seed_rules:
        raise ConfigError("no seed rules to perturb")
    if max_attempts is None:
        max_attempts = 100 * count

    schema = d.schema
    observed_cats: dict[str, list[str]] = {}
    observed_range: dict[str, tuple[float, float]] = {}
    for p, attr in enumerate(schema.attributes):
        column = [row[p] for row in d.rows]
        if attr.kind == CATEGORICAL:
            observed_cats[attr.name] = sorted(set(column))
        elif column:
            observed_range[attr.name] = (min(column), max(column))

    pool: list[FeedbackRule] = []
    seen: set = set()
    for _ in range(max_attempts):
        if len(pool) >= count:
            break
        seed_rule = seed_rules[int(rng.integers(len(seed_rules)))]
        kind = int(rng.integers(3))
        clause = _perturb_once(seed_rule, seed_rules, kind, rng, schema, observed_cats, observed_range)
        if clause is None or clause_region(clause, schema) is None:
            continue
        frac = int(clause_mask(clause, d).sum()) / len(d)
        if not (lo <= frac < hi):
            continue
        key = (clause, seed_rule.distribution)
        if key in seen:
            continue
        seen.add(key)
        pool.append(FeedbackRule(f"p{len(pool) + 1}", clause, seed_rule.distribution))
    if len(pool) < count:
        warnings.warn(
            f"rule pool incomplete: {len(pool)}/{count} after {max_attempts} attempts",
            stacklevel=2,
        )
    return pool


def _perturb_once(rule, seed_rules, kind, rng, schema, observed_cats, observed_range):
    preds = rule.clause.predicates
    if kind == 0:
        eligible = [
            i
            for i, p in enumerate(preds)
            if not (schema.attribute(p.attribute).kind == NUMERIC and p.operator == "=")
        ]
        if not eligible:
            return None
        i = eligible[int(rng.integers(len(eligible)))]
        p = preds[i]
        flipped = Predicate(p.attribute, _REVERSED_OP[p.operator], p.value)
        return Clause(preds[:i] + (flipped,) + preds[i + 1 :])
    if kind == 1:
        i = int(rng.integers(len(preds)))
        p = preds[i]
        attr = schema.attribute(p.attribute)
        if attr.kind == CATEGORICAL:
            choices = [c for c in observed_cats.get(attr.name, []) if c != p.value]
            if not choices:
                return None
            new_value: float | str = choices[int(rng.integers(len(choices)))]
        else:
            if attr.name not in observed_range:
                return None
            vmin, vmax = observed_range[attr.name]
            new_value = float(rng.uniform(vmin, vmax))
        return Clause(preds[:i] + (Predicate(p.attribute, p.operator, new_value),) + preds[i + 1 :])
    others = [r for r in seed_rules if r is not rule]
    if not others:
        return None
    donor = others[int(rng.integers(len(others)))]
    borrowed = donor.clause.predicates[int(rng.integers(len(donor.clause.predicates)))]
    pinned = {p.attribute for p in preds if p.operator == "="}
    if borrowed.attribute in pinned or borrowed in preds:
        return None
    return Clause(preds + (borrowed,))


def draw_conflict_free(
    pool: list[FeedbackRule],
    size: int,
    schema: Schema,
    rng: np.random.Generator,
    max_attempts: int = 1000,
) -> FeedbackRuleSet:
    """Draw rules without replacement, redrawing until the set is conflict-free."""
    if size > len(pool):
        raise ConfigError(f"requested {size} rules from a pool of {len(pool)}")
    for _ in range(max_attempts):
        idx = sorted(rng.choice(len(pool), size=size, replace=False).tolist())
        frs = FeedbackRuleSet(tuple(pool[i] for i in idx))
        if not detect_conflicts(frs, schema):
            return frs
    raise ExecutionError(
        f"no conflict-free rule set of size {size} found in pool of {len(pool)} "
        f"after {max_attempts} draws"
    )


# -- experiment configuration and runner ---------------------------------------

_MODEL_ALIASES = {
    "logreg": "logistic_regression",
    "forest": "random_forest_lite",
    "tree": "decision_tree",
    "logistic_regression": "logistic_regression",
    "random_forest_lite": "random_forest_lite",
    "decision_tree": "decision_tree",
}


def resolve_trainer(name: str, hyperparameters: dict | None = None) -> TrainerSpec:
    if name not in _MODEL_ALIASES:
        raise ConfigError(f"unknown model {name!r}; choose from {sorted(set(_MODEL_ALIASES))}")
    return TrainerSpec(_MODEL_ALIASES[name], dict(hyperparameters or {}))


@dataclass(frozen=True)
class ExperimentConfig:
    data_csv: str | None
    data_schema: str | None
    synthetic_rows: int | None
    trainer: TrainerSpec
    frs_size: int
    tcf: float
    runs: int
    coverage_lo: float
    coverage_hi: float
    pool_size: int = 100
    tree_depth: int = 3
    outside_train_frac: float = 0.8
    engine: EngineConfig = field(default_factory=EngineConfig)
    seed: int = 42

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not (0 <= self.coverage_lo < self.coverage_hi <= 1):
            raise ConfigError("coverage bounds must satisfy 0 <= lo < hi <= 1")
        if not 0 <= self.tcf <= 1:
            raise ConfigError("tcf must lie in [0, 1]")
        if self.frs_size < 1:
            raise ConfigError("frs_size must be >= 1")
        if (self.data_csv is None) != (self.data_schema is None):
            raise ConfigError("data csv and schema must be given together")
        if self.data_csv is None and self.synthetic_rows is None:
            raise ConfigError("either data files or a synthetic row count is required")

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ExperimentConfig":
        try:
            data = obj.get("data", {})
            trainer = obj["trainer"]
            rules_cfg = obj.get("rules", {})
            split = obj.get("split", {})
            eng = obj.get("engine", {})
            seed = int(obj.get("seed", 42))
            engine = EngineConfig(
                max_iterations=int(eng.get("tau", 200)),
                oversample_fraction=float(eng.get("q", 0.5)),
                n_neighbors=int(eng.get("k", 5)),
                per_iteration=None if eng.get("eta") is None else int(eng["eta"]),
                selector=eng.get("selector", "random"),
                strategy=eng.get("strategy", "relabel"),
                seed=seed,
            )
            return cls(
                data_csv=data.get("csv"),
                data_schema=data.get("schema"),
                synthetic_rows=(
                    None if "synthetic" not in data else int(data["synthetic"].get("rows", 400))
                ),
                trainer=resolve_trainer(trainer["kind"], trainer.get("hyperparameters")),
                frs_size=int(rules_cfg.get("frs_size", 3)),
                tcf=float(split.get("tcf", 0.2)),
                runs=int(obj.get("runs", 10)),
                coverage_lo=float(rules_cfg.get("coverage_lo", 0.05)),
                coverage_hi=float(rules_cfg.get("coverage_hi", 0.25)),
                pool_size=int(rules_cfg.get("pool_size", 100)),
                tree_depth=int(rules_cfg.get("tree_depth", 3)),
                outside_train_frac=float(split.get("outside_train_frac", 0.8)),
                engine=engine,
                seed=seed,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed experiment config: {exc}") from exc


def _metrics(model, units, test) -> dict:
    rep = holdout_score(model, units, test)
    return {"agreement": rep.agreement, "outside_f1": rep.outside_f1, "score": rep.value}


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run the multi-draw protocol and return the full report document."""
    from .data import load_dataset

    if cfg.data_csv is not None:
        d = load_dataset(cfg.data_csv, cfg.data_schema)
    else:
        d, _ = make_blob_benchmark(cfg.synthetic_rows, seed=cfg.seed)

    seed_rules = extract_seed_rules(d, cfg.tree_depth)
    pool = perturb_rules(
        seed_rules, d, cfg.pool_size, (cfg.coverage_lo, cfg.coverage_hi), _stream(cfg.seed, _POOL)
    )
    if len(pool) < cfg.frs_size:
        raise ExecutionError(f"rule pool too small ({len(pool)}) for frs_size={cfg.frs_size}")

    run_entries = []
    for r in range(cfg.runs):
        frs = draw_conflict_free(pool, cfg.frs_size, d.schema, _stream(cfg.seed, _DRAW, r))
        train_set, test_set = split_with_tcf(
            d, frs, cfg.tcf, cfg.outside_train_frac, _stream(cfg.seed, _SPLIT, r)
        )
        engine_cfg = EngineConfig(
            max_iterations=cfg.engine.max_iterations,
            oversample_fraction=cfg.engine.oversample_fraction,
            n_neighbors=cfg.engine.n_neighbors,
            per_iteration=cfg.engine.per_iteration,
            selector=cfg.engine.selector,
            strategy=cfg.engine.strategy,
            seed=int(_stream(cfg.seed, _ENGINE, r).integers(2**31 - 1)),
        )
        result = run_augmentation(engine_cfg, train_set, frs, cfg.trainer)
        units = result.rules
        initial = _metrics(result.initial_model, units, test_set)
        modified = _metrics(result.modified_model, units, test_set)
        final = _metrics(result.model, units, test_set)
        run_entries.append(
            {
                "run": r,
                "rules": render_rules(frs).strip().splitlines(),
                "train_rows": len(train_set),
                "test_rows": len(test_set),
                "initial": initial,
                "modified": modified,
                "final": final,
                "delta_score_final_vs_initial": final["score"] - initial["score"],
                "delta_score_final_vs_modified": final["score"] - modified["score"],
                "delta_score_modified_vs_initial": modified["score"] - initial["score"],
                "instances_added": result.added,
                "instances_added_fraction": result.added / len(train_set),
                "iterations": len(result.traces),
                "accepted_iterations": result.accepted_count,
                "terminated": result.terminated,
                "trace": [t.to_dict() for t in result.traces],
            }
        )

    return {
        "runs": run_entries,
        "aggregate": _aggregate(run_entries),
        "pool_size": len(pool),
        "seed_rules": [line for line in render_rules(FeedbackRuleSet(tuple(seed_rules))).strip().splitlines()],
    }


_AGG_FIELDS = (
    ("initial", "agreement"),
    ("initial", "outside_f1"),
    ("initial", "score"),
    ("modified", "agreement"),
    ("modified", "outside_f1"),
    ("modified", "score"),
    ("final", "agreement"),
    ("final", "outside_f1"),
    ("final", "score"),
    ("delta_score_final_vs_initial", None),
    ("delta_score_final_vs_modified", None),
    ("delta_score_modified_vs_initial", None),
    ("instances_added_fraction", None),
)


def _aggregate(entries: list[dict]) -> dict:
    out = {}
    for outer, inner in _AGG_FIELDS:
        values = [
            (e[outer][inner] if inner else e[outer])
            for e in entries
            if (e[outer][inner] if inner else e[outer]) is not None
        ]
        key = outer if inner is None else f"{outer}_{inner}"
        if values:
            arr = np.array(values, dtype=float)
            out[key] = {"mean": float(arr.mean()), "std": float(arr.std()), "n": len(values)}
        else:
            out[key] = {"mean": None, "std": None, "n": 0}
    return out


# -- bundled synthetic benchmark ------------------------------------------------

def make_blob_benchmark(
    n: int = 400, seed: int = 7, spread: float = 0.75
) -> tuple[Dataset, str]:
    """Two Gaussian blobs on a 2-D plane plus one rule that flips the
    upper-right quarter plane to the first class.

    The blobs sit at (-1.8, -0.4) labelled "a" and (1.8, 0.4) labelled "b";
    the rule covers roughly the upper half of the second blob, so an edited
    model must bend its boundary without surrendering the lower half.
    """
    rng = np.random.default_rng(seed)
    half = n // 2
    xa = rng.normal(loc=(-1.8, -0.4), scale=spread, size=(half, 2))
    xb = rng.normal(loc=(1.8, 0.4), scale=spread, size=(n - half, 2))
    points = np.concatenate([xa, xb])
    labels = ["a"] * half + ["b"] * (n - half)
    order = rng.permutation(n)

    schema = Schema(
        attributes=(Attribute("x1", NUMERIC), Attribute("x2", NUMERIC)),
        label_name="class",
        labels=("a", "b"),
    )
    rows = [(float(points[i, 0]), float(points[i, 1])) for i in order]
    d = Dataset(schema, rows, [labels[i] for i in order])
    rule_text = 'IF x1 > 0.0 AND x2 > 0.0 THEN class = "a"\n'
    return d, rule_text
