"""The augmentation loop: generate rule-satisfying synthetic rows, retrain,
keep the batch only when the training loss strictly improves, stop on the
iteration budget or the oversampling quota."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, STRATEGIES, apply_modification
from .errors import ConfigError, ValidationError
from .generation import generate
from .models import Model, TrainerSpec, train
from .objective import ObjectiveReport, training_loss
from .relaxation import pre_select_bp
from .rules import FeedbackRuleSet, detect_conflicts, merge_overlapping
from .selection import compute_weights, select_ip, select_random

SELECTORS = ("random", "ip")

# purpose codes for derived RNG streams; adding a consumer never shifts others
_MODIFY, _TRAIN, _SELECT, _GENERATE = range(4)


def _stream(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, purpose, index])


def _train_seed(seed: int, index: int) -> int:
    return int(_stream(seed, _TRAIN, index).integers(2**31 - 1))


@dataclass(frozen=True)
class EngineConfig:
    """Loop budgets and knobs.

    ``per_iteration`` overrides the batch size that otherwise spreads the
    oversampling quota uniformly over the iteration budget.
    """

    max_iterations: int = 200
    oversample_fraction: float = 0.5
    n_neighbors: int = 5
    per_iteration: int | None = None
    selector: str = "random"
    strategy: str = "relabel"
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.oversample_fraction <= 0:
            raise ConfigError("oversample_fraction must be > 0")
        if self.n_neighbors < 1:
            raise ConfigError("n_neighbors must be >= 1")
        if self.per_iteration is not None and self.per_iteration < 1:
            raise ConfigError("per_iteration must be >= 1 when given")
        if self.selector not in SELECTORS:
            raise ConfigError(f"selector must be one of {SELECTORS}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}")


@dataclass(frozen=True)
class IterationTrace:
    index: int
    generated: int
    accepted: bool
    loss_before: float
    loss_candidate: float
    total_added: int

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "generated": self.generated,
            "accepted": self.accepted,
            "loss_before": self.loss_before,
            "loss_candidate": self.loss_candidate,
            "total_added": self.total_added,
        }


@dataclass(frozen=True)
class AugmentationResult:
    dataset: Dataset
    model: Model
    traces: tuple[IterationTrace, ...]
    initial_report: ObjectiveReport
    modified_report: ObjectiveReport
    final_report: ObjectiveReport
    added: int
    batch_size: int
    quota: float
    terminated: str
    rules: FeedbackRuleSet
    initial_model: Model
    modified_model: Model

    @property
    def accepted_count(self) -> int:
        return sum(1 for t in self.traces if t.accepted)


def run_augmentation(
    config: EngineConfig,
    d: Dataset,
    frs: FeedbackRuleSet,
    trainer: TrainerSpec,
) -> AugmentationResult:
    """Run the full loop against a conflict-free rule set.

    Each candidate model is scored on its own (augmented) dataset so the
    batch's rule-satisfying rows count toward agreement; without that, a
    training set with no covered rows could never accept anything. A batch
    is kept only on a strict loss decrease. The quota check happens at loop
    entry, so the final accepted batch may overshoot by up to one batch.
    """
    if len(d) == 0:
        raise ValidationError("input dataset is empty")
    conflicts = detect_conflicts(frs, d.schema)
    if conflicts:
        raise ValidationError(f"rule set has unresolved conflicts: {conflicts}")
    units = merge_overlapping(frs, d.schema)

    seed = config.seed
    initial_model = train(trainer, d, _train_seed(seed, 0))
    initial_report = training_loss(initial_model, units, d)

    active = apply_modification(d, units, config.strategy, _stream(seed, _MODIFY))
    if len(active) == 0:
        raise ValidationError("modification strategy removed every row")
    modified_model = train(trainer, active, _train_seed(seed, 0))
    modified_report = training_loss(modified_model, units, active)
    model = modified_model
    loss = modified_report.value

    quota = config.oversample_fraction * len(active)
    batch_size = config.per_iteration or max(
        1, math.ceil(quota / config.max_iterations)
    )

    populations = pre_select_bp(active, units, config.n_neighbors)
    weights = compute_weights(active, model) if config.selector == "ip" else None

    traces: list[IterationTrace] = []
    added = 0
    terminated = "iteration_limit"
    for i in range(config.max_iterations):
        if added > quota:
            terminated = "quota"
            break
        usable = [bp for bp in populations if len(bp) >= 2]
        if not usable:
            terminated = "no_base_population"
            break
        if config.selector == "ip":
            plan = select_ip(usable, weights, batch_size, config.n_neighbors)
        else:
            plan = select_random(usable, batch_size, _stream(seed, _SELECT, i))
        batch = generate(usable, plan, config.n_neighbors, _stream(seed, _GENERATE, i), active)
        if not batch:
            terminated = "no_base_population"
            break
        candidate = active.with_rows(
            [s.values for s in batch], [s.label for s in batch], [s.provenance for s in batch]
        )
        candidate_model = train(trainer, candidate, _train_seed(seed, i + 1))
        candidate_loss = training_loss(candidate_model, units, candidate).value
        loss_before = loss
        accepted = candidate_loss < loss_before
        if accepted:
            active = candidate
            model = candidate_model
            loss = candidate_loss
            added += len(batch)
            populations = pre_select_bp(active, units, config.n_neighbors)
            if config.selector == "ip":
                weights = compute_weights(active, model)
        traces.append(
            IterationTrace(i, len(batch), accepted, loss_before, candidate_loss, added)
        )
    final_report = training_loss(model, units, active)
    return AugmentationResult(
        dataset=active,
        model=model,
        traces=tuple(traces),
        initial_report=initial_report,
        modified_report=modified_report,
        final_report=final_report,
        added=added,
        batch_size=batch_size,
        quota=quota,
        terminated=terminated,
        rules=units,
        initial_model=initial_model,
        modified_model=modified_model,
    )
