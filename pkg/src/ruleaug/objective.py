"""Model-rule agreement, outside-coverage F1, the equal-weighted training
loss driving the augmentation loop, and the coverage-weighted holdout score
reported on test data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import ExecutionError
from .rules import FeedbackRuleSet, rule_mask


@dataclass(frozen=True)
class ObjectiveReport:
    """Agreement/F1 breakdown plus the aggregate value they produce.

    ``value`` is a loss under "half" weighting (the loop minimizes it) and a
    score under "coverage" weighting (holdout evaluation; higher is better).
    Rules with no covered rows and a missing outside population are flagged
    and contribute nothing.
    """

    agreement_by_rule: tuple[tuple[str, float | None], ...]
    agreement: float | None
    outside_f1: float | None
    value: float
    weighting: str

    def to_dict(self) -> dict:
        return {
            "agreement_by_rule": {k: v for k, v in self.agreement_by_rule},
            "agreement": self.agreement,
            "outside_f1": self.outside_f1,
            "value": self.value,
            "weighting": self.weighting,
        }


def rule_agreement(model, frs: FeedbackRuleSet, d: Dataset):
    """Per-rule expected agreement between predictions and rule labels.

    For a deterministic rule this is the fraction of covered rows predicted
    as the rule's class; for a probabilistic rule each row contributes the
    probability the rule assigns to the predicted label, which is the exact
    expectation of 0-1 agreement. Returns (per-rule pairs, coverage-weighted
    aggregate over covered rules, per-rule coverage sizes).
    """
    pred_codes = model.predict_codes(d) if len(d) else np.zeros(0, dtype=np.int64)
    labels = d.schema.labels
    per_rule = []
    sizes = {}
    num_total = 0.0
    den_total = 0
    for rule in frs.rules:
        mask = rule_mask(rule, d)
        count = int(mask.sum())
        sizes[rule.id] = count
        if count == 0:
            per_rule.append((rule.id, None))
            continue
        dist = rule.distribution
        prob_by_code = np.array([dist.weight_of(lab) for lab in labels])
        agreement = float(prob_by_code[pred_codes[mask]].mean())
        per_rule.append((rule.id, agreement))
        num_total += agreement * count
        den_total += count
    aggregate = (num_total / den_total) if den_total else None
    return tuple(per_rule), aggregate, sizes


def _f1_binary(truth: np.ndarray, pred: np.ndarray, positive: int) -> float:
    tp = int(np.sum((pred == positive) & (truth == positive)))
    fp = int(np.sum((pred == positive) & (truth != positive)))
    fn = int(np.sum((pred != positive) & (truth == positive)))
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def f1_score(truth: np.ndarray, pred: np.ndarray, n_classes: int) -> float:
    """Binary: F1 of the second declared class (the positive one), falling
    back to the first class when the positive one is entirely absent.
    Multiclass: macro average over classes present in truth or predictions."""
    if n_classes == 2:
        if bool((truth == 1).any() or (pred == 1).any()):
            return _f1_binary(truth, pred, positive=1)
        return _f1_binary(truth, pred, positive=0)
    present = sorted(set(truth.tolist()) | set(pred.tolist()))
    return float(np.mean([_f1_binary(truth, pred, c) for c in present]))


def outside_f1(model, frs: FeedbackRuleSet, d: Dataset) -> float | None:
    """F1 of the model on rows no rule covers, against stored labels;
    None when there are no such rows."""
    mask = np.ones(len(d), dtype=bool)
    for rule in frs.rules:
        mask &= ~rule_mask(rule, d)
    if not mask.any():
        return None
    _, _, codes = d.encoded()
    pred = model.predict_codes(d)
    return f1_score(codes[mask], pred[mask], len(d.schema.labels))


def training_loss(model, frs: FeedbackRuleSet, d: Dataset) -> ObjectiveReport:
    """Equal-weighted loss 0.5*(1 - agreement) + 0.5*(1 - outside F1).

    A dataset with no covered rows carries no evidence of agreement, so the
    agreement term contributes its full loss; this is what lets the loop
    reward batches that create coverage from nothing. A missing outside
    population, which augmentation cannot manufacture, drops its term.
    """
    per_rule, agreement, _ = rule_agreement(model, frs, d)
    f1 = outside_f1(model, frs, d)
    value = 0.5 * (1.0 - (agreement if agreement is not None else 0.0))
    if f1 is not None:
        value += 0.5 * (1.0 - f1)
    return ObjectiveReport(per_rule, agreement, f1, value, "half")


def holdout_score(model, frs: FeedbackRuleSet, test: Dataset) -> ObjectiveReport:
    """Coverage-weighted score: each rule's agreement weighted by its share
    of the test set, plus the outside share times outside F1."""
    if len(test) == 0:
        raise ExecutionError("holdout evaluation needs a non-empty test set")
    per_rule, _, sizes = rule_agreement(model, frs, test)
    f1 = outside_f1(model, frs, test)
    n = len(test)
    covered = sum(sizes.values())
    value = 0.0
    for rule_id, agreement in per_rule:
        if agreement is not None:
            value += (sizes[rule_id] / n) * agreement
    if f1 is not None:
        value += ((n - covered) / n) * f1
    agg_num = sum(sizes[rid] * a for rid, a in per_rule if a is not None)
    aggregate = (agg_num / covered) if covered else None
    return ObjectiveReport(per_rule, aggregate, f1, value, "coverage")
