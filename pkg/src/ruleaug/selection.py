"""Base-instance selection: borderline-aware instance weights plus the two
per-iteration strategies (uniform random, exact weighted subset optimum)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import Dataset
from .generation import DistanceMetric
from .relaxation import BasePopulation

SAFE, BORDERLINE, NOISY = "safe", "borderline", "noisy"

BORDERLINE_WEIGHT = 3.0
DEFAULT_WEIGHT = 1.0
WEIGHT_NEIGHBORS = 10


@dataclass(frozen=True)
class InstanceWeights:
    weights: np.ndarray
    categories: tuple[str, ...]


def compute_weights(d: Dataset, model, k_w: int = WEIGHT_NEIGHBORS) -> InstanceWeights:
    """Weight rows by their position relative to the model's boundary.

    Among each row's k_w nearest neighbors, count how many the model
    predicts differently from the row itself: all of them = noisy, at least
    half = borderline (weight 3), otherwise safe. Datasets too small for the
    neighborhood are all safe.
    """
    n = len(d)
    if n < k_w + 1:
        return InstanceWeights(np.full(n, DEFAULT_WEIGHT), tuple(SAFE for _ in range(n)))

    num, cat, _ = d.encoded()
    inv_range = DistanceMetric.from_dataset(d).inv_range
    nbrs = _kernels.knn_indices(num, cat, inv_range, k_w)
    pred = np.asarray(model.predict_codes(d))
    differing = (pred[nbrs] != pred[:, None]).sum(axis=1)

    categories = np.where(
        differing == k_w, NOISY, np.where(differing >= k_w / 2, BORDERLINE, SAFE)
    )
    weights = np.where(categories == BORDERLINE, BORDERLINE_WEIGHT, DEFAULT_WEIGHT)
    return InstanceWeights(weights, tuple(str(c) for c in categories))


@dataclass(frozen=True)
class SelectionPlan:
    """Selected base rows per rule, in rule order."""

    per_rule: tuple[tuple[str, tuple[int, ...]], ...]
    repaired: tuple[str, ...] = ()
    objective: float | None = None

    def total(self) -> int:
        return sum(len(rows) for _, rows in self.per_rule)

    def all_rows(self) -> list[tuple[str, int]]:
        return [(rid, r) for rid, rows in self.per_rule for r in rows]


def select_random(
    bps: list[BasePopulation], eta: int, rng: np.random.Generator
) -> SelectionPlan:
    """Uniform selection with replacement, the per-iteration count spread as
    evenly as possible over rules (remainder to the earliest rules)."""
    if eta < 1:
        raise ValueError("eta must be >= 1")
    usable = [bp for bp in bps if len(bp) > 0]
    if not usable:
        return SelectionPlan(())
    m = len(usable)
    base, rem = divmod(eta, m)
    entries = []
    for j, bp in enumerate(usable):
        count = base + (1 if j < rem else 0)
        if count == 0:
            continue
        picks = rng.choice(len(bp), size=count, replace=True)
        entries.append((bp.rule_id, tuple(bp.member_indices[p] for p in picks)))
    return SelectionPlan(tuple(entries))


def select_ip(
    bps: list[BasePopulation], weights: InstanceWeights, eta: int, k: int
) -> SelectionPlan:
    """Exact optimum of the weighted subset-selection program.

    Per rule the count is bounded below by k+1 (shrunk to the population
    size when thinner) and above by eta over the number of rules (raised to
    the lower bound when smaller); disjoint coverages make the program
    separable, so the optimum is simply the highest-weight members per rule,
    ties to the lower row index.
    """
    if eta < 1:
        raise ValueError("eta must be >= 1")
    m = len(bps)
    if m == 0:
        return SelectionPlan(())
    upper_quota = eta // m
    entries = []
    repaired = []
    objective = 0.0
    for bp in bps:
        size = len(bp)
        if size == 0:
            repaired.append(bp.rule_id)
            continue
        lower = min(k + 1, size)
        upper = upper_quota
        if lower < k + 1 or upper < lower:
            repaired.append(bp.rule_id)
        if upper < lower:
            upper = lower
        count = min(upper, size)
        order = sorted(
            range(size), key=lambda p: (-weights.weights[bp.member_indices[p]], bp.member_indices[p])
        )
        chosen = sorted(bp.member_indices[p] for p in order[:count])
        objective += float(sum(weights.weights[r] for r in chosen))
        entries.append((bp.rule_id, tuple(chosen)))
    return SelectionPlan(tuple(entries), tuple(repaired), objective)
