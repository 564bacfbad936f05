"""Rule-constrained synthetic instance creation: kNN inside a rule's base
population, segment interpolation clipped to condition windows for numeric
attributes, frequency-voted categorical values under condition checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import NUMERIC, Attribute, Dataset, Provenance, SYNTHETIC
from .errors import ExecutionError
from .relaxation import BasePopulation
from .rules import Predicate, _interval_of


@dataclass(frozen=True)
class DistanceMetric:
    """Mixed-type metric: range-normalized numeric differences, unit cost per
    categorical mismatch, Euclidean norm over components."""

    mins: np.ndarray
    maxs: np.ndarray
    mismatch_cost: float = 1.0

    @classmethod
    def from_dataset(cls, d: Dataset) -> "DistanceMetric":
        mins, maxs = d.numeric_ranges()
        return cls(mins, maxs)

    @property
    def inv_range(self) -> np.ndarray:
        span = self.maxs - self.mins
        out = np.zeros_like(span)
        nonzero = span > 0
        out[nonzero] = 1.0 / span[nonzero]
        return out

    def distance(self, a_values, b_values, schema) -> float:
        """Scalar reference implementation; the kernels are the fast path."""
        inv = self.inv_range
        d2 = 0.0
        for j, p in enumerate(schema.numeric_positions()):
            d2 += ((a_values[p] - b_values[p]) * inv[j]) ** 2
        for p in schema.categorical_positions():
            if a_values[p] != b_values[p]:
                d2 += self.mismatch_cost
        return math.sqrt(d2)


@dataclass(frozen=True)
class SyntheticInstance:
    values: tuple
    label: str
    provenance: Provenance


def neighbors_in_rule(
    bp: BasePopulation, base: int, k: int, metric: DistanceMetric, d: Dataset
) -> list[int]:
    """The k nearest members of the base population to ``base`` (excluded),
    with no class-label constraint; distance ties prefer lower row index."""
    members = [i for i in bp.member_indices if i != base]
    if base not in bp.member_indices:
        raise ExecutionError(f"base row {base} not in base population {bp.rule_id}")
    if len(members) < k:
        raise ExecutionError(
            f"base population {bp.rule_id} has {len(bp)} members, need at least {k + 1}"
        )
    num, cat, _ = d.encoded()
    dists = _kernels.point_distances(num, cat, metric.inv_range, np.array(members, dtype=np.int64), base)
    order = np.argsort(dists, kind="stable")  # members sorted by index => stable = index tie-break
    return [members[j] for j in order[:k]]


def synthesize_numeric(
    base_v: float,
    nbr_v: float,
    conditions: tuple[Predicate, ...],
    rng: np.random.Generator,
    attr_range: float = 1.0,
) -> float:
    """Draw a value on the base-neighbor segment, clipped to the window the
    conditions induce; an equality condition pins the value outright."""
    for p in conditions:
        if p.operator == "=":
            return float(p.value)

    seg_lo, seg_hi = (base_v, nbr_v) if base_v <= nbr_v else (nbr_v, base_v)
    if not conditions:
        return float(rng.uniform(seg_lo, seg_hi))

    window = _interval_of(conditions)
    if window is None:
        raise ExecutionError(f"unsatisfiable numeric conditions: {conditions}")
    lo, lo_closed, hi, hi_closed = window

    # tightest window: segment intersected with the condition interval,
    # falling back to the condition interval when they do not meet
    t_lo, t_lo_closed = (seg_lo, True) if seg_lo > lo or (seg_lo == lo and lo_closed) else (lo, lo_closed)
    t_hi, t_hi_closed = (seg_hi, True) if seg_hi < hi or (seg_hi == hi and hi_closed) else (hi, hi_closed)
    if t_lo > t_hi or (t_lo == t_hi and not (t_lo_closed and t_hi_closed)):
        t_lo, t_lo_closed, t_hi, t_hi_closed = lo, lo_closed, hi, hi_closed

    span = attr_range if attr_range > 0 else 1.0
    if math.isinf(t_hi):
        t_hi, t_hi_closed = t_lo + span, True
    if math.isinf(t_lo):
        t_lo, t_lo_closed = t_hi - span, True

    eps = max(1e-9 * attr_range, 1e-12)
    draw_lo = t_lo if t_lo_closed else t_lo + eps
    draw_hi = t_hi if t_hi_closed else t_hi - eps
    if draw_lo >= draw_hi:
        return (t_lo + t_hi) / 2.0
    return float(rng.uniform(draw_lo, draw_hi))


def synthesize_categorical(
    nbr_values, conditions: tuple[Predicate, ...], attr: Attribute
) -> str:
    """Most frequent neighbor value that satisfies the conditions, falling
    back to the first qualifying declared category."""
    counts: dict[str, int] = {}
    for v in nbr_values:
        counts[v] = counts.get(v, 0) + 1
    decl_order = {c: i for i, c in enumerate(attr.categories)}
    ranked = sorted(counts, key=lambda v: (-counts[v], decl_order[v]))
    for v in ranked:
        if all(p.holds(v) for p in conditions):
            return v
    for v in attr.categories:
        if all(p.holds(v) for p in conditions):
            return v
    raise ExecutionError(f"no category of {attr.name!r} satisfies {conditions}")


def generate(
    bps: list[BasePopulation],
    plan,
    k: int,
    rng: np.random.Generator,
    d: Dataset,
) -> list[SyntheticInstance]:
    """One synthetic instance per selected base row.

    The neighbor pool is the k nearest members of the same base population
    (shrunk when the population itself is smaller); values are constrained
    by the original, unrelaxed clause of the covering rule and the label is
    sampled from the rule's distribution.
    """
    by_id = {bp.rule_id: bp for bp in bps}
    schema = d.schema
    metric = DistanceMetric.from_dataset(d)
    mins, maxs = d.numeric_ranges()
    ranges = {
        schema.attributes[p].name: float(maxs[j] - mins[j])
        for j, p in enumerate(schema.numeric_positions())
    }

    out: list[SyntheticInstance] = []
    for rule_id, rows in plan.per_rule:
        bp = by_id[rule_id]
        k_eff = min(k, len(bp) - 1)
        if k_eff < 1:
            continue
        for base in rows:
            nbrs = neighbors_in_rule(bp, base, k_eff, metric, d)
            chosen = nbrs[int(rng.integers(len(nbrs)))]
            clause = bp.constraint_clause(base)
            values = []
            for pos, attr in enumerate(schema.attributes):
                conds = clause.on_attribute(attr.name)
                if attr.kind == NUMERIC:
                    values.append(
                        synthesize_numeric(
                            d.rows[base][pos], d.rows[chosen][pos], conds, rng, ranges[attr.name]
                        )
                    )
                else:
                    values.append(
                        synthesize_categorical([d.rows[n][pos] for n in nbrs], conds, attr)
                    )
            values = tuple(values)
            if not clause.holds(values, schema):
                raise ExecutionError(
                    f"generated instance violates rule {rule_id}: {values}"
                )
            label = bp.rule.distribution.sample(rng)
            out.append(
                SyntheticInstance(values, label, Provenance(SYNTHETIC, rule_id, base, chosen))
            )
    return out
