"""Per-rule base populations, relaxing under-covered rules by greedy
condition deletion until enough rows qualify as bases."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .rules import (
    Clause,
    FeedbackRule,
    FeedbackRuleSet,
    RuleUnit,
    clause_mask,
    rule_mask,
)


@dataclass(frozen=True)
class BasePopulation:
    """Candidate base rows for one rule unit.

    ``source_member`` maps each member row to the group member whose
    (possibly relaxed) clause admitted it; generation constrains synthetic
    values to that member's original clause.
    """

    rule_id: str
    rule: RuleUnit
    member_indices: tuple[int, ...]
    source_member: tuple[int, ...]
    relaxed: bool
    relaxed_clauses: tuple[Clause | None, ...]

    def __len__(self) -> int:
        return len(self.member_indices)

    @property
    def relaxed_clause(self) -> Clause | None:
        return self.relaxed_clauses[0]

    def constraint_clause(self, row: int) -> Clause:
        pos = self.member_indices.index(row)
        return self.rule.members[self.source_member[pos]].clause


def _masked_coverage(clause: Clause, exclusions, d: Dataset) -> np.ndarray:
    mask = clause_mask(clause, d)
    for e in exclusions:
        mask &= ~clause_mask(e, d)
    return mask


def relax_rule(rule: FeedbackRule, d: Dataset, min_support: int):
    """Delete, one at a time, the condition whose removal grows coverage the
    most, until coverage reaches ``min_support`` or the clause is empty.

    Ties delete the later-listed condition, keeping the conditions the rule
    author wrote first. Returns (clause, covered row indices, relaxed flag).
    """
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    mask = _masked_coverage(rule.clause, rule.exclusions, d)
    if int(mask.sum()) >= min_support:
        return rule.clause, np.flatnonzero(mask), False

    clause = rule.clause
    while clause.predicates:
        best_pos, best_count, best_mask = -1, -1, None
        for pos in range(len(clause.predicates)):
            cand_mask = _masked_coverage(clause.without(pos), rule.exclusions, d)
            count = int(cand_mask.sum())
            if count >= best_count:
                best_pos, best_count, best_mask = pos, count, cand_mask
        clause = clause.without(best_pos)
        mask = best_mask
        if best_count >= min_support:
            break
    return clause, np.flatnonzero(mask), True


def pre_select_bp(d: Dataset, frs: FeedbackRuleSet, k: int) -> list[BasePopulation]:
    """Build one base population per rule unit with target support k+1.

    Fully covered rules keep their exact coverage; under-covered rules (or
    group members) are relaxed first, so bases may be only weakly covered.
    """
    min_support = k + 1
    out = []
    for unit in frs.rules:
        full = rule_mask(unit, d)
        if int(full.sum()) >= min_support:
            members = np.flatnonzero(full)
            sources = _assign_sources(unit, members, d, [m.clause for m in unit.members])
            out.append(
                BasePopulation(
                    unit.id,
                    unit,
                    tuple(int(i) for i in members),
                    tuple(sources),
                    False,
                    tuple(None for _ in unit.members),
                )
            )
            continue

        relaxed_clauses: list[Clause | None] = []
        union = np.zeros(len(d), dtype=bool)
        member_masks = []
        for member in unit.members:
            clause, idx, was_relaxed = relax_rule(member, d, min_support)
            relaxed_clauses.append(clause if was_relaxed else None)
            m = np.zeros(len(d), dtype=bool)
            m[idx] = True
            member_masks.append(m)
            union |= m
        members = np.flatnonzero(union)
        sources = []
        for i in members:
            for j, m in enumerate(member_masks):
                if m[i]:
                    sources.append(j)
                    break
        out.append(
            BasePopulation(
                unit.id,
                unit,
                tuple(int(i) for i in members),
                tuple(sources),
                True,
                tuple(relaxed_clauses),
            )
        )
    return out


def _assign_sources(unit: RuleUnit, members: np.ndarray, d: Dataset, clauses) -> list[int]:
    if len(unit.members) == 1:
        return [0] * len(members)
    masks = [clause_mask(c, d) for c in clauses]
    sources = []
    for i in members:
        for j, m in enumerate(masks):
            if m[i]:
                sources.append(j)
                break
        else:
            sources.append(0)
    return sources
