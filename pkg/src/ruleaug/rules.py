"""Feedback rules: the IF/THEN DSL, satisfaction and coverage semantics,
label distributions, and conflict detection/resolution/merging.

Downstream modules assume a rule set that has been passed through
``resolve_conflicts`` and ``merge_overlapping``, after which coverage
regions are pairwise disjoint over the attribute domain.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .data import CATEGORICAL, NUMERIC, Dataset, Instance, Schema
from .errors import RuleError, RuleSyntaxError

NUMERIC_OPS = ("=", ">", ">=", "<", "<=")
CATEGORICAL_OPS = ("=", "!=")

_OP_CODE = {
    "=": _kernels.OP_EQ,
    "!=": _kernels.OP_NE,
    "<": _kernels.OP_LT,
    "<=": _kernels.OP_LE,
    ">": _kernels.OP_GT,
    ">=": _kernels.OP_GE,
}


@dataclass(frozen=True)
class Predicate:
    attribute: str
    operator: str
    value: float | str

    def holds(self, value) -> bool:
        op = self.operator
        if op == "=":
            return value == self.value
        if op == "!=":
            return value != self.value
        if op == "<":
            return value < self.value
        if op == "<=":
            return value <= self.value
        if op == ">":
            return value > self.value
        return value >= self.value


@dataclass(frozen=True)
class Clause:
    """Conjunction of predicates; the empty clause matches every instance."""

    predicates: tuple[Predicate, ...]

    @property
    def is_empty(self) -> bool:
        return not self.predicates

    def holds(self, values, schema: Schema) -> bool:
        idx = schema.attribute_index
        return all(p.holds(values[idx[p.attribute]]) for p in self.predicates)

    def on_attribute(self, name: str) -> tuple[Predicate, ...]:
        return tuple(p for p in self.predicates if p.attribute == name)

    def without(self, position: int) -> "Clause":
        preds = self.predicates
        return Clause(preds[:position] + preds[position + 1 :])


def validate_predicate(pred: Predicate, schema: Schema, *, where: str = "") -> None:
    try:
        attr = schema.attribute(pred.attribute)
    except Exception:
        raise RuleError(f"{where}unknown attribute {pred.attribute!r}") from None
    if attr.kind == NUMERIC:
        if pred.operator not in NUMERIC_OPS:
            raise RuleError(f"{where}operator {pred.operator!r} not allowed on numeric attribute {attr.name!r}")
        if not isinstance(pred.value, (int, float)) or not math.isfinite(float(pred.value)):
            raise RuleError(f"{where}numeric attribute {attr.name!r} compared against non-number {pred.value!r}")
    else:
        if pred.operator not in CATEGORICAL_OPS:
            raise RuleError(f"{where}operator {pred.operator!r} not allowed on categorical attribute {attr.name!r}")
        if pred.value not in attr.categories:
            raise RuleError(f"{where}unknown category {pred.value!r} for attribute {attr.name!r}")


@dataclass(frozen=True)
class LabelDistribution:
    """Class-label probabilities attached to a rule; entries sorted by label."""

    weights: tuple[tuple[str, float], ...]

    @classmethod
    def of(cls, mapping) -> "LabelDistribution":
        items = tuple(sorted((str(k), float(v)) for k, v in dict(mapping).items()))
        dist = cls(items)
        dist.validate()
        return dist

    @classmethod
    def delta(cls, label: str) -> "LabelDistribution":
        return cls(((str(label), 1.0),))

    def validate(self, schema: Schema | None = None, *, where: str = "") -> None:
        if not self.weights:
            raise RuleError(f"{where}empty label distribution")
        total = 0.0
        for label, p in self.weights:
            if p < 0:
                raise RuleError(f"{where}negative probability for label {label!r}")
            total += p
        if abs(total - 1.0) > 1e-9:
            raise RuleError(f"{where}label probabilities sum to {total!r}, expected 1")
        if schema is not None:
            known = set(schema.labels)
            for label, _ in self.weights:
                if label not in known:
                    raise RuleError(f"{where}unknown class label {label!r}")

    @property
    def is_deterministic(self) -> bool:
        return len(self.weights) == 1

    def single_label(self) -> str:
        if not self.is_deterministic:
            raise RuleError("distribution is not deterministic")
        return self.weights[0][0]

    def weight_of(self, label: str) -> float:
        for lab, p in self.weights:
            if lab == label:
                return p
        return 0.0

    def support(self) -> tuple[str, ...]:
        return tuple(lab for lab, p in self.weights if p > 0)

    def sample(self, rng: np.random.Generator) -> str:
        if self.is_deterministic:
            return self.weights[0][0]
        labels = [lab for lab, _ in self.weights]
        probs = np.array([p for _, p in self.weights])
        return labels[rng.choice(len(labels), p=probs / probs.sum())]

    def mixture(self, other: "LabelDistribution", weight: float) -> "LabelDistribution":
        merged: dict[str, float] = {}
        for lab, p in self.weights:
            merged[lab] = merged.get(lab, 0.0) + weight * p
        for lab, p in other.weights:
            merged[lab] = merged.get(lab, 0.0) + (1.0 - weight) * p
        return LabelDistribution.of({k: v for k, v in merged.items() if v > 0})


def same_distribution(a: LabelDistribution, b: LabelDistribution, tol: float = 1e-9) -> bool:
    labels = {lab for lab, _ in a.weights} | {lab for lab, _ in b.weights}
    return all(abs(a.weight_of(lab) - b.weight_of(lab)) <= tol for lab in labels)


def sample_label(dist: LabelDistribution, rng: np.random.Generator) -> str:
    return dist.sample(rng)


@dataclass(frozen=True)
class FeedbackRule:
    """IF clause (and not any exclusion clause) THEN label ~ distribution."""

    id: str
    clause: Clause
    distribution: LabelDistribution
    exclusions: tuple[Clause, ...] = ()

    @property
    def members(self) -> tuple["FeedbackRule", ...]:
        return (self,)

    def satisfied_by(self, values, schema: Schema) -> bool:
        if not self.clause.holds(values, schema):
            return False
        return not any(e.holds(values, schema) for e in self.exclusions)


@dataclass(frozen=True)
class RuleGroup:
    """Coverage-overlapping rules sharing one distribution, satisfied by any member."""

    id: str
    members: tuple[FeedbackRule, ...]

    @property
    def distribution(self) -> LabelDistribution:
        return self.members[0].distribution

    def satisfied_by(self, values, schema: Schema) -> bool:
        return any(m.satisfied_by(values, schema) for m in self.members)


RuleUnit = FeedbackRule | RuleGroup


@dataclass(frozen=True)
class FeedbackRuleSet:
    rules: tuple[RuleUnit, ...]

    def __len__(self) -> int:
        return len(self.rules)

    def rule_by_id(self, rule_id: str) -> RuleUnit:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise RuleError(f"no rule with id {rule_id!r}")


def satisfies(rule: RuleUnit, x, schema: Schema) -> bool:
    """True iff the instance's attributes satisfy the rule (labels ignored)."""
    values = x.values if isinstance(x, Instance) else tuple(x)
    return rule.satisfied_by(values, schema)


# -- coverage via the encoded kernels -------------------------------------

def _encode_clause(clause: Clause, schema: Schema):
    num_cols = {schema.attributes[p].name: j for j, p in enumerate(schema.numeric_positions())}
    cat_cols = {schema.attributes[p].name: j for j, p in enumerate(schema.categorical_positions())}
    num_rows, cat_rows = [], []
    for p in clause.predicates:
        attr = schema.attribute(p.attribute)
        if attr.kind == NUMERIC:
            num_rows.append((num_cols[p.attribute], _OP_CODE[p.operator], float(p.value)))
        else:
            code = attr.categories.index(p.value)
            cat_rows.append((cat_cols[p.attribute], _OP_CODE[p.operator], code))
    num_pred = np.array(num_rows, dtype=np.float64).reshape(-1, 3)
    cat_pred = np.array(cat_rows, dtype=np.int32).reshape(-1, 3)
    return num_pred, cat_pred


def clause_mask(clause: Clause, d: Dataset) -> np.ndarray:
    """Boolean mask of rows whose attributes satisfy the clause."""
    num, cat, _ = d.encoded()
    if clause.is_empty:
        return np.ones(len(d), dtype=bool)
    num_pred, cat_pred = _encode_clause(clause, d.schema)
    return np.asarray(_kernels.clause_mask(num, cat, num_pred, cat_pred), dtype=bool)


def rule_mask(rule: RuleUnit, d: Dataset) -> np.ndarray:
    out = np.zeros(len(d), dtype=bool)
    for member in rule.members:
        m = clause_mask(member.clause, d)
        for e in member.exclusions:
            m &= ~clause_mask(e, d)
        out |= m
    return out


def coverage(frs_or_rule, d: Dataset) -> np.ndarray:
    """Sorted row indices covered by a rule, group, or whole rule set."""
    if isinstance(frs_or_rule, FeedbackRuleSet):
        mask = np.zeros(len(d), dtype=bool)
        for r in frs_or_rule.rules:
            mask |= rule_mask(r, d)
    else:
        mask = rule_mask(frs_or_rule, d)
    return np.flatnonzero(mask)


# -- domain-level intersection ---------------------------------------------

_FULL = (-math.inf, False, math.inf, False)


def _interval_of(preds) -> tuple[float, bool, float, bool] | None:
    """Tightest (lo, lo_closed, hi, hi_closed) interval, None when empty."""
    lo, lo_c, hi, hi_c = _FULL
    for p in preds:
        v = float(p.value)
        if p.operator == "=":
            nlo, nlo_c, nhi, nhi_c = v, True, v, True
        elif p.operator == ">":
            nlo, nlo_c, nhi, nhi_c = v, False, math.inf, False
        elif p.operator == ">=":
            nlo, nlo_c, nhi, nhi_c = v, True, math.inf, False
        elif p.operator == "<":
            nlo, nlo_c, nhi, nhi_c = -math.inf, False, v, False
        else:
            nlo, nlo_c, nhi, nhi_c = -math.inf, False, v, True
        if nlo > lo or (nlo == lo and not nlo_c):
            lo, lo_c = nlo, nlo_c
        if nhi < hi or (nhi == hi and not nhi_c):
            hi, hi_c = nhi, nhi_c
    if lo > hi or (lo == hi and not (lo_c and hi_c)):
        return None
    return lo, lo_c, hi, hi_c


def _category_set(preds, attr) -> frozenset:
    allowed = set(attr.categories)
    for p in preds:
        if p.operator == "=":
            allowed &= {p.value}
        else:
            allowed.discard(p.value)
    return frozenset(allowed)


def clause_region(clause: Clause, schema: Schema):
    """Per-attribute feasible region of a conjunction, or None when empty."""
    num: dict[str, tuple] = {}
    cat: dict[str, frozenset] = {}
    by_attr: dict[str, list[Predicate]] = {}
    for p in clause.predicates:
        by_attr.setdefault(p.attribute, []).append(p)
    for name, preds in by_attr.items():
        attr = schema.attribute(name)
        if attr.kind == NUMERIC:
            iv = _interval_of(preds)
            if iv is None:
                return None
            num[name] = iv
        else:
            cs = _category_set(preds, attr)
            if not cs:
                return None
            cat[name] = cs
    return num, cat


def _regions_intersection(a, b):
    """Intersection of two clause regions; None when empty."""
    if a is None or b is None:
        return None
    num: dict[str, tuple] = dict(a[0])
    for name, (lo2, lo2_c, hi2, hi2_c) in b[0].items():
        lo, lo_c, hi, hi_c = num.get(name, _FULL)
        if lo2 > lo or (lo2 == lo and not lo2_c):
            lo, lo_c = lo2, lo2_c
        if hi2 < hi or (hi2 == hi and not hi2_c):
            hi, hi_c = hi2, hi2_c
        if lo > hi or (lo == hi and not (lo_c and hi_c)):
            return None
        num[name] = (lo, lo_c, hi, hi_c)
    cat: dict[str, frozenset] = dict(a[1])
    for name, cs2 in b[1].items():
        cs = cat.get(name, cs2) & cs2
        if not cs:
            return None
        cat[name] = cs
    return num, cat


def _region_contains(outer, inner, schema: Schema) -> bool:
    """True when every point of `inner` lies inside `outer`."""
    if outer is None:
        return False
    if inner is None:
        return True
    o_num, o_cat = outer
    i_num, i_cat = inner
    for name, (olo, olo_c, ohi, ohi_c) in o_num.items():
        ilo, ilo_c, ihi, ihi_c = i_num.get(name, _FULL)
        lo_ok = olo < ilo or (olo == ilo and (olo_c or not ilo_c))
        hi_ok = ohi > ihi or (ohi == ihi and (ohi_c or not ihi_c))
        if not (lo_ok and hi_ok):
            return False
    for name, ocs in o_cat.items():
        ics = i_cat.get(name, frozenset(schema.attribute(name).categories))
        if not ics <= ocs:
            return False
    return True


def _units_domain_intersect(a: RuleUnit, b: RuleUnit, schema: Schema) -> bool:
    """Whether the domain coverages of two rules/groups can share a point.

    Exact for conjunctive clauses; with exclusion clauses the test treats an
    intersection as empty when a single exclusion clause swallows it, which
    covers exactly the regions produced by ``resolve_conflicts``.
    """
    for ma in a.members:
        ra = clause_region(ma.clause, schema)
        for mb in b.members:
            inter = _regions_intersection(ra, clause_region(mb.clause, schema))
            if inter is None:
                continue
            exclusions = ma.exclusions + mb.exclusions
            if any(_region_contains(clause_region(e, schema), inter, schema) for e in exclusions):
                continue
            return True
    return False


def detect_conflicts(frs: FeedbackRuleSet, schema: Schema) -> list[tuple[str, str]]:
    """Pairs of rule ids whose domain coverages intersect with differing
    label distributions."""
    out = []
    rules = frs.rules
    for i in range(len(rules)):
        for j in range(i + 1, len(rules)):
            if same_distribution(rules[i].distribution, rules[j].distribution):
                continue
            if _units_domain_intersect(rules[i], rules[j], schema):
                out.append((rules[i].id, rules[j].id))
    return out


RESOLVE_POLICIES = ("exclude_intersection", "mixture")


def resolve_conflicts(
    frs: FeedbackRuleSet,
    schema: Schema,
    policy: str = "exclude_intersection",
    mixture_weight: float = 0.5,
) -> FeedbackRuleSet:
    """Repair conflicting pairs by mutual exclusion clauses, optionally adding
    a mixture-distribution rule on each intersection. Iterates until
    ``detect_conflicts`` is empty.
    """
    if policy not in RESOLVE_POLICIES:
        raise RuleError(f"unknown conflict policy {policy!r}")
    for r in frs.rules:
        if isinstance(r, RuleGroup):
            raise RuleError("resolve_conflicts must run before merge_overlapping")

    rules: list[FeedbackRule] = list(frs.rules)
    for _ in range(100):
        current = FeedbackRuleSet(tuple(rules))
        conflicts = detect_conflicts(current, schema)
        if not conflicts:
            return current
        by_id = {r.id: i for i, r in enumerate(rules)}
        fresh: list[FeedbackRule] = []
        for id_a, id_b in conflicts:
            a, b = rules[by_id[id_a]], rules[by_id[id_b]]
            if b.clause not in a.exclusions:
                rules[by_id[id_a]] = replace(a, exclusions=a.exclusions + (b.clause,))
            if a.clause not in b.exclusions:
                rules[by_id[id_b]] = replace(b, exclusions=b.exclusions + (a.clause,))
            if policy == "mixture":
                joint_id = f"{id_a}&{id_b}"
                if joint_id not in by_id and all(r.id != joint_id for r in fresh):
                    preds = a.clause.predicates + tuple(
                        p for p in b.clause.predicates if p not in a.clause.predicates
                    )
                    fresh.append(
                        FeedbackRule(
                            joint_id,
                            Clause(preds),
                            a.distribution.mixture(b.distribution, mixture_weight),
                        )
                    )
        rules.extend(fresh)
    raise RuleError("conflict resolution did not converge")


def merge_overlapping(frs: FeedbackRuleSet, schema: Schema) -> FeedbackRuleSet:
    """Group rules whose coverages intersect and whose distributions agree,
    so the resulting units have pairwise-disjoint coverage."""
    conflicts = detect_conflicts(frs, schema)
    if conflicts:
        raise RuleError(f"cannot merge a conflicting rule set: {conflicts}")

    units = frs.rules
    parent = list(range(len(units)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(units)):
        for j in range(i + 1, len(units)):
            if not same_distribution(units[i].distribution, units[j].distribution):
                continue
            if _units_domain_intersect(units[i], units[j], schema):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = {}
    for i in range(len(units)):
        groups.setdefault(find(i), []).append(i)

    merged: list[RuleUnit] = []
    for root in sorted(groups):
        idxs = groups[root]
        if len(idxs) == 1:
            merged.append(units[idxs[0]])
        else:
            members = tuple(m for i in idxs for m in units[i].members)
            merged.append(RuleGroup("+".join(units[i].id for i in idxs), members))
    return FeedbackRuleSet(tuple(merged))


# -- DSL -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
      | (?P<string>"(?:[^"\\]|\\.)*")
      | (?P<op><=|>=|!=|=|<|>)
      | (?P<punct>[{}:,~()])
      | (?P<ident>[A-Za-z_][A-Za-z0-9_.-]*)
    """,
    re.X,
)

_KEYWORDS = {"IF", "AND", "THEN", "UNLESS", "class"}
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.-]*\Z")


@dataclass
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(line: str, lineno: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if not m:
            raise RuleSyntaxError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos + 1))
        pos = m.end()
    return tokens


class _LineParser:
    def __init__(self, tokens: list[_Token], lineno: int, schema: Schema):
        self.tokens = tokens
        self.lineno = lineno
        self.schema = schema
        self.pos = 0

    def error(self, message: str):
        col = self.tokens[self.pos].column if self.pos < len(self.tokens) else None
        raise RuleSyntaxError(message, self.lineno, col)

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, kind: str | None = None, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok is None:
            raise RuleSyntaxError(f"unexpected end of rule (expected {text or kind})", self.lineno)
        if kind and tok.kind != kind or text and tok.text != text:
            self.error(f"expected {text or kind}, found {tok.text!r}")
        self.pos += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "ident" and tok.text == word

    def parse_rule(self, rule_id: str) -> FeedbackRule:
        self.take("ident", "IF")
        clause = self.parse_clause()
        exclusions = []
        while self.at_keyword("UNLESS"):
            self.take("ident", "UNLESS")
            exclusions.append(self.parse_clause())
        self.take("ident", "THEN")
        self.take("ident", "class")
        dist = self.parse_distribution()
        if self.peek() is not None:
            self.error("trailing input after rule")
        where = f"line {self.lineno}: "
        for cl in [clause, *exclusions]:
            for p in cl.predicates:
                validate_predicate(p, self.schema, where=where)
        dist.validate(self.schema, where=where)
        return FeedbackRule(rule_id, clause, dist, tuple(exclusions))

    def parse_clause(self) -> Clause:
        preds = [self.parse_predicate()]
        while self.at_keyword("AND"):
            self.take("ident", "AND")
            preds.append(self.parse_predicate())
        return Clause(tuple(preds))

    def parse_predicate(self) -> Predicate:
        name_tok = self.take("ident")
        if name_tok.text in _KEYWORDS:
            raise RuleSyntaxError(f"expected attribute name, found keyword {name_tok.text!r}", self.lineno, name_tok.column)
        op_tok = self.take("op")
        lit = self.peek()
        if lit is None:
            raise RuleSyntaxError("missing literal after operator", self.lineno)
        if lit.kind == "number":
            self.pos += 1
            return Predicate(name_tok.text, op_tok.text, float(lit.text))
        if lit.kind == "string":
            self.pos += 1
            return Predicate(name_tok.text, op_tok.text, _unquote(lit.text))
        self.error(f"expected number or quoted string, found {lit.text!r}")

    def parse_label(self) -> str:
        tok = self.peek()
        if tok is None:
            raise RuleSyntaxError("missing class label", self.lineno)
        if tok.kind in ("ident", "number"):
            self.pos += 1
            return tok.text
        if tok.kind == "string":
            self.pos += 1
            return _unquote(tok.text)
        self.error(f"expected class label, found {tok.text!r}")

    def parse_distribution(self) -> LabelDistribution:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == "=":
            self.take("op", "=")
            return LabelDistribution.delta(self.parse_label())
        self.take("punct", "~")
        self.take("punct", "{")
        entries: dict[str, float] = {}
        while True:
            label = self.parse_label()
            self.take("punct", ":")
            prob_tok = self.take("number")
            if label in entries:
                raise RuleSyntaxError(f"duplicate label {label!r} in distribution", self.lineno)
            entries[label] = float(prob_tok.text)
            tok = self.peek()
            if tok is not None and tok.text == ",":
                self.take("punct", ",")
                continue
            break
        self.take("punct", "}")
        try:
            return LabelDistribution.of(entries)
        except RuleError as exc:
            raise RuleSyntaxError(str(exc), self.lineno) from None


def _unquote(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text[1:-1])


def parse_rules(text: str, schema: Schema) -> FeedbackRuleSet:
    """Parse the one-rule-per-line DSL; ids r1, r2, ... follow file order.

    Grammar::

        rule := "IF" clause ("UNLESS" clause)* "THEN" "class" target
        clause := predicate ("AND" predicate)*
        predicate := IDENT OP (NUMBER | STRING)
        target := "=" LABEL | "~" "{" LABEL ":" PROB ("," LABEL ":" PROB)* "}"

    UNLESS clauses carry the exclusions produced by conflict resolution, so
    resolved rule sets can be rendered and re-read.
    """
    rules = []
    count = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = _tokenize(line, lineno)
        count += 1
        rules.append(_LineParser(tokens, lineno, schema).parse_rule(f"r{count}"))
    return FeedbackRuleSet(tuple(rules))


def _render_value(value) -> str:
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return repr(float(value))


def _render_label(label: str) -> str:
    if _IDENT_RE.match(label) and label not in _KEYWORDS:
        return label
    return _render_value(label)


def _render_clause(clause: Clause) -> str:
    return " AND ".join(f"{p.attribute} {p.operator} {_render_value(p.value)}" for p in clause.predicates)


def render_rules(frs: FeedbackRuleSet) -> str:
    """Rule set back to DSL text; groups flatten to their member rules."""
    lines = []
    for unit in frs.rules:
        for rule in unit.members:
            parts = [f"IF {_render_clause(rule.clause)}"]
            parts.extend(f"UNLESS {_render_clause(e)}" for e in rule.exclusions)
            dist = rule.distribution
            if dist.is_deterministic:
                parts.append(f'THEN class = {_render_value(dist.single_label())}')
            else:
                body = ", ".join(f"{_render_label(lab)}: {repr(p)}" for lab, p in dist.weights)
                parts.append(f"THEN class ~ {{{body}}}")
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def load_rules(path, schema: Schema) -> FeedbackRuleSet:
    from pathlib import Path

    return parse_rules(Path(path).read_text(encoding="utf-8"), schema)
