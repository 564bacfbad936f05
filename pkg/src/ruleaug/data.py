"""Typed tabular datasets: schema sidecars, CSV ingestion, row modification
strategies and the coverage-fraction train/test splitter."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatasetError, SchemaError

NUMERIC = "numeric"
CATEGORICAL = "categorical"

PROVENANCE_COLUMN = "_provenance"


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == CATEGORICAL and not self.categories:
            raise SchemaError(f"categorical attribute {self.name!r} lists no categories")
        if self.kind == NUMERIC and self.categories:
            raise SchemaError(f"numeric attribute {self.name!r} must not list categories")


@dataclass(frozen=True)
class Schema:
    """Ordered attribute declarations plus the label column contract."""

    attributes: tuple[Attribute, ...]
    label_name: str
    labels: tuple[str, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        if self.label_name in names:
            raise SchemaError(f"label column {self.label_name!r} collides with an attribute")
        if len(self.labels) < 2:
            raise SchemaError("schema must declare at least two class labels")
        if len(set(self.labels)) != len(self.labels):
            raise SchemaError("class labels must be unique")

    @property
    def attribute_index(self) -> dict[str, int]:
        return {a.name: i for i, a in enumerate(self.attributes)}

    @property
    def label_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.labels)}

    def attribute(self, name: str) -> Attribute:
        try:
            return self.attributes[self.attribute_index[name]]
        except KeyError:
            raise SchemaError(f"unknown attribute {name!r}") from None

    def numeric_positions(self) -> list[int]:
        return [i for i, a in enumerate(self.attributes) if a.kind == NUMERIC]

    def categorical_positions(self) -> list[int]:
        return [i for i, a in enumerate(self.attributes) if a.kind == CATEGORICAL]

    def to_json_dict(self) -> dict:
        attrs = []
        for a in self.attributes:
            entry: dict = {"name": a.name, "kind": a.kind}
            if a.kind == CATEGORICAL:
                entry["categories"] = list(a.categories)
            attrs.append(entry)
        return {"attributes": attrs, "label": {"name": self.label_name, "classes": list(self.labels)}}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Schema":
        try:
            attrs = tuple(
                Attribute(
                    name=str(a["name"]),
                    kind=str(a["kind"]),
                    categories=tuple(str(c) for c in a.get("categories", ())),
                )
                for a in obj["attributes"]
            )
            label = obj["label"]
            return cls(attrs, str(label["name"]), tuple(str(c) for c in label["classes"]))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed schema document: {exc}") from exc

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def load_schema(path: str | Path) -> Schema:
    """Read a schema sidecar (JSON) from disk."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    return Schema.from_json_dict(obj)


def save_schema(schema: Schema, path: str | Path) -> None:
    Path(path).write_text(json.dumps(schema.to_json_dict(), indent=2) + "\n", encoding="utf-8")


ORIGINAL = "original"
SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class Provenance:
    kind: str = ORIGINAL
    rule_id: str | None = None
    base_index: int | None = None
    neighbor_index: int | None = None

    def render(self) -> str:
        if self.kind == ORIGINAL:
            return ORIGINAL
        return f"{SYNTHETIC}:{self.rule_id}:{self.base_index}:{self.neighbor_index}"

    @classmethod
    def parse(cls, text: str) -> "Provenance":
        if text == ORIGINAL:
            return cls()
        parts = text.split(":")
        if len(parts) != 4 or parts[0] != SYNTHETIC:
            raise DatasetError(f"malformed provenance tag {text!r}")
        return cls(SYNTHETIC, parts[1], int(parts[2]), int(parts[3]))


ORIGINAL_ROW = Provenance()


@dataclass(frozen=True)
class Instance:
    """One row: attribute values in schema order plus an optional label."""

    values: tuple
    label: str | None = None


def validate_value(attr: Attribute, token, *, where: str = ""):
    """Coerce and validate one raw value for an attribute; returns float or str."""
    if attr.kind == NUMERIC:
        try:
            v = float(token)
        except (TypeError, ValueError):
            raise DatasetError(f"{where}non-numeric value {token!r} in numeric column {attr.name!r}") from None
        if not math.isfinite(v):
            raise DatasetError(f"{where}non-finite value in numeric column {attr.name!r}")
        return v
    token = str(token)
    if token not in attr.categories:
        raise DatasetError(f"{where}unknown category {token!r} for attribute {attr.name!r}")
    return token


class Dataset:
    """An immutable, schema-conforming table of rows.

    Rows keep their insertion order; each carries a provenance tag so
    synthetic rows remain countable after save/load round trips. Encoded
    numeric/categorical matrices are built lazily and cached for the
    distance and coverage kernels.
    """

    __slots__ = ("schema", "rows", "labels", "provenance", "_encoded")

    def __init__(self, schema: Schema, rows, labels, provenance=None):
        rows = tuple(tuple(r) for r in rows)
        labels = tuple(labels)
        if provenance is None:
            provenance = tuple(ORIGINAL_ROW for _ in rows)
        else:
            provenance = tuple(provenance)
        if not (len(rows) == len(labels) == len(provenance)):
            raise DatasetError("rows, labels and provenance must have equal length")
        label_set = set(schema.labels)
        width = len(schema.attributes)
        for i, (row, lab) in enumerate(zip(rows, labels)):
            if len(row) != width:
                raise DatasetError(f"row {i}: expected {width} values, got {len(row)}")
            if lab not in label_set:
                raise DatasetError(f"row {i}: unknown class label {lab!r}")
        self.schema = schema
        self.rows = rows
        self.labels = labels
        self.provenance = provenance
        self._encoded = None

    def __len__(self) -> int:
        return len(self.rows)

    def instance(self, i: int) -> Instance:
        return Instance(self.rows[i], self.labels[i])

    def encoded(self):
        """(numeric matrix, categorical code matrix, label codes) as numpy arrays.

        Categorical codes follow schema declaration order, label codes the
        schema label order; both are stable across processes.
        """
        if self._encoded is None:
            schema = self.schema
            num_pos = schema.numeric_positions()
            cat_pos = schema.categorical_positions()
            n = len(self.rows)
            num = np.empty((n, len(num_pos)), dtype=np.float64)
            cat = np.empty((n, len(cat_pos)), dtype=np.int32)
            cat_maps = [
                {c: j for j, c in enumerate(schema.attributes[p].categories)} for p in cat_pos
            ]
            for i, row in enumerate(self.rows):
                for j, p in enumerate(num_pos):
                    num[i, j] = row[p]
                for j, p in enumerate(cat_pos):
                    cat[i, j] = cat_maps[j][row[p]]
            label_map = schema.label_index
            label_codes = np.fromiter(
                (label_map[lab] for lab in self.labels), dtype=np.int32, count=n
            )
            self._encoded = (num, cat, label_codes)
        return self._encoded

    def numeric_ranges(self):
        """Per numeric attribute (min, max) over current rows; (0, 0) when empty."""
        num, _, _ = self.encoded()
        if num.shape[0] == 0:
            return np.zeros(num.shape[1]), np.zeros(num.shape[1])
        return num.min(axis=0), num.max(axis=0)

    def with_rows(self, rows, labels, provenance) -> "Dataset":
        """New dataset with extra rows appended."""
        return Dataset(
            self.schema,
            self.rows + tuple(rows),
            self.labels + tuple(labels),
            self.provenance + tuple(provenance),
        )

    def subset(self, indices) -> "Dataset":
        return Dataset(
            self.schema,
            [self.rows[i] for i in indices],
            [self.labels[i] for i in indices],
            [self.provenance[i] for i in indices],
        )

    def synthetic_count(self) -> int:
        return sum(1 for p in self.provenance if p.kind == SYNTHETIC)


def load_dataset(csv_path: str | Path, schema_path: str | Path) -> Dataset:
    """Parse a CSV against its schema sidecar, validating every cell.

    The header must contain every schema attribute plus the label column
    (any column order); a trailing provenance column written by
    ``save_dataset`` is recognized and restored.
    """
    schema = load_schema(schema_path)
    return load_dataset_with_schema(csv_path, schema)


def load_dataset_with_schema(csv_path: str | Path, schema: Schema) -> Dataset:
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{csv_path}: missing header row") from None
        positions = {name: i for i, name in enumerate(header)}
        needed = [a.name for a in schema.attributes] + [schema.label_name]
        for name in needed:
            if name not in positions:
                raise DatasetError(f"{csv_path}: missing column {name!r}")
        attr_cols = [positions[a.name] for a in schema.attributes]
        label_col = positions[schema.label_name]
        prov_col = positions.get(PROVENANCE_COLUMN)

        rows, labels, provenance = [], [], []
        label_set = set(schema.labels)
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) < len(header):
                raise DatasetError(f"{csv_path}:{lineno}: expected {len(header)} fields, got {len(record)}")
            where = f"{csv_path}:{lineno}: "
            values = tuple(
                validate_value(attr, record[col], where=where)
                for attr, col in zip(schema.attributes, attr_cols)
            )
            label = record[label_col]
            if label not in label_set:
                raise DatasetError(f"{where}unknown class label {label!r}")
            rows.append(values)
            labels.append(label)
            provenance.append(Provenance.parse(record[prov_col]) if prov_col is not None else ORIGINAL_ROW)
    return Dataset(schema, rows, labels, provenance)


def save_dataset(d: Dataset, csv_path: str | Path) -> None:
    """Write RFC-4180 CSV with a trailing provenance column."""
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([a.name for a in d.schema.attributes] + [d.schema.label_name, PROVENANCE_COLUMN])
        for row, label, prov in zip(d.rows, d.labels, d.provenance):
            rendered = [repr(v) if isinstance(v, float) else v for v in row]
            writer.writerow(rendered + [label, prov.render()])


STRATEGIES = ("none", "relabel", "drop")


def apply_modification(d: Dataset, frs, strategy: str, rng: np.random.Generator | None = None) -> Dataset:
    """Pre-treat rule-covered rows: keep, relabel to the rule's class, or drop.

    Requires a conflict-free rule set so each covered row has a single
    covering rule. Probabilistic rules relabel by sampling the rule's label
    distribution, which needs ``rng``.
    """
    if strategy not in STRATEGIES:
        raise DatasetError(f"unknown modification strategy {strategy!r}")
    if strategy == "none":
        return d

    from .rules import coverage  # avoid import cycle at module load

    covering: dict[int, object] = {}
    for rule in frs.rules:
        for i in coverage(rule, d):
            covering[i] = rule

    if strategy == "relabel":
        labels = list(d.labels)
        for i, rule in covering.items():
            dist = rule.distribution
            if dist.is_deterministic:
                labels[i] = dist.single_label()
            else:
                if rng is None:
                    raise DatasetError("relabel with a probabilistic rule requires an RNG")
                labels[i] = dist.sample(rng)
        return Dataset(d.schema, d.rows, labels, d.provenance)

    keep = [i for i in range(len(d)) if i not in covering]
    return d.subset(keep)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_with_tcf(
    d: Dataset,
    frs,
    tcf: float,
    outside_train_frac: float,
    rng: np.random.Generator,
) -> tuple[Dataset, Dataset]:
    """Partition rows into train/test, placing round(tcf * |covered|) covered
    rows in train and splitting outside-coverage rows by ``outside_train_frac``.
    """
    if not 0.0 <= tcf <= 1.0:
        raise DatasetError("tcf must lie in [0, 1]")
    if not 0.0 <= outside_train_frac <= 1.0:
        raise DatasetError("outside_train_frac must lie in [0, 1]")

    from .rules import coverage

    covered = sorted(coverage(frs, d))
    outside = sorted(set(range(len(d))) - set(covered))

    n_cov_train = _round_half_up(tcf * len(covered))
    n_out_train = _round_half_up(outside_train_frac * len(outside))

    cov_train = set(rng.choice(len(covered), size=n_cov_train, replace=False)) if covered else set()
    out_train = set(rng.choice(len(outside), size=n_out_train, replace=False)) if outside else set()

    train_idx = sorted(
        [covered[i] for i in cov_train] + [outside[i] for i in out_train]
    )
    test_idx = sorted(set(range(len(d))) - set(train_idx))
    return d.subset(train_idx), d.subset(test_idx)
