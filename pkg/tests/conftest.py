import numpy as np
import pytest

from ruleaug.data import Attribute, Dataset, Schema


@pytest.fixture
def mixed_schema() -> Schema:
    return Schema(
        attributes=(
            Attribute("age", "numeric"),
            Attribute("income", "numeric"),
            Attribute("status", "categorical", ("single", "married", "widowed")),
        ),
        label_name="class",
        labels=("approve", "deny"),
    )


@pytest.fixture
def numeric_schema() -> Schema:
    return Schema(
        attributes=(Attribute("x", "numeric"), Attribute("y", "numeric")),
        label_name="class",
        labels=("a", "b"),
    )


@pytest.fixture
def mixed_dataset(mixed_schema) -> Dataset:
    rows = [
        (25.0, 40.0, "single"),
        (32.0, 55.0, "married"),
        (19.0, 18.0, "single"),
        (45.0, 90.0, "widowed"),
        (28.0, 35.0, "single"),
        (51.0, 120.0, "married"),
    ]
    labels = ["approve", "deny", "deny", "deny", "approve", "deny"]
    return Dataset(mixed_schema, rows, labels)


def random_mixed_dataset(rng: np.random.Generator, n: int, schema: Schema) -> Dataset:
    """Rows drawn uniformly over a small discrete grid, for oracle tests."""
    rows = []
    labels = []
    for _ in range(n):
        values = []
        for attr in schema.attributes:
            if attr.kind == "numeric":
                values.append(float(rng.integers(0, 10)))
            else:
                values.append(attr.categories[rng.integers(len(attr.categories))])
        rows.append(tuple(values))
        labels.append(schema.labels[rng.integers(len(schema.labels))])
    return Dataset(schema, rows, labels)
