import numpy as np
import pytest

from ruleaug.data import (
    Attribute,
    Dataset,
    Schema,
    apply_modification,
    load_dataset,
    save_dataset,
    save_schema,
    split_with_tcf,
)
from ruleaug.errors import DatasetError, SchemaError
from ruleaug.rules import coverage, parse_rules


def test_schema_rejects_duplicate_attribute_names():
    with pytest.raises(SchemaError):
        Schema((Attribute("x", "numeric"), Attribute("x", "numeric")), "class", ("a", "b"))


def test_schema_requires_two_labels():
    with pytest.raises(SchemaError):
        Schema((Attribute("x", "numeric"),), "class", ("a",))


def test_categorical_attribute_requires_categories():
    with pytest.raises(SchemaError):
        Attribute("color", "categorical")


def test_load_three_row_csv(tmp_path, numeric_schema):
    save_schema(numeric_schema, tmp_path / "schema.json")
    (tmp_path / "data.csv").write_text("x,y,class\n1,2,a\n3,4,b\n5,6,a\n")
    d = load_dataset(tmp_path / "data.csv", tmp_path / "schema.json")
    assert len(d) == 3
    assert d.rows[1] == (3.0, 4.0)
    assert all(p.kind == "original" for p in d.provenance)


def test_load_reports_unknown_category_with_row(tmp_path, mixed_schema):
    save_schema(mixed_schema, tmp_path / "schema.json")
    (tmp_path / "data.csv").write_text(
        "age,income,status,class\n30,50,single,approve\n31,60,blu,deny\n"
    )
    with pytest.raises(DatasetError, match=r"data.csv:3.*'blu'.*'status'"):
        load_dataset(tmp_path / "data.csv", tmp_path / "schema.json")


def test_load_reports_non_numeric_text(tmp_path, numeric_schema):
    save_schema(numeric_schema, tmp_path / "schema.json")
    (tmp_path / "data.csv").write_text("x,y,class\noops,2,a\n")
    with pytest.raises(DatasetError, match=r"data.csv:2.*'x'"):
        load_dataset(tmp_path / "data.csv", tmp_path / "schema.json")


def test_load_reports_missing_column(tmp_path, numeric_schema):
    save_schema(numeric_schema, tmp_path / "schema.json")
    (tmp_path / "data.csv").write_text("x,class\n1,a\n")
    with pytest.raises(DatasetError, match="missing column 'y'"):
        load_dataset(tmp_path / "data.csv", tmp_path / "schema.json")


def test_empty_csv_body_is_a_valid_dataset(tmp_path, numeric_schema):
    save_schema(numeric_schema, tmp_path / "schema.json")
    (tmp_path / "data.csv").write_text("x,y,class\n")
    d = load_dataset(tmp_path / "data.csv", tmp_path / "schema.json")
    assert len(d) == 0


def test_save_load_round_trip_keeps_provenance(tmp_path, mixed_dataset):
    from ruleaug.data import Provenance

    d = mixed_dataset.with_rows(
        [(22.0, 30.0, "single")], ["approve"], [Provenance("synthetic", "r1", 0, 4)]
    )
    save_schema(d.schema, tmp_path / "schema.json")
    save_dataset(d, tmp_path / "out.csv")
    back = load_dataset(tmp_path / "out.csv", tmp_path / "schema.json")
    assert back.rows == d.rows
    assert back.labels == d.labels
    assert back.provenance == d.provenance
    assert back.synthetic_count() == 1


RULES = 'IF age < 29.0 AND status = "single" THEN class = "approve"\n'


def test_relabel_flips_covered_disagreeing_rows(mixed_dataset):
    frs = parse_rules(RULES, mixed_dataset.schema)
    out = apply_modification(mixed_dataset, frs, "relabel")
    # rows 0, 2, 4 are covered; row 2 had label deny
    assert out.labels[2] == "approve"
    assert out.labels[0] == "approve"  # already agreeing, unchanged
    assert out.labels[1] == "deny"  # uncovered, untouched
    assert len(out) == len(mixed_dataset)


def test_drop_removes_covered_rows(mixed_dataset):
    frs = parse_rules(RULES, mixed_dataset.schema)
    out = apply_modification(mixed_dataset, frs, "drop")
    assert len(out) == 3
    assert all(row[2] != "single" or row[0] >= 29.0 for row in out.rows)


def test_none_strategy_is_identity(mixed_dataset):
    frs = parse_rules(RULES, mixed_dataset.schema)
    out = apply_modification(mixed_dataset, frs, "none")
    assert out.rows == mixed_dataset.rows
    assert out.labels == mixed_dataset.labels


def test_probabilistic_relabel_requires_rng(mixed_dataset):
    frs = parse_rules(
        "IF age < 29.0 THEN class ~ {approve: 0.5, deny: 0.5}\n", mixed_dataset.schema
    )
    with pytest.raises(DatasetError, match="RNG"):
        apply_modification(mixed_dataset, frs, "relabel")
    out = apply_modification(mixed_dataset, frs, "relabel", np.random.default_rng(0))
    assert len(out) == len(mixed_dataset)


def _blob_dataset(n=40, seed=0):
    from ruleaug.harness import make_blob_benchmark

    d, text = make_blob_benchmark(n, seed=seed)
    return d, parse_rules(text, d.schema)


def test_split_tcf_zero_puts_no_covered_rows_in_train():
    d, frs = _blob_dataset()
    train, test = split_with_tcf(d, frs, 0.0, 0.8, np.random.default_rng(1))
    assert len(coverage(frs, train)) == 0
    assert len(train) + len(test) == len(d)


def test_split_tcf_one_with_full_outside_fraction_takes_everything():
    d, frs = _blob_dataset()
    train, test = split_with_tcf(d, frs, 1.0, 1.0, np.random.default_rng(1))
    assert len(train) == len(d)
    assert len(test) == 0


def test_split_covered_count_is_exact():
    d, frs = _blob_dataset(n=120, seed=3)
    total_cov = len(coverage(frs, d))
    train, _ = split_with_tcf(d, frs, 0.2, 0.8, np.random.default_rng(5))
    assert len(coverage(frs, train)) == round(0.2 * total_cov)


def test_split_rounds_half_up(numeric_schema):
    # 5 covered rows at tcf=0.5 -> round-half-up gives 3 in train
    rows = [(float(i), 0.0) for i in range(10)]
    d = Dataset(numeric_schema, rows, ["a"] * 10)
    frs = parse_rules('IF x < 5.0 THEN class = "a"\n', numeric_schema)
    assert len(coverage(frs, d)) == 5
    train, _ = split_with_tcf(d, frs, 0.5, 0.0, np.random.default_rng(0))
    assert len(coverage(frs, train)) == 3


def test_split_is_a_partition_and_seed_deterministic():
    d, frs = _blob_dataset(n=80, seed=2)
    t1, s1 = split_with_tcf(d, frs, 0.3, 0.8, np.random.default_rng(9))
    t2, s2 = split_with_tcf(d, frs, 0.3, 0.8, np.random.default_rng(9))
    assert t1.rows == t2.rows and s1.rows == s2.rows
    combined = sorted(t1.rows + s1.rows)
    assert combined == sorted(d.rows)
