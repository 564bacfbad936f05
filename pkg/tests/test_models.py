import numpy as np
import pytest

from ruleaug.data import Attribute, Dataset, Schema
from ruleaug.errors import ConfigError, ExecutionError
from ruleaug.models import (
    ConstantModel,
    TrainerSpec,
    load_model,
    softmax_loss_and_grad,
    train,
)

from oracles import central_difference_gradient


def _blobs(numeric_schema, n=60, gap=4.0, seed=0):
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for i in range(n):
        label = "a" if i % 2 == 0 else "b"
        cx = -gap / 2 if label == "a" else gap / 2
        rows.append((float(cx + rng.normal(0, 0.5)), float(rng.normal(0, 0.5))))
        labels.append(label)
    return Dataset(numeric_schema, rows, labels)


def test_trainer_spec_validates_kind_and_keys():
    with pytest.raises(ConfigError):
        TrainerSpec("gradient_boosting")
    with pytest.raises(ConfigError):
        TrainerSpec("decision_tree", {"depth": 3})
    assert TrainerSpec("decision_tree", {"max_depth": 2}).resolved()["max_depth"] == 2


def test_logistic_regression_separates_blobs(numeric_schema):
    d = _blobs(numeric_schema)
    model = train(TrainerSpec("logistic_regression"), d, seed=0)
    pred = model.predict_codes(d)
    _, _, truth = d.encoded()
    assert (pred == truth).mean() >= 0.95


def test_training_is_seed_deterministic(numeric_schema):
    d = _blobs(numeric_schema, seed=4)
    probes = _blobs(numeric_schema, n=100, seed=9)
    for kind in ("logistic_regression", "decision_tree", "random_forest_lite"):
        m1 = train(TrainerSpec(kind), d, seed=123)
        m2 = train(TrainerSpec(kind), d, seed=123)
        assert np.array_equal(m1.predict_codes(probes), m2.predict_codes(probes))


def test_single_class_dataset_yields_constant_model(numeric_schema):
    d = Dataset(numeric_schema, [(0.0, 0.0), (5.0, 5.0)], ["b", "b"])
    model = train(TrainerSpec("logistic_regression"), d, seed=0)
    assert isinstance(model, ConstantModel)
    assert model.predict((100.0, -3.0)) == "b"


def test_empty_dataset_is_rejected(numeric_schema):
    with pytest.raises(ExecutionError):
        train(TrainerSpec("decision_tree"), Dataset(numeric_schema, [], []), seed=0)


def test_predict_far_from_boundary(numeric_schema):
    d = _blobs(numeric_schema, gap=6.0)
    model = train(TrainerSpec("logistic_regression"), d, seed=0)
    assert model.predict((-30.0, 0.0)) == "a"
    assert model.predict((30.0, 0.0)) == "b"


def test_forest_with_single_full_bag_tree_equals_the_tree(numeric_schema):
    d = _blobs(numeric_schema, seed=2)
    tree = train(TrainerSpec("decision_tree", {"max_depth": 3}), d, seed=7)
    # bag fraction 1.0 still bootstraps; compare via a deep single tree on the
    # same rows instead: a one-tree forest must defer entirely to its tree
    forest = train(
        TrainerSpec("random_forest_lite", {"n_trees": 1, "max_depth": 3, "bag_fraction": 1.0}),
        d,
        seed=7,
    )
    assert len(forest.trees) == 1
    probes = _blobs(numeric_schema, n=50, seed=11)
    from ruleaug.models import TreeModel

    lone = TreeModel(d.schema, forest.trees[0])
    assert np.array_equal(forest.predict_codes(probes), lone.predict_codes(probes))


def test_forest_seed_changes_bootstrap(numeric_schema):
    d = _blobs(numeric_schema, gap=1.0, seed=3)
    m1 = train(TrainerSpec("random_forest_lite", {"n_trees": 5}), d, seed=1)
    m2 = train(TrainerSpec("random_forest_lite", {"n_trees": 5}), d, seed=2)
    assert m1.trees != m2.trees


def test_categorical_encoding_follows_schema_order():
    schema = Schema(
        (Attribute("c", "categorical", ("p", "q", "r")),),
        "class",
        ("a", "b"),
    )
    # data order deliberately reversed relative to schema categories
    d = Dataset(schema, [("r",), ("q",), ("p",), ("r",)], ["a", "a", "b", "a"])
    model = train(TrainerSpec("logistic_regression"), d, seed=0)
    assert model.predict(("r",)) == "a"
    assert model.predict(("p",)) == "b"


def test_tree_handles_mixed_attributes(mixed_schema, mixed_dataset):
    model = train(TrainerSpec("decision_tree", {"max_depth": 2}), mixed_dataset, seed=0)
    pred = model.predict_codes(mixed_dataset)
    _, _, truth = mixed_dataset.encoded()
    assert (pred == truth).mean() >= 0.8


def test_model_save_load_round_trip(tmp_path, numeric_schema):
    d = _blobs(numeric_schema)
    probes = _blobs(numeric_schema, n=40, seed=5)
    for kind in ("logistic_regression", "decision_tree", "random_forest_lite"):
        model = train(TrainerSpec(kind), d, seed=3)
        path = tmp_path / f"{kind}.json"
        model.save(path)
        back = load_model(path)
        assert np.array_equal(model.predict_codes(probes), back.predict_codes(probes))


def test_schema_mismatch_is_detected(numeric_schema, mixed_dataset):
    d = _blobs(numeric_schema)
    model = train(TrainerSpec("decision_tree"), d, seed=0)
    with pytest.raises(ExecutionError, match="schema"):
        model.predict_codes(mixed_dataset)


@pytest.mark.parametrize("seed", range(20))
def test_softmax_gradient_matches_central_differences(seed):
    """Analytic gradient vs central finite differences, relative error <= 1e-5."""
    rng = np.random.default_rng(seed)
    n, dim, classes = int(rng.integers(5, 20)), int(rng.integers(2, 6)), int(rng.integers(2, 5))
    X = rng.normal(size=(n, dim))
    Y = np.zeros((n, classes))
    Y[np.arange(n), rng.integers(0, classes, size=n)] = 1.0
    W = rng.normal(scale=0.5, size=(dim, classes))

    _, analytic = softmax_loss_and_grad(W, X, Y)
    numeric = central_difference_gradient(lambda w: softmax_loss_and_grad(w, X, Y)[0], W)
    denom = max(np.linalg.norm(numeric), 1e-12)
    assert np.linalg.norm(analytic - numeric) / denom <= 1e-5
