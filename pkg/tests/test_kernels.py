"""Backend equivalence: the compiled kernels must return bit-identical
results to the NumPy fallback."""

import numpy as np
import pytest

from ruleaug._kernels import available_backends, backend_name, pure

BACKENDS = available_backends()

needs_compiled = pytest.mark.skipif(
    "compiled" not in BACKENDS, reason="compiled kernels not built"
)


def _random_problem(seed, rows=60, num_cols=3, cat_cols=2):
    rng = np.random.default_rng(seed)
    num = np.ascontiguousarray(rng.normal(size=(rows, num_cols)))
    cat = np.ascontiguousarray(rng.integers(0, 4, size=(rows, cat_cols), dtype=np.int32))
    span = num.max(axis=0) - num.min(axis=0)
    inv_range = np.where(span > 0, 1.0 / np.where(span > 0, span, 1.0), 0.0)
    return num, cat, inv_range


def test_backend_name_reports_selection():
    assert backend_name() in ("pure", "compiled")


@needs_compiled
@pytest.mark.parametrize("seed", range(5))
def test_clause_mask_backends_agree(seed):
    num, cat, _ = _random_problem(seed)
    rng = np.random.default_rng(seed + 100)
    num_pred = np.array(
        [[rng.integers(num.shape[1]), rng.integers(6), rng.normal()] for _ in range(3)],
        dtype=np.float64,
    )
    cat_pred = np.array(
        [[rng.integers(cat.shape[1]), rng.integers(2), rng.integers(4)] for _ in range(2)],
        dtype=np.int32,
    )
    a = np.asarray(pure.clause_mask(num, cat, num_pred, cat_pred))
    b = np.asarray(BACKENDS["compiled"].clause_mask(num, cat, num_pred, cat_pred))
    assert np.array_equal(a, b)


@needs_compiled
@pytest.mark.parametrize("seed", range(5))
def test_point_distances_backends_bit_identical(seed):
    num, cat, inv_range = _random_problem(seed)
    members = np.arange(num.shape[0], dtype=np.int64)
    a = pure.point_distances(num, cat, inv_range, members, 3)
    b = BACKENDS["compiled"].point_distances(num, cat, inv_range, members, 3)
    assert np.array_equal(a, b)  # bitwise, not approximate


@needs_compiled
@pytest.mark.parametrize("seed", range(5))
def test_knn_backends_identical(seed):
    num, cat, inv_range = _random_problem(seed, rows=40)
    a = pure.knn_indices(num, cat, inv_range, 7)
    b = BACKENDS["compiled"].knn_indices(num, cat, inv_range, 7)
    assert np.array_equal(a, b)


def test_clause_mask_matches_python_eval():
    num, cat, _ = _random_problem(11)
    num_pred = np.array([[0, 4, 0.1], [1, 3, 0.4]], dtype=np.float64)  # x0 > .1, x1 <= .4
    cat_pred = np.array([[0, 1, 2]], dtype=np.int32)  # c0 != 2
    mask = np.asarray(pure.clause_mask(num, cat, num_pred, cat_pred))
    for i in range(num.shape[0]):
        expected = num[i, 0] > 0.1 and num[i, 1] <= 0.4 and cat[i, 0] != 2
        assert mask[i] == expected


def test_knn_excludes_self_and_breaks_ties_by_index():
    # three identical points: each one's neighbors are the other two, low index first
    num = np.zeros((3, 1))
    cat = np.zeros((3, 0), dtype=np.int32)
    inv = np.ones(1)
    nbrs = pure.knn_indices(num, cat, inv, 2)
    assert nbrs.tolist() == [[1, 2], [0, 2], [0, 1]]


def test_knn_rejects_oversized_k():
    num, cat, inv_range = _random_problem(0, rows=5)
    with pytest.raises(ValueError):
        pure.knn_indices(num, cat, inv_range, 5)
