"""NumPy fallback for the hot kernels.

Float accumulation walks attributes in declaration order, matching the
compiled backend element-for-element so both produce bit-identical
distances and therefore identical neighbor orderings.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

OP_EQ, OP_NE, OP_LT, OP_LE, OP_GT, OP_GE = range(6)


def clause_mask(num, cat, num_pred, cat_pred):
    """Boolean row mask for a conjunction of encoded predicates.

    num_pred: float64 (m, 3) rows of (column, op, value); cat_pred: int32
    (m, 3) rows of (column, op, category code). Ops limited to EQ/NE for
    categorical columns.
    """
    n = num.shape[0]
    mask = np.ones(n, dtype=bool)
    for col, op, val in num_pred:
        c = num[:, int(col)]
        op = int(op)
        if op == OP_EQ:
            mask &= c == val
        elif op == OP_NE:
            mask &= c != val
        elif op == OP_LT:
            mask &= c < val
        elif op == OP_LE:
            mask &= c <= val
        elif op == OP_GT:
            mask &= c > val
        else:
            mask &= c >= val
    for col, op, code in cat_pred:
        c = cat[:, int(col)]
        if int(op) == OP_EQ:
            mask &= c == code
        else:
            mask &= c != code
    return mask


def _sq_dist_to_base(num, cat, inv_range, rows, base_num, base_cat):
    d2 = np.zeros(len(rows), dtype=np.float64)
    for j in range(num.shape[1]):
        diff = (num[rows, j] - base_num[j]) * inv_range[j]
        d2 += diff * diff
    for j in range(cat.shape[1]):
        d2 += (cat[rows, j] != base_cat[j]).astype(np.float64)
    return d2


def point_distances(num, cat, inv_range, member_idx, base_idx):
    """Distances from one row to a subset of rows under the mixed metric."""
    member_idx = np.asarray(member_idx, dtype=np.int64)
    d2 = _sq_dist_to_base(num, cat, inv_range, member_idx, num[base_idx], cat[base_idx])
    return np.sqrt(d2)


def knn_indices(num, cat, inv_range, k):
    """For every row, the k nearest other rows; ties broken by lower index."""
    n = num.shape[0]
    if k > n - 1:
        raise ValueError(f"k={k} exceeds available neighbors ({n - 1})")
    out = np.empty((n, k), dtype=np.int64)
    all_rows = np.arange(n, dtype=np.int64)
    for i in range(n):
        d2 = _sq_dist_to_base(num, cat, inv_range, all_rows, num[i], cat[i])
        order = np.argsort(d2, kind="stable")
        picked = order[order != i][:k]
        out[i] = picked
    return out
