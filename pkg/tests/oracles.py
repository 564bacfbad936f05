"""Independent reference implementations used as ground truth in tests.

Everything here is deliberately brute force and avoids the library's
kernel/vectorized code paths."""

from itertools import combinations

import numpy as np


def scan_clause_coverage(clause, d) -> set[int]:
    """Row-by-row clause evaluation via Predicate.holds only."""
    idx = d.schema.attribute_index
    out = set()
    for i, row in enumerate(d.rows):
        if all(p.holds(row[idx[p.attribute]]) for p in clause.predicates):
            out.add(i)
    return out


def coverage_of_kept(predicates, kept_positions, d) -> int:
    idx = d.schema.attribute_index
    kept = [predicates[p] for p in kept_positions]
    count = 0
    for row in d.rows:
        if all(p.holds(row[idx[p.attribute]]) for p in kept):
            count += 1
    return count


def best_single_deletion(predicates, current_positions, d):
    """Max coverage over all single-condition deletions from the current
    clause, with the later-position tie rule. Returns (position, coverage)."""
    best_pos, best_cov = None, -1
    for pos in range(len(current_positions)):
        kept = current_positions[:pos] + current_positions[pos + 1 :]
        cov = coverage_of_kept(predicates, kept, d)
        if cov >= best_cov:
            best_pos, best_cov = pos, cov
    return best_pos, best_cov


def min_deletions_for_support(predicates, d, min_support) -> int | None:
    """Smallest number of deleted conditions whose remainder covers at least
    min_support rows; enumerated exhaustively over all subsets."""
    all_positions = tuple(range(len(predicates)))
    for deleted in range(len(predicates) + 1):
        for drop in combinations(all_positions, deleted):
            kept = tuple(p for p in all_positions if p not in drop)
            cov = coverage_of_kept(predicates, kept, d) if kept else len(d)
            if cov >= min_support:
                return deleted
    return None


def brute_force_selection_value(bps_weights, lowers, uppers) -> float:
    """Exhaustive optimum of the per-rule weighted subset selection.

    bps_weights: per rule, the weight list of its population members.
    Enumerates every admissible subset per rule; populations are disjoint so
    the total optimum is the per-rule sum.
    """
    total = 0.0
    for weights, lower, upper in zip(bps_weights, lowers, uppers):
        n = len(weights)
        if n == 0:
            continue
        best = None
        warr = np.asarray(weights, dtype=float)
        for size in range(lower, min(upper, n) + 1):
            combos = np.array(list(combinations(range(n), size)), dtype=int)
            if combos.size == 0:
                continue
            sums = warr[combos].sum(axis=1)
            cand = float(sums.max())
            if best is None or cand > best:
                best = cand
        if best is None:
            raise AssertionError("no admissible subset; bounds are infeasible")
        total += best
    return total


def central_difference_gradient(loss_fn, W, h=1e-6) -> np.ndarray:
    grad = np.zeros_like(W)
    it = np.nditer(W, flags=["multi_index"])
    while not it.finished:
        ix = it.multi_index
        Wp = W.copy()
        Wp[ix] += h
        Wm = W.copy()
        Wm[ix] -= h
        grad[ix] = (loss_fn(Wp) - loss_fn(Wm)) / (2 * h)
        it.iternext()
    return grad
