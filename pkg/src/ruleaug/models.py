"""Black-box train/predict contract plus the built-in deterministic
learners: multinomial logistic regression, a CART decision tree, and a
bagged forest of such trees. No external ML stack is involved."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset, Schema
from .errors import ConfigError, ExecutionError

LOGISTIC_REGRESSION = "logistic_regression"
RANDOM_FOREST = "random_forest_lite"
DECISION_TREE = "decision_tree"

DEFAULT_HYPERPARAMETERS = {
    LOGISTIC_REGRESSION: {"learning_rate": 0.5, "iterations": 500},
    RANDOM_FOREST: {"n_trees": 25, "max_depth": 3, "bag_fraction": 1.0},
    DECISION_TREE: {"max_depth": 3},
}


@dataclass(frozen=True)
class TrainerSpec:
    kind: str
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in DEFAULT_HYPERPARAMETERS:
            raise ConfigError(f"unknown trainer kind {self.kind!r}")
        allowed = DEFAULT_HYPERPARAMETERS[self.kind]
        for key in self.hyperparameters:
            if key not in allowed:
                raise ConfigError(f"unknown hyperparameter {key!r} for {self.kind}")

    def resolved(self) -> dict:
        merged = dict(DEFAULT_HYPERPARAMETERS[self.kind])
        merged.update(self.hyperparameters)
        if any(v <= 0 for v in merged.values()):
            raise ConfigError(f"hyperparameters must be positive: {merged}")
        return merged


# -- encoding ----------------------------------------------------------------

class _Encoder:
    """Numeric columns (optionally standardized) followed by one-hot columns
    in schema declaration order, so the layout never depends on row order."""

    def __init__(self, schema: Schema, standardize: bool):
        self.schema = schema
        self.standardize = standardize
        self.means = None
        self.stds = None

    def fit(self, num: np.ndarray) -> "_Encoder":
        if self.standardize and num.shape[1]:
            self.means = num.mean(axis=0)
            stds = num.std(axis=0)
            stds[stds == 0] = 1.0
            self.stds = stds
        return self

    def matrix(self, num: np.ndarray, cat: np.ndarray) -> np.ndarray:
        parts = []
        if num.shape[1]:
            x = num
            if self.standardize:
                x = (num - self.means) / self.stds
            parts.append(x)
        for j, p in enumerate(self.schema.categorical_positions()):
            width = len(self.schema.attributes[p].categories)
            onehot = np.zeros((cat.shape[0], width))
            onehot[np.arange(cat.shape[0]), cat[:, j]] = 1.0
            parts.append(onehot)
        if not parts:
            return np.zeros((num.shape[0], 0))
        return np.concatenate(parts, axis=1)

    def state(self) -> dict:
        return {
            "standardize": self.standardize,
            "means": None if self.means is None else self.means.tolist(),
            "stds": None if self.stds is None else self.stds.tolist(),
        }

    @classmethod
    def from_state(cls, schema: Schema, state: dict) -> "_Encoder":
        enc = cls(schema, state["standardize"])
        if state["means"] is not None:
            enc.means = np.array(state["means"])
            enc.stds = np.array(state["stds"])
        return enc


def _encode_single(schema: Schema, values) -> tuple[np.ndarray, np.ndarray]:
    num = np.array(
        [[float(values[p]) for p in schema.numeric_positions()]], dtype=np.float64
    )
    cat = np.array(
        [
            [
                schema.attributes[p].categories.index(values[p])
                for p in schema.categorical_positions()
            ]
        ],
        dtype=np.int32,
    ).reshape(1, -1)
    return num, cat


# -- models ------------------------------------------------------------------

class Model:
    """A fitted classifier bound to the schema it was trained on."""

    kind = "base"

    def __init__(self, schema: Schema):
        self.schema = schema
        self.fingerprint = schema.fingerprint()

    def predict_label_codes(self, num, cat) -> np.ndarray:
        raise NotImplementedError

    def predict_codes(self, d: Dataset) -> np.ndarray:
        if d.schema.fingerprint() != self.fingerprint:
            raise ExecutionError("dataset schema does not match the fitted model")
        num, cat, _ = d.encoded()
        return self.predict_label_codes(num, cat)

    def predict(self, values) -> str:
        """Class label for one attribute tuple in schema order."""
        num, cat = _encode_single(self.schema, values)
        return self.schema.labels[int(self.predict_label_codes(num, cat)[0])]

    def state(self) -> dict:
        raise NotImplementedError

    def save(self, path: str | Path) -> None:
        blob = {
            "format": 1,
            "kind": self.kind,
            "schema": self.schema.to_json_dict(),
            "state": self.state(),
        }
        Path(path).write_text(json.dumps(blob, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> Model:
    blob = json.loads(Path(path).read_text(encoding="utf-8"))
    if blob.get("format") != 1:
        raise ExecutionError(f"unsupported model format {blob.get('format')!r}")
    schema = Schema.from_json_dict(blob["schema"])
    kind = blob["kind"]
    state = blob["state"]
    if kind == "constant":
        return ConstantModel(schema, state["code"])
    if kind == LOGISTIC_REGRESSION:
        model = LogisticModel(schema, _Encoder.from_state(schema, state["encoder"]), np.array(state["weights"]))
        return model
    if kind == DECISION_TREE:
        return TreeModel(schema, state["tree"])
    if kind == RANDOM_FOREST:
        return ForestModel(schema, state["trees"])
    raise ExecutionError(f"unknown model kind {kind!r}")


class ConstantModel(Model):
    kind = "constant"

    def __init__(self, schema: Schema, code: int):
        super().__init__(schema)
        self.code = int(code)

    def predict_label_codes(self, num, cat) -> np.ndarray:
        return np.full(num.shape[0], self.code, dtype=np.int64)

    def state(self) -> dict:
        return {"code": self.code}


def softmax_loss_and_grad(W: np.ndarray, X: np.ndarray, Y: np.ndarray):
    """Mean cross-entropy of softmax(X @ W) against one-hot Y, with its
    analytic gradient."""
    n = X.shape[0]
    Z = X @ W
    Z = Z - Z.max(axis=1, keepdims=True)
    expz = np.exp(Z)
    P = expz / expz.sum(axis=1, keepdims=True)
    loss = -float(np.sum(Y * np.log(np.clip(P, 1e-300, None))) / n)
    grad = X.T @ (P - Y) / n
    return loss, grad


class LogisticModel(Model):
    kind = LOGISTIC_REGRESSION

    def __init__(self, schema: Schema, encoder: _Encoder, weights: np.ndarray):
        super().__init__(schema)
        self.encoder = encoder
        self.weights = weights

    def predict_label_codes(self, num, cat) -> np.ndarray:
        X = self.encoder.matrix(num, cat)
        X = np.concatenate([X, np.ones((X.shape[0], 1))], axis=1)
        return np.argmax(X @ self.weights, axis=1).astype(np.int64)

    def state(self) -> dict:
        return {"encoder": self.encoder.state(), "weights": self.weights.tolist()}


def _fit_logistic(schema: Schema, num, cat, label_codes, params) -> LogisticModel:
    encoder = _Encoder(schema, standardize=True).fit(num)
    X = encoder.matrix(num, cat)
    X = np.concatenate([X, np.ones((X.shape[0], 1))], axis=1)
    n_classes = len(schema.labels)
    Y = np.zeros((X.shape[0], n_classes))
    Y[np.arange(X.shape[0]), label_codes] = 1.0

    W = np.zeros((X.shape[1], n_classes))
    loss, grad = softmax_loss_and_grad(W, X, Y)
    lr = float(params["learning_rate"])
    for _ in range(int(params["iterations"])):
        W_try = W - lr * grad
        loss_try, grad_try = softmax_loss_and_grad(W_try, X, Y)
        while loss_try > loss and lr > 1e-12:
            lr *= 0.5
            W_try = W - lr * grad
            loss_try, grad_try = softmax_loss_and_grad(W_try, X, Y)
        if loss_try > loss:
            break
        W, loss, grad = W_try, loss_try, grad_try
    return LogisticModel(schema, encoder, W)


# -- decision tree -----------------------------------------------------------

def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


def _split_candidates(schema: Schema):
    """(attribute position, kind, encoded column) in schema order."""
    num_col = {p: j for j, p in enumerate(schema.numeric_positions())}
    cat_col = {p: j for j, p in enumerate(schema.categorical_positions())}
    out = []
    for p, attr in enumerate(schema.attributes):
        if attr.kind == "numeric":
            out.append((p, "num", num_col[p]))
        else:
            out.append((p, "cat", cat_col[p]))
    return out


def _best_split(num, cat, codes, rows, n_classes, candidates):
    parent_counts = np.bincount(codes[rows], minlength=n_classes)
    parent_gini = _gini(parent_counts)
    best = None  # (gini, attr_pos, kind, col, value)
    for attr_pos, kind, col in candidates:
        if kind == "num":
            values = num[rows, col]
            order = np.argsort(values, kind="stable")
            sv = values[order]
            sc = codes[rows][order]
            onehot = np.zeros((len(rows), n_classes))
            onehot[np.arange(len(rows)), sc] = 1.0
            prefix = np.cumsum(onehot, axis=0)
            boundaries = np.flatnonzero(sv[:-1] < sv[1:])
            for b in boundaries:
                left = prefix[b]
                right = parent_counts - left
                nl, nr = left.sum(), right.sum()
                g = (nl * _gini(left) + nr * _gini(right)) / len(rows)
                if best is None or g < best[0] - 1e-12:
                    best = (g, attr_pos, "num", col, float((sv[b] + sv[b + 1]) / 2.0))
        else:
            col_codes = cat[rows, col]
            for code in np.unique(col_codes):
                mask = col_codes == code
                left = np.bincount(codes[rows][mask], minlength=n_classes)
                right = parent_counts - left
                nl, nr = left.sum(), right.sum()
                if nl == 0 or nr == 0:
                    continue
                g = (nl * _gini(left) + nr * _gini(right)) / len(rows)
                if best is None or g < best[0] - 1e-12:
                    best = (g, attr_pos, "cat", col, int(code))
    if best is None or best[0] >= parent_gini - 1e-12:
        return None
    return best


def _grow_tree(num, cat, codes, rows, depth, max_depth, n_classes, candidates):
    counts = np.bincount(codes[rows], minlength=n_classes)
    leaf = {"leaf": int(np.argmax(counts))}
    if depth >= max_depth or len(rows) < 2 or _gini(counts) == 0.0:
        return leaf
    found = _best_split(num, cat, codes, rows, n_classes, candidates)
    if found is None:
        return leaf
    _, attr_pos, kind, col, value = found
    if kind == "num":
        mask = num[rows, col] <= value
    else:
        mask = cat[rows, col] == value
    left_rows, right_rows = rows[mask], rows[~mask]
    return {
        "attr": attr_pos,
        "kind": kind,
        "col": col,
        "value": value,
        "left": _grow_tree(num, cat, codes, left_rows, depth + 1, max_depth, n_classes, candidates),
        "right": _grow_tree(num, cat, codes, right_rows, depth + 1, max_depth, n_classes, candidates),
    }


def _tree_predict_one(tree: dict, num_row, cat_row) -> int:
    node = tree
    while "leaf" not in node:
        if node["kind"] == "num":
            node = node["left"] if num_row[node["col"]] <= node["value"] else node["right"]
        else:
            node = node["left"] if cat_row[node["col"]] == node["value"] else node["right"]
    return node["leaf"]


class TreeModel(Model):
    kind = DECISION_TREE

    def __init__(self, schema: Schema, tree: dict):
        super().__init__(schema)
        self.tree = tree

    def predict_label_codes(self, num, cat) -> np.ndarray:
        return np.array(
            [_tree_predict_one(self.tree, num[i], cat[i]) for i in range(num.shape[0])],
            dtype=np.int64,
        )

    def state(self) -> dict:
        return {"tree": self.tree}


def _fit_tree(schema, num, cat, codes, max_depth) -> dict:
    rows = np.arange(num.shape[0])
    return _grow_tree(num, cat, codes, rows, 0, int(max_depth), len(schema.labels), _split_candidates(schema))


class ForestModel(Model):
    kind = RANDOM_FOREST

    def __init__(self, schema: Schema, trees: list[dict]):
        super().__init__(schema)
        self.trees = trees

    def predict_label_codes(self, num, cat) -> np.ndarray:
        n = num.shape[0]
        votes = np.zeros((n, len(self.schema.labels)), dtype=np.int64)
        for tree in self.trees:
            for i in range(n):
                votes[i, _tree_predict_one(tree, num[i], cat[i])] += 1
        return np.argmax(votes, axis=1).astype(np.int64)

    def state(self) -> dict:
        return {"trees": self.trees}


def _fit_forest(schema, num, cat, codes, params, seed) -> ForestModel:
    n = num.shape[0]
    bag = max(1, round(float(params["bag_fraction"]) * n))
    trees = []
    for t in range(int(params["n_trees"])):
        rng = np.random.default_rng([seed, t])
        rows = np.sort(rng.integers(0, n, size=bag))
        sub_num, sub_cat, sub_codes = num[rows], cat[rows], codes[rows]
        trees.append(_fit_tree(schema, sub_num, sub_cat, sub_codes, params["max_depth"]))
    return ForestModel(schema, trees)


def train(spec: TrainerSpec, d: Dataset, seed: int) -> Model:
    """Fit the requested learner; identical (spec, data, seed) gives
    identical predictions. A single-class dataset yields a constant model."""
    if len(d) < 1:
        raise ExecutionError("cannot train on an empty dataset")
    params = spec.resolved()
    num, cat, codes = d.encoded()
    present = np.unique(codes)
    if len(present) == 1:
        return ConstantModel(d.schema, int(present[0]))
    if spec.kind == LOGISTIC_REGRESSION:
        return _fit_logistic(d.schema, num, cat, codes, params)
    if spec.kind == DECISION_TREE:
        return TreeModel(d.schema, _fit_tree(d.schema, num, cat, codes, params["max_depth"]))
    return _fit_forest(d.schema, num, cat, codes, params, seed)
