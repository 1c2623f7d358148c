"""Random forest baseline: bootstrapped Gini-split CART trees with

sqrt(d) feature subsampling per split and majority-vote prediction."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    prediction: int = -1

    @property
    def is_leaf(self):
        return self.left is None


def _gini_from_counts(counts):
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return 1.0 - float((p * p).sum())


def _best_split(X, y, n_classes, feature_pool, rng):
    """Best (feature, threshold) by weighted Gini over a random sqrt(d)

    subset of features; None when no split separates anything."""
    n = len(y)
    n_try = max(1, int(np.sqrt(len(feature_pool))))
    candidates = rng.choice(feature_pool, size=n_try, replace=False)
    best = None
    best_score = np.inf
    parent_counts = np.bincount(y, minlength=n_classes).astype(float)
    for f in candidates:
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        sorted_vals = col[order]
        sorted_y = y[order]
        left = np.zeros(n_classes)
        right = parent_counts.copy()
        for i in range(n - 1):
            cls = sorted_y[i]
            left[cls] += 1
            right[cls] -= 1
            if sorted_vals[i] == sorted_vals[i + 1]:
                continue
            n_left = i + 1
            n_right = n - n_left
            score = (n_left * _gini_from_counts(left) + n_right * _gini_from_counts(right)) / n
            if score < best_score - 1e-12:
                best_score = score
                best = (int(f), float((sorted_vals[i] + sorted_vals[i + 1]) / 2.0))
    if best is None:
        return None
    if best_score >= _gini_from_counts(parent_counts) - 1e-12:
        return None
    return best


def _grow(X, y, n_classes, rng, min_samples_split, depth, max_depth):
    counts = np.bincount(y, minlength=n_classes)
    node = _Node(prediction=int(counts.argmax()))
    if (
        len(y) < min_samples_split
        or (counts > 0).sum() <= 1
        or (max_depth is not None and depth >= max_depth)
    ):
        return node
    split_choice = _best_split(X, y, n_classes, np.arange(X.shape[1]), rng)
    if split_choice is None:
        return node
    f, thr = split_choice
    mask = X[:, f] <= thr
    node.feature, node.threshold = f, thr
    node.left = _grow(X[mask], y[mask], n_classes, rng, min_samples_split, depth + 1, max_depth)
    node.right = _grow(X[~mask], y[~mask], n_classes, rng, min_samples_split, depth + 1, max_depth)
    return node


def _tree_predict(node, X):
    out = np.empty(len(X), dtype=int)
    idx = np.arange(len(X))
    stack = [(node, idx)]
    while stack:
        nd, sub = stack.pop()
        if nd.is_leaf:
            out[sub] = nd.prediction
            continue
        mask = X[sub, nd.feature] <= nd.threshold
        stack.append((nd.left, sub[mask]))
        stack.append((nd.right, sub[~mask]))
    return out


@dataclass
class ForestModel:
    """Trained forest plus the bootstrap indices each tree saw."""

    trees: list = field(default_factory=list)
    bootstrap_indices: list = field(default_factory=list)
    n_classes: int = 0
    constant_class: int | None = None


def forest_train(features, labels, n_trees: int = 100, seed: int = 0,
                 max_depth: int | None = None, min_samples_split: int = 2) -> ForestModel:
    """Fit n_trees CART trees on seeded bootstrap samples.

    Each tree derives its own generator from (seed, tree index), so the
    result does not depend on training order. A single-class training set
    degenerates to a constant model with a warning.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=int)
    n_classes = int(y.max()) + 1 if len(y) else 0
    model = ForestModel(n_classes=n_classes)
    present = np.unique(y)
    if len(present) < 2:
        warnings.warn("single-class training set; forest degenerates to a constant")
        model.constant_class = int(present[0]) if len(present) else 0
        return model
    n = len(y)
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        boot = rng.integers(0, n, size=n)
        model.bootstrap_indices.append(boot)
        model.trees.append(
            _grow(X[boot], y[boot], n_classes, rng, min_samples_split, 0, max_depth)
        )
    return model


def forest_predict(model: ForestModel, features) -> np.ndarray:
    """Majority vote across trees; ties go to the lowest class index."""
    X = np.asarray(features, dtype=float)
    if model.constant_class is not None:
        return np.full(len(X), model.constant_class, dtype=int)
    votes = np.zeros((len(X), model.n_classes), dtype=int)
    for tree in model.trees:
        pred = _tree_predict(tree, X)
        votes[np.arange(len(X)), pred] += 1
    return votes.argmax(axis=1)
