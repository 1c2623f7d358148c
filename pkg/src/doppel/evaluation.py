"""Evaluation protocol: stratified splitting, 10-fold cross-validation,

confusion-matrix metrics and the TF-IDF representation for the random
forest baseline."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

CLASS_NAMES = ("bot", "fan", "genuine")


def _class_indices(labels, rng):
    """Per-class index arrays, each shuffled."""
    labels = np.asarray(labels)
    by_class = {}
    for cls in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        by_class[cls] = idx
    return by_class


def split(labels, train_frac: float = 0.75, seed: int = 0):
    """Stratified random split; returns (train_idx, test_idx).

    Per-class train counts use largest-remainder rounding so the total
    train size equals round(train_frac * n) exactly.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if n < 4:
        raise ValueError("dataset too small to split")
    rng = np.random.default_rng(seed)
    by_class = _class_indices(labels, rng)
    if any(len(idx) < 2 for idx in by_class.values()):
        raise ValueError("every class needs >= 2 examples to split")
    target_total = round(train_frac * n)
    floors, remainders = {}, {}
    for cls, idx in by_class.items():
        exact = train_frac * len(idx)
        floors[cls] = int(np.floor(exact))
        remainders[cls] = exact - floors[cls]
    leftover = target_total - sum(floors.values())
    order = sorted(by_class, key=lambda c: (-remainders[c], c))
    take = dict(floors)
    for cls in order[:leftover]:
        take[cls] += 1
    train, test = [], []
    for cls, idx in by_class.items():
        train.extend(idx[: take[cls]].tolist())
        test.extend(idx[take[cls]:].tolist())
    return np.array(sorted(train)), np.array(sorted(test))


def kfold(labels, k: int = 10, seed: int = 0):
    """Stratified k folds; returns [(train_idx, val_idx), ...].

    Examples are dealt round-robin to folds with the dealing position
    carried across classes, so fold sizes differ by at most one globally.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if n < k:
        raise ValueError(f"need at least k={k} examples, got {n}")
    rng = np.random.default_rng(seed)
    by_class = _class_indices(labels, rng)
    folds = [[] for _ in range(k)]
    position = 0
    for cls in sorted(by_class):
        for idx in by_class[cls]:
            folds[position % k].append(int(idx))
            position += 1
    pairs = []
    for f in range(k):
        val = np.array(sorted(folds[f]))
        train = np.array(sorted(i for g in range(k) if g != f for i in folds[g]))
        pairs.append((train, val))
    return pairs


@dataclass
class MetricsReport:
    """Accuracy, per-class precision/recall/F1 and the confusion matrix."""

    accuracy: float
    per_class: dict[str, dict[str, float]]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: np.ndarray
    class_names: tuple

    def row(self):
        return {
            "accuracy": self.accuracy,
            "precision": self.macro_precision,
            "recall": self.macro_recall,
            "f1": self.macro_f1,
        }


def metrics(predictions, labels, class_names=CLASS_NAMES) -> MetricsReport:
    """Confusion-matrix metrics. Rows of the matrix are true classes.

    A class with zero support scores 0 on all three metrics and raises a
    warning rather than an error.
    """
    predictions = list(predictions)
    labels = list(labels)
    if len(predictions) != len(labels):
        raise ValueError("predictions/labels length mismatch")
    if not labels:
        raise ValueError("empty inputs")
    index = {cls: i for i, cls in enumerate(class_names)}
    confusion = np.zeros((len(class_names), len(class_names)), dtype=int)
    for pred, true in zip(predictions, labels):
        confusion[index[true], index[pred]] += 1
    accuracy = float(np.trace(confusion)) / len(labels)
    per_class = {}
    precisions, recalls, f1s = [], [], []
    for i, cls in enumerate(class_names):
        support = int(confusion[i].sum())
        predicted = int(confusion[:, i].sum())
        tp = int(confusion[i, i])
        if support == 0:
            warnings.warn(f"class {cls!r} has zero support")
            precision = recall = f1 = 0.0
        else:
            precision = tp / predicted if predicted else 0.0
            recall = tp / support
            f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[cls] = {
            "precision": precision, "recall": recall, "f1": f1, "support": support,
        }
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)
    return MetricsReport(
        accuracy=accuracy,
        per_class=per_class,
        macro_precision=float(np.mean(precisions)),
        macro_recall=float(np.mean(recalls)),
        macro_f1=float(np.mean(f1s)),
        confusion=confusion,
        class_names=tuple(class_names),
    )


class TfidfModel:
    """Smoothed TF-IDF over a frequency-capped vocabulary, L2-normalized.

    tf = term count / document length; idf = ln((1+N)/(1+df)) + 1. Fit on
    the training corpus only.
    """

    def __init__(self, vocab_cap: int = 1000):
        self.vocab_cap = vocab_cap
        self.vocabulary: dict[str, int] = {}
        self.idf: np.ndarray | None = None

    def fit(self, corpus: list[str]):
        if not corpus:
            raise ValueError("cannot fit TF-IDF on an empty corpus")
        counts: dict[str, int] = {}
        first_seen: dict[str, int] = {}
        df: dict[str, int] = {}
        pos = 0
        for doc in corpus:
            tokens = doc.split()
            for tok in tokens:
                counts[tok] = counts.get(tok, 0) + 1
                if tok not in first_seen:
                    first_seen[tok] = pos
                    pos += 1
            for tok in set(tokens):
                df[tok] = df.get(tok, 0) + 1
        ranked = sorted(counts, key=lambda t: (-counts[t], first_seen[t]))[: self.vocab_cap]
        self.vocabulary = {tok: i for i, tok in enumerate(ranked)}
        n_docs = len(corpus)
        self.idf = np.array([
            np.log((1 + n_docs) / (1 + df[tok])) + 1.0 for tok in ranked
        ])
        return self

    def transform(self, corpus: list[str]) -> np.ndarray:
        if self.idf is None:
            raise ValueError("TF-IDF model not fitted")
        X = np.zeros((len(corpus), len(self.vocabulary)))
        for r, doc in enumerate(corpus):
            tokens = doc.split()
            if not tokens:
                continue
            for tok in tokens:
                col = self.vocabulary.get(tok)
                if col is not None:
                    X[r, col] += 1.0
            X[r] /= len(tokens)
            X[r] *= self.idf
            norm = np.linalg.norm(X[r])
            if norm > 0:
                X[r] /= norm
        return X


def tfidf(corpus: list[str], vocab_cap: int = 1000) -> np.ndarray:
    """One-shot fit-and-transform for a training corpus."""
    return TfidfModel(vocab_cap).fit(corpus).transform(corpus)


def run_benchmark(prepared, **kwargs):
    """Forwarder; the benchmark lives in pipeline to avoid an import cycle."""
    from .pipeline import run_benchmark as _run

    return _run(prepared, **kwargs)
