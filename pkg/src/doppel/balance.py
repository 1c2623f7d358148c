"""Class balancing: SMOTE over-sampling plus random under-sampling.

The target count is the median of the class counts, so both mechanisms
are active whenever the classes differ: minority classes gain synthetic
interpolated points, the majority class loses a random subset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class LabeledFeatureSet:
    """Feature vectors with class labels and a real/synthetic origin mark.

    `payloads` carries opaque per-example data (e.g. token sequences)
    through balancing; synthetic examples copy the payload of the real
    point they were interpolated from.
    """

    features: np.ndarray
    labels: list[str]
    origins: list[str] = field(default_factory=list)
    payloads: list | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        if not self.origins:
            self.origins = ["real"] * len(self.labels)
        if len(self.labels) != self.features.shape[0]:
            raise ValueError("labels/features length mismatch")
        if self.payloads is not None and len(self.payloads) != len(self.labels):
            raise ValueError("payloads length mismatch")

    def class_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for label in self.labels:
            counts[label] = counts.get(label, 0) + 1
        return counts


def smote_with_sources(minority, target_count: int, k: int = 5, seed: int = 0):
    """SMOTE synthetics plus the index of the real point each came from.

    Each synthetic is x + u * (x_nn - x) for a random minority point x,
    one of its k nearest minority neighbours x_nn and u ~ Uniform(0, 1).
    Emits exactly max(0, target_count - n) points, deterministically under
    the seed.
    """
    X = np.asarray(minority, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise ValueError("SMOTE needs >= 2 samples")
    k = min(k, n - 1)
    n_new = max(0, target_count - n)
    if n_new == 0:
        return np.empty((0, X.shape[1])), np.empty(0, dtype=int)
    # brute-force k-NN, self excluded; stable argsort keeps ties deterministic
    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    neighbours = np.argsort(d2, axis=1, kind="stable")[:, :k]
    rng = np.random.default_rng(seed)
    base = rng.integers(0, n, size=n_new)
    pick = rng.integers(0, k, size=n_new)
    u = rng.random(n_new)
    nn = neighbours[base, pick]
    synthetic = X[base] + u[:, None] * (X[nn] - X[base])
    return synthetic, base


def smote(minority, target_count: int, k: int = 5, seed: int = 0) -> np.ndarray:
    """Synthetic minority points only; see smote_with_sources."""
    synthetic, _ = smote_with_sources(minority, target_count, k=k, seed=seed)
    return synthetic


def undersample_indices(n: int, target_count: int, seed: int = 0) -> np.ndarray:
    """Uniform without-replacement subset of range(n), original order kept."""
    if target_count > n:
        raise ValueError(f"cannot undersample {n} items to {target_count}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(n, size=target_count, replace=False)
    return np.sort(chosen)


def random_undersample(majority, target_count: int, seed: int = 0):
    """Uniform subsample without replacement, deterministic under seed."""
    idx = undersample_indices(len(majority), target_count, seed=seed)
    if isinstance(majority, np.ndarray):
        return majority[idx]
    return [majority[i] for i in idx]


def balance(dataset: LabeledFeatureSet, seed: int = 0, k: int = 5) -> LabeledFeatureSet:
    """Equalize all class counts at the median class count.

    Classes below the median are SMOTE-augmented, classes above are
    randomly under-sampled. Synthetic rows are marked origin="synthetic"
    and copy the payload of their SMOTE source point.
    """
    counts = dataset.class_counts()
    if any(c < 2 for c in counts.values()):
        raise ValueError("every class needs >= 2 examples to balance")
    target = int(np.median(sorted(counts.values())))
    labels = np.asarray(dataset.labels)
    features_out, labels_out, origins_out, payloads_out = [], [], [], []
    has_payloads = dataset.payloads is not None
    for ci, cls in enumerate(sorted(counts)):
        idx = np.flatnonzero(labels == cls)
        cls_seed = seed * 7919 + ci
        if counts[cls] > target:
            keep = idx[undersample_indices(len(idx), target, seed=cls_seed)]
            features_out.append(dataset.features[keep])
            labels_out += [cls] * target
            origins_out += [dataset.origins[i] for i in keep]
            if has_payloads:
                payloads_out += [dataset.payloads[i] for i in keep]
        else:
            features_out.append(dataset.features[idx])
            labels_out += [cls] * len(idx)
            origins_out += [dataset.origins[i] for i in idx]
            if has_payloads:
                payloads_out += [dataset.payloads[i] for i in idx]
            if counts[cls] < target:
                synthetic, sources = smote_with_sources(
                    dataset.features[idx], target, k=k, seed=cls_seed
                )
                features_out.append(synthetic)
                labels_out += [cls] * len(synthetic)
                origins_out += ["synthetic"] * len(synthetic)
                if has_payloads:
                    payloads_out += [dataset.payloads[idx[s]] for s in sources]
    return LabeledFeatureSet(
        features=np.vstack(features_out),
        labels=labels_out,
        origins=origins_out,
        payloads=payloads_out if has_payloads else None,
    )
