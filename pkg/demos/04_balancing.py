"""Equalize skewed class counts with SMOTE plus random under-sampling.

Run: python demos/04_balancing.py
"""

import numpy as np

from doppel.balance import LabeledFeatureSet, balance, smote

rng = np.random.default_rng(0)

# a skewed three-class dataset in a 2-D feature space
features = np.vstack([
    rng.normal([0, 0], 0.5, size=(34, 2)),     # bot
    rng.normal([4, 0], 0.5, size=(90, 2)),     # fan (majority)
    rng.normal([2, 3], 0.5, size=(62, 2)),     # genuine
])
labels = ["bot"] * 34 + ["fan"] * 90 + ["genuine"] * 62
dataset = LabeledFeatureSet(features=features, labels=labels)

print("before:", dataset.class_counts())
balanced = balance(dataset, seed=1)
print("after: ", balanced.class_counts())

origins = {}
for lbl, origin in zip(balanced.labels, balanced.origins):
    origins.setdefault(lbl, []).append(origin)
for lbl, origin_list in sorted(origins.items()):
    n_synth = origin_list.count("synthetic")
    print(f"  {lbl:<8} {len(origin_list):>3} examples, {n_synth} synthetic")

# every synthetic point interpolates a real pair; show a few
bots = features[:34]
synthetic = smote(bots, target_count=40, k=5, seed=2)
print("\nfirst synthetic bot points (interpolated between real neighbours):")
for point in synthetic[:4]:
    nearest = np.argsort(((bots - point) ** 2).sum(axis=1))[:2]
    print(f"  {np.round(point, 3)} near real points {nearest.tolist()}")
