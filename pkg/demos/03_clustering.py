"""Cluster a synthetic impersonator population into bots and fans.

Generates profiles and posts, screens for impersonators, builds the
17-dimension feature matrix, picks k with the elbow curve and labels the
two clusters.

Run: python demos/03_clustering.py
"""

import collections

from doppel.pipeline import (
    cluster_feature_matrix,
    cluster_impersonators,
    identify_profiles,
)
from doppel.clustering import assignment_table
from doppel.records import load_posts, load_profiles
from doppel.similarity import PhotoOracle
from doppel.synth import GeneratorConfig, gen_dataset
import tempfile

with tempfile.TemporaryDirectory() as tmp:
    config = GeneratorConfig.default(n_genuine=8, n_fan=120, n_bot=120, seed=7)
    paths = gen_dataset(config, tmp)
    profiles = load_profiles(paths["profiles"])
    genuine = load_profiles(paths["genuine"])
    posts = load_posts(paths["posts"])
    oracle = PhotoOracle.from_file(paths["photo_oracle"])

results = identify_profiles(profiles, genuine, threshold=0.30, oracle=oracle)
flagged = [u for u, r in results.items() if r.report.is_impersonator]
print(f"{len(flagged)} of {len(profiles)} profiles flagged as impersonators\n")

ids, matrix = cluster_feature_matrix(
    profiles, results, posts, exclude_usernames=[g.username for g in genuine]
)
model, Z, curve = cluster_impersonators(matrix, k=None, seed=0)
print("elbow curve (within-cluster sum of squares by k):")
for k in sorted(curve):
    bar = "#" * max(1, int(50 * curve[k] / max(curve.values())))
    print(f"  k={k}  {curve[k]:>12.1f}  {bar}")
print(f"\nselected k = {model.k}")

assign, labels, dist, outlier = assignment_table(model, Z)
counts = collections.Counter(labels)
print(f"cluster sizes: {dict(counts)}; outliers flagged: {int(outlier.sum())}")

print("\nstandardized centroid composite (follower + photo + username similarity):")
for idx, label in model.labels.items():
    composite = model.centroids[idx][[12, 3, 0]].sum()
    print(f"  cluster {idx} -> {label:<4} (composite {composite:+.2f})")
