"""Small-scale benchmark: RF + TF-IDF baseline vs the two network variants.

Uses a reduced model and short training so it finishes in about a minute;
the acceptance suite runs the full-size version.

Run: python demos/06_benchmark.py
"""

import tempfile

from doppel import nn
from doppel.evaluation import split
from doppel.pipeline import (
    FeatureSettings,
    cluster_feature_matrix,
    cluster_impersonators,
    evaluate_models,
    identify_profiles,
    labels_from_clustering,
    prepare_examples,
    run_benchmark,
)
from doppel.records import load_posts, load_profiles
from doppel.similarity import PhotoOracle
from doppel.synth import GeneratorConfig, gen_dataset

with tempfile.TemporaryDirectory() as tmp:
    config = GeneratorConfig.default(n_genuine=6, n_fan=80, n_bot=80, seed=5)
    paths = gen_dataset(config, tmp)
    profiles = load_profiles(paths["profiles"])
    genuine = load_profiles(paths["genuine"])
    posts = load_posts(paths["posts"])
    oracle = PhotoOracle.from_file(paths["photo_oracle"])

results = identify_profiles(profiles, genuine, 0.30, oracle)
ids, matrix = cluster_feature_matrix(
    profiles, results, posts, exclude_usernames=[g.username for g in genuine]
)
model, Z, _ = cluster_impersonators(matrix, k=2, seed=0)
label_by_user = labels_from_clustering(ids, model, Z, [g.username for g in genuine])
prepared = prepare_examples(posts, {p.username: p for p in profiles}, results,
                            label_by_user, reference_ts=config.reference_ts)
print(f"{len(prepared)} labeled posts\n")

settings = FeatureSettings(seq_len=60, lda_topics=4, lda_iters=25)
small = dict(embed_dim=16, conv_filters=12, conv_kernel=4, lstm_units=12,
             text_dense=12, meta_dense=12, head_dense=12)
train_cfg = nn.TrainConfig(epochs=4, learning_rate=3e-3, seed=1)

report = run_benchmark(prepared, settings=settings, model_overrides=small,
                       train_cfg=train_cfg, n_folds=3, seed=2, rf_trees=30)
print("3-fold cross-validation:")
print(report.table())

train_idx, test_idx = split(prepared.labels, 0.75, seed=2)
rows = evaluate_models(prepared, train_idx, test_idx, settings=settings,
                       model_overrides=small, train_cfg=train_cfg, rf_trees=30)
print("\nheld-out test set:")
for name, rep in rows.items():
    print(f"  {name:<18} accuracy {rep.accuracy:.4f}  macro-F1 {rep.macro_f1:.4f}")
