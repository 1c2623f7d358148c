"""End-to-end orchestration: identification, labeling, feature assembly,

balanced training and the three-model benchmark. The CLI commands are
thin wrappers around these functions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import nn
from .balance import LabeledFeatureSet, balance
from .clustering import (
    ClusterModel,
    assignment_table,
    build_cluster_features,
    elbow_select,
    fit_best,
    label_clusters,
    standardize,
)
from .errors import DataError
from .evaluation import TfidfModel, kfold, metrics, split
from .features import (
    METADATA_DIM,
    TextResources,
    Vocabulary,
    build_corpus_entry,
    encode,
    fit_vocabulary,
    metadata_vector,
    normalized_tokens,
)
from .forest import forest_predict, forest_train
from .lda import TopicModel, lda_fit
from .records import PostRecord, ProfileRecord
from .similarity import PhotoOracle, SimilarityReport, best_match, msf_lsf

CLASS_NAMES = ("bot", "fan", "genuine")


@dataclass
class IdentifyResult:
    """Best-target similarity report plus the across-target MSF/LSF."""

    report: SimilarityReport
    msf: int
    lsf: int
    all_reports: list[SimilarityReport]


def _empty_report() -> SimilarityReport:
    return SimilarityReport(
        genuine_target="", sim_username=0.0, sim_full_name=0.0,
        sim_biography=0.0, photo_similar=False,
        similar_feature_count=0, is_impersonator=False,
    )


def identify_profiles(
    profiles: list[ProfileRecord],
    genuines: list[ProfileRecord],
    threshold: float = 0.30,
    oracle: PhotoOracle | None = None,
) -> dict[str, IdentifyResult]:
    """Assess every profile against every genuine account.

    A profile is never compared against itself (genuine accounts are part
    of the candidate pool when their posts are classified downstream).
    """
    results = {}
    for profile in profiles:
        targets = [g for g in genuines if g.username != profile.username]
        if not targets:
            results[profile.username] = IdentifyResult(_empty_report(), 0, 0, [])
            continue
        best, all_reports = best_match(profile, targets, threshold, oracle)
        m, l = msf_lsf(all_reports)
        results[profile.username] = IdentifyResult(best, m, l, all_reports)
    return results


def cluster_feature_matrix(
    profiles: list[ProfileRecord],
    identify_results: dict[str, IdentifyResult],
    posts: list[PostRecord],
    exclude_usernames=(),
):
    """Feature rows for the identified impersonators.

    The configured genuine accounts are reference seeds, not candidates,
    so they are excluded from the impersonator pool."""
    excluded = set(exclude_usernames)
    posts_by_user: dict[str, list[PostRecord]] = {}
    for post in posts:
        posts_by_user.setdefault(post.publisher_id, []).append(post)
    ids, rows = [], []
    for profile in profiles:
        if profile.username in excluded:
            continue
        result = identify_results.get(profile.username)
        if result is None or not result.report.is_impersonator:
            continue
        ids.append(profile.username)
        rows.append(build_cluster_features(
            profile, result.report, posts_by_user.get(profile.username, []),
            msf=result.msf, lsf=result.lsf,
        ))
    return ids, np.array(rows) if rows else np.empty((0, 17))


def cluster_impersonators(matrix, k: int | None = None, k_range=range(1, 9),
                          seed: int = 0, restarts: int = 5):
    """Standardize, pick k by the elbow (unless forced), fit and label."""
    Z, means, stds = standardize(matrix)
    curve = {}
    if k is None:
        k, curve = elbow_select(Z, k_range=k_range, seed=seed, restarts=restarts)
    model = fit_best(Z, k, seed=seed, restarts=restarts)
    model.feature_means = means
    model.feature_stds = stds
    if k == 2:
        label_clusters(model)
    return model, Z, curve


def labels_from_clustering(ids, model: ClusterModel, Z, genuine_usernames):
    """Publisher label map: cluster label for identified impersonators,

    "genuine" for the reference accounts, absent otherwise."""
    assign, labels, _, _ = assignment_table(model, Z)
    label_by_user = {u: labels[i] for i, u in enumerate(ids)}
    for username in genuine_usernames:
        label_by_user[username] = "genuine"
    return label_by_user


@dataclass
class PreparedDataset:
    """Per-post raw materials for the classifier, before encoding."""

    post_ids: list[str]
    base_texts: list[str]
    caption_tokens: list[list[str]]
    metadata: np.ndarray
    labels: list[str]

    def __len__(self):
        return len(self.post_ids)


def prepare_examples(
    posts: list[PostRecord],
    profiles_by_user: dict[str, ProfileRecord],
    identify_results: dict[str, IdentifyResult],
    label_by_user: dict[str, str] | None,
    reference_ts: int,
    resources: TextResources | None = None,
) -> PreparedDataset:
    """Fuse posts with publisher features; posts whose publisher has no

    label are dropped (label_by_user=None keeps everything, unlabeled)."""
    resources = resources or TextResources()
    ids, texts, captions, meta_rows, labels = [], [], [], [], []
    for post in posts:
        profile = profiles_by_user.get(post.publisher_id)
        if profile is None:
            raise DataError(f"post {post.post_id!r} references unknown publisher "
                            f"{post.publisher_id!r}")
        if label_by_user is not None:
            label = label_by_user.get(post.publisher_id)
            if label is None:
                continue
            labels.append(label)
        result = identify_results.get(post.publisher_id)
        report = result.report if result else _empty_report()
        ids.append(post.post_id)
        texts.append(build_corpus_entry(post, profile, resources))
        captions.append(normalized_tokens(post.caption, resources))
        meta_rows.append(metadata_vector(post, profile, report, reference_ts, resources))
    metadata = np.array(meta_rows) if meta_rows else np.empty((0, METADATA_DIM))
    return PreparedDataset(ids, texts, captions, metadata, labels)


@dataclass
class FeatureSettings:
    """Knobs for the text/feature fitting done inside each training run."""

    seq_len: int = 100
    vocab_cap: int = 30000
    lda_topics: int = 10
    lda_iters: int = 200
    lda_seed: int = 0
    lda_top_words: int = 3


def topic_texts(prepared: PreparedDataset, model: TopicModel | None,
                top_words: int = 3) -> list[str]:
    """Final corpus strings: base text plus the dominant topic's top words."""
    if model is None:
        return list(prepared.base_texts)
    out = []
    for base, tokens in zip(prepared.base_texts, prepared.caption_tokens):
        topic = model.dominant_topic(tokens)
        words = model.top_words(topic, top_words)
        out.append((base + " " + " ".join(words)).strip())
    return out


def fit_topics(prepared: PreparedDataset, train_idx, settings: FeatureSettings):
    """LDA on the training captions; None when topics are disabled or the

    corpus is too small to support the requested topic count."""
    if settings.lda_topics <= 0:
        return None
    docs = [prepared.caption_tokens[i] for i in train_idx]
    vocab = {tok for doc in docs for tok in doc}
    if len(docs) < settings.lda_topics or len(vocab) < settings.lda_topics:
        return None
    return lda_fit(docs, n_topics=settings.lda_topics, iters=settings.lda_iters,
                   seed=settings.lda_seed)


def meta_stats(metadata):
    """Training-split standardization statistics (constant columns get 1)."""
    means = metadata.mean(axis=0)
    stds = metadata.std(axis=0)
    stds = np.where(stds == 0.0, 1.0, stds)
    return means, stds


def apply_meta_stats(metadata, means, stds):
    return (np.asarray(metadata, dtype=float) - means) / stds


@dataclass
class TrainedModel:
    """Everything needed to classify new posts."""

    params: nn.ModelParams
    model_cfg: nn.ModelConfig
    vocab: Vocabulary
    meta_means: np.ndarray
    meta_stds: np.ndarray
    topics: TopicModel | None
    history: list[float] = field(default_factory=list)
    class_names: tuple = CLASS_NAMES


def train_on_index(
    prepared: PreparedDataset,
    train_idx,
    settings: FeatureSettings | None = None,
    model_overrides: dict | None = None,
    train_cfg: nn.TrainConfig | None = None,
    balance_seed: int = 0,
    zero_metadata: bool = False,
    apply_balance: bool = True,
    topics_model="fit",
) -> TrainedModel:
    """Fit topics, vocabulary, standardization and the network on one

    training index set. `zero_metadata` trains the post-only variant: the
    same topology with the metadata branch fed zeros. Balancing applies to
    the training portion only; `apply_balance=False` skips it for
    comparison runs. `topics_model` accepts a pre-fitted TopicModel (or
    None) so callers evaluating several variants fit LDA just once."""
    settings = settings or FeatureSettings()
    train_cfg = train_cfg or nn.TrainConfig()
    train_idx = np.asarray(train_idx)

    if topics_model == "fit":
        topics = fit_topics(prepared, train_idx, settings)
    else:
        topics = topics_model
    texts = topic_texts(prepared, topics, settings.lda_top_words)
    vocab = fit_vocabulary([texts[i] for i in train_idx], cap=settings.vocab_cap)
    tokens = np.stack([encode(t, vocab, settings.seq_len) for t in texts])

    means, stds = meta_stats(prepared.metadata[train_idx])
    meta = apply_meta_stats(prepared.metadata, means, stds)
    if zero_metadata:
        meta = np.zeros_like(meta)

    train_set = LabeledFeatureSet(
        features=meta[train_idx],
        labels=[prepared.labels[i] for i in train_idx],
        payloads=[tokens[i] for i in train_idx],
    )
    balanced = balance(train_set, seed=balance_seed) if apply_balance else train_set
    y = np.array([CLASS_NAMES.index(lbl) for lbl in balanced.labels])
    x_tokens = np.stack(balanced.payloads)

    overrides = dict(model_overrides or {})
    overrides.setdefault("seq_len", settings.seq_len)
    model_cfg = nn.ModelConfig(
        vocab_size=vocab.size, metadata_dim=meta.shape[1], **overrides
    )
    params, history = nn.train(x_tokens, balanced.features, y, model_cfg, train_cfg)
    return TrainedModel(params, model_cfg, vocab, means, stds, topics, history)


def classify(model: TrainedModel, prepared: PreparedDataset, idx=None,
             zero_metadata: bool = False):
    """Predicted labels (and probabilities) for a slice of the dataset."""
    idx = np.arange(len(prepared)) if idx is None else np.asarray(idx)
    texts = topic_texts(prepared, model.topics)
    tokens = np.stack([encode(texts[i], model.vocab, model.model_cfg.seq_len) for i in idx])
    meta = apply_meta_stats(prepared.metadata[idx], model.meta_means, model.meta_stds)
    if zero_metadata:
        meta = np.zeros_like(meta)
    pred_idx, probs = nn.predict_batch(model.params, model.model_cfg, tokens, meta)
    return [CLASS_NAMES[i] for i in pred_idx], probs


BENCHMARK_MODELS = ("rf_tfidf", "dnn_post", "dnn_post_profile")


def _rf_fold(prepared, train_idx, val_idx, settings, n_trees, tfidf_cap, seed,
             topics_model="fit"):
    if topics_model == "fit":
        topics = fit_topics(prepared, train_idx, settings)
    else:
        topics = topics_model
    texts = topic_texts(prepared, topics, settings.lda_top_words)
    tfidf_model = TfidfModel(vocab_cap=tfidf_cap).fit([texts[i] for i in train_idx])
    X_train = tfidf_model.transform([texts[i] for i in train_idx])
    X_val = tfidf_model.transform([texts[i] for i in val_idx])
    y_train = np.array([CLASS_NAMES.index(prepared.labels[i]) for i in train_idx])
    model = forest_train(X_train, y_train, n_trees=n_trees, seed=seed)
    pred = forest_predict(model, X_val)
    return [CLASS_NAMES[i] for i in pred]


def evaluate_models(
    prepared: PreparedDataset,
    train_idx,
    eval_idx,
    settings: FeatureSettings | None = None,
    model_overrides: dict | None = None,
    train_cfg: nn.TrainConfig | None = None,
    balance_seed: int = 0,
    rf_trees: int = 100,
    tfidf_cap: int = 1000,
    seed: int = 0,
):
    """Train and score the three benchmark rows on one train/eval split.

    The topic model depends only on the training captions, so it is
    fitted once and shared by all three rows."""
    settings = settings or FeatureSettings()
    eval_labels = [prepared.labels[i] for i in eval_idx]
    topics = fit_topics(prepared, np.asarray(train_idx), settings)
    results = {}
    pred_rf = _rf_fold(prepared, train_idx, eval_idx, settings, rf_trees,
                       tfidf_cap, seed, topics_model=topics)
    results["rf_tfidf"] = metrics(pred_rf, eval_labels)
    post_only = train_on_index(
        prepared, train_idx, settings, model_overrides, train_cfg,
        balance_seed=balance_seed, zero_metadata=True, topics_model=topics,
    )
    pred_po, _ = classify(post_only, prepared, eval_idx, zero_metadata=True)
    results["dnn_post"] = metrics(pred_po, eval_labels)
    full = train_on_index(
        prepared, train_idx, settings, model_overrides, train_cfg,
        balance_seed=balance_seed, topics_model=topics,
    )
    pred_full, _ = classify(full, prepared, eval_idx)
    results["dnn_post_profile"] = metrics(pred_full, eval_labels)
    return results


@dataclass
class BenchmarkReport:
    """Per-model mean and std of accuracy/precision/recall/F1 over folds."""

    rows: dict[str, dict[str, float]]
    fold_metrics: list[dict[str, dict[str, float]]]

    def table(self) -> str:
        header = f"{'model':<18}" + "".join(
            f"{m:>22}" for m in ("accuracy", "precision", "recall", "f1")
        )
        lines = [header]
        for name in BENCHMARK_MODELS:
            row = self.rows[name]
            cells = "".join(
                f"{row[m + '_mean']:>14.4f} +-{row[m + '_std']:.4f}"
                for m in ("accuracy", "precision", "recall", "f1")
            )
            lines.append(f"{name:<18}" + cells)
        return "\n".join(lines)


def run_benchmark(
    prepared: PreparedDataset,
    settings: FeatureSettings | None = None,
    model_overrides: dict | None = None,
    train_cfg: nn.TrainConfig | None = None,
    n_folds: int = 10,
    seed: int = 0,
    balance_seed: int = 0,
    rf_trees: int = 100,
    tfidf_cap: int = 1000,
) -> BenchmarkReport:
    """K-fold comparison of the RF baseline and the two network variants.

    Balancing happens inside each fold on the training portion only.
    """
    folds = kfold(prepared.labels, k=n_folds, seed=seed)
    fold_rows = []
    for f, (train_idx, val_idx) in enumerate(folds):
        results = evaluate_models(
            prepared, train_idx, val_idx, settings, model_overrides, train_cfg,
            balance_seed=balance_seed * 1000 + f, seed=seed * 1000 + f,
            rf_trees=rf_trees, tfidf_cap=tfidf_cap,
        )
        fold_rows.append({name: rep.row() for name, rep in results.items()})
    rows = {}
    for name in BENCHMARK_MODELS:
        agg = {}
        for metric in ("accuracy", "precision", "recall", "f1"):
            values = [fr[name][metric] for fr in fold_rows]
            agg[metric + "_mean"] = float(np.mean(values))
            agg[metric + "_std"] = float(np.std(values))
        rows[name] = agg
    return BenchmarkReport(rows=rows, fold_metrics=fold_rows)


def holdout_evaluation(
    prepared: PreparedDataset,
    train_frac: float = 0.75,
    seed: int = 0,
    **kwargs,
):
    """75/25 stratified split, then one evaluate_models pass on the test

    side. Returns (per-model MetricsReport dict, train_idx, test_idx)."""
    train_idx, test_idx = split(prepared.labels, train_frac=train_frac, seed=seed)
    results = evaluate_models(prepared, train_idx, test_idx, seed=seed, **kwargs)
    return results, train_idx, test_idx
