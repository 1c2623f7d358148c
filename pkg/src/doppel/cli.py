"""Command-line surface: one subcommand per pipeline stage.

    doppel synth     --config cfg.json --out-dir runs/a
    doppel identify  --config cfg.json --out-dir runs/a
    doppel cluster   --config cfg.json --out-dir runs/a
    doppel train     --config cfg.json --out-dir runs/a
    doppel eval      --config cfg.json --out-dir runs/a
    doppel predict   --config cfg.json --out-dir runs/a --posts new.jsonl

The config file is a JSON key-value tree (see DEFAULT_CONFIG for every
recognized key and its default). `--seed` overrides every stage seed at
once. Each command writes its outputs atomically together with a
`<stage>.manifest.json` recording the effective config hash, seeds and
input-file digests; outputs are byte-reproducible under a fixed manifest
(the manifest itself carries a timestamp).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
failure.
"""

from __future__ import annotations

import argparse
import copy
import datetime as _dt
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__, nn
from .errors import ConfigError, DataError, NumericError
from .evaluation import kfold, metrics, split
from .features import METADATA_FEATURE_NAMES, TextResources, Vocabulary
from .lda import TopicModel
from .pipeline import (
    BENCHMARK_MODELS,
    CLASS_NAMES,
    FeatureSettings,
    TrainedModel,
    classify,
    cluster_feature_matrix,
    cluster_impersonators,
    evaluate_models,
    identify_profiles,
    labels_from_clustering,
    prepare_examples,
    run_benchmark,
    train_on_index,
)
from .records import load_posts, load_profiles
from .similarity import PhotoOracle
from .synth import GeneratorConfig, gen_dataset

DEFAULT_CONFIG = {
    "seed": 0,
    "paths": {
        "profiles": "profiles.jsonl",
        "posts": "posts.jsonl",
        "genuine": "genuine.jsonl",
        "photo_oracle": "photo_oracle.tsv",
        "assignments": "assignments.csv",
        "model": "model.bin",
        "vocabulary": "vocabulary.tsv",
        "topics": "topics.json",
    },
    "synth": {"n_genuine": 10, "n_fan": 100, "n_bot": 100, "separability": "easy", "seed": 0},
    "similarity": {"threshold": 0.30},
    "clustering": {"k": None, "k_min": 1, "k_max": 8, "restarts": 5, "seed": 0},
    "features": {
        "seq_len": 100, "vocab_cap": 30000, "lda_topics": 10,
        "lda_iters": 60, "lda_seed": 0, "reference_ts": 1_580_428_800,
    },
    "balance": {"seed": 0},
    "model": {},
    "train": {"learning_rate": 1e-3, "batch_size": 32, "epochs": 10, "seed": 0},
    "eval": {"folds": 10, "train_frac": 0.75, "rf_trees": 100, "tfidf_cap": 1000,
             "seed": 0, "cv": False},
}


def _deep_merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path, seed_override=None):
    if path is None:
        config = copy.deepcopy(DEFAULT_CONFIG)
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                user = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        unknown = set(user) - set(DEFAULT_CONFIG)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        config = _deep_merge(DEFAULT_CONFIG, user)
    if seed_override is not None:
        config["seed"] = seed_override
        for section in ("synth", "clustering", "balance", "train", "eval"):
            config[section]["seed"] = seed_override
        config["features"]["lda_seed"] = seed_override
    threshold = config["similarity"]["threshold"]
    if not 0.0 < threshold <= 1.0:
        raise ConfigError(f"similarity.threshold must be in (0, 1], got {threshold}")
    return config


def _sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _config_hash(config):
    return hashlib.sha256(
        json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def write_manifest(out_dir, stage, config, inputs, outputs):
    manifest = {
        "stage": stage,
        "version": __version__,
        "config": config,
        "config_sha256": _config_hash(config),
        "seeds": {
            "global": config["seed"],
            "synth": config["synth"]["seed"],
            "clustering": config["clustering"]["seed"],
            "balance": config["balance"]["seed"],
            "train": config["train"]["seed"],
            "eval": config["eval"]["seed"],
            "lda": config["features"]["lda_seed"],
        },
        "input_sha256": {os.path.basename(p): _sha256_file(p) for p in inputs},
        "outputs": [os.path.basename(p) for p in outputs],
        "timestamp_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    path = os.path.join(out_dir, f"{stage}.manifest.json")
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _atomic_write(path, text):
    tmp = str(path) + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _resolve(config, out_dir, key):
    """Config paths are taken relative to the output directory unless

    absolute, so one directory can hold a whole run."""
    path = config["paths"][key]
    if os.path.isabs(path):
        return path
    return os.path.join(out_dir, path)


def _require(path, what):
    if not os.path.exists(path):
        raise ConfigError(f"{what} file not found: {path}")
    return path


def _load_inputs(config, out_dir, with_posts=True):
    profiles = load_profiles(_require(_resolve(config, out_dir, "profiles"), "profiles"))
    genuine = load_profiles(_require(_resolve(config, out_dir, "genuine"), "genuine accounts"))
    oracle = PhotoOracle.from_file(
        _require(_resolve(config, out_dir, "photo_oracle"), "photo oracle"))
    posts = None
    if with_posts:
        posts = load_posts(_require(_resolve(config, out_dir, "posts"), "posts"))
    return profiles, genuine, oracle, posts


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cmd_synth(config, out_dir):
    section = config["synth"]
    gen_config = GeneratorConfig.default(
        n_genuine=section["n_genuine"], n_fan=section["n_fan"],
        n_bot=section["n_bot"], seed=section["seed"],
        separability=section["separability"],
    )
    gen_config.reference_ts = config["features"]["reference_ts"]
    paths = gen_dataset(gen_config, out_dir)
    write_manifest(out_dir, "synth", config, [], list(paths.values()))
    print(f"synth: wrote {len(paths)} files to {out_dir}")
    return 0


def _run_identify(config, out_dir, profiles, genuine, oracle, posts):
    results = identify_profiles(
        profiles, genuine, threshold=config["similarity"]["threshold"], oracle=oracle
    )
    ids, matrix = cluster_feature_matrix(
        profiles, results, posts or [],
        exclude_usernames=[g.username for g in genuine],
    )
    return results, ids, matrix


def cmd_identify(config, out_dir):
    profiles, genuine, oracle, posts = _load_inputs(config, out_dir)
    results, ids, matrix = _run_identify(config, out_dir, profiles, genuine, oracle, posts)
    report_path = os.path.join(out_dir, "similarity_reports.csv")
    lines = ["username,genuine_target,sim_username,sim_full_name,sim_biography,"
             "photo_similar,similar_feature_count,is_impersonator,msf,lsf"]
    for profile in profiles:
        r = results[profile.username]
        rep = r.report
        lines.append(",".join([
            profile.username, rep.genuine_target, repr(rep.sim_username),
            repr(rep.sim_full_name), repr(rep.sim_biography),
            str(int(rep.photo_similar)), str(rep.similar_feature_count),
            str(int(rep.is_impersonator)), str(r.msf), str(r.lsf),
        ]))
    _atomic_write(report_path, "\n".join(lines) + "\n")
    features_path = os.path.join(out_dir, "cluster_features.jsonl")
    _atomic_write(features_path, "".join(
        json.dumps({"profile_id": pid, "features": row.tolist()},
                   sort_keys=True, separators=(",", ":")) + "\n"
        for pid, row in zip(ids, matrix)
    ))
    inputs = [_resolve(config, out_dir, k) for k in ("profiles", "genuine", "photo_oracle", "posts")]
    write_manifest(out_dir, "identify", config, inputs, [report_path, features_path])
    n_imp = len(ids)
    print(f"identify: {n_imp}/{len(profiles)} profiles flagged as impersonators "
          f"({oracle.misses} photo-oracle misses)")
    return 0


def _read_cluster_features(path):
    ids, rows = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                ids.append(payload["profile_id"])
                rows.append([float(v) for v in payload["features"]])
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(str(exc), line_number=lineno, path=path) from exc
    return ids, np.array(rows)


def cmd_cluster(config, out_dir):
    features_path = _require(os.path.join(out_dir, "cluster_features.jsonl"),
                             "cluster features (run identify first)")
    ids, matrix = _read_cluster_features(features_path)
    if len(ids) < 2:
        raise DataError("need at least 2 impersonators to cluster", path=features_path)
    section = config["clustering"]
    k_range = range(section["k_min"], min(section["k_max"], len(ids)) + 1)
    model, Z, curve = cluster_impersonators(
        matrix, k=section["k"], k_range=k_range,
        seed=section["seed"], restarts=section["restarts"],
    )
    from .clustering import assignment_table

    assign, labels, dist, outlier = assignment_table(model, Z)
    assignments_path = os.path.join(out_dir, "assignments.csv")
    lines = ["profile_id,cluster,label,distance,outlier_flag"]
    for i, pid in enumerate(ids):
        lines.append(f"{pid},{int(assign[i])},{labels[i]},{repr(float(dist[i]))},{int(outlier[i])}")
    _atomic_write(assignments_path, "\n".join(lines) + "\n")
    elbow_path = os.path.join(out_dir, "elbow_curve.csv")
    _atomic_write(elbow_path, "k,wcss\n" + "".join(
        f"{k},{repr(curve[k])}\n" for k in sorted(curve)
    ))
    write_manifest(out_dir, "cluster", config, [features_path],
                   [assignments_path, elbow_path])
    counts = {}
    for lbl in labels:
        counts[lbl] = counts.get(lbl, 0) + 1
    print(f"cluster: k={model.k}, sizes {counts}, {int(outlier.sum())} outliers flagged")
    return 0


def _read_assignments(path):
    label_by_user = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        try:
            pid_col = header.index("profile_id")
            label_col = header.index("label")
        except ValueError as exc:
            raise DataError(f"bad assignments header: {header}", path=path) from exc
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != len(header):
                raise DataError("wrong column count", line_number=lineno, path=path)
            label_by_user[parts[pid_col]] = parts[label_col]
    return label_by_user


def _prepared_dataset(config, out_dir, require_labels=True):
    profiles, genuine, oracle, posts = _load_inputs(config, out_dir)
    results = identify_profiles(
        profiles, genuine, threshold=config["similarity"]["threshold"], oracle=oracle
    )
    assignments_path = _require(_resolve(config, out_dir, "assignments"),
                                "assignments (run cluster first)")
    label_by_user = _read_assignments(assignments_path)
    bad = sorted(set(label_by_user.values()) - set(CLASS_NAMES))
    if bad and require_labels:
        raise DataError(f"assignments contain unlabeled clusters {bad}; "
                        "re-run clustering with k=2", path=assignments_path)
    for g in genuine:
        label_by_user[g.username] = "genuine"
    profiles_by_user = {p.username: p for p in profiles}
    for g in genuine:
        profiles_by_user.setdefault(g.username, g)
    prepared = prepare_examples(
        posts, profiles_by_user, results, label_by_user,
        reference_ts=config["features"]["reference_ts"],
    )
    inputs = [_resolve(config, out_dir, k)
              for k in ("profiles", "posts", "genuine", "photo_oracle")]
    inputs.append(assignments_path)
    return prepared, inputs


def _feature_settings(config):
    f = config["features"]
    return FeatureSettings(
        seq_len=f["seq_len"], vocab_cap=f["vocab_cap"], lda_topics=f["lda_topics"],
        lda_iters=f["lda_iters"], lda_seed=f["lda_seed"],
    )


def _train_cfg(config):
    t = config["train"]
    return nn.TrainConfig(
        learning_rate=t["learning_rate"], batch_size=t["batch_size"],
        epochs=t["epochs"], seed=t["seed"],
    )


def cmd_train(config, out_dir):
    prepared, inputs = _prepared_dataset(config, out_dir)
    if len(prepared) == 0:
        raise DataError("no labeled posts to train on")
    train_idx, _ = split(prepared.labels, train_frac=config["eval"]["train_frac"],
                         seed=config["eval"]["seed"])
    model = train_on_index(
        prepared, train_idx, settings=_feature_settings(config),
        model_overrides=config["model"], train_cfg=_train_cfg(config),
        balance_seed=config["balance"]["seed"],
    )
    vocab_path = _resolve(config, out_dir, "vocabulary")
    model.vocab.save(vocab_path)
    topics_path = _resolve(config, out_dir, "topics")
    outputs = [vocab_path]
    if model.topics is not None:
        model.topics.save(topics_path)
        outputs.append(topics_path)
    model_path = _resolve(config, out_dir, "model")
    nn.save_model(
        model_path, model.params, model.model_cfg, model.meta_means, model.meta_stds,
        vocab_hash=model.vocab.content_hash(), class_names=CLASS_NAMES,
        metadata_feature_names=METADATA_FEATURE_NAMES,
    )
    outputs.append(model_path)
    history_path = os.path.join(out_dir, "history.csv")
    _atomic_write(history_path, "epoch,loss\n" + "".join(
        f"{i + 1},{repr(loss)}\n" for i, loss in enumerate(model.history)
    ))
    outputs.append(history_path)
    write_manifest(out_dir, "train", config, inputs, outputs)
    final = model.history[-1] if model.history else float("nan")
    print(f"train: {len(train_idx)} training posts, final epoch loss {final:.4f}, "
          f"model written to {model_path}")
    return 0


def cmd_eval(config, out_dir):
    prepared, inputs = _prepared_dataset(config, out_dir)
    if len(prepared) == 0:
        raise DataError("no labeled posts to evaluate on")
    section = config["eval"]
    settings = _feature_settings(config)
    train_cfg = _train_cfg(config)
    train_idx, test_idx = split(prepared.labels, train_frac=section["train_frac"],
                                seed=section["seed"])
    outputs = []
    if section["cv"]:
        cv_prepared_idx = np.asarray(train_idx)
        from .pipeline import PreparedDataset

        cv_view = PreparedDataset(
            post_ids=[prepared.post_ids[i] for i in cv_prepared_idx],
            base_texts=[prepared.base_texts[i] for i in cv_prepared_idx],
            caption_tokens=[prepared.caption_tokens[i] for i in cv_prepared_idx],
            metadata=prepared.metadata[cv_prepared_idx],
            labels=[prepared.labels[i] for i in cv_prepared_idx],
        )
        report = run_benchmark(
            cv_view, settings=settings, model_overrides=config["model"],
            train_cfg=train_cfg, n_folds=section["folds"], seed=section["seed"],
            balance_seed=config["balance"]["seed"], rf_trees=section["rf_trees"],
            tfidf_cap=section["tfidf_cap"],
        )
        print("cross-validation on the training portion:")
        print(report.table())
        cv_path = os.path.join(out_dir, "cv_report.csv")
        header = "model," + ",".join(
            f"{m}_{s}" for m in ("accuracy", "precision", "recall", "f1")
            for s in ("mean", "std")
        )
        rows = [header]
        for name in BENCHMARK_MODELS:
            row = report.rows[name]
            rows.append(name + "," + ",".join(
                repr(row[f"{m}_{s}"]) for m in ("accuracy", "precision", "recall", "f1")
                for s in ("mean", "std")
            ))
        _atomic_write(cv_path, "\n".join(rows) + "\n")
        outputs.append(cv_path)
        folds_path = os.path.join(out_dir, "cv_folds.jsonl")
        _atomic_write(folds_path, "".join(
            json.dumps({"fold": i, "metrics": fm}, sort_keys=True, separators=(",", ":")) + "\n"
            for i, fm in enumerate(report.fold_metrics)
        ))
        outputs.append(folds_path)

    results = evaluate_models(
        prepared, train_idx, test_idx, settings=settings,
        model_overrides=config["model"], train_cfg=train_cfg,
        balance_seed=config["balance"]["seed"], rf_trees=section["rf_trees"],
        tfidf_cap=section["tfidf_cap"], seed=section["seed"],
    )
    print("held-out test metrics:")
    holdout_path = os.path.join(out_dir, "holdout_report.csv")
    lines = ["model,accuracy,precision,recall,f1"]
    for name in BENCHMARK_MODELS:
        rep = results[name]
        print(f"  {name:<18} acc {rep.accuracy:.4f}  P {rep.macro_precision:.4f}  "
              f"R {rep.macro_recall:.4f}  F1 {rep.macro_f1:.4f}")
        lines.append(",".join([
            name, repr(rep.accuracy), repr(rep.macro_precision),
            repr(rep.macro_recall), repr(rep.macro_f1),
        ]))
    _atomic_write(holdout_path, "\n".join(lines) + "\n")
    outputs.append(holdout_path)
    write_manifest(out_dir, "eval", config, inputs, outputs)
    return 0


def cmd_predict(config, out_dir, posts_path):
    posts_path = _require(posts_path, "posts")
    profiles, genuine, oracle, _ = _load_inputs(config, out_dir, with_posts=False)
    posts = load_posts(posts_path)
    verdicts_path = os.path.join(out_dir, "verdicts.jsonl")
    model_path = _require(_resolve(config, out_dir, "model"), "model (run train first)")
    vocab_path = _require(_resolve(config, out_dir, "vocabulary"), "vocabulary")
    params, model_cfg, means, stds, header = nn.load_model(model_path)
    vocab = Vocabulary.load(vocab_path)
    if header["vocab_sha256"] and vocab.content_hash() != header["vocab_sha256"]:
        raise DataError("vocabulary file does not match the model container",
                        path=vocab_path)
    topics_path = _resolve(config, out_dir, "topics")
    topics = TopicModel.load(topics_path) if os.path.exists(topics_path) else None

    if posts:
        results = identify_profiles(
            profiles, genuine, threshold=config["similarity"]["threshold"], oracle=oracle
        )
        profiles_by_user = {p.username: p for p in profiles}
        for g in genuine:
            profiles_by_user.setdefault(g.username, g)
        prepared = prepare_examples(
            posts, profiles_by_user, results, None,
            reference_ts=config["features"]["reference_ts"],
        )
        model = TrainedModel(
            params=params, model_cfg=model_cfg, vocab=vocab,
            meta_means=means, meta_stds=stds, topics=topics,
        )
        labels, probs = classify(model, prepared)
        lines = [
            json.dumps({
                "post_id": prepared.post_ids[i],
                "label": labels[i],
                "probs": [float(p) for p in probs[i]],
            }, sort_keys=True, separators=(",", ":")) + "\n"
            for i in range(len(labels))
        ]
        _atomic_write(verdicts_path, "".join(lines))
    else:
        _atomic_write(verdicts_path, "")
    inputs = [posts_path, model_path, vocab_path]
    write_manifest(out_dir, "predict", config, inputs, [verdicts_path])
    print(f"predict: {len(posts)} posts -> {verdicts_path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="doppel",
        description="Impersonator screening and bot/fan/genuine post classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("synth", "generate a synthetic labeled population"),
        ("identify", "score profiles against genuine accounts"),
        ("cluster", "split identified impersonators into bots and fans"),
        ("train", "train the neural post classifier"),
        ("eval", "benchmark the classifier against the baselines"),
        ("predict", "classify posts with a trained model"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--out-dir", default=".", help="run directory for outputs")
        p.add_argument("--seed", type=int, default=None,
                       help="override every stage seed")
        if name == "predict":
            p.add_argument("--posts", required=True, help="posts JSONL to classify")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, seed_override=args.seed)
        os.makedirs(args.out_dir, exist_ok=True)
        if args.command == "synth":
            return cmd_synth(config, args.out_dir)
        if args.command == "identify":
            return cmd_identify(config, args.out_dir)
        if args.command == "cluster":
            return cmd_cluster(config, args.out_dir)
        if args.command == "train":
            return cmd_train(config, args.out_dir)
        if args.command == "eval":
            return cmd_eval(config, args.out_dir)
        if args.command == "predict":
            return cmd_predict(config, args.out_dir, args.posts)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
