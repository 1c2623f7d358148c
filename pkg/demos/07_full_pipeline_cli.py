"""Drive the whole pipeline through the command-line interface.

Each stage writes its outputs plus a manifest into one run directory;
re-running with the same config reproduces every file byte for byte.

Run: python demos/07_full_pipeline_cli.py
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

CONFIG = {
    "synth": {"n_genuine": 6, "n_fan": 50, "n_bot": 50, "separability": "easy", "seed": 21},
    "features": {"seq_len": 50, "lda_topics": 4, "lda_iters": 25},
    "model": {"embed_dim": 12, "conv_filters": 8, "conv_kernel": 3, "lstm_units": 8,
              "text_dense": 8, "meta_dense": 8, "head_dense": 8},
    "train": {"epochs": 3, "learning_rate": 0.003, "seed": 9},
    "eval": {"rf_trees": 25},
}


def run(*args):
    print(f"$ {' '.join(args)}")
    proc = subprocess.run([sys.executable, "-m", "doppel.cli", *args],
                          capture_output=True, text=True)
    sys.stdout.write(proc.stdout)
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(proc.returncode)


with tempfile.TemporaryDirectory() as tmp:
    run_dir = Path(tmp) / "run"
    cfg_path = Path(tmp) / "config.json"
    cfg_path.write_text(json.dumps(CONFIG, indent=2))

    for stage in ("synth", "identify", "cluster", "train", "eval"):
        run(stage, "--config", str(cfg_path), "--out-dir", str(run_dir))

    # classify a handful of fresh posts with the trained model
    posts = (run_dir / "posts.jsonl").read_text().splitlines()[:4]
    new_posts = Path(tmp) / "new_posts.jsonl"
    new_posts.write_text("\n".join(posts) + "\n")
    run("predict", "--config", str(cfg_path), "--out-dir", str(run_dir),
        "--posts", str(new_posts))

    print("\nverdicts:")
    for line in (run_dir / "verdicts.jsonl").read_text().splitlines():
        print(f"  {line}")
    print("\nrun directory contents:")
    for path in sorted(run_dir.iterdir()):
        print(f"  {path.name}")
