"""Versioned binary model container.

Layout (all multi-byte data little-endian):

    line 1:  b"DOPPELMODEL1\\n" magic
    line 2:  JSON header + b"\\n" -- format_version, the ModelConfig dict,
             class names, the SHA-256 of the vocabulary file, metadata
             feature names, and an ordered array manifest
             [{"name", "shape", "dtype": "<f8"}, ...]
    rest:    the arrays' raw C-order bytes, concatenated in manifest order

Arrays are float64 throughout, so save/load round-trips bit-exactly and
two runs with identical inputs produce identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np

from ..errors import DataError
from .model import ModelConfig, ModelParams, PARAM_NAMES

MAGIC = b"DOPPELMODEL1\n"
_EXTRA_ARRAYS = ("meta_means", "meta_stds")


def save_model(path, params: ModelParams, cfg: ModelConfig,
               meta_means, meta_stds, vocab_hash: str = "",
               class_names=("bot", "fan", "genuine"),
               metadata_feature_names=()) -> None:
    """Write the container atomically (temp file + rename)."""
    arrays = {name: np.asarray(params[name], dtype="<f8") for name in PARAM_NAMES}
    arrays["meta_means"] = np.asarray(meta_means, dtype="<f8")
    arrays["meta_stds"] = np.asarray(meta_stds, dtype="<f8")
    manifest = [
        {"name": name, "shape": list(arrays[name].shape), "dtype": "<f8"}
        for name in list(PARAM_NAMES) + list(_EXTRA_ARRAYS)
    ]
    header = {
        "format_version": 1,
        "config": cfg.to_dict(),
        "class_names": list(class_names),
        "vocab_sha256": vocab_hash,
        "metadata_feature_names": list(metadata_feature_names),
        "arrays": manifest,
    }
    tmp = str(path) + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8"))
        fh.write(b"\n")
        for entry in manifest:
            fh.write(np.ascontiguousarray(arrays[entry["name"]]).tobytes())
    os.replace(tmp, path)


def load_model(path):
    """Read a container; returns (params, config, meta_means, meta_stds, header)."""
    with open(path, "rb") as fh:
        magic = fh.readline()
        if magic != MAGIC:
            raise DataError("not a model container (bad magic)", path=path)
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("format_version") != 1:
            raise DataError(f"unsupported format_version {header.get('format_version')}", path=path)
        arrays = {}
        for entry in header["arrays"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(count * 8)
            if len(buf) != count * 8:
                raise DataError(f"truncated array {entry['name']}", path=path)
            arrays[entry["name"]] = np.frombuffer(buf, dtype="<f8").reshape(shape).copy()
    cfg = ModelConfig(**header["config"])
    params = ModelParams({name: arrays[name] for name in PARAM_NAMES})
    return params, cfg, arrays["meta_means"], arrays["meta_stds"], header
