"""JSON checkpoints.

Layout::

    {
      "format": "propall-checkpoint",
      "version": 1,
      "architecture": {"widths": [784, 300, ..., 10], "batch_norm": true},
      "layers": [
        {"kind": "linear", "weight": [[...], ...], "bias": [...]},
        {"kind": "batch_norm", "eps": 1e-05, "momentum": 0.1,
         "scale": [...], "shift": [...], "running_mean": [...], "running_var": [...]},
        {"kind": "relu"},
        ...
      ],
      "scaler": {"mode": "minmax", "offset": [...], "scale": [...]} | null
    }

Floats are written with their shortest round-trip text, so a loaded model
reproduces eval-mode logits bit for bit.
"""

import json
import os
from typing import Any

import numpy as np

from ..datasets import FeatureScaler
from ..exceptions import FormatError
from ..helpers import read_bytes, write_bytes
from .layers import BatchNorm, Layer, Linear, ReLU
from .model import ArchitectureSpec, MlpModel, build_layers

CHECKPOINT_FORMAT = "propall-checkpoint"
CHECKPOINT_VERSION = 1


def checkpoint_document(model: MlpModel, scaler: FeatureScaler | None = None) -> dict[str, Any]:
    layers = []
    for layer in model.layers:
        entry: dict[str, Any] = {"kind": layer.kind}
        entry.update(layer.config())
        for name, value in {**layer.parameters(), **layer.buffers()}.items():
            entry[name] = value.tolist()
        layers.append(entry)
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "architecture": {"widths": list(model.arch.widths), "batch_norm": model.arch.batch_norm},
        "layers": layers,
        "scaler": None if scaler is None else scaler.to_dict(),
    }


def save_checkpoint(model: MlpModel, path: str | os.PathLike, scaler: FeatureScaler | None = None) -> None:
    text = json.dumps(checkpoint_document(model, scaler), separators=(",", ":"))
    write_bytes(path, (text + "\n").encode("utf-8"))


def _array(entry: dict[str, Any], name: str, shape: tuple[int, ...]) -> np.ndarray:
    value = np.asarray(entry.get(name), dtype=np.float64)
    if value.shape != shape:
        raise FormatError(f"checkpoint {entry['kind']}.{name} has shape {value.shape}, expected {shape}")
    return value


def model_from_document(doc: dict[str, Any]) -> tuple[MlpModel, FeatureScaler | None]:
    if not isinstance(doc, dict):
        raise FormatError(f"checkpoint must be a JSON object, got {type(doc).__name__}")
    if doc.get("format") != CHECKPOINT_FORMAT or doc.get("version") != CHECKPOINT_VERSION:
        raise FormatError("not a version 1 propall checkpoint")
    try:
        arch = ArchitectureSpec(tuple(doc["architecture"]["widths"]), bool(doc["architecture"]["batch_norm"]))
        linears = [
            Linear(_array(e, "weight", (fan_out, fan_in)), _array(e, "bias", (fan_out,)))
            for e, fan_in, fan_out in zip(
                [e for e in doc["layers"] if e["kind"] == "linear"], arch.widths[:-1], arch.widths[1:]
            )
        ]
        layers: list[Layer] = build_layers(arch, linears)
        if [e["kind"] for e in doc["layers"]] != [layer.kind for layer in layers]:
            raise FormatError("checkpoint layer list does not match its architecture")
        for layer, entry in zip(layers, doc["layers"]):
            if isinstance(layer, BatchNorm):
                width = layer.scale.shape[0]
                layer.eps = float(entry["eps"])
                layer.momentum = float(entry["momentum"])
                for name in ("scale", "shift", "running_mean", "running_var"):
                    setattr(layer, name, _array(entry, name, (width,)))
            elif not isinstance(layer, (Linear, ReLU)):
                raise FormatError(f"unknown layer kind {layer.kind}")
        scaler = None if doc.get("scaler") is None else FeatureScaler.from_dict(doc["scaler"])
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed checkpoint: {e}") from e
    return MlpModel(arch, layers), scaler


def load_checkpoint(path: str | os.PathLike) -> tuple[MlpModel, FeatureScaler | None]:
    try:
        doc = json.loads(read_bytes(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"{path} is not a JSON checkpoint: {e}") from e
    return model_from_document(doc)
