"""Portable container for the network parameters.

A weight file is a JSON manifest naming every tensor with its shape and
byte offset, plus the global hyperparameters, and a sibling raw blob of
little-endian float32 values laid out in manifest order. The tensor
naming scheme is fixed so files are exchangeable between
implementations:

    gen.enc.{w0,b0,w1,b1}
    gen.block{K}.attn.{wq,bq,wk,bk,wv,bv,wo,bo}
    gen.block{K}.{ln1,ln2}.{g,b}
    gen.block{K}.ffn.{w0,b0,w1,b1}
    gen.dec.{w,b}
    disc.enc.*  disc.h_const  disc.block{K}.*  disc.dec.{w,b}
    aux.enc.*   aux.pos       aux.block{K}.*   aux.dec.{w,b}

Weight matrices are stored input-major: y = x @ w + b.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .core import ParseError, ValidationError

MANIFEST_FORMAT = "layout-weights/1"


@dataclass(frozen=True)
class HyperParams:
    vocab_size: int
    d_z: int = 4
    d_model: int = 256
    d_ffn: int = 128
    heads: int = 4
    blocks: int = 8
    max_elements: int = 9

    def __post_init__(self):
        if self.vocab_size < 1:
            raise ValidationError("vocab_size must be >= 1")
        for name in ("d_z", "d_model", "d_ffn", "heads", "blocks", "max_elements"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.d_model % self.heads != 0:
            raise ValidationError(
                f"heads ({self.heads}) must divide d_model ({self.d_model})"
            )

    def to_dict(self) -> dict:
        return {
            "vocab_size": self.vocab_size,
            "d_z": self.d_z,
            "d_model": self.d_model,
            "d_ffn": self.d_ffn,
            "heads": self.heads,
            "blocks": self.blocks,
            "max_elements": self.max_elements,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "HyperParams":
        try:
            return cls(**{k: int(obj[k]) for k in (
                "vocab_size", "d_z", "d_model", "d_ffn", "heads", "blocks", "max_elements"
            )})
        except KeyError as e:
            raise ParseError(f"hyperparameters missing field {e}") from None


def _block_schema(prefix: str, hp: HyperParams) -> list[tuple[str, tuple[int, ...]]]:
    d, f = hp.d_model, hp.d_ffn
    names = []
    for k in range(hp.blocks):
        b = f"{prefix}.block{k}"
        names += [
            (f"{b}.attn.wq", (d, d)), (f"{b}.attn.bq", (d,)),
            (f"{b}.attn.wk", (d, d)), (f"{b}.attn.bk", (d,)),
            (f"{b}.attn.wv", (d, d)), (f"{b}.attn.bv", (d,)),
            (f"{b}.attn.wo", (d, d)), (f"{b}.attn.bo", (d,)),
            (f"{b}.ln1.g", (d,)), (f"{b}.ln1.b", (d,)),
            (f"{b}.ffn.w0", (d, f)), (f"{b}.ffn.b0", (f,)),
            (f"{b}.ffn.w1", (f, d)), (f"{b}.ffn.b1", (d,)),
            (f"{b}.ln2.g", (d,)), (f"{b}.ln2.b", (d,)),
        ]
    return names


def weight_schema(hp: HyperParams) -> list[tuple[str, tuple[int, ...]]]:
    """Ordered (name, shape) pairs for every tensor the container holds."""
    d, v = hp.d_model, hp.vocab_size
    schema = [
        ("gen.enc.w0", (hp.d_z + v, d)), ("gen.enc.b0", (d,)),
        ("gen.enc.w1", (d, d)), ("gen.enc.b1", (d,)),
    ]
    schema += _block_schema("gen", hp)
    schema += [("gen.dec.w", (d, 4)), ("gen.dec.b", (4,))]
    schema += [
        ("disc.enc.w0", (4 + v, d)), ("disc.enc.b0", (d,)),
        ("disc.enc.w1", (d, d)), ("disc.enc.b1", (d,)),
        ("disc.h_const", (d,)),
    ]
    schema += _block_schema("disc", hp)
    schema += [("disc.dec.w", (d, 1)), ("disc.dec.b", (1,))]
    schema += [
        ("aux.enc.w0", (2 * d, d)), ("aux.enc.b0", (d,)),
        ("aux.enc.w1", (d, d)), ("aux.enc.b1", (d,)),
        ("aux.pos", (hp.max_elements, d)),
    ]
    schema += _block_schema("aux", hp)
    schema += [("aux.dec.w", (d, 4 + v)), ("aux.dec.b", (4 + v,))]
    return schema


@dataclass(frozen=True)
class NetworkWeights:
    """Validated named-tensor container; tensors are float32 and immutable."""

    hp: HyperParams
    tensors: dict[str, np.ndarray]

    def __init__(self, hp: HyperParams, tensors: dict):
        schema = weight_schema(hp)
        expected = dict(schema)
        unknown = set(tensors) - set(expected)
        if unknown:
            raise ValidationError(f"unknown tensor names: {sorted(unknown)[:3]}")
        validated = {}
        for name, shape in schema:
            if name not in tensors:
                raise ValidationError(f"missing tensor {name!r} (expected shape {shape})")
            arr = np.array(tensors[name], dtype=np.float32)
            if arr.shape != shape:
                raise ValidationError(
                    f"tensor {name!r} has shape {arr.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"tensor {name!r} contains non-finite values")
            arr.flags.writeable = False
            validated[name] = arr
        object.__setattr__(self, "hp", hp)
        object.__setattr__(self, "tensors", validated)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]


def random_weights(seed: int, vocab_size: int, **hp_overrides) -> NetworkWeights:
    """Seeded random initialization: useful for tests and demos.

    Linear layers draw from N(0, 1/fan_in); biases start at zero, layer
    norms at identity, positional embeddings uniform on [0, 1).
    """
    hp = HyperParams(vocab_size=vocab_size, **hp_overrides)
    rng = np.random.default_rng(seed)
    tensors = {}
    for name, shape in weight_schema(hp):
        leaf = name.rsplit(".", 1)[-1]
        if name.endswith(".pos"):
            tensors[name] = rng.uniform(0.0, 1.0, size=shape)
        elif name == "disc.h_const":
            tensors[name] = rng.normal(0.0, 1.0, size=shape)
        elif leaf.startswith("w"):
            fan_in = shape[0]
            tensors[name] = rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=shape)
        elif leaf == "g":
            tensors[name] = np.ones(shape)
        else:
            tensors[name] = np.zeros(shape)
    return NetworkWeights(hp, tensors)


def zero_weights(vocab_size: int, **hp_overrides) -> NetworkWeights:
    """Every tensor zero, including layer-norm gains."""
    hp = HyperParams(vocab_size=vocab_size, **hp_overrides)
    return NetworkWeights(hp, {name: np.zeros(shape) for name, shape in weight_schema(hp)})


def _blob_path(manifest_path) -> str:
    root, _ = os.path.splitext(os.fspath(manifest_path))
    return root + ".bin"


def save_weights(weights: NetworkWeights, path) -> None:
    """Write the manifest JSON and its float32 blob next to it."""
    schema = weight_schema(weights.hp)
    entries = []
    offset = 0
    chunks = []
    for name, shape in schema:
        raw = weights[name].astype("<f4").tobytes()
        entries.append({"name": name, "shape": list(shape), "offset": offset})
        offset += len(raw)
        chunks.append(raw)
    blob_path = _blob_path(path)
    manifest = {
        "format": MANIFEST_FORMAT,
        "hyperparameters": weights.hp.to_dict(),
        "blob": os.path.basename(blob_path),
        "blob_bytes": offset,
        "tensors": entries,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=1)
        f.write("\n")
    with open(blob_path, "wb") as f:
        f.write(b"".join(chunks))


def load_weights(path) -> NetworkWeights:
    """Read and validate a weight container written by save_weights."""
    with open(path, encoding="utf-8") as f:
        try:
            manifest = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: not valid JSON ({e})") from None
    if not isinstance(manifest, dict) or manifest.get("format") != MANIFEST_FORMAT:
        raise ParseError(f"{path}: not a {MANIFEST_FORMAT} manifest")
    hp = HyperParams.from_dict(manifest.get("hyperparameters", {}))
    entries = manifest.get("tensors")
    if not isinstance(entries, list):
        raise ParseError(f"{path}: manifest 'tensors' must be a list")

    blob_path = os.path.join(os.path.dirname(os.fspath(path)) or ".", manifest.get("blob", ""))
    with open(blob_path, "rb") as f:
        blob = f.read()

    expected = dict(weight_schema(hp))
    tensors = {}
    for entry in entries:
        name = entry.get("name")
        if name not in expected:
            raise ValidationError(f"{path}: unknown tensor name {name!r}")
        shape = tuple(entry.get("shape", ()))
        if shape != expected[name]:
            raise ValidationError(
                f"{path}: tensor {name!r} declares shape {shape}, expected {expected[name]}"
            )
        offset = int(entry.get("offset", -1))
        nbytes = 4 * int(np.prod(shape)) if shape else 4
        if offset < 0 or offset + nbytes > len(blob):
            raise ValidationError(
                f"{path}: blob truncated reading {name!r} "
                f"(need {offset + nbytes} bytes, blob has {len(blob)})"
            )
        tensors[name] = np.frombuffer(
            blob, dtype="<f4", count=int(np.prod(shape)), offset=offset
        ).reshape(shape)
    return NetworkWeights(hp, tensors)
