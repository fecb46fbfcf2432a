"""Deterministic forward passes for the layout generator family.

The generator maps per-element latent codes plus label conditioning
through a positional-encoding-free transformer to sigmoid-bounded boxes,
so its output is equivariant under permutation of the inputs. The
discriminator reads a learnable constant token after the transformer,
which makes its realism scalar permutation invariant. An auxiliary
decoder reconstructs boxes and labels from that constant token.

All math runs in float64 regardless of the float32 storage dtype; no
training happens here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LabelVocabulary, Layout, ValidationError, layout_from_array
from .metrics import alignment_from_array, overlap_from_array
from .weights import NetworkWeights

LAYER_NORM_EPS = 1e-5


@dataclass(frozen=True)
class LatentCodes:
    """One latent row vector per element."""

    z: np.ndarray

    def __init__(self, z):
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 2:
            raise ValidationError(f"latent codes must be N x d_z, got shape {z.shape}")
        if not np.all(np.isfinite(z)):
            raise ValidationError("latent codes contain non-finite values")
        object.__setattr__(self, "z", z)

    @property
    def count(self) -> int:
        return self.z.shape[0]

    @property
    def d_z(self) -> int:
        return self.z.shape[1]


def sample_latents(seed, n: int, d_z: int = 4) -> LatentCodes:
    rng = np.random.default_rng(seed)
    return LatentCodes(rng.standard_normal((n, d_z)))


def _z_matrix(z) -> np.ndarray:
    if isinstance(z, LatentCodes):
        return z.z
    return LatentCodes(z).z


def _one_hot(labels, size: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.intp)
    if labels.ndim != 1:
        raise ValidationError("labels must be a flat sequence")
    if np.any(labels < 0) or np.any(labels >= size):
        raise ValidationError(f"label ids must be in [0, {size}), got {labels.tolist()}")
    out = np.zeros((labels.shape[0], size))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=-1, keepdims=True)


def _layer_norm(x: np.ndarray, g: np.ndarray, b: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + LAYER_NORM_EPS) * g + b


class _Params:
    """Float64 view of a tensor subtree, keyed by suffix under a prefix."""

    def __init__(self, weights: NetworkWeights, prefix: str):
        self._w = weights
        self._prefix = prefix
        self._cache: dict[str, np.ndarray] = {}

    def __getitem__(self, suffix: str) -> np.ndarray:
        arr = self._cache.get(suffix)
        if arr is None:
            arr = self._w[f"{self._prefix}.{suffix}"].astype(np.float64)
            self._cache[suffix] = arr
        return arr


def _mlp2(x: np.ndarray, p: _Params, stem: str) -> np.ndarray:
    hidden = np.maximum(x @ p[f"{stem}.w0"] + p[f"{stem}.b0"], 0.0)
    return hidden @ p[f"{stem}.w1"] + p[f"{stem}.b1"]


def _attention(x: np.ndarray, p: _Params, block: str, heads: int) -> np.ndarray:
    n, d = x.shape
    dh = d // heads
    q = (x @ p[f"{block}.attn.wq"] + p[f"{block}.attn.bq"]).reshape(n, heads, dh)
    k = (x @ p[f"{block}.attn.wk"] + p[f"{block}.attn.bk"]).reshape(n, heads, dh)
    v = (x @ p[f"{block}.attn.wv"] + p[f"{block}.attn.bv"]).reshape(n, heads, dh)
    # (heads, n, n) attention over the full set, no mask
    scores = np.einsum("ihd,jhd->hij", q, k) / np.sqrt(dh)
    attn = _softmax(scores)
    mixed = np.einsum("hij,jhd->ihd", attn, v).reshape(n, d)
    return mixed @ p[f"{block}.attn.wo"] + p[f"{block}.attn.bo"]


def _transformer(x: np.ndarray, p: _Params, blocks: int, heads: int) -> np.ndarray:
    for kb in range(blocks):
        block = f"block{kb}"
        x = _layer_norm(x + _attention(x, p, block, heads), p[f"{block}.ln1.g"], p[f"{block}.ln1.b"])
        hidden = np.maximum(x @ p[f"{block}.ffn.w0"] + p[f"{block}.ffn.b0"], 0.0)
        x = _layer_norm(x + hidden @ p[f"{block}.ffn.w1"] + p[f"{block}.ffn.b1"],
                        p[f"{block}.ln2.g"], p[f"{block}.ln2.b"])
    return x


def generator_forward_array(weights: NetworkWeights, z, labels) -> np.ndarray:
    """N x 4 sigmoid-bounded boxes for latent codes and a label multiset."""
    zmat = _z_matrix(z)
    hp = weights.hp
    if zmat.shape[1] != hp.d_z:
        raise ValidationError(f"latent dim {zmat.shape[1]} does not match weights d_z {hp.d_z}")
    onehot = _one_hot(labels, hp.vocab_size)
    if onehot.shape[0] != zmat.shape[0]:
        raise ValidationError(f"{zmat.shape[0]} latent rows but {onehot.shape[0]} labels")
    p = _Params(weights, "gen")
    h = _mlp2(np.concatenate([zmat, onehot], axis=1), p, "enc")
    h = _transformer(h, p, hp.blocks, hp.heads)
    return _sigmoid(h @ p["dec.w"] + p["dec.b"])


def generator_forward(weights: NetworkWeights, z, labels) -> Layout:
    return layout_from_array(generator_forward_array(weights, z, labels), list(labels))


def discriminator_forward_array(weights: NetworkWeights, boxes: np.ndarray, labels) -> tuple[float, np.ndarray]:
    """Realism scalar plus the constant token's transformer output."""
    boxes = np.asarray(boxes, dtype=np.float64)
    hp = weights.hp
    onehot = _one_hot(labels, hp.vocab_size)
    if boxes.shape != (onehot.shape[0], 4):
        raise ValidationError(f"expected boxes of shape ({onehot.shape[0]}, 4), got {boxes.shape}")
    p = _Params(weights, "disc")
    h = _mlp2(np.concatenate([boxes, onehot], axis=1), p, "enc")
    tokens = np.concatenate([weights["disc.h_const"].astype(np.float64)[None, :], h], axis=0)
    out = _transformer(tokens, p, hp.blocks, hp.heads)
    h_const_out = out[0]
    y = float((h_const_out @ p["dec.w"] + p["dec.b"])[0])
    return y, h_const_out


def discriminator_forward(weights: NetworkWeights, layout: Layout) -> float:
    """Raw realism score of a layout; higher reads as more real."""
    y, _ = discriminator_forward_array(weights, layout.boxes_array(), layout.labels)
    return y


def aux_decoder_forward(weights: NetworkWeights, h_const_out: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Reconstruct n boxes and label distributions from the constant token."""
    hp = weights.hp
    if n < 1 or n > hp.max_elements:
        raise ValidationError(
            f"cannot decode {n} elements: positional capacity is {hp.max_elements}"
        )
    h_const_out = np.asarray(h_const_out, dtype=np.float64)
    if h_const_out.shape != (hp.d_model,):
        raise ValidationError(f"expected a {hp.d_model}-vector, got shape {h_const_out.shape}")
    p = _Params(weights, "aux")
    pos = weights["aux.pos"].astype(np.float64)[:n]
    stacked = np.concatenate([np.repeat(h_const_out[None, :], n, axis=0), pos], axis=1)
    h = _mlp2(stacked, p, "enc")
    h = _transformer(h, p, hp.blocks, hp.heads)
    out = h @ p["dec.w"] + p["dec.b"]
    boxes = _sigmoid(out[:, :4])
    probs = _softmax(out[:, 4:])
    return boxes, probs


def reconstruction_loss(predicted: tuple[np.ndarray, np.ndarray], target: Layout) -> float:
    """Box MSE plus label cross-entropy against lexicographically sorted targets.

    Targets are sorted ascending by (yc, xc, w, h) and paired with the
    predictions in slot order, so the loss does not depend on the
    target's storage order.
    """
    boxes, probs = predicted
    boxes = np.asarray(boxes, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    n = len(target)
    if boxes.shape[0] != n or probs.shape[0] != n:
        raise ValidationError(
            f"prediction count {boxes.shape[0]} does not match target count {n}"
        )
    tb = target.boxes_array()
    tl = np.asarray(target.labels, dtype=np.intp)
    order = np.lexsort((tb[:, 3], tb[:, 2], tb[:, 0], tb[:, 1]))
    tb, tl = tb[order], tl[order]
    mse = float(np.mean((boxes - tb) ** 2))
    picked = np.clip(probs[np.arange(n), tl], 1e-300, None)
    ce = float(-np.log(picked).mean())
    return mse + ce


def gan_objective_eval(weights: NetworkWeights, real_layout: Layout, z) -> dict:
    """Evaluate the adversarial objective's terms at one point, no updates."""
    d_real, h_const_out = discriminator_forward_array(
        weights, real_layout.boxes_array(), real_layout.labels
    )
    fake_boxes = generator_forward_array(weights, z, real_layout.labels)
    d_fake, _ = discriminator_forward_array(weights, fake_boxes, real_layout.labels)
    rec = reconstruction_loss(
        aux_decoder_forward(weights, h_const_out, len(real_layout)), real_layout
    )
    return {
        "d_real": d_real,
        "d_fake": d_fake,
        "rec_loss": rec,
        "total": d_real - rec + (1.0 - d_fake),
    }


class GeneratorHandle:
    """A paired generator and discriminator ready for latent optimization.

    Exposes array-level entry points for the optimizer's inner loop and
    layout-level convenience wrappers. Instances are immutable and safe
    to share across concurrent solves.
    """

    def __init__(self, kind: str, d_z: int, vocab_size: int, max_elements: int | None,
                 generate_array, realism_array, descriptor: dict):
        self.kind = kind
        self.d_z = d_z
        self.vocab_size = vocab_size
        self.max_elements = max_elements
        self.generate_array = generate_array
        self.realism_array = realism_array
        self.descriptor = descriptor

    def generate(self, z, labels) -> Layout:
        return layout_from_array(self.generate_array(_z_matrix(z), labels), list(labels))

    def realism(self, layout: Layout) -> float:
        return self.realism_array(layout.boxes_array(), layout.labels)


def make_analytic_generator(seed: int, vocab: LabelVocabulary | int, d_z: int = 4) -> GeneratorHandle:
    """Desk-scale generator stand-in: a seeded affine map through a sigmoid.

    The paired discriminator scores realism as the negated sum of the
    alignment and overlap metrics, so zero is perfect and any overlap or
    misalignment is penalized.
    """
    if d_z < 1:
        raise ValidationError(f"d_z must be >= 1, got {d_z}")
    vocab_size = vocab.size if isinstance(vocab, LabelVocabulary) else int(vocab)
    rng = np.random.default_rng(seed)
    w = rng.normal(0.0, 1.0 / np.sqrt(d_z), size=(d_z, 4))
    u = rng.normal(0.0, 0.5, size=(vocab_size, 4))
    c = np.array([0.0, 0.0, -1.0, -1.0])

    def generate_array(zmat, labels):
        zmat = np.asarray(zmat, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.intp)
        if np.any(labels < 0) or np.any(labels >= vocab_size):
            raise ValidationError(f"label ids must be in [0, {vocab_size})")
        return _sigmoid(zmat @ w + u[labels] + c)

    def realism_array(boxes, labels, cache=None):
        del labels
        if cache is not None:
            if "alignment" not in cache:
                cache["alignment"] = alignment_from_array(boxes)
            if "overlap" not in cache:
                cache["overlap"] = overlap_from_array(boxes)
            return -(cache["alignment"] + cache["overlap"])
        return -(alignment_from_array(boxes) + overlap_from_array(boxes))

    return GeneratorHandle(
        kind="analytic",
        d_z=d_z,
        vocab_size=vocab_size,
        max_elements=None,
        generate_array=generate_array,
        realism_array=realism_array,
        descriptor={"kind": "analytic", "seed": int(seed), "vocab_size": vocab_size, "d_z": d_z},
    )


def make_network_handle(weights: NetworkWeights, ref: str | None = None) -> GeneratorHandle:
    """Wrap a trained (or test) weight container as a generator handle."""

    def generate_array(zmat, labels):
        return generator_forward_array(weights, zmat, labels)

    def realism_array(boxes, labels, cache=None):
        del cache
        y, _ = discriminator_forward_array(weights, boxes, labels)
        return y

    return GeneratorHandle(
        kind="layoutganpp",
        d_z=weights.hp.d_z,
        vocab_size=weights.hp.vocab_size,
        max_elements=weights.hp.max_elements,
        generate_array=generate_array,
        realism_array=realism_array,
        descriptor={"kind": "weights", "ref": ref} if ref else {"kind": "weights"},
    )
