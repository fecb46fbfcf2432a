"""Pure-Python reference forward passes used as an oracle for the network.

Written independently of the library's vectorized implementation: plain
lists, explicit loops, and math-module scalars only. Used to produce the
frozen golden files and to cross-check the real implementation on small
configurations. numpy appears only to unpack stored weight tensors into
lists.
"""

from __future__ import annotations

import math

LN_EPS = 1e-5


def _t(weights, name):
    """Tensor as nested Python lists of floats."""
    return weights[name].astype(float).tolist()


def vec_add(a, b):
    return [x + y for x, y in zip(a, b)]


def mat_vec(w, x):
    """w is input-major (in, out): result[j] = sum_i x[i] w[i][j]."""
    out_dim = len(w[0])
    out = [0.0] * out_dim
    for i, xi in enumerate(x):
        row = w[i]
        for j in range(out_dim):
            out[j] += xi * row[j]
    return out


def linear(x, w, b):
    return vec_add(mat_vec(w, x), b)


def relu(x):
    return [v if v > 0.0 else 0.0 for v in x]


def sigmoid_scalar(v):
    if v >= 0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


def softmax(x):
    m = max(x)
    e = [math.exp(v - m) for v in x]
    s = sum(e)
    return [v / s for v in e]


def layer_norm(x, g, b):
    n = len(x)
    mean = sum(x) / n
    var = sum((v - mean) ** 2 for v in x) / n
    denom = math.sqrt(var + LN_EPS)
    return [(v - mean) / denom * gi + bi for v, gi, bi in zip(x, g, b)]


def mlp2(x, weights, stem):
    hidden = relu(linear(x, _t(weights, f"{stem}.w0"), _t(weights, f"{stem}.b0")))
    return linear(hidden, _t(weights, f"{stem}.w1"), _t(weights, f"{stem}.b1"))


def attention(xs, weights, block, heads):
    n = len(xs)
    d = len(xs[0])
    dh = d // heads
    qs = [linear(x, _t(weights, f"{block}.attn.wq"), _t(weights, f"{block}.attn.bq")) for x in xs]
    ks = [linear(x, _t(weights, f"{block}.attn.wk"), _t(weights, f"{block}.attn.bk")) for x in xs]
    vs = [linear(x, _t(weights, f"{block}.attn.wv"), _t(weights, f"{block}.attn.bv")) for x in xs]
    mixed = [[0.0] * d for _ in range(n)]
    for h in range(heads):
        lo = h * dh
        for i in range(n):
            scores = []
            for j in range(n):
                s = sum(qs[i][lo + a] * ks[j][lo + a] for a in range(dh))
                scores.append(s / math.sqrt(dh))
            attn = softmax(scores)
            for j in range(n):
                for a in range(dh):
                    mixed[i][lo + a] += attn[j] * vs[j][lo + a]
    return [linear(m, _t(weights, f"{block}.attn.wo"), _t(weights, f"{block}.attn.bo")) for m in mixed]


def transformer(xs, weights, prefix, blocks, heads):
    for k in range(blocks):
        block = f"{prefix}.block{k}"
        att = attention(xs, weights, block, heads)
        xs = [
            layer_norm(vec_add(x, a), _t(weights, f"{block}.ln1.g"), _t(weights, f"{block}.ln1.b"))
            for x, a in zip(xs, att)
        ]
        new = []
        for x in xs:
            hidden = relu(linear(x, _t(weights, f"{block}.ffn.w0"), _t(weights, f"{block}.ffn.b0")))
            ff = linear(hidden, _t(weights, f"{block}.ffn.w1"), _t(weights, f"{block}.ffn.b1"))
            new.append(
                layer_norm(vec_add(x, ff), _t(weights, f"{block}.ln2.g"), _t(weights, f"{block}.ln2.b"))
            )
        xs = new
    return xs


def one_hot(label, size):
    out = [0.0] * size
    out[label] = 1.0
    return out


def ref_generator_forward(weights, z_rows, labels):
    hp = weights.hp
    xs = [
        mlp2(list(z) + one_hot(l, hp.vocab_size), weights, "gen.enc")
        for z, l in zip(z_rows, labels)
    ]
    xs = transformer(xs, weights, "gen", hp.blocks, hp.heads)
    boxes = []
    for x in xs:
        out = linear(x, _t(weights, "gen.dec.w"), _t(weights, "gen.dec.b"))
        boxes.append([sigmoid_scalar(v) for v in out])
    return boxes


def ref_discriminator_forward(weights, boxes, labels):
    hp = weights.hp
    xs = [
        mlp2(list(b) + one_hot(l, hp.vocab_size), weights, "disc.enc")
        for b, l in zip(boxes, labels)
    ]
    tokens = [_t(weights, "disc.h_const")] + xs
    tokens = transformer(tokens, weights, "disc", hp.blocks, hp.heads)
    h_const_out = tokens[0]
    y = linear(h_const_out, _t(weights, "disc.dec.w"), _t(weights, "disc.dec.b"))[0]
    return y, h_const_out


def ref_aux_decoder_forward(weights, h_const_out, n):
    hp = weights.hp
    pos = _t(weights, "aux.pos")
    xs = [mlp2(list(h_const_out) + pos[i], weights, "aux.enc") for i in range(n)]
    xs = transformer(xs, weights, "aux", hp.blocks, hp.heads)
    boxes, probs = [], []
    for x in xs:
        out = linear(x, _t(weights, "aux.dec.w"), _t(weights, "aux.dec.b"))
        boxes.append([sigmoid_scalar(v) for v in out[:4]])
        probs.append(softmax(out[4:]))
    return boxes, probs


def ref_reconstruction_loss(pred_boxes, pred_probs, target_boxes, target_labels):
    order = sorted(
        range(len(target_boxes)),
        key=lambda i: (target_boxes[i][1], target_boxes[i][0], target_boxes[i][2], target_boxes[i][3]),
    )
    tb = [target_boxes[i] for i in order]
    tl = [target_labels[i] for i in order]
    n = len(tb)
    mse = sum(
        (pred_boxes[i][k] - tb[i][k]) ** 2 for i in range(n) for k in range(4)
    ) / (4 * n)
    ce = sum(-math.log(pred_probs[i][tl[i]]) for i in range(n)) / n
    return mse + ce
