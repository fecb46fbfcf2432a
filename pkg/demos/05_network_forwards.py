"""The transformer forward passes and the portable weight container."""

import os
import tempfile

import numpy as np

from layoutopt import (
    aux_decoder_forward,
    discriminator_forward,
    gan_objective_eval,
    generator_forward,
    load_weights,
    random_weights,
    sample_latents,
    save_weights,
)
from layoutopt.network import discriminator_forward_array

weights = random_weights(seed=1234, vocab_size=5)
hp = weights.hp
print(f"model: d_model={hp.d_model}, ffn={hp.d_ffn}, heads={hp.heads}, "
      f"blocks={hp.blocks}, d_z={hp.d_z}, vocab={hp.vocab_size}")

labels = [0, 1, 1, 3]
z = sample_latents(seed=0, n=len(labels), d_z=hp.d_z)
layout = generator_forward(weights, z, labels)
print("\ngenerated boxes (xc, yc, w, h):")
print(np.round(layout.boxes_array(), 4))

score = discriminator_forward(weights, layout)
print(f"discriminator realism score: {score:.6f}")

# permutation equivariance: shuffling inputs shuffles outputs identically
perm = [2, 0, 3, 1]
shuffled = generator_forward(weights, z.z[perm], [labels[i] for i in perm])
print("equivariance gap:",
      float(np.max(np.abs(shuffled.boxes_array() - layout.boxes_array()[perm]))))

# the auxiliary decoder reconstructs boxes and labels from the constant token
_, h_const_out = discriminator_forward_array(weights, layout.boxes_array(), labels)
boxes, probs = aux_decoder_forward(weights, h_const_out, len(labels))
print("\nauxiliary decoder label distributions (rows sum to 1):")
print(np.round(probs, 3))

reference = generator_forward(
    random_weights(seed=999, vocab_size=5), sample_latents(3, len(labels), hp.d_z), labels
)
record = gan_objective_eval(weights, reference, z)
print(f"\nadversarial objective record: { {k: round(v, 4) for k, v in record.items()} }")

# weight files round-trip bitwise through the manifest + blob format
with tempfile.TemporaryDirectory() as d:
    path = os.path.join(d, "model.json")
    save_weights(weights, path)
    reloaded = load_weights(path)
    same = all(np.array_equal(weights[n], reloaded[n]) for n in weights.tensors)
    blob = os.path.getsize(os.path.join(d, "model.bin"))
    print(f"weight file round-trip bitwise-identical: {same} (blob {blob/1e6:.1f} MB)")
