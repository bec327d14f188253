"""Offline adapter scripts.

These wrap the external pretrained models (3D object-mask predictor, 2D
segment proposer, image/text encoder) and emit the bit-exact interchange
files the scenetree core consumes. The core never loads model weights;
model nondeterminism is quarantined here. Every script supports a
deterministic `stub` backend so the interchange formats can be exercised
without any model runtime, and records what produced each artifact in a
`<output>.provenance.json` sidecar.
"""
