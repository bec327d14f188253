"""Embedding providers: archive lookup and the synthetic concept embedder.

Real vision-language encoders never run inside this package; their outputs
arrive through EMB1 archives. The synthetic embedder stands in for them
during model-free end-to-end runs, producing reproducible unit vectors from
concept strings. Its primitives are pinned exactly — FNV-1a (64-bit) over
eight little-endian seed bytes followed by the UTF-8 string, a splitmix64
stream expanded to standard normals via Box-Muller, then L2 normalization —
so fixtures are stable across implementations.
"""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .errors import MissingKeyError, ValidationError
from .io.archive import EmbeddingArchive

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

CONCEPT_PREFIX = "concept:"


def fnv1a64(data: bytes, seed: int = 0) -> int:
    """Seeded FNV-1a: absorbs the seed as 8 little-endian bytes, then data."""
    h = _FNV_OFFSET
    for b in (seed & _MASK64).to_bytes(8, "little") + data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def splitmix64_stream(seed: int, count: int) -> np.ndarray:
    """First `count` outputs of splitmix64 started at `seed`."""
    out = np.empty(count, dtype=np.uint64)
    x = seed & _MASK64
    for i in range(count):
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out[i] = z ^ (z >> 31)
    return out


def gaussian_stream(seed: int, count: int) -> np.ndarray:
    """Standard-normal variates via Box-Muller over splitmix64 uniforms."""
    pairs = (count + 1) // 2
    bits = splitmix64_stream(seed, 2 * pairs)
    u1 = ((bits[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53  # (0, 1]
    u2 = (bits[1::2] >> np.uint64(11)).astype(np.float64) * 2.0 ** -53          # [0, 1)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]


class EmbeddingProvider(Protocol):
    """Pure lookup of crop and text embeddings, all of one dimension."""

    def embed_crop(self, key: str) -> np.ndarray: ...

    def embed_text(self, text: str) -> np.ndarray: ...

    def dim(self) -> int: ...


class ArchiveProvider:
    """Provider backed by pre-filled crop and text archives."""

    def __init__(
        self,
        crop_archive: EmbeddingArchive | None = None,
        text_archive: EmbeddingArchive | None = None,
    ):
        if crop_archive is None and text_archive is None:
            raise ValidationError("archive provider needs at least one archive")
        if (
            crop_archive is not None
            and text_archive is not None
            and crop_archive.dim != text_archive.dim
        ):
            raise ValidationError(
                f"archive dimensions differ: crops {crop_archive.dim}, texts {text_archive.dim}"
            )
        self._crops = crop_archive
        self._texts = text_archive
        self._dim = crop_archive.dim if crop_archive is not None else text_archive.dim

    def embed_crop(self, key: str) -> np.ndarray:
        if self._crops is None or key not in self._crops.records:
            raise MissingKeyError(f"crop archive has no record for key {key!r}")
        return self._crops.records[key]

    def embed_text(self, text: str) -> np.ndarray:
        if self._texts is None or text not in self._texts.records:
            raise MissingKeyError(f"text archive has no record for key {text!r}")
        return self._texts.records[text]

    def dim(self) -> int:
        return self._dim


class SyntheticConceptEmbedder:
    """Deterministic stand-in for a vision-language encoder.

    Each concept string maps to a fixed unit vector; `embed_text(c)` and
    `embed_crop("concept:c")` return the identical array. Composite crop
    keys "concept:c1+c2" yield the normalized mean of the member vectors,
    mimicking a crop that shows several concepts at once.
    """

    def __init__(self, seed: int = 0, dim: int = 1152):
        if dim < 16:
            raise ValidationError("synthetic embedder needs dim >= 16")
        self._seed = int(seed)
        self._dim = dim
        self._cache: dict[str, np.ndarray] = {}

    def concept_vector(self, concept: str) -> np.ndarray:
        cached = self._cache.get(concept)
        if cached is not None:
            return cached
        stream_seed = fnv1a64(concept.encode("utf-8"), self._seed)
        raw = gaussian_stream(stream_seed, self._dim)
        vector = (raw / np.linalg.norm(raw)).astype(np.float32)
        self._cache[concept] = vector
        return vector

    def embed_text(self, text: str) -> np.ndarray:
        return self.concept_vector(text)

    def embed_crop(self, key: str) -> np.ndarray:
        if not key.startswith(CONCEPT_PREFIX):
            raise MissingKeyError(
                f"synthetic embedder resolves only 'concept:*' crop keys, got {key!r}"
            )
        concepts = key[len(CONCEPT_PREFIX):].split("+")
        if len(concepts) == 1:
            return self.concept_vector(concepts[0])
        stacked = np.stack([self.concept_vector(c).astype(np.float64) for c in concepts])
        mean = stacked.mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm < 1e-12:
            return np.zeros(self._dim, dtype=np.float32)
        return (mean / norm).astype(np.float32)

    def dim(self) -> int:
        return self._dim
