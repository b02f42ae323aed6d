"""Deterministic derivation of random streams.

Every stochastic step in the pipeline draws from a generator derived from
the user seed plus a canonical key, so identical inputs reproduce identical
results regardless of execution order or worker count.  Keys mix string
tags, integers and geometry digests.

Geometry digests are computed on coordinates normalised by centroid and
bounding radius and quantised to one part in 10^9.  Doubling every
coordinate is exact in IEEE arithmetic, so uniformly scaling a curve by a
power of two leaves all derived streams unchanged.  ``curve_digest`` sorts
the quantised rows and is therefore invariant under relabelling of the
vertices; ``arc_digest`` keeps the traversal order and identifies a
specific sub-chain.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

_U64 = (1 << 64) - 1


def _encode_part(part) -> bytes:
    if isinstance(part, bytes):
        return b"b" + struct.pack("<q", len(part)) + part
    if isinstance(part, str):
        raw = part.encode("utf-8")
        return b"s" + struct.pack("<q", len(raw)) + raw
    if isinstance(part, (int, np.integer)):
        return b"i" + struct.pack("<q", int(part) & _U64 if part >= 0 else int(part))
    raise TypeError(f"cannot encode key part of type {type(part)!r}")


def digest64(*parts) -> int:
    """Collapse a key tuple into a 64-bit integer via BLAKE2s."""
    h = hashlib.blake2s(digest_size=8)
    for part in parts:
        h.update(_encode_part(part))
    return int.from_bytes(h.digest(), "little")


def rng_from(seed: int, *parts) -> np.random.Generator:
    """Generator for the stream identified by ``seed`` plus a key tuple."""
    entropy = [int(seed) & _U64, digest64(*parts)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def _quantized(vertices: np.ndarray) -> np.ndarray:
    v = np.asarray(vertices, dtype=np.float64)
    center = v.mean(axis=0)
    rel = v - center
    radius = float(np.sqrt((rel * rel).sum(axis=1).max()))
    if radius == 0.0:
        radius = 1.0
    return np.round(rel * (1e9 / radius)).astype(np.int64)


def curve_digest(vertices: np.ndarray) -> bytes:
    """Order-insensitive digest of a vertex set (scale/translation normalised)."""
    q = _quantized(vertices)
    order = np.lexsort((q[:, 2], q[:, 1], q[:, 0]))
    return hashlib.blake2s(q[order].tobytes(), digest_size=8).digest()


def arc_digest(vertices: np.ndarray) -> bytes:
    """Order-sensitive digest of a vertex sequence (scale/translation normalised)."""
    return hashlib.blake2s(_quantized(vertices).tobytes(), digest_size=8).digest()


def sphere_point(rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the unit sphere."""
    while True:
        v = rng.standard_normal(3)
        n = float(np.sqrt(v @ v))
        if n > 1e-12:
            return v / n


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation matrix (unit-quaternion method)."""
    while True:
        q = rng.standard_normal(4)
        n = float(np.sqrt(q @ q))
        if n > 1e-12:
            break
    w, x, y, z = q / n
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )
