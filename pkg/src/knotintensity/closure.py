"""Probabilistic closure of open chains and dominant-type determination.

An open chain is closed through a single external point drawn uniformly on
a sphere around the chain's bounding-box centre, with radius a fixed
multiple of the chain's bounding radius so the closing arcs act as if at
infinity.  The dominant knot type of a chain is the modal classification
over many independent closures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._engine import ProjectionEngine
from .config import DEFAULT_CONFIG, PipelineConfig
from .curve import OpenChain, PLCurve
from .errors import DegenerateProjection
from .invariants import KnotTypeLabel
from .rng import curve_digest, rng_from, sphere_point


@dataclass(frozen=True)
class ClosureSpectrum:
    """Outcome histogram of M closure classifications.

    ``dominant`` maximises the count; ties break toward the smaller minimal
    crossing number, then lexicographically, with off-catalog labels last.
    """

    counts: tuple[tuple[KnotTypeLabel, int], ...]
    m: int
    dominant: KnotTypeLabel

    def count_of(self, label: KnotTypeLabel) -> int:
        for lbl, cnt in self.counts:
            if lbl == label:
                return cnt
        return 0

    def frequency_of(self, label: KnotTypeLabel) -> float:
        return self.count_of(label) / self.m

    def to_json(self) -> str:
        return json.dumps(
            {
                "M": self.m,
                "dominant": str(self.dominant),
                "counts": {str(lbl): cnt for lbl, cnt in self.counts},
            },
            sort_keys=True,
            separators=(",", ":"),
        )


def spectrum_from_labels(labels) -> ClosureSpectrum:
    tally: dict[KnotTypeLabel, int] = {}
    for lbl in labels:
        tally[lbl] = tally.get(lbl, 0) + 1
    ordered = tuple(sorted(tally.items(), key=lambda kv: (-kv[1],) + kv[0].sort_key()))
    dominant = ordered[0][0]
    return ClosureSpectrum(counts=ordered, m=len(labels), dominant=dominant)


def closure_sphere(chain_vertices: np.ndarray, radius_factor: float):
    """Centre and radius of the closure sphere for a chain."""
    v = np.asarray(chain_vertices, dtype=np.float64)
    center = 0.5 * (v.min(axis=0) + v.max(axis=0))
    rel = v - center
    radius = max(float(np.sqrt((rel * rel).sum(axis=1).max())), 1e-30)
    return center, radius_factor * radius


def uniform_closure(chain: OpenChain, seed: int = 0,
                    config: PipelineConfig = DEFAULT_CONFIG) -> PLCurve:
    """Close a chain through one uniformly random far point.

    The point is appended as a single extra vertex joined to both chain
    endpoints by straight segments.
    """
    center, radius = closure_sphere(chain.vertices, config.radius_factor)
    unit = sphere_point(rng_from(seed, "uniform-closure"))
    point = center + radius * unit
    return PLCurve(np.vstack([chain.vertices, point]), closed=True)


def dominant_type(chain: OpenChain, closures: int | None = None, seed: int = 0,
                  config: PipelineConfig = DEFAULT_CONFIG) -> ClosureSpectrum:
    """Spectrum of a chain over M independent probabilistic closures.

    Each closure is classified through a fresh generic projection.  Results
    are a pure function of (chain geometry, M, seed); uniformly rescaling
    the chain cannot change them.
    """
    m = config.closures if closures is None else int(closures)
    if m < 1:
        raise ValueError("closure count must be >= 1")
    engine = ProjectionEngine(chain.vertices, cyclic=False, seed=seed, config=config)
    labels = engine.window_labels(0, chain.n_vertices, m)
    return spectrum_from_labels(labels)


def classify_closed(curve: PLCurve, directions: int = 1, seed: int = 0,
                    config: PipelineConfig = DEFAULT_CONFIG) -> ClosureSpectrum:
    """Direction-vote spectrum for a closed curve.

    The classification is a knot invariant, so every generic direction
    agrees; multiple directions simply exercise that stability.
    """
    engine = ProjectionEngine(curve.vertices, cyclic=True, seed=seed, config=config)
    labels = engine.closed_labels(max(1, directions))
    return spectrum_from_labels(labels)
