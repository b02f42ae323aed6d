"""Knot core identification by greedy alternating-end trimming.

The knot core of an open chain is the locally minimal sub-chain that still
carries the chain's dominant knot type: trimming alternates between the
two ends, re-testing the dominant type after each tentative one-vertex
drop, until neither end can be trimmed.  A tentative trim is accepted only
when the parent's dominant type keeps frequency >= ``acceptance_fraction``
over the closure ensemble, which keeps the boundary stable against closure
noise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ._engine import ProjectionEngine
from .closure import spectrum_from_labels
from .config import DEFAULT_CONFIG, PipelineConfig
from .curve import OpenChain
from .errors import TrivialChain, UnresolvedType
from .invariants import UNKNOT, KnotTypeLabel


@dataclass(frozen=True)
class KnotCore:
    """Inclusive vertex window [first, last] of a chain carrying its type."""

    first: int
    last: int
    dominant: KnotTypeLabel

    @property
    def n_vertices(self) -> int:
        return self.last - self.first + 1

    def to_json(self) -> str:
        return json.dumps(
            {"first": self.first, "last": self.last, "dominant": str(self.dominant)},
            sort_keys=True,
            separators=(",", ":"),
        )


def _window_test(engine: ProjectionEngine, a: int, w: int, target: KnotTypeLabel,
                 closures: int, config: PipelineConfig, memo: dict) -> bool:
    key = (a, w, target.name, str(target.poly))
    hit = memo.get(key)
    if hit is None:
        hit = engine.window_matches(a, w, target, closures,
                                    config.acceptance_fraction)
        memo[key] = hit
    return hit


def trim_to_core(engine: ProjectionEngine, a0: int, w0: int,
                 target: KnotTypeLabel, closures: int,
                 config: PipelineConfig, memo: dict) -> tuple[int, int]:
    """Greedy alternating trim of window (a0, w0); returns the final window."""
    n = engine.N
    a, w = a0, w0
    while True:
        progressed = False
        if w > 2:
            a_next = (a + 1) % n if engine.cyclic else a + 1
            if _window_test(engine, a_next, w - 1, target, closures, config, memo):
                a, w = a_next, w - 1
                progressed = True
        if w > 2:
            if _window_test(engine, a, w - 1, target, closures, config, memo):
                w = w - 1
                progressed = True
        if not progressed:
            return a, w


def knot_core(chain: OpenChain, closures: int | None = None, seed: int = 0,
              config: PipelineConfig = DEFAULT_CONFIG,
              _memo: dict | None = None) -> KnotCore:
    """Locate the knot core of an open chain.

    Raises :class:`TrivialChain` when the chain's dominant type is the
    unknot and :class:`UnresolvedType` when it falls off the catalog; both
    mean there is no core to report.
    """
    m = config.closures if closures is None else int(closures)
    engine = ProjectionEngine(chain.vertices, cyclic=False, seed=seed, config=config)
    spectrum = spectrum_from_labels(engine.window_labels(0, chain.n_vertices, m))
    dominant = spectrum.dominant
    if dominant == UNKNOT:
        raise TrivialChain("dominant closure type is the unknot; no knot core")
    if dominant.is_other():
        raise UnresolvedType(
            f"dominant closure type {dominant} is off-catalog", label=dominant
        )
    memo = {} if _memo is None else _memo
    a, w = trim_to_core(engine, 0, chain.n_vertices, dominant, m, config, memo)
    return KnotCore(first=a, last=a + w - 1, dominant=dominant)
