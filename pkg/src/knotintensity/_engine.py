"""Shared projection/classification engine over one parent curve.

The openings of a closed curve and the trim windows visited while locating
knot cores are all contiguous sub-chains of the same parent polygon, so the
engine projects the parent once per closure index and extracts every
window's diagram from cached parent-level crossings.  Only the two closing
edges (which depend on the window's bounding sphere) are intersected per
test.

Randomness contract: projection directions are drawn from streams keyed by
(seed, parent-geometry digest, closure index) and are shared by every
window, which is sound because the classification of a closed-up chain is a
topological invariant independent of the projection direction.  Closure
sphere points, which do decide knot types, are keyed additionally by the
window's own geometry digest, so closure noise is independent across
windows and openings and averages out of the intensity distribution.  All
digests are normalised for scale and translation and the parent digest is
invariant under vertex relabelling, which makes dominant-type decisions
exactly equivariant under cyclic relabelling and exactly invariant under
doubling of the coordinates.  A window test is a pure function of (seed,
window geometry), which allows memoising repeated windows across openings.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from . import _kernels
from .config import DEFAULT_CONFIG, PipelineConfig
from .diagram import projection_basis
from .errors import DegenerateProjection
from .invariants import (
    UNKNOT,
    KnotTypeLabel,
    _det_at_minus1,
    _poly_from_matrices,
    classify,
)
from .rng import arc_digest, curve_digest, rng_from, sphere_point


def _canonical_code_key(sid, sov, signs) -> bytes:
    """Canonical byte key of a simplified code (ids renumbered by first visit)."""
    remap: dict[int, int] = {}
    out = bytearray()
    for i, o in zip(sid, sov):
        j = remap.setdefault(int(i), len(remap))
        out.append((j << 1) | int(o))
    for orig in remap:
        out.append(1 if signs[orig] > 0 else 0)
    return bytes(out)


class ProjectionEngine:
    """Classification engine for the sub-chains of one parent polyline."""

    def __init__(self, vertices: np.ndarray, cyclic: bool, seed: int,
                 config: PipelineConfig = DEFAULT_CONFIG):
        self.V = np.ascontiguousarray(vertices, dtype=np.float64)
        self.cyclic = bool(cyclic)
        self.N = len(self.V)
        self.n_edges = self.N if self.cyclic else self.N - 1
        self.seed = int(seed)
        self.config = config
        self.digest = curve_digest(self.V)
        rel = self.V - self.V.mean(axis=0)
        self.scale = max(float(np.sqrt((rel * rel).sum(axis=1).max())), 1e-30)
        self._dirs: dict[int, tuple] = {}
        self._labels: dict[bytes, KnotTypeLabel] = {}

    # -- cached per-closure-index data ----------------------------------------

    def _direction_data(self, k: int):
        hit = self._dirs.get(k)
        if hit is not None:
            return hit
        cfg = self.config
        for attempt in range(cfg.max_resample):
            d = sphere_point(rng_from(self.seed, "direction", self.digest, k, attempt))
            u, v, dhat = projection_basis(d)
            p2 = self.V @ np.stack([u, v], axis=1)
            depth = self.V @ dhat
            status, oe, ue, so, su, sg = _kernels.find_crossings(
                p2, depth, self.cyclic, self.scale,
                cfg.min_crossing_sin, cfg.min_param_margin, cfg.min_depth_separation,
            )
            if status == _kernels.OK:
                data = (u, v, dhat, p2, depth, (oe, ue, so, su, sg))
                self._dirs[k] = data
                return data
        raise DegenerateProjection(
            f"no generic direction found for closure index {k}"
        )

    # -- window machinery ------------------------------------------------------

    def window_vertex_indices(self, a: int, w: int) -> np.ndarray:
        if self.cyclic:
            return (np.arange(w) + a) % self.N
        return np.arange(a, a + w)

    def _window_code(self, a: int, w: int, k: int):
        """Gauss-code arrays of window [a, a+w) closed through sphere point k."""
        cfg = self.config
        u, v, dhat, p2, depth, (oe, ue, so, su, sg) = self._direction_data(k)
        ro, ru, rso, rsu, rsg = _kernels.filter_window(
            oe, ue, so, su, sg, a, w - 1, self.n_edges, self.cyclic
        )
        idx = self.window_vertex_indices(a, w)
        Vw = self.V[idx]
        lo = Vw.min(axis=0)
        hi = Vw.max(axis=0)
        center = 0.5 * (lo + hi)
        relw = Vw - center
        radius = max(float(np.sqrt((relw * relw).sum(axis=1).max())), 1e-30)
        W2 = p2[idx]
        Wd = depth[idx]
        clearance = cfg.closure_clearance * self.scale

        arc_key = arc_digest(Vw)
        for attempt in range(cfg.max_resample):
            unit = sphere_point(
                rng_from(self.seed, "closure", self.digest, arc_key, k, attempt)
            )
            P3 = center + cfg.radius_factor * radius * unit
            # reject closure segments passing through the chain in 3-space
            if w > 2:
                d1 = _kernels.min_dist_segment_to_polyline(Vw[-1], P3, Vw[: w - 1])
                d2 = _kernels.min_dist_segment_to_polyline(P3, Vw[0], Vw[1:])
                if min(d1, d2) < clearance:
                    continue
            cp2x = float(P3 @ u)
            cp2y = float(P3 @ v)
            cpd = float(P3 @ dhat)
            status, co, cu, cso, csu, csg = _kernels.closure_crossings(
                W2, Wd, cp2x, cp2y, cpd, self.scale,
                cfg.min_crossing_sin, cfg.min_param_margin, cfg.min_depth_separation,
            )
            if status != _kernels.OK:
                continue
            over = np.concatenate([ro, co])
            under = np.concatenate([ru, cu])
            sov = np.concatenate([rso, cso])
            sun = np.concatenate([rsu, csu])
            sig = np.concatenate([rsg, csg])
            return _kernels.assemble_code(over, under, sov, sun, sig)
        raise DegenerateProjection(
            f"no valid closure point found for window ({a}, {w}), index {k}"
        )

    # -- classification --------------------------------------------------------

    def _label_of_code(self, ids, overs, signs) -> KnotTypeLabel:
        if len(ids) == 0:
            return UNKNOT
        sid, sov = _kernels.simplify_code_arrays(ids, overs, signs)
        if len(sid) == 0:
            return UNKNOT
        key = _canonical_code_key(sid, sov, signs)
        hit = self._labels.get(key)
        if hit is None:
            M0, M1 = _kernels.alexander_matrices(sid, sov, signs)
            hit = classify(_poly_from_matrices(M0, M1).normalize())
            self._labels[key] = hit
        return hit

    def _code_matches(self, ids, overs, signs, target: KnotTypeLabel,
                      target_det: int) -> bool:
        if len(ids) == 0:
            return target is UNKNOT
        sid, sov = _kernels.simplify_code_arrays(ids, overs, signs)
        if len(sid) == 0:
            return target is UNKNOT
        key = _canonical_code_key(sid, sov, signs)
        hit = self._labels.get(key)
        if hit is not None:
            return hit == target
        M0, M1 = _kernels.alexander_matrices(sid, sov, signs)
        if _det_at_minus1(M0, M1) != target_det:
            return False
        label = classify(_poly_from_matrices(M0, M1).normalize())
        self._labels[key] = label
        return label == target

    def window_label(self, a: int, w: int, k: int) -> KnotTypeLabel:
        ids, overs, signs = self._window_code(a, w, k)
        return self._label_of_code(ids, overs, signs)

    def window_labels(self, a: int, w: int, closures: int) -> list[KnotTypeLabel]:
        return [self.window_label(a, w, k) for k in range(closures)]

    def window_matches(self, a: int, w: int, target: KnotTypeLabel,
                       closures: int, acceptance_fraction: float) -> bool:
        """Early-exit test: does ``target`` reach the acceptance frequency?

        Equivalent to counting all M closures; the loop stops as soon as the
        outcome is forced, which cannot change the decision.
        """
        threshold = math.ceil(acceptance_fraction * closures)
        fails_allowed = closures - threshold
        target_det = abs(int(target.poly.evaluate(-1)))
        successes = 0
        fails = 0
        for k in range(closures):
            ids, overs, signs = self._window_code(a, w, k)
            if self._code_matches(ids, overs, signs, target, target_det):
                successes += 1
                if successes >= threshold:
                    return True
            else:
                fails += 1
                if fails > fails_allowed:
                    return False
        return successes >= threshold

    # -- closed-curve classification (cyclic parents only) ---------------------

    def closed_label(self, k: int = 0) -> KnotTypeLabel:
        if not self.cyclic:
            raise ValueError("closed_label requires a cyclic parent")
        _, _, _, _, _, (oe, ue, so, su, sg) = self._direction_data(k)
        ids, overs, signs = _kernels.assemble_code(oe, ue, so, su, sg)
        return self._label_of_code(ids, overs, signs)

    def closed_labels(self, directions: int) -> list[KnotTypeLabel]:
        return [self.closed_label(k) for k in range(directions)]
