"""Generic projection of a PL curve to a crossing code, and its reduction.

A projection direction is *generic* when no projected edge degenerates to a
point, no crossing sits within tolerance of a vertex, every crossing angle
exceeds ``min_crossing_sin`` and the two strands of every crossing are
separated in depth.  Non-generic directions raise
:class:`~knotintensity.errors.DegenerateProjection`; since the bad set has
measure zero, callers simply resample.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import DEFAULT_CONFIG, PipelineConfig
from .curve import OpenChain, PLCurve
from .errors import DegenerateProjection
from .rng import rng_from, sphere_point

_STATUS_MESSAGES = {
    _kernels.DEGEN_SHORT_EDGE: "an edge projects to a point",
    _kernels.DEGEN_PARALLEL: "near-parallel overlapping edges in projection",
    _kernels.DEGEN_PARAM: "crossing within tolerance of a vertex",
    _kernels.DEGEN_DEPTH: "strands not separated in depth",
}


@dataclass(frozen=True)
class Crossing:
    """One transversal crossing of a projected diagram.

    Edge indices refer to the projected curve; parameters locate the
    crossing along each edge in (0, 1).  The sign is right-handed: +1 when
    the frame (over tangent, under tangent, viewing direction) is positively
    oriented.
    """

    over_edge: int
    under_edge: int
    over_param: float
    under_param: float
    sign: int


@dataclass(frozen=True)
class KnotDiagram:
    """Gauss code of a projection: (crossing id, is_over, sign) per passage."""

    code: tuple[tuple[int, bool, int], ...]

    def __post_init__(self):
        seen: dict[int, list[bool]] = {}
        for cid, over, sign in self.code:
            seen.setdefault(cid, []).append(over)
            if sign not in (-1, 1):
                raise ValueError(f"crossing sign must be +/-1, got {sign}")
        for cid, flags in seen.items():
            if len(flags) != 2 or sum(flags) != 1:
                raise ValueError(
                    f"crossing {cid} must appear exactly twice, once over and once under"
                )

    @property
    def n_crossings(self) -> int:
        return len(self.code) // 2

    def to_json(self) -> str:
        return json.dumps(
            [[cid, "O" if over else "U", sign] for cid, over, sign in self.code],
            separators=(",", ":"),
        )

    @classmethod
    def from_code_arrays(cls, ids, overs, signs_by_id) -> "KnotDiagram":
        code = tuple(
            (int(i), bool(o), int(signs_by_id[i])) for i, o in zip(ids, overs)
        )
        return cls(code)

    def code_arrays(self):
        n = len(self.code)
        ids = np.empty(n, np.int64)
        overs = np.empty(n, np.int64)
        max_id = max((c[0] for c in self.code), default=-1)
        signs = np.zeros(max_id + 1, np.int64)
        for p, (cid, over, sign) in enumerate(self.code):
            ids[p] = cid
            overs[p] = 1 if over else 0
            signs[cid] = sign
        return ids, overs, signs


def projection_basis(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-handed orthonormal frame (u, v, d) with u x v = d."""
    d = np.asarray(direction, dtype=np.float64)
    norm = float(np.sqrt(d @ d))
    if norm < 1e-12:
        raise ValueError("projection direction must be nonzero")
    d = d / norm
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(d)))] = 1.0
    u = np.cross(helper, d)
    u /= float(np.sqrt(u @ u))
    v = np.cross(d, u)
    return u, v, d


def _vertices_of(obj) -> tuple[np.ndarray, bool]:
    if isinstance(obj, PLCurve):
        return obj.vertices, obj.closed
    if isinstance(obj, OpenChain):
        return obj.vertices, False
    raise TypeError(f"cannot project object of type {type(obj)!r}")


def project(obj, direction, config: PipelineConfig = DEFAULT_CONFIG) -> KnotDiagram:
    """Gauss code of the projection of ``obj`` orthogonal to ``direction``.

    Over/under is decided by depth along the direction (larger depth is
    nearer the viewer and passes over).
    """
    vertices, closed = _vertices_of(obj)
    u, v, d = projection_basis(direction)
    p2 = vertices @ np.stack([u, v], axis=1)
    depth = vertices @ d
    rel = vertices - vertices.mean(axis=0)
    scale = max(float(np.sqrt((rel * rel).sum(axis=1).max())), 1e-30)
    status, over_e, under_e, s_over, s_under, sgn = _kernels.find_crossings(
        p2, depth, closed, scale,
        config.min_crossing_sin, config.min_param_margin, config.min_depth_separation,
    )
    if status != _kernels.OK:
        raise DegenerateProjection(_STATUS_MESSAGES[status])
    ids, overs, signs = _kernels.assemble_code(over_e, under_e, s_over, s_under, sgn)
    return KnotDiagram.from_code_arrays(ids, overs, signs)


def crossings_of_projection(obj, direction,
                            config: PipelineConfig = DEFAULT_CONFIG) -> list[Crossing]:
    """Geometric crossing records of a generic projection."""
    vertices, closed = _vertices_of(obj)
    u, v, d = projection_basis(direction)
    p2 = vertices @ np.stack([u, v], axis=1)
    depth = vertices @ d
    rel = vertices - vertices.mean(axis=0)
    scale = max(float(np.sqrt((rel * rel).sum(axis=1).max())), 1e-30)
    status, over_e, under_e, s_over, s_under, sgn = _kernels.find_crossings(
        p2, depth, closed, scale,
        config.min_crossing_sin, config.min_param_margin, config.min_depth_separation,
    )
    if status != _kernels.OK:
        raise DegenerateProjection(_STATUS_MESSAGES[status])
    return [
        Crossing(int(o), int(uu), float(so), float(su), int(sg))
        for o, uu, so, su, sg in zip(over_e, under_e, s_over, s_under, sgn)
    ]


def simplify(diagram: KnotDiagram) -> KnotDiagram:
    """Apply untwist/unpoke reductions until none applies.

    Both moves strictly decrease the crossing count, so this terminates and
    is idempotent; the knot type is unchanged.
    """
    if not diagram.code:
        return diagram
    ids, overs, signs = diagram.code_arrays()
    out_id, out_over = _kernels.simplify_code_arrays(ids, overs, signs)
    code = tuple(
        (int(i), bool(o), int(signs[i])) for i, o in zip(out_id, out_over)
    )
    return KnotDiagram(code)


def random_direction(seed: int, index: int = 0) -> np.ndarray:
    """Deterministic uniformly distributed unit vector."""
    return sphere_point(rng_from(seed, "direction", index))
