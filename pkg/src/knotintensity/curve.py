"""Piecewise-linear curve model, validation, openings and file IO.

Points are float64 triples; a curve stores its vertices as a read-only
``(N, 3)`` array.  For a closed curve the last vertex connects back to the
first, so the edge count equals the vertex count and doubles as the curve's
combinatorial length.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .config import EQUILATERAL_REL_TOL, MIN_VERTEX_SEPARATION
from .errors import DegenerateCurve, ParseError
from .rng import random_rotation, rng_from, sphere_point


def _as_vertex_array(vertices) -> np.ndarray:
    v = np.ascontiguousarray(np.asarray(vertices, dtype=np.float64))
    if v.ndim != 2 or v.shape[1] != 3:
        raise DegenerateCurve(f"expected an (N, 3) vertex array, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise DegenerateCurve("vertex coordinates must all be finite")
    return v


def _check_separation(v: np.ndarray, closed: bool, min_sep: float) -> None:
    diffs = np.diff(v, axis=0)
    if closed:
        diffs = np.vstack([diffs, v[0] - v[-1]])
    dists = np.sqrt((diffs * diffs).sum(axis=1))
    if dists.size and float(dists.min()) <= min_sep:
        i = int(dists.argmin())
        raise DegenerateCurve(
            f"consecutive vertices {i} and {(i + 1) % len(v)} coincide "
            f"(distance {dists[i]:.3e})"
        )


@dataclass(frozen=True, eq=False)
class PLCurve:
    """Closed (or open) polygonal curve in 3-space."""

    vertices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        v = _as_vertex_array(self.vertices)
        min_verts = 3 if self.closed else 2
        if len(v) < min_verts:
            kind = "closed" if self.closed else "open"
            raise DegenerateCurve(f"a {kind} curve needs at least {min_verts} vertices")
        _check_separation(v, self.closed, MIN_VERTEX_SEPARATION)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.vertices) if self.closed else len(self.vertices) - 1

    @property
    def length(self) -> int:
        """Edge count; for equilateral curves this is the curve's length."""
        return self.n_edges

    def edge_vectors(self) -> np.ndarray:
        v = self.vertices
        if self.closed:
            return np.roll(v, -1, axis=0) - v
        return v[1:] - v[:-1]

    def edge_lengths(self) -> np.ndarray:
        e = self.edge_vectors()
        return np.sqrt((e * e).sum(axis=1))

    def bounding_radius(self) -> float:
        rel = self.vertices - self.vertices.mean(axis=0)
        return float(np.sqrt((rel * rel).sum(axis=1).max()))

    def to_json(self) -> str:
        return json.dumps(
            {"closed": self.closed, "vertices": self.vertices.tolist()},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> "PLCurve":
        data = json.loads(text)
        return cls(np.asarray(data["vertices"], dtype=np.float64), bool(data["closed"]))


@dataclass(frozen=True, eq=False)
class OpenChain:
    """Open chain obtained by removing one edge from a closed curve.

    ``origin_edge`` records which edge of the parent was removed; the chain
    starts at the removed edge's head and ends at its tail, preserving the
    parent's cyclic vertex order.  Chain vertex ``k`` corresponds to parent
    vertex ``(origin_edge + 1 + k) % N``.
    """

    vertices: np.ndarray
    origin_edge: int = 0

    def __post_init__(self):
        v = _as_vertex_array(self.vertices)
        if len(v) < 2:
            raise DegenerateCurve("an open chain needs at least 2 vertices")
        _check_separation(v, False, MIN_VERTEX_SEPARATION)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.vertices) - 1

    def parent_labels(self, parent_n: int | None = None) -> np.ndarray:
        """Parent vertex index for each chain vertex."""
        n = self.n_vertices if parent_n is None else parent_n
        return (self.origin_edge + 1 + np.arange(self.n_vertices)) % n


def load_xyz(path) -> PLCurve:
    """Read a closed curve from a whitespace-separated coordinate file.

    Each non-empty line outside ``#`` comments must hold three decimal
    reals.  The final vertex is implicitly joined back to the first.
    """
    vertices = []
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(exc), path=path) from exc
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 3:
                raise ParseError(
                    f"expected 3 coordinates, found {len(fields)}",
                    path=path, line=lineno,
                )
            try:
                vertices.append([float(f) for f in fields])
            except ValueError as exc:
                raise ParseError(
                    f"non-numeric coordinate {exc}", path=path, line=lineno
                ) from exc
    if len(vertices) < 3:
        raise DegenerateCurve(
            f"{path}: a closed curve needs at least 3 vertices, found {len(vertices)}"
        )
    return PLCurve(np.asarray(vertices, dtype=np.float64), closed=True)


def save_xyz(curve: PLCurve, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for x, y, z in curve.vertices:
            handle.write(f"{x!r} {y!r} {z!r}\n")


def open_at_edge(curve: PLCurve, i: int) -> OpenChain:
    """Remove edge ``i`` from a closed curve.

    The resulting chain keeps all N vertices (both endpoints of the removed
    edge survive) and has N-1 edges; it starts at vertex ``i+1 (mod N)``.
    """
    if not curve.closed:
        raise DegenerateCurve("open_at_edge requires a closed curve")
    n = curve.n_vertices
    if not 0 <= i < n:
        raise IndexError(f"edge index {i} out of range for a curve with {n} edges")
    order = (np.arange(n) + i + 1) % n
    return OpenChain(curve.vertices[order], origin_edge=i)


def close_chain(chain: OpenChain) -> PLCurve:
    """Reconnect an open chain's endpoints, undoing ``open_at_edge``."""
    return PLCurve(chain.vertices, closed=True)


def random_rigid_motion(curve: PLCurve, seed: int) -> PLCurve:
    """Apply a uniformly random rotation plus a bounded random translation.

    The translation is drawn uniformly from the cube of half-width equal to
    the curve's bounding radius, so the move stays at the curve's own scale.
    Edge lengths are preserved to rounding error.
    """
    rng = rng_from(seed, "rigid-motion")
    rot = random_rotation(rng)
    scale = max(curve.bounding_radius(), 1.0)
    shift = rng.uniform(-scale, scale, size=3)
    return PLCurve(curve.vertices @ rot.T + shift, closed=curve.closed)


def is_equilateral(curve, edge_length: float = 1.0,
                   rel_tol: float = EQUILATERAL_REL_TOL) -> bool:
    """True when every edge matches ``edge_length`` within ``rel_tol``."""
    lengths = curve.edge_lengths() if isinstance(curve, PLCurve) else (
        np.sqrt((np.diff(curve.vertices, axis=0) ** 2).sum(axis=1)))
    return bool(np.all(np.abs(lengths - edge_length) <= rel_tol * edge_length))


def require_equilateral(curve, edge_length: float = 1.0,
                        rel_tol: float = EQUILATERAL_REL_TOL) -> None:
    if not is_equilateral(curve, edge_length, rel_tol):
        raise DegenerateCurve("curve is not equilateral within tolerance")


def regular_polygon(n: int, edge_length: float = 1.0) -> PLCurve:
    """Planar regular n-gon with the requested edge length."""
    theta = 2.0 * np.pi * np.arange(n) / n
    radius = edge_length / (2.0 * np.sin(np.pi / n))
    pts = np.stack([radius * np.cos(theta), radius * np.sin(theta),
                    np.zeros(n)], axis=1)
    return PLCurve(pts, closed=True)


def torus_knot_curve(p: int, q: int, n: int, tube_radius: float = 1.0,
                     ring_radius: float = 2.0) -> PLCurve:
    """Polygonal sample of the (p, q) torus knot parametrisation.

    With ``p=2, q=3`` and a modest vertex count this gives the tight
    trefoil used throughout the tests.
    """
    t = 2.0 * np.pi * np.arange(n) / n
    r = ring_radius + tube_radius * np.cos(q * t)
    pts = np.stack([r * np.cos(p * t), r * np.sin(p * t),
                    tube_radius * np.sin(q * t)], axis=1)
    return PLCurve(pts, closed=True)


def figure_eight_curve(n: int) -> PLCurve:
    """Polygonal sample of a standard figure-eight knot parametrisation."""
    t = 2.0 * np.pi * np.arange(n) / n
    pts = np.stack(
        [
            (2.0 + np.cos(2 * t)) * np.cos(3 * t),
            (2.0 + np.cos(2 * t)) * np.sin(3 * t),
            np.sin(4 * t),
        ],
        axis=1,
    )
    return PLCurve(pts, closed=True)
