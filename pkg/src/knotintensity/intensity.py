"""Knot intensity distribution, fingerprint, density and peak detection.

The intensity distribution of a closed curve assigns to each vertex the
fraction of the N openings (one per removed edge) whose knot core contains
that vertex.  Openings whose dominant type is trivial contribute nothing;
normalisation is always by N, the number of openings.  All per-vertex
values are exact multiples of 1/N, and the fingerprint and density are
computed in exact rational arithmetic.
"""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._engine import ProjectionEngine
from .closure import spectrum_from_labels
from .config import DEFAULT_CONFIG, PipelineConfig
from .core import trim_to_core
from .curve import PLCurve
from .errors import TrivialCurve, UnresolvedType
from .invariants import UNKNOT, KnotTypeLabel, acn, writhe


@dataclass(frozen=True, eq=False)
class IntensityDistribution:
    """Per-vertex opening counts of a closed curve of length N.

    ``counts[v]`` is the number of openings whose core contains vertex v;
    the distribution value at v is ``counts[v] / n``.
    """

    counts: np.ndarray
    n: int
    dominant: KnotTypeLabel

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 1 or len(c) != self.n:
            raise ValueError("counts must be a length-n integer array")
        if (c < 0).any() or (c > self.n).any():
            raise ValueError("counts must lie in [0, n]")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def values(self) -> np.ndarray:
        return self.counts / float(self.n)

    def value_fractions(self) -> list[Fraction]:
        return [Fraction(int(c), self.n) for c in self.counts]

    def is_zero(self) -> bool:
        return not self.counts.any()

    def to_csv_rows(self):
        for i, c in enumerate(self.counts):
            yield i, c / float(self.n)


def _opening_counts(vertices: np.ndarray, seed: int, config: PipelineConfig,
                    closures: int, openings) -> np.ndarray:
    engine = ProjectionEngine(vertices, cyclic=True, seed=seed, config=config)
    n = engine.N
    counts = np.zeros(n, dtype=np.int64)
    memo: dict = {}
    for i in openings:
        a0 = (int(i) + 1) % n
        spectrum = spectrum_from_labels(engine.window_labels(a0, n, closures))
        dominant = spectrum.dominant
        if dominant == UNKNOT or dominant.is_other():
            continue
        a, w = trim_to_core(engine, a0, n, dominant, closures, config, memo)
        counts[(a + np.arange(w)) % n] += 1
    return counts


def _opening_counts_star(args):
    return _opening_counts(*args)


def intensity_distribution(curve: PLCurve, closures: int | None = None,
                           seed: int = 0,
                           config: PipelineConfig = DEFAULT_CONFIG,
                           workers: int = 1) -> IntensityDistribution:
    """Intensity distribution over the vertices of a closed curve.

    The N openings are independent; with ``workers > 1`` they are processed
    in contiguous blocks by a process pool.  Per-opening results depend
    only on (seed, geometry), so the output is identical for any worker
    count.
    """
    if not curve.closed:
        raise ValueError("intensity_distribution requires a closed curve")
    m = config.closures if closures is None else int(closures)
    engine = ProjectionEngine(curve.vertices, cyclic=True, seed=seed, config=config)
    closed_label = engine.closed_label(0)
    if closed_label == UNKNOT:
        raise TrivialCurve("curve classifies as the unknot")
    if closed_label.is_other():
        raise UnresolvedType(
            f"curve classifies off-catalog as {closed_label}", label=closed_label
        )
    n = curve.n_vertices
    openings = np.arange(n)
    if workers and workers > 1:
        chunks = [c for c in np.array_split(openings, min(workers, n)) if len(c)]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=len(chunks)) as pool:
            parts = pool.map(
                _opening_counts_star,
                [(curve.vertices, seed, config, m, chunk) for chunk in chunks],
            )
        counts = np.sum(parts, axis=0)
    else:
        counts = _opening_counts(curve.vertices, seed, config, m, openings)
    return IntensityDistribution(counts=counts, n=n, dominant=closed_label)


@dataclass(frozen=True)
class Fingerprint:
    """Exact piecewise-linear coarea summary of a distribution.

    Breakpoints are the distinct distribution values together with 0 and 1;
    between them the function is linear with slope equal to the fraction of
    vertices whose value exceeds t.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    @property
    def density(self) -> Fraction:
        return self.values[-1]

    def evaluate(self, t):
        ts, ys = self.breakpoints, self.values
        if t <= ts[0]:
            return ys[0]
        if t >= ts[-1]:
            return ys[-1]
        lo, hi = 0, len(ts) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ts[mid] <= t:
                lo = mid
            else:
                hi = mid
        frac = (t - ts[lo]) / (ts[hi] - ts[lo])
        return ys[lo] + (ys[hi] - ys[lo]) * frac

    def slopes(self) -> tuple[Fraction, ...]:
        ts, ys = self.breakpoints, self.values
        return tuple(
            (ys[i + 1] - ys[i]) / (ts[i + 1] - ts[i]) for i in range(len(ts) - 1)
        )

    def to_csv_rows(self):
        for t, y in zip(self.breakpoints, self.values):
            yield float(t), float(y)


def fingerprint(dist: IntensityDistribution) -> Fingerprint:
    """Coarea function t -> (1/N) sum_v min(value_v, t), exactly."""
    n = dist.n
    counts = sorted(int(c) for c in dist.counts)
    breaks = sorted({Fraction(0), Fraction(1), *(Fraction(c, n) for c in counts)})
    total = len(counts)
    values = []
    acc = 0  # sum of counts <= current breakpoint
    idx = 0
    for t in breaks:
        while idx < total and Fraction(counts[idx], n) <= t:
            acc += counts[idx]
            idx += 1
        above = total - idx
        values.append(Fraction(acc, n * n) + t * Fraction(above, n))
    return Fingerprint(breakpoints=tuple(breaks), values=tuple(values))


def density(dist: IntensityDistribution) -> Fraction:
    """Mean of the per-vertex values; equals the fingerprint at 1."""
    return Fraction(int(dist.counts.sum()), dist.n * dist.n)


def default_window(n: int) -> int:
    return max(3, round(n / 20))


def local_maxima(dist: IntensityDistribution, window: int | None = None) -> list[int]:
    """Strict local maxima of the circularly smoothed distribution.

    Smoothing is a centred circular moving average over ``window`` vertices
    (widened to the next odd count).  A plateau of equal smoothed values
    that tops both neighbouring runs yields its smallest vertex index.
    Comparisons use integer window sums, so plateau detection is exact.
    """
    n = dist.n
    w = default_window(n) if window is None else int(window)
    if w < 1:
        raise ValueError("window must be >= 1")
    if w % 2 == 0:
        w += 1
    w = min(w, n if n % 2 == 1 else n - 1)
    half = w // 2
    counts = dist.counts.astype(np.int64)
    kernel_idx = (np.arange(n)[:, None] + np.arange(-half, half + 1)[None, :]) % n
    smooth = counts[kernel_idx].sum(axis=1)

    # run-length decomposition of the circular sequence
    change = np.nonzero(smooth != np.roll(smooth, 1))[0]
    if len(change) == 0:
        return []
    runs = []
    for ri, start in enumerate(change):
        end = change[(ri + 1) % len(change)]
        length = (end - start) % n
        runs.append((int(start), int(length), int(smooth[start])))
    maxima = []
    nruns = len(runs)
    for ri, (start, length, value) in enumerate(runs):
        prev_v = runs[(ri - 1) % nruns][2]
        next_v = runs[(ri + 1) % nruns][2]
        if value > prev_v and value > next_v:
            members = (start + np.arange(length)) % n
            maxima.append(int(members.min()))
    return sorted(maxima)


@dataclass(frozen=True)
class DensityReport:
    """Density plus the per-curve metadata used in population studies."""

    density: float
    length: int
    label: str
    writhe: float
    acn: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "density": self.density,
                "length": self.length,
                "label": self.label,
                "writhe": self.writhe,
                "acn": self.acn,
            },
            sort_keys=True,
            separators=(",", ":"),
        )


def density_report(curve: PLCurve, dist: IntensityDistribution) -> DensityReport:
    return DensityReport(
        density=float(density(dist)),
        length=curve.length,
        label=str(dist.dominant),
        writhe=writhe(curve),
        acn=acn(curve),
    )


def radar_data(dist: IntensityDistribution) -> dict:
    """Angle/radius pairs for a radar plot of the distribution."""
    n = dist.n
    return {
        "angles": [2.0 * np.pi * i / n for i in range(n)],
        "radii": [c / float(n) for c in dist.counts],
    }
