"""Pipeline-wide tunables with their fixed defaults."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs shared by closure, core and intensity computations.

    ``closures`` is the number M of probabilistic closures per dominant-type
    identification.  ``acceptance_fraction`` is the minimum frequency of the
    parent's dominant type required to accept a tentative trim while locating
    a knot core.  The remaining fields are geometric tolerances; the
    ``min_*`` thresholds mark a projection as non-generic, which triggers a
    deterministic resample.
    """

    closures: int = 64
    radius_factor: float = 10.0
    acceptance_fraction: float = 0.5
    min_crossing_sin: float = 1e-6
    min_depth_separation: float = 1e-9   # relative to curve scale
    min_param_margin: float = 1e-9
    closure_clearance: float = 1e-12     # relative, closure segment vs chain
    max_resample: int = 64

    def __post_init__(self):
        if self.closures < 1:
            raise ValueError("closures must be >= 1")
        if self.radius_factor < 2:
            raise ValueError("radius_factor must be >= 2")
        if not (0.5 <= self.acceptance_fraction <= 1.0):
            raise ValueError("acceptance_fraction must lie in [0.5, 1.0]")


#: Absolute minimum distance between consecutive vertices of a valid curve.
MIN_VERTEX_SEPARATION = 1e-9

#: Relative tolerance for the unit-edge (equilateral) check.
EQUILATERAL_REL_TOL = 1e-6

DEFAULT_CONFIG = PipelineConfig()
