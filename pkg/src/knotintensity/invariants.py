"""Knot-type identification and geometric complexity observables.

The classifier is the Alexander polynomial, computed exactly from the
crossing-relation matrix of a Gauss code: one relation per crossing over
the arc variables, drop one row and one column, take the determinant, then
normalise by units so the polynomial is symmetric in t <-> 1/t with a
positive leading coefficient.  Determinants are evaluated modulo several
31-bit primes and reconstructed by Chinese remaindering, which is exact
because every coefficient is bounded by 4**(c-1) for c crossings.

The catalog covers prime knots up to six crossings plus the two smallest
nontrivial connected sums; labels identify mirror pairs.  Determinants
alone would collide (4_1 vs 5_1 and 6_1 vs 3_1#3_1 share determinants), so
classification always compares full polynomials.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .config import DEFAULT_CONFIG, PipelineConfig
from .curve import PLCurve
from .diagram import KnotDiagram, project, simplify
from .errors import DegenerateProjection
from .rng import curve_digest, rng_from, sphere_point


@dataclass(frozen=True)
class LaurentPoly:
    """Sparse integer Laurent polynomial in one variable."""

    terms: tuple[tuple[int, int], ...]  # sorted (exponent, coefficient), no zeros

    @classmethod
    def from_dict(cls, coeffs: dict[int, int]) -> "LaurentPoly":
        terms = tuple(sorted((int(e), int(c)) for e, c in coeffs.items() if c != 0))
        return cls(terms)

    @classmethod
    def from_coeff_array(cls, coeffs, min_exp: int = 0) -> "LaurentPoly":
        return cls.from_dict({min_exp + i: int(c) for i, c in enumerate(coeffs)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def min_exp(self) -> int:
        return self.terms[0][0]

    @property
    def max_exp(self) -> int:
        return self.terms[-1][0]

    def coeff(self, exponent: int) -> int:
        for e, c in self.terms:
            if e == exponent:
                return c
        return 0

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        acc: dict[int, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly.from_dict(acc)

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly(tuple((e + k, c) for e, c in self.terms))

    def negate(self) -> "LaurentPoly":
        return LaurentPoly(tuple((e, -c) for e, c in self.terms))

    def evaluate(self, x):
        if isinstance(x, int):
            x = Fraction(x)
        total = x - x  # zero of the right type
        for e, c in self.terms:
            total += c * x**e
        return total

    def normalize(self) -> "LaurentPoly":
        """Unit-normalise: centre exponents, force a positive lead.

        Valid knot polynomials are palindromic after centring and evaluate
        to +/-1 at t=1; violations indicate a corrupted code and raise.
        """
        if self.is_zero:
            raise ValueError("cannot normalise the zero polynomial")
        lo, hi = self.min_exp, self.max_exp
        if (lo + hi) % 2 != 0:
            raise ValueError(f"exponent span of {self} cannot be centred")
        p = self.shift(-(lo + hi) // 2)
        if p.terms[-1][1] < 0:
            p = p.negate()
        for e, c in p.terms:
            if p.coeff(-e) != c:
                raise ValueError(f"{self} is not palindromic after centring")
        if abs(p.evaluate(1)) != 1:
            raise ValueError(f"{self} does not evaluate to a unit at 1")
        return p

    def to_json(self) -> str:
        return json.dumps({str(e): c for e, c in self.terms}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LaurentPoly":
        return cls.from_dict({int(e): int(c) for e, c in json.loads(text).items()})

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for e, c in sorted(self.terms, reverse=True):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                t = "t" if e == 1 else f"t^{e}"
                body = t if mag == 1 else f"{mag}*{t}"
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


ONE = LaurentPoly.from_dict({0: 1})


@dataclass(frozen=True, order=False)
class KnotTypeLabel:
    """Catalog identity of a knot (mirror pairs identified).

    Off-catalog polynomials map to an OTHER label carrying the polynomial,
    so population studies can discard those samples without losing them.
    """

    name: str
    crossings: int
    poly: LaurentPoly | None = field(default=None)

    def is_other(self) -> bool:
        return self.name == "OTHER"

    def sort_key(self):
        return (self.crossings, self.name, str(self.poly) if self.poly else "")

    def __str__(self) -> str:
        if self.is_other():
            return f"OTHER[{self.poly}]"
        return self.name


def _label(name: str, crossings: int, coeffs: dict[int, int]) -> KnotTypeLabel:
    return KnotTypeLabel(name, crossings, LaurentPoly.from_dict(coeffs))


UNKNOT = _label("0_1", 0, {0: 1})

#: Catalog labels keyed by their normalised Alexander polynomials.
CATALOG: tuple[KnotTypeLabel, ...] = (
    UNKNOT,
    _label("3_1", 3, {1: 1, 0: -1, -1: 1}),
    _label("4_1", 4, {1: 1, 0: -3, -1: 1}),
    _label("5_1", 5, {2: 1, 1: -1, 0: 1, -1: -1, -2: 1}),
    _label("5_2", 5, {1: 2, 0: -3, -1: 2}),
    _label("6_1", 6, {1: 2, 0: -5, -1: 2}),
    _label("6_2", 6, {2: 1, 1: -3, 0: 3, -1: -3, -2: 1}),
    _label("6_3", 6, {2: 1, 1: -3, 0: 5, -1: -3, -2: 1}),
    _label("3_1#3_1", 6, {2: 1, 1: -2, 0: 3, -1: -2, -2: 1}),
    _label("3_1#4_1", 7, {2: 1, 1: -4, 0: 5, -1: -4, -2: 1}),
)

_CATALOG_BY_POLY: dict[tuple, KnotTypeLabel] = {}
_CATALOG_BY_NAME: dict[str, KnotTypeLabel] = {}
for _lbl in CATALOG:
    key = _lbl.poly.terms
    if key in _CATALOG_BY_POLY:
        raise AssertionError(f"catalog polynomials collide: {_lbl.name}")
    _CATALOG_BY_POLY[key] = _lbl
    _CATALOG_BY_NAME[_lbl.name] = _lbl

CATALOG_NAMES = tuple(sorted(_CATALOG_BY_NAME, key=lambda n: _CATALOG_BY_NAME[n].sort_key()))


def catalog_label(name: str) -> KnotTypeLabel:
    try:
        return _CATALOG_BY_NAME[name]
    except KeyError:
        raise KeyError(
            f"unknown knot label {name!r}; catalog: {', '.join(CATALOG_NAMES)}"
        ) from None


def other_label(poly: LaurentPoly) -> KnotTypeLabel:
    return KnotTypeLabel("OTHER", 10**6, poly)


def _crt_pair(r1: int, r2: int, p1: int, p2: int) -> int:
    return r1 + p1 * ((r2 - r1) * pow(p1, -1, p2) % p2)


def _crt(residues, primes) -> int:
    x = int(residues[0])
    modulus = int(primes[0])
    for r, p in zip(residues[1:], primes[1:]):
        x = _crt_pair(x, int(r), modulus, int(p))
        modulus *= int(p)
    if x > modulus // 2:
        x -= modulus
    return x


def _poly_from_matrices(M0: np.ndarray, M1: np.ndarray) -> LaurentPoly:
    """Exact determinant of M0 + t*M1 on the minor dropping last row/column."""
    c = M0.shape[0]
    if c <= 1:
        return ONE
    n_pts = c  # determinant degree is at most c-1
    points = np.arange(n_pts, dtype=np.int64)
    k = _kernels.primes_needed(c)
    primes = _kernels.PRIMES[:k]
    residue_rows = []
    for p in primes:
        vals = _kernels.det_mod_points(M0, M1, points, int(p))
        residue_rows.append(_kernels.interpolate_mod(vals, int(p)))
    coeffs = [
        _crt([row[i] for row in residue_rows], primes) for i in range(n_pts)
    ]
    poly = LaurentPoly.from_coeff_array(coeffs)
    if poly.is_zero:
        raise ValueError("crossing-relation determinant vanished; invalid code")
    return poly


def _det_at_minus1(M0: np.ndarray, M1: np.ndarray) -> int:
    c = M0.shape[0]
    if c <= 1:
        return 1
    points = np.array([-1], dtype=np.int64)
    k = _kernels.primes_needed(c)
    primes = _kernels.PRIMES[:k]
    residues = [
        _kernels.det_mod_points(M0, M1, points, int(p))[0] for p in primes
    ]
    return abs(_crt(residues, primes))


def alexander(diagram: KnotDiagram) -> LaurentPoly:
    """Normalised Alexander polynomial of a Gauss code (empty code -> 1)."""
    if not diagram.code:
        return ONE
    ids, overs, signs = diagram.code_arrays()
    M0, M1 = _kernels.alexander_matrices(ids, overs, signs)
    return _poly_from_matrices(M0, M1).normalize()


def classify(poly: LaurentPoly) -> KnotTypeLabel:
    """Exact catalog lookup of a normalised polynomial."""
    hit = _CATALOG_BY_POLY.get(poly.terms)
    return hit if hit is not None else other_label(poly)


# -- fast internal path over raw code arrays ---------------------------------

def classify_code_arrays(ids, overs, signs) -> KnotTypeLabel:
    """Simplify a raw Gauss code and classify its Alexander polynomial."""
    if len(ids) == 0:
        return UNKNOT
    sid, sover = _kernels.simplify_code_arrays(ids, overs, signs)
    if len(sid) == 0:
        return UNKNOT
    M0, M1 = _kernels.alexander_matrices(sid, sover, signs)
    return classify(_poly_from_matrices(M0, M1).normalize())


_CATALOG_DETS = {abs(int(lbl.poly.evaluate(-1))) for lbl in CATALOG}


def code_matches_label(ids, overs, signs, target: KnotTypeLabel) -> bool:
    """Does this raw code classify exactly to ``target``?

    Cheap determinant screen first; the full polynomial is only computed
    when the determinant agrees.
    """
    if len(ids) == 0:
        return target.name == "0_1"
    sid, sover = _kernels.simplify_code_arrays(ids, overs, signs)
    if len(sid) == 0:
        return target.name == "0_1"
    M0, M1 = _kernels.alexander_matrices(sid, sover, signs)
    target_det = abs(int(target.poly.evaluate(-1)))
    if _det_at_minus1(M0, M1) != target_det:
        return False
    poly = _poly_from_matrices(M0, M1).normalize()
    return poly.terms == target.poly.terms


# -- geometric observables ----------------------------------------------------

def _pair_writhe_terms(vertices: np.ndarray):
    """Signed solid-angle contribution of every non-adjacent edge pair.

    For closed curves the per-pair term is the fraction of projection
    directions in which the pair crosses, signed by the crossing handedness;
    summing terms gives the writhe, summing absolute values the average
    crossing number.
    """
    v = np.asarray(vertices, dtype=np.float64)
    n = len(v)
    nxt = np.roll(np.arange(n), -1)
    i_idx, j_idx = np.triu_indices(n, k=2)
    keep = ~((i_idx == 0) & (j_idx == n - 1))
    i_idx, j_idx = i_idx[keep], j_idx[keep]

    one = v[i_idx]
    two = v[nxt[i_idx]]
    three = v[j_idx]
    four = v[nxt[j_idx]]

    r12 = two - one
    r34 = four - three
    r13 = three - one
    r14 = four - one
    r23 = three - two
    r24 = four - two

    def unit(x):
        norm = np.sqrt((x * x).sum(axis=1))
        safe = np.where(norm > 1e-14, norm, 1.0)
        return x / safe[:, None], norm > 1e-14

    n1, ok1 = unit(np.cross(r13, r14))
    n2, ok2 = unit(np.cross(r14, r24))
    n3, ok3 = unit(np.cross(r24, r23))
    n4, ok4 = unit(np.cross(r23, r13))
    ok = ok1 & ok2 & ok3 & ok4

    def asin_dot(a, b):
        return np.arcsin(np.clip((a * b).sum(axis=1), -1.0, 1.0))

    area = asin_dot(n1, n2) + asin_dot(n2, n3) + asin_dot(n3, n4) + asin_dot(n4, n1)
    orient = (np.cross(r34, r12) * r13).sum(axis=1)
    signed = np.where(ok & (np.abs(orient) > 1e-14), area * np.sign(orient), 0.0)
    return signed / (2.0 * np.pi)


def writhe(curve: PLCurve) -> float:
    """Gauss double-sum writhe of a closed curve."""
    if not curve.closed:
        raise ValueError("writhe is defined for closed curves")
    return float(_pair_writhe_terms(curve.vertices).sum())


def acn(curve: PLCurve) -> float:
    """Average crossing number: the same double sum with absolute values."""
    if not curve.closed:
        raise ValueError("acn is defined for closed curves")
    return float(np.abs(_pair_writhe_terms(curve.vertices)).sum())


# -- end-to-end classification of closed curves -------------------------------

def classify_diagram(diagram: KnotDiagram) -> KnotTypeLabel:
    return classify(alexander(simplify(diagram)))


def classify_curve(curve: PLCurve, seed: int = 0,
                   config: PipelineConfig = DEFAULT_CONFIG) -> KnotTypeLabel:
    """Knot type of a closed curve via one generic projection.

    The label does not depend on the direction (the polynomial is an
    invariant); the seed only selects which generic direction is tried
    first.
    """
    digest = curve_digest(curve.vertices)
    for attempt in range(DEFAULT_CONFIG.max_resample):
        rng = rng_from(seed, "classify", digest, attempt)
        direction = sphere_point(rng)
        try:
            return classify_diagram(project(curve, direction, config))
        except DegenerateProjection:
            continue
    raise DegenerateProjection("no generic direction found; curve may be degenerate")
