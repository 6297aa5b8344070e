"""Potential functions bounding the lower average contraction rate.

Two families are supported:

* ``single(d)``:  Phi(q) = d*q + (n+1) * (P_1 + ... + P_{n-d})(q)
* ``intersection``:  Phi(q) = 2 * sum_{k=1..n} S_k(q) = sum_j 2(n+1-j) P_j(q)

On every linearity interval Phi' >= delta.  Integrating gives
``liminf Delta <= liminf Phi(q)/q``, which is what :func:`integrated_upper_bound`
estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .contraction import DEFAULT_TAIL, HorizonError, _window_points, tail_window
from .pwl import PiecewiseLinearSystem, SlopeBlock
from .scalar import as_fraction

SINGLE, INTERSECTION = "single", "intersection"


@dataclass(frozen=True)
class PotentialSpec:
    """Phi(q) = drift*q + sum_j weights[j-1] * P_j(q)."""

    kind: str
    n: int
    d: int | None
    weights: tuple[int, ...]
    drift: int

    def __post_init__(self):
        if self.kind not in (SINGLE, INTERSECTION):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if len(self.weights) != self.n + 1:
            raise ValueError("need one weight per component")
        if any(w < 0 for w in self.weights) or self.drift < 0:
            raise ValueError("weights must be nonnegative")

    @classmethod
    def single(cls, n: int, d: int) -> "PotentialSpec":
        if not 0 <= d < n:
            raise ValueError(f"d={d} outside 0..{n - 1}")
        w = tuple(n + 1 if j <= n - d else 0 for j in range(1, n + 2))
        return cls(SINGLE, n, d, w, d)

    @classmethod
    def intersection(cls, n: int) -> "PotentialSpec":
        if n < 1:
            raise ValueError("n must be >= 1")
        w = tuple(2 * (n + 1 - j) for j in range(1, n + 2))
        return cls(INTERSECTION, n, None, w, 0)

    @property
    def label(self) -> str:
        return f"single({self.d})" if self.kind == SINGLE else INTERSECTION

    def slope(self, block: SlopeBlock) -> Fraction:
        """Phi' on an interval where ``block`` rises: only the weights inside the block count."""
        return self.drift + Fraction(sum(self.weights[block.lower - 1 : block.upper]), block.size)


@dataclass(frozen=True)
class SlopeCheck:
    q_start: Fraction
    q_end: Fraction
    phi_slope: Fraction
    delta: int

    @property
    def margin(self) -> Fraction:
        return self.phi_slope - self.delta

    @property
    def ok(self) -> bool:
        return self.margin >= 0


@dataclass(frozen=True)
class PotentialReport:
    spec: PotentialSpec
    rows: tuple[SlopeCheck, ...]

    @property
    def violations(self) -> tuple[SlopeCheck, ...]:
        return tuple(r for r in self.rows if not r.ok)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed


def _check_dims(spec: PotentialSpec, system: PiecewiseLinearSystem):
    if spec.n != system.n:
        raise ValueError(f"potential built for n={spec.n}, system has n={system.n}")


def phi(spec: PotentialSpec, system: PiecewiseLinearSystem, q) -> Fraction:
    _check_dims(spec, system)
    vals = system.evaluate(q)
    q = as_fraction(q)
    return spec.drift * q + sum((w * v for w, v in zip(spec.weights, vals)), Fraction(0))


def check_slope_inequality(spec: PotentialSpec, system: PiecewiseLinearSystem) -> PotentialReport:
    _check_dims(spec, system)
    n1 = system.n_plus_1
    rows = tuple(
        SlopeCheck(iv.q_start, iv.q_end, spec.slope(iv.block), n1 - iv.block.lower) for iv in system.intervals
    )
    return PotentialReport(spec, rows)


def integrated_upper_bound(spec: PotentialSpec, system: PiecewiseLinearSystem, horizon=None, tail=DEFAULT_TAIL):
    """Minimum of Phi(q)/q over the tail window.

    Phi is affine on each linearity interval, so Phi(q)/q is monotone there and
    the minimum sits at a window end or a breakpoint.
    """
    _check_dims(spec, system)
    start, end = tail_window(system, horizon, tail)
    pts = [p for p in _window_points(system, start, end) if p > 0]
    if not pts:
        raise HorizonError("tail window contains no positive point")
    return min(phi(spec, system, p) / p for p in pts)


def phi_csv_rows(report: PotentialReport):
    yield ("q_start", "q_end", "phi_slope", "delta", "margin")
    for r in report.rows:
        yield (r.q_start, r.q_end, r.phi_slope, r.delta, r.margin)


__all__ = [
    "PotentialSpec",
    "SlopeCheck",
    "PotentialReport",
    "phi",
    "check_slope_inequality",
    "integrated_upper_bound",
    "phi_csv_rows",
]
