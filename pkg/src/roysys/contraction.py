"""Local/average contraction rates and the successive-minima exponent functionals.

Everything here is exact.  Extrema over a window are taken over the window
endpoints and the breakpoints inside it; this is exact rather than sampled
because on a linearity interval both the running average
``(A + delta*q)/(q - q0)`` and ``S_k(q)/q = (A + B*q)/q`` are monotone.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .pwl import DomainError, PiecewiseLinearSystem
from .scalar import INF, as_fraction, from_inv1p, to_decimal_str

DEFAULT_TAIL = Fraction(1, 2)


class HorizonError(ValueError):
    """The horizon does not cover enough of the system for a tail estimate."""


@dataclass(frozen=True)
class RateSegment:
    q_start: Fraction
    q_end: Fraction
    delta: int


@dataclass(frozen=True)
class RateProfile:
    """Piecewise-constant local rate with its running average."""

    q0: Fraction
    segments: tuple[RateSegment, ...]
    lower_estimate: Fraction
    upper_estimate: Fraction
    horizon: Fraction
    _integrals: tuple[Fraction, ...] = field(repr=False, default=())

    def running_average(self, Q) -> Fraction:
        Q = as_fraction(Q)
        if not self.q0 < Q <= self.horizon:
            raise DomainError(f"Q={Q} outside ({self.q0}, {self.horizon}]")
        lo, hi = 0, len(self.segments) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if self.segments[mid].q_end < Q:
                lo = mid + 1
            else:
                hi = mid
        seg = self.segments[lo]
        return (self._integrals[lo] + seg.delta * (Q - seg.q_start)) / (Q - self.q0)


@dataclass(frozen=True)
class ExponentEstimate:
    """Tail extrema of S_k(q)/q and the exponents they correspond to.

    ``inferred_omega`` and ``inferred_omega_hat`` are the exponents with index
    n - k.  ``anchor_points`` are the q where the lower extremum is attained.
    """

    k: int
    liminf_value: object
    limsup_value: object
    inferred_omega: object
    inferred_omega_hat: object
    anchor_points: tuple = ()
    limsup_points: tuple = ()
    note: str = "horizon-limited estimate"


def local_rate_of_block(n_plus_1: int, lower: int) -> int:
    return n_plus_1 - lower


def local_rate(system: PiecewiseLinearSystem, q) -> int:
    """n + 1 - kappa, kappa the lowest rising component, on the interval containing q.

    Breakpoints are rejected: the rate is undefined there.
    """
    q = as_fraction(q)
    i = system.interval_index(q)
    iv = system.intervals[i]
    if q == iv.q_start or q == iv.q_end:
        raise DomainError(f"q={q} is a breakpoint; pass an interior point")
    return local_rate_of_block(system.n_plus_1, iv.block.lower)


def interval_rates(system: PiecewiseLinearSystem) -> list[int]:
    return [system.n_plus_1 - iv.block.lower for iv in system.intervals]


def average_rate(system: PiecewiseLinearSystem, Q) -> Fraction:
    """Delta(P, Q) = (1/(Q - q0)) * integral of delta over [q0, Q]."""
    Q = as_fraction(Q)
    if Q <= system.q0:
        raise DomainError(f"average rate needs Q > q0 = {system.q0}, got {Q}")
    i = system.interval_index(Q)
    iv = system.intervals[i]
    integral = system.delta_integrals[i] + (system.n_plus_1 - iv.block.lower) * (Q - iv.q_start)
    return integral / (Q - system.q0)


def tail_window(system: PiecewiseLinearSystem, horizon=None, tail=DEFAULT_TAIL) -> tuple[Fraction, Fraction]:
    """The window ``[start, horizon]`` used for liminf/limsup estimates.

    Systems annotated with ``cycle_starts`` use the last ``tail`` fraction of
    complete cycles and need at least two of them.  Otherwise the window is
    the last ``tail`` fraction of ``[q0, horizon]``.
    """
    H = system.q_max if horizon is None else as_fraction(horizon)
    tail = as_fraction(tail)
    if not 0 < tail <= 1:
        raise ValueError(f"tail fraction must lie in (0, 1], got {tail}")
    if not system.q0 < H <= system.q_max:
        raise HorizonError(f"horizon {H} outside ({system.q0}, {system.q_max}]")
    if system.cycle_starts:
        starts = [c for c in system.cycle_starts if c <= H]
        complete = len(starts) - 1
        if complete < 2:
            raise HorizonError(f"horizon {H} covers {max(complete, 0)} complete cycle(s); at least 2 are needed")
        first = complete - math.ceil(complete * tail)
        return starts[first], H
    return system.q0 + (1 - tail) * (H - system.q0), H


def _window_points(system: PiecewiseLinearSystem, start, end) -> list[Fraction]:
    pts = [start]
    pts.extend(b for b in system.breakpoints if start < b < end)
    if end != start:
        pts.append(end)
    return pts


def rate_profile(system: PiecewiseLinearSystem, horizon=None, tail=DEFAULT_TAIL) -> RateProfile:
    H = system.q_max if horizon is None else as_fraction(horizon)
    sys_ = system if H == system.q_max else system.truncate(H)
    lo, hi, _, _ = rate_extrema(system, horizon=H, tail=tail)
    segs = tuple(RateSegment(iv.q_start, iv.q_end, system.n_plus_1 - iv.block.lower) for iv in sys_.intervals)
    return RateProfile(system.q0, segs, lo, hi, H, sys_.delta_integrals[:-1])


def rate_extrema(system: PiecewiseLinearSystem, horizon=None, tail=DEFAULT_TAIL):
    """Tail estimates of the lower and upper average contraction rates.

    Returns ``(lower, upper, argmin_points, argmax_points)``.  The running
    average is monotone between breakpoints, so evaluating it at the window
    ends and the breakpoints inside gives the exact extrema over the window.
    """
    start, end = tail_window(system, horizon, tail)
    pts = [p for p in _window_points(system, start, end) if p > system.q0]
    if not pts:
        raise HorizonError("tail window contains no point beyond q0")
    vals = [average_rate(system, p) for p in pts]
    lo, hi = min(vals), max(vals)
    return (
        lo,
        hi,
        tuple(p for p, v in zip(pts, vals) if v == lo),
        tuple(p for p, v in zip(pts, vals) if v == hi),
    )


def _ratio_extrema(system: PiecewiseLinearSystem, k: int, pts: Sequence[Fraction]):
    vals = []
    for p in pts:
        vals.append(system.partial_sum(k, p) / p)
    lo, hi = min(vals), max(vals)
    return lo, hi, tuple(p for p, v in zip(pts, vals) if v == lo), tuple(p for p, v in zip(pts, vals) if v == hi)


def exponent_functionals(system: PiecewiseLinearSystem, horizon=None, tail=DEFAULT_TAIL) -> list[ExponentEstimate]:
    """Tail extrema of S_k(q)/q for k = 1..n and the implied exponents.

    For k, the lower extremum estimates 1/(1 + omega_{n-k}) and the upper one
    1/(1 + omega_hat_{n-k}).
    """
    start, end = tail_window(system, horizon, tail)
    pts = [p for p in _window_points(system, start, end) if p > 0]
    pts.extend(a for a in system.anchors if start <= a <= end and a not in pts)
    if not pts:
        raise HorizonError("tail window contains no positive point")
    note = "exact tail extrema" if system.cycle_starts else "horizon-limited estimate"
    out = []
    for k in range(1, system.n_plus_1):
        lo, hi, lo_pts, hi_pts = _ratio_extrema(system, k, pts)
        out.append(ExponentEstimate(k, lo, hi, from_inv1p(lo), from_inv1p(hi), lo_pts, hi_pts, note))
    return out


def trajectory_rows(system: PiecewiseLinearSystem):
    """Per-breakpoint rows: q, P_1..P_{n+1}, delta to the right, Delta, S_k/q."""
    integrals = system.delta_integrals
    rates = interval_rates(system)
    n1 = system.n_plus_1
    for i, (q, vals) in enumerate(zip(system.breakpoints, system.breakpoint_values)):
        delta = rates[i] if i < len(rates) else None
        Delta = integrals[i] / (q - system.q0) if q > system.q0 else None
        partial = []
        acc = Fraction(0)
        for k in range(n1 - 1):
            acc += vals[k]
            partial.append(acc / q if q > 0 else None)
        yield q, vals, delta, Delta, partial


def trajectory_csv(system: PiecewiseLinearSystem, precision: int = 12) -> str:
    n1 = system.n_plus_1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["q"] + [f"P_{i}" for i in range(1, n1 + 1)] + ["delta", "Delta"] + [f"S_{k}/q" for k in range(1, n1)]
    )

    def fmt(x):
        return "" if x is None else to_decimal_str(x, precision)

    for q, vals, delta, Delta, partial in trajectory_rows(system):
        w.writerow(
            [fmt(q)] + [fmt(v) for v in vals] + ["" if delta is None else str(delta), fmt(Delta)] + [fmt(s) for s in partial]
        )
    return buf.getvalue()


__all__ = [
    "INF",
    "HorizonError",
    "RateSegment",
    "RateProfile",
    "ExponentEstimate",
    "local_rate",
    "interval_rates",
    "average_rate",
    "tail_window",
    "rate_profile",
    "rate_extrema",
    "exponent_functionals",
    "trajectory_rows",
    "trajectory_csv",
]
