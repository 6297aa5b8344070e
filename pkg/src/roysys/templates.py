"""Generators for explicit Roy-systems.

* :func:`constant_template` -- all components equal, maximal contraction.
* :func:`single_exponent_template` -- one prescribed ordinary exponent
  omega_d, realised by a two-phase pattern on ``[Q_2k, Q_2k+1]``.
* :func:`intersection_template` -- a full prescribed spectrum, realised by a
  descending/ascending staircase built from the a-coefficients.
* :func:`random_roy_system` -- forward simulation of an arbitrary valid system.

Patterns alternate with all-equal stretches ``[Q_2k+1, Q_2k+2]`` where
``Q_2k+2 = Q_2k+1 / epsilon``.  Cycles are produced lazily and materialised
only up to the requested horizon.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Callable, Iterator, Sequence

from .dimensions import ExponentSpectrum, InvalidSpectrumError, minimal_exponent, validate_spectrum
from .pwl import LinearityInterval, PiecewiseLinearSystem, SlopeBlock, validate
from .scalar import INF, Exponent, as_exponent, as_fraction, inv1p, is_inf

DEFAULT_CYCLES = 20


class UnsupportedSpectrumError(ValueError):
    """The staircase needs nondecreasing a-coefficients; this valid spectrum does not have them."""

Piece = tuple  # (q_start, q_end, r_lo, r_hi)


def default_omega_schedule(n: int, d: int) -> Callable[[int], Fraction]:
    """Stand-in values w_k -> infinity for omega_d = inf; geometric so the tail converges fast."""
    base = minimal_exponent(n, d)
    return lambda k: base * 2 ** (k + 1)


def default_a1_schedule(k: int) -> Fraction:
    return Fraction(1, k + 2)


@dataclass(frozen=True)
class SingleExponentParams:
    n: int
    d: int
    omega_d: Exponent
    epsilon: Fraction
    infinite_schedule: Callable[[int], Fraction] | None = None

    def __post_init__(self):
        object.__setattr__(self, "omega_d", as_exponent(self.omega_d))
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if self.n < 1 or not 0 <= self.d < self.n:
            raise ValueError(f"need n >= 1 and 0 <= d < n, got n={self.n}, d={self.d}")
        if self.omega_d < minimal_exponent(self.n, self.d):
            raise InvalidSpectrumError(
                f"omega_{self.d} = {self.omega_d} below the minimal value {minimal_exponent(self.n, self.d)}"
            )
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    def omega_at(self, k: int) -> Fraction:
        if not is_inf(self.omega_d):
            return self.omega_d
        sched = self.infinite_schedule or default_omega_schedule(self.n, self.d)
        w = as_fraction(sched(k))
        if w < minimal_exponent(self.n, self.d):
            raise ValueError(f"schedule value w_{k} = {w} below the minimal exponent")
        return w


@dataclass(frozen=True)
class IntersectionParams:
    n: int
    spectrum: ExponentSpectrum
    epsilon: Fraction
    pathological_schedule: Callable[[int], Fraction] | None = None

    def __post_init__(self):
        spec = self.spectrum
        if not isinstance(spec, ExponentSpectrum):
            spec = ExponentSpectrum(tuple(spec))
        spec = validate_spectrum(spec)
        if not spec.is_valid:
            raise InvalidSpectrumError(spec.violation)
        if spec.n != self.n or self.n < 2:
            raise ValueError(f"need n >= 2 matching the spectrum length, got n={self.n}, len={spec.n}")
        object.__setattr__(self, "spectrum", spec)
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")


@dataclass(frozen=True)
class TemplateSchedule:
    """Shape parameters of one intersection-pattern cycle."""

    a: tuple[Fraction, ...]
    q_anchors: tuple[Fraction, ...]
    alpha: tuple[Fraction, ...]
    rho: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @property
    def growth(self) -> Fraction:
        """Q_{2k+1} / Q_{2k} = rho_{2n} = a_{n+1} / a_1."""
        return self.rho[-1]


def constant_template(n: int, q0=0, q_max=1) -> PiecewiseLinearSystem:
    q0, q_max = as_fraction(q0), as_fraction(q_max)
    if q0 < 0:
        raise ValueError("q0 must be nonnegative")
    v = q0 / (n + 1)
    return PiecewiseLinearSystem(
        n + 1, q0, (v,) * (n + 1), (LinearityInterval(q0, q_max, SlopeBlock(1, n + 1)),)
    )


def _materialize(
    n: int,
    Q0: Fraction,
    cycles: Iterator[tuple[list[Piece], Fraction, Fraction]],
    q_max,
    n_cycles,
) -> PiecewiseLinearSystem:
    """Consume per-cycle pieces until the horizon; cycles yield (pieces, anchor, next_start)."""
    if q_max is None and n_cycles is None:
        n_cycles = DEFAULT_CYCLES
    q_max = None if q_max is None else as_fraction(q_max)
    if q_max is not None and q_max <= Q0:
        raise ValueError(f"q_max must exceed Q_0 = {Q0}")
    pieces: list[Piece] = []
    starts, anchors = [Q0], []
    for k, (cyc, anchor, nxt) in enumerate(cycles):
        if n_cycles is not None and k >= n_cycles:
            break
        pieces.extend(p for p in cyc if p[0] < p[1])
        anchors.append(anchor)
        starts.append(nxt)
        if q_max is not None and nxt >= q_max:
            break
    intervals = tuple(LinearityInterval(a, b, SlopeBlock(lo, hi)) for a, b, lo, hi in pieces)
    v = Q0 / (n + 1)
    system = PiecewiseLinearSystem(n + 1, Q0, (v,) * (n + 1), intervals, tuple(starts), tuple(anchors))
    if q_max is not None and q_max < system.q_max:
        system = system.truncate(q_max)
    return system


def _single_cycles(p: SingleExponentParams, Q0: Fraction):
    n, d, eps = p.n, p.d, p.epsilon
    Q = Q0
    for k in count():
        w = p.omega_at(k)
        dip = Fraction(n - d) * (1 + w) / (n + 1) * Q
        Q1 = Fraction(n - d) * w / (d + 1) * Q
        Q2 = Q1 / eps
        pieces = [(Q, dip, n - d + 1, n + 1), (dip, Q1, 1, n - d), (Q1, Q2, 1, n + 1)]
        yield pieces, dip, Q2
        Q = Q2


def single_exponent_template(
    params: SingleExponentParams, q_max=None, cycles: int | None = None, Q0=1
) -> PiecewiseLinearSystem:
    """Pattern realising omega_d: the top d+1 components rise (rate d), then the bottom n-d (rate n).

    ``anchors`` holds the dips ``(n-d)(1+omega_d)/(n+1) * Q_2k`` where
    ``S_{n-d}(q)/q`` equals ``1/(1+omega_d)``.
    """
    Q0 = as_fraction(Q0)
    return _materialize(params.n, Q0, _single_cycles(params, Q0), q_max, cycles)


def a_coefficients(spectrum: ExponentSpectrum | Sequence) -> tuple[Fraction, ...]:
    """(a_1, ..., a_{n+1}): a_1 = x_{n-1}, a_d = x_{n-d} - x_{n-d+1}, a_{n+1} = 1 - x_0, with x = 1/(1+omega)."""
    spec = validate_spectrum(spectrum if isinstance(spectrum, ExponentSpectrum) else ExponentSpectrum(tuple(spectrum)))
    if not spec.is_valid:
        raise InvalidSpectrumError(spec.violation)
    n, w = spec.n, spec.omegas
    if is_inf(w[n - 1]):
        raise ValueError("omega_{n-1} is infinite: a_1 would vanish; use the pathological schedule")
    return _raw_a(n, w)


def _raw_a(n: int, w) -> tuple[Fraction, ...]:
    a = [inv1p(w[n - 1])]
    for d in range(2, n + 1):
        a.append(inv1p(w[n - d]) - inv1p(w[n - d + 1]))
    a.append(1 - inv1p(w[0]))
    return tuple(a)


def anchor_schedule(a: Sequence[Fraction]) -> TemplateSchedule:
    """Anchors q_0..q_{2n} of the staircase and their normalisations by q_0.

    q_d     = a_1 + ... + a_d + (n+1-d) a_{d+1}          (0 <= d <= n)
    q_{n+d} = a_{n+1} + ... + a_{d+2} + (1+d) a_{d+1}    (0 <= d <= n)
    """
    a = tuple(as_fraction(x) for x in a)
    n = len(a) - 1
    if sum(a) != 1 or any(x < 0 for x in a) or a[0] == 0:
        raise ValueError(f"a-coefficients must be nonnegative, sum to 1 and have a_1 > 0: {a}")
    for i in range(n):
        if a[i] > a[i + 1]:
            raise UnsupportedSpectrumError(
                f"a_{i + 1} = {a[i]} > a_{i + 2} = {a[i + 1]}: the staircase would run backwards"
            )
    q = []
    for d in range(n + 1):
        q.append(sum(a[:d], Fraction(0)) + (n + 1 - d) * a[d])
    for d in range(1, n + 1):
        q.append(sum(a[d + 1 :], Fraction(0)) + (1 + d) * a[d])
    assert q[n] == 1
    q0 = q[0]
    rho = tuple(x / q0 for x in q)
    assert rho[2 * n] == a[n] / a[0]
    return TemplateSchedule(a, tuple(q), tuple(x / q0 for x in a), rho)


def pathological_a(base: Sequence[Fraction], a1k: Fraction) -> tuple[Fraction, ...]:
    """Per-cycle coefficients when a_1 = 0: a_{1,k} given, a_{d,k} = max(a_d, a_{d-1,k}), then normalised."""
    raw = [as_fraction(a1k)]
    for d in range(1, len(base)):
        raw.append(max(base[d], raw[-1]))
    total = sum(raw)
    return tuple(x / total for x in raw)


def intersection_schedule(params: IntersectionParams, k: int = 0) -> TemplateSchedule:
    n, w = params.n, params.spectrum.omegas
    if not is_inf(w[n - 1]):
        return anchor_schedule(_raw_a(n, w))
    sched = params.pathological_schedule or default_a1_schedule
    a1k = as_fraction(sched(k))
    if not 0 < a1k < 1:
        raise ValueError(f"pathological schedule value a_(1,{k}) = {a1k} outside (0, 1)")
    return anchor_schedule(pathological_a(_raw_a(n, w), a1k))


def _intersection_cycles(p: IntersectionParams, Q0: Fraction):
    n, eps = p.n, p.epsilon
    pathological = is_inf(p.spectrum.omegas[n - 1])
    fixed = None if pathological else intersection_schedule(p)
    Q = Q0
    for k in count():
        s = intersection_schedule(p, k) if pathological else fixed
        at = [r * Q for r in s.rho]
        pieces = []
        for d in range(n):
            pieces.append((at[d], at[d + 1], d + 2, n + 1))
        for d in range(n):
            pieces.append((at[n + d], at[n + d + 1], 1, d + 1))
        Q1 = at[2 * n]
        Q2 = Q1 / eps
        pieces.append((Q1, Q2, 1, n + 1))
        yield pieces, at[n], Q2
        Q = Q2


def staircase_supported(spectrum) -> bool:
    """Whether the a-coefficients of a valid spectrum are nondecreasing.

    Always true for n = 2.  For n >= 3 it amounts to concavity of
    d -> 1/(1+omega_d) (padded with 1 at d = -1 and 0 at d = n), which the
    transference chain does not imply.
    """
    spec = spectrum if isinstance(spectrum, ExponentSpectrum) else ExponentSpectrum(tuple(spectrum))
    n, w = spec.n, spec.omegas
    a = _raw_a(n, w)
    if is_inf(w[n - 1]):
        return all(a[i] <= a[i + 1] for i in range(1, n))
    return all(a[i] <= a[i + 1] for i in range(n))


def intersection_template(
    params: IntersectionParams, q_max=None, cycles: int | None = None, Q0=1
) -> PiecewiseLinearSystem:
    """Staircase realising every omega_d of the spectrum.

    ``anchors`` holds ``rho_n * Q_2k``, where ``S_k(q)/q = 1/(1+omega_{n-k})``.
    """
    Q0 = as_fraction(Q0)
    return _materialize(params.n, Q0, _intersection_cycles(params, Q0), q_max, cycles)


def _random_composition(rng: random.Random, n1: int, total: Fraction) -> list[Fraction]:
    if total == 0:
        return [Fraction(0)] * n1
    weights = sorted(rng.randint(0, 6) for _ in range(n1))
    if sum(weights) == 0:
        weights = [1] * n1
    s = sum(weights)
    return [total * w / s for w in weights]


def _groups(vals: Sequence[Fraction]) -> list[tuple[int, int]]:
    """Maximal runs of equal values as 1-based (first, last) pairs."""
    out, start = [], 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] != vals[start]:
            out.append((start + 1, i))
            start = i
    return out


def random_roy_system(seed, n: int, q0=0, q_max=10, mean_interval_length=1) -> PiecewiseLinearSystem:
    """A random valid Roy-system built by forward simulation.

    Each step picks a block ``(lo, top)`` where ``top`` ends a run of equal
    components (so the block has room to rise) and which meets the junction
    condition against the previous block, then a rational duration capped so
    the block never overtakes the next component.
    """
    rng = random.Random(seed)
    n1 = n + 1
    q0, q_max, mean = as_fraction(q0), as_fraction(q_max), as_fraction(mean_interval_length)
    if n < 1 or q_max <= q0 or mean <= 0:
        raise ValueError("need n >= 1, q_max > q0 and a positive mean interval length")
    vals = _random_composition(rng, n1, q0)
    init = tuple(vals)
    q = q0
    prev: SlopeBlock | None = None
    pieces: list[LinearityInterval] = []
    while q < q_max:
        cands = []
        for first, top in _groups(vals):
            for lo in range(first, top + 1):
                if prev is not None and prev.lower < top:
                    seg = vals[prev.lower - 1 : top]
                    if any(v != seg[0] for v in seg):
                        continue
                cands.append(SlopeBlock(lo, top))
        fresh = [b for b in cands if b != prev]
        block = rng.choice(fresh or cands)
        m = block.size
        cap = None if block.upper == n1 else m * (vals[block.upper] - vals[block.upper - 1])
        dur = mean * Fraction(rng.randint(1, 16), 8)
        if cap is not None and (dur >= cap or rng.random() < 0.5):
            dur = cap
        dur = min(dur, q_max - q)
        inc = dur / m
        for i in range(block.lower - 1, block.upper):
            vals[i] += inc
        pieces.append(LinearityInterval(q, q + dur, block))
        q += dur
        prev = block
    system = PiecewiseLinearSystem(n1, q0, init, tuple(pieces))
    report = validate(system)
    if not report.passed:
        raise AssertionError(f"generator produced an invalid system: {report.violations[0]}")
    return system


__all__ = [
    "INF",
    "SingleExponentParams",
    "IntersectionParams",
    "TemplateSchedule",
    "constant_template",
    "single_exponent_template",
    "a_coefficients",
    "anchor_schedule",
    "pathological_a",
    "intersection_schedule",
    "intersection_template",
    "staircase_supported",
    "UnsupportedSpectrumError",
    "random_roy_system",
]
