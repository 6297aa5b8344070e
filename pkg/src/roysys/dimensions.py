"""Exponent spectra and the Hausdorff/packing dimension formulas.

Spectra are validated against the going-up / going-down transference chain.
Internally most of the work happens in the coordinates ``x_d = 1/(1+omega_d)``,
where every transference inequality becomes an increasing affine bound
``x_i <= a + b*x_j`` between two indices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .scalar import INF, Exponent, as_exponent, from_inv1p, inv1p, is_inf


class InvalidSpectrumError(ValueError):
    pass


class InfeasibleSpectrumError(ValueError):
    """Assigned exponents cannot be completed; ``pair`` names the conflicting indices."""

    def __init__(self, message: str, pair: tuple[int, int]):
        super().__init__(message)
        self.pair = pair


VALID, INVALID, UNCHECKED = "valid", "invalid", "unchecked"


@dataclass(frozen=True)
class ExponentSpectrum:
    omegas: tuple
    validity: str = UNCHECKED
    violation: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(as_exponent(w) for w in self.omegas))
        if not self.omegas:
            raise ValueError("a spectrum needs at least one exponent")

    @property
    def n(self) -> int:
        return len(self.omegas)

    @property
    def is_valid(self) -> bool:
        return self.validity == VALID


@dataclass(frozen=True)
class PartialSpectrum:
    n: int
    assignments: Mapping[int, Exponent] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.assignments:
            raise ValueError("a partial spectrum needs at least one assigned index")
        clean = {}
        for d, w in self.assignments.items():
            if not 0 <= d < self.n:
                raise ValueError(f"index {d} outside 0..{self.n - 1}")
            clean[int(d)] = as_exponent(w)
        object.__setattr__(self, "assignments", dict(sorted(clean.items())))


@dataclass(frozen=True)
class DimensionResult:
    hausdorff: Fraction
    packing: Fraction
    is_full_hausdorff: bool
    completion: ExponentSpectrum | None = None


def minimal_exponent(n: int, d: int) -> Fraction:
    """(d+1)/(n-d), the value forced for every d once it holds for one."""
    return Fraction(d + 1, n - d)


def going_up_bound(n: int, d: int, omega_d: Exponent) -> Exponent:
    """Lower bound d*w/(w+d+1) on omega_{d-1}; equals d when w is infinite."""
    if is_inf(omega_d):
        return Fraction(d)
    return d * omega_d / (omega_d + d + 1)


def going_down_bound(n: int, d: int, omega_d: Exponent) -> Exponent:
    """Upper bound ((n-d)w - 1)/(n-d+1) on omega_{d-1}."""
    if is_inf(omega_d):
        return INF
    return ((n - d) * omega_d - 1) / (n - d + 1)


def validate_spectrum(spectrum: ExponentSpectrum | Sequence) -> ExponentSpectrum:
    if not isinstance(spectrum, ExponentSpectrum):
        spectrum = ExponentSpectrum(tuple(spectrum))
    n, w = spectrum.n, spectrum.omegas

    def bad(msg):
        return replace(spectrum, validity=INVALID, violation=msg)

    for d, x in enumerate(w):
        if not is_inf(x) and x < 0:
            return bad(f"omega_{d} = {x} is negative")
    if w[0] < Fraction(1, n):
        return bad(f"omega_0 = {w[0]} < 1/n = {Fraction(1, n)}")
    for d in range(1, n):
        if w[d - 1] > w[d]:
            return bad(f"omega_{d - 1} = {w[d - 1]} > omega_{d} = {w[d]}")
        up, down = going_up_bound(n, d, w[d]), going_down_bound(n, d, w[d])
        if w[d - 1] < up:
            return bad(f"going-up: omega_{d - 1} = {w[d - 1]} < {up}")
        if w[d - 1] > down:
            return bad(f"going-down: omega_{d - 1} = {w[d - 1]} > {down}")
    return replace(spectrum, validity=VALID, violation=None)


def _require_valid(spectrum) -> ExponentSpectrum:
    s = validate_spectrum(spectrum)
    if not s.is_valid:
        raise InvalidSpectrumError(s.violation)
    return s


def hausdorff_single(n: int, d: int, omega_d) -> DimensionResult:
    """Dimension of the set where omega_d reaches a given value: d + (n+1)/(1+omega_d)."""
    if not 0 <= d < n:
        raise ValueError(f"d={d} outside 0..{n - 1}")
    omega_d = as_exponent(omega_d)
    m = minimal_exponent(n, d)
    if omega_d < m:
        raise InvalidSpectrumError(f"omega_{d} = {omega_d} below the minimal value {m}")
    h = d + (n + 1) * inv1p(omega_d)
    return DimensionResult(h, Fraction(n), omega_d == m)


def hausdorff_intersection(spectrum) -> DimensionResult:
    s = _require_valid(spectrum)
    h = 2 * sum((inv1p(w) for w in s.omegas), Fraction(0))
    full = all(w == minimal_exponent(s.n, d) for d, w in enumerate(s.omegas))
    return DimensionResult(h, Fraction(s.n), full, s)


def hausdorff_pair(n: int, omega_0, omega_last) -> Fraction:
    """n(2 + w0 + w_{n-1}) / ((1+w0)(1+w_{n-1})), written as n(x_0 + x_{n-1})."""
    if n < 2:
        raise ValueError("the pair formula needs n >= 2")
    omega_0, omega_last = as_exponent(omega_0), as_exponent(omega_last)
    _completion_x(PartialSpectrum(n, {0: omega_0, n - 1: omega_last}))
    return n * (inv1p(omega_0) + inv1p(omega_last))


# -- completion of partial spectra ---------------------------------------
#
# For d < d' the transference chain implies, in x-coordinates,
#   x_{d'} <= (n-d')/(n-d) * x_d                       (downward bound)
#   x_d    <= (d'-d)/(d'+1) + (d+1)/(d'+1) * x_{d'}   (upward bound)
# These are the tightest bounds between two indices when each x_d is at most
# (n-d)/(n+1).  The feasible set is closed under componentwise max, so giving
# every free index the least of its upper bounds yields the largest point,
# which maximises the dimension 2 * sum x.


def _down(n: int, d: int, dp: int, x: Fraction) -> Fraction:
    return Fraction(n - dp, n - d) * x


def _up(n: int, d: int, dp: int, x: Fraction) -> Fraction:
    return Fraction(dp - d, dp + 1) + Fraction(d + 1, dp + 1) * x


def _completion_x(partial: PartialSpectrum) -> list[Fraction]:
    n = partial.n
    fixed = {d: inv1p(w) for d, w in partial.assignments.items()}
    for d, x in fixed.items():
        cap = Fraction(n - d, n + 1)
        if x > cap:
            raise InfeasibleSpectrumError(
                f"omega_{d} = {partial.assignments[d]} is below the minimal value {minimal_exponent(n, d)}", (d, d)
            )
    idx = sorted(fixed)
    for i, d in enumerate(idx):
        for dp in idx[i + 1 :]:
            if fixed[dp] > _down(n, d, dp, fixed[d]) or fixed[d] > _up(n, d, dp, fixed[dp]):
                raise InfeasibleSpectrumError(
                    f"omega_{d} = {partial.assignments[d]} and omega_{dp} = {partial.assignments[dp]} "
                    "violate the transference inequalities",
                    (d, dp),
                )
    xs: list[Fraction] = []
    for m in range(n):
        if m in fixed:
            xs.append(fixed[m])
            continue
        upper, lower = [], [(Fraction(0), m)]
        for d, x in fixed.items():
            if d < m:
                upper.append((_down(n, d, m, x), d))
                # x_d <= _up(n, d, m, x_m)  =>  x_m >= ((m+1) x_d - (m-d)) / (d+1)
                lower.append((((m + 1) * x - (m - d)) / (d + 1), d))
            else:
                upper.append((_up(n, m, d, x), d))
                # x_d <= _down(n, m, d, x_m)  =>  x_m >= (n-m)/(n-d) x_d
                lower.append((Fraction(n - m, n - d) * x, d))
        u, du = min(upper)
        l, dl = max(lower)
        if u < l:
            pair = tuple(sorted((du, dl)))
            raise InfeasibleSpectrumError(
                f"no value of omega_{m} is compatible with omega_{pair[0]} and omega_{pair[1]}", pair
            )
        xs.append(u)
    return xs


def optimal_completion(partial: PartialSpectrum) -> DimensionResult:
    """Largest Hausdorff dimension over all valid spectra extending ``partial``."""
    xs = _completion_x(partial)
    omegas = tuple(partial.assignments.get(d, from_inv1p(x)) for d, x in enumerate(xs))
    completion = validate_spectrum(ExponentSpectrum(omegas))
    if not completion.is_valid:
        raise AssertionError(f"completion failed validation: {completion.violation}")
    h = 2 * sum(xs, Fraction(0))
    n = partial.n
    return DimensionResult(h, Fraction(n), h == n, completion)


def dimension_query(n: int, assignments: Mapping[int, Exponent]) -> DimensionResult:
    """Full spectra go through the intersection formula, partial ones through completion."""
    if len(assignments) == n:
        return hausdorff_intersection(ExponentSpectrum(tuple(assignments[d] for d in range(n))))
    return optimal_completion(PartialSpectrum(n, assignments))


def random_valid_spectrum(
    rng: random.Random, n: int, top_span: int = 10, denominator: int = 8, allow_inf: bool = False
) -> ExponentSpectrum:
    """Sample a valid spectrum top-down: omega_{n-1} first, then each lower one in its chain interval."""
    if allow_inf and rng.random() < 0.2:
        top: Exponent = INF
    else:
        top = Fraction(n) + Fraction(rng.randint(0, top_span * denominator), denominator)
    omegas = [top]
    for d in range(n - 1, 0, -1):
        w = omegas[-1]
        lo, hi = going_up_bound(n, d, w), going_down_bound(n, d, w)
        t = Fraction(rng.randint(0, denominator), denominator)
        if is_inf(hi):
            nxt = lo + Fraction(rng.randint(0, top_span * denominator), denominator)
        else:
            nxt = lo + t * (hi - lo)
        omegas.append(nxt)
    return _require_valid(ExponentSpectrum(tuple(reversed(omegas))))
