"""Exact continuous piecewise-linear maps and the Roy-system axioms (S1)-(S3).

A :class:`PiecewiseLinearSystem` stores its initial values and a contiguous
list of linearity intervals, each carrying the block of components that rise
on it.  Component values are never stored independently: they are obtained
by integrating slopes, so continuity holds by construction.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

from .scalar import as_fraction, format_scalar


class DomainError(ValueError):
    """A point outside the domain of a system, or an index out of range."""


class MalformedSystemError(ValueError):
    """Structural problems: gaps, overlaps, empty intervals, bad block indices."""


@dataclass(frozen=True, order=True)
class SlopeBlock:
    """Components ``lower..upper`` (1-based, inclusive) rise together."""

    lower: int
    upper: int

    def __post_init__(self):
        if not 1 <= self.lower <= self.upper:
            raise MalformedSystemError(f"bad block {self.lower}..{self.upper}: need 1 <= lower <= upper")

    @property
    def size(self) -> int:
        return self.upper - self.lower + 1

    @property
    def slope(self) -> Fraction:
        return Fraction(1, self.size)

    def slopes(self, n_plus_1: int) -> tuple[Fraction, ...]:
        s = self.slope
        return tuple(s if self.lower <= i <= self.upper else Fraction(0) for i in range(1, n_plus_1 + 1))


@dataclass(frozen=True)
class LinearityInterval:
    q_start: Fraction
    q_end: Fraction
    block: SlopeBlock

    @property
    def length(self) -> Fraction:
        return self.q_end - self.q_start


@dataclass(frozen=True)
class Violation:
    axiom: str  # "S1", "S2" or "S3"
    location: object  # a point q, or a (q_start, q_end) pair
    description: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed


def _merge(intervals: Iterable[LinearityInterval]) -> tuple[LinearityInterval, ...]:
    out: list[LinearityInterval] = []
    for iv in intervals:
        if out and out[-1].block == iv.block and out[-1].q_end == iv.q_start:
            out[-1] = LinearityInterval(out[-1].q_start, iv.q_end, iv.block)
        else:
            out.append(iv)
    return tuple(out)


@dataclass(frozen=True)
class PiecewiseLinearSystem:
    """Candidate Roy-system on the window ``[q0, q_max]``.

    Adjacent intervals carrying the same block are merged, so ``intervals``
    are the maximal linearity intervals.  ``cycle_starts`` and ``anchors`` are
    optional annotations from template generators (they do not take part in
    equality).
    """

    n_plus_1: int
    q0: Fraction
    initial_values: tuple[Fraction, ...]
    intervals: tuple[LinearityInterval, ...]
    cycle_starts: tuple[Fraction, ...] = field(default=(), compare=False)
    anchors: tuple[Fraction, ...] = field(default=(), compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        n1 = self.n_plus_1
        if not isinstance(n1, int) or n1 < 2:
            raise MalformedSystemError(f"n_plus_1 must be an integer >= 2, got {n1!r}")
        set_(self, "q0", as_fraction(self.q0))
        init = tuple(as_fraction(v) for v in self.initial_values)
        if len(init) != n1:
            raise MalformedSystemError(f"expected {n1} initial values, got {len(init)}")
        set_(self, "initial_values", init)
        if not self.intervals:
            raise MalformedSystemError("a system needs at least one linearity interval")
        prev_end = self.q0
        for i, iv in enumerate(self.intervals):
            b = iv.block
            if not (1 <= b.lower <= b.upper <= n1):
                raise MalformedSystemError(f"interval {i}: block ({b.lower}, {b.upper}) out of range 1..{n1}")
            if iv.q_start != prev_end:
                kind = "gap" if iv.q_start > prev_end else "overlap"
                raise MalformedSystemError(f"interval {i}: {kind} between q={prev_end} and q={iv.q_start}")
            if not iv.q_start < iv.q_end:
                raise MalformedSystemError(f"interval {i}: empty or reversed [{iv.q_start}, {iv.q_end}]")
            prev_end = iv.q_end
        set_(self, "intervals", _merge(self.intervals))
        set_(self, "cycle_starts", tuple(as_fraction(c) for c in self.cycle_starts))
        set_(self, "anchors", tuple(as_fraction(a) for a in self.anchors))

        knots = [self.q0]
        values = [init]
        cur = list(init)
        for iv in self.intervals:
            inc = iv.length * iv.block.slope
            for i in range(iv.block.lower - 1, iv.block.upper):
                cur[i] += inc
            knots.append(iv.q_end)
            values.append(tuple(cur))
        set_(self, "_knots", tuple(knots))
        set_(self, "_values", tuple(values))

    @property
    def n(self) -> int:
        return self.n_plus_1 - 1

    @property
    def q_max(self) -> Fraction:
        return self.intervals[-1].q_end

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        """q0, every interior breakpoint, and q_max."""
        return self._knots

    @cached_property
    def delta_integrals(self) -> tuple[Fraction, ...]:
        """Integral of the local contraction rate from q0 to each breakpoint."""
        acc = Fraction(0)
        out = [acc]
        for iv in self.intervals:
            acc += (self.n_plus_1 - iv.block.lower) * iv.length
            out.append(acc)
        return tuple(out)

    @property
    def breakpoint_values(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._values

    def interval_index(self, q) -> int:
        """Index of the interval containing q (right-continuous; q_max maps to the last)."""
        q = as_fraction(q)
        if not self.q0 <= q <= self.q_max:
            raise DomainError(f"q={q} outside [{self.q0}, {self.q_max}]")
        i = bisect_right(self._knots, q) - 1
        return min(i, len(self.intervals) - 1)

    def interval_at(self, q) -> LinearityInterval:
        return self.intervals[self.interval_index(q)]

    def evaluate(self, q) -> tuple[Fraction, ...]:
        """Exact (P_1(q), ..., P_{n+1}(q))."""
        q = as_fraction(q)
        i = self.interval_index(q)
        iv = self.intervals[i]
        base = self._values[i]
        if q == iv.q_start:
            return base
        inc = (q - iv.q_start) * iv.block.slope
        lo, hi = iv.block.lower - 1, iv.block.upper
        return base[:lo] + tuple(v + inc for v in base[lo:hi]) + base[hi:]

    def partial_sum(self, k: int, q) -> Fraction:
        """P_1(q) + ... + P_k(q)."""
        if not 1 <= k <= self.n_plus_1:
            raise DomainError(f"k={k} outside 1..{self.n_plus_1}")
        return sum(self.evaluate(q)[:k], Fraction(0))

    def truncate(self, q_max) -> "PiecewiseLinearSystem":
        """Restriction to ``[q0, q_max]``."""
        q_max = as_fraction(q_max)
        if not self.q0 < q_max <= self.q_max:
            raise DomainError(f"cannot truncate to q_max={q_max}")
        kept = []
        for iv in self.intervals:
            if iv.q_start >= q_max:
                break
            kept.append(LinearityInterval(iv.q_start, min(iv.q_end, q_max), iv.block))
        return PiecewiseLinearSystem(
            self.n_plus_1,
            self.q0,
            self.initial_values,
            tuple(kept),
            tuple(c for c in self.cycle_starts if c <= q_max),
            tuple(a for a in self.anchors if a <= q_max),
        )

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "n_plus_1": self.n_plus_1,
            "q0": format_scalar(self.q0),
            "initial_values": [format_scalar(v) for v in self.initial_values],
            "intervals": [
                {
                    "q_start": format_scalar(iv.q_start),
                    "q_end": format_scalar(iv.q_end),
                    "r_lo": iv.block.lower,
                    "r_hi": iv.block.upper,
                }
                for iv in self.intervals
            ],
        }
        if self.cycle_starts:
            d["cycle_starts"] = [format_scalar(c) for c in self.cycle_starts]
        if self.anchors:
            d["anchors"] = [format_scalar(a) for a in self.anchors]
        return d

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "PiecewiseLinearSystem":
        try:
            intervals = tuple(
                LinearityInterval(
                    as_fraction(str(iv["q_start"])),
                    as_fraction(str(iv["q_end"])),
                    SlopeBlock(int(iv["r_lo"]), int(iv["r_hi"])),
                )
                for iv in d["intervals"]
            )
            return cls(
                int(d["n_plus_1"]),
                as_fraction(str(d["q0"])),
                tuple(as_fraction(str(v)) for v in d["initial_values"]),
                intervals,
                tuple(as_fraction(str(c)) for c in d.get("cycle_starts", ())),
                tuple(as_fraction(str(a)) for a in d.get("anchors", ())),
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, MalformedSystemError):
                raise
            raise MalformedSystemError(f"bad Roy-system record: {exc!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseLinearSystem":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedSystemError(f"invalid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise MalformedSystemError("top-level JSON value must be an object")
        return cls.from_dict(d)


def evaluate(system: PiecewiseLinearSystem, q) -> tuple[Fraction, ...]:
    return system.evaluate(q)


def partial_sum(system: PiecewiseLinearSystem, k: int, q) -> Fraction:
    return system.partial_sum(k, q)


def build_system(n_plus_1: int, q0, initial_values: Sequence, pieces: Iterable[tuple], **annotations):
    """Convenience constructor from ``(q_start, q_end, r_lo, r_hi)`` tuples."""
    intervals = tuple(
        LinearityInterval(as_fraction(a), as_fraction(b), SlopeBlock(lo, hi)) for a, b, lo, hi in pieces
    )
    return PiecewiseLinearSystem(n_plus_1, as_fraction(q0), tuple(initial_values), intervals, **annotations)


def validate(system: PiecewiseLinearSystem) -> ValidationReport:
    """Check (S1)-(S3) exactly.

    (S1) is checked at breakpoints only: sortedness, nonnegativity and the
    sum constraint are linear, so they hold on an interval iff they hold at
    both ends.  (S2) requires the rising block to coincide at the start of its
    interval (equal slopes keep it coincident).  (S3) recomputes the junction
    indices from the blocks on either side of each interior breakpoint.
    """
    out: list[Violation] = []
    knots, values = system.breakpoints, system.breakpoint_values

    for q, vals in zip(knots, values):
        if vals[0] < 0:
            out.append(Violation("S1", q, f"P_1 = {vals[0]} < 0"))
        for i in range(len(vals) - 1):
            if vals[i] > vals[i + 1]:
                out.append(Violation("S1", q, f"P_{i + 1} = {vals[i]} > P_{i + 2} = {vals[i + 1]}"))
        total = sum(vals, Fraction(0))
        if total != q:
            out.append(Violation("S1", q, f"sum of components {total} != q"))

    for iv, vals in zip(system.intervals, values):
        lo, hi = iv.block.lower, iv.block.upper
        block_vals = vals[lo - 1 : hi]
        if any(v != block_vals[0] for v in block_vals):
            out.append(
                Violation("S2", (iv.q_start, iv.q_end), f"rising components {lo}..{hi} do not coincide at q_start")
            )

    for i in range(1, len(system.intervals)):
        left, right = system.intervals[i - 1].block, system.intervals[i].block
        q, vals = knots[i], values[i]
        if left.lower < right.upper:
            seg = vals[left.lower - 1 : right.upper]
            if any(v != seg[0] for v in seg):
                out.append(
                    Violation(
                        "S3",
                        q,
                        f"left block {left.lower}..{left.upper}, right block {right.lower}..{right.upper}: "
                        f"P_{left.lower}..P_{right.upper} not all equal",
                    )
                )
    return ValidationReport(tuple(out))
