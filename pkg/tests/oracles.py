"""Independent reference computations used by the tests.

Nothing here imports the package under test except for value types, so a bug
in the library cannot silently agree with itself.
"""

from __future__ import annotations

import math
from fractions import Fraction


def brute_force_valid(omegas) -> bool:
    """Direct transcription of the transference chain, with inf spelled as None."""
    n = len(omegas)
    w = list(omegas)
    for x in w:
        if x is not None and x < 0:
            return False
    w0 = w[0]
    if w0 is not None and w0 < Fraction(1, n):
        return False
    for d in range(1, n):
        lo_, hi_ = w[d - 1], w[d]
        if hi_ is None:
            # left side is d, right side unbounded
            if lo_ is not None and lo_ < d:
                return False
            continue
        if lo_ is None:
            return False
        if lo_ > hi_:
            return False
        if lo_ * (hi_ + d + 1) < d * hi_:
            return False
        if lo_ * (n - d + 1) > (n - d) * hi_ - 1:
            return False
    return True


def convergents(partial_quotients):
    """(p_k, q_k) of [a0; a1, a2, ...] by the usual three-term recurrence."""
    p0, q0, p1, q1 = 1, 0, partial_quotients[0], 1
    yield p1, q1
    for a in partial_quotients[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1


def continued_fraction(x: float, terms: int) -> list[int]:
    out = []
    for _ in range(terms):
        a = math.floor(x)
        out.append(a)
        frac = x - a
        if frac < 1e-12:
            break
        x = 1 / frac
    return out


def fibonacci(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def value_from_partial_quotients(pq) -> float:
    x = float(pq[-1])
    for a in reversed(pq[:-1]):
        x = a + 1 / x
    return x


def integrate_slopes(n1, q0, init, pieces, q):
    """Evaluate a system given as raw (start, end, lo, hi) pieces by walking them."""
    vals = list(init)
    for a, b, lo, hi in pieces:
        if a >= q:
            break
        step = min(b, q) - a
        m = hi - lo + 1
        for i in range(lo - 1, hi):
            vals[i] += step / m
    return vals
