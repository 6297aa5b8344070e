"""Successive minima of C_u(e^q) = {x : |x| <= 1, |x.u| <= e^-q} by enumeration.

For an integer point x the smallest dilate of C_u(e^q) containing it is

    lam(x) = max(|x|_2, e^q |x.u|).

All points with lam(x) <= R lie in the Euclidean ball of radius R and in the
slab |x.u| <= R e^-q, so enumerating that region and greedily picking n+1
linearly independent points in increasing lam order gives the exact minima
once the (n+1)-th one is <= R.  Otherwise R is doubled.

Arithmetic is in floats; ``FLOAT_TOL`` is the comparison tolerance used by the
trajectory invariants.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .contraction import ExponentEstimate

FLOAT_TOL = 1e-9
DEFAULT_RADIUS_CAP = 4096
MIN_GRID_POINTS = 50
_CHUNK = 1 << 20


class RadiusCapError(RuntimeError):
    """The enumeration radius hit its cap before n+1 independent minima were certified."""


class TrajectoryInvariantError(AssertionError):
    pass


@dataclass(frozen=True)
class DirectionVector:
    """A unit vector u with u_0 != 0 after a cyclic shift of coordinates.

    Successive minima are invariant under permuting coordinates, so the shift
    only matters for reading off theta = (u_1/u_0, ..., u_n/u_0).
    """

    u: tuple[float, ...]
    shift: int = 0

    def __post_init__(self):
        v = np.asarray(self.u, dtype=float)
        if v.ndim != 1 or len(v) < 2:
            raise ValueError("u needs at least two coordinates")
        if not np.all(np.isfinite(v)):
            raise ValueError("u must be finite")
        norm = math.sqrt(math.fsum(x * x for x in v))
        if norm == 0:
            raise ValueError("u must be nonzero")
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"u must have unit norm, got {norm!r}; use DirectionVector.from_u")

    @classmethod
    def from_u(cls, u: Sequence[float]) -> "DirectionVector":
        v = [float(x) for x in u]
        norm = math.sqrt(math.fsum(x * x for x in v))
        if norm == 0:
            raise ValueError("u must be nonzero")
        v = [x / norm for x in v]
        shift = next(i for i, x in enumerate(v) if x != 0)
        return cls(tuple(v), shift)

    @classmethod
    def from_theta(cls, theta: Sequence[float]) -> "DirectionVector":
        return cls.from_u([1.0] + [float(t) for t in theta])

    @property
    def n(self) -> int:
        return len(self.u) - 1

    @property
    def norm_check(self) -> bool:
        return abs(math.sqrt(math.fsum(x * x for x in self.u)) - 1) <= 1e-12

    @property
    def first_coordinate_nonzero(self) -> bool:
        return self.u[0] != 0

    @property
    def theta(self) -> tuple[float, ...]:
        r = self.u[self.shift :] + self.u[: self.shift]
        return tuple(x / r[0] for x in r[1:])


@dataclass(frozen=True)
class MinimaPoint:
    q: float
    lambdas: tuple[float, ...]
    witnesses: tuple[tuple[int, ...], ...]
    radius: int
    complete: bool = True

    @property
    def L(self) -> tuple[float, ...]:
        return tuple(math.log(x) for x in self.lambdas)


@dataclass(frozen=True)
class MinimaTrajectory:
    u: DirectionVector
    grid: tuple[float, ...]
    points: tuple[MinimaPoint, ...]

    @property
    def search_radius_used(self) -> tuple[int, ...]:
        return tuple(p.radius for p in self.points)

    @property
    def complete(self) -> bool:
        return all(p.complete for p in self.points)

    def L_matrix(self) -> np.ndarray:
        return np.array([p.L for p in self.points])

    def invariant_violations(self, tol: float = FLOAT_TOL) -> list[str]:
        """Monotone L_d and L_d(q') - L_d(q) <= q' - q between grid neighbours."""
        out = []
        L = self.L_matrix()
        for i in range(1, len(self.points)):
            h = self.grid[i] - self.grid[i - 1]
            diff = L[i] - L[i - 1]
            for d, x in enumerate(diff):
                if x < -tol:
                    out.append(f"L_{d + 1} decreases by {-x:.3g} at q={self.grid[i]:.6g}")
                if x > h + 2 * tol:
                    out.append(f"L_{d + 1} grows by {x:.6g} > step {h:.6g} at q={self.grid[i]:.6g}")
        return out


def minkowski_bracket(n: int) -> float:
    """Test bound C with |sum_d L_d(q) - q| <= C for all q >= 0.

    Minkowski's second theorem brackets prod(lam_d) * vol(C_u(Q)) between
    2^(n+1)/(n+1)! and 2^(n+1); Q * vol(C_u(Q)) stays within [1/(n+1)!, 4^(n+1)]
    for Q >= 1, which makes log((n+1)!) + (n+1) log 2 a valid (loose) bound.
    """
    return math.log(math.factorial(n + 1)) + (n + 1) * math.log(2)


def _dot(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    # fixed summation order so that lam(x) is reproducible bit for bit
    acc = x[:, 0] * u[0]
    for i in range(1, len(u)):
        acc = acc + x[:, i] * u[i]
    return acc


def _candidates(u: np.ndarray, q: float, R: int) -> tuple[np.ndarray, np.ndarray]:
    """All nonzero x (one of each +-x pair) with lam(x) <= R, and their lam values."""
    n1 = len(u)
    j = int(np.argmax(np.abs(u)))
    others = [i for i in range(n1) if i != j]
    uj = u[j]
    scale = math.exp(q)
    t = R / scale
    outer_shape = (2 * R + 1,) * len(others)
    total = int(np.prod(outer_shape))
    xs = []
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        ys = np.stack(np.unravel_index(flat, outer_shape), axis=1) - R
        ys = ys[(ys * ys).sum(axis=1) <= R * R]
        c = np.zeros(len(ys))
        for k, i in enumerate(others):
            c = c + ys[:, k] * u[i]
        a = (-t - c) / uj
        b = (t - c) / uj
        lo = np.ceil(np.minimum(a, b) - 1e-9).astype(np.int64)
        hi = np.floor(np.maximum(a, b) + 1e-9).astype(np.int64)
        lo = np.maximum(lo, -R)
        hi = np.minimum(hi, R)
        cnt = np.maximum(hi - lo + 1, 0)
        if cnt.sum() == 0:
            continue
        rows = np.repeat(np.arange(len(ys)), cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        xj = lo[rows] + offs
        x = np.empty((len(rows), n1), dtype=np.int64)
        x[:, j] = xj
        for k, i in enumerate(others):
            x[:, i] = ys[rows, k]
        xs.append(x)
    if not xs:
        return np.zeros((0, n1), np.int64), np.zeros(0)
    x = np.concatenate(xs)
    # keep one representative of +-x: first nonzero coordinate positive
    nz = x != 0
    has = nz.any(axis=1)
    first = np.argmax(nz, axis=1)
    sign = x[np.arange(len(x)), first]
    x = x[has & (sign > 0)]
    norm = np.sqrt((x * x).sum(axis=1).astype(float))
    lam = np.maximum(norm, scale * np.abs(_dot(x.astype(float), u)))
    keep = lam <= R
    return x[keep], lam[keep]


def _independent_greedy(x: np.ndarray, lam: np.ndarray, n1: int):
    order = np.lexsort(tuple(x[:, i] for i in range(n1 - 1, -1, -1)) + (lam,))
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    chosen = []
    for idx in order:
        v = [Fraction(int(c)) for c in x[idx]]
        for b, p in zip(basis, pivots):
            if v[p]:
                f = v[p] / b[p]
                v = [vi - f * bi for vi, bi in zip(v, b)]
        p = next((i for i, c in enumerate(v) if c), None)
        if p is None:
            continue
        basis.append(v)
        pivots.append(p)
        chosen.append(idx)
        if len(chosen) == n1:
            break
    return chosen


def successive_minima(u, q: float, initial_radius: int | None = None, radius_cap: int = DEFAULT_RADIUS_CAP) -> MinimaPoint:
    """lam_1 <= ... <= lam_{n+1} of C_u(e^q) with independent integer witnesses.

    If the cap is reached first, the missing minima are reported as ``inf``
    and ``complete`` is False.
    """
    if not isinstance(u, DirectionVector):
        u = DirectionVector.from_u(u)
    q = float(q)
    if q < 0 or not math.isfinite(q):
        raise ValueError(f"q must be a finite nonnegative number, got {q}")
    vec = np.asarray(u.u, dtype=float)
    n1 = len(vec)
    R = max(1, int(initial_radius or 1))
    if R > radius_cap:
        R = radius_cap
    while True:
        x, lam = _candidates(vec, q, R)
        chosen = _independent_greedy(x, lam, n1)
        if len(chosen) == n1:
            lams = tuple(float(lam[i]) for i in chosen)
            wit = tuple(tuple(int(c) for c in x[i]) for i in chosen)
            return MinimaPoint(q, lams, wit, R)
        if R >= radius_cap:
            lams = tuple(float(lam[i]) for i in chosen) + (math.inf,) * (n1 - len(chosen))
            wit = tuple(tuple(int(c) for c in x[i]) for i in chosen)
            return MinimaPoint(q, lams, wit, R, complete=False)
        R = min(2 * R, radius_cap)


def _grid(q_max: float, step: float) -> tuple[float, ...]:
    if step <= 0:
        raise ValueError("step must be positive")
    if q_max < 0:
        raise ValueError("q_max must be nonnegative")
    m = int(math.floor(q_max / step + 1e-9))
    return tuple(round(i * step, 12) for i in range(m + 1))


def _solve_one(args):
    u, q, cap = args
    return successive_minima(u, q, None, cap)


def trajectory(
    u,
    q_max: float,
    step: float,
    radius_cap: int = DEFAULT_RADIUS_CAP,
    workers: int = 1,
    check: bool = True,
) -> MinimaTrajectory:
    """L_u on the grid 0, step, ..., q_max.

    Serially, each point starts from radius ceil(e^step * lam_{n+1}) of its
    predecessor, which already certifies completeness (the body shrinks by at
    most e^step).  With ``workers > 1`` points are solved independently.
    """
    if not isinstance(u, DirectionVector):
        u = DirectionVector.from_u(u)
    grid = _grid(q_max, step)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            points = list(pool.map(_solve_one, [(u, q, radius_cap) for q in grid]))
    else:
        points, R = [], 1
        for q in grid:
            p = successive_minima(u, q, R, radius_cap)
            points.append(p)
            if p.complete:
                R = max(1, math.ceil(p.lambdas[-1] * math.exp(step) * (1 + 1e-12)))
            else:
                R = radius_cap
    traj = MinimaTrajectory(u, grid, tuple(points))
    if check and traj.complete:
        bad = traj.invariant_violations()
        if bad:
            raise TrajectoryInvariantError("; ".join(bad[:5]))
    return traj


def _local_extrema(y: np.ndarray, kind: str) -> np.ndarray:
    if kind == "min":
        m = (y[1:-1] <= y[:-2]) & (y[1:-1] <= y[2:])
    else:
        m = (y[1:-1] >= y[:-2]) & (y[1:-1] >= y[2:])
    return np.nonzero(m)[0] + 1


def _slope_fit(q: np.ndarray, s: np.ndarray, idx: np.ndarray, fallback: float) -> float:
    if len(idx) < 2:
        return fallback
    a, _ = np.polyfit(q[idx], s[idx], 1)
    return float(a)


def empirical_exponents(traj: MinimaTrajectory, tail_fraction: float = 0.5, method: str = "tail") -> list[ExponentEstimate]:
    """Estimate omega_{n-k} and omega_hat_{n-k} from S_k(q)/q on the sampled tail.

    ``method="tail"`` takes the extrema of S_k(q)/q over the window.  These are
    biased by the bounded offset of S_k, an O(1/q) error.  ``method="hull"``
    fits a line through the local minima (resp. maxima) of S_k(q) in the window
    and uses its slope, which removes the constant offset.
    """
    if len(traj.points) < MIN_GRID_POINTS:
        raise ValueError(f"need at least {MIN_GRID_POINTS} grid points, got {len(traj.points)}")
    if not traj.complete:
        raise RadiusCapError("trajectory has incomplete points; raise the radius cap")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail fraction must lie in (0, 1]")
    if method not in ("tail", "hull"):
        raise ValueError(f"unknown method {method!r}")
    q = np.asarray(traj.grid)
    L = traj.L_matrix()
    start = q[-1] * (1 - tail_fraction)
    win = (q >= start) & (q > 0)
    qw = q[win]
    note = f"finite-horizon estimate ({method}), O(1/q) error"
    out = []
    for k in range(1, L.shape[1]):
        s = L[win, :k].sum(axis=1)
        ratio = s / qw
        lo, hi = float(ratio.min()), float(ratio.max())
        if method == "hull":
            lo = _slope_fit(qw, s, _local_extrema(s - 0.5 * qw * (lo + hi), "min"), lo)
            hi = _slope_fit(qw, s, _local_extrema(s - 0.5 * qw * (lo + hi), "max"), hi)
        anchors = tuple(float(x) for x in qw[_local_extrema(ratio, "min")])
        peaks = tuple(float(x) for x in qw[_local_extrema(ratio, "max")])
        out.append(ExponentEstimate(k, lo, hi, _omega(lo), _omega(hi), anchors, peaks, note))
    return out


def _omega(x: float):
    if x <= 0:
        return math.inf
    return 1 / x - 1


def trajectory_csv(traj: MinimaTrajectory, precision: int = 12) -> str:
    n1 = traj.u.n + 1
    head = ["q"] + [f"L_{d}" for d in range(1, n1 + 1)] + [f"S_{k}/q" for k in range(1, n1)] + ["radius"]
    lines = [",".join(head)]
    for p in traj.points:
        L = p.L
        row = [format(p.q, f".{precision}g")] + [format(x, f".{precision}g") for x in L]
        acc = 0.0
        for k in range(n1 - 1):
            acc += L[k]
            row.append(format(acc / p.q, f".{precision}g") if p.q > 0 else "")
        row.append(str(p.radius))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


__all__ = [
    "FLOAT_TOL",
    "DEFAULT_RADIUS_CAP",
    "RadiusCapError",
    "TrajectoryInvariantError",
    "DirectionVector",
    "MinimaPoint",
    "MinimaTrajectory",
    "minkowski_bracket",
    "successive_minima",
    "trajectory",
    "empirical_exponents",
    "trajectory_csv",
]
