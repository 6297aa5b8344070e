"""Acceptance criteria 1-9.

Each ``criterion_k`` returns ``(passed, detail)``.  The pytest wrappers print
one ``CRITERION k: PASS|FAIL`` line and then assert.  Run the whole suite with

    pytest tests/test_acceptance.py -v -s

or standalone with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import random
import sys
import time
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from roysys.contraction import exponent_functionals, rate_extrema  # noqa: E402
from roysys.dimensions import (  # noqa: E402
    ExponentSpectrum,
    PartialSpectrum,
    hausdorff_intersection,
    hausdorff_pair,
    hausdorff_single,
    minimal_exponent,
    optimal_completion,
    random_valid_spectrum,
    validate_spectrum,
)
from roysys.oracle import DirectionVector, minkowski_bracket, successive_minima, trajectory  # noqa: E402
from roysys.potential import PotentialSpec, check_slope_inequality  # noqa: E402
from roysys.pwl import validate  # noqa: E402
from roysys.scalar import INF, inv1p, is_inf  # noqa: E402
from roysys.templates import (  # noqa: E402
    IntersectionParams,
    SingleExponentParams,
    UnsupportedSpectrumError,
    intersection_template,
    random_roy_system,
    single_exponent_template,
)

EPS = Fraction(1, 1000)
CYCLES = 20
RATE_TOL = 0.05
FINE_RATE_TOL = 0.005
LAMBDA_TOL = 1e-9
ORACLE_RADIUS_CAP = 1 << 16


def single_grid():
    for n in (2, 3, 4, 5):
        for d in range(n):
            m = minimal_exponent(n, d)
            for w in (m, m + 1, Fraction(10), INF):
                yield n, d, w


def sampled_spectra(ns, per_n, allow_inf, seed):
    rng = random.Random(seed)
    for n in ns:
        for _ in range(per_n):
            yield random_valid_spectrum(rng, n, allow_inf=allow_inf)


@lru_cache(maxsize=None)
def single_systems(eps=EPS):
    return {(n, d, w): single_exponent_template(SingleExponentParams(n, d, w, eps), cycles=CYCLES) for n, d, w in single_grid()}


@lru_cache(maxsize=None)
def staircase_systems(ns, per_n, allow_inf, seed):
    """Spectrum -> template, or the exception raised while building it."""
    out = []
    for spec in sampled_spectra(ns, per_n, allow_inf, seed):
        try:
            out.append((spec, intersection_template(IntersectionParams(spec.n, spec, EPS), cycles=CYCLES)))
        except UnsupportedSpectrumError as exc:
            out.append((spec, exc))
    return out


def _fmt_spec(spec):
    return "(" + ", ".join(str(w) for w in spec.omegas) + ")"


# -- criteria -----------------------------------------------------------------


def criterion_1():
    """one-exponent grid and 100 sampled spectra per n in {2..5}: templates satisfy S1-S3 exactly."""
    bad = []
    for key, system in single_systems().items():
        if not validate(system).passed:
            bad.append(f"single {key}")
    unsupported = 0
    per_n = {}
    for spec, system in staircase_systems((2, 3, 4, 5), 100, True, 1):
        ok = not isinstance(system, Exception) and validate(system).passed
        per_n.setdefault(spec.n, [0, 0])
        per_n[spec.n][0] += ok
        per_n[spec.n][1] += 1
        if not ok:
            unsupported += isinstance(system, Exception)
            bad.append(f"staircase {_fmt_spec(spec)}")
    summary = ", ".join(f"n={n}: {a}/{b}" for n, (a, b) in sorted(per_n.items()))
    detail = f"single {len(single_systems())} ok={len(single_systems()) - sum(b.startswith('single') for b in bad)}; staircase {summary}"
    if unsupported:
        detail += f"; {unsupported} spectra have decreasing a-coefficients (no staircase)"
    return not bad, detail


def criterion_2():
    """one-exponent grid, eps=1/1000: lower rate near d+(n+1)/(1+omega); S_{n-d}/q hits 1/(1+omega) at anchors."""
    worst, bad = 0.0, []
    for (n, d, w), system in single_systems().items():
        params = SingleExponentParams(n, d, w, EPS)
        target = d + (n + 1) * inv1p(w)
        lo, _, _, _ = rate_extrema(system)
        err = abs(float(lo - target))
        worst = max(worst, err)
        if err > RATE_TOL:
            bad.append(f"rate {n, d, w}: {float(lo):.4f} vs {float(target):.4f}")
        k = n - d
        for i, a in enumerate(system.anchors):
            if system.partial_sum(k, a) / a != inv1p(params.omega_at(i)):
                bad.append(f"anchor {n, d, w} cycle {i}")
        est = exponent_functionals(system)[k - 1]
        if not is_inf(w):
            if est.liminf_value != inv1p(w):
                bad.append(f"liminf {n, d, w}: {est.liminf_value}")
        elif est.liminf_value > inv1p(params.omega_at(CYCLES // 2)):
            bad.append(f"liminf {n, d, w}: {est.liminf_value} not shrinking")
    return not bad, f"{len(single_systems())} templates, worst rate error {worst:.2e}" + (f"; {bad[:3]}" if bad else "")


def criterion_3():
    """one-exponent grid: upper rate within 0.05 of n for eps=1/1000 and 0.005 for eps=1/10000."""
    bad, worst = [], {}
    for eps, tol in ((EPS, RATE_TOL), (Fraction(1, 10000), FINE_RATE_TOL)):
        systems = single_systems(eps)
        worst[eps] = 0.0
        for (n, d, w), system in systems.items():
            _, hi, _, _ = rate_extrema(system)
            err = abs(float(hi) - n)
            worst[eps] = max(worst[eps], err)
            if err > tol:
                bad.append(f"{n, d, w} eps={eps}: {float(hi):.5f}")
    return not bad, "worst |upper - n|: " + ", ".join(f"eps={e}: {v:.2e}" for e, v in worst.items())


def criterion_4():
    """100 sampled spectra per n in {2,3,4}: lower rate near 2*sum 1/(1+omega_d); exponents exact at anchors."""
    per_n, bad, worst = {}, [], 0.0
    for spec, system in staircase_systems((2, 3, 4), 100, False, 4):
        n = spec.n
        per_n.setdefault(n, [0, 0])
        per_n[n][1] += 1
        if isinstance(system, Exception):
            bad.append(f"{_fmt_spec(spec)}: {system}")
            continue
        target = 2 * sum(inv1p(w) for w in spec.omegas)
        lo, _, _, _ = rate_extrema(system)
        err = abs(float(lo - target))
        worst = max(worst, err)
        ok = err <= RATE_TOL
        for est in exponent_functionals(system):
            ok &= est.inferred_omega == spec.omegas[n - est.k]
        per_n[n][0] += ok
        if not ok:
            bad.append(_fmt_spec(spec))
    summary = ", ".join(f"n={n}: {a}/{b}" for n, (a, b) in sorted(per_n.items()))
    detail = f"{summary}; worst rate error on built templates {worst:.2e}"
    if bad:
        detail += f"; first failure {bad[0]}"
    return not bad, detail


def criterion_5():
    """Phi' >= delta on every interval of 1000 random systems and of all templates, both potentials."""
    checked, violations = 0, []
    systems = [random_roy_system(seed, 1 + seed % 5, q0=0, q_max=20) for seed in range(1000)]
    systems += list(single_systems().values())
    systems += [s for _, s in staircase_systems((2, 3, 4, 5), 100, True, 1) if not isinstance(s, Exception)]
    for system in systems:
        n = system.n
        for spec in [PotentialSpec.intersection(n)] + [PotentialSpec.single(n, d) for d in range(n)]:
            report = check_slope_inequality(spec, system)
            checked += len(report.rows)
            violations.extend(report.violations)
    return not violations, f"{len(systems)} systems, {checked} interval checks, {len(violations)} violations"


def feasible_grid(count=200, seed=6):
    """Feasible (n, spectrum) instances over n in {2,3,4}, taken from sampled valid spectra."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = (2, 3, 4)[len(out) % 3]
        out.append(random_valid_spectrum(rng, n, top_span=6, denominator=6))
    return out


def criterion_6():
    """optimal_completion reproduces the single, pair and full closed forms exactly."""
    fails = {"single": 0, "pair": 0, "full": 0}
    pair_by_n = {}
    first_pair = None
    for spec in feasible_grid():
        n, w = spec.n, spec.omegas
        for d in range(n):
            if optimal_completion(PartialSpectrum(n, {d: w[d]})).hausdorff != hausdorff_single(n, d, w[d]).hausdorff:
                fails["single"] += 1
        got = optimal_completion(PartialSpectrum(n, {0: w[0], n - 1: w[n - 1]})).hausdorff
        want = hausdorff_pair(n, w[0], w[n - 1])
        pair_by_n.setdefault(n, [0, 0])
        pair_by_n[n][1] += 1
        if got != want:
            fails["pair"] += 1
            first_pair = first_pair or f"n={n} omega_0={w[0]} omega_{n - 1}={w[n - 1]}: completion {got}, closed form {want}"
        else:
            pair_by_n[n][0] += 1
        full = optimal_completion(PartialSpectrum(n, dict(enumerate(w)))).hausdorff
        if full != hausdorff_intersection(spec).hausdorff:
            fails["full"] += 1
    detail = f"mismatches {fails}; pair agreement " + ", ".join(f"n={n}: {a}/{b}" for n, (a, b) in sorted(pair_by_n.items()))
    if first_pair:
        detail += f"; e.g. {first_pair}"
    return not any(fails.values()), detail


def criterion_7():
    """Spectrum validator: fixed cases and a 1000-sample scan against a brute-force check."""
    rng = random.Random(7)
    ok = validate_spectrum(ExponentSpectrum((Fraction(1, 2), Fraction(2)))).is_valid
    ok &= not validate_spectrum(ExponentSpectrum((Fraction(2), Fraction(2)))).is_valid
    mismatches, accepted = 0, 0
    for i in range(1000):
        n = rng.randint(1, 5)
        if i % 2:
            base = random_valid_spectrum(rng, n, allow_inf=True).omegas
            omegas = [w if is_inf(w) or rng.random() < 0.7 else w + Fraction(rng.randint(-4, 4), 8) for w in base]
        else:
            omegas = sorted(
                INF if rng.random() < 0.1 else Fraction(rng.randint(0, 12 * 8), 8) for _ in range(n)
            )
        got = validate_spectrum(ExponentSpectrum(tuple(omegas))).is_valid
        want = oracles.brute_force_valid([None if is_inf(w) else w for w in omegas])
        accepted += got
        mismatches += got != want
    ok &= mismatches == 0
    return ok, f"fixed cases ok; 1000 samples, {accepted} accepted, {mismatches} disagreements with brute force"


@lru_cache(maxsize=None)
def golden_trajectory():
    phi = (1 + math.sqrt(5)) / 2
    return trajectory(DirectionVector.from_theta([phi]), 18, 0.1, radius_cap=ORACLE_RADIUS_CAP)


def criterion_8():
    """Golden ratio, q <= 18, step 0.1: monotone/Lipschitz L_1, Minkowski bracket, L_1/q minima near 1/2."""
    traj = golden_trajectory()
    if not traj.complete:
        return False, "radius cap reached"
    q = np.asarray(traj.grid)
    L = traj.L_matrix()
    dq = np.diff(q)
    dL = np.diff(L[:, 0])
    monotone = bool(np.all(dL >= -LAMBDA_TOL)) and bool(np.all(dL <= dq + 2 * LAMBDA_TOL))
    gap = float(np.max(np.abs(L.sum(axis=1) - q)))
    bracket = minkowski_bracket(1)
    ratio = L[1:, 0] / q[1:]
    qq = q[1:]
    tail = qq >= q[-1] / 2
    idx = [i for i in range(1, len(ratio) - 1) if tail[i] and ratio[i] <= ratio[i - 1] and ratio[i] <= ratio[i + 1]]
    mins = ratio[idx]
    dev = float(np.max(np.abs(mins - 0.5))) if len(mins) else math.inf
    ok = monotone and gap < bracket and dev <= RATE_TOL
    return ok, f"monotone+Lipschitz={monotone}; max|L1+L2-q|={gap:.3f} < {bracket:.3f}; {len(mins)} tail minima, max|L1/q-1/2|={dev:.4f}"


def criterion_9():
    """Doubling the enumeration radius moves no minimum by more than 1e-9 (50 vectors, n<=2, q<=12)."""
    rng = random.Random(9)
    worst, points = 0.0, 0
    for i in range(50):
        n = 1 + i % 2
        u = DirectionVector.from_u([rng.gauss(0, 1) for _ in range(n + 1)])
        for q in (0.0, rng.uniform(0, 6), rng.uniform(6, 12), 12.0):
            a = successive_minima(u, q, radius_cap=ORACLE_RADIUS_CAP)
            b = successive_minima(u, q, initial_radius=2 * a.radius, radius_cap=2 * ORACLE_RADIUS_CAP)
            if not (a.complete and b.complete):
                return False, f"radius cap reached for vector {i} at q={q}"
            worst = max(worst, max(abs(x - y) for x, y in zip(a.lambdas, b.lambdas)))
            points += 1
    return worst <= LAMBDA_TOL, f"{points} evaluations, max change {worst:.2e}"


CRITERIA = {
    1: (criterion_1, 30),
    2: (criterion_2, 60),
    3: (criterion_3, 60),
    4: (criterion_4, 120),
    5: (criterion_5, 30),
    6: (criterion_6, 5),
    7: (criterion_7, 5),
    8: (criterion_8, 60),
    9: (criterion_9, 120),
}


def run_criterion(k):
    fn, budget = CRITERIA[k]
    t0 = time.perf_counter()
    passed, detail = fn()
    elapsed = time.perf_counter() - t0
    if elapsed > budget:
        passed, detail = False, f"over the {budget}s runtime budget; " + detail
    print(f"CRITERION {k}: {'PASS' if passed else 'FAIL'} ({elapsed:.1f}s, budget {budget}s) {detail}")
    return passed, detail


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_acceptance_criterion(k):
    passed, detail = run_criterion(k)
    assert passed, detail


if __name__ == "__main__":
    results = [run_criterion(k)[0] for k in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
