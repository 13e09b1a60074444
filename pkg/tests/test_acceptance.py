"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.
"""

import math
import time

import numpy as np
import pytest

from conftest import record
from fourlat.harness import fit_rate, identity_suite
from fourlat.lattice import ContinuumProxy, LatticeGrid, transfer
from fourlat.potentials import cos_potential, sech2_potential, sin_power_potential
from fourlat.resolvent import (ErrorOperator, error_norm_fiber, error_norm_power,
                               potential_commutator_norm, y_blowup_scan)
from fourlat.riesz import build_pair, supported_tau
from fourlat.spectra import (SpectrumSet, gap_check, local_hausdorff,
                             resolvent_spectrum_distance, track_eigenvalues, union_with_zero)
from fourlat.symbols import (DiscretizedSymbol, bilaplacian, fraclap, laplacian, pseudorel,
                             symbol_resolvent_gap)

H7 = [2.0 ** -k for k in range(2, 8)]
H8 = [2.0 ** -k for k in range(2, 9)]


@pytest.fixture(scope="module")
def pair():
    return build_pair()


@pytest.fixture(scope="module")
def tau(pair):
    return supported_tau(pair)


def slope_of(hs, errs, drop_largest=1):
    return fit_rate(list(zip(hs, errs)), drop_largest)[0]


def test_criterion_1_identities(pair):
    t0 = time.perf_counter()
    checks = identity_suite(pair, N=256, trials=100)
    dt = time.perf_counter() - t0
    ok = all(c for c, _ in checks.values()) and dt < 10
    detail = ", ".join(f"{k}={v:.1e}" for k, (_, v) in checks.items())
    assert record(1, ok, f"{detail}, {dt:.1f}s"), checks


def test_criterion_2_symbol_gap():
    t0 = time.perf_counter()
    out = {}
    for sym, target in ((laplacian(), 2.0), (fraclap(0.5), 0.5)):
        errs = [symbol_resolvent_gap(DiscretizedSymbol(sym, h)) for h in H8]
        out[sym.name()] = (slope_of(H8, errs), target)
    dt = time.perf_counter() - t0
    ok = all(abs(s - g) <= 0.1 for s, g in out.values()) and dt < 30
    detail = ", ".join(f"{k} slope {s:.3f} (target {g})" for k, (s, g) in out.items())
    assert record(2, ok, f"{detail}, {dt:.1f}s")


def test_criterion_3_free_rates(pair):
    t0 = time.perf_counter()
    cases = [(fraclap(0.5), 0.5), (fraclap(1.5), 1.5), (pseudorel(1.0), 1.0),
             (laplacian(), 2.0), (bilaplacian(), 2.0)]
    slopes, rel = {}, {}
    h = 2.0 ** -4
    # box long enough that its fibers resolve the sup of the fiber norms
    proxy = ContinuumProxy(LatticeGrid.from_box(1, h, 128), 4)
    for sym, target in cases:
        errs = [error_norm_fiber(sym, pair, hh, -1.0) for hh in H7]
        slopes[sym.name()] = (slope_of(H7, errs), target)
        fib = errs[H7.index(h)]
        pw = error_norm_power(ErrorOperator(sym, pair, proxy, -1.0), iters=300)
        rel[sym.name()] = abs(pw.value - fib) / fib
    dt = time.perf_counter() - t0
    ok = (all(abs(s - g) <= 0.15 for s, g in slopes.values())
          and all(r <= 1e-3 for r in rel.values()) and dt < 300)
    detail = ", ".join(f"{k} {s:.3f}/{g} (rel {rel[k]:.1e})" for k, (s, g) in slopes.items())
    assert record(3, ok, f"{detail}, {dt:.1f}s")


def test_criterion_4_commutator(pair, tau):
    t0 = time.perf_counter()
    p = pair.with_tau(tau)
    out = {}
    cos = cos_potential()
    for pot, target in ((sin_power_potential(0.5), 0.5), (cos, cos.theta_prime(tau, 1))):
        errs = []
        for h in H7:
            proxy = ContinuumProxy(LatticeGrid.from_box(1, h, 16), 4)
            errs.append(potential_commutator_norm(pot, p, h, proxy).value)
        out[pot.name] = (slope_of(H7, errs), target)
    dt = time.perf_counter() - t0
    ok = all(abs(s - g) <= 0.15 for s, g in out.values()) and dt < 300
    detail = ", ".join(f"{k} slope {s:.3f} (target {g:.3f})" for k, (s, g) in out.items())
    assert record(4, ok, f"{detail}, tau={tau:.2f}, {dt:.1f}s")


def test_criterion_5_potential_rate(pair, tau):
    t0 = time.perf_counter()
    p = pair.with_tau(tau)
    cos = cos_potential()
    gamma = min(2.0, cos.theta_prime(tau, 1))
    errs = []
    for h in H7:
        grid = LatticeGrid.from_box(1, h, 16)
        assert grid.N <= 2048
        D = ErrorOperator(laplacian(), p, ContinuumProxy(grid, 4), -1 + 1j, cos)
        errs.append(error_norm_power(D, iters=300).value)
    s = slope_of(H7, errs)
    dt = time.perf_counter() - t0
    ok = abs(s - gamma) <= 0.2 and dt < 600
    assert record(5, ok, f"laplacian+cos slope {s:.3f} (target {gamma:.3f} +- 0.2), {dt:.1f}s")


def test_criterion_6_resolvent_spectra(pair):
    errs = [resolvent_spectrum_distance(laplacian(), h, mu=1.0) for h in H7]
    s = slope_of(H7, errs)
    uz, n, found = union_with_zero(pair)
    ok = abs(s - 2.0) <= 0.3 and uz < 1e-6 and n == found
    assert record(6, ok, f"hausdorff slope {s:.3f}, union-with-zero {uz:.1e}")


def test_criterion_7_gap_and_tracking(pair):
    t0 = time.perf_counter()
    hs = [2.0 ** -k for k in range(4, 8)]
    V = sech2_potential()
    gap = gap_check(laplacian(), V, (-0.5, -0.1), hs, length=16)
    reps = [track_eigenvalues(laplacian(), V, pair, h, (-1.5, -0.5), 1, length=16) for h in hs]
    count_ok = all(r.count_ok for r in reps)
    errs = [abs(r.discrete[0] + 1.0) for r in reps] if count_ok else [math.nan]
    s = slope_of(hs, errs, 0) if count_ok else math.nan
    knorm = min(min(r.k_norms) for r in reps)
    dt = time.perf_counter() - t0
    ok = gap.passed and count_ok and abs(s - 2.0) <= 0.4 and knorm >= 0.5 and dt < 600
    assert record(7, ok, f"gap empty={gap.passed}, one eigenvalue={count_ok}, "
                         f"|lambda_h+1| slope {s:.3f}, min ||K psi||={knorm:.3f}, {dt:.1f}s")


def test_criterion_8_local_hausdorff():
    X = SpectrumSet.points([0.0]).union(SpectrumSet.interval(1.0, math.inf))
    vals = {h: local_hausdorff(X, SpectrumSet.points([h, 1 + h]), (0.0, 1.0))
            for h in (0.1, 0.25, 0.4)}
    ok = all(abs(v - h) <= 1e-14 for h, v in vals.items())
    assert record(8, ok, ", ".join(f"h={h}: {v!r}" for h, v in vals.items()))


def test_criterion_9_y_blowup(pair):
    h = 2.0 ** -5
    ys = [1.0, 0.5, 0.25, 0.125, 0.0625]
    x = 0.5
    free = y_blowup_scan(lambda z: error_norm_fiber(laplacian(), pair, h, z), x, ys)
    proxy = ContinuumProxy(LatticeGrid.from_box(1, h, 16), 4)
    pot = y_blowup_scan(lambda z: error_norm_power(
        ErrorOperator(laplacian(), pair, proxy, z, cos_potential()), iters=200, restarts=2),
        x, ys)
    ok = free.max_ratio() <= 4 and pot.max_ratio() <= 16
    assert record(9, ok, f"free max ratio {free.max_ratio():.3f} (<= 4), "
                         f"cos max ratio {pot.max_ratio():.3f} (<= 16)")
