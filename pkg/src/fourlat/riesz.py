"""Biorthogonal Riesz pairs (phi0_hat, psi0_hat) built from smooth bumps.

Given bumps u1, u2 equal to 1 on [-pi, pi]^d and vanishing outside
[-3pi/2, 3pi/2]^d, the 2pi-periodic weight v = sum_k u1(. - 2pi k) u2(. - 2pi k)
is >= 1, and

    phi0_hat = (2pi)^{-d delta} u1 / v^delta,
    psi0_hat = (2pi)^{-d (1 - delta)} u2 / v^(1 - delta)

satisfy the translate biorthogonality identity for every delta in [0, 1].
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AliasingError, DegenerateDataError, ParameterError
from .lattice import TWO_PI, LatticeField, _inv

INNER = np.pi
OUTER = 1.5 * np.pi


class DegenerateProfileWarning(UserWarning):
    pass


def expstep(t):
    """C^infinity step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t)."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def cosine_step(t):
    """C^1 step (1 - cos(pi t)) / 2 on [0, 1]."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return 0.5 * (1.0 - np.cos(np.pi * t))


RAMPS = {"expstep": expstep, "cosine": cosine_step}


@dataclass(frozen=True)
class BumpProfile:
    """Tensor product of 1-D bumps ramping down between pi and 3pi/2."""

    d: int = 1
    ramp: str = "expstep"

    def __post_init__(self):
        if self.ramp not in RAMPS:
            raise ParameterError(f"unknown ramp {self.ramp!r}")

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        step = RAMPS[self.ramp]
        return np.prod(step((OUTER - np.abs(xi)) / (OUTER - INNER)), axis=-1)


@dataclass(frozen=True, eq=False)
class RieszPair:
    """Fourier profiles of the generating functions phi0, psi0.

    Profiles take points with trailing axis ``d``. ``c0`` is the sampled
    lower bound of |phi0_hat|, |psi0_hat| on [-pi/2, pi/2]^d; ``tau`` the
    declared decay exponent of psi0 (None when not yet verified).
    """

    phi_hat: Callable[[np.ndarray], np.ndarray]
    psi_hat: Callable[[np.ndarray], np.ndarray]
    d: int = 1
    delta: float = 0.5
    c0: float = 0.0
    tau: float | None = None
    label: str = "custom"

    def with_tau(self, tau):
        return RieszPair(self.phi_hat, self.psi_hat, self.d, self.delta, self.c0, tau, self.label)


def _shifts(d):
    return [np.array(k, dtype=float) for k in itertools.product((-1, 0, 1), repeat=d)]


def periodization(u1, u2, d):
    """v(xi) = sum_k u1(xi - 2pi k) u2(xi - 2pi k), exact via the 3^d overlapping shifts."""

    def v(xi):
        xi = np.asarray(xi, dtype=float)
        cell = np.mod(xi + np.pi, TWO_PI) - np.pi
        total = 0.0
        for k in _shifts(d):
            p = cell - TWO_PI * k
            total = total + u1(p) * u2(p)
        return total

    return v


def build_pair(u1=None, u2=None, delta=0.5):
    u1 = u1 or BumpProfile()
    u2 = u2 or BumpProfile(u1.d, u1.ramp)
    if u1.d != u2.d:
        raise ParameterError("bump profiles have different dimensions")
    if not 0.0 <= delta <= 1.0:
        raise ParameterError(f"delta must lie in [0, 1], got {delta}")
    d = u1.d
    v = periodization(u1, u2, d)

    def phi_hat(xi):
        return TWO_PI ** (-d * delta) * u1(xi) / v(xi) ** delta

    def psi_hat(xi):
        return TWO_PI ** (-d * (1 - delta)) * u2(xi) / v(xi) ** (1 - delta)

    t = np.linspace(-0.5 * np.pi, 0.5 * np.pi, 65)
    core = np.stack(np.meshgrid(*([t] * d), indexing="ij"), axis=-1)
    c0 = float(min(np.abs(phi_hat(core)).min(), np.abs(psi_hat(core)).min()))
    label = f"{u1.ramp}/{u2.ramp}, delta={delta}"
    return RieszPair(phi_hat, psi_hat, d, delta, c0, None, label)


def pair_from_config(cfg, d=1):
    cfg = dict(cfg or {})
    ramp = cfg.get("ramp", "expstep")
    return build_pair(BumpProfile(d, ramp), BumpProfile(d, ramp), float(cfg.get("delta", 0.5)))


def cell_samples(d, n=None, scale=np.pi):
    n = n or (4001 if d == 1 else 201 if d == 2 else 41)
    t = np.linspace(-scale, scale, n)
    return np.stack(np.meshgrid(*([t] * d), indexing="ij"), axis=-1).reshape(-1, d)


def biorthogonality_defect(pair, samples=None):
    """max_xi |sum_{|k_i|<=1} conj(phi0_hat(xi - 2pi k)) psi0_hat(xi - 2pi k) - (2pi)^{-d}|."""
    d = pair.d
    xi = cell_samples(d) if samples is None else np.asarray(samples, dtype=float).reshape(-1, d)
    if len(xi) == 0:
        raise DegenerateDataError("no sample points")
    # the sum is 2pi-periodic; reduce so the 3^d shifts cover every overlapping term
    xi = np.mod(xi + np.pi, TWO_PI) - np.pi
    total = 0.0
    for k in _shifts(d):
        p = xi - TWO_PI * k
        total = total + np.conj(pair.phi_hat(p)) * pair.psi_hat(p)
    return float(np.max(np.abs(total - TWO_PI ** (-d))))


def translate_sum(profile, xi, d):
    """(2pi)^d sum_{|k_i|<=1} |profile(xi - 2pi k)|^2."""
    total = 0.0
    for k in _shifts(d):
        total = total + np.abs(profile(xi - TWO_PI * k)) ** 2
    return TWO_PI ** d * total


def riesz_bounds(profile, samples=None, d=1):
    """Sampled (A, B) Riesz bounds of the integer translates generated by ``profile``."""
    xi = cell_samples(d) if samples is None else np.asarray(samples, dtype=float).reshape(-1, d)
    s = translate_sum(profile, xi, d)
    A, B = float(s.min()), float(s.max())
    if A <= 1e-14:
        warnings.warn(f"degenerate profile: lower Riesz bound {A:.3e}", DegenerateProfileWarning,
                      stacklevel=2)
    return A, B


def psi0_samples(pair, period, n):
    """psi0 on a periodic grid of n points per period (d = 1), by inverse FFT of psi0_hat."""
    if pair.d != 1:
        raise ParameterError("real-space sampling of psi0 is implemented for d = 1")
    dx = period / n
    m = np.fft.fftfreq(n, d=1.0 / n)
    xi = TWO_PI * m / period
    if np.pi / dx < OUTER:
        raise AliasingError("sampling mesh too coarse for the support of psi0_hat")
    vals = TWO_PI ** -0.5 * (TWO_PI / period) * n * np.fft.ifft(pair.psi_hat(xi[:, None]))
    return dx * m, vals


@dataclass
class DecayReport:
    tau: float
    constant: float
    slope: float
    tau_supported: float
    passed: bool


def decay_check(pair, tau, radius=256.0, fine_mesh=None, n=2 ** 16, period=None,
                fit_from=10.0, floor=1e-12):
    """Smallest C with |psi0(x)| <= C (1+|x|)^{-tau} on |x| <= R, plus the far-field slope.

    The slope is fitted to log-binned maxima of |psi0| over [fit_from, R],
    ignoring bins below ``floor`` times the peak (round-off). ``tau_supported``
    is minus that slope; the check passes when it is at least ``tau``.
    """
    if tau <= pair.d:
        raise ParameterError(f"tau={tau} must exceed d={pair.d}")
    period = 8.0 * radius if period is None else period
    if period < 4 * radius:
        raise AliasingError(f"period {period} < 4R = {4 * radius}")
    if fine_mesh is not None:
        n = int(2 ** math.ceil(math.log2(period / fine_mesh)))
    x, vals = psi0_samples(pair, period, n)
    a = np.abs(vals)
    ball = np.abs(x) <= radius
    constant = float(np.max(a[ball] * (1 + np.abs(x[ball])) ** tau))

    edges = np.geomspace(fit_from, radius, 41)
    centers, env = [], []
    ax = np.abs(x)
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (ax >= lo) & (ax < hi)
        if sel.any():
            centers.append(np.sqrt(lo * hi))
            env.append(a[sel].max())
    centers, env = np.array(centers), np.array(env)
    keep = env > floor * a.max()
    if keep.sum() < 3:
        slope = -math.inf
    else:
        slope = float(np.polyfit(np.log(centers[keep]), np.log(env[keep]), 1)[0])
    supported = -slope
    return DecayReport(tau, constant, slope, supported, bool(np.isfinite(constant) and supported >= tau))


def supported_tau(pair, **kw):
    """Decay exponent of psi0 supported by the far-field fit (used for theta')."""
    return decay_check(pair, pair.d + 1, **kw).tau_supported


def kernel_witness(pair, grid, refine=4):
    """Nonzero proxy field f with K_h f = 0.

    Along the first frequency axis, fiber shifts are paired (2k, 2k+1):
    f_hat at shift 2k is conj(psi0_hat) at shift 2k+1 and f_hat at shift 2k+1
    is -conj(psi0_hat) at shift 2k, so the folded sum cancels on every fiber.
    """
    if refine % 2:
        raise ParameterError("kernel witness needs an even refinement factor")
    from .lattice import ContinuumProxy

    proxy = ContinuumProxy(grid, refine)
    fine = proxy.grid
    h, N = grid.h, grid.N
    eta = fine.freq_points()
    m = np.fft.fftfreq(fine.N, d=1.0 / fine.N).astype(int)
    coarse = np.mod(m + N // 2, N) - N // 2
    j = (m - coarse) // N
    j1 = j.reshape((-1,) + (1,) * (grid.d - 1))
    e1 = np.zeros(grid.d)
    e1[0] = TWO_PI
    heta = h * eta
    even = np.conj(pair.psi_hat(heta + e1))
    odd = -np.conj(pair.psi_hat(heta - e1))
    fhat = np.where(j1 % 2 == 0, even, odd)
    if not np.any(np.abs(fhat) > 0):
        raise DegenerateDataError("psi0_hat vanishes on all paired shifts")
    f = LatticeField(fine, _inv(fhat, fine))
    return f
