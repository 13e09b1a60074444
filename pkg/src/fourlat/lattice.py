"""Periodic lattice boxes, weighted fields, unitary transforms, and J_h / K_h.

The infinite lattice hZ^d is replaced by an N-point periodic box per axis.
A ContinuumProxy is the same box sampled r times finer; it stands in for
L^2(R^d). Frequencies of the coarse box are 2*pi*m/(N*h) and the proxy uses
the same spacing, so every coarse frequency owns an aligned fiber of r^d
proxy frequencies and the Fourier formulas for J_h and K_h are exact finite
sums.

Array layout follows numpy's FFT ordering: index i along an axis is the
point n = i for i < N/2 and n = i - N otherwise.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, ParameterError, ShapeError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class LatticeGrid:
    d: int
    h: float
    N: int

    def __post_init__(self):
        if self.h <= 0:
            raise ParameterError(f"mesh must be positive, got {self.h}")
        if self.N < 8 or self.N % 2:
            raise ParameterError(f"N must be even and >= 8, got {self.N}")
        if self.d < 1:
            raise ParameterError("dimension must be positive")

    @classmethod
    def from_box(cls, d, h, length):
        """Grid with N ~ length/h, rounded to an even count >= 8."""
        n = int(round(length / h))
        n += n % 2
        return cls(d, h, max(n, 8))

    @property
    def shape(self):
        return (self.N,) * self.d

    @property
    def size(self):
        return self.N ** self.d

    @property
    def weight(self):
        return self.h ** self.d

    @property
    def half_width(self):
        return 0.5 * self.N * self.h

    @property
    def freq_weight(self):
        return (TWO_PI / (self.N * self.h)) ** self.d

    def axis_coords(self):
        return self.h * np.fft.fftfreq(self.N, d=1.0 / self.N)

    def axis_freqs(self):
        return TWO_PI * np.fft.fftfreq(self.N, d=self.h)

    def points(self):
        ax = self.axis_coords()
        return np.stack(np.meshgrid(*([ax] * self.d), indexing="ij"), axis=-1)

    def freq_points(self):
        ax = self.axis_freqs()
        return np.stack(np.meshgrid(*([ax] * self.d), indexing="ij"), axis=-1)

    def refine(self, r):
        return ContinuumProxy(self, r)

    def zeros(self, dtype=complex):
        return LatticeField(self, np.zeros(self.shape, dtype=dtype))

    def random(self, rng, complex_values=True):
        v = rng.standard_normal(self.shape)
        if complex_values:
            v = v + 1j * rng.standard_normal(self.shape)
        return LatticeField(self, v)


@dataclass(frozen=True)
class ContinuumProxy:
    """Fine grid with mesh h/r over the box of ``base``."""

    base: LatticeGrid
    r: int

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 4:
            raise AliasingError(
                f"refinement {self.r} < 4 cannot resolve frequencies up to 7pi/(2h)")

    @property
    def grid(self):
        return LatticeGrid(self.base.d, self.base.h / self.r, self.base.N * self.r)

    @property
    def cutoff(self):
        return np.pi * self.r / self.base.h


@dataclass
class LatticeField:
    """Complex samples on a grid; norm^2 = weight * sum |u|^2.

    ``domain`` is "space" (weight h^d) or "frequency" (weight (2pi/(N h))^d).
    """

    grid: LatticeGrid
    values: np.ndarray
    domain: str = "space"

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise ShapeError(f"values of shape {self.values.shape} on grid {self.grid.shape}")
        if self.domain not in ("space", "frequency"):
            raise ParameterError(f"unknown domain {self.domain!r}")

    @property
    def weight(self):
        return self.grid.weight if self.domain == "space" else self.grid.freq_weight

    def norm(self):
        return float(np.sqrt(self.weight * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other):
        """<self, other>, antilinear in the first slot."""
        self._compatible(other)
        return complex(self.weight * np.vdot(self.values, other.values))

    def _compatible(self, other):
        if other.grid != self.grid or other.domain != self.domain:
            raise ShapeError("fields live on different grids or domains")

    def _new(self, values):
        return LatticeField(self.grid, values, self.domain)

    def __add__(self, other):
        self._compatible(other)
        return self._new(self.values + other.values)

    def __sub__(self, other):
        self._compatible(other)
        return self._new(self.values - other.values)

    def __mul__(self, scalar):
        return self._new(self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.values)


def _fwd(values, grid):
    d = grid.d
    return grid.h ** d * (TWO_PI) ** (-d / 2) * np.fft.fftn(values)


def _inv(values, grid):
    d = grid.d
    return (TWO_PI) ** (d / 2) * grid.h ** (-d) * np.fft.ifftn(values)


def dft(field, direction="forward"):
    """Unitary lattice Fourier transform at the box frequencies 2*pi*m/(N h).

    forward: (F_h u)(xi) = h^d (2pi)^{-d/2} sum_n u(n) exp(-i h n.xi).
    """
    if direction == "forward":
        if field.domain != "space":
            raise ShapeError("forward transform expects a space-domain field")
        return LatticeField(field.grid, _fwd(field.values, field.grid), "frequency")
    if direction == "inverse":
        if field.domain != "frequency":
            raise ShapeError("inverse transform expects a frequency-domain field")
        return LatticeField(field.grid, _inv(field.values, field.grid), "space")
    raise ParameterError(f"direction must be 'forward' or 'inverse', got {direction!r}")


class Transfer:
    """J_h, K_h and their adjoints between a lattice box and its proxy.

    All methods act on raw arrays: coarse arrays of shape ``base.shape`` and
    proxy arrays of shape ``proxy.grid.shape``.
    """

    def __init__(self, pair, proxy):
        if pair.d != proxy.base.d:
            raise ShapeError("pair and grid dimensions differ")
        self.pair = pair
        self.proxy = proxy
        self.base = proxy.base
        self.fine = proxy.grid
        h_eta = self.base.h * self.fine.freq_points()
        self.phi = np.asarray(pair.phi_hat(h_eta), dtype=complex)
        self.psi = np.asarray(pair.psi_hat(h_eta), dtype=complex)
        d, r = self.base.d, proxy.r
        self._up = TWO_PI ** (d / 2) * r ** d
        self._down = TWO_PI ** (d / 2) * float(r) ** (-d)
        self._fold_shape = tuple(x for _ in range(d) for x in (r, self.base.N))
        self._fold_axes = tuple(range(0, 2 * d, 2))

    def _synth(self, u, prof):
        tiled = np.tile(np.fft.fftn(u), (self.proxy.r,) * self.base.d)
        return self._up * np.fft.ifftn(prof * tiled)

    def _analyze(self, f, prof):
        w = np.conj(prof) * np.fft.fftn(f)
        folded = w.reshape(self._fold_shape).sum(axis=self._fold_axes)
        return self._down * np.fft.ifftn(folded)

    def J(self, u):
        return self._synth(u, self.phi)

    def K(self, f):
        return self._analyze(f, self.psi)

    def J_adj(self, f):
        return self._analyze(f, self.phi)

    def K_adj(self, u):
        return self._synth(u, self.psi)


@functools.lru_cache(maxsize=64)
def transfer(pair, proxy):
    return Transfer(pair, proxy)


def _proxy_for(fine, grid):
    r = fine.N // grid.N
    if fine.d != grid.d or r * grid.N != fine.N or not np.isclose(fine.h * r, grid.h):
        raise ShapeError("field grid is not a refinement of the lattice grid")
    return ContinuumProxy(grid, r)


def embed(u, pair, proxy):
    """J_h u on the proxy: (F J_h u)(xi) = (2pi)^{d/2} phi0_hat(h xi) (F_h u)~(xi)."""
    if u.grid != proxy.base:
        raise ShapeError("lattice field does not live on the proxy's base grid")
    return LatticeField(proxy.grid, transfer(pair, proxy).J(u.values))


def discretize(f, pair, grid):
    """K_h f: fold conj(psi0_hat(h xi + 2pi j)) f_hat(xi + 2pi j/h) over j, then invert."""
    proxy = _proxy_for(f.grid, grid)
    return LatticeField(grid, transfer(pair, proxy).K(f.values))


def embed_adjoint(f, pair, grid):
    proxy = _proxy_for(f.grid, grid)
    return LatticeField(grid, transfer(pair, proxy).J_adj(f.values))


def discretize_adjoint(u, pair, proxy):
    if u.grid != proxy.base:
        raise ShapeError("lattice field does not live on the proxy's base grid")
    return LatticeField(proxy.grid, transfer(pair, proxy).K_adj(u.values))


def sample_potential(V, grid):
    """V_h(k) = V(hk) at the box points."""
    return LatticeField(grid, V(grid.points()).astype(float))


@dataclass
class ProjectionReport:
    idempotency_residual: float
    range_residual: float
    max_defect: float
    trials: int

    def passed(self, tol=1e-8):
        return self.idempotency_residual <= tol and self.range_residual <= tol and self.max_defect > 0


def projection_check(pair, h, proxy, trials=100, seed=0):
    """Sampled checks that J_h K_h is a (non-orthogonal, non-identity) projection."""
    if trials < 10:
        raise ParameterError("projection_check needs at least 10 trials")
    if not np.isclose(h, proxy.base.h):
        raise ParameterError("h does not match the proxy's base grid")
    t = transfer(pair, proxy)
    rng = np.random.default_rng(seed)
    fine, base = proxy.grid, proxy.base

    def norm(a, g):
        return np.sqrt(g.weight * np.sum(np.abs(a) ** 2))

    idem = rng_res = defect = 0.0
    for _ in range(trials):
        f = rng.standard_normal(fine.shape) + 1j * rng.standard_normal(fine.shape)
        pf = t.J(t.K(f))
        idem = max(idem, norm(t.J(t.K(pf)) - pf, fine) / norm(f, fine))
        defect = max(defect, norm(pf - f, fine) / norm(f, fine))
        u = rng.standard_normal(base.shape) + 1j * rng.standard_normal(base.shape)
        ju = t.J(u)
        rng_res = max(rng_res, norm(t.J(t.K(ju)) - ju, fine) / norm(ju, fine))
    return ProjectionReport(float(idem), float(rng_res), float(defect), trials)
