"""Resolvents of H_0 + V on the lattice box and on the proxy, and error-operator norms.

The error operator is D(z) = J_h (H_h - z)^{-1} K_h - (H - z)^{-1}, acting on
proxy fields. For V = 0 it is block diagonal over Fourier fibers, which the
fiber method exploits; the power method treats it as a black box.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as sla

from .errors import ParameterError, ShapeError, SolverError, SpectralParameterError
from .lattice import TWO_PI, LatticeField, transfer
from .linalg import NormEstimate, power_norm
from .potentials import PotentialSpec, zero_potential
from .symbols import DiscretizedSymbol

__all__ = [
    "PotentialSpec", "ResolventProbe", "Operator", "ResolventSolver", "apply_resolvent",
    "ErrorOperator", "error_norm_fiber", "error_norm_power", "potential_commutator_norm",
    "y_blowup_scan", "BlowupReport",
]


@dataclass(frozen=True)
class ResolventProbe:
    z: complex = -1.0 + 0j
    tol: float = 1e-10
    maxiter: int = 500
    method: str = "fiber"

    def __post_init__(self):
        if self.method not in ("fiber", "power"):
            raise ParameterError(f"unknown norm method {self.method!r}")

    @classmethod
    def from_config(cls, cfg):
        cfg = dict(cfg or {})
        z = cfg.get("z", [-1.0, 0.0])
        z = complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z)
        return cls(z, float(cfg.get("tol", 1e-10)), int(cfg.get("maxiter", 500)),
                   cfg.get("method", "fiber"))


@dataclass(frozen=True, eq=False)
class Operator:
    """H_0 + V on a lattice box (``space="discrete"``) or on a proxy (``"proxy"``)."""

    symbol: object
    potential: PotentialSpec = field(default_factory=zero_potential)
    space: str = "discrete"

    def __post_init__(self):
        if self.space not in ("discrete", "proxy"):
            raise ParameterError(f"space must be 'discrete' or 'proxy', got {self.space!r}")
        if self.potential is None:
            object.__setattr__(self, "potential", zero_potential())

    def symbol_values(self, grid):
        xi = grid.freq_points()
        if self.space == "discrete":
            return DiscretizedSymbol(self.symbol, grid.h)(xi)
        return self.symbol(xi)

    def potential_values(self, grid):
        if self.potential.is_zero:
            return None
        return self.potential(grid.points())


def check_spectral_parameter(z, potential):
    z = complex(z)
    if potential is None or potential.is_zero:
        if z.imag == 0 and z.real >= 0:
            raise SpectralParameterError(f"z={z} lies in [0, inf), the spectrum of H_0")
    elif z.imag == 0 and z.real > -potential.mu:
        raise SpectralParameterError(
            f"real z={z.real} must satisfy z <= -mu = {-potential.mu} when V != 0")
    return z


class ResolventSolver:
    """w = (H - z)^{-1} u on one grid.

    V = 0: exact Fourier diagonal. Otherwise GMRES on (I + V R_0) y = u with
    w = R_0 y, R_0 = (H_0 - z)^{-1}; the residual of this system equals the
    residual of (H - z) w = u.
    """

    def __init__(self, op, grid, z, tol=1e-10, maxiter=500, restart=60, check=True):
        # check=False admits real z inside a spectral gap (shift-invert eigensolves)
        self.z = check_spectral_parameter(z, op.potential) if check else complex(z)
        self.grid = grid
        self.tol = tol
        self.maxiter = maxiter
        self.restart = restart
        self.r0 = 1.0 / (op.symbol_values(grid) - self.z)
        self.V = op.potential_values(grid)
        self.shape = grid.shape
        n = grid.size
        if self.V is not None:
            self._A = sla.LinearOperator((n, n), matvec=self._matvec, dtype=complex)

    def free(self, u):
        return np.fft.ifftn(self.r0 * np.fft.fftn(u))

    def _matvec(self, y):
        y = y.reshape(self.shape)
        return (y + self.V * self.free(y)).ravel()

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        if self.V is None:
            return self.free(u)
        b = u.ravel()
        bnorm = np.linalg.norm(b)
        if bnorm == 0:
            return np.zeros(self.shape, dtype=complex)
        y, _ = sla.gmres(self._A, b, rtol=self.tol, atol=0.0, restart=self.restart,
                         maxiter=self.maxiter)
        res = np.linalg.norm(self._matvec(y) - b) / bnorm
        if res > self.tol * (1 + 1e-6):
            raise SolverError(f"GMRES residual {res:.3e} above tolerance {self.tol:.1e}",
                              residual=res)
        return self.free(y.reshape(self.shape))


def apply_resolvent(op, z, u, tol=1e-10, maxiter=500):
    """(op - z)^{-1} u for a LatticeField u on the operator's grid."""
    if u.domain != "space":
        raise ShapeError("resolvents act on space-domain fields")
    solver = ResolventSolver(op, u.grid, z, tol, maxiter)
    return LatticeField(u.grid, solver(u.values))


class ErrorOperator:
    """Matrix-free D(z) = J_h (H_h - z)^{-1} K_h - (H - z)^{-1} on a proxy.

    ``scale`` multiplies D (a test hook for homogeneity checks).
    """

    def __init__(self, symbol, pair, proxy, z=-1.0, potential=None, tol=1e-10, maxiter=500,
                 scale=1.0):
        self.symbol, self.pair, self.proxy = symbol, pair, proxy
        self.potential = potential or zero_potential()
        self.z = complex(z)
        self.scale = scale
        self.t = transfer(pair, proxy)
        disc = Operator(symbol, self.potential, "discrete")
        cont = Operator(symbol, self.potential, "proxy")
        zc = self.z.conjugate()
        self.Rh = ResolventSolver(disc, proxy.base, self.z, tol, maxiter)
        self.R = ResolventSolver(cont, proxy.grid, self.z, tol, maxiter)
        self.Rh_adj = ResolventSolver(disc, proxy.base, zc, tol, maxiter)
        self.R_adj = ResolventSolver(cont, proxy.grid, zc, tol, maxiter)

    @property
    def in_shape(self):
        return self.proxy.grid.shape

    @property
    def weight(self):
        return self.proxy.grid.weight

    def apply(self, f):
        return self.scale * (self.t.J(self.Rh(self.t.K(f))) - self.R(f))

    def apply_adjoint(self, f):
        return np.conj(self.scale) * (self.t.K_adj(self.Rh_adj(self.t.J_adj(f))) - self.R_adj(f))

    def __call__(self, f):
        return LatticeField(self.proxy.grid, self.apply(f.values))


def error_norm_power(handle, iters=300, rng_seed=0, restarts=5, rtol=1e-6):
    """Power-iteration estimate of ||D(z)||."""
    if iters < 50:
        raise ParameterError("power iteration needs at least 50 iterations")
    return power_norm(handle.apply, handle.apply_adjoint, handle.in_shape, handle.weight,
                      handle.weight, iters=iters, restarts=restarts, rtol=rtol, seed=rng_seed)


def fiber_samples(d, n_axis=None, n_random=10_000, seed=0):
    """Points t = h*xi in the cell [-pi, pi]^d: a tensor grid plus random points."""
    if n_axis is None:
        n_axis = {1: 4096, 2: 128}.get(d, 24)
    ax = np.linspace(-np.pi, np.pi, n_axis)
    grid = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1).reshape(-1, d)
    rng = np.random.default_rng(seed)
    return np.concatenate([grid, rng.uniform(-np.pi, np.pi, size=(n_random, d))])


def fiber_norms(symbol, pair, h, z, t):
    """Spectral norm of the error operator restricted to each fiber t = h*xi.

    Inside the 3^d x 3^d block indexed by shifts j', j in {-1, 0, 1}^d:
        M = (2pi)^d phi0_hat(t + 2pi j') conj(psi0_hat(t + 2pi j)) / (G_{0,h}(xi) - z)
            - delta_{j'j} / (G_0(xi + 2pi j'/h) - z).
    Outside it the operator is diagonal, -(G_0(xi + 2pi j'/h) - z)^{-1}; the
    ring |j'_i| <= 2 is included (farther shifts are smaller for the builtin
    radially increasing symbols).
    """
    d = symbol.d
    t = np.asarray(t, dtype=float).reshape(-1, d)
    inner = [np.array(j, float) for j in itertools.product((-1, 0, 1), repeat=d)]
    ring = [np.array(j, float) for j in itertools.product(range(-2, 3), repeat=d)
            if max(abs(c) for c in j) == 2]
    gh = DiscretizedSymbol(symbol, h)(t / h)
    P = np.stack([pair.phi_hat(t + TWO_PI * j) for j in inner], axis=1)
    Q = np.stack([pair.psi_hat(t + TWO_PI * j) for j in inner], axis=1)
    R = np.stack([1.0 / (symbol((t + TWO_PI * j) / h) - z) for j in inner], axis=1)
    M = TWO_PI ** d * P[:, :, None] * np.conj(Q)[:, None, :] / (gh - z)[:, None, None]
    idx = np.arange(len(inner))
    M[:, idx, idx] -= R
    block = np.linalg.norm(M, ord=2, axis=(1, 2))
    outer = np.max(np.stack([np.abs(1.0 / (symbol((t + TWO_PI * j) / h) - z)) for j in ring],
                            axis=1), axis=1)
    return np.maximum(block, outer)


def error_norm_fiber(symbol, pair, h, z=-1.0, n_axis=None, n_random=10_000, seed=0, t=None,
                     chunk=20_000):
    """sup over sampled fibers of the exact per-fiber norm of D(z); V = 0 only."""
    z = check_spectral_parameter(z, None)
    if t is None:
        t = fiber_samples(symbol.d, n_axis, n_random, seed)
    t = np.asarray(t, dtype=float).reshape(-1, symbol.d)
    best = 0.0
    for start in range(0, len(t), chunk):
        best = max(best, float(fiber_norms(symbol, pair, h, z, t[start:start + chunk]).max()))
    return best


class CommutatorOperator:
    """V_h K_h - K_h V from proxy fields to lattice fields."""

    def __init__(self, potential, pair, proxy):
        self.t = transfer(pair, proxy)
        self.proxy = proxy
        self.Vh = potential(proxy.base.points())
        self.Vf = potential(proxy.grid.points())

    def apply(self, f):
        return self.Vh * self.t.K(f) - self.t.K(self.Vf * f)

    def apply_adjoint(self, w):
        return self.t.K_adj(self.Vh * w) - self.Vf * self.t.K_adj(w)


def potential_commutator_norm(V, pair, h, proxy, iters=300, rng_seed=0, restarts=5):
    """Power-iteration estimate of ||V_h K_h - K_h V|| (proxy -> lattice)."""
    if not np.isclose(h, proxy.base.h):
        raise ParameterError("h does not match the proxy's base grid")
    if pair.tau is not None and pair.tau <= pair.d:
        raise ParameterError(f"pair decay exponent tau={pair.tau} must exceed d={pair.d}")
    op = CommutatorOperator(V, pair, proxy)
    return power_norm(op.apply, op.apply_adjoint, proxy.grid.shape, proxy.grid.weight,
                      proxy.base.weight, iters=iters, restarts=restarts, seed=rng_seed)


@dataclass
class BlowupReport:
    x: float
    ys: list
    norms: list
    ratios: list
    exponent: float

    def max_ratio(self):
        return max(self.ratios) if self.ratios else float("nan")


def y_blowup_scan(factory, x, y_list):
    """||D(x + iy)|| for each y; ``factory(z)`` returns the norm (float or NormEstimate)."""
    ys = [float(y) for y in y_list]
    if any(y == 0 for y in ys):
        raise SpectralParameterError("y must be nonzero")
    norms = [float(factory(complex(x, y))) for y in ys]
    ratios = [norms[i + 1] / norms[i] for i in range(len(ys) - 1)]
    if len(ys) >= 2 and all(n > 0 for n in norms):
        exponent = float(np.polyfit(np.log(1.0 / np.abs(ys)), np.log(norms), 1)[0])
    else:
        exponent = float("nan")
    return BlowupReport(float(x), ys, norms, ratios, exponent)
