"""Multiplier symbols G_0, their lattice discretizations G_{0,h}, and rate prediction.

Symbols are evaluated on arrays of points whose trailing axis has length
``d``. In dimension one a bare scalar or 1-D array of frequencies is also
accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import ConfigError, DomainError, ParameterError, SpectralParameterError


@dataclass(frozen=True)
class ClassI:
    """C^1 symbols with growth |xi|^alpha and gradient bound |xi|^beta."""

    alpha: float
    beta: float

    def check(self):
        a, b = self.alpha, self.beta
        if not (a > 0.5 and b > -0.5 and a <= 1 + b < 2 * a <= 3 + b):
            raise ParameterError(
                f"ClassI needs alpha>1/2, beta>-1/2, alpha<=1+beta<2alpha<=3+beta; "
                f"got alpha={a}, beta={b}")

    def rate(self):
        self.check()
        return min(2 * self.alpha - 1, 2 * self.alpha - self.beta - 1)


@dataclass(frozen=True)
class ClassII:
    """G_0 = |xi|^alpha + smooth remainder with gradient bound |xi|^beta_t."""

    alpha: float
    beta_t: float

    def check(self):
        a, b = self.alpha, self.beta_t
        if not (0.5 < a <= 1 and b >= 0 and 1 + b < 2 * a):
            raise ParameterError(
                f"ClassII needs 1/2<alpha<=1, beta_t>=0, 1+beta_t<2alpha; got {a}, {b}")

    def rate(self):
        self.check()
        return 2 * self.alpha - self.beta_t - 1


@dataclass(frozen=True)
class ClassIII:
    """Pure fractional power |xi|^alpha with 0 < alpha <= 1."""

    alpha: float

    def check(self):
        if not 0 < self.alpha <= 1:
            raise ParameterError(f"ClassIII needs 0<alpha<=1, got {self.alpha}")

    def rate(self):
        self.check()
        return self.alpha


SymbolClass = Union[ClassI, ClassII, ClassIII]


def _as_points(xi, d):
    xi = np.asarray(xi, dtype=float)
    if d == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
        xi = xi[..., None]
    if xi.shape[-1] != d:
        raise DomainError(f"expected points with trailing axis {d}, got shape {xi.shape}")
    return xi


@dataclass(frozen=True, eq=False)
class Symbol:
    """A Fourier multiplier symbol with its declared class.

    ``evaluator`` receives points with trailing axis ``d`` and returns values
    over the leading axes. ``c`` is the growth constant, ``c_grad`` the
    gradient-bound constant (defaults to ``c``), ``c0`` the radius beyond which
    the growth bound applies. For ClassII ``remainder`` is the smooth part
    G_0 - |xi|^alpha.
    """

    d: int
    cls: SymbolClass
    evaluator: Callable[[np.ndarray], np.ndarray]
    c: float = 1.0
    c0: float = 1.0
    c_grad: float | None = None
    tag: str = "custom"
    params: dict = field(default_factory=dict)
    remainder: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError("dimension must be positive")

    @property
    def grad_constant(self):
        return self.c if self.c_grad is None else self.c_grad

    def __call__(self, xi):
        pts = _as_points(xi, self.d)
        if not np.all(np.isfinite(pts)):
            raise DomainError("symbol evaluated at a non-finite point")
        return np.asarray(self.evaluator(pts), dtype=float)

    def discretized(self, h):
        return DiscretizedSymbol(self, h)

    def name(self):
        if not self.params:
            return self.tag
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.tag}({inner})"

    def to_config(self):
        return {"symbol": self.tag, **self.params, **({"d": self.d} if self.d != 1 else {})}


@dataclass(frozen=True)
class DiscretizedSymbol:
    """G_{0,h}(xi) = G_0((2/h) sin(h xi_1 / 2), ..., (2/h) sin(h xi_d / 2))."""

    parent: Symbol
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ParameterError(f"mesh h must be positive, got {self.h}")

    def __call__(self, xi):
        pts = _as_points(xi, self.parent.d)
        if not np.all(np.isfinite(pts)):
            raise DomainError("symbol evaluated at a non-finite point")
        return self.parent((2.0 / self.h) * np.sin(0.5 * self.h * pts))


def eval_symbol(sym, xi):
    out = sym(xi)
    return float(out) if out.ndim == 0 else out


def eval_discretized(dsym, xi):
    out = dsym(xi)
    return float(out) if out.ndim == 0 else out


# builtin symbols

def _norm2(xi):
    return np.sum(xi * xi, axis=-1)


def fraclap(s, d=1):
    """(-Delta)^{s/2}: symbol |xi|^s, with the class the rate theory assigns to s."""
    if s <= 0:
        raise ParameterError(f"fractional order must be positive, got {s}")
    if s <= 1:
        cls = ClassIII(s)
    elif s < 2:
        cls = ClassI(s, s - 1)
    else:
        cls = ClassI((s + 2) / 2, s - 1)
    tag = {2: "laplacian", 4: "bilaplacian"}.get(s, "fraclap")
    params = {} if tag != "fraclap" else {"s": s}
    return Symbol(d, cls, lambda xi: _norm2(xi) ** (0.5 * s), c=1.0, c0=1.0,
                  c_grad=max(1.0, s), tag=tag, params=params)


def laplacian(d=1):
    return fraclap(2, d)


def bilaplacian(d=1):
    return fraclap(4, d)


def pseudorel(m=1.0, d=1):
    """sqrt(|xi|^2 + m^2) - m; degrades to |xi| (ClassIII) for m = 0."""
    if m < 0:
        raise ParameterError("mass must be non-negative")
    if m == 0:
        sym = fraclap(1, d)
        return Symbol(d, sym.cls, sym.evaluator, c=1.0, c0=1.0, c_grad=1.0,
                      tag="pseudorel", params={"m": 0.0})
    # G >= |xi|/2 once |xi| >= 4m/3; |grad G| < 1
    return Symbol(d, ClassI(1.0, 0.0), lambda xi: np.sqrt(_norm2(xi) + m * m) - m,
                  c=0.5, c0=4.0 * m / 3.0, c_grad=1.0, tag="pseudorel", params={"m": m})


def symbol_from_config(cfg, d=None):
    """Build a builtin symbol from ``{"symbol": "fraclap", "s": 1.5}``-style mappings."""
    if isinstance(cfg, str):
        cfg = {"symbol": cfg}
    cfg = dict(cfg)
    tag = cfg.pop("symbol", None)
    dim = int(cfg.pop("d", d or 1))
    if tag == "fraclap":
        return fraclap(float(cfg.get("s", 1.0)), dim)
    if tag == "laplacian":
        return laplacian(dim)
    if tag == "bilaplacian":
        return bilaplacian(dim)
    if tag == "pseudorel":
        return pseudorel(float(cfg.get("m", 1.0)), dim)
    raise ConfigError(f"unknown symbol {tag!r}")


def predicted_rate(sym, pot=None, tau=math.inf):
    """Rate gamma of the resolvent estimate, including theta' when a potential is present."""
    gamma = sym.cls.rate()
    if pot is not None and not pot.is_zero:
        gamma = min(gamma, pot.theta_prime(tau, sym.d))
    return gamma


def _check_z(z):
    z = complex(z)
    if z.imag == 0 and z.real >= 0:
        raise SpectralParameterError(f"z={z} lies in [0, inf)")
    return z


def default_gap_samples(d, h, n_axis=None, n_random=10_000, seed=0):
    """Tensor grid plus random points covering h*xi in [-3pi/2, 3pi/2]^d."""
    if n_axis is None:
        n_axis = {1: 8192, 2: 512}.get(d, 128)
    t = np.linspace(-1.5 * np.pi, 1.5 * np.pi, n_axis)
    mesh = np.stack(np.meshgrid(*([t] * d), indexing="ij"), axis=-1).reshape(-1, d)
    rng = np.random.default_rng(seed)
    rand = rng.uniform(-1.5 * np.pi, 1.5 * np.pi, size=(n_random, d))
    return np.concatenate([mesh, rand]) / h


def symbol_resolvent_gap(dsym, z=-1.0, samples=None, chunk=1 << 20, **sample_kw):
    """max |(G_{0,h}(xi) - z)^{-1} - (G_0(xi) - z)^{-1}| over the sample points."""
    z = _check_z(z)
    d = dsym.parent.d
    if samples is None:
        samples = default_gap_samples(d, dsym.h, **sample_kw)
    pts = _as_points(samples, d).reshape(-1, d)
    best = 0.0
    for start in range(0, len(pts), chunk):
        p = pts[start:start + chunk]
        gap = np.abs(1.0 / (dsym(p) - z) - 1.0 / (dsym.parent(p) - z))
        best = max(best, float(gap.max()))
    return best


@dataclass
class ValidationReport:
    symbol: str
    checks: dict  # name -> (passed, detail)

    @property
    def passed(self):
        return all(ok for ok, _ in self.checks.values())

    def failed(self):
        return [name for name, (ok, _) in self.checks.items() if not ok]


def _fd_gradient(f, pts):
    step = 1e-6 * (1.0 + np.linalg.norm(pts, axis=-1))
    grads = []
    for i in range(pts.shape[-1]):
        e = np.zeros(pts.shape[-1])
        e[i] = 1.0
        shift = step[:, None] * e
        grads.append((f(pts + shift) - f(pts - shift)) / (2 * step))
    return np.stack(grads, axis=-1)


def validate_class(sym, sample_budget=4000, rng_seed=0):
    """Try to falsify the declared class conditions by sampling.

    Passing is evidence only. Points are drawn with log-uniform radii in
    [1e-3, 1e6] and random directions.
    """
    if sample_budget < 1000:
        raise ParameterError("sample_budget must be at least 1000")
    rng = np.random.default_rng(rng_seed)
    d = sym.d
    dirs = rng.normal(size=(sample_budget, d))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    radii = 10.0 ** rng.uniform(-3, 6, size=sample_budget)
    pts = dirs * radii[:, None]
    vals = sym(pts)
    cls = sym.cls
    checks = {}
    try:
        cls.check()
        checks["class_parameters"] = (True, repr(cls))
    except ParameterError as exc:
        checks["class_parameters"] = (False, str(exc))

    g0 = float(sym(np.zeros(d)))
    checks["zero_at_origin"] = (abs(g0) <= 1e-14, f"G(0)={g0:.3e}")
    neg = int(np.sum(vals < 0))
    checks["non_negative"] = (neg == 0, f"{neg} negative samples")
    refl = sym(np.abs(pts))
    sym_err = float(np.max(np.abs(refl - vals) / (1.0 + np.abs(vals))))
    checks["reflection_symmetry"] = (sym_err <= 1e-12, f"max rel deviation {sym_err:.3e}")

    far = radii >= sym.c0
    if isinstance(cls, (ClassI, ClassIII)) and far.any():
        lower = sym.c * radii[far] ** cls.alpha
        bad = int(np.sum(vals[far] < lower * (1 - 1e-12)))
        checks["growth_lower_bound"] = (bad == 0, f"{bad} samples below c|xi|^alpha")

    if isinstance(cls, (ClassI, ClassII)):
        if isinstance(cls, ClassI):
            f, beta, mask = sym, cls.beta, np.ones_like(far)
        else:
            a = cls.alpha
            f = sym.remainder or (lambda p: sym(p) - np.linalg.norm(p, axis=-1) ** a)
            beta, mask = cls.beta_t, far
            rem0 = float(np.asarray(f(np.zeros((1, d))))[0])
            checks["remainder_zero_at_origin"] = (abs(rem0) <= 1e-14, f"{rem0:.3e}")
        grad = np.linalg.norm(_fd_gradient(f, pts[mask]), axis=-1)
        bound = sym.grad_constant * radii[mask] ** beta
        excess = grad / bound
        bad = int(np.sum(excess > 1 + 1e-4))
        checks["gradient_bound"] = (bad == 0, f"{bad} samples above c|xi|^beta "
                                               f"(max ratio {float(excess.max()):.4g})")
    return ValidationReport(sym.name(), checks)
