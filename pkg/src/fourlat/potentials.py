"""Bounded Hölder potentials V and their lattice samples V_h(k) = V(hk)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, ParameterError


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """A real bounded potential with declared sup-norm and Hölder exponent.

    ``evaluator`` maps an array of points with trailing axis ``d`` to real
    values. ``is_zero`` lets operators skip the potential entirely.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    sup_norm: float
    theta: float
    name: str = "custom"
    params: dict = field(default_factory=dict)
    is_zero: bool = False

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ParameterError(f"Hölder exponent must lie in (0, 1], got {self.theta}")
        if self.sup_norm < 0:
            raise ParameterError("sup_norm must be non-negative")

    def __call__(self, x):
        return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)

    def theta_prime(self, tau=math.inf, d=1):
        """Effective exponent from 1/theta' = 1/theta + 1/(tau - d)."""
        if tau <= d:
            raise ParameterError(f"decay exponent tau={tau} must exceed d={d}")
        if math.isinf(tau):
            return self.theta
        return 1.0 / (1.0 / self.theta + 1.0 / (tau - d))

    @property
    def mu(self):
        """Shift with (-inf, -mu] inside both resolvent sets."""
        return self.sup_norm + 1.0

    def to_config(self):
        return {"potential": self.name, **self.params}


def check_potential(pot, d=1, n=2000, radius=20.0, seed=0):
    """Sampled sup bound and Hölder quotient; returns (sup_ok, max_quotient)."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(-radius, radius, size=(n, d))
    y = x + rng.normal(scale=10.0 ** rng.uniform(-6, 0, size=(n, 1)), size=(n, d))
    vx, vy = pot(x), pot(y)
    sup_ok = bool(np.all(np.abs(vx) <= pot.sup_norm * (1 + 1e-12) + 1e-15))
    dist = np.linalg.norm(x - y, axis=-1)
    quotient = np.abs(vx - vy) / dist ** pot.theta
    return sup_ok, float(np.max(quotient))


def zero_potential():
    return PotentialSpec(lambda x: np.zeros(x.shape[:-1]), 0.0, 1.0, "zero", is_zero=True)


def constant_potential(value):
    return PotentialSpec(lambda x: np.full(x.shape[:-1], float(value)), abs(value), 1.0,
                         "constant", {"value": value})


def cos_potential(amplitude=1.0):
    return PotentialSpec(lambda x: amplitude * np.prod(np.cos(x), axis=-1), abs(amplitude),
                         1.0, "cos", {"amplitude": amplitude})


def sech2_potential(amplitude=-2.0):
    # amplitude -2 in d=1: Pöschl-Teller well with single bound state at -1
    return PotentialSpec(lambda x: amplitude * np.prod(np.cosh(x) ** -2.0, axis=-1),
                         abs(amplitude), 1.0, "sech2", {"amplitude": amplitude})


def sin_power_potential(theta=0.5):
    """|sin x_1|^theta ... product over coordinates; Hölder of order theta at the zeros."""
    return PotentialSpec(lambda x: np.prod(np.abs(np.sin(x)) ** theta, axis=-1), 1.0, theta,
                         "sinpow", {"theta": theta})


_BUILTIN = {
    "zero": lambda p: zero_potential(),
    "constant": lambda p: constant_potential(p.get("value", 1.0)),
    "cos": lambda p: cos_potential(p.get("amplitude", 1.0)),
    "sech2": lambda p: sech2_potential(p.get("amplitude", -2.0)),
    "sinpow": lambda p: sin_power_potential(p.get("theta", 0.5)),
}


def potential_from_config(cfg):
    if cfg is None:
        return zero_potential()
    if isinstance(cfg, str):
        cfg = {"potential": cfg}
    cfg = dict(cfg)
    name = cfg.pop("potential", None)
    if name not in _BUILTIN:
        raise ConfigError(f"unknown potential {name!r}; expected one of {sorted(_BUILTIN)}")
    return _BUILTIN[name](cfg)
