"""Matrix-free largest singular value by power iteration on A*A."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class NormEstimate:
    value: float
    converged: bool
    increment: float
    iterations: int

    def __float__(self):
        return self.value


def power_norm(apply, apply_adjoint, in_shape, in_weight, out_weight, iters=300, restarts=5,
               rtol=1e-6, seed=0):
    """Estimate ||A|| between weighted l2 spaces.

    ``apply`` and ``apply_adjoint`` act on arrays; the adjoint must be taken
    with respect to the weighted inner products. Each restart starts from a
    seeded complex Gaussian vector; the largest Rayleigh quotient wins.
    Convergence means successive Rayleigh quotients differ by less than
    ``rtol`` relative.
    """
    rng = np.random.default_rng(seed)
    best = NormEstimate(0.0, True, 0.0, 0)

    def nrm2(a, w):
        return w * float(np.vdot(a, a).real)

    for _ in range(restarts):
        x = rng.standard_normal(in_shape) + 1j * rng.standard_normal(in_shape)
        x /= np.sqrt(nrm2(x, in_weight))
        rho_prev = None
        converged, inc, it = False, np.inf, 0
        for it in range(1, iters + 1):
            y = apply(x)
            rho = nrm2(y, out_weight)
            if rho == 0.0:
                converged, inc = True, 0.0
                break
            if rho_prev is not None:
                inc = abs(rho - rho_prev) / rho
                if inc < rtol:
                    converged = True
                    break
            rho_prev = rho
            x = apply_adjoint(y)
            x /= np.sqrt(nrm2(x, in_weight))
        est = NormEstimate(float(np.sqrt(rho)), converged, float(inc), it)
        if not converged:
            logger.warning("power iteration stopped after %d iterations, last increment %.2e",
                           it, inc)
        if est.value >= best.value:
            best = est
    return best
