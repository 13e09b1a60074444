"""Spectra of the lattice and proxy operators and their comparison.

Sets are stored as unions of closed intervals (points are degenerate
intervals), so Hausdorff distances between a sampled range and a finite set
are computed exactly rather than up to a sampling resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as sla

from .errors import (ConfigError, DomainError, IllConditionedWindowError, NumericError,
                     ParameterError)
from .lattice import ContinuumProxy, LatticeGrid, transfer
from .linalg import power_norm
from .potentials import zero_potential
from .resolvent import Operator, ResolventSolver
from .symbols import DiscretizedSymbol, predicted_rate

DENSE_LIMIT = 4096
SHIFT_OFFSET = 0.2113


@dataclass
class SpectrumSet:
    """A closed subset of R as sorted disjoint intervals ``[lo, hi]``.

    ``kind`` is "sampled-range" or "eigenvalue-list"; ``values`` holds sorted
    representative samples (the eigenvalues themselves for a list).
    """

    kind: str
    intervals: np.ndarray
    values: np.ndarray = field(default=None)
    note: str = ""

    def __post_init__(self):
        iv = np.asarray(self.intervals, dtype=float).reshape(-1, 2)
        if np.isnan(iv).any() or (iv[:, 0] > iv[:, 1]).any():
            raise DomainError("intervals must satisfy lo <= hi")
        self.intervals = _merge(iv)
        if self.values is None:
            lo, hi = self.intervals[:, 0], np.minimum(self.intervals[:, 1], self.intervals[:, 0] + 1e6)
            self.values = np.unique(np.concatenate([lo, hi]))
        self.values = np.sort(np.asarray(self.values, dtype=float))
        if not np.isfinite(self.values).all():
            raise DomainError("spectrum samples must be finite")

    @classmethod
    def points(cls, values, note=""):
        v = np.sort(np.asarray(values, dtype=float).ravel())
        return cls("eigenvalue-list", np.stack([v, v], axis=1), v, note)

    @classmethod
    def interval(cls, lo, hi, n=1025, note=""):
        samples = np.linspace(lo, hi if math.isfinite(hi) else lo + 1e6, n)
        return cls("sampled-range", [[lo, hi]], samples, note)

    def __len__(self):
        return len(self.intervals)

    @property
    def empty(self):
        return len(self.intervals) == 0

    @property
    def bounded(self):
        return self.empty or bool(np.isfinite(self.intervals).all())

    def union(self, other):
        kind = self.kind if self.kind == other.kind else "sampled-range"
        return SpectrumSet(kind, np.concatenate([self.intervals, other.intervals]),
                           np.concatenate([self.values, other.values]), self.note)

    def clip(self, a, b):
        """Intersection with [a, b]."""
        iv = self.intervals
        lo, hi = np.maximum(iv[:, 0], a), np.minimum(iv[:, 1], b)
        keep = lo <= hi
        vals = self.values[(self.values >= a) & (self.values <= b)]
        return SpectrumSet(self.kind, np.stack([lo[keep], hi[keep]], axis=1), vals, self.note)

    def count_in(self, a, b):
        """Number of list entries strictly inside (a, b)."""
        return int(np.sum((self.values > a) & (self.values < b)))

    def dist(self, x):
        """Distance from each x to the set."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.intervals[:, 0], self.intervals[:, 1]
        gap = np.maximum(lo[None, :] - x[..., None], x[..., None] - hi[None, :])
        return np.maximum(gap, 0.0).min(axis=-1)

    def gap_midpoints(self):
        iv = self.intervals
        return 0.5 * (iv[1:, 0] + iv[:-1, 1])


def _merge(iv):
    if len(iv) == 0:
        return iv.reshape(0, 2)
    iv = iv[np.argsort(iv[:, 0], kind="stable")]
    out = [list(iv[0])]
    for lo, hi in iv[1:]:
        if lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return np.array(out, dtype=float)


@dataclass(frozen=True)
class Window:
    a: float
    b: float
    mu: float = 1.0

    def __post_init__(self):
        if not self.a < self.b:
            raise ParameterError(f"window needs a < b, got [{self.a}, {self.b}]")
        if self.mu <= 0:
            raise ParameterError("mu must be positive")
        if not -self.mu < self.a:
            raise ParameterError(f"window needs -mu < a, got a={self.a}, mu={self.mu}")

    @classmethod
    def from_config(cls, cfg):
        return cls(float(cfg["a"]), float(cfg["b"]), float(cfg.get("mu", 1.0)))


def _one_sided(X, Y):
    """sup_{x in X} dist(x, Y); dist(., Y) on an interval peaks at an end or a gap midpoint."""
    cand = [X.intervals.ravel()]
    mids = Y.gap_midpoints()
    if len(mids):
        inside = (X.dist(mids) == 0)
        cand.append(mids[inside])
    cand = np.concatenate(cand)
    return float(Y.dist(cand).max())


def hausdorff(X, Y):
    if X.empty or Y.empty:
        raise DomainError("Hausdorff distance needs non-empty sets")
    if not (X.bounded and Y.bounded):
        raise DomainError("Hausdorff distance needs bounded sets")
    return max(_one_sided(X, Y), _one_sided(Y, X))


def local_hausdorff(X, Y, K):
    """max{0, sup over X in K of dist(., Y), sup over Y in K of dist(., X)}, sup of empty = -inf."""
    a, b = (K.a, K.b) if isinstance(K, Window) else K
    if X.empty or Y.empty:
        raise DomainError("local Hausdorff distance needs non-empty sets")
    best = 0.0
    for A, B in ((X, Y), (Y, X)):
        Ak = A.clip(a, b)
        if not Ak.empty:
            best = max(best, _one_sided(Ak, B))
    return best


def _brillouin_samples(d, h, n_axis=None):
    n_axis = n_axis or {1: 8193, 2: 257}.get(d, 33)
    ax = np.linspace(-np.pi / h, np.pi / h, n_axis)
    return np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1).reshape(-1, d)


def dense_hamiltonian(op, grid):
    """Dense Hermitian matrix of op on a periodic grid (acts on unweighted coefficients)."""
    n = grid.size
    if n > DENSE_LIMIT:
        raise ConfigError(f"dense operator of size {n} exceeds the limit {DENSE_LIMIT}")
    G = op.symbol_values(grid)
    if grid.d == 1:
        H = scipy.linalg.circulant(np.fft.ifft(G))
    else:
        axes = tuple(range(grid.d))
        eye = np.eye(n).reshape(grid.shape + (n,))
        H = np.fft.ifftn(G[..., None] * np.fft.fftn(eye, axes=axes), axes=axes).reshape(n, n)
    H = 0.5 * (H + H.conj().T)
    if np.abs(H.imag).max() < 1e-12 * max(1.0, np.abs(H.real).max()):
        H = H.real
    V = op.potential_values(grid)
    if V is not None:
        H = H + np.diag(V.ravel())
    return H


def spectrum(op, grid, vectors=False):
    """Spectrum of op on ``grid``.

    V = 0: the range of the symbol over the grid's Brillouin zone (for the
    discrete operator G_{0,h} over [-pi/h, pi/h]^d; for the proxy G_0 up to its
    cutoff). Otherwise the eigenvalues of the dense periodic truncation, and
    with ``vectors=True`` also the eigenvectors as columns.
    """
    if op.potential.is_zero and not vectors:
        xi = _brillouin_samples(grid.d, grid.h)
        G = DiscretizedSymbol(op.symbol, grid.h)(xi) if op.space == "discrete" else op.symbol(xi)
        return SpectrumSet.interval(float(G.min()), float(G.max()),
                                    note=f"{op.space} symbol range, h={grid.h}")
    H = dense_hamiltonian(op, grid)
    try:
        if vectors:
            w, U = np.linalg.eigh(H)
        else:
            w, U = np.linalg.eigvalsh(H), None
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"dense eigensolve failed: {exc}") from exc
    s = SpectrumSet.points(w, note=f"{op.space} eigenvalues, N={grid.N}, h={grid.h}")
    return (s, U) if vectors else s


def eigenpairs_near(op, grid, sigma, k=4, tol=1e-10):
    """k eigenpairs of op on ``grid`` nearest sigma, by shift-invert Lanczos.

    The shifted solves (H - sigma)^{-1} run through the GMRES solver with the
    free resolvent as preconditioner; sigma must not be an eigenvalue.
    """
    n = grid.size
    G = op.symbol_values(grid)
    V = op.potential_values(grid)
    V = np.zeros(grid.shape) if V is None else V

    def matvec(x):
        x = x.reshape(grid.shape)
        return (np.fft.ifftn(G * np.fft.fftn(x)) + V * x).ravel()

    solver = ResolventSolver(op, grid, sigma, tol=tol, check=False)
    A = sla.LinearOperator((n, n), matvec=matvec, dtype=complex)
    OPinv = sla.LinearOperator((n, n), matvec=lambda x: solver(x.reshape(grid.shape)).ravel(),
                               dtype=complex)
    try:
        w, U = sla.eigsh(A, k=k, sigma=sigma, OPinv=OPinv, which="LM", tol=1e-12)
    except (sla.ArpackError, sla.ArpackNoConvergence) as exc:
        raise NumericError(f"shift-invert eigensolve failed: {exc}") from exc
    order = np.argsort(w)
    return w[order].real, U[:, order]


def window_eigenpairs(op, grid, a, b, k=6, dense_limit=2048):
    """All eigenpairs of op on grid with eigenvalue in (a, b); vectors as unweighted columns.

    Larger grids use shift-invert at an off-center shift, so a symmetric
    window around an eigenvalue does not place the shift on it.
    """
    if grid.size <= dense_limit:
        s, U = spectrum(op, grid, vectors=True)
        w = s.values
    else:
        w, U = eigenpairs_near(op, grid, a + SHIFT_OFFSET * (b - a), k=k)
        inside = (w > a) & (w < b)
        if inside.all():
            raise NumericError(f"all {k} shift-invert eigenvalues fall in the window; raise k")
    sel = (w > a) & (w < b)
    return w[sel], U[:, sel]


def _reciprocal(s, mu):
    iv = s.intervals
    lo = np.where(np.isfinite(iv[:, 1]), 1.0 / (iv[:, 1] + mu), 0.0)
    hi = 1.0 / (iv[:, 0] + mu)
    return SpectrumSet(s.kind, np.stack([lo, hi], axis=1), note=f"1/(sigma+{mu})")


def resolvent_spectrum_distance(symbol, h, potential=None, mu=None, length=16.0, r=8,
                                reference="proxy"):
    """Hausdorff distance between sigma((H_h + mu)^{-1}) and sigma((H + mu)^{-1}).

    The continuum spectrum is unbounded, so its reciprocal set includes 0.
    ``reference="discrete"`` compares the lattice operator with itself.
    """
    potential = potential or zero_potential()
    mu = potential.mu if mu is None else mu
    if mu <= potential.sup_norm:
        raise ParameterError(f"mu={mu} must exceed sup|V|={potential.sup_norm}")
    grid = LatticeGrid.from_box(symbol.d, h, length)
    disc = spectrum(Operator(symbol, potential, "discrete"), grid)
    if reference == "discrete":
        return hausdorff(_reciprocal(disc, mu), _reciprocal(disc, mu))
    if potential.is_zero:
        cont = SpectrumSet.interval(0.0, math.inf, note="range of G_0")
    else:
        fine = ContinuumProxy(grid, r).grid
        cont = spectrum(Operator(symbol, potential, "proxy"), fine)
    rc = _reciprocal(cont, mu).union(SpectrumSet.points([0.0]))
    return hausdorff(_reciprocal(disc, mu), rc)


def union_with_zero(pair, N=16, r=4, seed=0, d=1):
    """Eigenvalues of the truncated J_h F_h K_h against sigma(F_h) and {0}.

    F_h is a random real diagonal (multiplication) operator on the lattice
    box. Returns (distance, n_nonzero_expected, n_nonzero_found).
    """
    grid = LatticeGrid(d, 1.0, N)
    proxy = ContinuumProxy(grid, r)
    t = transfer(pair, proxy)
    rng = np.random.default_rng(seed)
    F = rng.uniform(0.5, 2.0, size=grid.shape)
    n = proxy.grid.size
    cols = np.empty((n, n), dtype=complex)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        cols[:, i] = t.J(F * t.K(e.reshape(proxy.grid.shape))).ravel()
    ev = np.linalg.eigvals(cols)
    order = np.argsort(-np.abs(ev))
    top, rest = ev[order[:grid.size]], ev[order[grid.size:]]
    err = max(float(np.abs(np.sort(top.real) - np.sort(F.ravel())).max()),
              float(np.abs(top.imag).max()), float(np.abs(rest).max(initial=0.0)))
    n_big = int(np.sum(np.abs(ev) > 1e-3))
    return err, grid.size, n_big


@dataclass
class GapReport:
    a: float
    b: float
    hs: list
    empty: list
    distance: list
    proxy_empty: bool

    @property
    def passed(self):
        return self.proxy_empty and all(self.empty)

    def onset(self):
        """Largest h from which the window stays empty for all smaller h."""
        h0 = None
        for h, e in sorted(zip(self.hs, self.empty)):
            if not e:
                break
            h0 = h
        return h0


def gap_check(symbol, potential, interval, h_list, length=16.0, r=8, ref_h=None):
    """Check that [a, b] holds no spectrum of H_h for each h.

    The precondition [a, b] free of sigma(H) is first verified on a proxy
    (mesh ``ref_h``/r, default the finest h in the list).
    """
    a, b = interval
    potential = potential or zero_potential()
    ref_h = min(h_list) if ref_h is None else ref_h
    ref = ContinuumProxy(LatticeGrid.from_box(symbol.d, ref_h, length), r).grid
    prox = Operator(symbol, potential, "proxy")
    if potential.is_zero:
        proxy_empty = b < 0
    else:
        c = 0.5 * (a + b)
        if ref.size <= DENSE_LIMIT:
            w = spectrum(prox, ref).values
        else:
            w, _ = eigenpairs_near(prox, ref, c if c < 0 else c + 1e-3, k=2)
        proxy_empty = not np.any((w >= a) & (w <= b))
    if not proxy_empty:
        raise ConfigError(f"[{a}, {b}] meets the proxy spectrum")
    hs, empty, dist = [], [], []
    for h in sorted(h_list, reverse=True):
        grid = LatticeGrid.from_box(symbol.d, h, length)
        s = spectrum(Operator(symbol, potential, "discrete"), grid)
        dd = 0.0 if not s.clip(a, b).empty else float(s.dist(np.array([a, b])).min())
        hs.append(h)
        empty.append(dd > 0)
        dist.append(dd)
    return GapReport(a, b, hs, empty, dist, proxy_empty)


class _ProjectionDifference:
    """J_h E_h K_h - E acting on proxy arrays; both projections are orthogonal."""

    def __init__(self, t, Uh, U, wh, w):
        self.t = t
        self.Uh, self.U = Uh, U
        self.wh, self.w = wh, w

    def _Eh(self, u):
        c = self.Uh.conj().T @ u.ravel()
        return (self.Uh @ c).reshape(u.shape)

    def _E(self, f):
        c = self.U.conj().T @ f.ravel()
        return (self.U @ c).reshape(f.shape)

    def apply(self, f):
        return self.t.J(self._Eh(self.t.K(f))) - self._E(f)

    def apply_adjoint(self, f):
        return self.t.K_adj(self._Eh(self.t.J_adj(f))) - self._E(f)


def _projection_defects(U):
    P = U @ U.conj().T
    return float(np.abs(P @ P - P).max(initial=0.0)), float(np.abs(P - P.conj().T).max(initial=0.0))


def spectral_projection_distance(symbol, potential, pair, h, window, length=16.0, r=4,
                                 gamma=None, iters=300, seed=0, k=8):
    """||J_h E_{H_h}((a,b)) K_h - E_H((a,b))|| by power iteration.

    Both spectral projections come from symmetric eigendecompositions. The
    window endpoints must stay eps = max(1e-3, 5 h^gamma) away from the proxy
    spectrum.
    """
    a, b = window
    potential = potential or zero_potential()
    if gamma is None:
        gamma = predicted_rate(symbol, potential, pair.tau or math.inf)
    eps = max(1e-3, 5 * h ** gamma)
    grid = LatticeGrid.from_box(symbol.d, h, length)
    proxy = ContinuumProxy(grid, r)
    w, U = window_eigenpairs(Operator(symbol, potential, "proxy"), proxy.grid, a - eps, b + eps, k)
    if np.any((np.abs(w - a) < eps) | (np.abs(w - b) < eps)):
        raise IllConditionedWindowError(f"proxy eigenvalue within {eps:.2e} of the window ends")
    sel = (w > a) & (w < b)
    w, U = w[sel], U[:, sel]
    wh, Uh = window_eigenpairs(Operator(symbol, potential, "discrete"), grid, a, b, k)
    for M in (U, Uh):
        idem, herm = _projection_defects(M) if M.shape[0] <= DENSE_LIMIT else (0.0, 0.0)
        if idem > 1e-9 or herm > 1e-9:
            raise NumericError(f"spectral projection defect {max(idem, herm):.2e}")
    op = _ProjectionDifference(transfer(pair, proxy), Uh, U, wh, w)
    fine = proxy.grid
    return power_norm(op.apply, op.apply_adjoint, fine.shape, fine.weight, fine.weight,
                      iters=iters, seed=seed)


@dataclass
class TrackReport:
    h: float
    multiplicity: int
    discrete: list
    continuum: list
    errors: list
    subspace_residuals: list
    k_norms: list

    @property
    def count_ok(self):
        return len(self.discrete) == self.multiplicity


def track_eigenvalues(symbol, potential, pair, h, window, m=1, length=16.0, r=8, k=6):
    """Discrete eigenvalues in (a, b) against the proxy ones, and K_h of the proxy eigenvectors.

    For each proxy eigenvector psi (unit L^2 norm) reports ||K_h psi|| and
    ||(I - P_h) K_h psi|| / ||K_h psi||, with P_h the discrete spectral
    projection onto (a, b).
    """
    a, b = window
    grid = LatticeGrid.from_box(symbol.d, h, length)
    proxy = ContinuumProxy(grid, r)
    fine = proxy.grid
    w, U = window_eigenpairs(Operator(symbol, potential, "proxy"), fine, a, b, k)
    wh, Uh = window_eigenpairs(Operator(symbol, potential, "discrete"), grid, a, b, k)
    t = transfer(pair, proxy)
    res, knorm = [], []
    for j in range(U.shape[1]):
        psi = U[:, j].reshape(fine.shape) / math.sqrt(fine.weight)
        kp = t.K(psi).ravel()
        proj = Uh @ (Uh.conj().T @ kp)
        nk = math.sqrt(grid.weight) * np.linalg.norm(kp)
        knorm.append(float(nk))
        res.append(float(math.sqrt(grid.weight) * np.linalg.norm(kp - proj) / nk))
    errors = []
    for lam in wh:
        errors.append(float(np.min(np.abs(w - lam))) if len(w) else math.inf)
    return TrackReport(h, m, list(map(float, wh)), list(map(float, w)), errors, res, knorm)
