"""Experiment configs, h-sweeps, log-log rate fits, and report persistence."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import lattice, riesz, spectra
from .errors import ConfigError, DegenerateDataError, ExperimentError, FourlatError
from .lattice import ContinuumProxy, LatticeGrid, transfer
from .potentials import potential_from_config
from .resolvent import (ErrorOperator, ResolventProbe, error_norm_fiber, error_norm_power,
                        potential_commutator_norm, y_blowup_scan)
from .symbols import predicted_rate, symbol_from_config

logger = logging.getLogger(__name__)

KINDS = ("rate-free", "rate-potential", "commutator", "spectrum-distance", "local-spectrum",
         "gap", "projection", "eigen-track", "y-blowup", "identity-suite")
RATE_KINDS = ("rate-free", "rate-potential", "commutator", "spectrum-distance", "projection",
              "eigen-track")
DEFAULT_TOL = {"rate-free": 0.15, "rate-potential": 0.2, "commutator": 0.15,
               "spectrum-distance": 0.3, "projection": 0.3, "eigen-track": 0.4}
CSV_COLUMNS = ["experiment", "kind", "symbol", "h", "error", "slope", "gamma_predicted", "verdict"]
MIN_R2 = 0.98


def default_h_list():
    return [2.0 ** -k for k in range(2, 8)]


@dataclass
class ExperimentConfig:
    kind: str
    name: str = "experiment"
    symbol: dict = field(default_factory=lambda: {"symbol": "laplacian"})
    pair: dict = field(default_factory=lambda: {"delta": 0.5, "ramp": "expstep"})
    potential: dict | None = None
    h_list: list = field(default_factory=default_h_list)
    probe: dict = field(default_factory=dict)
    grid: dict = field(default_factory=lambda: {"length": 16.0, "r": 4})
    window: dict | None = None
    blowup: dict | None = None
    gamma: float | None = None
    tolerance: float | None = None
    drop_largest: int = 1
    power: dict = field(default_factory=lambda: {"iters": 300, "restarts": 5})
    output: dict = field(default_factory=dict)
    seed: int = 0
    threads: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        hs = [float(h) for h in self.h_list]
        if any(h <= 0 for h in hs) or any(b >= a for a, b in zip(hs, hs[1:])):
            raise ConfigError("h list must be strictly decreasing and positive")
        if self.kind in RATE_KINDS and len(hs) < 4:
            raise ConfigError(f"rate fits need at least 4 h values, got {len(hs)}")
        if int(self.grid.get("r", 4)) < 4:
            raise ConfigError("proxy refinement r must be at least 4")
        self.h_list = hs

    @property
    def d(self):
        return int(self.symbol.get("d", 1)) if isinstance(self.symbol, dict) else 1

    def with_h_range(self, h_min=None, h_count=None):
        """Geometric h list from the current largest h down to ``h_min``."""
        if h_min is None and h_count is None:
            return self
        h_max = self.h_list[0]
        h_min = self.h_list[-1] if h_min is None else float(h_min)
        n = len(self.h_list) if h_count is None else int(h_count)
        if not 0 < h_min < h_max or n < 2:
            raise ConfigError(f"bad h range: h_min={h_min}, h_max={h_max}, count={n}")
        return replace(self, h_list=list(np.geomspace(h_max, h_min, n)))


def load_config(path, overrides=None):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class RateReport:
    points: list
    slope: float
    intercept: float
    r2: float
    gamma: float
    tolerance: float
    drop_largest: int = 1

    @property
    def verdict(self):
        return bool(math.isfinite(self.slope) and abs(self.slope - self.gamma) <= self.tolerance
                    and self.r2 >= MIN_R2)


def fit_rate(points, drop_largest=1):
    """Least-squares (slope, intercept, R^2) of log error against log h."""
    pts = sorted((float(h), float(e)) for h, e in points)
    if any(e <= 0 for _, e in pts):
        raise DegenerateDataError("errors must be positive to fit a power law")
    if drop_largest:
        pts = pts[:-drop_largest]
    if len(pts) < 3:
        raise DegenerateDataError(f"need at least 3 points after dropping, got {len(pts)}")
    x = np.log([h for h, _ in pts])
    y = np.log([e for _, e in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss if ss > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def rate_report(points, gamma, tolerance, drop_largest=1):
    slope, intercept, r2 = fit_rate(points, drop_largest)
    return RateReport(sorted(points), slope, intercept, r2, gamma, tolerance, drop_largest)


@dataclass
class ExperimentReport:
    experiment: str
    kind: str
    symbol: str
    rows: list = field(default_factory=list)
    rate: RateReport | None = None
    checks: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self):
        ok = all(bool(v[0]) if isinstance(v, (list, tuple)) else bool(v)
                 for v in self.checks.values())
        if self.rate is not None:
            ok = ok and self.rate.verdict
        return ok

    def to_dict(self):
        out = asdict(self)
        out["verdict"] = self.verdict
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data.pop("verdict", None)
        rate = data.pop("rate", None)
        if rate is not None:
            rate["points"] = [tuple(p) for p in rate["points"]]
            rate = RateReport(**rate)
        data["rows"] = [tuple(r) for r in data.get("rows", [])]
        return cls(rate=rate, **data)


def _fmt(x):
    if x is None or x == "":
        return ""
    if isinstance(x, bool):
        return "pass" if x else "fail"
    return repr(float(x))


def emit(report, fmt, path):
    """Write a report as CSV (per-h rows plus one summary row) or JSON."""
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump(None if report is None else report.to_dict(), fh, indent=2, sort_keys=True)
        return
    if fmt != "csv":
        raise ConfigError(f"unknown output format {fmt!r}")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        if report is None or (not report.rows and report.rate is None and not report.checks):
            return
        for h, err in report.rows:
            w.writerow([report.experiment, report.kind, report.symbol, _fmt(h), _fmt(err),
                        "", "", ""])
        slope = report.rate.slope if report.rate else None
        gamma = report.rate.gamma if report.rate else None
        w.writerow([report.experiment, report.kind, report.symbol, "", "", _fmt(slope),
                    _fmt(gamma), _fmt(report.verdict)])


def ingest(path):
    with open(path) as fh:
        data = json.load(fh)
    return None if data is None else ExperimentReport.from_dict(data)


def worker_count(cfg_threads=None):
    n = os.cpu_count() or 1
    env = os.environ.get("FOURLAT_THREADS")
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError as exc:
            raise ConfigError(f"FOURLAT_THREADS must be an integer, got {env!r}") from exc
    if cfg_threads:
        n = min(n, int(cfg_threads))
    return max(1, n)


class _Context:
    """Objects shared by all h values of one experiment."""

    def __init__(self, cfg):
        self.cfg = cfg
        sym_cfg = cfg.symbol if isinstance(cfg.symbol, dict) else {"symbol": cfg.symbol}
        self.symbol = symbol_from_config(sym_cfg)
        self.potential = potential_from_config(cfg.potential)
        self.pair = riesz.pair_from_config(cfg.pair, self.symbol.d)
        if not self.potential.is_zero and self.symbol.d == 1:
            self.pair = self.pair.with_tau(riesz.supported_tau(self.pair))
        self.probe = ResolventProbe.from_config(cfg.probe)
        if "z" not in cfg.probe and not self.potential.is_zero:
            self.probe = replace(self.probe, z=-1.0 + 1.0j)
        self.length = float(cfg.grid.get("length", 16.0))
        self.r = int(cfg.grid.get("r", 4))

    @property
    def tau(self):
        return self.pair.tau if self.pair.tau is not None else math.inf

    def proxy(self, h, r=None):
        return ContinuumProxy(LatticeGrid.from_box(self.symbol.d, h, self.length), r or self.r)

    def gamma(self):
        cfg = self.cfg
        if cfg.gamma is not None:
            return float(cfg.gamma)
        if cfg.kind == "rate-free":
            return predicted_rate(self.symbol)
        if cfg.kind == "commutator":
            return self.potential.theta_prime(self.tau, self.symbol.d)
        return predicted_rate(self.symbol, self.potential, self.tau)

    def power_kw(self):
        p = self.cfg.power
        return {"iters": int(p.get("iters", 300)), "restarts": int(p.get("restarts", 5)),
                "rng_seed": self.cfg.seed}


def _error_at(ctx, h):
    kind, cfg = ctx.cfg.kind, ctx.cfg
    if kind == "rate-free" and ctx.probe.method == "fiber":
        return error_norm_fiber(ctx.symbol, ctx.pair, h, ctx.probe.z, seed=cfg.seed)
    if kind in ("rate-free", "rate-potential"):
        op = ErrorOperator(ctx.symbol, ctx.pair, ctx.proxy(h), ctx.probe.z, ctx.potential,
                           tol=ctx.probe.tol, maxiter=ctx.probe.maxiter)
        return float(error_norm_power(op, **ctx.power_kw()))
    if kind == "commutator":
        kw = ctx.power_kw()
        return float(potential_commutator_norm(ctx.potential, ctx.pair, h, ctx.proxy(h),
                                               kw["iters"], kw["rng_seed"], kw["restarts"]))
    if kind == "spectrum-distance":
        mu = (cfg.window or {}).get("mu")
        return spectra.resolvent_spectrum_distance(ctx.symbol, h, ctx.potential, mu, ctx.length,
                                                   r=int(cfg.grid.get("r_ref", 8)))
    if kind == "projection":
        w = cfg.window or {}
        est = spectra.spectral_projection_distance(
            ctx.symbol, ctx.potential, ctx.pair, h, (w["a"], w["b"]), ctx.length, ctx.r,
            iters=ctx.power_kw()["iters"], seed=cfg.seed)
        return float(est)
    if kind == "eigen-track":
        w = cfg.window or {}
        rep = spectra.track_eigenvalues(ctx.symbol, ctx.potential, ctx.pair, h, (w["a"], w["b"]),
                                        int(w.get("multiplicity", 1)), ctx.length,
                                        int(cfg.grid.get("r_ref", 8)))
        return rep
    if kind == "local-spectrum":
        w = cfg.window or {}
        grid = LatticeGrid.from_box(ctx.symbol.d, h, ctx.length)
        X = spectra.spectrum(spectra.Operator(ctx.symbol, ctx.potential, "discrete"), grid)
        fine = ctx.proxy(h).grid
        if ctx.potential.is_zero:
            Y = spectra.SpectrumSet.interval(0.0, math.inf)
        else:
            Y = spectra.spectrum(spectra.Operator(ctx.symbol, ctx.potential, "proxy"), fine)
        return spectra.local_hausdorff(X, Y, (w["a"], w["b"]))
    raise ConfigError(f"kind {kind!r} has no per-h error")


def _sweep(ctx, stage):
    hs = ctx.cfg.h_list

    def task(h):
        try:
            return h, _error_at(ctx, h)
        except FourlatError as exc:
            raise ExperimentError(str(exc), h=h, stage=stage) from exc

    n = worker_count(ctx.cfg.threads)
    if n == 1:
        out = [task(h) for h in hs]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            out = list(pool.map(task, hs))
    return sorted(out)


def identity_suite(pair=None, N=256, trials=100, seed=0, d=1):
    """Algebraic identities at h = 1; returns {name: (ok, residual)}."""
    pair = pair or riesz.build_pair()
    grid = LatticeGrid(d, 1.0, N)
    proxy = ContinuumProxy(grid, 4)
    t = transfer(pair, proxy)
    rng = np.random.default_rng(seed)
    bio = riesz.biorthogonality_defect(pair)
    kj = 0.0
    for _ in range(trials):
        u = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        kj = max(kj, float(np.linalg.norm(t.K(t.J(u)) - u) / np.linalg.norm(u)))
    proj = lattice.projection_check(pair, 1.0, proxy, trials=trials, seed=seed)
    f = riesz.kernel_witness(pair, grid)
    kw = float(np.linalg.norm(t.K(f.values)) * math.sqrt(grid.weight) / f.norm())
    uz, n_exp, n_found = spectra.union_with_zero(pair, seed=seed, d=d)
    return {
        "biorthogonality": (bio < 1e-10, bio),
        "KhJh_identity": (kj < 1e-8, kj),
        "projection_idempotency": (proj.idempotency_residual < 1e-8, proj.idempotency_residual),
        "kernel_witness": (kw < 1e-8 and f.norm() > 0, kw),
        "union_with_zero": (uz < 1e-6 and n_exp == n_found, uz),
    }


def run(cfg):
    """Run one experiment, write any configured outputs, and return its report."""
    ctx = _Context(cfg)
    name = ctx.symbol.name()
    report = ExperimentReport(cfg.name, cfg.kind, name)
    kind = cfg.kind
    if kind == "identity-suite":
        checks = identity_suite(ctx.pair, seed=cfg.seed, d=ctx.symbol.d)
        report.checks = {k: [bool(ok), float(v)] for k, (ok, v) in checks.items()}
        report.rows = [(1.0, float(v)) for _, v in checks.values()]
    elif kind == "gap":
        w = cfg.window or {}
        try:
            g = spectra.gap_check(ctx.symbol, ctx.potential, (w["a"], w["b"]), cfg.h_list,
                                  ctx.length, int(cfg.grid.get("r_ref", 8)))
        except FourlatError as exc:
            raise ExperimentError(str(exc), stage="gap") from exc
        report.rows = sorted(zip(g.hs, g.distance))
        report.checks = {f"empty@h={h!r}": [bool(e), float(dd)]
                         for h, e, dd in sorted(zip(g.hs, g.empty, g.distance))}
        report.extra = {"onset_h": g.onset()}
    elif kind == "y-blowup":
        b = cfg.blowup or {}
        h = float(b.get("h", 2.0 ** -5))
        x = float(b.get("x", -1.0))
        ys = b.get("y", [1.0, 0.5, 0.25, 0.125, 0.0625])
        proxy = ctx.proxy(h)

        def factory(z):
            if ctx.potential.is_zero and ctx.probe.method == "fiber":
                return error_norm_fiber(ctx.symbol, ctx.pair, h, z, seed=cfg.seed)
            op = ErrorOperator(ctx.symbol, ctx.pair, proxy, z, ctx.potential, ctx.probe.tol,
                               ctx.probe.maxiter)
            return error_norm_power(op, **ctx.power_kw())

        try:
            rep = y_blowup_scan(factory, x, ys)
        except FourlatError as exc:
            raise ExperimentError(str(exc), h=h, stage="y-blowup") from exc
        n_allowed = int(b.get("N", 2 if ctx.potential.is_zero else 4))
        report.rows = [(y, n) for y, n in zip(rep.ys, rep.norms)]
        report.checks = {"halving_ratio": [rep.max_ratio() <= 2.0 ** n_allowed, rep.max_ratio()],
                         "non_negative": [all(v >= 0 for v in rep.norms), min(rep.norms)]}
        report.extra = {"h": h, "x": x, "exponent": rep.exponent, "N": n_allowed}
    else:
        points = _sweep(ctx, kind)
        if kind == "eigen-track":
            w = cfg.window or {}
            ref = w.get("reference")
            rows = []
            for h, tr in points:
                err = tr.errors[0] if ref is None or not tr.discrete else \
                    min(abs(lam - ref) for lam in tr.discrete)
                rows.append((h, err))
                report.checks[f"count@h={h!r}"] = [tr.count_ok, len(tr.discrete)]
                report.checks[f"K_psi@h={h!r}"] = [min(tr.k_norms, default=0) >= 0.5,
                                                  min(tr.k_norms, default=0.0)]
            report.extra = {"subspace_residuals": [(h, tr.subspace_residuals) for h, tr in points]}
            points = rows
        report.rows = [(float(h), float(e)) for h, e in points]
        if kind in RATE_KINDS:
            tol = cfg.tolerance if cfg.tolerance is not None else DEFAULT_TOL[kind]
            try:
                report.rate = rate_report(report.rows, ctx.gamma(), tol, cfg.drop_largest)
            except FourlatError as exc:
                raise ExperimentError(str(exc), stage="fit") from exc
    for fmt, path in sorted(cfg.output.items()):
        emit(report, fmt, path)
    logger.info("%s (%s): verdict %s", cfg.name, kind, "pass" if report.verdict else "fail")
    return report
