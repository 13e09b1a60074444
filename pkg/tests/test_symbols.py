import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourlat.errors import ConfigError, DomainError, ParameterError, SpectralParameterError
from fourlat.potentials import cos_potential, sin_power_potential
from fourlat.symbols import (ClassI, ClassII, ClassIII, DiscretizedSymbol, Symbol, bilaplacian,
                             fraclap, laplacian, predicted_rate, pseudorel, symbol_from_config,
                             symbol_resolvent_gap, validate_class)


def test_discretized_laplacian_matches_closed_form():
    h = 0.1
    xi = np.linspace(-np.pi / h, np.pi / h, 101)
    g = DiscretizedSymbol(laplacian(), h)(xi)
    assert np.allclose(g, (2 / h * np.sin(h * xi / 2)) ** 2)


def test_laplacian_range_at_unit_mesh():
    g = DiscretizedSymbol(laplacian(), 1.0)(np.linspace(-np.pi, np.pi, 2001))
    assert g.max() == pytest.approx(4.0)
    assert g.min() == pytest.approx(0.0, abs=1e-12)


def test_symbol_periodic_in_discrete_zone():
    dsym = DiscretizedSymbol(fraclap(1.5), 0.25)
    xi = np.linspace(-3, 3, 50)
    assert np.allclose(dsym(xi), dsym(xi + 2 * np.pi / 0.25))


def test_class_rates():
    assert ClassI(1.5, 0.5).rate() == pytest.approx(1.5)
    assert ClassI(3.0, 3.0).rate() == pytest.approx(2.0)
    assert ClassII(1.0, 0.5).rate() == pytest.approx(0.5)
    assert ClassIII(0.25).rate() == 0.25


@pytest.mark.parametrize("s, rate", [(0.5, 0.5), (1.0, 1.0), (1.5, 1.5), (2, 2.0), (3, 2.0), (4, 2.0)])
def test_fraclap_predicted_rate(s, rate):
    assert predicted_rate(fraclap(s)) == pytest.approx(rate)


def test_pseudorel_rate():
    assert predicted_rate(pseudorel(1.0)) == pytest.approx(1.0)


def test_invalid_class_chain_rejected():
    with pytest.raises(ParameterError):
        ClassI(1.5, 0.4).rate()
    with pytest.raises(ParameterError):
        ClassIII(1.5).check()


def test_misdeclared_symbol_fails_validation():
    good = fraclap(1.5)
    bad = Symbol(1, ClassI(1.5, 0.4), good.evaluator, tag="fraclap", params={"s": 1.5})
    rep = validate_class(bad)
    assert not rep.passed
    assert "class_parameters" in rep.failed()


@pytest.mark.parametrize("sym", [laplacian(), bilaplacian(), fraclap(0.5), fraclap(1.5), pseudorel(1.0)])
def test_builtins_validate(sym):
    rep = validate_class(sym)
    assert rep.passed, rep.failed()


def test_predicted_rate_with_potential():
    assert predicted_rate(laplacian(), sin_power_potential(0.5)) == pytest.approx(0.5)
    # 1/theta' = 1/theta + 1/(tau - d)
    assert predicted_rate(laplacian(), cos_potential(), tau=5.0) == pytest.approx(0.8)


def test_nonfinite_input_rejected():
    with pytest.raises(DomainError):
        laplacian()(np.array([np.nan]))


def test_gap_rejects_spectrum_point():
    with pytest.raises(SpectralParameterError):
        symbol_resolvent_gap(DiscretizedSymbol(laplacian(), 0.5), z=1.0)


def test_gap_zero_when_symbol_equals_discretization():
    # symbol constant in xi has G_h = G
    const = Symbol(1, ClassIII(1.0), lambda xi: np.zeros(xi.shape[:-1]))
    assert symbol_resolvent_gap(DiscretizedSymbol(const, 0.5)) == 0.0


def test_symbol_from_config():
    assert symbol_from_config({"symbol": "fraclap", "s": 0.5}).params == {"s": 0.5}
    assert symbol_from_config("laplacian").name() == "laplacian"
    with pytest.raises(ConfigError):
        symbol_from_config({"symbol": "nope"})


def test_laplacian_gap_slope():
    hs = [2.0 ** -k for k in range(2, 9)]
    e = [symbol_resolvent_gap(DiscretizedSymbol(laplacian(), h)) for h in hs]
    assert np.polyfit(np.log(hs), np.log(e), 1)[0] == pytest.approx(2.0, abs=0.1)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 3.9), st.floats(1e-3, 2.0), st.floats(-50, 50))
def test_discretization_below_symbol(s, h, xi):
    # |2/h sin(h xi/2)| <= |xi| and the builtins are radially increasing
    sym = fraclap(s)
    assert DiscretizedSymbol(sym, h)(xi) <= sym(xi) * (1 + 1e-12) + 1e-300


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 1.0), st.floats(-1e3, 1e3))
def test_discretization_converges_pointwise(h, xi):
    sym = laplacian()
    hh = h / 64
    assert abs(DiscretizedSymbol(sym, hh)(xi) - sym(xi)) <= abs(DiscretizedSymbol(sym, h)(xi) - sym(xi)) + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3.0))
def test_symbols_even(s):
    xi = np.linspace(-20, 20, 41)
    sym = fraclap(s)
    assert np.allclose(sym(xi), sym(-xi))
    assert math.isclose(float(sym(0.0)), 0.0)
