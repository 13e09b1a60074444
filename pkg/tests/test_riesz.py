import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourlat.errors import AliasingError, ParameterError
from fourlat.lattice import ContinuumProxy, LatticeGrid, transfer
from fourlat.riesz import (BumpProfile, DegenerateProfileWarning, biorthogonality_defect,
                           build_pair, cosine_step, decay_check, expstep, kernel_witness,
                           pair_from_config, riesz_bounds, supported_tau)


def test_steps_are_steps():
    t = np.linspace(-1, 2, 301)
    for step in (expstep, cosine_step):
        s = step(t)
        assert np.all(np.diff(s) >= -1e-15)
        assert s[0] == 0 and s[-1] == 1


def test_bump_support():
    u = BumpProfile()
    assert np.allclose(u(np.linspace(-np.pi, np.pi, 11)[:, None]), 1.0)
    assert np.allclose(u(np.array([[1.5 * np.pi], [2 * np.pi]])), 0.0)


@pytest.mark.parametrize("delta", [0.0, 0.25, 0.5, 1.0])
def test_biorthogonal_for_all_delta(delta):
    assert biorthogonality_defect(build_pair(delta=delta)) < 1e-12


def test_delta_range():
    with pytest.raises(ParameterError):
        build_pair(delta=1.5)


def test_riesz_bounds_positive(pair):
    A, B = riesz_bounds(pair.phi_hat)
    assert 0 < A <= B < np.inf


def test_degenerate_profile_warns():
    with pytest.warns(DegenerateProfileWarning):
        riesz_bounds(lambda xi: np.zeros(xi.shape[:-1]))


def test_kernel_witness(pair):
    g = LatticeGrid(1, 1.0, 64)
    f = kernel_witness(pair, g)
    t = transfer(pair, ContinuumProxy(g, 4))
    assert f.norm() > 0
    assert np.linalg.norm(t.K(f.values)) < 1e-12 * np.linalg.norm(f.values)


def test_decay_fast_for_smooth_pair(pair):
    rep = decay_check(pair, tau=3.0)
    assert rep.passed
    assert rep.tau_supported > 5


def test_decay_rejects_small_period(pair):
    with pytest.raises(AliasingError):
        decay_check(pair, 3.0, radius=100, period=200)
    with pytest.raises(ParameterError):
        decay_check(pair, 1.0)


def test_supported_tau_exceeds_dimension(pair):
    assert supported_tau(pair) > 2


def test_pair_from_config():
    p = pair_from_config({"delta": 0.25, "ramp": "cosine"})
    assert p.delta == 0.25
    assert biorthogonality_defect(p) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-40, 40))
def test_biorthogonality_pointwise(delta, xi):
    p = build_pair(delta=delta)
    pts = np.array([[xi]])
    assert biorthogonality_defect(p, pts) < 1e-12
