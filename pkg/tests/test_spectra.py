import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from darkcool.model import IonParams
from darkcool.spectra import (
    FeatureCountError, Spectrum, absorption_spectrum, excited_population, fig2_grid, fig2_params,
    locate_features,
)


@pytest.fixture(scope="module")
def fig2():
    p = fig2_params()
    return p, absorption_spectrum(p, fig2_grid(p))


def test_fig2_params_are_consistent():
    p = fig2_params()
    assert p.omega_g == pytest.approx(p.gamma / np.sqrt(2))
    assert p.omega_r == pytest.approx(p.gamma / 20)
    assert p.delta_r == pytest.approx(p.gamma)
    from darkcool.rates import optimal_delta_g
    assert p.delta_g == pytest.approx(optimal_delta_g(p), rel=1e-12)


def test_fig2_two_zeros_one_peak(fig2):
    p, s = fig2
    zeros, peak = locate_features(s, zero_tol=1e-6)
    assert len(zeros) == 2 and zeros == sorted(zeros)
    assert zeros[0] < peak[0] < zeros[1]
    assert abs(zeros[1] - zeros[0] - p.nu) <= 0.02 * p.nu
    top = s.absorption.max()
    assert all(s.evaluate(z) < 1e-6 * top for z in zeros)


def test_absorption_bounds(fig2):
    _, s = fig2
    assert np.all(s.absorption >= -1e-12) and np.all(s.absorption <= 1)


@given(st.floats(0.5, 20), st.floats(0.05, 3),
       st.floats(0.05, 2).flatmap(lambda a: st.sampled_from([a, -a])), st.floats(-20, 20))
@settings(max_examples=15)
def test_dark_resonance_is_exact(og, orr, dgr, dg):
    # omega_mw = 0 would leave |d> decoupled and the steady state degenerate
    p = IonParams(omega_g=og, omega_r=orr, omega_mw=dgr, delta_gr=dgr, delta_g=dg, eta1=0, eta2=0)
    # at delta_r = delta_g - omega_mw the dark condition holds exactly
    assert excited_population(p, dg - dgr) < 1e-8


def test_no_cooling_beam_no_absorption():
    p = fig2_params(omega_r=1e-6)
    s = absorption_spectrum(p, fig2_grid(p, points=201))
    assert s.absorption.max() < 1e-10


def test_grid_refinement_stability():
    p = fig2_params()
    coarse = absorption_spectrum(p, fig2_grid(p, points=201))
    fine = absorption_spectrum(p, fig2_grid(p, points=401))
    zc, _ = locate_features(coarse)
    zf, _ = locate_features(fine)
    h = np.diff(coarse.detunings)[0]
    assert np.max(np.abs(np.subtract(zc, zf))) < h


def _synthetic(z1, z2, points=400):
    x = np.linspace(0, 1.5, points)
    y = (x - z1) ** 2 * (x - z2) ** 2 / ((x - 0.7) ** 2 + 0.3**2) ** 2
    return Spectrum(detunings=x, absorption=y)


def test_synthetic_double_fano():
    gamma = 1.0
    s = _synthetic(0.7 * gamma, 0.75 * gamma)
    zeros, peak = locate_features(s)
    h = s.detunings[1] - s.detunings[0]
    assert abs(zeros[0] - 0.7) <= h and abs(zeros[1] - 0.75) <= h
    assert 0.7 < peak[0] < 0.75


def test_flat_spectrum_mismatch():
    s = Spectrum(detunings=np.linspace(0, 1, 300), absorption=np.full(300, 0.2))
    with pytest.raises(FeatureCountError, match="feature count mismatch"):
        locate_features(s)


def test_magic_separation_checked():
    s = _synthetic(0.7, 0.75)
    s.magic, s.nu = True, 1.0
    with pytest.raises(FeatureCountError):
        locate_features(s)


def test_grid_validation():
    with pytest.raises(ValueError):
        absorption_spectrum(fig2_params(), [1.0, 0.5, 2.0])
