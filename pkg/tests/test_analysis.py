import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambda_imprint.analysis import (
    ImprintCharacter,
    ImprintSnapshot,
    characterize_imprint,
    displacement,
    duration_for_displacement,
    phase_flip,
    predicted_displacement,
    retrieval_efficiency,
    shape_correlation,
)
from lambda_imprint.errors import ZeroInput

Z = np.linspace(0.0, 10.0, 501)


def analytic_imprint(x1: float, sign: int = 1) -> ImprintSnapshot:
    """Ground-state pattern after a 2pi bright-state rotation: alpha = arctan(e^(x - x1))."""
    a = np.arctan(np.exp(Z - x1))
    rho22 = np.sin(2 * a) ** 2          # = sech^2(x - x1)
    rho11 = 1 - rho22
    rho12 = sign * 0.5 * np.sin(4 * a)  # node at x1, lobes at x1 -/+ 0.88
    return ImprintSnapshot(Z, rho11, rho22, rho12.astype(complex), 0.0)


def test_sech_squared_identity():
    s = analytic_imprint(4.0)
    np.testing.assert_allclose(s.rho22, 1 / np.cosh(Z - 4.0) ** 2, atol=1e-12)


@pytest.mark.parametrize("x1", [2.0, 3.0, 5.0, 8.0, 4.013])
def test_center_and_width_of_analytic_imprint(x1):
    c = characterize_imprint(analytic_imprint(x1))
    assert c.center == pytest.approx(x1, abs=2e-3)
    # [DERIVED] FWHM of sech^2 is 2 acosh(sqrt 2) = 2 ln(1 + sqrt 2)
    assert c.width_fwhm == pytest.approx(2 * math.log(1 + math.sqrt(2)), abs=2e-3)
    assert c.peak_coherence == pytest.approx(0.5, abs=1e-3)


def test_phase_sign_follows_leading_lobe():
    up = characterize_imprint(analytic_imprint(4.0, +1))
    down = characterize_imprint(analytic_imprint(4.0, -1))
    assert up.phase_sign == -down.phase_sign
    assert phase_flip(up, down) and not phase_flip(up, up)


def test_not_found():
    flat = ImprintSnapshot(Z, np.ones_like(Z), np.zeros_like(Z), np.full(Z.shape, 1e-3, complex), 0.0)
    assert characterize_imprint(flat) is None
    assert characterize_imprint(analytic_imprint(12.0)) is None   # peak beyond the end face
    assert characterize_imprint(analytic_imprint(4.0), detection_threshold=0.6) is None


def test_snapshot_validation():
    with pytest.raises(ValueError):
        ImprintSnapshot(Z, np.ones(3), np.zeros(3), np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        ImprintSnapshot(Z, np.ones_like(Z), np.full(Z.shape, 0.1), np.zeros(Z.shape), 0.0)


def test_displacement():
    a = ImprintCharacter(3.0, 1.76, 0.5, 1)
    b = ImprintCharacter(4.1, 1.76, 0.5, -1)
    assert displacement(a, b) == pytest.approx(1.1)


def test_predicted_displacement_values():  # [DERIVED] ln 3 at half duration
    assert predicted_displacement(1.0, 0.5) == pytest.approx(math.log(3))
    assert predicted_displacement(1.0, 2.0) == pytest.approx(math.log(3))
    assert predicted_displacement(1.0, 1.0) == math.inf


@settings(max_examples=60)
@given(delta=st.floats(0.01, 12.0), tau_a=st.floats(0.2, 5.0), longer=st.booleans())
def test_duration_inverts_prediction(delta, tau_a, longer):
    tb = duration_for_displacement(delta, tau_a, longer)
    assert (tb > tau_a) == longer
    assert predicted_displacement(tau_a, tb) == pytest.approx(delta, rel=1e-6)


def test_retrieval_efficiency():
    t = np.linspace(-20, 20, 2001)
    inp = 2 / np.cosh(t)
    assert retrieval_efficiency(inp, -0.9 * inp, t[1] - t[0]) == pytest.approx(0.81)
    with pytest.raises(ZeroInput):
        retrieval_efficiency(np.zeros(5), np.ones(5), 0.1)


def test_shape_correlation():
    t = np.linspace(-30, 30, 3001)
    inp = 2 / np.cosh(t)
    assert shape_correlation(inp, -0.7 * 2 / np.cosh(t - 11.0)) == pytest.approx(1.0, abs=1e-12)
    gauss = np.exp(-0.5 * (t / 1.2) ** 2)
    r = shape_correlation(inp, gauss)
    assert 0.9 < r < 0.999
    with pytest.raises(ZeroInput):
        shape_correlation(inp, np.zeros_like(t))
