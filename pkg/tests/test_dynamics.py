import math
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambda_imprint.dynamics import (
    COMPONENTS,
    DensityMatrix,
    Grid,
    MediumSpec,
    advance_bloch_slice,
    advance_field_step,
    bloch_derivative,
    integrate_medium,
    midpoint_values,
)
from lambda_imprint.errors import GridTooCoarse, NonFiniteState
from lambda_imprint.pulses import TWO_PI, PulseSpec, input_envelope, make_envelope, matched_input_for_target


def lindblad_rhs(rho: np.ndarray, o13: complex, o23: complex, gamma: float, delta: float) -> np.ndarray:
    """Independent oracle: -i[H, rho] + sum D[L] rho with H = -M/2."""
    M = np.array([[0, 0, np.conj(o13)], [0, 0, np.conj(o23)], [o13, o23, -2 * delta]], dtype=complex)
    H = -0.5 * M
    out = -1j * (H @ rho - rho @ H)
    for k in (0, 1):
        L = np.zeros((3, 3), dtype=complex)
        L[k, 2] = math.sqrt(gamma / 2)
        LdL = L.conj().T @ L
        out += L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def random_state(rng) -> DensityMatrix:
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    m = a @ a.conj().T
    return DensityMatrix.from_matrix(m / np.trace(m).real)


class TestDensityMatrix:
    def test_ground(self):
        g = DensityMatrix.ground()
        assert g.trace() == 1.0 and g.purity() == pytest.approx(1.0)
        assert g.vector().shape == (6,)

    def test_roundtrip(self, rng):
        rho = random_state(rng)
        assert DensityMatrix.from_vector(rho.vector()) == rho
        np.testing.assert_allclose(DensityMatrix.from_matrix(rho.matrix()).matrix(), rho.matrix())

    def test_pure(self):
        rho = DensityMatrix.pure([1, 1j, 0])
        assert rho.rho12 == pytest.approx(-0.5j)
        assert rho.purity() == pytest.approx(1.0)

    def test_components_order(self):
        assert COMPONENTS == ("rho11", "rho22", "rho33", "rho12", "rho13", "rho23")


class TestMediumAndGrid:
    def test_dipoles(self):
        m = MediumSpec(mu_ratio=0.5)
        assert m.mu13 == 2.0 and m.mu23 == 1.0

    @pytest.mark.parametrize("kw", [{"length": 0}, {"mu_ratio": -1}, {"gamma3_tau": -0.1}])
    def test_invalid_medium(self, kw):
        with pytest.raises(ValueError):
            MediumSpec(**kw)

    def test_grid_counts(self):
        g = Grid(-1.0, 1.0, 0.5, 0.25, 1.0)
        assert g.n_t == 5 and g.n_z == 5
        np.testing.assert_allclose(g.t, [-1, -0.5, 0, 0.5, 1])
        assert g.t_index(0.1) == 2
        with pytest.raises(ValueError):
            g.t_index(3.0)

    def test_grid_needs_whole_steps(self):
        with pytest.raises(ValueError):
            Grid(0.0, 1.0, 0.3, 0.1, 1.0)

    def test_refined(self):
        g = Grid(0.0, 1.0, 0.1, 0.1, 1.0).refined(2, z=False)
        assert g.dt == 0.05 and g.dz == 0.1


class TestBlochDerivative:
    @pytest.mark.parametrize("gamma,delta", [(0.0, 0.0), (0.3, 0.0), (0.1, 0.7)])
    def test_matches_lindblad_oracle(self, rng, gamma, delta):  # [DERIVED] independent Lindblad form
        m = MediumSpec(gamma3_tau=gamma, delta_tau=delta)
        for _ in range(5):
            rho = random_state(rng)
            o13, o23 = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
            got = bloch_derivative(rho, o13, o23, m).matrix()
            np.testing.assert_allclose(got, lindblad_rhs(rho.matrix(), o13, o23, gamma, delta), atol=1e-13)

    def test_dark_state_is_stationary(self):  # [DERIVED] cos a|1> - sin a|2> decouples
        o13, o23 = 0.8, 1.7
        n = math.hypot(o13, o23)
        dark = DensityMatrix.pure([o23 / n, -o13 / n, 0.0])
        d = bloch_derivative(dark, o13, o23, MediumSpec(gamma3_tau=0.2)).vector()
        np.testing.assert_allclose(d, 0.0, atol=1e-15)


class TestSlice:
    def test_rabi_oracle(self):  # [DERIVED] rho33 = sin^2(Omega t / 2)
        g = Grid(0.0, 10.0, 0.02, 0.02, 0.02)
        om = 1.3
        traj = advance_bloch_slice(DensityMatrix.ground(), om, 0.0, MediumSpec(length=0.02), g)
        np.testing.assert_allclose(traj[:, 2].real, np.sin(0.5 * om * g.t) ** 2, atol=1e-6)
        np.testing.assert_allclose(traj[:, 4].imag, -0.5 * np.sin(om * g.t), atol=1e-6)

    def test_decay_oracle(self):  # [DERIVED] rho33 = exp(-Gamma t), split equally
        gamma = 0.5
        g = Grid(0.0, 10.0, 0.02, 0.02, 0.02)
        traj = advance_bloch_slice(DensityMatrix(0.0, 0.0, 1.0), 0.0, 0.0,
                                   MediumSpec(length=0.02, gamma3_tau=gamma), g)
        p3 = np.exp(-gamma * g.t)
        np.testing.assert_allclose(traj[:, 2].real, p3, atol=1e-6)
        np.testing.assert_allclose(traj[:, 1].real, 0.5 * (1 - p3), atol=1e-6)

    def test_rabi_fourth_order(self):
        g1 = Grid(0.0, 8.0, 0.1, 0.1, 0.1)
        g2 = Grid(0.0, 8.0, 0.05, 0.1, 0.1)
        m = MediumSpec(length=0.1)
        e = []
        for g in (g1, g2):
            traj = advance_bloch_slice(DensityMatrix.ground(), 2.0, 0.0, m, g)
            e.append(np.abs(traj[:, 2].real - np.sin(g.t) ** 2).max())
        assert math.log2(e[0] / e[1]) > 3.8

    def test_nonfinite_raises(self):
        g = Grid(0.0, 1.0, 0.5, 0.5, 0.5)
        with pytest.raises(NonFiniteState):
            advance_bloch_slice(DensityMatrix.ground(), np.array([0, np.nan, 0]), 0.0, MediumSpec(length=0.5), g)


def test_midpoints_exact_for_cubics():  # [DERIVED] 4-point Lagrange is exact on cubics
    t = np.linspace(0.0, 1.0, 11)
    f = lambda x: 1 - 2 * x + 3 * x**2 - 4 * x**3
    np.testing.assert_allclose(midpoint_values(f(t)), f(t[:-1] + 0.05), atol=1e-13)


class TestFieldStep:
    def test_euler(self):
        m = MediumSpec(mu_ratio=0.5)
        o13, o23 = advance_field_step(np.array([0.1j]), np.array([0.2]), np.array([1.0]),
                                      np.array([2.0]), m, 0.1)
        assert o13[0] == pytest.approx(1.0 + 0.1 * 1j * 2.0 * 0.1j)
        assert o23[0] == pytest.approx(2.0 + 0.1 * 1j * 1.0 * 0.2)

    def test_trapezoid(self):
        m = MediumSpec(mu_ratio=1.0)
        o13, _ = advance_field_step(np.array([1.0]), np.array([0.0]), np.array([0.0]), np.array([0.0]),
                                    m, 0.1, np.array([3.0]), np.array([0.0]))
        assert o13[0] == pytest.approx(0.1 * 1j * 2.0 * 2.0)


class TestIntegrateMedium:
    @staticmethod
    def _run(retain="boundary", snaps=(), length=1.0):
        g = Grid(-14.0, 16.0, 0.05, 0.05, length)
        p = matched_input_for_target(0.5)
        return integrate_medium(input_envelope(p.signal, g), input_envelope(p.control, g),
                                MediumSpec(length=length), g, snaps, retain), g

    def test_shapes_by_retention(self):
        rec, g = self._run("boundary", snaps=(0.0, 5.0))
        assert rec.omega13 is None and rec.rho is None
        assert set(rec.snapshots) == {0.0, 5.0}
        assert rec.snapshots[5.0].shape == (g.n_z, 6)
        rec, g = self._run("fields")
        assert rec.omega13.shape == (g.n_z, g.n_t) and rec.rho is None
        rec, g = self._run("full")
        assert rec.rho.shape == (g.n_z, g.n_t, 6)
        np.testing.assert_allclose(rec.omega13[-1], rec.omega13_out)
        np.testing.assert_allclose(rec.rho[:, -1], rec.final_state)

    def test_snapshot_at_end_equals_final_state(self):
        rec, g = self._run(snaps=(16.0,))
        np.testing.assert_allclose(rec.snapshots[16.0], rec.final_state)

    def test_length_mismatch(self):
        g = Grid(0.0, 1.0, 0.1, 0.1, 2.0)
        with pytest.raises(ValueError):
            integrate_medium(np.zeros(g.n_t), np.zeros(g.n_t), MediumSpec(length=1.0), g)

    def test_no_fields_no_change(self):
        g = Grid(0.0, 1.0, 0.1, 0.1, 1.0)
        rec = integrate_medium(np.zeros(g.n_t), np.zeros(g.n_t), MediumSpec(length=1.0), g)
        np.testing.assert_allclose(rec.final_state[:, 0], 1.0)
        np.testing.assert_allclose(rec.omega13_out, 0.0)

    def test_deterministic(self):
        a, _ = self._run()
        b, _ = self._run()
        assert np.array_equal(a.omega13_out, b.omega13_out)
        assert np.array_equal(a.final_state, b.final_state)

    def test_trace_advisory_warns(self, monkeypatch):
        # RK4 keeps the (linear) trace exactly, so lower the advisory to trip it
        import lambda_imprint.dynamics as dyn
        monkeypatch.setattr(dyn, "TRACE_ADVISORY", -1.0)
        g = Grid(-10.0, 10.0, 0.1, 0.1, 1.0)
        s = make_envelope(PulseSpec(area=TWO_PI), g, 0.0)
        with pytest.warns(GridTooCoarse):
            integrate_medium(s, np.zeros_like(s), MediumSpec(length=1.0), g)


@settings(max_examples=15, deadline=None)
@given(area13=st.floats(0.1, 3 * math.pi), area23=st.floats(0.0, 3 * math.pi),
       tau=st.floats(0.5, 1.5), gamma=st.sampled_from([0.0, 0.05]))
def test_slice_invariants(area13, area23, tau, gamma):
    """Trace, positivity and Cauchy-Schwarz hold for arbitrary drives (to RK4 truncation, 1e-6)."""
    g = Grid(-15.0, 15.0, 0.02, 0.02, 0.02)
    o13 = make_envelope(PulseSpec(area=area13, duration=tau), g, 0.0)
    o23 = make_envelope(PulseSpec(area=area23, duration=tau, center=0.5), g, 0.0)
    traj = advance_bloch_slice(DensityMatrix.ground(), o13, o23, MediumSpec(length=0.02, gamma3_tau=gamma), g)
    tr = traj[:, 0] + traj[:, 1] + traj[:, 2]
    assert np.abs(tr - 1.0).max() < 1e-10
    p = traj[:, :3].real
    assert p.min() > -1e-6
    for i, j, k in ((0, 1, 3), (0, 2, 4), (1, 2, 5)):
        assert (np.abs(traj[:, k]) ** 2 - p[:, i] * p[:, j]).max() < 1e-6
    if gamma == 0.0:
        pur = np.array([DensityMatrix.from_vector(y).purity() for y in traj[::100]])
        assert np.abs(pur - 1.0).max() < 1e-6
