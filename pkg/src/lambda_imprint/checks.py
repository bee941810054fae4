"""Invariant and convergence checks run by ``lambda-imprint check``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import shape_correlation
from .diagnostics import excitation_balance, lax_residual, max_abs_diff_on_common_nodes, observed_order
from .dynamics import DensityMatrix, Grid, MediumSpec, advance_bloch_slice, integrate_medium
from .pulses import TWO_PI, PulseSpec, input_envelope, make_envelope, matched_input_for_target, pulse_area
from .scenarios import Case, run_storage, storage_config


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def rabi_error(dt: float = 0.02, omega: float = 1.3, t_end: float = 10.0) -> float:
    """Max deviation of rho33 from sin^2(Omega t / 2) under a constant resonant drive."""
    g = Grid(0.0, t_end, dt, dt, dt)
    traj = advance_bloch_slice(DensityMatrix.ground(), omega, 0.0, MediumSpec(length=dt), g)
    return float(np.abs(traj[:, 2].real - np.sin(0.5 * omega * g.t) ** 2).max())


def decay_error(dt: float = 0.02, gamma: float = 0.5, t_end: float = 10.0) -> float:
    """Max deviation from exponential decay of the excited state with no fields."""
    g = Grid(0.0, t_end, dt, dt, dt)
    m = MediumSpec(length=dt, gamma3_tau=gamma)
    traj = advance_bloch_slice(DensityMatrix(0.0, 0.0, 1.0), 0.0, 0.0, m, g)
    p3 = np.exp(-gamma * g.t)
    return float(max(np.abs(traj[:, 2].real - p3).max(),
                     np.abs(traj[:, 0].real - 0.5 * (1.0 - p3)).max()))


def sit_run(dt: float = 0.02, dz: float = 0.02, length: float = 10.0):
    spec = PulseSpec(area=TWO_PI)
    g = Grid(-14.0, 14.0 + 2.0 * length, dt, dz, length)
    s13 = input_envelope(spec, g)
    rec = integrate_medium(s13, np.zeros_like(s13), MediumSpec(length=length, mu_ratio=1.0), g)
    area = pulse_area(rec.omega13_out, g)
    r = shape_correlation(rec.omega13_in, rec.omega13_out)
    delay = g.t[np.argmax(np.abs(rec.omega13_out))] - g.t[np.argmax(np.abs(rec.omega13_in))]
    return area, r, float(delay), rec


def _short(dt, dz, retain="boundary", delta=0.0):
    g = Grid(-20.0, 20.0, dt, dz, 2.0)
    p = matched_input_for_target(1.0)
    m = MediumSpec(length=2.0, mu_ratio=1.0, delta_tau=delta)
    return integrate_medium(make_envelope(p.signal, g, 0.0), make_envelope(p.control, g, 0.0),
                            m, g, retain=retain)


def t_orders() -> list[float]:
    ref = _short(0.0025, 0.05)
    errs = [max_abs_diff_on_common_nodes(_short(dt, 0.05).omega13_out, ref.omega13_out)
            for dt in (0.04, 0.02, 0.01)]
    return observed_order(errs)


def z_orders() -> list[float]:
    ref = _short(0.01, 0.00625)
    errs = [float(np.abs(_short(0.01, dz).omega13_out - ref.omega13_out).max())
            for dz in (0.1, 0.05, 0.025)]
    return observed_order(errs)


def lax_residuals(steps=(0.08, 0.04, 0.02)) -> list[float]:
    return [lax_residual(_short(h, h, "full", delta=0.3)) for h in steps]


def run_checks() -> list[CheckResult]:
    out = []
    e = rabi_error()
    out.append(CheckResult("rabi oracle", e < 1e-6, f"max error {e:.2e} (< 1e-6)"))
    e = decay_error()
    out.append(CheckResult("decay oracle", e < 1e-6, f"max error {e:.2e} (< 1e-6)"))

    area, r, delay, rec = sit_run()
    ok = abs(area / TWO_PI - 1.0) < 0.01 and r >= 0.999 and delay > 0
    out.append(CheckResult("2pi transparency", ok,
                           f"area {area / math.pi:.4f} pi, r {r:.5f}, delay {delay:.2f} tau_a"))

    res = run_storage(storage_config(Case.SECH_IDEAL, 3.0))
    ok = res.trace_drift < 1e-8 and res.purity_drift < 1e-6 and res.cs_excess <= 1e-8
    out.append(CheckResult("conservation", ok,
                           f"trace {res.trace_drift:.1e}, purity {res.purity_drift:.1e}, "
                           f"cauchy-schwarz excess {res.cs_excess:.1e}"))

    bal = np.ptp(excitation_balance(_short(0.02, 0.02, "fields")))
    out.append(CheckResult("excitation balance", bal < 1e-4, f"spread {bal:.1e} (< 1e-4)"))

    o = t_orders()
    out.append(CheckResult("order in dT", min(o) >= 3.8, "observed " + ", ".join(f"{v:.2f}" for v in o)))
    o = z_orders()
    out.append(CheckResult("order in dZ", min(o) >= 1.8, "observed " + ", ".join(f"{v:.2f}" for v in o)))
    lr = lax_residuals()
    ok = all(b < 0.5 * a for a, b in zip(lr, lr[1:]))
    out.append(CheckResult("lax residual", ok, " -> ".join(f"{v:.1e}" for v in lr)))
    return out
