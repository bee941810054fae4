"""Observables extracted from integration records.

An imprint is the pattern left in the ground-state elements after a
storage event.  For the ideal solution rho22 = sech^2(x - x1) while rho12
has two lobes of opposite sign at x1 -/+ 0.88 with a node at x1, so the
location is read off the rho22 peak.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import R11, R12, R22, FieldRecord
from .errors import ZeroInput
from .pulses import pulse_area

DETECTION_THRESHOLD = 0.01


@dataclass
class ImprintSnapshot:
    z_axis: np.ndarray
    rho11: np.ndarray
    rho22: np.ndarray
    rho12: np.ndarray
    snapshot_time: float

    def __post_init__(self):
        n = len(self.z_axis)
        if not (len(self.rho11) == len(self.rho22) == len(self.rho12) == n):
            raise ValueError("imprint profiles must match the z axis length")
        if np.any(np.asarray(self.rho11) + np.asarray(self.rho22) > 1.0 + 1e-6):
            raise ValueError("ground populations exceed unity")

    @classmethod
    def from_record(cls, record: FieldRecord, time: float) -> "ImprintSnapshot":
        states = record.snapshots[time]
        return cls(record.z, states[:, R11].real.copy(), states[:, R22].real.copy(),
                   states[:, R12].copy(), float(time))


@dataclass(frozen=True)
class ImprintCharacter:
    center: float
    width_fwhm: float
    peak_coherence: float
    phase_sign: int


def _parabolic_peak(y: np.ndarray, j: int) -> float:
    a, b, c = y[j - 1], y[j], y[j + 1]
    den = a - 2.0 * b + c
    if den == 0.0:
        return 0.0
    return 0.5 * (a - c) / den


def _fwhm(x: np.ndarray, y: np.ndarray, j: int) -> float:
    half = 0.5 * y[j]
    lo = j
    while lo > 0 and y[lo - 1] >= half:
        lo -= 1
    hi = j
    while hi < len(y) - 1 and y[hi + 1] >= half:
        hi += 1
    left = x[lo]
    if lo > 0:
        left = x[lo - 1] + (half - y[lo - 1]) / (y[lo] - y[lo - 1]) * (x[lo] - x[lo - 1])
    right = x[hi]
    if hi < len(y) - 1:
        right = x[hi] + (y[hi] - half) / (y[hi] - y[hi + 1]) * (x[hi + 1] - x[hi])
    return float(right - left)


def characterize_imprint(snapshot: ImprintSnapshot,
                         detection_threshold: float = DETECTION_THRESHOLD) -> ImprintCharacter | None:
    """Locate and describe the imprint, or return None if there is none.

    None means either no ground-state coherence above the threshold or a
    rho22 peak sitting on a face of the medium (imprint pushed outside).
    """
    z = np.asarray(snapshot.z_axis, dtype=float)
    coh = np.abs(snapshot.rho12)
    if coh.size < 3 or coh.max() < detection_threshold:
        return None
    r22 = np.asarray(snapshot.rho22, dtype=float)
    j = int(np.argmax(r22))
    if j == 0 or j == len(z) - 1:
        return None
    dz = z[1] - z[0]
    center = float(z[j] + _parabolic_peak(r22, j) * dz)
    k = int(np.argmax(coh))
    sign = 1 if snapshot.rho12[k].real >= 0 else -1
    if z[k] > center:
        sign = -sign
    return ImprintCharacter(center, _fwhm(z, r22, j), float(coh[k]), sign)


def displacement(before: ImprintCharacter, after: ImprintCharacter) -> float:
    return after.center - before.center


def predicted_displacement(tau_a: float, tau_b: float) -> float:
    """Phase-lag displacement ln|(tau_a + tau_b)/(tau_a - tau_b)|; inf when equal."""
    if tau_a == tau_b:
        return math.inf
    return math.log(abs((tau_a + tau_b) / (tau_a - tau_b)))


def duration_for_displacement(delta: float, tau_a: float = 1.0, longer: bool = False) -> float:
    """Second-control duration giving displacement ``delta`` (shorter branch by default)."""
    x = math.tanh(0.5 * delta)
    return tau_a / x if longer else tau_a * x


def phase_flip(before: ImprintCharacter, after: ImprintCharacter) -> bool:
    return before.phase_sign * after.phase_sign == -1


def _dt(t_or_dt) -> float:
    return float(getattr(t_or_dt, "dt", t_or_dt))


def retrieval_efficiency(omega_in, omega_out, t_or_dt) -> float:
    """Ratio of output to input signal energy, trapezoidal in T."""
    dt = _dt(t_or_dt)
    e_in = np.trapezoid(np.abs(omega_in) ** 2, dx=dt)
    if e_in == 0:
        raise ZeroInput("input signal has zero intensity")
    return float(np.trapezoid(np.abs(omega_out) ** 2, dx=dt) / e_in)


def _shift(a: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros_like(a)
    if k > 0:
        out[:-k] = a[k:]
    elif k < 0:
        out[-k:] = a[:k]
    else:
        out[:] = a
    return out


def shape_correlation(omega_in, omega_out, support: float = 1e-3) -> float:
    """Pearson r between input and peak-aligned output envelope magnitudes.

    Only nodes where either profile exceeds ``support`` times its peak are
    used, so the value does not depend on how much empty window surrounds
    the pulses.
    """
    ia = np.abs(np.asarray(omega_in))
    ib = np.abs(np.asarray(omega_out))
    if ia.max() == 0 or ib.max() == 0:
        raise ZeroInput("correlation needs two non-zero envelopes")
    ib = _shift(ib, int(np.argmax(ib)) - int(np.argmax(ia)))
    mask = (ia > support * ia.max()) | (ib > support * ib.max())
    return float(np.corrcoef(ia[mask], ib[mask])[0, 1])


@dataclass
class AreaTable:
    z: np.ndarray
    theta13: np.ndarray
    theta23: np.ndarray

    @property
    def theta_tot(self) -> np.ndarray:
        return np.hypot(self.theta13, self.theta23)


def area_evolution(record: FieldRecord, window: tuple[float, float] | None = None) -> AreaTable:
    """Per-slice pulse areas, optionally restricted to a T window."""
    if record.omega13 is None:
        raise ValueError("area evolution needs a record with retained fields")
    sl = slice(None)
    if window is not None:
        t = record.t
        idx = np.nonzero((t >= window[0]) & (t <= window[1]))[0]
        sl = slice(idx[0], idx[-1] + 1)
    dt = record.grid.dt
    th13 = np.array([pulse_area(row[sl], dt) for row in record.omega13])
    th23 = np.array([pulse_area(row[sl], dt) for row in record.omega23])
    return AreaTable(record.z, th13, th23)


__all__ = [
    "AreaTable", "ImprintCharacter", "ImprintSnapshot", "area_evolution",
    "characterize_imprint", "displacement", "duration_for_displacement",
    "phase_flip", "predicted_displacement", "retrieval_efficiency",
    "shape_correlation",
]
