"""Input envelopes, truncation, pulse areas and matched input pairs."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import WindowTooNarrow

TRUNCATION_THRESHOLD = 1e-5
TWO_PI = 2.0 * math.pi


class Shape(str, Enum):
    SECH = "sech"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class PulseSpec:
    """One input envelope: shape, area (rad), duration and center (tau_a), phase (rad)."""

    shape: Shape = Shape.SECH
    area: float = TWO_PI
    duration: float = 1.0
    center: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        if not self.duration > 0:
            raise ValueError(f"pulse duration must be positive, got {self.duration}")
        if not self.area >= 0:
            raise ValueError(f"pulse area must be non-negative, got {self.area}")

    def shifted(self, center: float) -> "PulseSpec":
        return replace(self, center=center)

    def peak(self) -> float:
        if self.shape is Shape.SECH:
            return self.area / (math.pi * self.duration)
        return self.area / (math.sqrt(2.0 * math.pi) * self.duration)

    def support(self, threshold: float = TRUNCATION_THRESHOLD) -> float:
        """Half-width beyond which the envelope magnitude is below ``threshold``."""
        peak = self.peak()
        if threshold <= 0:
            return math.inf
        if peak <= threshold:
            return 0.0
        ratio = peak / threshold
        if self.shape is Shape.SECH:
            return self.duration * math.acosh(ratio)
        return self.duration * math.sqrt(2.0 * math.log(ratio))


@dataclass(frozen=True)
class InputPair:
    """Signal (1-3 transition) and control (2-3 transition) pulses."""

    signal: PulseSpec
    control: PulseSpec

    @property
    def time_matched(self) -> bool:
        return (self.signal.duration == self.control.duration
                and self.signal.center == self.control.center)

    def shifted(self, center: float) -> "InputPair":
        return InputPair(self.signal.shifted(center), self.control.shifted(center))


def _times(t_or_grid) -> np.ndarray:
    return np.asarray(getattr(t_or_grid, "t", t_or_grid), dtype=float)


def _raw_envelope(spec: PulseSpec, t: np.ndarray) -> np.ndarray:
    x = (t - spec.center) / spec.duration
    if spec.shape is Shape.SECH:
        # exp form avoids overflow of cosh for far tails
        ax = np.abs(x)
        shape = 2.0 * np.exp(-ax) / (1.0 + np.exp(-2.0 * ax))
    else:
        shape = np.exp(-0.5 * x * x)
    return spec.peak() * shape * np.exp(1j * spec.phase)


def make_envelope(spec: PulseSpec, t_or_grid, threshold: float = TRUNCATION_THRESHOLD) -> np.ndarray:
    """Sample the envelope of ``spec`` on the grid times.

    Raises :class:`WindowTooNarrow` if either end of the window still
    carries an envelope at or above ``threshold``.  The samples are not
    truncated; see :func:`truncate_envelope`.
    """
    t = _times(t_or_grid)
    env = _raw_envelope(spec, t)
    if threshold > 0 and spec.area > 0:
        edge = max(abs(env[0]), abs(env[-1]))
        if edge >= threshold:
            raise WindowTooNarrow(
                f"{spec.shape.value} pulse centred at {spec.center} has |Omega|={edge:.2e} "
                f"at the window edge, above threshold {threshold:g}")
    return env


def truncate_envelope(samples, threshold: float = TRUNCATION_THRESHOLD) -> np.ndarray:
    """Zero every sample whose magnitude is below ``threshold``."""
    out = np.array(samples, dtype=complex, copy=True)
    out[np.abs(out) < threshold] = 0.0
    return out


def input_envelope(spec: PulseSpec, t_or_grid, threshold: float = TRUNCATION_THRESHOLD) -> np.ndarray:
    return truncate_envelope(make_envelope(spec, t_or_grid, threshold), threshold)


def _signed(samples: np.ndarray) -> np.ndarray:
    samples = np.asarray(samples)
    if not np.iscomplexobj(samples):
        return samples.astype(float)
    mag = np.abs(samples)
    peak = mag.max() if mag.size else 0.0
    if peak == 0.0:
        return np.zeros(samples.shape)
    if np.abs(samples.imag).max() <= 1e-9 * peak:
        return samples.real
    phase = np.angle(samples.flat[np.argmax(mag)])
    return mag * np.sign(math.cos(phase) or 1.0)


def _step(t_or_dt) -> float:
    return float(getattr(t_or_dt, "dt", t_or_dt))


def pulse_area(samples, t_or_dt) -> float:
    """Trapezoidal area of a (real up to sign) envelope over the whole window."""
    return float(np.trapezoid(_signed(samples), dx=_step(t_or_dt)))


def cumulative_area(samples, t_or_dt) -> np.ndarray:
    """Running area theta(T) = integral of Omega from the window start to T."""
    f = _signed(samples)
    dt = _step(t_or_dt)
    out = np.zeros(f.shape[-1])
    out[1:] = np.cumsum(0.5 * dt * (f[1:] + f[:-1]))
    return out


def total_area(theta13: float, theta23: float) -> float:
    return math.hypot(theta13, theta23)


def imprint_location(theta13: float, theta23: float) -> float:
    """Predicted imprint location (absorption lengths) from the input areas."""
    return math.log(theta13 / theta23)


def matched_input_for_target(x1_target: float, theta_tot: float = TWO_PI,
                             duration: float = 1.0, center: float = 0.0,
                             shape: Shape = Shape.SECH) -> InputPair:
    """Time-matched pair with area ratio exp(x1_target) and total area ``theta_tot``."""
    if not theta_tot > 0:
        raise ValueError("theta_tot must be positive")
    # theta13 = theta_tot / sqrt(1 + e^{-2x}), written to stay finite for large |x|
    x = float(x1_target)
    if x >= 0:
        theta13 = theta_tot / math.sqrt(1.0 + math.exp(-2.0 * x))
        theta23 = theta13 * math.exp(-x)
    else:
        theta23 = theta_tot / math.sqrt(1.0 + math.exp(2.0 * x))
        theta13 = theta23 * math.exp(x)
    return InputPair(PulseSpec(shape, theta13, duration, center),
                     PulseSpec(shape, theta23, duration, center))


def signal_fixed_input(x1_target: float, theta13: float = TWO_PI, duration: float = 1.0,
                       center: float = 0.0, shape: Shape = Shape.SECH,
                       control_duration: float | None = None) -> InputPair:
    """Pair with the signal area held at ``theta13`` and the control set by the ratio rule."""
    theta23 = theta13 * math.exp(-x1_target)
    return InputPair(PulseSpec(shape, theta13, duration, center),
                     PulseSpec(shape, theta23, control_duration or duration, center))
