"""Decay-modified Maxwell-Bloch integration for a Lambda medium.

Everything is dimensionless: time in units of the signal duration tau_a,
distance in absorption lengths 1/kappa_a, Rabi frequencies in 1/tau_a.
With kappa_a = mu13 * tau_a / 2 this fixes mu13 = 2.

The atomic state at one point is a vector of six complex numbers,
``(rho11, rho22, rho33, rho12, rho13, rho23)``; the lower triangle is
implied by Hermiticity.  The Bloch equations are marched in T with RK4
and the fields in Z with a Heun predictor-corrector.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import GridTooCoarse, NonFiniteState

COMPONENTS = ("rho11", "rho22", "rho33", "rho12", "rho13", "rho23")
R11, R22, R33, R12, R13, R23 = range(6)

MU13 = 2.0
MU_RATIO_RB = 0.99998
TRACE_ADVISORY = 1e-6


@dataclass(frozen=True)
class DensityMatrix:
    """Three-level density matrix stored as its upper triangle."""

    rho11: float = 1.0
    rho22: float = 0.0
    rho33: float = 0.0
    rho12: complex = 0j
    rho13: complex = 0j
    rho23: complex = 0j

    @classmethod
    def ground(cls) -> "DensityMatrix":
        return cls()

    @classmethod
    def from_vector(cls, y) -> "DensityMatrix":
        y = np.asarray(y)
        return cls(float(y[0].real), float(y[1].real), float(y[2].real),
                   complex(y[3]), complex(y[4]), complex(y[5]))

    @classmethod
    def from_matrix(cls, m) -> "DensityMatrix":
        m = np.asarray(m)
        return cls(float(m[0, 0].real), float(m[1, 1].real), float(m[2, 2].real),
                   complex(m[0, 1]), complex(m[0, 2]), complex(m[1, 2]))

    @classmethod
    def pure(cls, amplitudes) -> "DensityMatrix":
        psi = np.asarray(amplitudes, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls.from_matrix(np.outer(psi, psi.conj()))

    def vector(self) -> np.ndarray:
        return np.array([self.rho11, self.rho22, self.rho33,
                         self.rho12, self.rho13, self.rho23], dtype=complex)

    def matrix(self) -> np.ndarray:
        return np.array([
            [self.rho11, self.rho12, self.rho13],
            [np.conj(self.rho12), self.rho22, self.rho23],
            [np.conj(self.rho13), np.conj(self.rho23), self.rho33],
        ], dtype=complex)

    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33

    def purity(self) -> float:
        m = self.matrix()
        return float(np.real(np.trace(m @ m)))


@dataclass(frozen=True)
class MediumSpec:
    """Homogeneous Lambda medium.

    ``length`` is in absorption lengths, ``mu_ratio`` is mu23/mu13,
    ``gamma3_tau`` and ``delta_tau`` are Gamma3*tau_a and Delta*tau_a.
    """

    length: float = 10.0
    mu_ratio: float = MU_RATIO_RB
    gamma3_tau: float = 0.0
    delta_tau: float = 0.0

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"medium length must be positive, got {self.length}")
        if not self.mu_ratio > 0:
            raise ValueError(f"mu_ratio must be positive, got {self.mu_ratio}")
        if not self.gamma3_tau >= 0:
            raise ValueError(f"gamma3_tau must be non-negative, got {self.gamma3_tau}")

    @property
    def mu13(self) -> float:
        return MU13

    @property
    def mu23(self) -> float:
        return MU13 * self.mu_ratio


def _count(span: float, step: float, what: str) -> int:
    n = round(span / step)
    if n < 1 or abs(n * step - span) > 1e-9 * max(1.0, abs(span)):
        raise ValueError(f"{what} range {span} is not a whole number of steps {step}")
    return n + 1


@dataclass(frozen=True)
class Grid:
    """Uniform (Z, T) grid; Z runs over [0, z_max]."""

    t_min: float
    t_max: float
    dt: float = 0.02
    dz: float = 0.02
    z_max: float = 10.0

    def __post_init__(self):
        if not (self.dt > 0 and self.dz > 0):
            raise ValueError("grid steps must be positive")
        if not self.t_max > self.t_min:
            raise ValueError("empty time range")
        _count(self.t_max - self.t_min, self.dt, "T")
        _count(self.z_max, self.dz, "Z")

    @property
    def n_t(self) -> int:
        return _count(self.t_max - self.t_min, self.dt, "T")

    @property
    def n_z(self) -> int:
        return _count(self.z_max, self.dz, "Z")

    @property
    def t(self) -> np.ndarray:
        return self.t_min + self.dt * np.arange(self.n_t)

    @property
    def z(self) -> np.ndarray:
        return self.dz * np.arange(self.n_z)

    def t_index(self, t: float) -> int:
        """Index of the node nearest to time ``t``."""
        i = int(round((t - self.t_min) / self.dt))
        if not 0 <= i < self.n_t:
            raise ValueError(f"time {t} outside grid [{self.t_min}, {self.t_max}]")
        return i

    def refined(self, factor: int = 2, *, t: bool = True, z: bool = True) -> "Grid":
        return Grid(self.t_min, self.t_max,
                    self.dt / factor if t else self.dt,
                    self.dz / factor if z else self.dz, self.z_max)


# --------------------------------------------------------------------------
# numba kernels


@numba.njit(cache=True, inline="always")
def _rhs(r11, r22, r33, r12, r13, r23, o13, o23, gamma, delta):
    c13 = o13.conjugate()
    c23 = o23.conjugate()
    r31 = r13.conjugate()
    r32 = r23.conjugate()
    r21 = r12.conjugate()
    flow1 = 0.5j * (c13 * r31 - o13 * r13)
    flow2 = 0.5j * (c23 * r32 - o23 * r23)
    d11 = flow1 + 0.5 * gamma * r33
    d22 = flow2 + 0.5 * gamma * r33
    d33 = -flow1 - flow2 - gamma * r33
    d12 = 0.5j * (c13 * r32 - o23 * r13)
    d13 = (1j * delta - 0.5 * gamma) * r13 - 0.5j * c23 * r12 + 0.5j * c13 * (r33 - r11)
    d23 = (1j * delta - 0.5 * gamma) * r23 - 0.5j * c13 * r21 + 0.5j * c23 * (r33 - r22)
    return d11, d22, d33, d12, d13, d23


@numba.njit(cache=True)
def _rhs_vector(y, o13, o23, gamma, delta):
    d = _rhs(y[0], y[1], y[2], y[3], y[4], y[5], o13, o23, gamma, delta)
    out = np.empty(6, dtype=np.complex128)
    for k in range(6):
        out[k] = d[k]
    return out


@numba.njit(cache=True)
def _march_slice(o13, o23, m13, m23, y0, dt, gamma, delta,
                 rho31, rho32, snap_idx, snaps, traj):
    """RK4 over one Z slice.

    ``m13``/``m23`` are envelope values at the half steps.  Fills ``rho31``,
    ``rho32`` (polarisations at every node), ``snaps`` (state at the nodes in
    ``snap_idx``) and, when it has rows, ``traj`` (state at every node).
    Returns (final state, max trace drift, max purity drift, max
    Cauchy-Schwarz excess, finite flag).
    """
    n = o13.shape[0]
    keep = traj.shape[0] > 0
    r11, r22, r33, r12, r13, r23 = y0[0], y0[1], y0[2], y0[3], y0[4], y0[5]
    p0 = (abs(r11) ** 2 + abs(r22) ** 2 + abs(r33) ** 2
          + 2.0 * (abs(r12) ** 2 + abs(r13) ** 2 + abs(r23) ** 2))
    tr_drift = 0.0
    pur_drift = 0.0
    cs_excess = -1.0
    finite = True
    s = 0
    h = dt
    for i in range(n):
        rho31[i] = r13.conjugate()
        rho32[i] = r23.conjugate()
        while s < snap_idx.shape[0] and snap_idx[s] == i:
            snaps[s, 0] = r11
            snaps[s, 1] = r22
            snaps[s, 2] = r33
            snaps[s, 3] = r12
            snaps[s, 4] = r13
            snaps[s, 5] = r23
            s += 1
        if keep:
            traj[i, 0] = r11
            traj[i, 1] = r22
            traj[i, 2] = r33
            traj[i, 3] = r12
            traj[i, 4] = r13
            traj[i, 5] = r23
        p11 = r11.real
        p22 = r22.real
        p33 = r33.real
        tr = abs(p11 + p22 + p33 - 1.0)
        if tr > tr_drift:
            tr_drift = tr
        a12 = abs(r12) ** 2
        a13 = abs(r13) ** 2
        a23 = abs(r23) ** 2
        pur = abs(p11 * p11 + p22 * p22 + p33 * p33 + 2.0 * (a12 + a13 + a23) - p0)
        if pur > pur_drift:
            pur_drift = pur
        cs = max(a12 - p11 * p22, a13 - p11 * p33, a23 - p22 * p33)
        if cs > cs_excess:
            cs_excess = cs
        if not (math.isfinite(tr) and math.isfinite(pur)):
            finite = False
            break
        if i == n - 1:
            break
        a13_, a23_ = o13[i], o23[i]
        b13_, b23_ = m13[i], m23[i]
        c13_, c23_ = o13[i + 1], o23[i + 1]
        k1 = _rhs(r11, r22, r33, r12, r13, r23, a13_, a23_, gamma, delta)
        k2 = _rhs(r11 + 0.5 * h * k1[0], r22 + 0.5 * h * k1[1], r33 + 0.5 * h * k1[2],
                  r12 + 0.5 * h * k1[3], r13 + 0.5 * h * k1[4], r23 + 0.5 * h * k1[5],
                  b13_, b23_, gamma, delta)
        k3 = _rhs(r11 + 0.5 * h * k2[0], r22 + 0.5 * h * k2[1], r33 + 0.5 * h * k2[2],
                  r12 + 0.5 * h * k2[3], r13 + 0.5 * h * k2[4], r23 + 0.5 * h * k2[5],
                  b13_, b23_, gamma, delta)
        k4 = _rhs(r11 + h * k3[0], r22 + h * k3[1], r33 + h * k3[2],
                  r12 + h * k3[3], r13 + h * k3[4], r23 + h * k3[5],
                  c13_, c23_, gamma, delta)
        w = h / 6.0
        r11 = r11 + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        r22 = r22 + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        r33 = r33 + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        r12 = r12 + w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        r13 = r13 + w * (k1[4] + 2.0 * k2[4] + 2.0 * k3[4] + k4[4])
        r23 = r23 + w * (k1[5] + 2.0 * k2[5] + 2.0 * k3[5] + k4[5])
    final = np.empty(6, dtype=np.complex128)
    final[0] = r11
    final[1] = r22
    final[2] = r33
    final[3] = r12
    final[4] = r13
    final[5] = r23
    return final, tr_drift, pur_drift, cs_excess, finite


# --------------------------------------------------------------------------


def midpoint_values(samples: np.ndarray) -> np.ndarray:
    """Envelope at the half steps from 4-point Lagrange interpolation.

    Interior intervals use the centred stencil; the first and last use the
    one-sided cubic so that every half-step value is O(dT^4) accurate.
    """
    f = np.asarray(samples, dtype=complex)
    n = f.shape[0]
    if n < 4:
        return 0.5 * (f[1:] + f[:-1])
    mid = np.empty(n - 1, dtype=complex)
    mid[1:-1] = (-f[:-3] + 9.0 * f[1:-2] + 9.0 * f[2:-1] - f[3:]) / 16.0
    mid[0] = (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0
    mid[-1] = (f[-4] - 5.0 * f[-3] + 15.0 * f[-2] + 5.0 * f[-1]) / 16.0
    return mid


def bloch_derivative(rho: DensityMatrix, omega13: complex, omega23: complex,
                     medium: MediumSpec) -> DensityMatrix:
    """Time derivative of the atomic state for fixed field values."""
    d = _rhs_vector(rho.vector(), complex(omega13), complex(omega23),
                    float(medium.gamma3_tau), float(medium.delta_tau))
    return DensityMatrix(d[0].real, d[1].real, d[2].real, d[3], d[4], d[5])


@dataclass
class SliceResult:
    rho31: np.ndarray
    rho32: np.ndarray
    final: np.ndarray
    snapshots: np.ndarray
    trajectory: np.ndarray
    trace_drift: float
    purity_drift: float
    cs_excess: float


def _slice(o13, o23, y0, grid, medium, snap_idx, keep_traj) -> SliceResult:
    n = o13.shape[0]
    rho31 = np.empty(n, dtype=complex)
    rho32 = np.empty(n, dtype=complex)
    snaps = np.zeros((len(snap_idx), 6), dtype=complex)
    traj = np.empty((n if keep_traj else 0, 6), dtype=complex)
    final, tr, pur, cs, finite = _march_slice(
        o13, o23, midpoint_values(o13), midpoint_values(o23), y0,
        float(grid.dt), float(medium.gamma3_tau), float(medium.delta_tau),
        rho31, rho32, snap_idx, snaps, traj)
    if not finite:
        raise NonFiniteState("density matrix became non-finite; reduce dT")
    return SliceResult(rho31, rho32, final, snaps, traj, tr, pur, cs)


def advance_bloch_slice(rho_init: DensityMatrix, omega13, omega23,
                        medium: MediumSpec, grid: Grid) -> np.ndarray:
    """Integrate the Bloch equations over the T grid at one fixed Z.

    Returns the state at every T node as an ``(n_t, 6)`` complex array with
    columns ordered as :data:`COMPONENTS`.
    """
    o13 = _as_envelope(omega13, grid)
    o23 = _as_envelope(omega23, grid)
    res = _slice(o13, o23, rho_init.vector(), grid, medium,
                 np.zeros(0, dtype=np.int64), True)
    return res.trajectory


def advance_field_step(rho31, rho32, omega13, omega23, medium: MediumSpec, dz: float,
                       rho31_next=None, rho32_next=None):
    """Advance both envelopes by ``dz`` through the field equations.

    With only the polarisations at Z this is the explicit Euler step; if the
    polarisations at Z + dz are given as well the trapezoidal rule is used.
    """
    p31 = np.asarray(rho31)
    p32 = np.asarray(rho32)
    if rho31_next is not None:
        p31 = 0.5 * (p31 + np.asarray(rho31_next))
    if rho32_next is not None:
        p32 = 0.5 * (p32 + np.asarray(rho32_next))
    o13 = np.asarray(omega13) + 1j * medium.mu13 * dz * p31
    o23 = np.asarray(omega23) + 1j * medium.mu23 * dz * p32
    return o13, o23


def _as_envelope(values, grid: Grid) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.ndim == 0:
        arr = np.full(grid.n_t, complex(arr))
    if arr.shape != (grid.n_t,):
        raise ValueError(f"envelope has shape {arr.shape}, grid needs ({grid.n_t},)")
    return np.ascontiguousarray(arr)


RETAIN_CHOICES = ("boundary", "fields", "full")


@dataclass
class FieldRecord:
    """Output of :func:`integrate_medium`.

    ``omega13``/``omega23`` hold the full (Z, T) envelopes only when fields
    were retained; ``rho`` holds the full (Z, T, 6) state only for
    ``retain="full"``.  ``snapshots`` maps each requested time to a (Z, 6)
    array of the state there; ``final_state`` is the state at T_max.
    """

    grid: Grid
    medium: MediumSpec
    omega13_in: np.ndarray
    omega23_in: np.ndarray
    omega13_out: np.ndarray
    omega23_out: np.ndarray
    final_state: np.ndarray
    snapshots: dict = field(default_factory=dict)
    omega13: np.ndarray | None = None
    omega23: np.ndarray | None = None
    rho: np.ndarray | None = None
    trace_drift: float = 0.0
    purity_drift: float = 0.0
    cs_excess: float = 0.0

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    @property
    def z(self) -> np.ndarray:
        return self.grid.z

    @property
    def rho31(self) -> np.ndarray | None:
        return None if self.rho is None else self.rho[..., R13].conj()

    @property
    def rho32(self) -> np.ndarray | None:
        return None if self.rho is None else self.rho[..., R23].conj()


def integrate_medium(omega13_in, omega23_in, medium: MediumSpec, grid: Grid,
                     snapshot_times=(), retain: str = "boundary") -> FieldRecord:
    """March the coupled Maxwell-Bloch system through the whole medium.

    Every slice starts in |1><1| at ``grid.t_min``.  Each Z step runs the
    Bloch march at the current slice, predicts the next envelope with an
    Euler step, re-runs the Bloch march with the prediction and corrects
    with the trapezoidal average of the two polarisations.
    """
    if retain not in RETAIN_CHOICES:
        raise ValueError(f"retain must be one of {RETAIN_CHOICES}, got {retain!r}")
    if abs(grid.z_max - medium.length) > 1e-12 * medium.length:
        raise ValueError(f"grid z_max {grid.z_max} differs from medium length {medium.length}")
    o13 = _as_envelope(omega13_in, grid).copy()
    o23 = _as_envelope(omega23_in, grid).copy()
    times = [float(t) for t in snapshot_times]
    snap_idx = np.unique(np.array([grid.t_index(t) for t in times], dtype=np.int64))

    n_z, n_t = grid.n_z, grid.n_t
    y0 = DensityMatrix.ground().vector()
    snaps = np.zeros((len(snap_idx), n_z, 6), dtype=complex)
    final = np.zeros((n_z, 6), dtype=complex)
    keep_fields = retain in ("fields", "full")
    keep_rho = retain == "full"
    f13 = np.zeros((n_z, n_t), dtype=complex) if keep_fields else None
    f23 = np.zeros((n_z, n_t), dtype=complex) if keep_fields else None
    rho = np.zeros((n_z, n_t, 6), dtype=complex) if keep_rho else None
    drift = [0.0, 0.0, -1.0]

    def run(a13, a23, j=None):
        res = _slice(a13, a23, y0, grid, medium, snap_idx, keep_rho and j is not None)
        drift[0] = max(drift[0], res.trace_drift)
        drift[1] = max(drift[1], res.purity_drift)
        drift[2] = max(drift[2], res.cs_excess)
        if j is not None:
            snaps[:, j, :] = res.snapshots
            final[j] = res.final
            if keep_fields:
                f13[j] = a13
                f23[j] = a23
            if keep_rho:
                rho[j] = res.trajectory
        return res

    dz = grid.dz
    cur = run(o13, o23, 0)
    in13, in23 = o13.copy(), o23.copy()
    for j in range(n_z - 1):
        p13, p23 = advance_field_step(cur.rho31, cur.rho32, o13, o23, medium, dz)
        pred = run(p13, p23)
        o13, o23 = advance_field_step(cur.rho31, cur.rho32, o13, o23, medium, dz,
                                      pred.rho31, pred.rho32)
        cur = run(o13, o23, j + 1)

    if drift[0] > TRACE_ADVISORY:
        warnings.warn(GridTooCoarse(f"trace drift {drift[0]:.2e} exceeds {TRACE_ADVISORY:g}"),
                      stacklevel=2)
    snapshots = {t: snaps[np.searchsorted(snap_idx, grid.t_index(t))] for t in times}
    return FieldRecord(grid, medium, in13, in23, o13.copy(), o23.copy(), final,
                       snapshots, f13, f23, rho, drift[0], drift[1], max(drift[2], 0.0))
