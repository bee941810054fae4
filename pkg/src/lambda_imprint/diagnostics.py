"""Consistency diagnostics for integration records.

None of these are used to produce the solution; they check it.
"""
from __future__ import annotations

import math

import numpy as np

from .dynamics import R33, FieldRecord


def _fields_and_state(record: FieldRecord):
    if record.omega13 is None or record.rho is None:
        raise ValueError("diagnostic needs a record integrated with retain='full'")
    return record.omega13, record.omega23, record.rho


def _density_matrices(rho: np.ndarray) -> np.ndarray:
    m = np.empty(rho.shape[:-1] + (3, 3), dtype=complex)
    m[..., 0, 0] = rho[..., 0]
    m[..., 1, 1] = rho[..., 1]
    m[..., 2, 2] = rho[..., 2]
    m[..., 0, 1] = rho[..., 3]
    m[..., 0, 2] = rho[..., 4]
    m[..., 1, 2] = rho[..., 5]
    m[..., 1, 0] = rho[..., 3].conj()
    m[..., 2, 0] = rho[..., 4].conj()
    m[..., 2, 1] = rho[..., 5].conj()
    return m


def lax_residual(record: FieldRecord, spectral: complex = 1.0 + 0.5j) -> float:
    """Largest Frobenius norm of d_Z U - d_T V + [U, V] over interior nodes.

    U = (i/2) M - lambda W and V = (i mu / 2 lambda) rho, with M the
    field matrix of the RWA Hamiltonian (H = -hbar M / 2) and W = i|3><3|.
    Derivatives are central differences on the grid.  Only meaningful for
    Gamma3 = 0 and mu23 = mu13.
    """
    o13, o23, rho = _fields_and_state(record)
    medium, grid = record.medium, record.grid
    lam = complex(spectral)
    mu = medium.mu13
    n_z, n_t = o13.shape
    M = np.zeros((n_z, n_t, 3, 3), dtype=complex)
    M[..., 0, 2] = o13.conj()
    M[..., 1, 2] = o23.conj()
    M[..., 2, 0] = o13
    M[..., 2, 1] = o23
    M[..., 2, 2] = -2.0 * medium.delta_tau
    W = np.zeros((3, 3), dtype=complex)
    W[2, 2] = 1j
    U = 0.5j * M - lam * W
    V = (0.5j * mu / lam) * _density_matrices(rho)
    dUz = (U[2:, 1:-1] - U[:-2, 1:-1]) / (2.0 * grid.dz)
    dVt = (V[1:-1, 2:] - V[1:-1, :-2]) / (2.0 * grid.dt)
    Uc = U[1:-1, 1:-1]
    Vc = V[1:-1, 1:-1]
    res = dUz - dVt + Uc @ Vc - Vc @ Uc
    return float(np.sqrt((np.abs(res) ** 2).sum(axis=(-2, -1))).max())


def excitation_balance(record: FieldRecord) -> np.ndarray:
    """Field energy plus excitation left behind, per slice (Gamma3 = 0).

    Q(Z) = integral(|O13|^2/2mu13 + |O23|^2/2mu23) dT + integral_0^Z rho33(T_max) dZ'
    is independent of Z for the exact solution.
    """
    if record.omega13 is None:
        raise ValueError("excitation balance needs retained fields")
    m = record.medium
    dt, dz = record.grid.dt, record.grid.dz
    energy = (np.trapezoid(np.abs(record.omega13) ** 2, dx=dt, axis=1) / (2.0 * m.mu13)
              + np.trapezoid(np.abs(record.omega23) ** 2, dx=dt, axis=1) / (2.0 * m.mu23))
    left = record.final_state[:, R33].real
    stored = np.zeros_like(energy)
    stored[1:] = np.cumsum(0.5 * dz * (left[1:] + left[:-1]))
    return energy + stored


def observed_order(errors, factor: float = 2.0) -> list[float]:
    """Observed convergence orders from errors at successively refined steps."""
    e = [float(x) for x in errors]
    return [math.log(a / b, factor) for a, b in zip(e[:-1], e[1:])]


def max_abs_diff_on_common_nodes(coarse: np.ndarray, fine: np.ndarray) -> float:
    """Max |coarse - fine| where ``fine`` is sampled on a grid refined by an integer factor."""
    coarse = np.asarray(coarse)
    fine = np.asarray(fine)
    step = (fine.shape[-1] - 1) // (coarse.shape[-1] - 1)
    if (coarse.shape[-1] - 1) * step != fine.shape[-1] - 1:
        raise ValueError("grids are not nested")
    return float(np.abs(coarse - fine[..., ::step]).max())


__all__ = ["excitation_balance", "lax_residual", "max_abs_diff_on_common_nodes",
           "observed_order"]
