"""
A lone 2pi pulse crosses an absorbing medium unchanged
======================================================

A sech pulse of area 2pi on the signal transition is absorbed and re-emitted
coherently, so it leaves ten absorption lengths later with the same shape and
area, delayed by one pulse duration per absorption length.
"""
import math

import numpy as np

from lambda_imprint import Grid, MediumSpec, PulseSpec, input_envelope, integrate_medium, pulse_area, shape_correlation

grid = Grid(t_min=-14.0, t_max=34.0, dt=0.02, dz=0.02, z_max=10.0)
medium = MediumSpec(length=10.0, mu_ratio=1.0)

signal = input_envelope(PulseSpec(area=2 * math.pi), grid)
record = integrate_medium(signal, np.zeros_like(signal), medium, grid)

print(f"area in  {pulse_area(record.omega13_in, grid) / math.pi:.5f} pi")
print(f"area out {pulse_area(record.omega13_out, grid) / math.pi:.5f} pi")
print(f"shape correlation {shape_correlation(record.omega13_in, record.omega13_out):.6f}")

delay = grid.t[np.argmax(np.abs(record.omega13_out))] - grid.t[np.argmax(np.abs(record.omega13_in))]
print(f"delay {delay:.2f} tau_a over {medium.length:g} absorption lengths")

# the atoms are left in the ground state once the pulse has gone
print(f"largest residual excitation {record.final_state[:, 2].real.max():.1e}")
