"""
Writing an imprint
==================

A 2pi signal pulse enters together with a weak control pulse.  Their area
ratio sets where the signal hands its area over to the control: the signal is
gone beyond kappa_a x1 = ln(theta13 / theta23), and the ground-state
coherence it leaves behind is the imprint.
"""
import math

import numpy as np

from lambda_imprint import Case, characterize_imprint, run_storage, storage_config

config = storage_config(Case.SECH_IDEAL, 3.0, retain="fields")
pair = config.sequence[0]
print(f"signal {pair.signal.area / math.pi:.3f} pi, control {pair.control.area / math.pi:.4f} pi")

result = run_storage(config)
imprint = result.first
print(f"imprint center {imprint.center:.3f}, FWHM {imprint.width_fwhm:.3f}, max |rho12| {imprint.peak_coherence:.3f}")
print(f"control leaves with {result.output_areas[1] / math.pi:.4f} pi")

# %%
# Areas slice by slice: the signal area drains into the control while their
# quadrature sum stays at 2pi.
areas = result.areas
for k in range(0, len(areas.z), 50):
    print(f"  x = {areas.z[k]:4.1f}   theta13 = {areas.theta13[k] / math.pi:6.3f} pi   "
          f"theta23 = {areas.theta23[k] / math.pi:6.3f} pi   total = {areas.theta_tot[k] / math.pi:6.3f} pi")

# %%
# The profile itself.  rho22 peaks at x1; rho12 changes sign there.
snap = result.snapshots[0]
for x in np.arange(0.0, 7.0, 0.5):
    j = int(round(x / config.dz))
    print(f"  x = {x:3.1f}   rho22 = {snap.rho22[j]:.3f}   Re rho12 = {snap.rho12[j].real:+.3f}")

# %%
# Gaussian pulses write a wider imprint, and further in for the same areas.
gauss = run_storage(storage_config(Case.GAUSSIAN_IDEAL, 3.0, calibrate=False)).first
print(f"gaussian: center {gauss.center:.3f}, FWHM {gauss.width_fwhm:.3f}")
