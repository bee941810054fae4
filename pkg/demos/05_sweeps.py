"""
Parameter sweeps and result files
=================================

Any scenario can be swept along one axis.  Rows are independent runs, so they
can go to a process pool; the table comes back in value order either way.
"""
import math
import tempfile

from lambda_imprint import Case, run_sweep, storage_config, with_sweep, write_results
from lambda_imprint.figures import fitted_slope

base = storage_config(Case.SECH_IDEAL, 3.0, calibrate=False)
areas = [2 * math.pi * math.exp(-x) for x in (2.0, 4.0, 6.0, 8.0)]
table = run_sweep(with_sweep(base, "control_area", areas, name="location_vs_control"), workers=2)
print(table.columns)
for row in table.rows:
    print(f"  theta23 = {row[0]:.5f} pi -> x1 = {row[1]:.3f}")

# %%
# Location against total area for a time-matched pair.
from lambda_imprint import matched_storage_config

tt = run_sweep(with_sweep(matched_storage_config(Case.SECH_IDEAL, 5.0), "total_area",
                          [math.pi * a for a in (1.8, 2.0, 2.2)]))
print(f"slope {fitted_slope(tt, 'thetatot_over_pi', 'kappa_x1'):.3f} per pi")

# %%
# Tables are written as CSV next to a manifest holding the config hash.
with tempfile.TemporaryDirectory() as out:
    manifest = write_results(out, [table, tt], config=with_sweep(base, "control_area", areas))
    print(manifest["tables"], manifest["config_hash"][:16])
