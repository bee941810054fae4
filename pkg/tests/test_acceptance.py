"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line; the lines are printed in the
pytest terminal summary, or directly when this file is run as a script.
"""
from __future__ import annotations

import filecmp
import math
import time
from dataclasses import replace

import numpy as np

from lambda_imprint.analysis import predicted_displacement
from lambda_imprint.checks import decay_error, lax_residuals, rabi_error, sit_run, t_orders, z_orders
from lambda_imprint.config import parse_config, serialize_config
from lambda_imprint.figures import (
    FIG4B_AREAS,
    FIG4C_RATIOS,
    FIG5B_AREAS,
    FIG5B_TAU_B,
    FIG5C_LENGTH,
    FIG5C_X1,
    fitted_slope,
    table1,
)
from lambda_imprint.pulses import TWO_PI
from lambda_imprint.results import write_table
from lambda_imprint.scenarios import (
    Case,
    displacement_config,
    matched_storage_config,
    run_displacement,
    run_storage,
    run_sweep,
    storage_config,
    with_sweep,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

# order estimates from finite refinements approach the formal order from below
ORDER_TOLERANCE = 0.1


def report(n: int, title: str, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'}  [{n:2d}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def within(x: float, target: float, rel: float) -> bool:
    return abs(x - target) <= rel * abs(target)


def test_01_sit_sanity():
    t0 = time.perf_counter()
    area, r, delay, _ = sit_run()
    runtime = time.perf_counter() - t0
    ok = within(area, TWO_PI, 0.01) and r >= 0.999 and delay > 0 and runtime < 30
    report(1, "2pi sech transparency", ok,
           f"area {area / math.pi:.5f} pi (2 +/- 1%), r {r:.6f} (>= 0.999), "
           f"delay {delay:.2f} tau_a (> 0), runtime {runtime:.1f} s (< 30)")


def test_02_imprint_location():
    got = {x: run_storage(storage_config(Case.SECH_IDEAL, x)).first.center for x in (2.0, 3.0, 5.0, 8.0)}
    ok = all(abs(c - x) <= 0.1 for x, c in got.items())
    report(2, "imprint location", ok,
           ", ".join(f"{x:g} -> {c:.4f}" for x, c in got.items()) + " (+/- 0.1)")


def test_03_total_area_sensitivity():
    slopes = {}
    for case in (Case.SECH_IDEAL, Case.GAUSSIAN_IDEAL):
        t = run_sweep(with_sweep(matched_storage_config(case, 5.0), "total_area", FIG4B_AREAS))
        slopes[case] = fitted_slope(t, "thetatot_over_pi", "kappa_x1")  # per unit theta/pi
    ok = within(slopes[Case.SECH_IDEAL], 5.0, 0.20) and within(slopes[Case.GAUSSIAN_IDEAL], 6.5, 0.25)
    report(3, "location vs total area", ok,
           f"sech {slopes[Case.SECH_IDEAL]:.3f}/pi (5/pi +/- 20%), "
           f"gaussian {slopes[Case.GAUSSIAN_IDEAL]:.3f}/pi (6.5/pi +/- 25%)")


def test_04_duration_sensitivity():
    slopes = {}
    for case in (Case.SECH_IDEAL, Case.GAUSSIAN_IDEAL):
        t = run_sweep(with_sweep(matched_storage_config(case, 5.0), "duration_ratio", FIG4C_RATIOS))
        slopes[case] = fitted_slope(t, "tau_c_over_tau_s", "kappa_x1")
    ok = within(slopes[Case.SECH_IDEAL], 0.5, 0.20) and within(slopes[Case.GAUSSIAN_IDEAL], 0.73, 0.20)
    report(4, "location vs duration ratio", ok,
           f"sech {slopes[Case.SECH_IDEAL]:.3f} (0.5 +/- 20%), "
           f"gaussian {slopes[Case.GAUSSIAN_IDEAL]:.3f} (0.73 +/- 20%)")


def test_05_displacement_law():
    parts, ok = [], True
    for tb in (0.3, 0.5, 0.7):
        ideal = run_displacement(displacement_config(Case.SECH_IDEAL, 3.0, tau_b=tb))
        decay = run_displacement(displacement_config(Case.SECH_DECAY, 3.0, tau_b=tb))
        d, dd, pred = ideal.displacements[0], decay.displacements[0], predicted_displacement(1.0, tb)
        dev = d / pred - 1.0
        good = abs(dev) <= 0.05 and ideal.phase_flips == [True] and dd < d
        ok &= good
        parts.append(f"tau_b {tb}: delta {d:.4f} vs {pred:.4f} ({100 * dev:+.2f}%), "
                     f"flip {ideal.phase_flips[0]}, decay {dd:.4f}")
    report(5, "displacement law (+/- 5%)", ok, "; ".join(parts))


def _interior_max(table) -> tuple[bool, float]:
    x, y = table.column("theta23b_over_pi"), table.column("delta")
    k = int(np.nanargmax(y))
    return 0 < k < len(y) - 1 and x[k] < 2.0, float(x[k])


def test_06_area_nonmonotone():
    parts, ok = [], True
    for case in Case:
        t = run_sweep(with_sweep(displacement_config(case, 3.0, tau_b=FIG5B_TAU_B), "control_b_area", FIG5B_AREAS))
        good, at = _interior_max(t)
        ok &= good
        parts.append(f"{case.value} max at {at:.1f} pi")
    report(6, "interior maximum below 2pi", ok, ", ".join(parts))


def test_07_decay_trend():
    tables = {}
    for case in (Case.SECH_IDEAL, Case.SECH_DECAY):
        cfg = displacement_config(case, 3.0, delta=3.0, length=FIG5C_LENGTH)
        tables[case] = run_sweep(with_sweep(cfg, "x1", FIG5C_X1)).column("delta")
    ideal, decay = tables[Case.SECH_IDEAL], tables[Case.SECH_DECAY]
    # 1e-3 allows for center-location noise between runs
    ideal_up = bool(np.all(np.diff(ideal) >= -1e-3))
    saturates = abs(ideal[-1] - ideal[-2]) < 0.01
    decay_down = bool(np.all(np.diff(decay) <= 1e-3))
    report(7, "displacement vs initial location", ideal_up and saturates and decay_down,
           f"ideal {ideal[0]:.3f} -> {ideal[-1]:.3f} (non-decreasing {ideal_up}, saturated {saturates}); "
           f"decay {decay[0]:.3f} -> {decay[-1]:.3f} (non-increasing {decay_down})")


def test_08_table1():
    t0 = time.perf_counter()
    rows = {(r[0], r[1]): (r[2], r[3]) for r in table1()[0].rows}
    runtime = time.perf_counter() - t0
    target = {("sech_ideal", 1): 0.98, ("sech_ideal", 2): 0.98, ("sech_decay", 1): 0.65,
              ("sech_decay", 2): 0.66, ("gaussian_ideal", 1): 0.94, ("gaussian_ideal", 2): 0.94}
    tol = {"sech_ideal": 0.02, "sech_decay": 0.05, "gaussian_ideal": 0.02}
    ok, parts = runtime < 300, []
    for key, eta0 in target.items():
        eta, r = rows[key]
        r_ok = abs(r - 0.994) <= 0.003 if key[0] == "gaussian_ideal" else r >= 0.999
        ok &= abs(eta - eta0) <= tol[key[0]] and r_ok
        parts.append(f"{key[0]}/{key[1]} eta {100 * eta:.1f}% r {r:.4f}")
    report(8, "retrieval table", ok, "; ".join(parts) + f"; runtime {runtime:.0f} s (< 300)")


def test_09_width_ratio():
    ws = {c: run_storage(storage_config(c, 5.0)).first.width_fwhm for c in (Case.SECH_IDEAL, Case.GAUSSIAN_IDEAL)}
    ratio = ws[Case.GAUSSIAN_IDEAL] / ws[Case.SECH_IDEAL]
    report(9, "gaussian/sech imprint width", abs(ratio - 1.4) <= 0.1,
           f"{ws[Case.GAUSSIAN_IDEAL]:.3f} / {ws[Case.SECH_IDEAL]:.3f} = {ratio:.3f} (1.4 +/- 0.1)")


def test_10_conservation():
    runs = [run_storage(storage_config(Case.SECH_IDEAL, 3.0)),
            run_storage(storage_config(Case.GAUSSIAN_IDEAL, 3.0, calibrate=False)),
            run_displacement(displacement_config(Case.SECH_IDEAL, 3.0, tau_b=0.5))]
    trace = max(r.trace_drift for r in runs)
    purity = max(r.purity_drift for r in runs)
    cs = max(r.cs_excess for r in runs)
    matched = run_storage(matched_storage_config(Case.SECH_IDEAL, 3.0, retain="fields"))
    area_dev = float(np.max(np.abs(matched.areas.theta_tot - TWO_PI)) / TWO_PI)
    # Cauchy-Schwarz |rho_ij|^2 <= rho_ii rho_jj pointwise, to the purity tolerance
    ok = trace < 1e-8 and purity < 1e-6 and cs <= 1e-6 and area_dev < 0.02
    report(10, "conservation", ok,
           f"trace drift {trace:.1e} (< 1e-8), purity drift {purity:.1e} (< 1e-6), "
           f"CS excess {cs:.1e} (<= 1e-6), total-area deviation {area_dev:.1e} (< 2e-2)")


def test_11_numerics():
    ot, oz, lax = t_orders(), z_orders(), lax_residuals()
    er, ed = rabi_error(), decay_error()
    ok = (min(ot) >= 4 - ORDER_TOLERANCE and min(oz) >= 2 - ORDER_TOLERANCE
          and all(b < a for a, b in zip(lax, lax[1:])) and er < 1e-6 and ed < 1e-6)
    report(11, "numerics", ok,
           f"dT order {', '.join(f'{v:.3f}' for v in ot)} (>= 4 - {ORDER_TOLERANCE}), "
           f"dZ order {', '.join(f'{v:.3f}' for v in oz)} (>= 2 - {ORDER_TOLERANCE}), "
           f"lax residual {' -> '.join(f'{v:.1e}' for v in lax)}, rabi {er:.1e}, decay {ed:.1e} (< 1e-6)")


def test_12_reproducibility(tmp_path):
    cfg = with_sweep(displacement_config(Case.SECH_IDEAL, 3.0, tau_b=0.5, name="repro"),
                     "tau_b", (0.4, 0.6))
    a = run_sweep(cfg)
    b = run_sweep(replace(cfg, workers=2))
    pa = write_table(a, _mk(tmp_path / "a"))
    pb = write_table(b, _mk(tmp_path / "b"))
    same = filecmp.cmp(pa, pb, shallow=False)
    roundtrip = parse_config(serialize_config(cfg)) == cfg
    report(12, "reproducibility", same and roundtrip,
           f"serial vs parallel tables byte-identical {same}, config round-trip exact {roundtrip}")


def _mk(path):
    path.mkdir(parents=True, exist_ok=True)
    return path


if __name__ == "__main__":
    import pathlib
    import tempfile

    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(pathlib.Path(d))
                else:
                    fn()
            except AssertionError:
                pass
