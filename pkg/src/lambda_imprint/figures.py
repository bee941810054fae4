"""Built-in reference figures and table.

Each builder returns a list of :class:`~lambda_imprint.scenarios.Table`
objects in dimensionless units (t/tau_a, kappa_a x, theta/pi).
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .analysis import area_evolution
from .pulses import TWO_PI
from .scenarios import (
    Case,
    Table,
    displacement_config,
    matched_storage_config,
    retrieval_config,
    run_retrieval,
    run_scenario,
    run_sweep,
    storage_config,
    with_sweep,
)

CASES = (Case.SECH_IDEAL, Case.GAUSSIAN_IDEAL, Case.SECH_DECAY)

# plotted ranges
FIG4A_X1 = tuple(float(x) for x in range(1, 10))
FIG4B_AREAS = tuple(math.pi * a for a in (1.8, 1.9, 2.0, 2.1, 2.2))
FIG4C_RATIOS = (0.5, 0.75, 1.0, 1.25, 1.5)
FIG5A_TAU_B = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.2, 1.5, 2.0)
FIG5B_AREAS = tuple(math.pi * a for a in (0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4))
FIG5B_TAU_B = 0.5
FIG5C_X1 = tuple(float(x) for x in range(3, 10))
FIG5C_LENGTH = 15.0
FIG3_TIMES = (5.0, 25.0)


def _grid_kw(dt, dz):
    return {"dt": dt, "dz": dz}


def fig2(workers=1, dt=0.02, dz=0.02) -> list[Table]:
    """Per-slice areas during storage at 3 and the displacement by 3 that follows."""
    cfg = displacement_config(Case.SECH_IDEAL, 3.0, delta=3.0, start=-10.0, gap=25.0,
                              retain="fields", **_grid_kw(dt, dz))
    res = run_scenario(cfg)
    split = 0.5 * sum(cfg.centers)
    grid = cfg.grid()
    a = area_evolution(res.record, (grid.t_min, split))
    b = area_evolution(res.record, (split, grid.t_max))
    rows = [tuple(float(v) / (1.0 if k == 0 else math.pi) for k, v in enumerate(r))
            for r in zip(a.z, a.theta13, a.theta23, a.theta_tot, b.theta13, b.theta23, b.theta_tot)]
    cols = ("kappa_x", "theta13_store_over_pi", "theta23_store_over_pi", "thetatot_store_over_pi",
            "theta13_move_over_pi", "theta23_move_over_pi", "thetatot_move_over_pi")
    return [Table("fig2_areas", cols, rows)]


def fig3(workers=1, dt=0.02, dz=0.02) -> list[Table]:
    """Ground-state profiles before (t = 5) and after (t = 25) a displacement by 3."""
    cfg = displacement_config(Case.SECH_IDEAL, 3.0, delta=3.0, start=-10.0, gap=25.0,
                              snapshot_times=FIG3_TIMES, **_grid_kw(dt, dz))
    res = run_scenario(cfg)
    before, after = res.snapshots
    rows = list(zip(before.z_axis, before.rho11, before.rho22, before.rho12.real,
                    after.rho11, after.rho22, after.rho12.real))
    rows = [tuple(float(v) for v in r) for r in rows]
    cols = ("kappa_x", "rho11_t5", "rho22_t5", "re_rho12_t5", "rho11_t25", "rho22_t25", "re_rho12_t25")
    return [Table("fig3_imprint", cols, rows)]


def _sweeps(name, configs, workers):
    out = []
    for case, cfg in configs:
        t = run_sweep(replace(cfg, name=f"{name}_{case.value}"), workers)
        out.append(t)
    return out


def fig4a(workers=1, dt=0.02, dz=0.02, x1_values=FIG4A_X1) -> list[Table]:
    areas = [TWO_PI * math.exp(-x) for x in x1_values]
    cfgs = [(c, with_sweep(storage_config(c, 3.0, calibrate=False, **_grid_kw(dt, dz)),
                           "control_area", areas)) for c in CASES]
    return _sweeps("fig4a", cfgs, workers)


def fig4b(workers=1, dt=0.02, dz=0.02, areas=FIG4B_AREAS) -> list[Table]:
    cfgs = [(c, with_sweep(matched_storage_config(c, 5.0, **_grid_kw(dt, dz)), "total_area", areas))
            for c in CASES]
    return _sweeps("fig4b", cfgs, workers)


def fig4c(workers=1, dt=0.02, dz=0.02, ratios=FIG4C_RATIOS) -> list[Table]:
    cfgs = [(c, with_sweep(matched_storage_config(c, 5.0, **_grid_kw(dt, dz)), "duration_ratio", ratios))
            for c in CASES]
    return _sweeps("fig4c", cfgs, workers)


def fig5a(workers=1, dt=0.02, dz=0.02, tau_b=FIG5A_TAU_B) -> list[Table]:
    cfgs = [(c, with_sweep(displacement_config(c, 3.0, tau_b=0.5, **_grid_kw(dt, dz)), "tau_b", tau_b))
            for c in CASES]
    return _sweeps("fig5a", cfgs, workers)


def fig5b(workers=1, dt=0.02, dz=0.02, areas=FIG5B_AREAS) -> list[Table]:
    cfgs = [(c, with_sweep(displacement_config(c, 3.0, tau_b=FIG5B_TAU_B, **_grid_kw(dt, dz)),
                           "control_b_area", areas)) for c in CASES]
    return _sweeps("fig5b", cfgs, workers)


def fig5c(workers=1, dt=0.02, dz=0.02, x1_values=FIG5C_X1) -> list[Table]:
    cfgs = [(c, with_sweep(displacement_config(c, 3.0, delta=3.0, length=FIG5C_LENGTH,
                                               **_grid_kw(dt, dz)), "x1", x1_values))
            for c in CASES]
    return _sweeps("fig5c", cfgs, workers)


def table1(workers=1, dt=0.02, dz=0.02) -> list[Table]:
    rows = []
    for steps in (1, 2):
        for c in CASES:
            m = run_retrieval(retrieval_config(c, steps, **_grid_kw(dt, dz)), steps).retrieval
            rows.append((c.value, steps, m.eta, m.r))
    return [Table("table1", ("case", "steps", "eta", "r"), rows)]


FIGURES = {
    "fig2": fig2, "fig3": fig3, "fig4a": fig4a, "fig4b": fig4b, "fig4c": fig4c,
    "fig5a": fig5a, "fig5b": fig5b, "fig5c": fig5c, "table1": table1,
}


def reproduce(figure_id: str, workers: int = 1, dt: float = 0.02, dz: float = 0.02) -> list[Table]:
    try:
        build = FIGURES[figure_id]
    except KeyError:
        raise ValueError(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURES)}") from None
    return build(workers=workers, dt=dt, dz=dz)


def fitted_slope(table: Table, x: str, y: str) -> float:
    xs, ys = table.column(x), table.column(y)
    ok = np.isfinite(xs) & np.isfinite(ys)
    return float(np.polyfit(xs[ok], ys[ok], 1)[0])
