"""Storage, displacement, retrieval and parameter sweeps.

A scenario is an ordered sequence of pulse events on one medium: an
:class:`~lambda_imprint.pulses.InputPair` stores an imprint, a lone control
:class:`~lambda_imprint.pulses.PulseSpec` displaces or retrieves it.  The
builders at the bottom of the module set up the reference experiments for
the three canonical cases.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import root_scalar

from .analysis import (
    AreaTable,
    ImprintCharacter,
    ImprintSnapshot,
    area_evolution,
    characterize_imprint,
    duration_for_displacement,
    phase_flip,
    retrieval_efficiency,
    shape_correlation,
)
from .dynamics import RETAIN_CHOICES, FieldRecord, Grid, MediumSpec, integrate_medium
from .errors import RetrievalFailed, ValidationError
from .pulses import (
    TRUNCATION_THRESHOLD,
    TWO_PI,
    InputPair,
    PulseSpec,
    Shape,
    make_envelope,
    matched_input_for_target,
    pulse_area,
    signal_fixed_input,
    truncate_envelope,
)

DECAY_GAMMA_TAU = 0.01
EVENT_GAP = 30.0
MIN_SEPARATION = 10.0
RETRIEVAL_THRESHOLD = 1e-2


class Case(str, Enum):
    SECH_IDEAL = "sech_ideal"
    GAUSSIAN_IDEAL = "gaussian_ideal"
    SECH_DECAY = "sech_decay"

    @property
    def shape(self) -> Shape:
        return Shape.GAUSSIAN if self is Case.GAUSSIAN_IDEAL else Shape.SECH

    @property
    def default_gamma(self) -> float:
        return DECAY_GAMMA_TAU if self is Case.SECH_DECAY else 0.0

    @property
    def calibrated(self) -> bool:
        """Whether target locations need a measured calibration."""
        return self is not Case.SECH_IDEAL

    def medium(self, length: float = 10.0, **kw) -> MediumSpec:
        kw.setdefault("gamma3_tau", self.default_gamma)
        return MediumSpec(length=length, **kw)


SWEEP_AXES = {
    # axis: (table column for the swept value, scale applied to it, observable)
    "control_area": ("theta23_over_pi", 1 / math.pi, "kappa_x1"),
    "total_area": ("thetatot_over_pi", 1 / math.pi, "kappa_x1"),
    "duration_ratio": ("tau_c_over_tau_s", 1.0, "kappa_x1"),
    "tau_b": ("tau_b_over_tau_a", 1.0, "delta"),
    "control_b_area": ("theta23b_over_pi", 1 / math.pi, "delta"),
    "x1": ("x1_target", 1.0, "delta"),
}


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.name not in SWEEP_AXES:
            raise ValidationError(f"unknown sweep axis {self.name!r}; choose from {sorted(SWEEP_AXES)}")
        if not self.values:
            raise ValidationError("sweep needs at least one value")


def _pulses(event) -> tuple[PulseSpec, ...]:
    if isinstance(event, InputPair):
        return (event.signal, event.control)
    return (event,)


def _center(event) -> float:
    return max(p.center for p in _pulses(event))


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one scenario; validated on construction."""

    case: Case = Case.SECH_IDEAL
    medium: MediumSpec = field(default_factory=MediumSpec)
    sequence: tuple = ()
    dt: float = 0.02
    dz: float = 0.02
    t_window: tuple[float, float] | None = None
    threshold: float = TRUNCATION_THRESHOLD
    snapshot_times: tuple[float, ...] = ()
    sweep: SweepAxis | None = None
    retain: str = "boundary"
    workers: int = 1
    name: str = "scenario"
    output_dir: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "case", Case(self.case))
        object.__setattr__(self, "sequence", tuple(self.sequence))
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))
        if self.t_window is not None:
            object.__setattr__(self, "t_window", tuple(float(t) for t in self.t_window))
        self._validate()

    def _validate(self):
        if not self.sequence:
            raise ValidationError("sequence must contain at least one pulse event")
        for ev in self.sequence:
            if not isinstance(ev, (InputPair, PulseSpec)):
                raise ValidationError(f"sequence events must be InputPair or PulseSpec, got {type(ev).__name__}")
            for p in _pulses(ev):
                if p.shape is not self.case.shape:
                    raise ValidationError(
                        f"case {self.case.value} requires {self.case.shape.value} pulses, got {p.shape.value}")
        centers = [_center(ev) for ev in self.sequence]
        for k in range(1, len(self.sequence)):
            longest = max(p.duration for ev in self.sequence[k - 1:k + 1] for p in _pulses(ev))
            if centers[k] - centers[k - 1] < MIN_SEPARATION * longest - 1e-12:
                raise ValidationError(
                    f"events {k - 1} and {k} are {centers[k] - centers[k - 1]:g} tau_a apart; "
                    f"need at least {MIN_SEPARATION:g} x longest duration = {MIN_SEPARATION * longest:g}")
        if self.case is not Case.SECH_DECAY and self.medium.gamma3_tau != 0:
            raise ValidationError(f"case {self.case.value} has no decay; gamma3_tau must be 0")
        if not (self.dt > 0 and self.dz > 0):
            raise ValidationError("dt and dz must be positive")
        if not self.threshold >= 0:
            raise ValidationError("truncation threshold must be non-negative")
        if self.retain not in RETAIN_CHOICES:
            raise ValidationError(f"retain must be one of {RETAIN_CHOICES}")
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise ValidationError("workers must be a positive integer")
        try:
            grid = self.grid()
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        for t in self.snapshot_times:
            if not grid.t_min <= t <= grid.t_max:
                raise ValidationError(f"snapshot time {t} outside window [{grid.t_min}, {grid.t_max}]")

    @property
    def centers(self) -> list[float]:
        return [_center(ev) for ev in self.sequence]

    def grid(self) -> Grid:
        if self.t_window is not None:
            t_min, t_max = self.t_window
        else:
            t_min, t_max = self._auto_window()
        n = math.ceil((t_max - t_min) / self.dt - 1e-9)
        return Grid(t_min, t_min + n * self.dt, self.dt, self.dz, self.medium.length)

    def _auto_window(self) -> tuple[float, float]:
        pulses = [p for ev in self.sequence for p in _pulses(ev) if p.area > 0]
        if not pulses:
            c = self.centers
            return math.floor(min(c) - 20.0), math.ceil(max(c) + 20.0)
        reach = [p.support(self.threshold) if self.threshold > 0 else 40.0 * p.duration for p in pulses]
        t_min = math.floor(min(p.center - r for p, r in zip(pulses, reach)) - 1.0)
        longest = max(p.duration for p in pulses)
        t_max = max(max(p.center + r for p, r in zip(pulses, reach)) + 1.0,
                    max(self.centers) + (self.medium.length + 20.0) * longest)
        return t_min, math.ceil(t_max)

    def snapshots(self) -> tuple[float, ...]:
        """Configured snapshot times, or one after each event by default."""
        if self.snapshot_times:
            return self.snapshot_times
        c = sorted(self.centers)
        grid = self.grid()
        mids = [0.5 * (a + b) for a, b in zip(c[:-1], c[1:])]
        return tuple(float(grid.t[grid.t_index(t)]) for t in mids) + (float(grid.t[-1]),)


@dataclass(frozen=True)
class RetrievalMetrics:
    eta: float
    r: float
    inverted: bool


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    snapshot_times: tuple[float, ...]
    snapshots: list[ImprintSnapshot]
    imprints: list[ImprintCharacter | None]
    locations: list[float]
    output_areas: tuple[float, float]
    retrieval: RetrievalMetrics | None
    trace_drift: float
    purity_drift: float
    cs_excess: float
    areas: AreaTable | None = None
    record: FieldRecord | None = None

    @property
    def displacements(self) -> list[float]:
        return [b - a for a, b in zip(self.locations[:-1], self.locations[1:])]

    @property
    def phase_flips(self) -> list[bool | None]:
        out = []
        for a, b in zip(self.imprints[:-1], self.imprints[1:]):
            out.append(None if a is None or b is None else phase_flip(a, b))
        return out

    @property
    def first(self) -> ImprintCharacter | None:
        return self.imprints[0]


def input_fields(config: ScenarioConfig, grid: Grid | None = None):
    """Truncated signal and control envelopes at the medium entrance."""
    grid = grid or config.grid()
    s13 = np.zeros(grid.n_t, dtype=complex)
    s23 = np.zeros(grid.n_t, dtype=complex)
    for ev in config.sequence:
        if isinstance(ev, InputPair):
            s13 += make_envelope(ev.signal, grid, config.threshold)
            s23 += make_envelope(ev.control, grid, config.threshold)
        else:
            s23 += make_envelope(ev, grid, config.threshold)
    return truncate_envelope(s13, config.threshold), truncate_envelope(s23, config.threshold)


def _retrieval(config: ScenarioConfig, record: FieldRecord) -> RetrievalMetrics | None:
    c = sorted(config.centers)
    if len(c) < 2 or not isinstance(config.sequence[-1], PulseSpec):
        return None
    t = record.t
    window = t >= 0.5 * (c[-2] + c[-1])
    out = np.where(window, record.omega13_out, 0.0)
    inp = record.omega13_in
    if np.abs(out).max() < RETRIEVAL_THRESHOLD * np.abs(inp).max():
        return None
    i_in = int(np.argmax(np.abs(inp)))
    i_out = int(np.argmax(np.abs(out)))
    inverted = bool((out[i_out] * np.conj(inp[i_in])).real < 0)
    return RetrievalMetrics(retrieval_efficiency(inp, out, record.grid),
                            shape_correlation(inp, out), inverted)


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    grid = config.grid()
    s13, s23 = input_fields(config, grid)
    times = config.snapshots()
    record = integrate_medium(s13, s23, config.medium, grid, times, config.retain)
    snaps = [ImprintSnapshot.from_record(record, t) for t in times]
    imprints = [characterize_imprint(s) for s in snaps]
    locations = []
    for k, imp in enumerate(imprints):
        if imp is not None:
            locations.append(imp.center)
        elif k > 0 and not math.isnan(locations[-1]):
            # pushed out through the end face
            locations.append(config.medium.length)
        else:
            locations.append(math.nan)
    areas = area_evolution(record) if record.omega13 is not None else None
    return ScenarioResult(
        config, tuple(times), snaps, imprints, locations,
        (pulse_area(record.omega13_out, grid), pulse_area(record.omega23_out, grid)),
        _retrieval(config, record), record.trace_drift, record.purity_drift, record.cs_excess,
        areas, record)


def run_storage(config: ScenarioConfig) -> ScenarioResult:
    """Single storage event; the result's ``first`` is the imprint."""
    if len(config.sequence) != 1 or not isinstance(config.sequence[0], InputPair):
        raise ValidationError("storage needs a sequence of exactly one input pair")
    return run_scenario(config)


def run_displacement(config: ScenarioConfig) -> ScenarioResult:
    seq = config.sequence
    if len(seq) != 2 or not isinstance(seq[0], InputPair) or not isinstance(seq[1], PulseSpec):
        raise ValidationError("displacement needs an input pair followed by one control pulse")
    return run_scenario(config)


def run_retrieval(config: ScenarioConfig, steps: int | None = None) -> ScenarioResult:
    seq = config.sequence
    if steps is not None and len(seq) != steps + 1:
        raise ValidationError(f"{steps}-step retrieval needs {steps + 1} events, got {len(seq)}")
    if not isinstance(seq[0], InputPair) or not all(isinstance(e, PulseSpec) for e in seq[1:]):
        raise ValidationError("retrieval needs an input pair followed by control pulses")
    res = run_scenario(config)
    if res.retrieval is None:
        raise RetrievalFailed("no signal pulse above threshold left the medium")
    return res


# --------------------------------------------------------------------------
# sweeps


@dataclass
class Table:
    """Named observable table; one tuple per row."""

    name: str
    columns: tuple[str, ...]
    rows: list[tuple]
    errors: dict[int, str] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows], dtype=float)


def _vary(config: ScenarioConfig, axis: str, value: float) -> ScenarioConfig:
    seq = list(config.sequence)
    pair = seq[0]
    if not isinstance(pair, InputPair):
        raise ValidationError("sweeps start from an input pair")
    if axis == "control_area":
        seq[0] = InputPair(pair.signal, replace(pair.control, area=value))
    elif axis == "total_area":
        scale = value / math.hypot(pair.signal.area, pair.control.area)
        seq[0] = InputPair(replace(pair.signal, area=pair.signal.area * scale),
                           replace(pair.control, area=pair.control.area * scale))
    elif axis == "duration_ratio":
        seq[0] = InputPair(pair.signal, replace(pair.control, duration=value * pair.signal.duration))
    elif axis == "x1":
        seq[0] = InputPair(pair.signal, replace(pair.control, area=pair.signal.area * math.exp(-value)))
    else:
        if len(seq) < 2 or not isinstance(seq[1], PulseSpec):
            raise ValidationError(f"axis {axis!r} needs a second control pulse")
        key = "duration" if axis == "tau_b" else "area"
        seq[1] = replace(seq[1], **{key: value})
    return replace(config, sequence=tuple(seq), sweep=None, workers=1)


def sweep_row(config: ScenarioConfig, axis: str, value: float) -> tuple:
    label, scale, observable = SWEEP_AXES[axis]
    res = run_scenario(_vary(config, axis, value))
    x1 = res.locations[0]
    if observable == "kappa_x1":
        return (value * scale, x1)
    delta = res.displacements[0] if len(res.locations) > 1 else math.nan
    if axis == "x1":
        return (value, x1, delta)
    return (value * scale, delta)


def _row_or_error(args):
    config, axis, value = args
    try:
        return sweep_row(config, axis, value), None
    except Exception as exc:  # recorded per row, sweep continues
        return None, f"{type(exc).__name__}: {exc}"


def run_sweep(config: ScenarioConfig, workers: int | None = None) -> Table:
    """One row per swept value; rows are independent and merged in order."""
    if config.sweep is None:
        raise ValidationError("config has no sweep axis")
    axis = config.sweep.name
    label, _, observable = SWEEP_AXES[axis]
    columns = ("x1_target", "kappa_x1", "delta") if axis == "x1" else (label, observable)
    jobs = [(config, axis, v) for v in config.sweep.values]
    n = workers or config.workers
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_row_or_error, jobs))
    else:
        results = [_row_or_error(j) for j in jobs]
    rows, errors = [], {}
    for k, ((row, err), (_, _, v)) in enumerate(zip(results, jobs)):
        if err is not None:
            errors[k] = err
            row = (v * SWEEP_AXES[axis][1],) + (math.nan,) * (len(columns) - 1)
            if axis == "x1":
                row = (v, math.nan, math.nan)
        rows.append(row)
    return Table(config.name if config.name != "scenario" else axis, columns, rows, errors)


# --------------------------------------------------------------------------
# builders for the reference experiments


def _config(case: Case, sequence, *, length=10.0, dt=0.02, dz=0.02, **kw) -> ScenarioConfig:
    return ScenarioConfig(case=case, medium=case.medium(length), sequence=tuple(sequence),
                          dt=dt, dz=dz, **kw)


def _storage_pair(case: Case, s: float, theta13: float = TWO_PI) -> InputPair:
    return signal_fixed_input(s, theta13, shape=case.shape)


def _measured_x1(case: Case, s: float, length: float, dt: float, dz: float) -> float:
    res = run_scenario(_config(case, [_storage_pair(case, s)], length=length, dt=dt, dz=dz))
    loc = res.locations[0]
    return length if math.isnan(loc) else loc


@lru_cache(maxsize=None)
def calibrated_ratio(case: Case, x1: float, length: float = 10.0,
                     dt: float = 0.02, dz: float = 0.02) -> float:
    """ln(theta13/theta23) that puts the measured imprint at ``x1``.

    Closed form for the ideal sech case; secant search on the measured
    location otherwise, starting from the closed-form value.
    """
    case = Case(case)
    if not case.calibrated:
        return float(x1)
    f0 = _measured_x1(case, x1, length, dt, dz) - x1
    s1 = x1 - f0
    sol = root_scalar(lambda s: _measured_x1(case, s, length, dt, dz) - x1,
                      x0=float(x1), x1=float(s1), method="secant", xtol=1e-4, maxiter=20)
    return float(sol.root)


def _displaced(case, pair, tau_b, length, dt, dz, area_b=TWO_PI):
    ctrl = PulseSpec(case.shape, area_b, tau_b, EVENT_GAP)
    return run_scenario(_config(case, [pair, ctrl], length=length, dt=dt, dz=dz))


@lru_cache(maxsize=None)
def calibrated_tau_b(case: Case, x1: float, delta: float, length: float = 10.0,
                     dt: float = 0.02, dz: float = 0.02) -> float:
    """Second-control duration (< tau_a) displacing the imprint at ``x1`` by ``delta``."""
    case = Case(case)
    if not case.calibrated:
        return duration_for_displacement(delta)
    pair = _storage_pair(case, calibrated_ratio(case, x1, length, dt, dz))

    def miss(u):
        res = _displaced(case, pair, math.tanh(u), length, dt, dz)
        return res.displacements[0] - delta

    u0 = 0.5 * delta
    sol = root_scalar(miss, x0=u0, x1=u0 + 0.05, method="secant", xtol=1e-4, maxiter=20)
    return math.tanh(sol.root)


def storage_config(case: Case, x1: float, *, theta13: float = TWO_PI, calibrate: bool | None = None,
                   length: float = 10.0, dt: float = 0.02, dz: float = 0.02, **kw) -> ScenarioConfig:
    case = Case(case)
    calibrate = case.calibrated if calibrate is None else calibrate
    s = calibrated_ratio(case, x1, length, dt, dz) if calibrate else x1
    return _config(case, [_storage_pair(case, s, theta13)], length=length, dt=dt, dz=dz, **kw)


def matched_storage_config(case: Case, x1: float, theta_tot: float = TWO_PI, **kw) -> ScenarioConfig:
    case = Case(case)
    return _config(case, [matched_input_for_target(x1, theta_tot, shape=case.shape)], **kw)


def displacement_config(case: Case, x1: float = 3.0, *, tau_b: float | None = None,
                        delta: float | None = None, area_b: float = TWO_PI,
                        calibrate: bool | None = None, length: float = 10.0,
                        dt: float = 0.02, dz: float = 0.02, gap: float = EVENT_GAP,
                        start: float = 0.0, **kw) -> ScenarioConfig:
    """Storage at ``x1`` then one control of duration ``tau_b`` (or tuned for ``delta``)."""
    case = Case(case)
    calibrate = case.calibrated if calibrate is None else calibrate
    s = calibrated_ratio(case, x1, length, dt, dz) if calibrate else x1
    if tau_b is None:
        if delta is None:
            raise ValueError("give tau_b or delta")
        tau_b = (calibrated_tau_b(case, x1, delta, length, dt, dz) if calibrate
                 else duration_for_displacement(delta))
    seq = [_storage_pair(case, s).shifted(start), PulseSpec(case.shape, area_b, tau_b, start + gap)]
    return _config(case, seq, length=length, dt=dt, dz=dz, **kw)


def retrieval_config(case: Case, steps: int, *, dt: float = 0.02, dz: float = 0.02,
                     length: float = 10.0, calibrate: bool | None = None, **kw) -> ScenarioConfig:
    """One step: store at 8, push out with tau_b = tau_a.  Two steps: store at 5,
    displace by 3, then push out."""
    case = Case(case)
    calibrate = case.calibrated if calibrate is None else calibrate
    if steps == 1:
        x1, taus = 8.0, [1.0]
    elif steps == 2:
        x1 = 5.0
        tb = (calibrated_tau_b(case, x1, 3.0, length, dt, dz) if calibrate
              else duration_for_displacement(3.0))
        taus = [tb, 1.0]
    else:
        raise ValueError("retrieval is defined for 1 or 2 steps")
    s = calibrated_ratio(case, x1, length, dt, dz) if calibrate else x1
    seq = [_storage_pair(case, s)]
    seq += [PulseSpec(case.shape, TWO_PI, tau, EVENT_GAP * (k + 1)) for k, tau in enumerate(taus)]
    return _config(case, seq, length=length, dt=dt, dz=dz, **kw)


def with_sweep(config: ScenarioConfig, axis: str, values, name: str | None = None) -> ScenarioConfig:
    return replace(config, sweep=SweepAxis(axis, tuple(values)), name=name or config.name)
