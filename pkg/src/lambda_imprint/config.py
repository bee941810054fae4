"""TOML scenario documents.

Keys carry their unit in the name (``duration_tau_a``, ``length_inv_kappa_a``)
so a document can be read without the code.  Unknown keys are errors.

Example::

    name = "displace"
    case = "sech_ideal"

    [medium]
    length_inv_kappa_a = 10.0

    [[sequence]]
    kind = "pair"
    signal = { area_rad = 6.283185307179586 }
    control = { area_rad = 0.3128371 }

    [[sequence]]
    kind = "control"
    duration_tau_a = 0.5
    center_tau_a = 30.0
"""
from __future__ import annotations

import hashlib
import re

import tomli
import tomli_w

from .dynamics import MU_RATIO_RB, MediumSpec
from .errors import ParseError, ValidationError
from .pulses import TRUNCATION_THRESHOLD, InputPair, PulseSpec
from .scenarios import Case, ScenarioConfig, SweepAxis

_TOP = {"name", "case", "retain", "workers", "output_dir", "medium", "grid", "sequence",
        "snapshots", "sweep"}
_MEDIUM = {"length_inv_kappa_a": "length", "mu_ratio": "mu_ratio",
           "gamma3_times_tau_a": "gamma3_tau", "delta_times_tau_a": "delta_tau"}
_GRID = {"dt_tau_a", "dz_inv_kappa_a", "t_window_tau_a", "truncation_threshold"}
_PULSE = {"shape": "shape", "area_rad": "area", "duration_tau_a": "duration",
          "center_tau_a": "center", "phase_rad": "phase"}
_SNAPSHOTS = {"times_tau_a"}
_SWEEP = {"axis", "values"}


def _line_of(text: str, key: str) -> int | None:
    pat = re.compile(rf"^\s*(\[+\s*)?[\w.]*\b{re.escape(key)}\b")
    for n, line in enumerate(text.splitlines(), 1):
        if pat.match(line):
            return n
    return None


class _Reader:
    def __init__(self, text: str):
        self.text = text

    def table(self, value, where: str) -> dict:
        if not isinstance(value, dict):
            raise ParseError(f"{where} must be a table", _line_of(self.text, where), where)
        return value

    def check_keys(self, table: dict, allowed, where: str):
        for key in table:
            if key not in allowed:
                raise ParseError(f"unknown key {key!r} in {where}", _line_of(self.text, key), key)

    def number(self, table: dict, key: str, default=None):
        if key not in table:
            return default
        v = table[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"{key} must be a number", _line_of(self.text, key), key)
        return float(v)

    def numbers(self, table: dict, key: str):
        v = table.get(key, [])
        if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
            raise ParseError(f"{key} must be a list of numbers", _line_of(self.text, key), key)
        return tuple(float(x) for x in v)

    def string(self, table: dict, key: str, default=None):
        v = table.get(key, default)
        if v is not None and not isinstance(v, str):
            raise ParseError(f"{key} must be a string", _line_of(self.text, key), key)
        return v

    def pulse(self, table: dict, where: str, case: Case, extra=()) -> PulseSpec:
        self.check_keys(table, set(_PULSE) | set(extra), where)
        kw = {_PULSE[k]: self.number(table, k) for k in _PULSE if k != "shape" and k in table}
        kw["shape"] = self.string(table, "shape", case.shape.value)
        return PulseSpec(**kw)


def parse_config(text: str) -> ScenarioConfig:
    """Parse a TOML document into a validated :class:`ScenarioConfig`."""
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ParseError(f"malformed document: {exc.msg}", exc.lineno) from None
    rd = _Reader(text)
    rd.check_keys(doc, _TOP, "document")
    try:
        case = Case(rd.string(doc, "case", Case.SECH_IDEAL.value))
    except ValueError:
        raise ParseError(f"unknown case {doc['case']!r}; choose from {[c.value for c in Case]}",
                         _line_of(text, "case"), "case") from None

    med = rd.table(doc.get("medium", {}), "medium")
    rd.check_keys(med, _MEDIUM, "medium")
    grid = rd.table(doc.get("grid", {}), "grid")
    rd.check_keys(grid, _GRID, "grid")

    events = doc.get("sequence", [])
    if not isinstance(events, list):
        raise ParseError("sequence must be an array of tables", _line_of(text, "sequence"), "sequence")
    snaps = rd.table(doc.get("snapshots", {}), "snapshots")
    rd.check_keys(snaps, _SNAPSHOTS, "snapshots")

    try:
        medium = MediumSpec(
            length=rd.number(med, "length_inv_kappa_a", 10.0),
            mu_ratio=rd.number(med, "mu_ratio", MU_RATIO_RB),
            gamma3_tau=rd.number(med, "gamma3_times_tau_a", case.default_gamma),
            delta_tau=rd.number(med, "delta_times_tau_a", 0.0))
        sequence = []
        for k, ev in enumerate(events):
            where = f"sequence[{k}]"
            ev = rd.table(ev, where)
            kind = rd.string(ev, "kind", "pair")
            if kind == "pair":
                rd.check_keys(ev, {"kind", "signal", "control"}, where)
                if "signal" not in ev or "control" not in ev:
                    raise ParseError(f"{where}: a pair needs signal and control tables",
                                     _line_of(text, "kind"), "signal")
                sequence.append(InputPair(
                    rd.pulse(rd.table(ev["signal"], "signal"), f"{where}.signal", case),
                    rd.pulse(rd.table(ev["control"], "control"), f"{where}.control", case)))
            elif kind == "control":
                sequence.append(rd.pulse(ev, where, case, extra=("kind",)))
            else:
                raise ParseError(f"{where}: kind must be 'pair' or 'control', got {kind!r}",
                                 _line_of(text, "kind"), "kind")
        sweep = None
        if "sweep" in doc:
            sw = rd.table(doc["sweep"], "sweep")
            rd.check_keys(sw, _SWEEP, "sweep")
            sweep = SweepAxis(rd.string(sw, "axis", ""), rd.numbers(sw, "values"))
        window = rd.numbers(grid, "t_window_tau_a") or None
        if window is not None and len(window) != 2:
            raise ValidationError("t_window_tau_a needs exactly two values")
        workers = doc.get("workers", 1)
        if isinstance(workers, bool) or not isinstance(workers, int):
            raise ParseError("workers must be an integer", _line_of(text, "workers"), "workers")
        return ScenarioConfig(
            case=case, medium=medium, sequence=tuple(sequence),
            dt=rd.number(grid, "dt_tau_a", 0.02), dz=rd.number(grid, "dz_inv_kappa_a", 0.02),
            t_window=window,
            threshold=rd.number(grid, "truncation_threshold", TRUNCATION_THRESHOLD),
            snapshot_times=rd.numbers(snaps, "times_tau_a"), sweep=sweep,
            retain=rd.string(doc, "retain", "boundary"), workers=workers,
            name=rd.string(doc, "name", "scenario"), output_dir=rd.string(doc, "output_dir", "results"))
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def _pulse_doc(p: PulseSpec) -> dict:
    return {"shape": p.shape.value, "area_rad": p.area, "duration_tau_a": p.duration,
            "center_tau_a": p.center, "phase_rad": p.phase}


def to_document(config: ScenarioConfig) -> dict:
    m = config.medium
    doc = {
        "name": config.name, "case": config.case.value, "retain": config.retain,
        "workers": config.workers, "output_dir": config.output_dir,
        "medium": {"length_inv_kappa_a": m.length, "mu_ratio": m.mu_ratio,
                   "gamma3_times_tau_a": m.gamma3_tau, "delta_times_tau_a": m.delta_tau},
        "grid": {"dt_tau_a": config.dt, "dz_inv_kappa_a": config.dz,
                 "truncation_threshold": config.threshold},
    }
    if config.t_window is not None:
        doc["grid"]["t_window_tau_a"] = list(config.t_window)
    if config.snapshot_times:
        doc["snapshots"] = {"times_tau_a": list(config.snapshot_times)}
    if config.sweep is not None:
        doc["sweep"] = {"axis": config.sweep.name, "values": list(config.sweep.values)}
    seq = []
    for ev in config.sequence:
        if isinstance(ev, InputPair):
            seq.append({"kind": "pair", "signal": _pulse_doc(ev.signal), "control": _pulse_doc(ev.control)})
        else:
            seq.append({"kind": "control", **_pulse_doc(ev)})
    doc["sequence"] = seq
    return doc


def serialize_config(config: ScenarioConfig) -> str:
    """Canonical TOML text; ``parse_config(serialize_config(c)) == c``."""
    return tomli_w.dumps(to_document(config))


def config_hash(config: ScenarioConfig) -> str:
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()


__all__ = ["config_hash", "load_config", "parse_config", "serialize_config", "to_document"]
