"""Maxwell-Bloch simulation of optical imprints in a three-level lambda medium.

Units are dimensionless throughout: time in tau_a (the signal duration),
length in absorption lengths 1/kappa_a, Rabi frequencies in 1/tau_a.
"""
from .analysis import (
    AreaTable,
    ImprintCharacter,
    ImprintSnapshot,
    area_evolution,
    characterize_imprint,
    displacement,
    duration_for_displacement,
    phase_flip,
    predicted_displacement,
    retrieval_efficiency,
    shape_correlation,
)
from .config import config_hash, load_config, parse_config, serialize_config
from .dynamics import (
    DensityMatrix,
    FieldRecord,
    Grid,
    MediumSpec,
    advance_bloch_slice,
    advance_field_step,
    bloch_derivative,
    integrate_medium,
)
from .errors import (
    GridTooCoarse,
    LambdaImprintError,
    NonFiniteState,
    OutputError,
    ParseError,
    RetrievalFailed,
    ValidationError,
    WindowTooNarrow,
    ZeroInput,
)
from .pulses import (
    InputPair,
    PulseSpec,
    Shape,
    cumulative_area,
    imprint_location,
    input_envelope,
    make_envelope,
    matched_input_for_target,
    pulse_area,
    signal_fixed_input,
    total_area,
    truncate_envelope,
)
from .results import read_record, read_table, write_results
from .scenarios import (
    Case,
    ScenarioConfig,
    ScenarioResult,
    SweepAxis,
    Table,
    displacement_config,
    matched_storage_config,
    retrieval_config,
    run_displacement,
    run_retrieval,
    run_scenario,
    run_storage,
    run_sweep,
    storage_config,
    with_sweep,
)

__version__ = "0.1.0"
