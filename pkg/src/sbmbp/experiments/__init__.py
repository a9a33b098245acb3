"""Parameter sweeps, phase diagnostics and adiabatic hysteresis runs."""

from .adiabatic import adiabatic_sweep, edit_network, hysteresis_loop, transfer_state
from .diagnose import (
    PhaseDiagnosis,
    condensation_scan,
    diagnose,
    dual_init_gap,
    transition_scan,
)
from .emit import emit, read_records, write_records
from .seeds import derive_seed, splitmix64
from .sweep import Axis, RunRecord, SweepSpec, run_cell, sweep
