"""Desk-scale simulator of nuclear-spin-selective cavity fluorescence readout.

A single falling Yb-171 atom couples two cyclic optical transitions to the
two polarization modes of an optical microcavity; an auxiliary far-detuned
beam rearranges the excited-state sublevels so that the polarization of the
collected fluorescence reveals the nuclear spin.  This package models that
system end to end: exact coupling tables, AC Stark shift fields, the
two-mode Lindblad dynamics with its adiabatically eliminated rate model,
Monte Carlo transit/photon statistics, and the derived observables
(spectra, SNR curves, correlations, trap-loss spectroscopy).
"""

from .errors import (
    YbCavityError, ConfigError, ResonanceError, ModelError, NumericalError,
)
from .atomic import (
    Term, Polarization, Sublevel, LevelScheme,
    SPIN_UP, SPIN_DOWN,
    build_level_scheme, transition_weight, decay_branching,
)
from .lightshift import (
    BeamParams, ShiftResult, ZERO_SHIFT,
    default_shift_beam, stark_shift, sublevel_splitting, shift_field,
)
from .dynamics import (
    CavityParams, SystemState, LindbladGenerator, EmissionRates,
    build_hamiltonian, build_lindblad, ground_vacuum_state,
    steady_state, evolve, adiabatic_rates,
)
from .transit import (
    TransitGeometry, TransitConfig, TransitRecord, CountRecord,
    default_transit_config, crossing_duration, probe_detuning,
    simulate_transit, simulate_window, child_rng,
    run_ensemble, run_transit_ensemble,
    write_transit_records, write_count_records,
    read_transit_records, read_count_records,
)
from .observables import (
    MotParams, SpectrumPoint, CorrectedCounts,
    mot_dip_profile, dip_half_width,
    expected_transit_counts, fluorescence_spectrum,
    spectrum_peak, count_weighted_skewness,
    snr_from_counts, dark_count_correct, predicted_snr,
    pearson_correlation,
)
from .config import (
    RunConfig, default_run_config, config_from_dict, config_to_dict,
    load_config, dump_config,
)

__version__ = "0.1.0"
