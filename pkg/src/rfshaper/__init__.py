"""rfshaper: frequency-domain simulator and heater tuner for an
integrated RF-photonic spectral shaper.

The package models an RF-modulated optical spectrum as three complex
tones, propagates them through feed-forward circuits of waveguides,
couplers, and ring resonators, detects the RF beat, and numerically
tunes virtual heaters to hit filtering and modulation-transformation
targets.
"""

from .blocks import (FrequencyGrid, PhaseShifterState, RingParams,
                     TransferMatrix2x2, WaveguideParams,
                     amplitude_from_db_loss, critical_coupling_kappa,
                     h_coupler_3db, h_phase_shifter, h_ring_adddrop,
                     h_ring_allpass, h_tunable_coupler, h_waveguide,
                     heater_phase_from_power, z_inverse)
from .circuit import (BlockInstance, CircuitGraph, CircuitResponse, Port,
                      evaluate)
from .csvout import format_number, write_csv
from .errors import (AnalysisError, ConfigurationError, DomainError,
                     ShaperError, SingularityError, TopologyError)
from .experiments import ExperimentResult, run_experiment
from .kernels import backend_name
from .metrics import extinction_db, notch_depth_db, passband_width_3db, \
    peak_frequency_ghz, q_and_finesse
from .rflink import (DetectorParams, LinkConfig, ModulatedSpectrum,
                     ModulationFormat, RfResponse, apply_circuit,
                     detect_rf_phasor, make_spectrum, rf_transmission_sweep,
                     time_domain_oracle)
from .topologies import (DeinterleaverSpec, ShaperConfig, build_deinterleaver,
                         build_shaper, fit_round_trip_amplitude,
                         ring_kappa_for_rejection)
from .tuner import (CancellationSettings, Objective, OptimizerConfig,
                    TuningResult, compensate_coupler_phase, optimize,
                    synthesize_cancellation_settings)

__version__ = "0.1.0"
