"""Interaction-free polarimetry toolkit.

Simulates the chained quantum-Zeno interferometer protocol for measuring a
sample's diattenuation with minimal photon absorption, reconstructs
per-pixel diattenuator parameters from heralded coincidence counts, and
computes the protocol's signal-to-noise figures of merit.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DomainError,
    IncompleteDataError,
    PassivityError,
    PolarimetryError,
    StokesConsistencyError,
)
from .polarization import (
    BASES,
    BASIS_STATES,
    PROBE_ORDER,
    PROBES,
    Diattenuator,
    JonesVector,
    MuellerMatrix,
    ProbeState,
    StokesVector,
    analyzer_intensity,
    apply_mueller,
    basis_rotation_jones,
    degree_of_polarization,
    diattenuator_mueller,
    mueller_from_36_intensities,
    probe_jones,
    probe_stokes,
    stokes_from_intensities,
    stokes_from_jones,
)
from .zeno import (
    AbsorberModel,
    PathState,
    RunOutcome,
    ZenoParams,
    beamsplitter_rotation,
    cycle_block_probability,
    discrimination_signal,
    initial_state,
    object_channel,
    run_protocol,
    run_protocol_mc,
)
from .stats import (
    SnrReport,
    SourceKind,
    SourceModel,
    f_factor,
    g_factor,
    mean_absorption,
    sample_photon_number,
    sample_photon_numbers,
    snr_classical,
    snr_report,
)
from .protocol import (
    HERALD_DETECTORS,
    BlockEstimate,
    CoincidenceTable,
    DiattenuatorEstimate,
    ReconstructionResult,
    SampleModel,
    ScenarioConfig,
    effective_block_probability,
    estimate_block_probability,
    probe_for_detector,
    reconstruct_diattenuator,
    reconstruct_image,
    simulate_heralded_run,
)
from .config import load_sample_grid, load_scenario
from .rng import substream
