"""radarmit: chirp-sequence radar interference simulation, CNN denoising
and mitigation benchmarking."""

from .config import (
    SPEED_OF_LIGHT,
    ImatParams,
    MetricParams,
    ScenarioRanges,
    ToolConfig,
    TrainParams,
    VictimRadarConfig,
    default_config,
    load_config,
)
from .sim import (
    IfFrame,
    InterfererParams,
    ObjectParams,
    Scenario,
    assemble_frame,
    make_frame,
    sample_scenario,
    synth_interference_component,
    synth_object_component,
)
from .chain import (
    RANGE_DOPPLER,
    RANGE_PROFILE,
    AngularSpectrum,
    SpectrumMatrix,
    angular_spectrum,
    doppler_dft,
    hann_window,
    range_dft,
    rd_maps,
)
from .classical import imat, rfmin, zeroing
from .metrics import (
    CellSets,
    MetricsReport,
    ScenarioMetrics,
    aggregate_cdf,
    cell_sets,
    evm_rd,
    sinr_as,
    sinr_rd,
)
from .pipeline import evaluate_scenario, run_eval

__version__ = "0.1.0"
