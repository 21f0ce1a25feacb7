"""Sampling and reconstruction of continuous time-vertex graph signals.

Correlated multichannel signals are sampled below the per-channel Nyquist
budget by decorrelating them in the graph-frequency domain of their
covariance graph and spending rate only on what each stage cannot
already infer.
"""

from .division import (
    AdmissibleSequence,
    DivisionChain,
    SpaceKind,
    build_admissible_sequence,
    build_division_chain,
    classify_space,
    e_vector,
    extension_matrix,
    find_uniqueness_set,
)
from .errors import (
    AliasingError,
    ConditioningError,
    DataError,
    DegenerateStageError,
    IncompleteSamplesError,
    InvalidArgumentError,
    MetricError,
    NumericError,
    ParseError,
    RankDeficientError,
    SamplingError,
    StageError,
)
from .experiment import ExperimentConfig, generate_synthetic, run_experiment, synthesize, synthesize_general
from .graph import (
    GftBasis,
    GraphSpec,
    Grid,
    TimeVertexSignal,
    build_covariance_graph,
    eigendecompose,
    gft,
    igft,
)
from .io import ingest_csv, read_plan, write_plan, write_signal_csv
from .oracle import (
    least_squares_oracle,
    lemma4_check,
    nrmse,
    recoverability_test,
    separate_baseline,
)
from .planner import (
    Plan,
    SamplingSchedule,
    build_schedule,
    make_plan,
    min_rate_equal,
    min_rate_general,
    min_rate_simple,
    sampling_rate_of,
)
from .reconstruction import (
    decompose_general,
    extract_samples,
    reconstruct_equal,
    reconstruct_general,
    reconstruct_stage,
    sample_and_reconstruct_general,
)
from .spectral import (
    BandwidthProfile,
    bandwidth_profile,
    estimate_bandwidth,
    ideal_filter,
    lowpass,
    shannon_interpolate,
)

__version__ = "0.1.0"
