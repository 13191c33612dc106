"""Outage, error-rate and capacity analysis of mobile THz links over alpha-F fading
with beam misalignment, random-waypoint mobility and molecular absorption."""

__version__ = "0.1.0"

from .channel import (
    AbsorptionTable,
    FadingParams,
    LinkConfig,
    MisalignmentParams,
    default_absorption_table,
    derive_constants,
    fading_constants,
    gamma0_of,
    kappa_of_f,
)
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    EmptyBatch,
    InvalidSpec,
    PoleError,
    PoleOnContour,
    RangeError,
    ThzafError,
)
from .foxh import ContourConfig, FoxHSpec, evaluate, make_spec
from .mcsim import SimConfig, estimate_metrics, simulate
from .metrics import (
    BPSK,
    MetricResult,
    ModulationCoeffs,
    Regime,
    asep,
    asep_asymptotic,
    capacity,
    capacity_asymptotic,
    outage,
    outage_asymptotic,
)
from .mobility import QuadratureRule, TopologyParams, gauss_legendre, topology
from .snrstats import SnrModel, build_model, link_config, snr_cdf, snr_mgf, snr_moment, snr_pdf
