"""Trajectory PHD filtering for coexisting point and extended targets."""

from .config import ScenarioConfig, load_config
from .estimate import TrajectoryEstimate, extract
from .exceptions import ConfigError, DomainError, GtphdError, SingularMatrixError, StructureError
from .filter import VARIANTS, build_setup, filter_step, run_filter
from .metrics import MetricConfig, MetricResult, Track, rms_over_runs, trajectory_metric
from .models import (
    BirthModel,
    GgiwComponent,
    MeasurementModel,
    MotionModel,
    PhdMixture,
    TrajectoryGaussian,
    UniformClutter,
    mixture_from_json,
    mixture_to_json,
    total_mass,
)
from .partition import dbscan_sweep
from .predict import predict
from .reduce import lscan_apply, prune_absorb
from .update import UpdateDiagnostics, update

__version__ = "0.1.0"
