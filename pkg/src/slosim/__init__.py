"""Discrete-time cluster elasticity simulator with SLO- and cost-aware
autoscaling controllers and HPA-style baselines."""

__version__ = "0.1.0"

from .controllers import (  # noqa: F401
    CONTROLLER_KINDS,
    ControllerConfig,
    DecisionRecord,
    ScalingAction,
)
from .metrics import MetricsReport, build_report, compare  # noqa: F401
from .runner import RunTrace, run  # noqa: F401
from .scenario import ConfigError, ScenarioConfig, load_scenario  # noqa: F401
from .signals import ForecastState, SignalSnapshot  # noqa: F401
from .sim import Cluster, ClusterParams, ClusterState, ServiceModel  # noqa: F401
from .workload import WorkloadSpec, arrivals_at  # noqa: F401
