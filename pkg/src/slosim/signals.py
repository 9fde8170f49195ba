"""Controller-facing telemetry: the (latency, queue, utilization, pending)
snapshot plus Holt linear demand forecasting."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .sim import ClusterState, ServiceModel, observe_latency

UTILIZATION_CAP = 1e6  # stands in for infinity when no replica is ready


@dataclass(frozen=True)
class SignalSnapshot:
    t: float
    latency: float          # smoothed latency, the SLO (p95 proxy) signal
    queue: float            # request backlog
    utilization: float      # offered load / ready capacity, unbounded above
    pending: int            # replicas that could not be scheduled
    arrival_rate: float     # requests/second observed this interval
    ready_replicas: int


def utilization(arrival_rate: float, ready_replicas: int, mu: float) -> float:
    if ready_replicas == 0:
        return UTILIZATION_CAP if arrival_rate > 0 else 0.0
    return arrival_rate / (ready_replicas * mu)


def sample(cluster: ClusterState, arrival_rate: float, model: ServiceModel,
           prev_latency: float | None = None,
           smoothing: float = 0.5) -> SignalSnapshot:
    """Build a snapshot, EWMA-smoothing latency against the previous sample."""
    raw = observe_latency(cluster, arrival_rate, model)
    if prev_latency is None:
        lat = raw
    else:
        lat = smoothing * raw + (1.0 - smoothing) * prev_latency
    return SignalSnapshot(
        t=cluster.time,
        latency=lat,
        queue=cluster.queue_depth,
        utilization=utilization(arrival_rate, cluster.ready_replicas,
                                model.per_replica_rate),
        pending=cluster.pending_replicas,
        arrival_rate=arrival_rate,
        ready_replicas=cluster.ready_replicas,
    )


@dataclass(frozen=True)
class ForecastState:
    """Holt linear (double exponential) smoothing state."""

    level: float = 0.0
    trend: float = 0.0   # rate change per update step
    alpha: float = 0.5
    beta: float = 0.3
    primed: bool = False

    def __post_init__(self):
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1):
            raise ValueError("alpha and beta must be in [0, 1]")


def forecast_update(f: ForecastState, observed_rate: float) -> ForecastState:
    if observed_rate < 0:
        raise ValueError("observed_rate must be >= 0")
    if not f.primed:
        return replace(f, level=observed_rate, trend=0.0, primed=True)
    level = f.alpha * observed_rate + (1.0 - f.alpha) * (f.level + f.trend)
    trend = f.beta * (level - f.level) + (1.0 - f.beta) * f.trend
    return replace(f, level=level, trend=trend)


def forecast_horizon(f: ForecastState, h: float, dt: float) -> float:
    """Rate expected h seconds ahead; dt is the update-step length."""
    if h < 0:
        raise ValueError("h must be >= 0")
    return max(0.0, f.level + f.trend * (h / dt))
