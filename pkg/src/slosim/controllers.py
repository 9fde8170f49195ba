"""Autoscaling policies: ratio-rule HPA baselines, an HPA+VPA variant, and
the five-stage SLO- and cost-aware pipeline.

Every decision produces a DecisionRecord carrying the intermediate stage
outputs and every guardrail that fired, so a run's audit log fully explains
each replica change.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

from .signals import ForecastState, SignalSnapshot, forecast_horizon, forecast_update
from .sim import ClusterState

CONTROLLER_KINDS = ("default_hpa", "tuned_hpa", "hpa_vpa", "proposed")

# constraint tags recorded in DecisionRecord.constraints_applied
BOUND_CLAMP = "bound_clamp"
STEP_LIMIT = "step_limit"
STABILIZATION_HOLD = "stabilization_hold"
COOLDOWN_HOLD = "cooldown_hold"
COST_FLOOR = "cost_floor"
TOLERANCE_SKIP = "tolerance_skip"


@dataclass(frozen=True)
class ControllerConfig:
    min_replicas: int = 1
    max_replicas: int = 50
    control_interval: float = 15.0
    slo_latency_target: float = 0.2
    cpu_target: float = 0.5              # baselines only
    tolerance_band: float = 0.10
    max_step_up: int = 20
    max_step_down: int = 20
    scale_up_stabilization: float = 0.0
    scale_down_stabilization: float = 120.0
    cooldown_after_scale_up: float = 60.0
    drain_window: float = 30.0
    target_utilization: float = 0.7      # SLO headroom for the capacity floor
    cost_per_replica_hour: float = 0.1
    cost_per_node_hour: float = 1.0
    max_nodes: int = 10
    forecast_alpha: float = 0.5
    forecast_beta: float = 0.3
    pod_start_delay: float = 15.0        # forecast horizon for demand estimation

    def __post_init__(self):
        if self.min_replicas < 1:
            raise ValueError("min_replicas must be >= 1")
        if self.max_replicas < self.min_replicas:
            raise ValueError("max_replicas must be >= min_replicas")
        if self.control_interval <= 0:
            raise ValueError("control_interval must be > 0")
        for name in ("scale_up_stabilization", "scale_down_stabilization",
                     "cooldown_after_scale_up", "drain_window"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class ScalingAction:
    target_replicas: int
    node_capacity_hint: int | None = None   # slots needed beyond current capacity
    vpa_recommendation: float | None = None  # advisory resource request, never applied


@dataclass(frozen=True)
class DecisionRecord:
    t: float
    snapshot: SignalSnapshot
    slo_demand: int
    backlog_adjusted: int
    pre_guardrail: int
    post_guardrail: int
    constraints_applied: tuple[str, ...]
    action: ScalingAction
    reason: str


# --------------------------------------------------------------------------
# stage formulas (pure functions; also exercised directly by tests)
# --------------------------------------------------------------------------

def hpa_desired(current: int, metric: float, target: float,
                tolerance: float) -> int:
    """Standard ratio rule: scale replicas by metric/target outside the band."""
    if current < 1:
        raise ValueError("current must be >= 1")
    if target <= 0:
        raise ValueError("target must be > 0")
    ratio = metric / target
    if abs(ratio - 1.0) <= tolerance:
        return current
    return math.ceil(current * ratio)


def estimate_slo_demand(s: SignalSnapshot, cfg: ControllerConfig,
                        predicted_rate: float, mu: float) -> int:
    """Stage 2: replica requirement from forecast capacity and SLO severity."""
    n_cap = math.ceil(predicted_rate / (mu * cfg.target_utilization))
    if s.latency > cfg.slo_latency_target:
        severity = max(1.0, s.latency / cfg.slo_latency_target)
        return max(n_cap, math.ceil(s.ready_replicas * severity))
    return n_cap


def adjust_for_backlog(n: int, s: SignalSnapshot, cfg: ControllerConfig,
                       mu: float) -> int:
    """Stage 3: enough replicas to drain the backlog within drain_window."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if s.queue <= 0:
        return n
    n_drain = math.ceil(s.arrival_rate / mu + s.queue / (mu * cfg.drain_window))
    return max(n, n_drain)


@dataclass
class GuardrailState:
    """Stabilization window and cooldown bookkeeping for one controller."""

    candidates: deque = field(default_factory=deque)  # (t, candidate replicas)
    last_scale_up_t: float = -math.inf

    def record_candidate(self, t: float, candidate: int):
        self.candidates.append((t, candidate))
        horizon = t - 3600.0  # generous retention; windows are far shorter
        while self.candidates and self.candidates[0][0] < horizon:
            self.candidates.popleft()

    def window(self, t: float, length: float) -> list[int]:
        return [c for (ct, c) in self.candidates if ct >= t - length]


def enforce_guardrails(candidate: int, current: int, cfg: ControllerConfig,
                       history: GuardrailState, now: float
                       ) -> tuple[int, list[str]]:
    """Stage 4: cooldown, stabilization window, step limit, hard bounds."""
    if candidate < 0:
        raise ValueError("candidate must be >= 0")
    constraints: list[str] = []
    history.record_candidate(now, candidate)
    value = candidate

    if value < current and now - history.last_scale_up_t < cfg.cooldown_after_scale_up:
        value = current
        constraints.append(COOLDOWN_HOLD)
    elif value > current:
        window = history.window(now, cfg.scale_up_stabilization)
        damped = min(window) if window else value
        if damped != value:
            constraints.append(STABILIZATION_HOLD)
        value = max(damped, current)  # never turn a scale-up into a scale-down
    elif value < current:
        window = history.window(now, cfg.scale_down_stabilization)
        damped = max(window) if window else value
        if damped != value:
            constraints.append(STABILIZATION_HOLD)
        value = min(damped, current)

    if value > current and value - current > cfg.max_step_up:
        value = current + cfg.max_step_up
        constraints.append(STEP_LIMIT)
    elif value < current and current - value > cfg.max_step_down:
        value = current - cfg.max_step_down
        constraints.append(STEP_LIMIT)

    clamped = min(max(value, cfg.min_replicas), cfg.max_replicas)
    if clamped != value:
        constraints.append(BOUND_CLAMP)
    if clamped > current:
        history.last_scale_up_t = now
    return clamped, constraints


def coordinate_actuation(target: int, cluster: ClusterState,
                         cfg: ControllerConfig, node_capacity: int
                         ) -> tuple[int | None, str]:
    """Stage 5: emit a node capacity hint when the target is unschedulable."""
    # starting replicas already hold slots, so they count toward the target
    shortfall = max(0, target - cluster.total_replicas - cluster.free_slots)
    if shortfall <= 0:
        return None, ""
    if cluster.live_nodes >= cfg.max_nodes:
        return None, "capacity shortfall but node limit reached"
    whole_nodes = math.ceil(shortfall / node_capacity)
    return whole_nodes * node_capacity, f"hinting {whole_nodes} node(s)"


def vpa_recommend(usage_history: list[float],
                  current_request: float = 1.0) -> float | None:
    """Recommend p90 observed usage with a 15% safety margin; advisory only."""
    if not usage_history:
        return None
    ordered = sorted(usage_history)
    idx = min(len(ordered) - 1, math.ceil(0.9 * len(ordered)) - 1)
    return ordered[idx] * current_request * 1.15


# --------------------------------------------------------------------------
# controllers
# --------------------------------------------------------------------------

def cpu_metric(s: SignalSnapshot, mu: float, interval: float) -> float:
    """Busy-fraction CPU proxy the baselines scale on.

    Replicas stay busy while a backlog exists, and measured CPU cannot
    exceed 100%, so the signal saturates at 1.0 under overload.
    """
    if s.ready_replicas == 0:
        return 1.0
    demand = s.arrival_rate + s.queue / interval
    return min(1.0, demand / (s.ready_replicas * mu))


class HpaController:
    """Ratio-rule autoscaler on the CPU proxy (default and tuned variants)."""

    emits_node_hints = False

    def __init__(self, cfg: ControllerConfig, mu: float,
                 with_vpa: bool = False):
        self.cfg = cfg
        self.mu = mu
        self.with_vpa = with_vpa
        self.history = GuardrailState()
        self.target: int | None = None
        self.usage: list[float] = []

    def decide(self, s: SignalSnapshot, cluster: ClusterState) -> DecisionRecord:
        cfg = self.cfg
        if self.target is None:
            self.target = max(cfg.min_replicas, cluster.total_replicas)
        current = self.target
        metric = cpu_metric(s, self.mu, cfg.control_interval)
        self.usage.append(metric)
        desired = hpa_desired(current, metric, cfg.cpu_target, cfg.tolerance_band)
        constraints: list[str] = []
        if desired == current and abs(metric / cfg.cpu_target - 1.0) <= cfg.tolerance_band \
                and metric != cfg.cpu_target:
            constraints.append(TOLERANCE_SKIP)
        final, guard = enforce_guardrails(desired, current, cfg, self.history, s.t)
        constraints.extend(guard)
        self.target = final
        vpa = vpa_recommend(self.usage) if self.with_vpa else None
        reason = _describe(final, current, constraints,
                           f"cpu {metric:.2f} vs target {cfg.cpu_target:.2f}")
        return DecisionRecord(
            t=s.t, snapshot=s, slo_demand=desired, backlog_adjusted=desired,
            pre_guardrail=desired, post_guardrail=final,
            constraints_applied=tuple(constraints),
            action=ScalingAction(final, vpa_recommendation=vpa),
            reason=reason)


class SloCostController:
    """The five-stage SLO- and cost-aware decision pipeline."""

    emits_node_hints = True

    def __init__(self, cfg: ControllerConfig, mu: float, node_capacity: int):
        self.cfg = cfg
        self.mu = mu
        self.node_capacity = node_capacity
        self.history = GuardrailState()
        self.forecast = ForecastState(alpha=cfg.forecast_alpha,
                                      beta=cfg.forecast_beta)
        self.target: int | None = None

    def decide(self, s: SignalSnapshot, cluster: ClusterState) -> DecisionRecord:
        cfg = self.cfg
        if self.target is None:
            self.target = max(cfg.min_replicas, cluster.total_replicas)
        current = self.target

        # stage 1 is the snapshot itself; fold the observation into the forecast
        self.forecast = forecast_update(self.forecast, s.arrival_rate)
        predicted = forecast_horizon(self.forecast, cfg.pod_start_delay,
                                     cfg.control_interval)
        predicted = max(predicted, s.arrival_rate)  # never plan below what we see

        slo_demand = estimate_slo_demand(s, cfg, predicted, self.mu)
        backlog_adjusted = adjust_for_backlog(slo_demand, s, cfg, self.mu)
        candidate = backlog_adjusted

        constraints: list[str] = []
        if candidate != current and current > 0 \
                and abs(candidate / current - 1.0) <= cfg.tolerance_band:
            candidate = current
            constraints.append(TOLERANCE_SKIP)

        final, guard = enforce_guardrails(candidate, current, cfg,
                                          self.history, s.t)
        constraints.extend(guard)
        if final < current:
            constraints.append(COST_FLOOR)  # settling on the cheapest SLO-safe size
        self.target = final

        hint, hint_note = coordinate_actuation(final, cluster, cfg,
                                               self.node_capacity)
        reason = _describe(
            final, current, constraints,
            f"latency {s.latency:.3f}s vs SLO {cfg.slo_latency_target:.3f}s, "
            f"queue {s.queue:.0f}, predicted {predicted:.1f} rps")
        if hint_note:
            reason += f"; {hint_note}"
        return DecisionRecord(
            t=s.t, snapshot=s, slo_demand=slo_demand,
            backlog_adjusted=backlog_adjusted, pre_guardrail=backlog_adjusted,
            post_guardrail=final, constraints_applied=tuple(constraints),
            action=ScalingAction(final, node_capacity_hint=hint),
            reason=reason)


def _describe(final: int, current: int, constraints: list[str],
              signal_note: str) -> str:
    if final > current:
        verb = f"scale up {current}->{final}"
    elif final < current:
        verb = f"scale down {current}->{final}"
    else:
        verb = f"hold at {current}"
    if constraints:
        verb += " (" + ", ".join(constraints) + ")"
    return f"{verb}: {signal_note}"


def baseline_config(kind: str, cfg: ControllerConfig) -> ControllerConfig:
    """Fixed baseline parameterizations layered over the shared config."""
    unlimited = cfg.max_replicas  # effectively no step limit
    if kind == "default_hpa" or kind == "hpa_vpa":
        return replace(cfg, cpu_target=0.5, scale_up_stabilization=0.0,
                       scale_down_stabilization=300.0,
                       cooldown_after_scale_up=0.0,
                       max_step_up=unlimited, max_step_down=unlimited)
    if kind == "tuned_hpa":
        # hand-tuned for responsiveness: lower CPU threshold scales earlier,
        # shorter scale-down window releases burst overshoot sooner
        return replace(cfg, cpu_target=0.35, scale_up_stabilization=0.0,
                       scale_down_stabilization=120.0,
                       cooldown_after_scale_up=0.0,
                       max_step_up=8, max_step_down=unlimited)
    raise ValueError(f"not a baseline kind: {kind}")


def make_controller(kind: str, cfg: ControllerConfig, mu: float,
                    node_capacity: int):
    if kind == "proposed":
        return SloCostController(cfg, mu, node_capacity)
    if kind in ("default_hpa", "tuned_hpa", "hpa_vpa"):
        return HpaController(baseline_config(kind, cfg), mu,
                             with_vpa=(kind == "hpa_vpa"))
    raise ValueError(f"unknown controller kind {kind!r}")
