"""Scenario documents: the single JSON file describing one experiment.

Parsing is fail-closed: unknown keys, wrong types, and violated invariants
are all rejected with an error naming the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .controllers import CONTROLLER_KINDS, ControllerConfig
from .sim import ClusterParams, ServiceModel
from .workload import KINDS, WorkloadSpec

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid scenario document."""


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    horizon: float
    tick: float = 1.0
    seed: int = 0
    repeats: int = 1
    workload: WorkloadSpec = field(default_factory=lambda: WorkloadSpec("bursty"))
    service: ServiceModel = field(
        default_factory=lambda: ServiceModel(10.0, 0.05, 5.0))
    cluster: ClusterParams = field(default_factory=ClusterParams)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    controllers: tuple[str, ...] = CONTROLLER_KINDS

    def __post_init__(self):
        if self.horizon <= 0:
            raise ConfigError("horizon: must be > 0")
        if self.tick <= 0:
            raise ConfigError("tick: must be > 0")
        ratio = self.controller.control_interval / self.tick
        if abs(ratio - round(ratio)) > 1e-9:
            raise ConfigError(
                f"controller.control_interval: {self.controller.control_interval} "
                f"is not a multiple of tick {self.tick}")
        if self.repeats < 1:
            raise ConfigError("repeats: must be >= 1")
        for kind in self.controllers:
            if kind not in CONTROLLER_KINDS:
                raise ConfigError(f"controllers: unknown kind {kind!r}")


_TOP_KEYS = {"schema", "name", "horizon", "tick", "seed", "repeats",
             "workload", "service", "cluster", "controller", "controllers"}
_WORKLOAD_KEYS = {"kind", "base_rate", "burst_amplitude", "burst_duration",
                  "burst_interval", "batch_fraction", "noise_std", "seed",
                  "ramps"}
_SERVICE_KEYS = {"per_replica_rate", "base_latency", "latency_cap"}
_CLUSTER_KEYS = {"initial_nodes", "node_capacity", "max_nodes",
                 "pod_start_delay", "node_provision_delay",
                 "node_idle_timeout"}
_CONTROLLER_KEYS = {
    "min_replicas", "max_replicas", "control_interval", "slo_latency_target",
    "cpu_target", "tolerance_band", "max_step_up", "max_step_down",
    "scale_up_stabilization", "scale_down_stabilization",
    "cooldown_after_scale_up", "drain_window", "target_utilization",
    "cost_per_replica_hour", "cost_per_node_hour", "forecast_alpha",
    "forecast_beta"}


def _check_keys(section: str, doc: dict, allowed: set[str]):
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(unknown)}")


def _number(section: str, doc: dict, key: str, default=None):
    if key not in doc:
        return default
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")
    return value


def _integer(section: str, doc: dict, key: str, default=None):
    value = _number(section, doc, key, default)
    if value is None:
        return None
    if value != int(value):
        raise ConfigError(f"{section}.{key}: expected an integer, got {value!r}")
    return int(value)


def _build(section: str, doc: dict, cls, allowed: set[str], integers: set[str],
           extra: dict | None = None):
    _check_keys(section, doc, allowed)
    kwargs = dict(extra or {})
    for key in doc:
        if extra and key in extra:
            continue
        if key in integers:
            kwargs[key] = _integer(section, doc, key)
        else:
            kwargs[key] = _number(section, doc, key)
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def parse_scenario(doc: dict) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("document: expected a JSON object")
    _check_keys("document", doc, _TOP_KEYS)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"schema: must be {SCHEMA_VERSION}")
    for req in ("name", "horizon", "workload"):
        if req not in doc:
            raise ConfigError(f"{req}: required field missing")
    if not isinstance(doc["name"], str) or not doc["name"]:
        raise ConfigError("name: must be a non-empty string")

    wdoc = doc["workload"]
    if not isinstance(wdoc, dict):
        raise ConfigError("workload: expected an object")
    _check_keys("workload", wdoc, _WORKLOAD_KEYS)
    if "kind" not in wdoc:
        raise ConfigError("workload.kind: required field missing")
    if wdoc["kind"] not in KINDS:
        raise ConfigError(f"workload.kind: unknown kind {wdoc['kind']!r}")
    ramps = wdoc.get("ramps", [])
    if not isinstance(ramps, list):
        raise ConfigError("workload.ramps: expected a list of [start, end, rate]")
    parsed_ramps = []
    for i, seg in enumerate(ramps):
        if not (isinstance(seg, (list, tuple)) and len(seg) == 3
                and all(isinstance(v, (int, float)) for v in seg)):
            raise ConfigError(
                f"workload.ramps[{i}]: expected [start, end, rate] numbers")
        if seg[1] <= seg[0] or seg[2] < 0:
            raise ConfigError(
                f"workload.ramps[{i}]: need start < end and rate >= 0")
        parsed_ramps.append(tuple(float(v) for v in seg))
    wkwargs = {"kind": wdoc["kind"], "ramps": tuple(parsed_ramps)}
    for key in wdoc:
        if key in ("kind", "ramps"):
            continue
        if key == "seed":
            wkwargs[key] = _integer("workload", wdoc, key)
        else:
            wkwargs[key] = _number("workload", wdoc, key)
    try:
        wspec = WorkloadSpec(**wkwargs)
    except ValueError as exc:
        raise ConfigError(f"workload: {exc}") from exc

    service = _build("service", doc.get("service", {}), ServiceModel,
                     _SERVICE_KEYS, integers=set()) \
        if "service" in doc else ServiceModel(10.0, 0.05, 5.0)
    cluster = _build("cluster", doc.get("cluster", {}), ClusterParams,
                     _CLUSTER_KEYS,
                     integers={"initial_nodes", "node_capacity", "max_nodes"}) \
        if "cluster" in doc else ClusterParams()
    try:
        controller = _build(
            "controller", doc.get("controller", {}), ControllerConfig,
            _CONTROLLER_KEYS,
            integers={"min_replicas", "max_replicas",
                      "max_step_up", "max_step_down"}) \
            if "controller" in doc else ControllerConfig()
    except ConfigError:
        raise

    controllers = doc.get("controllers", list(CONTROLLER_KINDS))
    if not (isinstance(controllers, list) and controllers
            and all(isinstance(c, str) for c in controllers)):
        raise ConfigError("controllers: expected a non-empty list of names")

    try:
        return ScenarioConfig(
            name=doc["name"],
            horizon=_number("document", doc, "horizon"),
            tick=_number("document", doc, "tick", 1.0),
            seed=_integer("document", doc, "seed", 0),
            repeats=_integer("document", doc, "repeats", 1),
            workload=wspec,
            service=service,
            cluster=cluster,
            controller=controller,
            controllers=tuple(controllers),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def bundled_scenario(name: str) -> ScenarioConfig:
    """Load one of the scenarios shipped with the package."""
    text = (resources.files("slosim") / "scenarios" / f"{name}.json").read_text()
    return parse_scenario(json.loads(text))


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_scenario(doc)
