"""Scenario configuration: JSON loading, validation, serialization, bundled setups."""

from __future__ import annotations

import json
import numbers
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .core import (CostKind, CostWeights, ParameterSet, TimeGrid, TimeTable,
                   ValidationError, make_time_grid)
from . import models
from .costs import check_kind_weights
from .models import ModelId
from .solver import FbsSettings

__all__ = [
    "SCHEMA_ID",
    "SCENARIO_DIR_ENV",
    "SweepSpec",
    "ScenarioConfig",
    "load_scenario",
    "load_scenario_file",
    "scenario_to_dict",
    "save_scenario",
    "builtin_scenarios",
    "builtin_scenario_names",
    "get_scenario",
    "find_scenario",
    "sweep_points",
]

SCHEMA_ID = "tbctrl-scenario/1"
SCENARIO_DIR_ENV = "TBCTRL_SCENARIO_DIR"

_BUILTIN_FILES = (
    "seirs-fig1",
    "seirs-fig2-sweep",
    "seirs-fig3-sweep",
    "seirs-fig4-sweep",
    "seirs-fig5-sweep",
    "seirs-fig6-sweep",
)


@dataclass(frozen=True)
class SweepSpec:
    """One swept quantity (scalar form) or per-point override mappings."""

    parameter: str | None
    values: tuple[Any, ...]

    def labels(self) -> tuple[str, ...]:
        out = []
        for v in self.values:
            if isinstance(v, Mapping):
                out.append(",".join(f"{k}={_fmt(val)}" for k, val in v.items()))
            else:
                out.append(f"{self.parameter}={_fmt(v)}")
        return tuple(out)


def _fmt(v) -> str:
    return f"{v:g}" if isinstance(v, numbers.Real) else str(v)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed for one solve."""

    name: str
    model: ModelId
    params: ParameterSet
    initial_mode: str                 # "fractions" | "counts"
    initial_values: tuple[float, ...]
    grid: TimeGrid
    cost_kind: CostKind
    weights: CostWeights
    fbs: FbsSettings
    population: float | None = None   # reference N for fraction mode
    sweep: SweepSpec | None = None

    def reference_population(self) -> float:
        if self.population is not None:
            return self.population
        if self.params.has("N"):
            return self.params.value("N")
        raise ValidationError(
            f"scenario {self.name!r}: fraction-mode initial state needs a 'total' "
            "population or an N parameter")

    def initial_state(self) -> np.ndarray:
        vals = np.array(self.initial_values, dtype=float)
        if self.initial_mode == "fractions":
            return vals * self.reference_population()
        return vals


def _require_mapping(obj, path: str) -> Mapping:
    if not isinstance(obj, Mapping):
        raise ValidationError(f"{path}: expected an object, got {type(obj).__name__}")
    return obj


def _reject_unknown(obj: Mapping, allowed: set[str], path: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"{path}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _number(obj, path: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, numbers.Real):
        raise ValidationError(f"{path}: expected a number, got {obj!r}")
    return float(obj)


def _fraction_value(obj, path: str) -> Fraction:
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"{path}: cannot parse fraction {obj!r}") from None
    return Fraction(_number(obj, path))


def _parse_parameters(obj, path: str) -> ParameterSet:
    obj = _require_mapping(obj, path)
    out: dict[str, float | TimeTable] = {}
    for name, v in obj.items():
        sub = f"{path}.{name}"
        if isinstance(v, Mapping):
            _reject_unknown(v, {"times", "values"}, sub)
            if "times" not in v or "values" not in v:
                raise ValidationError(f"{sub}: time table needs 'times' and 'values'")
            times = [_number(t, f"{sub}.times") for t in v["times"]]
            values = [_number(t, f"{sub}.values") for t in v["values"]]
            out[name] = TimeTable(tuple(times), tuple(values))
        else:
            out[name] = _number(v, sub)
    return ParameterSet(out)


def _parse_initial_state(obj, d, path: str):
    obj = _require_mapping(obj, path)
    _reject_unknown(obj, {"mode", "values", "total"}, path)
    mode = obj.get("mode", "fractions")
    if mode not in ("fractions", "counts"):
        raise ValidationError(f"{path}.mode: expected 'fractions' or 'counts', got {mode!r}")
    if "values" not in obj:
        raise ValidationError(f"{path}: missing 'values'")
    raw = obj["values"]
    if not isinstance(raw, (list, tuple)):
        raise ValidationError(f"{path}.values: expected a list")
    if len(raw) != d.state_dim:
        raise ValidationError(
            f"{path}.values: {d.id.value} has {d.state_dim} compartments "
            f"({', '.join(d.state_labels)}), got {len(raw)} values")
    total = None
    if "total" in obj:
        total = _number(obj["total"], f"{path}.total")
        if total <= 0:
            raise ValidationError(f"{path}.total: must be positive")
    if mode == "fractions":
        fracs = [_fraction_value(v, f"{path}.values[{i}]") for i, v in enumerate(raw)]
        if any(f < 0 for f in fracs):
            raise ValidationError(f"{path}.values: fractions must be nonnegative")
        s = sum(fracs)
        if abs(float(s) - 1.0) > 1e-9:
            raise ValidationError(f"{path}.values: initial fractions must sum to 1, got {float(s)!r}")
        values = tuple(float(f) for f in fracs)
    else:
        values = tuple(_number(v, f"{path}.values[{i}]") for i, v in enumerate(raw))
        if any(v < 0 for v in values):
            raise ValidationError(f"{path}.values: counts must be nonnegative")
    return mode, values, total


def _parse_cost(obj, d, path: str) -> tuple[CostKind, CostWeights]:
    obj = _require_mapping(obj, path)
    _reject_unknown(obj, {"kind", "a1", "a2", "a_isolated", "b", "bounds"}, path)
    kind_raw = obj.get("kind", d.cost_kind.value)
    try:
        kind = CostKind(kind_raw)
    except ValueError:
        raise ValidationError(f"{path}.kind: expected one of C1/C2/C3, got {kind_raw!r}") from None
    if kind in (CostKind.C1, CostKind.C2) and "a1" not in obj:
        raise ValidationError(f"{path}: cost kind {kind.value} requires 'a1'")
    if kind in (CostKind.C1, CostKind.C3) and "a2" not in obj:
        raise ValidationError(f"{path}: cost kind {kind.value} requires 'a2'")
    if "b" not in obj:
        raise ValidationError(f"{path}: missing 'b' (control effort weights)")
    b_raw = obj["b"]
    if isinstance(b_raw, numbers.Real) and not isinstance(b_raw, bool):
        b = (float(b_raw),)
    elif isinstance(b_raw, (list, tuple)):
        b = tuple(_number(v, f"{path}.b[{i}]") for i, v in enumerate(b_raw))
    else:
        raise ValidationError(f"{path}.b: expected a number or list of numbers")
    if len(b) != d.control_dim:
        raise ValidationError(
            f"{path}.b: {d.id.value} has {d.control_dim} control(s), got {len(b)} weights")
    lower, upper = 0.0, 1.0
    if "bounds" in obj:
        bounds = obj["bounds"]
        if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
            raise ValidationError(f"{path}.bounds: expected [lower, upper]")
        lower = _number(bounds[0], f"{path}.bounds[0]")
        upper = _number(bounds[1], f"{path}.bounds[1]")
    try:
        weights = CostWeights(
            a1=_number(obj.get("a1", 0.0), f"{path}.a1"),
            a2=_number(obj.get("a2", 0.0), f"{path}.a2"),
            b=b,
            a_isolated=_number(obj.get("a_isolated", 0.0), f"{path}.a_isolated"),
            lower=lower,
            upper=upper,
        )
        check_kind_weights(kind, weights)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    return kind, weights


def _parse_fbs(obj, path: str) -> FbsSettings:
    if obj is None:
        return FbsSettings()
    obj = _require_mapping(obj, path)
    _reject_unknown(obj, {"relaxation", "tolerance", "max_iterations", "initial_control"}, path)
    kwargs: dict[str, Any] = {}
    if "relaxation" in obj:
        kwargs["relaxation"] = _number(obj["relaxation"], f"{path}.relaxation")
    if "tolerance" in obj:
        kwargs["tolerance"] = _number(obj["tolerance"], f"{path}.tolerance")
    if "max_iterations" in obj:
        v = obj["max_iterations"]
        if isinstance(v, bool) or not isinstance(v, numbers.Integral):
            raise ValidationError(f"{path}.max_iterations: expected an integer, got {v!r}")
        kwargs["max_iterations"] = int(v)
    if "initial_control" in obj:
        v = obj["initial_control"]
        if isinstance(v, (list, tuple)):
            kwargs["initial_control"] = tuple(
                _number(x, f"{path}.initial_control[{i}]") for i, x in enumerate(v))
        else:
            kwargs["initial_control"] = _number(v, f"{path}.initial_control")
    try:
        return FbsSettings(**kwargs)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _parse_sweep(obj, d, path: str) -> SweepSpec:
    obj = _require_mapping(obj, path)
    _reject_unknown(obj, {"parameter", "values"}, path)
    if "values" not in obj or not isinstance(obj["values"], (list, tuple)):
        raise ValidationError(f"{path}: missing 'values' list")
    raw_values = obj["values"]
    if len(raw_values) == 0:
        raise ValidationError(f"{path}.values: sweep value list is empty")
    parameter = obj.get("parameter")
    values: list[Any] = []
    for i, v in enumerate(raw_values):
        if isinstance(v, Mapping):
            values.append({k: _number(x, f"{path}.values[{i}].{k}") for k, x in v.items()})
        else:
            if parameter is None:
                raise ValidationError(
                    f"{path}: scalar sweep values need a 'parameter' name")
            values.append(_number(v, f"{path}.values[{i}]"))
    return SweepSpec(parameter=parameter, values=tuple(values))


def load_scenario(document: str | bytes | Mapping[str, Any]) -> ScenarioConfig:
    """Parse and fully validate a scenario document (JSON text or mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"scenario document is not valid JSON: {exc}") from None
    else:
        doc = document
    doc = _require_mapping(doc, "$")
    _reject_unknown(doc, {"schema", "name", "model", "parameters", "initial_state",
                          "grid", "cost", "fbs", "sweep"}, "$")
    schema = doc.get("schema")
    if schema != SCHEMA_ID:
        raise ValidationError(f"$.schema: expected {SCHEMA_ID!r}, got {schema!r}")
    for key in ("model", "parameters", "initial_state", "grid", "cost"):
        if key not in doc:
            raise ValidationError(f"$: missing required key {key!r}")
    try:
        model = ModelId(doc["model"])
    except ValueError:
        known = ", ".join(m.value for m in ModelId)
        raise ValidationError(f"$.model: unknown model {doc['model']!r}; known: {known}") from None
    d = models.model_definition(model)

    params = _parse_parameters(doc["parameters"], "$.parameters")
    violations = models.validate_params(model, params)
    if violations:
        raise ValidationError("$.parameters: " + "; ".join(violations))

    mode, values, total = _parse_initial_state(doc["initial_state"], d, "$.initial_state")
    gobj = _require_mapping(doc["grid"], "$.grid")
    _reject_unknown(gobj, {"t0", "tf", "n_steps"}, "$.grid")
    for key in ("t0", "tf", "n_steps"):
        if key not in gobj:
            raise ValidationError(f"$.grid: missing {key!r}")
    nst = gobj["n_steps"]
    if isinstance(nst, bool) or not isinstance(nst, numbers.Integral):
        raise ValidationError(f"$.grid.n_steps: expected an integer, got {nst!r}")
    try:
        grid = make_time_grid(_number(gobj["t0"], "$.grid.t0"),
                              _number(gobj["tf"], "$.grid.tf"), int(nst))
    except ValidationError as exc:
        raise ValidationError(f"$.grid: {exc}") from None

    kind, weights = _parse_cost(doc["cost"], d, "$.cost")
    fbs = _parse_fbs(doc.get("fbs"), "$.fbs")
    sweep = _parse_sweep(doc["sweep"], d, "$.sweep") if "sweep" in doc else None

    config = ScenarioConfig(
        name=str(doc.get("name", "scenario")),
        model=model,
        params=params,
        initial_mode=mode,
        initial_values=values,
        grid=grid,
        cost_kind=kind,
        weights=weights,
        fbs=fbs,
        population=total,
        sweep=sweep,
    )
    if mode == "fractions":
        config.reference_population()  # fails early with a clear message
    if sweep is not None:
        for label, _ in sweep_points(config):
            pass  # applying every sweep point validates the override targets
    return config


def load_scenario_file(path: str | os.PathLike) -> ScenarioConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return load_scenario(text)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _param_to_json(v: float | TimeTable):
    if isinstance(v, TimeTable):
        return {"times": list(v.times), "values": list(v.values)}
    return v


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Serialize a config back to the published document shape."""
    doc: dict[str, Any] = {
        "schema": SCHEMA_ID,
        "name": config.name,
        "model": config.model.value,
        "parameters": {k: _param_to_json(v) for k, v in config.params.as_dict().items()},
        "initial_state": {"mode": config.initial_mode, "values": list(config.initial_values)},
        "grid": {"t0": config.grid.t0, "tf": config.grid.tf, "n_steps": config.grid.n_steps},
        "cost": {
            "kind": config.cost_kind.value,
            "a1": config.weights.a1,
            "a2": config.weights.a2,
            "a_isolated": config.weights.a_isolated,
            "b": list(config.weights.b),
            "bounds": [config.weights.lower, config.weights.upper],
        },
        "fbs": {
            "relaxation": config.fbs.relaxation,
            "tolerance": config.fbs.tolerance,
            "max_iterations": config.fbs.max_iterations,
            "initial_control": (list(config.fbs.initial_control)
                                if isinstance(config.fbs.initial_control, tuple)
                                else config.fbs.initial_control),
        },
    }
    if config.population is not None:
        doc["initial_state"]["total"] = config.population
    if config.sweep is not None:
        sweep: dict[str, Any] = {"values": [dict(v) if isinstance(v, Mapping) else v
                                            for v in config.sweep.values]}
        if config.sweep.parameter is not None:
            sweep["parameter"] = config.sweep.parameter
        doc["sweep"] = sweep
    return doc


def save_scenario(config: ScenarioConfig, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(config), indent=2) + "\n",
                          encoding="utf-8")


def _apply_override(config: ScenarioConfig, key: str, value: float) -> ScenarioConfig:
    if key.startswith("cost."):
        field = key[5:]
        w = config.weights
        if field in ("a1", "a2", "a_isolated"):
            w = replace(w, **{field: float(value)})
        elif field.startswith("b") and field[1:].isdigit():
            idx = int(field[1:]) - 1
            if not 0 <= idx < len(w.b):
                raise ValidationError(f"sweep target {key!r}: index out of range")
            b = list(w.b)
            b[idx] = float(value)
            w = replace(w, b=tuple(b))
        else:
            raise ValidationError(f"sweep target {key!r}: unknown cost field")
        check_kind_weights(config.cost_kind, w)
        return replace(config, weights=w)
    d = models.model_definition(config.model)
    if key not in d.required_params:
        raise ValidationError(
            f"sweep target {key!r} is not a parameter of {config.model.value}")
    return replace(config, params=config.params.with_updates({key: float(value)}))


def sweep_points(config: ScenarioConfig) -> list[tuple[str, ScenarioConfig]]:
    """Materialize one labelled sub-scenario per sweep value."""
    if config.sweep is None:
        raise ValidationError(f"scenario {config.name!r} declares no sweep")
    out = []
    for label, value in zip(config.sweep.labels(), config.sweep.values):
        sub = replace(config, sweep=None, name=f"{config.name}[{label}]")
        if isinstance(value, Mapping):
            for k, v in value.items():
                sub = _apply_override(sub, k, v)
        else:
            sub = _apply_override(sub, config.sweep.parameter, value)
        violations = models.validate_params(sub.model, sub.params)
        if violations:
            raise ValidationError(f"sweep point {label!r}: " + "; ".join(violations))
        out.append((label, sub))
    return out


def builtin_scenario_names() -> tuple[str, ...]:
    return _BUILTIN_FILES


def builtin_scenarios() -> dict[str, ScenarioConfig]:
    """Bundled setups: the flagship run plus the standard sweep families."""
    out = {}
    for name in _BUILTIN_FILES:
        text = resources.files("tbctrl.scenarios").joinpath(f"{name}.json").read_text("utf-8")
        out[name] = load_scenario(text)
    return out


def get_scenario(name: str) -> ScenarioConfig:
    """Look up a bundled scenario; short aliases like 'fig4-sweep' are accepted."""
    candidates = {name, f"seirs-{name}"}
    for full in _BUILTIN_FILES:
        if full in candidates:
            text = resources.files("tbctrl.scenarios").joinpath(f"{full}.json").read_text("utf-8")
            return load_scenario(text)
    raise ValidationError(
        f"unknown scenario {name!r}; bundled scenarios: {', '.join(_BUILTIN_FILES)}")


def find_scenario(ref: str) -> ScenarioConfig:
    """Resolve a CLI scenario reference: path, then $TBCTRL_SCENARIO_DIR, then bundled."""
    path = Path(ref)
    if path.exists():
        return load_scenario_file(path)
    env_dir = os.environ.get(SCENARIO_DIR_ENV)
    if env_dir:
        for cand in (Path(env_dir) / ref, Path(env_dir) / f"{ref}.json"):
            if cand.exists():
                return load_scenario_file(cand)
    try:
        return get_scenario(ref)
    except ValidationError:
        raise FileNotFoundError(
            f"scenario {ref!r} not found as a file, under ${SCENARIO_DIR_ENV}, "
            f"or among bundled scenarios ({', '.join(_BUILTIN_FILES)})") from None
