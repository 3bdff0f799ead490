"""Campaign configuration files.

A campaign is a JSON object::

    {
      "name": "static-switched-max",
      "model": {"name": "static_switched", "params": {"thresh": 0.9}},
      "spec": "package:specs/static_switched.stl",
      "semantics": "max",
      "max_iterations": 1000,
      "repetitions": 20,
      "seed": 0
    }

The formula comes from ``spec`` (a spec file, with optional
``spec_params``), ``formula`` (inline text) or ``graph`` (a block graph
translated with ``graph_mode`` and ``encoding``). Relative paths resolve
against the config file's directory; a ``package:`` prefix points into the
data shipped with this package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional

from .falsifier import AnnealingSettings, Campaign
from .inputs import Bound, input_from_dict
from .robustness import SemanticsConfig
from .stl import load_spec, parse_stl
from .sut import ExternalProcessModel, SutModel, make_model
from .transform import load_graph, translate

PACKAGE_PREFIX = "package:"

_KNOWN_KEYS = {
    "name", "model", "model_params", "spec", "spec_params", "formula", "graph", "graph_mode",
    "encoding", "semantics", "eq_constant", "implication_scale", "constant_magnitude",
    "max_iterations", "repetitions", "seed", "optimizer", "jobs", "description",
}


class ConfigError(ValueError):
    pass


@dataclass
class LoadedCampaign:
    campaign: Campaign
    jobs: int
    source: Optional[Path]


def resolve_path(ref: str, base: Optional[Path]) -> Path:
    if ref.startswith(PACKAGE_PREFIX):
        root = resources.files("vbstl") / "data"
        return Path(str(root.joinpath(ref[len(PACKAGE_PREFIX):])))
    p = Path(ref)
    if not p.is_absolute() and base is not None:
        p = base / p
    return p


def _model(doc: Mapping[str, Any]) -> SutModel:
    spec = doc.get("model")
    if isinstance(spec, str):
        name, params = spec, dict(doc.get("model_params", {}))
    elif isinstance(spec, Mapping):
        name, params = spec.get("name"), dict(spec.get("params", {}))
    else:
        raise ConfigError("'model' must be a name or an object with 'name' and 'params'")
    if name == "external":
        return _external(params)
    for key, value in params.items():
        if isinstance(value, list):
            params[key] = tuple(value)
    try:
        return make_model(name, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for model {name!r}: {exc}") from None


def _external(params: Mapping[str, Any]) -> ExternalProcessModel:
    try:
        command = params["command"]
        inputs = [input_from_dict(d) for d in params["inputs"]]
        outputs = list(params["outputs"])
    except KeyError as exc:
        raise ConfigError(f"external model lacks {exc.args[0]!r}") from None
    if isinstance(command, str):
        command = command.split()
    init = [Bound(d["name"], float(d["low"]), float(d["high"])) for d in params.get("init", [])]
    return ExternalProcessModel(
        command=list(command),
        input_params=inputs,
        output_names=outputs,
        dt=float(params.get("dt", 1.0)),
        horizon=float(params.get("horizon", 1.0)),
        init_params=init,
        timeout=params.get("timeout"),
    )


def campaign_from_dict(doc: Mapping[str, Any], base: Optional[Path] = None) -> LoadedCampaign:
    """Build a campaign from a parsed config object."""
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    sources = [k for k in ("spec", "formula", "graph") if k in doc]
    if len(sources) != 1:
        raise ConfigError("exactly one of 'spec', 'formula' or 'graph' is required")
    model = _model(doc)
    graph = None
    try:
        if "spec" in doc:
            formula, _ = load_spec(resolve_path(doc["spec"], base), doc.get("spec_params"))
        elif "formula" in doc:
            formula = parse_stl(doc["formula"], doc.get("spec_params"))
        else:
            graph = load_graph(resolve_path(doc["graph"], base))
            tr = translate(
                graph,
                horizon=model.horizon,
                mode=doc.get("graph_mode", "auto"),
                encoding=doc.get("encoding", "implicative"),
                n_samples=int(round(model.horizon / model.dt)) + 1,
            )
            formula = tr.final_formula
        semantics = SemanticsConfig(
            default=doc.get("semantics", "max"),
            eq_constant=float(doc.get("eq_constant", 100.0)),
            implication_scale=float(doc.get("implication_scale", 10.0)),
            constant_magnitude=float(doc.get("constant_magnitude", 100.0)),
        )
        campaign = Campaign(
            model=model,
            formula=formula,
            semantics=semantics,
            max_iterations=int(doc.get("max_iterations", 1000)),
            repetitions=int(doc.get("repetitions", 20)),
            seed=int(doc.get("seed", 0)),
            optimizer=AnnealingSettings(**doc.get("optimizer", {})),
            graph=graph,
            name=str(doc.get("name", "campaign")),
        )
    except (OSError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    jobs = int(doc.get("jobs", 1))
    if jobs < 1:
        raise ConfigError("jobs must be at least 1")
    return LoadedCampaign(campaign, jobs, base)


def load_campaign(path: str | Path) -> LoadedCampaign:
    path = resolve_path(str(path), None)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{path}: a campaign config must be a JSON object")
    return campaign_from_dict(doc, path.parent)
