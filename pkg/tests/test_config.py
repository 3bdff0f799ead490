import json

import pytest

from vbstl.config import ConfigError, campaign_from_dict, load_campaign, resolve_path
from vbstl.falsifier import falsify_once
from vbstl.stl import parse_stl
from vbstl.sut import DeltaSigmaSurrogate, ExternalProcessModel, StaticSwitched

from conftest import DATA

CAMPAIGNS = sorted((DATA / "campaigns").glob("*.json"))


@pytest.mark.parametrize("path", CAMPAIGNS, ids=lambda p: p.stem)
def test_shipped_campaigns_load(path):
    loaded = load_campaign(path)
    assert loaded.campaign.name
    assert loaded.campaign.model.bounds()


def test_package_prefix():
    loaded = load_campaign("package:campaigns/static_switched_09_max.json")
    c = loaded.campaign
    assert isinstance(c.model, StaticSwitched) and c.model.thresh == 0.9
    assert c.formula == parse_stl("alw (y >= 0)")
    assert resolve_path("package:specs/at_phi1.stl", None).exists()


def test_delta_sigma_campaign():
    c = load_campaign(DATA / "campaigns" / "delta_sigma_phi1_add.json").campaign
    assert isinstance(c.model, DeltaSigmaSurrogate)
    assert c.model.u_range == (-0.35, 0.35)
    assert c.semantics.default == "add"


def test_external_campaign():
    c = load_campaign(DATA / "campaigns" / "at_phi1_external.json").campaign
    assert isinstance(c.model, ExternalProcessModel)
    assert [b.name for b in c.model.bounds()][:2] == ["throttle[0]", "throttle[1]"]


def test_inline_formula_and_relative_paths(tmp_path):
    (tmp_path / "spec.stl").write_text("param c = 0\nalw (y >= c)\n")
    (tmp_path / "c.json").write_text(json.dumps({
        "model": "static_switched", "model_params": {"thresh": 0.8},
        "spec": "spec.stl", "spec_params": {"c": -1}, "repetitions": 2, "jobs": 2,
        "optimizer": {"cooling": 0.9},
    }))
    loaded = load_campaign(tmp_path / "c.json")
    assert loaded.campaign.formula == parse_stl("alw (y >= -1)")
    assert loaded.jobs == 2
    assert loaded.campaign.optimizer.cooling == 0.9


def _graph_doc(log):
    return {
        "blocks": [
            {"id": "y", "kind": "Inport"},
            {"id": "zero", "kind": "Constant", "params": {"value": 0}},
            {"id": "ok", "kind": "Relational", "params": {"op": ">="}},
            {"id": "req", "kind": "Logical", "params": {"op": "and"}},
            {"id": "prev", "kind": "UnitDelay", "params": {"init": 1}},
        ],
        "wires": [
            {"from": ["y", 1], "to": ["ok", 1]}, {"from": ["zero", 1], "to": ["ok", 2]},
            {"from": ["ok", 1], "to": ["req", 1]}, {"from": ["prev", 1], "to": ["req", 2]},
            {"from": ["req", 1], "to": ["prev", 1]},
        ],
        "output": "req",
        "log": log,
    }


@pytest.mark.parametrize("log,formula", [
    ([], "alw (y >= 0)"),
    (["ok"], "alw (not (ok == 0))"),
])
def test_graph_campaign(tmp_path, log, formula):
    (tmp_path / "g.json").write_text(json.dumps(_graph_doc(log)))
    c = campaign_from_dict(
        {"model": "static_switched", "graph": "g.json", "semantics": "constant", "max_iterations": 500},
        tmp_path,
    ).campaign
    assert c.formula == parse_stl(formula)
    assert c.graph is not None
    r = falsify_once(c, 0)
    assert r.falsified


@pytest.mark.parametrize("doc", [
    {"model": "static_switched"},
    {"model": "static_switched", "formula": "alw (y >= 0)", "spec": "x.stl"},
    {"model": "static_switched", "formula": "alw (y >= 0)", "colour": "red"},
    {"model": 3, "formula": "alw (y >= 0)"},
    {"model": {"name": "static_switched", "params": {"gain": 2}}, "formula": "alw (y >= 0)"},
    {"model": "external", "model_params": {"inputs": []}, "formula": "alw (y >= 0)"},
    {"model": "static_switched", "formula": "alw (y >= 0)", "jobs": 0},
    {"model": "static_switched", "spec": "/nonexistent/spec.stl"},
])
def test_bad_configs(doc):
    with pytest.raises(ConfigError):
        campaign_from_dict(doc)
