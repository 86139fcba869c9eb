import json

import pytest

from tbctrl import (ModelId, builtin_scenarios, get_scenario, load_scenario,
                    load_scenario_file, save_scenario, scenario_to_dict,
                    validate_params)
from tbctrl.core import ValidationError
from tbctrl.scenario import SCHEMA_ID, find_scenario, sweep_points


def flagship_doc():
    return {
        "schema": SCHEMA_ID,
        "name": "test",
        "model": "seirs",
        "parameters": {"Lambda": 143.0, "beta": 13.0, "c": 1.0, "mu": 0.0143,
                       "sigma": 1.0, "k1": 1.0, "r1": 2.0, "r2": 1.0,
                       "d1": 0.0, "N": 10000.0},
        "initial_state": {"mode": "fractions",
                          "values": ["76/120", "38/120", "5/120", "1/120"]},
        "grid": {"t0": 0.0, "tf": 5.0, "n_steps": 100},
        "cost": {"kind": "C2", "a1": 1.0, "b": [100.0]},
    }


class TestBundledScenarios:
    def test_flagship_values(self):
        cfg = get_scenario("fig1")
        p = cfg.params
        assert cfg.model is ModelId.SEIRS
        assert p.value("mu") == 0.0143 and p.value("c") == 1.0 and p.value("beta") == 13.0
        assert p.value("sigma") == 1.0 and p.value("r1") == 2.0 and p.value("r2") == 1.0
        assert p.value("k1") == 1.0 and p.value("N") == 10000.0
        assert cfg.weights.a1 == 1.0 and cfg.weights.b == (100.0,)
        assert cfg.grid.tf == 5.0 and cfg.grid.n_steps == 5000
        x0 = cfg.initial_state()
        assert x0 == pytest.approx([6333.3333333333, 3166.6666666667, 416.6666667, 83.3333333])

    def test_all_builtins_valid(self):
        for name, cfg in builtin_scenarios().items():
            assert validate_params(cfg.model, cfg.params) == [], name
            if cfg.sweep is not None:
                pts = sweep_points(cfg)
                assert len(pts) >= 2

    def test_effort_weight_sweep(self):
        cfg = get_scenario("fig4-sweep")
        values = [v for v in cfg.sweep.values]
        assert values == [50.0, 100.0, 250.0, 500.0]
        pts = sweep_points(cfg)
        assert [sub.weights.b[0] for _, sub in pts] == values

    def test_population_sweep_keeps_recruitment_matched(self):
        cfg = get_scenario("fig3-sweep")
        for _, sub in sweep_points(cfg):
            assert sub.params.value("Lambda") == pytest.approx(
                sub.params.value("mu") * sub.params.value("N"), rel=1e-12)

    def test_progression_sweep(self):
        cfg = get_scenario("fig2-sweep")
        assert [sub.params.value("k1") for _, sub in sweep_points(cfg)] == [0.25, 0.5, 0.75, 1.0]

    def test_balanced_weight_variants(self):
        assert get_scenario("fig5-sweep").weights.a1 == 100.0
        assert get_scenario("fig6-sweep").weights.a1 == 100.0

    def test_unknown_name_rejected(self):
        with pytest.raises(ValidationError):
            get_scenario("fig99")


class TestLoadScenario:
    def test_valid_document(self):
        cfg = load_scenario(json.dumps(flagship_doc()))
        assert cfg.name == "test" and cfg.grid.n_steps == 100

    def test_missing_effort_weight_names_field(self):
        doc = flagship_doc()
        del doc["cost"]["b"]
        with pytest.raises(ValidationError, match=r"\$\.cost.*'b'"):
            load_scenario(json.dumps(doc))

    def test_fractions_must_sum_to_one(self):
        doc = flagship_doc()
        doc["initial_state"]["values"] = [0.5, 0.2, 0.1, 0.1]
        with pytest.raises(ValidationError, match="sum to 1"):
            load_scenario(json.dumps(doc))

    def test_unknown_keys_rejected(self):
        doc = flagship_doc()
        doc["extra"] = 1
        with pytest.raises(ValidationError, match="unknown key"):
            load_scenario(json.dumps(doc))
        doc = flagship_doc()
        doc["cost"]["weight"] = 1
        with pytest.raises(ValidationError, match=r"\$\.cost"):
            load_scenario(json.dumps(doc))

    def test_schema_field_required(self):
        doc = flagship_doc()
        doc["schema"] = "something-else"
        with pytest.raises(ValidationError, match="schema"):
            load_scenario(json.dumps(doc))

    def test_parse_error_reported(self):
        with pytest.raises(ValidationError, match="not valid JSON"):
            load_scenario("{not json")

    def test_model_parameter_mismatch(self):
        doc = flagship_doc()
        del doc["parameters"]["mu"]
        with pytest.raises(ValidationError, match="missing parameter 'mu'"):
            load_scenario(json.dumps(doc))

    def test_wrong_state_dimension(self):
        doc = flagship_doc()
        doc["initial_state"]["values"] = ["1/2", "1/2"]
        with pytest.raises(ValidationError, match="4 compartments"):
            load_scenario(json.dumps(doc))

    def test_effort_weight_count_checked(self):
        doc = flagship_doc()
        doc["cost"]["b"] = [100.0, 50.0]
        with pytest.raises(ValidationError, match="1 control"):
            load_scenario(json.dumps(doc))

    def test_kind_consistency_checked(self):
        doc = flagship_doc()
        doc["cost"]["a2"] = 1.0
        with pytest.raises(ValidationError, match="C2"):
            load_scenario(json.dumps(doc))

    def test_empty_sweep_rejected(self):
        doc = flagship_doc()
        doc["sweep"] = {"parameter": "k1", "values": []}
        with pytest.raises(ValidationError, match="empty"):
            load_scenario(json.dumps(doc))

    def test_sweep_target_must_exist(self):
        doc = flagship_doc()
        doc["sweep"] = {"parameter": "nope", "values": [1.0]}
        with pytest.raises(ValidationError, match="sweep target"):
            load_scenario(json.dumps(doc))

    def test_time_table_parameter(self):
        doc = flagship_doc()
        doc["model"] = "korea"
        doc["parameters"] = {"b": 0.02, "mu": 0.0143, "beta": 13.0, "alpha": 0.4,
                             "k": {"times": [0.0, 10.0], "values": [0.05, 0.2]},
                             "s": 0.3, "r": 2.0}
        doc["initial_state"] = {"mode": "fractions",
                                "values": [0.6, 0.2, 0.05, 0.15], "total": 10000.0}
        doc["cost"] = {"kind": "C1", "a1": 1.0, "a2": 1.0, "b": [50.0, 50.0, 50.0]}
        cfg = load_scenario(json.dumps(doc))
        assert cfg.params.is_time_dependent("k")
        assert cfg.params.value("k", 5.0) == pytest.approx(0.125)

    def test_fraction_mode_needs_population(self):
        doc = flagship_doc()
        doc["model"] = "reinfection"
        doc["parameters"] = {"Lambda": 143.0, "beta": 13.0, "c": 1.0, "mu": 0.0143,
                             "sigma": 1.0, "k1": 0.5, "r2": 2.0, "d1": 0.0, "rho": 0.4}
        with pytest.raises(ValidationError, match="population|total|'N'"):
            load_scenario(json.dumps(doc))


class TestRoundTrip:
    def test_serialize_load_equivalence(self, tmp_path):
        for name, cfg in builtin_scenarios().items():
            path = tmp_path / f"{name}.json"
            save_scenario(cfg, path)
            again = load_scenario_file(path)
            assert again.name == cfg.name
            assert again.model == cfg.model
            assert again.params == cfg.params
            assert again.initial_values == cfg.initial_values
            assert again.grid == cfg.grid
            assert again.cost_kind == cfg.cost_kind
            assert again.weights == cfg.weights
            assert again.fbs == cfg.fbs
            assert again.sweep == cfg.sweep

    def test_dict_shape(self):
        doc = scenario_to_dict(get_scenario("fig1"))
        assert doc["schema"] == SCHEMA_ID
        assert doc["model"] == "seirs"


class TestFindScenario:
    def test_env_dir_resolution(self, tmp_path, monkeypatch):
        cfg = get_scenario("fig1")
        save_scenario(cfg, tmp_path / "mine.json")
        monkeypatch.setenv("TBCTRL_SCENARIO_DIR", str(tmp_path))
        got = find_scenario("mine")
        assert got.name == cfg.name

    def test_missing_reference_raises_file_not_found(self, monkeypatch):
        monkeypatch.delenv("TBCTRL_SCENARIO_DIR", raising=False)
        with pytest.raises(FileNotFoundError):
            find_scenario("does-not-exist")
