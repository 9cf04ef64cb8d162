"""Scenario parsing, campaign dispatch, report emission, CLI wiring."""

import hashlib
import json

import numpy as np
import pytest

import bochner as bc
from bochner import cli
from bochner import expressions as ex
from bochner import scenario as sc
from bochner.errors import DomainError, ScenarioError


def minimal_doc(**overrides):
    doc = {
        "experiment": "integrate",
        "space": {"kind": "interval", "total_mass": 1.0},
        "value_space": {"kind": "scalar"},
        "target": "x",
        "scheme": {"kind": "dyadic_left", "depth": 20},
        "seed": 0,
    }
    doc.update(overrides)
    return doc


class TestExpressions:
    def test_polynomial_evaluation(self):
        node = ex.parse_expression("2*x^2 - x + 0.5")
        xs = np.array([0.0, 0.5, 1.0])
        got = node.evaluate(xs)
        assert got.tolist() == [0.5, 0.5, 1.5]

    def test_complex_literals(self):
        node = ex.parse_expression("1 + 2i")
        assert node.evaluate(np.array([0.0]))[0] == 1 + 2j
        node = ex.parse_expression("i*x")
        assert node.evaluate(np.array([0.5]))[0] == 0.5j

    def test_indicator(self):
        node = ex.parse_expression("3*ind(0.25, 0.75)")
        xs = np.array([0.0, 0.25, 0.5, 0.75])
        assert node.evaluate(xs).tolist() == [0.0, 3.0, 3.0, 0.0]

    def test_unicode_times(self):
        node = ex.parse_expression("2×x")
        assert node.evaluate(np.array([0.5]))[0] == 1.0

    def test_indicator_order_rejected(self):
        with pytest.raises(ScenarioError):
            ex.parse_expression("ind(0.5, 0.25)")

    def test_power_cap(self):
        ex.parse_expression("x^8")
        with pytest.raises(ScenarioError):
            ex.parse_expression("x^9")

    def test_unknown_identifier(self):
        with pytest.raises(ScenarioError):
            ex.parse_expression("y + 1")

    def test_trailing_garbage(self):
        with pytest.raises(ScenarioError):
            ex.parse_expression("x + ")


class TestParsing:
    def test_minimal_scenario_defaults(self):
        spec = sc.parse_scenario(json.dumps(minimal_doc()))
        assert spec.tolerances.cauchy_tol == 1e-6
        assert spec.tolerances.horizon == 64
        assert spec.tolerances.delta_grid_k == 20
        assert spec.tolerances.epsilon_grid == (0.1, 0.01, 0.001)
        assert spec.out_format == "records"
        assert spec.seed == 0

    def test_unknown_field_named(self):
        doc = minimal_doc()
        doc["space"] = {"kind": "interval", "totl_mass": 1.0}
        with pytest.raises(ScenarioError, match="totl_mass"):
            sc.parse_scenario(json.dumps(doc))

    def test_unknown_top_level_field(self):
        with pytest.raises(ScenarioError, match="frallop"):
            sc.parse_scenario(json.dumps(minimal_doc(frallop=3)))

    def test_malformed_indicator_expression(self):
        with pytest.raises(ScenarioError, match="ind"):
            sc.parse_scenario(json.dumps(minimal_doc(target="ind(0.5, 0.25)")))

    def test_bad_json_reports_position(self):
        with pytest.raises(ScenarioError, match="line"):
            sc.parse_scenario("{ not json")

    def test_type_mismatch(self):
        with pytest.raises(ScenarioError, match="seed"):
            sc.parse_scenario(json.dumps(minimal_doc(seed="zero")))

    def test_depth_cap(self):
        doc = minimal_doc(scheme={"kind": "dyadic_left", "depth": 25})
        with pytest.raises(ScenarioError, match="depth"):
            sc.parse_scenario(json.dumps(doc))

    def test_experiment_mismatch(self):
        with pytest.raises(ScenarioError, match="experiment"):
            sc.parse_scenario(json.dumps(minimal_doc()), experiment="density")

    def test_round_trip(self):
        spec = sc.parse_scenario(json.dumps(minimal_doc()))
        again = sc.parse_scenario(json.dumps(spec.to_document()))
        assert again == spec

    def test_simple_map_literal_target(self):
        doc = minimal_doc(
            experiment="integrate",
            target={"breakpoints": [0.0, 0.5, 1.0], "values": [2.0, 4.0]},
            scheme={"kind": "explicit_list", "maps": [
                {"breakpoints": [0.0, 0.5, 1.0], "values": [2.0, 4.0]}]},
        )
        spec = sc.parse_scenario(json.dumps(doc))
        recs = sc.run_campaign(spec)
        assert recs[0].status == "success"
        assert recs[0].value_re == "3"

    def test_vector_target_literal(self):
        doc = minimal_doc(
            value_space={"kind": "vector", "dim": 2, "norm": "inf"},
            target=["x", "x^2"],
        )
        spec = sc.parse_scenario(json.dumps(doc))
        assert spec.value_space.dim == 2

    def test_component_count_mismatch(self):
        doc = minimal_doc(
            value_space={"kind": "vector", "dim": 2, "norm": "inf"},
            target="x",
        )
        with pytest.raises(ScenarioError, match="components"):
            sc.parse_scenario(json.dumps(doc))


class TestCampaigns:
    def test_integrate_identity(self):
        spec = sc.parse_scenario(json.dumps(minimal_doc()))
        recs = sc.run_campaign(spec)
        assert len(recs) == 1
        assert recs[0].status == "success"
        assert abs(float(recs[0].value_re) - 0.5) <= 2.0 ** -21

    def test_inequalities_campaign_counts_and_validity(self):
        doc = minimal_doc(experiment="inequalities", pairs=500, seed=42)
        doc.pop("target")
        spec = sc.parse_scenario(json.dumps(doc))
        recs = sc.run_campaign(spec)
        assert len(recs) == 500
        assert all(r.status == "success" for r in recs)
        assert all(float(r.value_re) >= -1e-12 for r in recs)

    def test_seed_independence_of_verdict_class(self):
        for seed in range(10):
            doc = minimal_doc(experiment="inequalities", pairs=60, seed=seed)
            doc.pop("target")
            recs = sc.run_campaign(sc.parse_scenario(json.dumps(doc)))
            assert all(r.status == "success" for r in recs)

    def test_density_records_per_epsilon(self):
        spec = sc.parse_scenario(json.dumps(minimal_doc(experiment="density")))
        recs = sc.run_campaign(spec)
        assert len(recs) == 3
        for rec, eps in zip(recs, (0.1, 0.01, 0.001)):
            assert rec.status == "success"
            assert float(rec.payload["achieved_distance"]) < eps

    def test_ui_report_spike_inapplicable(self):
        maps = [{"breakpoints": [0.0, 2.0 ** -k, 1.0],
                 "values": [float(2 ** k), 0.0]} for k in range(1, 9)]
        doc = minimal_doc(experiment="ui_report",
                          scheme={"kind": "explicit_list", "maps": maps})
        doc.pop("target")
        spec = sc.parse_scenario(json.dumps(doc))
        recs = sc.run_campaign(spec)
        assert recs[0].status == "inapplicable"
        assert recs[0].payload["ui"]["floor"] == "1"

    def test_welldef_default_partner_scheme(self):
        doc = minimal_doc(experiment="welldef", target="x^2",
                          tolerances={"cauchy_tol": 1e-4})
        spec = sc.parse_scenario(json.dumps(doc))
        recs = sc.run_campaign(spec)
        assert recs[0].status == "success"
        assert recs[0].payload["status"] == "agree"

    def test_riesz_fischer_scenario(self):
        doc = minimal_doc(experiment="riesz_fischer",
                          tolerances={"cauchy_tol": 1e-4})
        spec = sc.parse_scenario(json.dumps(doc))
        recs = sc.run_campaign(spec)
        assert recs[0].status == "success"
        assert float(recs[0].payload["limit_integral"][0]["re"]) == pytest.approx(
            0.5, abs=1e-4)

    def test_vitali_scenario_backward(self):
        maps = [{"breakpoints": [0.0, 1.0 / n if n > 1 else 1.0, 1.0][:3 if n > 1 else 2],
                 "values": [1.0, 0.0] if n > 1 else [1.0]}
                for n in range(1, 9)]
        doc = minimal_doc(experiment="vitali", target="0",
                          direction="backward",
                          scheme={"kind": "explicit_list", "maps": maps},
                          tolerances={"cauchy_tol": 0.2, "in_measure_tol": 0.2,
                                      "horizon": 8})
        spec = sc.parse_scenario(json.dumps(doc))
        recs = sc.run_campaign(spec)
        assert recs[0].status == "success"
        assert recs[0].payload["conclusion"] == "consistent"


class TestEmission:
    def test_records_byte_identical_across_runs(self):
        spec = sc.parse_scenario(json.dumps(minimal_doc()))
        a = sc.render_report(sc.run_campaign(spec), "records")
        b = sc.render_report(sc.run_campaign(spec), "records")
        assert hashlib.sha256(a.encode()).digest() == hashlib.sha256(b.encode()).digest()

    def test_csv_byte_identical_across_runs(self):
        doc = minimal_doc(experiment="inequalities", pairs=50, seed=3)
        doc.pop("target")
        spec = sc.parse_scenario(json.dumps(doc))
        a = sc.render_report(sc.run_campaign(spec), "csv")
        b = sc.render_report(sc.run_campaign(spec), "csv")
        assert a == b

    def test_csv_layout(self):
        spec = sc.parse_scenario(json.dumps(minimal_doc()))
        out = sc.render_report(sc.run_campaign(spec), "csv").splitlines()
        assert out[0] == "experiment,value_re,value_im,bound,n_used,status"
        cells = out[1].split(",")
        assert cells[0] == "integrate"
        assert cells[5] == "success"

    def test_records_keys_sorted(self):
        spec = sc.parse_scenario(json.dumps(minimal_doc()))
        line = sc.render_report(sc.run_campaign(spec), "records").splitlines()[0]
        doc = json.loads(line)
        assert list(doc) == sorted(doc)
        for key in ("experiment", "inputs", "payload", "status"):
            assert key in doc

    def test_empty_record_list_rejected(self):
        import io
        with pytest.raises(DomainError):
            sc.emit_report([], "records", io.StringIO())

    def test_wall_time_not_emitted(self):
        spec = sc.parse_scenario(json.dumps(minimal_doc()))
        out = sc.render_report(sc.run_campaign(spec), "records")
        assert "wall" not in out


class TestCli:
    def scenario_file(self, tmp_path, doc):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(doc))
        return str(path)

    def test_integrate_exit_zero(self, tmp_path, capsys):
        path = self.scenario_file(tmp_path, minimal_doc())
        code = cli.main(["integrate", "--scenario", path, "--quiet"])
        out = capsys.readouterr().out
        assert code == 0
        assert '"status":"success"' in out

    def test_parse_error_exit_three(self, tmp_path, capsys):
        path = self.scenario_file(tmp_path, minimal_doc(target="ind(0.5, 0.25)"))
        code = cli.main(["integrate", "--scenario", path, "--quiet"])
        assert code == 3

    def test_missing_file_exit_three(self, capsys):
        assert cli.main(["integrate", "--scenario", "/nonexistent.json",
                         "--quiet"]) == 3

    def test_inapplicable_exit_one(self, tmp_path, capsys):
        maps = [{"breakpoints": [0.0, 2.0 ** -k, 1.0],
                 "values": [float(2 ** k), 0.0]} for k in range(1, 9)]
        doc = minimal_doc(experiment="ui_report",
                          scheme={"kind": "explicit_list", "maps": maps})
        doc.pop("target")
        path = self.scenario_file(tmp_path, doc)
        assert cli.main(["ui-report", "--scenario", path, "--quiet"]) == 1

    def test_flag_overrides(self, tmp_path, capsys):
        path = self.scenario_file(tmp_path, minimal_doc())
        code = cli.main(["integrate", "--scenario", path, "--quiet",
                         "--format", "csv", "--tolerance", "1e-4"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("experiment,")

    def test_out_file(self, tmp_path):
        path = self.scenario_file(tmp_path, minimal_doc())
        dest = tmp_path / "report.jsonl"
        code = cli.main(["integrate", "--scenario", path, "--quiet",
                         "--out", str(dest)])
        assert code == 0
        assert dest.read_text().startswith("{")
