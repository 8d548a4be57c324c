import json

import pytest

from pathanalysis.causal_model import CausalGraph
from pathanalysis.dataset_io import CorrelationMatrix, generate_synthetic
from pathanalysis.estimator import fit_model
from pathanalysis.fit_trim import compare, fit_and_trim, replay_decomposition
from pathanalysis.report import build_report, fmt, render_diagram, render_json, render_screening_json, render_text
from pathanalysis.screening import screen_report


def _revised_report(observed, revised_model):
    return build_report(fit_model(observed, revised_model), 0.05, provenance={"corr": "weather_cases.corr"})


def test_fmt():
    assert fmt(0.2429760) == "0.243"
    assert fmt(-0.0001) == "0.000"
    assert fmt(None) == "---"
    assert fmt(75.51, 1) == "75.5"


def test_text_revised_model(observed, revised_model):
    text = render_text(_revised_report(observed, revised_model))
    assert "Reproduced Correlation" in text
    assert "Observed Correlation" in text
    assert "0.243" in text
    assert "0.302" in text
    assert "X1 -> X2" in text
    assert "0.804*" in text
    assert "Consistent with the empirical data: yes" in text
    assert "*Difference" not in text
    assert "Trimming" not in text
    assert "Screening" not in text


def test_text_flags_replayed_cells(observed, initial_model, published_coefficients):
    m = fit_model(observed, initial_model)
    replay = compare(observed, replay_decomposition(initial_model, published_coefficients, n=44))
    text = render_text(build_report(m, 0.05, replay=replay))
    assert "0.171*" in text
    assert "-0.109*" in text
    assert "-0.505*" not in text
    assert "*Difference between reproduced and observed correlation is greater than 0.05." in text


def test_text_effects_placeholders(observed, revised_model):
    text = render_text(_revised_report(observed, revised_model))
    effects = text.split("Causal Effects")[1]
    lines = [x for x in effects.splitlines() if "---" in x]
    assert len(lines) == 6
    assert any(("Y (R2 = 0.243)" in x) and ("X1" in x) for x in lines)


def test_text_trim_log(observed, initial_model):
    log = fit_and_trim(observed, initial_model)
    text = render_text(build_report(log.final.model, 0.05, trim_log=log))
    assert "Trimming" in text
    assert "Iteration 1: 6 path(s)" in text
    assert "X1 -> Y (p=" in text
    assert "Iteration 2: 3 path(s)" in text


def test_json_keys(observed, revised_model):
    doc = json.loads(render_json(_revised_report(observed, revised_model)))
    assert list(doc.keys()) == ["coefficients", "observed", "correlations", "reproduced", "decompositions", "fit",
                                "effects", "provenance"]
    assert doc["provenance"] == {"corr": "weather_cases.corr"}


def test_json_optional_keys(observed, initial_model):
    d = generate_synthetic(observed, 44, seed=1)
    log = fit_and_trim(observed, initial_model)
    r = build_report(log.final.model, 0.05, trim_log=log, screening=screen_report(d, initial_model))
    doc = json.loads(render_json(r))
    assert list(doc.keys())[0] == "screening"
    assert "trim_log" in doc
    assert len(doc["trim_log"]) == 2
    assert sorted((x["cause"], x["effect"]) for x in doc["trim_log"][0]["removed"]) == [
        ("X1", "X3"), ("X1", "Y"), ("X2", "Y")]


def test_json_values(observed, revised_model):
    r = _revised_report(observed, revised_model)
    doc = json.loads(render_json(r))
    assert doc["fit"]["reproduced"]["names"] == ["X1", "X2", "X3", "Y"]
    assert doc["fit"]["reproduced"]["r"][3][0] == pytest.approx(0.243, abs=0.001)
    assert doc["fit"]["consistent"] is True
    assert doc["fit"]["reproduced"]["r"][3][0] == r.reproduced.r[3, 0]
    paths = doc["coefficients"]["paths"]
    assert [(p["cause"], p["effect"]) for p in paths] == [("X1", "X2"), ("X2", "X3"), ("X3", "Y")]
    assert paths[0]["beta"] == r.model.coefficient("X1", "X2")
    assert all(p["significant"] for p in paths)
    effect = [e for e in doc["effects"] if (e["outcome"], e["determinant"]) == ("Y", "X1")][0]
    assert effect["direct"] is None
    assert effect["total"] == r.effects.row("Y", "X1").total


def test_json_round_trip(observed, initial_model):
    r = build_report(fit_model(observed, initial_model), 0.05)
    text = render_json(r)
    assert json.dumps(json.loads(text), indent=2) == text


def test_text_and_json_agree(observed, revised_model):
    r = _revised_report(observed, revised_model)
    text = render_text(r)
    doc = json.loads(render_json(r))
    for p in doc["coefficients"]["paths"]:
        assert fmt(p["beta"]) + "*" in text
        assert fmt(p["p"]) in text


def test_screening_json(observed, initial_model):
    d = generate_synthetic(observed, 44, seed=1)
    doc = json.loads(render_screening_json(screen_report(d, initial_model), provenance={"seed": 1}))
    assert list(doc.keys()) == ["screening", "provenance"]
    assert len(doc["screening"]["outliers"]) == 44
    assert set(doc["screening"]["vif"].keys()) == {"X3", "Y"}


def test_diagram_fitted(observed, revised_model):
    dot = render_diagram(revised_model, fit_model(observed, revised_model))
    assert dot.startswith("digraph")
    assert dot.count("shape = \"box\"") == 4
    assert '"X1" -> "X2" [ label = "0.804*" ];' in dot
    assert '"X2" -> "X3" [ label = "-0.613*" ];' in dot
    assert '"X3" -> "Y" [ label = "-0.493*" ];' in dot


def test_diagram_unfitted(initial_model):
    dot = render_diagram(initial_model)
    assert '"X1" -> "X3";' in dot
    assert "label" not in dot
    assert dot.count("->") == 6


def test_diagram_covary():
    c = CorrelationMatrix(names=("A", "B", "C"), r=[[1, 0.3, 0.5], [0.3, 1, 0.4], [0.5, 0.4, 1]], n=50)
    g = CausalGraph(variables=("A", "B", "C"), edges=(("A", "C"), ("B", "C")), covary=(("A", "B"),))
    assert '"A" -> "B" [ dir = "both", style = "dashed" ];' in render_diagram(g)
    assert '"A" -> "B" [ dir = "both", style = "dashed", label = "0.300" ];' in render_diagram(g, fit_model(c, g))


def test_rendering_is_deterministic(observed, initial_model):
    log = fit_and_trim(observed, initial_model)
    a = build_report(log.final.model, 0.05, trim_log=log)
    b = build_report(fit_and_trim(observed, initial_model).final.model, 0.05, trim_log=log)
    assert render_text(a) == render_text(b)
    assert render_json(a) == render_json(b)
    assert render_diagram(a.model.graph, a.model) == render_diagram(b.model.graph, b.model)


def test_json_perfect_fit_is_strict_json():
    c = CorrelationMatrix(names=("A", "B"), r=[[1, 1], [1, 1]], n=10)
    g = CausalGraph(variables=("A", "B"), edges=(("A", "B"),))
    text = render_json(build_report(fit_model(c, g), 0.05))

    def reject(token):
        raise ValueError(token)

    doc = json.loads(text, parse_constant=reject)
    path = doc["coefficients"]["paths"][0]
    assert path["t"] == "inf"
    assert path["se"] == 0.0
    assert path["p"] == 0.0
