import numpy as np
import pytest

from conftest import random_correlation, random_dag, saturated_graph
from pathanalysis.causal_model import CausalGraph
from pathanalysis.errors import ModelError
from pathanalysis.estimator import fit_model
from pathanalysis.tracer import (Direction, Step, TraceClass, classify, decompose_all, enumerate_traces,
                                 implied_oracle, oracle_matrix, reproduced_correlation, reproduced_matrix,
                                 trace_matrix, trace_pair)


def test_revised_model_decomposition(observed, revised_model):
    m = fit_model(observed, revised_model)
    assert reproduced_correlation(m, "X1", "X3").reproduced == pytest.approx(-0.493, abs=0.001)
    assert reproduced_correlation(m, "X1", "Y").reproduced == pytest.approx(0.243, abs=0.001)
    assert reproduced_correlation(m, "X2", "Y").reproduced == pytest.approx(0.302, abs=0.001)
    r = reproduced_matrix(m)
    expected = [0.804, -0.493, 0.243, -0.613, 0.302, -0.493]
    actual = [r.r[1, 0], r.r[2, 0], r.r[3, 0], r.r[2, 1], r.r[3, 1], r.r[3, 2]]
    assert np.allclose(actual, expected, atol=0.001)


def test_chain_trace(observed, revised_model):
    m = fit_model(observed, revised_model)
    traces = enumerate_traces(m, "X1", "Y")
    assert len(traces) == 1
    assert traces[0].trace_class == TraceClass.INDIRECT
    assert str(traces[0]) == "X1 -> X2 -> X3 -> Y"
    assert traces[0].product == pytest.approx(0.804 * -0.613 * -0.493)


def test_initial_model_classes(observed, initial_model):
    m = fit_model(observed, initial_model)
    d = reproduced_correlation(m, "X2", "X3")
    assert [t.trace_class for t in d.traces] == [TraceClass.SPURIOUS, TraceClass.DIRECT]
    assert str(d.traces[0]) == "X2 <- X1 -> X3"
    assert d.reproduced == pytest.approx(-0.613, abs=1e-9)
    d = reproduced_correlation(m, "X1", "Y")
    assert [str(t) for t in d.traces] == ["X1 -> X2 -> X3 -> Y", "X1 -> X2 -> Y", "X1 -> X3 -> Y", "X1 -> Y"]
    assert [t.trace_class for t in d.traces] == [TraceClass.INDIRECT] * 3 + [TraceClass.DIRECT]


def test_classification_independent_of_orientation(observed, initial_model):
    m = fit_model(observed, initial_model)
    forward = reproduced_correlation(m, "X1", "Y")
    backward = reproduced_correlation(m, "Y", "X1")
    assert sorted(t.trace_class.value for t in forward.traces) == sorted(t.trace_class.value for t in backward.traces)
    assert forward.reproduced == pytest.approx(backward.reproduced, abs=1e-12)


def test_backward_only_trace_is_causal(observed, revised_model):
    m = fit_model(observed, revised_model)
    traces = enumerate_traces(m, "Y", "X3")
    assert [str(t) for t in traces] == ["Y <- X3"]
    assert traces[0].trace_class == TraceClass.DIRECT
    traces = enumerate_traces(m, "Y", "X1")
    assert [t.trace_class for t in traces] == [TraceClass.INDIRECT]

def test_classify():
    assert classify((Step("A", "B", Direction.FORWARD),)) == TraceClass.DIRECT
    assert classify((Step("A", "B", Direction.BACKWARD),)) == TraceClass.DIRECT
    assert classify((Step("A", "B", Direction.FORWARD), Step("B", "C", Direction.FORWARD))) == TraceClass.INDIRECT
    assert classify((Step("A", "B", Direction.BACKWARD), Step("B", "C", Direction.FORWARD))) == TraceClass.SPURIOUS
    assert classify((Step("A", "B", Direction.COVARIANCE),)) == TraceClass.SPURIOUS


def test_covariance_arc():
    g = CausalGraph(variables=("A", "B", "C"), edges=(("B", "C"),), covary=(("A", "B"),))
    d = trace_pair(g, {("B", "C"): 0.5}, {("A", "B"): 0.4}, "A", "C")
    assert len(d.traces) == 1
    assert str(d.traces[0]) == "A <-> B -> C"
    assert d.traces[0].trace_class == TraceClass.SPURIOUS
    assert d.reproduced == pytest.approx(0.2)


def test_one_covariance_arc_only():
    g = CausalGraph(variables=("A", "B", "C", "D"), edges=(("C", "D"),), covary=(("A", "B"), ("B", "C")))
    d = trace_pair(g, {("C", "D"): 0.5}, {("A", "B"): 0.4, ("B", "C"): 0.3}, "A", "D")
    assert len(d.traces) == 0
    assert d.reproduced == 0.0


def test_no_forward_then_backward():
    g = CausalGraph(variables=("A", "B", "C"), edges=(("A", "C"), ("B", "C")))
    d = trace_pair(g, {("A", "C"): 0.5, ("B", "C"): 0.5}, {}, "A", "B")
    assert len(d.traces) == 0


def test_same_variable(observed, initial_model):
    m = fit_model(observed, initial_model)
    with pytest.raises(ModelError) as e:
        reproduced_correlation(m, "X1", "X1")
    assert e.value.code == "SameVariable"
    with pytest.raises(ModelError) as e:
        reproduced_correlation(m, "X1", "Z")
    assert e.value.code == "UnknownVariable"


def test_decompose_all_order(observed, initial_model):
    m = fit_model(observed, initial_model)
    pairs = [d.pair for d in decompose_all(m)]
    assert pairs == [("X1", "X2"), ("X1", "X3"), ("X1", "Y"), ("X2", "X3"), ("X2", "Y"), ("X3", "Y")]


def test_oracle_matches_tracer_initial_model(observed, initial_model):
    m = fit_model(observed, initial_model)
    assert np.max(np.abs(reproduced_matrix(m).r - implied_oracle(m).r)) < 1e-12


def test_oracle_matches_tracer_random_dags():
    rng = np.random.default_rng(1)
    for _ in range(200):
        g = random_dag(rng, int(rng.integers(2, 7)))
        coefficients = dict((e, float(rng.uniform(-0.9, 0.9))) for e in g.edges)
        covariances = dict((e, float(rng.uniform(-0.5, 0.5))) for e in g.covary)
        traced = trace_matrix(g, coefficients, covariances, 0)
        oracle = oracle_matrix(g, coefficients, covariances, 0)
        assert np.max(np.abs(traced.r - oracle.r)) < 1e-9


def test_saturated_model_reproduces_random_inputs():
    rng = np.random.default_rng(5)
    for _ in range(50):
        c = random_correlation(rng, int(rng.integers(2, 7)))
        m = fit_model(c, saturated_graph(c.names))
        assert np.max(np.abs(reproduced_matrix(m).r - c.r)) < 1e-9


def test_saturated_model_reproduces_observed(observed, initial_model):
    m = fit_model(observed, initial_model)
    assert np.max(np.abs(reproduced_matrix(m).r - observed.r)) < 1e-9
