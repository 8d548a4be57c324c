import os
import sys
from pathlib import Path

import numpy as np
import pytest

# makes the package importable without installing it
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from pathanalysis.causal_model import CausalGraph
from pathanalysis.dataset_io import CorrelationMatrix

DATA_DIR = str(Path(__file__).parent.parent / "data")

OBSERVED_NAMES = ("X1", "X2", "X3", "Y")
OBSERVED = [
    [1.0, 0.804, -0.469, 0.225],
    [0.804, 1.0, -0.613, 0.276],
    [-0.469, -0.613, 1.0, -0.493],
    [0.225, 0.276, -0.493, 1.0],
]


def data_file(name):
    return os.path.join(DATA_DIR, name)


def random_correlation(rng, p, n=100):
    """
    Generates a random, well-conditioned correlation matrix.
    """
    a = rng.standard_normal((2 * p + 10, p))
    cov = a.T @ a
    d = np.sqrt(np.diag(cov))
    r = cov / np.outer(d, d)
    r = (r + r.T) / 2.0
    np.fill_diagonal(r, 1.0)
    return CorrelationMatrix(names=tuple("V%d" % i for i in range(p)), r=r, n=n)


def saturated_graph(names):
    edges = []
    for j in range(len(names)):
        for i in range(j):
            edges.append((names[i], names[j]))
    return CausalGraph(variables=tuple(names), edges=tuple(edges))


def random_dag(rng, p, edge_prob=0.5, covary_prob=0.3):
    """
    Generates a random recursive graph with variables V0..V(p-1), edges only
    pointing from lower to higher index and covariance arcs between some
    exogenous pairs.
    """
    names = tuple("V%d" % i for i in range(p))
    edges = []
    for j in range(p):
        for i in range(j):
            if rng.random() < edge_prob:
                edges.append((names[i], names[j]))
    targets = set(b for _, b in edges)
    exo = [x for x in names if x not in targets]
    covary = []
    for j in range(len(exo)):
        for i in range(j):
            if rng.random() < covary_prob:
                covary.append((exo[i], exo[j]))
    return CausalGraph(variables=names, edges=tuple(edges), covary=tuple(covary))


@pytest.fixture
def observed():
    return CorrelationMatrix(names=OBSERVED_NAMES, r=np.array(OBSERVED), n=44)


@pytest.fixture
def initial_model():
    return CausalGraph(variables=OBSERVED_NAMES,
                       edges=(("X1", "X2"), ("X1", "X3"), ("X2", "X3"), ("X1", "Y"), ("X2", "Y"), ("X3", "Y")))


@pytest.fixture
def revised_model():
    return CausalGraph(variables=OBSERVED_NAMES, edges=(("X1", "X2"), ("X2", "X3"), ("X3", "Y")))


@pytest.fixture
def published_coefficients():
    return {
        ("X1", "X2"): 0.804,
        ("X1", "X3"): 0.71,
        ("X2", "X3"): -0.670,
        ("X1", "Y"): 0.045,
        ("X2", "Y"): -0.080,
        ("X3", "Y"): -0.521,
    }
