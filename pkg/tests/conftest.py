import math

import numpy as np
import pytest

from dfsense import enumerate_vertices, pure_strategy, sequential_strategy, validate_network

NOISE_1 = [[1, 1, -1, -1], [-1, 1, -1, 1]]
SIGNAL_1 = [[1.2, 1.2, 1.2, 1.2], [0.6, 1.2, 1.2, 0.6]]
SIGNAL_1_PRINTED = [[1.2, 1.2, 1.2, 1.2], [0.6, 1.2, 0.6, 1.2]]
SIGNAL_2 = [[0.47, 0.47, 0.70, 0.24], [-0.97, 0.24, -0.34, -0.57]]
NOISE_2 = [[-0.09, -0.36, 0.10, 0.91], [0.80, -0.73, 0.92, 0.12]]
ROUNDED_VERTICES_2 = np.array([[1, 1, -0.14, 0.51], [-0.28, 1, 1, 0.26], [-1, 0.14, 1, -0.15]])
K_VERTEX_1 = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=float)


@pytest.fixture
def net1():
    return validate_network(SIGNAL_1, NOISE_1, 1.0)


@pytest.fixture
def poly1(net1):
    return enumerate_vertices(net1)


@pytest.fixture
def net2():
    return validate_network(SIGNAL_2, NOISE_2, 1.0)


@pytest.fixture
def poly2(net2):
    return enumerate_vertices(net2)


@pytest.fixture
def affine3():
    return validate_network([[1, -1, 0]], [[1, 1, 1]], 1.0)


def psi_example(gamma=0.5, mu=1 / math.sqrt(2), nu=1 / math.sqrt(2)):
    """Four-term state of the square-network walkthrough."""
    k1 = np.array([gamma, 1, 1, gamma])
    k2 = np.array([gamma, -1, -1, gamma])
    s = math.sqrt(2)
    return pure_strategy([(k1, nu / s), (k2, mu / s), (-k1, mu / s), (-k2, nu / s)])


def vertex_strategy_1():
    return sequential_strategy([([1, 1, 1, 1], 0.5), ([-1, 1, 1, -1], 0.5)])


def w_state(labels):
    c = 1 / math.sqrt(len(labels))
    return pure_strategy([(k, c) for k in labels])


def random_dfs_strategy(rng, polytope, n_terms, complex_amps=True):
    """Random pure strategy whose labels are random convex mixtures of DFS vertices."""
    V = polytope.vertices
    labels = []
    while len(labels) < n_terms:
        w = rng.dirichlet(np.ones(len(V)) * 0.5)
        k = w @ V
        if all(np.max(np.abs(k - q)) > 1e-6 for q in labels):
            labels.append(k)
    c = rng.normal(size=n_terms) + (1j * rng.normal(size=n_terms) if complex_amps else 0)
    c = c / np.linalg.norm(c)
    return pure_strategy(list(zip(labels, c)))


def random_network(rng, n, s, m):
    signal = rng.normal(size=(s, n))
    noise = rng.normal(size=(m, n)) if m else np.zeros((0, n))
    return validate_network(signal, noise, float(rng.uniform(0.5, 2.0)))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance summary")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
