import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfsense import errors
from dfsense.dfs import enumerate_vertices
from dfsense.model import validate_network
from dfsense.optimize import (
    _Objective,
    compare_affine,
    figure_of_merit,
    optimal_rates_orthogonal,
    optimize_rates,
)
from dfsense.qfim import qfim_from_k

from conftest import NOISE_1, SIGNAL_1_PRINTED, w_state


def orthogonal_instance(rng, group=None):
    """Two equal sensor groups locked together by the noise; the vertex pair directions are orthogonal."""
    a = int(group or rng.integers(1, 4))
    n = 2 * a
    diffs = []
    for start in (0, a):
        for j in range(start + 1, start + a):
            row = np.zeros(n)
            row[start], row[j] = 1, -1
            diffs.append(row)
    noise = rng.normal(size=(len(diffs), len(diffs))) @ np.array(diffs) if diffs else np.zeros((0, n))
    signal = rng.normal(size=(2, n))
    net = validate_network(signal, noise, float(rng.uniform(0.5, 2)))
    L = rng.normal(size=(2, 2))
    W = L @ L.T + 0.1 * np.eye(2)
    return net, W


def test_merit_square_optimum(net1, poly1):
    reps = poly1.representatives
    r = np.array([1 / 6, 5 / 6])
    K = (reps.T * r) @ reps
    F = qfim_from_k(net1, K)
    assert figure_of_merit(np.eye(2), F) == pytest.approx(0.390625, abs=1e-12)
    assert figure_of_merit(np.eye(2), F) * 4 == pytest.approx(1.5625, abs=1e-12)


def test_merit_identity():
    assert figure_of_merit(np.eye(2), np.eye(2)) == pytest.approx(2)


def test_merit_singular(net1):
    v2 = np.array([-1, 1, 1, -1.0])
    F = qfim_from_k(net1, np.outer(v2, v2))
    with pytest.raises(errors.SingularQfim):
        figure_of_merit(np.eye(2), F)
    # a weight blind to the missing direction is fine
    assert np.isfinite(figure_of_merit(np.diag([0.0, 1.0]), np.diag([0.0, 2.0])))


def test_closed_form_square(net1, poly1):
    sol = optimal_rates_orthogonal(poly1, net1)
    assert sol.method == "closed_form"
    assert np.allclose(sol.rates, [1 / 6, 5 / 6], atol=1e-12)
    assert sol.trace_objective == pytest.approx(1.5625, abs=1e-12)


def test_solver_square(net1, poly1):
    sol = optimize_rates(poly1, net1)
    assert sol.converged
    assert np.allclose(sol.rates, [1 / 6, 5 / 6], atol=1e-6)
    assert sol.objective == pytest.approx(0.390625, abs=1e-9)


def test_single_vertex():
    net = validate_network([[1.0, 2.0]], [[1.0, -1.0]], 0.5)
    P = enumerate_vertices(net)
    expected = 1 / (4 * 0.25 * 3.0**2)
    for sol in (optimal_rates_orthogonal(P, net), optimize_rates(P, net)):
        assert sol.rates.tolist() == [1.0]
        assert sol.objective == pytest.approx(expected)


def test_second_example(net2, poly2):
    with pytest.raises(errors.NonOrthogonalVertices):
        optimal_rates_orthogonal(poly2, net2)
    sol = optimize_rates(poly2, net2)
    v = poly2.representatives
    expected = {(1.0, 1.0, -0.14, 0.51): 0.26, (-0.28, 1.0, 1.0, 0.26): 0.30, (-1.0, 0.14, 1.0, -0.15): 0.44}
    for key, target in expected.items():
        key = np.array(key)
        i = next(i for i in range(len(v)) if min(np.max(np.abs(v[i] - key)), np.max(np.abs(v[i] + key))) <= 0.01)
        assert sol.rates[i] == pytest.approx(target, abs=0.02)
    assert sol.trace_objective == pytest.approx(3.88, rel=0.05)


def test_unidentifiable():
    net = validate_network(SIGNAL_1_PRINTED, NOISE_1)
    P = enumerate_vertices(net)
    with pytest.raises(errors.UnidentifiableSignals):
        optimize_rates(P, net)
    with pytest.raises(errors.SingularRestrictedSignal):
        optimal_rates_orthogonal(P, net)


def test_iteration_cap(net2, poly2):
    sol = optimize_rates(poly2, net2, max_iter=2, polish=False)
    assert not sol.converged
    assert sol.iterations == 2
    assert sol.rates.sum() == pytest.approx(1)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_closed_form_matches_solver(seed):
    rng = np.random.default_rng(seed)
    net, W = orthogonal_instance(rng)
    P = enumerate_vertices(net)
    a = optimal_rates_orthogonal(P, net, W)
    b = optimize_rates(P, net, W)
    assert np.max(np.abs(a.rates - b.rates)) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gradient_matches_differences(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2, 3))
    L = rng.normal(size=(2, 2))
    obj = _Objective(A, L @ L.T + 0.1 * np.eye(2), 1.3)
    r = rng.dirichlet(np.ones(3)) + 0.05
    _, g = obj.value_grad(r)
    h = 1e-4
    for i in range(3):
        e = np.zeros(3)
        e[i] = h * r[i]
        fd = (obj.value(r + e) - obj.value(r - e)) / (2 * e[i])
        assert fd == pytest.approx(g[i], rel=1e-4)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hessian_matches_gradient_differences(seed):
    rng = np.random.default_rng(seed)
    obj = _Objective(rng.normal(size=(2, 3)), np.eye(2), 1.0)
    r = rng.dirichlet(np.ones(3)) + 0.05
    H = obj.hessian(r)
    h = 1e-6
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd = (obj.value_grad(r + e)[1] - obj.value_grad(r - e)[1]) / (2 * h)
        assert np.allclose(fd, H[:, i], rtol=1e-4, atol=1e-6 * np.max(np.abs(H)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_objective_is_convex_on_segments(seed):
    rng = np.random.default_rng(seed)
    obj = _Objective(rng.normal(size=(2, 4)), np.eye(2), 1.0)
    r0, r1 = rng.dirichlet(np.ones(4), size=2)
    for t in np.linspace(0.1, 0.9, 5):
        mid = obj.value((1 - t) * r0 + t * r1)
        assert mid <= (1 - t) * obj.value(r0) + t * obj.value(r1) + 1e-9 * abs(mid)


def test_scaling(net2, poly2):
    base = optimize_rates(poly2, net2)
    c = 3.0
    scaled = validate_network(c * net2.signal, net2.noise, 2 * net2.time)
    sol = optimize_rates(enumerate_vertices(scaled), scaled)
    assert np.allclose(sol.rates, base.rates, atol=1e-8)
    assert sol.objective == pytest.approx(base.objective / (c**2 * 4), rel=1e-8)


def test_affine_w_state(affine3):
    w = w_state([[1, 1, -1], [-1, 1, 1], [1, -1, 1]])
    rep = compare_affine(affine3, w)
    K_W = np.array([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]) / 3
    assert np.allclose(rep.k_affine, 4 / 3 * K_W, atol=1e-12)
    assert np.allclose(rep.k_centered, K_W / 3, atol=1e-12)
    assert rep.quarter_law_ok and rep.ratio_bound_ok


def test_affine_already_in_dfs(affine3):
    rep = compare_affine(affine3, w_state([[1, 0, -1], [-1, 1, 0], [0, -1, 1]]))
    assert np.allclose(rep.k_affine, 4 * rep.k_centered)
    assert rep.ratio_bound_ok


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_affine_factor_four_bound(seed):
    """Random strategies inside one affine block never beat four times the improved DFS strategy."""
    rng = np.random.default_rng(seed)
    affine3_like = validate_network(rng.normal(size=(1, 3)), [[1, 1, 1]])
    kappa = rng.uniform(-1, 1)
    labels = []
    while len(labels) < 3:
        k = rng.uniform(-1, 1, size=3)
        k = k - (k.sum() - kappa) / 3
        if np.max(np.abs(k)) <= 1:
            labels.append(k)
    c = rng.normal(size=3) + 1j * rng.normal(size=3)
    from dfsense.model import pure_strategy
    rep = compare_affine(affine3_like, pure_strategy(list(zip(labels, c / np.linalg.norm(c)))))
    assert rep.quarter_law_ok and rep.ratio_bound_ok
