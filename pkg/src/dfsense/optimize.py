"""Rate allocation over vertex-sequential GHZ strategies.

The figure of merit is ``M = tr(W F^-1)`` with ``F = 4 T^2 S K S^T`` and
``K = sum_i r_i v_i v_i^T`` over one representative ``v_i`` per vertex
pair. ``M`` is convex in the rates, so any stationary point on the simplex
is a global minimum.

Two objective scales are reported: ``objective`` is ``M`` itself, while
``trace_objective = 4 T^2 M = tr(W (S K S^T)^-1)`` drops the time factor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dfs import DfsPolytope, center_affine, enumerate_vertices
from .errors import (
    DegenerateStrategy,
    NonOrthogonalVertices,
    SingularQfim,
    SingularRestrictedSignal,
    UnidentifiableSignals,
)
from .improve import improve_pipeline
from .model import PureStrategy, SensorNetwork
from .qfim import PsdOrder, k_matrix_pure, psd_compare, qfim_from_k

_RATE_FLOOR = 1e-15


@dataclass(frozen=True)
class RateSolution:
    """Optimal rates over ``polytope.representatives`` and solver diagnostics."""

    rates: np.ndarray
    vertex_indices: np.ndarray
    objective: float
    trace_objective: float
    iterations: int
    converged: bool
    method: str

    @property
    def pairs(self) -> list[tuple[int, float]]:
        return [(int(i), float(r)) for i, r in zip(self.vertex_indices, self.rates)]


def figure_of_merit(weight, qfim, tol: float = 1e-12) -> float:
    """``tr(W F^-1)``.

    A singular ``F`` is accepted as long as ``W`` vanishes on its null
    space; otherwise the weighted parameter combination is unidentifiable
    and :class:`SingularQfim` is raised.
    """
    W = np.asarray(weight, dtype=float)
    F = np.asarray(qfim, dtype=float)
    ev, U = np.linalg.eigh((F + F.T) / 2)
    scale = max(np.max(np.abs(ev)), 1e-300)
    null = ev <= tol * scale
    if np.any(null):
        Wn = U[:, null].T @ W @ U[:, null]
        if np.max(np.abs(Wn)) > tol * max(np.max(np.abs(W)), 1.0):
            raise SingularQfim("QFIM is singular along a weighted direction")
    inv = (U[:, ~null] / ev[~null]) @ U[:, ~null].T
    return float(np.trace(W @ inv))


class _Objective:
    """``M(r)`` with its gradient and Hessian for fixed signal directions ``A = S V^T``."""

    def __init__(self, A: np.ndarray, W: np.ndarray, time: float):
        self.A = A
        self.W = W
        self.c = 4 * time**2

    def fisher(self, r):
        return self.c * (self.A * r) @ self.A.T

    def value(self, r):
        F = self.fisher(np.maximum(r, _RATE_FLOOR))
        return float(np.trace(self.W @ np.linalg.inv(F)))

    def value_grad(self, r):
        G = np.linalg.inv(self.fisher(np.maximum(r, _RATE_FLOOR)))
        P = G @ self.W @ G
        val = float(np.trace(self.W @ G))
        grad = -self.c * np.einsum("ai,ab,bi->i", self.A, P, self.A)
        return val, grad

    def hessian(self, r):
        G = np.linalg.inv(self.fisher(np.maximum(r, _RATE_FLOOR)))
        P = G @ self.W @ G
        AG = self.A.T @ G @ self.A
        AP = self.A.T @ P @ self.A
        return 2 * self.c**2 * AG * AP


def _setup(polytope: DfsPolytope, network: SensorNetwork, weight):
    V = polytope.representatives
    A = network.signal @ V.T
    W = np.asarray(weight if weight is not None else np.eye(network.n_signals), dtype=float)
    if W.shape != (network.n_signals, network.n_signals):
        raise SingularQfim(f"weight matrix shape {W.shape} does not match {network.n_signals} signals")
    return V, A, W


def _solution(obj: _Objective, r, iterations, converged, method, time):
    r = np.where(r < 1e-14, 0.0, r)
    r = r / r.sum()
    val = obj.value(r)
    return RateSolution(
        rates=r,
        vertex_indices=np.arange(len(r)) * 2,
        objective=val,
        trace_objective=4 * time**2 * val,
        iterations=iterations,
        converged=converged,
        method=method,
    )


def optimal_rates_orthogonal(polytope: DfsPolytope, network: SensorNetwork, weight=None,
                             tol: float = 1e-9) -> RateSolution:
    """Closed-form optimal rates for mutually orthogonal vertex representatives.

    With ``A = S V^T`` square and invertible, ``M = (1 / 4T^2) sum_i w_i / r_i``
    where ``w_i = (A^-1 W A^-T)_ii``, minimised on the simplex by
    ``r_i = sqrt(w_i) / sum_j sqrt(w_j)``.
    """
    V, A, W = _setup(polytope, network, weight)
    norms = np.linalg.norm(V, axis=1)
    gram = V @ V.T
    off = gram - np.diag(np.diag(gram))
    if np.max(np.abs(off), initial=0.0) > tol * np.max(norms) ** 2:
        raise NonOrthogonalVertices("vertex representatives are not mutually orthogonal")
    S_r = network.signal @ polytope.kernel_basis
    if np.linalg.matrix_rank(S_r, tol=1e-10 * max(np.max(np.abs(S_r)), 1e-300)) < network.n_signals:
        raise SingularRestrictedSignal("signal map restricted to the DFS has rank below the number of signals")
    if A.shape[0] != A.shape[1]:
        raise SingularRestrictedSignal(
            f"closed form needs as many vertex pairs as signals ({A.shape[1]} vs {A.shape[0]})"
        )
    Ainv = np.linalg.inv(A)
    w = np.einsum("ia,ab,ib->i", Ainv, W, Ainv)
    root = np.sqrt(np.maximum(w, 0.0))
    r = root / root.sum()
    obj = _Objective(A, W, network.time)
    return _solution(obj, r, 0, True, "closed_form", network.time)


def _kkt_residual(r, g):
    active = r > 1e-12 * r.max()
    lam = np.dot(r[active], g[active])
    return lam, float(np.max(np.abs(g[active] - lam)) / max(abs(lam), 1e-300))


def _newton_polish(obj: _Objective, r, max_steps: int = 50):
    """Equality-constrained Newton iterations on the support of ``r``.

    Close to the optimum ``M`` is flat below its own round-off, so steps are
    judged by the KKT residual (spread of the gradient over the support)
    and only rejected when ``M`` rises by more than its round-off, which
    grows with the condition number of the Fisher matrix.
    """
    for _ in range(max_steps):
        val, g = obj.value_grad(r)
        lam, res = _kkt_residual(r, g)
        active = r > 1e-12 * r.max()
        # drop coordinates that the KKT conditions want at zero
        drop = active & (r < 1e-9) & (g > lam)
        if np.any(drop):
            r = np.where(drop, 0.0, r)
            r /= r.sum()
            continue
        idx = np.flatnonzero(active)
        H = obj.hessian(r)[np.ix_(idx, idx)]
        m = len(idx)
        KKT = np.zeros((m + 1, m + 1))
        KKT[:m, :m] = H
        KKT[:m, m] = 1.0
        KKT[m, :m] = 1.0
        rhs = np.concatenate([-g[idx], [0.0]])
        try:
            step = np.linalg.solve(KKT, rhs)[:m]
        except np.linalg.LinAlgError:
            break
        t = 1.0
        neg = step < 0
        if np.any(neg):
            t = min(1.0, 0.99 * np.min(r[idx][neg] / -step[neg]))
        new = r.copy()
        new[idx] = r[idx] + t * step
        new /= new.sum()
        new_val, new_g = obj.value_grad(new)
        if new_val > val + 1e-6 * abs(val) or _kkt_residual(new, new_g)[1] >= res:
            break
        r = new
        if np.max(np.abs(t * step)) < 1e-15:
            break
    return r


def optimize_rates(polytope: DfsPolytope, network: SensorNetwork, weight=None,
                   max_iter: int = 100_000, rtol: float = 1e-12, window: int = 20,
                   polish: bool = True) -> RateSolution:
    """Minimise ``M(r)`` over the probability simplex.

    Entropic mirror descent from uniform rates with Armijo backtracking;
    stops when the relative decrease over ``window`` iterations drops below
    ``rtol``. A short Newton polish on the support then sharpens the rates.
    If ``max_iter`` is reached the best point is returned with
    ``converged=False``.
    """
    V, A, W = _setup(polytope, network, weight)
    if np.linalg.matrix_rank(A) < network.n_signals:
        raise UnidentifiableSignals("vertex signal directions do not span the parameter space")
    obj = _Objective(A, W, network.time)
    m = A.shape[1]
    r = np.full(m, 1.0 / m)
    val, g = obj.value_grad(r)
    history = [val]
    eta = 1.0 / max(np.max(np.abs(g)), 1e-300)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        while True:
            z = -eta * (g - g.min())
            new = r * np.exp(z)
            new /= new.sum()
            new = np.maximum(new, _RATE_FLOOR)
            new /= new.sum()
            new_val = obj.value(new)
            if new_val <= val + 1e-4 * np.dot(g, new - r) or eta < 1e-300:
                break
            eta *= 0.5
        r, val = new, new_val
        _, g = obj.value_grad(r)
        eta *= 2.0
        history.append(val)
        if len(history) > window:
            old = history[-window - 1]
            if old - val <= rtol * abs(val):
                converged = True
                break
    if polish:
        r = _newton_polish(obj, r)
    return _solution(obj, r, it, converged, "mirror_descent", network.time)


@dataclass(frozen=True)
class AffineComparison:
    k_affine: np.ndarray
    k_centered: np.ndarray
    k_vertex: np.ndarray
    quarter_law_ok: bool
    ratio_bound_ok: bool


def compare_affine(network: SensorNetwork, strategy_affine: PureStrategy,
                   tol: float = 1e-9) -> AffineComparison:
    """Bound the gain of an affine-DFS strategy over the DFS proper.

    Centering gives a DFS strategy with exactly a quarter of the affine K
    matrix; improving that one to a vertex-sequential strategy must then
    dominate ``K_affine / 4``, both for K and for the QFIM.
    """
    centered = center_affine(strategy_affine, network, tol)
    k_aff = k_matrix_pure(strategy_affine)
    k_cen = k_matrix_pure(centered)
    quarter = bool(np.max(np.abs(4 * k_cen - k_aff)) <= tol)
    try:
        polytope = enumerate_vertices(network)
        k_vert = improve_pipeline(centered, network, tol, polytope).k_matrices[-1]
    except DegenerateStrategy:
        # every centred label is the zero vector
        k_vert = k_cen
    ok_k = psd_compare(k_vert, k_aff / 4, tol) in (PsdOrder.GREATER, PsdOrder.EQUAL)
    F_vert = qfim_from_k(network, k_vert)
    F_aff = qfim_from_k(network, k_aff)
    ok_f = psd_compare(F_vert, F_aff / 4, tol) in (PsdOrder.GREATER, PsdOrder.EQUAL)
    return AffineComparison(k_aff, k_cen, k_vert, quarter, bool(ok_k and ok_f))
