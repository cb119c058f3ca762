"""Turning an arbitrary DFS strategy into a vertex-sequential GHZ strategy.

Three steps, each of which can only increase the K matrix in the PSD
order:

1. symmetrize    -- replace ``|k>`` amplitudes by GHZ superpositions, gain ``kbar kbar^T``
2. sequentialize -- prepare each GHZ state in its own round, K unchanged
3. lift          -- split every label into DFS vertices via a convex decomposition
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dfs import DfsPolytope, caratheodory_decompose, contains, enumerate_vertices
from .errors import DegenerateStrategy, DfsenseError, NotGhzForm, NotInDfs
from .model import (
    PureStrategy,
    SensorNetwork,
    SequentialStrategy,
    _frozen,
    canonical_sign,
    sequential_strategy,
)
from .qfim import PsdOrder, k_matrix_pure, k_matrix_sequential, psd_compare

STAGES = ("input", "symmetrized", "sequentialized", "vertex_lifted")


def _pair_groups(labels: np.ndarray, tol: float):
    """Group row indices of ``labels`` by GHZ pair; returns [(rep, [(idx, sign)])] and zero rows."""
    groups: list[tuple[np.ndarray, list[tuple[int, int]]]] = []
    zeros = []
    for i, k in enumerate(labels):
        if np.max(np.abs(k)) <= tol:
            zeros.append(i)
            continue
        rep = canonical_sign(k, tol)
        sign = 1 if rep is k else -1
        for g_rep, members in groups:
            if np.max(np.abs(g_rep - rep)) <= tol:
                members.append((i, sign))
                break
        else:
            groups.append((np.array(rep, dtype=float), [(i, sign)]))
    return groups, zeros


def symmetrize(strategy: PureStrategy, tol: float = 1e-9) -> PureStrategy:
    """Superposition of GHZ states with amplitudes ``sqrt(|c_k|^2 + |c_-k|^2)``.

    The result is returned in the label basis, i.e. with amplitude
    ``c_k / sqrt(2)`` on both ``k`` and ``-k``. Zero labels are dropped and
    the remaining weight renormalised.
    """
    groups, _ = _pair_groups(strategy.labels, tol)
    w = strategy.weights
    weights = np.array([sum(w[i] for i, _ in members) for _, members in groups])
    total = weights.sum() if len(weights) else 0.0
    if total <= tol:
        raise DegenerateStrategy("strategy has no weight off the zero label")
    weights = weights / total
    labels, amps = [], []
    for (rep, _), wk in zip(groups, weights):
        a = np.sqrt(wk / 2)
        labels += [rep, -rep]
        amps += [a, a]
    return PureStrategy(_frozen(np.array(labels)), _frozen(np.array(amps, dtype=complex)))


def sequentialize(strategy: PureStrategy, tol: float = 1e-9) -> SequentialStrategy:
    """Prepare each GHZ component of a GHZ superposition in its own round.

    Raises :class:`NotGhzForm` unless every label ``k`` is paired with
    ``-k`` at equal amplitude magnitude.
    """
    groups, zeros = _pair_groups(strategy.labels, tol)
    if zeros:
        raise NotGhzForm("zero label has no GHZ partner")
    mag = np.abs(strategy.amplitudes)
    terms = []
    for rep, members in groups:
        plus = [mag[i] for i, s in members if s > 0]
        minus = [mag[i] for i, s in members if s < 0]
        if len(plus) != 1 or len(minus) != 1 or abs(plus[0] - minus[0]) > tol:
            raise NotGhzForm(f"label {rep} lacks a matching -k partner")
        terms.append((rep, plus[0] ** 2 + minus[0] ** 2))
    return sequential_strategy(terms, tol=tol, normalize=True)


def lift_to_vertices(strategy: SequentialStrategy, polytope: DfsPolytope,
                     tol: float = 1e-9) -> SequentialStrategy:
    """Replace each label by DFS vertices of a convex decomposition.

    The new rate of vertex ``v_i`` from label ``k`` is ``r_k * p_i``; rates
    of the same GHZ state (``v`` or ``-v``) are summed.
    """
    n_pairs = len(polytope.vertices) // 2
    rates = np.zeros(n_pairs)
    for k, r in zip(strategy.labels, strategy.rates):
        if not contains(polytope, k, tol):
            raise NotInDfs(f"label {k} is not in the DFS")
        dec = caratheodory_decompose(polytope, k, tol)
        for idx, p in zip(dec.indices, dec.weights):
            rates[idx // 2] += r * p
    used = np.flatnonzero(rates > 0)
    reps = polytope.representatives
    return sequential_strategy([(reps[i], rates[i]) for i in used], tol=tol, normalize=True)


@dataclass
class ImprovementTrace:
    """Strategies and K matrices recorded after each improvement step."""

    stages: list[tuple[str, object, np.ndarray]] = field(default_factory=list)
    orders: list[PsdOrder] = field(default_factory=list)
    min_gain_eigenvalues: list[float] = field(default_factory=list)

    @property
    def final(self):
        return self.stages[-1][1]

    @property
    def k_matrices(self) -> list[np.ndarray]:
        return [K for _, _, K in self.stages]

    @property
    def monotone(self) -> bool:
        return all(o in (PsdOrder.GREATER, PsdOrder.EQUAL) for o in self.orders)


def improve_pipeline(strategy: PureStrategy, network: SensorNetwork, tol: float = 1e-9,
                     polytope: DfsPolytope | None = None) -> ImprovementTrace:
    """Run symmetrize, sequentialize and vertex lifting, recording K at every stage."""
    if polytope is None:
        polytope = enumerate_vertices(network)
    for k in strategy.labels:
        if not contains(polytope, k, tol):
            raise NotInDfs(f"label {k} is not in the DFS")
    sym = symmetrize(strategy, tol)
    seq = sequentialize(sym, tol)
    lifted = lift_to_vertices(seq, polytope, tol)
    trace = ImprovementTrace()
    for label, strat, K in zip(
        STAGES,
        (strategy, sym, seq, lifted),
        (k_matrix_pure(strategy), k_matrix_pure(sym), k_matrix_sequential(seq),
         k_matrix_sequential(lifted)),
    ):
        if trace.stages:
            prev = trace.stages[-1][2]
            diff = K - prev
            trace.min_gain_eigenvalues.append(float(np.linalg.eigvalsh((diff + diff.T) / 2)[0]))
            trace.orders.append(psd_compare(K, prev, tol))
        trace.stages.append((label, strat, K))
    if not trace.monotone:
        raise DfsenseError(f"K matrix decreased along the pipeline: {trace.orders}")
    return trace


def is_extremal_trace(k_matrix, n: int, tol: float = 1e-9,
                      polytope: DfsPolytope | None = None) -> bool:
    """Sufficient extremality test: the trace of K reaches its maximum.

    The maximum is ``n`` when every vertex has entries ``+-1`` (e.g. no
    noise), otherwise the largest squared vertex norm. Without a polytope
    the noiseless value ``n`` is assumed.
    """
    n_max = float(n)
    if polytope is not None:
        n_max = float(np.max(np.sum(polytope.vertices**2, axis=1)))
    return bool(np.trace(np.asarray(k_matrix)) >= n_max - tol)


def certify_vertex_sequential(strategy: SequentialStrategy, polytope: DfsPolytope,
                              tol: float = 1e-9) -> bool:
    """True iff every label is a DFS vertex up to sign; such strategies are extremal."""
    V = polytope.vertices
    for k in strategy.labels:
        if not np.any(np.max(np.abs(V - k), axis=1) <= tol):
            return False
    return True
