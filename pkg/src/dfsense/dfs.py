"""The decoherence-free subspace as an explicit polytope.

The DFS is ``{k : N k = 0, |k|_inf <= 1}``: the kernel of the noise matrix
cut by the unit hypercube. In kernel coordinates ``k = B y`` it becomes
``{y : -1 <= (B y)_j <= 1}``, and its vertices are found by activating
``d`` hypercube facets at a time.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, EmptyDfs, MixedAffineBlocks, NotInDfs
from .model import (
    PureStrategy,
    SensorNetwork,
    _frozen,
    canonical_sign,
)

RANK_TOL = 1e-10
VERTEX_DEDUP_TOL = 1e-8
# facet subsets whose smallest relative singular value falls below this are dependent
_MIN_SUBSET_SV = 1e-10


@dataclass(frozen=True)
class DfsPolytope:
    """Kernel basis of the noise matrix plus every vertex of the DFS.

    ``vertices`` lists each canonical representative (lexicographically
    larger of ``v`` and ``-v``) immediately followed by its negation.
    """

    kernel_basis: np.ndarray
    vertices: np.ndarray
    noise: np.ndarray

    @property
    def dimension(self) -> int:
        return self.kernel_basis.shape[1]

    @property
    def n_sensors(self) -> int:
        return self.kernel_basis.shape[0]

    @property
    def representatives(self) -> np.ndarray:
        """One vertex per GHZ state (every other row of ``vertices``)."""
        return self.vertices[::2]


@dataclass(frozen=True)
class ConvexDecomposition:
    indices: np.ndarray
    weights: np.ndarray

    @property
    def pairs(self) -> list[tuple[int, float]]:
        return [(int(i), float(w)) for i, w in zip(self.indices, self.weights)]


def kernel_basis(noise, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ``{k : noise @ k = 0}``.

    Singular values below ``tol * s_max * max(m, n)`` count as zero. A
    noise matrix with no rows gives the identity.
    """
    N = np.asarray(noise, dtype=float)
    m, n = N.shape
    if m == 0:
        return np.eye(n)
    _, sv, vt = np.linalg.svd(N, full_matrices=True)
    if sv.size == 0 or sv[0] == 0:
        return np.eye(n)
    rank = int(np.sum(sv > tol * sv[0] * max(m, n)))
    return vt[rank:].T.copy()


def _sorted_vertices(cands: list[np.ndarray]) -> np.ndarray:
    reps: list[np.ndarray] = []
    for v in cands:
        c = canonical_sign(v)
        if not any(np.max(np.abs(c - r)) <= VERTEX_DEDUP_TOL for r in reps):
            reps.append(c)
    reps.sort(key=lambda r: tuple(-x for x in r))
    out = []
    for r in reps:
        out.append(r)
        out.append(-r)
    return np.array(out)


def enumerate_vertices(network: SensorNetwork, tol: float = RANK_TOL) -> DfsPolytope:
    """Enumerate all vertices of the DFS of ``network``.

    Every ``d``-subset of hypercube facets with independent normals is
    solved for all ``2**d`` sign choices; feasible solutions are kept and
    deduplicated. Cost grows as ``C(n, d) * 2**d``.
    """
    N = network.noise
    B = kernel_basis(N, tol)
    n, d = B.shape
    if d == 0:
        raise EmptyDfs("noise matrix has full column rank; the DFS is {0}")
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=d))).T  # d x 2^d
    cands: list[np.ndarray] = []
    for rows in itertools.combinations(range(n), d):
        A = B[list(rows)]
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] <= _MIN_SUBSET_SV * max(sv[0], 1.0):
            continue
        Y = np.linalg.solve(A, signs)
        K = B @ Y
        feasible = np.max(np.abs(K), axis=0) <= 1 + 1e-9
        for k in K.T[feasible]:
            k = k.copy()
            k[np.abs(np.abs(k) - 1) <= 1e-12] = np.sign(k[np.abs(np.abs(k) - 1) <= 1e-12])
            k[np.abs(k) <= 1e-13] = 0.0
            cands.append(k)
    V = _sorted_vertices(cands)
    return DfsPolytope(_frozen(B), _frozen(V), _frozen(np.asarray(N, dtype=float)))


def contains(polytope: DfsPolytope, k, tol: float = 1e-9) -> bool:
    """True iff ``|N k|_inf <= tol`` and ``|k|_inf <= 1 + tol``."""
    k = np.asarray(k, dtype=float)
    if k.shape != (polytope.n_sensors,):
        raise DimensionMismatch(f"label of shape {k.shape} for a {polytope.n_sensors}-sensor DFS")
    if k.size and np.max(np.abs(k)) > 1 + tol:
        return False
    if polytope.noise.shape[0] == 0:
        return True
    return bool(np.max(np.abs(polytope.noise @ k)) <= tol)


def project_to_dfs(polytope: DfsPolytope, k) -> np.ndarray:
    """Orthogonal projection of ``k`` onto the noise kernel, shrunk into the hypercube.

    Useful for labels whose entries were rounded and therefore sit slightly
    off the kernel.
    """
    B = polytope.kernel_basis
    p = B @ (B.T @ np.asarray(k, dtype=float))
    m = np.max(np.abs(p), initial=0.0)
    return p / m if m > 1 else p


def affine_offset(network: SensorNetwork, k) -> np.ndarray:
    """Noise energy ``kappa = N k``; ``k`` lies in DFS_kappa when also ``|k|_inf <= 1``."""
    k = np.asarray(k, dtype=float)
    if k.shape != (network.n_sensors,):
        raise DimensionMismatch(f"label of shape {k.shape} for {network.n_sensors} sensors")
    return network.noise @ k


def caratheodory_decompose(polytope: DfsPolytope, k, tol: float = 1e-9) -> ConvexDecomposition:
    """Write ``k`` as a convex combination of at most ``d + 1`` DFS vertices.

    A feasibility LP over all vertices gives some decomposition; its support
    is then pruned by moving along null vectors of the active system until
    at most ``d + 1`` weights remain. Any valid decomposition may be
    returned when several exist.
    """
    k = np.asarray(k, dtype=float)
    if not contains(polytope, k, tol):
        raise NotInDfs(f"{k} is not in the DFS")
    B = polytope.kernel_basis
    d = polytope.dimension
    Y = polytope.vertices @ B  # vertex coordinates, rows
    y = B.T @ k
    nv = len(Y)
    # exact hit on a vertex
    hit = np.flatnonzero(np.max(np.abs(polytope.vertices - k), axis=1) <= tol)
    if hit.size:
        return ConvexDecomposition(_frozen(hit[:1]), _frozen(np.array([1.0])))

    A_eq = np.vstack([Y.T, np.ones(nv)])
    b_eq = np.concatenate([y, [1.0]])
    res = linprog(np.zeros(nv), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise NotInDfs(f"{k} admits no convex decomposition into DFS vertices")
    p = np.clip(res.x, 0.0, None)

    support = np.flatnonzero(p > 1e-14)
    while True:
        M = np.vstack([Y[support].T, np.ones(support.size)])
        if support.size <= d + 1 and np.linalg.matrix_rank(M) == support.size:
            break
        z = np.linalg.svd(M)[2][-1]
        if not np.any(z > 0):
            z = -z
        pos = z > 1e-15
        ratios = p[support][pos] / z[pos]
        t = ratios.min()
        p[support] = p[support] - t * z
        p[support[pos][np.argmin(ratios)]] = 0.0
        p = np.clip(p, 0.0, None)
        support = np.flatnonzero(p > 1e-14)

    w = p[support]
    w = w / w.sum()
    # least-squares polish of the weights on the final support
    M = np.vstack([Y[support].T, np.ones(support.size)])
    sol, *_ = np.linalg.lstsq(M, b_eq, rcond=None)
    if np.all(sol >= 0) and np.max(np.abs(M @ sol - b_eq)) <= np.max(np.abs(M @ w - b_eq)):
        w = sol / sol.sum()
    keep = w > 0
    order = np.argsort(support[keep])
    return ConvexDecomposition(_frozen(support[keep][order]), _frozen(w[keep][order]))


def center_affine(strategy: PureStrategy, network: SensorNetwork, tol: float = 1e-9) -> PureStrategy:
    """Map a strategy living in one affine DFS into the DFS proper.

    Labels become ``(k - kbar) / 2`` with ``kbar = sum |c_k|^2 k``; the
    amplitudes are kept. The resulting K matrix is exactly one quarter of
    the input's.
    """
    K = strategy.labels
    if K.shape[1] != network.n_sensors:
        raise DimensionMismatch("strategy and network disagree on the number of sensors")
    kappa = K @ network.noise.T
    if kappa.size and np.max(np.abs(kappa - kappa[0])) > tol:
        raise MixedAffineBlocks("strategy labels lie in different affine DFS blocks")
    kbar = strategy.weights @ K
    labels = (K - kbar) / 2
    return PureStrategy(_frozen(labels), strategy.amplitudes)
