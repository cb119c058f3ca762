"""Fisher-information calculus through K matrices.

For every strategy considered here the quantum Fisher information matrix
factorises as ``F = 4 T^2 S K S^T`` where ``K`` is an ``n x n`` PSD matrix
depending only on the strategy. Comparing strategies therefore reduces to
comparing their K matrices in the PSD order, independently of the signals.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import DimensionMismatch, NegativeEigenvalue, NonHermitian, ShapeMismatch
from .model import (
    MixedKState,
    PureStrategy,
    SensorNetwork,
    SequentialStrategy,
    _frozen,
)


class PsdOrder(enum.Enum):
    GREATER = "greater"
    LESS = "less"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def _check_label(network: SensorNetwork, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.shape != (network.n_sensors,):
        raise DimensionMismatch(f"label of shape {k.shape} for {network.n_sensors} sensors")
    return k


def effective_energy(network: SensorNetwork, k) -> np.ndarray:
    """Signal energies ``S @ k`` of the label state ``|k>``."""
    return network.signal @ _check_label(network, k)


def k_matrix_sequential(strategy: SequentialStrategy) -> np.ndarray:
    """``sum_i r_i k_i k_i^T``."""
    K = strategy.labels
    return (K.T * strategy.rates) @ K


def k_matrix_pure(strategy: PureStrategy) -> np.ndarray:
    """``sum |c_k|^2 k k^T - kbar kbar^T`` with ``kbar = sum |c_k|^2 k``."""
    K = strategy.labels
    w = strategy.weights
    kbar = w @ K
    out = (K.T * w) @ K - np.outer(kbar, kbar)
    return (out + out.T) / 2


def k_matrix_mixed(state: MixedKState, tol: float = 1e-12) -> np.ndarray:
    """K matrix of a density matrix written in the label basis.

    With ``rho = U diag(p) U^dagger`` and ``L_ij = sum_nu conj(U_nu,i) U_nu,j k_nu``,

        K = 1/2 sum_{i,j} (p_i - p_j)^2 / (p_i + p_j) Re(L_ij L_ij^dagger)

    Pairs with ``p_i + p_j <= tol`` contribute nothing.
    """
    rho = np.asarray(state.coefficients, dtype=complex)
    if np.max(np.abs(rho - rho.conj().T)) > 1e-9:
        raise NonHermitian("coefficient matrix is not Hermitian")
    p, U = np.linalg.eigh((rho + rho.conj().T) / 2)
    if p[0] < -1e-9:
        raise NegativeEigenvalue(f"coefficient matrix has eigenvalue {p[0]}")
    p = np.where(p < tol, 0.0, p)
    num = (p[:, None] - p[None, :]) ** 2
    den = p[:, None] + p[None, :]
    w = np.divide(num, den, out=np.zeros_like(num), where=den > tol)
    # L[i, j, :] = sum_nu conj(U[nu, i]) U[nu, j] k_nu
    L = np.einsum("vi,vj,va->ija", U.conj(), U, state.labels)
    K = 0.5 * np.einsum("ij,ija,ijb->ab", w, L, L.conj()).real
    return (K + K.T) / 2


def qfim_from_k(network: SensorNetwork, k_matrix) -> np.ndarray:
    """``4 T^2 S K S^T``, symmetrised."""
    K = np.asarray(k_matrix, dtype=float)
    n = network.n_sensors
    if K.shape != (n, n):
        raise DimensionMismatch(f"K matrix of shape {K.shape} for {n} sensors")
    S = network.signal
    F = 4 * network.time**2 * S @ K @ S.T
    return (F + F.T) / 2


def single_direction_qfi(network: SensorNetwork, direction, k) -> float:
    """QFI ``4 T^2 (v^T S k)^2`` of the GHZ state along ``k`` for the combination ``v^T alpha``."""
    v = np.asarray(direction, dtype=float)
    if v.shape != (network.n_signals,):
        raise DimensionMismatch(f"direction of shape {v.shape} for {network.n_signals} signals")
    e = v @ effective_energy(network, k)
    return float(4 * network.time**2 * e * e)


def dephase(strategy: PureStrategy, network: SensorNetwork, tol: float = 1e-9) -> MixedKState:
    """State left after infinitely strong, independent noise fluctuations.

    Coherences ``c_k conj(c_k')`` survive only between labels with the same
    noise energy ``N k``; everything else averages to zero.
    """
    K = strategy.labels
    if K.shape[1] != network.n_sensors:
        raise DimensionMismatch("strategy and network disagree on the number of sensors")
    c = strategy.amplitudes
    rho = np.outer(c, c.conj())
    if network.n_noise:
        kappa = K @ network.noise.T
        diff = np.max(np.abs(kappa[:, None, :] - kappa[None, :, :]), axis=2)
        rho = np.where(diff <= tol, rho, 0.0)
    return MixedKState(K, _frozen(rho))


def psd_compare(a, b, tol: float = 1e-9) -> PsdOrder:
    """Compare two symmetric matrices in the Loewner order.

    The tolerance is scaled as ``tol * (1 + |a|_2 + |b|_2)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    if a.size == 0:
        return PsdOrder.EQUAL
    eff = tol * (1 + np.linalg.norm(a, 2) + np.linalg.norm(b, 2))
    diff = a - b
    ev = np.linalg.eigvalsh((diff + diff.T) / 2)
    if np.max(np.abs(ev)) <= eff:
        return PsdOrder.EQUAL
    if ev[0] >= -eff:
        return PsdOrder.GREATER
    if ev[-1] <= eff:
        return PsdOrder.LESS
    return PsdOrder.INCOMPARABLE
