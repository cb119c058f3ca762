"""Core domain types for the estimation scenario.

A :class:`SensorNetwork` holds the signal matrix (rows = signal fields,
columns = sensors), the noise matrix (rows = noise fields) and the
evolution time. Strategies are described by label vectors ``k`` with
``|k_j| <= 1``; the state ``|k>`` picks up energy ``S @ k`` from the
signals and ``N @ k`` from the noise.

All containers are frozen dataclasses whose arrays are made read-only, so
they can be shared freely.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidMatrix,
    InvalidStrategy,
    NegativeEigenvalue,
    NonFinite,
    NonHermitian,
    NonPositiveTime,
)

DEFAULT_TOL = 1e-9

SpinVector = np.ndarray


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_matrix(data, name: str, ncols: int | None = None) -> np.ndarray:
    if isinstance(data, np.ndarray):
        a = np.asarray(data, dtype=float)
    else:
        rows = [list(r) for r in data]
        lengths = {len(r) for r in rows}
        if len(lengths) > 1:
            raise DimensionMismatch(f"{name} table is ragged: row lengths {sorted(lengths)}")
        a = np.asarray(rows, dtype=float) if rows else np.zeros((0, ncols or 0))
    if a.size == 0 and ncols is not None and a.shape[0] == 0:
        a = a.reshape(0, ncols)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf")
    return a


@dataclass(frozen=True)
class SensorNetwork:
    """Signal matrix ``signal`` (s x n), noise matrix ``noise`` (m x n), time ``time``."""

    signal: np.ndarray
    noise: np.ndarray
    time: float = 1.0

    @property
    def n_sensors(self) -> int:
        return self.signal.shape[1]

    @property
    def n_signals(self) -> int:
        return self.signal.shape[0]

    @property
    def n_noise(self) -> int:
        return self.noise.shape[0]


def validate_network(signal, noise, time: float = 1.0) -> SensorNetwork:
    """Validate raw matrices and build a :class:`SensorNetwork`.

    ``noise`` may have zero rows (noiseless network). Raises
    :class:`DimensionMismatch`, :class:`NonFinite` or
    :class:`NonPositiveTime`.
    """
    S = _as_matrix(signal, "signal")
    if S.shape[0] == 0 or S.shape[1] == 0:
        raise DimensionMismatch(f"signal matrix must be non-empty, got shape {S.shape}")
    N = _as_matrix(noise, "noise", ncols=S.shape[1])
    if N.shape[1] != S.shape[1]:
        raise DimensionMismatch(
            f"signal has {S.shape[1]} sensor columns but noise has {N.shape[1]}"
        )
    time = float(time)
    if not np.isfinite(time):
        raise NonFinite("time is not finite")
    if time <= 0:
        raise NonPositiveTime(f"time must be positive, got {time}")
    return SensorNetwork(_frozen(S), _frozen(N), time)


def network_from_samples(signal_samples, noise_samples, time: float = 1.0) -> SensorNetwork:
    """Build a network from field samples ``table[field][sensor]``.

    Identical to :func:`validate_network`; exists so callers can think in
    terms of sampled field values ``f_i(x_j)``.
    """
    return validate_network(signal_samples, noise_samples, time)


def as_spin_vector(k, n: int | None = None, tol: float = DEFAULT_TOL) -> SpinVector:
    """Return ``k`` as a read-only float vector after checking ``|k|_inf <= 1 + tol``."""
    v = np.asarray(k, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"spin vector must be one-dimensional, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"spin vector has length {v.shape[0]}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise NonFinite("spin vector contains NaN or Inf")
    if v.size and np.max(np.abs(v)) > 1 + tol:
        raise InvalidStrategy(f"spin vector exceeds the unit hypercube: {v}")
    return _frozen(v)


def _label_array(labels, tol) -> np.ndarray:
    rows = [np.asarray(k, dtype=float) for k in labels]
    if not rows:
        raise InvalidStrategy("strategy needs at least one term")
    n = rows[0].shape[0]
    K = np.vstack([as_spin_vector(r, n, tol) for r in rows])
    return K


@dataclass(frozen=True)
class PureStrategy:
    """Superposition ``sum_k c_k |k>`` stored as ``labels`` (terms x n) and complex ``amplitudes``."""

    labels: np.ndarray
    amplitudes: np.ndarray

    @property
    def terms(self) -> list[tuple[np.ndarray, complex]]:
        return [(k, complex(c)) for k, c in zip(self.labels, self.amplitudes)]

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def n_sensors(self) -> int:
        return self.labels.shape[1]

    def __len__(self):
        return len(self.amplitudes)


def pure_strategy(terms: Iterable[tuple[Sequence[float], complex]], tol: float = DEFAULT_TOL,
                  normalize: bool = False) -> PureStrategy:
    """Build a :class:`PureStrategy` from ``(k, amplitude)`` pairs.

    Labels must be pairwise distinct (infinity-norm distance > ``tol``) and
    the squared amplitudes must sum to one unless ``normalize`` is set.
    """
    terms = list(terms)
    K = _label_array([t[0] for t in terms], tol)
    c = np.asarray([complex(t[1]) for t in terms], dtype=complex)
    if not np.all(np.isfinite(c)):
        raise NonFinite("amplitudes contain NaN or Inf")
    for i in range(len(K)):
        d = np.max(np.abs(K[i + 1:] - K[i]), axis=1) if i + 1 < len(K) else np.array([])
        if np.any(d <= tol):
            raise InvalidStrategy(f"duplicate label {K[i]}")
    norm = float(np.sum(np.abs(c) ** 2))
    if normalize:
        if norm <= 0:
            raise InvalidStrategy("all amplitudes are zero")
        c = c / np.sqrt(norm)
    elif abs(norm - 1) > tol:
        raise InvalidStrategy(f"squared amplitudes sum to {norm}, not 1")
    return PureStrategy(_frozen(K), _frozen(c))


@dataclass(frozen=True)
class SequentialStrategy:
    """GHZ states prepared round by round: ``labels`` (terms x n) with probabilities ``rates``."""

    labels: np.ndarray
    rates: np.ndarray

    @property
    def terms(self) -> list[tuple[np.ndarray, float]]:
        return [(k, float(r)) for k, r in zip(self.labels, self.rates)]

    @property
    def n_sensors(self) -> int:
        return self.labels.shape[1]

    def __len__(self):
        return len(self.rates)


def canonical_sign(k: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Return the lexicographically larger of ``k`` and ``-k``.

    Entries within ``tol`` of zero are skipped when deciding the sign.
    """
    for x in k:
        if x > tol:
            return k
        if x < -tol:
            return -k
    return k


def sequential_strategy(terms: Iterable[tuple[Sequence[float], float]], tol: float = DEFAULT_TOL,
                        normalize: bool = False) -> SequentialStrategy:
    """Build a :class:`SequentialStrategy` from ``(k, rate)`` pairs.

    ``k`` and ``-k`` label the same GHZ state; such terms are merged by
    summing their rates. Zero rates are dropped, negative ones rejected.
    After construction ``|sum(rates) - 1| <= 1e-12``.
    """
    terms = list(terms)
    K = _label_array([t[0] for t in terms], tol)
    r = np.asarray([float(t[1]) for t in terms])
    if not np.all(np.isfinite(r)):
        raise NonFinite("rates contain NaN or Inf")
    if np.any(r < -tol):
        raise InvalidStrategy(f"negative rate in {r}")
    merged_k: list[np.ndarray] = []
    merged_r: list[float] = []
    for k, rate in zip(K, r):
        if rate <= 0:
            continue
        for i, q in enumerate(merged_k):
            if np.max(np.abs(q - k)) <= tol or np.max(np.abs(q + k)) <= tol:
                merged_r[i] += rate
                break
        else:
            merged_k.append(k)
            merged_r.append(rate)
    if not merged_k:
        raise InvalidStrategy("no term with positive rate")
    rates = np.asarray(merged_r)
    total = rates.sum()
    if not normalize and abs(total - 1) > tol:
        raise InvalidStrategy(f"rates sum to {total}, not 1")
    rates = rates / total
    return SequentialStrategy(_frozen(np.vstack(merged_k)), _frozen(rates))


def weight_matrix(w, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate a symmetric positive semidefinite weight matrix."""
    W = np.asarray(w, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DimensionMismatch(f"weight matrix must be square, got shape {W.shape}")
    if not np.all(np.isfinite(W)):
        raise NonFinite("weight matrix contains NaN or Inf")
    if np.max(np.abs(W - W.T), initial=0.0) > tol:
        raise InvalidMatrix("weight matrix is not symmetric")
    W = (W + W.T) / 2
    if W.size and np.linalg.eigvalsh(W)[0] < -tol:
        raise InvalidMatrix("weight matrix is not positive semidefinite")
    return _frozen(W)


@dataclass(frozen=True)
class MixedKState:
    """Density matrix written in the label basis ``{|k_i>}``."""

    labels: np.ndarray
    coefficients: np.ndarray

    @property
    def n_sensors(self) -> int:
        return self.labels.shape[1]


def mixed_k_state(labels, coefficients, tol: float = DEFAULT_TOL) -> MixedKState:
    K = _label_array(labels, tol)
    rho = np.asarray(coefficients, dtype=complex)
    if rho.shape != (len(K), len(K)):
        raise DimensionMismatch(f"coefficient matrix {rho.shape} does not match {len(K)} labels")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise NonHermitian("coefficient matrix is not Hermitian")
    rho = (rho + rho.conj().T) / 2
    if abs(np.trace(rho).real - 1) > tol:
        raise InvalidMatrix(f"trace is {np.trace(rho).real}, not 1")
    if np.linalg.eigvalsh(rho)[0] < -tol:
        raise NegativeEigenvalue("coefficient matrix has a negative eigenvalue")
    return MixedKState(_frozen(K), _frozen(rho))


def pure_to_mixed(strategy: PureStrategy) -> MixedKState:
    c = strategy.amplitudes
    return MixedKState(strategy.labels, _frozen(np.outer(c, c.conj())))
