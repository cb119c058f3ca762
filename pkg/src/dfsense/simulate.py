"""Shot-level Monte Carlo of sequential GHZ sensing with local parity readout.

A GHZ state along ``k`` acquires the relative phase
``phi = 2 T (alpha^T S k + beta^T N k)``. Measuring the joint parity of
the local observables with an extra phase offset gives outcome ``+1`` with
probability ``(1 + sin(phi + offset)) / 2``; every shot carries Fisher
information exactly 1 about ``phi``. Each direction is read out at offsets
0 and pi/2 and ``phi`` is recovered by maximum likelihood, then ``alpha``
follows from a weighted least-squares solve across directions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import derive_key, kernels
from .errors import DimensionMismatch, NonFinite, PhaseWrap, UnidentifiableSignals
from .model import SensorNetwork, SequentialStrategy

OFFSETS = (0.0, math.pi / 2)
_PARITY_STREAM = 0
_NOISE_STREAM = 1


@dataclass(frozen=True)
class NoiseModel:
    """Per-source standard deviation of the white-noise amplitudes ``beta``.

    ``mode`` is ``"off"``, ``"gaussian"`` (fresh Gaussian ``beta`` every
    shot) or ``"infinite"`` (exact infinitely-strong dephasing: any GHZ
    state with ``N k != 0`` gives parity +-1 with probability 1/2).
    """

    sigma: tuple = ()
    mode: str = "gaussian"

    def __post_init__(self):
        if self.mode not in ("off", "gaussian", "infinite"):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        s = np.asarray(self.sigma, dtype=float)
        if not np.all(np.isfinite(s)):
            raise NonFinite("noise sigma is not finite")
        if np.any(s < 0):
            raise ValueError("noise sigma must be non-negative")
        object.__setattr__(self, "sigma", tuple(float(x) for x in s))


@dataclass(frozen=True)
class ShotRecord:
    direction: int
    parity: int
    offset: float


@dataclass(frozen=True)
class EstimationReport:
    estimates: np.ndarray
    covariance: np.ndarray
    crb: np.ndarray
    shots: np.ndarray
    repetitions: int
    directions: np.ndarray
    informative: np.ndarray

    @property
    def shots_used(self) -> int:
        return int(self.shots.sum()) * self.repetitions


def flip_schedule(k, time: float) -> list[tuple[int, float]]:
    """Single bit-flip per sensor at ``t_j = (1 + k_j) T / 2`` realising the effective spin ``k_j``.

    Sensors with ``k_j = +-1`` need no flip (a flip at ``T`` does nothing, a
    flip at 0 only relabels the initial state) and are left out.
    """
    out = []
    for j, kj in enumerate(np.asarray(k, dtype=float)):
        if abs(kj) > 1 + 1e-12:
            raise ValueError(f"effective spin {kj} outside [-1, 1]")
        if abs(abs(kj) - 1) <= 1e-12:
            continue
        out.append((j, (1 + kj) * time / 2))
    return out


def ghz_phase(network: SensorNetwork, k, alpha, beta=None) -> float:
    """Relative phase ``2 T (alpha^T S k + beta^T N k)`` between ``|k>`` and ``|-k>``."""
    k = np.asarray(k, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if k.shape != (network.n_sensors,) or alpha.shape != (network.n_signals,):
        raise DimensionMismatch("label or alpha does not match the network")
    phi = alpha @ (network.signal @ k)
    if beta is not None and network.n_noise:
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (network.n_noise,):
            raise DimensionMismatch(f"beta of shape {beta.shape} for {network.n_noise} noise fields")
        phi += beta @ (network.noise @ k)
    return float(2 * network.time * phi)


def _noise_coefficients(network, k, noise: NoiseModel, tol):
    """Per-source phase coefficients ``2 T sigma_j (N k)_j``; ``None`` when the noise cannot act."""
    if noise.mode == "off" or network.n_noise == 0:
        return None, False
    kappa = network.noise @ k
    kappa = np.where(np.abs(kappa) <= tol, 0.0, kappa)
    off_dfs = bool(np.any(kappa != 0))
    if noise.mode == "infinite":
        return None, off_dfs
    sigma = np.asarray(noise.sigma, dtype=float)
    if sigma.shape != (network.n_noise,):
        raise DimensionMismatch(f"{len(sigma)} noise sigmas for {network.n_noise} noise fields")
    coeffs = 2 * network.time * sigma * kappa
    if not np.any(coeffs != 0):
        return None, False
    return coeffs, False


def _draw(network, k, alpha, noise, offset, shots, key, noise_key, tol, counts_only):
    k = np.asarray(k, dtype=float)
    coeffs, dephased = _noise_coefficients(network, k, noise, tol)
    if dephased:
        p = 0.5
        return kernels.count_below(key, shots, p) if counts_only else kernels.outcomes_below(key, shots, p)
    phase = ghz_phase(network, k, alpha) + offset
    if coeffs is None:
        p = 0.5 * (1.0 + math.sin(phase))
        return kernels.count_below(key, shots, p) if counts_only else kernels.outcomes_below(key, shots, p)
    if counts_only:
        return kernels.noisy_count(key, noise_key, shots, phase, coeffs)
    return kernels.noisy_outcomes(key, noise_key, shots, phase, coeffs)


def sample_shots(network: SensorNetwork, k, alpha, noise: NoiseModel | None = None,
                 offset: float = 0.0, shots: int = 1, seed: int = 0, direction: int = 0,
                 tol: float = 1e-9) -> list[ShotRecord]:
    """Draw ``shots`` parity outcomes for the GHZ state along ``k``.

    Deterministic in ``(seed, direction)``. The parity stream does not
    depend on the noise parameters, so for labels inside the DFS the
    records are identical for every ``sigma``.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    noise = noise or NoiseModel(mode="off")
    key = derive_key(seed, direction, _PARITY_STREAM)
    noise_key = derive_key(seed, direction, _NOISE_STREAM)
    out = _draw(network, k, alpha, noise, offset, shots, key, noise_key, tol, counts_only=False)
    return [ShotRecord(direction, 1 if o else -1, offset) for o in out]


def parity_counts(network: SensorNetwork, k, alpha, noise: NoiseModel, offset: float,
                  shots: int, seed: int, direction: int = 0, tol: float = 1e-9) -> int:
    """Number of ``+1`` outcomes among the shots :func:`sample_shots` would draw."""
    key = derive_key(seed, direction, _PARITY_STREAM)
    noise_key = derive_key(seed, direction, _NOISE_STREAM)
    return int(_draw(network, k, alpha, noise, offset, shots, key, noise_key, tol, counts_only=True))


def allocate_shots(rates, total: int) -> np.ndarray:
    """Largest-remainder rounding of ``rates * total`` to integers summing to ``total``."""
    rates = np.asarray(rates, dtype=float)
    raw = rates * total
    base = np.floor(raw).astype(int)
    rest = total - base.sum()
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:rest]] += 1
    return base


def _clip(p):
    return min(max(p, 1e-15), 1 - 1e-15)


def phase_mle(plus, shots, guess: float | None = None, iters: int = 100) -> float:
    """Maximum-likelihood phase from ``+1`` counts at offsets 0 and pi/2.

    Fisher scoring, started from the two-quadrature arctangent. The
    expected information per shot is 1 at every phase, so the scoring step
    is the score divided by the number of shots.
    """
    n0, n1 = shots
    c0, c1 = plus
    if guess is None:
        s = 2 * c0 / n0 - 1 if n0 else 0.0
        c = 2 * c1 / n1 - 1 if n1 else 1.0
        guess = math.atan2(s, c)
    phi = guess
    for _ in range(iters):
        p0 = _clip(0.5 * (1 + math.sin(phi)))
        p1 = _clip(0.5 * (1 + math.cos(phi)))
        score = 0.5 * math.cos(phi) * (c0 / p0 - (n0 - c0) / (1 - p0))
        score += -0.5 * math.sin(phi) * (c1 / p1 - (n1 - c1) / (1 - p1))
        step = score / (n0 + n1)
        phi += step
        if abs(step) < 1e-15:
            break
    return phi


def estimate_parameters(network: SensorNetwork, strategy: SequentialStrategy, alpha_true,
                        noise: NoiseModel | None = None, shots_per_direction: int = 10_000,
                        seed: int = 0, repetitions: int = 1, tol: float = 1e-9) -> EstimationReport:
    """Simulate the sequential strategy and estimate ``alpha``.

    One repetition spends ``shots_per_direction * len(strategy)`` shots,
    split across directions by largest-remainder rounding of the rates and
    within each direction evenly between the two readout offsets. The
    reported CRB is the inverse Fisher information of one repetition.
    """
    noise = noise or NoiseModel(mode="off")
    alpha = np.asarray(alpha_true, dtype=float)
    if alpha.shape != (network.n_signals,):
        raise DimensionMismatch(f"alpha of shape {alpha.shape} for {network.n_signals} signals")
    labels = strategy.labels
    T = network.time
    A = labels @ network.signal.T  # rows S k_i
    phases = 2 * T * A @ alpha
    if np.any(np.abs(phases) >= math.pi / 2):
        raise PhaseWrap(f"true phases {phases} leave (-pi/2, pi/2); reduce alpha or T")

    informative = np.array([np.any(A[i] != 0) for i in range(len(labels))])
    if noise.mode == "infinite" and network.n_noise:
        kappa = labels @ network.noise.T
        informative &= ~np.any(np.abs(kappa) > tol, axis=1)
    shots = allocate_shots(strategy.rates, shots_per_direction * len(labels))
    informative &= shots > 0
    design = 2 * T * A[informative]
    n_inf = shots[informative]
    if design.shape[0] == 0 or np.linalg.matrix_rank(design) < network.n_signals:
        raise UnidentifiableSignals("informative directions do not span the parameter space")
    info = design.T @ (design * n_inf[:, None])
    crb = np.linalg.inv(info)

    estimates = np.empty((repetitions, network.n_signals))
    for rep in range(repetitions):
        phis = []
        for i in np.flatnonzero(informative):
            n0 = (shots[i] + 1) // 2
            n1 = shots[i] - n0
            plus = []
            for q, (offset, n_q) in enumerate(zip(OFFSETS, (n0, n1))):
                rep_seed = derive_key(seed, rep, q)
                plus.append(parity_counts(network, labels[i], alpha, noise, offset, n_q,
                                          rep_seed, direction=i, tol=tol) if n_q else 0)
            phis.append(phase_mle(plus, (n0, n1)))
        phis = np.asarray(phis)
        estimates[rep] = crb @ (design.T @ (n_inf * phis))
    cov = np.cov(estimates, rowvar=False, ddof=1) if repetitions > 1 else np.zeros_like(crb)
    cov = np.atleast_2d(cov)
    return EstimationReport(
        estimates=estimates.mean(axis=0),
        covariance=(cov + cov.T) / 2,
        crb=(crb + crb.T) / 2,
        shots=shots,
        repetitions=repetitions,
        directions=labels,
        informative=informative,
    )


def empirical_fim(network: SensorNetwork, k, alpha, shots: int, seed: int = 0,
                  offset: float = 0.0, step: float = 1e-4) -> np.ndarray:
    """Per-shot Fisher information of the parity readout, estimated from samples.

    The score of each outcome is taken by central differences of
    ``log p(x | alpha)`` and averaged over the empirical outcome
    frequencies.
    """
    alpha = np.asarray(alpha, dtype=float)
    plus = parity_counts(network, k, alpha, NoiseModel(mode="off"), offset, shots, seed)
    freq = np.array([plus / shots, 1 - plus / shots])

    def logp(a):
        p = 0.5 * (1 + math.sin(ghz_phase(network, k, a) + offset))
        return np.log([_clip(p), _clip(1 - p)])

    s = network.n_signals
    score = np.empty((2, s))
    for j in range(s):
        e = np.zeros(s)
        e[j] = step
        score[:, j] = (logp(alpha + e) - logp(alpha - e)) / (2 * step)
    return (score.T * freq) @ score
