"""Independent reference computations used by the tests.

The dense oracle builds the 2^n state of the sensor network, evolves it
under the effective signal Hamiltonian and differentiates the fidelity
numerically, without ever forming a K matrix.
"""
import itertools

import numpy as np


def basis_strings(n):
    return np.array(list(itertools.product((1, -1), repeat=n)), dtype=float)


def random_flip_strategy(rng, n, n_terms):
    """Labels ``b * g`` sharing one flip vector ``g`` with random sign strings ``b``.

    Such labels are realisable in one experiment: every sensor is flipped at
    the same time in every branch, so the dense state lives on 2^n basis
    strings ``b`` and sensor ``j`` contributes ``g_j b_j`` to the energy.
    """
    g = rng.uniform(0.2, 1.0, size=n)
    B = basis_strings(n)
    idx = rng.choice(len(B), size=n_terms, replace=False)
    c = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
    c /= np.linalg.norm(c)
    return g, B[idx], c


def _phases(signal, time, labels, alpha):
    return np.exp(-1j * time * (labels @ signal.T @ alpha))


def dense_rho(labels, rho_label, signal, time, alpha):
    """Density matrix on the span of the labels after evolving by ``alpha``."""
    u = _phases(signal, time, labels, alpha)
    return (u[:, None] * rho_label) * u.conj()[None, :]


def root_fidelity(rho, sigma):
    """``tr sqrt(sqrt(rho) sigma sqrt(rho))`` evaluated on the support of ``rho``.

    Restricting to the support keeps round-off eigenvalues of order 1e-16
    out of the square root, where they would otherwise add ~1e-8 each.
    """
    ev, U = np.linalg.eigh((rho + rho.conj().T) / 2)
    keep = ev > 1e-12
    half = U[:, keep] * np.sqrt(ev[keep])
    inner = half.conj().T @ sigma @ half
    ev_in = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(np.sum(np.sqrt(np.clip(ev_in, 0, None))))


def bures_qfim(labels, rho_label, signal, time, alpha=None, step=1e-4):
    """QFIM from ``1 - sqrt(F) = dalpha^T F_Q dalpha / 8`` by central polarisation."""
    signal = np.asarray(signal, dtype=float)
    s = signal.shape[0]
    alpha = np.zeros(s) if alpha is None else np.asarray(alpha, dtype=float)
    rho0 = dense_rho(labels, rho_label, signal, time, alpha)

    def q(d):
        return 8 * (1 - root_fidelity(rho0, dense_rho(labels, rho_label, signal, time, alpha + d)))

    F = np.empty((s, s))
    E = np.eye(s) * step
    for i in range(s):
        F[i, i] = (q(E[i]) + q(-E[i])) / 2 / step**2
    for i in range(s):
        for j in range(i + 1, s):
            both = (q(E[i] + E[j]) + q(-E[i] - E[j])) / 2 / step**2
            F[i, j] = F[j, i] = (both - F[i, i] - F[j, j]) / 2
    return F


def pure_bures_qfim(labels, amplitudes, signal, time, step=1e-4):
    c = np.asarray(amplitudes, dtype=complex)
    return bures_qfim(labels, np.outer(c, c.conj()), signal, time, step=step)
