"""Pure-numpy parity sampling kernels (fallback for the compiled ``_kernels``).

Randomness is counter based: shot ``i`` of a stream with key ``key`` uses
``splitmix64(key + i)``, so any shot can be regenerated independently and
the compiled and numpy paths produce identical streams.
"""
import numpy as np

_CHUNK = 1 << 20
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_PI = 6.283185307179586


def _splitmix64(x: np.ndarray) -> np.ndarray:
    z = x + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(key: int, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) for counters ``start .. start + count - 1``."""
    ctr = np.arange(start, start + count, dtype=np.uint64) + np.uint64(key)
    return (_splitmix64(ctr) >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def _normals(noise_key: int, start_shot: int, count: int, n_src: int) -> np.ndarray:
    base = 2 * n_src * start_shot
    u = uniforms(noise_key, base, 2 * n_src * count).reshape(count, n_src, 2)
    return np.sqrt(-2.0 * np.log(1.0 - u[..., 0])) * np.cos(_TWO_PI * u[..., 1])


def _outcome_chunk(key, noise_key, start, count, p, phase_total, coeffs):
    u = uniforms(key, start, count)
    if coeffs is None:
        return u < p
    z = _normals(noise_key, start, count, len(coeffs))
    phi = np.full(count, phase_total)
    for j, c in enumerate(coeffs):
        phi = phi + z[:, j] * c
    return u < 0.5 * (1.0 + np.sin(phi))


def count_below(key: int, n: int, p: float) -> int:
    total = 0
    for s in range(0, n, _CHUNK):
        total += int(np.count_nonzero(_outcome_chunk(key, 0, s, min(_CHUNK, n - s), p, 0.0, None)))
    return total


def outcomes_below(key: int, n: int, p: float) -> np.ndarray:
    return np.concatenate(
        [_outcome_chunk(key, 0, s, min(_CHUNK, n - s), p, 0.0, None) for s in range(0, n, _CHUNK)]
        or [np.zeros(0, dtype=bool)]
    ).astype(np.uint8)


def noisy_count(key: int, noise_key: int, n: int, phase_total: float, coeffs: np.ndarray) -> int:
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    total = 0
    for s in range(0, n, _CHUNK):
        total += int(np.count_nonzero(
            _outcome_chunk(key, noise_key, s, min(_CHUNK, n - s), 0.0, phase_total, coeffs)))
    return total


def noisy_outcomes(key: int, noise_key: int, n: int, phase_total: float,
                   coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    return np.concatenate(
        [_outcome_chunk(key, noise_key, s, min(_CHUNK, n - s), 0.0, phase_total, coeffs)
         for s in range(0, n, _CHUNK)] or [np.zeros(0, dtype=bool)]
    ).astype(np.uint8)
