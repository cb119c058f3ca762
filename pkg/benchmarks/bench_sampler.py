"""Compare the compiled parity sampler against the numpy fallback.

    python3 benchmarks/bench_sampler.py --shots 10000000 --repeat 3

Both backends draw the same counter-based stream, so the counts printed
for each row must match exactly.
"""
import argparse
import time

import numpy as np

from dfsense import _rng_py

try:
    from dfsense import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shots", type=int, default=10_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    coeffs = np.array([0.8, -1.3])
    cases = {
        "noiseless count": lambda k: k.count_below(1234, args.shots, 0.61),
        "gaussian-noise count": lambda k: k.noisy_count(1234, 99, args.shots // 4, 0.2, coeffs),
    }
    backends = {"numpy": _rng_py}
    if _kernels is not None:
        backends["cython"] = _kernels
    else:
        print("compiled extension not available; timing numpy only")

    print(f"{'case':<22}{'backend':<9}{'seconds':>10}{'Mshots/s':>11}  count")
    for name, call in cases.items():
        n = args.shots if "noiseless" in name else args.shots // 4
        counts = set()
        for label, mod in backends.items():
            dt, count = best_of(lambda: call(mod), args.repeat)
            counts.add(count)
            print(f"{name:<22}{label:<9}{dt:>10.3f}{n / dt / 1e6:>11.1f}  {count}")
        if len(counts) != 1:
            raise SystemExit(f"backends disagree on {name}: {counts}")


if __name__ == "__main__":
    main()
