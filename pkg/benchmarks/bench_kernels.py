"""Time each kernel under the numpy and numba backends on synthetic inputs.

    python benchmarks/bench_kernels.py [--scale N] [--repeat R]

The first numba call per kernel is a warm-up (JIT compile) and is not timed.
Results are checked for agreement before timing.
"""

import argparse
import time

import numpy as np

from infodiet import _kernels


def make_inputs(scale, rng):
    n_tweets = 20_000 * scale
    lengths = rng.integers(1, 6, size=n_tweets)
    offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    codes = rng.integers(-1, 18, size=int(offsets[-1])).astype(np.int64)

    n_experts, n_keywords = 2_000 * scale, 5_000 * scale
    membership = (rng.random((n_experts, 18)) < 0.08).astype(np.int64)
    support = rng.integers(1, 40, size=n_keywords)
    indptr = np.concatenate([[0], np.cumsum(support)]).astype(np.int64)
    indices = rng.integers(0, n_experts, size=int(indptr[-1])).astype(np.int64)
    topic_count = membership.sum(axis=0).astype(np.int64)

    P = rng.dirichlet(np.full(18, 0.3), size=10_000 * scale)
    Q = rng.dirichlet(np.full(18, 0.3), size=10_000 * scale)
    return {
        "diet_tally": (offsets, codes),
        "topic_counts": (indptr, indices, membership),
        "select_topics": None,  # filled from topic_counts output
        "kl_rows": (P, Q, 1e-4),
        "_select_extra": (support.astype(np.int64), topic_count, 10),
    }


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _kernels.NUMBA is None:
        raise SystemExit("numba is not installed; nothing to compare (pip install numba)")
    rng = np.random.default_rng(args.seed)
    inputs = make_inputs(args.scale, rng)
    counts = _kernels.NUMPY.topic_counts(*inputs["topic_counts"])
    inputs["select_topics"] = (counts, *inputs.pop("_select_extra"))

    print(f"{'kernel':<14} {'numpy (ms)':>11} {'numba (ms)':>11} {'speedup':>8}")
    for name, kargs in inputs.items():
        np_fn = getattr(_kernels.NUMPY, name)
        nb_fn = getattr(_kernels.NUMBA, name)
        a, b = np_fn(*kargs), nb_fn(*kargs)  # warm-up + agreement check
        if a.dtype.kind == "f":
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)
        else:
            np.testing.assert_array_equal(a, b)
        t_np = best_of(np_fn, kargs, args.repeat)
        t_nb = best_of(nb_fn, kargs, args.repeat)
        print(f"{name:<14} {t_np * 1e3:>11.2f} {t_nb * 1e3:>11.2f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
