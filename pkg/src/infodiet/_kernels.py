"""Hot numeric loops, each in two flavours.

Every kernel has a pure-numpy implementation and, when numba is importable,
an ``@njit`` twin with identical semantics. The module-level names
(``diet_tally``, ``topic_counts``, ``select_topics``, ``kl_rows``) point at
the numba versions unless ``INFODIET_DISABLE_NUMBA`` is set to a truthy value
or numba is missing. Both sets stay reachable through ``NUMPY`` and
``NUMBA`` so tests and the benchmark can compare them.

Integer outputs are bit-identical across backends. ``kl_rows`` agrees to
floating-point rounding only.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

N_TOPICS = 18
UNATTRIBUTED_SLOT = N_TOPICS


def _env_disabled() -> bool:
    return os.environ.get("INFODIET_DISABLE_NUMBA", "").strip().lower() in {
        "1", "true", "yes", "on",
    }


# --------------------------------------------------------------------------
# numpy path
# --------------------------------------------------------------------------


def _diet_tally_np(offsets, codes):
    # codes: topic index per keyword occurrence, -1 for unattributed
    offsets = np.asarray(offsets, dtype=np.int64)
    codes = np.asarray(codes, dtype=np.int64)
    lengths = np.diff(offsets)
    kmax = int(lengths.max()) if lengths.size else 0
    ncols = kmax + 1
    if codes.size == 0:
        return np.zeros((N_TOPICS + 1, ncols), dtype=np.int64)
    denom = np.repeat(lengths, lengths)
    slot = np.where(codes < 0, UNATTRIBUTED_SLOT, codes)
    flat = np.bincount(slot * ncols + denom, minlength=(N_TOPICS + 1) * ncols)
    return flat.astype(np.int64).reshape(N_TOPICS + 1, ncols)


def _topic_counts_np(indptr, indices, membership):
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    membership = np.asarray(membership, dtype=np.int64)
    nrows = indptr.size - 1
    out = np.zeros((nrows, membership.shape[1]), dtype=np.int64)
    if indices.size == 0:
        return out
    rows = np.repeat(np.arange(nrows), np.diff(indptr))
    np.add.at(out, rows, membership[indices])
    return out


def _select_topics_np(counts, support, topic_count, min_support):
    counts = np.asarray(counts, dtype=np.int64)
    support = np.asarray(support, dtype=np.int64)
    topic_count = np.asarray(topic_count, dtype=np.int64)
    n = counts.shape[0]
    best = np.full(n, -1, dtype=np.int64)
    # compare count_a / N_a against count_b / N_b by cross-multiplication
    for t in range(counts.shape[1]):
        if topic_count[t] == 0:
            continue
        c = counts[:, t]
        has_best = best >= 0
        b = np.where(has_best, best, 0)
        better = c * topic_count[b] > counts[np.arange(n), b] * topic_count[t]
        take = (c > 0) & (~has_best | better)
        best[take] = t
    best[support < min_support] = -1
    return best


def _smooth_np(x, alpha):
    return (x + alpha) / (1.0 + x.shape[-1] * alpha)


def _kl_rows_np(P, Q, alpha):
    P = _smooth_np(np.asarray(P, dtype=np.float64), alpha)
    Q = _smooth_np(np.asarray(Q, dtype=np.float64), alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, P * np.log(P / Q), 0.0)
    return np.maximum(terms.sum(axis=-1), 0.0)


NUMPY = SimpleNamespace(
    name="numpy",
    diet_tally=_diet_tally_np,
    topic_counts=_topic_counts_np,
    select_topics=_select_topics_np,
    kl_rows=_kl_rows_np,
)


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------

NUMBA = None

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None

if njit is not None:

    @njit(cache=True)
    def _diet_tally_nb(offsets, codes):
        n = offsets.shape[0] - 1
        kmax = 0
        for i in range(n):
            k = offsets[i + 1] - offsets[i]
            if k > kmax:
                kmax = k
        out = np.zeros((N_TOPICS + 1, kmax + 1), dtype=np.int64)
        for i in range(n):
            lo = offsets[i]
            hi = offsets[i + 1]
            k = hi - lo
            for j in range(lo, hi):
                c = codes[j]
                if c < 0:
                    c = UNATTRIBUTED_SLOT
                out[c, k] += 1
        return out

    @njit(cache=True)
    def _topic_counts_nb(indptr, indices, membership):
        nrows = indptr.shape[0] - 1
        ntop = membership.shape[1]
        out = np.zeros((nrows, ntop), dtype=np.int64)
        for r in range(nrows):
            for j in range(indptr[r], indptr[r + 1]):
                e = indices[j]
                for t in range(ntop):
                    out[r, t] += membership[e, t]
        return out

    @njit(cache=True)
    def _select_topics_nb(counts, support, topic_count, min_support):
        n = counts.shape[0]
        best = np.full(n, -1, dtype=np.int64)
        for r in range(n):
            if support[r] < min_support:
                continue
            b = -1
            for t in range(counts.shape[1]):
                c = counts[r, t]
                if c == 0 or topic_count[t] == 0:
                    continue
                if b < 0 or c * topic_count[b] > counts[r, b] * topic_count[t]:
                    b = t
            best[r] = b
        return best

    @njit(cache=True)
    def _kl_rows_nb(P, Q, alpha):
        n, m = P.shape
        out = np.zeros(n)
        z = 1.0 + m * alpha
        for r in range(n):
            s = 0.0
            for i in range(m):
                p = (P[r, i] + alpha) / z
                if p > 0.0:
                    q = (Q[r, i] + alpha) / z
                    s += p * np.log(p / q)
            out[r] = s if s > 0.0 else 0.0
        return out

    def _as_i64(a):
        return np.ascontiguousarray(a, dtype=np.int64)

    def _as_f64_2d(a):
        a = np.ascontiguousarray(a, dtype=np.float64)
        return a.reshape(1, -1) if a.ndim == 1 else a

    def _kl_rows_nb_wrap(P, Q, alpha):
        squeeze = np.ndim(P) == 1
        out = _kl_rows_nb(_as_f64_2d(P), _as_f64_2d(Q), float(alpha))
        return out[0] if squeeze else out

    NUMBA = SimpleNamespace(
        name="numba",
        diet_tally=lambda offsets, codes: _diet_tally_nb(_as_i64(offsets), _as_i64(codes)),
        topic_counts=lambda indptr, indices, membership: _topic_counts_nb(
            _as_i64(indptr), _as_i64(indices), _as_i64(membership)
        ),
        select_topics=lambda counts, support, topic_count, min_support: _select_topics_nb(
            _as_i64(counts), _as_i64(support), _as_i64(topic_count), int(min_support)
        ),
        kl_rows=_kl_rows_nb_wrap,
    )


ACTIVE = NUMPY if (NUMBA is None or _env_disabled()) else NUMBA
BACKEND = ACTIVE.name

diet_tally = ACTIVE.diet_tally
topic_counts = ACTIVE.topic_counts
select_topics = ACTIVE.select_topics
kl_rows = ACTIVE.kl_rows
