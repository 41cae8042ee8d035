"""Information-diet vectors, normalization, KL divergence and mass-media baselines."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .corpus import Keyword, Tweet, extract_keywords
from .inference import TopicInference
from .taxonomy import TOPIC_NAMES, TopicId

N_TOPICS = len(TopicId)
BASELINES = ("nytimes", "washpost", "economist")
DEFAULT_ALPHA = 1e-4

__all__ = [
    "BASELINES",
    "DEFAULT_ALPHA",
    "DietVector",
    "DietDistribution",
    "EmptyDietError",
    "compute_diet",
    "normalize",
    "kl_divergence",
    "kl_many",
    "combine",
    "load_baseline",
    "baseline_percentages",
]


class EmptyDietError(ValueError):
    pass


def _trim(tally: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(tally.any(axis=0))
    width = int(nz[-1]) + 1 if nz.size else 1
    return np.ascontiguousarray(tally[:, :width], dtype=np.int64)


class DietVector:
    """Raw topic mass of a set of tweets.

    Each keyword-bearing tweet with ``n`` keywords gives ``1/n`` to the topic
    of each keyword (or to the unattributed slot). Internally the mass is kept
    as an integer tally ``tally[slot, n]`` of keyword occurrences, so sums of
    vectors are exact and ``weight`` is always rebuilt the same way.
    """

    __slots__ = ("tally", "tweet_count", "keywordless_count", "_weight", "_unattributed")

    def __init__(self, tally=None, tweet_count: int = 0, keywordless_count: int = 0):
        if tally is None:
            tally = np.zeros((N_TOPICS + 1, 1), dtype=np.int64)
        tally = np.asarray(tally, dtype=np.int64)
        if tally.ndim != 2 or tally.shape[0] != N_TOPICS + 1:
            raise ValueError(f"tally must have {N_TOPICS + 1} rows")
        if (tally < 0).any() or (tally[:, 0] != 0).any():
            raise ValueError("tally entries must be >= 0 with an empty zero column")
        self.tally = _trim(tally)
        self.tally.flags.writeable = False
        self.tweet_count = int(tweet_count)
        self.keywordless_count = int(keywordless_count)
        inv = np.zeros(self.tally.shape[1])
        inv[1:] = 1.0 / np.arange(1, self.tally.shape[1])
        mass = (self.tally * inv).sum(axis=1)
        self._weight = mass[:N_TOPICS]
        self._weight.flags.writeable = False
        self._unattributed = float(mass[N_TOPICS])

    @property
    def weight(self) -> np.ndarray:
        return self._weight

    @property
    def unattributed(self) -> float:
        return self._unattributed

    def __add__(self, other: "DietVector") -> "DietVector":
        if not isinstance(other, DietVector):
            return NotImplemented
        width = max(self.tally.shape[1], other.tally.shape[1])
        t = np.zeros((N_TOPICS + 1, width), dtype=np.int64)
        t[:, : self.tally.shape[1]] += self.tally
        t[:, : other.tally.shape[1]] += other.tally
        return DietVector(
            t,
            self.tweet_count + other.tweet_count,
            self.keywordless_count + other.keywordless_count,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, DietVector):
            return NotImplemented
        return (
            self.tweet_count == other.tweet_count
            and self.keywordless_count == other.keywordless_count
            and np.array_equal(self.tally, other.tally)
        )

    __hash__ = None

    def __repr__(self) -> str:
        w = {TOPIC_NAMES[i]: round(float(x), 6) for i, x in enumerate(self.weight) if x}
        return (
            f"DietVector(weights={w}, unattributed={self.unattributed:.6g}, "
            f"tweet_count={self.tweet_count}, keywordless_count={self.keywordless_count})"
        )

    def to_dict(self) -> dict:
        out = {
            "weights": {name: float(self.weight[i]) for i, name in enumerate(TOPIC_NAMES)},
            "unattributed": self.unattributed,
            "tweet_count": self.tweet_count,
            "keywordless_count": self.keywordless_count,
        }
        if self.weight.sum() > 0:
            p = normalize(self).p
            out["distribution"] = {name: float(p[i]) for i, name in enumerate(TOPIC_NAMES)}
        else:
            out["distribution"] = None
        return out


@dataclass(frozen=True, eq=False)
class DietDistribution:
    """Topic shares summing to one.

    ``unattributed`` is non-zero only for the reporting form produced by
    ``normalize(..., include_unattributed=True)``; then ``p`` sums to
    ``1 - unattributed`` and the distribution cannot be compared.
    """

    p: np.ndarray
    unattributed: float = 0.0

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.shape != (N_TOPICS,):
            raise ValueError(f"distribution needs {N_TOPICS} entries, got shape {p.shape}")
        if (p < 0).any() or not np.isfinite(p).all():
            raise ValueError("distribution entries must be finite and >= 0")
        if not (0.0 <= self.unattributed <= 1.0):
            raise ValueError("unattributed share must lie in [0, 1]")
        if abs(p.sum() + self.unattributed - 1.0) > 1e-12:
            raise ValueError(f"distribution sums to {p.sum() + self.unattributed!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @classmethod
    def from_mapping(cls, shares: Mapping[str | TopicId, float]) -> "DietDistribution":
        p = np.zeros(N_TOPICS)
        for k, v in shares.items():
            t = k if isinstance(k, TopicId) else TopicId.from_name(k)
            p[t] = v
        return cls(p)

    @classmethod
    def indicator(cls, topic: TopicId) -> "DietDistribution":
        p = np.zeros(N_TOPICS)
        p[topic] = 1.0
        return cls(p)

    @classmethod
    def uniform(cls) -> "DietDistribution":
        return cls(np.full(N_TOPICS, 1.0 / N_TOPICS))

    def __getitem__(self, topic: TopicId) -> float:
        return float(self.p[topic])

    def __eq__(self, other) -> bool:
        if not isinstance(other, DietDistribution):
            return NotImplemented
        return self.unattributed == other.unattributed and np.array_equal(self.p, other.p)

    __hash__ = None

    def to_dict(self) -> dict[str, float]:
        return {name: float(self.p[i]) for i, name in enumerate(TOPIC_NAMES)}


def _require_comparable(*dists: DietDistribution) -> None:
    for d in dists:
        if d.unattributed:
            raise ValueError("comparisons need the 18-topic form (no unattributed share)")


def compute_diet(
    tweets: Iterable[Tweet],
    inferences: Mapping[Keyword, TopicInference],
    redirects: Mapping[str, str] | None = None,
) -> DietVector:
    offsets = [0]
    codes: list[int] = []
    keywordless = 0
    for tw in tweets:
        kws = extract_keywords(tw.text, redirects)
        if not kws:
            keywordless += 1
            continue
        for k in kws:
            inf = inferences.get(k)
            codes.append(-1 if inf is None else int(inf.topic))
        offsets.append(len(codes))
    tally = _kernels.diet_tally(np.asarray(offsets, dtype=np.int64), np.asarray(codes, dtype=np.int64))
    return DietVector(tally, len(offsets) - 1, keywordless)


def normalize(d: DietVector, include_unattributed: bool = False) -> DietDistribution:
    topical = float(d.weight.sum())
    if topical <= 0:
        raise EmptyDietError("empty diet")
    if not include_unattributed:
        return DietDistribution(d.weight / topical)
    total = topical + d.unattributed
    # renormalize so the 19-slot report sums to one despite rounding
    p = d.weight / total
    u = d.unattributed / total
    return DietDistribution(p / (p.sum() + u), u / (p.sum() + u))


def kl_divergence(p: DietDistribution, q: DietDistribution, alpha: float = DEFAULT_ALPHA) -> float:
    """KL(p || q) in nats after additive smoothing of both arguments."""
    if alpha < 0 or not math.isfinite(alpha):
        raise ValueError("alpha must be a finite value >= 0")
    _require_comparable(p, q)
    if alpha == 0 and ((q.p == 0) & (p.p > 0)).any():
        raise ValueError("divergence undefined: q has zero mass where p does not")
    return float(_kernels.kl_rows(p.p, q.p, alpha))


def kl_many(P: np.ndarray, Q: np.ndarray, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Row-wise KL for stacked distributions (shape ``(n, 18)``)."""
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    if P.shape != Q.shape:
        P, Q = np.broadcast_arrays(P, Q)
    if alpha == 0 and ((Q == 0) & (P > 0)).any():
        raise ValueError("divergence undefined: q has zero mass where p does not")
    return _kernels.kl_rows(np.ascontiguousarray(P), np.ascontiguousarray(Q), alpha)


def combine(consumed: DietDistribution, recommended: DietDistribution) -> DietDistribution:
    _require_comparable(consumed, recommended)
    return DietDistribution((consumed.p + recommended.p) / 2.0)


def _read_baseline(name: str, directory: str | Path | None = None) -> np.ndarray:
    if directory is None:
        if name not in BASELINES:
            raise KeyError(f"unknown baseline: {name!r} (expected one of {', '.join(BASELINES)})")
        text = resources.files("infodiet").joinpath(f"data/baselines/{name}.csv").read_text("utf-8")
    else:
        path = Path(directory) / f"{name}.csv"
        if not path.is_file():
            raise KeyError(f"unknown baseline: {name!r} (no {path})")
        text = path.read_text(encoding="utf-8")
    pct = np.full(N_TOPICS, np.nan)
    for row in csv.DictReader(io.StringIO(text)):
        pct[TopicId.from_name(row["topic"])] = float(row["percent"])
    if np.isnan(pct).any():
        raise ValueError(f"baseline {name} does not cover all topics")
    if (pct < 0).any() or pct.sum() <= 0:
        raise ValueError(f"baseline {name} has negative or zero mass")
    return pct


def baseline_percentages(name: str, directory: str | Path | None = None) -> dict[TopicId, float]:
    """The mass-media column as printed (percent, not renormalized)."""
    pct = _read_baseline(name, directory)
    return {t: float(pct[t]) for t in TopicId}


def load_baseline(name: str, directory: str | Path | None = None) -> DietDistribution:
    """Baseline diet renormalized to sum to one; ``directory`` overrides the bundled CSVs."""
    pct = _read_baseline(name, directory)
    return DietDistribution(pct / pct.sum())
