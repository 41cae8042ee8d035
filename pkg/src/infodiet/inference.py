"""Expert-based topic inference for keywords.

A keyword's topic is decided by the experts who posted it: for every topic,
the share of those posters mapped to the topic is divided by the number of
experts on that topic in the whole dataset, and the best-scoring topic wins.
Keywords posted by fewer than ``min_support`` distinct experts are left
uninferred.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .corpus import ExpertProfile, Keyword, Tweet, extract_keywords
from .taxonomy import Taxonomy, TopicId, map_expert_tags, unmatched_tags

log = logging.getLogger(__name__)

DEFAULT_MIN_SUPPORT = 10

__all__ = [
    "DEFAULT_MIN_SUPPORT",
    "ExpertIndex",
    "TopicInference",
    "Reason",
    "build_expert_index",
    "infer_topic",
    "explain",
    "infer_all",
]


class Reason(str, enum.Enum):
    INFERRED = "inferred"
    BELOW_SUPPORT = "below_support"
    UNKNOWN_KEYWORD = "unknown_keyword"


@dataclass(frozen=True)
class TopicInference:
    keyword: Keyword
    topic: TopicId
    raw_fraction: float
    normalized_score: float
    support: int


@dataclass(frozen=True, eq=False)
class ExpertIndex:
    topics_of: Mapping[str, frozenset[TopicId]]
    topic_count: np.ndarray  # int64[18], experts per topic
    posters: Mapping[Keyword, frozenset[str]]
    stats: Counter = field(default_factory=Counter, compare=False)

    def __post_init__(self):
        experts = sorted(self.topics_of)
        membership = np.zeros((len(experts), len(TopicId)), dtype=np.int64)
        for i, e in enumerate(experts):
            for t in self.topics_of[e]:
                membership[i, t] = 1
        object.__setattr__(self, "_row", {e: i for i, e in enumerate(experts)})
        object.__setattr__(self, "_membership", membership)

    def n_experts(self, topic: TopicId) -> int:
        return int(self.topic_count[topic])

    def support(self, keyword: Keyword) -> int:
        return len(self.posters.get(keyword, ()))


def build_expert_index(
    experts: Iterable[ExpertProfile],
    expert_tweets: Iterable[Tweet],
    taxonomy: Taxonomy,
    redirects: Mapping[str, str] | None = None,
) -> ExpertIndex:
    experts = list(experts)
    if not experts:
        raise ValueError("cannot build an expert index from an empty expert list")
    stats: Counter = Counter()
    tags_of: dict[str, list[str]] = {}
    for prof in experts:
        tags_of.setdefault(prof.user, []).extend(prof.tags)

    topics_of: dict[str, frozenset[TopicId]] = {}
    for user in sorted(tags_of):
        tags = tags_of[user]
        stats["unmatched_tags"] += len(unmatched_tags(tags, taxonomy))
        topics = map_expert_tags(tags, taxonomy)
        if topics:
            topics_of[user] = frozenset(topics)
        else:
            stats["unmapped_experts"] += 1

    topic_count = np.zeros(len(TopicId), dtype=np.int64)
    for topics in topics_of.values():
        for t in topics:
            topic_count[t] += 1

    posters: dict[Keyword, set[str]] = {}
    for tw in expert_tweets:
        if tw.author not in topics_of:
            stats["ignored_tweets" if tw.author not in tags_of else "unmapped_expert_tweets"] += 1
            continue
        for kw in set(extract_keywords(tw.text, redirects, stats)):
            posters.setdefault(kw, set()).add(tw.author)
    if stats["ignored_tweets"]:
        log.info("ignored %d tweets by non-experts", stats["ignored_tweets"])

    return ExpertIndex(
        topics_of=topics_of,
        topic_count=topic_count,
        posters={k: frozenset(v) for k, v in sorted(posters.items())},
        stats=stats,
    )


def _best_topic(counts: Mapping[TopicId, int], topic_count: np.ndarray) -> TopicId | None:
    best: TopicId | None = None
    for t in TopicId:  # Table order, so ties keep the earlier topic
        c = counts.get(t, 0)
        if c == 0 or topic_count[t] == 0:
            continue
        # c / N_t > c_best / N_best, compared exactly in integers
        if best is None or c * int(topic_count[best]) > counts[best] * int(topic_count[t]):
            best = t
    return best


def _make(keyword: Keyword, topic: TopicId, count: int, support: int, n_t: int) -> TopicInference:
    frac = count / support
    return TopicInference(keyword, topic, frac, frac / n_t, support)


def explain(keyword: Keyword, index: ExpertIndex, min_support: int = DEFAULT_MIN_SUPPORT) -> Reason:
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    if keyword not in index.posters:
        return Reason.UNKNOWN_KEYWORD
    if index.support(keyword) < min_support:
        return Reason.BELOW_SUPPORT
    return Reason.INFERRED


def infer_topic(
    keyword: Keyword, index: ExpertIndex, min_support: int = DEFAULT_MIN_SUPPORT
) -> TopicInference | None:
    if explain(keyword, index, min_support) is not Reason.INFERRED:
        return None
    posters = index.posters[keyword]
    counts: Counter = Counter()
    for e in posters:
        counts.update(index.topics_of[e])
    best = _best_topic(counts, index.topic_count)
    if best is None:
        return None
    return _make(keyword, best, counts[best], len(posters), int(index.topic_count[best]))


def infer_all(
    keywords: Iterable[Keyword],
    index: ExpertIndex,
    min_support: int = DEFAULT_MIN_SUPPORT,
) -> tuple[dict[Keyword, TopicInference], float]:
    """Infer every distinct keyword at once; returns the inferred map and coverage."""
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    distinct = sorted(set(keywords))
    if not distinct:
        raise ValueError("infer_all needs at least one keyword")
    known = [k for k in distinct if k in index.posters]
    if not known:
        return {}, 0.0

    row = index._row
    indptr = np.zeros(len(known) + 1, dtype=np.int64)
    cols: list[int] = []
    for i, k in enumerate(known):
        cols.extend(row[e] for e in index.posters[k])
        indptr[i + 1] = len(cols)
    indices = np.asarray(cols, dtype=np.int64)
    support = np.diff(indptr)

    counts = _kernels.topic_counts(indptr, indices, index._membership)
    best = _kernels.select_topics(counts, support, index.topic_count, min_support)

    out: dict[Keyword, TopicInference] = {}
    for i, k in enumerate(known):
        t = int(best[i])
        if t < 0:
            continue
        out[k] = _make(k, TopicId(t), int(counts[i, t]), int(support[i]), int(index.topic_count[t]))
    return out, len(out) / len(distinct)
