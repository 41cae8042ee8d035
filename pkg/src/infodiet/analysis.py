"""Population-level statistics over per-user diets."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .diet import DEFAULT_ALPHA, DietDistribution, combine, kl_many
from .taxonomy import TopicId

ROLES = ("produced", "consumed", "recommended", "combined")

__all__ = [
    "ROLES",
    "UserDiet",
    "GroupStats",
    "MitigationRecord",
    "MitigationReport",
    "top_topic",
    "tail_contribution",
    "top_topics",
    "share_of",
    "group_top_topic_means",
    "top_topic_distribution",
    "top_k_share_quantile",
    "mitigation_report",
]


@dataclass(frozen=True)
class UserDiet:
    user: str
    dist: DietDistribution
    role: str = "produced"

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")


@dataclass(frozen=True)
class GroupStats:
    count: int
    mean_top_share: float
    mean_tail_share: float


@dataclass(frozen=True)
class MitigationRecord:
    user: str
    kl_consumed_baseline: float
    kl_combined_baseline: float
    kl_reco_consumed: float

    @property
    def mitigated(self) -> bool:
        return self.kl_combined_baseline < self.kl_consumed_baseline


@dataclass(frozen=True)
class MitigationReport:
    baseline: str
    records: tuple[MitigationRecord, ...]

    @property
    def mitigated_fraction(self) -> float:
        if not self.records:
            return 0.0
        return sum(r.mitigated for r in self.records) / len(self.records)


def _order(d: DietDistribution) -> np.ndarray:
    # descending share, Table order among equals
    return np.lexsort((np.arange(len(d.p)), -d.p))


def top_topic(d: DietDistribution) -> tuple[TopicId, float]:
    i = int(np.argmax(d.p))  # first maximum = earliest topic
    return TopicId(i), float(d.p[i])


def top_topics(d: DietDistribution, k: int) -> list[TopicId]:
    return [TopicId(int(i)) for i in _order(d)[:k]]


def share_of(d: DietDistribution, topics: Iterable[TopicId]) -> float:
    return float(sum(d.p[t] for t in set(topics)))


def tail_contribution(d: DietDistribution, k: int = 12) -> float:
    """Total share of the ``k`` topics with the smallest shares."""
    if not 1 <= k <= len(d.p):
        raise ValueError(f"k must be in [1, {len(d.p)}]")
    asc = np.lexsort((np.arange(len(d.p)), d.p))
    return float(d.p[asc[:k]].sum())


def group_top_topic_means(diets: Sequence[UserDiet], tail_k: int = 12) -> dict[TopicId, GroupStats]:
    if not diets:
        raise ValueError("need at least one diet")
    groups: dict[TopicId, list[tuple[float, float]]] = defaultdict(list)
    for ud in diets:
        t, share = top_topic(ud.dist)
        groups[t].append((share, tail_contribution(ud.dist, tail_k)))
    return {
        t: GroupStats(
            len(rows),
            sum(r[0] for r in rows) / len(rows),
            sum(r[1] for r in rows) / len(rows),
        )
        for t, rows in sorted(groups.items())
    }


def top_topic_distribution(diets: Sequence[UserDiet]) -> dict[TopicId, float]:
    if not diets:
        raise ValueError("need at least one diet")
    counts: dict[TopicId, int] = defaultdict(int)
    for ud in diets:
        counts[top_topic(ud.dist)[0]] += 1
    return {t: c / len(diets) for t, c in sorted(counts.items())}


def top_k_share_quantile(diets: Sequence[UserDiet], k: int = 2, threshold: float = 0.5) -> float:
    """Fraction of users whose ``k`` largest topics together exceed ``threshold``."""
    if not diets:
        raise ValueError("need at least one diet")
    hits = sum(float(np.sort(ud.dist.p)[::-1][:k].sum()) > threshold for ud in diets)
    return hits / len(diets)


def mitigation_report(
    users: Sequence[tuple[str, DietDistribution, DietDistribution]],
    baseline: DietDistribution,
    alpha: float = DEFAULT_ALPHA,
    baseline_name: str = "baseline",
) -> MitigationReport:
    """Per user ``(user, consumed, recommended)``: KL of consumed and combined diets from ``baseline``."""
    if not users:
        return MitigationReport(baseline_name, ())
    consumed = np.stack([c.p for _, c, _ in users])
    recommended = np.stack([r.p for _, _, r in users])
    combined = np.stack([combine(c, r).p for _, c, r in users])
    base = np.broadcast_to(baseline.p, consumed.shape)
    kl_cons = kl_many(consumed, base, alpha)
    kl_comb = kl_many(combined, base, alpha)
    kl_rc = kl_many(recommended, consumed, alpha)
    records = tuple(
        MitigationRecord(u, float(kl_cons[i]), float(kl_comb[i]), float(kl_rc[i]))
        for i, (u, _, _) in enumerate(users)
    )
    return MitigationReport(baseline_name, records)
