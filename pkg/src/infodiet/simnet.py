"""Deterministic replay of timeline delivery and a 2-hop social recommender.

The recommender is a model, not a reconstruction of any platform's ranking:
at each snapshot it surfaces the original tweets from the last ``window``
seconds that were authored or retweeted by the most distinct users in the
target's 2-hop following neighborhood.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

from .analysis import MitigationReport, mitigation_report
from .corpus import FollowGraph, Keyword, Tweet
from .diet import (
    DEFAULT_ALPHA,
    DietDistribution,
    EmptyDietError,
    combine,
    compute_diet,
    normalize,
)
from .inference import TopicInference

log = logging.getLogger(__name__)

__all__ = [
    "SimConfig",
    "Snapshot",
    "UserSimulation",
    "SimResult",
    "deliver_timeline",
    "neighborhood",
    "recommend_snapshot",
    "snapshot_times",
    "run_experiment",
]


@dataclass(frozen=True)
class SimConfig:
    snapshot_interval: int = 1800
    top_k: int = 10
    window: int | None = None  # defaults to snapshot_interval
    seed: int = 0
    dedupe_across_snapshots: bool = True
    include_followings: bool = False

    def __post_init__(self):
        if self.snapshot_interval <= 0:
            raise ValueError("snapshot_interval must be > 0")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.window is not None and self.window <= 0:
            raise ValueError("window must be > 0")

    @property
    def effective_window(self) -> int:
        return self.snapshot_interval if self.window is None else self.window


@dataclass(frozen=True)
class Snapshot:
    t_end: int
    tweet_ids: tuple[str, ...]


@dataclass
class UserSimulation:
    user: str
    consumed: list[str]
    snapshots: list[Snapshot]
    consumed_diet: DietDistribution | None = None
    recommended_diet: DietDistribution | None = None
    combined_diet: DietDistribution | None = None

    @property
    def recommended(self) -> list[str]:
        return sorted({t for s in self.snapshots for t in s.tweet_ids})


@dataclass
class SimResult:
    config: SimConfig
    users: list[UserSimulation] = field(default_factory=list)
    skipped: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        def dist(d):
            return None if d is None else d.to_dict()

        return {
            "config": asdict(self.config),
            "users": [
                {
                    "user": u.user,
                    "consumed": u.consumed,
                    "snapshots": [{"t_end": s.t_end, "tweet_ids": list(s.tweet_ids)} for s in u.snapshots],
                    "diets": {
                        "consumed": dist(u.consumed_diet),
                        "recommended": dist(u.recommended_diet),
                        "combined": dist(u.combined_diet),
                    },
                }
                for u in self.users
            ],
            "skipped": dict(sorted(self.skipped.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _sorted_stream(stream: Sequence[Tweet]) -> list[Tweet]:
    return sorted(stream, key=lambda t: (t.timestamp, t.id))


def deliver_timeline(user: str, graph: FollowGraph, stream: Sequence[Tweet]) -> list[str]:
    """Ids of every tweet (retweets included) authored by an account ``user`` follows, in time order."""
    if user not in graph:
        log.warning("user %s is not in the follow graph; empty timeline", user)
        return []
    follows = graph.following(user)
    return [t.id for t in _sorted_stream(stream) if t.author in follows]


def neighborhood(user: str, graph: FollowGraph) -> frozenset[str]:
    """Followings plus followings-of-followings, without the user."""
    first = graph.following(user)
    hood = set(first)
    for v in first:
        hood |= graph.following(v)
    hood.discard(user)
    return frozenset(hood)


def recommend_snapshot(
    user: str,
    graph: FollowGraph,
    stream: Sequence[Tweet],
    t_end: int,
    cfg: SimConfig = SimConfig(),
) -> list[str]:
    hood = neighborhood(user, graph)
    if not hood:
        return []
    direct = graph.following(user)
    lo = t_end - cfg.effective_window
    in_window = [t for t in stream if lo < t.timestamp <= t_end]
    by_id = {t.id: t for t in in_window}

    engaged: dict[str, set[str]] = {}
    for t in in_window:
        if t.author not in hood:
            continue
        root = t.retweet_of if t.retweet_of is not None else t.id
        engaged.setdefault(root, set()).add(t.author)

    ranked = []
    for root, users in engaged.items():
        tw = by_id.get(root)
        if tw is None or tw.retweet_of is not None:
            continue  # original not in the window
        if tw.author == user:
            continue
        if not cfg.include_followings and tw.author in direct:
            continue  # already delivered on the timeline
        ranked.append((-len(users), -tw.timestamp, tw.id))
    ranked.sort()
    return [r[2] for r in ranked[: cfg.top_k]]


def snapshot_times(stream: Sequence[Tweet], cfg: SimConfig) -> list[int]:
    """Snapshot instants every ``snapshot_interval`` seconds, anchored at the last tweet."""
    if not stream:
        return []
    t0 = min(t.timestamp for t in stream)
    t1 = max(t.timestamp for t in stream)
    step = cfg.snapshot_interval
    if t1 - t0 < step:
        log.warning("stream spans %ds, shorter than one snapshot interval; single snapshot", t1 - t0)
        return [t1]
    n = math.ceil((t1 - t0) / step)
    times = [t1 - j * step for j in range(n + 1) if t1 - j * step >= t0]
    return sorted(times)


def _dist_or_none(tweets, inferences, redirects) -> DietDistribution | None:
    try:
        return normalize(compute_diet(tweets, inferences, redirects))
    except EmptyDietError:
        return None


def run_experiment(
    users: Sequence[str],
    graph: FollowGraph,
    stream: Sequence[Tweet],
    inferences: Mapping[Keyword, TopicInference],
    cfg: SimConfig,
    baseline: DietDistribution,
    baseline_name: str = "baseline",
    alpha: float = DEFAULT_ALPHA,
    redirects: Mapping[str, str] | None = None,
) -> tuple[SimResult, MitigationReport]:
    stream = _sorted_stream(stream)
    by_id = {t.id: t for t in stream}
    times = snapshot_times(stream, cfg)
    result = SimResult(cfg)
    rows = []
    for user in sorted(dict.fromkeys(users)):
        consumed = deliver_timeline(user, graph, stream)
        snaps = [Snapshot(te, tuple(recommend_snapshot(user, graph, stream, te, cfg))) for te in times]
        sim = UserSimulation(user, consumed, snaps)
        result.users.append(sim)

        if cfg.dedupe_across_snapshots:
            reco_ids = sim.recommended
        else:
            reco_ids = [t for s in snaps for t in s.tweet_ids]
        sim.consumed_diet = _dist_or_none([by_id[i] for i in consumed], inferences, redirects)
        sim.recommended_diet = _dist_or_none([by_id[i] for i in reco_ids], inferences, redirects)
        if sim.consumed_diet is None or sim.recommended_diet is None:
            which = "consumed" if sim.consumed_diet is None else "recommended"
            result.skipped[user] = f"empty {which} diet"
            log.warning("user %s: empty %s diet, left out of the mitigation report", user, which)
            continue
        sim.combined_diet = combine(sim.consumed_diet, sim.recommended_diet)
        rows.append((user, sim.consumed_diet, sim.recommended_diet))
    return result, mitigation_report(rows, baseline, alpha, baseline_name)
