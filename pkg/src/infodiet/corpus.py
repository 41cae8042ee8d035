"""Ingestion of tweets, expert profiles and follow graphs; keyword extraction."""

from __future__ import annotations

import csv
import json
import logging
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple
from urllib.parse import urlsplit

log = logging.getLogger(__name__)

__all__ = [
    "Tweet",
    "Keyword",
    "ExpertProfile",
    "FollowGraph",
    "Corpus",
    "CorpusError",
    "MalformedKeyword",
    "extract_keywords",
    "canonicalize_url",
    "canonicalize_hashtag",
    "is_english",
    "load_tweets",
    "load_experts",
    "load_graph",
    "load_redirect_map",
    "load_dictionary",
    "load_corpus",
]


class CorpusError(ValueError):
    """Unreadable input or, in strict mode, a malformed record."""


class MalformedKeyword(ValueError):
    pass


@dataclass(frozen=True)
class Tweet:
    id: str
    author: str
    timestamp: int
    text: str
    retweet_of: str | None = None


@dataclass(frozen=True, order=True)
class Keyword:
    kind: str  # "hashtag" | "url"
    canonical: str

    def __str__(self) -> str:
        return f"#{self.canonical}" if self.kind == "hashtag" else self.canonical


@dataclass(frozen=True)
class ExpertProfile:
    user: str
    tags: tuple[str, ...]


@dataclass(frozen=True)
class FollowGraph:
    """``followings[u]`` is the set of users that ``u`` follows."""

    followings: Mapping[str, frozenset[str]] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]]) -> "FollowGraph":
        adj: dict[str, set[str]] = {}
        for follower, followee in edges:
            if follower == followee:
                continue
            adj.setdefault(follower, set()).add(followee)
        return cls({u: frozenset(v) for u, v in sorted(adj.items())})

    def following(self, user: str) -> frozenset[str]:
        return self.followings.get(user, frozenset())

    def __contains__(self, user: str) -> bool:
        return user in self.followings

    def without_edge(self, follower: str, followee: str) -> "FollowGraph":
        adj = dict(self.followings)
        adj[follower] = adj.get(follower, frozenset()) - {followee}
        return FollowGraph(adj)


class Corpus(NamedTuple):
    tweets: list[Tweet]
    experts: list[ExpertProfile]
    graph: FollowGraph
    stats: Counter


# --------------------------------------------------------------------------
# keyword extraction
# --------------------------------------------------------------------------

_URL = re.compile(r"https?://\S*", re.IGNORECASE)
_TOKEN = re.compile(
    r"(?P<url>https?://\S*)|(?<![A-Za-z0-9_&])#(?P<tag>[A-Za-z0-9_]+)",
    re.IGNORECASE | re.ASCII,
)
# trailing characters that end a sentence rather than a URL
_URL_TRAIL = ".,;:!?)]}'\"…"


def canonicalize_hashtag(tag: str) -> Keyword:
    body = tag.lstrip("#").lower()
    if not body or not re.fullmatch(r"[a-z0-9_]+", body):
        raise MalformedKeyword(f"bad hashtag: {tag!r}")
    return Keyword("hashtag", body)


def _canonical_url_string(raw: str) -> str:
    try:
        parts = urlsplit(raw.strip())
        host = parts.hostname
    except ValueError as exc:
        raise MalformedKeyword(f"unparseable URL: {raw!r}") from exc
    if parts.scheme.lower() not in ("http", "https"):
        raise MalformedKeyword(f"not an http(s) URL: {raw!r}")
    if not host:
        raise MalformedKeyword(f"empty host: {raw!r}")
    host = host.lower().rstrip(".")
    while host.startswith("www."):
        host = host[4:]
    if not host:
        raise MalformedKeyword(f"empty host: {raw!r}")
    path = parts.path.lower().rstrip("/")
    return host + path


def canonicalize_url(raw: str, redirects: Mapping[str, str] | None = None) -> Keyword:
    """Canonical URL keyword: lowercase host+path, no scheme/www/query/fragment/trailing slash.

    ``redirects`` maps canonical short forms to targets and is applied once.
    """
    canon = _canonical_url_string(raw)
    if redirects:
        target = redirects.get(canon)
        if target is not None:
            canon = target
    return Keyword("url", canon)


def extract_keywords(
    text: str,
    redirects: Mapping[str, str] | None = None,
    stats: Counter | None = None,
) -> list[Keyword]:
    """Hashtags and URLs in order of appearance; duplicates kept.

    Malformed URLs are dropped and counted under ``stats["malformed_keyword"]``.
    """
    out: list[Keyword] = []
    for m in _TOKEN.finditer(text):
        if m.group("tag") is not None:
            out.append(Keyword("hashtag", m.group("tag").lower()))
            continue
        raw = m.group("url").rstrip(_URL_TRAIL)
        try:
            out.append(canonicalize_url(raw, redirects))
        except MalformedKeyword:
            if stats is not None:
                stats["malformed_keyword"] += 1
    return out


def is_english(text: str, dictionary: set[str] | frozenset[str]) -> bool:
    """True when at least half of the countable words are dictionary words."""
    total = hits = 0
    for tok in text.split():
        if tok.startswith(("#", "@")) or _URL.match(tok):
            continue
        word = tok.strip(string.punctuation).lower()
        if not word:
            continue
        total += 1
        hits += word in dictionary
    return total > 0 and 2 * hits >= total


# --------------------------------------------------------------------------
# file loaders
# --------------------------------------------------------------------------


def _open_lines(path: str | Path):
    try:
        with open(path, encoding="utf-8") as fh:
            yield from enumerate(fh, start=1)
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc


def _bad(kind: str, path, lineno: int, why: str, strict: bool, stats: Counter):
    if strict:
        raise CorpusError(f"{path}:{lineno}: malformed {kind} record: {why}")
    stats[f"malformed_{kind}"] += 1
    log.debug("%s:%d: skipping malformed %s: %s", path, lineno, kind, why)


def _parse_tweet(obj) -> Tweet:
    if not isinstance(obj, dict):
        raise ValueError("not an object")
    tid, user, ts, text = obj.get("id"), obj.get("user"), obj.get("ts"), obj.get("text")
    rt = obj.get("retweet_of")
    if not isinstance(tid, str) or not tid:
        raise ValueError("id must be a nonempty string")
    if not isinstance(user, str) or not user:
        raise ValueError("user must be a nonempty string")
    if isinstance(ts, bool) or not isinstance(ts, int):
        raise ValueError("ts must be integer epoch seconds")
    if not isinstance(text, str):
        raise ValueError("text must be a string")
    if rt is not None and (not isinstance(rt, str) or not rt):
        raise ValueError("retweet_of must be a string or null")
    return Tweet(tid, user, ts, text, rt)


def load_tweets(path: str | Path, strict: bool = False, stats: Counter | None = None) -> list[Tweet]:
    stats = Counter() if stats is None else stats
    tweets: list[Tweet] = []
    seen: set[str] = set()
    for lineno, line in _open_lines(path):
        if not line.strip():
            continue
        try:
            tw = _parse_tweet(json.loads(line))
        except (json.JSONDecodeError, ValueError) as exc:
            _bad("tweet", path, lineno, str(exc), strict, stats)
            continue
        if tw.id in seen:
            _bad("tweet", path, lineno, f"duplicate id {tw.id}", strict, stats)
            continue
        seen.add(tw.id)
        tweets.append(tw)
    stats["tweets"] += len(tweets)
    return tweets


def load_experts(path: str | Path, strict: bool = False, stats: Counter | None = None) -> list[ExpertProfile]:
    stats = Counter() if stats is None else stats
    experts: list[ExpertProfile] = []
    for lineno, line in _open_lines(path):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            user, tags = obj["user"], obj["tags"]
            if not isinstance(user, str) or not user:
                raise ValueError("user must be a nonempty string")
            if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
                raise ValueError("tags must be a list of strings")
        except (json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
            _bad("expert", path, lineno, str(exc), strict, stats)
            continue
        experts.append(ExpertProfile(user, tuple(tags)))
    if not experts:
        log.warning("no expert profiles in %s", path)
    stats["experts"] += len(experts)
    return experts


def load_graph(path: str | Path, strict: bool = False, stats: Counter | None = None) -> FollowGraph:
    stats = Counter() if stats is None else stats
    edges: list[tuple[str, str]] = []
    header_seen = False
    for lineno, line in _open_lines(path):
        if not line.strip():
            continue
        row = next(csv.reader([line]))
        if not header_seen:
            header_seen = True
            if [c.strip() for c in row] == ["follower", "followee"]:
                continue
            log.warning("%s: no follower,followee header; reading first line as an edge", path)
        if len(row) != 2 or not row[0].strip() or not row[1].strip():
            _bad("edge", path, lineno, "expected two nonempty fields", strict, stats)
            continue
        a, b = row[0].strip(), row[1].strip()
        if a == b:
            stats["self_loop"] += 1
            continue
        edges.append((a, b))
    stats["edges"] += len(set(edges))
    return FollowGraph.from_edges(edges)


def load_redirect_map(path: str | Path) -> dict[str, str]:
    """CSV ``short,target``; both sides are canonicalized (scheme optional)."""
    out: dict[str, str] = {}

    def canon(s: str) -> str:
        s = s.strip()
        if not re.match(r"https?://", s, re.IGNORECASE):
            s = "http://" + s
        return _canonical_url_string(s)

    for lineno, line in _open_lines(path):
        row = next(csv.reader([line]), [])
        if not row or not "".join(row).strip():
            continue
        if lineno == 1 and [c.strip() for c in row] == ["short", "target"]:
            continue
        if len(row) != 2:
            raise CorpusError(f"{path}:{lineno}: expected short,target")
        try:
            out[canon(row[0])] = canon(row[1])
        except MalformedKeyword as exc:
            raise CorpusError(f"{path}:{lineno}: {exc}") from exc
    return out


def load_dictionary(path: str | Path) -> frozenset[str]:
    words = {line.strip().lower() for _, line in _open_lines(path)} - {""}
    if not words:
        raise CorpusError(f"dictionary {path} is empty")
    return frozenset(words)


def load_corpus(
    tweets_path: str | Path,
    experts_path: str | Path,
    graph_path: str | Path,
    strict: bool = False,
) -> Corpus:
    stats: Counter = Counter()
    tweets = load_tweets(tweets_path, strict, stats)
    experts = load_experts(experts_path, strict, stats)
    graph = load_graph(graph_path, strict, stats)
    return Corpus(tweets, experts, graph, stats)
