"""The fixed 18-category topic taxonomy and expert-tag matching."""

from __future__ import annotations

import enum
import json
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

__all__ = [
    "TopicId",
    "TOPIC_NAMES",
    "Taxonomy",
    "TaxonomyError",
    "normalize_term",
    "load_taxonomy",
    "map_expert_tags",
    "unmatched_tags",
]

TOPIC_NAMES: tuple[str, ...] = (
    "arts-crafts",
    "automotive",
    "business-finance",
    "career",
    "education-books",
    "entertainment",
    "environment",
    "fashion-style",
    "food-drink",
    "health-fitness",
    "hobbies",
    "paranormal",
    "politics-law",
    "religion",
    "science",
    "society",
    "sports",
    "technology",
)


class TopicId(enum.IntEnum):
    """One of the 18 topic categories; integer value is the row order used for tie-breaking."""

    ARTS_CRAFTS = 0
    AUTOMOTIVE = 1
    BUSINESS_FINANCE = 2
    CAREER = 3
    EDUCATION_BOOKS = 4
    ENTERTAINMENT = 5
    ENVIRONMENT = 6
    FASHION_STYLE = 7
    FOOD_DRINK = 8
    HEALTH_FITNESS = 9
    HOBBIES = 10
    PARANORMAL = 11
    POLITICS_LAW = 12
    RELIGION = 13
    SCIENCE = 14
    SOCIETY = 15
    SPORTS = 16
    TECHNOLOGY = 17

    @property
    def canonical_name(self) -> str:
        return TOPIC_NAMES[self.value]

    @classmethod
    def from_name(cls, name: str) -> "TopicId":
        try:
            return cls(TOPIC_NAMES.index(normalize_term(name)))
        except ValueError:
            raise KeyError(f"unknown topic: {name}") from None

    def __str__(self) -> str:
        return self.canonical_name


class TaxonomyError(ValueError):
    pass


_PUNCT = string.punctuation.replace("-", "")


def normalize_term(term: str) -> str:
    """Lowercase, unify space/underscore/hyphen runs to one hyphen, strip surrounding punctuation."""
    t = term.strip().lower().strip(string.punctuation + string.whitespace)
    t = "-".join(p for p in t.replace("_", " ").replace("-", " ").split())
    return t.strip(_PUNCT)


@dataclass(frozen=True)
class Taxonomy:
    terms: Mapping[TopicId, frozenset[str]]

    def __post_init__(self):
        lookup: dict[str, set[TopicId]] = {}
        for topic, ts in self.terms.items():
            for term in ts:
                lookup.setdefault(term, set()).add(topic)
            lookup.setdefault(topic.canonical_name, set()).add(topic)
        object.__setattr__(
            self, "_lookup", {k: frozenset(v) for k, v in lookup.items()}
        )

    def topics_for_term(self, term: str) -> frozenset[TopicId]:
        return self._lookup.get(normalize_term(term), frozenset())

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Iterable[str]]) -> "Taxonomy":
        terms: dict[TopicId, frozenset[str]] = {}
        for name, items in raw.items():
            key = normalize_term(name)
            if key not in TOPIC_NAMES:
                raise TaxonomyError(f"unknown topic: {name}")
            topic = TopicId(TOPIC_NAMES.index(key))
            if topic in terms:
                raise TaxonomyError(f"duplicate topic: {key}")
            if isinstance(items, str):
                raise TaxonomyError(f"term list for {key} must be a list")
            normalized = {normalize_term(x) for x in items} - {""}
            if not normalized:
                raise TaxonomyError(f"empty term list: {key}")
            terms[topic] = frozenset(normalized | {key})
        for topic in TopicId:
            if topic not in terms:
                raise TaxonomyError(f"missing topic: {topic.canonical_name}")
        return cls({t: terms[t] for t in TopicId})


def _reject_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise TaxonomyError(f"duplicate topic: {normalize_term(k)}")
        seen[k] = v
    return seen


def load_taxonomy(path: str | Path | None = None) -> Taxonomy:
    """Load a taxonomy JSON file; ``None`` loads the bundled 18-topic table."""
    if path is None:
        text = resources.files("infodiet").joinpath("data/table1.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise TaxonomyError(f"invalid taxonomy JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise TaxonomyError("taxonomy JSON must be an object of topic -> terms")
    return Taxonomy.from_mapping(raw)


def map_expert_tags(tags: Iterable[str], taxonomy: Taxonomy) -> set[TopicId]:
    out: set[TopicId] = set()
    for tag in tags:
        out |= taxonomy.topics_for_term(tag)
    return out


def unmatched_tags(tags: Iterable[str], taxonomy: Taxonomy) -> list[str]:
    return [t for t in tags if not taxonomy.topics_for_term(t)]
