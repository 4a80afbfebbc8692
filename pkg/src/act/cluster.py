"""Incremental single-pass clustering of kept posts into events.

Posts are embedded as sparse TF-IDF vectors using corpus statistics as of
assignment time, compared by cosine similarity against the centroids of
events still inside the time window, and either join the best match above
the threshold or found a new event. Events never merge; near-duplicates
surface through related-event ranking instead.

All vector arithmetic iterates terms in sorted order and accumulates
centroids by left-fold over membership order, so a from-scratch recompute
reproduces the incremental floats bit for bit.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Iterable, Mapping, Sequence

from act.annotate import (
    Category,
    EventSentiment,
    GeoTag,
    LocationCandidate,
)
from act.geo import haversine_km
from act.parse import Post
from act.store import FilterQuery, event_matches
from act.timeutil import format_utc, parse_utc

TermVector = dict[str, float]


@dataclass
class CorpusStats:
    """Streaming document-frequency state backing IDF weights."""

    n_docs: int = 0
    doc_freq: dict[str, int] = field(default_factory=dict)

    def add_document(self, tokens: Iterable[str]) -> None:
        self.n_docs += 1
        for term in set(tokens):
            self.doc_freq[term] = self.doc_freq.get(term, 0) + 1


def tfidf_vector(tokens: Sequence[str], stats: CorpusStats) -> TermVector:
    """L2-normalized TF-IDF vector; weight = tf * (ln((1+N)/(1+df)) + 1)."""
    if not tokens:
        return {}
    counts = Counter(tokens)
    vec: TermVector = {}
    for term in sorted(counts):
        df = stats.doc_freq.get(term, 0)
        vec[term] = counts[term] * (math.log((1 + stats.n_docs) / (1 + df)) + 1.0)
    norm = math.sqrt(sum(w * w for w in vec.values()))
    return {term: w / norm for term, w in vec.items()}


def cosine(a: TermVector, b: TermVector) -> float:
    """Cosine similarity in [0, 1]; zero when either vector is empty."""
    if not a or not b:
        return 0.0
    shared = sorted(set(a) & set(b))
    if not shared:
        return 0.0
    dot = sum(a[t] * b[t] for t in shared)
    norm_a = math.sqrt(sum(a[t] * a[t] for t in sorted(a)))
    norm_b = math.sqrt(sum(b[t] * b[t] for t in sorted(b)))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return min(1.0, dot / (norm_a * norm_b))


def add_into(total: TermVector, vec: TermVector) -> None:
    """Accumulate ``vec`` into ``total`` term by term, in sorted term order."""
    for term in sorted(vec):
        total[term] = total.get(term, 0.0) + vec[term]


_NEUTRAL_SENTIMENT = EventSentiment(mean_polarity=0.0, angry_fraction=0.0, flagged_angry=False)


@dataclass
class Event:
    """A cluster of posts treated as one real-world incident.

    Clustering fields are owned by :class:`ClusterState`; the annotation
    fields (location, category, sentiment and their running aggregates)
    are maintained by the pipeline as members arrive.
    """

    id: str
    first_seen: datetime
    last_seen: datetime
    member_ids: list[str] = field(default_factory=list)
    unique_texts: set[str] = field(default_factory=set)
    centroid_sum: TermVector = field(default_factory=dict)
    term_counts: dict[str, int] = field(default_factory=dict)
    location: GeoTag | None = None
    category: Category = Category.OTHER
    sentiment: EventSentiment = _NEUTRAL_SENTIMENT
    media_refs: list[str] = field(default_factory=list)
    category_counts: dict[str, int] = field(default_factory=dict)
    polarity_sum: float = 0.0
    angry_count: int = 0
    geo_candidates: list[LocationCandidate] = field(default_factory=list)

    @property
    def centroid(self) -> TermVector:
        """L2-normalized centroid, equal to the normalized member mean."""
        norm = math.sqrt(sum(w * w for w in self.centroid_sum.values()))
        if norm == 0.0:
            return {}
        return {term: w / norm for term, w in self.centroid_sum.items()}

    @property
    def post_count(self) -> int:
        return len(self.member_ids)

    def copy(self) -> "Event":
        """Independent copy safe to publish in an immutable snapshot."""
        return Event(
            id=self.id,
            first_seen=self.first_seen,
            last_seen=self.last_seen,
            member_ids=list(self.member_ids),
            unique_texts=set(self.unique_texts),
            centroid_sum=dict(self.centroid_sum),
            term_counts=dict(self.term_counts),
            location=self.location,
            category=self.category,
            sentiment=self.sentiment,
            media_refs=list(self.media_refs),
            category_counts=dict(self.category_counts),
            polarity_sum=self.polarity_sum,
            angry_count=self.angry_count,
            geo_candidates=list(self.geo_candidates),
        )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "first_seen": format_utc(self.first_seen),
            "last_seen": format_utc(self.last_seen),
            "member_ids": list(self.member_ids),
            "unique_texts": sorted(self.unique_texts),
            "centroid_sum": dict(self.centroid_sum),
            "term_counts": dict(self.term_counts),
            "location": self.location.to_dict() if self.location else None,
            "category": self.category.value,
            "sentiment": self.sentiment.to_dict(),
            "media_refs": list(self.media_refs),
            "category_counts": dict(self.category_counts),
            "polarity_sum": self.polarity_sum,
            "angry_count": self.angry_count,
            "geo_candidates": [c.to_dict() for c in self.geo_candidates],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Event":
        location = data.get("location")
        return cls(
            id=data["id"],
            first_seen=parse_utc(data["first_seen"]),
            last_seen=parse_utc(data["last_seen"]),
            member_ids=list(data["member_ids"]),
            unique_texts=set(data["unique_texts"]),
            centroid_sum={t: float(w) for t, w in data["centroid_sum"].items()},
            term_counts={t: int(c) for t, c in data["term_counts"].items()},
            location=GeoTag.from_dict(location) if location else None,
            category=Category(data["category"]),
            sentiment=EventSentiment.from_dict(data["sentiment"]),
            media_refs=list(data.get("media_refs", [])),
            category_counts={k: int(v) for k, v in data.get("category_counts", {}).items()},
            polarity_sum=float(data.get("polarity_sum", 0.0)),
            angry_count=int(data.get("angry_count", 0)),
            geo_candidates=[LocationCandidate.from_dict(c) for c in data.get("geo_candidates", [])],
        )


class ClusterState:
    """Single-writer clustering state: active events plus corpus stats."""

    def __init__(self, theta: float = 0.5, window: timedelta = timedelta(hours=6)):
        if not (0.0 <= theta <= 1.0):
            raise ValueError("theta must be in [0, 1]")
        if window <= timedelta(0):
            raise ValueError("window must be positive")
        self.theta = theta
        self.window = window
        self.events: dict[str, Event] = {}
        self.stats = CorpusStats()

    def assign(self, post: Post) -> str:
        """Assign one kept post to an event, creating one if nothing is close.

        The post vector uses corpus stats as of call time; stats update
        afterwards. Among equally similar active events the older one wins.
        Returns the event id.
        """
        vec = tfidf_vector(list(post.tokens), self.stats)
        best_id: str | None = None
        best_sim = -1.0
        for event in self.events.values():
            if (post.created_at - event.last_seen) > self.window:
                continue
            sim = cosine(vec, event.centroid_sum)
            if sim > best_sim:
                best_sim = sim
                best_id = event.id

        if best_id is not None and best_sim >= self.theta:
            event = self.events[best_id]
            event.member_ids.append(post.id)
            event.unique_texts.add(post.norm_text)
            add_into(event.centroid_sum, vec)
            for token in post.tokens:
                event.term_counts[token] = event.term_counts.get(token, 0) + 1
            if post.created_at < event.first_seen:
                event.first_seen = post.created_at
            if post.created_at > event.last_seen:
                event.last_seen = post.created_at
        else:
            event = Event(
                id=f"ev-{post.id}",
                first_seen=post.created_at,
                last_seen=post.created_at,
                member_ids=[post.id],
                unique_texts={post.norm_text},
                centroid_sum=dict(vec),
                term_counts=dict(Counter(post.tokens)),
            )
            self.events[event.id] = event

        self.stats.add_document(post.tokens)
        return event.id


def span_gap_seconds(
    a: tuple[datetime, datetime],
    b: tuple[datetime, datetime],
) -> float:
    """Distance between two closed time spans; zero when they overlap."""
    gap = (max(a[0], b[0]) - min(a[1], b[1])).total_seconds()
    return max(0.0, gap)


def related_events(event: Event, events: Iterable[Event], k: int = 5) -> list[tuple[Event, float]]:
    """Rank other events by 0.4*geo + 0.3*time + 0.3*category affinity.

    Geo decays with distance (e-fold every 50 km; zero when either side
    has no location), time decays with the span gap (e-fold every 6 h),
    and category contributes all or nothing. Ties prefer the most recently
    active event, then the smaller id.
    """
    scored: list[tuple[Event, float]] = []
    for other in events:
        if other.id == event.id:
            continue
        geo = 0.0
        if event.location is not None and other.location is not None:
            km = haversine_km(
                event.location.lon, event.location.lat, other.location.lon, other.location.lat
            )
            geo = math.exp(-km / 50.0)
        gap_hours = span_gap_seconds(
            (event.first_seen, event.last_seen), (other.first_seen, other.last_seen)
        ) / 3600.0
        time_factor = math.exp(-gap_hours / 6.0)
        cat = 1.0 if event.category == other.category else 0.0
        scored.append((other, 0.4 * geo + 0.3 * time_factor + 0.3 * cat))
    scored.sort(key=lambda pair: (-pair[1], -pair[0].last_seen.timestamp(), pair[0].id))
    return scored[:k]


def trending_terms(
    events: Iterable[Event],
    selection: FilterQuery | None = None,
    k: int = 50,
) -> list[tuple[str, int]]:
    """Top-k terms by total count over events matching the selection.

    The selection's ``limit`` is a presentation concern for event lists
    and is ignored here; ties break lexicographically.
    """
    totals: Counter[str] = Counter()
    for event in events:
        if selection is None or event_matches(event, selection):
            totals.update(event.term_counts)
    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]
