"""Single-writer pipeline wiring ingest, parse, cluster, and annotate.

Exactly one thread mutates pipeline state. Readers get immutable
snapshots published after every batch of ingested posts; publication is
a single attribute swap, so concurrent readers see the old snapshot or
the new one, never a half-built state. When a store directory is
configured, kept posts stream to the log as they arrive and dirty events
are upserted at each snapshot boundary.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import timedelta
from typing import Iterable, Mapping

from act.annotate import (
    Category,
    CategoryRules,
    Gazetteer,
    GeoTag,
    SentimentLexicon,
    SentimentScore,
    candidate_from_coords,
    candidate_from_geotag,
    categorize_event_counts,
    categorize_post,
    geotag_text,
    resolve_event_location,
    score_post,
    sentiment_from_sums,
)
from act.cluster import ClusterState, Event
from act.config import ApiConfig
from act.ingest import RawPost, StreamStats
from act.parse import NoiseFilter, NoiseRules, Post, parse_post
from act.store import LogWriter, load_records

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PostAnnotations:
    """Per-post enrichment: category, sentiment, optional text geotag."""

    category: Category
    sentiment: SentimentScore
    geotag: GeoTag | None

    def to_dict(self) -> dict:
        return {
            "category": self.category.value,
            "sentiment": self.sentiment.to_dict(),
            "geotag": self.geotag.to_dict() if self.geotag else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PostAnnotations":
        geotag = data.get("geotag")
        return cls(
            category=Category(data["category"]),
            sentiment=SentimentScore.from_dict(data["sentiment"]),
            geotag=GeoTag.from_dict(geotag) if geotag else None,
        )


@dataclass(frozen=True)
class Resources:
    """Read-only rule and lookup data loaded once at startup."""

    noise_rules: NoiseRules
    category_rules: CategoryRules
    gazetteer: Gazetteer
    lexicon: SentimentLexicon

    @classmethod
    def load(cls, cfg: ApiConfig) -> "Resources":
        return cls(
            noise_rules=NoiseRules.from_file(cfg.paths.noise_rules),
            category_rules=CategoryRules.from_file(cfg.paths.category_rules),
            gazetteer=Gazetteer.from_csv(cfg.paths.gazetteer),
            lexicon=SentimentLexicon.from_files(cfg.paths.sentiment_lexicon, cfg.paths.anger_terms),
        )


@dataclass(frozen=True)
class Snapshot:
    """Immutable published view of the pipeline state."""

    seq: int
    posts: tuple[Post, ...]
    posts_by_id: Mapping[str, Post]
    annotations: Mapping[str, PostAnnotations]
    events: Mapping[str, Event]
    posts_ingested: int
    posts_kept: int
    dropped: Mapping[str, int]
    skipped_lines: int

    def event(self, event_id: str) -> Event | None:
        return self.events.get(event_id)


EMPTY_SNAPSHOT = Snapshot(
    seq=0,
    posts=(),
    posts_by_id={},
    annotations={},
    events={},
    posts_ingested=0,
    posts_kept=0,
    dropped={},
    skipped_lines=0,
)


class Pipeline:
    """Consumes raw posts and maintains clustering plus event annotations."""

    def __init__(
        self,
        cfg: ApiConfig,
        resources: Resources,
        store: LogWriter | None = None,
        stream_stats: StreamStats | None = None,
    ):
        self.cfg = cfg
        self.resources = resources
        self.store = store
        self.stream_stats = stream_stats
        self.clusters = ClusterState(
            theta=cfg.pipeline.theta,
            window=timedelta(hours=cfg.pipeline.window_hours),
        )
        self.noise_filter = NoiseFilter(resources.noise_rules)
        self.posts: list[Post] = []
        self.posts_by_id: dict[str, Post] = {}
        self.annotations: dict[str, PostAnnotations] = {}
        self.posts_ingested = 0
        self.dropped: dict[str, int] = {}
        self._dirty_events: set[str] = set()
        self._snapshot_seq = 0
        self._unpublished = 0
        self.snapshot: Snapshot = EMPTY_SNAPSHOT

    def process(self, raw: RawPost) -> None:
        """Ingest one raw post end to end; publishes on batch boundaries."""
        self.posts_ingested += 1
        self._unpublished += 1
        post = parse_post(raw, self.cfg.track.accounts)
        verdict = self.noise_filter.classify(post)
        if not verdict.keep:
            reason = verdict.reason.value
            self.dropped[reason] = self.dropped.get(reason, 0) + 1
        else:
            self._accept(post)
        if self.posts_ingested % self.cfg.pipeline.snapshot_batch == 0:
            self.publish()

    def _accept(self, post: Post) -> None:
        event_id = self.clusters.assign(post)
        annotations = PostAnnotations(
            category=categorize_post(post.tokens, self.resources.category_rules),
            sentiment=score_post(post.tokens, self.resources.lexicon),
            geotag=geotag_text(post.tokens, self.resources.gazetteer),
        )
        self.posts.append(post)
        self.posts_by_id[post.id] = post
        self.annotations[post.id] = annotations
        self._update_event(self.clusters.events[event_id], post, annotations)
        if self.store is not None:
            self.store.append(
                "post", {"post": post.to_dict(), "annotations": annotations.to_dict()}
            )

    def _update_event(self, event: Event, post: Post, annotations: PostAnnotations) -> None:
        cat = annotations.category.value
        event.category_counts[cat] = event.category_counts.get(cat, 0) + 1
        event.category = categorize_event_counts(event.category_counts)

        event.polarity_sum += annotations.sentiment.polarity
        if annotations.sentiment.is_angry:
            event.angry_count += 1
        event.sentiment = sentiment_from_sums(
            event.polarity_sum,
            event.angry_count,
            len(event.member_ids),
            self.cfg.pipeline.anger_threshold,
        )

        if post.coords is not None:
            event.geo_candidates.append(
                candidate_from_coords(post.coords[0], post.coords[1], self.resources.gazetteer)
            )
        if annotations.geotag is not None:
            event.geo_candidates.append(
                candidate_from_geotag(annotations.geotag, self.resources.gazetteer)
            )
        event.location = resolve_event_location(event.geo_candidates)
        self._dirty_events.add(event.id)

    def publish(self) -> Snapshot:
        """Persist dirty events and swap in a fresh immutable snapshot."""
        if self.store is not None:
            for event_id in sorted(self._dirty_events):
                self.store.append("event_upsert", self.clusters.events[event_id].to_dict())
        self._dirty_events.clear()
        self._snapshot_seq += 1
        self._unpublished = 0
        snapshot = Snapshot(
            seq=self._snapshot_seq,
            posts=tuple(self.posts),
            posts_by_id=dict(self.posts_by_id),
            annotations=dict(self.annotations),
            events={eid: ev.copy() for eid, ev in self.clusters.events.items()},
            posts_ingested=self.posts_ingested,
            posts_kept=len(self.posts),
            dropped=dict(self.dropped),
            skipped_lines=self.stream_stats.skipped if self.stream_stats else 0,
        )
        self.snapshot = snapshot
        return snapshot

    def finalize(self) -> Snapshot:
        """Publish any unpublished work; idempotent at a boundary."""
        if self._unpublished or self.snapshot.seq == 0:
            return self.publish()
        return self.snapshot

    def run(self, stream: Iterable[RawPost]) -> Snapshot:
        """Drain a stream synchronously; returns the final snapshot."""
        for raw in stream:
            self.process(raw)
        return self.finalize()


def restore_state(store_root) -> tuple[list[tuple[Post, PostAnnotations]], dict[str, Event], list[str]]:
    """Rebuild persisted posts and events from the segment log.

    Returns (posts with annotations, last-write-wins events, warnings).
    """
    result = load_records(store_root, repair=False)
    posts: list[tuple[Post, PostAnnotations]] = []
    events: dict[str, Event] = {}
    for record in result.records:
        if record.kind == "post":
            posts.append(
                (
                    Post.from_dict(record.payload["post"]),
                    PostAnnotations.from_dict(record.payload["annotations"]),
                )
            )
        elif record.kind == "event_upsert":
            event = Event.from_dict(record.payload)
            events[event.id] = event
    return posts, events, result.warnings
