"""Media finding: a searchable image index plus event-driven ranking.

Items come from a local JSON Lines corpus (or a pluggable remote stub)
and are indexed by caption token, time, and a half-degree geo grid.
Ranking blends caption overlap with the event's trending terms and
category keywords, distance to the event's location, and closeness to
the event's time span. Images embedded in member posts always outrank
index hits. Images are referenced by URL or path, never downloaded.
"""

from __future__ import annotations

import bisect
import hashlib
import json
import logging
import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, Protocol, Sequence, runtime_checkable

from act.geo import grid_cell, haversine_km
from act.parse import Post, tokenize
from act.store import canonical_json
from act.timeutil import format_utc, parse_utc

if TYPE_CHECKING:
    from act.cluster import Event

logger = logging.getLogger(__name__)

IMAGE_EXTENSIONS = (".jpg", ".jpeg", ".png", ".gif")
WINDOW_PAD = timedelta(hours=12)
GRID_DEG = 0.5


class Origin:
    POST_EMBEDDED = "post_embedded"
    LOCAL_CORPUS = "local_corpus"
    REMOTE = "remote"


@dataclass(frozen=True)
class MediaItem:
    """One referenced image: caption tokens, optional geo, timestamp, source."""

    id: str
    url_or_path: str
    caption_tokens: tuple[str, ...]
    coords: tuple[float, float] | None
    created_at: datetime
    origin: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "url_or_path": self.url_or_path,
            "caption_tokens": list(self.caption_tokens),
            "coords": list(self.coords) if self.coords else None,
            "created_at": format_utc(self.created_at),
            "origin": self.origin,
        }


@dataclass(frozen=True)
class MediaWeights:
    """Scoring weights and cutoff for media ranking."""

    content: float = 0.5
    geo: float = 0.3
    time: float = 0.2
    cutoff: float = 0.1


DEFAULT_WEIGHTS = MediaWeights()


@runtime_checkable
class RemoteMediaSource(Protocol):
    """A pluggable remote image source; anything yielding MediaItems."""

    def items(self) -> Iterator[MediaItem]: ...


@dataclass(frozen=True)
class CannedRemoteMediaSource:
    """Replay stub for a remote photo service: re-tags a second corpus."""

    path: Path

    def items(self) -> Iterator[MediaItem]:
        for item in _read_corpus(self.path, origin=Origin.REMOTE)[0]:
            yield item


def _item_from_record(record: dict, origin: str) -> MediaItem:
    try:
        item_id = str(record["id"])
        url = str(record["url"])
        caption = str(record.get("caption", ""))
        created_at = parse_utc(str(record["created_at"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed media record: {exc}") from exc
    if not item_id:
        raise ValueError("media id must be non-empty")
    coords = record.get("coordinates")
    parsed: tuple[float, float] | None = None
    if coords is not None:
        if not (isinstance(coords, (list, tuple)) and len(coords) == 2):
            raise ValueError(f"malformed coordinates: {coords!r}")
        parsed = (float(coords[0]), float(coords[1]))
    return MediaItem(
        id=item_id,
        url_or_path=url,
        caption_tokens=tuple(tokenize(caption)),
        coords=parsed,
        created_at=created_at,
        origin=origin,
    )


def _read_corpus(path: str | Path, origin: str) -> tuple[list[MediaItem], int]:
    corpus = Path(path)
    items: list[MediaItem] = []
    skipped = 0
    with corpus.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                items.append(_item_from_record(json.loads(line), origin))
            except (json.JSONDecodeError, ValueError) as exc:
                skipped += 1
                logger.warning("skipping malformed media line %d of %s: %s", lineno, corpus, exc)
    return items, skipped


class MediaIndex:
    """Immutable-after-build index over media items."""

    def __init__(self, items: Iterable[MediaItem], skipped: int = 0):
        self.items: dict[str, MediaItem] = {}
        self.by_token: dict[str, set[str]] = {}
        self.by_cell: dict[tuple[int, int], set[str]] = {}
        self.skipped = skipped
        for item in items:
            if item.id in self.items:
                raise ValueError(f"duplicate media id {item.id!r}")
            self.items[item.id] = item
            for token in set(item.caption_tokens):
                self.by_token.setdefault(token, set()).add(item.id)
            if item.coords is not None:
                self.by_cell.setdefault(grid_cell(*item.coords, GRID_DEG), set()).add(item.id)
        self._timeline = sorted((item.created_at, item.id) for item in self.items.values())
        self.version = self._fingerprint()

    def _fingerprint(self) -> str:
        dump = canonical_json([self.items[i].to_dict() for i in sorted(self.items)])
        return hashlib.sha256(dump).hexdigest()

    def __len__(self) -> int:
        return len(self.items)

    def dump(self) -> dict:
        """Canonical exportable view, used to compare index builds."""
        return {
            "items": [self.items[i].to_dict() for i in sorted(self.items)],
            "skipped": self.skipped,
            "version": self.version,
        }

    def in_window(self, start: datetime, end: datetime) -> list[MediaItem]:
        """Items with start <= created_at <= end, in (time, id) order."""
        lo = bisect.bisect_left(self._timeline, (start, ""))
        out: list[MediaItem] = []
        for created_at, item_id in self._timeline[lo:]:
            if created_at > end:
                break
            out.append(self.items[item_id])
        return out


def index_media(path: str | Path, extra: Iterable[MediaItem] = ()) -> MediaIndex:
    """Build the index from a JSON Lines corpus, skipping malformed lines.

    ``extra`` lets a remote-source stub contribute additional items.
    """
    items, skipped = _read_corpus(path, origin=Origin.LOCAL_CORPUS)
    items.extend(extra)
    return MediaIndex(items, skipped=skipped)


def _image_url(url: str) -> bool:
    bare = url.split("?", 1)[0].split("#", 1)[0]
    return bare.lower().endswith(IMAGE_EXTENSIONS)


def embedded_media(post: Post) -> list[MediaItem]:
    """Image URLs inside a post, as media items carrying the post's geo/time."""
    out = []
    for i, url in enumerate(post.urls):
        if _image_url(url):
            out.append(
                MediaItem(
                    id=f"{post.id}:{i}",
                    url_or_path=url,
                    caption_tokens=tuple(post.tokens),
                    coords=post.coords,
                    created_at=post.created_at,
                    origin=Origin.POST_EMBEDDED,
                )
            )
    return out


@dataclass(frozen=True)
class MediaQuery:
    """Search terms, optional centre, and padded time window for one event."""

    terms: frozenset[str]
    center: tuple[float, float] | None
    window: tuple[datetime, datetime]

    def __post_init__(self) -> None:
        if self.window[0] >= self.window[1]:
            raise ValueError("media query window must be non-empty")


def build_media_query(event: "Event", category_terms: frozenset[str]) -> MediaQuery:
    """Terms are the event's top-5 trending terms plus its category keywords."""
    top = sorted(event.term_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
    terms = frozenset(term for term, _ in top) | category_terms
    center = (event.location.lon, event.location.lat) if event.location else None
    return MediaQuery(
        terms=terms,
        center=center,
        window=(event.first_seen - WINDOW_PAD, event.last_seen + WINDOW_PAD),
    )


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a or not b:
        return 0.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def score_item(
    item: MediaItem,
    query: MediaQuery,
    span: tuple[datetime, datetime],
    weights: MediaWeights = DEFAULT_WEIGHTS,
) -> float:
    """Blend caption overlap, distance decay, and time-gap decay into [0, 1]."""
    content = _jaccard(frozenset(item.caption_tokens), query.terms)
    geo = 0.0
    if item.coords is not None and query.center is not None:
        km = haversine_km(item.coords[0], item.coords[1], query.center[0], query.center[1])
        geo = math.exp(-km / 25.0)
    gap_hours = 0.0
    if item.created_at < span[0]:
        gap_hours = (span[0] - item.created_at).total_seconds() / 3600.0
    elif item.created_at > span[1]:
        gap_hours = (item.created_at - span[1]).total_seconds() / 3600.0
    time_factor = math.exp(-gap_hours / 12.0)
    return weights.content * content + weights.geo * geo + weights.time * time_factor


@dataclass(frozen=True)
class RankedMedia:
    item: MediaItem
    score: float


def find_media(
    event: "Event",
    index: MediaIndex,
    member_posts: Sequence[Post],
    category_terms: frozenset[str],
    k: int = 12,
    weights: MediaWeights = DEFAULT_WEIGHTS,
) -> list[RankedMedia]:
    """Rank media for one event: member-embedded images first, then index
    hits inside the padded window scoring at or above the cutoff."""
    query = build_media_query(event, category_terms)
    span = (event.first_seen, event.last_seen)

    ranked: list[RankedMedia] = []
    seen: set[str] = set()
    for post in member_posts:
        for item in embedded_media(post):
            if item.id not in seen:
                seen.add(item.id)
                ranked.append(RankedMedia(item=item, score=1.0))

    scored: list[RankedMedia] = []
    for item in index.in_window(*query.window):
        score = score_item(item, query, span, weights)
        if score >= weights.cutoff:
            scored.append(RankedMedia(item=item, score=score))
    scored.sort(key=lambda rm: (-rm.score, rm.item.created_at, rm.item.id))
    ranked.extend(scored)
    return ranked[:k]
