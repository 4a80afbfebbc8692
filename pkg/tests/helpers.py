"""Shared builders for tests: posts, corpora, events, random queries."""

from __future__ import annotations

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

from act.annotate import Category, GeoTag
from act.cluster import Event
from act.ingest import RawPost, SourceTag, raw_post_to_record
from act.parse import Post, parse_post
from act.store import FilterQuery

T0 = datetime(2014, 1, 5, 0, 0, 0, tzinfo=timezone.utc)


def ts(minutes: float = 0.0, seconds: float = 0.0) -> datetime:
    return T0 + timedelta(minutes=minutes, seconds=seconds)


def raw(
    post_id: str,
    text: str,
    minutes: float = 0.0,
    author: str = "someone",
    coords: tuple[float, float] | None = None,
) -> RawPost:
    return RawPost(
        id=post_id,
        created_at=ts(minutes),
        author=author,
        text=text,
        coords=coords,
        source_tag=SourceTag.REPLAY,
    )


def post(
    post_id: str,
    text: str,
    minutes: float = 0.0,
    author: str = "someone",
    coords: tuple[float, float] | None = None,
    agency_accounts: frozenset[str] = frozenset(),
) -> Post:
    return parse_post(raw(post_id, text, minutes, author, coords), agency_accounts)


def write_corpus(path: Path, raws: list[RawPost], malformed_lines: list[str] | None = None) -> Path:
    lines = [json.dumps(raw_post_to_record(r)) for r in raws]
    for bad in malformed_lines or []:
        lines.append(bad)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def simple_event(
    event_id: str,
    first_minutes: float = 0.0,
    last_minutes: float = 10.0,
    category: Category = Category.OTHER,
    location: GeoTag | None = None,
    term_counts: dict[str, int] | None = None,
    member_ids: list[str] | None = None,
) -> Event:
    return Event(
        id=event_id,
        first_seen=ts(first_minutes),
        last_seen=ts(last_minutes),
        member_ids=member_ids or [],
        unique_texts=set(),
        centroid_sum={},
        term_counts=term_counts or {},
        location=location,
        category=category,
    )


def random_filter_query(rng: random.Random, terms: list[str]) -> FilterQuery:
    """A randomized but always-valid FilterQuery over plausible ranges."""
    bbox = None
    if rng.random() < 0.5:
        lon = rng.uniform(110.0, 155.0)
        lat = rng.uniform(-45.0, -10.0)
        bbox = (lon, lat, lon + rng.uniform(0.1, 25.0), lat + rng.uniform(0.1, 20.0))
    categories = None
    if rng.random() < 0.5:
        categories = frozenset(rng.sample(list(Category), rng.randint(1, 3)))
    keyword = rng.choice(terms) if terms and rng.random() < 0.5 else None
    since = until = None
    if rng.random() < 0.5:
        since = T0 + timedelta(minutes=rng.uniform(-100.0, 2000.0))
    if rng.random() < 0.5:
        until = (since or T0) + timedelta(minutes=rng.uniform(0.0, 2000.0))
    geotagged = rng.choice([None, True, False])
    limit = rng.choice([1, 3, 10, 100, 1000])
    return FilterQuery(
        bbox=bbox,
        categories=categories,
        keyword=keyword,
        since=since,
        until=until,
        geotagged=geotagged,
        limit=limit,
    )
