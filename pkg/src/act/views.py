"""Read-only payload builders over a published snapshot.

Both the HTTP API and the batch export go through these functions, so a
response body and the equivalent in-process call are the same object by
construction. Everything returns plain dicts with stable field names and
ISO-8601 UTC timestamps.
"""

from __future__ import annotations

from act.cluster import Event, related_events, trending_terms
from act.media import RankedMedia
from act.pipeline import Snapshot
from act.store import FilterQuery, query_events
from act.timeutil import format_utc


def location_payload(event: Event) -> dict | None:
    if event.location is None:
        return None
    return {
        "place_name": event.location.place_name,
        "lon": event.location.lon,
        "lat": event.location.lat,
        "confidence": event.location.confidence,
    }


def headline_for(snapshot: Snapshot, event: Event) -> str:
    """The most frequent unique text, rendered as its first posting.

    Ties go to the text that appeared first in membership order.
    """
    counts: dict[str, int] = {}
    representative: dict[str, str] = {}
    order: dict[str, int] = {}
    for position, member_id in enumerate(event.member_ids):
        post = snapshot.posts_by_id.get(member_id)
        if post is None:
            continue
        counts[post.norm_text] = counts.get(post.norm_text, 0) + 1
        if post.norm_text not in representative:
            representative[post.norm_text] = post.text
            order[post.norm_text] = position
    if not counts:
        return ""
    best = min(counts, key=lambda t: (-counts[t], order[t]))
    return representative[best]


def event_summary(snapshot: Snapshot, event: Event) -> dict:
    return {
        "id": event.id,
        "headline": headline_for(snapshot, event),
        "category": event.category.value,
        "location": location_payload(event),
        "first_seen": format_utc(event.first_seen),
        "last_seen": format_utc(event.last_seen),
        "post_count": len(event.member_ids),
        "flagged_angry": event.sentiment.flagged_angry,
    }


def event_summaries(snapshot: Snapshot, query: FilterQuery) -> list[dict]:
    return [event_summary(snapshot, e) for e in query_events(query, snapshot.events.values())]


def event_content(snapshot: Snapshot, event: Event) -> list[dict]:
    """One representative post per unique text, newest first.

    The representative is the first posting of that text; retweets and
    repeats only bump its occurrence count.
    """
    entries: dict[str, dict] = {}
    for member_id in event.member_ids:
        post = snapshot.posts_by_id.get(member_id)
        if post is None:
            continue
        entry = entries.get(post.norm_text)
        if entry is None:
            entries[post.norm_text] = {
                "id": post.id,
                "author": post.author,
                "created_at": format_utc(post.created_at),
                "text": post.text,
                "is_retweet": post.is_retweet,
                "occurrences": 1,
                "_ts": post.created_at,
            }
        else:
            entry["occurrences"] += 1
    ordered = sorted(entries.values(), key=lambda e: (-e["_ts"].timestamp(), e["id"]))
    for entry in ordered:
        del entry["_ts"]
    return ordered


def event_detail(snapshot: Snapshot, event: Event) -> dict:
    return {
        "id": event.id,
        "headline": headline_for(snapshot, event),
        "category": event.category.value,
        "location": location_payload(event),
        "first_seen": format_utc(event.first_seen),
        "last_seen": format_utc(event.last_seen),
        "post_count": len(event.member_ids),
        "unique_text_count": len(event.unique_texts),
        "sentiment": {
            "mean_polarity": event.sentiment.mean_polarity,
            "angry_fraction": event.sentiment.angry_fraction,
            "flagged_angry": event.sentiment.flagged_angry,
        },
        "content": event_content(snapshot, event),
    }


def related_payload(snapshot: Snapshot, event: Event, k: int = 5) -> list[dict]:
    out = []
    for other, score in related_events(event, snapshot.events.values(), k):
        entry = event_summary(snapshot, other)
        entry["score"] = score
        out.append(entry)
    return out


def terms_payload(snapshot: Snapshot, query: FilterQuery, k: int = 50) -> list[dict]:
    return [
        {"term": term, "weight": weight}
        for term, weight in trending_terms(snapshot.events.values(), query, k)
    ]


def media_payload(ranked: list[RankedMedia]) -> list[dict]:
    return [
        {
            "id": rm.item.id,
            "url": rm.item.url_or_path,
            "origin": rm.item.origin,
            "created_at": format_utc(rm.item.created_at),
            "coords": list(rm.item.coords) if rm.item.coords else None,
            "score": rm.score,
        }
        for rm in ranked
    ]


def agency_posts(snapshot: Snapshot, limit: int = 50) -> list[dict]:
    agency = [p for p in snapshot.posts if p.is_agency]
    agency.sort(key=lambda p: (-p.created_at.timestamp(), p.id))
    return [
        {
            "id": p.id,
            "author": p.author,
            "created_at": format_utc(p.created_at),
            "text": p.text,
        }
        for p in agency[:limit]
    ]


def health_payload(snapshot: Snapshot) -> dict:
    return {
        "status": "ok",
        "snapshot_seq": snapshot.seq,
        "posts_ingested": snapshot.posts_ingested,
        "events_count": len(snapshot.events),
    }


def export_payload(snapshot: Snapshot) -> dict:
    """Deterministic batch-replay export: counters plus all event summaries."""
    events = sorted(
        snapshot.events.values(), key=lambda e: (e.first_seen.timestamp(), e.id)
    )
    return {
        "posts_ingested": snapshot.posts_ingested,
        "posts_kept": snapshot.posts_kept,
        "skipped_lines": snapshot.skipped_lines,
        "dropped": dict(sorted(snapshot.dropped.items())),
        "events_count": len(events),
        "events": [event_summary(snapshot, e) for e in events],
    }
