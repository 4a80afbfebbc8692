"""HTTP API over published snapshots, plus the serve-mode runner.

Request handlers are read-only and concurrent; they always work against
the snapshot current at arrival, so one request sees one consistent
state. Query parameters are parsed strictly: unknown parameters and
malformed values are rejected with a field-level 400, never ignored.
"""

from __future__ import annotations

import queue
import threading
from typing import Iterable

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from act.annotate import Category
from act.cluster import Event
from act.config import ApiConfig
from act.ingest import RawPost, StreamStats, open_stream
from act.media import MediaIndex, RankedMedia, find_media, index_media
from act.pipeline import Pipeline, Resources, Snapshot
from act.store import MAX_LIMIT, FilterQuery, QueryValidationError
from act.timeutil import parse_utc
from act.views import (
    agency_posts,
    event_detail,
    event_summaries,
    health_payload,
    media_payload,
    related_payload,
    terms_payload,
)


class LocationModel(BaseModel):
    place_name: str
    lon: float
    lat: float
    confidence: float


class EventSummaryModel(BaseModel):
    id: str
    headline: str
    category: str
    location: LocationModel | None
    first_seen: str
    last_seen: str
    post_count: int
    flagged_angry: bool


class RelatedEventModel(EventSummaryModel):
    score: float


class SentimentModel(BaseModel):
    mean_polarity: float
    angry_fraction: float
    flagged_angry: bool


class ContentEntryModel(BaseModel):
    id: str
    author: str
    created_at: str
    text: str
    is_retweet: bool
    occurrences: int


class EventDetailModel(BaseModel):
    id: str
    headline: str
    category: str
    location: LocationModel | None
    first_seen: str
    last_seen: str
    post_count: int
    unique_text_count: int
    sentiment: SentimentModel
    content: list[ContentEntryModel]


class TermModel(BaseModel):
    term: str
    weight: int


class MediaModel(BaseModel):
    id: str
    url: str
    origin: str
    created_at: str
    coords: list[float] | None
    score: float


class AgencyPostModel(BaseModel):
    id: str
    author: str
    created_at: str
    text: str


class HealthModel(BaseModel):
    status: str
    snapshot_seq: int
    posts_ingested: int
    events_count: int


class ServiceRuntime:
    """Shared read side: current snapshot, media index, media cache."""

    def __init__(
        self,
        cfg: ApiConfig,
        resources: Resources,
        pipeline: Pipeline,
        media_index: MediaIndex | None = None,
    ):
        self.cfg = cfg
        self.resources = resources
        self.pipeline = pipeline
        self.media_index = media_index if media_index is not None else MediaIndex([])
        self.stream_stats: StreamStats | None = pipeline.stream_stats
        self._media_cache: dict[tuple[str, int, str], list[RankedMedia]] = {}

    @classmethod
    def build(cls, cfg: ApiConfig) -> "ServiceRuntime":
        resources = Resources.load(cfg)
        stats = StreamStats()
        store = None
        if cfg.paths.store_dir is not None:
            from act.store import LogWriter

            store = LogWriter(cfg.paths.store_dir)
        pipeline = Pipeline(cfg, resources, store=store, stream_stats=stats)
        index = index_media(cfg.paths.media_corpus) if cfg.paths.media_corpus else None
        return cls(cfg, resources, pipeline, media_index=index)

    def snapshot(self) -> Snapshot:
        return self.pipeline.snapshot

    def media_for(self, snapshot: Snapshot, event: Event) -> list[RankedMedia]:
        """Ranked media for one event, cached per (event, size, index version)."""
        key = (event.id, len(event.member_ids), self.media_index.version)
        cached = self._media_cache.get(key)
        if cached is not None:
            return cached
        member_posts = [
            snapshot.posts_by_id[mid] for mid in event.member_ids if mid in snapshot.posts_by_id
        ]
        ranked = find_media(
            event,
            self.media_index,
            member_posts,
            self.resources.category_rules.terms_for(event.category),
            k=self.cfg.media.k,
            weights=self.cfg.media.weights,
        )
        self._media_cache[key] = ranked
        return ranked


def _bad_request(field: str, message: str) -> HTTPException:
    return HTTPException(status_code=400, detail={"field": field, "message": message})


def _reject_unknown_params(request: Request, allowed: frozenset[str]) -> None:
    for key in request.query_params.keys():
        if key not in allowed:
            raise _bad_request(key, "unknown query parameter")


_FILTER_PARAMS = frozenset({"bbox", "category", "q", "since", "until", "geotagged", "limit"})


def parse_filter_query(request: Request, allowed: frozenset[str] = _FILTER_PARAMS) -> FilterQuery:
    """Strict FilterQuery parsing with field-level errors."""
    _reject_unknown_params(request, allowed)
    params = request.query_params

    bbox = None
    raw_bbox = params.get("bbox")
    if raw_bbox is not None:
        parts = raw_bbox.split(",")
        if len(parts) != 4:
            raise _bad_request("bbox", "expected min_lon,min_lat,max_lon,max_lat")
        try:
            bbox = tuple(float(p) for p in parts)
        except ValueError:
            raise _bad_request("bbox", "expected four numbers")

    categories = None
    raw_categories = params.getlist("category")
    if raw_categories:
        names = [name for raw in raw_categories for name in raw.split(",") if name]
        try:
            categories = frozenset(Category(name.lower()) for name in names)
        except ValueError:
            valid = ", ".join(c.value for c in Category)
            raise _bad_request("category", f"must be one of: {valid}")

    keyword = params.get("q") or None

    since = until = None
    if params.get("since"):
        try:
            since = parse_utc(params["since"])
        except ValueError:
            raise _bad_request("since", "expected an ISO-8601 timestamp")
    if params.get("until"):
        try:
            until = parse_utc(params["until"])
        except ValueError:
            raise _bad_request("until", "expected an ISO-8601 timestamp")

    geotagged = None
    raw_geotagged = params.get("geotagged")
    if raw_geotagged is not None:
        lowered = raw_geotagged.lower()
        if lowered in ("true", "1"):
            geotagged = True
        elif lowered in ("false", "0"):
            geotagged = False
        else:
            raise _bad_request("geotagged", "expected true or false")

    limit = 100
    if params.get("limit"):
        try:
            limit = int(params["limit"])
        except ValueError:
            raise _bad_request("limit", "expected an integer")

    try:
        return FilterQuery(
            bbox=bbox,
            categories=categories,
            keyword=keyword,
            since=since,
            until=until,
            geotagged=geotagged,
            limit=limit,
        )
    except QueryValidationError as exc:
        raise _bad_request(exc.field, exc.message)


def _positive_int(request: Request, name: str, default: int, maximum: int = MAX_LIMIT) -> int:
    raw = request.query_params.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise _bad_request(name, "expected an integer")
    if not (1 <= value <= maximum):
        raise _bad_request(name, f"must be in [1, {maximum}]")
    return value


def create_app(runtime: ServiceRuntime) -> FastAPI:
    app = FastAPI(title="act analytics api", version="0.1.0")
    app.state.runtime = runtime
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[runtime.cfg.server.cors_origin],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    def _event_or_404(snapshot: Snapshot, event_id: str) -> Event:
        event = snapshot.event(event_id)
        if event is None:
            raise HTTPException(status_code=404, detail=f"unknown event id: {event_id}")
        return event

    @app.get("/events", response_model=list[EventSummaryModel])
    def list_events(request: Request, response: Response):
        query = parse_filter_query(request)
        if query.geotagged is False and query.bbox is not None:
            response.headers["x-bbox-ignored"] = "true"
        return event_summaries(runtime.snapshot(), query)

    @app.get("/events/{event_id}", response_model=EventDetailModel)
    def get_event(event_id: str, request: Request):
        _reject_unknown_params(request, frozenset())
        snapshot = runtime.snapshot()
        return event_detail(snapshot, _event_or_404(snapshot, event_id))

    @app.get("/events/{event_id}/related", response_model=list[RelatedEventModel])
    def get_related(event_id: str, request: Request):
        _reject_unknown_params(request, frozenset())
        snapshot = runtime.snapshot()
        return related_payload(snapshot, _event_or_404(snapshot, event_id), k=5)

    @app.get("/events/{event_id}/media", response_model=list[MediaModel])
    def get_media(event_id: str, request: Request):
        _reject_unknown_params(request, frozenset())
        snapshot = runtime.snapshot()
        event = _event_or_404(snapshot, event_id)
        return media_payload(runtime.media_for(snapshot, event))

    @app.get("/terms", response_model=list[TermModel])
    def get_terms(request: Request, response: Response):
        allowed = _FILTER_PARAMS | {"k"}
        query = parse_filter_query(request, allowed)
        if query.geotagged is False and query.bbox is not None:
            response.headers["x-bbox-ignored"] = "true"
        k = _positive_int(request, "k", default=50)
        return terms_payload(runtime.snapshot(), query, k=k)

    @app.get("/agencies", response_model=list[AgencyPostModel])
    def get_agencies(request: Request):
        _reject_unknown_params(request, frozenset({"limit"}))
        limit = _positive_int(request, "limit", default=50)
        return agency_posts(runtime.snapshot(), limit=limit)

    @app.get("/health", response_model=HealthModel)
    def get_health(request: Request):
        _reject_unknown_params(request, frozenset())
        return health_payload(runtime.snapshot())

    return app


class PipelineRunner:
    """Feeder and worker threads around one pipeline, with back-pressure.

    The feeder pushes stream posts into a bounded queue and blocks when
    the worker falls behind; the worker is the only state mutator.
    """

    def __init__(self, runtime: ServiceRuntime, source, queue_size: int = 512):
        self.runtime = runtime
        self.source = source
        self._queue: queue.Queue[RawPost | None] = queue.Queue(maxsize=queue_size)
        self._feeder = threading.Thread(target=self._feed, name="act-feeder", daemon=True)
        self._worker = threading.Thread(target=self._work, name="act-pipeline", daemon=True)

    def _feed(self) -> None:
        stream: Iterable[RawPost] = open_stream(
            self.source, self.runtime.cfg.track, stats=self.runtime.stream_stats
        )
        for raw in stream:
            self._queue.put(raw)
        self._queue.put(None)

    def _work(self) -> None:
        pipeline = self.runtime.pipeline
        while True:
            raw = self._queue.get()
            if raw is None:
                break
            pipeline.process(raw)
        pipeline.finalize()

    def start(self) -> None:
        self.runtime.pipeline.publish()  # serve an empty snapshot immediately
        self._feeder.start()
        self._worker.start()

    def join(self, timeout: float | None = None) -> None:
        self._feeder.join(timeout)
        self._worker.join(timeout)
