"""Ordered raw-post streams: corpus replay, a seeded synthetic feed, and
pluggable remote sources.

Every stream is filtered against a :class:`TrackConfig` (tracked accounts
and whole-token keyword matches) before anything reaches the pipeline, and
is paced by the replay speed multiplier. No credentialed network client
ships here; a remote source is anything satisfying :class:`RemoteSource`.
"""

from __future__ import annotations

import json
import logging
import random
import time
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Iterator, Protocol, runtime_checkable

from act.parse import raw_tokens
from act.timeutil import format_utc, parse_utc

logger = logging.getLogger(__name__)

DEFAULT_KEYWORDS: frozenset[str] = frozenset(
    {
        "fire", "bushfire", "blaze", "smoke",
        "flood", "flooding", "inundated",
        "storm", "hurricane", "cyclone", "hail",
        "earthquake", "quake", "tremor", "aftershock",
        "ambulance", "injured", "casualty", "paramedics",
        "emergency", "evacuate", "evacuated", "evacuation", "rescue",
    }
)

# No agency accounts ship by default; operators supply their own. These are
# the handles the synthetic feed uses, handy as a starting point.
EXAMPLE_AGENCY_ACCOUNTS: frozenset[str] = frozenset(
    {"nswrfs", "qldfes", "cfavic", "redcrossau", "bomalerts", "abcemergency", "seswarnings"}
)


class SourceTag(str, Enum):
    REPLAY = "replay"
    SYNTHETIC = "synthetic"
    REMOTE = "remote"


class StreamOpenError(Exception):
    """The stream source could not be opened at all."""


@dataclass(frozen=True)
class RawPost:
    """One incoming microblog record as received, pre-validation."""

    id: str
    created_at: datetime
    author: str
    text: str
    coords: tuple[float, float] | None = None
    source_tag: SourceTag = SourceTag.REPLAY

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("post id must be non-empty")
        if self.created_at.tzinfo is None:
            object.__setattr__(self, "created_at", self.created_at.replace(tzinfo=timezone.utc))
        if self.coords is not None:
            lon, lat = self.coords
            if not (-180.0 <= lon <= 180.0 and -90.0 <= lat <= 90.0):
                raise ValueError(f"coordinates out of range: {self.coords}")


@dataclass(frozen=True)
class TrackConfig:
    """Tracked accounts and keywords plus the replay pacing multiplier.

    ``replay_speed`` divides the real timestamp gaps between records;
    0 means emit as fast as possible.
    """

    accounts: frozenset[str] = frozenset()
    keywords: frozenset[str] = DEFAULT_KEYWORDS
    replay_speed: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "accounts", frozenset(a.lower() for a in self.accounts))
        object.__setattr__(self, "keywords", frozenset(self.keywords))
        if not self.accounts and not self.keywords:
            raise ValueError("at least one of accounts/keywords must be non-empty")
        for kw in self.keywords:
            if kw != kw.lower():
                raise ValueError(f"keywords must be lowercase: {kw!r}")
        if self.replay_speed < 0:
            raise ValueError("replay_speed must be >= 0")


def matches_track(raw: RawPost, cfg: TrackConfig) -> bool:
    """True iff the author is tracked or a tracked keyword appears as a
    whole token (hashtag bodies included) in the text."""
    if raw.author.lower() in cfg.accounts:
        return True
    if not cfg.keywords:
        return False
    return any(tok in cfg.keywords for tok in raw_tokens(raw.text))


@dataclass
class StreamStats:
    """Counters reported by a stream: emitted, malformed-skipped, filtered."""

    emitted: int = 0
    skipped: int = 0
    filtered: int = 0


def raw_post_from_record(record: dict, source_tag: SourceTag = SourceTag.REPLAY) -> RawPost:
    """Build a RawPost from one corpus JSON object; raises ValueError when malformed."""
    if not isinstance(record, dict):
        raise ValueError("record must be a JSON object")
    try:
        post_id = str(record["id"])
        created_at = parse_utc(str(record["created_at"]))
        author = str(record["user"])
        text = str(record["text"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed record: {exc}") from exc
    coords = record.get("coordinates")
    parsed_coords: tuple[float, float] | None = None
    if coords is not None:
        if not (isinstance(coords, (list, tuple)) and len(coords) == 2):
            raise ValueError(f"malformed coordinates: {coords!r}")
        parsed_coords = (float(coords[0]), float(coords[1]))
    return RawPost(
        id=post_id,
        created_at=created_at,
        author=author,
        text=text,
        coords=parsed_coords,
        source_tag=source_tag,
    )


def raw_post_to_record(raw: RawPost) -> dict:
    """Inverse of :func:`raw_post_from_record`, used by corpus writers."""
    record: dict = {
        "id": raw.id,
        "created_at": format_utc(raw.created_at),
        "user": raw.author,
        "text": raw.text,
    }
    if raw.coords is not None:
        record["coordinates"] = [raw.coords[0], raw.coords[1]]
    return record


def replay_corpus(
    path: str | Path,
    stats: StreamStats | None = None,
    source_tag: SourceTag = SourceTag.REPLAY,
) -> Iterator[RawPost]:
    """Stream a JSON Lines corpus in file order, line by line.

    Malformed lines are skipped with a warning and counted in ``stats``;
    an unreadable file raises :class:`StreamOpenError`.
    """
    corpus = Path(path)
    try:
        handle = corpus.open("r", encoding="utf-8")
    except OSError as exc:
        raise StreamOpenError(f"cannot open corpus {corpus}: {exc}") from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                raw = raw_post_from_record(record, source_tag)
            except (json.JSONDecodeError, ValueError) as exc:
                if stats is not None:
                    stats.skipped += 1
                logger.warning("skipping malformed line %d of %s: %s", lineno, corpus, exc)
                continue
            yield raw
    if stats is not None and stats.skipped:
        logger.warning("corpus %s: skipped %d malformed line(s)", corpus, stats.skipped)


@runtime_checkable
class RemoteSource(Protocol):
    """A pluggable live source; anything that can yield RawPosts."""

    def posts(self) -> Iterator[RawPost]: ...


@dataclass(frozen=True)
class CannedRemoteSource:
    """Remote-source stub replaying a canned sequence, tagged as remote."""

    records: tuple[RawPost, ...]

    def posts(self) -> Iterator[RawPost]:
        for raw in self.records:
            yield RawPost(
                id=raw.id,
                created_at=raw.created_at,
                author=raw.author,
                text=raw.text,
                coords=raw.coords,
                source_tag=SourceTag.REMOTE,
            )


def _paced(
    posts: Iterable[RawPost],
    speed: float,
    sleep: Callable[[float], None],
) -> Iterator[RawPost]:
    """Delay emission by the inter-record timestamp gap divided by speed."""
    prev: datetime | None = None
    for raw in posts:
        if speed > 0 and prev is not None:
            gap = (raw.created_at - prev).total_seconds()
            if gap > 0:
                sleep(gap / speed)
        prev = raw.created_at
        yield raw


def open_stream(
    source: str | Path | RemoteSource,
    cfg: TrackConfig,
    stats: StreamStats | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> Iterator[RawPost]:
    """Open an ordered RawPost stream restricted to the track config.

    ``source`` is a corpus path, a ``synthetic:<seed>:<n>`` spec, or a
    :class:`RemoteSource`. Records failing :func:`matches_track` are
    dropped and counted in ``stats.filtered``.
    """
    if isinstance(source, (str, Path)) and str(source).startswith("synthetic:"):
        parts = str(source).split(":")
        if len(parts) != 3:
            raise StreamOpenError(f"bad synthetic source spec {source!r}; expected synthetic:<seed>:<n>")
        try:
            base: Iterator[RawPost] = generate_posts(int(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise StreamOpenError(f"bad synthetic source spec {source!r}: {exc}") from exc
    elif isinstance(source, (str, Path)):
        base = replay_corpus(source, stats=stats)
    elif isinstance(source, RemoteSource):
        base = source.posts()
    else:
        raise StreamOpenError(f"unsupported source: {source!r}")

    def _filtered() -> Iterator[RawPost]:
        for raw in _paced(base, cfg.replay_speed, sleep):
            if matches_track(raw, cfg):
                if stats is not None:
                    stats.emitted += 1
                yield raw
            elif stats is not None:
                stats.filtered += 1

    return _filtered()


# --- synthetic feed -------------------------------------------------------

_GEN_PLACES: tuple[tuple[str, float, float], ...] = (
    ("sydney", 151.2093, -33.8688),
    ("north sydney", 151.2072, -33.8389),
    ("blue mountains", 150.3000, -33.7000),
    ("katoomba", 150.3119, -33.7125),
    ("lithgow", 150.1500, -33.4833),
    ("winmalee", 150.6128, -33.6786),
    ("springwood", 150.5658, -33.6992),
    ("newcastle", 151.7817, -32.9283),
    ("wollongong", 150.8931, -34.4278),
    ("melbourne", 144.9631, -37.8136),
    ("ballarat", 143.8503, -37.5622),
    ("bendigo", 144.2794, -36.7570),
    ("brisbane", 153.0251, -27.4698),
    ("ipswich", 152.7608, -27.6144),
    ("lismore", 153.2833, -28.8167),
    ("byron bay", 153.6150, -28.6431),
    ("grafton", 152.9333, -29.6833),
    ("cairns", 145.7781, -16.9186),
    ("townsville", 146.8169, -19.2590),
    ("perth", 115.8613, -31.9523),
    ("adelaide", 138.6007, -34.9285),
    ("hobart", 147.3272, -42.8821),
    ("dubbo", 148.6011, -32.2569),
    ("tamworth", 150.9167, -31.0833),
)

_GEN_TEMPLATES: dict[str, tuple[str, ...]] = {
    "fire": (
        "bushfire burning near {place}",
        "fire crews responding to a blaze at {place}",
        "smoke haze blanketing {place} this morning",
        "emergency warning issued for the {place} fire",
        "water bombing aircraft over {place} #bushfire",
        "fire front approaching homes in {place}",
    ),
    "flood": (
        "flash flooding reported across {place}",
        "river levels rising fast at {place} #flood",
        "roads cut by flooding around {place}",
        "flood evacuation order for low lying parts of {place}",
        "swift water rescue underway in {place}",
    ),
    "storm": (
        "severe storm cell tracking towards {place}",
        "giant hail falling in {place} right now #storm",
        "storm damage to roofs reported in {place}",
        "wild winds and storm warnings for {place}",
        "cyclone watch current for the {place} coast",
    ),
    "earthquake": (
        "earthquake tremor felt across {place}",
        "magnitude report coming for the {place} quake",
        "quake rattled windows in {place} tonight",
        "aftershock tremor recorded near {place}",
    ),
    "medical": (
        "ambulance crews on scene at {place}",
        "several injured after an incident in {place}",
        "paramedics treating a casualty near {place}",
        "ambulance delays reported around {place}",
    ),
}

_GEN_CATEGORY_WORD: dict[str, str] = {
    "fire": "fire",
    "flood": "flood",
    "storm": "storm",
    "earthquake": "earthquake",
    "medical": "ambulance",
}

_GEN_TAILS = ("", "stay safe", "updates to follow", "avoid the area", "more soon", "police on scene")

_GEN_ANGRY = (
    "this is bullshit no warning before the {word} hit {place}",
    "fucking furious the {word} evacuation route out of {place} is closed",
    "wtf is taking so long with help for {place} after the {word}",
    "absolutely pissed the emergency line is busy while the {word} threatens {place}",
    "damn {word} took our street in {place} and nobody came",
)

_GEN_GRATEFUL = (
    "so grateful to the volunteers helping {place} through the {word}",
    "amazing work by emergency crews keeping {place} safe from the {word}",
    "thank you rescue teams in {place} you are heroes",
)

_GEN_SPAM = (
    "click here to win free fire season cover {url}",
    "cheap insurance quote for flood zones dm for promo {url}",
    "work from home and earn during the storm season {url}",
)

_GEN_JOKE = (
    "knock knock who is there bushfire lol",
    "a firefighter walks into a bar after the storm haha",
    "yo mama jokes are hotter than this fire",
)

_GEN_SONG = (
    "now playing firestorm anthem for the fire season {url}",
    "new single out now flood of tears listen on spotify {url}",
    "official music video storm chaser {url}",
)

_GEN_OFFTOPIC = (
    "coffee at the farmers market was lovely",
    "great football result last night",
    "anyone recommend a good pizza spot in town",
    "sunset photos from the harbour tonight",
)

_GEN_NAME_STEMS = (
    "alex", "sam", "jess", "tom", "liam", "noah", "emma", "olivia", "mia", "ruby",
    "jack", "lucas", "harper", "zoe", "leo", "max", "ivy", "ella", "finn", "kate",
    "nate", "tess", "hugo", "lily", "owen", "maya", "cole", "aria", "ryan", "nina",
)


@dataclass
class _Incident:
    category: str
    place: tuple[str, float, float]
    started: datetime


def generate_posts(
    seed: int,
    n: int,
    start: datetime | None = None,
) -> Iterator[RawPost]:
    """Deterministic synthetic feed: incident chatter plus realistic noise.

    The same (seed, n) always yields the identical sequence. Output mixes
    agency and citizen reports around rolling incidents with retweets,
    duplicate floods, angry posts, spam, jokes, songs, and off-topic
    filler that the track filter is expected to drop.
    """
    rng = random.Random(seed)
    t = start if start is not None else datetime(2014, 1, 5, 0, 0, 0, tzinfo=timezone.utc)
    if t.tzinfo is None:
        t = t.replace(tzinfo=timezone.utc)
    incidents: list[_Incident] = []
    recent: list[tuple[str, str]] = []  # (author, text) of recent on-topic posts
    agencies = tuple(sorted(EXAMPLE_AGENCY_ACCOUNTS))

    def pick_author() -> str:
        if rng.random() < 0.25:
            return rng.choice(agencies)
        return rng.choice(_GEN_NAME_STEMS) + str(rng.randint(1, 99))

    for i in range(n):
        t = t + timedelta(seconds=rng.randint(5, 55))
        incidents = [inc for inc in incidents if (t - inc.started) < timedelta(hours=3)]
        if not incidents or rng.random() < 0.02:
            incidents.append(
                _Incident(
                    category=rng.choice(sorted(_GEN_TEMPLATES)),
                    place=rng.choice(_GEN_PLACES),
                    started=t,
                )
            )
        incident = rng.choice(incidents)
        place_name, lon, lat = incident.place
        word = _GEN_CATEGORY_WORD[incident.category]
        author = pick_author()
        coords: tuple[float, float] | None = None
        roll = rng.random()

        if roll < 0.03:
            text = rng.choice(_GEN_SPAM).format(url=f"http://promo.example/{i}")
        elif roll < 0.05:
            text = rng.choice(_GEN_JOKE)
        elif roll < 0.07:
            text = rng.choice(_GEN_SONG).format(url=f"http://tunes.example/{i}")
        elif roll < 0.15:
            text = rng.choice(_GEN_OFFTOPIC)
        elif roll < 0.19:
            text = rng.choice(_GEN_ANGRY).format(word=word, place=place_name)
        elif roll < 0.22:
            text = rng.choice(_GEN_GRATEFUL).format(word=word, place=place_name)
        elif roll < 0.28 and recent:
            src_author, src_text = rng.choice(recent[-40:])
            text = f"RT @{src_author}: {src_text}"
        elif roll < 0.32 and recent:
            # duplicate flood: someone re-sends their own recent text verbatim
            author, text = rng.choice(recent[-15:])
        else:
            template = rng.choice(_GEN_TEMPLATES[incident.category])
            text = template.format(place=place_name)
            tail = rng.choice(_GEN_TAILS)
            if tail:
                text = f"{text} {tail}"
            if rng.random() < 0.10:
                text = f"{text} https://img.example/{i}.jpg"
            if rng.random() < 0.40:
                coords = (
                    round(lon + rng.uniform(-0.05, 0.05), 5),
                    round(lat + rng.uniform(-0.05, 0.05), 5),
                )
            recent.append((author, text))
            if len(recent) > 200:
                del recent[:100]

        yield RawPost(
            id=f"t{i:07d}",
            created_at=t,
            author=author,
            text=text,
            coords=coords,
            source_tag=SourceTag.SYNTHETIC,
        )
