"""Tokenization, entity extraction, and rule-driven noise filtering.

Raw posts become :class:`Post` records here: lowercased tokens with
stopwords removed, hashtags/mentions/URLs pulled out, the repost marker
detected, and a noise verdict (spam, joke, song, empty, duplicate flood)
attached so junk never reaches clustering. Profanity is deliberately not
a drop reason: angry posts carry operational signal and must survive.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from importlib import resources as importlib_resources
from pathlib import Path
from typing import TYPE_CHECKING, Mapping

from act.timeutil import format_utc, parse_utc

if TYPE_CHECKING:
    from act.ingest import RawPost

_URL_RE = re.compile(r"https?://\S+", re.IGNORECASE)
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)
_HASHTAG_RE = re.compile(r"#([^\W_]+)", re.UNICODE)
_MENTION_RE = re.compile(r"@([^\W_]+)", re.UNICODE)
_RETWEET_RE = re.compile(r"^rt\s+@([^\W_]+)", re.IGNORECASE | re.UNICODE)
_WS_RE = re.compile(r"\s+")

_MIN_TOKEN_LEN = 2


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a one-term-per-line stopword list; ``None`` loads the shipped list."""
    if path is None:
        text = importlib_resources.files("act.resources").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


STOPWORDS: frozenset[str] = load_stopwords()


def raw_tokens(text: str) -> list[str]:
    """Tokenize without stopword removal.

    URLs are stripped first, then the text splits on non-alphanumerics
    (hashtag and mention prefixes fall away, their bodies remain), tokens
    are lowercased, and anything shorter than two characters is dropped.
    """
    without_urls = _URL_RE.sub(" ", text)
    return [t.lower() for t in _WORD_RE.findall(without_urls) if len(t) >= _MIN_TOKEN_LEN]


def tokenize(text: str, stopwords: frozenset[str] = STOPWORDS) -> list[str]:
    """Tokenize for matching and clustering: `raw_tokens` minus stopwords."""
    return [t for t in raw_tokens(text) if t not in stopwords]


def normalize_text(text: str) -> str:
    """Lowercase, URL-stripped, whitespace-collapsed form of a post text."""
    return _WS_RE.sub(" ", _URL_RE.sub(" ", text).lower()).strip()


@dataclass(frozen=True)
class Entities:
    """Hashtags, mentions, URLs and the repost marker found in one text."""

    hashtags: tuple[str, ...]
    mentions: tuple[str, ...]
    urls: tuple[str, ...]
    is_retweet: bool
    retweet_of: str | None


def extract_entities(text: str) -> Entities:
    """Pull hashtags, mentions, URLs and the leading ``RT @user`` marker."""
    urls = tuple(_URL_RE.findall(text))
    without_urls = _URL_RE.sub(" ", text)
    hashtags = tuple(h.lower() for h in _HASHTAG_RE.findall(without_urls))
    mentions = tuple(m.lower() for m in _MENTION_RE.findall(without_urls))
    rt = _RETWEET_RE.match(text.strip())
    if rt:
        return Entities(hashtags, mentions, urls, True, rt.group(1).lower())
    return Entities(hashtags, mentions, urls, False, None)


@dataclass(frozen=True)
class Post:
    """A parsed, tokenized, entity-extracted post."""

    id: str
    created_at: datetime
    author: str
    text: str
    norm_text: str
    tokens: tuple[str, ...]
    hashtags: tuple[str, ...]
    mentions: tuple[str, ...]
    urls: tuple[str, ...]
    is_retweet: bool
    retweet_of: str | None
    coords: tuple[float, float] | None
    is_agency: bool

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "created_at": format_utc(self.created_at),
            "author": self.author,
            "text": self.text,
            "norm_text": self.norm_text,
            "tokens": list(self.tokens),
            "hashtags": list(self.hashtags),
            "mentions": list(self.mentions),
            "urls": list(self.urls),
            "is_retweet": self.is_retweet,
            "retweet_of": self.retweet_of,
            "coords": list(self.coords) if self.coords is not None else None,
            "is_agency": self.is_agency,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Post":
        coords = data.get("coords")
        return cls(
            id=data["id"],
            created_at=parse_utc(data["created_at"]),
            author=data["author"],
            text=data["text"],
            norm_text=data["norm_text"],
            tokens=tuple(data["tokens"]),
            hashtags=tuple(data["hashtags"]),
            mentions=tuple(data["mentions"]),
            urls=tuple(data["urls"]),
            is_retweet=data["is_retweet"],
            retweet_of=data.get("retweet_of"),
            coords=(coords[0], coords[1]) if coords is not None else None,
            is_agency=data["is_agency"],
        )


def parse_post(raw: "RawPost", agency_accounts: frozenset[str] = frozenset()) -> Post:
    """Build a :class:`Post` from a raw record.

    ``agency_accounts`` must already be lowercased; it marks posts from
    tracked official sources.
    """
    entities = extract_entities(raw.text)
    return Post(
        id=raw.id,
        created_at=raw.created_at,
        author=raw.author,
        text=raw.text,
        norm_text=normalize_text(raw.text),
        tokens=tuple(tokenize(raw.text)),
        hashtags=entities.hashtags,
        mentions=entities.mentions,
        urls=entities.urls,
        is_retweet=entities.is_retweet,
        retweet_of=entities.retweet_of,
        coords=raw.coords,
        is_agency=raw.author.lower() in agency_accounts,
    )


class NoiseReason(str, Enum):
    SPAM = "spam"
    JOKE = "joke"
    SONG = "song"
    EMPTY = "empty"
    DUPLICATE_FLOOD = "duplicate_flood"
    NONE = "none"


@dataclass(frozen=True)
class NoiseVerdict:
    """Keep/drop decision for one post; ``keep`` is true iff reason is none."""

    keep: bool
    reason: NoiseReason

    def __post_init__(self) -> None:
        if self.keep != (self.reason is NoiseReason.NONE):
            raise ValueError("keep must be true exactly when reason is 'none'")


KEEP = NoiseVerdict(True, NoiseReason.NONE)


def _drop(reason: NoiseReason) -> NoiseVerdict:
    return NoiseVerdict(False, reason)


@dataclass(frozen=True)
class NoiseRules:
    """Data-driven noise patterns: phrase lists per reason plus thresholds."""

    spam: tuple[str, ...] = ()
    joke: tuple[str, ...] = ()
    song: tuple[str, ...] = ()
    max_urls: int = 3
    flood_window_secs: int = 600

    @classmethod
    def from_file(cls, path: str | Path | None = None) -> "NoiseRules":
        """Load rules from a JSON file; ``None`` loads the shipped defaults."""
        if path is None:
            text = importlib_resources.files("act.resources").joinpath("noise_rules.json").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        data = json.loads(text)
        return cls(
            spam=tuple(p.lower() for p in data.get("spam", [])),
            joke=tuple(p.lower() for p in data.get("joke", [])),
            song=tuple(p.lower() for p in data.get("song", [])),
            max_urls=int(data.get("max_urls", 3)),
            flood_window_secs=int(data.get("flood_window_secs", 600)),
        )


def classify_noise(
    post: Post,
    rules: NoiseRules,
    seen: Mapping[tuple[str, str], datetime],
) -> NoiseVerdict:
    """Classify one post against the noise rules.

    ``seen`` maps (author, norm_text) to the timestamp that pair was last
    observed; the caller owns that state. The function is pure given its
    arguments. Checks run in a fixed order: empty, spam, joke, song,
    duplicate flood.
    """
    if not post.tokens:
        return _drop(NoiseReason.EMPTY)
    if len(post.urls) > rules.max_urls:
        return _drop(NoiseReason.SPAM)
    for phrase in rules.spam:
        if phrase in post.norm_text:
            return _drop(NoiseReason.SPAM)
    for phrase in rules.joke:
        if phrase in post.norm_text:
            return _drop(NoiseReason.JOKE)
    for phrase in rules.song:
        if phrase in post.norm_text:
            return _drop(NoiseReason.SONG)
    last = seen.get((post.author, post.norm_text))
    if last is not None:
        gap = abs((post.created_at - last).total_seconds())
        if gap <= rules.flood_window_secs:
            return _drop(NoiseReason.DUPLICATE_FLOOD)
    return KEEP


class NoiseFilter:
    """Stateful wrapper around :func:`classify_noise`.

    Owns the (author, norm_text) last-seen map used for duplicate-flood
    detection. Single-threaded by design: the pipeline thread is the only
    writer.
    """

    def __init__(self, rules: NoiseRules):
        self.rules = rules
        self._seen: dict[tuple[str, str], datetime] = {}

    def classify(self, post: Post) -> NoiseVerdict:
        verdict = classify_noise(post, self.rules, self._seen)
        self._seen[(post.author, post.norm_text)] = post.created_at
        return verdict

    def prune(self, now: datetime) -> None:
        """Drop seen entries older than the flood window; bounds memory."""
        horizon = now - timedelta(seconds=self.rules.flood_window_secs)
        stale = [k for k, ts in self._seen.items() if ts < horizon]
        for key in stale:
            del self._seen[key]
