"""Post and event enrichment: gazetteer geotagging, keyword categories,
and lexicon sentiment with explicit anger capture.

Everything here is a pure function over resources loaded once at startup.
The gazetteer matches exact contiguous token spans (longest span wins,
then population); categories come from a priority-ordered keyword map;
sentiment averages lexicon polarities and counts anger-list hits so that
expletive-laden posts are flagged, never suppressed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from act.geo import haversine_km

import json


class Category(str, Enum):
    FIRE = "fire"
    FLOOD = "flood"
    STORM = "storm"
    EARTHQUAKE = "earthquake"
    MEDICAL = "medical"
    OTHER = "other"


CATEGORY_PRIORITY: tuple[Category, ...] = (
    Category.FIRE,
    Category.FLOOD,
    Category.STORM,
    Category.EARTHQUAKE,
    Category.MEDICAL,
)


class CategoryRules:
    """Keyword sets per category, checked in fixed priority order."""

    def __init__(self, keywords: Mapping[Category, Iterable[str]]):
        self.keywords: dict[Category, frozenset[str]] = {
            cat: frozenset(t.lower() for t in keywords.get(cat, ())) for cat in CATEGORY_PRIORITY
        }

    @classmethod
    def from_file(cls, path: str | Path | None = None) -> "CategoryRules":
        if path is None:
            text = importlib_resources.files("act.resources").joinpath("category_rules.json").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        data = json.loads(text)
        return cls({Category(name): terms for name, terms in data.items()})

    def terms_for(self, category: Category) -> frozenset[str]:
        return self.keywords.get(category, frozenset())


def categorize_post(tokens: Sequence[str], rules: CategoryRules) -> Category:
    """First category in priority order with any keyword hit; else ``other``."""
    token_set = set(tokens)
    for cat in CATEGORY_PRIORITY:
        if rules.keywords[cat] & token_set:
            return cat
    return Category.OTHER


def categorize_event(member_categories: Iterable[Category]) -> Category:
    """Plurality vote ignoring ``other`` unless that is all there is."""
    counts: dict[Category, int] = {}
    for cat in member_categories:
        if cat is Category.OTHER:
            continue
        counts[cat] = counts.get(cat, 0) + 1
    if not counts:
        return Category.OTHER
    best = max(counts.values())
    for cat in CATEGORY_PRIORITY:
        if counts.get(cat, 0) == best:
            return cat
    return Category.OTHER


def categorize_event_counts(counts: Mapping[str, int]) -> Category:
    """Same vote computed from incrementally maintained category counts."""
    non_other = {
        Category(name): n for name, n in counts.items() if Category(name) is not Category.OTHER and n > 0
    }
    if not non_other:
        return Category.OTHER
    best = max(non_other.values())
    for cat in CATEGORY_PRIORITY:
        if non_other.get(cat, 0) == best:
            return cat
    return Category.OTHER


@dataclass(frozen=True)
class GazetteerEntry:
    """One known place: lowercase name, coordinates, population, country."""

    name: str
    lon: float
    lat: float
    population: int
    country: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("gazetteer name must be non-empty")
        if not (-180.0 <= self.lon <= 180.0 and -90.0 <= self.lat <= 90.0):
            raise ValueError(f"gazetteer coordinates out of range for {self.name!r}")


class Gazetteer:
    """Exact-span place lookup over a fixed set of entries."""

    def __init__(self, entries: Iterable[GazetteerEntry]):
        self.by_name: dict[str, GazetteerEntry] = {}
        for entry in sorted(entries, key=lambda e: e.name):
            existing = self.by_name.get(entry.name)
            if existing is None or entry.population > existing.population:
                self.by_name[entry.name] = entry
        self.max_span = max((len(name.split()) for name in self.by_name), default=0)

    @classmethod
    def from_csv(cls, path: str | Path | None = None) -> "Gazetteer":
        """Load ``name,lat,lon,population,country`` rows (header required)."""
        if path is None:
            text = importlib_resources.files("act.resources").joinpath("gazetteer.csv").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        entries = []
        for row in csv.DictReader(text.splitlines()):
            entries.append(
                GazetteerEntry(
                    name=row["name"].strip().lower(),
                    lat=float(row["lat"]),
                    lon=float(row["lon"]),
                    population=int(row["population"]),
                    country=row["country"].strip().lower(),
                )
            )
        return cls(entries)

    def get(self, name: str) -> GazetteerEntry | None:
        return self.by_name.get(name)

    def nearest(self, lon: float, lat: float, max_km: float) -> GazetteerEntry | None:
        """Closest entry within ``max_km``, or None. Ties keep the first
        name in sorted order."""
        best: GazetteerEntry | None = None
        best_km = max_km
        for name in sorted(self.by_name):
            entry = self.by_name[name]
            km = haversine_km(lon, lat, entry.lon, entry.lat)
            if km < best_km or (km == best_km and best is None):
                best = entry
                best_km = km
        return best


@dataclass(frozen=True)
class GeoTag:
    """A resolved place reference: name, coordinates, confidence in (0, 1]."""

    place_name: str
    lon: float
    lat: float
    confidence: float

    def __post_init__(self) -> None:
        if not (0.0 < self.confidence <= 1.0):
            raise ValueError(f"confidence must be in (0, 1]: {self.confidence}")

    def to_dict(self) -> dict:
        return {
            "place_name": self.place_name,
            "lon": self.lon,
            "lat": self.lat,
            "confidence": self.confidence,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "GeoTag":
        return cls(
            place_name=data["place_name"],
            lon=float(data["lon"]),
            lat=float(data["lat"]),
            confidence=float(data["confidence"]),
        )


def _span_confidence(span_len: int) -> float:
    return min(1.0, span_len / min(4, span_len + 1))


def geotag_text(tokens: Sequence[str], gazetteer: Gazetteer) -> GeoTag | None:
    """Find the best gazetteer match over contiguous token spans.

    Longest span wins; equal-length matches prefer higher population,
    then the earlier span start, then the lexicographically smaller name.
    Confidence grows with span length and caps at 1.
    """
    if not tokens or gazetteer.max_span == 0:
        return None
    max_len = min(gazetteer.max_span, len(tokens))
    for span_len in range(max_len, 0, -1):
        matches: list[tuple[int, GazetteerEntry]] = []
        for start in range(0, len(tokens) - span_len + 1):
            name = " ".join(tokens[start : start + span_len])
            entry = gazetteer.get(name)
            if entry is not None:
                matches.append((start, entry))
        if matches:
            matches.sort(key=lambda m: (-m[1].population, m[0], m[1].name))
            entry = matches[0][1]
            return GeoTag(
                place_name=entry.name,
                lon=entry.lon,
                lat=entry.lat,
                confidence=_span_confidence(span_len),
            )
    return None


@dataclass(frozen=True)
class LocationCandidate:
    """One vote towards an event's location, from text or native coords."""

    place_name: str
    lon: float
    lat: float
    confidence: float
    population: int

    def to_dict(self) -> dict:
        return {
            "place_name": self.place_name,
            "lon": self.lon,
            "lat": self.lat,
            "confidence": self.confidence,
            "population": self.population,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "LocationCandidate":
        return cls(
            place_name=data["place_name"],
            lon=float(data["lon"]),
            lat=float(data["lat"]),
            confidence=float(data["confidence"]),
            population=int(data["population"]),
        )


SNAP_RADIUS_KM = 50.0


def candidate_from_geotag(tag: GeoTag, gazetteer: Gazetteer) -> LocationCandidate:
    entry = gazetteer.get(tag.place_name)
    return LocationCandidate(
        place_name=tag.place_name,
        lon=tag.lon,
        lat=tag.lat,
        confidence=tag.confidence,
        population=entry.population if entry else 0,
    )


def candidate_from_coords(
    lon: float, lat: float, gazetteer: Gazetteer
) -> LocationCandidate:
    """Snap native coordinates to the nearest place within 50 km, else keep
    the raw point under a synthetic name."""
    entry = gazetteer.nearest(lon, lat, SNAP_RADIUS_KM)
    if entry is not None:
        return LocationCandidate(
            place_name=entry.name,
            lon=entry.lon,
            lat=entry.lat,
            confidence=1.0,
            population=entry.population,
        )
    return LocationCandidate(
        place_name=f"{lat:.4f},{lon:.4f}",
        lon=lon,
        lat=lat,
        confidence=1.0,
        population=0,
    )


def resolve_event_location(candidates: Sequence[LocationCandidate]) -> GeoTag | None:
    """Pick the modal place among the candidates.

    Ties break by higher summed confidence, then population, then name.
    The result's confidence is the winning group's mean confidence.
    """
    if not candidates:
        return None
    groups: dict[str, list[LocationCandidate]] = {}
    for cand in candidates:
        groups.setdefault(cand.place_name, []).append(cand)

    def rank(name: str) -> tuple:
        group = groups[name]
        total_conf = sum(c.confidence for c in group)
        population = max(c.population for c in group)
        return (-len(group), -total_conf, -population, name)

    winner = min(groups, key=rank)
    group = groups[winner]
    return GeoTag(
        place_name=winner,
        lon=group[0].lon,
        lat=group[0].lat,
        confidence=sum(c.confidence for c in group) / len(group),
    )


@dataclass(frozen=True)
class SentimentScore:
    """Per-post sentiment: mean matched polarity plus anger hits."""

    polarity: float
    anger_hits: int
    is_angry: bool

    def __post_init__(self) -> None:
        if not (-1.0 <= self.polarity <= 1.0):
            raise ValueError(f"polarity out of range: {self.polarity}")
        if self.is_angry != (self.anger_hits >= 1):
            raise ValueError("is_angry must mirror anger_hits >= 1")

    def to_dict(self) -> dict:
        return {"polarity": self.polarity, "anger_hits": self.anger_hits, "is_angry": self.is_angry}

    @classmethod
    def from_dict(cls, data: Mapping) -> "SentimentScore":
        return cls(
            polarity=float(data["polarity"]),
            anger_hits=int(data["anger_hits"]),
            is_angry=bool(data["is_angry"]),
        )


NEUTRAL_SCORE = SentimentScore(polarity=0.0, anger_hits=0, is_angry=False)


class SentimentLexicon:
    """Term polarities in [-1, 1] plus a separate anger/expletive list."""

    def __init__(self, polarities: Mapping[str, float], anger_terms: Iterable[str]):
        self.polarities = {t.lower(): float(p) for t, p in polarities.items()}
        for term, pol in self.polarities.items():
            if not (-1.0 <= pol <= 1.0):
                raise ValueError(f"polarity out of range for {term!r}: {pol}")
        self.anger_terms = frozenset(t.lower() for t in anger_terms)

    @classmethod
    def from_files(
        cls,
        lexicon_path: str | Path | None = None,
        anger_path: str | Path | None = None,
    ) -> "SentimentLexicon":
        """Load ``term,polarity`` CSV and a one-term-per-line anger list."""
        if lexicon_path is None:
            lex_text = importlib_resources.files("act.resources").joinpath("sentiment_lexicon.csv").read_text("utf-8")
        else:
            lex_text = Path(lexicon_path).read_text("utf-8")
        polarities = {}
        for row in csv.DictReader(lex_text.splitlines()):
            polarities[row["term"].strip().lower()] = float(row["polarity"])
        if anger_path is None:
            anger_text = importlib_resources.files("act.resources").joinpath("anger_terms.txt").read_text("utf-8")
        else:
            anger_text = Path(anger_path).read_text("utf-8")
        anger = [line.strip() for line in anger_text.splitlines() if line.strip()]
        return cls(polarities, anger)


def score_post(tokens: Sequence[str], lexicon: SentimentLexicon) -> SentimentScore:
    """Mean polarity over matched token occurrences; anger hits counted
    per occurrence. No matches mean neutral."""
    matched = [lexicon.polarities[t] for t in tokens if t in lexicon.polarities]
    polarity = sum(matched) / len(matched) if matched else 0.0
    anger_hits = sum(1 for t in tokens if t in lexicon.anger_terms)
    return SentimentScore(polarity=polarity, anger_hits=anger_hits, is_angry=anger_hits >= 1)


@dataclass(frozen=True)
class EventSentiment:
    """Event-level aggregate: mean polarity, angry member share, flag."""

    mean_polarity: float
    angry_fraction: float
    flagged_angry: bool

    def to_dict(self) -> dict:
        return {
            "mean_polarity": self.mean_polarity,
            "angry_fraction": self.angry_fraction,
            "flagged_angry": self.flagged_angry,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "EventSentiment":
        return cls(
            mean_polarity=float(data["mean_polarity"]),
            angry_fraction=float(data["angry_fraction"]),
            flagged_angry=bool(data["flagged_angry"]),
        )


DEFAULT_ANGER_THRESHOLD = 0.2


def aggregate_event_sentiment(
    scores: Sequence[SentimentScore],
    anger_threshold: float = DEFAULT_ANGER_THRESHOLD,
) -> EventSentiment:
    """Aggregate member scores; flags the event when the angry share
    reaches the threshold."""
    if not scores:
        raise ValueError("cannot aggregate sentiment over zero members")
    mean = sum(s.polarity for s in scores) / len(scores)
    angry = sum(1 for s in scores if s.is_angry)
    fraction = angry / len(scores)
    return EventSentiment(
        mean_polarity=mean,
        angry_fraction=fraction,
        flagged_angry=fraction >= anger_threshold,
    )


def sentiment_from_sums(
    polarity_sum: float,
    angry_count: int,
    members: int,
    anger_threshold: float = DEFAULT_ANGER_THRESHOLD,
) -> EventSentiment:
    """Same aggregate computed from incrementally maintained sums."""
    if members <= 0:
        raise ValueError("cannot aggregate sentiment over zero members")
    fraction = angry_count / members
    return EventSentiment(
        mean_polarity=polarity_sum / members,
        angry_fraction=fraction,
        flagged_angry=fraction >= anger_threshold,
    )
