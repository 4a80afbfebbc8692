#!/usr/bin/env python3
"""Regenerate the bundled demo corpora under data/.

Both outputs are deterministic: the post corpus comes straight from the
seeded synthetic feed, and the media corpus is derived here with its own
fixed seed. Run from the repo root after changing the generator.
"""

from __future__ import annotations

import json
import random
from datetime import timedelta
from pathlib import Path

from act.ingest import generate_posts, raw_post_to_record
from act.timeutil import format_utc

CORPUS_SEED = 1405
CORPUS_SIZE = 5000
MEDIA_SEED = 2718
MEDIA_SIZE = 400

PLACES = (
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
    ("brisbane", 153.0251, -27.4698),
    ("lismore", 153.2833, -28.8167),
    ("byron bay", 153.6150, -28.6431),
    ("cairns", 145.7781, -16.9186),
    ("townsville", 146.8169, -19.2590),
    ("perth", 115.8613, -31.9523),
    ("adelaide", 138.6007, -34.9285),
)

CAPTIONS = (
    "smoke column rising over {place}",
    "fire front seen from the highway near {place}",
    "bushfire glow above {place} tonight",
    "flood water covering the main street of {place}",
    "swollen river at {place} after the rain",
    "storm clouds rolling into {place}",
    "hail on the ground in {place}",
    "ambulance staging area at {place}",
    "evacuation centre filling up in {place}",
    "emergency crews working in {place}",
    "damage to rooftops across {place}",
    "road closed by debris outside {place}",
)


def main() -> None:
    data_dir = Path(__file__).resolve().parent.parent / "data"
    data_dir.mkdir(exist_ok=True)

    corpus_path = data_dir / "corpus_5k.jsonl"
    posts = list(generate_posts(seed=CORPUS_SEED, n=CORPUS_SIZE))
    with corpus_path.open("w", encoding="utf-8") as handle:
        for post in posts:
            handle.write(json.dumps(raw_post_to_record(post), ensure_ascii=False) + "\n")
    print(f"wrote {len(posts)} posts to {corpus_path}")

    span_start = posts[0].created_at
    span_seconds = (posts[-1].created_at - span_start).total_seconds()
    rng = random.Random(MEDIA_SEED)
    media_path = data_dir / "media_corpus.jsonl"
    with media_path.open("w", encoding="utf-8") as handle:
        for i in range(MEDIA_SIZE):
            name, lon, lat = rng.choice(PLACES)
            created = span_start + timedelta(seconds=rng.uniform(0.0, span_seconds))
            record = {
                "id": f"img{i:05d}",
                "url": f"https://img.example/img{i:05d}.jpg",
                "caption": rng.choice(CAPTIONS).format(place=name),
                "created_at": format_utc(created),
            }
            if rng.random() < 0.6:
                record["coordinates"] = [
                    round(lon + rng.uniform(-0.05, 0.05), 5),
                    round(lat + rng.uniform(-0.05, 0.05), 5),
                ]
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"wrote {MEDIA_SIZE} media items to {media_path}")


if __name__ == "__main__":
    main()
