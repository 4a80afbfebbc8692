"""Acceptance suite: one test per release criterion.

Each test prints a PASS/FAIL line (run with ``pytest -s`` to see them all
live). Everything is checked against an independent oracle or a stated
tolerance; clustering, filtering, and word-cloud checks demand exact
agreement.
"""

from __future__ import annotations

import json
import math
import os
import random
import signal
import subprocess
import sys
import time
from contextlib import contextmanager
from datetime import timedelta
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from act.cluster import ClusterState
from act.config import load_config
from act.ingest import TrackConfig, generate_posts, matches_track, open_stream
from act.media import MediaIndex, MediaItem, Origin, build_media_query, find_media, score_item
from act.parse import NoiseFilter, NoiseRules, parse_post
from act.service import ServiceRuntime, create_app
from act.store import FilterQuery, load_records, query_events
from act.views import event_content, event_summaries, terms_payload
from helpers import T0, post, random_filter_query, raw, simple_event, ts, write_corpus
from oracles import (
    brute_force_assignments,
    media_score_by_hand,
    naive_query_events,
    recount_terms,
)

REPO = Path(__file__).resolve().parent.parent
CONFIG = REPO / "data" / "config.toml"
CORPUS = REPO / "data" / "corpus_5k.jsonl"


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL", flush=True)
        raise
    print(f"ACCEPTANCE {name}: PASS", flush=True)


@pytest.fixture(scope="module")
def bundled_runtime() -> ServiceRuntime:
    """The bundled 5,000-post corpus replayed through the full pipeline."""
    cfg = load_config(CONFIG)
    runtime = ServiceRuntime.build(cfg)
    stream = open_stream(cfg.paths.corpus, cfg.track, stats=runtime.stream_stats)
    runtime.pipeline.run(stream)
    return runtime


@pytest.fixture(scope="module")
def bundled_client(bundled_runtime) -> TestClient:
    return TestClient(create_app(bundled_runtime))


def test_criterion_replay_determinism():
    """Two batch replays of the bundled corpus produce byte-identical
    exports, each within the runtime budget."""
    with criterion("replay-determinism"):
        cmd = [
            sys.executable,
            "-m",
            "act.cli",
            "replay",
            "--config",
            str(CONFIG),
            "--input",
            str(CORPUS),
            "--no-serve",
        ]
        outputs = []
        for _ in range(2):
            started = time.monotonic()
            proc = subprocess.run(cmd, capture_output=True, cwd=REPO, timeout=120)
            elapsed = time.monotonic() - started
            assert proc.returncode == 0, proc.stderr.decode()
            assert elapsed < 60.0, f"replay took {elapsed:.1f}s"
            outputs.append(proc.stdout)
        assert outputs[0] == outputs[1]
        payload = json.loads(outputs[0])
        assert payload["posts_ingested"] > 4000
        assert payload["events_count"] > 10


def _kept(posts_iter, cfg=None):
    cfg = cfg or TrackConfig()
    noise = NoiseFilter(NoiseRules.from_file())
    kept = []
    for raw_post in posts_iter:
        if not matches_track(raw_post, cfg):
            continue
        parsed = parse_post(raw_post)
        if noise.classify(parsed).keep:
            kept.append(parsed)
    return kept


def _adversarial_fixtures() -> list[list]:
    """Hand-built corpora aimed at tie-breaking and window edges."""
    fixtures = []

    # near-duplicates: one token differs between bursts
    near = []
    for i in range(60):
        body = "bushfire front near springwood ridge" if i % 2 else "bushfire front near springwood creek"
        near.append(post(f"nd{i:03d}", body, minutes=i * 2.0, author=f"a{i}"))
    fixtures.append(near)

    # exact duplicates from distinct authors (flood filter does not apply)
    dup = [post(f"dup{i:03d}", "flood water over the bridge", minutes=i * 3.0, author=f"u{i}") for i in range(40)]
    fixtures.append(dup)

    # symmetric tie: third post shares exactly one token with each event
    tie = [
        post("tie1", "alpha beta", minutes=0),
        post("tie2", "gamma delta", minutes=1),
        post("tie3", "alpha gamma", minutes=2),
        post("tie4", "beta delta", minutes=3),
        post("tie5", "alpha delta", minutes=4),
    ]
    fixtures.append(tie)

    # window straddlers: same text repeating just inside/outside the window
    straddle = []
    for i in range(10):
        straddle.append(post(f"w{i}", "storm cell over harbour", minutes=i * 6 * 60 * 0.99, author=f"w{i}"))
    fixtures.append(straddle)

    # threshold grazing: token overlap shrinks post by post
    graze = []
    base = ["quake", "tremor", "felt", "across", "town", "tonight"]
    for i in range(1, len(base) + 1):
        text = " ".join(base[:i] + [f"extra{i}"])
        graze.append(post(f"g{i}", text, minutes=float(i), author=f"g{i}"))
    fixtures.append(graze)

    # interleaved incidents with shared vocabulary
    mix = []
    for i in range(80):
        if i % 3 == 0:
            body = f"fire crews holding the line at katoomba sector {i % 5}"
        elif i % 3 == 1:
            body = f"fire threat easing near lithgow sector {i % 7}"
        else:
            body = f"flood watch current for lismore river gauge {i % 4}"
        mix.append(post(f"mix{i:03d}", body, minutes=i * 1.5, author=f"m{i}"))
    fixtures.append(mix)

    # out-of-order arrivals: timestamps jump backwards within the window
    shuffle_minutes = [0, 30, 10, 45, 5, 60, 20, 90, 15, 120, 80, 50]
    disorder = [
        post(f"oo{i}", "hail damage reported across bendigo", minutes=m, author=f"o{i}")
        for i, m in enumerate(shuffle_minutes)
    ]
    fixtures.append(disorder)

    return fixtures


def test_criterion_clustering_oracle_equivalence():
    """Incremental assignment equals the from-scratch reference on every
    fixture, assignment for assignment."""
    with criterion("clustering-oracle-equivalence"):
        fixtures = _adversarial_fixtures()
        for seed, size in ((3, 260), (11, 380), (23, 500), (47, 180), (89, 420)):
            fixtures.append(_kept(generate_posts(seed=seed, n=size * 2))[:size])
        assert len(fixtures) >= 10
        for i, posts in enumerate(fixtures):
            assert len(posts) <= 500
            state = ClusterState()
            incremental = [state.assign(p) for p in posts]
            expected, oracle_events = brute_force_assignments(posts)
            assert incremental == expected, f"fixture {i} diverged"
            got_members = {e.id: e.member_ids for e in state.events.values()}
            want_members = {e.id: e.member_ids for e in oracle_events}
            assert got_members == want_members, f"fixture {i} memberships diverged"


def test_criterion_unique_text_rule(bundled_runtime):
    """No event content view repeats a normalized text, verified by full
    scan of the bundled replay."""
    with criterion("unique-text-rule"):
        snapshot = bundled_runtime.snapshot()
        assert snapshot.events
        for event in snapshot.events.values():
            member_texts = [snapshot.posts_by_id[m].norm_text for m in event.member_ids]
            assert set(member_texts) == event.unique_texts
            entries = event_content(snapshot, event)
            norm_seen = [snapshot.posts_by_id[e["id"]].norm_text for e in entries]
            assert len(norm_seen) == len(set(norm_seen))
            assert len(entries) == len(event.unique_texts)


def test_criterion_geotag_toggle_contract(bundled_runtime):
    """query_events equals the naive full-scan oracle for 1,000 randomized
    queries, including bbox suppression when geotagged=false."""
    with criterion("geotag-toggle-contract"):
        snapshot = bundled_runtime.snapshot()
        events = list(snapshot.events.values())
        terms = sorted({t for e in events for t in e.term_counts})
        rng = random.Random(1337)
        mismatches = 0
        bbox_ignored_seen = 0
        for _ in range(1000):
            q = random_filter_query(rng, terms)
            got = [e.id for e in query_events(q, events)]
            want = [e.id for e in naive_query_events(q, events)]
            if got != want:
                mismatches += 1
            if q.geotagged is False and q.bbox is not None:
                bbox_ignored_seen += 1
                assert all(snapshot.events[eid].location is None for eid in got)
        assert mismatches == 0
        assert bbox_ignored_seen > 50


def test_criterion_word_cloud_correctness(bundled_runtime, bundled_client):
    """/terms equals an independent recount over member posts for 100
    random selections: counts, order, and ties."""
    with criterion("word-cloud-correctness"):
        snapshot = bundled_runtime.snapshot()
        events = list(snapshot.events.values())
        terms = sorted({t for e in events for t in e.term_counts})
        rng = random.Random(4096)
        for _ in range(100):
            q = random_filter_query(rng, terms)
            k = rng.choice([5, 20, 50])
            params = {"k": str(k), "limit": str(q.limit)}
            if q.bbox:
                params["bbox"] = ",".join(str(v) for v in q.bbox)
            if q.categories:
                params["category"] = ",".join(sorted(c.value for c in q.categories))
            if q.keyword:
                params["q"] = q.keyword
            if q.since:
                params["since"] = q.since.isoformat().replace("+00:00", "Z")
            if q.until:
                params["until"] = q.until.isoformat().replace("+00:00", "Z")
            if q.geotagged is not None:
                params["geotagged"] = "true" if q.geotagged else "false"
            body = bundled_client.get("/terms", params=params).json()
            expected = recount_terms(events, snapshot.posts_by_id, q, k)
            assert [(t["term"], t["weight"]) for t in body] == expected


def test_criterion_anger_preservation():
    """Expletive anger posts are never dropped, score as angry, and event
    flags match a threshold recount."""
    with criterion("anger-preservation"):
        angry_bodies = [
            "this fucking fire response is bullshit in sector {i}",
            "wtf no damn warning again for the fire in sector {i}",
            "absolutely pissed the fire line moved and nobody told sector {i}",
            "furious at this useless fire briefing for sector {i}",
            "ffs the fire road out of sector {i} is shut again",
        ]
        raws = []
        for i in range(50):
            body = angry_bodies[i % len(angry_bodies)].format(i=i)
            raws.append(raw(f"angry{i:03d}", body, minutes=float(i * 2), author=f"resident{i}"))
        for i in range(30):
            raws.append(
                raw(f"calm{i:03d}", f"fire update for sector {i} crews on scene", minutes=float(i * 2 + 1), author=f"obs{i}")
            )
        raws.sort(key=lambda r: r.created_at)

        from act.config import ApiConfig
        from act.pipeline import Pipeline, Resources

        cfg = ApiConfig()
        pipeline = Pipeline(cfg, Resources.load(cfg))
        for raw_post in raws:
            assert matches_track(raw_post, cfg.track)
            pipeline.process(raw_post)
        snapshot = pipeline.finalize()

        angry_ids = {f"angry{i:03d}" for i in range(50)}
        kept_ids = {p.id for p in snapshot.posts}
        assert angry_ids <= kept_ids, "an anger post was dropped as noise"
        for pid in sorted(angry_ids):
            assert snapshot.annotations[pid].sentiment.is_angry

        for event in snapshot.events.values():
            angry_members = sum(
                1 for m in event.member_ids if snapshot.annotations[m].sentiment.is_angry
            )
            fraction = angry_members / len(event.member_ids)
            assert event.sentiment.angry_fraction == pytest.approx(fraction, abs=1e-12)
            assert event.sentiment.flagged_angry == (fraction >= 0.2)


CRASH_CHILD = r"""
import sys
from act.store import LogWriter

root = sys.argv[1]
log = LogWriter(root, fsync=True)
for i in range(100000):
    seq = log.append("post", {"n": i, "pad": "x" * 64})
    sys.stdout.write(f"{seq}\n")
    sys.stdout.flush()
"""


def test_criterion_store_crash_safety(tmp_path):
    """A SIGKILL mid-append loses at most the torn trailing record; every
    acknowledged record survives reload. A byte-torn tail is truncated."""
    with criterion("store-crash-safety"):
        root = tmp_path / "crash-store"
        proc = subprocess.Popen(
            [sys.executable, "-c", CRASH_CHILD, str(root)],
            stdout=subprocess.PIPE,
            cwd=REPO,
        )
        acked = 0
        assert proc.stdout is not None
        for line in proc.stdout:
            acked = int(line)
            if acked >= 500:
                os.kill(proc.pid, signal.SIGKILL)
                break
        proc.wait(timeout=30)
        # drain whatever was acked after the kill signal landed
        for line in proc.stdout:
            try:
                acked = max(acked, int(line))
            except ValueError:
                break

        result = load_records(root)
        loaded = [r.seq for r in result.records]
        assert loaded == list(range(1, len(loaded) + 1))
        assert len(loaded) >= acked, f"acked seq {acked} missing after reload ({len(loaded)} loaded)"
        assert len(result.warnings) <= 1

        # deterministic byte-torn tail: exactly the final record is lost
        root2 = tmp_path / "torn-store"
        from act.store import LogWriter

        with LogWriter(root2, fsync=False) as log:
            for i in range(100):
                log.append("post", {"n": i})
        seg = root2 / "segments" / "000001.log"
        seg.write_bytes(seg.read_bytes()[:-5])
        result2 = load_records(root2)
        assert [r.seq for r in result2.records] == list(range(1, 100))
        assert len(result2.warnings) == 1


def test_criterion_media_ranking():
    """Scores match the hand-evaluated formula to 1e-9 on 20 constructed
    pairs; window exclusion is absolute."""
    with criterion("media-ranking"):
        event = simple_event(
            "ev-m",
            first_minutes=0,
            last_minutes=120,
            term_counts={"bushfire": 6, "ridge": 4, "smoke": 3, "crews": 2, "sydney": 2, "noise": 1},
        )
        from act.annotate import GeoTag

        event.location = GeoTag("sydney", 151.2093, -33.8688, 1.0)
        category_terms = frozenset({"fire", "bushfire", "blaze", "smoke"})
        query = build_media_query(event, category_terms)
        span = (event.first_seen, event.last_seen)

        rng = random.Random(55)
        vocab = ["bushfire", "ridge", "smoke", "crews", "sydney", "flood", "storm", "café", "road"]
        pairs = []
        for i in range(20):
            tokens = tuple(rng.sample(vocab, rng.randint(0, 6)))
            coords = None
            if rng.random() < 0.6:
                coords = (151.2093 + rng.uniform(-1.0, 1.0), -33.8688 + rng.uniform(-1.0, 1.0))
            minutes = rng.uniform(-11.9 * 60, 120 + 11.9 * 60)
            pairs.append(
                MediaItem(
                    id=f"mi{i:02d}",
                    url_or_path=f"https://img.example/mi{i:02d}.jpg",
                    caption_tokens=tokens,
                    coords=coords,
                    created_at=T0 + timedelta(minutes=minutes),
                    origin=Origin.LOCAL_CORPUS,
                )
            )
        for item in pairs:
            got = score_item(item, query, span)
            want = media_score_by_hand(
                set(item.caption_tokens),
                set(query.terms),
                item.coords,
                query.center,
                item.created_at,
                span,
            )
            assert got == pytest.approx(want, abs=1e-9)
            assert 0.0 <= got <= 1.0

        # absolute window exclusion: a perfect-content item outside the
        # padded window never appears
        outside = MediaItem(
            id="outside",
            url_or_path="https://img.example/outside.jpg",
            caption_tokens=tuple(sorted(query.terms)),
            coords=(151.2093, -33.8688),
            created_at=event.last_seen + timedelta(hours=12, seconds=1),
            origin=Origin.LOCAL_CORPUS,
        )
        index = MediaIndex(list(pairs) + [outside])
        ranked = find_media(event, index, [], category_terms, k=50)
        assert all(rm.item.id != "outside" for rm in ranked)
        lo, hi = event.first_seen - timedelta(hours=12), event.last_seen + timedelta(hours=12)
        assert all(lo <= rm.item.created_at <= hi for rm in ranked)


def test_criterion_api_parity(bundled_runtime, bundled_client):
    """Every endpoint equals the corresponding in-process call on the same
    snapshot for 50 randomized queries."""
    with criterion("api-parity"):
        snapshot = bundled_runtime.snapshot()
        events = list(snapshot.events.values())
        terms = sorted({t for e in events for t in e.term_counts})
        rng = random.Random(8080)
        event_ids = sorted(snapshot.events)

        from act.views import (
            agency_posts as agency_view,
            event_detail as detail_view,
            health_payload as health_view,
            media_payload as media_view,
            related_payload as related_view,
        )

        for _ in range(50):
            q = random_filter_query(rng, terms)
            params: dict = {"limit": str(q.limit)}
            if q.bbox:
                params["bbox"] = ",".join(str(v) for v in q.bbox)
            if q.categories:
                params["category"] = ",".join(sorted(c.value for c in q.categories))
            if q.keyword:
                params["q"] = q.keyword
            if q.since:
                params["since"] = q.since.isoformat().replace("+00:00", "Z")
            if q.until:
                params["until"] = q.until.isoformat().replace("+00:00", "Z")
            if q.geotagged is not None:
                params["geotagged"] = "true" if q.geotagged else "false"

            assert bundled_client.get("/events", params=params).json() == event_summaries(snapshot, q)
            assert bundled_client.get("/terms", params=params).json() == terms_payload(snapshot, q, k=50)

            event_id = rng.choice(event_ids)
            event = snapshot.events[event_id]
            assert bundled_client.get(f"/events/{event_id}").json() == detail_view(snapshot, event)
            assert bundled_client.get(f"/events/{event_id}/related").json() == related_view(
                snapshot, event, k=5
            )
            assert bundled_client.get(f"/events/{event_id}/media").json() == media_view(
                bundled_runtime.media_for(snapshot, event)
            )

            limit = rng.choice([1, 5, 50])
            assert bundled_client.get("/agencies", params={"limit": str(limit)}).json() == agency_view(
                snapshot, limit=limit
            )
            assert bundled_client.get("/health").json() == health_view(snapshot)
