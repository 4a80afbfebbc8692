from __future__ import annotations

from datetime import timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from act.parse import (
    KEEP,
    NoiseFilter,
    NoiseReason,
    NoiseRules,
    NoiseVerdict,
    Post,
    STOPWORDS,
    classify_noise,
    extract_entities,
    normalize_text,
    raw_tokens,
    tokenize,
)
from helpers import post, raw, ts


class TestTokenize:
    def test_hashtag_and_url_handling(self):
        assert tokenize("Bushfire near #Sydney! http://t.co/x") == ["bushfire", "near", "sydney"]

    def test_empty_text(self):
        assert tokenize("") == []

    def test_stopword_removal_uses_shipped_list(self):
        # "rt", "the", "a" all sit in the shipped stopword list; "a" is
        # also shorter than two characters.
        assert {"rt", "the", "a"} <= STOPWORDS
        assert tokenize("RT @abc: the THE a") == ["abc"]

    def test_short_tokens_dropped(self):
        assert tokenize("x it go growing") == ["go", "growing"]

    def test_unicode_split(self):
        assert tokenize("café–fire") == ["café", "fire"]

    def test_raw_tokens_keep_stopwords(self):
        assert raw_tokens("RT @abc: the fire") == ["rt", "abc", "the", "fire"]

    def test_urls_removed_before_splitting(self):
        assert "co" not in tokenize("fire http://t.co/abc123")


class TestNormalizeText:
    def test_lowercase_url_strip_collapse(self):
        assert normalize_text("Bushfire  NEAR #Sydney! http://t.co/x  ") == "bushfire near #sydney!"

    def test_deterministic(self):
        text = "Flooding in  Lismore https://a.b/c NOW"
        assert normalize_text(text) == normalize_text(text)


class TestExtractEntities:
    def test_retweet_marker(self):
        ents = extract_entities("RT @redcross: evacuate now")
        assert ents.is_retweet is True
        assert ents.retweet_of == "redcross"

    def test_no_entities(self):
        ents = extract_entities("no entities here")
        assert ents.hashtags == ()
        assert ents.mentions == ()
        assert ents.urls == ()
        assert ents.is_retweet is False
        assert ents.retweet_of is None

    def test_all_entity_kinds(self):
        ents = extract_entities("#fire at @cfa see https://a.b")
        assert ents.hashtags == ("fire",)
        assert ents.mentions == ("cfa",)
        assert ents.urls == ("https://a.b",)

    def test_retweet_case_insensitive_and_optional_colon(self):
        assert extract_entities("rt @ABC evacuate").retweet_of == "abc"
        assert extract_entities("RT @abc: evacuate").is_retweet is True

    def test_rt_mid_text_is_not_retweet(self):
        assert extract_entities("great RT @abc: thing").is_retweet is False


class TestPostRoundTrip:
    def test_to_dict_from_dict_identity(self):
        p = post("p1", "RT @cfa: #fire near Sydney https://a.b/x.jpg", coords=(151.2, -33.8))
        assert Post.from_dict(p.to_dict()) == p

    def test_retweet_implies_source(self):
        p = post("p2", "RT @cfa: smoke ahead")
        assert p.is_retweet and p.retweet_of == "cfa"

    def test_is_agency_flag(self):
        p = post("p3", "fire update", author="QldFES", agency_accounts=frozenset({"qldfes"}))
        assert p.is_agency is True


@pytest.fixture(scope="module")
def rules() -> NoiseRules:
    return NoiseRules.from_file()


class TestClassifyNoise:
    def test_empty_tokens_dropped(self, rules):
        p = post("n1", "!!! ...")
        verdict = classify_noise(p, rules, {})
        assert verdict == NoiseVerdict(False, NoiseReason.EMPTY)

    def test_spam_phrase(self, rules):
        p = post("n2", "Click here to win a fire blanket")
        assert classify_noise(p, rules, {}).reason is NoiseReason.SPAM

    def test_url_count_over_limit_is_spam(self, rules):
        urls = " ".join(f"http://a.b/{i}" for i in range(4))
        p = post("n3", f"fire {urls}")
        assert classify_noise(p, rules, {}).reason is NoiseReason.SPAM

    def test_joke_and_song_phrases(self, rules):
        assert classify_noise(post("n4", "knock knock bushfire"), rules, {}).reason is NoiseReason.JOKE
        assert classify_noise(post("n5", "now playing: flood song"), rules, {}).reason is NoiseReason.SONG

    def test_expletive_anger_is_kept(self, rules):
        p = post("n6", "this fucking fire took our damn street and nobody came")
        assert classify_noise(p, rules, {}) == KEEP

    def test_duplicate_flood_within_window(self, rules):
        p = post("n7", "fire at the ridge", minutes=5)
        seen = {(p.author, p.norm_text): ts(0)}
        assert classify_noise(p, rules, seen).reason is NoiseReason.DUPLICATE_FLOOD

    def test_duplicate_outside_window_kept(self, rules):
        p = post("n8", "fire at the ridge", minutes=30)
        seen = {(p.author, p.norm_text): ts(0)}
        assert classify_noise(p, rules, seen) == KEEP

    def test_pure_given_state(self, rules):
        p = post("n9", "fire at the ridge", minutes=5)
        seen = {(p.author, p.norm_text): ts(0)}
        before = dict(seen)
        first = classify_noise(p, rules, seen)
        second = classify_noise(p, rules, seen)
        assert first == second
        assert seen == before


class TestNoiseFilter:
    def test_flood_sequence(self, rules):
        nf = NoiseFilter(rules)
        assert nf.classify(post("f1", "fire at the ridge", minutes=0)).keep
        assert nf.classify(post("f2", "fire at the ridge", minutes=5)).reason is NoiseReason.DUPLICATE_FLOOD
        # a different author repeating the text is not a duplicate
        assert nf.classify(post("f3", "fire at the ridge", minutes=5, author="other")).keep

    def test_retweets_of_others_are_not_duplicates(self, rules):
        nf = NoiseFilter(rules)
        assert nf.classify(post("f4", "fire at the ridge", author="orig")).keep
        assert nf.classify(post("f5", "RT @orig: fire at the ridge", author="fan")).keep

    def test_sliding_window_suppresses_sustained_flood(self, rules):
        nf = NoiseFilter(rules)
        assert nf.classify(post("f6", "fire at the ridge", minutes=0)).keep
        for i in range(1, 5):
            verdict = nf.classify(post(f"f6-{i}", "fire at the ridge", minutes=9 * i))
            assert verdict.reason is NoiseReason.DUPLICATE_FLOOD

    def test_prune_bounds_state(self, rules):
        nf = NoiseFilter(rules)
        nf.classify(post("f7", "fire at the ridge", minutes=0))
        nf.prune(ts(60))
        assert nf.classify(post("f8", "fire at the ridge", minutes=60)).keep


class TestProfanityNeverDrops:
    def test_profanity_only_corpus_fully_kept(self, rules):
        angry_texts = [
            f"fucking {w} this damn fire is bullshit in town {i}"
            for i, w in enumerate(["furious", "pissed", "wtf", "ffs", "outraged"] * 20)
        ]
        verdicts = [classify_noise(post(f"a{i}", t, minutes=i), rules, {}) for i, t in enumerate(angry_texts)]
        assert all(v.keep for v in verdicts)


class TestVerdictInvariant:
    def test_keep_reason_consistency_enforced(self):
        with pytest.raises(ValueError):
            NoiseVerdict(True, NoiseReason.SPAM)
        with pytest.raises(ValueError):
            NoiseVerdict(False, NoiseReason.NONE)


@given(st.text(max_size=200))
@settings(max_examples=200, deadline=None)
def test_tokens_never_contain_stopwords_or_short_strings(text):
    tokens = tokenize(text)
    assert all(t not in STOPWORDS for t in tokens)
    assert all(len(t) >= 2 for t in tokens)
    assert all(t == t.lower() for t in tokens)


@given(st.text(max_size=200))
@settings(max_examples=200, deadline=None)
def test_normalize_is_idempotent(text):
    once = normalize_text(text)
    assert normalize_text(once) == once
