import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_post
from marsad.classify import (
    AdapterRegistry,
    ClassifierAdapter,
    Lexicon,
    PatternSet,
    PropagandaPattern,
    apply_feedback,
    builtin_lexicon,
    builtin_patterns,
    classify_propaganda,
    classify_sentiment,
    invoke_adapter,
    post_analysis,
    rank_by_degree,
)
from marsad.errors import AdapterError
from marsad.trends import extract_locations

LEX = Lexicon(positive=frozenset({"good", "great", "happy"}), negative=frozenset({"bad", "awful", "sad"}))


class TestSentiment:
    def test_two_positive_hits_score_one(self):
        post = make_post("1", "good and great indeed")
        s = classify_sentiment(post, LEX)
        assert s.score == 1.0 and s.label == "positive"

    def test_no_hits_neutral_zero(self):
        post = make_post("1", "completely factual statement")
        s = classify_sentiment(post, LEX)
        assert s.score == 0.0 and s.label == "neutral"

    def test_one_positive_three_negative(self):
        post = make_post("1", "good but bad awful sad")
        s = classify_sentiment(post, LEX)
        assert s.score == -0.5 and s.label == "negative"

    def test_threshold_boundaries_are_strict(self):
        # score exactly 0.2 must be neutral (positive requires > 0.2)
        post = make_post("1", "good good good bad bad")  # (3-2)/5 = 0.2
        s = classify_sentiment(post, LEX)
        assert s.score == pytest.approx(0.2) and s.label == "neutral"

    def test_duplicated_text_score_invariant(self):
        post = make_post("1", "good bad bad day for all")
        doubled = make_post("2", "good bad bad day for all good bad bad day for all")
        assert classify_sentiment(post, LEX).score == pytest.approx(
            classify_sentiment(doubled, LEX).score
        )

    @given(st.lists(st.sampled_from(["good", "bad", "word", "great", "awful"]), min_size=1, max_size=30))
    @settings(max_examples=200, deadline=None)
    def test_score_bounds_and_label_consistency(self, words):
        post = make_post("1", " ".join(words))
        s = classify_sentiment(post, LEX)
        assert -1.0 <= s.score <= 1.0
        if s.score > 0.2:
            assert s.label == "positive"
        elif s.score < -0.2:
            assert s.label == "negative"
        else:
            assert s.label == "neutral"

    def test_builtin_lexicon_arabic_and_english(self):
        assert classify_sentiment(make_post("1", "what a wonderful success"), builtin_lexicon()).label == "positive"
        assert classify_sentiment(make_post("2", "خبر رائع وجميل"), builtin_lexicon()).label == "positive"


PATTERNS = PatternSet([
    PropagandaPattern("radical agenda", "loaded_language", 0.6),
    PropagandaPattern("wake up", "slogan", 0.4),
    PropagandaPattern("wake up people", "slogan", 0.5),
    PropagandaPattern("agenda", "loaded_language", 0.3),
])


class TestPropaganda:
    def test_no_match(self):
        label = classify_propaganda(make_post("1", "sunny day in town"), PATTERNS)
        assert (label.flag, label.score, label.spans, label.technique) == (False, 0.0, [], None)

    def test_single_weight_06_match(self):
        label = classify_propaganda(make_post("1", "this Radical Agenda again"), PATTERNS)
        assert label.flag is True
        assert label.score == pytest.approx(0.6)
        assert len(label.spans) == 1
        assert label.technique == "loaded_language"

    def test_overlapping_matches_keep_longest(self):
        # "wake up people" overlaps "wake up"; the longer one wins
        label = classify_propaganda(make_post("1", "wake up people now"), PATTERNS)
        assert label.score == pytest.approx(0.5)
        assert len(label.spans) == 1

    def test_spans_reproduce_matched_substrings(self):
        post = make_post("1", "قالوا عدو الشعب مرة اخرى")
        label = classify_propaganda(post, builtin_patterns())
        assert label.spans
        raw = post.norm_text.encode("utf-8")
        for start, end in label.spans:
            assert raw[start:end].decode("utf-8") == "عدو الشعب"

    def test_spans_non_overlapping_and_in_bounds(self):
        post = make_post("1", "wake up people, the radical agenda is a radical agenda")
        label = classify_propaganda(post, PATTERNS)
        raw_len = len(post.norm_text.encode("utf-8"))
        last_end = 0
        for start, end in label.spans:
            assert 0 <= start < end <= raw_len
            assert start >= last_end
            last_end = end

    def test_score_caps_at_one(self):
        text = " and ".join(["radical agenda"] * 4)
        label = classify_propaganda(make_post("1", text), PATTERNS)
        assert label.score == 1.0

    def test_flag_iff_threshold(self):
        label = classify_propaganda(make_post("1", "wake up now"), PATTERNS)
        assert label.score == pytest.approx(0.4) and label.flag is False


class TestPostAnalysis:
    def test_degree_is_abs_sentiment(self):
        post = make_post("1", "bad awful sad good")  # (1-3)/4 = -0.5
        s = classify_sentiment(post, LEX)
        pr = classify_propaganda(post, PATTERNS)
        records = post_analysis(post, s, pr, extract_locations(post))
        sent = next(r for r in records if r.kind == "sentiment")
        assert sent.degree == pytest.approx(0.5) and sent.label == "negative"

    def test_propaganda_degree_is_score(self):
        post = make_post("1", "the radical agenda in Doha")
        s = classify_sentiment(post, LEX)
        pr = classify_propaganda(post, PATTERNS)
        records = post_analysis(post, s, pr, extract_locations(post))
        prop = next(r for r in records if r.kind == "propaganda")
        assert prop.degree == pytest.approx(0.6)
        assert prop.locations == ["Doha"]

    def test_ranking_total_and_stable(self):
        records = []
        for i in range(10):
            post = make_post(f"p{i}", "good " * (i % 4) + "filler words here")
            s = classify_sentiment(post, LEX)
            pr = classify_propaganda(post, PATTERNS)
            records.extend(post_analysis(post, s, pr, []))
        ranked = rank_by_degree(records)
        assert len(ranked) == len(records)
        for a, b in zip(ranked, ranked[1:]):
            assert (-a.degree, a.post_id, a.kind) <= (-b.degree, b.post_id, b.kind)
        assert rank_by_degree(records) == ranked


class TestFeedback:
    class Ann:
        def __init__(self, post_id, new_label, kind="sentiment"):
            self.post_id = post_id
            self.new_label = new_label
            self.kind = kind

    def test_no_annotations_no_change(self):
        lex, report = apply_feedback([], LEX, {})
        assert lex is LEX and report == {"added_positive": [], "added_negative": []}

    def test_three_agreeing_annotations_add_token(self):
        anns = [self.Ann(f"p{i}", "negative") for i in range(3)]
        tokens = {f"p{i}": ["rigged", "vote"] for i in range(3)}
        lex, report = apply_feedback(anns, LEX, tokens)
        assert "rigged" in lex.negative and "vote" in lex.negative
        assert lex.version == LEX.version + 1
        assert report["added_negative"] == ["rigged", "vote"]

    def test_two_agreeing_is_below_threshold(self):
        anns = [self.Ann(f"p{i}", "negative") for i in range(2)]
        tokens = {f"p{i}": ["rigged"] for i in range(2)}
        lex, _ = apply_feedback(anns, LEX, tokens)
        assert lex is LEX

    def test_existing_lexicon_tokens_are_skipped(self):
        anns = [self.Ann(f"p{i}", "negative") for i in range(3)]
        tokens = {f"p{i}": ["good"] for i in range(3)}  # already positive
        lex, _ = apply_feedback(anns, LEX, tokens)
        assert lex is LEX

    def test_idempotent_application(self):
        anns = [self.Ann(f"p{i}", "positive") for i in range(3)]
        tokens = {f"p{i}": ["stellar"] for i in range(3)}
        once, _ = apply_feedback(anns, LEX, tokens)
        twice, _ = apply_feedback(anns, once, tokens)
        assert twice is once  # second application is a no-op

    def test_conflicting_relabels_do_not_enter(self):
        anns = [self.Ann(f"p{i}", "positive") for i in range(3)]
        anns += [self.Ann(f"q{i}", "negative") for i in range(3)]
        tokens = {a.post_id: ["contested"] for a in anns}
        lex, _ = apply_feedback(anns, LEX, tokens)
        assert "contested" not in lex.positive and "contested" not in lex.negative


class _AdapterHandler(BaseHTTPRequestHandler):
    mode = "ok"
    concurrent = 0
    max_seen = 0
    _track = threading.Lock()

    def do_POST(self):
        with _AdapterHandler._track:
            _AdapterHandler.concurrent += 1
            _AdapterHandler.max_seen = max(_AdapterHandler.max_seen, _AdapterHandler.concurrent)
        time.sleep(0.02)  # widen the overlap window for the in-flight check
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        items = body["items"]
        if self.mode == "short":
            labels = [{"id": i["id"], "label": "neutral", "score": 0.0} for i in items[:-1]]
        elif self.mode == "partial":
            labels = []
            for n, i in enumerate(items):
                if n == 1:
                    labels.append({"id": i["id"], "error": "model exploded"})
                else:
                    labels.append({"id": i["id"], "label": "positive", "score": 0.9})
        else:
            labels = [{"id": i["id"], "label": "neutral", "score": 0.0} for i in items]
        payload = json.dumps({"labels": labels}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)
        with _AdapterHandler._track:
            _AdapterHandler.concurrent -= 1

    def log_message(self, *args):
        pass


@pytest.fixture
def adapter_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _AdapterHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()


class TestAdapters:
    POSTS = [make_post(f"p{i}", f"text number {i}") for i in range(3)]

    def test_baseline_preserves_batch_order(self):
        registry = AdapterRegistry()
        labels = invoke_adapter(registry.default_for("sentiment"), self.POSTS, lexicon=LEX)
        assert [l["id"] for l in labels] == ["p0", "p1", "p2"]

    def test_exactly_one_default_per_kind(self):
        registry = AdapterRegistry()
        assert registry.default_for("sentiment").adapter_id == "baseline-sentiment"
        registry.register(ClassifierAdapter("alt", "sentiment", mode="http", url="http://x"), default=True)
        assert registry.default_for("sentiment").adapter_id == "alt"

    def test_http_adapter_roundtrip(self, adapter_server):
        _AdapterHandler.mode = "ok"
        port = adapter_server.server_address[1]
        adapter = ClassifierAdapter("remote", "sentiment", mode="http", url=f"http://127.0.0.1:{port}/", token="tok")
        labels = invoke_adapter(adapter, self.POSTS)
        assert [l["id"] for l in labels] == ["p0", "p1", "p2"]
        assert all(l["label"] == "neutral" for l in labels)

    def test_short_response_is_bad(self, adapter_server):
        _AdapterHandler.mode = "short"
        port = adapter_server.server_address[1]
        adapter = ClassifierAdapter("remote", "sentiment", mode="http", url=f"http://127.0.0.1:{port}/")
        with pytest.raises(AdapterError) as ei:
            invoke_adapter(adapter, self.POSTS)
        assert ei.value.code == "BAD_ADAPTER_RESPONSE"

    def test_partial_failure_markers_preserved(self, adapter_server):
        _AdapterHandler.mode = "partial"
        port = adapter_server.server_address[1]
        adapter = ClassifierAdapter("remote", "sentiment", mode="http", url=f"http://127.0.0.1:{port}/")
        labels = invoke_adapter(adapter, self.POSTS)
        assert labels[1] == {"id": "p1", "error": "model exploded"}
        assert labels[0]["label"] == "positive"

    def test_unreachable_adapter(self):
        adapter = ClassifierAdapter("dead", "sentiment", mode="http", url="http://127.0.0.1:9/")
        with pytest.raises(AdapterError) as ei:
            invoke_adapter(adapter, self.POSTS, timeout=0.5)
        assert ei.value.code == "ADAPTER_UNREACHABLE"

    def test_chunked_batches_preserve_order_and_respect_in_flight_limit(self, adapter_server):
        _AdapterHandler.mode = "ok"
        _AdapterHandler.concurrent = 0
        _AdapterHandler.max_seen = 0
        port = adapter_server.server_address[1]
        adapter = ClassifierAdapter("remote", "sentiment", mode="http", url=f"http://127.0.0.1:{port}/")
        posts = [make_post(f"b{i:03d}", f"text {i}") for i in range(25)]
        labels = invoke_adapter(adapter, posts, batch_size=4, max_in_flight=2)
        assert [l["id"] for l in labels] == [p.id for p in posts]
        assert _AdapterHandler.max_seen <= 2
