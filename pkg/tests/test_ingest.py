import json
from datetime import datetime, timezone
from pathlib import Path

import httpx
import pytest

from postforge.ingest import (
    RetryableFetchError,
    StackExchangeClient,
    TokenBucket,
    extract_code_blocks,
    extract_code_blocks_with_warnings,
    fetch_questions,
)
from postforge.store import QuestionStore
from postforge.synthetic import generate_questions

from conftest import make_question

RANGE = (
    datetime(2013, 1, 1, tzinfo=timezone.utc),
    datetime(2019, 12, 31, tzinfo=timezone.utc),
)


# -- code block extraction ----------------------------------------------------


def test_single_fenced_block():
    assert extract_code_blocks("```\nint a=0;\n```") == ["int a=0;\n"]


def test_no_code():
    assert extract_code_blocks("just prose, no code at all") == []


def test_three_interleaved_blocks_fixture():
    body = (Path(__file__).parent / "data" / "interleaved_blocks.md").read_text()
    blocks = extract_code_blocks(body)
    assert blocks == [
        "int i = 42;\nlong l = (long) i;\n",
        "Long.valueOf(i)",
        "long l = Integer.toUnsignedLong(i);\n",
    ]


def test_code_tag_entities_unescaped():
    assert extract_code_blocks("<p>use <code>a &lt; b</code> here</p>") == ["a < b"]


def test_unterminated_block_extends_to_end():
    blocks, warnings = extract_code_blocks_with_warnings("pre\n```\nint a;\nint b;")
    assert blocks == ["int a;\nint b;"]
    assert any("unterminated" in w for w in warnings)


def test_whitespace_inside_blocks_preserved():
    body = "```\n  indented\n\n\ttabbed\n```"
    assert extract_code_blocks(body) == ["  indented\n\n\ttabbed\n"]


# -- dump ingestion -----------------------------------------------------------


def _write_dump(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict()) + "\n")


def test_dump_filters_closed(tmp_path):
    records = [
        make_question(question_id=1),
        make_question(question_id=2),
        make_question(question_id=3),
        make_question(question_id=4, closed=True),
    ]
    dump = tmp_path / "dump.jsonl"
    _write_dump(dump, records)
    store = QuestionStore(tmp_path / "store")
    result, report = fetch_questions("java", RANGE, "dump", store=store, dump_path=dump)
    assert len(result) == 3
    assert report.excluded_closed == 1
    assert len(store) == 3


def test_empty_dump(tmp_path):
    dump = tmp_path / "dump.jsonl"
    dump.write_text("")
    store = QuestionStore(tmp_path / "store")
    result, report = fetch_questions("java", RANGE, "dump", store=store, dump_path=dump)
    assert result == []
    assert report.read == 0


def test_malformed_lines_skipped_not_raised(tmp_path):
    dump = tmp_path / "dump.jsonl"
    good = make_question(question_id=7)
    dump.write_text(json.dumps(good.to_dict()) + "\n" + "{not json}\n" + '{"question_id": 1}\n')
    store = QuestionStore(tmp_path / "store")
    result, report = fetch_questions("java", RANGE, "dump", store=store, dump_path=dump)
    assert [r.question_id for r in result] == [7]
    assert report.malformed == 2


def test_hundred_record_round_trip(tmp_path):
    records = [
        q for q in generate_questions(100, seed=11)
        if RANGE[0] <= q.last_activity_date <= RANGE[1]
    ]
    dump = tmp_path / "dump.jsonl"
    _write_dump(dump, records)
    store = QuestionStore(tmp_path / "store")
    result, _ = fetch_questions("java", RANGE, "dump", store=store, dump_path=dump)
    assert len(result) == len(records)
    loaded = {q.question_id: q for q in store}
    for original in records:
        assert loaded[original.question_id] == original


def test_ingest_idempotent(tmp_path):
    records = generate_questions(20, seed=3)
    dump = tmp_path / "dump.jsonl"
    _write_dump(dump, records)
    store = QuestionStore(tmp_path / "store")
    fetch_questions("java", RANGE, "dump", store=store, dump_path=dump)
    first = list(store)
    _, report = fetch_questions("java", RANGE, "dump", store=store, dump_path=dump)
    assert list(store) == first
    assert report.stored == 0
    assert report.unchanged == len(first)


def test_invariant_violations_quarantined(tmp_path):
    bad = make_question(question_id=5, tags=())
    dump = tmp_path / "dump.jsonl"
    _write_dump(dump, [bad, make_question(question_id=6)])
    store = QuestionStore(tmp_path / "store")
    _, report = fetch_questions("java", RANGE, "dump", store=store, dump_path=dump)
    assert report.quarantined == 1
    assert store.question_ids() == [6]
    assert "tags" in store.quarantined()[0]["violations"][0]


def test_dangling_accepted_kept_but_flagged(tmp_path):
    q = make_question(question_id=9, accepted=12345)
    store = QuestionStore(tmp_path / "store")
    store.add([q])
    stored = store.get(9)
    assert stored.accepted_answer_id == 12345
    assert "dangling_accepted_answer" in stored.flags


def test_user_profile_invariants():
    from postforge.records import UserProfile

    profile = UserProfile(user_id=1, reputation=100, top_tags=("Java", "android"))
    assert profile.top_tags == ("java", "android")
    with pytest.raises(ValueError):
        UserProfile(user_id=1, reputation=0, top_tags=("java", "Java"))


def test_missing_dump_file(tmp_path):
    store = QuestionStore(tmp_path / "store")
    with pytest.raises(FileNotFoundError):
        fetch_questions("java", RANGE, "dump", store=store, dump_path=tmp_path / "nope.jsonl")


# -- store ---------------------------------------------------------------------


def test_store_get_and_iteration_sorted(tmp_path):
    store = QuestionStore(tmp_path / "store")
    store.add([make_question(question_id=3), make_question(question_id=1)])
    assert store.question_ids() == [1, 3]
    assert [q.question_id for q in store] == [1, 3]
    assert store.get(3).question_id == 3
    with pytest.raises(KeyError):
        store.get(999)


def test_store_replaces_changed_record(tmp_path):
    store = QuestionStore(tmp_path / "store")
    store.add([make_question(question_id=1, score=0)])
    counts = store.add([make_question(question_id=1, score=5)])
    assert counts["replaced"] == 1
    assert store.get(1).score == 5
    assert len(store) == 1


# -- api client ----------------------------------------------------------------


def _api_transport(pages, answers=None, fail_first=0, backoff_on_page=None):
    """MockTransport serving /questions pages then /answers."""
    calls = {"n": 0, "backoffs": []}

    def handler(request: httpx.Request) -> httpx.Response:
        calls["n"] += 1
        if fail_first and calls["n"] <= fail_first:
            return httpx.Response(500)
        if "/answers" in request.url.path:
            return httpx.Response(200, json={"items": answers or [], "has_more": False})
        page = int(request.url.params.get("page", "1"))
        items = pages[page - 1] if page <= len(pages) else []
        payload = {"items": items, "has_more": page < len(pages)}
        if backoff_on_page == page:
            payload["backoff"] = 7
        return httpx.Response(200, json=payload)

    return httpx.MockTransport(handler), calls


def _instant_bucket():
    return TokenBucket(rate_per_minute=10_000, sleeper=lambda s: None)


def _api_item(qid, **overrides):
    item = {
        "question_id": qid,
        "title": f"Q{qid}",
        "body": "<p>body</p><pre><code>int x;</code></pre>",
        "tags": ["java"],
        "creation_date": 1400000000,
        "last_activity_date": 1500000000,
        "score": 2,
        "view_count": 50,
        "favorite_count": 1,
        "comment_count": 0,
        "owner": {"reputation": 99},
    }
    item.update(overrides)
    return item


def test_api_fetch_paginates_and_normalizes(tmp_path):
    pages = [[_api_item(1)], [_api_item(2, closed_date=1500000001)]]
    answers = [
        {"question_id": 1, "answer_id": 11, "score": 3, "comment_count": 1,
         "owner": {"reputation": 500}, "body": "use <code>long</code>"},
    ]
    transport, _ = _api_transport(pages, answers)
    client = StackExchangeClient(api_key="k", transport=transport, bucket=_instant_bucket())
    store = QuestionStore(tmp_path / "store")
    result, report = fetch_questions(
        "java", RANGE, "api", page_limit=5, store=store, client=client
    )
    assert [r.question_id for r in result] == [1]
    assert report.excluded_closed == 1
    q = store.get(1)
    assert q.answers[0].answerer_reputation == 500
    assert q.code_blocks == ("int x;",)
    assert q.asker_reputation == 99


def test_api_backoff_field_honored():
    sleeps = []
    pages = [[_api_item(1)]]
    transport, _ = _api_transport(pages, backoff_on_page=1)
    client = StackExchangeClient(
        api_key="k", transport=transport,
        bucket=TokenBucket(rate_per_minute=10_000, sleeper=lambda s: None),
        sleeper=sleeps.append,
    )
    client.fetch_question_items("java", *RANGE, page_limit=1)
    assert 7.0 in sleeps


def test_api_429_retries():
    attempts = {"n": 0}

    def handler(request):
        attempts["n"] += 1
        if attempts["n"] == 1:
            return httpx.Response(429, headers={"retry-after": "3"})
        return httpx.Response(200, json={"items": [], "has_more": False})

    sleeps = []
    client = StackExchangeClient(
        api_key="k", transport=httpx.MockTransport(handler),
        bucket=_instant_bucket(), sleeper=sleeps.append,
    )
    client.fetch_question_items("java", *RANGE, page_limit=1)
    assert attempts["n"] == 2
    assert 3.0 in sleeps


def test_api_auth_failure_is_retryable_error_with_attempts():
    transport = httpx.MockTransport(lambda request: httpx.Response(403))
    client = StackExchangeClient(api_key="bad", transport=transport, bucket=_instant_bucket())
    with pytest.raises(RetryableFetchError) as exc:
        client.fetch_question_items("java", *RANGE, page_limit=1)
    assert exc.value.attempts == 1


def test_api_server_errors_exhaust_attempts():
    transport = httpx.MockTransport(lambda request: httpx.Response(502))
    client = StackExchangeClient(
        api_key="k", transport=transport, bucket=_instant_bucket(),
        max_attempts=3, sleeper=lambda s: None,
    )
    with pytest.raises(RetryableFetchError) as exc:
        client.fetch_question_items("java", *RANGE, page_limit=1)
    assert exc.value.attempts == 3


def test_token_bucket_throttles():
    clock = {"t": 0.0}
    sleeps = []

    def fake_sleep(s):
        sleeps.append(s)
        clock["t"] += s

    bucket = TokenBucket(rate_per_minute=60, clock=lambda: clock["t"], sleeper=fake_sleep)
    for _ in range(61):
        bucket.acquire()
    assert sleeps, "61st request within the same minute must wait"
