"""Acquisition of question data from the Stack Exchange HTTP API or a dump file.

The dump format is the store's own line-delimited record format, so a store's
records file doubles as a dump. API fetching is throttled with a token bucket
and honors server-issued backoff.
"""

from __future__ import annotations

import html
import json
import logging
import os
import re
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

import httpx

from .records import AnswerRecord, QuestionRecord, validate_question
from .store import QuestionStore

logger = logging.getLogger(__name__)

API_BASE = "https://api.stackexchange.com/2.3"
API_KEY_ENV = "POSTFORGE_API_KEY"
DEFAULT_REQUESTS_PER_MINUTE = 25

_FENCE = "```"
_CODE_OPEN = re.compile(r"<\s*code[^>]*>", re.IGNORECASE)
_CODE_CLOSE = re.compile(r"<\s*/\s*code\s*>", re.IGNORECASE)


def extract_code_blocks(body: str) -> list[str]:
    blocks, _ = extract_code_blocks_with_warnings(body)
    return blocks


def extract_code_blocks_with_warnings(body: str) -> tuple[list[str], list[str]]:
    """Pull fenced blocks and ``<code>`` regions out of a post body, in
    document order, preserving interior whitespace.

    An unterminated block extends to the end of the body and is reported in
    the warning list rather than raised.
    """
    blocks: list[str] = []
    warnings: list[str] = []
    pos = 0
    while pos < len(body):
        fence_at = body.find(_FENCE, pos)
        tag = _CODE_OPEN.search(body, pos)
        tag_at = tag.start() if tag else -1
        if fence_at < 0 and tag_at < 0:
            break
        if tag_at < 0 or (0 <= fence_at < tag_at):
            # fenced block: info string up to the newline is not content
            start = body.find("\n", fence_at + len(_FENCE))
            if start < 0:
                warnings.append("fenced block with no content")
                break
            start += 1
            end = body.find(_FENCE, start)
            if end < 0:
                blocks.append(body[start:])
                warnings.append("unterminated fenced block")
                break
            blocks.append(body[start:end])
            pos = end + len(_FENCE)
        else:
            start = tag.end()
            close = _CODE_CLOSE.search(body, start)
            if close is None:
                blocks.append(html.unescape(body[start:]))
                warnings.append("unterminated <code> region")
                break
            blocks.append(html.unescape(body[start : close.start()]))
            pos = close.end()
    return blocks, warnings


@dataclass
class IngestReport:
    source: str
    read: int = 0
    stored: int = 0
    unchanged: int = 0
    replaced: int = 0
    excluded_closed: int = 0
    malformed: int = 0
    quarantined: int = 0
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(
            source=self.source,
            read=self.read,
            stored=self.stored,
            unchanged=self.unchanged,
            replaced=self.replaced,
            excluded_closed=self.excluded_closed,
            malformed=self.malformed,
            quarantined=self.quarantined,
            warnings=list(self.warnings),
        )


class RetryableFetchError(Exception):
    """Network or auth failure that the caller may retry."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class TokenBucket:
    """Request throttle: ``rate_per_minute`` tokens, refilled continuously."""

    def __init__(
        self,
        rate_per_minute: float = DEFAULT_REQUESTS_PER_MINUTE,
        clock: Callable[[], float] = time.monotonic,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.rate = rate_per_minute / 60.0
        self.capacity = float(rate_per_minute)
        self.tokens = self.capacity
        self.clock = clock
        self.sleeper = sleeper
        self._last = clock()

    def acquire(self) -> None:
        now = self.clock()
        self.tokens = min(self.capacity, self.tokens + (now - self._last) * self.rate)
        self._last = now
        if self.tokens < 1.0:
            wait = (1.0 - self.tokens) / self.rate
            self.sleeper(wait)
            self.tokens = 1.0
            self._last = self.clock()
        self.tokens -= 1.0


class StackExchangeClient:
    """Minimal paged client for the questions/answers endpoints."""

    def __init__(
        self,
        api_key: str | None = None,
        site: str = "stackoverflow",
        base_url: str = API_BASE,
        transport: httpx.BaseTransport | None = None,
        bucket: TokenBucket | None = None,
        max_attempts: int = 4,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.site = site
        self.base_url = base_url
        self.bucket = bucket or TokenBucket()
        self.max_attempts = max_attempts
        self.sleeper = sleeper
        self._client = httpx.Client(transport=transport, timeout=30.0)

    def close(self) -> None:
        self._client.close()

    def _get(self, path: str, params: dict) -> dict:
        params = dict(params, site=self.site)
        if self.api_key:
            params["key"] = self.api_key
        attempts = 0
        while True:
            attempts += 1
            self.bucket.acquire()
            try:
                resp = self._client.get(f"{self.base_url}{path}", params=params)
            except httpx.HTTPError as exc:
                if attempts >= self.max_attempts:
                    raise RetryableFetchError(f"network error: {exc}", attempts) from exc
                self.sleeper(min(2.0**attempts, 30.0))
                continue
            if resp.status_code == 429:
                retry_after = float(resp.headers.get("retry-after", "5"))
                self.sleeper(retry_after)
                continue
            if resp.status_code in (401, 403):
                raise RetryableFetchError(f"auth failure: HTTP {resp.status_code}", attempts)
            if resp.status_code >= 500:
                if attempts >= self.max_attempts:
                    raise RetryableFetchError(f"server error: HTTP {resp.status_code}", attempts)
                self.sleeper(min(2.0**attempts, 30.0))
                continue
            resp.raise_for_status()
            payload = resp.json()
            if payload.get("backoff"):
                self.sleeper(float(payload["backoff"]))
            return payload

    def _paged(self, path: str, params: dict, page_limit: int) -> Iterable[dict]:
        page = 1
        while page <= page_limit:
            payload = self._get(path, dict(params, page=page, pagesize=100))
            yield from payload.get("items", ())
            if not payload.get("has_more"):
                break
            page += 1

    def fetch_question_items(self, tag: str, from_ts: datetime, to_ts: datetime, page_limit: int) -> list[dict]:
        params = {
            "tagged": tag,
            "fromdate": int(from_ts.timestamp()),
            "todate": int(to_ts.timestamp()),
            "filter": "withbody",
            "order": "asc",
            "sort": "creation",
        }
        return list(self._paged("/questions", params, page_limit))

    def fetch_answer_items(self, question_ids: list[int], page_limit: int) -> list[dict]:
        items: list[dict] = []
        for i in range(0, len(question_ids), 50):
            chunk = ";".join(str(q) for q in question_ids[i : i + 50])
            items.extend(
                self._paged(f"/questions/{chunk}/answers", {"filter": "withbody"}, page_limit)
            )
        return items


def _question_from_api(item: dict, answers: list[dict], as_of: datetime) -> QuestionRecord:
    answer_records = tuple(
        AnswerRecord(
            answer_id=int(a["answer_id"]),
            score=int(a.get("score", 0)),
            comment_count=int(a.get("comment_count", 0)),
            answerer_reputation=int((a.get("owner") or {}).get("reputation", 0)),
            body=str(a.get("body", "")),
            code_blocks=tuple(extract_code_blocks(str(a.get("body", "")))),
        )
        for a in answers
    )
    body = str(item.get("body", ""))
    return QuestionRecord(
        question_id=int(item["question_id"]),
        title=html.unescape(str(item.get("title", ""))),
        body=body,
        code_blocks=tuple(extract_code_blocks(body)),
        tags=tuple(str(t).lower() for t in item.get("tags", ())),
        creation_date=datetime.fromtimestamp(int(item["creation_date"]), tz=timezone.utc),
        last_activity_date=datetime.fromtimestamp(
            int(item.get("last_activity_date", item["creation_date"])), tz=timezone.utc
        ),
        score=int(item.get("score", 0)),
        view_count=int(item.get("view_count", 0)),
        favorite_count=int(item.get("favorite_count", 0)),
        comment_count=int(item.get("comment_count", 0)),
        accepted_answer_id=(
            int(item["accepted_answer_id"]) if item.get("accepted_answer_id") is not None else None
        ),
        answers=answer_records,
        asker_reputation=int((item.get("owner") or {}).get("reputation", 0)),
        closed_or_deleted=bool(item.get("closed_date") or item.get("locked_date")),
        as_of=as_of,
    )


def _read_dump(path: str | Path, report: IngestReport) -> Iterable[QuestionRecord]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            report.read += 1
            try:
                yield QuestionRecord.from_dict(json.loads(line))
            except (ValueError, KeyError, TypeError) as exc:
                report.malformed += 1
                report.warnings.append(f"line {lineno}: malformed record ({exc})")


def fetch_questions(
    tag: str,
    date_range: tuple[datetime, datetime],
    source: str,
    page_limit: int = 10,
    *,
    store: QuestionStore,
    dump_path: str | Path | None = None,
    client: StackExchangeClient | None = None,
    now: datetime | None = None,
) -> tuple[list[QuestionRecord], IngestReport]:
    """Fetch, normalize and persist question records.

    Closed or deleted questions are excluded (counted in the report), records
    that fail their type invariants are quarantined by the store, and
    malformed dump lines are skipped rather than raised.
    """
    report = IngestReport(source=source)
    as_of = now or datetime.now(tz=timezone.utc)
    from_ts, to_ts = date_range

    if source == "dump":
        if dump_path is None:
            raise ValueError("dump source requires a dump file path")
        if not Path(dump_path).exists():
            raise FileNotFoundError(dump_path)
        raw = _read_dump(dump_path, report)
    elif source == "api":
        own_client = client is None
        client = client or StackExchangeClient()
        try:
            items = client.fetch_question_items(tag, from_ts, to_ts, page_limit)
            report.read = len(items)
            answers_by_q: dict[int, list[dict]] = {}
            ids = [int(it["question_id"]) for it in items if "question_id" in it]
            for a in client.fetch_answer_items(ids, page_limit):
                answers_by_q.setdefault(int(a.get("question_id", 0)), []).append(a)
            parsed = []
            for item in items:
                try:
                    parsed.append(
                        _question_from_api(item, answers_by_q.get(int(item["question_id"]), []), as_of)
                    )
                except (ValueError, KeyError, TypeError) as exc:
                    report.malformed += 1
                    report.warnings.append(f"malformed api item ({exc})")
            raw = parsed
        finally:
            if own_client:
                client.close()
    else:
        raise ValueError(f"unknown source: {source}")

    kept: list[QuestionRecord] = []
    for record in raw:
        if record.closed_or_deleted:
            report.excluded_closed += 1
            continue
        violations, _ = validate_question(record)
        if not violations:  # invalid records still flow to the store's quarantine
            if tag and tag.lower() not in record.tags:
                continue
            if not (from_ts <= record.last_activity_date <= to_ts):
                continue
        if record.as_of is None:
            record = QuestionRecord.from_dict(dict(record.to_dict(), as_of=as_of.isoformat()))
        kept.append(record)

    counts = store.add(kept)
    report.stored = counts["stored"]
    report.unchanged = counts["unchanged"]
    report.replaced = counts["replaced"]
    report.quarantined = counts["quarantined"]
    stored_ids = set(store.question_ids())
    result = [r for r in kept if r.question_id in stored_ids]
    logger.info("ingest report: %s", report.to_dict())
    return result, report
