"""Capabilities harvester: fetch seed URLs, parse, and upsert layer records.

Fetches run concurrently up to the job's limit; requests to one host are
spaced by the per-host delay (redirect hops inherit the clock of whichever
host they land on). Upserts are applied sequentially as fetches complete, so
added/updated counts are exact. One harvest at a time per catalog directory,
enforced by a lock file.
"""

from __future__ import annotations

import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping
from urllib.parse import urljoin, urlsplit

import requests

from .capabilities import (
    CapabilitiesError,
    NoExtentError,
    layer_to_record,
    parse_capabilities,
)
from .catalog import Catalog, InvariantViolation
from .metadata import format_instant, utc_second

MAX_BODY_BYTES = 32 * 1024 * 1024
MAX_REDIRECTS = 5
MAX_CONCURRENT_LIMIT = 64
LOCK_NAME = "harvest.lock"

OUTCOME_OK = "ok"
OUTCOME_FETCH_ERROR = "fetch_error"
OUTCOME_PARSE_ERROR = "parse_error"


class HarvestError(Exception):
    pass


class FetchError(HarvestError):
    """Fetch failure with a machine-readable kind: timeout, status, oversize,
    redirect, or connection."""

    def __init__(self, kind: str, detail: str):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind


class HarvestInProgressError(HarvestError):
    pass


@dataclass(frozen=True)
class HarvestJob:
    seed_urls: tuple[str, ...]
    publisher_label: str
    max_concurrent_fetches: int = 4
    per_host_delay: float = 0.0
    timeout: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "seed_urls", tuple(self.seed_urls))
        if not self.seed_urls:
            raise ValueError("seed_urls must be non-empty")
        if not 1 <= self.max_concurrent_fetches <= MAX_CONCURRENT_LIMIT:
            raise ValueError(f"max_concurrent_fetches must be in [1, {MAX_CONCURRENT_LIMIT}]")
        if self.per_host_delay < 0:
            raise ValueError("per_host_delay must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class UrlOutcome:
    status: str
    records_added: int = 0
    records_updated: int = 0
    detail: str = ""


@dataclass(frozen=True)
class HarvestReport:
    outcomes: Mapping[str, UrlOutcome]
    started: datetime
    finished: datetime

    def ok(self) -> bool:
        return all(outcome.status == OUTCOME_OK for outcome in self.outcomes.values())

    def to_payload(self) -> dict:
        return {
            "started": format_instant(self.started),
            "finished": format_instant(self.finished),
            "outcomes": {
                url: {
                    "status": outcome.status,
                    "records_added": outcome.records_added,
                    "records_updated": outcome.records_updated,
                    "detail": outcome.detail,
                }
                for url, outcome in self.outcomes.items()
            },
        }


class _HostClock:
    """Spaces request starts to one host at least `delay` seconds apart."""

    def __init__(self, delay: float):
        self._delay = delay
        self._lock = threading.Lock()
        self._hosts: dict[str, threading.Lock] = {}
        self._next_allowed: dict[str, float] = {}

    def wait(self, host: str) -> None:
        if self._delay <= 0:
            return
        with self._lock:
            host_lock = self._hosts.setdefault(host, threading.Lock())
        with host_lock:
            now = time.monotonic()
            pause = self._next_allowed.get(host, now) - now
            if pause > 0:
                time.sleep(pause)
            self._next_allowed[host] = time.monotonic() + self._delay


def fetch_capabilities(
    url: str,
    timeout: float,
    *,
    clock: _HostClock | None = None,
    session: requests.Session | None = None,
) -> str:
    """GET a capabilities document, following up to 5 redirect hops.

    Raises FetchError on timeouts, non-200 status, bodies over 32 MiB, or
    connection failures; each failure carries a distinct kind.
    """
    parts = urlsplit(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise FetchError("connection", f"not an absolute http(s) URL: {url!r}")
    owns_session = session is None
    session = session or requests.Session()
    try:
        current = url
        for _ in range(MAX_REDIRECTS + 1):
            host = urlsplit(current).netloc
            if clock is not None:
                clock.wait(host)
            try:
                response = session.get(
                    current, timeout=timeout, stream=True, allow_redirects=False
                )
            except requests.Timeout as exc:
                raise FetchError("timeout", str(exc)) from exc
            except requests.RequestException as exc:
                raise FetchError("connection", str(exc)) from exc
            with response:
                if response.is_redirect or response.is_permanent_redirect:
                    location = response.headers.get("Location")
                    if not location:
                        raise FetchError("redirect", f"{response.status_code} without Location")
                    current = urljoin(current, location)
                    continue
                if response.status_code != 200:
                    raise FetchError("status", f"HTTP {response.status_code} from {current}")
                body = bytearray()
                try:
                    for chunk in response.iter_content(chunk_size=65536):
                        body.extend(chunk)
                        if len(body) > MAX_BODY_BYTES:
                            raise FetchError(
                                "oversize", f"body exceeds {MAX_BODY_BYTES} bytes"
                            )
                except requests.Timeout as exc:
                    raise FetchError("timeout", str(exc)) from exc
                except requests.RequestException as exc:
                    raise FetchError("connection", str(exc)) from exc
                encoding = response.encoding or "utf-8"
                try:
                    return bytes(body).decode(encoding)
                except (LookupError, UnicodeDecodeError):
                    return bytes(body).decode("utf-8", errors="replace")
        raise FetchError("redirect", f"more than {MAX_REDIRECTS} redirects from {url}")
    finally:
        if owns_session:
            session.close()


@dataclass
class _FetchResult:
    url: str
    xml: str | None = None
    error: UrlOutcome | None = None


def _fetch_one(url: str, job: HarvestJob, clock: _HostClock, session: requests.Session) -> _FetchResult:
    try:
        xml = fetch_capabilities(url, job.timeout, clock=clock, session=session)
    except FetchError as exc:
        return _FetchResult(url, error=UrlOutcome(OUTCOME_FETCH_ERROR, detail=str(exc)))
    return _FetchResult(url, xml=xml)


def _ingest_document(catalog: Catalog, url: str, xml: str, publisher: str) -> UrlOutcome:
    try:
        service = parse_capabilities(xml, url)
    except CapabilitiesError as exc:
        return UrlOutcome(OUTCOME_PARSE_ERROR, detail=str(exc))
    added = 0
    updated = 0
    skipped = 0
    for layer in service.layers:
        try:
            record = layer_to_record(service, layer, publisher)
        except NoExtentError:
            skipped += 1
            continue
        try:
            existed = catalog.get(record.id) is not None
            catalog.upsert(record)
        except InvariantViolation as exc:
            return UrlOutcome(OUTCOME_PARSE_ERROR, detail=str(exc))
        if existed:
            updated += 1
        else:
            added += 1
    detail = f"skipped {skipped} layers without extent" if skipped else ""
    return UrlOutcome(OUTCOME_OK, records_added=added, records_updated=updated, detail=detail)


def harvest(catalog: Catalog, job: HarvestJob) -> HarvestReport:
    """Run a harvest job against a catalog; failures are isolated per URL."""
    started = utc_second(datetime.now(timezone.utc))
    lock_path = catalog.directory / LOCK_NAME
    _acquire_lock(lock_path, started)
    try:
        clock = _HostClock(job.per_host_delay)
        outcomes: dict[str, UrlOutcome] = {}
        with requests.Session() as session:
            with ThreadPoolExecutor(max_workers=job.max_concurrent_fetches) as pool:
                futures = {
                    pool.submit(_fetch_one, url, job, clock, session): url
                    for url in job.seed_urls
                }
                for future in as_completed(futures):
                    result = future.result()
                    if result.error is not None:
                        outcomes[result.url] = result.error
                    else:
                        outcomes[result.url] = _ingest_document(
                            catalog, result.url, result.xml or "", job.publisher_label
                        )
        finished = utc_second(datetime.now(timezone.utc))
        # Report in seed order for stable output.
        ordered = {url: outcomes[url] for url in job.seed_urls if url in outcomes}
        return HarvestReport(outcomes=ordered, started=started, finished=finished)
    finally:
        _release_lock(lock_path)


def _acquire_lock(path: Path, started: datetime) -> None:
    try:
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_EXCL)
    except FileExistsError:
        raise HarvestInProgressError(
            f"another harvest holds {path}; remove the file if it is stale"
        ) from None
    with os.fdopen(fd, "w", encoding="utf-8") as handle:
        handle.write(f"pid={os.getpid()}\nstarted={format_instant(started)}\n")


def _release_lock(path: Path) -> None:
    try:
        path.unlink()
    except FileNotFoundError:
        pass


def read_seed_file(path: str | Path) -> list[str]:
    """Seed list: one URL per line, blank lines and '#' comments ignored."""
    seeds = []
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            seeds.append(line)
    return seeds
