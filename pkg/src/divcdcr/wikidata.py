"""Wikidata lookups with an on-disk response cache and an offline mode.

Two API actions are used: ``wbsearchentities`` to turn a label into
candidate ids, and ``wbgetentities`` to check that an id exists and fetch
its label.  Every response is cached as one JSON file per request key.  In
offline mode the cache is the only source and a miss raises
:class:`~divcdcr.errors.OfflineMiss`; no request is ever sent.

The endpoint defaults to the public API and can be overridden with the
``DIVCDCR_WIKIDATA_URL`` environment variable.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from .errors import NetworkError, OfflineMiss, ServiceError, WikidataError
from .model import QID_PATTERN, Corpus, ValidationFinding, canonical_qid, group_by_name
from .validation import finding

DEFAULT_URL = "https://www.wikidata.org/w/api.php"
URL_ENV = "DIVCDCR_WIKIDATA_URL"
DEFAULT_TTL = 30 * 24 * 3600
MIN_INTERVAL = 0.1
USER_AGENT = "divcdcr/0.1 (annotation corpus tooling)"

#: ``transport(url, params) -> (http_status, decoded_json)``
Transport = Callable[[str, dict], "tuple[int, Any]"]


@dataclass(frozen=True)
class EntityCandidate:
    qid: str
    label: str
    description: str = ""


@dataclass(frozen=True)
class QidStatus:
    exists: bool
    canonical_label: str = ""


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "divcdcr" / "wikidata"


def requests_transport(url: str, params: dict, timeout: float = 10.0) -> tuple[int, Any]:
    import requests

    try:
        resp = requests.get(url, params=params, timeout=timeout, headers={"User-Agent": USER_AGENT})
    except requests.RequestException as exc:
        raise NetworkError(str(exc)) from exc
    try:
        payload = resp.json()
    except ValueError:
        payload = None
    return resp.status_code, payload


class ResponseCache:
    """Directory of ``<sha256(key)>.json`` files, each holding one response."""

    def __init__(self, directory: str | Path, ttl: float = DEFAULT_TTL, clock: Callable[[], float] = time.time):
        self.directory = Path(directory)
        self.ttl = ttl
        self.clock = clock

    def path(self, key: str) -> Path:
        return self.directory / (hashlib.sha256(key.encode("utf-8")).hexdigest() + ".json")

    def get(self, key: str) -> Any | None:
        try:
            entry = json.loads(self.path(key).read_text(encoding="utf-8"))
            if entry["key"] != key:
                return None
            if self.clock() - entry["fetched_at"] > entry["ttl"]:
                return None
            return entry["payload"]
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def put(self, key: str, payload: Any) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        entry = {"key": key, "fetched_at": self.clock(), "ttl": self.ttl, "payload": payload}
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, ensure_ascii=False, sort_keys=True)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, self.path(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


class WikidataClient:
    """Thread-safe handle; live requests are serialised and spaced out."""

    def __init__(
        self,
        cache_dir: str | Path | None = None,
        *,
        offline: bool = False,
        base_url: str | None = None,
        transport: Transport | None = None,
        ttl: float = DEFAULT_TTL,
        language: str = "en",
        min_interval: float = MIN_INTERVAL,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.cache = ResponseCache(cache_dir if cache_dir is not None else default_cache_dir(), ttl)
        self.offline = offline
        self.base_url = base_url or os.environ.get(URL_ENV) or DEFAULT_URL
        self.transport = transport or requests_transport
        self.language = language
        self.min_interval = min_interval
        self._clock, self._sleep = clock, sleep
        self._lock = threading.Lock()
        self._last_request: float | None = None
        self.requests_sent = 0

    def _fetch(self, key: str, params: dict) -> Any:
        cached = self.cache.get(key)
        if cached is not None:
            return cached
        if self.offline:
            raise OfflineMiss(key)
        with self._lock:
            if self._last_request is not None:
                wait = self._last_request + self.min_interval - self._clock()
                if wait > 0:
                    self._sleep(wait)
            self._last_request = self._clock()
            self.requests_sent += 1
            status, payload = self.transport(self.base_url, params)
        if status != 200 or not isinstance(payload, dict):
            raise ServiceError(status, "" if isinstance(payload, dict) else "response is not a JSON object")
        error = payload.get("error")
        if error and error.get("code") != "no-such-entity":
            raise ServiceError(status, f"{error.get('code')}: {error.get('info', '')}")
        self.cache.put(key, payload)
        return payload

    def search_entity(self, label: str, limit: int = 10) -> list[EntityCandidate]:
        """Candidates for *label* in the service's ranking order."""
        label = label.strip()
        if not label:
            raise ValueError("search label must not be empty")
        if limit < 1:
            raise ValueError("limit must be positive")
        params = {
            "action": "wbsearchentities",
            "search": label,
            "language": self.language,
            "uselang": self.language,
            "type": "item",
            "limit": limit,
            "format": "json",
        }
        payload = self._fetch(f"search|{self.language}|{limit}|{label}", params)
        out = []
        for hit in payload.get("search", []):
            qid = hit.get("id", "")
            if QID_PATTERN.fullmatch(qid):
                out.append(EntityCandidate(qid, hit.get("label", ""), hit.get("description", "")))
        return out[:limit]

    def verify_qid(self, qid: str) -> QidStatus:
        if not isinstance(qid, str) or not QID_PATTERN.fullmatch(qid):
            raise ValueError(f"{qid!r} is not a Wikidata item id")
        params = {
            "action": "wbgetentities",
            "ids": qid,
            "props": "labels",
            "languages": self.language,
            "format": "json",
        }
        payload = self._fetch(f"entity|{self.language}|{qid}", params)
        if "error" in payload:
            return QidStatus(False)
        entity = payload.get("entities", {}).get(qid)
        if not entity or "missing" in entity:
            return QidStatus(False)
        label = entity.get("labels", {}).get(self.language, {}).get("value", "")
        return QidStatus(True, label)


def _tokens(text: str) -> set[str]:
    return set(re.findall(r"\w+", text.casefold()))


def audit_corpus_links(corpus: Corpus, client: WikidataClient, suggest: bool = True) -> list[ValidationFinding]:
    """Check every cluster's Wikidata link against the service (or the cache).

    Unknown ids are warnings; a cluster name sharing no word with the
    canonical label, a unique exact-label candidate for an unlinked cluster,
    and links that could not be checked are reported at info level.
    """
    findings = []
    for doc in corpus.documents():
        for m in doc.mentions:
            if m.wikidata and canonical_qid(m.wikidata) != m.wikidata:
                findings.append(finding(
                    "L05", doc.id, m.id, f"{m.wikidata!r} should be stored as {canonical_qid(m.wikidata)}", m.start
                ))
        for name, members in group_by_name(doc.mentions).items():
            subject, offset = f"cluster:{name}", members[0].start
            uris = sorted({canonical_qid(m.wikidata) for m in members if m.wikidata})
            uris = [u for u in uris if QID_PATTERN.fullmatch(u)]
            for uri in uris:
                try:
                    status = client.verify_qid(uri)
                except WikidataError as exc:
                    findings.append(finding("L04", doc.id, subject, f"{uri} not verified: {exc}", offset))
                    continue
                if not status.exists:
                    findings.append(finding("L01", doc.id, subject, f"{uri} does not exist", offset))
                elif not _tokens(name) & _tokens(status.canonical_label):
                    findings.append(finding(
                        "L02", doc.id, subject, f"name {name!r} shares no word with label {status.canonical_label!r}", offset
                    ))
            if uris or not suggest:
                continue
            try:
                candidates = client.search_entity(name, limit=5)
            except WikidataError:
                continue
            exact = [c for c in candidates if c.label.casefold() == name.casefold()]
            if len(exact) == 1:
                findings.append(finding(
                    "L03", doc.id, subject, f"unlinked; candidate {exact[0].qid} ({exact[0].description})", offset
                ))
    findings.sort(key=ValidationFinding.sort_key)
    return findings
