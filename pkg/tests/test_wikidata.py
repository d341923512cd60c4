import json
import threading

import pytest

from divcdcr.errors import NetworkError, OfflineMiss, ServiceError
from divcdcr.ingest import load_corpus
from divcdcr.model import Corpus, Document, Mention, Span
from divcdcr.wikidata import (
    DEFAULT_URL,
    URL_ENV,
    ResponseCache,
    WikidataClient,
    audit_corpus_links,
    default_cache_dir,
    requests_transport,
)

from wikidata_stub import FIXTURES, RecordedTransport, expected_audit_records

AUDIT_CORPUS = FIXTURES / "audit_corpus.dcdcr.json"


class FakeClock:
    def __init__(self, now=1000.0):
        self.now = now
        self.sleeps = []

    def __call__(self):
        return self.now

    def sleep(self, seconds):
        self.sleeps.append(seconds)
        self.now += seconds


def client(tmp_path, transport=None, **kw):
    return WikidataClient(tmp_path / "cache", transport=transport or RecordedTransport(), **kw)


def test_search_entity(tmp_path):
    stub = RecordedTransport()
    hits = client(tmp_path, stub).search_entity("Joe Biden")
    assert [(h.qid, h.label) for h in hits] == [("Q6279", "Joe Biden")]
    url, params = stub.calls[0]
    assert url == DEFAULT_URL
    assert params["action"] == "wbsearchentities" and params["format"] == "json"
    assert params["search"] == "Joe Biden" and params["language"] == "en"


def test_search_rejects_empty_label(tmp_path):
    stub = RecordedTransport()
    with pytest.raises(ValueError):
        client(tmp_path, stub).search_entity("   ")
    assert stub.calls == []


def test_verify_existing_and_missing(tmp_path):
    c = client(tmp_path)
    status = c.verify_qid("Q6279")
    assert status.exists and status.canonical_label == "Joe Biden"
    assert not c.verify_qid("Q999999999").exists


def test_q0_does_not_exist(tmp_path):
    stub = RecordedTransport([{
        "request": {"ids": "Q0"}, "status": 200,
        "body": {"error": {"code": "no-such-entity", "info": "Could not find an entity with the ID \"Q0\"."}},
    }])
    assert client(tmp_path, stub).verify_qid("Q0").exists is False


def test_missing_marker_means_absent(tmp_path):
    stub = RecordedTransport([{
        "request": {"ids": "Q5"}, "status": 200, "body": {"entities": {"Q5": {"id": "Q5", "missing": ""}}},
    }])
    assert client(tmp_path, stub).verify_qid("Q5").exists is False


@pytest.mark.parametrize("bad", ["6279", "q6279", "Q", "Q12a", ""])
def test_malformed_qid_sends_nothing(tmp_path, bad):
    stub = RecordedTransport()
    with pytest.raises(ValueError):
        client(tmp_path, stub).verify_qid(bad)
    assert stub.calls == []


def test_responses_are_cached(tmp_path):
    stub = RecordedTransport()
    first = client(tmp_path, stub)
    first.verify_qid("Q6279")
    first.verify_qid("Q6279")
    assert len(stub.calls) == 1
    offline = client(tmp_path, stub, offline=True)
    assert offline.verify_qid("Q6279").canonical_label == "Joe Biden"
    assert len(stub.calls) == 1 and offline.requests_sent == 0


def test_offline_miss_sends_nothing(tmp_path):
    stub = RecordedTransport()
    c = client(tmp_path, stub, offline=True)
    with pytest.raises(OfflineMiss):
        c.search_entity("Joe Biden")
    assert stub.calls == [] and c.requests_sent == 0


def test_service_errors(tmp_path):
    stub = RecordedTransport([
        {"request": {"ids": "Q1"}, "status": 503, "body": None},
        {"request": {"ids": "Q2"}, "status": 200, "body": {"error": {"code": "maxlag", "info": "lagged"}}},
    ])
    c = client(tmp_path, stub)
    with pytest.raises(ServiceError) as err:
        c.verify_qid("Q1")
    assert err.value.status == 503
    with pytest.raises(ServiceError):
        c.verify_qid("Q2")
    # failures are not cached
    assert list((tmp_path / "cache").glob("*.json")) == []


def test_network_error_from_requests_transport():
    with pytest.raises(NetworkError):
        requests_transport("http://127.0.0.1:9/w/api.php", {"action": "wbgetentities"}, timeout=1)


def test_base_url_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(URL_ENV, "http://mirror.invalid/api.php")
    stub = RecordedTransport()
    client(tmp_path, stub).verify_qid("Q6279")
    assert stub.calls[0][0] == "http://mirror.invalid/api.php"


def test_default_cache_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path))
    assert default_cache_dir() == tmp_path / "divcdcr" / "wikidata"


def test_cache_ttl(tmp_path):
    clock = FakeClock()
    cache = ResponseCache(tmp_path, ttl=60, clock=clock)
    cache.put("k", {"a": 1})
    assert cache.get("k") == {"a": 1}
    clock.now += 61
    assert cache.get("k") is None


def test_cache_file_per_key_and_corruption(tmp_path):
    cache = ResponseCache(tmp_path)
    cache.put("entity|en|Q1", {"x": 1})
    cache.put("entity|en|Q2", {"x": 2})
    assert len(list(tmp_path.glob("*.json"))) == 2
    cache.path("entity|en|Q1").write_text("{truncated", encoding="utf-8")
    assert cache.get("entity|en|Q1") is None
    assert cache.get("entity|en|Q2") == {"x": 2}


def test_corrupt_entry_is_refetched(tmp_path):
    stub = RecordedTransport()
    c = client(tmp_path, stub)
    c.verify_qid("Q567")
    c.cache.path("entity|en|Q567").write_bytes(b"\x00garbage")
    assert c.verify_qid("Q567").canonical_label == "Angela Merkel"
    assert len(stub.calls) == 2
    assert json.loads(c.cache.path("entity|en|Q567").read_text())["key"] == "entity|en|Q567"


def test_failed_write_leaves_no_partial_file(tmp_path):
    cache = ResponseCache(tmp_path)
    cache.put("k", {"ok": True})
    with pytest.raises(TypeError):
        cache.put("k", {"bad": object()})
    assert cache.get("k") == {"ok": True}
    assert [p.name for p in tmp_path.iterdir()] == [cache.path("k").name]


def test_rate_limit(tmp_path):
    clock = FakeClock()
    c = client(tmp_path, clock=clock, sleep=clock.sleep, min_interval=0.1)
    c.verify_qid("Q6279")
    c.verify_qid("Q567")
    clock.now += 5
    c.verify_qid("Q999999999")
    assert clock.sleeps == [pytest.approx(0.1)]
    assert c.requests_sent == 3


def test_concurrent_use(tmp_path):
    stub = RecordedTransport()
    c = client(tmp_path, stub, min_interval=0.0)
    errors = []

    def work():
        try:
            for q in ("Q6279", "Q567", "Q999999999"):
                c.verify_qid(q)
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert errors == []
    assert c.requests_sent == len(stub.calls) <= 24
    assert not list((tmp_path / "cache").glob(".tmp-*"))


def test_audit_reproduces_fixture_findings(tmp_path):
    stub = RecordedTransport()
    findings = audit_corpus_links(load_corpus(AUDIT_CORPUS), client(tmp_path, stub))
    assert [f.to_record() for f in findings] == expected_audit_records()


def test_audit_offline_after_warm_cache_is_identical(tmp_path):
    corpus = load_corpus(AUDIT_CORPUS)
    online = audit_corpus_links(corpus, client(tmp_path))
    stub = RecordedTransport()
    offline = audit_corpus_links(corpus, client(tmp_path, stub, offline=True))
    assert offline == online and stub.calls == []


def test_audit_offline_cold_cache(tmp_path):
    stub = RecordedTransport()
    findings = audit_corpus_links(load_corpus(AUDIT_CORPUS), client(tmp_path, stub, offline=True))
    assert stub.calls == []
    assert sorted(f.rule_id for f in findings) == ["L04", "L04", "L04", "L04", "L05"]


def test_audit_without_suggestions(tmp_path):
    stub = RecordedTransport()
    findings = audit_corpus_links(load_corpus(AUDIT_CORPUS), client(tmp_path, stub), suggest=False)
    assert "L03" not in {f.rule_id for f in findings}
    assert all(p["action"] == "wbgetentities" for _, p in stub.calls)


def test_audit_reports_service_failures(tmp_path):
    def failing(url, params):
        raise NetworkError("connection reset")

    doc = Document("0_L", "0", "L", "Joe Biden", (Mention("m1", Span(0, 9), "PER", "Joe Biden", "Q6279"),))
    findings = audit_corpus_links(Corpus.from_documents([doc]), client(tmp_path, failing))
    assert [(f.rule_id, f.subject) for f in findings] == [("L04", "cluster:Joe Biden")]
