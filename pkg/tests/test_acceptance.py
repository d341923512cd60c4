"""Acceptance criteria, one check per criterion.

Each check prints a single ``PASS``/``FAIL`` line.  Run with ``pytest -s`` to
see them, or directly as ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import random
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from crossdoc import EXPECTED_ENTITIES, EXPECTED_REFERENTS, crossdoc_corpus  # noqa: E402
from seeded import manifest_multiset, seeded_corpus  # noqa: E402
from strategies import random_clusterings, random_corpus, random_grouping_corpus  # noqa: E402
from wikidata_stub import FIXTURES, RecordedTransport, expected_audit_records  # noqa: E402
from worked import GOLD, MUC_GOLD, MUC_SYS, SYS  # noqa: E402

from divcdcr.graph import build_discourse_entities, build_global_referents, relation_stats  # noqa: E402
from divcdcr.ingest import export_corpus, load_corpus, parse_corpus  # noqa: E402
from divcdcr.metrics import b_cubed, ceaf_e, conll_average, lea, muc  # noqa: E402
from divcdcr.validation import validate_corpus  # noqa: E402
from divcdcr.wikidata import WikidataClient, audit_corpus_links  # noqa: E402

FIXTURE = Path(__file__).parents[1] / "src" / "divcdcr" / "data" / "scheme_examples.dcdcr.json"


def report(number: int, name: str, ok: bool, detail: str) -> bool:
    print(f"criterion {number} {'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


def criterion_1() -> bool:
    expected = {"MET": 2, "MER": 4, "CLS": 1, "STF": 1, "DEC": 1, "BRD": 2}
    t0 = time.perf_counter()
    corpus = parse_corpus(FIXTURE.read_bytes())
    errors = [f for f in validate_corpus(corpus) if str(f.severity) == "error"]
    counts = relation_stats(corpus).by_label
    elapsed = time.perf_counter() - t0
    ok = not errors and counts == expected and elapsed < 1.0
    return report(1, "scheme fixture", ok, f"errors={len(errors)} stats={dict(sorted(counts.items()))} {elapsed:.3f}s")


def criterion_2() -> bool:
    def run() -> bytes:
        findings = validate_corpus(seeded_corpus())
        return "".join(json.dumps(f.to_record(), sort_keys=True) + "\n" for f in findings).encode()

    first, second = run(), run()
    findings = validate_corpus(seeded_corpus())
    got = sorted(((f.rule_id, f.document_id, f.subject) for f in findings), key=repr)
    ok = len(findings) == 16 and got == manifest_multiset() and first == second
    return report(2, "seeded violations", ok, f"findings={len(findings)} manifest_match={got == manifest_multiset()} "
                                              f"byte_identical={first == second}")


METRICS = {"muc": muc, "b_cubed": b_cubed, "ceaf_e": ceaf_e, "lea": lea}


def criterion_3() -> bool:
    rng = random.Random(3)
    t0 = time.perf_counter()
    worst, mismatches, ceaf_checked, ceaf_bad = 0.0, 0, 0, 0
    for _ in range(1000):
        gold, sys_ = random_clusterings(rng, max_mentions=8, max_clusters=4)
        for name, fn in METRICS.items():
            got, want = fn(gold, sys_), getattr(oracles, name)(gold, sys_)
            err = max(abs(float(g) - float(w)) for g, w in zip(got, want))
            worst = max(worst, err)
            mismatches += err > 1e-9
    for _ in range(300):
        gold, sys_ = random_clusterings(rng, max_mentions=12, max_clusters=6)
        if not gold or not sys_:
            continue
        ceaf_checked += 1
        total = ceaf_e(gold, sys_).recall * len(gold)
        ceaf_bad += abs(total - float(oracles.best_alignment_score(gold, sys_))) > 1e-9
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and ceaf_bad == 0 and elapsed < 30
    return report(3, "metric oracles", ok, f"1000 clusterings max_abs_err={worst:.2e} mismatches={mismatches}; "
                                          f"ceaf exhaustive {ceaf_checked - ceaf_bad}/{ceaf_checked}; {elapsed:.2f}s")


def criterion_4() -> bool:
    tol = 5e-5
    op, orc, of1 = oracles.b_cubed(GOLD, SYS)
    p, r, f1 = b_cubed(GOLD, SYS)
    oracle_ok = all(abs(float(x) - y) <= tol for x, y in zip((op, orc, of1), (0.75, 0.6667, 0.7059)))
    impl_ok = all(abs(x - y) <= tol for x, y in zip((p, r, f1), (0.75, 0.6667, 0.7059)))
    oracle_f1s = (oracles.muc(MUC_GOLD, MUC_SYS)[2], of1, oracles.ceaf_e(GOLD, SYS)[2])
    impl_f1s = (muc(MUC_GOLD, MUC_SYS).f1, f1, ceaf_e(GOLD, SYS).f1)
    oracle_conll = float(sum(oracle_f1s) / 3)
    conll = conll_average(impl_f1s)
    printed = f"{conll:.4f}"
    ok = oracle_ok and impl_ok and abs(oracle_conll - 0.7020) <= tol and abs(conll - 0.7020) <= tol and printed == "0.7020"
    return report(4, "worked examples", ok, f"b3 p={p:.4f} r={r:.4f} f1={f1:.4f}; conll={printed} (oracle {oracle_conll:.4f})")


def criterion_5() -> bool:
    identity = determinism = 0
    for seed in range(100):
        corpus = random_corpus(random.Random(seed))
        data = export_corpus(corpus)
        again = parse_corpus(data)
        identity += again == corpus
        determinism += export_corpus(again) == data == export_corpus(corpus)
    ok = identity == 100 and determinism == 100
    return report(5, "round trip", ok, f"parse(export)==id {identity}/100; byte-identical re-export {determinism}/100")


def _grouping(corpus):
    entities = build_discourse_entities(corpus)
    groups = {}
    for e in entities:
        groups.setdefault(e.discourse_id, set()).add(frozenset((c.document_id, c.name) for c in e.clusters))
    refs = {r.uri: {e.discourse_id for e in r.discourse_entities} for r in build_global_referents(corpus, entities)}
    return entities, groups, refs


def criterion_6() -> bool:
    corpus = crossdoc_corpus()
    entities, _, _ = _grouping(corpus)
    got_entities = {(e.discourse_id, e.key): {(c.document_id, c.name) for c in e.clusters} for e in entities}
    got_refs = [(r.uri, [e.discourse_id for e in r.discourse_entities]) for r in build_global_referents(corpus, entities)]
    manifest_ok = got_entities == EXPECTED_ENTITIES and got_refs == EXPECTED_REFERENTS
    agree = 0
    for seed in range(200):
        c = random_grouping_corpus(random.Random(seed))
        _, groups, refs = _grouping(c)
        want_groups, want_refs = oracles.discourse_groups(c)
        agree += groups == {d: g for d, g in want_groups.items() if g} and refs == want_refs
    ok = manifest_ok and agree == 200
    return report(6, "cross-document grouping", ok, f"manifest={'match' if manifest_ok else 'MISMATCH'}; "
                                                   f"oracle agreement {agree}/200")


def criterion_7() -> bool:
    corpus = load_corpus(FIXTURES / "audit_corpus.dcdcr.json")
    with tempfile.TemporaryDirectory() as tmp:
        offline_stub = RecordedTransport()
        offline = WikidataClient(Path(tmp) / "cold", offline=True, transport=offline_stub)
        cold = audit_corpus_links(corpus, offline)
        offline_calls = len(offline_stub.calls) + offline.requests_sent

        stub = RecordedTransport()
        online = WikidataClient(Path(tmp) / "warm", transport=stub)
        findings = [f.to_record() for f in audit_corpus_links(corpus, online)]
        fixture_ok = findings == expected_audit_records()

        replay_stub = RecordedTransport()
        replay = audit_corpus_links(corpus, WikidataClient(Path(tmp) / "warm", offline=True, transport=replay_stub))
        replay_ok = [f.to_record() for f in replay] == findings and not replay_stub.calls
    ok = offline_calls == 0 and fixture_ok and replay_ok and all(f.rule_id in ("L04", "L05") for f in cold)
    return report(7, "wikidata client", ok, f"offline calls={offline_calls}; fixture findings "
                                            f"{'reproduced' if fixture_ok else 'DIFFER'} ({len(findings)}); "
                                            f"cached replay {'identical' if replay_ok else 'DIFFERS'}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


def test_criterion_1_scheme_fixture():
    assert criterion_1()


def test_criterion_2_seeded_violations():
    assert criterion_2()


def test_criterion_3_metric_oracles():
    assert criterion_3()


def test_criterion_4_worked_examples():
    assert criterion_4()


def test_criterion_5_round_trip():
    assert criterion_5()


def test_criterion_6_cross_document_grouping():
    assert criterion_6()


def test_criterion_7_wikidata_client():
    assert criterion_7()


if __name__ == "__main__":
    results = [check() for check in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
