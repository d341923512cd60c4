import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import cohen_kappa_score

from divcdcr.errors import EmptyAlignment, TextMismatch
from divcdcr.metrics import (
    PRF,
    EdgeScores,
    agreement,
    align_mentions,
    b_cubed,
    ceaf_e,
    conll_average,
    entity_type_kappa,
    identity_clusterings,
    lea,
    mention_detection_f1,
    muc,
    relation_edge_prf,
    score_corpora,
)
from divcdcr.model import Corpus, Document, Mention, Span

import oracles
from strategies import clusterings, random_clusterings
from worked import GOLD, KAPPA_LABELS, MUC_GOLD, MUC_SYS, SYS, b3_pair, clustering_corpus, kappa_pair

METRICS = {"muc": muc, "b_cubed": b_cubed, "ceaf_e": ceaf_e, "lea": lea}


def close(got, want, tol=1e-9):
    return all(abs(float(g) - float(w)) <= tol for g, w in zip(got, want))


# frozen from the oracles (exact fractions)
WORKED = {
    ("muc", "muc"): (Fraction(1), Fraction(1, 2), Fraction(2, 3)),
    ("b_cubed", "b3"): (Fraction(3, 4), Fraction(2, 3), Fraction(12, 17)),
    ("ceaf_e", "b3"): (Fraction(11, 15), Fraction(11, 15), Fraction(11, 15)),
    ("lea", "muc"): (Fraction(2, 3), Fraction(1, 3), Fraction(4, 9)),
}


@pytest.mark.parametrize("metric, example", sorted(WORKED))
def test_worked_examples(metric, example):
    gold, sys = (MUC_GOLD, MUC_SYS) if example == "muc" else (GOLD, SYS)
    expected = WORKED[(metric, example)]
    assert getattr(oracles, metric)(gold, sys) == expected
    assert close(METRICS[metric](gold, sys), expected)


def test_b3_one_big_cluster():
    singles = [{x} for x in "abcd"]
    p, r, _ = b_cubed(singles, [set("abcd")])
    assert (p, r) == (0.25, 1.0)


def test_lea_split_recall_by_hand():
    # gold {a,b,c}: one of three links survives
    assert lea([{"a", "b", "c"}], [{"a", "b"}, {"c"}]).recall == pytest.approx(1 / 3)


def test_degenerate_cases():
    singles = [{x} for x in "abc"]
    assert muc(singles, singles) == (0.0, 0.0, 0.0)
    assert muc([], []) == (0.0, 0.0, 0.0)
    assert lea([], []) == (0.0, 0.0, 0.0)
    assert ceaf_e([{"a"}], [{"b"}]) == (0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        b_cubed([{"a"}, {"a", "b"}], [{"a"}])


def test_conll_average():
    assert conll_average([1, 1, 1]) == 1
    assert conll_average([0, 0, 0]) == 0
    assert round(conll_average([Fraction(2, 3), Fraction(12, 17), Fraction(11, 15)]), 4) == 0.7020
    assert conll_average([PRF(1, 1, 0.5), PRF(1, 1, 0.5), PRF(1, 1, 0.5)]) == 0.5
    with pytest.raises(ValueError):
        conll_average([1, 1])


def test_oracle_equivalence_1000():
    rng = random.Random(20240)
    for _ in range(1000):
        gold, sys = random_clusterings(rng)
        for name, fn in METRICS.items():
            assert close(fn(gold, sys), getattr(oracles, name)(gold, sys)), (name, gold, sys)


@settings(max_examples=300)
@given(clusterings())
def test_ceaf_assignment_is_optimal(pair):
    gold, sys = pair
    best = oracles.best_alignment_score(gold, sys)
    p, r, _ = ceaf_e(gold, sys)
    if gold:
        assert r * len(gold) == pytest.approx(float(best), abs=1e-9)


@settings(max_examples=200)
@given(clusterings())
def test_identity_is_perfect(pair):
    gold, _ = pair
    if not gold:
        return
    for name, fn in METRICS.items():
        if name == "muc" and all(len(c) == 1 for c in gold):
            continue
        assert fn(gold, gold) == pytest.approx((1, 1, 1))


@settings(max_examples=200)
@given(clusterings(), st.randoms(use_true_random=False))
def test_permutation_invariance(pair, rng):
    gold, sys = pair
    names = sorted({m for c in gold + sys for m in c})
    renamed = dict(zip(names, rng.sample(names, len(names))))
    relabel = lambda cs: [frozenset(renamed[m] for m in c) for c in rng.sample(cs, len(cs))]
    for fn in METRICS.values():
        assert fn(relabel(gold), relabel(sys)) == pytest.approx(fn(gold, sys))


@settings(max_examples=200)
@given(clusterings(), st.randoms(use_true_random=False))
def test_merging_gold_clusters_never_raises_b3_precision(pair, rng):
    gold, _ = pair
    if len(gold) < 2:
        return
    i, j = rng.sample(range(len(gold)), 2)
    merged = [c for k, c in enumerate(gold) if k not in (i, j)] + [gold[i] | gold[j]]
    assert b_cubed(gold, merged).precision <= b_cubed(gold, gold).precision + 1e-12


def test_corpus_level_b3_pair():
    gold, sys = b3_pair()
    report = score_corpora(gold, sys)
    assert close(report.b_cubed, (0.75, 2 / 3, 12 / 17))
    assert close(report.ceaf_e, (11 / 15,) * 3)
    assert report.mentions == (1.0, 1.0, 1.0)
    assert report.conll == pytest.approx((0.5 + 12 / 17 + 11 / 15) / 3)


def test_identical_corpora_score_one():
    gold, _ = b3_pair()
    report = score_corpora(gold, gold)
    assert report.conll == pytest.approx(1.0)
    assert report.kappa == 1.0


def test_twinless_mentions_become_singletons():
    gold = clustering_corpus(["abcd"])
    sys = clustering_corpus(["ab"])
    al = align_mentions(gold, sys)
    assert mention_detection_f1(al) == (1.0, 0.5, pytest.approx(2 / 3))
    g, s = identity_clusterings(gold, sys, al)
    assert sorted(map(len, s)) == [1, 1, 2]
    assert sum(map(len, g)) == sum(map(len, s)) == 4


def test_text_mismatch():
    a = Corpus.from_documents([Document("0_L", "0", "L", "a b")])
    b = Corpus.from_documents([Document("0_L", "0", "L", "a c")])
    with pytest.raises(TextMismatch):
        align_mentions(a, b)


def test_kappa_hand_example_and_sklearn():
    a, b = kappa_pair()
    kappa = entity_type_kappa(align_mentions(a, b), a, b)
    assert kappa == pytest.approx(0.2)
    assert oracles.cohen_kappa(KAPPA_LABELS) == Fraction(1, 5)
    assert kappa == pytest.approx(cohen_kappa_score([x for x, _ in KAPPA_LABELS], [y for _, y in KAPPA_LABELS]))


def test_kappa_degenerate_marginals():
    one = clustering_corpus(["a"])
    assert entity_type_kappa(align_mentions(one, one), one, one) == 1.0
    with pytest.raises(EmptyAlignment):
        empty = Corpus.from_documents([Document("0_L", "0", "L", "a b c d")])
        entity_type_kappa(align_mentions(empty, empty), empty, empty)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.sampled_from(["PER", "ORG", "GPE"]), st.sampled_from(["PER", "ORG", "GPE"])),
                min_size=1, max_size=12))
def test_kappa_matches_oracle(labels):
    words = [f"w{i}" for i in range(len(labels))]
    text = " ".join(words)

    def corpus(side):
        ms, pos = [], 0
        for i, w in enumerate(words):
            ms.append(Mention(w, Span(pos, pos + len(w)), labels[i][side]))
            pos += len(w) + 1
        return Corpus.from_documents([Document("0_L", "0", "L", text, tuple(ms))])

    a, b = corpus(0), corpus(1)
    assert entity_type_kappa(align_mentions(a, b), a, b) == pytest.approx(float(oracles.cohen_kappa(labels)))


def edges(*relations):
    return clustering_corpus(["a", "b", "c", "d"], relations=relations)


def test_edges_identical():
    a = edges(("b", "a", "MET"), ("c", "a", "MER"), ("d", "c", "BRD"))
    scores = relation_edge_prf(a, a, align_mentions(a, a))
    assert scores.micro == (1.0, 1.0, 1.0)


def test_edge_label_confusion():
    a, b = edges(("b", "a", "MET")), edges(("b", "a", "MER"))
    scores = relation_edge_prf(a, b, align_mentions(a, b))
    assert scores.micro == (0.0, 0.0, 0.0)
    assert scores.confusion == {("MET", "MER"): 1}
    assert EdgeScores.precedence_distance("MET", "MER") == 1
    assert EdgeScores.precedence_distance("CLS", "STF") == 0


def test_edge_recall_loss_for_missing_label_only():
    a = edges(("b", "a", "MET"), ("d", "c", "BRD"))
    b = edges(("b", "a", "MET"))
    scores = relation_edge_prf(a, b, align_mentions(a, b))
    assert scores.per_label["MET"] == (1.0, 1.0, 1.0)
    assert scores.per_label["BRD"] == (0.0, 0.0, 0.0)
    assert scores.micro.recall == 0.5 and scores.micro.precision == 1.0


def test_edges_are_direction_sensitive():
    a, b = edges(("b", "a", "MET")), edges(("a", "b", "MET"))
    assert relation_edge_prf(a, b, align_mentions(a, b)).micro == (0.0, 0.0, 0.0)


def test_agreement_reports_both_directions():
    gold, sys = b3_pair()
    forward, backward = agreement(gold, sys)
    assert forward.b_cubed.precision == backward.b_cubed.recall
    assert forward.conll == pytest.approx(backward.conll)


def test_report_record():
    gold, sys = b3_pair()
    rec = score_corpora(gold, sys).to_record()
    assert set(rec) == {"mentions", "muc", "b_cubed", "ceaf_e", "lea", "conll", "edges", "kappa"}
    assert rec["b_cubed"]["f1"] == pytest.approx(12 / 17)
