"""Scoring one annotation of a set of documents against another.

The first corpus is gold, the second the system (or second annotator).
Mentions are matched on exact ``(document, span)``; a mention without a twin
enters the cluster metrics as a singleton on the side that lacks it.

Identity clusters are scored with MUC, B-cubed, CEAF-e and LEA, plus the
CoNLL average of the first three F1 values.  Near-identity relations are
scored as labelled directed edges.  Every 0/0 is taken as 0.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Collection, Hashable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import BadEnum, EmptyAlignment, TextMismatch
from .model import Corpus, RelationType, group_by_name, precedence_rank

Ref = tuple[str, str]  # (document id, mention id)
Clustering = Sequence[Collection[Hashable]]


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float


def _div(num: float, den: float) -> float:
    return num / den if den else 0.0


def prf(p_num: float, p_den: float, r_num: float, r_den: float) -> PRF:
    p, r = float(_div(p_num, p_den)), float(_div(r_num, r_den))
    return PRF(p, r, _div(2 * p * r, p + r))


# -- alignment ---------------------------------------------------------------


@dataclass(frozen=True)
class MentionAlignment:
    pairs: tuple[tuple[Ref, Ref], ...]
    unmatched_a: tuple[Ref, ...]
    unmatched_b: tuple[Ref, ...]


def align_mentions(a: Corpus, b: Corpus) -> MentionAlignment:
    """Pair mentions of *a* and *b* that cover the same span of the same document.

    A document present in only one corpus contributes only unmatched mentions.
    Raises :class:`TextMismatch` if a shared document id has different text.
    """
    docs_a = {d.id: d for d in a.documents()}
    docs_b = {d.id: d for d in b.documents()}
    pairs, only_a, only_b = [], [], []
    for doc_id in sorted(docs_a.keys() | docs_b.keys()):
        da, db = docs_a.get(doc_id), docs_b.get(doc_id)
        if da is not None and db is not None and da.text != db.text:
            raise TextMismatch(doc_id)
        spans_b = defaultdict(list)
        for m in db.mentions if db else ():
            spans_b[m.span].append(m.id)
        for m in da.mentions if da else ():
            twins = spans_b.get(m.span)
            if twins:
                pairs.append(((doc_id, m.id), (doc_id, twins.pop(0))))
            else:
                only_a.append((doc_id, m.id))
        for span in sorted(spans_b):
            only_b.extend((doc_id, mid) for mid in spans_b[span])
    return MentionAlignment(tuple(pairs), tuple(only_a), tuple(only_b))


def mention_detection_f1(alignment: MentionAlignment) -> PRF:
    matched = len(alignment.pairs)
    return prf(matched, matched + len(alignment.unmatched_b), matched, matched + len(alignment.unmatched_a))


def identity_clusterings(a: Corpus, b: Corpus, alignment: MentionAlignment) -> tuple[list[frozenset], list[frozenset]]:
    """Gold and system clusterings over the shared mention universe.

    Keys are ``('p', i)`` for the i-th aligned pair and ``('a', ref)`` /
    ``('b', ref)`` for twinless mentions.  Every key appears in exactly one
    cluster on each side.
    """
    key_a = {pa: ("p", i) for i, (pa, _) in enumerate(alignment.pairs)}
    key_b = {pb: ("p", i) for i, (_, pb) in enumerate(alignment.pairs)}
    key_a.update({ref: ("a", ref) for ref in alignment.unmatched_a})
    key_b.update({ref: ("b", ref) for ref in alignment.unmatched_b})

    def side(corpus, keys, twinless_other):
        clusters, covered = [], set()
        for doc in corpus.documents():
            for members in group_by_name(doc.mentions).values():
                cluster = frozenset(keys[(doc.id, m.id)] for m in members)
                clusters.append(cluster)
                covered |= cluster
        clusters.extend(frozenset([k]) for k in keys.values() if k not in covered)
        clusters.extend(frozenset([k]) for k in twinless_other)
        return clusters

    gold = side(a, key_a, [("b", ref) for ref in alignment.unmatched_b])
    sys = side(b, key_b, [("a", ref) for ref in alignment.unmatched_a])
    return gold, sys


# -- cluster metrics ---------------------------------------------------------


def _contingency(gold: Clustering, sys: Clustering):
    gold = [set(c) for c in gold if c]
    sys = [set(c) for c in sys if c]
    where = {}
    for j, s in enumerate(sys):
        for m in s:
            if m in where:
                raise ValueError(f"mention {m!r} is in two system clusters")
            where[m] = j
    seen = set()
    table = np.zeros((len(gold), len(sys)), dtype=np.int64)
    for i, g in enumerate(gold):
        for m in g:
            if m in seen:
                raise ValueError(f"mention {m!r} is in two gold clusters")
            seen.add(m)
            j = where.get(m)
            if j is not None:
                table[i, j] += 1
    g_sizes = np.array([len(g) for g in gold], dtype=np.int64)
    s_sizes = np.array([len(s) for s in sys], dtype=np.int64)
    return table, g_sizes, s_sizes


def _muc_side(table: np.ndarray, sizes: np.ndarray) -> tuple[float, float]:
    # mentions missing from the other side each form their own partition
    parts = np.count_nonzero(table, axis=1) + (sizes - table.sum(axis=1))
    return float(np.sum(sizes - parts)), float(np.sum(sizes - 1))


def muc(gold: Clustering, sys: Clustering) -> PRF:
    table, g, s = _contingency(gold, sys)
    r_num, r_den = _muc_side(table, g)
    p_num, p_den = _muc_side(table.T, s)
    return prf(p_num, p_den, r_num, r_den)


def b_cubed(gold: Clustering, sys: Clustering) -> PRF:
    table, g, s = _contingency(gold, sys)
    sq = table.astype(float) ** 2
    r_num = float(np.sum(sq / g[:, None]))
    p_num = float(np.sum(sq / s[None, :]))
    return prf(p_num, float(s.sum()), r_num, float(g.sum()))


def ceaf_e(gold: Clustering, sys: Clustering) -> PRF:
    """Entity-based CEAF with phi4 similarity and an optimal one-to-one alignment."""
    table, g, s = _contingency(gold, sys)
    if table.size:
        phi = 2.0 * table / (g[:, None] + s[None, :])
        rows, cols = linear_sum_assignment(phi, maximize=True)
        total = float(phi[rows, cols].sum())
    else:
        total = 0.0
    return prf(total, len(s), total, len(g))


def _lea_side(table: np.ndarray, sizes: np.ndarray, other_sizes: np.ndarray) -> float:
    num = 0.0
    for i, size in enumerate(sizes):
        row = table[i]
        if size == 1:
            # self-link: a singleton is resolved iff it is a singleton on the other side
            resolved = float(np.any((row == 1) & (other_sizes == 1)))
        else:
            resolved = float(np.sum(row * (row - 1) / 2)) / (size * (size - 1) / 2)
        num += size * resolved
    return num


def lea(gold: Clustering, sys: Clustering) -> PRF:
    table, g, s = _contingency(gold, sys)
    r_num = _lea_side(table, g, s)
    p_num = _lea_side(table.T, s, g)
    return prf(p_num, float(s.sum()), r_num, float(g.sum()))


def conll_average(report) -> float:
    """Mean F1 of MUC, B-cubed and CEAF-e.

    *report* is a :class:`ScoreReport` or a sequence of three scores given as
    :class:`PRF` tuples or bare F1 values.
    """
    if hasattr(report, "muc"):
        scores = (report.muc, report.b_cubed, report.ceaf_e)
    else:
        scores = tuple(report)
        if len(scores) != 3:
            raise ValueError("CoNLL average needs exactly three scores")
    f1s = [s.f1 if isinstance(s, PRF) else float(s) for s in scores]
    return sum(f1s) / 3


# -- relation edges ----------------------------------------------------------


@dataclass(frozen=True)
class EdgeScores:
    per_label: dict[str, PRF]
    micro: PRF
    #: (gold label, system label) -> count, over endpoint-matched edges with different labels
    confusion: dict[tuple[str, str], int] = field(default_factory=dict)

    @staticmethod
    def precedence_distance(gold_label: str, sys_label: str) -> int | None:
        try:
            return abs(precedence_rank(gold_label) - precedence_rank(sys_label))
        except BadEnum:
            return None


_LABEL_ORDER = {lab.value: i for i, lab in enumerate(RelationType)}


def _label_key(label: str):
    return (_LABEL_ORDER.get(label, len(_LABEL_ORDER)), label)


def relation_edge_prf(a: Corpus, b: Corpus, alignment: MentionAlignment) -> EdgeScores:
    """Labelled, direction-sensitive edge matching between two annotations."""
    pair_of_a = {pa: i for i, (pa, _) in enumerate(alignment.pairs)}
    pair_of_b = {pb: i for i, (_, pb) in enumerate(alignment.pairs)}

    def collect(corpus, pair_of):
        totals: Counter = Counter()
        keyed: dict[tuple[int, int], Counter] = defaultdict(Counter)
        for doc in corpus.documents():
            for r in doc.relations:
                label = str(r.label)
                totals[label] += 1
                src, tgt = pair_of.get((doc.id, r.source)), pair_of.get((doc.id, r.target))
                if src is not None and tgt is not None:
                    keyed[(src, tgt)][label] += 1
        return totals, keyed

    gold_totals, gold_keyed = collect(a, pair_of_a)
    sys_totals, sys_keyed = collect(b, pair_of_b)

    matched: Counter = Counter()
    confusion: Counter = Counter()
    for key in gold_keyed.keys() & sys_keyed.keys():
        g, s = gold_keyed[key], sys_keyed[key]
        common = g & s
        matched.update(common)
        left_g = sorted((g - common).elements(), key=_label_key)
        left_s = sorted((s - common).elements(), key=_label_key)
        for lg, ls in zip(left_g, left_s):
            confusion[(lg, ls)] += 1

    labels = sorted(gold_totals.keys() | sys_totals.keys(), key=_label_key)
    per_label = {lab: prf(matched[lab], sys_totals[lab], matched[lab], gold_totals[lab]) for lab in labels}
    n = sum(matched.values())
    micro = prf(n, sum(sys_totals.values()), n, sum(gold_totals.values()))
    return EdgeScores(per_label, micro, dict(sorted(confusion.items())))


# -- entity types ------------------------------------------------------------


def entity_type_kappa(alignment: MentionAlignment, a: Corpus, b: Corpus) -> float:
    """Cohen's kappa over the entity types of aligned mentions."""
    if not alignment.pairs:
        raise EmptyAlignment()
    index_a = {(d.id, m.id): str(m.entity_type) for d in a.documents() for m in d.mentions}
    index_b = {(d.id, m.id): str(m.entity_type) for d in b.documents() for m in d.mentions}
    labels = [(index_a[pa], index_b[pb]) for pa, pb in alignment.pairs]
    n = len(labels)
    observed = sum(x == y for x, y in labels) / n
    count_a = Counter(x for x, _ in labels)
    count_b = Counter(y for _, y in labels)
    expected = sum(count_a[k] * count_b[k] for k in count_a) / (n * n)
    if expected == 1:
        return 1.0 if observed == 1 else 0.0
    return (observed - expected) / (1 - expected)


# -- report ------------------------------------------------------------------

CLUSTER_METRICS = ("muc", "b_cubed", "ceaf_e", "lea")
ALL_METRICS = ("mentions",) + CLUSTER_METRICS + ("conll", "edges", "kappa")


@dataclass(frozen=True)
class ScoreReport:
    mentions: PRF
    muc: PRF
    b_cubed: PRF
    ceaf_e: PRF
    lea: PRF
    edges: EdgeScores
    kappa: float | None

    @property
    def conll(self) -> float:
        return conll_average(self)

    def to_record(self) -> dict:
        rec = {name: getattr(self, name)._asdict() for name in ("mentions",) + CLUSTER_METRICS}
        rec["conll"] = self.conll
        rec["edges"] = {
            "micro": self.edges.micro._asdict(),
            "per_label": {k: v._asdict() for k, v in self.edges.per_label.items()},
            "confusion": [
                {"gold": g, "sys": s, "count": n, "precedence_distance": EdgeScores.precedence_distance(g, s)}
                for (g, s), n in self.edges.confusion.items()
            ],
        }
        rec["kappa"] = self.kappa
        return rec


def score_corpora(gold: Corpus, sys: Corpus) -> ScoreReport:
    alignment = align_mentions(gold, sys)
    g, s = identity_clusterings(gold, sys, alignment)
    try:
        kappa = entity_type_kappa(alignment, gold, sys)
    except EmptyAlignment:
        kappa = None
    return ScoreReport(
        mentions=mention_detection_f1(alignment),
        muc=muc(g, s),
        b_cubed=b_cubed(g, s),
        ceaf_e=ceaf_e(g, s),
        lea=lea(g, s),
        edges=relation_edge_prf(gold, sys, alignment),
        kappa=kappa,
    )


def agreement(a: Corpus, b: Corpus) -> tuple[ScoreReport, ScoreReport]:
    """Score both directions, for inter-annotator agreement."""
    return score_corpora(a, b), score_corpora(b, a)
