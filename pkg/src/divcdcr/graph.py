"""Cross-document layers: discourse entities, global referents, frames, stats.

Within a discourse, local clusters are joined when they share a Wikidata id
or a global entity name; the closure of both relations is one discourse
entity.  Discourse entities with a Wikidata id are then joined across
discourses into global referents.  Entities without an id are never merged
across discourses.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable

from .errors import AmbiguousGrouping, UnknownReferent
from .model import (
    QID_PATTERN,
    Corpus,
    LocalCluster,
    OutletCode,
    RelationType,
    derive_local_clusters,
)
from .validation import name_conflicts

_OUTLET_ORDER = {o: i for i, o in enumerate(OutletCode)}


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class DiscourseEntity:
    discourse_id: str
    key: str  # Wikidata id if any member cluster has one, else the global name
    clusters: tuple[LocalCluster, ...]

    @property
    def uri(self) -> str | None:
        return self.key if any(c.uri for c in self.clusters) else None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(sorted({c.name for c in self.clusters}))

    def mention_count(self) -> int:
        return sum(len(c) for c in self.clusters)


@dataclass(frozen=True)
class GlobalReferent:
    uri: str
    discourse_entities: tuple[DiscourseEntity, ...]


@dataclass(frozen=True)
class FrameSurface:
    document_id: str
    text: str
    entity_type: str


@dataclass(frozen=True)
class Frame:
    """Word choices an outlet uses for one referent."""

    referent_key: str
    outlet: OutletCode
    surfaces: tuple[FrameSurface, ...]


def _qid_sort_key(key: str):
    if QID_PATTERN.fullmatch(key):
        return (0, int(key[1:]), key)
    return (1, 0, key)


def _group_discourse(discourse_id: str, clusters: list[LocalCluster]) -> list[DiscourseEntity]:
    uf = UnionFind(len(clusters))
    first_by_uri: dict[str, int] = {}
    first_by_name: dict[str, int] = {}
    for i, c in enumerate(clusters):
        if c.uri:
            uf.union(i, first_by_uri.setdefault(c.uri, i))
        uf.union(i, first_by_name.setdefault(c.name, i))
    groups = defaultdict(list)
    for i, c in enumerate(clusters):
        groups[uf.find(i)].append(c)
    entities = []
    for members in groups.values():
        members.sort(key=lambda c: (c.document_id, c.mention_ids))
        uris = sorted({c.uri for c in members if c.uri})
        # without name conflicts a group holds at most one uri
        key = uris[0] if uris else min(c.name for c in members)
        entities.append(DiscourseEntity(discourse_id, key, tuple(members)))
    entities.sort(key=lambda e: _qid_sort_key(e.key))
    return entities


def build_discourse_entities(corpus: Corpus) -> list[DiscourseEntity]:
    """Partition every discourse's local clusters into discourse entities.

    Raises :class:`AmbiguousGrouping` when a global name is bound to several
    Wikidata ids (rule V08a), since the grouping would then be arbitrary.
    """
    conflicts = name_conflicts(corpus)
    if conflicts:
        raise AmbiguousGrouping(conflicts)
    entities = []
    for disc in corpus.discourses:
        clusters = [c for doc in disc.documents for c in derive_local_clusters(doc)]
        entities.extend(_group_discourse(disc.id, clusters))
    return entities


def build_global_referents(corpus: Corpus, entities: Iterable[DiscourseEntity] | None = None) -> list[GlobalReferent]:
    if entities is None:
        entities = build_discourse_entities(corpus)
    by_uri = defaultdict(list)
    for e in entities:
        if e.uri:
            by_uri[e.uri].append(e)
    return [
        GlobalReferent(uri, tuple(sorted(by_uri[uri], key=lambda e: e.discourse_id)))
        for uri in sorted(by_uri, key=_qid_sort_key)
    ]


def resolve_referent(entities: Iterable[DiscourseEntity], referent: str) -> list[DiscourseEntity]:
    """Discourse entities keyed by *referent*, or containing a cluster named so."""
    return [e for e in entities if e.key == referent or referent in e.names]


def extract_frames(corpus: Corpus, referent: str) -> list[Frame]:
    """Per-outlet surface forms of every identity mention of *referent*.

    *referent* is a Wikidata id or a global entity name.  Outlets without a
    mention of the referent get no frame.  Mentions linked to the referent
    only by near-identity relations are not included.
    """
    matched = resolve_referent(build_discourse_entities(corpus), referent)
    if not matched:
        raise UnknownReferent(referent)
    wanted = {(c.document_id, mid) for e in matched for c in e.clusters for mid in c.mention_ids}

    per_outlet = defaultdict(list)
    for doc in sorted(corpus.documents(), key=lambda d: d.id):
        for m in doc.mentions:
            if (doc.id, m.id) in wanted:
                per_outlet[doc.outlet].append(FrameSurface(doc.id, doc.surface(m), str(m.entity_type)))
    return [
        Frame(referent, outlet, tuple(per_outlet[outlet]))
        for outlet in sorted(per_outlet, key=_OUTLET_ORDER.__getitem__)
    ]


@dataclass(frozen=True)
class RelationStats:
    by_outlet: dict[tuple[str, str], int]
    by_discourse: dict[str, int]

    @property
    def by_label(self) -> dict[str, int]:
        totals: Counter = Counter()
        for (_, label), n in self.by_outlet.items():
            totals[label] += n
        return {k: v for k, v in totals.items() if v}

    def rows(self) -> list[tuple[str, str, int]]:
        return [(o, lab, n) for (o, lab), n in self.by_outlet.items()]


def relation_stats(corpus: Corpus, dense: bool = False) -> RelationStats:
    """Relation counts per (outlet, label) and per discourse.

    With ``dense=True`` every outlet/label combination appears, zeros included.
    """
    tally: Counter = Counter()
    per_discourse: Counter = Counter()
    for disc in corpus.discourses:
        if dense:
            per_discourse[disc.id] += 0
        for doc in disc.documents:
            for r in doc.relations:
                tally[(doc.outlet.value, str(r.label))] += 1
                per_discourse[disc.id] += 1
    if dense:
        for outlet in OutletCode:
            for label in RelationType:
                tally[(outlet.value, label.value)] += 0
    outlet_rank = {o.value: i for i, o in enumerate(OutletCode)}
    label_rank = {lab.value: i for i, lab in enumerate(RelationType)}
    ordered = sorted(tally, key=lambda k: (outlet_rank.get(k[0], 99), label_rank.get(k[1], 99), k))
    return RelationStats({k: tally[k] for k in ordered}, dict(sorted(per_discourse.items())))
