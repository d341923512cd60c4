"""Conformance checks of a corpus against the annotation scheme.

Only structural rules are machine-checked.  Decisions that need linguistic
judgement (is this an NP, is the head identical, is this a date, which
near-identity type fits best) are left to human review; see the README
checklist.

Findings are data, never exceptions.  :func:`validate_corpus` returns them
sorted by document, rule and subject offset, so the output is identical for
identical input.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ConfigError
from .model import (
    DOCUMENT_ID_PATTERN,
    QID_PATTERN,
    Corpus,
    Document,
    EntityType,
    RelationType,
    Severity,
    ValidationFinding,
    group_by_name,
    is_edge_character,
)


@dataclass(frozen=True)
class Rule:
    id: str
    severity: Severity
    description: str


CATALOG_VERSION = "1"

RULES: dict[str, Rule] = {
    r.id: r
    for r in (
        Rule("V01", Severity.ERROR, "entity type is one of PER, ORG, GRP, GPE, LOC, OBJ"),
        Rule("V02", Severity.ERROR, "relation label is one of MET, MER, CLS, STF, DEC, BRD"),
        Rule("V03", Severity.ERROR, "mention span does not start or end with whitespace or punctuation"),
        Rule("V04", Severity.ERROR, "a local cluster has at least two mentions"),
        Rule("V05", Severity.WARNING, "a mention is in a cluster of two or more or is a relation endpoint"),
        Rule("V06", Severity.ERROR, "all mentions of a cluster share one entity type"),
        Rule("V07", Severity.WARNING, "at most one mention per cluster carries a Wikidata id"),
        Rule("V08a", Severity.ERROR, "a global entity name is linked to one Wikidata id corpus-wide"),
        Rule("V08b", Severity.WARNING, "a Wikidata id is used under one global entity name"),
        Rule("V09", Severity.WARNING, "a relation's antecedent does not start after its anaphor"),
        Rule("V10", Severity.WARNING, "at most one MET relation per ordered pair of clusters"),
        Rule("V11", Severity.ERROR, "relation endpoints are distinct mentions of the same document"),
        Rule("V12", Severity.ERROR, "Wikidata value has the form Q<digits>"),
        Rule("V13", Severity.WARNING, "no duplicate (source, target, label) relations"),
        Rule("V14", Severity.WARNING, "document id has the form <digits>_<LL|L|M|R|RR>"),
        Rule("V15", Severity.WARNING, "no two mentions share an identical span"),
        # link audit (divcdcr.wikidata.audit_corpus_links)
        Rule("L01", Severity.WARNING, "cluster Wikidata id exists"),
        Rule("L02", Severity.INFO, "cluster name shares a token with the Wikidata label"),
        Rule("L03", Severity.INFO, "unlinked cluster has a unique exact-label candidate"),
        Rule("L04", Severity.INFO, "link could not be verified (offline or service failure)"),
        Rule("L05", Severity.INFO, "Wikidata value given as a URL instead of a bare id"),
    )
}

SCHEME_RULES = tuple(r for r in RULES if r.startswith("V"))


@dataclass(frozen=True)
class ValidationConfig:
    fail_level: Severity = Severity.ERROR
    disabled_rules: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "fail_level", Severity(self.fail_level))
        object.__setattr__(self, "disabled_rules", expand_rule_ids(self.disabled_rules))


def expand_rule_ids(ids: Iterable[str]) -> frozenset[str]:
    """Check rule ids against the catalog; ``V08`` stands for both V08a and V08b."""
    out = set()
    for rid in ids:
        rid = rid.strip()
        if rid == "V08":
            out |= {"V08a", "V08b"}
        elif rid in RULES:
            out.add(rid)
        else:
            raise ConfigError(f"unknown rule id {rid!r}")
    return frozenset(out)


def finding(rule_id: str, document_id: str | None, subject: str, message: str, offset: int = -1) -> ValidationFinding:
    return ValidationFinding(rule_id, RULES[rule_id].severity, document_id, subject, message, offset)


def _edge_subject(r) -> str:
    return f"{r.source}->{r.target}:{r.label}"


def _check_document(doc: Document) -> Iterator[ValidationFinding]:
    index = doc.mention_index()
    text = doc.text

    if not DOCUMENT_ID_PATTERN.fullmatch(doc.id):
        yield finding("V14", doc.id, doc.id, "document id is not <digits>_<outlet>")

    for m in doc.mentions:
        if not isinstance(m.entity_type, EntityType):
            yield finding("V01", doc.id, m.id, f"unknown entity type {m.entity_type!r}", m.start)
        surface = text[m.start:m.end]
        if is_edge_character(surface[0]) or is_edge_character(surface[-1]):
            yield finding("V03", doc.id, m.id, f"span {surface!r} has edge whitespace or punctuation", m.start)
        if m.wikidata is not None and not QID_PATTERN.fullmatch(m.wikidata):
            yield finding("V12", doc.id, m.id, f"Wikidata value {m.wikidata!r} is not Q<digits>", m.start)

    by_span = defaultdict(list)
    for m in doc.mentions:
        by_span[m.span].append(m)
    for span, same in by_span.items():
        for m in same[1:]:
            yield finding("V15", doc.id, m.id, f"same span as {same[0].id}", span.start)

    clusters = group_by_name(doc.mentions)
    cluster_of = {m.id: name for name, members in clusters.items() for m in members}
    for name, members in clusters.items():
        subject, offset = f"cluster:{name}", members[0].start
        if len(members) < 2:
            yield finding("V04", doc.id, subject, f"cluster {name!r} has a single mention", offset)
        types = sorted({str(m.entity_type) for m in members})
        if len(types) > 1:
            yield finding("V06", doc.id, subject, f"cluster {name!r} mixes entity types {', '.join(types)}", offset)
        linked = [m.id for m in members if m.wikidata is not None]
        if len(linked) > 1:
            yield finding("V07", doc.id, subject, f"cluster {name!r} has Wikidata on {', '.join(linked)}", offset)

    endpoints = set()
    for r in doc.relations:
        src, tgt = index.get(r.source), index.get(r.target)
        offset = src.start if src else -1
        if not isinstance(r.label, RelationType):
            yield finding("V02", doc.id, _edge_subject(r), f"unknown relation label {r.label!r}", offset)
        if src is None or tgt is None or r.source == r.target:
            problem = "is a self-loop" if r.source == r.target else "has an endpoint outside the document"
            yield finding("V11", doc.id, _edge_subject(r), f"relation {problem}", offset)
            continue
        endpoints.update((r.source, r.target))
        if tgt.start > src.start:
            yield finding("V09", doc.id, _edge_subject(r), "antecedent follows its anaphor (cataphora)", offset)

    for m in doc.mentions:
        name = cluster_of.get(m.id)
        in_cluster = name is not None and len(clusters[name]) >= 2
        if not in_cluster and m.id not in endpoints:
            yield finding("V05", doc.id, m.id, "mention takes part in no cluster and no relation", m.start)

    met_pairs: Counter = Counter()
    for r in set(doc.relations):
        if r.label == RelationType.MET and r.source in cluster_of and r.target in cluster_of:
            met_pairs[(cluster_of[r.source], cluster_of[r.target])] += 1
    for (a, b), n in met_pairs.items():
        if n > 1:
            offset = clusters[a][0].start
            yield finding("V10", doc.id, f"cluster:{a}->cluster:{b}", f"{n} MET relations between the same clusters", offset)

    for r, n in Counter(doc.relations).items():
        if n > 1:
            src = index.get(r.source)
            yield finding("V13", doc.id, _edge_subject(r), f"relation occurs {n} times", src.start if src else -1)


def _check_links(corpus: Corpus) -> Iterator[ValidationFinding]:
    uris_of_name = defaultdict(set)
    names_of_uri = defaultdict(set)
    for doc in corpus.documents():
        for m in doc.mentions:
            if m.global_entity and m.wikidata:
                uris_of_name[m.global_entity].add(m.wikidata)
                names_of_uri[m.wikidata].add(m.global_entity)
    for name in sorted(uris_of_name):
        uris = sorted(uris_of_name[name])
        if len(uris) > 1:
            yield finding("V08a", None, f"name:{name}", f"name {name!r} is linked to {', '.join(uris)}")
    for uri in sorted(names_of_uri):
        names = sorted(names_of_uri[uri])
        if len(names) > 1:
            yield finding("V08b", None, f"uri:{uri}", f"{uri} is used under names {', '.join(map(repr, names))}")


def name_conflicts(corpus: Corpus) -> list[str]:
    """Global entity names linked to more than one Wikidata id."""
    return [f.subject[len("name:"):] for f in _check_links(corpus) if f.rule_id == "V08a"]


def validate_corpus(corpus: Corpus, config: ValidationConfig | None = None) -> list[ValidationFinding]:
    config = config or ValidationConfig()
    findings = [f for doc in corpus.documents() for f in _check_document(doc)]
    findings.extend(_check_links(corpus))
    findings = [f for f in findings if f.rule_id not in config.disabled_rules]
    findings.sort(key=ValidationFinding.sort_key)
    return findings


_LEVELS = ("clean", "info", "warning", "error")


def max_severity(findings: Iterable[ValidationFinding]) -> str:
    """``'clean'``, or the highest severity among *findings*."""
    level = max((f.severity.level for f in findings), default=0)
    return _LEVELS[level]


def exceeds(findings: Iterable[ValidationFinding], fail_level: Severity | str) -> bool:
    threshold = Severity(fail_level).level
    return any(f.severity.level >= threshold for f in findings)
