"""Domain types of the diverse cross-document coreference scheme.

The layers are mention -> local cluster (per document) -> discourse entity
(per discourse, see :mod:`divcdcr.graph`) -> global referent (per Wikidata id).

Identity is never stored as an edge: mentions that share a global entity name
inside one document form a local cluster.  Only near-identity and bridging
links are explicit :class:`RelationEdge` objects.

All types are frozen.  Containers normalise their element order on
construction, so two corpora holding the same annotations compare equal no
matter how they were assembled.
"""

from __future__ import annotations

import re
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Union

from .errors import BadEnum, ConflictingUri, DuplicateId, OutOfBounds, SchemaError

FORMAT_VERSION = "1.0"

QID_PATTERN = re.compile(r"Q[0-9]+")
DOCUMENT_ID_PATTERN = re.compile(r"([0-9]+)_(LL|L|M|R|RR)")


class OutletCode(str, Enum):
    """Political-leaning code of the newspaper a document comes from."""

    LL = "LL"
    L = "L"
    M = "M"
    R = "R"
    RR = "RR"

    def __str__(self) -> str:
        return self.value


class EntityType(str, Enum):
    PER = "PER"
    ORG = "ORG"
    GRP = "GRP"
    GPE = "GPE"
    LOC = "LOC"
    OBJ = "OBJ"

    def __str__(self) -> str:
        return self.value


class RelationType(str, Enum):
    MET = "MET"  # metonymy
    MER = "MER"  # meronymy
    CLS = "CLS"  # class
    STF = "STF"  # spatio-temporal function
    DEC = "DEC"  # declarative
    BRD = "BRD"  # bridging

    def __str__(self) -> str:
        return self.value


#: Pseudo-label for identity, which is expressed through shared names.
IDENTITY = "ID"

_PRECEDENCE = {
    IDENTITY: 0,
    "MET": 1,
    "MER": 2,
    "CLS": 3,
    "STF": 3,
    "DEC": 4,
    "BRD": 5,
}


def precedence_rank(label: RelationType | str) -> int:
    """Preference rank of a relation label when annotators are in doubt.

    Lower is preferred: identity, then MET, MER, CLS, DEC and BRD last.
    STF is not ordered by the guidelines and shares rank 3 with CLS.
    """
    key = label.value if isinstance(label, Enum) else label
    try:
        return _PRECEDENCE[key]
    except (KeyError, TypeError):
        raise BadEnum(label, "relation label") from None


def _coerce(enum_cls: type[Enum], value):
    """Return the enum member for *value* if it has one, else *value* unchanged."""
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError:
        return value


def parse_outlet(value: str) -> OutletCode:
    try:
        return OutletCode(value)
    except ValueError:
        raise BadEnum(value, "outlet") from None


def is_edge_character(ch: str) -> bool:
    """True for characters that may not open or close a mention span."""
    return ch.isspace() or unicodedata.category(ch).startswith("P")


@dataclass(frozen=True, order=True)
class Span:
    """Half-open code-point interval ``[start, end)`` into a document text."""

    start: int
    end: int

    def __len__(self) -> int:
        return self.end - self.start

    def contains(self, other: Span) -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: Span) -> bool:
        return self.start < other.end and other.start < self.end

    def check(self, length: int) -> None:
        if not (0 <= self.start < self.end <= length):
            raise OutOfBounds(self.start, self.end, length)


@dataclass(frozen=True)
class Mention:
    """A marked text span.

    ``entity_type`` holds an :class:`EntityType` member when the value is in
    the closed set and the raw string otherwise; rule V01 reports the latter.
    Empty strings in ``global_entity``/``wikidata`` are normalised to None.
    """

    id: str
    span: Span
    entity_type: Union[EntityType, str]
    global_entity: str | None = None
    wikidata: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "entity_type", _coerce(EntityType, self.entity_type))
        if self.global_entity == "":
            object.__setattr__(self, "global_entity", None)
        if self.wikidata == "":
            object.__setattr__(self, "wikidata", None)

    @property
    def start(self) -> int:
        return self.span.start

    @property
    def end(self) -> int:
        return self.span.end


@dataclass(frozen=True)
class RelationEdge:
    """Directed link from an anaphor (``source``) to its antecedent (``target``)."""

    source: str
    target: str
    label: Union[RelationType, str]

    def __post_init__(self):
        object.__setattr__(self, "label", _coerce(RelationType, self.label))

    def sort_key(self) -> tuple[str, str, str]:
        return (self.source, self.target, str(self.label))


def _mention_key(m: Mention) -> tuple[int, int, str]:
    return (m.span.start, m.span.end, m.id)


@dataclass(frozen=True)
class Document:
    id: str
    discourse_id: str
    outlet: OutletCode
    text: str
    mentions: tuple[Mention, ...] = ()
    relations: tuple[RelationEdge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "outlet", parse_outlet(self.outlet))
        mentions = tuple(sorted(self.mentions, key=_mention_key))
        seen = set()
        for m in mentions:
            if m.id in seen:
                raise DuplicateId(m.id)
            seen.add(m.id)
            m.span.check(len(self.text))
        object.__setattr__(self, "mentions", mentions)
        object.__setattr__(
            self, "relations", tuple(sorted(self.relations, key=RelationEdge.sort_key))
        )

    def mention_index(self) -> dict[str, Mention]:
        return {m.id: m for m in self.mentions}

    def surface(self, mention: Mention) -> str:
        return surface_text(self, mention.span)


@dataclass(frozen=True)
class Discourse:
    """All documents reporting on one happening."""

    id: str
    documents: tuple[Document, ...] = ()

    def __post_init__(self):
        docs = tuple(sorted(self.documents, key=lambda d: d.id))
        for d in docs:
            if d.discourse_id != self.id:
                raise SchemaError(
                    f"discourses[{self.id}].documents[{d.id}]",
                    f"document belongs to discourse {d.discourse_id!r}",
                )
        object.__setattr__(self, "documents", docs)


@dataclass(frozen=True)
class Corpus:
    version: str = FORMAT_VERSION
    discourses: tuple[Discourse, ...] = ()

    def __post_init__(self):
        discourses = tuple(sorted(self.discourses, key=lambda d: d.id))
        seen_disc, seen_doc = set(), set()
        for disc in discourses:
            if disc.id in seen_disc:
                raise DuplicateId(disc.id)
            seen_disc.add(disc.id)
            for doc in disc.documents:
                if doc.id in seen_doc:
                    raise DuplicateId(doc.id)
                seen_doc.add(doc.id)
        object.__setattr__(self, "discourses", discourses)

    @classmethod
    def from_documents(cls, documents: Iterable[Document], version: str = FORMAT_VERSION) -> Corpus:
        by_discourse: dict[str, list[Document]] = defaultdict(list)
        for doc in documents:
            by_discourse[doc.discourse_id].append(doc)
        return cls(
            version=version,
            discourses=tuple(Discourse(k, tuple(v)) for k, v in by_discourse.items()),
        )

    def documents(self) -> Iterator[Document]:
        for disc in self.discourses:
            yield from disc.documents

    def document(self, document_id: str) -> Document:
        for doc in self.documents():
            if doc.id == document_id:
                return doc
        raise KeyError(document_id)


@dataclass(frozen=True)
class LocalCluster:
    """Identity mentions of one referent inside one document."""

    document_id: str
    name: str
    mention_ids: tuple[str, ...]
    uri: str | None = None

    def __len__(self) -> int:
        return len(self.mention_ids)


class Severity(str, Enum):
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"

    def __str__(self) -> str:
        return self.value

    @property
    def level(self) -> int:
        return _SEVERITY_LEVEL[self]


_SEVERITY_LEVEL = {Severity.INFO: 1, Severity.WARNING: 2, Severity.ERROR: 3}


@dataclass(frozen=True)
class ValidationFinding:
    rule_id: str
    severity: Severity
    document_id: str | None
    subject: str
    message: str
    #: code-point offset of the subject, used only for ordering; -1 if none
    offset: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "severity", Severity(self.severity))

    def sort_key(self) -> tuple:
        return (self.document_id or "", self.rule_id, self.offset, self.subject, self.message)

    def to_record(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "severity": self.severity.value,
            "document_id": self.document_id,
            "subject": self.subject,
            "message": self.message,
            "offset": self.offset,
        }

    @classmethod
    def from_record(cls, record: dict) -> ValidationFinding:
        return cls(**record)

    def to_line(self) -> str:
        return f"{self.rule_id} {self.severity.value} {self.document_id or '-'} {self.subject} {self.message}"


# -- derivations -------------------------------------------------------------


def surface_text(document: Document | str, span: Span) -> str:
    """Exact code-point slice of the document text covered by *span*."""
    text = document if isinstance(document, str) else document.text
    span.check(len(text))
    return text[span.start:span.end]


def group_by_name(mentions: Iterable[Mention]) -> dict[str, list[Mention]]:
    """Named mentions keyed by global entity name, each list in document order."""
    groups: dict[str, list[Mention]] = defaultdict(list)
    for m in mentions:
        if m.global_entity:
            groups[m.global_entity].append(m)
    for members in groups.values():
        members.sort(key=_mention_key)
    return dict(groups)


def derive_local_clusters(document: Document) -> list[LocalCluster]:
    """One cluster per distinct global entity name, ordered by first mention.

    Raises :class:`ConflictingUri` when two members carry different Wikidata ids.
    """
    clusters = []
    for name, members in group_by_name(document.mentions).items():
        uri = None
        for m in members:
            if m.wikidata is None:
                continue
            if uri is not None and m.wikidata != uri:
                raise ConflictingUri(name, uri, m.wikidata)
            uri = m.wikidata
        clusters.append(
            LocalCluster(document.id, name, tuple(m.id for m in members), uri)
        )
    first = {m.id: _mention_key(m) for m in document.mentions}
    clusters.sort(key=lambda c: (first[c.mention_ids[0]], c.name))
    return clusters


def canonical_qid(value: str) -> str:
    """Strip a Wikidata entity URL down to its bare id; other values pass through."""
    match = re.fullmatch(r"https?://(?:www\.)?wikidata\.org/(?:entity|wiki)/(Q[0-9]+)", value.strip())
    return match.group(1) if match else value
