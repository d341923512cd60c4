"""Reader and writer for the native ``.dcdcr.json`` corpus format.

Layout::

    {"version": "1.0",
     "discourses": [
       {"id": "0",
        "documents": [
          {"id": "0_L", "outlet": "L", "text": "...",
           "mentions": [{"id", "start", "end", "entity_type",
                         "global_entity", "wikidata"}, ...],
           "relations": [{"source", "target", "label"}, ...]}]}]}

Every key is required and unknown keys are rejected.  Absent optional values
are written as empty strings.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Any, Union

from ..errors import BadEnum, CorpusSyntaxError, DuplicateId, SchemaError
from ..model import (
    FORMAT_VERSION,
    Corpus,
    Discourse,
    Document,
    EntityType,
    Mention,
    OutletCode,
    RelationEdge,
    RelationType,
    Span,
)

Source = Union[bytes, str, IO[bytes], IO[str]]

_TOP_KEYS = ("version", "discourses")
_DISCOURSE_KEYS = ("id", "documents")
_DOCUMENT_KEYS = ("id", "outlet", "text", "mentions", "relations")
_MENTION_KEYS = ("id", "start", "end", "entity_type", "global_entity", "wikidata")
_RELATION_KEYS = ("source", "target", "label")


def _no_duplicate_keys(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise CorpusSyntaxError(f"duplicate key {key!r}")
        obj[key] = value
    return obj


def _object(value: Any, path: str, keys: tuple[str, ...]) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, f"expected an object, got {type(value).__name__}")
    unknown = sorted(set(value) - set(keys))
    if unknown:
        raise SchemaError(path, f"unknown key(s) {', '.join(map(repr, unknown))}")
    missing = [k for k in keys if k not in value]
    if missing:
        raise SchemaError(path, f"missing key(s) {', '.join(map(repr, missing))}")
    return value


def _string(value: Any, path: str, *, nonempty: bool = False) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, f"expected a string, got {type(value).__name__}")
    if nonempty and not value:
        raise SchemaError(path, "must not be empty")
    try:
        value.encode("utf-8")
    except UnicodeEncodeError:
        raise SchemaError(path, "contains an unpaired surrogate escape") from None
    return value


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {type(value).__name__}")
    return value


def _array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, f"expected an array, got {type(value).__name__}")
    return value


def _member(enum_cls, value: Any, path: str, field: str):
    _string(value, path)
    try:
        return enum_cls(value)
    except ValueError:
        raise BadEnum(value, field) from None


def _read_mention(raw: Any, path: str, text_length: int) -> Mention:
    obj = _object(raw, path, _MENTION_KEYS)
    start = _integer(obj["start"], f"{path}.start")
    end = _integer(obj["end"], f"{path}.end")
    if not 0 <= start < end <= text_length:
        raise SchemaError(path, f"span [{start},{end}) outside text of length {text_length}")
    return Mention(
        id=_string(obj["id"], f"{path}.id", nonempty=True),
        span=Span(start, end),
        entity_type=_member(EntityType, obj["entity_type"], f"{path}.entity_type", "entity_type"),
        global_entity=_string(obj["global_entity"], f"{path}.global_entity") or None,
        wikidata=_string(obj["wikidata"], f"{path}.wikidata") or None,
    )


def _read_relation(raw: Any, path: str) -> RelationEdge:
    obj = _object(raw, path, _RELATION_KEYS)
    return RelationEdge(
        source=_string(obj["source"], f"{path}.source", nonempty=True),
        target=_string(obj["target"], f"{path}.target", nonempty=True),
        label=_member(RelationType, obj["label"], f"{path}.label", "label"),
    )


def _read_document(raw: Any, path: str, discourse_id: str) -> Document:
    obj = _object(raw, path, _DOCUMENT_KEYS)
    doc_id = _string(obj["id"], f"{path}.id", nonempty=True)
    outlet = _member(OutletCode, obj["outlet"], f"{path}.outlet", "outlet")
    text = _string(obj["text"], f"{path}.text")
    mentions = []
    seen = set()
    for i, raw_m in enumerate(_array(obj["mentions"], f"{path}.mentions")):
        m = _read_mention(raw_m, f"{path}.mentions[{i}]", len(text))
        if m.id in seen:
            raise DuplicateId(m.id)
        seen.add(m.id)
        mentions.append(m)
    relations = [
        _read_relation(raw_r, f"{path}.relations[{i}]")
        for i, raw_r in enumerate(_array(obj["relations"], f"{path}.relations"))
    ]
    return Document(doc_id, discourse_id, outlet, text, tuple(mentions), tuple(relations))


def _decode(source: Source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray, memoryview)):
        try:
            return bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusSyntaxError(f"input is not valid UTF-8 at byte {exc.start}") from None
    return source


def parse_corpus(source: Source) -> Corpus:
    """Parse a native corpus file.

    Structural invariants (id uniqueness, span bounds, closed vocabularies) are
    enforced here.  Annotation-scheme rules are left to
    :func:`divcdcr.validation.validate_corpus`.
    """
    text = _decode(source)
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise CorpusSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    except RecursionError:
        raise CorpusSyntaxError("nesting too deep") from None

    top = _object(data, "$", _TOP_KEYS)
    version = _string(top["version"], "$.version")
    if version != FORMAT_VERSION:
        raise SchemaError("$.version", f"unsupported version {version!r}")

    discourses = []
    seen_discourses, seen_documents = set(), set()
    for i, raw_d in enumerate(_array(top["discourses"], "$.discourses")):
        path = f"$.discourses[{i}]"
        obj = _object(raw_d, path, _DISCOURSE_KEYS)
        disc_id = _string(obj["id"], f"{path}.id", nonempty=True)
        if disc_id in seen_discourses:
            raise DuplicateId(disc_id)
        seen_discourses.add(disc_id)
        documents = []
        for j, raw_doc in enumerate(_array(obj["documents"], f"{path}.documents")):
            doc = _read_document(raw_doc, f"{path}.documents[{j}]", disc_id)
            if doc.id in seen_documents:
                raise DuplicateId(doc.id)
            seen_documents.add(doc.id)
            documents.append(doc)
        discourses.append(Discourse(disc_id, tuple(documents)))
    return Corpus(version, tuple(discourses))


def _mention_record(m: Mention) -> dict:
    return {
        "id": m.id,
        "start": m.span.start,
        "end": m.span.end,
        "entity_type": str(m.entity_type),
        "global_entity": m.global_entity or "",
        "wikidata": m.wikidata or "",
    }


def corpus_to_record(corpus: Corpus) -> dict:
    return {
        "version": corpus.version,
        "discourses": [
            {
                "id": disc.id,
                "documents": [
                    {
                        "id": doc.id,
                        "outlet": doc.outlet.value,
                        "text": doc.text,
                        "mentions": [_mention_record(m) for m in doc.mentions],
                        "relations": [
                            {"source": r.source, "target": r.target, "label": str(r.label)}
                            for r in doc.relations
                        ],
                    }
                    for doc in disc.documents
                ],
            }
            for disc in corpus.discourses
        ],
    }


def export_corpus(corpus: Corpus) -> bytes:
    """Serialise *corpus* deterministically (UTF-8, two-space indent, final newline)."""
    payload = json.dumps(corpus_to_record(corpus), ensure_ascii=False, indent=2)
    return (payload + "\n").encode("utf-8")


def load_corpus(path: str | Path) -> Corpus:
    return parse_corpus(Path(path).read_bytes())


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_bytes(export_corpus(corpus))
