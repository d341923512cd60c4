"""Exception hierarchy shared by all divcdcr modules."""

from __future__ import annotations


class DivcdcrError(Exception):
    """Base class for every error raised by this package."""


# -- data model -------------------------------------------------------------


class OutOfBounds(DivcdcrError, ValueError):
    def __init__(self, start: int, end: int, length: int):
        self.start, self.end, self.length = start, end, length
        super().__init__(f"span [{start},{end}) invalid for text of length {length}")


class ConflictingUri(DivcdcrError):
    def __init__(self, cluster: str, qid1: str, qid2: str):
        self.cluster, self.qid1, self.qid2 = cluster, qid1, qid2
        super().__init__(f"cluster {cluster!r} carries two Wikidata ids: {qid1}, {qid2}")


# -- ingest ------------------------------------------------------------------


class ParseError(DivcdcrError):
    """Any failure to read a corpus or an export file."""


class CorpusSyntaxError(ParseError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class SchemaError(ParseError):
    def __init__(self, path: str, reason: str):
        self.path, self.reason = path, reason
        super().__init__(f"{path}: {reason}")


class DuplicateId(ParseError, ValueError):
    def __init__(self, id: str):
        self.id = id
        super().__init__(f"duplicate id {id!r}")


class BadEnum(ParseError, ValueError):
    def __init__(self, value: object, field: str):
        self.value, self.field = value, field
        super().__init__(f"{value!r} is not a valid {field}")


class GrammarError(ParseError):
    def __init__(self, message: str, file: str | None = None, line: int | None = None):
        self.file, self.line = file, line
        loc = ":".join(str(x) for x in (file, line) if x is not None)
        super().__init__(f"{loc}: {message}" if loc else message)


class DanglingRelationPointer(GrammarError):
    pass


class OffsetMismatch(GrammarError):
    pass


# -- validation / graph / metrics -------------------------------------------


class ConfigError(DivcdcrError, ValueError):
    pass


class AmbiguousGrouping(DivcdcrError):
    def __init__(self, names: list[str]):
        self.names = names
        super().__init__(
            "global entity names bound to several Wikidata ids: " + ", ".join(names)
        )


class UnknownReferent(DivcdcrError, LookupError):
    def __init__(self, referent: str):
        self.referent = referent
        super().__init__(f"no discourse entity matches {referent!r}")


class TextMismatch(DivcdcrError):
    def __init__(self, document_id: str):
        self.document_id = document_id
        super().__init__(f"document {document_id!r} has different text in the two corpora")


class EmptyAlignment(DivcdcrError, ValueError):
    def __init__(self):
        super().__init__("no aligned mention pairs; kappa is undefined")


# -- wikidata ----------------------------------------------------------------


class WikidataError(DivcdcrError):
    pass


class NetworkError(WikidataError):
    pass


class ServiceError(WikidataError):
    def __init__(self, status: int, detail: str = ""):
        self.status = status
        super().__init__(f"service answered {status}" + (f": {detail}" if detail else ""))


class OfflineMiss(WikidataError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"offline mode and no cached entry for {key!r}")
