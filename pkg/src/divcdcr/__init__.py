"""Tools for diverse cross-document coreference annotations of news articles.

Parse, validate, link, query and score corpora whose mentions are grouped
into local clusters by a global entity name, linked to Wikidata, and
connected by near-identity relations (MET, MER, CLS, STF, DEC, BRD).
"""

from importlib import resources

from .errors import (
    AmbiguousGrouping,
    BadEnum,
    ConflictingUri,
    DivcdcrError,
    DuplicateId,
    ParseError,
    SchemaError,
    UnknownReferent,
)
from .graph import (
    DiscourseEntity,
    Frame,
    GlobalReferent,
    build_discourse_entities,
    build_global_referents,
    extract_frames,
    relation_stats,
)
from .ingest import export_corpus, import_tabular_export, load_corpus, parse_corpus, save_corpus
from .metrics import score_corpora
from .model import (
    Corpus,
    Discourse,
    Document,
    EntityType,
    LocalCluster,
    Mention,
    OutletCode,
    RelationEdge,
    RelationType,
    Span,
    ValidationFinding,
    derive_local_clusters,
    precedence_rank,
    surface_text,
)
from .validation import max_severity, validate_corpus

__version__ = "0.1.0"


def load_scheme_examples() -> Corpus:
    """Sample corpus annotating the scheme's illustrative sentences."""
    data = resources.files(__package__).joinpath("data/scheme_examples.dcdcr.json").read_bytes()
    return parse_corpus(data)


__all__ = [
    "AmbiguousGrouping",
    "BadEnum",
    "ConflictingUri",
    "Corpus",
    "Discourse",
    "DiscourseEntity",
    "DivcdcrError",
    "Document",
    "DuplicateId",
    "EntityType",
    "Frame",
    "GlobalReferent",
    "LocalCluster",
    "Mention",
    "OutletCode",
    "ParseError",
    "RelationEdge",
    "RelationType",
    "SchemaError",
    "Span",
    "UnknownReferent",
    "ValidationFinding",
    "build_discourse_entities",
    "build_global_referents",
    "derive_local_clusters",
    "export_corpus",
    "extract_frames",
    "import_tabular_export",
    "load_corpus",
    "load_scheme_examples",
    "max_severity",
    "parse_corpus",
    "precedence_rank",
    "relation_stats",
    "save_corpus",
    "score_corpora",
    "surface_text",
    "validate_corpus",
]
