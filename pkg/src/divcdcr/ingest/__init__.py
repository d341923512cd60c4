from .native import corpus_to_record, export_corpus, load_corpus, parse_corpus, save_corpus
from .tabular import export_tabular, import_tabular_export, read_tabular_document

__all__ = [
    "corpus_to_record",
    "export_corpus",
    "export_tabular",
    "import_tabular_export",
    "load_corpus",
    "parse_corpus",
    "read_tabular_document",
    "save_corpus",
]
