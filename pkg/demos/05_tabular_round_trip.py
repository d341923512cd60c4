"""
Tabular exports
===============

Annotation tools export one tab-separated file per document.  We write the
sample corpus out in that format, read it back and check nothing changed.
"""

from divcdcr import export_corpus, import_tabular_export, load_scheme_examples
from divcdcr.ingest import export_tabular

corpus = load_scheme_examples()
files = {doc.id: export_tabular(doc) for doc in corpus.documents()}

first = next(iter(files))
print(files[first])

# document ids like "3_L" carry discourse and outlet; a mapping can override them
again = import_tabular_export(files)
print("identical:", export_corpus(again) == export_corpus(corpus))
