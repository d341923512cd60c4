"""
Loading and validating a corpus
===============================

The package ships a small corpus annotating the annotation scheme's own
illustrative sentences.  We load it, look at its structure and run the
validator, then break a copy on purpose to see findings.
"""

import dataclasses

from divcdcr import derive_local_clusters, load_scheme_examples, surface_text, validate_corpus
from divcdcr.model import Corpus

corpus = load_scheme_examples()
for doc in corpus.documents():
    print(doc.id, doc.outlet.value, repr(doc.text[:60]))

# mentions sharing a global entity name form a local cluster
doc = next(d for d in corpus.documents() if len(d.mentions) > 2)
print(doc.id)
for cluster in derive_local_clusters(doc):
    print(cluster.name, cluster.uri, [surface_text(doc, m.span) for m in cluster.mentions])

# the shipped corpus is clean
print("findings:", validate_corpus(corpus))

# link "the president" to a different item than the rest of its cluster
doc = corpus.document("0_L")
broken_doc = dataclasses.replace(doc, mentions=tuple(
    dataclasses.replace(m, wikidata="Q42") if m.wikidata is None else m for m in doc.mentions))
broken = Corpus.from_documents([broken_doc if d.id == doc.id else d for d in corpus.documents()])
for f in validate_corpus(broken):
    print(f.to_line())
