"""
Entities, framing and relation counts
=====================================

Local clusters are grouped into discourse entities within each discourse,
and linked entities are grouped across discourses into global referents.
"""

from divcdcr import (
    build_discourse_entities,
    build_global_referents,
    extract_frames,
    load_scheme_examples,
    relation_stats,
)
from divcdcr import tables

corpus = load_scheme_examples()
entities = build_discourse_entities(corpus)
referents = build_global_referents(corpus, entities)
print(tables.entities_text(entities, referents))

# how does each outlet refer to Joe Biden?
print(tables.frames_text(extract_frames(corpus, "Q6279")))

# near-identity relation counts by outlet and label
stats = relation_stats(corpus)
print(stats.by_label)
print(tables.stats_text(stats))
