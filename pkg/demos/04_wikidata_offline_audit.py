"""
Auditing Wikidata links without a network
=========================================

The client accepts any transport callable.  Here a tiny in-memory one
answers the two requests the audit needs; afterwards the same cache serves
an offline client.
"""

import tempfile

from divcdcr import Corpus, Document, Mention, Span
from divcdcr.wikidata import WikidataClient, audit_corpus_links

RESPONSES = {
    "Q6279": {"entities": {"Q6279": {"id": "Q6279", "labels": {"en": {"language": "en", "value": "Joe Biden"}}}}},
    "Q999999999": {"error": {"code": "no-such-entity", "info": "Could not find an entity."}},
}


def transport(url, params):
    print("  ->", params["action"], params.get("ids") or params.get("search"))
    if params["action"] == "wbgetentities":
        return 200, RESPONSES[params["ids"]]
    return 200, {"search": []}


text = "Joe Biden met Mystery Group members."
doc = Document("0_L", "0", "L", text, (
    Mention("m1", Span(0, 9), "PER", "Joe Biden", "Q6279"),
    Mention("m2", Span(14, 27), "GRP", "Mystery Group", "Q999999999"),
))
corpus = Corpus.from_documents([doc])

cache = tempfile.mkdtemp()
print("online:")
for f in audit_corpus_links(corpus, WikidataClient(cache, transport=transport, min_interval=0)):
    print(f.to_line())

print("offline, warm cache (no requests):")
for f in audit_corpus_links(corpus, WikidataClient(cache, offline=True, transport=transport)):
    print(f.to_line())
