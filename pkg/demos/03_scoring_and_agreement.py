"""
Scoring a system against gold
=============================

Clusterings are plain collections of mention sets, so the metrics can be
used on their own.  ``score_corpora`` aligns two annotated corpora and
reports every metric at once.
"""

from divcdcr.metrics import b_cubed, ceaf_e, conll_average, lea, muc

gold = [{"a", "b", "c"}, {"d", "e"}]
sys = [{"a", "b"}, {"c", "d", "e"}]

for fn in (muc, b_cubed, ceaf_e, lea):
    p, r, f = fn(gold, sys)
    print(f"{fn.__name__:8s} p={p:.4f} r={r:.4f} f1={f:.4f}")

print("conll", round(conll_average([muc(gold, sys), b_cubed(gold, sys), ceaf_e(gold, sys)]), 4))

# corpus level: the same text annotated twice
from divcdcr import Corpus, Document, Mention, Span, score_corpora
from divcdcr.metrics import agreement

text = "Merkel said the chancellor and Biden met the president"
spans = {"Merkel": (0, 6), "the chancellor": (12, 26), "Biden": (31, 36), "the president": (41, 54)}


def annotate(names, types):
    mentions = [Mention(f"m{i}", Span(*spans[s]), types[i], names[i]) for i, s in enumerate(spans)]
    return Corpus.from_documents([Document("0_L", "0", "L", text, tuple(mentions))])


a = annotate(["Merkel", "Merkel", "Biden", "Biden"], ["PER", "PER", "PER", "PER"])
b = annotate(["Merkel", "Merkel", "Biden", "Merkel"], ["PER", "ORG", "PER", "PER"])
report = score_corpora(a, b)
print(report.to_record())

forward, backward = agreement(a, b)
print("kappa", round(forward.kappa, 4), "conll both ways", round(forward.conll, 4), round(backward.conll, 4))
