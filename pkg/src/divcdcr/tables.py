"""Aligned-column text tables and JSON-lines records for command output."""

from __future__ import annotations

import json
from typing import Iterable, Sequence

from .graph import DiscourseEntity, Frame, GlobalReferent, RelationStats
from .metrics import ALL_METRICS, CLUSTER_METRICS, EdgeScores, ScoreReport


def render(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    rows = [[str(c) for c in row] for row in rows]
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def json_lines(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)


def _f(x: float | None) -> str:
    return "-" if x is None else f"{x:.4f}"


# -- entity graph --------------------------------------------------------------


def entity_rows(entities: Sequence[DiscourseEntity]) -> list[tuple]:
    return [
        (e.discourse_id, e.key, len(e.clusters), e.mention_count(), "; ".join(e.names))
        for e in entities
    ]


def entities_text(entities: Sequence[DiscourseEntity], referents: Sequence[GlobalReferent]) -> str:
    out = render(("discourse", "key", "clusters", "mentions", "names"), entity_rows(entities))
    out += "\n" + render(
        ("referent", "discourses"),
        [(g.uri, ", ".join(e.discourse_id for e in g.discourse_entities)) for g in referents],
    )
    return out


def entity_records(entities: Sequence[DiscourseEntity], referents: Sequence[GlobalReferent]) -> list[dict]:
    recs = [
        {
            "type": "discourse_entity",
            "discourse_id": e.discourse_id,
            "key": e.key,
            "clusters": [
                {"document_id": c.document_id, "name": c.name, "mention_ids": list(c.mention_ids), "uri": c.uri}
                for c in e.clusters
            ],
        }
        for e in entities
    ]
    recs += [
        {"type": "global_referent", "uri": g.uri, "discourses": [e.discourse_id for e in g.discourse_entities]}
        for g in referents
    ]
    return recs


def frames_text(frames: Sequence[Frame]) -> str:
    rows = [
        (f.outlet.value, len(f.surfaces), "; ".join(f'"{s.text}"' for s in f.surfaces))
        for f in frames
    ]
    return render(("outlet", "mentions", "surfaces"), rows)


def frame_records(frames: Sequence[Frame]) -> list[dict]:
    return [
        {
            "referent_key": f.referent_key,
            "outlet": f.outlet.value,
            "surfaces": [
                {"document_id": s.document_id, "text": s.text, "entity_type": s.entity_type} for s in f.surfaces
            ],
        }
        for f in frames
    ]


def stats_text(stats: RelationStats) -> str:
    out = render(("outlet", "label", "count"), stats.rows())
    out += "\n" + render(("discourse", "relations"), stats.by_discourse.items())
    return out


def stats_records(stats: RelationStats) -> list[dict]:
    recs = [{"type": "outlet_label", "outlet": o, "label": lab, "count": n} for o, lab, n in stats.rows()]
    recs += [{"type": "discourse", "discourse_id": d, "count": n} for d, n in stats.by_discourse.items()]
    return recs


# -- scores ------------------------------------------------------------------


def score_text(report: ScoreReport, metrics: Sequence[str] = ALL_METRICS) -> str:
    rows = []
    for name in ("mentions",) + CLUSTER_METRICS:
        if name in metrics:
            p, r, f = getattr(report, name)
            rows.append((name, _f(p), _f(r), _f(f)))
    if "conll" in metrics:
        rows.append(("conll", "", "", _f(report.conll)))
    if "edges" in metrics:
        p, r, f = report.edges.micro
        rows.append(("edges", _f(p), _f(r), _f(f)))
        for label, (p, r, f) in report.edges.per_label.items():
            rows.append((f"edges:{label}", _f(p), _f(r), _f(f)))
    if "kappa" in metrics:
        rows.append(("kappa", "", "", _f(report.kappa)))
    out = render(("metric", "precision", "recall", "f1"), rows)
    if "edges" in metrics and report.edges.confusion:
        conf = [
            (g, s, n, "-" if (d := EdgeScores.precedence_distance(g, s)) is None else d)
            for (g, s), n in report.edges.confusion.items()
        ]
        out += "\n" + render(("gold", "sys", "count", "precedence_distance"), conf)
    return out
