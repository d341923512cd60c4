"""Import (and export) of the annotation tool's tab-separated export.

The supported grammar is the subset of WebAnno TSV 3.3 produced by a project
with one span layer (entity type, global entity name, Wikidata) and one
relation layer (label plus a pointer to the related span)::

    #FORMAT=WebAnno TSV 3.3
    #T_SP=webanno.custom.Entity|entityType|globalEntityName|wikidata
    #T_RL=webanno.custom.Relation|label|BT_webanno.custom.Entity


    #Text=North and South Korea have resumed negotiations.
    1-1	0-5	North	GPE[1]	North and South Korea[1]	*[1]	_	_
    1-2	6-9	and	GPE[1]	North and South Korea[1]	*[1]	_	_
    1-3	10-15	South	GPE[1]|GPE[2]	North and South Korea[1]|*[2]	*[1]|*[2]	MER	1-1[1_2]
    ...

Multi-token or stacked spans carry a ``[n]`` index that joins their rows.
``_`` marks an empty cell and ``*`` an annotation whose feature is unset.

A relation cell sits on the first token of the anaphor; its pointer
``sent-tok[a_b]`` addresses the antecedent, where ``a`` is the antecedent's
span index and ``b`` the anaphor's (0 for unindexed single-token spans).

Document text is rebuilt from the token offsets: gaps are filled with spaces,
except that a gap between two sentences starts with a line break.
"""

from __future__ import annotations

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Union

from ..errors import DanglingRelationPointer, GrammarError, OffsetMismatch, SchemaError
from ..model import (
    DOCUMENT_ID_PATTERN,
    Corpus,
    Document,
    Mention,
    RelationEdge,
    Span,
    canonical_qid,
    parse_outlet,
)

log = logging.getLogger(__name__)

SPAN_LAYER = "webanno.custom.Entity"
RELATION_LAYER = "webanno.custom.Relation"

HEADER = (
    "#FORMAT=WebAnno TSV 3.3\n"
    f"#T_SP={SPAN_LAYER}|entityType|globalEntityName|wikidata\n"
    f"#T_RL={RELATION_LAYER}|label|BT_{SPAN_LAYER}\n"
)

_ESCAPES = {"\\": "\\\\", "[": "\\[", "]": "\\]", "|": "\\|", "_": "\\_", "*": "\\*", ";": "\\;"}
_UNESCAPES = {"\\": "\\", "[": "[", "]": "]", "|": "|", "_": "_", "*": "*", ";": ";", "t": "\t", "n": "\n"}
_VALUE_RE = re.compile(r"^(?P<value>.*?)(?:\[(?P<index>[0-9]+)\])?$", re.S)
_POINTER_RE = re.compile(r"^(?P<sent>[0-9]+)-(?P<tok>[0-9]+)(?:\[(?P<a>[0-9]+)_(?P<b>[0-9]+)\])?$")
_TOKEN_ID_RE = re.compile(r"^([0-9]+)-([0-9]+)$")
_OFFSETS_RE = re.compile(r"^([0-9]+)-([0-9]+)$")


def escape(value: str) -> str:
    out = "".join(_ESCAPES.get(ch, ch) for ch in value)
    return out.replace("->", "\\->").replace("\t", "\\t").replace("\n", "\\n")


def _split_unescaped(cell: str, sep: str = "|") -> list[str]:
    """Split on *sep* where it is not preceded by an escaping backslash."""
    parts, buf, i = [], [], 0
    while i < len(cell):
        ch = cell[i]
        if ch == "\\" and i + 1 < len(cell):
            buf.append(cell[i:i + 2])
            i += 2
            continue
        if ch == sep:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    parts.append("".join(buf))
    return parts


def unescape(value: str) -> str:
    out, i = [], 0
    while i < len(value):
        ch = value[i]
        if ch == "\\" and i + 1 < len(value):
            if value.startswith("->", i + 1):
                out.append("->")
                i += 3
                continue
            nxt = value[i + 1]
            if nxt in _UNESCAPES:
                out.append(_UNESCAPES[nxt])
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def _split_value(raw: str) -> tuple[str, int]:
    """``'Joe Biden[3]'`` -> ``('Joe Biden', 3)``; the index is 0 when absent.

    A trailing ``[n]`` only counts as an index when its bracket is unescaped.
    """
    match = _VALUE_RE.match(raw)
    value, index = match.group("value"), match.group("index")
    if index is not None and value.endswith("\\") and not value.endswith("\\\\"):
        return raw, 0
    return value, int(index) if index is not None else 0


@dataclass
class _Layer:
    kind: str  # "SP", "RL" or "CH"
    name: str
    features: list[str]
    first_column: int = 0


@dataclass
class _Token:
    sent: int
    tok: int
    start: int
    end: int
    text: str


@dataclass
class _SpanAcc:
    key: tuple
    index: int
    order: int
    start: int
    end: int
    entity_type: str
    name: str
    wikidata: str
    rows: list[tuple[int, int]] = field(default_factory=list)


def _parse_header(lines: list[str], file: str) -> tuple[list[_Layer], int]:
    layers: list[_Layer] = []
    i = 0
    while i < len(lines) and not lines[i].strip():
        i += 1
    if i == len(lines) or not lines[i].startswith("#FORMAT=WebAnno TSV 3"):
        raise GrammarError("missing '#FORMAT=WebAnno TSV 3.x' header", file, i + 1)
    i += 1
    column = 3
    while i < len(lines) and lines[i].startswith("#T_"):
        kind, _, decl = lines[i][3:].partition("=")
        if kind not in ("SP", "RL", "CH") or not decl:
            raise GrammarError(f"malformed layer declaration {lines[i]!r}", file, i + 1)
        name, *features = decl.split("|")
        layers.append(_Layer(kind, name, features, column))
        column += len(features)
        i += 1
    return layers, i


def _pick_layers(layers: list[_Layer], file: str) -> tuple[_Layer, _Layer | None]:
    spans = [la for la in layers if la.kind == "SP"]
    relations = [la for la in layers if la.kind == "RL"]
    if not spans:
        raise GrammarError("export declares no span layer", file)
    span_layer = spans[0]
    relation_layer = None
    for rl in relations:
        targets = [f[3:] for f in rl.features if f.startswith("BT_")]
        match = [s for s in spans if s.name in targets]
        if match:
            span_layer, relation_layer = match[0], rl
            break
    if len(span_layer.features) < 3:
        raise GrammarError(
            f"span layer {span_layer.name} needs entity type, name and Wikidata features", file
        )
    if relation_layer is not None and len(relation_layer.features) < 2:
        raise GrammarError(f"relation layer {relation_layer.name} needs a label and a pointer", file)
    for la in layers:
        if la is not span_layer and la is not relation_layer:
            log.info("%s: ignoring layer %s (%s)", file, la.name, la.kind)
    return span_layer, relation_layer


def _resolve_document_placement(doc_id: str, assignment) -> tuple[str, str]:
    """Discourse id and outlet for *doc_id* from an explicit mapping or the id itself."""
    entry = assignment.get(doc_id) if assignment else None
    match = DOCUMENT_ID_PATTERN.fullmatch(doc_id)
    if isinstance(entry, Mapping):
        discourse = entry.get("discourse")
        outlet = entry.get("outlet") or (match.group(2) if match else None)
    else:
        discourse = entry if entry is not None else (match.group(1) if match else None)
        outlet = match.group(2) if match else None
    if discourse is None or outlet is None:
        raise SchemaError(
            doc_id, "document id is not <digits>_<outlet> and has no discourse/outlet mapping"
        )
    return str(discourse), outlet


def read_tabular_document(
    doc_id: str, source: Union[bytes, str], discourse_id: str, outlet: str
) -> Document:
    """Parse a single export file into a :class:`Document`."""
    file = doc_id
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise GrammarError(f"not valid UTF-8 at byte {exc.start}", file) from None
    lines = source.replace("\r\n", "\n").split("\n")
    layers, i = _parse_header(lines, file)
    span_layer, relation_layer = _pick_layers(layers, file)
    n_columns = 3 + sum(len(la.features) for la in layers)

    tokens: dict[tuple[int, int], _Token] = {}
    spans: dict[tuple, _SpanAcc] = {}
    pending: list[tuple[int, tuple[int, int], str, str]] = []  # (line, row, label, pointer)
    sentence_text: list[str] = []
    sentence_start: int | None = None
    last_end = -1

    for lineno in range(i + 1, len(lines) + 1):
        line = lines[lineno - 1]
        if not line.strip():
            sentence_text, sentence_start = [], None
            continue
        if line.startswith("#Text="):
            sentence_text.append(line[len("#Text="):])
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) == n_columns + 1 and cols[-1] == "":
            cols.pop()
        if len(cols) != n_columns:
            raise GrammarError(f"expected {n_columns} columns, found {len(cols)}", file, lineno)
        tid = _TOKEN_ID_RE.match(cols[0])
        if not tid:
            raise GrammarError(f"bad token id {cols[0]!r} (sub-tokens are not supported)", file, lineno)
        off = _OFFSETS_RE.match(cols[1])
        if not off:
            raise GrammarError(f"bad offsets {cols[1]!r}", file, lineno)
        row = (int(tid.group(1)), int(tid.group(2)))
        start, end = int(off.group(1)), int(off.group(2))
        text = unescape(cols[2])
        if row in tokens:
            raise GrammarError(f"duplicate token id {cols[0]}", file, lineno)
        if not text:
            raise GrammarError("empty token", file, lineno)
        if end - start != len(text) or start < last_end:
            raise OffsetMismatch(
                f"token {text!r} declared at {start}-{end} (previous token ended at {last_end})",
                file, lineno,
            )
        if sentence_start is None:
            sentence_start = start
        if sentence_text:
            joined = "\n".join(sentence_text)
            rel = start - sentence_start
            if joined[rel:rel + len(text)] != text:
                raise OffsetMismatch(
                    f"token {text!r} does not occur at offset {rel} of the sentence text", file, lineno
                )
        last_end = end
        tokens[row] = _Token(row[0], row[1], start, end, text)

        type_col, name_col, wd_col = (cols[span_layer.first_column + k] for k in range(3))
        if type_col != "_":
            _collect_spans(spans, row, start, end, type_col, name_col, wd_col, file, lineno)
        elif name_col != "_" or wd_col != "_":
            raise GrammarError("span feature columns disagree on annotation presence", file, lineno)

        if relation_layer is not None:
            label_idx = relation_layer.first_column
            ptr_pos = next(k for k, f in enumerate(relation_layer.features) if f.startswith("BT_"))
            label_pos = next(k for k, f in enumerate(relation_layer.features) if not f.startswith("BT_"))
            label_col = cols[label_idx + label_pos]
            ptr_col = cols[label_idx + ptr_pos]
            if (label_col == "_") != (ptr_col == "_"):
                raise GrammarError("relation columns disagree on annotation presence", file, lineno)
            if ptr_col != "_":
                labels, ptrs = _split_unescaped(label_col), _split_unescaped(ptr_col)
                if len(labels) != len(ptrs):
                    raise GrammarError("relation label and pointer counts differ", file, lineno)
                for lab, ptr in zip(labels, ptrs):
                    pending.append((lineno, row, lab, ptr))

    mentions, by_index, by_token = _build_mentions(spans)
    relations = []
    for lineno, row, raw_label, raw_ptr in pending:
        match = _POINTER_RE.match(raw_ptr)
        if not match:
            raise GrammarError(f"bad relation pointer {raw_ptr!r}", file, lineno)
        target_row = (int(match.group("sent")), int(match.group("tok")))
        target_idx, source_idx = int(match.group("a") or 0), int(match.group("b") or 0)
        if target_row not in tokens:
            raise DanglingRelationPointer(f"pointer {raw_ptr} names no token", file, lineno)
        source = _find_span(by_index, by_token, row, source_idx)
        target = _find_span(by_index, by_token, target_row, target_idx)
        if source is None or target is None:
            missing = "anaphor" if source is None else "antecedent"
            raise DanglingRelationPointer(f"pointer {raw_ptr} resolves no {missing} span", file, lineno)
        label = unescape(raw_label)
        relations.append(RelationEdge(source, target, "" if label == "*" else label))

    text = _rebuild_text(tokens.values())
    return Document(doc_id, discourse_id, outlet, text, tuple(mentions), tuple(relations))


def _collect_spans(spans, row, start, end, type_col, name_col, wd_col, file, lineno):
    types, names, wds = (_split_unescaped(c) for c in (type_col, name_col, wd_col))
    if not len(types) == len(names) == len(wds):
        raise GrammarError("stacked span features have different lengths", file, lineno)
    for pos, (t, n, w) in enumerate(zip(types, names, wds)):
        (t, ti), (n, ni), (w, wi) = _split_value(t), _split_value(n), _split_value(w)
        if not ti == ni == wi:
            raise GrammarError("span indices differ across feature columns", file, lineno)
        feats = tuple("" if v == "*" else unescape(v) for v in (t, n, w))
        key = ("idx", ti) if ti else ("tok", row, pos)
        acc = spans.get(key)
        if acc is None:
            spans[key] = _SpanAcc(key, ti, len(spans), start, end, *feats, rows=[row])
            continue
        if (acc.entity_type, acc.name, acc.wikidata) != feats:
            raise GrammarError(f"span [{ti}] has inconsistent feature values", file, lineno)
        acc.start, acc.end = min(acc.start, start), max(acc.end, end)
        acc.rows.append(row)


def _build_mentions(spans: dict[tuple, _SpanAcc]):
    ordered = sorted(spans.values(), key=lambda s: (s.start, s.end, s.order))
    mentions, by_index, by_token = [], {}, defaultdict(list)
    for n, acc in enumerate(ordered, 1):
        mid = f"m{n}"
        wikidata = acc.wikidata
        if wikidata:
            qid = canonical_qid(wikidata)
            if qid != wikidata:
                log.info("canonicalised Wikidata value %r to %s", wikidata, qid)
            wikidata = qid
        mentions.append(Mention(mid, Span(acc.start, acc.end), acc.entity_type, acc.name or None, wikidata or None))
        if acc.index:
            by_index[acc.index] = (mid, set(acc.rows))
        else:
            by_token[acc.rows[0]].append(mid)
    return mentions, by_index, by_token


def _find_span(by_index, by_token, row, index) -> str | None:
    if index:
        found = by_index.get(index)
        return found[0] if found and row in found[1] else None
    candidates = by_token.get(row, [])
    return candidates[0] if len(candidates) == 1 else None


def _rebuild_text(tokens) -> str:
    tokens = list(tokens)
    if not tokens:
        return ""
    chars = [" "] * max(t.end for t in tokens)
    for t in tokens:
        chars[t.start:t.end] = t.text
    tokens.sort(key=lambda t: t.start)
    for prev, cur in zip(tokens, tokens[1:]):
        if cur.sent != prev.sent and cur.start > prev.end:
            chars[prev.end] = "\n"
    return "".join(chars)


def import_tabular_export(
    files: Mapping[str, Union[bytes, str]],
    discourse_assignment: Mapping[str, Union[str, Mapping[str, str]]] | None = None,
) -> Corpus:
    """Build a corpus from export files keyed by document id.

    ``discourse_assignment`` maps a document id to its discourse id, or to a
    ``{"discourse": ..., "outlet": ...}`` object for ids that do not follow
    the ``<digits>_<outlet>`` convention.
    """
    documents = []
    for doc_id in sorted(files):
        discourse, outlet = _resolve_document_placement(doc_id, discourse_assignment)
        documents.append(read_tabular_document(doc_id, files[doc_id], discourse, parse_outlet(outlet)))
    return Corpus.from_documents(documents)


# -- export ------------------------------------------------------------------


def _tokenize(doc: Document) -> list[tuple[int, int]]:
    cuts = {b for m in doc.mentions for b in (m.span.start, m.span.end)}
    tokens, start = [], None
    for i, ch in enumerate(doc.text):
        if ch.isspace():
            if start is not None:
                tokens.append((start, i))
                start = None
            continue
        if start is not None and i in cuts:
            tokens.append((start, i))
            start = None
        if start is None:
            start = i
    if start is not None:
        tokens.append((start, len(doc.text)))
    return tokens


def export_tabular(doc: Document) -> str:
    """Write *doc* in the grammar read by :func:`read_tabular_document`.

    One sentence per line of text.  Every relation endpoint must be a mention
    of the document.
    """
    tokens = _tokenize(doc)
    sentences: list[list[tuple[int, int]]] = []
    line_of = [0] * (len(doc.text) + 1)
    line = 0
    for i, ch in enumerate(doc.text):
        line_of[i] = line
        if ch == "\n":
            line += 1
    current = None
    for tok in tokens:
        if current is None or line_of[tok[0]] != current:
            sentences.append([])
            current = line_of[tok[0]]
        sentences[-1].append(tok)

    address = {}
    for s, sent in enumerate(sentences, 1):
        for t, tok in enumerate(sent, 1):
            address[tok] = (s, t)

    covering: dict[tuple[int, int], list[Mention]] = defaultdict(list)
    for m in doc.mentions:
        for tok in tokens:
            if m.span.start <= tok[0] and tok[1] <= m.span.end:
                covering[tok].append(m)
    index: dict[str, int] = {}
    for m in doc.mentions:
        toks = [tok for tok in tokens if m.span.start <= tok[0] and tok[1] <= m.span.end]
        stacked = any(len(covering[tok]) > 1 for tok in toks)
        if len(toks) > 1 or stacked:
            index[m.id] = len(index) + 1
    first_token = {}
    for tok in tokens:
        for m in covering[tok]:
            first_token.setdefault(m.id, tok)

    edges_at: dict[tuple[int, int], list[tuple[str, str]]] = defaultdict(list)
    for r in doc.relations:
        if r.source not in first_token or r.target not in first_token:
            raise ValueError(f"relation {r.source}->{r.target} has an endpoint outside the document")
        s, t = address[first_token[r.target]]
        a, b = index.get(r.target, 0), index.get(r.source, 0)
        ptr = f"{s}-{t}" + (f"[{a}_{b}]" if a or b else "")
        edges_at[first_token[r.source]].append((escape(str(r.label)) or "*", ptr))

    def feature(value, m):
        cell = escape(value) if value else "*"
        return cell + (f"[{index[m.id]}]" if m.id in index else "")

    out = [HEADER, "\n"]
    for s, sent in enumerate(sentences, 1):
        out.append(f"\n#Text={doc.text[sent[0][0]:sent[-1][1]]}\n")
        for t, tok in enumerate(sent, 1):
            ms = covering[tok]
            cells = [f"{s}-{t}", f"{tok[0]}-{tok[1]}", escape(doc.text[tok[0]:tok[1]])]
            if ms:
                cells.append("|".join(feature(str(m.entity_type), m) for m in ms))
                cells.append("|".join(feature(m.global_entity, m) for m in ms))
                cells.append("|".join(feature(m.wikidata, m) for m in ms))
            else:
                cells += ["_", "_", "_"]
            rels = edges_at.get(tok)
            if rels:
                cells.append("|".join(lab for lab, _ in rels))
                cells.append("|".join(ptr for _, ptr in rels))
            else:
                cells += ["_", "_"]
            out.append("\t".join(cells) + "\n")
    return "".join(out)
