"""Canonical quad file export/import, DOT export, and entity
description documents.

Plain RDF has no slot for validity, so each statement is written as a
quad whose fourth term is a context IRI, and the context carries the
temporal scope and provenance as ordinary triples::

    <s> <p> <o> <ctx> .
    <ctx> <..#validFrom> "1996" .
    <ctx> <..#validTo> "2000" .
    <ctx> <..#source> "recB" .
    <ctx> <..#authority> <http://...> .

validFrom/validTo are omitted on the open side and entirely for
unqualified statements. The context IRI is base/ctx/ plus the first 16
hex chars of SHA-256 over the serialized (validFrom, validTo, source,
authority), so equal scopes share one context across runs. The
validFrom/validTo/source/authority keys are a local convention of this
format, not a published vocabulary.

The export is canonical: data quads in store order, then context
metadata sorted, LF line endings, UTF-8. export(import(export(s))) is
byte-identical to export(s).
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field

from .errors import DanglingContext, NotFound, QuadParseError
from .model import (
    Datatype,
    Iri,
    Literal,
    ProvenanceTag,
    TemporalTriple,
    TimeInterval,
    TimePoint,
    Validity,
    triple_sort_key,
)
from .store import Inference, Pattern, Store
from .vocab import EntityKind, Vocabulary

_XSD = "http://www.w3.org/2001/XMLSchema#"
_XSD_BY_DATATYPE = {
    Datatype.INTEGER: _XSD + "integer",
    Datatype.YEAR: _XSD + "gYear",
    Datatype.DATE: _XSD + "date",
}
_DATATYPE_BY_XSD = {v: k for k, v in _XSD_BY_DATATYPE.items()}

_META_KEYS = ("validFrom", "validTo", "source", "authority")

_NODE_SHAPE = {
    EntityKind.PERSON: "ellipse",
    EntityKind.CORPORATE_BODY: "box",
    EntityKind.WORK: "note",
    EntityKind.GENDER: "diamond",
    EntityKind.PLACE: "hexagon",
    EntityKind.EXTERNAL_RESOURCE: "plaintext",
}

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def escape_literal(text: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in text)


def _term_text(value: Iri | Literal) -> str:
    if isinstance(value, Iri):
        return f"<{value}>"
    out = f'"{escape_literal(value.lexical)}"'
    if value.language:
        return f"{out}@{value.language}"
    if value.datatype is not Datatype.STRING:
        return f"{out}^^<{_XSD_BY_DATATYPE[value.datatype]}>"
    return out


def _validity_bounds(validity: Validity) -> tuple[str, str]:
    if validity.is_always:
        return "", ""
    iv = validity.interval
    return (
        iv.start.text() if iv.start else "",
        iv.end.text() if iv.end else "",
    )


def context_iri(store_base: Iri, validity: Validity, provenance: ProvenanceTag) -> Iri:
    valid_from, valid_to = _validity_bounds(validity)
    payload = (
        f"validFrom={valid_from}\n"
        f"validTo={valid_to}\n"
        f"source={provenance.source_record_id}\n"
        f"authority={provenance.asserting_authority}\n"
    )
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
    return Iri(f"{store_base.value.rstrip('/')}/ctx/{digest}")


def _context_meta_lines(store: Store, ctx: Iri, validity: Validity,
                        provenance: ProvenanceTag) -> list[str]:
    ns = store.vocab.namespace
    valid_from, valid_to = _validity_bounds(validity)
    lines = []
    if valid_from:
        lines.append(f'<{ctx}> <{ns}validFrom> "{valid_from}" .')
    if valid_to:
        lines.append(f'<{ctx}> <{ns}validTo> "{valid_to}" .')
    lines.append(
        f'<{ctx}> <{ns}source> "{escape_literal(provenance.source_record_id)}" .'
    )
    lines.append(f"<{ctx}> <{ns}authority> <{provenance.asserting_authority}> .")
    return lines


def _data_line(triple: TemporalTriple, ctx: Iri) -> str:
    return (
        f"<{triple.subject}> <{triple.property}> "
        f"{_term_text(triple.object)} <{ctx}> ."
    )


def export_quads(store: Store) -> str:
    data_lines = []
    meta_lines: set[str] = set()
    for triple in store.sorted_triples():
        ctx = context_iri(store.base_iri, triple.validity, triple.provenance)
        data_lines.append(_data_line(triple, ctx))
        meta_lines.update(
            _context_meta_lines(store, ctx, triple.validity, triple.provenance)
        )
    lines = data_lines + sorted(meta_lines)
    return "\n".join(lines) + "\n" if lines else ""


# -- import -------------------------------------------------------------------


def _lex_quad_line(line: str, lineno: int) -> list:
    terms = []
    i = 0
    n = len(line)
    while i < n:
        c = line[i]
        if c in " \t":
            i += 1
            continue
        if c == ".":
            if line[i:].strip() != ".":
                raise QuadParseError(lineno, "content after terminating '.'")
            return terms
        if c == "<":
            end = line.find(">", i)
            if end < 0:
                raise QuadParseError(lineno, "unterminated IRI")
            terms.append(Iri(line[i + 1 : end]))
            i = end + 1
            continue
        if c == '"':
            lexical, i = _lex_string(line, i, lineno)
            datatype = Datatype.STRING
            language = None
            if line.startswith("@", i):
                j = i + 1
                while j < n and (line[j].isalnum() or line[j] == "-"):
                    j += 1
                language = line[i + 1 : j]
                i = j
            elif line.startswith("^^<", i):
                end = line.find(">", i + 2)
                if end < 0:
                    raise QuadParseError(lineno, "unterminated datatype IRI")
                xsd = line[i + 3 : end]
                datatype = _DATATYPE_BY_XSD.get(xsd)
                if datatype is None:
                    raise QuadParseError(lineno, f"unsupported datatype <{xsd}>")
                i = end + 1
            terms.append(Literal(lexical, datatype, language))
            continue
        raise QuadParseError(lineno, f"unexpected character {c!r}")
    raise QuadParseError(lineno, "missing terminating '.'")


def _lex_string(line: str, start: int, lineno: int) -> tuple[str, int]:
    out = []
    i = start + 1
    n = len(line)
    while i < n:
        c = line[i]
        if c == "\\":
            if i + 1 >= n or line[i + 1] not in _UNESCAPES:
                raise QuadParseError(lineno, "bad escape in literal")
            out.append(_UNESCAPES[line[i + 1]])
            i += 2
            continue
        if c == '"':
            return "".join(out), i + 1
        out.append(c)
        i += 1
    raise QuadParseError(lineno, "unterminated literal")


@dataclass
class _ContextInfo:
    valid_from: str | None = None
    valid_to: str | None = None
    source: str | None = None
    authority: Iri | None = None


def import_quads(
    text: str,
    vocab: Vocabulary | None = None,
    base_iri: str | Iri | None = None,
) -> Store:
    """Rebuild a store from its canonical quad serialization.

    The base IRI and vocabulary namespace are recovered from the
    document itself when not supplied.
    """
    data: list[tuple[int, Iri, Iri, Iri | Literal, Iri]] = []
    contexts: dict[Iri, _ContextInfo] = {}
    meta_ns: str | None = None

    for lineno, raw in enumerate(text.split("\n"), start=1):
        if not raw.strip():
            continue
        terms = _lex_quad_line(raw, lineno)
        if len(terms) == 4:
            s, p, o, ctx = terms
            if not isinstance(s, Iri) or not isinstance(p, Iri) or not isinstance(ctx, Iri):
                raise QuadParseError(lineno, "subject, property, context must be IRIs")
            data.append((lineno, s, p, o, ctx))
        elif len(terms) == 3:
            ctx, key_iri, value = terms
            if not isinstance(ctx, Iri) or not isinstance(key_iri, Iri):
                raise QuadParseError(lineno, "context and key must be IRIs")
            ns, _, key = key_iri.value.rpartition("#")
            if key not in _META_KEYS:
                raise QuadParseError(lineno, f"unknown context metadata key {key!r}")
            meta_ns = meta_ns or ns + "#"
            info = contexts.setdefault(ctx, _ContextInfo())
            if key == "validFrom":
                info.valid_from = value.lexical
            elif key == "validTo":
                info.valid_to = value.lexical
            elif key == "source":
                info.source = value.lexical
            else:
                if not isinstance(value, Iri):
                    raise QuadParseError(lineno, "authority must be an IRI")
                info.authority = value
        else:
            raise QuadParseError(lineno, f"expected 3 or 4 terms, got {len(terms)}")

    if vocab is None:
        vocab = Vocabulary(meta_ns) if meta_ns else Vocabulary()
    if base_iri is None:
        base = None
        if data:
            ctx_text = data[0][4].value
            head, sep, _ = ctx_text.rpartition("/ctx/")
            if sep:
                base = Iri(head)
    else:
        base = base_iri if isinstance(base_iri, Iri) else Iri(base_iri)

    store = Store(vocab, base) if base is not None else Store(vocab)
    for lineno, s, p, o, ctx in data:
        info = contexts.get(ctx)
        if info is None or info.source is None or info.authority is None:
            raise DanglingContext(
                f"line {lineno}: context <{ctx}> has no complete metadata"
            )
        if info.valid_from is None and info.valid_to is None:
            validity = Validity()
        else:
            validity = Validity.during(
                TimeInterval(
                    TimePoint.parse(info.valid_from) if info.valid_from else None,
                    TimePoint.parse(info.valid_to) if info.valid_to else None,
                )
            )
        store.insert(
            TemporalTriple(
                subject=s,
                property=p,
                object=o,
                validity=validity,
                provenance=ProvenanceTag(info.source, info.authority),
            )
        )
    return store


# -- DOT export ---------------------------------------------------------------


def _current_label_triple(store: Store, entity: Iri) -> TemporalTriple | None:
    """Pick one label: open-ended or unqualified beats closed, later
    starts beat earlier, then lexicographic text."""
    labels = store.match(Pattern(subject=entity, property=store.vocab.expand("label")))
    if not labels:
        return None

    def rank(t):
        iv = t.validity.interval
        open_ended = iv is None or iv.end is None
        start = iv.start.first_day().toordinal() if iv is not None and iv.start else 0
        return (-int(open_ended), -start, t.object.lexical)

    return min(labels, key=rank)


def _current_label(store: Store, entity: Iri) -> str:
    triple = _current_label_triple(store, entity)
    return triple.object.lexical if triple is not None else entity.local_name()


def _dot_id(text: str) -> str:
    clean = "".join(c if c.isalnum() or c == "_" else "_" for c in text)
    if not clean or clean[0].isdigit():
        clean = "n_" + clean
    return clean


def _node_id(store: Store, entities: set[Iri]) -> dict[Iri, str]:
    by_id: dict[str, list[Iri]] = {}
    for e in sorted(entities, key=lambda i: i.value):
        by_id.setdefault(_dot_id(e.local_name()), []).append(e)
    ids = {}
    for candidate, group in by_id.items():
        if len(group) == 1:
            ids[group[0]] = candidate
        else:
            for e in group:
                prefix = e.value.rsplit("/", 2)[-2] if "/" in e.value else "x"
                ids[e] = _dot_id(f"{prefix}_{e.local_name()}")
    return ids


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(store: Store, focus: Iri | None = None, radius: int = 1) -> str:
    """DOT digraph of the entity network; literal-valued attributes and
    kind assertions (drawn as shapes) are not edges. With a focus, only
    the breadth-limited neighborhood."""
    kind_prop = store.vocab.expand("kind")
    entity_triples = [
        t
        for t in store.sorted_triples()
        if isinstance(t.object, Iri) and t.property != kind_prop
    ]

    if focus is not None:
        if radius < 1:
            raise ValueError("radius must be >= 1 when a focus is given")
        if not store.has_entity(focus):
            raise NotFound(f"<{focus}> is not in the store")
        adjacency: dict[Iri, set[Iri]] = {}
        for t in entity_triples:
            adjacency.setdefault(t.subject, set()).add(t.object)
            adjacency.setdefault(t.object, set()).add(t.subject)
        keep = {focus}
        frontier = deque([(focus, 0)])
        while frontier:
            node, depth = frontier.popleft()
            if depth == radius:
                continue
            for neighbor in adjacency.get(node, ()):
                if neighbor not in keep:
                    keep.add(neighbor)
                    frontier.append((neighbor, depth + 1))
        entity_triples = [
            t for t in entity_triples if t.subject in keep and t.object in keep
        ]
        nodes = keep
    else:
        nodes = {t.subject for t in entity_triples} | {
            t.object for t in entity_triples
        }
        nodes.update(e for k in EntityKind for e in store.entities_of_kind(k))

    ids = _node_id(store, nodes)
    lines = ["digraph etd {"]
    for entity in sorted(nodes, key=lambda i: ids[i]):
        kind = store.kind_of(entity)
        shape = _NODE_SHAPE.get(kind, "ellipse")
        label = _current_label(store, entity)
        lines.append(
            f"  {ids[entity]} [shape={shape}, label={_dot_quote(label)}];"
        )
    for t in entity_triples:
        name = t.property.local_name()
        if t.validity.is_always:
            label = name
        else:
            label = f"{name} {t.validity.interval.text()}"
        lines.append(
            f"  {ids[t.subject]} -> {ids[t.object]} [label={_dot_quote(label)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- entity descriptions -------------------------------------------------------


@dataclass
class DescriptionDocument:
    focus: Iri
    triples: list[TemporalTriple]
    neighbor_labels: dict[Iri, str] = field(default_factory=dict)


def describe_entity(store: Store, focus: Iri) -> DescriptionDocument:
    """Everything known about one entity: stored statements touching it,
    their inverse-derived flips, and one label per neighbor."""
    if not store.has_entity(focus):
        raise NotFound(f"<{focus}> is not in the store")
    as_subject = store.match(Pattern(subject=focus, inference=Inference.INVERSE))
    as_object = store.match(Pattern(object=focus, inference=Inference.INVERSE))
    merged: dict = {}
    for t in as_subject + as_object:
        key = (t.subject, t.property, t.object, t.validity, t.provenance, t.derived)
        merged.setdefault(key, t)
    triples = sorted(merged.values(), key=lambda t: (triple_sort_key(t), t.derived))

    neighbors = set()
    for t in triples:
        if t.derived:
            continue
        neighbors.add(t.subject)
        if isinstance(t.object, Iri):
            neighbors.add(t.object)
    neighbors.discard(focus)
    labels = {n: _current_label(store, n) for n in sorted(neighbors, key=lambda i: i.value)}
    return DescriptionDocument(focus=focus, triples=triples, neighbor_labels=labels)


def serialize_description(store: Store, doc: DescriptionDocument) -> str:
    """Quad serialization of a description; a strict subset of the lines
    of the full export, so any consumer of the store format can read it.
    Derived statements are not written, their stored originals are."""
    selected = {t for t in doc.triples if not t.derived}
    for neighbor in doc.neighbor_labels:
        label = _current_label_triple(store, neighbor)
        if label is not None:
            selected.add(label)
    data_lines = []
    meta_lines: set[str] = set()
    for triple in sorted(selected, key=triple_sort_key):
        ctx = context_iri(store.base_iri, triple.validity, triple.provenance)
        data_lines.append(_data_line(triple, ctx))
        meta_lines.update(
            _context_meta_lines(store, ctx, triple.validity, triple.provenance)
        )
    lines = data_lines + sorted(meta_lines)
    return "\n".join(lines) + "\n" if lines else ""
