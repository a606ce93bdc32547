import random
import re

import pytest

from etdgraph.errors import DanglingContext, NotFound, QuadParseError
from etdgraph.graphio import (
    describe_entity,
    escape_literal,
    export_dot,
    export_quads,
    import_quads,
    serialize_description,
)
from etdgraph.ingest import parse_records, records_to_graph
from etdgraph.model import Iri, Literal, ProvenanceTag, TemporalTriple, Validity
from etdgraph.store import Store
from etdgraph.vocab import EntityKind

from oracles import AUTHORITY, rand_store

BASE = "http://example.org/etd"


def one_triple_store(validity=Validity()):
    store = Store(base_iri=BASE)
    v = store.vocab
    body = Iri(f"{BASE}/body/facB")
    store.insert(TemporalTriple(
        body, v.expand("kind"), v.class_iri(EntityKind.CORPORATE_BODY),
        validity, ProvenanceTag("facB", AUTHORITY)))
    return store, body


class TestExport:
    def test_minimal_store_line_shape(self):
        store, _ = one_triple_store()
        lines = export_quads(store).splitlines()
        data = [l for l in lines if "/ctx/" in l and l.count("<") == 4]
        meta = [l for l in lines if l.startswith(f"<{BASE}/ctx/")]
        assert len(data) == 1
        assert len(meta) == 2  # source + authority, no validity bounds for Always
        assert any("#source>" in l for l in meta)
        assert any("#authority>" in l for l in meta)

    def test_interval_bounds_serialized(self, network):
        doc = export_quads(network)
        from_lines = [l for l in doc.splitlines() if "#validFrom>" in l]
        to_lines = [l for l in doc.splitlines() if "#validTo>" in l]
        assert any('"1996"' in l for l in from_lines)
        assert any('"2000"' in l for l in to_lines)
        assert any('"1994-09"' in l for l in from_lines)  # month precision survives

    def test_escaping(self):
        assert escape_literal('a"b\\c\nd\te\r') == 'a\\"b\\\\c\\nd\\te\\r'

    def test_empty_store(self):
        assert export_quads(Store(base_iri=BASE)) == ""

    def test_year_literal_typed(self, network):
        doc = export_quads(network)
        assert '"1963"^^<http://www.w3.org/2001/XMLSchema#gYear>' in doc

    def test_lines_lf_terminated_no_trailing_whitespace(self, network):
        doc = export_quads(network)
        assert doc.endswith("\n")
        for line in doc.splitlines():
            assert line == line.rstrip()


class TestImport:
    def test_round_trip_fixture(self, network):
        doc = export_quads(network)
        again = import_quads(doc)
        assert set(again) == set(network)
        assert export_quads(again) == doc
        assert again.base_iri == network.base_iri

    def test_empty_document(self):
        store = import_quads("")
        assert len(store) == 0

    def test_dangling_context(self):
        store, _ = one_triple_store()
        doc = export_quads(store)
        data_only = "\n".join(
            l for l in doc.splitlines() if not l.startswith(f"<{BASE}/ctx/")
        ) + "\n"
        with pytest.raises(DanglingContext):
            import_quads(data_only)

    def test_unknown_metadata_key_rejected(self):
        store, _ = one_triple_store()
        doc = export_quads(store)
        ctx = re.search(r"<(\S+/ctx/\S+)>", doc).group(1)
        doc += f'<{ctx}> <http://example.org/etd/vocab#confidence> "0.5" .\n'
        with pytest.raises(QuadParseError):
            import_quads(doc)

    def test_parse_error_carries_line(self):
        with pytest.raises(QuadParseError) as err:
            import_quads("<http://a.org/x> <http://a.org/y>\n")
        assert err.value.line == 1

    def test_escaped_literals_survive(self):
        store = Store(base_iri=BASE)
        v = store.vocab
        p = Iri(f"{BASE}/person/p1")
        store.insert(TemporalTriple(
            p, v.expand("kind"), v.class_iri(EntityKind.PERSON),
            Validity(), ProvenanceTag("p1", AUTHORITY)))
        store.insert(TemporalTriple(
            p, v.expand("label"), Literal('say "hi"\tplease\n\\ok'),
            Validity(), ProvenanceTag("p1", AUTHORITY)))
        doc = export_quads(store)
        again = import_quads(doc)
        assert set(again) == set(store)

    def test_random_stores_round_trip(self):
        rng = random.Random(1212)
        for _ in range(8):
            store = rand_store(rng)
            doc = export_quads(store)
            assert export_quads(import_quads(doc)) == doc

    def test_permutation_invariance(self):
        # same statements inserted in reverse order export identically
        rng = random.Random(88)
        store = rand_store(rng)
        clone = Store(store.vocab, store.base_iri)
        for t in reversed(store.sorted_triples()):
            clone.insert(t)
        assert export_quads(clone) == export_quads(store)


DOT_NODE = re.compile(r'^  (\w+) \[shape=(\w+), label="(?:[^"\\]|\\.)*"\];$')
DOT_EDGE = re.compile(r'^  (\w+) -> (\w+) \[label="(?:[^"\\]|\\.)*"\];$')


def check_dot_syntax(text: str):
    lines = text.splitlines()
    assert lines[0] == "digraph etd {"
    assert lines[-1] == "}"
    nodes = set()
    for line in lines[1:-1]:
        m = DOT_NODE.match(line)
        if m:
            nodes.add(m.group(1))
            continue
        m = DOT_EDGE.match(line)
        assert m, f"unparseable DOT line: {line!r}"
        assert m.group(1) in nodes and m.group(2) in nodes
    return nodes


class TestDot:
    def test_fixture_contains_study_edge(self, network):
        dot = export_dot(network)
        assert '  pA -> facB [label="isStudentOf [1996..2000]"];' in dot

    def test_shapes_by_kind(self, network):
        dot = export_dot(network)
        assert '  pA [shape=ellipse, label="Person A"];' in dot
        assert '  facB [shape=box, label="Faculty B"];' in dot
        assert '  phd1 [shape=note, label="Entity Linking for Scholarly Repositories"];' in dot
        assert '  male [shape=diamond, label="male"];' in dot

    def test_empty_store(self):
        dot = export_dot(Store(base_iri=BASE))
        assert dot == "digraph etd {\n}\n"
        check_dot_syntax(dot)

    def test_syntax_valid(self, network):
        check_dot_syntax(export_dot(network))

    def test_focus_neighborhood(self, network, iri):
        dot = export_dot(network, focus=iri("person/pA"), radius=1)
        nodes = check_dot_syntax(dot)
        # direct neighbors only: bodies pA studied/worked at, works, gender
        assert "pA" in nodes and "facB" in nodes and "uy" in nodes
        assert "schoolA" not in nodes  # two hops away
        wider = check_dot_syntax(export_dot(network, focus=iri("person/pA"), radius=2))
        assert "schoolA" in wider

    def test_focus_not_found(self, network, iri):
        with pytest.raises(NotFound):
            export_dot(network, focus=iri("person/ghost"), radius=1)

    def test_radius_must_be_positive(self, network, iri):
        with pytest.raises(ValueError):
            export_dot(network, focus=iri("person/pA"), radius=0)


class TestDescribe:
    def test_fixture_person(self, network, iri):
        doc = describe_entity(network, iri("person/pA"))
        facts = {
            (t.property.local_name(), t.object if isinstance(t.object, Iri) else None)
            for t in doc.triples
        }
        assert ("hasGender", iri("gender/male")) in facts
        assert ("isProfessorAt", iri("body/uy")) in facts

    def test_includes_inverse_derived(self, network, iri):
        doc = describe_entity(network, iri("person/pA"))
        derived = [t for t in doc.triples if t.derived]
        assert any(
            t.property.local_name() == "created" and t.object == iri("work/phd1")
            for t in derived
        )

    def test_neighbor_labels(self, network, iri):
        doc = describe_entity(network, iri("person/pA"))
        assert doc.neighbor_labels[iri("body/uy")] == "University Y"

    def test_isolated_entity(self):
        text = "id lone\ntype person\nname Lone\n"
        store, _ = records_to_graph(parse_records(text), base=BASE)
        doc = describe_entity(store, Iri(f"{BASE}/person/lone"))
        props = sorted(t.property.local_name() for t in doc.triples)
        assert props == ["kind", "label"]

    def test_not_found(self, network, iri):
        with pytest.raises(NotFound):
            describe_entity(network, iri("person/ghost"))

    def test_serialization_is_subset_of_export(self, network, iri):
        export_lines = set(export_quads(network).splitlines())
        for entity in ("person/pA", "body/facB", "work/mas1", "gender/female"):
            doc = describe_entity(network, iri(entity))
            for line in serialize_description(network, doc).splitlines():
                assert line in export_lines

    def test_descriptions_cover_every_statement(self, network):
        export_lines = set(export_quads(network).splitlines())
        data_lines = {l for l in export_lines if l.count("<") == 4 and "/ctx/" in l}
        covered = set()
        for kind in EntityKind:
            for entity in network.entities_of_kind(kind):
                doc = describe_entity(network, entity)
                covered.update(serialize_description(network, doc).splitlines())
        assert data_lines <= covered


class TestInvariants:
    def test_every_context_has_complete_metadata(self, network):
        lines = export_quads(network).splitlines()
        data_ctx = {
            l.rsplit("<", 1)[1].rstrip("> .")
            for l in lines
            if l.count("<") == 4
        }
        for ctx in data_ctx:
            assert any(l.startswith(f"<{ctx}>") and "#source>" in l for l in lines)
            assert any(l.startswith(f"<{ctx}>") and "#authority>" in l for l in lines)

    def test_descriptions_are_self_contained(self, network):
        for kind in EntityKind:
            for entity in network.entities_of_kind(kind):
                doc = describe_entity(network, entity)
                for t in doc.triples:
                    if t.derived:
                        continue
                    for endpoint in (t.subject, t.object):
                        if isinstance(endpoint, Iri) and endpoint != entity:
                            assert endpoint in doc.neighbor_labels
