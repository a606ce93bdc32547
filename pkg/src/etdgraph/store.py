"""Indexed, canonical set of temporal statements.

Statements that agree on subject, property, object, and provenance but
have overlapping or day-adjacent validity are coalesced into one row on
insert, so the stored set is always canonical. Statements differing in
provenance are kept apart deliberately: merging assertions from
different sources would destroy the audit trail.

Concurrency contract: many readers or one writer. A store that is no
longer mutated can be shared between threads as an immutable snapshot.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidTriple, KindMismatch
from .model import (
    ALWAYS,
    Datatype,
    Iri,
    Literal,
    TemporalTriple,
    TimeInterval,
    TimePoint,
    Validity,
    merge_if_coalescable,
    triple_sort_key,
)
from .vocab import (
    DEFAULT_VOCAB,
    EntityKind,
    FradCategory,
    KIND_CLASS,
    PropertyDef,
    Vocabulary,
)

DEFAULT_BASE_IRI = "http://example.org/etd"


@dataclass(frozen=True)
class At:
    point: TimePoint


@dataclass(frozen=True)
class During:
    interval: TimeInterval


@dataclass(frozen=True)
class Overlaps:
    interval: TimeInterval


TimeConstraint = At | During | Overlaps


class Inference(Enum):
    NONE = "none"
    INVERSE = "inverse"


@dataclass(frozen=True)
class Pattern:
    """Triple pattern; None fields are wildcards. All-wildcard scans the
    whole store."""

    subject: Iri | None = None
    property: Iri | None = None
    object: Iri | Literal | None = None
    time: TimeConstraint | None = None
    inference: Inference = Inference.NONE


class Effect(Enum):
    INSERTED = "inserted"
    COALESCED = "coalesced"
    DUPLICATE = "duplicate"


@dataclass(frozen=True)
class InsertResult:
    effect: Effect
    validity: Validity | None = None  # resulting validity for COALESCED


def _passes(validity: Validity, constraint: TimeConstraint | None) -> bool:
    if constraint is None:
        return True
    if isinstance(constraint, At):
        return validity.contains(constraint.point)
    if isinstance(constraint, During):
        return validity.within(constraint.interval)
    return validity.overlaps(constraint.interval)


class Store:
    def __init__(self, vocab: Vocabulary | None = None, base_iri: str | Iri = DEFAULT_BASE_IRI):
        self.vocab = vocab if vocab is not None else DEFAULT_VOCAB
        self.base_iri = base_iri if isinstance(base_iri, Iri) else Iri(base_iri)
        self._triples: set[TemporalTriple] = set()
        self._by_subject: dict[Iri, set[TemporalTriple]] = defaultdict(set)
        self._by_property: dict[Iri, set[TemporalTriple]] = defaultdict(set)
        self._by_object: dict[Iri | Literal, set[TemporalTriple]] = defaultdict(set)
        self._kinds: dict[Iri, EntityKind] = {}

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self):
        return iter(self._triples)

    def __contains__(self, triple: TemporalTriple) -> bool:
        return triple in self._triples

    def sorted_triples(self) -> list[TemporalTriple]:
        return sorted(self._triples, key=triple_sort_key)

    def kind_of(self, entity: Iri) -> EntityKind | None:
        return self._kinds.get(entity)

    def entities_of_kind(self, kind: EntityKind) -> list[Iri]:
        return sorted(
            (e for e, k in self._kinds.items() if k is kind), key=lambda i: i.value
        )

    def has_entity(self, entity: Iri) -> bool:
        return (
            entity in self._kinds
            or entity in self._by_subject
            or entity in self._by_object
        )

    def copy(self) -> "Store":
        clone = Store(self.vocab, self.base_iri)
        clone._triples = set(self._triples)
        for key, vals in self._by_subject.items():
            clone._by_subject[key] = set(vals)
        for key, vals in self._by_property.items():
            clone._by_property[key] = set(vals)
        for key, vals in self._by_object.items():
            clone._by_object[key] = set(vals)
        clone._kinds = dict(self._kinds)
        return clone

    # -- insertion ----------------------------------------------------------

    def insert(self, triple: TemporalTriple) -> InsertResult:
        pdef = self.vocab.lookup_id(triple.property)
        self._validate(triple, pdef)

        same_key = [
            t
            for t in self._by_subject.get(triple.subject, ())
            if t.property == triple.property
            and t.object == triple.object
            and t.provenance == triple.provenance
        ]

        for existing in same_key:
            if existing.validity.is_always:
                # an unqualified statement subsumes any time-scoped repeat
                return InsertResult(Effect.DUPLICATE)
            if not triple.validity.is_always and triple.validity.within(
                existing.validity.interval
            ):
                return InsertResult(Effect.DUPLICATE)

        if triple.validity.is_always:
            for existing in same_key:
                self._remove(existing)
            self._add(triple, pdef)
            if same_key:
                return InsertResult(Effect.COALESCED, ALWAYS)
            return InsertResult(Effect.INSERTED)

        merged = triple.validity.interval
        absorbed = []
        pool = list(same_key)
        changed = True
        while changed:
            changed = False
            for existing in pool:
                union = merge_if_coalescable(merged, existing.validity.interval)
                if union is not None:
                    merged = union
                    absorbed.append(existing)
                    pool.remove(existing)
                    changed = True
                    break
        for existing in absorbed:
            self._remove(existing)
        result = TemporalTriple(
            subject=triple.subject,
            property=triple.property,
            object=triple.object,
            validity=Validity.during(merged),
            provenance=triple.provenance,
        )
        self._add(result, pdef)
        if absorbed:
            return InsertResult(Effect.COALESCED, result.validity)
        return InsertResult(Effect.INSERTED)

    def _validate(self, triple: TemporalTriple, pdef: PropertyDef):
        if triple.derived:
            raise InvalidTriple("derived statements are virtual and cannot be stored")
        if pdef.instant:
            iv = triple.validity.interval
            if iv is None or not iv.is_instant:
                raise InvalidTriple(
                    f"{pdef.curie} takes an instant validity, got {triple.validity}"
                )
        if (
            pdef.frad_category is FradCategory.MEMBERSHIP
            and pdef.temporal_expected
            and triple.validity.is_always
        ):
            raise InvalidTriple(f"{pdef.curie} requires a validity interval")

        obj = triple.object
        if pdef.range_kind is KIND_CLASS:
            if not isinstance(obj, Iri) or self.vocab.kind_for_class(obj) is None:
                raise InvalidTriple(f"{pdef.curie} object must be an entity-kind class IRI")
            declared = self.vocab.kind_for_class(obj)
            existing = self._kinds.get(triple.subject)
            if existing is not None and existing is not declared:
                raise InvalidTriple(
                    f"conflicting kind for <{triple.subject}>: "
                    f"{existing.value} vs {declared.value}"
                )
        elif isinstance(pdef.range_kind, Datatype):
            if not isinstance(obj, Literal) or obj.datatype is not pdef.range_kind:
                raise InvalidTriple(
                    f"{pdef.curie} object must be a {pdef.range_kind.value} literal"
                )
            if pdef.value_set is not None:
                if obj.lexical not in pdef.value_set:
                    raise InvalidTriple(
                        f"{pdef.curie} value {obj.lexical!r} not in "
                        f"{sorted(pdef.value_set)}"
                    )
                for other in self._by_subject.get(triple.subject, ()):
                    if other.property == triple.property and other.object != obj:
                        raise InvalidTriple(
                            f"conflicting {pdef.curie} for <{triple.subject}>: "
                            f"{other.object} vs {obj}"
                        )
        else:
            if not isinstance(obj, Iri):
                raise InvalidTriple(f"{pdef.curie} object must be an entity IRI")

        if pdef.domain_kind is not None:
            known = self._kinds.get(triple.subject)
            if known is not None and known is not pdef.domain_kind:
                raise KindMismatch(
                    f"subject of {pdef.curie} must be {pdef.domain_kind.value}, "
                    f"<{triple.subject}> is {known.value}"
                )
        if isinstance(pdef.range_kind, EntityKind) and isinstance(obj, Iri):
            known = self._kinds.get(obj)
            if known is not None and known is not pdef.range_kind:
                raise KindMismatch(
                    f"object of {pdef.curie} must be {pdef.range_kind.value}, "
                    f"<{obj}> is {known.value}"
                )

    def _add(self, triple: TemporalTriple, pdef: PropertyDef):
        self._triples.add(triple)
        self._by_subject[triple.subject].add(triple)
        self._by_property[triple.property].add(triple)
        self._by_object[triple.object].add(triple)
        if pdef.range_kind is KIND_CLASS:
            self._kinds[triple.subject] = self.vocab.kind_for_class(triple.object)

    def _remove(self, triple: TemporalTriple):
        self._triples.discard(triple)
        self._by_subject[triple.subject].discard(triple)
        self._by_property[triple.property].discard(triple)
        self._by_object[triple.object].discard(triple)

    # -- matching -----------------------------------------------------------

    def match(self, pattern: Pattern) -> list[TemporalTriple]:
        """All statements unifying with the pattern, canonically sorted.

        With inverse inference, statements whose property declares an
        inverse also yield a flipped, derived copy; a stored statement
        wins over a derived one that compares equal.
        """
        if pattern.property is not None:
            self.vocab.lookup_id(pattern.property)

        out: dict[TemporalTriple, TemporalTriple] = {}
        for t in self._candidates(pattern.subject, pattern.property, pattern.object):
            if self._unifies(t, pattern):
                out.setdefault(t, t)
        if pattern.inference is Inference.INVERSE:
            for t in self._inverse_candidates(pattern):
                flipped = t.flipped(self.vocab.inverse_of(t.property))
                if self._unifies(flipped, pattern):
                    out.setdefault(flipped, flipped)
        return sorted(out.values(), key=triple_sort_key)

    def _candidates(self, subject, prop, obj):
        pools = []
        if subject is not None:
            pools.append(self._by_subject.get(subject, set()))
        if prop is not None:
            pools.append(self._by_property.get(prop, set()))
        if obj is not None:
            pools.append(self._by_object.get(obj, set()))
        if not pools:
            return self._triples
        return min(pools, key=len)

    def _inverse_candidates(self, pattern: Pattern):
        # Flipping swaps s/o and maps the property to its inverse, so select
        # stored candidates under the reversed pattern.
        if pattern.property is not None:
            stored_prop = self.vocab.inverse_of(pattern.property)
            if stored_prop is None:
                return []
        else:
            stored_prop = None
        pools = []
        if pattern.object is not None:
            if not isinstance(pattern.object, Iri):
                return []
            pools.append(self._by_subject.get(pattern.object, set()))
        if stored_prop is not None:
            pools.append(self._by_property.get(stored_prop, set()))
        if pattern.subject is not None:
            pools.append(self._by_object.get(pattern.subject, set()))
        base = min(pools, key=len) if pools else self._triples
        return [
            t
            for t in base
            if isinstance(t.object, Iri)
            and self.vocab.inverse_of(t.property) is not None
            and (stored_prop is None or t.property == stored_prop)
        ]

    @staticmethod
    def _unifies(t: TemporalTriple, pattern: Pattern) -> bool:
        if pattern.subject is not None and t.subject != pattern.subject:
            return False
        if pattern.property is not None and t.property != pattern.property:
            return False
        if pattern.object is not None and t.object != pattern.object:
            return False
        return _passes(t.validity, pattern.time)

    def snapshot_at(self, t: TimePoint) -> set[TemporalTriple]:
        """Statements valid at t; Always statements are always included."""
        return {x for x in self._triples if x.validity.contains(t)}
