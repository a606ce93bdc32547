import random

import pytest

from etdgraph.errors import InvalidDate, InvalidInterval, InvalidIri, InvalidLiteral
from etdgraph.model import (
    Datatype,
    Iri,
    Literal,
    TimeInterval,
    TimePoint,
    Validity,
    interval_contains,
    intervals_overlap,
    merge_if_coalescable,
)

from oracles import (
    interval_days,
    oracle_contains,
    oracle_mergeable,
    oracle_overlap,
    rand_interval,
    rand_point,
)


def iv(start=None, end=None):
    return TimeInterval(
        TimePoint.parse(start) if start else None,
        TimePoint.parse(end) if end else None,
    )


class TestTimePoint:
    def test_year_precision(self):
        t = TimePoint(1963)
        assert (t.year, t.month, t.day) == (1963, None, None)
        assert t.text() == "1963"

    def test_no_feb_30(self):
        with pytest.raises(InvalidDate) as err:
            TimePoint(2000, 2, 30)
        assert err.value.field == "day"

    def test_month_precision_fixture_date(self):
        t = TimePoint(2006, 9)
        assert t.first_day().isoformat() == "2006-09-01"
        assert t.last_day().isoformat() == "2006-09-30"

    def test_day_without_month(self):
        with pytest.raises(InvalidDate) as err:
            TimePoint(2000, None, 5)
        assert err.value.field == "day"

    def test_year_out_of_range(self):
        with pytest.raises(InvalidDate):
            TimePoint(0)
        with pytest.raises(InvalidDate):
            TimePoint(10000)

    def test_parse_round_trip(self):
        for text in ("1963", "2006-09", "1998-06-30"):
            assert TimePoint.parse(text).text() == text

    def test_parse_rejects_garbage(self):
        for text in ("196", "1963-13", "1963-00", "nineteen"):
            with pytest.raises(InvalidDate):
                TimePoint.parse(text)


class TestTimeInterval:
    def test_needs_one_bound(self):
        with pytest.raises(InvalidInterval):
            TimeInterval(None, None)

    def test_ordering_enforced(self):
        with pytest.raises(InvalidInterval):
            iv("2000", "1996")

    def test_instant(self):
        t = TimePoint(1990)
        assert TimeInterval.instant(t).is_instant

    def test_mixed_precision_bound_check_uses_day_ranges(self):
        # start 2000-12 is fine against an end of plain 2000
        TimeInterval(TimePoint(2000, 12), TimePoint(2000))


class TestContains:
    def test_strict_interior(self):
        assert interval_contains(iv("1996", "2000"), TimePoint(1998))

    def test_closed_end_bound(self):
        assert interval_contains(iv("1996", "2000"), TimePoint(2000))

    def test_before_open_start(self):
        assert not interval_contains(iv("2006", None), TimePoint(1963))

    def test_partial_year_excluded(self):
        # a probe at year precision needs the whole year inside
        assert not interval_contains(iv("1994-09", "1998-06"), TimePoint(1998))
        assert interval_contains(iv("1994-09", "1998-06"), TimePoint(1997))


class TestOverlap:
    def test_shared_endpoint_year(self):
        assert intervals_overlap(iv("1994", "1996"), iv("1996", "2000"))

    def test_disjoint(self):
        assert not intervals_overlap(iv("1963", "1963"), iv("2006", None))

    def test_unbounded_contains_all(self):
        assert intervals_overlap(iv(None, "2100"), iv("1900", "1900"))
        assert intervals_overlap(iv("1800", None), iv("1900", "1900"))


class TestMerge:
    def test_overlapping_union(self):
        assert merge_if_coalescable(iv("1994", "1996"), iv("1996", "2000")) == iv("1994", "2000")

    def test_adjacent_years(self):
        assert merge_if_coalescable(iv("1963", "1963"), iv("1964", "1964")) == iv("1963", "1964")

    def test_adjacent_days(self):
        assert merge_if_coalescable(
            iv("1999-12-31", "1999-12-31"), iv("2000-01-01", "2000-06")
        ) == iv("1999-12-31", "2000-06")

    def test_disjoint(self):
        assert merge_if_coalescable(iv("1963", "1963"), iv("1970", "1970")) is None

    def test_doubly_unbounded_union_not_representable(self):
        assert merge_if_coalescable(iv(None, "1996"), iv("1995", None)) is None

    def test_open_side_kept_in_union(self):
        merged = merge_if_coalescable(iv(None, "1996"), iv("1995", "2001"))
        assert merged == iv(None, "2001")


class TestIntervalProperties:
    """Seeded random checks against the day-set oracle."""

    def test_against_oracle(self):
        rng = random.Random(4221)
        for _ in range(300):
            a = rand_interval(rng)
            b = rand_interval(rng)
            t = rand_point(rng)
            assert interval_contains(a, t) == oracle_contains(a, t)
            assert intervals_overlap(a, b) == oracle_overlap(a, b)
            merged = merge_if_coalescable(a, b)
            assert (merged is not None) == oracle_mergeable(a, b)
            if merged is not None:
                # the union covers every day of a or b and nothing else
                assert interval_days(merged) == interval_days(a) | interval_days(b)

    def test_overlap_symmetric_reflexive(self):
        rng = random.Random(99)
        for _ in range(200):
            a, b = rand_interval(rng), rand_interval(rng)
            assert intervals_overlap(a, b) == intervals_overlap(b, a)
            assert intervals_overlap(a, a)

    def test_merge_commutes(self):
        rng = random.Random(7)
        for _ in range(200):
            a, b = rand_interval(rng), rand_interval(rng)
            assert merge_if_coalescable(a, b) == merge_if_coalescable(b, a)

    def test_normalization_idempotent(self):
        rng = random.Random(13)
        for _ in range(200):
            t = rand_point(rng)
            assert t.first_day() == TimePoint(t.year, t.month, t.day).first_day()
            ivx = rand_interval(rng)
            assert (ivx.first_day(), ivx.last_day()) == (
                TimeInterval(ivx.start, ivx.end).first_day(),
                TimeInterval(ivx.start, ivx.end).last_day(),
            )


class TestValidity:
    def test_always_passes_everything(self):
        v = Validity()
        assert v.is_always
        assert v.contains(TimePoint(1500))
        assert v.overlaps(iv("1990", "1991"))
        assert not v.within(iv("1990", "1991"))

    def test_during(self):
        v = Validity.during(iv("1996", "2000"))
        assert v.contains(TimePoint(1998))
        assert not v.contains(TimePoint(2001))
        assert v.within(iv("1990", "2005"))


class TestIri:
    def test_percent_encoding_normalized_to_uppercase(self):
        assert Iri("http://x.org/a%2fb") == Iri("http://x.org/a%2Fb")

    def test_non_ascii_percent_encoded(self):
        assert Iri("http://x.org/café").value == "http://x.org/caf%C3%A9"

    def test_normalization_idempotent(self):
        once = Iri("http://x.org/café ding%2f".replace(" ding", ""))
        assert Iri(once.value) == once

    def test_rejects_whitespace_and_control(self):
        for bad in ("http://x.org/a b", "http://x.org/a\tb", "http://x.org/a\nb"):
            with pytest.raises(InvalidIri):
                Iri(bad)

    def test_rejects_non_http(self):
        for bad in ("ftp://x.org/a", "urn:isbn:123", "not an iri"):
            with pytest.raises(InvalidIri):
                Iri(bad)

    def test_rejects_malformed_escape(self):
        with pytest.raises(InvalidIri):
            Iri("http://x.org/a%zz")

    def test_equality_is_equivalence(self):
        a = Iri("http://x.org/a%2fb")
        b = Iri("http://x.org/a%2Fb")
        c = Iri("http://x.org/a%2FB".lower().replace("http", "http"))
        assert a == b
        assert hash(a) == hash(b)
        assert (a == c) == (b == c)


class TestLiteral:
    def test_year_literal(self):
        assert Literal("1963", Datatype.YEAR).lexical == "1963"
        with pytest.raises(InvalidLiteral):
            Literal("63", Datatype.YEAR)

    def test_integer_literal(self):
        Literal("-42", Datatype.INTEGER)
        with pytest.raises(InvalidLiteral):
            Literal("4.2", Datatype.INTEGER)

    def test_date_literal(self):
        Literal("1999-12-31", Datatype.DATE)
        with pytest.raises(InvalidLiteral):
            Literal("1999-02-30", Datatype.DATE)

    def test_language_only_on_strings(self):
        Literal("hello", Datatype.STRING, "en")
        with pytest.raises(InvalidLiteral):
            Literal("1963", Datatype.YEAR, "en")
        with pytest.raises(InvalidLiteral):
            Literal("hi", Datatype.STRING, "not a tag")
