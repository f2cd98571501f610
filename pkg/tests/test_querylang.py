import random
import re

import pytest
from hypothesis import given, settings, strategies as st

from reviewscope.querylang import (
    Color,
    Filter,
    Grep,
    QueryParseError,
    Reset,
    Session,
    Sort,
    apply,
    command_to_string,
    evaluate_remote,
    parse,
    replay,
)

ATTRS = ("cleanliness", "location", "staff")


class FakeStore:
    """In-memory ReviewStore over (text, {attr: score}) records."""

    def __init__(self, records: dict[str, tuple[str, dict[str, float]]]):
        self.records = records

    def text(self, rid):
        return self.records[rid][0]

    def attribute_value(self, rid, attribute):
        text, scores = self.records[rid]
        if attribute == "length":
            return float(len(text))
        if attribute == "sentiment":
            return sum(scores.values()) / len(scores) if scores else 0.0
        return scores.get(attribute)


@pytest.fixture
def store():
    return FakeStore(
        {
            "r1": ("The carpet was dirty", {"cleanliness": -0.8}),
            "r2": ("Great location", {"location": 0.9}),
            "r3": ("Carpet looked fine, location great", {"cleanliness": 0.2, "location": 0.7}),
            "r4": ("Nothing to report", {}),
            "r5": ("Staff cleaned the carpet twice", {"cleanliness": 0.5, "staff": 0.6}),
        }
    )


ALL_IDS = ("r1", "r2", "r3", "r4", "r5")


class TestParseGolden:
    def test_sort(self):
        assert parse("tSort(cleanliness, desc)", ATTRS) == Sort("cleanliness", "desc")

    def test_sort_default_direction(self):
        assert parse("tSort(cleanliness)", ATTRS) == Sort("cleanliness", "desc")

    def test_sort_asc(self):
        assert parse("tSort(location, asc)", ATTRS) == Sort("location", "asc")

    def test_filter(self):
        assert parse("tFilter(staff, > 0.25)", ATTRS) == Filter("staff", ">", 0.25)

    def test_filter_tight_spacing(self):
        assert parse("tFilter(staff,>=-0.5)", ATTRS) == Filter("staff", ">=", -0.5)

    def test_grep_regex_flag(self):
        assert parse("tGrep(/carpet/i)", ATTRS) == Grep("carpet", case_insensitive=True)

    def test_grep_regex_case_sensitive(self):
        assert parse("tGrep(/Carpet/)", ATTRS) == Grep("Carpet", case_insensitive=False)

    def test_grep_quoted_literal(self):
        cmd = parse('tGrep("portion size")', ATTRS)
        assert cmd == Grep(re.escape("portion size"), case_insensitive=True)

    def test_color(self):
        assert parse("tColor(cleanliness)", ATTRS) == Color("cleanliness")

    def test_reset(self):
        assert parse("tReset()", ATTRS) == Reset()

    def test_pseudo_attributes(self):
        assert parse("tSort(sentiment)", ATTRS) == Sort("sentiment", "desc")
        assert parse("tFilter(length, < 100)", ATTRS) == Filter("length", "<", 100.0)

    def test_whitespace_insensitive(self):
        assert parse("  tSort ( cleanliness ,  asc ) ", ATTRS) == Sort("cleanliness", "asc")

    def test_round_trip_via_string(self):
        for text in (
            "tSort(cleanliness, asc)",
            "tFilter(staff, >= 0.25)",
            "tGrep(/carpet/i)",
            "tColor(location)",
            "tReset()",
        ):
            cmd = parse(text, ATTRS)
            assert parse(command_to_string(cmd), ATTRS) == cmd


class TestParseErrors:
    @pytest.mark.parametrize(
        "bad",
        [
            "tSort()",  # arity
            "tSort(cleanliness, up)",  # bad direction
            "tSort(cleanliness, asc, extra)",  # arity
            "tFoo(x)",  # unknown command
            "tFilter(cleanliness)",  # missing predicate
            "tFilter(cleanliness, 0.5)",  # missing comparator
            "tFilter(cleanliness, > banana)",  # not a number
            "tFilter(view, > 0.1)",  # unknown attribute
            "tGrep(carpet)",  # unquoted literal
            "tGrep(/carpet/x)",  # unsupported flag
            "tGrep(/[unclosed/)",  # invalid regex
            "tColor()",  # arity
            "tColor(nonexistent)",  # unknown attribute
            "tReset(now)",  # arity
            "tSort(",  # not a call
            "",  # empty
        ],
    )
    def test_rejects(self, bad):
        with pytest.raises(QueryParseError):
            parse(bad, ATTRS)

    def test_unknown_command_lists_names(self):
        with pytest.raises(QueryParseError, match="tSort, tFilter, tGrep, tColor, tReset"):
            parse("tFoo(x)", ATTRS)

    def test_unknown_attribute_names_schema(self):
        with pytest.raises(QueryParseError, match="cleanliness, location, staff"):
            parse("tSort(view)", ATTRS)

    def test_invalid_regex_carries_position(self):
        with pytest.raises(QueryParseError) as err:
            parse("tGrep(/(unclosed/)", ATTRS)
        assert err.value.position is not None


class TestApply:
    def test_grep_then_sort(self, store):
        session = Session.fresh(ALL_IDS)
        session = apply(session, parse("tGrep(/carpet/i)", ATTRS), store)
        assert session.working_ids == ("r1", "r3", "r5")
        session = apply(session, parse("tSort(cleanliness, asc)", ATTRS), store)
        assert session.working_ids == ("r1", "r3", "r5")  # -0.8, 0.2, 0.5

    def test_filter_above_bound_empty(self, store):
        session = Session.fresh(ALL_IDS)
        session = apply(session, parse("tFilter(cleanliness, > 1.0)", ATTRS), store)
        assert session.working_ids == ()

    def test_filter_drops_absent(self, store):
        session = apply(Session.fresh(ALL_IDS), parse("tFilter(cleanliness, >= -1)", ATTRS), store)
        assert session.working_ids == ("r1", "r3", "r5")

    def test_sort_absent_last_both_directions(self, store):
        asc = apply(Session.fresh(ALL_IDS), parse("tSort(location, asc)", ATTRS), store)
        desc = apply(Session.fresh(ALL_IDS), parse("tSort(location, desc)", ATTRS), store)
        assert asc.working_ids == ("r3", "r2", "r1", "r4", "r5")
        assert desc.working_ids == ("r2", "r3", "r1", "r4", "r5")

    def test_sort_stable(self, store):
        # r1 and r5 lack location; their relative order must be preserved
        out = apply(Session.fresh(("r5", "r1", "r2")), parse("tSort(location)", ATTRS), store)
        assert out.working_ids == ("r2", "r5", "r1")

    def test_color_only_sets_attribute(self, store):
        session = apply(Session.fresh(ALL_IDS), parse("tColor(staff)", ATTRS), store)
        assert session.working_ids == ALL_IDS
        assert session.color_attribute == "staff"
        assert len(session.history) == 1

    def test_reset_restores_and_clears(self, store):
        session = Session.fresh(ALL_IDS)
        session = apply(session, parse("tGrep(/carpet/i)", ATTRS), store)
        session = apply(session, parse("tColor(staff)", ATTRS), store)
        session = apply(session, parse("tReset()", ATTRS), store)
        assert session.working_ids == ALL_IDS
        assert session.history == ()
        assert session.color_attribute is None

    def test_grep_case_sensitivity(self, store):
        ci = apply(Session.fresh(ALL_IDS), parse("tGrep(/carpet/i)", ATTRS), store)
        cs = apply(Session.fresh(ALL_IDS), parse("tGrep(/carpet/)", ATTRS), store)
        assert ci.working_ids == ("r1", "r3", "r5")
        assert cs.working_ids == ("r1", "r5")  # r3 has "Carpet"

    def test_replay_reproduces_working_set(self, store):
        session = Session.fresh(ALL_IDS)
        for text in ("tGrep(/carpet/i)", "tSort(cleanliness, asc)", "tFilter(cleanliness, > 0)"):
            session = apply(session, parse(text, ATTRS), store)
        replayed = replay(session.initial_ids, session.history, store)
        assert replayed.working_ids == session.working_ids


class TestEvaluateRemote:
    def test_empty_history_scope_order(self, store):
        assert evaluate_remote([], ALL_IDS, store) == ALL_IDS

    def test_no_match_empty(self, store):
        assert evaluate_remote(["tGrep(/zebra/i)"], ALL_IDS, store, ATTRS) == ()

    def test_filter_sort_oracle(self, store):
        # brute-force oracle over the fixture
        history = ["tFilter(cleanliness, > 0)", "tSort(cleanliness, desc)"]
        expected = [
            rid
            for rid in ALL_IDS
            if store.attribute_value(rid, "cleanliness") is not None
            and store.attribute_value(rid, "cleanliness") > 0
        ]
        expected.sort(key=lambda rid: -store.attribute_value(rid, "cleanliness"))
        assert list(evaluate_remote(history, ALL_IDS, store, ATTRS)) == expected

    def test_invalid_entry_identifies_index(self, store):
        with pytest.raises(QueryParseError, match="history entry 1"):
            evaluate_remote(["tReset()", "tOops(x)"], ALL_IDS, store, ATTRS)

    def test_accepts_parsed_commands(self, store):
        assert evaluate_remote([Grep("carpet", True)], ALL_IDS, store) == ("r1", "r3", "r5")


def random_command(rng: random.Random) -> str:
    kind = rng.randrange(5)
    attr = rng.choice(ATTRS + ("sentiment", "length"))
    if kind == 0:
        return f"tSort({attr}, {rng.choice(('asc', 'desc'))})"
    if kind == 1:
        op = rng.choice(("<", "<=", ">", ">=", "==", "!="))
        return f"tFilter({attr}, {op} {round(rng.uniform(-1, 1), 2)})"
    if kind == 2:
        word = rng.choice(("carpet", "location", "great", "zzz", "staff"))
        return f"tGrep(/{word}/i)"
    if kind == 3:
        return f"tColor({attr})"
    return "tReset()"


def naive_chain(ids, history, store):
    """Straight-line oracle: plain loops, no Session machinery."""
    current = list(ids)
    for text in history:
        cmd = parse(text, ATTRS)
        if isinstance(cmd, Reset):
            current = list(ids)
        elif isinstance(cmd, Grep):
            rx = re.compile(cmd.pattern, re.IGNORECASE if cmd.case_insensitive else 0)
            current = [r for r in current if rx.search(store.text(r))]
        elif isinstance(cmd, Filter):
            ops = {"<": "__lt__", "<=": "__le__", ">": "__gt__", ">=": "__ge__",
                   "==": "__eq__", "!=": "__ne__"}
            kept = []
            for r in current:
                v = store.attribute_value(r, cmd.attribute)
                if v is not None and getattr(v, ops[cmd.comparator])(cmd.value):
                    kept.append(r)
            current = kept
        elif isinstance(cmd, Sort):
            present = [r for r in current if store.attribute_value(r, cmd.attribute) is not None]
            absent = [r for r in current if store.attribute_value(r, cmd.attribute) is None]
            present.sort(key=lambda r: store.attribute_value(r, cmd.attribute),
                         reverse=cmd.direction == "desc")
            current = present + absent
    return current


class TestLocalRemoteConsistency:
    def make_big_store(self, n=120, seed=3):
        rng = random.Random(seed)
        words = ["carpet", "location", "staff", "great", "noisy", "clean", "breakfast"]
        records = {}
        for i in range(n):
            text = " ".join(rng.choice(words) for _ in range(rng.randrange(3, 9)))
            scores = {
                a: round(rng.uniform(-1, 1), 3) for a in ATTRS if rng.random() < 0.6
            }
            records[f"r{i:03d}"] = (text, scores)
        return FakeStore(records), tuple(sorted(records))

    def test_random_chains_match_oracle(self):
        store, ids = self.make_big_store()
        rng = random.Random(17)
        for _ in range(60):
            history = [random_command(rng) for _ in range(rng.randrange(1, 5))]
            remote = list(evaluate_remote(history, ids, store, ATTRS))
            assert remote == naive_chain(ids, history, store)

    def test_page_intersection_property(self):
        # remote result restricted to a page equals the chain applied to the page
        store, ids = self.make_big_store(n=60, seed=5)
        history = ["tGrep(/carpet/i)", "tFilter(cleanliness, > -0.5)"]
        remote = set(evaluate_remote(history, ids, store, ATTRS))
        for offset in range(0, 60, 10):
            page = ids[offset : offset + 10]
            local = naive_chain(page, history, store)
            assert set(local) == remote & set(page)

    def test_sort_relative_order_matches_remote(self):
        store, ids = self.make_big_store(n=40, seed=9)
        history = ["tSort(cleanliness, asc)"]
        remote = list(evaluate_remote(history, ids, store, ATTRS))
        rank = {rid: i for i, rid in enumerate(remote)}
        for offset in range(0, 40, 10):
            page = ids[offset : offset + 10]
            local = naive_chain(page, history, store)
            ranks = [rank[r] for r in local]
            assert ranks == sorted(ranks)
