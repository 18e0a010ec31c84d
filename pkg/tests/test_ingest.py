import json

import pytest
from hypothesis import given, strategies as st

from eventgraph.ingest import (
    DEFAULT_STOPWORDS,
    Message,
    ParseError,
    batch_quanta,
    batch_quanta_by_time,
    load_stopwords,
    parse_message,
    read_messages,
    tokenize,
)


def test_parse_plain_sentence():
    m = parse_message('{"user":"u1","ts":5,"text":"Earthquake struck eastern Turkey"}')
    assert m == Message("u1", 5, ("earthquake", "struck", "eastern", "turkey"), "Earthquake struck eastern Turkey")


def test_parse_all_stop_words():
    assert parse_message('{"user":"u2","ts":6,"text":"the of and"}').keywords == ()


def test_parse_keeps_numeric_token():
    assert parse_message('{"user":"u3","ts":7,"text":"5.9 magnitude!!"}').keywords == ("5.9", "magnitude")


def test_parse_ignores_unknown_fields():
    m = parse_message('{"user":"u","ts":1,"text":"quake","lang":"en"}')
    assert m.keywords == ("quake",)


@pytest.mark.parametrize(
    "line",
    [
        "not json",
        "[1, 2]",
        '{"user": 3, "ts": 1, "text": "x"}',
        '{"user": "u", "ts": "1", "text": "x"}',
        '{"user": "u", "ts": true, "text": "x"}',
        '{"user": "u", "ts": 1}',
    ],
)
def test_parse_errors_carry_line_number(line):
    with pytest.raises(ParseError) as ei:
        parse_message(line, lineno=12)
    assert ei.value.lineno == 12


def test_read_messages_skips_and_counts():
    lines = ['{"user":"a","ts":1,"text":"hello world"}', "garbage", "", '{"user":"b","ts":2,"text":"world"}']
    errors = []
    msgs = list(read_messages(lines, errors=errors))
    assert [m.user for m in msgs] == ["a", "b"]
    assert [e.lineno for e in errors] == [2]


def test_tokenize_table_row():
    assert tokenize("Davy Jones of Monkees Dead RIP") == ["davy", "jones", "monkees", "dead", "rip"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_hashtag_distinct_and_deduplicated():
    assert tokenize("#jobs #jobs JOBS") == ["#jobs", "jobs"]


def test_tokenize_strips_punctuation_but_not_internal_dots():
    assert tokenize("U.S. quake... (5.9)") == ["u.s", "quake", "5.9"]


def test_tokenize_custom_stopwords():
    assert tokenize("alpha beta gamma", {"beta"}) == ["alpha", "gamma"]


def test_load_stopwords_file(tmp_path):
    p = tmp_path / "sw.txt"
    p.write_text("Foo\n\nbar\n", encoding="utf-8")
    assert load_stopwords(p) == frozenset({"foo", "bar"})
    assert "the" in DEFAULT_STOPWORDS and "rip" not in DEFAULT_STOPWORDS


@given(st.text())
def test_tokenize_idempotent(text):
    once = tokenize(text)
    assert tokenize(" ".join(once)) == once
    assert all(len(t) >= 2 and t not in DEFAULT_STOPWORDS for t in once)
    assert len(set(once)) == len(once)


def _msgs(n):
    return [Message(f"u{i}", i, ("k",)) for i in range(n)]


@pytest.mark.parametrize("n,delta,sizes", [(320, 160, [160, 160]), (1, 160, [1]), (800, 800, [800]), (0, 5, [])])
def test_batch_sizes(n, delta, sizes):
    batches = list(batch_quanta(_msgs(n), delta))
    assert [len(b.messages) for b in batches] == sizes
    assert [b.index for b in batches] == list(range(len(sizes)))


@given(st.integers(0, 300), st.integers(1, 50))
def test_batching_preserves_order(n, delta):
    msgs = _msgs(n)
    batches = list(batch_quanta(msgs, delta))
    assert [m for b in batches for m in b.messages] == msgs
    assert all(len(b.messages) == delta for b in batches[:-1])


def test_batch_by_time_emits_gaps():
    msgs = [Message("a", 0, ()), Message("b", 150, ()), Message("c", 420, ())]
    batches = list(batch_quanta_by_time(msgs, 100))
    assert [b.index for b in batches] == [0, 1, 2, 3, 4]
    assert [len(b.messages) for b in batches] == [1, 1, 0, 0, 1]


def test_batch_rejects_bad_delta():
    with pytest.raises(ValueError):
        list(batch_quanta(_msgs(3), 0))
