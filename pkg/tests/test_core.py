import pytest
from hypothesis import given, strategies as st

from vocab_overlap.core import (
    ConfigurationError,
    Language,
    OutOfRangeError,
    OverlapPartition,
    OverlapSetting,
    ParseError,
    Vocabulary,
)


@pytest.mark.parametrize("text,expected", [
    ("full", OverlapSetting.FULL), ("HighSim", OverlapSetting.HIGH_SIM), ("high", OverlapSetting.HIGH_SIM),
    ("lowsim", OverlapSetting.LOW_SIM), ("none", OverlapSetting.NONE), ("nooverlap", OverlapSetting.NONE),
])
def test_setting_aliases(text, expected):
    assert OverlapSetting.parse(text) is expected


def test_unknown_setting_rejected():
    with pytest.raises(ConfigurationError):
        OverlapSetting.parse("medium")


def test_language_parse():
    assert Language.parse("l2") is Language.L2
    with pytest.raises(ConfigurationError):
        Language.parse("L3")


def test_vocabulary_rejects_out_of_range_ids():
    with pytest.raises(OutOfRangeError):
        Vocabulary({-1: 1})
    with pytest.raises(OutOfRangeError):
        Vocabulary({2**32: 1})


def test_vocabulary_surfaces_unique():
    with pytest.raises(ConfigurationError):
        Vocabulary({1: 1, 2: 1}, {1: "a", 2: "a"})


def test_vocabulary_is_read_only():
    v = Vocabulary({3: 2, 1: 5})
    assert v.sorted_ids() == [1, 3]
    assert v.total() == 7
    with pytest.raises(TypeError):
        v.counts[4] = 1


def test_parse_error_carries_line():
    err = ParseError("bad", line=3)
    assert err.line == 3 and "line 3" in str(err)


def test_partition_must_cover_native():
    with pytest.raises(ConfigurationError):
        OverlapPartition(native=frozenset({1, 2}), high=frozenset({3}))
    with pytest.raises(ConfigurationError):
        OverlapPartition(native=frozenset({1, 2}), high=frozenset({1}), low=frozenset({1}))
    with pytest.raises(ConfigurationError):
        OverlapPartition(native=frozenset({1, 2}), high=frozenset({1}), unscored=frozenset())


@given(st.sets(st.integers(0, 200), max_size=60), st.data())
def test_partition_invariants(native, data):
    native = sorted(native)
    labels = data.draw(st.lists(st.sampled_from("hlu"), min_size=len(native), max_size=len(native)))
    high = frozenset(t for t, l in zip(native, labels) if l == "h")
    low = frozenset(t for t, l in zip(native, labels) if l == "l")
    p = OverlapPartition(native=frozenset(native), high=high, low=low)
    assert p.high | p.low | p.unscored == p.native
    assert not (p.high & p.low) and not (p.high & p.unscored) and not (p.low & p.unscored)
    for s in OverlapSetting:
        assert p.shared_for(s) <= p.native
    assert p.shared_for(OverlapSetting.NONE) == frozenset()
