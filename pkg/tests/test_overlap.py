import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vocab_overlap.core import (
    ConfigurationError,
    Language,
    OutOfRangeError,
    OverlapPartition,
    OverlapSetting,
    ParseError,
    Vocabulary,
)
from vocab_overlap.corpus import TokenizedCorpus, extract_language_vocab
from vocab_overlap.overlap import (
    OffsetPolicy,
    apply_remap,
    build_remap,
    dense_reindex,
    effective_vocab_of_streams,
    format_dense_sidecar,
    format_remap_table,
    invert_remap,
    invert_with_table_file,
    native_overlap,
    parse_remap_table,
    prune_vocabulary,
)


def _expected(lang, x, shared, v1, n, policy):
    # the remap rule written out directly
    if lang == "L1" or x in shared:
        return x
    if policy is OffsetPolicy.FORMULA or x in v1:
        return x + n
    return x


def _setup(v1_ids, v2_ids, high=(), low=()):
    v1, v2 = Vocabulary.from_ids(v1_ids), Vocabulary.from_ids(v2_ids)
    part = OverlapPartition(native=v1.ids & v2.ids, high=frozenset(high), low=frozenset(low))
    return v1, v2, part


def test_native_overlap_examples():
    assert native_overlap([1, 2, 3], [2, 3, 4]).native == {2, 3}
    assert native_overlap([1], [2]).native == frozenset()


def test_forward_example():
    v1, v2, part = _setup([2, 5], [2, 5, 6], high=[2])
    for policy in OffsetPolicy:
        t = build_remap(v1, v2, part, "high", 8, policy=policy)
        assert t.forward("L2", 5) == 13
        assert t.forward("L2", 2) == 2
        assert t.forward("L1", 5) == 5
    assert build_remap(v1, v2, part, "high", 8, policy="formula").forward("L2", 6) == 14
    assert build_remap(v1, v2, part, "high", 8, policy="minimal").forward("L2", 6) == 6


def test_full_setting_is_identity_under_minimal():
    v1, v2, part = _setup([0, 1, 2], [1, 2, 3])
    t = build_remap(v1, v2, part, "full", 4)
    c = TokenizedCorpus(Language.L2, [(1, 2, 3)])
    assert apply_remap(t, c) == c


def test_none_setting_separates_everything():
    v1, v2, part = _setup([0, 1, 2], [1, 2, 3])
    t = build_remap(v1, v2, part, "none", 4)
    c1 = TokenizedCorpus(Language.L1, [(0, 1, 2)])
    c2 = apply_remap(t, TokenizedCorpus(Language.L2, [(1, 2, 3)]))
    assert c2.documents == ((5, 6, 3),)
    assert effective_vocab_of_streams(c1, c2) == 6 == t.plan.effective_size


@pytest.mark.parametrize("v1,v2,native,n_eff_full,n_eff_none", [
    (78_469, 78_381, 73_455, 83_395, 156_850),
    (45_699, 41_956, 37_275, 50_380, 87_655),
])
def test_effective_size_at_published_scale(v1, v2, native, n_eff_full, n_eff_none):
    voc1 = Vocabulary.from_ids(range(v1))
    voc2 = Vocabulary.from_ids(range(v1 - native, v1 - native + v2))
    part = native_overlap(voc1, voc2)
    assert len(part.native) == native
    assert build_remap(voc1, voc2, part, "full", 250_002).plan.effective_size == n_eff_full
    assert build_remap(voc1, voc2, part, "none", 250_002).plan.effective_size == n_eff_none


@st.composite
def instances(draw):
    n = draw(st.integers(2, 40))
    v1 = draw(st.sets(st.integers(0, n - 1), min_size=1))
    v2 = draw(st.sets(st.integers(0, n - 1), min_size=1))
    native = sorted(v1 & v2)
    labels = draw(st.lists(st.sampled_from("hlu"), min_size=len(native), max_size=len(native)))
    high = [t for t, l in zip(native, labels) if l == "h"]
    low = [t for t, l in zip(native, labels) if l == "l"]
    docs1 = draw(st.lists(st.lists(st.sampled_from(sorted(v1)), max_size=8), min_size=1, max_size=4))
    docs2 = draw(st.lists(st.lists(st.sampled_from(sorted(v2)), max_size=8), min_size=1, max_size=4))
    return n, v1, v2, high, low, docs1, docs2


@settings(max_examples=200)
@given(instances(), st.sampled_from(list(OverlapSetting)), st.sampled_from(list(OffsetPolicy)))
def test_remap_properties(inst, setting, policy):
    n, v1_ids, v2_ids, high, low, docs1, docs2 = inst
    v1, v2, part = _setup(v1_ids, v2_ids, high, low)
    if setting in (OverlapSetting.HIGH_SIM, OverlapSetting.LOW_SIM) and not part.shared_for(setting):
        with pytest.raises(ConfigurationError):
            build_remap(v1, v2, part, setting, n, policy=policy)
        return
    t = build_remap(v1, v2, part, setting, n, policy=policy)
    shared = part.shared_for(setting)
    for lang, ids in (("L1", v1_ids), ("L2", v2_ids)):
        for x in ids:
            assert t.forward(lang, x) == _expected(lang, x, shared, v1_ids, n, policy)
    c1, c2 = TokenizedCorpus("L1", docs1), TokenizedCorpus("L2", docs2)
    r1, r2 = apply_remap(t, c1), apply_remap(t, c2)
    assert invert_remap(t, r1) == c1 and invert_remap(t, r2) == c2
    # injectivity over the domain with shared ids identified
    domain = {("L1", x) for x in v1_ids} | {("L2", x) for x in v2_ids if x not in shared}
    images = [t.forward(lang, x) for lang, x in domain]
    assert len(set(images)) == len(images)
    if policy is OffsetPolicy.FORMULA:
        full = {("L1", x) for x in range(n)} | {("L2", x) for x in range(n) if x not in shared}
        imgs = [t.forward(lang, x) for lang, x in full]
        assert len(set(imgs)) == len(imgs)
    assert t.plan.effective_size == len(v1_ids) + len(v2_ids) - len(shared)
    for new in images:
        where, old = t.inverse(new)
        assert t.forward("L1" if where == "shared" else where, old) == new


@settings(max_examples=100)
@given(instances())
def test_shared_set_grows_effective_vocab_shrinks(inst):
    n, v1_ids, v2_ids, high, low, *_ = inst
    v1, v2, part = _setup(v1_ids, v2_ids, high, low)
    full = build_remap(v1, v2, part, "full", n).plan.effective_size
    none = build_remap(v1, v2, part, "none", n).plan.effective_size
    assert full <= none
    for s in ("high", "low"):
        if part.shared_for(s):
            assert full <= build_remap(v1, v2, part, s, n).plan.effective_size <= none


def test_empty_high_partition_is_an_error():
    v1, v2, part = _setup([1, 2], [1, 2], low=[1])
    with pytest.raises(ConfigurationError):
        build_remap(v1, v2, part, "high", 4)


def test_partition_must_match_vocabularies():
    v1, v2 = Vocabulary.from_ids([1, 2]), Vocabulary.from_ids([2, 3])
    with pytest.raises(ConfigurationError):
        build_remap(v1, v2, OverlapPartition(native=frozenset({1, 2})), "full", 4)


def test_out_of_range_ids():
    v1, v2, part = _setup([1], [1])
    t = build_remap(v1, v2, part, "full", 4)
    with pytest.raises(OutOfRangeError):
        t.forward("L2", 4)
    with pytest.raises(OutOfRangeError):
        build_remap(Vocabulary.from_ids([9]), Vocabulary.from_ids([9]),
                    OverlapPartition(native=frozenset({9})), "full", 4)


def test_special_tokens_always_shared():
    v1, v2, part = _setup([0, 1, 5], [0, 1, 6], high=[1])
    t = build_remap(v1, v2, part, "none", 8, special_tokens=[0])
    assert t.forward("L2", 0) == 0
    assert t.forward("L2", 1) == 9
    assert t.plan.effective_size == 5


def test_withheld_token_is_reported_by_stream_count():
    # a vocabulary token that never occurs changes the plan count but not the streams
    v1, v2, part = _setup([0, 1, 2], [1, 2, 3])
    t = build_remap(v1, v2, part, "none", 4)
    c1 = TokenizedCorpus("L1", [(0, 1)])
    c2 = TokenizedCorpus("L2", [(1, 2, 3)])
    streams = effective_vocab_of_streams(apply_remap(t, c1), apply_remap(t, c2))
    assert streams == t.plan.effective_size - 1
    pruned = prune_vocabulary(v1, c1)
    assert pruned.ids == {0, 1}
    p2 = build_remap(pruned, v2, native_overlap(pruned, v2), "none", 4)
    assert p2.plan.effective_size == streams


def test_table_file_round_trip():
    v1, v2, part = _setup([0, 1, 2], [1, 2, 3], high=[1])
    t = build_remap(v1, v2, part, "high", 4)
    text = format_remap_table(t)
    assert text.splitlines()[0] == "#base_size=4 setting=high"
    parsed = parse_remap_table(text)
    assert parsed.forward_for("L2") == {1: 1, 2: 6, 3: 3}
    c2 = TokenizedCorpus("L2", [(1, 2, 3)])
    assert invert_with_table_file(parsed, apply_remap(t, c2)) == c2
    with pytest.raises(OutOfRangeError):
        invert_with_table_file(parsed, TokenizedCorpus("L2", [(7,)]))
    with pytest.raises(ParseError):
        parse_remap_table("L1\t0\t0\n")


def test_dense_reindex():
    m = dense_reindex([9, 3, 3, 12])
    assert m == {3: 0, 9: 1, 12: 2}
    assert format_dense_sidecar(m) == "3\t0\n9\t1\n12\t2\n"


def test_forward_array_matches_scalar():
    v1, v2, part = _setup(range(10), range(5, 15), high=[5, 6])
    t = build_remap(v1, v2, part, "high", 20)
    arr = np.arange(5, 15)
    assert t.forward_array("L2", arr).tolist() == [t.forward("L2", int(x)) for x in arr]
    assert extract_language_vocab(apply_remap(t, TokenizedCorpus("L2", [tuple(arr)]))).ids.isdisjoint(set(range(7, 10)))
