import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vocab_overlap.core import ConfigurationError, Language, SizeError, UndefinedStatisticError
from vocab_overlap.corpus import TokenizedCorpus, extract_language_vocab
from vocab_overlap.metrics import (
    AnalysisSets,
    build_analysis_sets,
    compression_rates,
    iou_from_sizes,
    overlap_metrics,
    similarity_analysis,
)
from vocab_overlap.similarity import EmbeddingDump, SimilarityRanking, rank_tokens
from vocab_overlap.synthetic import synthetic_dumps


def _metrics(d1, d2):
    c1, c2 = TokenizedCorpus("L1", d1), TokenizedCorpus("L2", d2)
    return overlap_metrics(extract_language_vocab(c1), extract_language_vocab(c2), c1, c2)


def test_frequency_weighted_example():
    m = _metrics([(1, 1, 2, 3)], [(1, 5)])
    assert m.f1 == 0.5 and m.f2 == 0.5
    assert m.iou == 1 / 4 and m.effective_size == 4


def test_iou_examples():
    assert iou_from_sizes(3, 3, 3) == 1.0
    assert iou_from_sizes(2, 2, 0) == 0.0
    assert 100 * iou_from_sizes(78_469, 78_381, 73_455) == pytest.approx(88.08, abs=0.005)
    with pytest.raises(UndefinedStatisticError):
        iou_from_sizes(0, 0, 0)


def test_empty_corpus_is_undefined():
    with pytest.raises(UndefinedStatisticError):
        _metrics([()], [(1,)])


@given(st.lists(st.lists(st.integers(0, 30), min_size=1, max_size=10), min_size=1, max_size=5),
       st.lists(st.lists(st.integers(0, 30), min_size=1, max_size=10), min_size=1, max_size=5))
def test_metrics_match_counting_oracle(d1, d2):
    m = _metrics(d1, d2)
    k1 = Counter(t for d in d1 for t in d)
    k2 = Counter(t for d in d2 for t in d)
    shared = k1.keys() & k2.keys()
    assert m.iou == len(shared) / len(k1.keys() | k2.keys())
    assert m.f1 == sum(k1[t] for t in shared) / sum(k1.values())
    assert m.f2 == sum(k2[t] for t in shared) / sum(k2.values())
    assert 0.0 <= m.iou <= 1.0


def test_compression_examples():
    assert compression_rates("abcd", 2) == (2.0, 2.0)
    assert compression_rates("éé", 1) == (4.0, 2.0)
    assert compression_rates("é".encode("utf-8"), 1) == (2.0, 1.0)
    with pytest.raises(ZeroDivisionError):
        compression_rates("a", 0)


@given(st.text(min_size=1), st.integers(1, 50))
def test_bytes_per_token_at_least_chars(text, n):
    b, c = compression_rates(text, n)
    assert b >= c


def _ranking(n):
    return SimilarityRanking.from_scores({t: 1.0 - t / n for t in range(n)})


def test_analysis_sets_example():
    sets = build_analysis_sets(_ranking(6), range(20), range(20), excluded=range(6), k=2, seed=1)
    assert sets.high_pairs == ((0, 0), (1, 1))
    assert sets.low_pairs == ((4, 4), (5, 5))
    assert len(sets.control_pairs) == 2
    assert all(a >= 6 and b >= 6 for a, b in sets.control_pairs)
    assert sets == build_analysis_sets(_ranking(6), range(20), range(20), excluded=range(6), k=2, seed=1)


def test_analysis_sets_sizes():
    with pytest.raises(SizeError, match="short by 2"):
        build_analysis_sets(_ranking(4), range(20), range(20), excluded=range(4), k=3)
    with pytest.raises(SizeError):
        build_analysis_sets(_ranking(6), range(7), range(20), excluded=range(6), k=2)
    with pytest.raises(ConfigurationError):
        build_analysis_sets(_ranking(6), range(20), range(20), excluded=(), k=0)


@given(st.integers(0, 10_000))
def test_control_pairs_avoid_excluded(seed):
    excluded = set(range(0, 40, 3))
    sets = build_analysis_sets(_ranking(10), range(40), range(5, 45), excluded=excluded, k=5, seed=seed)
    left = [a for a, _ in sets.control_pairs]
    right = [b for _, b in sets.control_pairs]
    assert len(set(left)) == 5 and len(set(right)) == 5
    assert not (set(left) | set(right)) & excluded


def _gaussian_dump(n, mean_high, mean_low, seed):
    # tokens 0..n-1 get cosine near mean_high, n..2n-1 near mean_low
    rng = np.random.default_rng(seed)
    d = EmbeddingDump(layer=1, dim=2)
    for t in range(2 * n):
        s = np.clip((mean_high if t < n else mean_low) + 0.05 * rng.standard_normal(), -1, 1)
        d.add(t, Language.L1, np.array([1.0, 0.0]))
        d.add(t, Language.L2, np.array([s, math.sqrt(1 - s * s)]))
    return d


def test_planted_effect_is_large():
    dump = _gaussian_dump(50, 0.8, 0.2, seed=0)
    sets = AnalysisSets(tuple((t, t) for t in range(50)), tuple((t, t) for t in range(50, 100)), ())
    rep = similarity_analysis(sets, dump, bonferroni_m=24)
    assert rep.stats.d > 2 and rep.stats.t > 0
    assert rep.stats.p_adjusted == min(1.0, 24 * rep.stats.p_raw)


def test_null_effect_is_small():
    dump = _gaussian_dump(200, 0.5, 0.5, seed=3)
    sets = AnalysisSets(tuple((t, t) for t in range(200)), tuple((t, t) for t in range(200, 400)), ())
    rep = similarity_analysis(sets, dump)
    assert abs(rep.stats.d) < 0.3
    assert np.sign(rep.stats.d) == np.sign(rep.stats.t)


def test_degenerate_identical_sets():
    d = EmbeddingDump(layer=1, dim=2)
    for t in range(4):
        d.add(t, Language.L1, np.array([1.0, 0.0]))
        d.add(t, Language.L2, np.array([1.0, 1.0]))
    sets = AnalysisSets(((0, 0), (1, 1)), ((2, 2), (3, 3)), ())
    rep = similarity_analysis(sets, d)
    assert rep.degenerate and rep.stats.d == 0.0 and rep.stats.p_raw == 1.0


def test_missing_pairs_are_reported(small_pair, small_dumps):
    v1 = extract_language_vocab(small_pair.c1)
    v2 = extract_language_vocab(small_pair.c2)
    native = v1.ids & v2.ids
    ranking = rank_tokens(small_dumps[2], native)
    sets = build_analysis_sets(ranking, v1, v2, excluded=native, k=3, seed=0)
    sets = AnalysisSets(sets.high_pairs + ((9999, 9999),), sets.low_pairs, sets.control_pairs)
    rep = similarity_analysis(sets, small_dumps[2])
    assert rep.exclusions == {"high": [[9999, 9999]]}
    assert rep.summary()["n_high"] == 3
    with pytest.raises(SizeError):
        similarity_analysis(AnalysisSets(((9999, 9999),), sets.low_pairs, ()), small_dumps[2], k=2)


def test_synthetic_high_beats_low(small_pair):
    dumps = synthetic_dumps(small_pair, dim=64, sigma=0.1, occurrences=5, layers=(1,), seed=1)
    v1 = extract_language_vocab(small_pair.c1)
    v2 = extract_language_vocab(small_pair.c2)
    native = v1.ids & v2.ids
    ranking = rank_tokens(dumps[1], native)
    rep = similarity_analysis(build_analysis_sets(ranking, v1, v2, native, k=4), dumps[1])
    s = rep.summary()
    assert s["mean_high"] > s["mean_control"] and s["mean_high"] > s["mean_low"]
