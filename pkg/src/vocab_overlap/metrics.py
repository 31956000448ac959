"""Overlap metrics, compression rates and the embedding-similarity analysis."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .core import (
    ConfigurationError,
    Language,
    MissingTokenError,
    SizeError,
    UndefinedStatisticError,
    Vocabulary,
)
from .corpus import TokenizedCorpus, count_tokens
from .similarity import DEFAULT_CAP, EmbeddingDump, SimilarityRanking, cosine, pool_static
from .stats import StatResult, bonferroni, cohens_d, ttest


@dataclass(frozen=True)
class OverlapMetrics:
    iou: float
    f1: float
    f2: float
    shared_size: int
    effective_size: int
    v1_size: int = 0
    v2_size: int = 0

    def as_row(self) -> dict:
        return {
            "v1": self.v1_size,
            "v2": self.v2_size,
            "overlap": self.shared_size,
            "n_eff": self.effective_size,
            "iou_pct": 100.0 * self.iou,
            "f1_pct": 100.0 * self.f1,
            "f2_pct": 100.0 * self.f2,
        }


def effective_size(v1_size: int, v2_size: int, shared_size: int) -> int:
    return v1_size + v2_size - shared_size


def iou_from_sizes(v1_size: int, v2_size: int, shared_size: int) -> float:
    n_eff = effective_size(v1_size, v2_size, shared_size)
    if n_eff <= 0:
        raise UndefinedStatisticError("IoU undefined for an empty effective vocabulary")
    return shared_size / n_eff


def overlap_metrics(
    v1: Vocabulary,
    v2: Vocabulary,
    c1: TokenizedCorpus,
    c2: TokenizedCorpus,
) -> OverlapMetrics:
    """IoU of remapped vocabularies and running-token share of the shared ids.

    Vocabularies and corpora must already be remapped under one setting;
    counts are taken from the corpora.
    """
    if c1.total_tokens == 0 or c2.total_tokens == 0:
        raise UndefinedStatisticError("frequency-weighted overlap undefined for an empty corpus")
    shared = v1.ids & v2.ids
    counts1 = count_tokens(c1.documents)
    counts2 = count_tokens(c2.documents)
    denom1 = sum(counts1[t] for t in v1.ids)
    denom2 = sum(counts2[t] for t in v2.ids)
    if denom1 == 0 or denom2 == 0:
        raise UndefinedStatisticError("frequency-weighted overlap undefined: vocabulary never occurs in corpus")
    f1 = sum(counts1[t] for t in shared) / denom1
    f2 = sum(counts2[t] for t in shared) / denom2
    n_eff = effective_size(len(v1), len(v2), len(shared))
    iou = len(shared) / n_eff if n_eff else 0.0
    return OverlapMetrics(iou, f1, f2, len(shared), n_eff, len(v1), len(v2))


def compression_rates(text: str | bytes, token_count: int) -> tuple[float, float]:
    """Return ``(bytes_per_token, chars_per_token)`` for UTF-8 ``text``."""
    if token_count <= 0:
        raise ZeroDivisionError("compression rate undefined for zero tokens")
    if isinstance(text, bytes):
        raw, chars = text, len(text.decode("utf-8"))
    else:
        raw, chars = text.encode("utf-8"), len(text)
    return len(raw) / token_count, chars / token_count


# --- embedding-similarity analysis ----------------------------------------


@dataclass(frozen=True)
class AnalysisSets:
    high_pairs: tuple[tuple[int, int], ...]
    low_pairs: tuple[tuple[int, int], ...]
    control_pairs: tuple[tuple[int, int], ...]


def build_analysis_sets(
    ranking: SimilarityRanking,
    v1: Vocabulary | Iterable[int],
    v2: Vocabulary | Iterable[int],
    excluded: Iterable[int],
    k: int = 500,
    seed: int = 0,
) -> AnalysisSets:
    """High/low sets from the ranking extremes plus ``k`` random control pairs.

    Control tokens are drawn without replacement on each side from tokens
    outside ``excluded`` (pass the native overlap, which contains every
    setting's shared set).
    """
    if k < 1:
        raise ConfigurationError("k must be positive")
    if len(ranking) < 2 * k:
        raise SizeError(f"ranking has {len(ranking)} tokens; need {2 * k} for k={k} (short by {2 * k - len(ranking)})")
    excluded = frozenset(excluded)
    ids1 = sorted(frozenset(v1.ids if isinstance(v1, Vocabulary) else v1) - excluded)
    ids2 = sorted(frozenset(v2.ids if isinstance(v2, Vocabulary) else v2) - excluded)
    short = [f"{lang} has {len(ids)}" for lang, ids in (("L1", ids1), ("L2", ids2)) if len(ids) < k]
    if short:
        raise SizeError(f"not enough non-shared tokens for {k} control pairs: {', '.join(short)}")
    tokens = ranking.tokens()
    high = tuple((t, t) for t in tokens[:k])
    low = tuple((t, t) for t in tokens[-k:])
    rng = random.Random(seed)
    left = rng.sample(ids1, k)
    right = rng.sample(ids2, k)
    return AnalysisSets(high, low, tuple(zip(left, right)))


@dataclass
class AnalysisReport:
    high: list[float]
    low: list[float]
    control: list[float]
    stats: StatResult
    equal_var: bool
    degenerate: bool = False
    exclusions: dict[str, list[list[int]]] = field(default_factory=dict)

    def summary(self) -> dict:
        def mean(x):
            return float(np.mean(x)) if x else float("nan")

        return {
            "mean_high": mean(self.high),
            "mean_low": mean(self.low),
            "mean_control": mean(self.control),
            "n_high": len(self.high),
            "n_low": len(self.low),
            "n_control": len(self.control),
        }


def _pair_scores(
    pairs: Iterable[tuple[int, int]], dump: EmbeddingDump, cap: int
) -> tuple[list[float], list[list[int]]]:
    scores, missing = [], []
    for t1, t2 in pairs:
        try:
            e1 = pool_static(dump, t1, Language.L1, cap)
            e2 = pool_static(dump, t2, Language.L2, cap)
        except MissingTokenError:
            missing.append([t1, t2])
            continue
        scores.append(cosine(e1.vector, e2.vector))
    return scores, missing


def similarity_analysis(
    sets: AnalysisSets,
    dump: EmbeddingDump,
    bonferroni_m: int = 1,
    cap: int = DEFAULT_CAP,
    equal_var: bool = False,
    k: int | None = None,
) -> AnalysisReport:
    """Cosine of pooled static embeddings per pair and high-vs-low statistics.

    Pairs whose tokens are absent from the dump are reported in
    ``exclusions``; if ``k`` is given, any set left with fewer than ``k``
    scored pairs is a :class:`SizeError`.
    """
    high, miss_h = _pair_scores(sets.high_pairs, dump, cap)
    low, miss_l = _pair_scores(sets.low_pairs, dump, cap)
    control, miss_c = _pair_scores(sets.control_pairs, dump, cap)
    exclusions = {name: m for name, m in (("high", miss_h), ("low", miss_l), ("control", miss_c)) if m}
    if k is not None:
        short = {name: len(s) for name, s in (("high", high), ("low", low), ("control", control)) if len(s) < k}
        if short:
            raise SizeError(f"fewer than k={k} scored pairs: {short}")
    tt = ttest(high, low, equal_var=equal_var)
    degenerate = False
    try:
        d = cohens_d(high, low)
    except UndefinedStatisticError:
        if tt.t != 0.0:
            raise
        d, degenerate = 0.0, True
    stats = StatResult(
        t=tt.t,
        p_raw=tt.p,
        p_adjusted=bonferroni(tt.p, bonferroni_m),
        d=d,
        n1=len(high),
        n2=len(low),
    )
    return AnalysisReport(high, low, control, stats, equal_var, degenerate, exclusions)
