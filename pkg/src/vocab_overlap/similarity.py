"""Static embeddings from contextual dumps, cross-lingual ranking, and layer selection."""
from __future__ import annotations

import json
import logging
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .core import (
    ConfigurationError,
    DumpFormatError,
    Language,
    MissingTokenError,
    OverlapPartition,
    ParseError,
    UndefinedStatisticError,
)

log = logging.getLogger(__name__)

DEFAULT_CAP = 100
DEFAULT_MIN_OCC = 100


@dataclass
class EmbeddingDump:
    """Occurrence vectors for one layer, keyed by ``(token, language)`` in file order."""

    layer: int
    dim: int
    vectors: dict[tuple[int, Language], list[np.ndarray]] = field(default_factory=dict)

    def add(self, token: int, language: Language, vec: np.ndarray) -> None:
        if vec.shape != (self.dim,):
            raise DumpFormatError(f"vector dimension {vec.shape[0]} != {self.dim}")
        self.vectors.setdefault((token, language), []).append(vec)

    def occurrences(self, token: int, language: Language | str) -> list[np.ndarray]:
        return self.vectors.get((token, Language.parse(language)), [])

    def tokens(self, language: Language | str) -> set[int]:
        lang = Language.parse(language)
        return {t for t, l in self.vectors if l is lang}

    def __len__(self) -> int:
        return sum(len(v) for v in self.vectors.values())


def parse_dumps(lines: Iterable[str]) -> dict[int, EmbeddingDump]:
    """Parse JSON Lines occurrence records, grouped by layer.

    Every record in a file must share one vector dimension.
    """
    dumps: dict[int, EmbeddingDump] = {}
    dim = None
    for recno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            token = rec["token"]
            lang = Language.parse(rec["lang"])
            layer = rec["layer"]
            vec = np.asarray(rec["vec"], dtype=np.float64)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DumpFormatError(f"malformed record ({exc})", record=recno) from None
        except ConfigurationError as exc:
            raise DumpFormatError(str(exc), record=recno) from None
        if not isinstance(token, int) or token < 0 or not isinstance(layer, int):
            raise DumpFormatError("token and layer must be non-negative integers", record=recno)
        if vec.ndim != 1 or vec.size == 0:
            raise DumpFormatError("vec must be a non-empty list of numbers", record=recno)
        if dim is None:
            dim = vec.size
        elif vec.size != dim:
            raise DumpFormatError(f"dimension mismatch: got {vec.size}, expected {dim}", record=recno)
        dumps.setdefault(layer, EmbeddingDump(layer=layer, dim=dim)).add(token, lang, vec)
    return dumps


def load_dumps(path: str | Path) -> dict[int, EmbeddingDump]:
    with open(path, encoding="utf-8") as fh:
        return parse_dumps(fh)


def load_dump(path: str | Path, layer: int | None = None) -> EmbeddingDump:
    dumps = load_dumps(path)
    if not dumps:
        raise ConfigurationError(f"embedding dump {path} is empty")
    if layer is None:
        if len(dumps) > 1:
            raise ConfigurationError(f"dump {path} holds layers {sorted(dumps)}; choose one with --layer")
        return next(iter(dumps.values()))
    if layer not in dumps:
        raise ConfigurationError(f"layer {layer} not in dump {path} (has {sorted(dumps)})")
    return dumps[layer]


def format_dump_record(token: int, language: Language, layer: int, vec: Iterable[float]) -> str:
    return json.dumps({"token": token, "lang": language.value, "layer": layer, "vec": [float(x) for x in vec]})


@dataclass(frozen=True)
class StaticEmbedding:
    token: int
    language: Language
    vector: np.ndarray
    n_occurrences: int


def pool_static(dump: EmbeddingDump, token: int, language: Language | str, cap: int = DEFAULT_CAP) -> StaticEmbedding:
    """Mean of the first ``cap`` occurrence vectors of ``token`` in ``language``."""
    language = Language.parse(language)
    occ = dump.occurrences(token, language)
    if not occ:
        raise MissingTokenError(f"no occurrences of token {token} ({language.value}) in layer-{dump.layer} dump")
    used = occ[:cap]
    return StaticEmbedding(token, language, np.mean(np.stack(used), axis=0), len(used))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ConfigurationError(f"dimension mismatch {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise UndefinedStatisticError("cosine similarity undefined for a zero-norm vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def score_token(e1: StaticEmbedding, e2: StaticEmbedding) -> float:
    return cosine(e1.vector, e2.vector)


@dataclass(frozen=True)
class SimilarityRanking:
    """Rows ``(token, score)``, descending by score with ties by ascending token id."""

    rows: tuple[tuple[int, float], ...]

    @classmethod
    def from_scores(cls, scores: Mapping[int, float]) -> "SimilarityRanking":
        return cls(tuple(sorted(((int(t), float(s)) for t, s in scores.items()), key=lambda r: (-r[1], r[0]))))

    def tokens(self) -> list[int]:
        return [t for t, _ in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


def rank_tokens(dump: EmbeddingDump, tokens: Iterable[int], cap: int = DEFAULT_CAP) -> SimilarityRanking:
    scores = {}
    for t in sorted(set(tokens)):
        e1 = pool_static(dump, t, Language.L1, cap)
        e2 = pool_static(dump, t, Language.L2, cap)
        scores[t] = score_token(e1, e2)
    return SimilarityRanking.from_scores(scores)


def format_ranking(ranking: SimilarityRanking) -> str:
    return "".join(f"{t}\t{s:.6f}\n" for t, s in ranking.rows)


def parse_ranking(text: str) -> SimilarityRanking:
    # File order is authoritative; printed scores are rounded and may tie.
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        try:
            rows.append((int(cols[0]), float(cols[1])))
        except (IndexError, ValueError):
            raise ParseError("expected token_id<TAB>score", line=lineno) from None
    return SimilarityRanking(tuple(rows))


def load_ranking(path: str | Path) -> SimilarityRanking:
    return parse_ranking(Path(path).read_text(encoding="utf-8"))


def filter_scorable(
    native: Iterable[int],
    counts1: Mapping[int, int],
    counts2: Mapping[int, int],
    min_occ: int = DEFAULT_MIN_OCC,
) -> tuple[frozenset[int], frozenset[int]]:
    """Split the overlap into tokens frequent enough in both corpora and the rest."""
    native = frozenset(native)
    scorable = frozenset(t for t in native if counts1.get(t, 0) >= min_occ and counts2.get(t, 0) >= min_occ)
    return scorable, native - scorable


def partition_overlap(ranking: SimilarityRanking, native: Iterable[int]) -> OverlapPartition:
    """Top ``ceil(k/2)`` ranked tokens become high-similarity, the rest low."""
    native = frozenset(native)
    ranked = ranking.tokens()
    if not ranked:
        raise ConfigurationError("cannot partition an empty ranking")
    if len(set(ranked)) != len(ranked):
        raise ConfigurationError("ranking lists a token more than once")
    stray = [t for t in ranked if t not in native]
    if stray:
        raise ConfigurationError(f"ranked tokens outside the native overlap: {stray[:5]}")
    if len(ranked) == 1:
        warnings.warn("only one scored token; the low-similarity set is empty", stacklevel=2)
    cut = math.ceil(len(ranked) / 2)
    high = frozenset(ranked[:cut])
    low = frozenset(ranked[cut:])
    return OverlapPartition(native=native, high=high, low=low, unscored=native - high - low)


def format_partition(partition: OverlapPartition) -> str:
    label = {t: "high" for t in partition.high}
    label.update({t: "low" for t in partition.low})
    label.update({t: "unscored" for t in partition.unscored})
    return "".join(f"{t}\t{label[t]}\n" for t in sorted(label))


def parse_partition(text: str) -> OverlapPartition:
    groups: dict[str, set[int]] = defaultdict(set)
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2 or cols[1] not in ("high", "low", "unscored") or not cols[0].isdigit():
            raise ParseError("expected token_id<TAB>{high|low|unscored}", line=lineno)
        groups[cols[1]].add(int(cols[0]))
    native = groups["high"] | groups["low"] | groups["unscored"]
    return OverlapPartition(native=frozenset(native), high=frozenset(groups["high"]),
                            low=frozenset(groups["low"]), unscored=frozenset(groups["unscored"]))


def load_partition(path: str | Path) -> OverlapPartition:
    return parse_partition(Path(path).read_text(encoding="utf-8"))


# --- layer selection ------------------------------------------------------


def oracle_accuracy(scores: Mapping[int, float], gold: Mapping[int, bool]) -> float:
    """Best accuracy of "top-n are cognates" over every threshold n.

    Thresholds never split a group of tied scores: tied tokens are labelled
    together, so the result does not depend on how ties are ordered.
    """
    tokens = [t for t in scores if t in gold]
    if not tokens:
        raise ConfigurationError("no labelled tokens to evaluate")
    labels = {gold[t] for t in tokens}
    if len(labels) == 1:
        warnings.warn("gold labels contain a single class", stacklevel=2)
    order = sorted(tokens, key=lambda t: (-scores[t], t))
    k = len(order)
    correct = sum(1 for t in order if not gold[t])  # n = 0: everything predicted non-cognate
    best = correct
    for i, t in enumerate(order):
        correct += 1 if gold[t] else -1
        last_of_tie = i + 1 == k or scores[order[i + 1]] != scores[t]
        if last_of_tie:
            best = max(best, correct)
    return best / k


@dataclass(frozen=True)
class LayerSweepResult:
    best_layer: int
    accuracies: dict[int, float]
    n_tokens: dict[int, int]
    excluded: dict[int, tuple[int, ...]]


def layer_sweep(
    dumps: Mapping[int, EmbeddingDump],
    gold: Mapping[int, bool],
    cap: int = DEFAULT_CAP,
) -> LayerSweepResult:
    """Oracle cognate-classification accuracy per layer; ties go to the lowest layer."""
    if not dumps:
        raise ConfigurationError("layer sweep needs at least one layer dump")
    accuracies, sizes, excluded = {}, {}, {}
    for layer in sorted(dumps):
        dump = dumps[layer]
        present = dump.tokens(Language.L1) & dump.tokens(Language.L2)
        missing = tuple(sorted(t for t in gold if t not in present))
        if missing:
            log.warning("layer %d: %d labelled tokens missing from dump, excluded", layer, len(missing))
        usable = [t for t in gold if t in present]
        ranking = rank_tokens(dump, usable, cap)
        scores = dict(ranking.rows)
        accuracies[layer] = oracle_accuracy(scores, gold)
        sizes[layer] = len(usable)
        excluded[layer] = missing
    best = min(accuracies, key=lambda l: (-accuracies[l], l))
    return LayerSweepResult(best, accuracies, sizes, excluded)


def parse_gold(text: str) -> dict[int, bool]:
    gold = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2 or not cols[0].isdigit() or cols[1] not in ("cognate", "noncognate"):
            raise ParseError("expected token_id<TAB>{cognate|noncognate}", line=lineno)
        gold[int(cols[0])] = cols[1] == "cognate"
    return gold


def load_gold(path: str | Path) -> dict[int, bool]:
    return parse_gold(Path(path).read_text(encoding="utf-8"))


def format_gold(gold: Mapping[int, bool]) -> str:
    return "".join(f"{t}\t{'cognate' if g else 'noncognate'}\n" for t, g in sorted(gold.items()))
