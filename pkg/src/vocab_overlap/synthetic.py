"""Desk-scale bilingual fixtures with planted cognates and false friends.

Both languages express the same stream of abstract concepts (a parallel
corpus). An overlapping token is a *cognate* when it names the same concept
in both languages and a *false friend* when it names different concepts.
Embedding dumps are derived from the same concept geometry.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .core import ConfigurationError, Language, ParseError
from .corpus import TokenizedCorpus
from .similarity import EmbeddingDump, format_dump_record


@dataclass(frozen=True)
class SyntheticConfig:
    vocab_size: int = 60
    docs_per_language: int = 400
    doc_length: int = 40
    cognate_fraction: float = 0.5
    seed: int = 0

    def validate(self) -> None:
        if self.vocab_size < 4:
            raise ConfigurationError("vocab_size must be at least 4 (overlap plus one language-only id each)")
        if self.docs_per_language < 1 or self.doc_length < 1:
            raise ConfigurationError("docs_per_language and doc_length must be positive")
        if not 0.0 <= self.cognate_fraction <= 1.0:
            raise ConfigurationError("cognate_fraction must lie in [0, 1]")


def parse_key_values(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment line."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError("expected key = value", line=lineno)
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def config_from_mapping(values: Mapping[str, object]) -> SyntheticConfig:
    kinds = {f.name: f.type for f in fields(SyntheticConfig)}
    kwargs = {}
    for key, value in values.items():
        if key not in kinds or value is None:
            continue
        cast = float if kinds[key] in (float, "float") else int
        try:
            kwargs[key] = cast(value)
        except ValueError:
            raise ConfigurationError(f"bad value for {key}: {value!r}") from None
    return SyntheticConfig(**kwargs)


@dataclass(frozen=True)
class SyntheticPair:
    c1: TokenizedCorpus
    c2: TokenizedCorpus
    gold: dict[int, bool]  # overlapping token -> is cognate
    concepts: dict[Language, dict[int, int]]  # token -> concept, per language
    n_concepts: int
    base_size: int


def _derange(tokens: list[int], concepts: list[int], own: Mapping[int, int], rng: np.random.Generator) -> list[int]:
    """Shuffle ``concepts`` so no token in ``own`` receives its own concept."""
    concepts = list(concepts)
    rng.shuffle(concepts)
    n = len(concepts)
    for _ in range(10 * n + 10):
        bad = [j for j, t in enumerate(tokens) if own.get(t) == concepts[j]]
        if not bad:
            return concepts
        for j in bad:
            k = (j + 1 + int(rng.integers(n - 1))) % n if n > 1 else j
            concepts[j], concepts[k] = concepts[k], concepts[j]
    raise ConfigurationError("could not assign distinct concepts to false friends")


def generate_synthetic_pair(config: SyntheticConfig) -> SyntheticPair:
    config.validate()
    rng = np.random.default_rng(config.seed)
    n_overlap = config.vocab_size // 2
    n_only = (config.vocab_size - n_overlap) // 2
    ids = [int(i) for i in rng.permutation(config.vocab_size)]
    overlap = ids[:n_overlap]
    l1_only = ids[n_overlap : n_overlap + n_only]
    l2_only = ids[n_overlap + n_only : n_overlap + 2 * n_only]

    n_cog = int(round(config.cognate_fraction * n_overlap))
    cognates, false_friends = overlap[:n_cog], overlap[n_cog:]
    n_concepts = n_overlap + n_only

    # concept i is expressed in L1 by (overlap + l1_only)[i]
    l1_words = overlap + l1_only
    l1_concept = {t: i for i, t in enumerate(l1_words)}
    l2_concept = {t: l1_concept[t] for t in cognates}
    rest_tokens = false_friends + l2_only
    rest_concepts = [c for c in range(n_concepts) if c >= n_cog]
    for t, c in zip(rest_tokens, _derange(rest_tokens, rest_concepts, l1_concept, rng)):
        l2_concept[t] = c

    l1_word = {c: t for t, c in l1_concept.items()}
    l2_word = {c: t for t, c in l2_concept.items()}
    total = config.docs_per_language * config.doc_length
    stream = [int(c) for c in rng.permutation(n_concepts)][:total]
    stream += [int(c) for c in rng.integers(0, n_concepts, size=total - len(stream))]
    docs = [stream[i : i + config.doc_length] for i in range(0, total, config.doc_length)]
    c1 = TokenizedCorpus(Language.L1, tuple(tuple(l1_word[c] for c in d) for d in docs))
    c2 = TokenizedCorpus(Language.L2, tuple(tuple(l2_word[c] for c in d) for d in docs))

    seen = c1.token_ids() & c2.token_ids()
    gold = {t: t in set(cognates) for t in sorted(overlap) if t in seen}
    return SyntheticPair(
        c1=c1,
        c2=c2,
        gold=gold,
        concepts={Language.L1: l1_concept, Language.L2: l2_concept},
        n_concepts=n_concepts,
        base_size=config.vocab_size,
    )


def concept_vectors(n_concepts: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vectors per concept; exactly orthonormal when ``dim >= n_concepts``."""
    g = rng.standard_normal((dim, n_concepts))
    if dim >= n_concepts:
        q, _ = np.linalg.qr(g)
        return q.T[:n_concepts]
    return (g / np.linalg.norm(g, axis=0)).T


def synthetic_dumps(
    pair: SyntheticPair,
    dim: int = 16,
    sigma: float = 0.1,
    occurrences: int = 20,
    layers: Iterable[int] = (1,),
    signal_layers: Iterable[int] | None = None,
    seed: int = 0,
) -> dict[int, EmbeddingDump]:
    """Per-occurrence vectors: concept direction plus Gaussian noise of scale ``sigma``.

    In a signal layer each token points along its concept in that language,
    so cognates are collinear across languages and false friends are not.
    Other layers use an unrelated random direction per (token, language).
    """
    layers = sorted(set(layers))
    signal = set(layers if signal_layers is None else signal_layers)
    rng = np.random.default_rng(seed)
    base = concept_vectors(pair.n_concepts, dim, rng)
    dumps = {}
    for layer in layers:
        dump = EmbeddingDump(layer=layer, dim=dim)
        for lang in (Language.L1, Language.L2):
            for tok in sorted(pair.concepts[lang]):
                if layer in signal:
                    center = base[pair.concepts[lang][tok]]
                else:
                    v = rng.standard_normal(dim)
                    center = v / np.linalg.norm(v)
                noise = sigma * rng.standard_normal((occurrences, dim))
                for row in center + noise:
                    dump.add(tok, lang, row)
        dumps[layer] = dump
    return dumps


def write_dumps(dumps: Mapping[int, EmbeddingDump], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for layer in sorted(dumps):
            dump = dumps[layer]
            for (tok, lang), vecs in sorted(dump.vectors.items(), key=lambda kv: (kv[0][1].value, kv[0][0])):
                for v in vecs:
                    fh.write(format_dump_record(tok, lang, layer, v) + "\n")
