"""Corpus ingestion: token-stream files, vocab files, counting and interleaving."""
from __future__ import annotations

import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Iterable, Sequence

from .core import (
    MAX_TOKEN_ID,
    CoverageError,
    Language,
    OutOfRangeError,
    ParseError,
    Vocabulary,
)


@dataclass(frozen=True)
class TokenizedCorpus:
    language: Language
    documents: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "language", Language.parse(self.language))
        object.__setattr__(self, "documents", tuple(tuple(int(t) for t in d) for d in self.documents))

    @property
    def total_tokens(self) -> int:
        return sum(len(d) for d in self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def token_ids(self) -> set[int]:
        return {t for doc in self.documents for t in doc}


def parse_token_stream(text: str, language: Language | str, base_size: int | None = None) -> TokenizedCorpus:
    documents = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        doc = []
        for field in line.split():
            if not field.isdigit() or not field.isascii():
                raise ParseError(f"malformed token id {field!r}", line=lineno)
            tok = int(field)
            if tok > MAX_TOKEN_ID:
                raise OutOfRangeError(f"line {lineno}: token id {tok} exceeds 32-bit range")
            if base_size is not None and tok >= base_size:
                raise OutOfRangeError(f"line {lineno}: token id {tok} >= base size {base_size}")
            doc.append(tok)
        documents.append(tuple(doc))
    return TokenizedCorpus(Language.parse(language), tuple(documents))


def load_pretokenized(path: str | Path, language: Language | str, base_size: int | None = None) -> TokenizedCorpus:
    """Read a token-stream file: one document per line, decimal ids separated by spaces."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_token_stream(text, language, base_size)


def load_shards(
    paths: Sequence[str | Path],
    language: Language | str,
    base_size: int | None = None,
    workers: int = 4,
) -> TokenizedCorpus:
    """Load several token-stream shards concurrently; documents keep shard order."""
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(lambda p: load_pretokenized(p, language, base_size), paths))
    docs = tuple(d for part in parts for d in part.documents)
    return TokenizedCorpus(Language.parse(language), docs)


def format_token_stream(corpus: TokenizedCorpus | Iterable[Sequence[int]]) -> str:
    docs = corpus.documents if isinstance(corpus, TokenizedCorpus) else corpus
    return "".join(" ".join(str(t) for t in doc) + "\n" for doc in docs)


def count_tokens(documents: Iterable[Sequence[int]]) -> Counter:
    counts: Counter = Counter()
    for doc in documents:
        counts.update(doc)
    return counts


def merge_counts(*counters: Counter) -> Counter:
    # Counter addition is associative and commutative, so shard order does not matter.
    return reduce(lambda a, b: a + b, counters, Counter())


def extract_language_vocab(corpus: TokenizedCorpus) -> Vocabulary:
    return Vocabulary(count_tokens(corpus.documents))


def extract_vocab_sharded(corpus: TokenizedCorpus, shards: int = 4, workers: int = 4) -> Vocabulary:
    docs = corpus.documents
    size = max(1, -(-len(docs) // max(1, shards)))
    chunks = [docs[i : i + size] for i in range(0, len(docs), size)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        partial = list(pool.map(count_tokens, chunks))
    return Vocabulary(merge_counts(*partial))


# --- vocab files ----------------------------------------------------------


@dataclass(frozen=True)
class VocabEntry:
    surface: str
    id: int
    score: float | None = None


@dataclass(frozen=True)
class VocabFile:
    entries: tuple[VocabEntry, ...]

    def __post_init__(self) -> None:
        ids = [e.id for e in self.entries]
        surfaces = [e.surface for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ParseError("duplicate token id in vocab file")
        if len(set(surfaces)) != len(surfaces):
            raise ParseError("duplicate surface in vocab file")

    @classmethod
    def from_mapping(cls, mapping: dict[str, int]) -> "VocabFile":
        return cls(tuple(VocabEntry(s, i) for s, i in sorted(mapping.items(), key=lambda kv: kv[1])))

    def surface_to_id(self) -> dict[str, int]:
        return {e.surface: e.id for e in self.entries}

    def id_to_surface(self) -> dict[int, str]:
        return {e.id: e.surface for e in self.entries}


def parse_vocab_file(text: str) -> VocabFile:
    entries = []
    seen_ids: set[int] = set()
    seen_surfaces: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) not in (2, 3):
            raise ParseError("expected surface<TAB>id[<TAB>score]", line=lineno)
        surface, raw_id = cols[0], cols[1]
        if not raw_id.isdigit():
            raise ParseError(f"malformed id {raw_id!r}", line=lineno)
        score = None
        if len(cols) == 3:
            try:
                score = float(cols[2])
            except ValueError:
                raise ParseError(f"malformed score {cols[2]!r}", line=lineno) from None
        tok = int(raw_id)
        if tok in seen_ids:
            raise ParseError(f"duplicate id {tok}", line=lineno)
        if surface in seen_surfaces:
            raise ParseError(f"duplicate surface {surface!r}", line=lineno)
        seen_ids.add(tok)
        seen_surfaces.add(surface)
        entries.append(VocabEntry(surface, tok, score))
    return VocabFile(tuple(entries))


def load_vocab_file(path: str | Path) -> VocabFile:
    return parse_vocab_file(Path(path).read_text(encoding="utf-8"))


def format_vocab_file(vocab: VocabFile) -> str:
    lines = []
    for e in sorted(vocab.entries, key=lambda e: e.id):
        row = [e.surface, str(e.id)]
        if e.score is not None:
            row.append(repr(e.score))
        lines.append("\t".join(row) + "\n")
    return "".join(lines)


def tokenize_greedy(text: str, vocab: VocabFile, byte_fallback: bool = False) -> list[int]:
    """Leftmost-longest segmentation of ``text`` over the vocab surfaces.

    With ``byte_fallback`` an uncovered character is emitted as its UTF-8
    bytes using ``<0xHH>`` surfaces, which must be present in the vocab.
    """
    table = vocab.surface_to_id()
    max_len = max((len(s) for s in table), default=0)
    out: list[int] = []
    i = 0
    while i < len(text):
        for width in range(min(max_len, len(text) - i), 0, -1):
            tok = table.get(text[i : i + width])
            if tok is not None:
                out.append(tok)
                i += width
                break
        else:
            ch = text[i]
            if not byte_fallback:
                raise CoverageError(f"character {ch!r} at offset {i} not covered by vocab")
            for byte in ch.encode("utf-8"):
                key = f"<0x{byte:02X}>"
                if key not in table:
                    raise CoverageError(f"byte fallback piece {key} missing for {ch!r}")
                out.append(table[key])
            i += 1
    return out


def detokenize(ids: Sequence[int], vocab: VocabFile) -> str:
    surfaces = vocab.id_to_surface()
    return "".join(surfaces[t] for t in ids)


# --- interleaving ---------------------------------------------------------


@dataclass(frozen=True)
class TaggedDocument:
    language: Language
    tokens: tuple[int, ...]


def interleave(c1: TokenizedCorpus, c2: TokenizedCorpus, seed: int) -> tuple[TaggedDocument, ...]:
    """Seeded global shuffle of the documents of both corpora, language tags kept.

    The whole multiset is shuffled at once (no chunking).
    """
    if not c1.documents or not c2.documents:
        raise CoverageError("both corpora must be non-empty to interleave")
    tagged = [TaggedDocument(c1.language, d) for d in c1.documents]
    tagged += [TaggedDocument(c2.language, d) for d in c2.documents]
    random.Random(seed).shuffle(tagged)
    return tuple(tagged)


def format_mixed_stream(stream: Iterable[TaggedDocument]) -> str:
    return "".join(f"{d.language.value}\t{' '.join(map(str, d.tokens))}\n" for d in stream)
