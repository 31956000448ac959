"""Native overlap, index remapping under the four overlap settings, and pruning."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .core import (
    ConfigurationError,
    Language,
    OutOfRangeError,
    OverlapPartition,
    OverlapSetting,
    ParseError,
    RemapPlan,
    Vocabulary,
)
from .corpus import TokenizedCorpus, count_tokens

SHARED = "shared"


class OffsetPolicy(str, enum.Enum):
    """Which non-shared L2 ids get moved by ``+N``.

    ``formula`` offsets every L2 id outside the shared set. ``minimal`` offsets
    only L2 ids that L1 also uses, so ids that only L2 ever produces keep their
    index. Both yield the same shared set and the same effective vocabulary;
    they differ by a renaming of L2-only ids, and under ``minimal`` the Full
    setting leaves both streams untouched.
    """

    FORMULA = "formula"
    MINIMAL = "minimal"


def native_overlap(v1: Vocabulary | Iterable[int], v2: Vocabulary | Iterable[int]) -> OverlapPartition:
    ids1 = v1.ids if isinstance(v1, Vocabulary) else frozenset(v1)
    ids2 = v2.ids if isinstance(v2, Vocabulary) else frozenset(v2)
    return OverlapPartition(native=ids1 & ids2)


@dataclass(frozen=True)
class RemapTable:
    plan: RemapPlan
    policy: OffsetPolicy
    l1_ids: frozenset[int]
    l2_ids: frozenset[int]
    offset_mask: np.ndarray  # bool[N]; True where an L2 id is moved to id + N

    @property
    def base_size(self) -> int:
        return self.plan.base_size

    def forward(self, language: Language | str, token: int) -> int:
        language = Language.parse(language)
        self._check_range(token)
        if language is Language.L2 and self.offset_mask[token]:
            return token + self.base_size
        return token

    def forward_array(self, language: Language | str, tokens: np.ndarray) -> np.ndarray:
        tokens = np.asarray(tokens, dtype=np.int64)
        if tokens.size and (tokens.min() < 0 or tokens.max() >= self.base_size):
            bad = tokens[(tokens < 0) | (tokens >= self.base_size)][0]
            raise OutOfRangeError(f"token id {bad} outside base vocabulary of size {self.base_size}")
        if Language.parse(language) is Language.L1:
            return tokens.copy()
        return tokens + self.offset_mask[tokens] * self.base_size

    def inverse(self, new_id: int) -> tuple[str, int]:
        """Map a remapped id back to ``(language-or-"shared", base id)``."""
        n = self.base_size
        if new_id < 0 or new_id >= 2 * n:
            raise OutOfRangeError(f"remapped id {new_id} outside [0, {2 * n})")
        if new_id >= n:
            old = new_id - n
            if not self.offset_mask[old]:
                raise OutOfRangeError(f"remapped id {new_id} is not produced by this table")
            return Language.L2.value, old
        if new_id in self.plan.shared:
            return SHARED, new_id
        if self.policy is OffsetPolicy.FORMULA or new_id in self.l1_ids:
            return Language.L1.value, new_id
        return Language.L2.value, new_id

    def inverse_for(self, language: Language | str, new_id: int) -> int:
        """Invert an id known to come from ``language``'s stream."""
        language = Language.parse(language)
        n = self.base_size
        if language is Language.L1:
            if not 0 <= new_id < n:
                raise OutOfRangeError(f"L1 id {new_id} outside [0, {n})")
            return new_id
        if new_id >= n:
            old = new_id - n
            if old >= n or not self.offset_mask[old]:
                raise OutOfRangeError(f"L2 id {new_id} is not produced by this table")
            return old
        if new_id < 0 or self.offset_mask[new_id]:
            raise OutOfRangeError(f"L2 id {new_id} is not produced by this table")
        return new_id

    def rows(self) -> list[tuple[str, int, int]]:
        """Table rows ``(lang, old, new)`` over both vocabularies, sorted by (lang, old)."""
        out = [(Language.L1.value, t, t) for t in sorted(self.l1_ids)]
        out += [(Language.L2.value, t, self.forward(Language.L2, t)) for t in sorted(self.l2_ids)]
        return out

    def _check_range(self, token: int) -> None:
        if not 0 <= token < self.base_size:
            raise OutOfRangeError(f"token id {token} outside base vocabulary of size {self.base_size}")


def build_remap(
    v1: Vocabulary,
    v2: Vocabulary,
    partition: OverlapPartition,
    setting: OverlapSetting | str,
    base_size: int,
    special_tokens: Iterable[int] = (),
    policy: OffsetPolicy | str = OffsetPolicy.MINIMAL,
) -> RemapTable:
    setting = OverlapSetting.parse(setting)
    policy = OffsetPolicy(policy)
    if base_size <= 0:
        raise ConfigurationError("base_size must be positive")
    ids1, ids2 = v1.ids, v2.ids
    for name, ids in (("L1", ids1), ("L2", ids2)):
        if ids and max(ids) >= base_size:
            raise OutOfRangeError(f"{name} vocabulary has id {max(ids)} >= base size {base_size}")
    native = ids1 & ids2
    if partition.native != native:
        raise ConfigurationError(
            f"partition native overlap ({len(partition.native)} ids) does not match "
            f"V1 ∩ V2 ({len(native)} ids)"
        )

    chosen = partition.shared_for(setting)
    if setting in (OverlapSetting.HIGH_SIM, OverlapSetting.LOW_SIM) and not chosen:
        raise ConfigurationError(f"setting {setting.value!r} needs a non-empty {setting.value} partition")
    specials = frozenset(int(t) for t in special_tokens)
    if any(t < 0 or t >= base_size for t in specials):
        raise OutOfRangeError("special token id outside base vocabulary")
    shared = frozenset(chosen | specials)

    mask = np.zeros(base_size, dtype=bool)
    if policy is OffsetPolicy.FORMULA:
        mask[:] = True
    else:
        mask[np.fromiter(ids1, dtype=np.int64, count=len(ids1))] = True
    if shared:
        mask[np.fromiter(shared, dtype=np.int64, count=len(shared))] = False

    effective = len(ids1) + len(ids2) - len(shared & native)
    plan = RemapPlan(base_size=base_size, shared=shared, setting=setting, effective_size=effective)
    return RemapTable(plan=plan, policy=policy, l1_ids=ids1, l2_ids=ids2, offset_mask=mask)


def apply_remap(table: RemapTable, corpus: TokenizedCorpus) -> TokenizedCorpus:
    docs = tuple(tuple(table.forward_array(corpus.language, np.asarray(d, dtype=np.int64)).tolist()) for d in corpus.documents)
    return TokenizedCorpus(corpus.language, docs)


def invert_remap(table: RemapTable, corpus: TokenizedCorpus) -> TokenizedCorpus:
    docs = tuple(tuple(table.inverse_for(corpus.language, t) for t in d) for d in corpus.documents)
    return TokenizedCorpus(corpus.language, docs)


def effective_vocab_of_streams(c1: TokenizedCorpus, c2: TokenizedCorpus) -> int:
    return len(c1.token_ids() | c2.token_ids())


def prune_vocabulary(vocab: Vocabulary, corpus: TokenizedCorpus) -> Vocabulary:
    counts = count_tokens(corpus.documents)
    kept = {t: counts[t] for t in vocab.ids if counts.get(t, 0) >= 1}
    surfaces = {t: s for t, s in vocab.surfaces.items() if t in kept}
    return Vocabulary(kept, surfaces)


def dense_reindex(ids: Iterable[int]) -> dict[int, int]:
    """Assign contiguous ids ``0..k-1`` to the sorted distinct remapped ids."""
    return {t: i for i, t in enumerate(sorted(set(ids)))}


# --- remap table files ----------------------------------------------------


@dataclass(frozen=True)
class RemapTableFile:
    base_size: int
    setting: OverlapSetting
    rows: tuple[tuple[str, int, int], ...]

    def inverse_for(self, language: Language | str) -> dict[int, int]:
        lang = Language.parse(language).value
        return {new: old for l, old, new in self.rows if l == lang}

    def forward_for(self, language: Language | str) -> dict[int, int]:
        lang = Language.parse(language).value
        return {old: new for l, old, new in self.rows if l == lang}


def format_remap_table(table: RemapTable) -> str:
    lines = [f"#base_size={table.base_size} setting={table.plan.setting.value}\n"]
    lines.append(f"#policy={table.policy.value} shared={len(table.plan.shared)} n_eff={table.plan.effective_size}\n")
    lines += [f"{lang}\t{old}\t{new}\n" for lang, old, new in table.rows()]
    return "".join(lines)


def parse_remap_table(text: str) -> RemapTableFile:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#base_size="):
        raise ParseError("missing '#base_size=N setting=<kind>' header", line=1)
    header = dict(kv.split("=", 1) for kv in lines[0][1:].split())
    try:
        base_size = int(header["base_size"])
        setting = OverlapSetting.parse(header["setting"])
    except (KeyError, ValueError):
        raise ParseError("malformed remap table header", line=1) from None
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3 or cols[0] not in ("L1", "L2") or not cols[1].isdigit() or not cols[2].isdigit():
            raise ParseError("expected lang<TAB>old_id<TAB>new_id", line=lineno)
        rows.append((cols[0], int(cols[1]), int(cols[2])))
    return RemapTableFile(base_size, setting, tuple(rows))


def load_remap_table(path: str | Path) -> RemapTableFile:
    return parse_remap_table(Path(path).read_text(encoding="utf-8"))


def format_dense_sidecar(mapping: Mapping[int, int]) -> str:
    return "".join(f"{new}\t{dense}\n" for new, dense in sorted(mapping.items()))


def invert_with_table_file(table: RemapTableFile, corpus: TokenizedCorpus) -> TokenizedCorpus:
    inverse = table.inverse_for(corpus.language)
    docs = []
    for lineno, doc in enumerate(corpus.documents, start=1):
        try:
            docs.append(tuple(inverse[t] for t in doc))
        except KeyError as exc:
            raise OutOfRangeError(f"line {lineno}: id {exc.args[0]} not in remap table for {corpus.language.value}") from None
    return TokenizedCorpus(corpus.language, tuple(docs))
