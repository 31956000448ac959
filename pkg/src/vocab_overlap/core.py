"""Domain types shared across the package.

Nothing in here touches the filesystem. Token ids are plain ``int`` values
indexing a base vocabulary ``[0, N)``; after remapping they live in ``[0, 2N)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

# 32-bit unsigned ids leave headroom for 2N with N = 250k.
MAX_TOKEN_ID = 2**32 - 1


class OverlapError(Exception):
    """Base class for every error raised by this package."""


class ParseError(OverlapError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OutOfRangeError(OverlapError):
    pass


class ConfigurationError(OverlapError):
    pass


class CoverageError(OverlapError):
    pass


class MissingTokenError(OverlapError):
    pass


class DumpFormatError(OverlapError):
    def __init__(self, message: str, record: int | None = None):
        self.record = record
        if record is not None:
            message = f"record {record}: {message}"
        super().__init__(message)


class UndefinedStatisticError(OverlapError):
    pass


class SizeError(OverlapError):
    pass


class Language(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"

    @classmethod
    def parse(cls, value: "str | Language") -> "Language":
        if isinstance(value, Language):
            return value
        try:
            return cls(value.upper())
        except ValueError:
            raise ConfigurationError(f"unknown language tag {value!r}; expected L1 or L2") from None


class OverlapSetting(str, enum.Enum):
    FULL = "full"
    HIGH_SIM = "high"
    LOW_SIM = "low"
    NONE = "none"

    @classmethod
    def parse(cls, value: "str | OverlapSetting") -> "OverlapSetting":
        if isinstance(value, OverlapSetting):
            return value
        key = value.strip().lower().replace("_", "").replace("-", "")
        aliases = {
            "full": cls.FULL,
            "high": cls.HIGH_SIM,
            "highsim": cls.HIGH_SIM,
            "low": cls.LOW_SIM,
            "lowsim": cls.LOW_SIM,
            "none": cls.NONE,
            "nooverlap": cls.NONE,
        }
        if key not in aliases:
            raise ConfigurationError(f"unknown overlap setting {value!r}")
        return aliases[key]


@dataclass(frozen=True)
class Vocabulary:
    """Token ids observed in one corpus, with their occurrence counts.

    ``surfaces`` is optional; pre-tokenized streams carry ids only.
    """

    counts: Mapping[int, int]
    surfaces: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        counts = {int(k): int(v) for k, v in sorted(self.counts.items())}
        for tok, n in counts.items():
            if tok < 0 or tok > MAX_TOKEN_ID:
                raise OutOfRangeError(f"token id {tok} outside the 32-bit unsigned range")
            if n < 0:
                raise ConfigurationError(f"negative count {n} for token {tok}")
        surfaces = dict(sorted(self.surfaces.items()))
        if len(set(surfaces.values())) != len(surfaces):
            raise ConfigurationError("vocabulary surfaces must be unique")
        object.__setattr__(self, "counts", MappingProxyType(counts))
        object.__setattr__(self, "surfaces", MappingProxyType(surfaces))

    @classmethod
    def from_ids(cls, ids: Iterable[int]) -> "Vocabulary":
        return cls({int(t): 0 for t in ids})

    @cached_property
    def ids(self) -> frozenset[int]:
        return frozenset(self.counts)

    def sorted_ids(self) -> list[int]:
        return list(self.counts)

    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)

    def __contains__(self, token: object) -> bool:
        return token in self.counts

    def __iter__(self):
        return iter(self.counts)


@dataclass(frozen=True)
class OverlapPartition:
    """Native overlap split into high-similarity, low-similarity and unscored tokens."""

    native: frozenset[int]
    high: frozenset[int] = frozenset()
    low: frozenset[int] = frozenset()
    unscored: frozenset[int] | None = None

    def __post_init__(self) -> None:
        native = frozenset(self.native)
        high = frozenset(self.high)
        low = frozenset(self.low)
        unscored = native - high - low if self.unscored is None else frozenset(self.unscored)
        if not high <= native or not low <= native:
            raise ConfigurationError("high/low sets must be subsets of the native overlap")
        if high & low:
            raise ConfigurationError("high and low sets overlap")
        if unscored & (high | low) or (high | low | unscored) != native:
            raise ConfigurationError("high, low and unscored must partition the native overlap")
        object.__setattr__(self, "native", native)
        object.__setattr__(self, "high", high)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "unscored", unscored)

    def shared_for(self, setting: OverlapSetting) -> frozenset[int]:
        setting = OverlapSetting.parse(setting)
        if setting is OverlapSetting.FULL:
            return self.native
        if setting is OverlapSetting.HIGH_SIM:
            return self.high
        if setting is OverlapSetting.LOW_SIM:
            return self.low
        return frozenset()


@dataclass(frozen=True)
class RemapPlan:
    base_size: int
    shared: frozenset[int]
    setting: OverlapSetting
    effective_size: int
