"""Controlled vocabulary-overlap manipulation for bilingual tokenization experiments."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Language,
    OverlapError,
    OverlapPartition,
    OverlapSetting,
    RemapPlan,
    Vocabulary,
)
from .corpus import (  # noqa: E402
    TokenizedCorpus,
    extract_language_vocab,
    interleave,
    load_pretokenized,
    tokenize_greedy,
)
from .metrics import (  # noqa: E402
    build_analysis_sets,
    compression_rates,
    overlap_metrics,
    similarity_analysis,
)
from .overlap import (  # noqa: E402
    OffsetPolicy,
    apply_remap,
    build_remap,
    effective_vocab_of_streams,
    invert_remap,
    native_overlap,
    prune_vocabulary,
)
from .similarity import (  # noqa: E402
    filter_scorable,
    layer_sweep,
    partition_overlap,
    pool_static,
    score_token,
)
from .stats import bonferroni, cohens_d, mcnemar, ttest  # noqa: E402
from .synthetic import SyntheticConfig, generate_synthetic_pair  # noqa: E402

__all__ = [
    "__version__",
    "Language",
    "OverlapError",
    "OverlapPartition",
    "OverlapSetting",
    "RemapPlan",
    "Vocabulary",
    "TokenizedCorpus",
    "extract_language_vocab",
    "interleave",
    "load_pretokenized",
    "tokenize_greedy",
    "build_analysis_sets",
    "compression_rates",
    "overlap_metrics",
    "similarity_analysis",
    "OffsetPolicy",
    "apply_remap",
    "build_remap",
    "effective_vocab_of_streams",
    "invert_remap",
    "native_overlap",
    "prune_vocabulary",
    "filter_scorable",
    "layer_sweep",
    "partition_overlap",
    "pool_static",
    "score_token",
    "bonferroni",
    "cohens_d",
    "mcnemar",
    "ttest",
    "SyntheticConfig",
    "generate_synthetic_pair",
]
