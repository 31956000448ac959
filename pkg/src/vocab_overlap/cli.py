"""Command-line pipeline: ingestion -> overlap -> similarity -> metrics/analysis.

Every subcommand reads an optional ``--config`` key-value file; explicit flags
win over config values, which win over built-in defaults. Set
``VOCAB_OVERLAP_LOG_LEVEL`` (e.g. ``DEBUG``) to change log verbosity.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .core import ConfigurationError, Language, OverlapError, OverlapPartition, OverlapSetting, ParseError
from .corpus import (
    extract_language_vocab,
    format_token_stream,
    load_pretokenized,
    load_vocab_file,
    tokenize_greedy,
)
from .metrics import build_analysis_sets, compression_rates, overlap_metrics, similarity_analysis
from .overlap import (
    OffsetPolicy,
    apply_remap,
    build_remap,
    dense_reindex,
    format_dense_sidecar,
    format_remap_table,
    invert_with_table_file,
    load_remap_table,
    native_overlap,
)
from .reporting import comment_header, provenance, render, render_json, sha256_file, write_atomic
from .similarity import (
    filter_scorable,
    format_gold,
    format_partition,
    format_ranking,
    layer_sweep,
    load_dump,
    load_dumps,
    load_gold,
    load_partition,
    load_ranking,
    partition_overlap,
    rank_tokens,
)
from .stats import discordant_counts, mcnemar
from .synthetic import config_from_mapping, generate_synthetic_pair, parse_key_values, synthetic_dumps, write_dumps

log = logging.getLogger("vocab_overlap")

ALL_SETTINGS = (OverlapSetting.FULL, OverlapSetting.HIGH_SIM, OverlapSetting.LOW_SIM, OverlapSetting.NONE)
METRIC_COLUMNS = ["setting", "v1", "v2", "overlap", "n_eff", "iou_pct", "f1_pct", "f2_pct"]

# keys that locate outputs, not inputs; kept out of the config digest
_OUTPUT_KEYS = {"output", "out_dir", "config"}


def _int_list(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(v) for v in str(value).replace(",", " ").split()]


def _str_list(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [v for v in str(value).replace(",", " ").split()]


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")


COERCE: dict[str, Callable] = {
    "base_size": int,
    "min_occ": int,
    "k": int,
    "seed": int,
    "bonferroni_m": int,
    "cap": int,
    "layer": int,
    "exact_max": int,
    "dim": int,
    "occurrences": int,
    "vocab_size": int,
    "docs_per_language": int,
    "doc_length": int,
    "sigma": float,
    "cognate_fraction": float,
    "special_tokens": _int_list,
    "layers": _int_list,
    "signal_layers": _int_list,
    "setting": _str_list,
    "equal_var": _bool,
    "byte_fallback": _bool,
}

POSITIVE = {"base_size", "k", "bonferroni_m", "cap", "min_occ", "exact_max", "dim", "occurrences",
            "vocab_size", "docs_per_language", "doc_length"}

DEFAULTS: dict[str, dict] = {
    "stats": {"setting": ["all"], "special_tokens": [], "offset_policy": "minimal", "format": "json"},
    "remap": {"setting": ["full"], "special_tokens": [], "offset_policy": "minimal"},
    "invert": {},
    "partition": {"min_occ": 100, "cap": 100},
    "layersweep": {"cap": 100, "format": "json"},
    "analyze": {"k": 500, "seed": 0, "bonferroni_m": 1, "cap": 100, "equal_var": False, "format": "json"},
    "mcnemar": {"exact_max": 25, "format": "json"},
    "synth": {"vocab_size": 60, "docs_per_language": 400, "doc_length": 40, "cognate_fraction": 0.5, "seed": 0,
              "dim": 16, "sigma": 0.1, "occurrences": 20, "layers": [1, 2, 3, 4, 5, 6], "signal_layers": [5, 6]},
    "compress": {"byte_fallback": False, "format": "json"},
}

INPUT_KEYS = {
    "stats": ("c1", "c2", "partition"),
    "remap": ("c1", "c2", "partition"),
    "invert": ("input", "table"),
    "partition": ("c1", "c2", "dump"),
    "layersweep": ("dump", "gold"),
    "analyze": ("c1", "c2", "dump", "ranking", "partition"),
    "mcnemar": ("a", "b"),
    "synth": (),
    "compress": ("text", "tokens", "vocab"),
}

REQUIRED = {
    "stats": ("c1", "c2", "base_size"),
    "remap": ("c1", "c2", "base_size", "out_dir"),
    "invert": ("input", "table", "lang", "output"),
    "partition": ("c1", "c2", "dump", "out_dir"),
    "layersweep": ("dump", "gold"),
    "analyze": ("c1", "c2", "dump", "ranking", "partition"),
    "mcnemar": ("a", "b"),
    "synth": ("out_dir",),
    "compress": ("text",),
}


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = {k: (list(v) if isinstance(v, list) else v) for k, v in DEFAULTS[command].items()}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise ConfigurationError(f"config: no such file: {path}")
        cfg.update(parse_key_values(path.read_text(encoding="utf-8")))
    for key, value in vars(args).items():
        if key in ("command", "handler") or value is None:
            continue
        cfg[key] = value
    coerce = {**COERCE, "dump": _str_list} if command == "layersweep" else COERCE
    for key, fn in coerce.items():
        if key in cfg and cfg[key] is not None:
            try:
                cfg[key] = fn(cfg[key])
            except (TypeError, ValueError):
                raise ConfigurationError(f"invalid value for {key}: {cfg[key]!r}") from None
    for key in REQUIRED[command]:
        if cfg.get(key) in (None, [], ""):
            raise ConfigurationError(f"missing required option --{key.replace('_', '-')}")
    for key in POSITIVE:
        if key in cfg and cfg[key] is not None and cfg[key] <= 0:
            raise ConfigurationError(f"{key} must be positive")
    if cfg.get("seed") is not None and cfg["seed"] < 0:
        raise ConfigurationError("seed must be non-negative")
    for key in INPUT_KEYS[command]:
        value = cfg.get(key)
        for p in value if isinstance(value, list) else [value]:
            if p is not None and not Path(p).is_file():
                raise ConfigurationError(f"{key}: no such file: {p}")
    return cfg


def _digest_view(cfg: dict, command: str | None = None) -> dict:
    # input locations are reduced to basenames; their content is hashed separately
    view = {}
    for k, v in sorted(cfg.items()):
        if k in _OUTPUT_KEYS:
            continue
        if command and k in INPUT_KEYS[command] and v is not None:
            v = [Path(p).name for p in v] if isinstance(v, list) else Path(v).name
        view[k] = v
    return view


def _prov(cfg: dict, command: str) -> dict:
    inputs = {k: cfg[k] for k in INPUT_KEYS[command] if cfg.get(k)}
    return provenance({"command": command, **_digest_view(cfg, command)}, inputs)


def _emit(cfg: dict, text: str) -> None:
    out = cfg.get("output")
    if out and out != "-":
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _settings(cfg: dict, partition: OverlapPartition | None) -> list[OverlapSetting]:
    raw = cfg["setting"]
    if any(s.lower() == "all" for s in raw):
        chosen = [s for s in ALL_SETTINGS if partition is not None or s in (OverlapSetting.FULL, OverlapSetting.NONE)]
        if partition is None:
            log.warning("no --partition given; skipping high/low settings")
        return chosen
    chosen = [OverlapSetting.parse(s) for s in raw]
    needs = [s for s in chosen if s in (OverlapSetting.HIGH_SIM, OverlapSetting.LOW_SIM)]
    if needs and partition is None:
        raise ConfigurationError(f"setting {needs[0].value!r} requires a --partition file")
    return chosen


def _load_pair(cfg: dict):
    c1 = load_pretokenized(cfg["c1"], Language.L1, cfg.get("base_size"))
    c2 = load_pretokenized(cfg["c2"], Language.L2, cfg.get("base_size"))
    return c1, c2


def _partition_for(cfg: dict, v1, v2) -> OverlapPartition | None:
    if not cfg.get("partition"):
        return None
    part = load_partition(cfg["partition"])
    native = v1.ids & v2.ids
    if part.native != native:
        # scored halves must come from this pair's overlap; the rest is unscored
        if not (part.high | part.low) <= native:
            raise ConfigurationError("partition file lists high/low tokens outside this pair's native overlap")
        part = OverlapPartition(native=native, high=part.high, low=part.low)
    return part


# --- subcommands ----------------------------------------------------------


def cmd_stats(cfg: dict) -> int:
    c1, c2 = _load_pair(cfg)
    v1, v2 = extract_language_vocab(c1), extract_language_vocab(c2)
    partition = _partition_for(cfg, v1, v2) or native_overlap(v1, v2)
    has_split = bool(cfg.get("partition"))
    rows = []
    for setting in _settings(cfg, partition if has_split else None):
        table = build_remap(v1, v2, partition, setting, cfg["base_size"], cfg["special_tokens"], cfg["offset_policy"])
        r1, r2 = apply_remap(table, c1), apply_remap(table, c2)
        m = overlap_metrics(extract_language_vocab(r1), extract_language_vocab(r2), r1, r2)
        if m.effective_size != table.plan.effective_size:
            raise OverlapError(f"{setting.value}: stream vocabulary {m.effective_size} != planned {table.plan.effective_size}")
        rows.append({"setting": setting.value, **m.as_row()})
    payload = {"v1": len(v1), "v2": len(v2), "native_overlap": len(partition.native), "settings": rows}
    _emit(cfg, render(payload, rows, METRIC_COLUMNS, cfg["format"], _prov(cfg, "stats")))
    return 0


def cmd_remap(cfg: dict) -> int:
    c1, c2 = _load_pair(cfg)
    v1, v2 = extract_language_vocab(c1), extract_language_vocab(c2)
    part = _partition_for(cfg, v1, v2)
    settings = _settings(cfg, part)
    if len(settings) != 1:
        raise ConfigurationError("remap takes exactly one --setting")
    table = build_remap(v1, v2, part or native_overlap(v1, v2), settings[0], cfg["base_size"],
                        cfg["special_tokens"], cfg["offset_policy"])
    out = Path(cfg["out_dir"])
    r1, r2 = apply_remap(table, c1), apply_remap(table, c2)
    files = {
        "c1.remapped.txt": format_token_stream(r1),
        "c2.remapped.txt": format_token_stream(r2),
        "remap_table.tsv": format_remap_table(table),
        "dense_index.tsv": format_dense_sidecar(dense_reindex(r1.token_ids() | r2.token_ids())),
    }
    for name, text in files.items():
        write_atomic(out / name, text)
    manifest = {
        "setting": table.plan.setting.value,
        "policy": table.policy.value,
        "base_size": table.base_size,
        "shared": len(table.plan.shared),
        "n_eff": table.plan.effective_size,
        "outputs": {name: sha256_file(out / name) for name in files},
    }
    write_atomic(out / "manifest.json", render_json(manifest, _prov(cfg, "remap")))
    return 0


def cmd_invert(cfg: dict) -> int:
    table = load_remap_table(cfg["table"])
    lang = Language.parse(cfg["lang"])
    corpus = load_pretokenized(cfg["input"], lang)
    restored = invert_with_table_file(table, corpus)
    write_atomic(cfg["output"], format_token_stream(restored))
    return 0


def cmd_partition(cfg: dict) -> int:
    c1, c2 = _load_pair(cfg)
    v1, v2 = extract_language_vocab(c1), extract_language_vocab(c2)
    dump = load_dump(cfg["dump"], cfg.get("layer"))
    if len(dump) == 0:
        raise ConfigurationError("embedding dump is empty")
    native = v1.ids & v2.ids
    scorable, _ = filter_scorable(native, v1.counts, v2.counts, cfg["min_occ"])
    in_dump = dump.tokens(Language.L1) & dump.tokens(Language.L2)
    absent = sorted(scorable - in_dump)
    if absent:
        log.warning("%d scorable tokens missing from the dump are left unscored", len(absent))
    ranking = rank_tokens(dump, scorable & in_dump, cfg["cap"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        part = partition_overlap(ranking, native)
    for w in caught:
        log.warning("%s", w.message)
    header = comment_header(_prov(cfg, "partition"))
    header += f"# layer={dump.layer} scored={len(ranking)} high={len(part.high)} low={len(part.low)} unscored={len(part.unscored)}\n"
    out = Path(cfg["out_dir"])
    write_atomic(out / "ranking.tsv", header + format_ranking(ranking))
    write_atomic(out / "partition.tsv", header + format_partition(part))
    return 0


def cmd_layersweep(cfg: dict) -> int:
    dumps = {}
    for path in cfg["dump"]:
        for layer, dump in load_dumps(path).items():
            if layer in dumps:
                raise ConfigurationError(f"layer {layer} appears in more than one dump file")
            dumps[layer] = dump
    if not dumps:
        raise ConfigurationError("embedding dumps are empty")
    gold = load_gold(cfg["gold"])
    result = layer_sweep(dumps, gold, cfg["cap"])
    rows = [{"layer": l, "n_tokens": result.n_tokens[l], "accuracy": a} for l, a in sorted(result.accuracies.items())]
    excluded = sorted({t for ex in result.excluded.values() for t in ex})
    payload = {"best_layer": result.best_layer, "layers": rows, "excluded_tokens": excluded}
    prov = _prov(cfg, "layersweep")
    text = render(payload, rows, ["layer", "n_tokens", "accuracy"], cfg["format"], prov)
    if cfg["format"] != "json":
        text += f"# best_layer={result.best_layer}\n"
    _emit(cfg, text)
    return 0


def cmd_analyze(cfg: dict) -> int:
    c1, c2 = _load_pair(cfg)
    v1, v2 = extract_language_vocab(c1), extract_language_vocab(c2)
    dump = load_dump(cfg["dump"], cfg.get("layer"))
    ranking = load_ranking(cfg["ranking"])
    part = load_partition(cfg["partition"])
    sets = build_analysis_sets(ranking, v1, v2, part.native | (v1.ids & v2.ids), cfg["k"], cfg["seed"])
    report = similarity_analysis(sets, dump, cfg["bonferroni_m"], cfg["cap"], cfg["equal_var"], k=cfg["k"])
    s = report.stats
    stats = {"t": s.t, "p_raw": s.p_raw, "p_adjusted": s.p_adjusted, "d": s.d, "n1": s.n1, "n2": s.n2,
             "test": "student" if report.equal_var else "welch", "bonferroni_m": cfg["bonferroni_m"],
             "degenerate": report.degenerate}
    summary = report.summary()
    payload = {
        "layer": dump.layer,
        "k": cfg["k"],
        "seed": cfg["seed"],
        "summary": summary,
        "stats": stats,
        "similarities": {"high": report.high, "low": report.low, "control": report.control},
        "pairs": {"high": [list(p) for p in sets.high_pairs], "low": [list(p) for p in sets.low_pairs],
                  "control": [list(p) for p in sets.control_pairs]},
        "exclusions": report.exclusions,
    }
    row = {**summary, **{k: v for k, v in stats.items()}}
    columns = ["mean_high", "mean_low", "mean_control", "n_high", "n_low", "n_control",
               "t", "p_raw", "p_adjusted", "d", "test", "bonferroni_m", "degenerate"]
    _emit(cfg, render(payload, [row], columns, cfg["format"], _prov(cfg, "analyze")))
    return 0


def _read_binary_vector(path: str) -> list[int]:
    values = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        for field in line.split():
            if field not in ("0", "1"):
                raise ParseError(f"{path}: expected 0 or 1, got {field!r}", line=lineno)
            values.append(int(field))
    return values


def cmd_mcnemar(cfg: dict) -> int:
    a, b = _read_binary_vector(cfg["a"]), _read_binary_vector(cfg["b"])
    if len(a) != len(b):
        raise ConfigurationError(f"length mismatch: a has {len(a)} entries, b has {len(b)}")
    only_a, only_b = discordant_counts(a, b)
    res = mcnemar(only_a, only_b, cfg["exact_max"])
    row = {"n": len(a), "b": res.b, "c": res.c, "p": res.p, "method": res.method,
           "zero_discordance": res.zero_discordance}
    _emit(cfg, render(row, [row], list(row), cfg["format"], _prov(cfg, "mcnemar")))
    return 0


def cmd_synth(cfg: dict) -> int:
    config = config_from_mapping(cfg)
    pair = generate_synthetic_pair(config)
    dumps = synthetic_dumps(pair, dim=cfg["dim"], sigma=cfg["sigma"], occurrences=cfg["occurrences"],
                            layers=cfg["layers"], signal_layers=cfg["signal_layers"], seed=config.seed)
    out = Path(cfg["out_dir"])
    write_atomic(out / "c1.txt", format_token_stream(pair.c1))
    write_atomic(out / "c2.txt", format_token_stream(pair.c2))
    write_atomic(out / "gold.tsv", format_gold(pair.gold))
    tmp = out / ".dumps.jsonl.partial"
    write_dumps(dumps, tmp)
    os.replace(tmp, out / "dumps.jsonl")
    manifest = {"base_size": pair.base_size, "config": _digest_view(cfg),
                "n_cognates": sum(pair.gold.values()), "n_false_friends": sum(not g for g in pair.gold.values())}
    write_atomic(out / "manifest.json", render_json(manifest, _prov(cfg, "synth")))
    return 0


def cmd_compress(cfg: dict) -> int:
    raw = Path(cfg["text"]).read_bytes()
    text = raw.decode("utf-8")
    if cfg.get("tokens"):
        n_tokens = load_pretokenized(cfg["tokens"], Language.L1).total_tokens
    elif cfg.get("vocab"):
        vocab = load_vocab_file(cfg["vocab"])
        n_tokens = sum(len(tokenize_greedy(line, vocab, cfg["byte_fallback"])) for line in text.splitlines())
    else:
        raise ConfigurationError("compress needs --tokens or --vocab")
    bpt, cpt = compression_rates(raw, n_tokens)
    row = {"bytes": len(raw), "chars": len(text), "tokens": n_tokens, "bytes_per_token": bpt, "chars_per_token": cpt}
    _emit(cfg, render(row, [row], list(row), cfg["format"], _prov(cfg, "compress")))
    return 0


# --- parser ---------------------------------------------------------------


def _common(p: argparse.ArgumentParser, fmt: bool = False, output: bool = False, out_dir: bool = False) -> None:
    p.add_argument("--config", help="key = value file; flags override it")
    if fmt:
        p.add_argument("--format", choices=("json", "csv", "tsv"))
    if output:
        p.add_argument("--output", "-o", help="output file (default: stdout)")
    if out_dir:
        p.add_argument("--out-dir")


def _corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c1", help="L1 token-stream file")
    p.add_argument("--c2", help="L2 token-stream file")
    p.add_argument("--base-size", type=int, help="size N of the base vocabulary")


def _remap_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--setting", action="append", help="full|high|low|none|all (repeatable)")
    p.add_argument("--partition", help="partition TSV (needed for high/low)")
    p.add_argument("--special-tokens", type=int, nargs="*", help="ids always shared")
    p.add_argument("--offset-policy", choices=[p.value for p in OffsetPolicy])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vocab-overlap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="vocabulary sizes and overlap metrics per setting")
    _common(p, fmt=True, output=True)
    _corpus_args(p)
    _remap_args(p)
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("remap", help="write remapped streams, remap table and dense index")
    _common(p, out_dir=True)
    _corpus_args(p)
    _remap_args(p)
    p.set_defaults(handler=cmd_remap)

    p = sub.add_parser("invert", help="undo a remap using its table file")
    _common(p, output=True)
    p.add_argument("--input")
    p.add_argument("--table")
    p.add_argument("--lang", choices=("L1", "L2"))
    p.set_defaults(handler=cmd_invert)

    p = sub.add_parser("partition", help="rank the overlap by cross-lingual similarity and split it")
    _common(p, out_dir=True)
    _corpus_args(p)
    p.add_argument("--dump", help="JSON Lines embedding dump")
    p.add_argument("--layer", type=int)
    p.add_argument("--min-occ", type=int)
    p.add_argument("--cap", type=int)
    p.set_defaults(handler=cmd_partition)

    p = sub.add_parser("layersweep", help="oracle cognate accuracy per layer")
    _common(p, fmt=True, output=True)
    p.add_argument("--dump", action="append", help="dump file (repeatable)")
    p.add_argument("--gold")
    p.add_argument("--cap", type=int)
    p.set_defaults(handler=cmd_layersweep)

    p = sub.add_parser("analyze", help="high/low/control similarity analysis on a model dump")
    _common(p, fmt=True, output=True)
    _corpus_args(p)
    p.add_argument("--dump")
    p.add_argument("--layer", type=int)
    p.add_argument("--ranking")
    p.add_argument("--partition")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--bonferroni-m", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--equal-var", action="store_const", const=True, help="Student t instead of Welch")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("mcnemar", help="McNemar test on two paired 0/1 correctness files")
    _common(p, fmt=True, output=True)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--exact-max", type=int)
    p.set_defaults(handler=cmd_mcnemar)

    p = sub.add_parser("synth", help="generate a synthetic bilingual fixture")
    _common(p, out_dir=True)
    p.add_argument("--vocab-size", type=int)
    p.add_argument("--docs-per-language", type=int)
    p.add_argument("--doc-length", type=int)
    p.add_argument("--cognate-fraction", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--occurrences", type=int)
    p.add_argument("--layers", help="comma-separated layer ids")
    p.add_argument("--signal-layers", help="comma-separated informative layers")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("compress", help="bytes- and characters-per-token rates")
    _common(p, fmt=True, output=True)
    p.add_argument("--text")
    p.add_argument("--tokens", help="token-stream file of the same text")
    p.add_argument("--vocab", help="vocab TSV for greedy tokenization")
    p.add_argument("--byte-fallback", action="store_const", const=True)
    p.set_defaults(handler=cmd_compress)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("VOCAB_OVERLAP_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
        return args.handler(cfg)
    except (OverlapError, OSError, ZeroDivisionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
