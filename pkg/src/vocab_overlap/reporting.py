"""Report rendering, provenance headers and atomic file output."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__

TOOL = "vocab-overlap"

_UMASK = os.umask(0)
os.umask(_UMASK)


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def config_digest(config: Mapping[str, object]) -> str:
    return sha256_text(json.dumps(config, sort_keys=True, default=str))


def provenance(config: Mapping[str, object], inputs: Mapping[str, str | Path | Sequence]) -> dict:
    files = {}
    for name, value in sorted(inputs.items()):
        paths = value if isinstance(value, (list, tuple)) else [value]
        files[name] = [{"file": Path(p).name, "sha256": sha256_file(p)} for p in paths if p is not None]
    return {"tool": TOOL, "version": __version__, "config_digest": config_digest(config), "inputs": files}


def comment_header(prov: Mapping) -> str:
    lines = [f"# tool={prov['tool']} version={prov['version']}", f"# config_digest={prov['config_digest']}"]
    for name, entries in prov["inputs"].items():
        for e in entries:
            lines.append(f"# input {name} {e['file']} sha256={e['sha256']}")
    return "".join(line + "\n" for line in lines)


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o666 & ~_UMASK)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(value: object) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.6f}"
    if value is None:
        return ""
    return str(value)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def render_json(payload: Mapping, prov: Mapping) -> str:
    return json.dumps(_json_safe({"provenance": prov, **payload}), indent=2, sort_keys=False) + "\n"


def render_table(rows: Sequence[Mapping], columns: Sequence[str], fmt: str, prov: Mapping) -> str:
    buf = io.StringIO()
    buf.write(comment_header(prov))
    writer = csv.writer(buf, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def render(payload: Mapping, rows: Sequence[Mapping], columns: Sequence[str], fmt: str, prov: Mapping) -> str:
    if fmt == "json":
        return render_json(payload, prov)
    if fmt in ("csv", "tsv"):
        return render_table(rows, columns, fmt, prov)
    raise ValueError(f"unknown format {fmt!r}")
