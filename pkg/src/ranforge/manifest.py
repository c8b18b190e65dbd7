"""Run manifests: what produced a directory, from which inputs, with which digests."""

from __future__ import annotations

import hashlib
import json
import os
from datetime import datetime, timezone
from pathlib import Path

TOOL_VERSION = "0.1.0"
MANIFEST_NAME = "manifest.json"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_manifest(out_dir, *, command: str, scenario_sha256: str | None,
                   seed: int | None, started_utc: str) -> Path:
    """Inventory every file in ``out_dir`` (except the manifest) and write it.

    The write is atomic (temp file + rename) so a crashed run never leaves a
    truncated manifest behind.
    """
    out_dir = Path(out_dir)
    files = []
    for path in sorted(out_dir.rglob("*")):
        if path.is_file() and path.name != MANIFEST_NAME:
            files.append(
                {
                    "name": str(path.relative_to(out_dir)),
                    "sha256": sha256_file(path),
                    "bytes": path.stat().st_size,
                }
            )
    doc = {
        "tool": "ranforge",
        "version": TOOL_VERSION,
        "command": command,
        "scenario_sha256": scenario_sha256,
        "seed": seed,
        "started_utc": started_utc,
        "finished_utc": datetime.now(timezone.utc).isoformat(),
        "files": files,
    }
    target = out_dir / MANIFEST_NAME
    tmp = out_dir / (MANIFEST_NAME + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, target)
    return target


def now_utc() -> str:
    return datetime.now(timezone.utc).isoformat()


def manifests_equal_modulo_timestamps(a_path, b_path) -> bool:
    with open(a_path) as fa, open(b_path) as fb:
        a, b = json.load(fa), json.load(fb)
    for doc in (a, b):
        doc.pop("started_utc", None)
        doc.pop("finished_utc", None)
    return a == b
