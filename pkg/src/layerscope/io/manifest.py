"""Run manifests: what was run, with what, producing which bytes.

The manifest itself is not listed as an artifact (its timestamps vary
between reruns); every listed artifact must exist and hash-match, which
is what makes reruns comparable.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

from ..exceptions import ValidationError
from .atomic import atomic_write_text

MANIFEST_NAME = "manifest.json"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def build_manifest(command: str, parameters: dict, out_dir, artifact_paths,
                   seed: int | None = None, weights_path=None,
                   started: str | None = None, finished: str | None = None,
                   version: str | None = None) -> dict:
    from .. import __version__

    out_dir = Path(out_dir)
    artifacts = []
    for p in sorted(Path(p) for p in artifact_paths):
        # relative to out_dir whichever way the caller spelled the path
        rel = p.resolve().relative_to(out_dir.resolve()).as_posix()
        artifacts.append({"path": rel, "sha256": sha256_file(out_dir / rel)})
    manifest = {
        "tool": "layerscope",
        "version": version or __version__,
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "weights_sha256": sha256_file(weights_path) if weights_path else None,
        "started_utc": started or utc_now(),
        "finished_utc": finished or utc_now(),
        "artifacts": artifacts,
    }
    return manifest


def write_manifest(manifest: dict, out_dir) -> Path:
    path = Path(out_dir) / MANIFEST_NAME
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(out_dir) -> dict:
    path = Path(out_dir) / MANIFEST_NAME
    if not path.is_file():
        raise ValidationError(f"{path}: manifest not found")
    return json.loads(path.read_text(encoding="utf-8"))


def verify_manifest(out_dir) -> list[str]:
    """Return a list of problems; empty means every artifact hash-matches."""
    out_dir = Path(out_dir)
    manifest = read_manifest(out_dir)
    problems = []
    for entry in manifest.get("artifacts", []):
        path = out_dir / entry["path"]
        if not path.is_file():
            problems.append(f"missing artifact: {entry['path']}")
        elif sha256_file(path) != entry["sha256"]:
            problems.append(f"hash mismatch: {entry['path']}")
    return problems
