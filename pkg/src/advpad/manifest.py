"""Run manifests: every CLI run records what produced its outputs."""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    anchor_path,
    command: str,
    seed: int | None,
    inputs: list,
    outputs: list,
    config_path: str | None = None,
    checkpoint: str | None = None,
    extra: dict | None = None,
) -> str:
    """Write <anchor>.manifest.json next to the run's primary output."""
    anchor = Path(anchor_path)
    manifest_path = (
        anchor / "manifest.json" if anchor.is_dir() else anchor.with_suffix(anchor.suffix + ".manifest.json")
    )
    payload = {
        "command": command,
        "seed": seed,
        "config": config_path,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if checkpoint is not None:
        payload["checkpoint_sha256"] = file_sha256(checkpoint)
    if extra:
        payload.update(extra)
    manifest_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")
    return str(manifest_path)
