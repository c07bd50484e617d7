"""Run manifests: parameters, timings, and output hashes as JSON text.

A manifest records everything needed to reproduce a CLI run byte for byte:
the subcommand, its full parameter set, wall-clock timings, and the SHA-256
of every file written.
"""

from __future__ import annotations

import hashlib
import json
from typing import Mapping, Sequence


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    path: str,
    command: str,
    parameters: Mapping[str, object],
    outputs: Sequence[str],
    timings_seconds: Mapping[str, float],
) -> None:
    data = {
        "command": command,
        "parameters": dict(parameters),
        "outputs": {out: file_sha256(out) for out in outputs},
        "timings_seconds": {k: round(v, 6) for k, v in timings_seconds.items()},
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path: str) -> dict:
    with open(path, "r", encoding="ascii") as fh:
        return json.load(fh)
