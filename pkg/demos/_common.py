"""Shared helpers for the demo scripts (output folder only)."""

import os
from pathlib import Path


def out_dir(name):
    root = Path(os.environ.get("DESPECKLE_OUTPUT_DIR", "demo_out"))
    path = root / name
    path.mkdir(parents=True, exist_ok=True)
    return path
