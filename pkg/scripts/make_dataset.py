#!/usr/bin/env python3
"""Emit the default 420-record fine-tuning corpus to out/sft_dataset.json."""

import sys
from pathlib import Path

from instructgen.cli import main

OUT = Path(__file__).resolve().parent.parent / "out" / "sft_dataset.json"

if __name__ == "__main__":
    OUT.parent.mkdir(parents=True, exist_ok=True)
    sys.exit(main(["dataset", "--n", "420", "--seed", "7", "--out", str(OUT)]))
