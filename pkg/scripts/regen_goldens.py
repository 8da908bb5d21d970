#!/usr/bin/env python3
"""Regenerate the pneumatic walkthrough goldens under tests/goldens/pneumatic.

Run after any deliberate change to the engine, manifest, or step script,
then review the diff by hand before committing.
"""

import sys
from pathlib import Path

from instructgen.cli import main

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "tests" / "goldens" / "pneumatic"

if __name__ == "__main__":
    sys.exit(main(["walk", "--golden-dir", str(GOLDEN_DIR)]))
