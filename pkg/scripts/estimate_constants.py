#!/usr/bin/env python3
"""Record the empirical projection constants of the torus model."""
import sys

from rgflab.cli import main

if __name__ == "__main__":
    raise SystemExit(main(["constants", "estimate", *(sys.argv[1:] or ["--seed", "0"])]))
