#!/usr/bin/env python3
"""Separated triple that is neither misaligned nor a free product."""
import sys

from rgflab.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:] or ["--D", "8", "--seed", "7"]
    raise SystemExit(main(["experiment", "example92", *argv]))
