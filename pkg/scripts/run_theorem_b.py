#!/usr/bin/env python3
"""Empirical constant schedule and the free-product embedding pipeline."""
import sys

from rgflab.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:] or ["--seed", "11", "--radius", "4"]
    raise SystemExit(main(["experiment", "theorem-b", *argv]))
