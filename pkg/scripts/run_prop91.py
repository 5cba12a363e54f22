#!/usr/bin/env python3
"""Reproduce the twist-orbit family construction and its certificates."""
import sys

from rgflab.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:] or ["--dprime", "20", "--window", "5", "--radius", "6", "--seed", "7"]
    raise SystemExit(main(["experiment", "prop91", *argv]))
