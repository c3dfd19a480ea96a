#!/usr/bin/env python3
"""Graded-mesh convergence study with the default configuration.

Writes out/error_table.csv and one error curve per step count; any
extra arguments are passed through (e.g. --nu 0.5 --out results).
"""

import sys

from fracdg.cli import main

if __name__ == "__main__":
    sys.exit(main(["converge", *sys.argv[1:]]))
