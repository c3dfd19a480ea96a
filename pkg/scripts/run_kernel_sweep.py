#!/usr/bin/env python3
"""Kernel suprema sweep over the order grid 0.1..0.9.

Writes out/phi_sweep.csv; pass --jobs to parallelize, --quick for a
single order.
"""

import sys

from fracdg.cli import main

if __name__ == "__main__":
    sys.exit(main(["phi", *sys.argv[1:]]))
