#!/usr/bin/env python3
"""Quadrature and symbol identity checks with a pass/fail report.

Exit status 0 when all checks pass, 2 otherwise.
"""

import sys

from fracdg.cli import main

if __name__ == "__main__":
    sys.exit(main(["lemmas", *sys.argv[1:]]))
