#!/usr/bin/env python3
"""Small error-curve run: 20-160 steps on 80 subintervals.

Produces per-step-count curves of the L2 error over (0, 1/2], the data
behind the weighted-error plots.
"""

import sys

from fracdg.cli import main

if __name__ == "__main__":
    sys.exit(main(["converge", "--quick", *sys.argv[1:]]))
