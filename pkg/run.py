#!/usr/bin/env python3
# ==============================================================================
# HYPSTRETCH ENTRY SCRIPT
# ==============================================================================
# Same as `python -m hypstretch`.
#
# Usage:
#   python run.py check DATA/surfaces/pants_hexagons.json
#   python run.py stretch DATA/surfaces/torus_quad_triangle.json --t 1 --out torus_t1.json
# ==============================================================================

import sys

from hypstretch.cli import main

if __name__ == "__main__":
    sys.exit(main())
