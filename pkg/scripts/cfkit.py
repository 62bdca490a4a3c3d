"""
Run the cfkit command-line tool from a checkout.

Usage:
    python scripts/cfkit.py check tau-minus-one
    python scripts/cfkit.py preset list
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))

from src.cli import main


if __name__ == "__main__":
    raise SystemExit(main())
