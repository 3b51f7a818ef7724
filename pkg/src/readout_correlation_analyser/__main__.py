"""
Entry point for running the package as a module.

Usage:
    python -m readout_correlation_analyser simulate --model model.json ...
"""

import sys

from .cli import main


if __name__ == "__main__":
    sys.exit(main())
