#!/usr/bin/env python3
"""
Quick start script for the finray toolkit.

Runs the CLI from a source checkout without installing the package, e.g.

    python run_demo.py characterize --config configs/bench_study.json
"""

import os
import sys

# Add src to path for development
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))

from finray_compliance.main import main

if __name__ == "__main__":
    sys.exit(main())
