"""
Graph-state verifier entry point

Run (from project root):
uv run src/main.py run --config configs/k3_honest.json
"""

import sys

from src.cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
