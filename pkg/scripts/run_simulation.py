#!/usr/bin/env python3
"""
Run Simulation - запуск симулятора из корня репозитория

    python scripts/run_simulation.py run --scenario oscillator --horizon 5000 --out reports/osc
    python scripts/run_simulation.py validate configs/oscillator.env
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from app.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
