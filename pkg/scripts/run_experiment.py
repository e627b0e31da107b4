#!/usr/bin/env python3
"""
Run one relkd experiment end-to-end and print its result rows.

Usage:
    python scripts/run_experiment.py [config.yaml]
"""

import logging
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from relkd import RelkdRunner

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    datefmt="%H:%M:%S",
)

logger = logging.getLogger(__name__)


def main():
    """Run every seed of the configured experiment."""
    config_path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "relkd.yaml"

    logger.info(f"Loading config from: {config_path}")

    try:
        runner = RelkdRunner.from_config(str(config_path))
        rows = runner.run_experiment()

        print("\n" + "=" * 60)
        print("RESULTS")
        print("=" * 60)
        for row in rows:
            print(f"{row.config_id} seed={row.seed}: test accuracy {100 * row.test_accuracy:.2f}%")
        mean = sum(r.test_accuracy for r in rows) / len(rows)
        print(f"\nMean over {len(rows)} seeds: {100 * mean:.2f}%")
        print("=" * 60)

    except Exception as e:
        logger.error(f"Experiment failed: {e}")
        raise


if __name__ == "__main__":
    main()
