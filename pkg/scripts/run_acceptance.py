"""Run the acceptance suite and print one PASS/FAIL line per criterion.

    python scripts/run_acceptance.py          # everything (several minutes)
    python scripts/run_acceptance.py --quick  # skip the m=16 simulations
"""

import argparse
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--quick", action="store_true", help="deselect tests marked slow")
    args = p.parse_args()
    argv = [str(ROOT / "tests" / "test_acceptance.py"), "-q", "-s", "-p", "no:cacheprovider"]
    if args.quick:
        argv += ["-m", "not slow"]
    return pytest.main(argv)


if __name__ == "__main__":
    sys.exit(main())
