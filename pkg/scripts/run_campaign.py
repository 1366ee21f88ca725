"""Run a seeded law campaign and write the JSON report.

Thin wrapper over ``hspec check`` with the acceptance-campaign defaults.

    python3 scripts/run_campaign.py --out campaign.json --workers 4
"""

import argparse
import sys

from hspec.cli import main


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="campaign.json")
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--max-dim", type=int, default=8)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--law", default="all")
    return ap.parse_args(argv)


if __name__ == "__main__":
    a = parse_args()
    argv = ["check", "--law", a.law, "--trials", str(a.trials), "--seed", str(a.seed),
            "--max-dim", str(a.max_dim), "--json", a.out]
    if a.workers is not None:
        argv += ["--workers", str(a.workers)]
    sys.exit(main(argv))
