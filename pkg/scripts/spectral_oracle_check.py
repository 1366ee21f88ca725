"""Compare certified spectral radii against closed-form 2x2 and 3x3 roots.

Uses the mpmath oracles from the test suite and reports misses and the
widest relative bracket.

    python3 scripts/spectral_oracle_check.py --count 2000
"""

import argparse
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "tests"))
import oracles  # noqa: E402

from hspec.harness import GenConfig, gen_matrix  # noqa: E402
from hspec.spectral import spectral_radius  # noqa: E402


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    return ap.parse_args(argv)


def main(argv=None):
    a = parse_args(argv)
    rng = np.random.default_rng(a.seed)
    cfg = GenConfig(zero_density=0.2, structured_injection_rate=0.05)
    bad = 0
    for n, oracle in ((2, oracles.r2), (3, oracles.r3)):
        misses, widest = 0, 0.0
        for _ in range(a.count):
            K = gen_matrix(cfg, rng, n)
            cv = spectral_radius(K)
            exact = float(oracle(K.tolist()))
            misses += not cv.lo <= exact <= cv.hi
            widest = max(widest, cv.width / exact if exact > 0 else cv.width)
        print(f"{n}x{n}: {a.count} matrices, {misses} misses, widest relative bracket {widest:.2e}")
        bad += misses
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
