"""Print the alpha profiles of r, op2 and w for one matrix.

The matrix is read from a Matrix Market file, or a seeded random one is
drawn. Each row shows f(S_alpha(K)) on the grid; the minimum sits at 1/2.

    python3 scripts/profile_demo.py --dim 4 --seed 3 --grid 11
"""

import argparse

import numpy as np

from hspec.constructions import alpha_profile
from hspec.harness import GenConfig, gen_matrix
from hspec.io import load_matrix


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--matrix", help="Matrix Market file; random if omitted")
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", type=int, default=11)
    return ap.parse_args(argv)


def main(argv=None):
    a = parse_args(argv)
    if a.matrix:
        K = load_matrix(a.matrix)
    else:
        K = gen_matrix(GenConfig(entry_model="uniform01", zero_density=0.0, structured_injection_rate=0.0), np.random.default_rng(a.seed), a.dim)
    print(np.array2string(np.asarray(K.tolist()), precision=4))
    for f in ("r", "op2", "w"):
        prof = alpha_profile(K, f, a.grid)
        cells = "  ".join(f"{v:.6g}" for v in prof.values)
        print(f"{f:>4}: {cells}")


if __name__ == "__main__":
    main()
