"""Reproduce the frozen constants in fewcoin.constants.

Four measurements feed the constants file:

1. Codebook spectrum at block length 64: the minimum subset lambda_min over
   200 sampled subsets fixes C2 (0.8x the measurement) and ALPHA = sqrt(C2).
2. The per-block isometry failure rate at ALPHA over random difference
   vectors fixes DELTA0 (rounded up).
3. Compression distortion on sign-pattern pairs fixes the bad-seed fraction
   the amplifier's eta default must cover.
4. Player-count searches at the acceptance configurations fix C_COMM and
   C_LDP: one constant per family must cover its worst grid cell, i.e. the
   cell whose formula value is smallest relative to what the private-coin
   path actually needs.

Takes a few minutes end to end; pass --quick to skip step 4.
"""

import argparse
import math
import sys

import numpy as np

from fewcoin import constants
from fewcoin.bounds import paninski_far
from fewcoin.codebook import build_codebook, certify_codebook, isometry_gap
from fewcoin.compression import build_dcm, dcm_distortion
from fewcoin.core import Comm, Distribution, Ldp, Verdict
from fewcoin.protocol import ProtocolConfig, required_players_raw, run_protocol


def codebook_spectrum():
    print("== codebook spectrum at n=64 (m=512, draw seed 2024) ==")
    rng = np.random.default_rng(2024)
    vectors = rng.integers(0, 2, size=(512, 64), dtype=np.uint8)
    cert = certify_codebook(vectors, c2=0.0, subset_trials=200,
                            rng=np.random.default_rng(7))
    print(f"  full lambda_min        {cert.lambda_min_full:.4f}")
    print(f"  min subset lambda_min  {cert.lambda_min_subsets:.4f}")
    print(f"  lambda_max_centered    {cert.lambda_max_centered:.4f}")
    c2 = 0.8 * cert.lambda_min_subsets
    print(f"  => C2 = 0.8x subset min = {c2:.4f} (frozen: {constants.C2})")
    print(f"  => ALPHA = sqrt(C2)     = {math.sqrt(c2):.4f} (frozen: {constants.ALPHA:.4f})")


def isometry_failure():
    print("== per-block isometry failure at frozen alpha, n=64 ==")
    cb = build_codebook(64, seed=2024)
    rng = np.random.default_rng(5)
    fails = []
    for _ in range(1000):
        x = rng.dirichlet(np.ones(64)) - rng.dirichlet(np.ones(64))
        fails.append(1.0 - isometry_gap(cb, x))
    print(f"  mean {np.mean(fails):.3f}, max {np.max(fails):.3f}"
          f" (frozen DELTA0: {constants.DELTA0})")


def compression_bad_fraction():
    print("== compression bad-seed fraction (sign-pattern pairs) ==")
    rng = np.random.default_rng(9)
    for k, s in ((256, 7), (128, 6), (128, 5)):
        dcm = build_dcm(k, s)
        u = Distribution.uniform(k)
        worst = 0.0
        for _ in range(60):
            p = paninski_far(k, 0.3, rng)
            worst = max(worst, 1.0 - dcm_distortion(dcm, p, u).preserved_fraction)
        print(f"  k={k} s={s} (sigma={dcm.sigma}, theta={dcm.theta:.3f}): "
              f"worst bad fraction {worst:.3f} (AMP_ETA: {constants.AMP_ETA})")


def _error_rates(constraint, k, eps, n, trials=200, master=0):
    config = ProtocolConfig(k=k, eps=eps, delta=1 / 12, constraint=constraint,
                            s=0, n=n)
    q = Distribution.uniform(k)
    t1 = t2 = 0
    for t in range(trials):
        v, _ = run_protocol(config, q, q, master + 2 * t)
        t1 += v is Verdict.REJECT
        p = paninski_far(k, eps, np.random.default_rng(master + 2 * t + 1))
        v, _ = run_protocol(config, q, p, master + 2 * t + 1)
        t2 += v is Verdict.ACCEPT
    return t1 / trials, t2 / trials


def player_constants():
    print("== player-count search at the acceptance configurations ==")
    k, eps = 64, 0.3
    for constraint, worst_cell_s in ((Comm(3), 4), (Ldp(0.5), 4)):
        n = 4000 if isinstance(constraint, Comm) else 60_000
        while True:
            t1, t2 = _error_rates(constraint, k, eps, n)
            print(f"  {constraint} n={n}: type1 {t1:.3f} type2 {t2:.3f}")
            if t1 <= 1 / 18 and t2 <= 1 / 18:
                break
            n = int(n * 1.4)
        # The worst grid cell is s=4, whose formula value is capped: the
        # frozen constant is the private-path need over that cell's unit.
        unit = required_players_raw(constraint, k, eps, worst_cell_s)
        frozen = constants.C_COMM if isinstance(constraint, Comm) else constants.C_LDP
        print(f"  => implied C >= {n / (unit / frozen):.1f} (frozen: {frozen})")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="skip the player-count search")
    args = parser.parse_args(argv)
    codebook_spectrum()
    isometry_failure()
    compression_bad_fraction()
    if not args.quick:
        player_constants()
    return 0


if __name__ == "__main__":
    sys.exit(main())
