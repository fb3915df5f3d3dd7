"""Command-line harness: certify, test, experiment, bounds.

Exit codes: 0 success, 1 certification/cell failure, 2 bad flags or malformed
input files (argparse's own usage errors also exit 2).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import constants
from .amplifier import build_amplifier
from .bounds import (
    FluctuationConfig,
    chi2_fluctuation,
    norm_bound_audit,
    paninski_far,
    random_channel,
    random_far,
    sample_lb,
)
from .codebook import build_codebook
from .core import (
    CertificationFailed,
    Comm,
    DegreeExceedsGraph,
    Distribution,
    Ldp,
    SeedBudget,
    load_distribution,
    pad_to_pow2,
)
from .experiments import parse_spec_file, run_experiment, summary_table, write_csv
from .protocol import ProtocolConfig, required_players, run_protocol


def _cmd_certify(args) -> int:
    if args.target == "codebook":
        try:
            cb = build_codebook(args.n, c0=args.c0, seed=args.seed,
                                subset_trials=args.trials)
        except CertificationFailed as exc:
            print(f"certification FAILED: {exc}")
            return 1
        c = cb.cert
        print(f"codebook n={cb.n} m={cb.m} c0={cb.c0} alpha={cb.alpha:.4f} delta0={cb.delta0}")
        print(f"  lambda_min_full    = {c.lambda_min_full:.6f}")
        print(f"  lambda_min_subsets = {c.lambda_min_subsets:.6f}  (c2={c.c2}, {c.trials} subsets)")
        print(f"  lambda_max_centered= {c.lambda_max_centered:.6f}  (cap={c.lambda_max_cap})")
        print(f"  passed = {c.passed}")
        return 0 if c.passed else 1
    try:
        amp = build_amplifier(args.s, args.eta, args.gamma, seed=args.seed)
    except (CertificationFailed, DegreeExceedsGraph) as exc:
        print(f"certification FAILED: {exc}")
        return 1
    print(f"expander s={amp.s} n={amp.n} d={amp.d} mode={amp.mode}")
    print(f"  lambda = {amp.lam:.6f} (target {(1-amp.eta)*(amp.gamma/amp.eta)**0.5:.6f})")
    return 0


def _true_dist(text: str, k: int, rng) -> Distribution:
    if text == "uniform":
        return Distribution.uniform(k)
    if text.startswith("paninski:"):
        return paninski_far(k, float(text.split(":", 1)[1]), rng)
    if text.startswith("far:"):
        return random_far(k, float(text.split(":", 1)[1]), rng)
    return load_distribution(text)


def _cmd_test(args) -> int:
    rng = np.random.default_rng(args.seed)
    try:
        if args.uniform:
            q = Distribution.uniform(args.k)
        else:
            q = pad_to_pow2(load_distribution(args.ref))
        true_p = _true_dist(args.true_dist, q.k, rng)
    except (ValueError, OSError) as exc:
        print(f"bad distribution input: {exc}", file=sys.stderr)
        return 2
    constraint = Comm(args.comm_bits) if args.comm_bits else Ldp(args.rho)
    budget = SeedBudget(s=args.coins, master_seed=args.seed)
    n = args.players or required_players(constraint, q.k, args.eps, budget.s)
    config = ProtocolConfig(k=q.k, eps=args.eps, delta=args.delta,
                            constraint=constraint, s=budget.s, n=n)
    verdict, transcript = run_protocol(config, q, true_p, budget.master_seed)
    transcript.save(args.transcript)
    print(f"players = {n}, path = {transcript.path}, groups = {transcript.d}")
    print(f"verdict = {verdict.value}")
    print(f"transcript written to {args.transcript}")
    return 0


def _cmd_experiment(args) -> int:
    try:
        spec = parse_spec_file(args.spec)
    except (KeyError, ValueError) as exc:
        print(f"bad experiment spec: {exc}", file=sys.stderr)
        return 2
    try:
        rows = run_experiment(spec, workers=args.workers)
    except ValueError as exc:
        print(f"invalid cell configuration: {exc}", file=sys.stderr)
        return 1
    out = args.output or spec.output
    write_csv(rows, out)
    print(summary_table(rows))
    print(f"csv written to {out}")
    return 0


def _cmd_bounds(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.fluctuation:
        w = random_channel(args.k, 2, rng)
        cfg = FluctuationConfig.repeated(
            w, args.n, args.eps,
            mode="exact" if args.exact else "mc",
            mc_samples=args.mc_samples, seed=args.seed,
        )
        res = chi2_fluctuation(cfg)
        print(f"chi-square fluctuation = {res.value!r} (mean {res.mean!r}, stderr {res.stderr!r})")
        return 0
    if args.comm_bits is None and args.rho is None:
        print("bounds: need --comm-bits or --rho", file=sys.stderr)
        return 2
    constraint = Comm(args.comm_bits) if args.comm_bits else Ldp(args.rho)
    if args.audit_norms:
        rep = norm_bound_audit(constraint, args.k, args.trials, rng)
        print(f"max nuclear norm over {args.trials} sampled channels"
              f"{' + deterministic' if rep.max_is_deterministic else ''}: {rep.max_nuclear:.6f}")
        if rep.rho_grid:
            for rho, ratio in zip(rep.rho_grid, rep.rho_ratios):
                print(f"  rho={rho:.1f}  ||H||_*/rho^2 = {ratio:.4f}")
        return 0
    coins = range(args.coins[0], args.coins[1] + 1) if args.coins else [0]
    n_star = dict(args.n_star or ())
    print("constraint,k,eps,l_or_rho,s,lb_formula,empirical_n_star_if_available")
    for s in coins:
        lb = sample_lb(constraint, args.k, args.eps, s)
        val = args.comm_bits if args.comm_bits else args.rho
        kind = "comm" if args.comm_bits else "ldp"
        print(f"{kind},{args.k},{args.eps!r},{val},{s},{lb!r},{n_star.get(s, '')}")
    return 0


def _coins_range(text):
    if ".." in text:
        lo, hi = text.split("..")
        return (int(lo), int(hi))
    v = int(text)
    return (v, v)


def _n_star_pair(text):
    s, n = text.split(":")
    return (int(s), int(n))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fewcoin",
        description="Distributed identity testing under local constraints "
                    "with a limited shared-randomness budget.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cert = sub.add_parser("certify", help="certify a codebook or expander")
    cert_sub = cert.add_subparsers(dest="target", required=True)
    cb = cert_sub.add_parser("codebook")
    cb.add_argument("--n", type=int, required=True, help="block length (power of two)")
    cb.add_argument("--c0", type=int, default=constants.C0)
    cb.add_argument("--seed", type=int, default=0)
    cb.add_argument("--trials", type=int, default=constants.SUBSET_TRIALS)
    ex = cert_sub.add_parser("expander")
    ex.add_argument("--s", type=int, required=True)
    ex.add_argument("--eta", type=float, required=True)
    ex.add_argument("--gamma", type=float, required=True)
    ex.add_argument("--seed", type=int, default=0)

    test = sub.add_parser("test", help="run one protocol instance")
    ref = test.add_mutually_exclusive_group(required=True)
    ref.add_argument("--uniform", action="store_true")
    ref.add_argument("--ref", help="reference distribution file")
    test.add_argument("--k", type=int, default=64)
    test.add_argument("--eps", type=float, required=True)
    con = test.add_mutually_exclusive_group(required=True)
    con.add_argument("--comm-bits", type=int)
    con.add_argument("--rho", type=float)
    test.add_argument("--coins", type=int, default=0)
    test.add_argument("--players", type=int, default=0, help="0 = auto")
    test.add_argument("--delta", type=float, default=1.0 / 12.0)
    test.add_argument("--seed", type=int, default=0)
    test.add_argument("--true-dist", default="uniform",
                      help="uniform | paninski:<tv> | far:<tv> | <file>")
    test.add_argument("--transcript", default="transcript.txt")

    exp = sub.add_parser(
        "experiment", help="run a Monte Carlo grid",
        epilog="CSV columns, in fixed order: "
               "constraint,k,eps,l_or_rho,s,n,truth,trials,accepts,accept_rate,stderr. "
               "Worker count defaults to the FEWCOIN_WORKERS environment variable.",
    )
    exp.add_argument("spec", help="flat key=value experiment spec file")
    exp.add_argument("--workers", type=int, default=None)
    exp.add_argument("--output", default=None)

    bnd = sub.add_parser("bounds", help="lower-bound formulas and audits")
    bcon = bnd.add_mutually_exclusive_group()
    bcon.add_argument("--comm-bits", type=int)
    bcon.add_argument("--rho", type=float)
    bnd.add_argument("--k", type=int, required=True)
    bnd.add_argument("--eps", type=float, default=0.3)
    bnd.add_argument("--coins", type=_coins_range, default=None, help="s or s0..s1")
    bnd.add_argument("--n-star", type=_n_star_pair, nargs="*", default=None,
                     metavar="S:N", help="measured minimum player counts to report")
    bnd.add_argument("--audit-norms", action="store_true")
    bnd.add_argument("--trials", type=int, default=1000)
    bnd.add_argument("--fluctuation", action="store_true")
    bnd.add_argument("--n", type=int, default=2, help="channel uses for --fluctuation")
    bnd.add_argument("--exact", action="store_true")
    bnd.add_argument("--mc-samples", type=int, default=100_000)
    bnd.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "certify": _cmd_certify,
        "test": _cmd_test,
        "experiment": _cmd_experiment,
        "bounds": _cmd_bounds,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
