"""Monte Carlo experiment runner over (k, eps, constraint, s, n) grids.

Per-cell, per-trial RNG streams derive from hash(master_seed, cell_index,
trial_index), so the result CSV is byte-identical across runs and worker
counts. Wall-clock timing is reported on stdout only; the CSV carries no
nondeterministic column.
"""

from __future__ import annotations

import concurrent.futures as _futures
import math
import os
import time
from dataclasses import dataclass

from ._seeding import stream
from .bounds import paninski_far, random_far
from .core import Comm, ConstraintSpec, Distribution, Ldp, Verdict, load_distribution
from .protocol import ProtocolConfig, required_players, run_protocol

CSV_COLUMNS = (
    "constraint", "k", "eps", "l_or_rho", "s", "n",
    "truth", "trials", "accepts", "accept_rate", "stderr",
)

WORKERS_ENV = "FEWCOIN_WORKERS"


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str  # "comm" or "ldp"
    ks: tuple
    epss: tuple
    values: tuple  # comm bit widths or ldp rho values
    ss: tuple
    ns: tuple  # ints, or the string "auto"
    trials: int
    alternative: str  # "paninski", "far:<tv>", or "file:<path>"
    master_seed: int
    delta: float = 1.0 / 12.0
    truths: tuple = ("null", "far")
    output: str = "results.csv"

    def __post_init__(self):
        if self.kind not in ("comm", "ldp"):
            raise ValueError(f"constraint must be comm or ldp, got {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        bad = set(self.truths) - {"null", "far"}
        if bad:
            raise ValueError(f"unknown truth labels {sorted(bad)}")

    def constraint(self, value) -> ConstraintSpec:
        return Comm(int(value)) if self.kind == "comm" else Ldp(float(value))


@dataclass(frozen=True)
class ResultRow:
    constraint: str
    k: int
    eps: float
    l_or_rho: float
    s: int
    n: int
    truth: str
    trials: int
    accepts: int
    wall_time: float = 0.0  # in-memory only; excluded from the CSV

    @property
    def accept_rate(self) -> float:
        return self.accepts / self.trials

    @property
    def stderr(self) -> float:
        r = self.accept_rate
        return math.sqrt(r * (1.0 - r) / self.trials)


def _parse_values(text: str):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(float(part) if "." in part else int(part))
    return tuple(out)


def parse_spec_file(path) -> ExperimentSpec:
    """Flat key = value format; '#' comments; grids are comma lists or a..b ranges.

    Keys: constraint (comm|ldp), k, eps, comm_bits | rho, coins, players
    (ints or auto), trials, alternative, master_seed, delta, truths, output.
    """
    kv = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            kv[key.strip()] = val.strip()
    kind = kv.get("constraint", "comm").lower()
    if kind not in ("comm", "ldp"):
        raise ValueError(f"constraint must be comm or ldp, got {kind!r}")
    key = "comm_bits" if kind == "comm" else "rho"
    if key not in kv:
        raise ValueError(f"{kind} grids need a {key} line")
    values = _parse_values(kv[key])
    players = kv.get("players", "auto")
    ns = ("auto",) if players == "auto" else _parse_values(players)
    return ExperimentSpec(
        kind=kind,
        ks=_parse_values(kv["k"]),
        epss=_parse_values(kv["eps"]),
        values=values,
        ss=_parse_values(kv.get("coins", "0")),
        ns=ns,
        trials=int(kv.get("trials", "100")),
        alternative=kv.get("alternative", "paninski"),
        master_seed=int(kv.get("master_seed", "0")),
        delta=float(kv.get("delta", str(1.0 / 12.0))),
        truths=tuple(t.strip() for t in kv.get("truths", "null,far").split(",")),
        output=kv.get("output", "results.csv"),
    )


def _cells(spec: ExperimentSpec):
    idx = 0
    for k in spec.ks:
        for eps in spec.epss:
            for value in spec.values:
                for s in spec.ss:
                    for n in spec.ns:
                        for truth in spec.truths:
                            yield idx, (int(k), float(eps), value, int(s), n, truth)
                            idx += 1


def _alternative(spec: ExperimentSpec, k: int, eps: float, rng) -> Distribution:
    if spec.alternative == "paninski":
        return paninski_far(k, eps, rng)
    if spec.alternative.startswith("far:"):
        return random_far(k, float(spec.alternative[4:]), rng)
    if spec.alternative.startswith("file:"):
        return load_distribution(spec.alternative[5:])
    raise ValueError(f"unknown alternative generator {spec.alternative!r}")


def _run_trials(spec: ExperimentSpec, cell_index: int, cell, lo: int, hi: int):
    """Accepting-trial count for trials [lo, hi) of one cell.

    Each trial derives its own stream from (master_seed, cell_index, trial),
    so chunk boundaries and scheduling cannot change any outcome.
    """
    k, eps, value, s, n, truth = cell
    constraint = spec.constraint(value)
    n_players = required_players(constraint, k, eps, s) if n == "auto" else int(n)
    config = ProtocolConfig(k=k, eps=eps, delta=spec.delta, constraint=constraint,
                            s=s, n=n_players)
    q = Distribution.uniform(k)
    accepts = 0
    t0 = time.perf_counter()
    for trial in range(lo, hi):
        trial_rng = stream(spec.master_seed, cell_index, trial)
        trial_seed = int(trial_rng.integers(0, 2**63 - 1))
        if truth == "null":
            p = q
        else:
            p = _alternative(spec, k, eps, trial_rng)
        verdict, _ = run_protocol(config, q, p, trial_seed)
        accepts += verdict is Verdict.ACCEPT
    return cell_index, accepts, n_players, time.perf_counter() - t0


def run_cell(spec: ExperimentSpec, cell_index: int, cell) -> ResultRow:
    k, eps, value, s, n, truth = cell
    _, accepts, n_players, elapsed = _run_trials(spec, cell_index, cell, 0, spec.trials)
    return ResultRow(
        constraint=spec.kind, k=k, eps=eps,
        l_or_rho=float(value), s=s, n=n_players, truth=truth,
        trials=spec.trials, accepts=accepts, wall_time=elapsed,
    )


def _run_trials_star(args):
    return _run_trials(*args)


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> list[ResultRow]:
    """Run all grid cells; trial-level parallelism when workers > 1.

    Trials are sharded into chunks and farmed to a bounded worker pool;
    per-cell accept counts are merged by cell index, so output order and
    content are independent of the worker count and of scheduling.
    """
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    cells = list(_cells(spec))
    if workers <= 1 or not cells:
        return [run_cell(spec, idx, cell) for idx, cell in cells]
    chunk = max(1, math.ceil(spec.trials / max(1, 2 * workers // len(cells))))
    jobs = []
    for idx, cell in cells:
        for lo in range(0, spec.trials, chunk):
            jobs.append((spec, idx, cell, lo, min(lo + chunk, spec.trials)))
    merged = {idx: [0, 0, 0.0] for idx, _ in cells}
    with _futures.ProcessPoolExecutor(max_workers=workers) as pool:
        for idx, accepts, n_players, elapsed in pool.map(_run_trials_star, jobs):
            merged[idx][0] += accepts
            merged[idx][1] = n_players
            merged[idx][2] += elapsed
    rows = []
    for idx, cell in cells:
        k, eps, value, s, n, truth = cell
        accepts, n_players, elapsed = merged[idx]
        rows.append(ResultRow(
            constraint=spec.kind, k=k, eps=eps,
            l_or_rho=float(value), s=s, n=n_players, truth=truth,
            trials=spec.trials, accepts=accepts, wall_time=elapsed,
        ))
    return rows


def format_row(row: ResultRow) -> str:
    return ",".join([
        row.constraint, str(row.k), repr(row.eps), repr(row.l_or_rho),
        str(row.s), str(row.n), row.truth, str(row.trials), str(row.accepts),
        repr(row.accept_rate), repr(row.stderr),
    ])


def write_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(format_row(row) + "\n")


def summary_table(rows) -> str:
    lines = ["constraint  k     eps    l/rho  s   n        truth  accept_rate  stderr   wall_s"]
    for r in rows:
        lines.append(
            f"{r.constraint:<10}  {r.k:<5} {r.eps:<6.3g} {r.l_or_rho:<6.3g} "
            f"{r.s:<3} {r.n:<8} {r.truth:<5}  {r.accept_rate:<11.4f}  "
            f"{r.stderr:<7.4f}  {r.wall_time:.2f}"
        )
    return "\n".join(lines)
