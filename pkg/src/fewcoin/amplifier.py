"""Deterministic amplification maps from a certified d-regular expander.

One random s-bit seed is stretched into d correlated seeds by reading off the
neighbors of its vertex in a d-regular graph on 2^s vertices with certified
spectral expansion lambda. If a bad-seed set has density at most eta and
lambda <= (1-eta)*sqrt(gamma/eta), the density of seeds whose d neighbors are
all bad is at most lambda^2 * eta/(1-eta)^2 <= gamma, with no extra
randomness. Desk scale uses a seeded random regular multigraph certified a
posteriori by an eigensolve instead of an explicit construction; self-loops
and multi-edges from the permutation model are kept (they only hurt lambda,
which is certified anyway).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CertificationFailed, DegreeExceedsGraph


@dataclass(frozen=True)
class AmplifierMaps:
    s: int
    n: int
    d: int
    adjacency: np.ndarray  # n x d neighbor labels; column i is the map pi_i
    lam: float
    eta: float
    gamma: float
    seed: int
    mode: str  # "random" or "complete"

    def __post_init__(self):
        a = np.ascontiguousarray(np.asarray(self.adjacency, dtype=np.int64))
        if a.shape != (self.n, self.d):
            raise ValueError(f"adjacency shape {a.shape} != ({self.n}, {self.d})")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)


def degree_bound(eta: float, gamma: float) -> int:
    """Degree sufficient for almost every random regular graph: 4.1*eta/((1-eta)^2*gamma)."""
    return max(3, math.ceil(4.1 * eta / ((1.0 - eta) ** 2 * gamma)))


def lambda_target(eta: float, gamma: float) -> float:
    return (1.0 - eta) * math.sqrt(gamma / eta)


def _regular_multigraph(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Permutation-model d-regular multigraph as an n x d neighbor array."""
    adjacency = np.empty((n, d), dtype=np.int64)
    col = 0
    for _ in range(d // 2):
        perm = rng.permutation(n)
        inverse = np.empty(n, dtype=np.int64)
        inverse[perm] = np.arange(n)
        adjacency[:, col] = perm
        adjacency[:, col + 1] = inverse
        col += 2
    if d % 2 == 1:
        order = rng.permutation(n)
        partner = np.empty(n, dtype=np.int64)
        partner[order[0::2]] = order[1::2]
        partner[order[1::2]] = order[0::2]
        adjacency[:, col] = partner
    return adjacency


def spectral_expansion(adjacency: np.ndarray) -> float:
    """max(|lambda_2|, |lambda_n|) of the normalized adjacency matrix."""
    n, d = adjacency.shape
    a = np.zeros((n, n))
    np.add.at(a, (np.repeat(np.arange(n), d), adjacency.ravel()), 1.0 / d)
    if n <= 4096:
        eig = np.linalg.eigvalsh(a)
        return float(max(abs(eig[0]), abs(eig[-2])))
    # Power iteration on the all-ones-deflated operator for large graphs.
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    v -= v.mean()
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(400):
        w = a @ v
        w -= w.mean()
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
    return lam


def build_amplifier(
    s: int,
    eta: float,
    gamma: float,
    seed: int = 0,
    d: int | None = None,
    mode: str = "random",
    max_retries: int = 50,
) -> AmplifierMaps:
    """Certified amplifier on 2^s vertices.

    mode="random": permutation-model graph with degree from degree_bound,
    regenerated with incremented seed until the eigensolve certifies
    lambda <= (1-eta)*sqrt(gamma/eta).
    mode="complete": the complete graph, d = 2^s - 1, lambda = 1/(2^s - 1)
    known analytically (no certification run needed).
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if not (0 < eta < 1 and 0 < gamma < 1):
        raise ValueError("eta and gamma must lie in (0, 1)")
    n = 1 << s

    if mode == "complete":
        dd = n - 1
        adjacency = np.empty((n, dd), dtype=np.int64)
        for v in range(n):
            adjacency[v] = np.concatenate([np.arange(v), np.arange(v + 1, n)])
        return AmplifierMaps(s=s, n=n, d=dd, adjacency=adjacency,
                             lam=1.0 / (n - 1), eta=eta, gamma=gamma,
                             seed=seed, mode="complete")
    if mode != "random":
        raise ValueError(f"unknown mode {mode!r}")

    dd = degree_bound(eta, gamma) if d is None else d
    if dd >= n:
        raise DegreeExceedsGraph(
            f"degree {dd} >= 2^s = {n} vertices; raise gamma or s (or use mode='complete')"
        )
    target = lambda_target(eta, gamma)
    for attempt in range(max_retries):
        rng = np.random.default_rng(seed + attempt)
        adjacency = _regular_multigraph(n, dd, rng)
        lam = spectral_expansion(adjacency)
        if lam <= target:
            return AmplifierMaps(s=s, n=n, d=dd, adjacency=adjacency, lam=lam,
                                 eta=eta, gamma=gamma, seed=seed + attempt,
                                 mode="random")
    raise CertificationFailed(
        f"no degree-{dd} graph on {n} vertices reached lambda <= {target:.4f} "
        f"in {max_retries} draws (best attempt lambda={lam:.4f})"
    )


def neighbors(amp: AmplifierMaps, r: int) -> np.ndarray:
    """The d seeds pi_1(r)..pi_d(r), in fixed column order."""
    if not 0 <= r < amp.n:
        raise ValueError(f"seed {r} outside [0, {amp.n})")
    return amp.adjacency[r].copy()


def mixing_check(amp: AmplifierMaps, S, T) -> float:
    """Expander-mixing residual lambda*sqrt(|S||T|)/n - |e(S,T)/(dn) - |S||T|/n^2|.

    Nonnegative for a correctly certified lambda. e(S,T) counts ordered
    endpoint pairs with multiplicity.
    """
    s_mask = np.zeros(amp.n, dtype=bool)
    s_mask[np.asarray(list(S), dtype=np.int64)] = True
    t_mask = np.zeros(amp.n, dtype=bool)
    t_mask[np.asarray(list(T), dtype=np.int64)] = True
    ns, nt = int(s_mask.sum()), int(t_mask.sum())
    if ns == 0 or nt == 0:
        return 0.0
    edges = int(t_mask[amp.adjacency[s_mask]].sum())
    n, d = amp.n, amp.d
    return amp.lam * math.sqrt(ns * nt) / n - abs(edges / (d * n) - ns * nt / n**2)


def all_neighbors_bad_fraction(amp: AmplifierMaps, bad: np.ndarray) -> float:
    """Density of seeds whose entire neighbor list lies in the bad set."""
    bad_mask = np.zeros(amp.n, dtype=bool)
    bad_mask[np.asarray(bad, dtype=np.int64)] = True
    return float(np.mean(bad_mask[amp.adjacency].all(axis=1)))


# ---------------------------------------------------------------------------
# Dump format: header "s d lambda eta gamma seed mode", then one line per
# vertex with d space-separated neighbor labels.
# ---------------------------------------------------------------------------

def save_amplifier(amp: AmplifierMaps, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{amp.s} {amp.d} {amp.lam!r} {amp.eta!r} {amp.gamma!r} {amp.seed} {amp.mode}\n")
        for row in amp.adjacency:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def load_amplifier(path) -> AmplifierMaps:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        s, d = int(header[0]), int(header[1])
        lam, eta, gamma = float(header[2]), float(header[3]), float(header[4])
        seed, mode = int(header[5]), header[6]
        rows = [list(map(int, fh.readline().split())) for _ in range(1 << s)]
    return AmplifierMaps(s=s, n=1 << s, d=d, adjacency=np.array(rows, dtype=np.int64),
                         lam=lam, eta=eta, gamma=gamma, seed=seed, mode=mode)
