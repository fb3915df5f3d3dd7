"""Private-coin building blocks: a centralized identity test, the l-bit
simulate-and-infer tester, and the one-bit Hadamard-response LDP tester.

Server-side deciders consume only constrained transcripts (messages or bits),
never raw samples; player-side encoders never see the reference distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import hadamard as _sylvester

from . import constants
from .core import (
    Channel,
    Distribution,
    Verdict,
    pad_domain,
    pad_samples,
    padded_size,
)


def _split_count(n: int, delta: float, n_min: int) -> int:
    """Odd number of median splits: ceil(18 ln(1/delta)) when every split
    stays above the viability floor n_min, otherwise the largest viable odd
    count (usually 1); the threshold margin then carries the delta burden."""
    target = max(1, math.ceil(constants.SPLIT_LOG_FACTOR * math.log(1.0 / delta)))
    viable = max(1, n // max(n_min, 1))
    m = min(target, viable)
    if m % 2 == 0:
        m -= 1
    return max(m, 1)


# ---------------------------------------------------------------------------
# Centralized identity testing.
# ---------------------------------------------------------------------------

def identity_statistic(q: Distribution, counts: np.ndarray, n: int) -> float:
    """Normalized chi-square statistic sum_x ((N_x - n q_x)^2 - N_x) / (n d_x),
    d_x = q_x for supported cells and 1/k for q_x = 0.

    With Poissonized counts, E[T] = 0 under the null and
    E[T] = n * sum_x (p_x - q_x)^2 / d_x in general.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if counts.shape != (q.k,):
        raise ValueError("counts must have one cell per symbol")
    d = np.where(q.probs > 0, q.probs, 1.0 / q.k)
    centered = counts - n * q.probs
    return float(((centered**2 - counts) / (n * d)).sum())


@dataclass(frozen=True)
class CentralTestReport:
    verdict: Verdict
    splits: int
    statistics: tuple
    thresholds: tuple


def centralized_identity_test(
    q: Distribution,
    samples: np.ndarray,
    eps: float,
    delta: float,
    report: bool = False,
):
    """Accept iff the sample law looks like q; reject TV >= eps alternatives.

    samples are 1-indexed symbols. The statistic's mean is 0 under the null
    and at least 2 n eps^2 for eps-far alternatives, so each split thresholds
    at n_s * eps^2; the verdict is the majority vote over the splits.
    """
    samples = np.asarray(samples)
    n = samples.shape[0]
    if n < 1:
        raise ValueError("need at least one sample")
    xs0 = samples.astype(np.int64) - 1
    if xs0.min() < 0 or xs0.max() >= q.k:
        raise ValueError("sample outside the domain")
    n_min = math.ceil(constants.C_CENTRAL_VIABLE * math.sqrt(q.k) / eps**2)
    m = _split_count(n, delta, n_min)
    bounds_ = np.linspace(0, n, m + 1).astype(np.int64)
    stats, thresholds, votes = [], [], []
    for i in range(m):
        chunk = xs0[bounds_[i] : bounds_[i + 1]]
        ns = chunk.shape[0]
        t = identity_statistic(q, np.bincount(chunk, minlength=q.k), ns)
        tau = ns * eps**2
        stats.append(t)
        thresholds.append(tau)
        votes.append(t < tau)
    verdict = Verdict.ACCEPT if sum(votes) * 2 > m else Verdict.REJECT
    if report:
        return verdict, CentralTestReport(verdict, m, tuple(stats), tuple(thresholds))
    return verdict


# ---------------------------------------------------------------------------
# Simulate-and-infer under l-bit messages.
#
# The padded domain splits into g blocks of B = 2^l - 1 symbols. Player j of
# a group reports the within-block index of their own sample if it falls in
# their block, else 0. A reporter group with exactly one nonzero message
# proposes that symbol; it is kept only if the paired vetoer group's player
# for the winning block also reported 0, which makes the acceptance
# probability prod_j (1 - p(B_j)) independent of the proposed value, so kept
# samples are exactly i.i.d. from the padded p.
# ---------------------------------------------------------------------------

def comm_block_size(bits: int) -> int:
    return (1 << bits) - 1


def comm_layout(k: int, bits: int) -> tuple[int, int]:
    """(padded domain size, group size) for k under l-bit messages."""
    b = comm_block_size(bits)
    if b >= k:
        return k, 1
    kp = padded_size(k, b)
    return kp, kp // b


def simulate_and_infer_encode(x: int, player_index: int, bits: int, k: int) -> int:
    """Message of the player at 1-indexed position player_index for sample x
    in the padded domain [k]. Blocks are assigned cyclically by position."""
    kp, g = comm_layout(k, bits)
    if kp != k:
        raise ValueError(f"domain {k} not a multiple of the block size; pad first")
    if g == 1:
        return x
    b = comm_block_size(bits)
    j = (player_index - 1) % g + 1
    lo = (j - 1) * b
    if lo < x <= lo + b:
        return x - lo
    return 0


def _encode_block_messages(xs0: np.ndarray, blocks0: np.ndarray, b: int) -> np.ndarray:
    own = xs0 // b == blocks0
    return np.where(own, xs0 % b + 1, 0).astype(np.int64)


@dataclass(frozen=True)
class CommTranscript:
    bits: int
    k_padded: int
    group_size: int
    messages: np.ndarray  # attempts x 2 x g (reporter row 0, vetoer row 1)
    kept: np.ndarray  # boolean per attempt
    samples: np.ndarray  # 0-indexed reconstructed symbol per kept attempt

    def save(self, path) -> None:
        """CSV dump: player_index, group_or_block, message (0-indexed groups)."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("player_index,group_or_block,message\n")
            flat = self.messages.reshape(-1, self.group_size)
            idx = 0
            for gi in range(flat.shape[0]):
                for msg in flat[gi]:
                    fh.write(f"{idx},{gi},{int(msg)}\n")
                    idx += 1


def infer_from_messages(messages: np.ndarray, bits: int) -> tuple[np.ndarray, np.ndarray]:
    """Kept mask and reconstructed 0-indexed symbols from attempts x 2 x g messages."""
    b = comm_block_size(bits)
    reporter = messages[:, 0, :]
    nonzero = reporter != 0
    one_hit = nonzero.sum(axis=1) == 1
    winner = np.argmax(nonzero, axis=1)
    rows = np.arange(messages.shape[0])
    veto_clear = messages[rows, 1, winner] == 0
    kept = one_hit & veto_clear
    symbols = winner * b + reporter[rows, winner] - 1
    return kept, symbols[kept]


def build_comm_transcript(
    xs0: np.ndarray, k: int, bits: int, rng: np.random.Generator
) -> CommTranscript:
    """Player-side pass: pad samples, assign groups, emit l-bit messages.

    Consumes only samples and private randomness. Players beyond the last
    whole reporter/vetoer pair are dropped.
    """
    kp, g = comm_layout(k, bits)
    b = comm_block_size(bits)
    if kp != k:
        xs0 = pad_samples(xs0, k, b, rng)
    if g == 1:
        msgs = (xs0 + 1).reshape(-1, 1, 1)
        kept = np.ones(msgs.shape[0], dtype=bool)
        return CommTranscript(bits, kp, 1, msgs, kept, xs0)
    unit = 2 * g
    attempts = xs0.shape[0] // unit
    xs0 = xs0[: attempts * unit]
    blocks0 = np.tile(np.arange(g), 2 * attempts)
    msgs = _encode_block_messages(xs0, blocks0, b).reshape(attempts, 2, g)
    kept, samples = infer_from_messages(msgs, bits)
    return CommTranscript(bits, kp, g, msgs, kept, samples)


def simulate_and_infer_test(
    q: Distribution,
    bits: int,
    samples: np.ndarray,
    eps: float,
    delta: float,
    rng: np.random.Generator,
) -> Verdict:
    """l-bit private-coin identity test: reconstruct samples groupwise, then
    run the centralized test on the padded reference at the padded distance."""
    samples = np.asarray(samples)
    xs0 = samples.astype(np.int64) - 1
    _, g = comm_layout(q.k, bits)
    if xs0.shape[0] % g != 0:
        raise ValueError(f"player count {xs0.shape[0]} not divisible by group size {g}")
    transcript = build_comm_transcript(xs0, q.k, bits, rng)
    q_pad = pad_domain(q, comm_block_size(bits)) if transcript.k_padded != q.k else q
    eps_pad = eps * q.k / transcript.k_padded
    if transcript.samples.shape[0] == 0:
        return Verdict.ACCEPT
    return centralized_identity_test(q_pad, transcript.samples + 1, eps_pad, delta)


# ---------------------------------------------------------------------------
# One-bit Hadamard-response LDP tester.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HadamardScheme:
    """K x K Sylvester Hadamard support sets with privacy parameter rho.

    columns[j-1] is the boolean support of +1 entries of column j; the first
    column is all-ones, every other column has exactly K/2 ones.
    """

    k: int
    K: int
    rho: float
    columns: np.ndarray  # K x K boolean

    @property
    def p_high(self) -> float:
        return math.exp(self.rho) / (math.exp(self.rho) + 1.0)

    @property
    def p_low(self) -> float:
        return 1.0 / (math.exp(self.rho) + 1.0)


def hadamard_scheme(k: int, rho: float) -> HadamardScheme:
    kk = 1 << math.ceil(math.log2(k + 1))
    h = _sylvester(kk)
    return HadamardScheme(k=k, K=kk, rho=rho, columns=(h > 0).T.copy())


def ldp_hadamard_channel(scheme: HadamardScheme, j: int, x: int, rng: np.random.Generator) -> int:
    """One response bit: 1 with probability e^rho/(e^rho+1) if x is in C_j,
    else with probability 1/(e^rho+1). Exactly rho-LDP."""
    if not 1 <= x <= scheme.k:
        raise ValueError(f"symbol {x} outside [1, {scheme.k}]")
    pr = scheme.p_high if scheme.columns[j - 1, x - 1] else scheme.p_low
    return int(rng.random() < pr)


def ldp_channel_matrix(scheme: HadamardScheme, j: int) -> Channel:
    """The block-j response as an explicit k x 2 channel (columns: bit 0, bit 1)."""
    member = scheme.columns[j - 1, : scheme.k]
    p1 = np.where(member, scheme.p_high, scheme.p_low)
    return Channel(scheme.k, 2, np.column_stack([1.0 - p1, p1]))


def hadamard_response_bits(
    scheme: HadamardScheme, blocks0: np.ndarray, xs0: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    member = scheme.columns[blocks0, xs0]
    pr = np.where(member, scheme.p_high, scheme.p_low)
    return (rng.random(xs0.shape[0]) < pr).astype(np.uint8)


@dataclass(frozen=True)
class LdpTranscript:
    K: int
    blocks: np.ndarray  # 0-indexed block per player (round-robin)
    bits: np.ndarray  # one response bit per player

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("player_index,group_or_block,message\n")
            for i, (b, y) in enumerate(zip(self.blocks, self.bits)):
                fh.write(f"{i},{int(b)},{int(y)}\n")


def build_ldp_transcript(
    scheme: HadamardScheme, xs0: np.ndarray, rng: np.random.Generator
) -> LdpTranscript:
    """Player-side pass: deterministic round-robin block assignment, one bit each."""
    n = xs0.shape[0]
    blocks0 = np.arange(n, dtype=np.int64) % scheme.K
    return LdpTranscript(scheme.K, blocks0, hadamard_response_bits(scheme, blocks0, xs0, rng))


def ldp_collision_means(scheme: HadamardScheme, p: Distribution) -> np.ndarray:
    """Analytic per-block response means:
    p_{C_j} = (e^rho - 1)/(e^rho + 1) * p(C_j) + 1/(e^rho + 1)."""
    mass = scheme.columns[:, : scheme.k].astype(np.float64) @ p.probs
    gap = (math.exp(scheme.rho) - 1.0) / (math.exp(scheme.rho) + 1.0)
    return gap * mass + scheme.p_low


def ldp_separation_gap(scheme: HadamardScheme, eps: float) -> float:
    """Guaranteed squared l2 separation of the response mean vectors for
    TV >= eps alternatives: (e^rho-1)^2/(e^rho+1)^2 * (K/k) * eps^2."""
    r = (math.exp(scheme.rho) - 1.0) / (math.exp(scheme.rho) + 1.0)
    return r**2 * (scheme.K / scheme.k) * eps**2


@dataclass(frozen=True)
class LdpTestReport:
    verdict: Verdict
    splits: int
    statistics: tuple
    threshold: float


def ldp_test(
    q: Distribution,
    rho: float,
    transcript: LdpTranscript,
    eps: float,
    delta: float,
    report: bool = False,
):
    """Accept iff the one-bit transcript matches q's analytic response means.

    Per split, the unbiased estimator of ||p_C - q_C||^2,
    sum_j (S_j/n_j - q_{C_j})^2 - (S_j/n_j)(1 - S_j/n_j)/(n_j - 1),
    is thresholded at half the guaranteed separation gap. Consumes only the
    transcript; raw samples never reach this function.
    """
    n = transcript.blocks.shape[0]
    scheme = hadamard_scheme(q.k, rho)
    if transcript.K != scheme.K:
        raise ValueError("transcript block count does not match the scheme")
    if n < scheme.K:
        raise ValueError(f"need at least K={scheme.K} players, got {n}")
    q_c = ldp_collision_means(scheme, q)
    gap = ldp_separation_gap(scheme, eps)
    tau = gap / 2.0
    n_min = math.ceil(constants.C_LDP_VIABLE * scheme.K**1.5 / gap)
    m = _split_count(n, delta, n_min)
    bounds_ = np.linspace(0, n, m + 1).astype(np.int64)
    stats, votes = [], []
    for i in range(m):
        sl = slice(bounds_[i], bounds_[i + 1])
        blocks, bits = transcript.blocks[sl], transcript.bits[sl]
        n_j = np.bincount(blocks, minlength=scheme.K).astype(np.float64)
        s_j = np.bincount(blocks, weights=bits, minlength=scheme.K)
        seen = n_j > 0
        p_hat = np.zeros(scheme.K)
        p_hat[seen] = s_j[seen] / n_j[seen]
        corr = np.zeros(scheme.K)
        multi = n_j > 1
        corr[multi] = p_hat[multi] * (1.0 - p_hat[multi]) / (n_j[multi] - 1.0)
        t = float((((p_hat - q_c) ** 2 - corr))[seen].sum())
        stats.append(t)
        votes.append(t < tau)
    verdict = Verdict.ACCEPT if sum(votes) * 2 > m else Verdict.REJECT
    if report:
        return verdict, LdpTestReport(verdict, m, tuple(stats), tau)
    return verdict
