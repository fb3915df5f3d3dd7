"""The full s-coin identity testing protocol.

Effective-coin capping, seeded domain compression shared across d
amplification groups (group i uses the i-th expander neighbor of the single
public seed), a constraint-matched private-coin tester per group at the
reduced distance, and unanimous accept. With too few usable public coins the
protocol runs the private-coin tester directly on the original domain.

Player-side code paths never receive the reference distribution: messages are
functions of (sample, public seed, private randomness) only, so the same
player behavior serves any reference. The transcript records an access
counter that the universality audit checks.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import constants
from ._seeding import stream
from .amplifier import AmplifierMaps, build_amplifier, degree_bound, neighbors
from .compression import apply_dcm_array, build_dcm, push_forward
from .core import Comm, ConstraintSpec, Distribution, Ldp, Verdict, pad_domain
from .testers import (
    build_comm_transcript,
    build_ldp_transcript,
    centralized_identity_test,
    comm_block_size,
    hadamard_scheme,
    ldp_test,
)

# The domain compression only engages when it strictly shrinks the domain
# (sigma >= 2): at sigma = 1 the output size equals k while theta < 1.
ENGAGE_MARGIN = 1


@dataclass(frozen=True)
class ProtocolConfig:
    k: int
    eps: float
    delta: float
    constraint: ConstraintSpec
    s: int
    n: int
    conservative_amplification: bool = False
    fresh_randomness: bool = False
    amp_eta: float | None = None  # override the amplifier defaults
    amp_gamma: float | None = None

    def __post_init__(self):
        if self.k < 2 or (self.k & (self.k - 1)) != 0:
            raise ValueError("k must be a power of two (pad first)")
        if not 0 < self.eps < 1 or not 0 < self.delta < 1:
            raise ValueError("eps and delta must lie in (0, 1)")
        if self.s < 0 or self.n < 1:
            raise ValueError("need s >= 0 and n >= 1")


def effective_coins(constraint: ConstraintSpec, k: int, s: int) -> int:
    """Usable public coins: compressing below 2^l wastes communication, and
    below 1 symbol wastes everything, so cap at log2(k) - l (comm) or
    log2(k) (LDP)."""
    t = k.bit_length() - 1
    if isinstance(constraint, Comm):
        return max(0, min(t - constraint.bits, s))
    if isinstance(constraint, Ldp):
        return min(t, s)
    raise TypeError(f"unsupported constraint {constraint!r}")


def required_players_raw(constraint: ConstraintSpec, k: int, eps: float, s: int) -> float:
    """Frozen-constant player-count formula, before rounding."""
    root_k = math.sqrt(k)
    if isinstance(constraint, Comm):
        l = constraint.bits
        return constants.C_COMM * (root_k / eps**2) * math.sqrt(max(k / 2**l, 1.0)) * math.sqrt(
            max(k / 2 ** (s + l), 1.0)
        )
    if isinstance(constraint, Ldp):
        return constants.C_LDP * (k / (eps**2 * constraint.rho**2)) * math.sqrt(max(k / 2**s, 1.0))
    raise TypeError(f"unsupported constraint {constraint!r}")


def required_players(constraint: ConstraintSpec, k: int, eps: float, s: int) -> int:
    return math.ceil(required_players_raw(constraint, k, eps, s))


class _RefGuard:
    """Wraps the reference distribution and counts player-phase accesses."""

    def __init__(self, dist: Distribution):
        self._dist = dist
        self.player_phase = False
        self.player_accesses = 0

    @property
    def probs(self) -> np.ndarray:
        if self.player_phase:
            self.player_accesses += 1
        return self._dist.probs

    def distribution(self) -> Distribution:
        if self.player_phase:
            self.player_accesses += 1
        return self._dist


def _digest(p: Distribution) -> str:
    return hashlib.blake2b(np.ascontiguousarray(p.probs).tobytes(), digest_size=8).hexdigest()


@dataclass(frozen=True)
class GroupRecord:
    index: int
    seed: int
    L: int
    theta: float
    q_digest: str
    verdict: Verdict


@dataclass
class ProtocolTranscript:
    config: ProtocolConfig
    master_seed: int
    s_eff: int
    path: str  # "dcm" or "private"
    d: int
    delta_group: float
    n_used: int
    public_bits: tuple
    public_bits_consumed: int
    q_digest: str
    alpha: float
    groups: list = field(default_factory=list)
    final: Verdict = Verdict.ACCEPT
    q_player_phase_accesses: int = 0
    fresh_randomness: bool = False
    private_draws_per_player: int = 0
    private_draws_total: int = 0

    def save(self, path) -> None:
        c = self.config
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# fewcoin protocol transcript\n")
            if isinstance(c.constraint, Comm):
                fh.write("constraint = comm\n")
                fh.write(f"comm_bits = {c.constraint.bits}\n")
            else:
                fh.write("constraint = ldp\n")
                fh.write(f"rho = {c.constraint.rho!r}\n")
            fh.write(f"k = {c.k}\neps = {c.eps!r}\ndelta = {c.delta!r}\n")
            fh.write(f"s = {c.s}\ns_eff = {self.s_eff}\npath = {self.path}\n")
            fh.write(f"n = {c.n}\nn_used = {self.n_used}\nd = {self.d}\n")
            fh.write(f"delta_group = {self.delta_group!r}\n")
            fh.write(f"master_seed = {self.master_seed}\n")
            fh.write(f"public_bits = {''.join(str(b) for b in self.public_bits)}\n")
            fh.write(f"public_bits_consumed = {self.public_bits_consumed}\n")
            fh.write(f"q_digest = {self.q_digest}\n")
            fh.write(f"alpha = {self.alpha!r}\n")
            fh.write(f"fresh_randomness = {int(self.fresh_randomness)}\n")
            fh.write(f"private_draws_per_player = {self.private_draws_per_player}\n")
            fh.write(f"private_draws_total = {self.private_draws_total}\n")
            for g in self.groups:
                fh.write(
                    f"group {g.index}: r={g.seed} L={g.L} theta={g.theta!r} "
                    f"q_digest={g.q_digest} verdict={g.verdict.value}\n"
                )
            fh.write(f"q_player_phase_accesses = {self.q_player_phase_accesses}\n")
            fh.write(f"final = {self.final.value}\n")


@lru_cache(maxsize=32)
def _protocol_amplifier(s_bits: int, eta: float, gamma: float) -> AmplifierMaps:
    """Shared amplifier; deterministic given (s, eta, gamma), so all parties
    agree on it without spending randomness. Degree capped at the complete
    graph, whose expansion 1/(2^s - 1) is known analytically."""
    n = 1 << s_bits
    if degree_bound(eta, gamma) >= n - 1:
        return build_amplifier(s_bits, eta, gamma, mode="complete")
    return build_amplifier(s_bits, eta, gamma, seed=0, mode="random")


def _group_verdict(
    guard: _RefGuard,
    constraint: ConstraintSpec,
    domain_size: int,
    transcript_obj,
    eps: float,
    delta: float,
) -> Verdict:
    """Server side: compare the group transcript against the induced reference."""
    q = guard.distribution()
    if isinstance(constraint, Comm):
        if transcript_obj.k_padded != q.k:
            q = pad_domain(q, comm_block_size(constraint.bits))
            eps = eps * domain_size / transcript_obj.k_padded
        if transcript_obj.samples.shape[0] == 0:
            return Verdict.ACCEPT
        return centralized_identity_test(q, transcript_obj.samples + 1, eps, delta)
    return ldp_test(q, constraint.rho, transcript_obj, eps, delta)


def run_protocol(
    config: ProtocolConfig,
    q: Distribution,
    true_p: Distribution,
    master_seed: int,
    player_side_spy=None,
) -> tuple[Verdict, ProtocolTranscript]:
    """Execute one protocol run, drawing each player's sample from true_p.

    Deterministic given (config, q, true_p, master_seed): the public seed,
    every player's sample and private randomness, and all tester decisions
    derive from fixed streams of the master seed.
    """
    if q.k != config.k or true_p.k != config.k:
        raise ValueError("q and true_p must live on the configured domain")
    guard = _RefGuard(q)
    s_eff = effective_coins(config.constraint, config.k, config.s)
    rng_public = stream(master_seed, 0)
    rng_samples = stream(master_seed, 1)

    engaged = s_eff > constants.C0 + ENGAGE_MARGIN
    if engaged:
        dcm = build_dcm(config.k, s_eff)
        if config.conservative_amplification:
            eta, gamma = constants.AMP_ETA_STRICT, constants.AMP_GAMMA_STRICT
        else:
            eta = constants.AMP_ETA if config.amp_eta is None else config.amp_eta
            gamma = constants.AMP_GAMMA if config.amp_gamma is None else config.amp_gamma
        amp = _protocol_amplifier(dcm.s_bits, eta, gamma)
        d = amp.d
        bits = tuple(int(b) for b in rng_public.integers(0, 2, size=dcm.s_bits))
        r_public = 0
        for b in bits:
            r_public = (r_public << 1) | b
        if config.fresh_randomness:
            # Comparison baseline: d independent seeds, deliberately violating
            # the s-bit budget (labeled in the transcript).
            seeds = [int(x) for x in rng_public.integers(0, dcm.seeds, size=d)]
            consumed = dcm.s_bits * d
        else:
            seeds = [int(x) for x in neighbors(amp, r_public)]
            consumed = dcm.s_bits
        delta_group = min(1.0 - (1.0 - config.delta) ** (1.0 / d), config.delta / 2.0)
        group_n = config.n // d
        eps_group = dcm.theta * config.eps
        domain = dcm.L
    else:
        dcm = None
        d = 1
        bits = ()
        seeds = [0]
        consumed = 0
        delta_group = config.delta
        group_n = config.n
        eps_group = config.eps
        domain = config.k

    # Player phase: samples -> (compression) -> constrained messages.
    # Only true_p (the simulated source), the public seed, and private
    # randomness are touched here.
    guard.player_phase = True
    if player_side_spy is not None:
        player_side_spy(guard)
    group_transcripts = []
    n_used = 0
    draws_per_player = 0
    for i in range(d):
        xs0 = true_p.sample(group_n, rng_samples)
        if engaged:
            xs0 = apply_dcm_array(dcm, seeds[i], xs0)
        rng_chan = stream(master_seed, 2, i)
        if isinstance(config.constraint, Comm):
            tr = build_comm_transcript(xs0, domain, config.constraint.bits, rng_chan)
            n_used += tr.messages.size
            # Private draws: one keep/replace coin and one replacement symbol
            # per player when the tester pads, nothing otherwise.
            draws_per_player = 2 if tr.k_padded != domain else 0
        else:
            scheme = hadamard_scheme(domain, config.constraint.rho)
            tr = build_ldp_transcript(scheme, xs0, rng_chan)
            n_used += tr.bits.shape[0]
            draws_per_player = 1  # one response coin per player
        group_transcripts.append(tr)
    guard.player_phase = False

    # Server phase: induced references and per-group verdicts.
    records = []
    final = Verdict.ACCEPT
    for i, tr in enumerate(group_transcripts):
        if engaged:
            q_i = push_forward(dcm, seeds[i], guard.distribution())
            theta_i = dcm.theta
        else:
            q_i = guard.distribution()
            theta_i = 1.0
        sub_guard = _RefGuard(q_i)
        verdict_i = _group_verdict(sub_guard, config.constraint, domain, tr,
                                   eps_group, delta_group)
        records.append(GroupRecord(index=i, seed=seeds[i], L=domain,
                                   theta=theta_i, q_digest=_digest(q_i),
                                   verdict=verdict_i))
        if verdict_i is Verdict.REJECT:
            final = Verdict.REJECT

    transcript = ProtocolTranscript(
        config=config,
        master_seed=master_seed,
        s_eff=s_eff,
        path="dcm" if engaged else "private",
        d=d,
        delta_group=delta_group,
        n_used=n_used,
        public_bits=bits,
        public_bits_consumed=consumed,
        q_digest=_digest(q),
        alpha=dcm.codebook.alpha if engaged else float("nan"),
        groups=records,
        final=final,
        q_player_phase_accesses=guard.player_accesses,
        fresh_randomness=config.fresh_randomness,
        private_draws_per_player=draws_per_player,
        private_draws_total=draws_per_player * n_used,
    )
    return final, transcript


def universality_audit(transcript: ProtocolTranscript) -> bool:
    """True iff no player-side code path read the reference distribution."""
    return transcript.q_player_phase_accesses == 0
