"""Seeded domain compression: map [k] to [L] while preserving TV separation.

The domain [k] (k = 2^t) splits into J = 2^(t-sigma) blocks of 2^sigma
consecutive symbols. A public seed u selects one fixed subset S_u from a
certified codebook on block length 2^sigma; every block is folded to two
output symbols according to membership in S_u. Good seeds keep the TV
distance of any far pair above theta * TV(p, q) with
theta = 2*alpha/sqrt(2^sigma), using sigma + c0 public bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constants
from .codebook import Codebook, build_codebook
from .core import Distribution, InsufficientCoins, tv_distance


@dataclass(frozen=True)
class DcmMap:
    k: int
    sigma: int
    J: int
    L: int
    theta: float
    codebook: Codebook
    s_bits: int

    def __post_init__(self):
        if self.k != self.J * (1 << self.sigma):
            raise ValueError("k must equal J * 2^sigma")
        if self.L != 2 * self.J:
            raise ValueError("output size must be 2J")
        if self.s_bits != self.sigma + self.codebook.c0:
            raise ValueError("seed width must be sigma + c0")

    @property
    def seeds(self) -> int:
        return 1 << self.s_bits


def build_dcm(
    k: int,
    s: int,
    c0: int = constants.C0,
    seed: int = 0,
    codebook: Codebook | None = None,
    alpha: float | None = None,
) -> DcmMap:
    """Compression map for k = 2^t using s public bits: sigma = min(s - c0, t).

    Raises InsufficientCoins when s <= c0 (callers fall back to the
    private-coin path). Bits beyond log2(k) + c0 are ignored (sigma capped).
    """
    if k < 1 or (k & (k - 1)) != 0:
        raise ValueError("input domain size must be a power of two")
    t = k.bit_length() - 1
    if s <= c0:
        raise InsufficientCoins(f"s={s} public bits with c0={c0} leave no block bits")
    sigma = min(s - c0, t)
    if codebook is None:
        codebook = build_codebook(1 << sigma, c0=c0, seed=seed, alpha=alpha)
    if codebook.n != (1 << sigma) or codebook.c0 != c0:
        raise ValueError("codebook does not match sigma/c0")
    J = k >> sigma
    theta = 2.0 * codebook.alpha / np.sqrt(1 << sigma)
    return DcmMap(k=k, sigma=sigma, J=J, L=2 * J, theta=float(theta),
                  codebook=codebook, s_bits=sigma + c0)


def apply_dcm(dcm: DcmMap, u: int, x: int) -> int:
    """Image of symbol x (1-indexed) under seed u (big-endian index in [0, 2^s_bits))."""
    if not 0 <= u < dcm.seeds:
        raise ValueError(f"seed {u} outside [0, {dcm.seeds})")
    if not 1 <= x <= dcm.k:
        raise ValueError(f"symbol {x} outside [1, {dcm.k}]")
    j = (x - 1) >> dcm.sigma
    r = x - (j << dcm.sigma)  # position within block, 1-indexed
    if dcm.codebook.vectors[u, r - 1]:
        return 2 * j + 1
    return 2 * j + 2


def apply_dcm_array(dcm: DcmMap, u: int, xs0: np.ndarray) -> np.ndarray:
    """Vectorized apply_dcm on 0-indexed symbols, returning 0-indexed outputs."""
    j = xs0 >> dcm.sigma
    r0 = xs0 - (j << dcm.sigma)
    hit = dcm.codebook.vectors[u, r0].astype(np.int64)
    return 2 * j + (1 - hit)


def push_forward(dcm: DcmMap, u: int, p: Distribution) -> Distribution:
    """Exact image law of p under seed u."""
    if p.k != dcm.k:
        raise ValueError("distribution size mismatch")
    blocks = p.probs.reshape(dcm.J, 1 << dcm.sigma)
    mask = dcm.codebook.vectors[u].astype(np.float64)
    mass_in = blocks @ mask
    out = np.empty(dcm.L)
    out[0::2] = mass_in
    out[1::2] = blocks.sum(axis=1) - mass_in
    np.clip(out, 0.0, None, out=out)
    return Distribution(dcm.L, out)


def blockwise_separation(dcm: DcmMap, u: int, p: Distribution, q: Distribution) -> float:
    """sum_j |p^j(S_u) - q^j(S_u)| over blocks.

    Equals TV(p^u, q^u) exactly when p and q put the same mass on every
    block (the perturbation families used in lower bounds); in general
    TV(p^u, q^u) >= half this sum.
    """
    diff = (p.probs - q.probs).reshape(dcm.J, 1 << dcm.sigma)
    mask = dcm.codebook.vectors[u].astype(np.float64)
    return float(np.abs(diff @ mask).sum())


@dataclass(frozen=True)
class DistortionReport:
    per_seed_tv: np.ndarray
    tv_input: float
    theta: float
    preserved_fraction: float  # fraction of seeds with TV >= theta * tv_input
    per_seed_l2: np.ndarray = None  # diagnostic: l2 distance of the images
    l2_input: float = 0.0


def dcm_distortion(dcm: DcmMap, p: Distribution, q: Distribution) -> DistortionReport:
    """Exact TV(p^u, q^u) for every seed, plus the preserved-seed fraction.

    The report also carries the per-seed l2 distances as a diagnostic (the
    stricter separation criterion); only the TV guarantee is certified.
    """
    diff = (p.probs - q.probs).reshape(dcm.J, 1 << dcm.sigma)
    mask = dcm.codebook.vectors.astype(np.float64)  # m x n
    delta_in = diff @ mask.T  # J x m
    delta_block = diff.sum(axis=1, keepdims=True)  # J x 1
    delta_out = np.abs(delta_block - delta_in)
    tvs = 0.5 * (np.abs(delta_in) + delta_out).sum(axis=0)
    l2s = np.sqrt((delta_in**2 + delta_out**2).sum(axis=0))
    tv_in = tv_distance(p, q)
    if tv_in > 0:
        frac = float(np.mean(tvs >= dcm.theta * tv_in))
    else:
        frac = 0.0
    return DistortionReport(per_seed_tv=tvs, tv_input=tv_in,
                            theta=dcm.theta, preserved_fraction=frac,
                            per_seed_l2=l2s,
                            l2_input=float(np.linalg.norm(p.probs - q.probs)))
