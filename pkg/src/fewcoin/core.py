"""Core domain types: distributions, channels, constraint families, verdicts.

Domain symbols are 1-indexed in the public API (a distribution over [k] has
symbols 1..k); serialized formats and internal numpy arrays are 0-indexed.
All types are immutable after construction; randomized operations take an
explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

SIMPLEX_ATOL = 1e-9
ROW_SUM_ATOL = 1e-9


class FewcoinError(Exception):
    """Base class for package errors."""


class CertificationFailed(FewcoinError):
    """A randomized construction failed its certificate after bounded retries."""


class InsufficientCoins(FewcoinError):
    """Not enough public random bits for the requested construction."""


class DegreeExceedsGraph(FewcoinError):
    """Requested expander degree is not smaller than the vertex count."""


class ZeroVector(FewcoinError):
    """An operation required a nonzero vector."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Distribution:
    """Probability vector over a finite 1-indexed domain of size k."""

    k: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or self.k != p.shape[0] or self.k < 1:
            raise ValueError(f"need a length-k vector, got shape {p.shape} for k={self.k}")
        if np.any(p < 0):
            raise ValueError("negative probability entry")
        if abs(p.sum() - 1.0) > SIMPLEX_ATOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", _frozen(p))

    @staticmethod
    def uniform(k: int) -> "Distribution":
        return Distribution(k, np.full(k, 1.0 / k))

    @staticmethod
    def point_mass(k: int, x: int) -> "Distribution":
        """Point mass at symbol x (1-indexed)."""
        p = np.zeros(k)
        p[x - 1] = 1.0
        return Distribution(k, p)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n i.i.d. symbols, returned 0-indexed for array work."""
        cdf = np.cumsum(self.probs)
        cdf[-1] = 1.0
        return np.searchsorted(cdf, rng.random(n), side="right").astype(np.int64)


def tv_distance(p: Distribution, q: Distribution) -> float:
    """Total variation distance, half the l1 distance."""
    if p.k != q.k:
        raise ValueError("distributions live on different domains")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def l2_distance(p: Distribution, q: Distribution) -> float:
    if p.k != q.k:
        raise ValueError("distributions live on different domains")
    return float(np.linalg.norm(p.probs - q.probs))


@dataclass(frozen=True)
class Channel:
    """Row-stochastic map from [k] inputs to a finite output alphabet.

    rows[x-1, y-1] = W(y | x).
    """

    k: int
    y_size: int
    rows: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.rows, dtype=np.float64)
        if w.shape != (self.k, self.y_size):
            raise ValueError(f"channel matrix shape {w.shape} != ({self.k}, {self.y_size})")
        if np.any(w < 0):
            raise ValueError("negative channel entry")
        if np.any(np.abs(w.sum(axis=1) - 1.0) > ROW_SUM_ATOL):
            raise ValueError("channel rows must each sum to 1")
        object.__setattr__(self, "rows", _frozen(w))

    def push(self, p: Distribution) -> Distribution:
        """Output distribution when the input is drawn from p."""
        if p.k != self.k:
            raise ValueError("input size mismatch")
        out = p.probs @ self.rows
        return Distribution(self.y_size, out / out.sum())


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"


@dataclass(frozen=True)
class ConstraintSpec:
    """Base class for local information constraints."""


@dataclass(frozen=True)
class Comm(ConstraintSpec):
    """Each message fits in `bits` bits."""

    bits: int

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be >= 1")


@dataclass(frozen=True)
class Ldp(ConstraintSpec):
    """Each channel must be rho-locally differentially private.

    rho may exceed 1 for simulation; the lower-bound formulas reject rho > 1.
    """

    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")


@dataclass(frozen=True)
class SeedBudget:
    """Number of shared public random bits plus a reproducibility seed."""

    s: int
    master_seed: int = 0

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("s must be nonnegative")


# ---------------------------------------------------------------------------
# Padding reduction: enlarge the domain so a divisor target divides it, at the
# cost of shrinking TV distances by exactly k/k'.
# ---------------------------------------------------------------------------

def padded_size(k: int, L: int) -> int:
    if not 1 <= L <= k:
        raise ValueError(f"need 1 <= L <= k, got L={L}, k={k}")
    return L * math.ceil(k / L)


def pad_domain(p: Distribution, L: int) -> Distribution:
    """Mix p with uniform mass on k'-k fresh symbols, k' = L*ceil(k/L).

    The uniform distribution maps to uniform, and TV distances scale by
    exactly k/k' >= 1/2.
    """
    kp = padded_size(p.k, L)
    if kp == p.k:
        return p
    out = np.empty(kp)
    out[: p.k] = (p.k / kp) * p.probs
    out[p.k :] = 1.0 / kp
    return Distribution(kp, out)


def pad_sample(x: int, k: int, L: int, rng: np.random.Generator) -> int:
    """Randomized mapping matching pad_domain: X~p gives output ~ pad_domain(p)."""
    kp = padded_size(k, L)
    if not 1 <= x <= k:
        raise ValueError(f"symbol {x} outside [1, {k}]")
    if kp == k or rng.random() < k / kp:
        return x
    return int(rng.integers(k + 1, kp + 1))


def pad_samples(xs0: np.ndarray, k: int, L: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized pad_sample on 0-indexed symbol arrays."""
    kp = padded_size(k, L)
    if kp == k:
        return xs0
    keep = rng.random(xs0.shape[0]) < k / kp
    fresh = rng.integers(k, kp, size=xs0.shape[0])
    return np.where(keep, xs0, fresh)


def pow2_target(k: int) -> int:
    """Smallest power of two >= k."""
    return 1 << max(0, (k - 1).bit_length())


def pad_to_pow2(p: Distribution) -> Distribution:
    """Power-of-two mode: pad with L = 2^floor(log2 k), giving k' = 2^ceil(log2 k)."""
    if p.k == pow2_target(p.k):
        return p
    return pad_domain(p, 1 << (p.k.bit_length() - 1))


# ---------------------------------------------------------------------------
# Local differential privacy predicate.
# ---------------------------------------------------------------------------

def is_ldp(w: Channel, rho: float, rtol: float = 1e-12) -> bool:
    """True iff max over outputs and input pairs of W(y|x)/W(y|x') <= e^rho.

    0/0 ratios count as 1; positive/0 fails for any finite rho.
    """
    bound = math.exp(rho) * (1.0 + rtol)
    for y in range(w.y_size):
        col = w.rows[:, y]
        zero = col <= 0.0
        if zero.all():
            continue
        if zero.any():
            return False
        if col.max() > bound * col.min():
            return False
    return True


# ---------------------------------------------------------------------------
# Distribution file format: newline-delimited decimal probabilities,
# '#'-prefixed comment lines ignored. 0-indexed (line order is symbol order).
# ---------------------------------------------------------------------------

def load_distribution(path) -> Distribution:
    vals = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals.append(float(line))
    if not vals:
        raise ValueError(f"no probabilities found in {path}")
    return Distribution(len(vals), np.array(vals))


def save_distribution(p: Distribution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# distribution over a domain of size {p.k}\n")
        for v in p.probs:
            fh.write(f"{float(v)!r}\n")
