"""Fixed binary codebooks realizing a seeded one-bit l2 isometry.

A codebook is m = 2**c0 * n uniform binary vectors u_1..u_m in {0,1}^n
(equivalently subsets S_j = supp(u_j)). Certification checks, by subset
sampling, that the averaged Gram matrix of every large sub-collection stays
well conditioned: lambda_min((1/|J|) sum_{j in J} u_j u_j^T) >= c2 for
|J| >= ceil((1-c1) m). A certified codebook guarantees that for any vector x,
the fraction of indices j with |x(S_j)| >= sqrt(c2)*||x||_2 cannot vanish;
the operative per-block failure probability delta0 is calibrated empirically
and recorded, not derived (see constants.py).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constants
from .core import CertificationFailed, ZeroVector


@dataclass(frozen=True)
class CertReport:
    lambda_min_full: float
    lambda_min_subsets: float
    lambda_max_centered: float
    passed: bool
    trials: int
    c1: float = constants.C1
    c2: float = constants.C2
    lambda_max_cap: float = constants.LAMBDA_MAX_CAP


@dataclass(frozen=True)
class Codebook:
    n: int
    m: int
    c0: int
    vectors: np.ndarray  # m x n, uint8 in {0,1}
    alpha: float
    delta0: float
    cert: CertReport

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.uint8)
        if v.shape != (self.m, self.n):
            raise ValueError(f"vector block shape {v.shape} != ({self.m}, {self.n})")
        if self.m != (1 << self.c0) * self.n:
            raise ValueError("m must equal 2**c0 * n")
        v = np.ascontiguousarray(v)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def subset(self, j: int) -> np.ndarray:
        """1-indexed support of vector j (1-indexed)."""
        return np.flatnonzero(self.vectors[j - 1]) + 1


def _avg_gram(vectors: np.ndarray) -> np.ndarray:
    v = vectors.astype(np.float64)
    return (v.T @ v) / v.shape[0]


def certify_codebook(
    vectors: np.ndarray,
    c1: float = constants.C1,
    c2: float = constants.C2,
    subset_trials: int = constants.SUBSET_TRIALS,
    rng: np.random.Generator | None = None,
    lambda_max_cap: float = constants.LAMBDA_MAX_CAP,
) -> CertReport:
    """Spectral certificate for a candidate vector block.

    Subsets are sampled rather than enumerated (there are exponentially many);
    an average over a larger subset is a convex combination of averages over
    its subsets of the checked size, so certifying the minimum size suffices
    for everything above it.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    vectors = np.asarray(vectors)
    m, n = vectors.shape
    if n > 1024:
        raise ValueError("block length above 1024 not supported (dense eigensolve)")

    lam_full = float(np.linalg.eigvalsh(_avg_gram(vectors))[0])

    subset_size = int(np.ceil((1.0 - c1) * m))
    lam_subsets = lam_full
    for _ in range(subset_trials):
        idx = rng.choice(m, size=subset_size, replace=False)
        lam = float(np.linalg.eigvalsh(_avg_gram(vectors[idx]))[0])
        lam_subsets = min(lam_subsets, lam)

    centered = vectors.astype(np.float64) - 0.5
    lam_max_c = float(np.linalg.eigvalsh((centered.T @ centered) / m)[-1])

    passed = bool(lam_subsets >= c2 and lam_max_c <= lambda_max_cap)
    return CertReport(
        lambda_min_full=lam_full,
        lambda_min_subsets=lam_subsets,
        lambda_max_centered=lam_max_c,
        passed=passed,
        trials=subset_trials,
        c1=c1,
        c2=c2,
        lambda_max_cap=lambda_max_cap,
    )


def build_codebook(
    n: int,
    c0: int = constants.C0,
    seed: int = 0,
    c1: float = constants.C1,
    c2: float = constants.C2,
    subset_trials: int = constants.SUBSET_TRIALS,
    alpha: float | None = None,
    delta0: float = constants.DELTA0,
    max_retries: int = 16,
) -> Codebook:
    """Draw m = 2**c0 * n uniform binary vectors and certify them.

    On certification failure the seed is incremented and the draw repeated;
    CertificationFailed after max_retries signals constants too aggressive
    for this block length.
    """
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError("block length must be a power of two")
    if c0 < 1:
        raise ValueError("c0 must be >= 1")
    if alpha is None:
        alpha = float(np.sqrt(c2))
    m = (1 << c0) * n
    for attempt in range(max_retries):
        rng = np.random.default_rng(seed + attempt)
        vectors = rng.integers(0, 2, size=(m, n), dtype=np.uint8)
        cert = certify_codebook(
            vectors, c1=c1, c2=c2, subset_trials=subset_trials,
            rng=np.random.default_rng((seed + attempt) ^ 0x5EED),
        )
        if cert.passed:
            return Codebook(n=n, m=m, c0=c0, vectors=vectors,
                            alpha=alpha, delta0=delta0, cert=cert)
    raise CertificationFailed(
        f"codebook at n={n} failed certification {max_retries} times "
        f"(c1={c1}, c2={c2}); constants too aggressive for this block length"
    )


def isometry_gap(cb: Codebook, x: np.ndarray) -> float:
    """Fraction of codebook vectors j with |sum_{i in S_j} x_i| >= alpha*||x||_2."""
    x = np.asarray(x, dtype=np.float64)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise ZeroVector("isometry gap needs a nonzero vector")
    sums = cb.vectors.astype(np.float64) @ x
    return float(np.mean(np.abs(sums) >= cb.alpha * norm))


# ---------------------------------------------------------------------------
# Serialization: header line "n m c0 alpha delta0", then m rows of n '0'/'1'
# characters. Round-trips bit-exactly.
# ---------------------------------------------------------------------------

def save_codebook(cb: Codebook, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{cb.n} {cb.m} {cb.c0} {cb.alpha!r} {cb.delta0!r}\n")
        for row in cb.vectors:
            fh.write("".join("1" if b else "0" for b in row) + "\n")


def load_codebook(path) -> Codebook:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        n, m, c0 = int(header[0]), int(header[1]), int(header[2])
        alpha, delta0 = float(header[3]), float(header[4])
        rows = []
        for _ in range(m):
            line = fh.readline().strip()
            rows.append([1 if ch == "1" else 0 for ch in line])
    vectors = np.array(rows, dtype=np.uint8)
    cert = certify_codebook(vectors)
    if not cert.passed:
        raise CertificationFailed(f"codebook loaded from {path} fails certification")
    return Codebook(n=n, m=m, c0=c0, vectors=vectors, alpha=alpha, delta0=delta0, cert=cert)
