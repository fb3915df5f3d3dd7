"""Numerical lower-bound toolkit.

For a channel W on an even domain [k], the (k/2) x (k/2) PSD matrix

    H(W)[i1, i2] = sum_y dW_i1(y) * dW_i2(y) / colsum(y),
    dW_i(y) = W(y | 2i-1) - W(y | 2i),   colsum(y) = sum_x W(y | x),

measures how well W separates consecutive pair inputs; its nuclear norm
bounds channel informativeness (<= 2^l for l-bit channels, O(rho^2) for
rho-LDP channels). Pairwise perturbations of uniform, the bilinear identity
<delta_z, delta_z'> = (eps^2/k) z^T H(W) z', and the decoupled chi-square
fluctuation ln E exp(sum_i <delta_Z, delta_Z'>) are evaluated pointwise;
optimization over channel multisets or perturbation laws is out of scope.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import Channel, Comm, ConstraintSpec, Distribution, Ldp

PSD_EIG_TOL = -1e-9
SYM_ATOL = 1e-10


@dataclass(frozen=True)
class HMatrix:
    half_k: int
    entries: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=np.float64)
        if h.shape != (self.half_k, self.half_k):
            raise ValueError("H must be (k/2) x (k/2)")
        if np.abs(h - h.T).max() > SYM_ATOL:
            raise ValueError("H must be symmetric")
        h = np.ascontiguousarray(h)
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


def h_matrix(w: Channel) -> HMatrix:
    """Pair-separation matrix of a channel; output cells with zero column sum are skipped."""
    if w.k % 2 != 0:
        raise ValueError("input domain size must be even")
    colsum = w.rows.sum(axis=0)
    keep = colsum > 0.0
    delta = w.rows[0::2, :] - w.rows[1::2, :]  # (k/2) x y
    d = delta[:, keep] / np.sqrt(colsum[keep])
    return HMatrix(half_k=w.k // 2, entries=d @ d.T)


def nuclear_norm(h: HMatrix) -> float:
    """Sum of singular values via the symmetric eigendecomposition."""
    return float(np.abs(np.linalg.eigvalsh(h.entries)).sum())


# ---------------------------------------------------------------------------
# Channel sampling for norm audits.
# ---------------------------------------------------------------------------

def random_channel(k: int, y_size: int, rng: np.random.Generator) -> Channel:
    """Rows drawn from the flat Dirichlet on the output simplex."""
    rows = rng.dirichlet(np.ones(y_size), size=k)
    return Channel(k, y_size, rows)


def deterministic_channels(k: int, y_size: int):
    """All y_size**k deterministic channels, one per mapping [k] -> [y]."""
    eye = np.eye(y_size)
    for assignment in itertools.product(range(y_size), repeat=k):
        yield Channel(k, y_size, eye[list(assignment)])


def randomized_response_channel(k: int, rho: float) -> Channel:
    """k-ary randomized response: keep the symbol with odds e^rho."""
    stay = math.exp(rho) / (math.exp(rho) + k - 1)
    off = 1.0 / (math.exp(rho) + k - 1)
    rows = np.full((k, k), off)
    np.fill_diagonal(rows, stay)
    return Channel(k, k, rows)


def random_ldp_channel(k: int, rho: float, rng: np.random.Generator) -> Channel:
    """Random mixture of randomized response, a Hadamard-column response,
    and input-independent noise; mixtures of rho-LDP channels stay rho-LDP."""
    from .testers import hadamard_scheme, ldp_channel_matrix

    scheme = hadamard_scheme(k, rho)
    j = int(rng.integers(1, scheme.K + 1))
    parts = [
        randomized_response_channel(k, rho).rows,
        ldp_channel_matrix(scheme, j).rows,
        np.tile(rng.dirichlet(np.ones(2)), (k, 1)),
    ]
    # Pad binary-output parts to a common alphabet of size k + 2.
    y = k + 2
    weights = rng.dirichlet(np.ones(len(parts)))
    rows = np.zeros((k, y))
    rows[:, :k] += weights[0] * parts[0]
    rows[:, k:] += weights[1] * parts[1]
    rows[:, k:] += weights[2] * parts[2]
    return Channel(k, y, rows)


@dataclass(frozen=True)
class NormAuditReport:
    constraint: ConstraintSpec
    k: int
    trials: int
    max_nuclear: float
    max_is_deterministic: bool
    rho_grid: tuple = ()
    rho_ratios: tuple = ()  # nuclear norm / rho^2 along the grid


def norm_bound_audit(
    constraint: ConstraintSpec,
    k: int,
    trials: int,
    rng: np.random.Generator,
    enumerate_deterministic: bool | None = None,
) -> NormAuditReport:
    """Empirical supremum of ||H(W)||_* over the constraint family.

    Comm: random row-stochastic channels, plus exhaustive deterministic
    channels when k * 2^l <= 4096 (they are the extreme points). The
    maximum must stay <= 2^l. Ldp: randomized-response mixtures and
    Hadamard channels; the report carries ||H||_*/rho^2 along a rho grid.
    """
    if isinstance(constraint, Comm):
        y = 1 << constraint.bits
        best = 0.0
        best_det = False
        for _ in range(trials):
            norm = nuclear_norm(h_matrix(random_channel(k, y, rng)))
            if norm > best:
                best, best_det = norm, False
        if enumerate_deterministic is None:
            enumerate_deterministic = k * y <= 4096 and y**k <= 1 << 20
        if enumerate_deterministic:
            for w in deterministic_channels(k, y):
                norm = nuclear_norm(h_matrix(w))
                if norm >= best:
                    best, best_det = norm, True
        return NormAuditReport(constraint, k, trials, best, best_det)

    if isinstance(constraint, Ldp):
        from .testers import hadamard_scheme, ldp_channel_matrix

        best = 0.0
        for _ in range(trials):
            norm = nuclear_norm(h_matrix(random_ldp_channel(k, constraint.rho, rng)))
            best = max(best, norm)
        grid = tuple(r / 10 for r in range(1, 11))
        ratios = []
        for rho in grid:
            scheme = hadamard_scheme(k, rho)
            worst = max(
                nuclear_norm(h_matrix(ldp_channel_matrix(scheme, j)))
                for j in range(2, scheme.K + 1)
            )
            worst = max(worst, nuclear_norm(h_matrix(randomized_response_channel(k, rho))))
            ratios.append(worst / rho**2)
        return NormAuditReport(constraint, k, trials, best, False,
                               rho_grid=grid, rho_ratios=tuple(ratios))

    raise TypeError(f"unsupported constraint {constraint!r}")


# ---------------------------------------------------------------------------
# Pairwise perturbations of uniform and the chi-square fluctuation.
# ---------------------------------------------------------------------------

def paninski_dist(z: np.ndarray, eps: float, k: int) -> Distribution:
    """p_z = (1/k)(1 + eps*z_1, 1 - eps*z_1, ...); TV from uniform = (eps/k)*||z||_1."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (k // 2,) or k % 2 != 0:
        raise ValueError("z must have length k/2 for even k")
    if eps * np.abs(z).max() > 1.0 + 1e-12:
        raise ValueError("eps * ||z||_inf must be <= 1 for a valid distribution")
    p = np.empty(k)
    p[0::2] = (1.0 + eps * z) / k
    p[1::2] = (1.0 - eps * z) / k
    return Distribution(k, p)


def paninski_far(k: int, tv: float, rng: np.random.Generator) -> Distribution:
    """Random sign-pattern perturbation at exact TV distance tv (needs tv <= 1/2)."""
    if not 0 < tv <= 0.5:
        raise ValueError("pairwise perturbations reach TV at most 1/2")
    z = rng.choice([-1.0, 1.0], size=k // 2)
    return paninski_dist(z, 2.0 * tv, k)


def random_far(k: int, tv: float, rng: np.random.Generator) -> Distribution:
    """Distribution at TV distance >= tv from uniform: boost one random symbol."""
    if not 0 < tv < 1.0 - 1.0 / k:
        raise ValueError("tv must lie in (0, 1 - 1/k)")
    a = tv / (1.0 - 1.0 / k)
    p = np.full(k, (1.0 - a) / k)
    p[rng.integers(k)] += a
    return Distribution(k, p)


def _delta_profile(w: Channel, z: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """(delta_z^W(y), reference output law) under the uniform reference."""
    k = w.k
    ref_out = w.rows.sum(axis=0) / k
    p_z = paninski_dist(z, eps, k)
    out = p_z.probs @ w.rows
    keep = ref_out > 0
    delta = np.zeros_like(ref_out)
    delta[keep] = (out[keep] - ref_out[keep]) / ref_out[keep]
    return delta, ref_out


def bilinear_identity_check(w: Channel, z: np.ndarray, zp: np.ndarray, eps: float) -> float:
    """|<delta_z^W, delta_z'^W> - (eps^2/k) z^T H(W) z'| under the uniform reference."""
    delta_z, ref_out = _delta_profile(w, z, eps)
    delta_zp, _ = _delta_profile(w, zp, eps)
    lhs = float(np.sum(ref_out * delta_z * delta_zp))
    h = h_matrix(w)
    rhs = (eps**2 / w.k) * float(np.asarray(z) @ h.entries @ np.asarray(zp))
    return abs(lhs - rhs)


@dataclass(frozen=True)
class FluctuationConfig:
    """n channels (a list, or one channel used n times), perturbation scale,
    and the evaluation mode for the Rademacher average."""

    channels: tuple
    eps: float
    beta: float = 1.0
    mode: str = "exact"  # "exact" or "mc"
    mc_samples: int = 100_000
    seed: int = 0

    @staticmethod
    def repeated(w: Channel, n: int, eps: float, **kw) -> "FluctuationConfig":
        return FluctuationConfig(channels=(w,) * n, eps=eps, **kw)


@dataclass(frozen=True)
class FluctuationResult:
    value: float  # ln E exp(...)
    mean: float  # E exp(...)
    stderr: float  # standard error of the mean (0 in exact mode)


def _fluctuation_matrix(cfg: FluctuationConfig) -> np.ndarray:
    """lambda * Hbar with the per-channel scale folded in: the exponent is
    Z^T M Z' with M = (beta^2 eps^2 / k) * sum_i H(W_i)."""
    if not cfg.channels:
        return np.zeros((0, 0))
    k = cfg.channels[0].k
    acc = np.zeros((k // 2, k // 2))
    for w in cfg.channels:
        if w.k != k:
            raise ValueError("all channels must share the input domain")
        acc += h_matrix(w).entries
    return (cfg.beta**2 * cfg.eps**2 / k) * acc


def _ln_cosh(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def chi2_fluctuation(cfg: FluctuationConfig) -> FluctuationResult:
    """ln E_{ZZ'} exp(sum_i <delta_Z^{W_i}, delta_{Z'}^{W_i}>) for Rademacher Z, Z'.

    The inner expectation over Z' is a product of cosh terms and is always
    taken exactly; exact mode enumerates all 2^(k/2) values of Z (k/2 <= 12),
    Monte Carlo mode samples Z and reports the standard error of the mean.
    """
    m = _fluctuation_matrix(cfg)
    half = m.shape[0]
    if half == 0 or cfg.eps == 0.0 or not np.any(m):
        return FluctuationResult(0.0, 1.0, 0.0)
    if cfg.mode == "exact":
        if half > 12:
            raise ValueError("exact enumeration supported only for k/2 <= 12")
        zs = np.array(list(itertools.product((-1.0, 1.0), repeat=half)))
    elif cfg.mode == "mc":
        rng = np.random.default_rng(cfg.seed)
        zs = rng.choice([-1.0, 1.0], size=(cfg.mc_samples, half))
    else:
        raise ValueError(f"unknown mode {cfg.mode!r}")
    # g(z) = E_{Z'} exp(z^T M Z') = prod_j cosh((M^T z)_j), in log space.
    log_g = _ln_cosh(zs @ m).sum(axis=1)
    g = np.exp(log_g)
    mean = float(g.mean())
    stderr = 0.0 if cfg.mode == "exact" else float(g.std(ddof=1) / math.sqrt(len(g)))
    return FluctuationResult(value=float(np.log(mean)), mean=mean, stderr=stderr)


def clipped_average_fluctuation(configs) -> float:
    """Average of min(1, chi-square fluctuation) over a channel multiset,
    the quantity a 2^s-seed public-coin family induces."""
    vals = [min(1.0, chi2_fluctuation(cfg).value) for cfg in configs]
    return float(np.mean(vals)) if vals else 0.0


# ---------------------------------------------------------------------------
# Closed-form sample-complexity lower bounds (without the unknown constant).
# ---------------------------------------------------------------------------

def sample_lb(constraint: ConstraintSpec, k: int, eps: float, s: int) -> float:
    """Scaling of the minimum player count for (k, eps)-uniformity testing
    with s public bits; returned without the absolute constant, for
    ratio/scaling comparisons."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if s < 0:
        raise ValueError("s must be nonnegative")
    root_k = math.sqrt(k)
    if isinstance(constraint, Comm):
        l = constraint.bits
        return (root_k / eps**2) * math.sqrt(max(k / 2**l, 1.0)) * math.sqrt(max(k / 2 ** (s + l), 1.0))
    if isinstance(constraint, Ldp):
        if not 0 < constraint.rho <= 1:
            raise ValueError("lower-bound formulas need rho in (0, 1]")
        return (k / (eps**2 * constraint.rho**2)) * math.sqrt(max(k / 2**s, 1.0))
    raise TypeError(f"unsupported constraint {constraint!r}")
