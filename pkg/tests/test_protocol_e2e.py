"""End-to-end run of the compression-engaged protocol path.

The acceptance grid exercises the private path (its cells cap the effective
coins at or below the engage threshold); this module drives the full
pipeline: shared seed -> expander neighbors -> per-group compression ->
per-group tester -> unanimous accept. Player counts come from a one-off
calibration of this configuration; the amplifier override is justified
inside the test by measuring the actual bad-seed fraction first.
"""

import numpy as np
import pytest

from fewcoin.bounds import paninski_far
from fewcoin.compression import build_dcm, dcm_distortion
from fewcoin.core import Comm, Distribution, Ldp, Verdict
from fewcoin.protocol import ProtocolConfig, run_protocol

K, EPS, S, BITS = 128, 0.45, 5, 2
AMP_ETA, AMP_GAMMA = 0.2, 1 / 8
PLAYERS = 4_400_000
TRIALS = 14
# Allow up to 3 failures in 14 trials per arm: at the target rate delta=1/12
# the chance of 4+ failures is about 3 percent.
ALLOWED = 3


@pytest.fixture(scope="module")
def config():
    return ProtocolConfig(k=K, eps=EPS, delta=1 / 12, constraint=Comm(BITS),
                          s=S, n=PLAYERS, amp_eta=AMP_ETA, amp_gamma=AMP_GAMMA)


def test_amplifier_override_is_justified(rng):
    # The measured bad-seed fraction of this compression map stays under the
    # eta the run assumes.
    dcm = build_dcm(K, S)
    q = Distribution.uniform(K)
    worst = 0.0
    for _ in range(40):
        p = paninski_far(K, EPS, rng)
        worst = max(worst, 1.0 - dcm_distortion(dcm, p, q).preserved_fraction)
    assert worst <= AMP_ETA


def test_dcm_path_completeness(config):
    q = Distribution.uniform(K)
    rejects = 0
    for t in range(TRIALS):
        verdict, tr = run_protocol(config, q, q, (t << 10) + 21)
        assert tr.path == "dcm"
        rejects += verdict is Verdict.REJECT
    assert rejects <= ALLOWED


def test_dcm_path_soundness(config):
    q = Distribution.uniform(K)
    accepts = 0
    for t in range(TRIALS):
        p = paninski_far(K, EPS, np.random.default_rng(5000 + t))
        verdict, tr = run_protocol(config, q, p, (t << 10) + 22)
        assert tr.path == "dcm"
        accepts += verdict is Verdict.ACCEPT
    assert accepts <= ALLOWED


def test_dcm_path_ldp_error_rates():
    # The one-bit private tester behind the compression stage: k=64 with
    # six public coins compresses to 16 symbols (sigma=3).
    k, eps, trials = 64, 0.45, 12
    config = ProtocolConfig(k=k, eps=eps, delta=1 / 12, constraint=Ldp(1.0),
                            s=6, n=1_300_000, amp_eta=AMP_ETA, amp_gamma=AMP_GAMMA)
    q = Distribution.uniform(k)
    rejects = accepts = 0
    for t in range(trials):
        v, tr = run_protocol(config, q, q, (t << 11) + 31)
        assert tr.path == "dcm"
        rejects += v is Verdict.REJECT
        p = paninski_far(k, eps, np.random.default_rng(6000 + t))
        v, _ = run_protocol(config, q, p, (t << 11) + 32)
        accepts += v is Verdict.ACCEPT
    assert rejects <= ALLOWED
    assert accepts <= ALLOWED


def test_dcm_path_accounting(config):
    q = Distribution.uniform(K)
    _, tr = run_protocol(config, q, q, 77)
    dcm = build_dcm(K, S)
    assert tr.s_eff == S
    assert tr.public_bits_consumed == S
    assert tr.d == 11
    assert all(g.L == dcm.L and g.theta == pytest.approx(dcm.theta) for g in tr.groups)
    digests = {g.q_digest for g in tr.groups}
    assert len(digests) > 1  # distinct seeds induce distinct references
