"""Protocol wiring: capping, bypass, amplification groups, audits, replay."""

import math

import numpy as np
import pytest

from fewcoin import constants
from fewcoin.bounds import paninski_far
from fewcoin.compression import build_dcm, push_forward
from fewcoin.core import Comm, Distribution, Ldp, Verdict
from fewcoin.protocol import (
    ProtocolConfig,
    effective_coins,
    required_players,
    required_players_raw,
    run_protocol,
    universality_audit,
)


class TestRequiredPlayers:
    def test_centralized_rate_when_bits_cover_domain(self):
        # l >= log2(k): both caps saturate, leaving C * sqrt(k)/eps^2.
        k, eps = 64, 0.3
        assert required_players_raw(Comm(6), k, eps, 5) == pytest.approx(
            constants.C_COMM * math.sqrt(k) / eps**2)

    def test_private_coin_rate(self):
        k, eps, l = 64, 0.3, 3
        assert required_players_raw(Comm(l), k, eps, 0) == pytest.approx(
            constants.C_COMM * k**1.5 / (2**l * eps**2))

    def test_communication_worth_two_coins(self):
        # With l + s <= log2(k): one extra message bit buys what two extra
        # public bits buy.
        k, eps = 256, 0.3
        assert required_players_raw(Comm(2), k, eps, 2) == pytest.approx(
            required_players_raw(Comm(3), k, eps, 0))

    def test_ceiling(self):
        assert required_players(Ldp(0.5), 64, 0.3, 0) == math.ceil(
            required_players_raw(Ldp(0.5), 64, 0.3, 0))


class TestEffectiveCoins:
    def test_comm_cap(self):
        assert effective_coins(Comm(3), 64, 10) == 3
        assert effective_coins(Comm(3), 64, 2) == 2
        assert effective_coins(Comm(8), 64, 5) == 0

    def test_ldp_cap(self):
        assert effective_coins(Ldp(0.5), 64, 10) == 6
        assert effective_coins(Ldp(0.5), 64, 4) == 4


class TestBypass:
    def test_transcript_shows_private_path(self):
        q = Distribution.uniform(64)
        cfg = ProtocolConfig(k=64, eps=0.3, delta=1 / 12, constraint=Comm(3), s=0, n=4000)
        verdict, tr = run_protocol(cfg, q, q, 7)
        assert tr.path == "private"
        assert tr.d == 1
        assert tr.groups[0].L == 64
        assert tr.groups[0].theta == 1.0
        assert tr.public_bits_consumed == 0

    def test_sigma_one_not_engaged(self):
        # s_eff = c0 + 1 would give blocks of two and L = k: pure loss, so
        # the private path runs instead.
        q = Distribution.uniform(64)
        cfg = ProtocolConfig(k=64, eps=0.3, delta=1 / 12, constraint=Ldp(0.5),
                             s=constants.C0 + 1, n=80_000)
        _, tr = run_protocol(cfg, q, q, 3)
        assert tr.path == "private"


class TestDcmPath:
    def make_config(self, n=400_000):
        return ProtocolConfig(k=64, eps=0.45, delta=1 / 12, constraint=Ldp(1.0),
                              s=6, n=n, amp_eta=0.2, amp_gamma=1 / 8)

    def test_engaged_geometry(self):
        q = Distribution.uniform(64)
        cfg = self.make_config()
        _, tr = run_protocol(cfg, q, q, 5)
        assert tr.path == "dcm"
        assert tr.s_eff == 6
        assert tr.public_bits_consumed == 6
        assert len(tr.public_bits) == 6
        assert tr.d >= 2
        dcm = build_dcm(64, 6)
        assert all(g.L == dcm.L for g in tr.groups)
        assert all(g.theta == pytest.approx(dcm.theta) for g in tr.groups)

    def test_compression_stage_perfect_completeness(self):
        # Under p = q every group's induced pair is identical exactly.
        q = Distribution(64, np.random.default_rng(1).dirichlet(np.ones(64)))
        cfg = self.make_config()
        _, tr = run_protocol(cfg, q, q, 11)
        dcm = build_dcm(64, 6)
        for g in tr.groups:
            pi = push_forward(dcm, g.seed, q)
            qi = push_forward(dcm, g.seed, q)
            np.testing.assert_array_equal(pi.probs, qi.probs)

    def test_groups_share_expander_neighbors(self):
        q = Distribution.uniform(64)
        cfg = self.make_config()
        _, tr = run_protocol(cfg, q, q, 5)
        seeds = [g.seed for g in tr.groups]
        assert len(seeds) == tr.d
        assert all(0 <= r < 2**6 for r in seeds)

    def test_fresh_randomness_mode_labeled(self):
        q = Distribution.uniform(64)
        cfg = ProtocolConfig(k=64, eps=0.45, delta=1 / 12, constraint=Ldp(1.0),
                             s=6, n=400_000, amp_eta=0.2, amp_gamma=1 / 8,
                             fresh_randomness=True)
        _, tr = run_protocol(cfg, q, q, 5)
        assert tr.fresh_randomness
        assert tr.public_bits_consumed == 6 * tr.d

    def test_conservative_amplification_group_count(self):
        # eta = 1 - delta0 = 0.5, gamma = 1/24: degree 197 on 2^8 vertices.
        q = Distribution.uniform(1024)
        cfg = ProtocolConfig(k=1024, eps=0.3, delta=1 / 12, constraint=Ldp(0.5),
                             s=8, n=197 * 300, conservative_amplification=True)
        _, tr = run_protocol(cfg, q, q, 2)
        assert tr.d == 197


class TestReproducibility:
    def test_bit_for_bit_replay(self, tmp_path):
        q = Distribution.uniform(64)
        p = paninski_far(64, 0.3, np.random.default_rng(4))
        cfg = ProtocolConfig(k=64, eps=0.3, delta=1 / 12, constraint=Comm(3), s=4, n=9000)
        v1, t1 = run_protocol(cfg, q, p, 909)
        v2, t2 = run_protocol(cfg, q, p, 909)
        assert v1 == v2
        f1, f2 = tmp_path / "a.txt", tmp_path / "b.txt"
        t1.save(f1)
        t2.save(f2)
        assert f1.read_bytes() == f2.read_bytes()

    def test_seed_changes_transcript(self):
        q = Distribution.uniform(64)
        cfg = ProtocolConfig(k=64, eps=0.3, delta=1 / 12, constraint=Ldp(0.5), s=6,
                             n=100_000, amp_eta=0.2, amp_gamma=1 / 8)
        _, t1 = run_protocol(cfg, q, q, 1)
        _, t2 = run_protocol(cfg, q, q, 2)
        assert t1.public_bits != t2.public_bits


class TestUniversality:
    def test_clean_runs_pass(self):
        q = Distribution.uniform(64)
        for constraint in (Comm(3), Ldp(0.5)):
            cfg = ProtocolConfig(k=64, eps=0.3, delta=1 / 12, constraint=constraint,
                                 s=4, n=20_000)
            _, tr = run_protocol(cfg, q, q, 13)
            assert universality_audit(tr)

    def test_peeking_tester_fails_audit(self):
        q = Distribution.uniform(64)
        cfg = ProtocolConfig(k=64, eps=0.3, delta=1 / 12, constraint=Comm(3), s=0, n=4000)
        _, tr = run_protocol(cfg, q, q, 13, player_side_spy=lambda guard: guard.probs)
        assert not universality_audit(tr)


def test_power_monotone_in_message_bits(rng):
    # At fixed n, more message bits means smaller groups and more
    # reconstructed samples, so empirical power cannot drop (within noise).
    k, eps, n, trials = 16, 0.45, 1600, 200
    q = Distribution.uniform(k)
    powers, ses = [], []
    for bits in (1, 2, 3):
        cfg = ProtocolConfig(k=k, eps=eps, delta=1 / 12, constraint=Comm(bits),
                             s=0, n=n)
        rejects = 0
        for t in range(trials):
            p = paninski_far(k, eps, np.random.default_rng(300 + t))
            v, _ = run_protocol(cfg, q, p, 1000 * bits + t)
            rejects += v is Verdict.REJECT
        pw = rejects / trials
        powers.append(pw)
        ses.append(math.sqrt(max(pw * (1 - pw), 1e-9) / trials))
    for i in range(3):
        for j in range(i + 1, 3):
            assert powers[j] >= powers[i] - 3 * math.hypot(ses[i], ses[j])


class TestValidation:
    def test_non_power_of_two_rejected(self):
        with pytest.raises(ValueError):
            ProtocolConfig(k=48, eps=0.3, delta=0.1, constraint=Comm(2), s=0, n=10)

    def test_domain_mismatch(self):
        cfg = ProtocolConfig(k=64, eps=0.3, delta=0.1, constraint=Comm(2), s=0, n=10)
        with pytest.raises(ValueError):
            run_protocol(cfg, Distribution.uniform(32), Distribution.uniform(64), 0)

    def test_remainder_players_dropped(self):
        q = Distribution.uniform(64)
        cfg = ProtocolConfig(k=64, eps=0.3, delta=1 / 12, constraint=Comm(3), s=0,
                             n=4003)
        _, tr = run_protocol(cfg, q, q, 1)
        # comm groups consume reporter/vetoer pairs of 2 * 10 players on the
        # 70-symbol padded domain.
        assert tr.n_used == (4003 // 20) * 20
