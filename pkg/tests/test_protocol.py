import math

import numpy as np
import pytest

from steerqkd import (
    BadParam,
    DegenerateConfig,
    DensityMatrix,
    FilterPair,
    MeasurementTriad,
    ProtocolConfig,
    bloch_decompose,
    classify_usefulness,
    f3_bound,
    make_gamma,
    make_werner,
    optimal_triads,
    qber_min,
    round_records,
    run_protocol,
    tensor_spectrum,
    untrusted_source_demo,
)
from steerqkd.families import BellDiagonalParams, GammaParams, WernerParams
from steerqkd.filtering import apply_local_filters

SQRT3 = math.sqrt(3.0)


def werner_config(rounds, seed, omega=0.8, **kw):
    bf = bloch_decompose(make_werner(WernerParams(omega)))
    ta, tb = optimal_triads(bf)
    return ProtocolConfig(rounds=rounds, seed=seed, alice_triad=ta,
                          bob_triad=tb, **kw)


class TestConfigValidation:
    def test_rejects_bad_rounds(self):
        with pytest.raises(BadParam):
            werner_config(0, 1)
        with pytest.raises(BadParam):
            ProtocolConfig(rounds=2.5, seed=1,
                           alice_triad=MeasurementTriad.axes(),
                           bob_triad=MeasurementTriad.axes())

    def test_rejects_bad_test_fraction(self):
        for bad in (0.0, 1.0, -0.2):
            with pytest.raises(BadParam):
                werner_config(100, 1, test_fraction=bad)

    def test_rejects_negative_seed(self):
        with pytest.raises(BadParam):
            werner_config(100, -1)


class TestDeterminism:
    def test_same_seed_same_report(self):
        rho = make_werner(WernerParams(0.8))
        r1 = run_protocol(rho, werner_config(5000, 42))
        r2 = run_protocol(rho, werner_config(5000, 42))
        assert r1.sifted_count == r2.sifted_count
        assert r1.empirical_qber == r2.empirical_qber
        assert r1.empirical_cjwr == r2.empirical_cjwr
        assert r1.correlators == r2.correlators
        assert np.array_equal(r1.raw_key_alice, r2.raw_key_alice)
        assert np.array_equal(r1.raw_key_bob, r2.raw_key_bob)

    def test_different_seeds_differ(self):
        rho = make_werner(WernerParams(0.8))
        r1 = run_protocol(rho, werner_config(5000, 1))
        r2 = run_protocol(rho, werner_config(5000, 2))
        assert not np.array_equal(r1.raw_key_alice, r2.raw_key_alice)

    def test_records_consistent_with_report(self):
        rho = make_werner(WernerParams(0.8))
        cfg = werner_config(2000, 9)
        recs = round_records(rho, cfg)
        rep = run_protocol(rho, cfg)
        assert len(recs) == 2000
        assert sum(r.sifted for r in recs) == rep.sifted_count


class TestStructure:
    def test_counts_and_key_lengths(self):
        rho = make_werner(WernerParams(0.8))
        rep = run_protocol(rho, werner_config(20000, 5, test_fraction=0.25))
        assert rep.disclosed_count == math.ceil(0.25 * rep.sifted_count)
        key_len = rep.sifted_count - rep.disclosed_count
        assert rep.raw_key_alice.shape == (key_len,)
        assert rep.raw_key_bob.shape == (key_len,)
        assert set(np.unique(rep.raw_key_alice)) <= {0, 1}
        assert sum(rep.key_count_by_basis) == key_len
        for n, m in zip(rep.key_count_by_basis, rep.key_mismatch_by_basis):
            assert 0 <= m <= n

    def test_sifted_fraction_near_one_third(self):
        rho = make_werner(WernerParams(0.5))
        rep = run_protocol(rho, werner_config(90000, 11))
        # 5 sigma binomial window around 1/3
        sd = math.sqrt(90000 * (1 / 3) * (2 / 3))
        assert abs(rep.sifted_count - 30000) < 5 * sd

    def test_no_filter_reports_none(self):
        rho = make_werner(WernerParams(0.8))
        rep = run_protocol(rho, werner_config(1000, 3))
        assert rep.p_succ_empirical is None

    def test_degenerate_when_nothing_sifted(self):
        # with a single round, some seeds give mismatched bases
        rho = make_werner(WernerParams(0.8))
        saw_degenerate = False
        for seed in range(30):
            try:
                run_protocol(rho, werner_config(1, seed))
            except DegenerateConfig:
                saw_degenerate = True
                break
        assert saw_degenerate


class TestStatistics:
    def test_perfect_keys_on_singlet(self):
        rho = make_werner(WernerParams(1.0))
        rep = run_protocol(rho, werner_config(30000, 17))
        assert rep.empirical_qber == 0.0
        assert np.array_equal(rep.raw_key_alice, rep.raw_key_bob)
        assert rep.empirical_cjwr == pytest.approx(SQRT3, abs=1e-12)

    def test_werner_qber_matches_theory(self):
        rho = make_werner(WernerParams(0.8))
        spec = tensor_spectrum(bloch_decompose(rho))
        want = qber_min(spec)
        rep = run_protocol(rho, werner_config(100000, 23))
        sd = math.sqrt(want * (1 - want) / rep.disclosed_count)
        assert abs(rep.empirical_qber - want) < 5 * sd

    def test_werner_cjwr_matches_theory(self):
        rho = make_werner(WernerParams(0.8))
        want = f3_bound(tensor_spectrum(bloch_decompose(rho)))
        rep = run_protocol(rho, werner_config(100000, 29))
        # each correlator has variance (1-c^2)/n with n ~ sifted/3
        n = rep.sifted_count / 3
        sd = math.sqrt(3 * (1 - 0.64) / n) / SQRT3
        assert abs(rep.empirical_cjwr - want) < 5 * sd

    def test_correlators_near_singular_values(self):
        rho = make_gamma(GammaParams(q=0.9, alpha=0.25))
        bf = bloch_decompose(rho)
        spec = tensor_spectrum(bf)
        ta, tb = optimal_triads(bf)
        cfg = ProtocolConfig(rounds=150000, seed=31, alice_triad=ta, bob_triad=tb)
        rep = run_protocol(rho, cfg)
        for got, want in zip(rep.correlators, spec.sigma):
            assert got == pytest.approx(want, abs=0.02)

    def test_misaligned_triads_raise_qber(self):
        # measuring the singlet along mismatched axes wastes correlation
        rho = make_werner(WernerParams(0.9))
        bf = bloch_decompose(rho)
        ta, _ = optimal_triads(bf)
        cfg = ProtocolConfig(rounds=50000, seed=37, alice_triad=ta, bob_triad=ta)
        rep = run_protocol(rho, cfg)
        best = qber_min(tensor_spectrum(bf))
        assert rep.empirical_qber > best + 0.2


class TestFilteredRuns:
    def test_heralding_rate_matches_theory(self):
        rho = make_gamma(GammaParams(q=0.9, alpha=0.25))
        f = FilterPair(0.15, 0.12)
        out = apply_local_filters(rho, f)
        bf = bloch_decompose(out.filtered_state)
        ta, tb = optimal_triads(bf)
        cfg = ProtocolConfig(rounds=200000, seed=41, alice_triad=ta,
                             bob_triad=tb, filter=f)
        rep = run_protocol(rho, cfg)
        sd = math.sqrt(out.p_succ * (1 - out.p_succ) / 200000)
        assert rep.p_succ_empirical == pytest.approx(out.p_succ, abs=5 * sd)

    def test_filtered_qber_matches_filtered_state(self):
        rho = make_gamma(GammaParams(q=0.9, alpha=0.25))
        f = FilterPair(0.3, 0.25)
        out = apply_local_filters(rho, f)
        bf = bloch_decompose(out.filtered_state)
        ta, tb = optimal_triads(bf)
        cfg = ProtocolConfig(rounds=400000, seed=43, alice_triad=ta,
                             bob_triad=tb, filter=f, test_fraction=0.5)
        rep = run_protocol(rho, cfg)
        want = out.q_min_filtered
        sd = math.sqrt(want * (1 - want) / max(rep.disclosed_count, 1))
        assert abs(rep.empirical_qber - want) < 5 * sd


class TestUntrustedSourceDemo:
    def test_consistent_verdicts(self):
        p = BellDiagonalParams.from_werner(0.8)
        bf = bloch_decompose(make_werner(WernerParams(0.8)))
        ta, tb = optimal_triads(bf)
        cfg = ProtocolConfig(rounds=50000, seed=47, alice_triad=ta, bob_triad=tb)
        steer, useful, abs_local, rep = untrusted_source_demo(p, cfg)
        assert steer.steerable
        assert steer.chsh_violating
        assert useful.useful
        assert not abs_local          # violates CHSH outright
        sd = math.sqrt(0.1 * 0.9 / rep.disclosed_count)
        assert abs(rep.empirical_qber - useful.q_min) < 5 * sd

    def test_absolutely_local_but_useful_source(self):
        p = BellDiagonalParams(0.7, 0.1, 0.1, 0.1)
        bf = bloch_decompose(make_werner(WernerParams(0.6)))
        ta, tb = optimal_triads(bf)
        cfg = ProtocolConfig(rounds=20000, seed=53, alice_triad=ta, bob_triad=tb)
        steer, useful, abs_local, rep = untrusted_source_demo(p, cfg)
        assert useful.useful
        assert abs_local
        assert not steer.chsh_violating
