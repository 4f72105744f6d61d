import itertools
import math

import numpy as np
import pytest

from chanem.cir import (CirConfig, DEFAULT_TAP_BUDGET, DiscreteCir,
                        discretize, path_gain_total, sort_truncate)
from chanem.errors import DelayRangeError, InvalidInputError
from chanem.propagation import DelayProfile

F_SAMP = 46.08e6


def make_profile(amps, delays, t=0.0):
    return DelayProfile(amps=np.asarray(amps, complex),
                        delays=np.asarray(delays, float), snapshot_time=t)


def test_tap_grid_size_at_system_rate():
    cfg = CirConfig(f_samp=F_SAMP, max_delay_spread=3e-6)
    assert cfg.l_max == 146
    assert cfg.k_max == 145
    cir = discretize(make_profile([1.0], [0.0]), cfg)
    assert len(cir.taps) == 146


def test_on_grid_impulse_lands_on_single_tap():
    cfg = CirConfig(f_samp=F_SAMP)
    cir = discretize(make_profile([1.0], [0.0]), cfg)
    assert cir.taps[0] == pytest.approx(1.0)
    assert np.max(np.abs(cir.taps[1:])) < 1e-12


def test_half_sample_delay_spreads_symmetrically():
    cfg = CirConfig(f_samp=F_SAMP)
    cir = discretize(make_profile([1.0], [0.5 / F_SAMP]), cfg)
    assert cir.taps[0].real == pytest.approx(2 / math.pi, abs=1e-5)   # sinc(-0.5)
    assert cir.taps[1].real == pytest.approx(0.63662, abs=1e-5)
    assert cir.taps[2].real == pytest.approx(-0.21221, abs=1e-5)      # sinc(1.5)


def test_empty_profile_gives_zero_taps():
    cfg = CirConfig(f_samp=F_SAMP)
    cir = discretize(make_profile([], []), cfg)
    assert np.all(cir.taps == 0)


def test_delay_beyond_spread_names_path():
    cfg = CirConfig(f_samp=F_SAMP, max_delay_spread=3e-6)
    with pytest.raises(DelayRangeError) as err:
        discretize(make_profile([1.0, 1.0], [1e-6, 4e-6]), cfg)
    assert err.value.path_index == 1


def test_discretize_is_linear():
    rng = np.random.default_rng(5)
    cfg = CirConfig(f_samp=F_SAMP)
    a = make_profile(rng.standard_normal(4) + 1j * rng.standard_normal(4),
                     rng.uniform(0, 2.5e-6, 4))
    b = make_profile(rng.standard_normal(3) + 1j * rng.standard_normal(3),
                     rng.uniform(0, 2.5e-6, 3))
    merged = make_profile(np.concatenate([a.amps, b.amps]),
                          np.concatenate([a.delays, b.delays]))
    lhs = discretize(merged, cfg).taps
    rhs = discretize(a, cfg).taps + discretize(b, cfg).taps
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


def test_on_grid_profile_reconstructs_exactly():
    rng = np.random.default_rng(11)
    cfg = CirConfig(f_samp=F_SAMP)
    ks = rng.choice(130, size=6, replace=False)
    amps = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    cir = discretize(make_profile(amps, ks / F_SAMP), cfg)
    expect = np.zeros(cfg.l_max, complex)
    expect[ks] = amps
    np.testing.assert_allclose(cir.taps, expect, atol=1e-11)


def test_sort_truncate_picks_strongest():
    cir = DiscreteCir(taps=[0.0, 3.0, 1.0 + 1.0j, 0.5], f_samp=F_SAMP)
    sel = sort_truncate(cir, 2)
    np.testing.assert_array_equal(sel.indices, [1, 2])
    np.testing.assert_array_equal(sel.amps, [3.0, 1.0 + 1.0j])
    assert sel.retained_power == pytest.approx(9.0 + 2.0)
    assert sel.total_power == pytest.approx(9.0 + 2.0 + 0.25)


def test_sort_truncate_keeps_all_when_budget_large():
    rng = np.random.default_rng(3)
    taps = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    taps[[2, 7]] = 0.0
    cir = DiscreteCir(taps=taps, f_samp=F_SAMP)
    sel = sort_truncate(cir, 100)
    assert sel.l_sel == 10  # zero taps never selected
    assert sel.retained_power == pytest.approx(sel.total_power)
    assert sorted(sel.indices) == [k for k in range(12) if k not in (2, 7)]


def test_sort_truncate_tie_breaks_to_smaller_index():
    cir = DiscreteCir(taps=[0.5, -0.5, 0.5j], f_samp=F_SAMP)
    sel = sort_truncate(cir, 2)
    np.testing.assert_array_equal(sel.indices, [0, 1])


def test_sort_truncate_power_descending_invariant():
    rng = np.random.default_rng(9)
    for _ in range(20):
        taps = rng.standard_normal(30) + 1j * rng.standard_normal(30)
        sel = sort_truncate(DiscreteCir(taps=taps, f_samp=F_SAMP), 7)
        powers = np.abs(sel.amps) ** 2
        assert np.all(np.diff(powers) <= 1e-15)
        assert len(set(sel.indices.tolist())) == sel.l_sel


def test_truncation_is_energy_optimal_for_small_vectors():
    rng = np.random.default_rng(17)
    for _ in range(25):
        l_max = rng.integers(3, 13)
        taps = rng.standard_normal(l_max) + 1j * rng.standard_normal(l_max)
        cir = DiscreteCir(taps=taps, f_samp=F_SAMP)
        l_sel = int(rng.integers(1, l_max + 1))
        sel = sort_truncate(cir, l_sel)
        powers = np.abs(taps) ** 2
        best = max(sum(powers[list(combo)])
                   for combo in itertools.combinations(range(l_max),
                                                       min(l_sel, l_max)))
        assert sel.retained_power == pytest.approx(best)
        # L2 truncation error equals the dropped power
        dense = np.zeros(l_max, complex)
        dense[sel.indices] = sel.amps
        err = np.sum(np.abs(taps - dense) ** 2)
        assert err == pytest.approx(sel.total_power - sel.retained_power)


def test_invalid_budget_rejected():
    cir = DiscreteCir(taps=[1.0], f_samp=F_SAMP)
    with pytest.raises(InvalidInputError):
        sort_truncate(cir, 0)


def test_default_tap_budget_value():
    assert DEFAULT_TAP_BUDGET == 28


def test_path_gain_total():
    assert path_gain_total(DiscreteCir(taps=[1.0], f_samp=F_SAMP)) == pytest.approx(0.0)
    assert path_gain_total(
        DiscreteCir(taps=[0.5, 0.5], f_samp=F_SAMP)) == pytest.approx(0.0)
    assert path_gain_total(
        DiscreteCir(taps=[0.5, -0.5], f_samp=F_SAMP)) == float("-inf")
