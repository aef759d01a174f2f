"""Beam selection, rate, and error-metric tests."""

import itertools
import math

import numpy as np
import pytest

from ris_doppler_ce.channel import Cir, LinkSet
from ris_doppler_ce.metrics import (
    achievable_rate,
    nmse,
    rate_from_cfr,
    rate_ratio,
    strongest_tap_beam,
)

RNG = np.random.default_rng(20240820)


def test_beam_unit_modulus():
    n, m = 32, 6
    h_ug = RNG.standard_normal(n) + 1j * RNG.standard_normal(n)
    h_urg = RNG.standard_normal((n, m)) + 1j * RNG.standard_normal((n, m))
    beam = strongest_tap_beam(h_ug, h_urg)
    assert beam.phi.shape == (m,)
    assert np.max(np.abs(np.abs(beam.phi) - 1.0)) <= 1e-12


def test_beam_identity_when_already_aligned():
    n = 16
    h_ug = np.fft.fft(np.r_[2.0, np.zeros(n - 1)])
    h_urg = np.column_stack([h_ug, h_ug])
    beam = strongest_tap_beam(h_ug, h_urg)
    assert np.max(np.abs(beam.phi - 1.0)) <= 1e-12


def test_beam_cancels_single_tap_offsets():
    n, m = 16, 4
    gammas = RNG.uniform(0.0, 2.0 * math.pi, m)
    h_ug = np.fft.fft(np.r_[1.0, np.zeros(n - 1)])
    h_urg = np.column_stack(
        [np.fft.fft(np.r_[np.exp(1j * g), np.zeros(n - 1)]) for g in gammas]
    )
    beam = strongest_tap_beam(h_ug, h_urg)
    assert np.max(np.abs(beam.phi - np.exp(-1j * gammas))) <= 1e-12


def test_beam_triangle_equality_at_selected_tap():
    n, m = 64, 5
    h_ug = RNG.standard_normal(n) + 1j * RNG.standard_normal(n)
    h_urg = RNG.standard_normal((n, m)) + 1j * RNG.standard_normal((n, m))
    beam = strongest_tap_beam(h_ug, h_urg)
    g_ug = np.fft.ifft(h_ug)
    g_urg = np.fft.ifft(h_urg, axis=0)
    score = np.abs(g_ug) + np.abs(g_urg).sum(axis=1)
    l_star = int(np.argmax(score))
    aligned = abs(g_ug[l_star] + g_urg[l_star, :] @ beam.phi)
    assert aligned == pytest.approx(score[l_star], rel=1e-12)


def test_beam_beats_exhaustive_quantized_search():
    # single-tap M=4 channel: the closed-form beam meets or beats every
    # pattern from a 16-level phase grid at the dominant tap
    n, m = 8, 4
    levels = np.exp(2j * math.pi * np.arange(16) / 16)
    grid = np.array(list(itertools.product(levels, repeat=m)))
    for trial in range(5):
        rng = np.random.default_rng(100 + trial)
        g_ug0 = complex(rng.standard_normal(), rng.standard_normal())
        g_urg0 = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        h_ug = np.fft.fft(np.r_[g_ug0, np.zeros(n - 1)])
        h_urg = np.column_stack(
            [np.fft.fft(np.r_[g, np.zeros(n - 1)]) for g in g_urg0]
        )
        beam = strongest_tap_beam(h_ug, h_urg)
        achieved = abs(g_ug0 + g_urg0 @ beam.phi)
        best = float(np.max(np.abs(g_ug0 + grid @ g_urg0)))
        assert achieved >= best - 1e-9


def test_beam_rejects_all_zero():
    with pytest.raises(ValueError, match="all-zero"):
        strongest_tap_beam(np.zeros(8), np.zeros((8, 2)))


def test_rate_zero_channel():
    assert rate_from_cfr(np.zeros(16), 10.0, 1e-3) == 0.0


def test_rate_known_value():
    # single subcarrier with SNR 3 gives exactly 2 bits
    h = np.array([math.sqrt(3.0)])
    assert rate_from_cfr(h, 0.0, 1.0) == pytest.approx(2.0, rel=1e-12)


def test_rate_monotone_in_power():
    h = RNG.standard_normal(32) + 1j * RNG.standard_normal(32)
    r = [rate_from_cfr(h, p, 1e-6) for p in (0.0, 10.0, 20.0)]
    assert r[0] < r[1] < r[2]


def test_rate_noise_validation():
    with pytest.raises(ValueError):
        rate_from_cfr(np.ones(4), 0.0, 0.0)


def test_achievable_rate_uses_composed_channel():
    n, m = 16, 3

    def one(v):
        return Cir(taps=np.array([v]), doppler_angles=np.zeros(1), n_fft=n)

    links = LinkSet(
        h_ug=one(1.0),
        h_ur=[one(1.0) for _ in range(m)],
        h_rg=[one(0.5), one(0.5j), one(-0.5)],
    )
    from ris_doppler_ce.metrics import BeamPattern

    beam = BeamPattern(phi=np.exp(-1j * np.angle([0.5, 0.5j, -0.5])))
    got = achievable_rate(links, beam, 0.0, 1.0)
    # aligned: |1 + 0.5*3| = 2.5 on every subcarrier, split across N
    snr = (1.0 / n) * 2.5**2 / 1.0
    assert got == pytest.approx(math.log2(1.0 + snr), rel=1e-12)


def test_nmse_trivial_triple():
    truth = RNG.standard_normal((8, 3)) + 1j * RNG.standard_normal((8, 3))
    assert nmse(truth, truth) == 0.0
    assert nmse(np.zeros_like(truth), truth) == pytest.approx(1.0, rel=1e-12)
    assert nmse(2.0 * truth, truth) == pytest.approx(1.0, rel=1e-12)


def test_nmse_invariant_under_common_unitary_scalar():
    truth = RNG.standard_normal(16) + 1j * RNG.standard_normal(16)
    est = truth + 0.1 * (RNG.standard_normal(16) + 1j * RNG.standard_normal(16))
    rot = np.exp(1j * 0.9)
    assert nmse(est * rot, truth * rot) == pytest.approx(
        nmse(est, truth), rel=1e-12
    )


def test_nmse_validation():
    with pytest.raises(ValueError, match="shape"):
        nmse(np.ones(3), np.ones(4))
    with pytest.raises(ValueError, match="zero norm"):
        nmse(np.ones(3), np.zeros(3))


def test_rate_ratio():
    assert rate_ratio(2.0, 2.0) == 1.0
    assert rate_ratio(1.0, 2.0) == 0.5
    with pytest.raises(ValueError):
        rate_ratio(1.0, 0.0)
