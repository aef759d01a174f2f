"""Channel synthesis, Doppler evolution, and transform tests."""

import math
from dataclasses import replace

import numpy as np
import pytest

from ris_doppler_ce.channel import (
    Cir,
    LinkSet,
    SinglePathChannel,
    _training_condition,
    cfr_to_cir,
    cir_to_cfr,
    doppler_evolve,
    draw_linkset,
    dump_cir,
    evolve_ue_motion,
    gen_single_path,
    gen_tdl_cir,
    link_budget_db,
    load_cir,
    pathloss_db,
    single_path_cascade,
    subsurface_aperture_gain_db,
)
from ris_doppler_ce.config import paper_preset

RNG = np.random.default_rng(20240817)


def rand_cir(l_taps=6, n_fft=192):
    taps = RNG.standard_normal(l_taps) + 1j * RNG.standard_normal(l_taps)
    angles = RNG.uniform(0.0, 2.0 * math.pi, l_taps)
    return Cir(taps=taps, doppler_angles=angles, n_fft=n_fft)


def test_pathloss_reference_value():
    # free-space loss at 1 m for 28 GHz, recomputed from first principles
    lam = 299792458.0 / 28e9
    fspl = 20.0 * math.log10(4.0 * math.pi * 1.0 / lam)
    assert pathloss_db(1.0, 3.5, 28e9) == pytest.approx(fspl, abs=1e-9)
    assert pathloss_db(1.0, 2.0, 28e9) == pytest.approx(61.385, abs=1e-2)
    # distance term adds 10 * ple * log10(d)
    assert pathloss_db(100.0, 2.0, 28e9) - pathloss_db(1.0, 2.0, 28e9) == (
        pytest.approx(40.0, abs=1e-9)
    )


def test_pathloss_rejects_nonpositive_distance():
    with pytest.raises(ValueError):
        pathloss_db(0.0, 2.0, 28e9)


def test_gen_tdl_cir_dominant_tap_power_exact():
    cir = gen_tdl_cir(6, 0.1, 80.0, 192, np.random.default_rng(3))
    total = 10.0 ** (-80.0 / 10.0)
    assert abs(cir.taps[0]) ** 2 == pytest.approx(total / 1.1, rel=1e-12)


def test_gen_tdl_cir_power_budget_monte_carlo():
    # tail power / dominant power converges to eta
    rng = np.random.default_rng(7)
    eta = 0.1
    p0 = tails = 0.0
    for _ in range(4000):
        cir = gen_tdl_cir(6, eta, 0.0, 192, rng)
        p0 += abs(cir.taps[0]) ** 2
        tails += float(np.sum(np.abs(cir.taps[1:]) ** 2))
    assert tails / p0 == pytest.approx(eta, rel=0.05)


def test_gen_tdl_cir_dominant_tap_strongest_on_average():
    rng = np.random.default_rng(11)
    power = np.zeros(6)
    for _ in range(2000):
        cir = gen_tdl_cir(6, 1.0, 0.0, 192, rng)
        power += np.abs(cir.taps) ** 2
    assert np.argmax(power) == 0
    assert np.all(power[0] > power[1:])


def test_gen_tdl_cir_single_tap_rules():
    cir = gen_tdl_cir(1, 0.0, 60.0, 192, np.random.default_rng(5))
    assert cir.taps.shape == (1,)
    with pytest.raises(ValueError):
        gen_tdl_cir(1, 0.5, 60.0, 192, np.random.default_rng(5))
    with pytest.raises(ValueError):
        gen_tdl_cir(0, 0.0, 60.0, 192, np.random.default_rng(5))


def test_gen_tdl_cir_shared_draws():
    angles = np.linspace(0.0, 1.0, 6)
    cir = gen_tdl_cir(
        6, 0.1, 70.0, 192, np.random.default_rng(9), doppler_angles=angles,
        dominant_phase=0.25,
    )
    assert np.allclose(cir.doppler_angles, angles)
    assert np.angle(cir.taps[0]) == pytest.approx(0.25, abs=1e-12)


def test_cir_validation():
    with pytest.raises(ValueError):
        Cir(taps=np.ones(3), doppler_angles=np.zeros(2), n_fft=8)
    with pytest.raises(ValueError):
        Cir(taps=np.ones(9), doppler_angles=np.zeros(9), n_fft=8)
    with pytest.raises(ValueError):
        Cir(taps=np.ones(0), doppler_angles=np.zeros(0), n_fft=8)


def test_doppler_evolve_forward_backward_identity():
    cir = rand_cir()
    lam = 0.0107
    there = doppler_evolve(cir, 10.0, 3.61e-5, lam)
    back = doppler_evolve(there, 10.0, -3.61e-5, lam)
    assert np.max(np.abs(back.taps - cir.taps)) <= 1e-12


def test_doppler_evolve_phase_formula():
    # independently recomputed per-tap rotation 2*pi*v*dt*cos(angle)/lambda
    taps = np.array([1.0 + 0.0j, 0.5j])
    angles = np.array([0.0, 1.2])
    cir = Cir(taps=taps, doppler_angles=angles, n_fft=16)
    v, dt, lam = 10.0, 3.6111e-5, 0.0107068735
    out = doppler_evolve(cir, v, dt, lam)
    expected = taps * np.exp(1j * 2.0 * math.pi * v * dt * np.cos(angles) / lam)
    assert np.max(np.abs(out.taps - expected)) <= 1e-15
    # the published setup advances the aligned tap ~0.212 rad per symbol
    step = 2.0 * math.pi * v * dt / lam
    assert step == pytest.approx(0.212, abs=2e-3)


def test_doppler_evolve_preserves_magnitude_and_angles():
    cir = rand_cir()
    out = doppler_evolve(cir, 31.0, 1e-4, 0.0107)
    assert np.allclose(np.abs(out.taps), np.abs(cir.taps), rtol=1e-14)
    assert np.array_equal(out.doppler_angles, cir.doppler_angles)


def test_cfr_round_trip():
    cir = rand_cir()
    cfr = cir_to_cfr(cir)
    taps_back = cfr_to_cir(cfr)
    assert np.max(np.abs(taps_back[:6] - cir.taps)) <= 1e-12
    assert np.max(np.abs(taps_back[6:])) <= 1e-12


def test_cfr_matches_dft_definition():
    cir = rand_cir(l_taps=4, n_fft=32)
    n = np.arange(32)
    expected = sum(
        cir.taps[k] * np.exp(-2j * math.pi * n * k / 32) for k in range(4)
    )
    assert np.max(np.abs(cir_to_cfr(cir) - expected)) <= 1e-12


def test_parseval():
    cir = rand_cir()
    cfr = cir_to_cfr(cir)
    lhs = float(np.sum(np.abs(cfr) ** 2)) / cir.n_fft
    rhs = float(np.sum(np.abs(cir.taps) ** 2))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_linkset_cascade_columns_exact():
    cfg = paper_preset()
    links = draw_linkset(cfg, np.random.default_rng(2))
    casc = links.cascade_cfrs()
    assert casc.shape == (192, 16)
    for m in range(links.n_subsurfaces):
        ref = cir_to_cfr(links.h_ur[m]) * cir_to_cfr(links.h_rg[m])
        assert np.array_equal(casc[:, m], ref)


def test_linkset_mismatched_lists_rejected():
    c = rand_cir()
    with pytest.raises(ValueError):
        LinkSet(h_ug=c, h_ur=[c, c], h_rg=[c])


def test_draw_linkset_shared_ue_side_angles():
    cfg = paper_preset()
    links = draw_linkset(cfg, np.random.default_rng(4))
    base = links.h_ur[0].doppler_angles
    for c in links.h_ur[1:]:
        assert np.array_equal(c.doppler_angles, base)
    # direct link keeps its own geometry
    assert not np.array_equal(links.h_ug.doppler_angles, base)


def test_draw_linkset_training_condition_enforced():
    cfg = paper_preset()
    rng = np.random.default_rng(6)
    for _ in range(40):
        links = draw_linkset(cfg, rng)
        assert _training_condition(links.h_ug, links.h_ur, links.h_rg) >= 0.35


def test_draw_linkset_link_scales():
    cfg = paper_preset()
    pl_ug, pl_ur, pl_rg = link_budget_db(cfg)
    links = draw_linkset(cfg, np.random.default_rng(8))
    assert abs(links.h_ug.taps[0]) ** 2 == pytest.approx(
        10.0 ** (-pl_ug / 10.0) / 1.1, rel=1e-12
    )
    assert abs(links.h_ur[0].taps[0]) ** 2 == pytest.approx(
        10.0 ** (-pl_ur / 10.0) / 1.1, rel=1e-12
    )


def test_evolve_ue_motion_only_moves_ue_side():
    cfg = paper_preset()
    links = draw_linkset(cfg, np.random.default_rng(10))
    out = evolve_ue_motion(links, 10.0, 3.61e-5, 0.0107)
    # taps are tiny after path loss, so compare angles rather than values
    assert np.max(np.abs(np.angle(out.h_ug.taps / links.h_ug.taps))) > 1e-4
    for before, after in zip(links.h_ur, out.h_ur):
        assert np.max(np.abs(np.angle(after.taps / before.taps))) > 1e-4
    for before, after in zip(links.h_rg, out.h_rg):
        assert after is before


def test_aperture_gain_value():
    assert subsurface_aperture_gain_db(576, 16) == pytest.approx(
        20.0 * math.log10(36.0), rel=1e-12
    )


def test_single_path_cascade_unit_modulus_factors():
    rng = np.random.default_rng(12)
    for _ in range(25):
        ch = SinglePathChannel(
            alpha0=complex(rng.standard_normal(), rng.standard_normal()),
            rho0=complex(rng.standard_normal(), rng.standard_normal()),
            aoa_az=rng.uniform(0, 2 * math.pi),
            aoa_el=rng.uniform(0, 2 * math.pi),
            aod_az=rng.uniform(0, 2 * math.pi),
            aod_el=rng.uniform(0, 2 * math.pi),
            d_spacing=0.016,
            m_side=4,
        )
        _, a, b, vec = single_path_cascade(ch, 0.0107)
        assert abs(abs(a) - 1.0) <= 1e-12
        assert abs(abs(b) - 1.0) <= 1e-12
        assert vec.shape == (16,)


def test_single_path_cascade_matched_angles_collapse():
    # equal arrival and departure angles cancel both phase gradients
    ch = SinglePathChannel(
        alpha0=1.0 + 0.0j,
        rho0=2.0 + 0.0j,
        aoa_az=0.7,
        aoa_el=1.1,
        aod_az=0.7,
        aod_el=1.1,
        d_spacing=0.016,
        m_side=3,
    )
    big_a, a, b, vec = single_path_cascade(ch, 0.0107)
    assert a == pytest.approx(1.0)
    assert b == pytest.approx(1.0)
    assert np.allclose(vec, big_a)


def test_single_path_cascade_quarter_wave_quadrature():
    # spacing lambda/4 with unit angle difference gives a = exp(j*pi/2)
    lam = 0.0107
    ch = SinglePathChannel(
        alpha0=1.0,
        rho0=1.0,
        aoa_az=math.pi / 2,
        aoa_el=math.pi / 2,
        aod_az=0.0,
        aod_el=math.pi / 2,
        d_spacing=lam / 4.0,
        m_side=2,
    )
    _, a, _, _ = single_path_cascade(ch, lam)
    assert a == pytest.approx(np.exp(1j * math.pi / 2), abs=1e-12)


def test_single_path_cascade_outer_structure():
    rng = np.random.default_rng(13)
    ch = SinglePathChannel(
        alpha0=complex(rng.standard_normal(), rng.standard_normal()),
        rho0=complex(rng.standard_normal(), rng.standard_normal()),
        aoa_az=0.3,
        aoa_el=2.0,
        aod_az=1.7,
        aod_el=0.4,
        d_spacing=0.016,
        m_side=4,
    )
    big_a, a, b, vec = single_path_cascade(ch, 0.0107)
    for u in range(4):
        for v in range(4):
            assert vec[u * 4 + v] == pytest.approx(big_a * a**u * b**v, rel=1e-12)


def test_gen_single_path_grid_rules():
    cfg = paper_preset()
    ch, big_a, a, b, vec = gen_single_path(cfg, np.random.default_rng(14))
    assert ch.m_side == 4
    assert vec.shape == (16,)
    assert ch.d_spacing == pytest.approx((0.0107068735 / 4.0) * 6.0, rel=1e-4)
    with pytest.raises(ValueError, match="square"):
        gen_single_path(replace(cfg, n_subsurfaces=8), np.random.default_rng(1))
    with pytest.raises(ValueError, match="tile"):
        gen_single_path(replace(cfg, n_subsurfaces=25), np.random.default_rng(1))


def test_cir_dump_round_trip(tmp_path):
    cir = rand_cir()
    path = str(tmp_path / "case.cir")
    dump_cir(cir, path)
    back = load_cir(path)
    assert back.n_fft == cir.n_fft
    assert np.array_equal(back.taps, cir.taps)
    assert np.array_equal(back.doppler_angles, cir.doppler_angles)


def test_load_cir_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.cir"
    p.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="empty"):
        load_cir(str(p))
    p.write_text("192 2\n1 0 0\n", encoding="utf-8")
    with pytest.raises(ValueError, match="expected 2"):
        load_cir(str(p))
