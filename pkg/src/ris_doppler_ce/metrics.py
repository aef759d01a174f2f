"""Estimate-quality and link-quality metrics: passive beamforming from an
estimate, per-subcarrier achievable rate, and normalized squared error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LinkSet
from .config import dbm_to_milliwatts


@dataclass
class BeamPattern:
    """Unit-modulus reflection coefficients, one per sub-surface."""

    phi: np.ndarray

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=complex)


def strongest_tap_beam(h_ug_hat: np.ndarray, h_urg_hat: np.ndarray) -> BeamPattern:
    """Phase-align every cascade to the direct link at the dominant delay.

    The dominant delay l* maximizes |g_ug[l]| + sum_m |g_casc_m[l]| over the
    delay-domain responses; each coefficient then cancels the phase offset
    between cascade m and the direct link at l*.
    """
    g_ug = np.fft.ifft(np.asarray(h_ug_hat, dtype=complex))
    g_urg = np.fft.ifft(np.asarray(h_urg_hat, dtype=complex), axis=0)
    score = np.abs(g_ug) + np.abs(g_urg).sum(axis=1)
    l_star = int(np.argmax(score))
    if score[l_star] == 0.0:
        raise ValueError("all-zero channel estimate; no dominant delay")
    phi = np.exp(1j * (np.angle(g_ug[l_star]) - np.angle(g_urg[l_star, :])))
    return BeamPattern(phi=phi)


def rate_from_cfr(
    h_eff: np.ndarray, tx_power_dbm: float, noise_var_mw: float
) -> float:
    """Mean per-subcarrier rate log2(1 + (P/N)|h_n|^2 / noise_var) in
    bit/s/Hz, with total power split equally over the subcarriers."""
    h_eff = np.asarray(h_eff, dtype=complex)
    if noise_var_mw <= 0:
        raise ValueError("noise_var_mw must be positive")
    p_sc = dbm_to_milliwatts(tx_power_dbm) / h_eff.size
    snr = p_sc * np.abs(h_eff) ** 2 / noise_var_mw
    return float(np.mean(np.log2(1.0 + snr)))


def achievable_rate(
    links: LinkSet,
    beam: BeamPattern,
    tx_power_dbm: float,
    noise_var_mw: float,
) -> float:
    """Rate through the true channel state under the given coefficients."""
    h_eff = links.cascade_cfrs() @ beam.phi + links.direct_cfr()
    return rate_from_cfr(h_eff, tx_power_dbm, noise_var_mw)


def nmse(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Squared Frobenius error normalized by the truth's squared norm."""
    estimate = np.asarray(estimate)
    truth = np.asarray(truth)
    if estimate.shape != truth.shape:
        raise ValueError(
            f"shape mismatch: estimate {estimate.shape} vs truth {truth.shape}"
        )
    denom = float(np.sum(np.abs(truth) ** 2))
    if denom == 0.0:
        raise ValueError("truth has zero norm; nmse undefined")
    return float(np.sum(np.abs(estimate - truth) ** 2) / denom)


def rate_ratio(rate_est: float, rate_perfect: float) -> float:
    """Estimated-CSI rate as a fraction of the perfect-CSI rate."""
    if rate_perfect <= 0:
        raise ValueError("rate_perfect must be positive")
    return rate_est / rate_perfect
