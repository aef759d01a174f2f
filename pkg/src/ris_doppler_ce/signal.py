"""Pilot waveform, surface training patterns, and the received-symbol model.

The receive model is normalized to a unit-modulus pilot: y = x o h + w,
with h the superimposed frequency response (cascades weighted by the
surface coefficients plus the direct link) and w white complex Gaussian of
the supplied per-subcarrier variance.  Transmit power and processing gain
enter through that variance; the caller folds them in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import LinkSet


@dataclass
class PilotSymbol:
    """Frequency-domain pilot, one constant-modulus entry per subcarrier."""

    x: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=complex)


def zadoff_chu(n: int, root: int = 1) -> PilotSymbol:
    """Constant-modulus pilot sequence of length n.

    Parameters
    ----------
    n : int
        Sequence length.
    root : int
        Sequence root, coprime with n.

    Even n uses exp(-1j*pi*root*k^2/n), odd n exp(-1j*pi*root*k*(k+1)/n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if math.gcd(root, n) != 1:
        raise ValueError(f"root {root} is not coprime with n {n}")
    k = np.arange(n)
    if n % 2 == 0:
        phase = -math.pi * root * k * k / n
    else:
        phase = -math.pi * root * k * (k + 1) / n
    return PilotSymbol(x=np.exp(1j * phase))


@dataclass
class ReflectionMatrix:
    """(M+1) x (M+1) training matrix; entry (p, q) = exp(-2j*pi*p*q/(M+1)).

    Row 0 is the direct-link slot (all ones); column j is the coefficient
    assignment for one training symbol, so column 0 keeps every sub-surface
    at +1.
    """

    theta: np.ndarray

    @property
    def m(self) -> int:
        return self.theta.shape[0] - 1

    def inverse(self) -> np.ndarray:
        # unitary up to scale: theta @ theta^H = (M+1) I
        return self.theta.conj().T / (self.m + 1)

    def phi_column(self, j: int) -> np.ndarray:
        """Sub-surface coefficients (length M) for training column j."""
        return self.theta[1:, j]


def dft_reflection_pattern(m: int) -> ReflectionMatrix:
    """Build the size-(M+1) training matrix for M sub-surfaces."""
    if m < 1:
        raise ValueError("m must be >= 1")
    p = np.arange(m + 1)
    theta = np.exp(-2j * math.pi * np.outer(p, p) / (m + 1))
    return ReflectionMatrix(theta=theta)


def single_on_pattern(m: int, on_index: int | None) -> np.ndarray:
    """Coefficient vector with one sub-surface at +1 and the rest off.

    on_index None turns every sub-surface off.
    """
    phi = np.zeros(m, dtype=complex)
    if on_index is not None:
        if not 0 <= on_index < m:
            raise ValueError(f"on_index {on_index} outside 0..{m - 1}")
        phi[on_index] = 1.0
    return phi


@dataclass
class RxSymbol:
    """One received pilot symbol and the coefficients that produced it."""

    y: np.ndarray
    symbol_index: int
    pattern_used: np.ndarray


def awgn(n: int, noise_var: float, rng: np.random.Generator) -> np.ndarray:
    """n samples of circularly-symmetric complex Gaussian noise of the
    given variance; exactly zero (and no rng draw) for noise_var 0."""
    if noise_var < 0:
        raise ValueError("noise_var must be >= 0")
    if noise_var == 0:
        return np.zeros(n, dtype=complex)
    return math.sqrt(noise_var / 2.0) * (
        rng.standard_normal(n) + 1j * rng.standard_normal(n)
    )


def receive_symbol(
    links: LinkSet,
    phi: np.ndarray,
    pilot: PilotSymbol,
    noise_var: float,
    rng: np.random.Generator,
    symbol_index: int = 0,
) -> RxSymbol:
    """Receive one pilot symbol through the current channel state.

    y = x o (H_casc @ phi + h_direct) + w, with w circularly-symmetric
    complex Gaussian of per-subcarrier variance noise_var.
    """
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (links.n_subsurfaces,):
        raise ValueError(
            f"phi must have one coefficient per sub-surface, got shape {phi.shape}"
        )
    h = links.cascade_cfrs() @ phi + links.direct_cfr()
    y = pilot.x * h + awgn(h.size, noise_var, rng)
    return RxSymbol(y=y, symbol_index=symbol_index, pattern_used=phi)
