"""Channel estimators for the superimposed training protocol.

Three multi-path estimators share the per-symbol least-squares front end
(divide the received pilot out per subcarrier):

* ``bm1_estimate`` inverts the training matrix directly and assumes the
  channel froze for the whole block (M+1 symbols).
* ``dsa_estimate`` spends one extra leading symbol that repeats the first
  training column, measures each significant delay tap's per-symbol phase
  step from the repeated pair, counter-rotates every symbol's taps to a
  common reference symbol q, and only then inverts (M+2 symbols).
* ``bm2_estimate`` is the same machinery restricted to the strongest delay
  tap only.

``single_path_estimate`` is the closed-form four-pilot scheme for the
single-dominant-path cascade over a square sub-surface grid: two repeated
pilots reveal the per-symbol rotation, and two more (adjacent grid row /
column) reveal the structured phase factors.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .signal import PilotSymbol, ReflectionMatrix, RxSymbol


@dataclass
class SuperimposedEstimates:
    """Per-symbol raw channel estimates, one column per training symbol.

    Column 0 is the extra leading symbol sharing the first training
    column; columns 1..M+1 are the standard block.
    """

    h_hat: np.ndarray

    def __post_init__(self):
        self.h_hat = np.asarray(self.h_hat, dtype=complex)
        if self.h_hat.ndim != 2:
            raise ValueError("h_hat must be (n_subcarriers, n_symbols)")

    @property
    def n_symbols(self) -> int:
        return self.h_hat.shape[1]


@dataclass
class PathSet:
    """Selected delay taps and (once measured) their per-symbol phase steps."""

    indices: np.ndarray
    delta_beta: np.ndarray | None = None

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=int)
        if self.indices.size == 0:
            raise ValueError("path set must be nonempty")
        if self.delta_beta is not None:
            self.delta_beta = np.asarray(self.delta_beta, dtype=float)
            if self.delta_beta.shape != self.indices.shape:
                raise ValueError("delta_beta must align with indices")


@dataclass
class EstimationResult:
    """Separated channel estimate at a reference symbol."""

    h_ug_hat: np.ndarray
    h_urg_hat: np.ndarray
    reference_symbol: int
    scheme: str
    symbols_used: int


@dataclass
class SinglePathEstimate:
    """Closed-form single-path estimate from four pilots."""

    a_hat: complex
    b_hat: complex
    delta_zeta: float
    a_common: np.ndarray  # common-gain estimate per pilot symbol index 0..3
    reference_symbol: int
    cascade_hat: np.ndarray
    symbols_used: int = 4


def per_symbol_cfr(rx: RxSymbol, pilot: PilotSymbol) -> np.ndarray:
    """Least-squares channel estimate for one symbol: y / x per subcarrier."""
    return rx.y * np.conj(pilot.x)


def _split(h_stack: np.ndarray, theta: ReflectionMatrix, q: int, scheme: str,
           symbols_used: int) -> EstimationResult:
    sep = h_stack @ theta.inverse()
    return EstimationResult(
        h_ug_hat=sep[:, 0],
        h_urg_hat=sep[:, 1:],
        reference_symbol=q,
        scheme=scheme,
        symbols_used=symbols_used,
    )


def bm1_estimate(h_hat_cols: np.ndarray, theta: ReflectionMatrix) -> EstimationResult:
    """Static-channel baseline: right-multiply the stacked per-symbol
    estimates (columns = symbols 1..M+1) by the training-matrix inverse."""
    h_hat_cols = np.asarray(h_hat_cols, dtype=complex)
    m = theta.m
    if h_hat_cols.ndim != 2 or h_hat_cols.shape[1] != m + 1:
        raise ValueError(
            f"expected (n_subcarriers, {m + 1}) estimates, got {h_hat_cols.shape}"
        )
    return _split(h_hat_cols, theta, q=1, scheme="bm1", symbols_used=m + 1)


def select_paths(g0: np.ndarray, threshold: float) -> PathSet:
    """Pick delay taps with |g0[k]| >= threshold * max |g0|.

    threshold 1.0 keeps only the strongest tap(s); values near 0 keep
    everything above the exact-zero floor.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    mag = np.abs(np.asarray(g0))
    peak = mag.max()
    if peak == 0.0:
        raise ValueError("cannot select paths from an all-zero response")
    return PathSet(indices=np.flatnonzero(mag >= threshold * peak))


def measure_delta_beta(g0: np.ndarray, g1: np.ndarray, pset: PathSet) -> PathSet:
    """Per-tap phase step between the two repeated-pattern symbols.

    delta_beta[k] = arg(g1[k]) - arg(g0[k]), wrapped to (-pi, pi].
    """
    g0 = np.asarray(g0)
    g1 = np.asarray(g1)
    sel0 = g0[pset.indices]
    sel1 = g1[pset.indices]
    if np.any(sel0 == 0) or np.any(sel1 == 0):
        raise ValueError("selected tap has zero amplitude; phase undefined")
    return PathSet(
        indices=pset.indices, delta_beta=np.angle(sel1 * np.conj(sel0))
    )


def adjust_superimposed_cirs(
    estimates: SuperimposedEstimates, pset: PathSet, q: int
) -> np.ndarray:
    """Counter-rotate the selected taps of symbols 1..M+1 to reference q.

    Tap k of symbol i is multiplied by exp(-1j*(i - q)*delta_beta[k]);
    column q is left untouched by construction.  Returns the adjusted
    frequency-domain columns, shape (N, M+1).
    """
    if pset.delta_beta is None:
        raise ValueError("path set has no measured delta_beta")
    n_sym = estimates.n_symbols
    if not 1 <= q <= n_sym - 1:
        raise ValueError(f"reference symbol {q} outside 1..{n_sym - 1}")
    g = np.fft.ifft(estimates.h_hat[:, 1:], axis=0)
    offsets = np.arange(1, n_sym) - q
    g[pset.indices, :] *= np.exp(
        -1j * np.outer(pset.delta_beta, offsets)
    )
    return np.fft.fft(g, axis=0)


def dsa_adjust(
    estimates: SuperimposedEstimates,
    pset: PathSet,
    q: int,
    theta: ReflectionMatrix,
) -> EstimationResult:
    """Doppler-adjusted estimate: counter-rotate, then invert the training
    matrix over the standard block (the extra symbol 0 is excluded)."""
    m = theta.m
    if estimates.n_symbols != m + 2:
        raise ValueError(
            f"expected {m + 2} symbol columns (extra leading symbol), "
            f"got {estimates.n_symbols}"
        )
    adjusted = adjust_superimposed_cirs(estimates, pset, q)
    return _split(adjusted, theta, q=q, scheme="proposed", symbols_used=m + 2)


def dsa_estimate(
    estimates: SuperimposedEstimates,
    theta: ReflectionMatrix,
    threshold: float,
    q: int = 1,
) -> EstimationResult:
    """Full multi-path pipeline: select taps on the extra symbol, measure
    the per-tap steps from the repeated pair, adjust, invert."""
    g0 = np.fft.ifft(estimates.h_hat[:, 0])
    g1 = np.fft.ifft(estimates.h_hat[:, 1])
    pset = measure_delta_beta(g0, g1, select_paths(g0, threshold))
    return dsa_adjust(estimates, pset, q, theta)


def bm2_estimate(
    estimates: SuperimposedEstimates, theta: ReflectionMatrix, q: int = 1
) -> EstimationResult:
    """Strongest-path-only variant: identical machinery at threshold 1."""
    res = dsa_estimate(estimates, theta, threshold=1.0, q=q)
    return replace(res, scheme="bm2")


def _circular_mean(angles: np.ndarray) -> float:
    return float(np.angle(np.mean(np.exp(1j * angles))))


def _combine(values: np.ndarray) -> complex:
    """Collapse per-subcarrier estimates of one complex quantity: arithmetic
    mean of magnitudes, circular mean of angles."""
    return float(np.mean(np.abs(values))) * np.exp(
        1j * _circular_mean(np.angle(values))
    )


def single_path_estimate(
    ys: list[RxSymbol],
    pilot: PilotSymbol,
    m_side: int,
    reference_symbol: int = 1,
    normalize: bool = False,
) -> SinglePathEstimate:
    """Closed-form cascade estimate from the four single-on pilots.

    Pilots 0 and 1 keep the corner sub-surface on and reveal the
    per-symbol rotation delta_zeta; pilots 2 and 3 switch to the adjacent
    grid row / column, and after backing the rotation out their ratios to
    pilot 1 give the structured factors a and b.  The cascade at the
    reference symbol is then A * a**u * b**v over the grid (row-major).

    normalize=True projects a_hat and b_hat onto the unit circle (their
    true moduli are 1); off by default.
    """
    if len(ys) != 4:
        raise ValueError(f"expected 4 pilot symbols, got {len(ys)}")
    y0, y1, y2, y3 = (np.asarray(r.y, dtype=complex) for r in ys)
    if np.any(y1 == 0):
        raise ValueError("pilot 1 has a zero sample; ratios undefined")
    a0 = y0 * np.conj(pilot.x)
    a1 = y1 * np.conj(pilot.x)
    if np.any(a0 == 0):
        raise ValueError("pilot 0 has a zero sample; rotation undefined")
    dz = _circular_mean(np.angle(a1 * np.conj(a0)))
    a_hat = _combine(np.exp(-1j * dz) * y2 / y1)
    b_hat = _combine(np.exp(-2j * dz) * y3 / y1)
    if normalize:
        a_hat = a_hat / abs(a_hat)
        b_hat = b_hat / abs(b_hat)
    a1_combined = _combine(a1)
    a_common = a1_combined * np.exp(1j * dz * (np.arange(4) - 1))
    big_a = a_common[reference_symbol]
    powers = np.arange(m_side)
    cascade = big_a * np.outer(a_hat**powers, b_hat**powers).reshape(-1)
    return SinglePathEstimate(
        a_hat=complex(a_hat),
        b_hat=complex(b_hat),
        delta_zeta=dz,
        a_common=a_common,
        reference_symbol=reference_symbol,
        cascade_hat=cascade,
    )
