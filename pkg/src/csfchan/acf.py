"""Autocorrelation estimation and the receive-side ACF prediction.

empirical_acf measures the time-averaged autocorrelation of a sampled
waveform on the integer-lag grid; predicted_rx_acf evaluates what that
estimate converges to for a multipath channel, from the known transmit
ACF and the channel taps alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel
from .waveform import CsfParams, Waveform, authoritative_acf_table, pulse_acf

__all__ = [
    "AcfEstimate",
    "empirical_acf",
    "empirical_acf_trace",
    "predicted_rx_acf",
    "predicted_rx_acf_trace",
]


@dataclass(frozen=True)
class AcfEstimate:
    """ACF values on the contiguous integer-lag grid 0..max_lag."""

    lags: np.ndarray
    values: np.ndarray
    n_samples: int

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=int)
        values = np.asarray(self.values, dtype=float)
        if lags.ndim != 1 or values.shape != lags.shape:
            raise ValueError("lags and values must be matching 1-d arrays")
        if lags[0] != 0 or np.any(np.diff(lags) != 1):
            raise ValueError("lags must be contiguous from 0")
        if not np.all(np.isfinite(values)):
            raise ValueError("ACF values must be finite")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", values)

    @property
    def max_lag(self) -> int:
        return int(self.lags[-1])


def empirical_acf(wave: Waveform, max_lag: int) -> AcfEstimate:
    """Biased time-averaged ACF at integer lags 0..max_lag.

    values[k] = (1/N) * sum_n x[n + k*Ns] x[n] with N the total sample
    count (fixed divisor, so the estimate is biased but low-variance).
    With one time unit per symbol period this estimates the per-unit-time
    autocorrelation, directly comparable to the pulse ACF.
    """
    ns = wave.samples_per_symbol
    x = wave.samples
    n = len(x)
    if n <= (max_lag + 1) * ns:
        raise ValueError(f"waveform too short for max_lag={max_lag}: {n} samples")
    values = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        shift = k * ns
        values[k] = np.dot(x[shift:], x[: n - shift]) / n
    return AcfEstimate(lags=np.arange(max_lag + 1), values=values, n_samples=n)


def empirical_acf_trace(wave: Waveform, max_lag: int) -> tuple[np.ndarray, np.ndarray]:
    """ACF at every sample lag 0..max_lag*Ns (fractional-lag plot trace)."""
    ns = wave.samples_per_symbol
    x = wave.samples
    n = len(x)
    if n <= (max_lag + 1) * ns:
        raise ValueError(f"waveform too short for max_lag={max_lag}: {n} samples")
    n_pts = max_lag * ns + 1
    vals = np.array([np.dot(x[j:], x[: n - j]) / n for j in range(n_pts)])
    return np.arange(n_pts) / ns, vals


def predicted_rx_acf(
    ch: ChannelModel,
    noise_var: float,
    params: CsfParams = CsfParams(),
    max_lag: int | None = None,
) -> AcfEstimate:
    """Receive-side ACF at integer lags implied by the channel taps.

    Sums, per lag eta: (i) the transmit ACF scaled by the total tap power,
    (ii) the noise variance at lag 0 only, (iii) main-path cross terms at
    eta +- delay, and (iv) echo-pair cross terms at eta + delay
    differences.  The transmit ACF is extended evenly to negative lags.
    """
    if noise_var < 0:
        raise ValueError("noise variance must be nonnegative")
    m = ch.max_delay if max_lag is None else int(max_lag)
    table = authoritative_acf_table(params, max_lag=m + int(ch.delays[-1]))

    def rxx(arg: int) -> float:
        return table[abs(arg)]

    alphas = ch.attenuations
    values = np.empty(m + 1)
    for k in range(m + 1):
        total = float(np.sum(alphas**2)) * rxx(k)
        for d, a in ch.paths[1:]:
            # main-path cross terms; the main tap is 1 by construction
            total += a * (rxx(k + d) + rxx(k - d))
        for i, (di, ai) in enumerate(ch.paths[1:], start=1):
            for j, (dj, aj) in enumerate(ch.paths[1:], start=1):
                if i != j:
                    total += ai * aj * rxx(k + di - dj)
        values[k] = total
    values[0] += noise_var
    return AcfEstimate(lags=np.arange(m + 1), values=values, n_samples=0)


def predicted_rx_acf_trace(
    ch: ChannelModel,
    noise_var: float,
    params: CsfParams = CsfParams(),
    max_lag: int = 10,
    oversampling: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Receive-side ACF on the fractional-lag grid.

    Same expansion as predicted_rx_acf but evaluated with the numerically
    integrated pulse ACF, which is the valid route off the integer grid.
    The white-noise term contributes only at exactly lag 0.
    """
    ns = params.oversampling if oversampling is None else int(oversampling)
    grid = np.arange(max_lag * ns + 1) / ns
    dmax = int(ch.delays[-1])
    # pulse ACF sampled once on the widest grid needed, then indexed
    full = pulse_acf(np.arange((max_lag + dmax) * ns + 1) / ns, params)

    def rxx_at(offsets: np.ndarray) -> np.ndarray:
        idx = np.rint(np.abs(offsets) * ns).astype(int)
        return full[idx]

    out = np.zeros_like(grid)
    for di, ai in ch.paths:
        for dj, aj in ch.paths:
            out += ai * aj * rxx_at(grid - di + dj)
    out[0] += noise_var
    return grid, out
