"""Multipath channel with exponential attenuation law plus AWGN.

The channel is a sparse FIR at integer-symbol delays: the main path at
delay 0 with unit gain, and up to max_delay echo paths whose gains follow
exp(-gamma * delay).  Noise is white Gaussian with variance set from an
SNR measured against the noiseless received signal power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .waveform import Waveform

__all__ = [
    "ChannelModel",
    "NoiseSpec",
    "attenuation_from_delay",
    "apply_multipath",
    "add_awgn",
    "sample_random_channel",
]


@dataclass(frozen=True)
class ChannelModel:
    """Sparse multipath channel.

    paths      tuple of (delay in symbol periods, attenuation), strictly
               increasing delays starting at (0, 1.0)
    gamma      damping coefficient of the attenuation law
    max_delay  largest delay the receiver searches for (tap count - 1)
    """

    paths: tuple[tuple[int, float], ...]
    gamma: float
    max_delay: int

    def __post_init__(self):
        paths = tuple((int(d), float(a)) for d, a in self.paths)
        if not paths:
            raise ValueError("channel needs at least the main path")
        delays = [d for d, _ in paths]
        if delays[0] != 0:
            raise ValueError("main path must be at delay 0")
        if any(d2 <= d1 for d1, d2 in zip(delays, delays[1:])):
            raise ValueError("delays must be strictly increasing")
        if paths[0][1] != 1.0:
            raise ValueError("main-path attenuation must be 1")
        if any(a < 0.0 for _, a in paths):
            raise ValueError("attenuations must be nonnegative")
        if delays[-1] > self.max_delay:
            raise ValueError(f"delay {delays[-1]} exceeds max_delay {self.max_delay}")
        if len(paths) > self.max_delay + 1:
            raise ValueError("more paths than delay slots")
        object.__setattr__(self, "paths", paths)

    @property
    def delays(self) -> np.ndarray:
        return np.array([d for d, _ in self.paths], dtype=int)

    @property
    def attenuations(self) -> np.ndarray:
        return np.array([a for _, a in self.paths])

    def tap_vector(self) -> np.ndarray:
        """Dense echo-tap vector alpha_1..alpha_M (main path excluded)."""
        taps = np.zeros(self.max_delay)
        for d, a in self.paths:
            if d > 0:
                taps[d - 1] = a
        return taps


@dataclass(frozen=True)
class NoiseSpec:
    """Record of the noise actually injected by add_awgn."""

    snr_db: float
    sigma2: float
    seed: int


def attenuation_from_delay(gamma: float, tau: float) -> float:
    """Attenuation exp(-gamma * tau) of an echo delayed by tau."""
    if tau < 0:
        raise ValueError("delay must be nonnegative")
    if gamma <= 0:
        raise ValueError("damping coefficient must be positive")
    return math.exp(-gamma * tau)


def apply_multipath(wave: Waveform, ch: ChannelModel) -> Waveform:
    """Sum of delayed, attenuated copies; length grows by the largest delay."""
    ns = wave.samples_per_symbol
    dmax = int(ch.delays[-1])
    out = np.zeros(len(wave) + dmax * ns)
    for d, a in ch.paths:
        out[d * ns : d * ns + len(wave)] += a * wave.samples
    return Waveform(out, ns, t0=wave.t0)


def add_awgn(wave: Waveform, snr_db: float | None, seed: int) -> tuple[Waveform, NoiseSpec]:
    """Add white Gaussian noise at the given SNR.

    The noise variance is mean(wave**2) / 10**(snr_db/10), i.e. the SNR is
    referenced to the power of the waveform being corrupted.  snr_db of
    None or +inf disables noise.  Deterministic for a fixed seed, and the
    same seed yields the same underlying standard-normal draw at every
    SNR, so sweeping SNR with one seed varies only the noise scale.
    """
    if snr_db is None or math.isinf(snr_db):
        return wave, NoiseSpec(snr_db=math.inf, sigma2=0.0, seed=seed)
    power = float(np.mean(wave.samples**2))
    sigma2 = power / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noisy = wave.samples + rng.normal(0.0, math.sqrt(sigma2), size=len(wave))
    return (
        Waveform(noisy, wave.samples_per_symbol, t0=wave.t0),
        NoiseSpec(snr_db=float(snr_db), sigma2=sigma2, seed=seed),
    )


def sample_random_channel(
    max_delay: int,
    gamma_range: tuple[float, float] = (0.3, 0.9),
    path_count: int = 6,
    seed: int = 0,
) -> ChannelModel:
    """Draw a random channel: uniform gamma, distinct random echo delays.

    path_count counts the main path, so path_count - 1 echo delays are
    drawn without replacement from 1..max_delay and attenuated by the
    exponential law.
    """
    if path_count > max_delay + 1:
        raise ValueError("path_count exceeds available delay slots")
    if path_count < 1:
        raise ValueError("need at least the main path")
    rng = np.random.default_rng(seed)
    gamma = float(rng.uniform(*gamma_range))
    paths = [(0, 1.0)]
    if path_count > 1:
        delays = np.sort(rng.choice(np.arange(1, max_delay + 1), size=path_count - 1, replace=False))
        paths += [(int(d), attenuation_from_delay(gamma, float(d))) for d in delays]
    return ChannelModel(paths=tuple(paths), gamma=gamma, max_delay=max_delay)
