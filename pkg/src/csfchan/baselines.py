"""Non-blind least-squares channel estimation baselines.

Both baselines know the transmitted probe and regress the received
signal on integer-symbol-shifted copies of it.  The Gaussian probe is
white at the sample rate (the classical optimum under white noise); the
chaotic probe is a shaped waveform whose information lives at the symbol
rate, so its frame is taken at symbol-instant samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, add_awgn, apply_multipath
from .waveform import CsfParams, Waveform, encode_waveform, random_symbols

__all__ = [
    "ProbeFrame",
    "LsEstimate",
    "ls_estimate",
    "gaussian_probe_frame",
    "chaotic_probe_frame",
]


@dataclass(frozen=True)
class ProbeFrame:
    """A known transmitted probe and the corresponding received frame."""

    probe: Waveform
    received: Waveform

    def __post_init__(self):
        if self.probe.samples_per_symbol != self.received.samples_per_symbol:
            raise ValueError("probe and received must share one sampling grid")
        if len(self.received) < len(self.probe):
            raise ValueError("received frame shorter than the probe")


@dataclass(frozen=True)
class LsEstimate:
    """Least-squares tap estimate.

    alpha_hat  raw taps alpha_0..alpha_M as solved
    degenerate True when the shifted-probe matrix was rank deficient
    """

    alpha_hat: np.ndarray
    degenerate: bool

    def relative_taps(self) -> np.ndarray:
        """Echo taps normalised by the solved main tap, for comparability
        with estimators that pin the main tap to 1."""
        return self.alpha_hat[1:] / self.alpha_hat[0]


def ls_estimate(frame: ProbeFrame, max_delay: int) -> LsEstimate:
    """Solve min || received - X alpha ||_2 over taps at delays 0..max_delay.

    X holds the probe shifted by whole symbol periods; the solve goes
    through numpy's QR-based lstsq rather than explicit normal equations.
    """
    ns = frame.probe.samples_per_symbol
    probe = frame.probe.samples
    n = len(probe)
    rows = n + max_delay * ns
    received = frame.received.samples
    if len(received) < rows:
        received = np.concatenate([received, np.zeros(rows - len(received))])
    else:
        received = received[:rows]
    design = np.zeros((rows, max_delay + 1))
    for k in range(max_delay + 1):
        design[k * ns : k * ns + n, k] = probe
    solution, _, rank, _ = np.linalg.lstsq(design, received, rcond=None)
    return LsEstimate(alpha_hat=solution, degenerate=bool(rank < max_delay + 1))


def gaussian_probe_frame(
    n_symbols: int,
    samples_per_symbol: int,
    ch: ChannelModel,
    snr_db: float | None,
    seed: int,
) -> ProbeFrame:
    """White Gaussian probe at the sample rate through the channel."""
    rng = np.random.default_rng(seed)
    probe = Waveform(rng.normal(size=n_symbols * samples_per_symbol), samples_per_symbol)
    received = apply_multipath(probe, ch)
    received, _ = add_awgn(received, snr_db, seed=seed + 1)
    return ProbeFrame(probe=probe, received=received)


def chaotic_probe_frame(
    n_symbols: int,
    params: CsfParams,
    ch: ChannelModel,
    snr_db: float | None,
    seed: int,
) -> ProbeFrame:
    """Known-symbol shaped probe, framed at symbol-instant samples.

    The full-rate shaped waveform rides through the channel and noise;
    probe and received are then decimated to one sample per symbol
    period, which is where the shaped probe carries its information.  At
    that rate an integer-symbol shift is a one-sample shift.
    """
    stream = random_symbols(n_symbols, seed=seed)
    probe_full = encode_waveform(stream, params)
    received_full = apply_multipath(probe_full, ch)
    received_full, _ = add_awgn(received_full, snr_db, seed=seed + 1)
    ns = params.oversampling
    probe = Waveform(probe_full.samples[::ns], 1, t0=probe_full.t0)
    received = Waveform(received_full.samples[::ns], 1, t0=received_full.t0)
    return ProbeFrame(probe=probe, received=received)
