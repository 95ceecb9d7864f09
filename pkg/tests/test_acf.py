"""Empirical ACF estimation and receive-side ACF prediction tests."""

import math

import numpy as np
import pytest

from csfchan import (
    AcfEstimate,
    ChannelModel,
    CsfParams,
    Waveform,
    apply_multipath,
    empirical_acf,
    empirical_acf_trace,
    encode_waveform,
    predicted_rx_acf,
    predicted_rx_acf_trace,
    random_symbols,
    sample_random_channel,
    theoretical_acf,
)
from csfchan.experiments import interior_peak_lags

PARAMS = CsfParams()

FIG2_CHANNEL = ChannelModel(
    paths=((0, 1.0), (2, math.exp(-1.2)), (7, math.exp(-4.2))),
    gamma=0.6,
    max_delay=10,
)


def sampling_noise_std(ch: ChannelModel, n_symbols: int, lag: int, max_lag: int) -> float:
    """Std of the empirical received-ACF estimate at one integer lag.

    The dominant error term is the empirical symbol autocorrelation at
    shift d (std 1/sqrt(n_symbols)) leaking through the noiseless ACF
    shape G: e(k) = sum_{d != 0} rho_hat(d) G(|k-d|).
    """
    reach = 3 * max_lag
    g = predicted_rx_acf(ch, 0.0, PARAMS, max_lag=reach).values
    total = 0.0
    for d in range(-reach, reach + 1):
        if d == 0:
            continue
        u = abs(lag - d)
        if u <= reach:
            total += g[u] ** 2
    return math.sqrt(total / n_symbols)


def edge_bias(ch: ChannelModel, n_symbols: int, value: float) -> float:
    """Bias of the fixed-divisor estimate from the tail/delay padding."""
    extra = PARAMS.pulse_tail + int(ch.delays[-1])
    return abs(value) * extra / (n_symbols + extra)


class TestAcfEstimateInvariants:
    def test_lags_must_be_contiguous(self):
        with pytest.raises(ValueError):
            AcfEstimate(lags=np.array([0, 2]), values=np.zeros(2), n_samples=10)

    def test_values_must_be_finite(self):
        with pytest.raises(ValueError):
            AcfEstimate(lags=np.array([0, 1]), values=np.array([1.0, np.inf]), n_samples=10)


class TestEmpiricalAcf:
    def test_zero_waveform(self):
        est = empirical_acf(Waveform(np.zeros(16 * 20), 16), 10)
        assert np.all(est.values == 0.0)

    def test_quadratic_scaling(self):
        wave = encode_waveform(random_symbols(128, seed=3), PARAMS)
        scaled = Waveform(2.5 * wave.samples, wave.samples_per_symbol, wave.t0)
        a = empirical_acf(wave, 10).values
        b = empirical_acf(scaled, 10).values
        np.testing.assert_allclose(b, 2.5**2 * a, rtol=1e-12)

    def test_insufficient_samples_rejected(self):
        with pytest.raises(ValueError):
            empirical_acf(Waveform(np.ones(16 * 11), 16), 10)

    def test_single_path_matches_closed_form(self):
        # statistical agreement: the per-lag estimate fluctuates with std
        # about R(0)/sqrt(n_symbols), checked here at five sigma
        n_sym = 2**12
        wave = encode_waveform(random_symbols(n_sym, seed=21), PARAMS)
        est = empirical_acf(wave, 10)
        ref = theoretical_acf(np.arange(11.0), PARAMS)
        bound = 5.0 * ref[0] / math.sqrt(n_sym) + edge_bias(
            ChannelModel(paths=((0, 1.0),), gamma=0.5, max_delay=10), n_sym, ref[0]
        )
        assert float(np.max(np.abs(est.values - ref))) <= bound

    def test_trace_agrees_at_integer_lags(self):
        wave = encode_waveform(random_symbols(256, seed=14), PARAMS)
        grid, trace = empirical_acf_trace(wave, 5)
        est = empirical_acf(wave, 5)
        ns = wave.samples_per_symbol
        np.testing.assert_array_equal(trace[::ns], est.values)
        assert grid[ns] == 1.0


def brute_force_rx_acf(ch: ChannelModel, noise_var: float, max_lag: int) -> np.ndarray:
    """Independent oracle: raw double sum over ordered path pairs."""
    lags = np.arange(-(max_lag + int(ch.delays[-1])), max_lag + int(ch.delays[-1]) + 1)
    rxx = {int(k): float(theoretical_acf(float(k), PARAMS)) for k in lags}
    out = np.zeros(max_lag + 1)
    for k in range(max_lag + 1):
        total = 0.0
        for di, ai in ch.paths:
            for dj, aj in ch.paths:
                total += ai * aj * rxx[k - di + dj]
        out[k] = total
    out[0] += noise_var
    return out


class TestPredictedRxAcf:
    def test_single_path_reduces_to_pulse_acf(self):
        ch = ChannelModel(paths=((0, 1.0),), gamma=0.5, max_delay=10)
        pred = predicted_rx_acf(ch, 0.0, PARAMS, max_lag=10)
        np.testing.assert_allclose(pred.values, theoretical_acf(np.arange(11.0), PARAMS), rtol=1e-12)

    def test_matches_brute_force_double_sum(self):
        for seed in range(8):
            ch = sample_random_channel(max_delay=10, path_count=5, seed=seed)
            pred = predicted_rx_acf(ch, 0.3, PARAMS, max_lag=10)
            np.testing.assert_allclose(pred.values, brute_force_rx_acf(ch, 0.3, 10), rtol=1e-10)

    def test_noise_term_is_linear_and_lag0_only(self):
        base = predicted_rx_acf(FIG2_CHANNEL, 0.0, PARAMS, max_lag=10).values
        for nv in (0.1, 0.7, 2.0):
            noisy = predicted_rx_acf(FIG2_CHANNEL, nv, PARAMS, max_lag=10).values
            assert noisy[0] - base[0] == pytest.approx(nv, abs=1e-14)
            np.testing.assert_array_equal(noisy[1:], base[1:])

    def test_negative_noise_rejected(self):
        with pytest.raises(ValueError):
            predicted_rx_acf(FIG2_CHANNEL, -0.1, PARAMS, max_lag=10)

    def test_three_path_peak_lags(self):
        pred = predicted_rx_acf(FIG2_CHANNEL, 0.0, PARAMS, max_lag=10)
        assert interior_peak_lags(pred.values) == [2, 5, 7]

    def test_trace_hits_integer_values(self):
        grid, trace = predicted_rx_acf_trace(FIG2_CHANNEL, 0.25, PARAMS, max_lag=10)
        pred = predicted_rx_acf(FIG2_CHANNEL, 0.25, PARAMS, max_lag=10)
        ns = PARAMS.oversampling
        np.testing.assert_allclose(trace[::ns], pred.values, atol=1e-8)
        assert grid[-1] == 10.0


class TestSimulationConsistency:
    def test_received_acf_converges_to_prediction(self):
        # theorem-level check: measured ACF of a simulated noiseless frame
        # approaches the prediction; tolerance is a five-sigma sampling
        # bound computed per channel plus the finite-frame edge bias
        n_sym = 2**14
        for seed in (0, 1, 2):
            ch = sample_random_channel(max_delay=10, path_count=6, seed=seed)
            stream = random_symbols(n_sym, seed=1000 + seed)
            received = apply_multipath(encode_waveform(stream, PARAMS), ch)
            est = empirical_acf(received, 10)
            pred = predicted_rx_acf(ch, 0.0, PARAMS, max_lag=10)
            for k in range(11):
                bound = 5.0 * sampling_noise_std(ch, n_sym, k, 10) + edge_bias(
                    ch, n_sym, pred.values[k]
                ) + 1e-4
                assert abs(est.values[k] - pred.values[k]) <= bound, (seed, k)

    def test_symbol_independence_of_acf(self):
        # two different streams through the same channel: ACFs agree within
        # combined sampling noise, carrying no symbol information
        n_sym = 2**13
        ch = FIG2_CHANNEL
        acfs = []
        for seed in (5, 6):
            stream = random_symbols(n_sym, seed=seed)
            received = apply_multipath(encode_waveform(stream, PARAMS), ch)
            acfs.append(empirical_acf(received, 10).values)
        for k in range(11):
            bound = 5.0 * math.sqrt(2.0) * sampling_noise_std(ch, n_sym, k, 10) + 1e-4
            assert abs(acfs[0][k] - acfs[1][k]) <= bound
