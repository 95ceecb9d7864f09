"""Deterministic simulation experiments.

Four runnable experiments: the three-path ACF demonstration, the
MSE-vs-data-length sweep, the MSE-vs-SNR method comparison, and the
ACF-invariance demonstration.  Every experiment is a pure function of a
resolved configuration dict; per-trial randomness derives from the base
seed through a splitmix64 chain, so trials are independent,
parallel-safe, and reproducible regardless of the worker count.

Variance-reduction conventions baked into the sweeps: the same channel
suite is reused across sweep points and across methods, and SNR sweeps
reuse one noise draw per trial scaled to each SNR (common random
numbers), so curves differ only where the methods and operating points
genuinely differ.
"""

from __future__ import annotations

import copy
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .acf import empirical_acf, empirical_acf_trace, predicted_rx_acf, predicted_rx_acf_trace
from .baselines import chaotic_probe_frame, gaussian_probe_frame, ls_estimate
from .channel import ChannelModel, add_awgn, apply_multipath, attenuation_from_delay, sample_random_channel
from .estimator import EstimationResult, IdentificationProblem, SolverOptions, mse, solve_channel
from .waveform import CsfParams, Waveform, authoritative_acf_table, encode_waveform, random_symbols

__all__ = [
    "DEFAULT_CONFIG",
    "ExperimentResult",
    "derive_seed",
    "resolve_config",
    "identify_blind",
    "interior_peak_lags",
    "expected_secondary_peaks",
    "run_fig2",
    "run_datalength_sweep",
    "run_snr_sweep",
    "run_invariance_demo",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(state: int) -> int:
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *indices: int) -> int:
    """Derive an independent child seed from a base seed and index path."""
    state = base_seed & _MASK64
    for ix in indices:
        state = _splitmix64(state ^ _splitmix64(ix & _MASK64))
    return state


DEFAULT_CONFIG: dict = {
    "experiment": "fig2",
    "seed": 1,
    "trials": 20,
    "threads": 1,
    "out": "results",
    "csf": {
        "beta": float(np.log(2.0)),
        "oversampling": 16,
    },
    "fig2": {
        "delays": [0, 2, 7],
        "gamma": 0.6,
        "max_delay": 10,
        "symbols": 65536,
        "snr_db": None,
        "agreement_tol": 0.03,
    },
    "sweep_length": {
        "lengths": [1024, 2048, 4096, 8192, 16384, 32768, 65536],
        "snr_db": 10.0,
        "path_count": 6,
        "max_delay": 10,
        "gamma_range": [0.3, 0.9],
    },
    "sweep_snr": {
        "snr_db_list": [0.0, 5.0, 10.0, 15.0, 20.0],
        "symbols": 1024,
        "path_count": 6,
        "max_delay": 10,
        "gamma_range": [0.3, 0.9],
        "methods": ["blind_acf", "ls_gaussian", "ls_chaos"],
    },
    "invariance": {
        "streams": 10,
        "symbols": 4096,
        "max_lag": 10,
        "include_all_ones": False,
    },
}


def resolve_config(user: dict | None = None) -> dict:
    """Deep-merge a user configuration over the defaults."""
    resolved = copy.deepcopy(DEFAULT_CONFIG)
    if user:
        _merge(resolved, user)
    return resolved


def _merge(base: dict, extra: dict) -> None:
    for key, value in extra.items():
        if key not in base:
            raise KeyError(f"unknown config key: {key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise TypeError(f"config section {key!r} must be a mapping")
            _merge(base[key], value)
        else:
            base[key] = value


@dataclass
class ExperimentResult:
    """Table plus summary emitted by one experiment run."""

    name: str
    columns: list
    rows: list
    summary: dict
    passed: bool = True


def _csf_params(cfg: dict) -> CsfParams:
    return CsfParams(beta=cfg["csf"]["beta"], oversampling=cfg["csf"]["oversampling"])


def identify_blind(received: Waveform, params: CsfParams, max_delay: int) -> EstimationResult:
    """Full blind pipeline: measured ACF -> lag equations -> solved taps."""
    measured = empirical_acf(received, max_delay)
    table = authoritative_acf_table(params, max_lag=2 * max_delay)
    prob = IdentificationProblem(r_rr=measured, r_xx=table, max_delay=max_delay)
    # empirical inputs never reach machine-precision residuals
    opts = SolverOptions(tol=1e-6 * table[0], max_iter=100)
    return solve_channel(prob, opts)


def interior_peak_lags(values: np.ndarray) -> list[int]:
    """Strict local maxima over interior integer lags 1..len-2."""
    peaks = []
    for k in range(1, len(values) - 1):
        if values[k] > values[k - 1] and values[k] > values[k + 1]:
            peaks.append(k)
    return peaks


def expected_secondary_peaks(ch: ChannelModel) -> set[int]:
    """Echo delays plus pairwise delay differences: where ACF bumps sit."""
    delays = [d for d, _ in ch.paths]
    out = set(d for d in delays if d > 0)
    for i, di in enumerate(delays):
        for dj in delays[:i]:
            if di != dj:
                out.add(abs(di - dj))
    return out


# ---------------------------------------------------------------------------
# three-path ACF demonstration
# ---------------------------------------------------------------------------

def run_fig2(cfg: dict) -> ExperimentResult:
    """Simulate the fixed three-path channel and compare measured vs
    predicted receive ACF, checking the secondary-peak locations."""
    params = _csf_params(cfg)
    section = cfg["fig2"]
    gamma = float(section["gamma"])
    delays = [int(d) for d in section["delays"]]
    paths = tuple((d, attenuation_from_delay(gamma, d) if d > 0 else 1.0) for d in delays)
    ch = ChannelModel(paths=paths, gamma=gamma, max_delay=int(section["max_delay"]))
    max_lag = int(section["max_delay"])
    snr_db = section["snr_db"]

    stream = random_symbols(int(section["symbols"]), seed=derive_seed(cfg["seed"], 1))
    received = apply_multipath(encode_waveform(stream, params), ch)
    received, noise = add_awgn(received, snr_db, seed=derive_seed(cfg["seed"], 2))

    grid, emp_trace = empirical_acf_trace(received, max_lag)
    _, pred_trace = predicted_rx_acf_trace(ch, noise.sigma2, params, max_lag)
    emp_int = empirical_acf(received, max_lag)
    pred_int = predicted_rx_acf(ch, noise.sigma2, params, max_lag)

    predicted_peaks = interior_peak_lags(pred_int.values)
    empirical_peaks = interior_peak_lags(emp_int.values)
    expected = sorted(expected_secondary_peaks(ch))
    agreement = float(np.max(np.abs(emp_int.values - pred_int.values)))

    # the two dominant echoes must stand out even in the measured ACF; the
    # delay-difference bump is below the sampling noise at this frame length
    strong = {d for d, a in ch.paths[1:]}
    peaks_ok = predicted_peaks == expected
    strong_ok = strong.issubset(set(empirical_peaks))
    agreement_ok = agreement <= float(section["agreement_tol"])

    rows = [(float(g), float(e), float(p)) for g, e, p in zip(grid, emp_trace, pred_trace)]
    summary = {
        "channel_delays": [int(d) for d, _ in ch.paths],
        "channel_attenuations": [float(a) for _, a in ch.paths],
        "expected_peak_lags": expected,
        "predicted_peak_lags": predicted_peaks,
        "empirical_peak_lags": empirical_peaks,
        "max_abs_disagreement": agreement,
        "agreement_tol": float(section["agreement_tol"]),
        "noise_sigma2": noise.sigma2,
        "checks": {
            "predicted_peaks_match": peaks_ok,
            "strong_echoes_in_empirical": strong_ok,
            "integer_lag_agreement": agreement_ok,
        },
    }
    return ExperimentResult(
        name="fig2",
        columns=["lag", "empirical_acf", "predicted_acf"],
        rows=rows,
        summary=summary,
        passed=bool(peaks_ok and strong_ok and agreement_ok),
    )


# ---------------------------------------------------------------------------
# MSE vs data length
# ---------------------------------------------------------------------------

def _length_trial(args: tuple) -> list[tuple[int, float, bool]]:
    """One trial of the length sweep: same channel at every length."""
    cfg, trial = args
    params = _csf_params(cfg)
    section = cfg["sweep_length"]
    m = int(section["max_delay"])
    ch = sample_random_channel(
        max_delay=m,
        gamma_range=tuple(section["gamma_range"]),
        path_count=int(section["path_count"]),
        seed=derive_seed(cfg["seed"], trial, 0),
    )
    truth = ch.tap_vector()
    out = []
    for li, n_sym in enumerate(section["lengths"]):
        stream = random_symbols(int(n_sym), seed=derive_seed(cfg["seed"], trial, 1, li))
        received = apply_multipath(encode_waveform(stream, params), ch)
        received, _ = add_awgn(received, float(section["snr_db"]), seed=derive_seed(cfg["seed"], trial, 2, li))
        result = identify_blind(received, params, m)
        err = float(np.sum((result.alpha_hat - truth) ** 2))
        out.append((int(n_sym), err, result.converged))
    return out


def run_datalength_sweep(cfg: dict) -> ExperimentResult:
    section = cfg["sweep_length"]
    trials = int(cfg["trials"])
    per_trial = _fan_out(_length_trial, cfg, trials)

    path_count = int(section["path_count"])
    ns = int(cfg["csf"]["oversampling"])
    rows = []
    mses = {}
    for li, n_sym in enumerate(section["lengths"]):
        errs = [per_trial[t][li][1] for t in range(trials)]
        conv = [per_trial[t][li][2] for t in range(trials)]
        mse_val = float(np.mean(errs)) / path_count
        mses[int(n_sym)] = mse_val
        rows.append(
            (
                int(n_sym),
                int(n_sym) * ns,
                trials,
                mse_val,
                float(np.mean(conv)),
            )
        )
    summary = {
        "snr_db": float(section["snr_db"]),
        "path_count": path_count,
        "mse_by_symbols": {str(k): v for k, v in mses.items()},
    }
    return ExperimentResult(
        name="sweep_length",
        columns=["n_symbols", "n_samples", "trials", "mse", "converged_rate"],
        rows=rows,
        summary=summary,
    )


# ---------------------------------------------------------------------------
# MSE vs SNR, method comparison
# ---------------------------------------------------------------------------

def _snr_trial(args: tuple) -> dict[tuple[float, str], tuple[float, bool]]:
    """One trial of the SNR sweep.

    One channel and one symbol stream serve every method and SNR point;
    per-method noise seeds are fixed across SNR so only the noise scale
    changes along the sweep.
    """
    cfg, trial = args
    params = _csf_params(cfg)
    section = cfg["sweep_snr"]
    m = int(section["max_delay"])
    methods = list(section["methods"])
    n_sym = int(section["symbols"])
    ch = sample_random_channel(
        max_delay=m,
        gamma_range=tuple(section["gamma_range"]),
        path_count=int(section["path_count"]),
        seed=derive_seed(cfg["seed"], trial, 0),
    )
    truth = ch.tap_vector()
    path_count = int(section["path_count"])

    stream_seed = derive_seed(cfg["seed"], trial, 1)
    noise_seed = derive_seed(cfg["seed"], trial, 2)
    probe_seed = derive_seed(cfg["seed"], trial, 3)

    clean_csf = None
    if "blind_acf" in methods or "ls_chaos" in methods:
        stream = random_symbols(n_sym, seed=stream_seed)
        clean_csf = apply_multipath(encode_waveform(stream, params), ch)

    out = {}
    for snr_db in section["snr_db_list"]:
        snr_db = float(snr_db)
        for method in methods:
            if method == "blind_acf":
                received, _ = add_awgn(clean_csf, snr_db, seed=noise_seed)
                result = identify_blind(received, params, m)
                err = float(np.sum((result.alpha_hat - truth) ** 2)) / path_count
                out[(snr_db, method)] = (err, result.converged)
            elif method == "ls_gaussian":
                frame = gaussian_probe_frame(n_sym, params.oversampling, ch, snr_db, seed=probe_seed)
                est = ls_estimate(frame, m)
                err = float(np.sum((est.relative_taps() - truth) ** 2)) / path_count
                out[(snr_db, method)] = (err, not est.degenerate)
            elif method == "ls_chaos":
                frame = chaotic_probe_frame(n_sym, params, ch, snr_db, seed=stream_seed)
                est = ls_estimate(frame, m)
                err = float(np.sum((est.relative_taps() - truth) ** 2)) / path_count
                out[(snr_db, method)] = (err, not est.degenerate)
            else:
                raise ValueError(f"unknown method {method!r}")
    return out


def run_snr_sweep(cfg: dict) -> ExperimentResult:
    section = cfg["sweep_snr"]
    trials = int(cfg["trials"])
    per_trial = _fan_out(_snr_trial, cfg, trials)

    rows = []
    mse_table: dict[str, dict[float, float]] = {}
    for snr_db in [float(s) for s in section["snr_db_list"]]:
        for method in section["methods"]:
            errs = [per_trial[t][(snr_db, method)][0] for t in range(trials)]
            conv = [per_trial[t][(snr_db, method)][1] for t in range(trials)]
            mse_val = float(np.mean(errs))
            mse_table.setdefault(method, {})[snr_db] = mse_val
            rows.append((snr_db, method, mse_val, float(np.mean(conv))))
    summary = {
        "symbols": int(section["symbols"]),
        "trials": trials,
        "mse": {meth: {str(s): v for s, v in vals.items()} for meth, vals in mse_table.items()},
    }
    return ExperimentResult(
        name="sweep_snr",
        columns=["snr_db", "method", "mse", "converged_rate"],
        rows=rows,
        summary=summary,
    )


# ---------------------------------------------------------------------------
# ACF invariance demonstration
# ---------------------------------------------------------------------------

def run_invariance_demo(cfg: dict) -> ExperimentResult:
    section = cfg["invariance"]
    params = _csf_params(cfg)
    max_lag = int(section["max_lag"])
    n_sym = int(section["symbols"])
    n_streams = int(section["streams"])
    if n_streams < 2:
        raise ValueError("invariance demo needs at least two streams")

    reference = authoritative_acf_table(params, max_lag=max_lag)
    labels = []
    acfs = []
    excluded = []
    for s in range(n_streams):
        stream = random_symbols(n_sym, seed=derive_seed(cfg["seed"], s))
        wave = encode_waveform(stream, params)
        labels.append(f"s{s:02d}")
        acfs.append(empirical_acf(wave, max_lag).values)
        excluded.append(False)
    if section["include_all_ones"]:
        # constant symbols break the independence assumption behind the
        # invariance: shown for contrast, excluded from the statistics
        from .waveform import SymbolStream

        wave = encode_waveform(SymbolStream(np.ones(n_sym)), params)
        labels.append("all_ones")
        acfs.append(empirical_acf(wave, max_lag).values)
        excluded.append(True)

    rows = []
    for label, vals, skip in zip(labels, acfs, excluded):
        for k in range(max_lag + 1):
            rows.append(
                (label, k, float(vals[k]), float(reference[k]), float(abs(vals[k] - reference[k])), int(skip))
            )

    kept = [a for a, skip in zip(acfs, excluded) if not skip]
    max_vs_ref = float(max(np.max(np.abs(a - reference)) for a in kept))
    max_pairwise = 0.0
    for i in range(len(kept)):
        for j in range(i):
            max_pairwise = max(max_pairwise, float(np.max(np.abs(kept[i] - kept[j]))))
    summary = {
        "streams": n_streams,
        "symbols": n_sym,
        "max_abs_dev_vs_reference": max_vs_ref,
        "max_pairwise_abs_dev": max_pairwise,
        "sampling_noise_std": float(reference[0]) / float(np.sqrt(n_sym)),
    }
    return ExperimentResult(
        name="invariance",
        columns=["stream", "lag", "empirical_acf", "reference_acf", "abs_deviation", "excluded"],
        rows=rows,
        summary=summary,
    )


# ---------------------------------------------------------------------------
# trial fan-out
# ---------------------------------------------------------------------------

def _fan_out(worker, cfg: dict, trials: int) -> list:
    """Run per-trial work serially or across processes, merged in trial order."""
    tasks = [(cfg, t) for t in range(trials)]
    threads = int(cfg.get("threads", 1))
    if threads <= 1 or trials <= 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, tasks))
