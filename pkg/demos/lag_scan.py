#!/usr/bin/env python3
"""Align a delayed response to its stimulus before estimating shared bits.

Simulates a 100 Hz recording where the response trails the stimulus by
250 ms plus measurement noise. A naive zero-lag MI estimate sees almost
nothing; scanning the physiological lag window recovers the delay, and
re-estimating on the aligned pair recovers the shared information. The
directed time-series estimate tells the two directions apart without any
explicit alignment.
"""

import numpy as np

from hoci import (
    EstimatorConfig,
    bidirectional_te_mi,
    lag_max_correlation,
    mi_estimate,
)

SAMPLE_RATE_HZ = 100.0
DELAY_SAMPLES = 25
NUM_SAMPLES = 20_000
NOISE_SCALE = 0.3


def simulate(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    drive = rng.standard_normal(NUM_SAMPLES + DELAY_SAMPLES)
    # moving average gives the stimulus enough autocorrelation to be realistic
    kernel = np.ones(5) / 5.0
    smooth = np.convolve(drive, kernel, mode="same")
    stimulus = smooth[DELAY_SAMPLES:]
    response = smooth[:NUM_SAMPLES] + NOISE_SCALE * rng.standard_normal(NUM_SAMPLES)
    return stimulus, response


def main() -> None:
    rng = np.random.default_rng(12)
    stimulus, response = simulate(rng)

    print(f"zero-lag MI: {mi_estimate(stimulus, response):.4f} bits")
    res = lag_max_correlation(
        stimulus, response, lag_min_s=0.19, lag_max_s=0.3, sample_rate_hz=SAMPLE_RATE_HZ
    )
    print(
        f"lag scan over [190, 300] ms: peak |corr| {res.abs_corr:.3f} at "
        f"{res.lag_samples} samples = {1000.0 * res.lag_seconds:.0f} ms"
    )
    aligned = mi_estimate(stimulus[: -res.lag_samples], response[res.lag_samples :])
    print(f"MI after alignment: {aligned:.4f} bits")
    print()

    cfg = EstimatorConfig(ts_lag=DELAY_SAMPLES)
    coupled = bidirectional_te_mi(stimulus, response, cfg)
    null = bidirectional_te_mi(
        rng.standard_normal(NUM_SAMPLES), rng.standard_normal(NUM_SAMPLES), cfg
    )
    print(f"directed time-series MI, stimulus vs response: {coupled:.4f} bits")
    print(f"directed time-series MI, unrelated noise:      {null:.4f} bits")


if __name__ == "__main__":
    main()
