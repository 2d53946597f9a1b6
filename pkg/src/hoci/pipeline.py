"""End-to-end estimation of common-information quantities over a channel matrix.

Given n channels, the second-order estimate is the minimum pairwise MI.
Higher orders are lower-bounded through tuned noise-injection variables: a
T built for pair (i, j) carries exactly the pair's shared information, so
min over k of MI(T_{i,j}; x_k) bounds the third-order quantity and min over
disjoint pairs of MI(T_{i,j}; T_{k,m}) the fourth.  The module also provides
the average variant (mean instead of min), the closed-form scaling
approximation, lag-scanned correlation for time-aligned references, and
region-restricted minima.

Conventions used throughout:

* One estimator config per run; every MI evaluation inside a report uses it.
* Construction seeds are derived deterministically from (run seed, i, j,
  order), so identical inputs give bit-identical reports.
* Pairs whose target MI is below the tuning resolution are "no common
  information" signals: they are excluded from the min and recorded.  When
  every pair is such a signal the higher-order estimate is exactly 0 --
  undetectable pairwise common information cannot exceed the resolution.
* Construction failures (non-convergence) are likewise excluded and
  recorded; if every construction fails outright the run errors instead of
  silently reporting 0.
* Time-series mode swaps the pairwise estimator for the bidirectional
  lag-embedded variant; the noise-injection tuning itself always uses plain
  MI, since injected noise is i.i.d. and carries no temporal structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .channels import ChannelMatrix
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DegenerateInputError,
    NoCommonInformationError,
    ParameterDomainError,
    PipelineError,
)
from .estimators import EstimatorConfig, bidirectional_te_mi, mi_estimate
from .sci import BisectionConfig, SciDescriptor, build_sci, _check_seed

__all__ = [
    "ChannelMatrix",
    "CommonInfoReport",
    "LagCorrelation",
    "LevelEstimate",
    "SciExclusion",
    "approx_rtilde",
    "average_rbar",
    "chain_slack_bits",
    "derive_sci_seed",
    "estimate_r2",
    "estimate_r3_lower",
    "estimate_r4_lower",
    "lag_max_correlation",
    "lag_max_correlation_samples",
    "region_min",
    "run_estimate",
]

# statistical slack for chain checks: 0.02 bits at 1e5 samples, ~ N^(-1/2)
SLACK_BITS_AT_REFERENCE = 0.02
REFERENCE_SAMPLES = 10**5

_ALL_NCI_REASON = "no channel pair shares information above the tuning resolution"


def chain_slack_bits(num_samples: int) -> float:
    """Statistical slack for ordering checks between estimated levels."""
    if num_samples < 1:
        raise ParameterDomainError("num_samples must be positive")
    return SLACK_BITS_AT_REFERENCE * math.sqrt(REFERENCE_SAMPLES / num_samples)


def derive_sci_seed(run_seed: int, i: int, j: int, order: int) -> int:
    """Deterministic per-construction seed from the run seed and identity."""
    seq = np.random.SeedSequence([_check_seed(run_seed), i, j, order])
    return int(seq.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class LevelEstimate:
    """A single common-information level: value, minimizing channels, or
    the reason the value was fixed without a minimizing tuple."""

    bits: float
    channels: tuple[str, ...] | None
    reason: str | None = None


@dataclass(frozen=True)
class SciExclusion:
    """A construction excluded from a report's minima, and why."""

    pair: tuple[str, str]
    code: str
    message: str


@dataclass(frozen=True)
class LagCorrelation:
    """Best absolute correlation over a lag scan."""

    abs_corr: float
    lag_samples: int
    lag_seconds: float | None = None


@dataclass(frozen=True)
class CommonInfoReport:
    """Everything one estimation run produced, sufficient to reproduce it."""

    r2_hat: LevelEstimate
    r3_hat_lower: LevelEstimate | None
    r4_hat_lower: LevelEstimate | None
    rbar: dict[int, float]
    rtilde: dict[int, float]
    estimator: EstimatorConfig
    bisection: BisectionConfig
    seed: int
    order: int
    time_series: bool
    channel_names: tuple[str, ...]
    num_samples: int
    sci_descriptors: tuple[SciDescriptor, ...] = ()
    exclusions: tuple[SciExclusion, ...] = ()
    chain_slack_bits: float = SLACK_BITS_AT_REFERENCE
    chain_ok: bool = True


def _pair_value(
    channels: ChannelMatrix, a: int, b: int, cfg: EstimatorConfig, time_series: bool
) -> float:
    try:
        if time_series:
            return bidirectional_te_mi(channels.data[a], channels.data[b], cfg)
        return mi_estimate(channels.data[a], channels.data[b], cfg)
    except DegenerateInputError as err:
        raise DegenerateInputError(
            f"channel pair ({channels.names[a]}, {channels.names[b]}): {err}"
        ) from err


def _pairwise_values(
    channels: ChannelMatrix, cfg: EstimatorConfig, time_series: bool
) -> list[tuple[tuple[int, int], float]]:
    return [
        ((a, b), _pair_value(channels, a, b, cfg, time_series))
        for a, b in combinations(range(channels.n_channels), 2)
    ]


def estimate_r2(
    channels: ChannelMatrix,
    cfg: EstimatorConfig = EstimatorConfig(),
    *,
    time_series: bool = False,
) -> LevelEstimate:
    """Minimum pairwise MI over all unordered channel pairs."""
    if channels.n_channels < 2:
        raise ParameterDomainError("estimate_r2 needs at least 2 channels")
    values = _pairwise_values(channels, cfg, time_series)
    (a, b), best = min(values, key=lambda item: item[1])
    return LevelEstimate(bits=best, channels=(channels.names[a], channels.names[b]))


def _build_all_scis(
    channels: ChannelMatrix,
    cfg: EstimatorConfig,
    bis: BisectionConfig,
    seed: int,
) -> tuple[dict[tuple[int, int], tuple[SciDescriptor, np.ndarray]], list[SciExclusion]]:
    """Tune one T per ordered channel pair; collect failures as exclusions.

    Ordered pairs because the construction injects noise into the second
    channel and is therefore asymmetric.
    """
    built: dict[tuple[int, int], tuple[SciDescriptor, np.ndarray]] = {}
    exclusions: list[SciExclusion] = []
    for i in range(channels.n_channels):
        for j in range(channels.n_channels):
            if i == j:
                continue
            pair_seed = derive_sci_seed(seed, i, j, 2)
            try:
                built[(i, j)] = build_sci(
                    channels.data[i],
                    channels.data[j],
                    cfg,
                    bis,
                    pair_seed,
                    base_channel=j,
                    partner_channel=i,
                )
            except (NoCommonInformationError, ConvergenceError) as err:
                exclusions.append(
                    SciExclusion(
                        pair=(channels.names[i], channels.names[j]),
                        code=err.code,
                        message=str(err),
                    )
                )
    return built, exclusions


def _no_candidates(exclusions: list[SciExclusion], what: str) -> LevelEstimate:
    if any(e.code == NoCommonInformationError.code for e in exclusions):
        return LevelEstimate(bits=0.0, channels=None, reason=_ALL_NCI_REASON)
    detail = "; ".join(f"({e.pair[0]},{e.pair[1]}): {e.message}" for e in exclusions)
    raise PipelineError(f"every construction needed for {what} failed: {detail}")


def _r3_candidates(
    channels: ChannelMatrix,
    built: dict[tuple[int, int], tuple[SciDescriptor, np.ndarray]],
    cfg: EstimatorConfig,
) -> list[tuple[tuple[int, int, int], float]]:
    out = []
    for (i, j), (_, t) in built.items():
        for k in range(channels.n_channels):
            if k in (i, j):
                continue
            out.append(((i, j, k), mi_estimate(t, channels.data[k], cfg)))
    return out


def _r3_from(
    channels: ChannelMatrix,
    built: dict[tuple[int, int], tuple[SciDescriptor, np.ndarray]],
    exclusions: list[SciExclusion],
    cfg: EstimatorConfig,
) -> LevelEstimate:
    candidates = _r3_candidates(channels, built, cfg)
    if not candidates:
        return _no_candidates(exclusions, "the third-order bound")
    (i, j, k), best = min(candidates, key=lambda item: item[1])
    return LevelEstimate(
        bits=best,
        channels=(channels.names[i], channels.names[j], channels.names[k]),
    )


def _r4_from(
    channels: ChannelMatrix,
    built: dict[tuple[int, int], tuple[SciDescriptor, np.ndarray]],
    exclusions: list[SciExclusion],
    cfg: EstimatorConfig,
) -> LevelEstimate:
    entries = list(built.items())
    candidates = []
    for (pa, (_, ta)), (pb, (_, tb)) in combinations(entries, 2):
        if set(pa) & set(pb):
            continue
        candidates.append(((pa, pb), mi_estimate(ta, tb, cfg)))
    if not candidates:
        return _no_candidates(exclusions, "the fourth-order bound")
    ((i, j), (k, m)), best = min(candidates, key=lambda item: item[1])
    names = channels.names
    return LevelEstimate(bits=best, channels=(names[i], names[j], names[k], names[m]))


def estimate_r3_lower(
    channels: ChannelMatrix,
    cfg: EstimatorConfig = EstimatorConfig(),
    bis: BisectionConfig = BisectionConfig(),
    seed: int = 0,
) -> LevelEstimate:
    """Third-order lower bound: min over k of MI(T_{i,j}; x_k), k outside the pair."""
    if channels.n_channels < 3:
        raise ParameterDomainError("estimate_r3_lower needs at least 3 channels")
    built, exclusions = _build_all_scis(channels, cfg, bis, seed)
    return _r3_from(channels, built, exclusions, cfg)


def estimate_r4_lower(
    channels: ChannelMatrix,
    cfg: EstimatorConfig = EstimatorConfig(),
    bis: BisectionConfig = BisectionConfig(),
    seed: int = 0,
) -> LevelEstimate:
    """Fourth-order lower bound: min over disjoint pairs of MI(T_{i,j}; T_{k,m})."""
    if channels.n_channels < 4:
        raise ParameterDomainError("estimate_r4_lower needs at least 4 channels")
    built, exclusions = _build_all_scis(channels, cfg, bis, seed)
    return _r4_from(channels, built, exclusions, cfg)


def average_rbar(
    channels: ChannelMatrix,
    cfg: EstimatorConfig = EstimatorConfig(),
    bis: BisectionConfig = BisectionConfig(),
    seed: int = 0,
    level: int = 2,
    *,
    time_series: bool = False,
) -> float:
    """Mean instead of min: level 2 averages pairwise MI, level 3 averages
    MI(T_{i,j}; x_k) over every construction and outside channel."""
    if level == 2:
        if channels.n_channels < 2:
            raise ParameterDomainError("level-2 average needs at least 2 channels")
        values = [v for _, v in _pairwise_values(channels, cfg, time_series)]
        return float(sum(values) / len(values))
    if level == 3:
        if channels.n_channels < 3:
            raise ParameterDomainError("level-3 average needs at least 3 channels")
        built, exclusions = _build_all_scis(channels, cfg, bis, seed)
        candidates = _r3_candidates(channels, built, cfg)
        if not candidates:
            return _no_candidates(exclusions, "the level-3 average").bits
        return float(sum(v for _, v in candidates) / len(candidates))
    raise ParameterDomainError(f"level must be 2 or 3, got {level}")


def approx_rtilde(r2_hat: float, n_vars: int, level: int) -> float:
    """Scaling approximation ((n - level)/(n - 2)) * r2_hat."""
    if not (isinstance(n_vars, (int, np.integer)) and n_vars > 2):
        raise ParameterDomainError(f"n_vars must be an integer > 2, got {n_vars}")
    if not (isinstance(level, (int, np.integer)) and 2 <= level <= n_vars):
        raise ParameterDomainError(f"level must lie in [2, {n_vars}], got {level}")
    if r2_hat < 0:
        raise ParameterDomainError(f"r2_hat must be nonnegative, got {r2_hat}")
    coeff = (n_vars - level) / (n_vars - 2)
    if coeff == 0.0:
        return 0.0  # exact zero even for divergent r2_hat
    return coeff * r2_hat


def _abs_corr(x: np.ndarray, y: np.ndarray, lag: int) -> float:
    xs = x[: x.size - lag] if lag else x
    ys = y[lag:]
    xc = xs - xs.mean()
    yc = ys - ys.mean()
    nx = float(np.sqrt(xc @ xc))
    ny = float(np.sqrt(yc @ yc))
    if nx == 0.0 or ny == 0.0:
        raise DegenerateInputError(f"constant overlap at lag {lag} samples")
    return min(1.0, abs(float((xc @ yc) / (nx * ny))))


def lag_max_correlation_samples(
    x, y, lag_min_samples: int, lag_max_samples: int
) -> LagCorrelation:
    """Max of |corr(x shifted by lag, y)| over an integer lag range."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or ya.ndim != 1 or xa.size != ya.size:
        raise DegenerateInputError("x and y must be equal-length columns")
    if not np.isfinite(xa).all() or not np.isfinite(ya).all():
        raise DegenerateInputError("lag scan inputs contain non-finite values")
    if not 0 <= lag_min_samples <= lag_max_samples:
        raise ParameterDomainError(
            f"need 0 <= lag_min <= lag_max, got [{lag_min_samples}, {lag_max_samples}]"
        )
    if xa.size - lag_max_samples < 2:
        raise DegenerateInputError(
            f"series of length {xa.size} too short for max lag {lag_max_samples}"
        )
    best = None
    for lag in range(lag_min_samples, lag_max_samples + 1):
        c = _abs_corr(xa, ya, lag)
        if best is None or c > best[0]:
            best = (c, lag)
    return LagCorrelation(abs_corr=best[0], lag_samples=best[1])


def lag_max_correlation(
    x,
    y,
    lag_min_s: float = 0.190,
    lag_max_s: float = 0.300,
    sample_rate_hz: float | None = None,
) -> LagCorrelation:
    """Lag scan with the range given in seconds at a known sample rate.

    The scanned integer lags are those whose real time lies inside
    [lag_min_s, lag_max_s]; an empty set is a domain error.
    """
    if sample_rate_hz is None or not sample_rate_hz > 0:
        raise ConfigurationError("a positive sample_rate_hz is required for lags in seconds")
    if not (0 <= lag_min_s <= lag_max_s and math.isfinite(lag_max_s)):
        raise ParameterDomainError(
            f"need 0 <= lag_min_s <= lag_max_s, got [{lag_min_s}, {lag_max_s}]"
        )
    lag_min = math.ceil(lag_min_s * sample_rate_hz - 1e-9)
    lag_max = math.floor(lag_max_s * sample_rate_hz + 1e-9)
    if lag_min > lag_max:
        raise ParameterDomainError(
            f"no integer lag lies in [{lag_min_s}, {lag_max_s}] s at "
            f"{sample_rate_hz} Hz"
        )
    res = lag_max_correlation_samples(x, y, lag_min, lag_max)
    return LagCorrelation(
        abs_corr=res.abs_corr,
        lag_samples=res.lag_samples,
        lag_seconds=res.lag_samples / sample_rate_hz,
    )


def region_min(
    channels: ChannelMatrix,
    region,
    reference,
    mode: str = "r2",
    cfg: EstimatorConfig = EstimatorConfig(),
    bis: BisectionConfig = BisectionConfig(),
    seed: int = 0,
) -> float:
    """Minimum over a channel subset against an external reference column.

    r2 mode: min over region channels of MI(channel; reference).  r3 mode:
    for each region channel z, tune T_z = reference + noise to match
    MI(x_z; reference), then take the min of MI(T_z; x_phi) over region
    channels phi (phi = z allowed; the trivial MI(T_z; reference) is not a
    candidate).
    """
    indices = []
    for key in region:
        idx = channels.index_of(key)
        if idx not in indices:
            indices.append(idx)
    if not indices:
        raise ConfigurationError("region must name at least one channel")
    ref = np.asarray(reference, dtype=np.float64)
    if ref.ndim != 1 or ref.size != channels.n_samples:
        raise DegenerateInputError(
            f"reference must be a column of {channels.n_samples} samples"
        )
    if not np.isfinite(ref).all():
        raise DegenerateInputError("reference contains non-finite values")

    if mode == "r2":
        return min(mi_estimate(channels.data[z], ref, cfg) for z in indices)
    if mode != "r3":
        raise ConfigurationError(f"mode must be 'r2' or 'r3', got {mode!r}")

    candidates = []
    nci_seen = False
    failures = []
    for z in indices:
        zeta_seed = derive_sci_seed(seed, z, channels.n_channels, 2)
        try:
            _, t = build_sci(channels.data[z], ref, cfg, bis, zeta_seed, partner_channel=z)
        except NoCommonInformationError:
            nci_seen = True
            continue
        except ConvergenceError as err:
            failures.append(f"{channels.names[z]}: {err}")
            continue
        candidates.extend(mi_estimate(t, channels.data[phi], cfg) for phi in indices)
    if candidates:
        return min(candidates)
    if nci_seen:
        return 0.0
    raise PipelineError(
        "every region construction failed: " + "; ".join(failures)
    )


def run_estimate(
    channels: ChannelMatrix,
    cfg: EstimatorConfig = EstimatorConfig(),
    bis: BisectionConfig = BisectionConfig(),
    seed: int = 0,
    order: int = 3,
    *,
    time_series: bool = False,
) -> CommonInfoReport:
    """Full estimation run up to the requested order, with chain check.

    Order 2 reports the pairwise minimum and average only; order 3 adds the
    third-order bound (needs >= 3 channels), order 4 the fourth (>= 4).
    """
    if order not in (2, 3, 4):
        raise ConfigurationError(f"order must be 2, 3, or 4, got {order}")
    if channels.n_channels < order:
        raise ParameterDomainError(
            f"order {order} needs at least {order} channels, got {channels.n_channels}"
        )
    _check_seed(seed)

    pair_values = _pairwise_values(channels, cfg, time_series)
    (a, b), r2_bits = min(pair_values, key=lambda item: item[1])
    r2 = LevelEstimate(bits=r2_bits, channels=(channels.names[a], channels.names[b]))
    rbar = {2: float(sum(v for _, v in pair_values) / len(pair_values))}

    r3 = r4 = None
    descriptors: tuple[SciDescriptor, ...] = ()
    exclusions: list[SciExclusion] = []
    if order >= 3:
        built, exclusions = _build_all_scis(channels, cfg, bis, seed)
        candidates = _r3_candidates(channels, built, cfg)
        if candidates:
            (i, j, k), best = min(candidates, key=lambda item: item[1])
            r3 = LevelEstimate(
                bits=best,
                channels=(channels.names[i], channels.names[j], channels.names[k]),
            )
            rbar[3] = float(sum(v for _, v in candidates) / len(candidates))
        else:
            r3 = _no_candidates(exclusions, "the third-order bound")
            rbar[3] = 0.0
        descriptors = tuple(desc for desc, _ in built.values())
        if order >= 4:
            r4 = _r4_from(channels, built, exclusions, cfg)

    n = channels.n_channels
    rtilde = {}
    if n > 2:
        rtilde = {lvl: approx_rtilde(r2.bits, n, lvl) for lvl in range(2, order + 1)}

    slack = chain_slack_bits(channels.n_samples)
    ok = r3 is None or r3.bits <= r2.bits + slack
    if ok and r4 is not None:
        ok = r4.bits <= r3.bits + slack

    return CommonInfoReport(
        r2_hat=r2,
        r3_hat_lower=r3,
        r4_hat_lower=r4,
        rbar=rbar,
        rtilde=rtilde,
        estimator=cfg,
        bisection=bis,
        seed=int(seed),
        order=order,
        time_series=time_series,
        channel_names=channels.names,
        num_samples=channels.n_samples,
        sci_descriptors=descriptors,
        exclusions=tuple(exclusions),
        chain_slack_bits=slack,
        chain_ok=ok,
    )
