"""
Capacity evaluation for hybrid active/passive IRS links.

Two quantities are kept apart here: the exact ergodic capacity, estimated
by Monte Carlo over scattered-channel draws, and its closed-form
approximation built only from statistical CSI.
"""

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .channel import (
    ChannelRealization,
    RngStream,
    StatisticalCsi,
    SubSurfaceGeometries,
    draw_realization,
    statistical_csi,
)
from .errors import AmplificationBoundsError, DimensionMismatch, NonFiniteValue, NonPositiveValue
from .params import (
    Allocation,
    ArrayLayout,
    SystemParams,
    los_weight,
    nlos_weight,
    validate,
)
from .telemetry import log_event, put_simple_metric

logger = logging.getLogger(__name__)

# relative slack when checking amplification factors against their bounds
ALPHA_TOLERANCE = 1e-12


def default_workers() -> int:
    """Worker count from HYBRID_IRS_WORKERS, 1 when unset."""
    try:
        return max(1, int(os.environ.get("HYBRID_IRS_WORKERS", "1")))
    except ValueError:
        logger.warning("Ignoring non-integer HYBRID_IRS_WORKERS")
        return 1


@dataclass(frozen=True)
class ReflectionConfig:
    """Phase shifts of both sub-surfaces and amplitudes of the active elements."""

    phases_act: np.ndarray
    phases_pas: np.ndarray
    alphas: np.ndarray

    def __post_init__(self):
        for name in ("phases_act", "phases_pas", "alphas"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if len(self.phases_act) != len(self.alphas):
            raise DimensionMismatch(
                f"{len(self.phases_act)} active phases but {len(self.alphas)} amplification factors"
            )

    @classmethod
    def uniform(cls, phases_act: Sequence[float], phases_pas: Sequence[float], alpha: float) -> "ReflectionConfig":
        phases_act = np.asarray(phases_act, dtype=float)
        return cls(phases_act, phases_pas, np.full(len(phases_act), float(alpha)))

    @property
    def n_act(self) -> int:
        return len(self.phases_act)

    @property
    def n_pas(self) -> int:
        return len(self.phases_pas)

    @property
    def psi_act(self) -> np.ndarray:
        return self.alphas * np.exp(1j * self.phases_act)

    @property
    def psi_pas(self) -> np.ndarray:
        return np.exp(1j * self.phases_pas)

    def check_bounds(self, params: SystemParams) -> "ReflectionConfig":
        if self.n_act == 0:
            return self
        low = params.alpha_min * (1.0 - ALPHA_TOLERANCE)
        high = params.alpha_max * (1.0 + ALPHA_TOLERANCE)
        if np.any(self.alphas < low) or np.any(self.alphas > high):
            raise AmplificationBoundsError(
                f"amplification factors must lie in [{params.alpha_min:g}, {params.alpha_max:g}], "
                f"got range [{self.alphas.min():g}, {self.alphas.max():g}]"
            )
        return self

    def check_dimensions(self, n_act: int, n_pas: int) -> "ReflectionConfig":
        if self.n_act != n_act or self.n_pas != n_pas:
            raise DimensionMismatch(
                f"reflection config is ({self.n_act}, {self.n_pas}), channels are ({n_act}, {n_pas})"
            )
        return self


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte Carlo estimate of the ergodic capacity in bits/s/Hz."""

    mean: float
    std_error: float
    n_samples: int


@dataclass(frozen=True)
class ApproxTerms:
    """Signal and noise terms of the closed-form capacity approximation, in watts."""

    x_l: float
    x_nl_act: float
    x_nl_pas: float
    z_l_act: float
    z_nl_act: float

    @property
    def signal(self) -> float:
        return self.x_l + self.x_nl_act + self.x_nl_pas

    @property
    def amplification_noise(self) -> float:
        return self.z_l_act + self.z_nl_act


def receiver_snr(real: ChannelRealization, cfg: ReflectionConfig, params: SystemParams) -> float:
    """
    Instantaneous SNR at the user for one channel draw.

    Args:
        real: Channel vectors of both sub-surfaces
        cfg: Reflection configuration
        params: System parameters

    Returns:
        Linear SNR, non-negative
    """
    cfg.check_dimensions(real.n_act, real.n_pas)
    psi_act = cfg.psi_act
    # vdot conjugates its first argument: h_IU^H Psi h_BI
    signal = np.vdot(real.iu_act, psi_act * real.bi_act) + np.vdot(real.iu_pas, cfg.psi_pas * real.bi_pas)
    amplified = float(np.sum(np.abs(real.iu_act * psi_act) ** 2))
    return params.p_bs * abs(signal) ** 2 / (params.sigma2_amp * amplified + params.sigma2_rx)


def _sample_rates(
    csi: StatisticalCsi,
    cfg: ReflectionConfig,
    params: SystemParams,
    seed: int,
    indices: range,
) -> np.ndarray:
    rates = np.empty(len(indices))
    for position, index in enumerate(indices):
        real = draw_realization(csi, params, RngStream(seed, index))
        rates[position] = math.log2(1.0 + receiver_snr(real, cfg, params))
    return rates


def _chunks(n_samples: int, workers: int) -> List[range]:
    bounds = np.linspace(0, n_samples, workers + 1).astype(int)
    return [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def mc_ergodic_capacity(
    params: SystemParams,
    alloc: Allocation,
    cfg: ReflectionConfig,
    n_samples: int,
    seed: int,
    geoms: Optional[SubSurfaceGeometries] = None,
    layout: Optional[ArrayLayout] = None,
    workers: Optional[int] = None,
) -> CapacityEstimate:
    """
    Estimate E[log2(1 + SNR)] over independent channel draws.

    Sample i always uses stream (seed, i), and per-sample rates are
    reduced in index order, so the estimate does not depend on workers.

    Args:
        params: System parameters
        alloc: Allocation the channels are drawn for
        cfg: Reflection configuration matching alloc
        n_samples: Number of channel draws
        seed: Master seed
        geoms: Sub-surface layouts (derived from alloc when omitted)
        layout: Geometry overrides used when geoms is omitted
        workers: Thread count; HYBRID_IRS_WORKERS when omitted

    Returns:
        CapacityEstimate with mean and standard error
    """
    if n_samples < 1:
        raise NonPositiveValue(f"n_samples must be >= 1, got {n_samples}")
    validate(params)
    cfg.check_dimensions(alloc.n_act, alloc.n_pas)
    csi = statistical_csi(params, alloc, geoms, layout)
    workers = workers or default_workers()

    start_time = time.time()
    chunks = _chunks(n_samples, workers)
    if len(chunks) == 1:
        parts = [_sample_rates(csi, cfg, params, seed, chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda idx: _sample_rates(csi, cfg, params, seed, idx), chunks))
    rates = np.concatenate(parts)

    if np.ptp(rates) == 0.0:
        # deterministic channels: every draw is the same number
        mean, std_error = float(rates[0]), 0.0
    else:
        mean = float(np.mean(rates))
        std_error = float(np.std(rates, ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0

    duration_ms = (time.time() - start_time) * 1000
    put_simple_metric("MonteCarloDuration", duration_ms, "Milliseconds")
    log_event(
        "mc_estimate_completed",
        {
            "n_act": alloc.n_act,
            "n_pas": alloc.n_pas,
            "n_samples": n_samples,
            "seed": seed,
            "workers": len(chunks),
            "mean": mean,
            "std_error": std_error,
        },
    )
    return CapacityEstimate(mean=mean, std_error=std_error, n_samples=n_samples)


def approx_terms(
    params: SystemParams,
    alloc: Allocation,
    cfg: ReflectionConfig,
    csi: StatisticalCsi,
) -> ApproxTerms:
    """
    Closed-form signal and noise terms of the ergodic-capacity approximation.

    Cross terms between independent zero-mean scattered components vanish
    in expectation, leaving one coherent LoS term and three incoherent
    terms per sub-surface; the scattered part of the amplification noise
    is taken in expectation.
    """
    if (csi.n_act, csi.n_pas) != (alloc.n_act, alloc.n_pas):
        raise DimensionMismatch(
            f"statistical CSI is ({csi.n_act}, {csi.n_pas}), allocation is ({alloc.n_act}, {alloc.n_pas})"
        )
    cfg.check_dimensions(alloc.n_act, alloc.n_pas)

    los_bi, nlos_bi = los_weight(params.k1), nlos_weight(params.k1)
    los_iu, nlos_iu = los_weight(params.k2), nlos_weight(params.k2)
    bi_gain = params.beta / params.d_bi ** 2
    iu_gain = params.beta / params.d_iu ** 2

    psi_act, psi_pas = cfg.psi_act, cfg.psi_pas
    coherent = np.vdot(csi.los_iu_act, psi_act * csi.los_bi_act) + np.vdot(csi.los_iu_pas, psi_pas * csi.los_bi_pas)
    x_l = params.p_bs * los_bi * los_iu * abs(coherent) ** 2

    def incoherent(bi: np.ndarray, iu: np.ndarray, gains2: np.ndarray) -> float:
        bi_norm = float(np.sum(gains2 * np.abs(bi) ** 2))
        iu_norm = float(np.sum(gains2 * np.abs(iu) ** 2))
        return params.p_bs * (
            los_bi * nlos_iu * iu_gain * bi_norm
            + nlos_bi * los_iu * bi_gain * iu_norm
            + nlos_bi * nlos_iu * params.cascade_gain * float(np.sum(gains2))
        )

    alpha2 = cfg.alphas ** 2
    x_nl_act = incoherent(csi.los_bi_act, csi.los_iu_act, alpha2)
    x_nl_pas = incoherent(csi.los_bi_pas, csi.los_iu_pas, np.ones(alloc.n_pas))

    z_l_act = los_iu * params.sigma2_amp * float(np.sum(alpha2 * np.abs(csi.los_iu_act) ** 2))
    z_nl_act = nlos_iu * params.amp_noise_gain * float(np.sum(alpha2))

    return ApproxTerms(x_l, x_nl_act, x_nl_pas, z_l_act, z_nl_act)


def approx_capacity(terms: ApproxTerms, params: SystemParams) -> float:
    """log2(1 + signal / (amplification noise + receiver noise)), bits/s/Hz."""
    values = (terms.x_l, terms.x_nl_act, terms.x_nl_pas, terms.z_l_act, terms.z_nl_act)
    if not all(math.isfinite(v) for v in values):
        raise NonFiniteValue(f"approximation terms must be finite, got {terms}")
    return math.log2(1.0 + terms.signal / (terms.amplification_noise + params.sigma2_rx))


def aligned_snr(params: SystemParams, n_act, n_pas, alpha):
    """
    Approximate SNR with co-phased elements and a uniform amplification factor.

    Broadcasts over numpy arrays of n_act, n_pas and alpha. The scattered
    weight 1 - K1K2/((K1+1)(K2+1)) equals (K1+K2+1)/((K1+1)(K2+1)).
    """
    n_act = np.asarray(n_act, dtype=float)
    n_pas = np.asarray(n_pas, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    coherent_weight = los_weight(params.k1) * los_weight(params.k2)
    sum_alpha = n_act * alpha
    sum_alpha2 = n_act * alpha ** 2
    signal = params.p_bs * params.cascade_gain * (
        coherent_weight * (sum_alpha + n_pas) ** 2
        + (1.0 - coherent_weight) * (sum_alpha2 + n_pas)
    )
    noise = sum_alpha2 * params.amp_noise_gain + params.sigma2_rx
    return signal / noise


def aligned_capacity(params: SystemParams, n_act: int, n_pas: int, alpha: float) -> float:
    """
    Approximate capacity under optimal phases and a uniform factor alpha.

    Args:
        params: System parameters
        n_act: Active element count
        n_pas: Passive element count
        alpha: Amplification factor shared by all active elements

    Returns:
        Capacity in bits/s/Hz
    """
    if n_act < 0 or n_pas < 0:
        raise DimensionMismatch(f"element counts must be non-negative, got ({n_act}, {n_pas})")
    if n_act > 0:
        if not (params.alpha_min * (1.0 - ALPHA_TOLERANCE) <= alpha <= params.alpha_max * (1.0 + ALPHA_TOLERANCE)):
            raise AmplificationBoundsError(
                f"alpha={alpha:g} outside [{params.alpha_min:g}, {params.alpha_max:g}]"
            )
    return float(np.log2(1.0 + aligned_snr(params, n_act, n_pas, alpha)))


def mean_amplification_power(
    params: SystemParams,
    alloc: Allocation,
    cfg: ReflectionConfig,
    csi: StatisticalCsi,
) -> float:
    """
    Average power drawn by the active sub-surface, in watts.

    Amplified incident signal (LoS part plus the scattered part in
    expectation, sum(alpha^2)*beta/D^2) plus amplified thermal noise.
    """
    if alloc.n_act == 0:
        return 0.0
    cfg.check_dimensions(alloc.n_act, alloc.n_pas)
    alpha2 = cfg.alphas ** 2
    incident_los = float(np.sum(alpha2 * np.abs(csi.los_bi_act) ** 2))
    incident_nlos = float(np.sum(alpha2)) * params.beta / params.d_bi ** 2
    incident = los_weight(params.k1) * incident_los + nlos_weight(params.k1) * incident_nlos
    return params.p_bs * incident + params.sigma2_amp * float(np.sum(alpha2))
