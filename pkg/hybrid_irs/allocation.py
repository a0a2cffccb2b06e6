"""
Beamforming and active/passive element allocation.

Everything here works on statistical CSI only: phases co-phase the LoS
components, the amplification factor follows from the average power
budget, and the element split is found either by an exhaustive
one-dimensional search or by the LoS / Rayleigh closed forms.
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .capacity import ALPHA_TOLERANCE, ReflectionConfig, aligned_capacity, aligned_snr
from .channel import StatisticalCsi
from .errors import InfeasibleAllocation, RegimeError, ThresholdOrderingError
from .params import (
    Allocation,
    SystemParams,
    max_active,
    passive_fill,
    validate,
)
from .telemetry import log_event

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class PowerRegime(str, Enum):
    PASSIVE_ONLY = "PassiveOnly"
    FAVORABLE = "Favorable"
    SATURATED = "Saturated"


class Architecture(str, Enum):
    ACTIVE = "Active"
    HYBRID = "Hybrid"
    PASSIVE = "Passive"


@dataclass(frozen=True)
class AlphaChoice:
    """Amplification factor with the unclamped value and which bound, if any, was hit."""

    alpha: float
    unclamped: float
    clamped: Optional[str] = None  # "min" or "max"


@dataclass(frozen=True)
class OptimalDesign:
    """Allocation, amplification factor and predicted capacity of one design."""

    alloc: Allocation
    alpha: Optional[float]
    capacity: float
    regime: PowerRegime
    a_sum: float
    alpha_clamped: bool = False
    method: str = "fixed"
    n_act_continuous: Optional[float] = None
    n_pas_continuous: Optional[float] = None
    capacity_continuous: Optional[float] = None

    def active_budget_fraction(self, params: SystemParams) -> float:
        if params.w0 == 0:
            return 0.0
        return self.alloc.n_act * params.w_act / params.w0

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["regime"] = self.regime.value
        return data


@dataclass(frozen=True)
class Thresholds:
    """Budget thresholds separating the optimal IRS architectures under LoS."""

    w_ah: float
    w_ap: float
    w_hp: float

    @property
    def ordered(self) -> bool:
        return self.w_ah < self.w_ap < self.w_hp


@dataclass(frozen=True)
class XiCoefficients:
    xi1: float
    xi2: float
    xi3: float

    def objective(self, n_act: float) -> float:
        """SNR as a function of the continuous active count."""
        return self.xi1 * (-n_act + self.xi2 * math.sqrt(n_act) + self.xi3) ** 2


@dataclass(frozen=True)
class LosCapacities:
    """Continuous-relaxation capacities of the three architectures under LoS."""

    passive: float
    hybrid: float
    active: float
    hybrid_interior: float


# ---------------------------------------------------------------------------
# Phases and amplification
# ---------------------------------------------------------------------------


def optimal_phases(csi: StatisticalCsi) -> Tuple[np.ndarray, np.ndarray]:
    """
    Co-phasing shifts arg(h_IU) - arg(h_BI) for both sub-surfaces.

    Returns:
        (phases_act, phases_pas), each in (0, 2*pi]
    """

    def align(iu: np.ndarray, bi: np.ndarray) -> np.ndarray:
        phases = np.mod(np.angle(iu) - np.angle(bi), TWO_PI)
        return np.where(phases == 0.0, TWO_PI, phases)

    return align(csi.los_iu_act, csi.los_bi_act), align(csi.los_iu_pas, csi.los_bi_pas)


def aligned_reflection(csi: StatisticalCsi, alpha: float) -> ReflectionConfig:
    """Optimal phases with one amplification factor shared by all active elements."""
    phases_act, phases_pas = optimal_phases(csi)
    return ReflectionConfig.uniform(phases_act, phases_pas, alpha)


def amplification_budget(params: SystemParams) -> float:
    """Total sum(alpha^2) the average power budget can sustain, P_I / (P_B*beta/D^2 + sigma_I^2)."""
    return params.p_irs / params.amplifier_input_power


def meets_alpha_floor(unclamped, alpha_min: float):
    """True where an unclamped factor reaches alpha_min up to ALPHA_TOLERANCE; works on arrays."""
    return unclamped >= alpha_min * (1.0 - ALPHA_TOLERANCE)


def power_regime(params: SystemParams) -> PowerRegime:
    """
    Classify the amplification power budget.

    PassiveOnly: not even one element can run at alpha_min.
    Saturated: every affordable active element can run at alpha_max.
    """
    floor = params.amplifier_input_power
    if params.p_irs < params.alpha_min ** 2 * floor:
        return PowerRegime.PASSIVE_ONLY
    if params.p_irs >= params.w0 * params.alpha_max ** 2 * floor / params.w_act:
        return PowerRegime.SATURATED
    return PowerRegime.FAVORABLE


def optimal_alpha(params: SystemParams, n_act: int) -> AlphaChoice:
    """
    Uniform amplification factor that spends the power budget exactly.

    Args:
        params: System parameters
        n_act: Number of active elements, at least one

    Returns:
        AlphaChoice clamped to [alpha_min, alpha_max]
    """
    if n_act < 1:
        raise InfeasibleAllocation(f"optimal_alpha needs at least one active element, got {n_act}")
    if power_regime(params) is PowerRegime.PASSIVE_ONLY:
        raise RegimeError("amplification power is below the single-element minimum; use passive elements only")

    unclamped = math.sqrt(amplification_budget(params) / n_act)
    if unclamped > params.alpha_max:
        return AlphaChoice(params.alpha_max, unclamped, "max")
    if unclamped < params.alpha_min:
        if meets_alpha_floor(unclamped, params.alpha_min):
            # rounding noise around n_act = A_sum / alpha_min^2
            return AlphaChoice(params.alpha_min, unclamped)
        return AlphaChoice(params.alpha_min, unclamped, "min")
    return AlphaChoice(unclamped, unclamped)


def amp_noise_power(params: SystemParams, n_act: int) -> float:
    """Amplification noise at the receiver under the optimal factor; constant for any n_act >= 1."""
    if n_act <= 0:
        return 0.0
    return params.p_irs * params.amp_noise_gain / params.amplifier_input_power


def noise_ratio(params: SystemParams) -> float:
    """Amplification noise relative to receiver noise when the full power budget is used."""
    return amplification_budget(params) * params.amp_noise_gain / params.sigma2_rx


# ---------------------------------------------------------------------------
# Capacity of a given split
# ---------------------------------------------------------------------------


def evaluate_allocation(params: SystemParams, n_act: int, n_pas: int) -> OptimalDesign:
    """
    Optimized capacity of a fixed split, with the full design record.

    Raises:
        InfeasibleAllocation: budget exceeded, or the power budget cannot
            keep every active element at alpha_min
    """
    alloc = Allocation(n_act, n_pas).check_budget(params)
    regime = power_regime(params)

    if alloc.n_act == 0:
        capacity = aligned_capacity(params, 0, alloc.n_pas, 1.0)
        return OptimalDesign(alloc, None, capacity, regime, 0.0)

    if regime is PowerRegime.PASSIVE_ONLY:
        raise InfeasibleAllocation(
            f"{alloc.n_act} active elements requested but the amplification budget "
            f"cannot power a single element"
        )
    choice = optimal_alpha(params, alloc.n_act)
    if choice.clamped == "min":
        raise InfeasibleAllocation(
            f"{alloc.n_act} active elements would need alpha={choice.unclamped:.4g} "
            f"below alpha_min={params.alpha_min:g}"
        )
    if choice.clamped == "max":
        logger.debug(f"alpha clamped to alpha_max for n_act={alloc.n_act} (unclamped {choice.unclamped:.4g})")

    capacity = aligned_capacity(params, alloc.n_act, alloc.n_pas, choice.alpha)
    return OptimalDesign(
        alloc,
        choice.alpha,
        capacity,
        regime,
        alloc.n_act * choice.alpha ** 2,
        alpha_clamped=choice.clamped is not None,
    )


def capacity_opt(params: SystemParams, n_act: int, n_pas: int) -> float:
    """Approximate capacity of (n_act, n_pas) under optimal phases and amplification."""
    return evaluate_allocation(params, n_act, n_pas).capacity


def allocation_for_rho(params: SystemParams, rho: float) -> Allocation:
    """Spend a fraction rho of the budget on active elements, the rest on passive ones."""
    n_act = int(math.floor(rho * params.w0 / params.w_act * (1.0 + 1e-12)))
    return Allocation(n_act, passive_fill(params, n_act))


def equal_split(params: SystemParams) -> Allocation:
    """Half of the budget to each element type."""
    half = params.w0 / 2.0
    return Allocation(
        int(math.floor(half / params.w_act * (1.0 + 1e-12))),
        int(math.floor(half / params.w_pas * (1.0 + 1e-12))),
    )


def allocate_search(params: SystemParams) -> OptimalDesign:
    """
    Exhaustive search over n_act = 0..floor(W0/W_act).

    Every active count takes the largest affordable passive count;
    power-infeasible points are skipped and ties go to the smaller n_act.
    """
    validate(params)
    regime = power_regime(params)

    n_act = np.arange(max_active(params) + 1)
    n_pas = np.array([passive_fill(params, int(n)) for n in n_act])
    if regime is PowerRegime.PASSIVE_ONLY:
        n_act, n_pas = n_act[:1], n_pas[:1]

    budget = amplification_budget(params)
    with np.errstate(divide="ignore"):
        unclamped = np.sqrt(budget / np.maximum(n_act, 1))
    feasible = (n_act == 0) | meets_alpha_floor(unclamped, params.alpha_min)
    alpha = np.clip(unclamped, params.alpha_min, params.alpha_max)

    rates = np.log2(1.0 + aligned_snr(params, n_act, n_pas, alpha))
    rates = np.where(feasible, rates, -np.inf)
    best = int(np.argmax(rates))  # first maximum, i.e. smallest n_act

    design = evaluate_allocation(params, int(n_act[best]), int(n_pas[best]))
    design = replace(design, method="search")
    log_event(
        "allocation_search_completed",
        {
            "grid_size": int(len(n_act)),
            "feasible_points": int(np.count_nonzero(feasible)),
            "n_act": design.alloc.n_act,
            "n_pas": design.alloc.n_pas,
            "capacity": design.capacity,
            "regime": regime.value,
        },
    )
    return design


# ---------------------------------------------------------------------------
# Pure LoS closed forms
# ---------------------------------------------------------------------------


def _require_los(params: SystemParams, operation: str):
    if not params.pure_los:
        raise RegimeError(f"{operation} applies to pure LoS links only (k1 = k2 = PURE_LOS)")


def _require_favorable(params: SystemParams, operation: str):
    regime = power_regime(params)
    if regime is not PowerRegime.FAVORABLE:
        raise RegimeError(f"{operation} requires the Favorable power regime, got {regime.value}")


def xi_coefficients(params: SystemParams) -> XiCoefficients:
    """
    Coefficients of the one-variable SNR objective xi1*(-n + xi2*sqrt(n) + xi3)^2.
    """
    _require_favorable(params, "xi_coefficients")
    budget = amplification_budget(params)
    cost_ratio = params.w_act / params.w_pas
    xi1 = (params.p_bs * params.cascade_gain * cost_ratio ** 2) / (
        budget * params.amp_noise_gain + params.sigma2_rx
    )
    return XiCoefficients(xi1, math.sqrt(budget) / cost_ratio, params.w0 / params.w_act)


def los_branch_threshold(params: SystemParams) -> float:
    """Budget below which all of it should go to active elements under LoS."""
    return params.w_pas ** 2 * params.p_irs / params.w_act / (4.0 * params.amplifier_input_power)


def continuous_los_optimum(params: SystemParams) -> Tuple[float, float]:
    """Continuous (n_act, n_pas) maximizing the LoS capacity at full budget use."""
    threshold = los_branch_threshold(params)
    if params.w0 < threshold:
        return params.w0 / params.w_act, 0.0
    quarter_budget = params.p_irs / (4.0 * params.amplifier_input_power)
    n_act = quarter_budget * params.w_pas ** 2 / params.w_act ** 2
    n_pas = params.w0 / params.w_pas - quarter_budget * params.w_pas / params.w_act
    return n_act, n_pas


def cost_ratio_alpha(params: SystemParams) -> float:
    """Amplification factor at the interior LoS optimum, 2*W_act/W_pas."""
    return 2.0 * params.w_act / params.w_pas


def allocate_los(params: SystemParams) -> OptimalDesign:
    """
    Closed-form allocation for pure LoS links, rounded to integers.

    The continuous optimum is rounded by comparing floor and ceiling
    (plus the all-passive corner) with capacity_opt.
    """
    validate(params)
    _require_los(params, "allocate_los")
    _require_favorable(params, "allocate_los")

    n_act_cont, n_pas_cont = continuous_los_optimum(params)
    budget = amplification_budget(params)
    alpha_cont = math.sqrt(budget / n_act_cont) if n_act_cont > 0 else None
    if alpha_cont is not None and alpha_cont > params.alpha_max * (1.0 + ALPHA_TOLERANCE):
        logger.warning(
            f"continuous LoS optimum needs alpha={alpha_cont:.4g} above alpha_max={params.alpha_max:.4g}; "
            f"rounded design is clamped"
        )
    capacity_cont = float(np.log2(1.0 + aligned_snr(params, n_act_cont, n_pas_cont, alpha_cont or 0.0)))

    limit = max_active(params)
    floor_n = int(math.floor(n_act_cont))
    candidates = sorted({0, min(floor_n, limit), min(floor_n + 1, limit)})

    best: Optional[OptimalDesign] = None
    for n_act in candidates:
        try:
            design = evaluate_allocation(params, n_act, passive_fill(params, n_act))
        except InfeasibleAllocation:
            continue
        if best is None or design.capacity > best.capacity:
            best = design

    return replace(
        best,
        method="los_closed_form",
        n_act_continuous=n_act_cont,
        n_pas_continuous=n_pas_cont,
        capacity_continuous=capacity_cont,
    )


def capacity_los_variants(params: SystemParams) -> LosCapacities:
    """
    Closed-form LoS capacities of the passive, hybrid and active architectures.

    All three use the continuous relaxation and spend the whole budget on
    one element type (passive, active) or on the optimal hybrid split.
    The hybrid optimum includes the all-passive corner.
    """
    validate(params)
    _require_los(params, "capacity_los_variants")
    if power_regime(params) is PowerRegime.PASSIVE_ONLY:
        raise RegimeError("active and hybrid capacities are undefined in the PassiveOnly regime")

    gain = params.p_bs * params.cascade_gain
    budget = amplification_budget(params)
    noise = budget * params.amp_noise_gain + params.sigma2_rx

    passive = math.log2(1.0 + (params.w0 / params.w_pas) ** 2 * gain / params.sigma2_rx)
    active = math.log2(1.0 + params.w0 * budget * gain / (params.w_act * noise))
    if params.w0 < los_branch_threshold(params):
        interior = active
    else:
        amplitude = budget * params.w_pas / (4.0 * params.w_act) + params.w0 / params.w_pas
        interior = math.log2(1.0 + gain * amplitude ** 2 / noise)
    return LosCapacities(passive, max(interior, passive), active, interior)


def thresholds(params: SystemParams, strict: bool = True) -> Thresholds:
    """
    Budget thresholds W_AH, W_AP and W_HP.

    The ordering W_AH < W_AP < W_HP holds exactly when noise_ratio(params)
    is below 3.

    Args:
        params: System parameters
        strict: Raise ThresholdOrderingError when the ordering fails

    Returns:
        Thresholds in budget units
    """
    validate(params)
    budget = amplification_budget(params)
    scale = params.w_pas ** 2 / params.w_act

    w_ah = scale * budget / 4.0
    w_ap = scale / (params.amp_noise_gain / params.sigma2_rx + 1.0 / budget)

    sigma_rx = math.sqrt(params.sigma2_rx)
    sigma_amp = math.sqrt(params.sigma2_amp)
    d, beta = params.d_iu, params.beta
    w_hp = scale * params.sigma2_rx * d ** 2 / (4.0 * params.sigma2_amp * beta) + (
        scale * sigma_rx * d / (4.0 * sigma_amp)
    ) * math.sqrt(
        params.sigma2_rx * d ** 2 / (params.sigma2_amp * beta ** 2)
        + params.p_irs / (params.p_bs * beta ** 2 / params.d_bi ** 2 + params.sigma2_amp * beta)
    )

    result = Thresholds(w_ah, w_ap, w_hp)
    if not result.ordered:
        message = (
            f"threshold ordering W_AH < W_AP < W_HP fails ({w_ah:.6g}, {w_ap:.6g}, {w_hp:.6g}); "
            f"amplification-to-receiver noise ratio is {noise_ratio(params):.4g} (ordering needs < 3)"
        )
        if strict:
            raise ThresholdOrderingError(message)
        logger.warning(message)
    return result


def select_architecture(params: SystemParams, w0: Optional[float] = None) -> Architecture:
    """Best LoS architecture for budget w0 (params.w0 when omitted)."""
    _require_los(params, "select_architecture")
    budget = params.w0 if w0 is None else w0
    limits = thresholds(params)
    if budget < limits.w_ah:
        return Architecture.ACTIVE
    if budget <= limits.w_hp:
        return Architecture.HYBRID
    return Architecture.PASSIVE


def compare_architectures(params: SystemParams, w0: Optional[float] = None) -> Dict[str, Any]:
    """Selected architecture together with the three LoS capacities it rests on."""
    if w0 is not None:
        params = params.with_updates(w0=w0)
    capacities = capacity_los_variants(params)
    return {
        "w0": params.w0,
        "architecture": select_architecture(params).value,
        "capacity_passive": capacities.passive,
        "capacity_hybrid": capacities.hybrid,
        "capacity_active": capacities.active,
    }


# ---------------------------------------------------------------------------
# Rayleigh closed form
# ---------------------------------------------------------------------------


def rayleigh_branch_threshold(params: SystemParams) -> float:
    """
    Budget below which one active element beats an all-passive surface
    under Rayleigh fading.
    """
    budget = amplification_budget(params)
    return (budget * params.w_pas - params.w_act) * params.sigma2_rx / (budget * params.amp_noise_gain)


def rayleigh_capacity(params: SystemParams, n_act: int, n_pas: int) -> float:
    """Rayleigh-fading capacity with at most one active element at the full power budget."""
    budget = amplification_budget(params) if n_act > 0 else 0.0
    snr = (budget + n_pas) * params.p_bs * params.cascade_gain / (
        budget * params.amp_noise_gain + params.sigma2_rx
    )
    return math.log2(1.0 + snr)


def allocate_rayleigh(params: SystemParams) -> OptimalDesign:
    """
    Closed-form allocation for Rayleigh links: one active element or none.

    Under Rayleigh fading every active element beyond the first only adds
    cost, since the amplified power sum(alpha^2) is fixed by the budget.

    Raises:
        RegimeError: links are not Rayleigh, the regime is not Favorable, or
            the amplification budget exceeds what one element can take at alpha_max
    """
    validate(params)
    if not params.rayleigh:
        raise RegimeError("allocate_rayleigh applies to Rayleigh links only (k1 = k2 = 0)")
    _require_favorable(params, "allocate_rayleigh")
    budget = amplification_budget(params)
    if budget > params.alpha_max ** 2 * (1.0 + ALPHA_TOLERANCE):
        raise RegimeError(
            f"one active element cannot absorb the amplification budget "
            f"(A_sum={budget:.4g} > alpha_max^2={params.alpha_max ** 2:.4g}); use allocate_search"
        )

    use_active = params.w0 < rayleigh_branch_threshold(params) and max_active(params) >= 1
    n_act = 1 if use_active else 0
    design = evaluate_allocation(params, n_act, passive_fill(params, n_act))
    return replace(design, method="rayleigh_closed_form")
