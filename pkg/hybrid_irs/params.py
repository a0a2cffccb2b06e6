"""
System parameters, unit conversions and parameter validation.

All quantities inside the library are linear SI values (watts, meters,
linear ratios). dB and dBm only appear at the configuration boundary.
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, List, Optional, Tuple

from .errors import (
    AlphaBoundsInverted,
    AlphaMinBelowOne,
    AngleOutOfRange,
    GeometryMismatch,
    InfeasibleAllocation,
    NegativeBudget,
    NegativeRicianFactor,
    NonFiniteValue,
    NonPositiveCost,
    NonPositiveValue,
    ParameterError,
)
from .telemetry import log_event
from .validators import ValidationResult, require_finite

logger = logging.getLogger(__name__)

# Rician factor of a channel without any scattered component.
PURE_LOS = math.inf

ALPHA_DB_CONVENTIONS = ("factor10", "amplitude")

BUDGET_TOLERANCE = 1e-9


def is_pure_los(k: float) -> bool:
    return math.isinf(k)


def los_weight(k: float) -> float:
    """Power share K/(K+1) of the LoS component; exactly 1 for PURE_LOS."""
    if is_pure_los(k):
        return 1.0
    return k / (k + 1.0)


def nlos_weight(k: float) -> float:
    """Power share 1/(K+1) of the scattered component; exactly 0 for PURE_LOS."""
    if is_pure_los(k):
        return 0.0
    return 1.0 / (k + 1.0)


def dbm_to_watt(x: float) -> float:
    """
    Convert a power in dBm to watts.

    Args:
        x: Power in dBm

    Returns:
        Power in watts
    """
    x = require_finite(x, "power in dBm")
    return 10.0 ** (x / 10.0) * 1e-3


def watt_to_dbm(w: float) -> float:
    w = require_finite(w, "power in watts")
    if w <= 0:
        raise NonPositiveValue(f"power must be positive to express in dBm, got {w}")
    return 10.0 * math.log10(w / 1e-3)


def db_to_linear(x: float, kind: str = "power") -> float:
    """
    Convert a ratio in dB to a linear ratio.

    Args:
        x: Ratio in dB
        kind: "power" (10^(x/10)) or "amplitude" (10^(x/20))

    Returns:
        Linear ratio
    """
    x = require_finite(x, "ratio in dB")
    if kind == "power":
        return 10.0 ** (x / 10.0)
    if kind == "amplitude":
        return 10.0 ** (x / 20.0)
    raise ParameterError(f"Unknown dB kind '{kind}', expected 'power' or 'amplitude'")


def alpha_db_to_linear(x: float, convention: str = "factor10") -> float:
    """
    Convert an amplification bound given in dB to a linear amplitude factor.

    ``factor10`` reads the dB value as 10*log10(alpha); ``amplitude`` reads
    it as 20*log10(alpha).
    """
    if convention == "factor10":
        return db_to_linear(x, "power")
    if convention == "amplitude":
        return db_to_linear(x, "amplitude")
    raise ParameterError(
        f"Unknown alpha_db_convention '{convention}', expected one of {ALPHA_DB_CONVENTIONS}"
    )


def rician_from_db(x: Any) -> float:
    """Parse a Rician factor given in dB, or the strings 'los' / 'rayleigh'."""
    if isinstance(x, str):
        token = x.strip().lower()
        if token in ("los", "inf", "infinity"):
            return PURE_LOS
        if token in ("rayleigh", "-inf"):
            return 0.0
        raise ParameterError(f"Unrecognized Rician factor '{x}'")
    return db_to_linear(x, "power")


def rician_from_linear(x: Any) -> float:
    if isinstance(x, str):
        return rician_from_db(x)
    return float(x)


def format_rician(k: float) -> str:
    if is_pure_los(k):
        return "los"
    if k == 0:
        return "rayleigh"
    return f"{10.0 * math.log10(k):g}dB"


# Worst-case user scenario: BS at (0,0) m, IRS at (60,0) m, user at (60,20) m.
DEFAULT_BS_XY = (0.0, 0.0)
DEFAULT_IRS_XY = (60.0, 0.0)
DEFAULT_USER_XY = (60.0, 20.0)
DEFAULT_WAVELENGTH = 0.05


@dataclass(frozen=True)
class SystemParams:
    """Scalar physical and cost parameters of one hybrid IRS link."""

    p_bs: float = 10.0 ** 1.5 * 1e-3  # 15 dBm
    p_irs: float = 10.0 ** 0.5 * 1e-3  # 5 dBm
    sigma2_amp: float = 1e-11  # -80 dBm
    sigma2_rx: float = 1e-11  # -80 dBm
    beta: float = 1e-3  # -30 dB
    wavelength: float = DEFAULT_WAVELENGTH
    d_bi: float = 60.0
    d_iu: float = 20.0
    k1: float = 10.0
    k2: float = 10.0
    alpha_min: float = 1.0
    alpha_max: float = 10.0 ** 1.4  # 14 dB, factor10 convention
    w_act: float = 5.0
    w_pas: float = 1.0
    w0: float = 3000.0

    def validate(self) -> "SystemParams":
        return validate(self)

    def with_updates(self, **changes: Any) -> "SystemParams":
        """Return a validated copy with some fields replaced."""
        return validate(replace(self, **changes))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @property
    def pure_los(self) -> bool:
        return is_pure_los(self.k1) and is_pure_los(self.k2)

    @property
    def rayleigh(self) -> bool:
        return self.k1 == 0 and self.k2 == 0

    @property
    def amplifier_input_power(self) -> float:
        """Mean power an active element sees per unit alpha^2: P_B*beta/D^2 + sigma_I^2."""
        return self.p_bs * self.beta / self.d_bi ** 2 + self.sigma2_amp

    @property
    def cascade_gain(self) -> float:
        """Product-distance gain beta^2/(D^2 d^2) of one reflected path."""
        return self.beta ** 2 / (self.d_bi ** 2 * self.d_iu ** 2)

    @property
    def amp_noise_gain(self) -> float:
        """sigma_I^2*beta/d^2: receiver noise contributed per unit alpha^2."""
        return self.sigma2_amp * self.beta / self.d_iu ** 2


def collect_violations(params: SystemParams) -> ValidationResult:
    """
    Check every SystemParams invariant.

    Args:
        params: Parameters to check

    Returns:
        ValidationResult carrying one named error per violated invariant
    """
    errors: List[ParameterError] = []

    for name in ("p_bs", "p_irs", "sigma2_amp", "sigma2_rx", "beta", "wavelength",
                 "d_bi", "d_iu", "alpha_min", "alpha_max", "w_act", "w_pas", "w0"):
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            errors.append(NonFiniteValue(f"{name} must be a finite number, got {value!r}"))

    for name in ("k1", "k2"):
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or math.isnan(value):
            errors.append(NonFiniteValue(f"{name} must be a number or PURE_LOS, got {value!r}"))
        elif value < 0:
            errors.append(NegativeRicianFactor(f"{name} must be >= 0, got {value}"))

    if errors:
        return ValidationResult(is_valid=False, errors=errors)

    for name in ("p_bs", "p_irs", "sigma2_amp", "sigma2_rx", "beta", "wavelength", "d_bi", "d_iu"):
        value = getattr(params, name)
        if value <= 0:
            errors.append(NonPositiveValue(f"{name} must be strictly positive, got {value}"))

    if params.alpha_min < 1.0:
        errors.append(AlphaMinBelowOne(f"alpha_min must be >= 1, got {params.alpha_min}"))
    if params.alpha_max <= params.alpha_min:
        errors.append(
            AlphaBoundsInverted(
                f"alpha_max ({params.alpha_max}) must exceed alpha_min ({params.alpha_min})"
            )
        )

    for name in ("w_act", "w_pas"):
        value = getattr(params, name)
        if value <= 0:
            errors.append(NonPositiveCost(f"{name} must be strictly positive, got {value}"))
    if params.w0 < 0:
        errors.append(NegativeBudget(f"w0 must be >= 0, got {params.w0}"))

    return ValidationResult(is_valid=not errors, errors=errors)


def validate(params: SystemParams) -> SystemParams:
    """
    Validate parameters before any math runs.

    Args:
        params: Parameters to check

    Returns:
        The same params object when every invariant holds

    Raises:
        ParameterError: the first violated invariant (all are logged)
    """
    result = collect_violations(params)
    if not result.is_valid:
        logger.warning(f"Parameter validation failed: {result.messages}")
        result.raise_first()
    logger.debug("Parameters validated")
    return params


def factorize_elements(n: int) -> Tuple[int, int]:
    """
    Split an element count into a full rectangular grid (n_x, n_y).

    n_x starts at floor(sqrt(n)) and moves down until it divides n, so no
    grid slot is left empty; primes end up as a 1 x n line.
    """
    if n < 1:
        raise GeometryMismatch(f"cannot lay out {n} elements")
    n_x = math.isqrt(n)
    while n % n_x:
        n_x -= 1
    return n_x, n // n_x


def angles_from_coordinates(
    bs_xy: Tuple[float, float] = DEFAULT_BS_XY,
    irs_xy: Tuple[float, float] = DEFAULT_IRS_XY,
    user_xy: Tuple[float, float] = DEFAULT_USER_XY,
) -> Tuple[float, float, float, float]:
    """
    Derive (azimuth_aoa, elevation_aoa, azimuth_aod, elevation_aod) from 2-D
    positions. The surface sits in the horizontal plane's normal direction,
    so both elevations are pi/2.
    """
    az_aoa = abs(math.atan2(bs_xy[1] - irs_xy[1], bs_xy[0] - irs_xy[0]))
    az_aod = abs(math.atan2(user_xy[1] - irs_xy[1], user_xy[0] - irs_xy[0]))
    return az_aoa, math.pi / 2, az_aod, math.pi / 2


def distances_from_coordinates(
    bs_xy: Tuple[float, float], irs_xy: Tuple[float, float], user_xy: Tuple[float, float]
) -> Tuple[float, float]:
    """Return (D_BI, d_IU) in meters."""
    return math.dist(bs_xy, irs_xy), math.dist(irs_xy, user_xy)


_DEFAULT_ANGLES = angles_from_coordinates()


@dataclass(frozen=True)
class ArrayLayout:
    """Geometry overrides shared by both sub-surfaces."""

    elem_spacing: Optional[float] = None  # defaults to wavelength / 4
    azimuth_aoa: float = _DEFAULT_ANGLES[0]
    elevation_aoa: float = _DEFAULT_ANGLES[1]
    azimuth_aod: float = _DEFAULT_ANGLES[2]
    elevation_aod: float = _DEFAULT_ANGLES[3]

    def spacing_for(self, wavelength: float) -> float:
        return self.elem_spacing if self.elem_spacing is not None else wavelength / 4.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar layout of one sub-surface and its link angles."""

    elem_spacing: float
    n_x: int
    n_y: int
    azimuth_aoa: float
    elevation_aoa: float
    azimuth_aod: float
    elevation_aod: float

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise GeometryMismatch(f"n_x and n_y must be positive, got ({self.n_x}, {self.n_y})")
        if require_finite(self.elem_spacing, "elem_spacing") <= 0:
            raise NonPositiveValue(f"elem_spacing must be positive, got {self.elem_spacing}")
        for name in ("azimuth_aoa", "elevation_aoa", "azimuth_aod", "elevation_aod"):
            angle = require_finite(getattr(self, name), name)
            if not 0.0 <= angle <= math.pi:
                raise AngleOutOfRange(f"{name} must lie in [0, pi], got {angle}")

    @property
    def n_elements(self) -> int:
        return self.n_x * self.n_y

    def link_angles(self, link: str) -> Tuple[float, float]:
        """(azimuth, elevation) for link 'bi' (arrival) or 'iu' (departure)."""
        if link == "bi":
            return self.azimuth_aoa, self.elevation_aoa
        if link == "iu":
            return self.azimuth_aod, self.elevation_aod
        raise ParameterError(f"Unknown link '{link}', expected 'bi' or 'iu'")

    @classmethod
    def for_elements(cls, n: int, layout: ArrayLayout, wavelength: float) -> "ArrayGeometry":
        n_x, n_y = factorize_elements(n)
        return cls(
            elem_spacing=layout.spacing_for(wavelength),
            n_x=n_x,
            n_y=n_y,
            azimuth_aoa=layout.azimuth_aoa,
            elevation_aoa=layout.elevation_aoa,
            azimuth_aod=layout.azimuth_aod,
            elevation_aod=layout.elevation_aod,
        )


@dataclass(frozen=True)
class Allocation:
    """Integer split of the surface into active and passive elements."""

    n_act: int
    n_pas: int

    def __post_init__(self):
        for name in ("n_act", "n_pas"):
            value = getattr(self, name)
            try:
                finite = math.isfinite(value)
            except TypeError:
                finite = False
            if isinstance(value, bool) or not finite or int(value) != value or value < 0:
                raise InfeasibleAllocation(f"{name} must be a non-negative integer, got {value!r}")
        object.__setattr__(self, "n_act", int(self.n_act))
        object.__setattr__(self, "n_pas", int(self.n_pas))

    def cost(self, params: SystemParams) -> float:
        return self.n_act * params.w_act + self.n_pas * params.w_pas

    def fits_budget(self, params: SystemParams) -> bool:
        return self.cost(params) <= params.w0 * (1.0 + BUDGET_TOLERANCE) + BUDGET_TOLERANCE

    def check_budget(self, params: SystemParams) -> "Allocation":
        if not self.fits_budget(params):
            raise InfeasibleAllocation(
                f"allocation ({self.n_act}, {self.n_pas}) costs {self.cost(params):g}, "
                f"budget is {params.w0:g}"
            )
        return self

    @property
    def total(self) -> int:
        return self.n_act + self.n_pas


def passive_fill(params: SystemParams, n_act: int) -> int:
    """Largest passive count affordable after buying n_act active elements."""
    remaining = params.w0 - n_act * params.w_act
    if remaining < 0:
        return 0
    # absorb float noise such as 2999.9999999 / 1
    return int(math.floor(remaining / params.w_pas * (1.0 + 1e-12) + 1e-12))


def max_active(params: SystemParams) -> int:
    return int(math.floor(params.w0 / params.w_act * (1.0 + 1e-12) + 1e-12))


def describe(params: SystemParams) -> Dict[str, Any]:
    """Loggable summary with powers in dBm and Rician factors in dB."""
    summary = {
        "p_bs_dbm": watt_to_dbm(params.p_bs),
        "p_irs_dbm": watt_to_dbm(params.p_irs),
        "k1": format_rician(params.k1),
        "k2": format_rician(params.k2),
        "w_act": params.w_act,
        "w_pas": params.w_pas,
        "w0": params.w0,
    }
    log_event("params_validated", summary)
    return summary
