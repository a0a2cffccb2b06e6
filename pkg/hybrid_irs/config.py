"""
Scenario configuration: parsing, defaults and figure presets.

A scenario document is JSON. Physical parameters sit flat at the top
level (linear SI keys, or ``_dbm`` / ``_db`` twins); ``geometry``,
``sweep``, ``mc``, ``output``, ``allocation`` and ``landmark`` are
optional sections. Anything absent takes the worst-case-user defaults.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from .errors import ConfigError, ConfigParseError, InvalidSweepAxis, ParameterError, UnknownPreset
from .params import (
    DEFAULT_BS_XY,
    DEFAULT_IRS_XY,
    DEFAULT_USER_XY,
    Allocation,
    ArrayLayout,
    SystemParams,
    alpha_db_to_linear,
    angles_from_coordinates,
    db_to_linear,
    dbm_to_watt,
    distances_from_coordinates,
    format_rician,
    rician_from_db,
    rician_from_linear,
    validate,
)
from .telemetry import log_event
from .validators import require_finite, validate_document_keys, validate_sweep_axis

logger = logging.getLogger(__name__)

PRESET_NAMES = tuple(f"fig{n}" for n in range(3, 10))
SERIES_AXES = ("rician_db", "p_irs_dbm", "cost_ratio", "budget")
OUTPUT_FORMATS = ("csv", "json")

DEFAULT_ALPHA_MIN_DB = 0.0
DEFAULT_ALPHA_MAX_DB = 14.0

# linear key -> (log-scale twin, converter)
_SCALED_KEYS: Dict[str, Tuple[str, Callable[[Any], float]]] = {
    "p_bs": ("p_bs_dbm", dbm_to_watt),
    "p_irs": ("p_irs_dbm", dbm_to_watt),
    "sigma2_amp": ("sigma2_amp_dbm", dbm_to_watt),
    "sigma2_rx": ("sigma2_rx_dbm", dbm_to_watt),
    "beta": ("beta_db", lambda x: db_to_linear(x, "power")),
    "k1": ("k1_db", rician_from_db),
    "k2": ("k2_db", rician_from_db),
}
_PLAIN_KEYS = ("wavelength", "d_bi", "d_iu", "w_act", "w_pas", "w0")
_ALPHA_KEYS = ("alpha_min", "alpha_min_db", "alpha_max", "alpha_max_db", "alpha_db_convention")
_COORD_KEYS = ("bs_xy", "irs_xy", "user_xy")
_SECTIONS = ("name", "description", "geometry", "sweep", "mc", "output", "allocation", "landmark")

TOP_LEVEL_KEYS = (
    tuple(_SCALED_KEYS)
    + tuple(twin for twin, _ in _SCALED_KEYS.values())
    + _PLAIN_KEYS
    + _ALPHA_KEYS
    + _COORD_KEYS
    + ("rician_db",)
    + _SECTIONS
)

AxisValue = Union[float, str]


@dataclass(frozen=True)
class SweepSpec:
    axis: Optional[str] = None
    values: Tuple[AxisValue, ...] = ()
    series_axis: Optional[str] = None
    series_values: Tuple[AxisValue, ...] = ()


@dataclass(frozen=True)
class MonteCarloSpec:
    enabled: bool = False
    n_samples: int = 1000
    seed: int = 0
    workers: Optional[int] = None


@dataclass(frozen=True)
class OutputSpec:
    path: Optional[str] = None
    format: str = "csv"


@dataclass(frozen=True)
class LandmarkSpec:
    """Expected argmax of the capacity over rho, per series label."""

    quantity: str = "rho_argmax"
    expected: Dict[str, float] = field(default_factory=dict)
    tolerance: float = 0.05


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully parsed and validated scenario."""

    params: SystemParams = field(default_factory=SystemParams)
    layout: ArrayLayout = field(default_factory=ArrayLayout)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    mc: MonteCarloSpec = field(default_factory=MonteCarloSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    allocation: Optional[Allocation] = None
    landmark: Optional[LandmarkSpec] = None
    name: str = "custom"
    description: str = ""

    def with_overrides(
        self,
        seed: Optional[int] = None,
        samples: Optional[int] = None,
        out: Optional[str] = None,
        fmt: Optional[str] = None,
        workers: Optional[int] = None,
    ) -> "ScenarioConfig":
        """Apply command-line overrides."""
        mc = self.mc
        if seed is not None:
            mc = replace(mc, seed=_parse_seed(seed))
        if samples is not None:
            mc = replace(mc, n_samples=_parse_samples(samples), enabled=True)
        if workers is not None:
            mc = replace(mc, workers=max(1, int(workers)))
        output = self.output
        if out is not None:
            output = replace(output, path=out)
        if fmt is not None:
            output = replace(output, format=_parse_format(fmt))
        return replace(self, mc=mc, output=output)


def _parse_seed(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < 2 ** 64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {value!r}")
    return value


def _parse_samples(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"samples must be a positive integer, got {value!r}")
    return value


def _parse_format(value: Any) -> str:
    if value not in OUTPUT_FORMATS:
        raise ConfigError(f"format must be one of {OUTPUT_FORMATS}, got {value!r}")
    return value


def _expand_values(raw: Any, section: str) -> List[AxisValue]:
    """Accept an explicit list or a {start, stop, step} range (stop inclusive)."""
    if isinstance(raw, list):
        return list(raw)
    if isinstance(raw, dict):
        validate_document_keys(raw, ("start", "stop", "step"), section).raise_first()
        try:
            start, stop, step = (require_finite(raw[k], k) for k in ("start", "stop", "step"))
        except KeyError as e:
            raise ConfigError(f"range in {section} is missing '{e.args[0]}'")
        if step <= 0 or stop < start:
            raise ConfigError(f"range in {section} must have step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + i * step, 12) for i in range(count)]
        if all(isinstance(raw[k], int) for k in ("start", "stop", "step")):
            return [int(v) for v in values]
        return values
    raise ConfigError(f"values in {section} must be a list or a range object")


def _check_axis_values(axis: str, values: List[AxisValue]):
    for v in values:
        if axis == "rician_db" and isinstance(v, str):
            try:
                rician_from_db(v)
            except ParameterError as e:
                raise InvalidSweepAxis(f"value {v!r} is not valid for axis '{axis}': {e}")
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InvalidSweepAxis(f"value {v!r} is not valid for axis '{axis}'")
        else:
            require_finite(v, f"{axis} value")


def _parse_sweep(raw: Dict[str, Any]) -> SweepSpec:
    validate_document_keys(raw, ("axis", "values", "series"), "sweep").raise_first()
    axis = raw.get("axis")
    values = _expand_values(raw.get("values", []), "sweep.values")
    validate_sweep_axis(axis, values).raise_first()
    _check_axis_values(axis, values)

    series_axis, series_values = None, []
    if "series" in raw:
        series = raw["series"]
        if not isinstance(series, dict):
            raise ConfigError("sweep.series must be an object")
        validate_document_keys(series, ("axis", "values"), "sweep.series").raise_first()
        series_axis = series.get("axis")
        if series_axis not in SERIES_AXES or series_axis == axis:
            raise InvalidSweepAxis(
                f"series axis '{series_axis}' must differ from the sweep axis and be one of {SERIES_AXES}"
            )
        series_values = _expand_values(series.get("values", []), "sweep.series.values")
        validate_sweep_axis(series_axis, series_values).raise_first()
        _check_axis_values(series_axis, series_values)
    return SweepSpec(axis, tuple(values), series_axis, tuple(series_values))


def _parse_mc(raw: Dict[str, Any]) -> MonteCarloSpec:
    validate_document_keys(raw, ("enabled", "samples", "seed", "workers"), "mc").raise_first()
    spec = MonteCarloSpec(enabled=bool(raw.get("enabled", "samples" in raw)))
    if "samples" in raw:
        spec = replace(spec, n_samples=_parse_samples(raw["samples"]))
    if "seed" in raw:
        spec = replace(spec, seed=_parse_seed(raw["seed"]))
    if "workers" in raw:
        spec = replace(spec, workers=max(1, int(raw["workers"])))
    return spec


def _parse_output(raw: Dict[str, Any]) -> OutputSpec:
    validate_document_keys(raw, ("path", "format"), "output").raise_first()
    return OutputSpec(path=raw.get("path"), format=_parse_format(raw.get("format", "csv")))


def _parse_landmark(raw: Dict[str, Any]) -> LandmarkSpec:
    validate_document_keys(raw, ("quantity", "expected", "tolerance"), "landmark").raise_first()
    quantity = raw.get("quantity", "rho_argmax")
    if quantity != "rho_argmax":
        raise ConfigError(f"unsupported landmark quantity '{quantity}'")
    expected = {str(k): require_finite(v, f"landmark.expected[{k}]") for k, v in raw.get("expected", {}).items()}
    return LandmarkSpec(quantity, expected, require_finite(raw.get("tolerance", 0.05), "landmark.tolerance"))


def _parse_layout(raw: Dict[str, Any], base: ArrayLayout) -> ArrayLayout:
    keys = ("elem_spacing", "azimuth_aoa", "elevation_aoa", "azimuth_aod", "elevation_aod")
    validate_document_keys(raw, keys, "geometry").raise_first()
    return replace(base, **{k: require_finite(v, f"geometry.{k}") for k, v in raw.items()})


def _pick(document: Dict[str, Any], linear: str, twin: str, convert: Callable[[Any], float],
          linear_convert: Callable[[Any], float] = float) -> Optional[float]:
    if linear in document and twin in document:
        raise ConfigError(f"give either '{linear}' or '{twin}', not both")
    if linear in document:
        return linear_convert(document[linear])
    if twin in document:
        return convert(document[twin])
    return None


def parse_params(document: Dict[str, Any]) -> Tuple[SystemParams, ArrayLayout]:
    """
    Build validated SystemParams (and the coordinate-derived layout) from a flat document.
    """
    values: Dict[str, Any] = {}

    for linear, (twin, convert) in _SCALED_KEYS.items():
        linear_convert = rician_from_linear if linear in ("k1", "k2") else float
        picked = _pick(document, linear, twin, convert, linear_convert)
        if picked is not None:
            values[linear] = picked

    if "rician_db" in document:
        if any(k in document for k in ("k1", "k1_db", "k2", "k2_db")):
            raise ConfigError("'rician_db' sets both links; do not combine it with k1/k2 keys")
        values["k1"] = values["k2"] = rician_from_db(document["rician_db"])

    for key in _PLAIN_KEYS:
        if key in document:
            values[key] = document[key]

    convention = document.get("alpha_db_convention", "factor10")
    for bound, default_db in (("alpha_min", DEFAULT_ALPHA_MIN_DB), ("alpha_max", DEFAULT_ALPHA_MAX_DB)):
        picked = _pick(document, bound, f"{bound}_db", lambda x: alpha_db_to_linear(x, convention))
        values[bound] = picked if picked is not None else alpha_db_to_linear(default_db, convention)

    layout = ArrayLayout()
    if any(k in document for k in _COORD_KEYS):
        if "d_bi" in document or "d_iu" in document:
            raise ConfigError("give either coordinates or d_bi/d_iu, not both")
        points = []
        for key, default in zip(_COORD_KEYS, (DEFAULT_BS_XY, DEFAULT_IRS_XY, DEFAULT_USER_XY)):
            raw = document.get(key, default)
            if not isinstance(raw, (list, tuple)) or len(raw) != 2:
                raise ConfigError(f"'{key}' must be an [x, y] pair")
            points.append(tuple(require_finite(v, key) for v in raw))
        values["d_bi"], values["d_iu"] = distances_from_coordinates(*points)
        az_aoa, el_aoa, az_aod, el_aod = angles_from_coordinates(*points)
        layout = ArrayLayout(None, az_aoa, el_aoa, az_aod, el_aod)

    try:
        params = validate(SystemParams(**values))
    except TypeError as e:
        raise ParameterError(f"invalid parameter value: {e}")
    return params, layout


def parse_config(document: Any, source: str = "<document>") -> ScenarioConfig:
    """
    Parse a scenario document into a ScenarioConfig.

    Args:
        document: Decoded JSON object (None or {} gives the defaults)
        source: Where the document came from, for logging

    Returns:
        Validated ScenarioConfig
    """
    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    validate_document_keys(document, TOP_LEVEL_KEYS).raise_first()

    params, layout = parse_params(document)
    if "geometry" in document:
        layout = _parse_layout(document["geometry"], layout)

    def section(name: str) -> Dict[str, Any]:
        raw = document.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"'{name}' must be an object")
        return raw

    allocation = None
    if "allocation" in document:
        raw = section("allocation")
        validate_document_keys(raw, ("n_act", "n_pas"), "allocation").raise_first()
        allocation = Allocation(raw.get("n_act", 0), raw.get("n_pas", 0))

    cfg = ScenarioConfig(
        params=params,
        layout=layout,
        sweep=_parse_sweep(section("sweep")) if "sweep" in document else SweepSpec(),
        mc=_parse_mc(section("mc")),
        output=_parse_output(section("output")),
        allocation=allocation,
        landmark=_parse_landmark(section("landmark")) if "landmark" in document else None,
        name=str(document.get("name", "custom")),
        description=str(document.get("description", "")),
    )
    log_event(
        "config_loaded",
        {
            "source": source,
            "name": cfg.name,
            "sweep_axis": cfg.sweep.axis,
            "points": len(cfg.sweep.values) * max(1, len(cfg.sweep.series_values)),
            "mc_enabled": cfg.mc.enabled,
            "k": format_rician(params.k1),
        },
    )
    return cfg


def parse_text(text: str, source: str = "<text>") -> ScenarioConfig:
    if not text.strip():
        return parse_config({}, source)
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"{source}: {e.msg}", e.lineno, e.colno)
    return parse_config(document, source)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    Read and validate a scenario file.

    Args:
        path: JSON scenario file

    Returns:
        ScenarioConfig with defaults filled for absent keys
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}")
    return parse_text(text, str(path))


def load_preset(name: str) -> ScenarioConfig:
    """Load one of the committed figure presets (fig3 .. fig9)."""
    if name not in PRESET_NAMES:
        raise UnknownPreset(f"unknown preset '{name}', expected one of {', '.join(PRESET_NAMES)}")
    text = resources.files("hybrid_irs").joinpath("presets", f"{name}.json").read_text(encoding="utf-8")
    return parse_text(text, f"preset:{name}")
