"""
Figure-reproduction sweeps and their machine-readable output.

Each sweep point compares four schemes (optimized hybrid, equal budget
split, all-active, all-passive), evaluates one allocation of interest in
detail and, when Monte Carlo is enabled, cross-checks that allocation's
approximate capacity against the exact ergodic capacity.
"""

import io
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from .allocation import (
    PowerRegime,
    aligned_reflection,
    allocate_search,
    allocation_for_rho,
    equal_split,
    evaluate_allocation,
)
from .capacity import default_workers, mc_ergodic_capacity
from .channel import statistical_csi
from .config import AxisValue, ScenarioConfig
from .errors import InfeasibleAllocation, InvalidSweepAxis, OutputError
from .params import Allocation, SystemParams, dbm_to_watt, max_active, passive_fill, rician_from_db
from .telemetry import log_event, put_simple_metric

logger = logging.getLogger(__name__)

NOT_APPLICABLE = float("nan")
CSV_NA = "NA"
FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class SweepRow:
    """One sweep point. Field order is the output column order."""

    series: str
    axis: str
    axis_value: float
    hybrid_opt_capacity: float
    hybrid_equal_capacity: float
    all_active_capacity: float
    all_passive_capacity: float
    n_act: int
    n_pas: int
    alpha: float
    regime: str
    eval_n_act: int
    eval_n_pas: int
    eval_capacity: float
    mc_mean: float
    mc_std_error: float
    mc_samples: int


COLUMNS = tuple(f.name for f in fields(SweepRow))


def axis_label(value: AxisValue) -> str:
    if isinstance(value, str):
        return value.strip().lower()
    return format(value, "g")


def axis_number(axis: str, value: AxisValue) -> float:
    if axis == "rician_db" and isinstance(value, str):
        k = rician_from_db(value)
        return math.inf if math.isinf(k) else -math.inf
    return float(value)


def apply_axis(params: SystemParams, axis: Optional[str], value: AxisValue) -> SystemParams:
    """Parameters at one sweep coordinate. rho and n_elements only pick allocations."""
    if axis is None or axis == "rho":
        return params
    if axis == "budget":
        return params.with_updates(w0=float(value))
    if axis == "rician_db":
        k = rician_from_db(value)
        return params.with_updates(k1=k, k2=k)
    if axis == "p_irs_dbm":
        return params.with_updates(p_irs=dbm_to_watt(value))
    if axis == "cost_ratio":
        return params.with_updates(w_act=float(value) * params.w_pas)
    if axis == "n_elements":
        # budget that buys exactly n active plus n passive elements
        return params.with_updates(w0=int(value) * (params.w_act + params.w_pas))
    raise InvalidSweepAxis(f"unsupported sweep axis '{axis}'")


def _capacity_or_na(params: SystemParams, alloc: Allocation, scheme: str) -> float:
    try:
        return evaluate_allocation(params, alloc.n_act, alloc.n_pas).capacity
    except InfeasibleAllocation as e:
        logger.warning(f"{scheme} scheme not applicable: {e}")
        return NOT_APPLICABLE


def evaluate_point(
    cfg: ScenarioConfig,
    series_value: Optional[AxisValue],
    axis_value: Optional[AxisValue],
    mc_workers: int = 1,
) -> SweepRow:
    """Evaluate every scheme at one (series, axis) coordinate."""
    axis = cfg.sweep.axis
    params = apply_axis(cfg.params, cfg.sweep.series_axis, series_value) if series_value is not None else cfg.params
    if axis_value is not None:
        params = apply_axis(params, axis, axis_value)

    optimum = allocate_search(params)
    regime = optimum.regime

    if regime is PowerRegime.PASSIVE_ONLY:
        logger.warning("all-active scheme not applicable in the PassiveOnly regime")
        all_active = NOT_APPLICABLE
    else:
        all_active = _capacity_or_na(params, Allocation(max_active(params), 0), "all-active")
    all_passive = _capacity_or_na(params, Allocation(0, passive_fill(params, 0)), "all-passive")
    hybrid_equal = _capacity_or_na(params, equal_split(params), "hybrid-equal")

    if axis == "rho":
        focus = allocation_for_rho(params, float(axis_value))
    elif axis == "n_elements":
        focus = Allocation(int(axis_value), int(axis_value))
    elif cfg.allocation is not None:
        focus = cfg.allocation
    else:
        focus = optimum.alloc

    try:
        focus_design = evaluate_allocation(params, focus.n_act, focus.n_pas)
    except InfeasibleAllocation as e:
        logger.warning(f"allocation ({focus.n_act}, {focus.n_pas}) not applicable: {e}")
        focus_design = None

    mc_mean = mc_std_error = NOT_APPLICABLE
    mc_samples = 0
    if cfg.mc.enabled and focus_design is not None:
        csi = statistical_csi(params, focus, layout=cfg.layout)
        reflection = aligned_reflection(csi, focus_design.alpha or 1.0)
        estimate = mc_ergodic_capacity(
            params, focus, reflection, cfg.mc.n_samples, cfg.mc.seed, layout=cfg.layout, workers=mc_workers
        )
        mc_mean, mc_std_error, mc_samples = estimate.mean, estimate.std_error, estimate.n_samples

    return SweepRow(
        series=axis_label(series_value) if series_value is not None else "",
        axis=axis or "none",
        axis_value=axis_number(axis, axis_value) if axis_value is not None else NOT_APPLICABLE,
        hybrid_opt_capacity=optimum.capacity,
        hybrid_equal_capacity=hybrid_equal,
        all_active_capacity=all_active,
        all_passive_capacity=all_passive,
        n_act=optimum.alloc.n_act,
        n_pas=optimum.alloc.n_pas,
        alpha=optimum.alpha if optimum.alpha is not None else NOT_APPLICABLE,
        regime=regime.value,
        eval_n_act=focus.n_act,
        eval_n_pas=focus.n_pas,
        eval_capacity=focus_design.capacity if focus_design is not None else NOT_APPLICABLE,
        mc_mean=mc_mean,
        mc_std_error=mc_std_error,
        mc_samples=mc_samples,
    )


def sweep_points(cfg: ScenarioConfig) -> List[Tuple[Optional[AxisValue], Optional[AxisValue]]]:
    """(series value, axis value) pairs, series outermost."""
    series = list(cfg.sweep.series_values) or [None]
    values = list(cfg.sweep.values) or [None]
    return [(s, v) for s in series for v in values]


def run_sweep(cfg: ScenarioConfig, workers: Optional[int] = None) -> List[SweepRow]:
    """
    Evaluate every sweep point of a scenario.

    Points may run concurrently; rows are returned in axis order and do
    not depend on the worker count.

    Args:
        cfg: Validated scenario
        workers: Concurrent points; cfg.mc.workers or HYBRID_IRS_WORKERS when omitted

    Returns:
        One SweepRow per (series, axis) coordinate
    """
    workers = workers or cfg.mc.workers or default_workers()
    points = sweep_points(cfg)
    start_time = time.time()

    if workers == 1 or len(points) == 1:
        rows = [evaluate_point(cfg, s, v, mc_workers=workers) for s, v in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda point: evaluate_point(cfg, *point), points))

    duration_ms = (time.time() - start_time) * 1000
    put_simple_metric("SweepDuration", duration_ms, "Milliseconds")
    put_simple_metric("SweepPoints", len(rows), "Count")
    log_event(
        "sweep_completed",
        {"name": cfg.name, "axis": cfg.sweep.axis, "points": len(rows), "workers": workers},
    )
    return rows


def rows_to_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in rows], columns=list(COLUMNS))


def _json_value(value: Any) -> Any:
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
    return value


def format_rows(rows: Sequence[SweepRow], fmt: str = "csv") -> str:
    """Render rows as CSV (header + fixed columns, 17 significant digits) or a JSON array."""
    if fmt == "csv":
        buffer = io.StringIO()
        rows_to_frame(rows).to_csv(
            buffer, index=False, float_format=FLOAT_FORMAT, na_rep=CSV_NA, lineterminator="\n"
        )
        return buffer.getvalue()
    if fmt == "json":
        records = [{k: _json_value(v) for k, v in asdict(r).items()} for r in rows]
        return json.dumps(records, indent=2) + "\n"
    raise OutputError(f"unsupported output format '{fmt}'", "<none>")


def write_output(rows: Sequence[SweepRow], path: Union[str, Path], fmt: str = "csv") -> Path:
    """
    Write sweep rows to a file.

    Args:
        rows: Sweep rows
        path: Destination file
        fmt: "csv" or "json"

    Returns:
        The written path
    """
    path = Path(path)
    text = format_rows(rows, fmt)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as e:
        raise OutputError(f"failed to write sweep output ({e.strerror or e})", str(path))
    log_event("output_written", {"path": str(path), "format": fmt, "rows": len(rows)})
    return path


def read_output(path: Union[str, Path], fmt: str = "csv") -> pd.DataFrame:
    """Load a written sweep back into a DataFrame."""
    path = Path(path)
    if fmt == "csv":
        return pd.read_csv(path, na_values=[CSV_NA], keep_default_na=False, float_precision="round_trip")
    with open(path, encoding="utf-8") as handle:
        records = json.load(handle)
    frame = pd.DataFrame(records, columns=list(COLUMNS))
    frame["axis_value"] = frame["axis_value"].map(lambda v: float(v) if v is not None else math.nan)
    return frame


def landmark_report(cfg: ScenarioConfig, rows: Sequence[SweepRow]) -> List[Dict[str, Any]]:
    """
    Compare the reproduced capacity-maximizing rho with the expected values.

    The reproduced argmax uses the approximate capacity of each rho
    allocation (ties to the smaller rho); the Monte Carlo estimate at
    that point, when available, is reported next to it.
    """
    if cfg.landmark is None or cfg.sweep.axis != "rho":
        return []

    report = []
    groups: Dict[str, List[SweepRow]] = {}
    for row in rows:
        groups.setdefault(row.series, []).append(row)

    for series, group in groups.items():
        candidates = [r for r in group if not math.isnan(r.eval_capacity)]
        if not candidates:
            continue
        best = max(candidates, key=lambda r: (r.eval_capacity, -r.axis_value))
        expected = cfg.landmark.expected.get(series)
        entry = {
            "series": series,
            "expected_argmax": expected,
            "reproduced_argmax": best.axis_value,
            "approx_capacity": best.eval_capacity,
            "mc_mean": None if math.isnan(best.mc_mean) else best.mc_mean,
            "mc_std_error": None if math.isnan(best.mc_std_error) else best.mc_std_error,
            "within_tolerance": None,
        }
        if entry["mc_mean"] is not None:
            entry["approx_minus_mc"] = best.eval_capacity - best.mc_mean
        if expected is not None:
            entry["within_tolerance"] = abs(best.axis_value - expected) <= cfg.landmark.tolerance + 1e-12
            if not entry["within_tolerance"]:
                logger.warning(
                    f"landmark discrepancy for series '{series}': expected rho* = {expected}, "
                    f"reproduced {best.axis_value}"
                )
                log_event("landmark_discrepancy", entry)
        report.append(entry)
    return report
