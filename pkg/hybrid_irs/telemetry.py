"""
Structured logging helpers.

Events and metrics are written as single-line JSON records through the
standard logging tree so they can be filtered or shipped by whatever
handler the caller installs.
"""

import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, Dict

logger = logging.getLogger(__name__)

METRIC_NAMESPACE = "HybridIrs/Simulator"


def _json_default(value: Any):
    # numpy scalars and arrays
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


def log_event(event_type: str, data: Dict[str, Any]):
    """
    Log structured event data.

    Args:
        event_type: Type of event being logged
        data: Event data to log
    """
    log_entry = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "event_type": event_type,
        "data": data,
    }
    logger.info(json.dumps(log_entry, default=_json_default))


def put_simple_metric(metric_name: str, value: float, unit: str = "Count"):
    """
    Record a simple metric as a structured log line.

    Args:
        metric_name: Name of the metric
        value: Metric value
        unit: Metric unit (Count, Milliseconds, ...)
    """
    try:
        record = {
            "namespace": METRIC_NAMESPACE,
            "metric_name": metric_name,
            "value": float(value),
            "unit": unit,
        }
        logger.info(json.dumps(record))
    except (TypeError, ValueError) as e:
        logger.warning(f"Failed to put metric {metric_name}: {e}")


def configure_logging(verbosity: int = 0):
    """Install a stderr handler on the root logger for command-line use."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
