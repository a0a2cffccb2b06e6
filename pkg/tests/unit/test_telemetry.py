"""
Unit tests for structured logging helpers.
"""

import json
import logging

from hybrid_irs.telemetry import METRIC_NAMESPACE, configure_logging, log_event, put_simple_metric


class TestLogEvent:
    """Test structured event records."""

    def test_record_shape(self, mocker):
        """Test that an event is one JSON line with type and data."""
        mock_logger = mocker.patch("hybrid_irs.telemetry.logger")
        log_event("sweep_completed", {"points": 3})

        mock_logger.info.assert_called_once()
        record = json.loads(mock_logger.info.call_args[0][0])
        assert record["event_type"] == "sweep_completed"
        assert record["data"] == {"points": 3}
        assert "timestamp" in record

    def test_numpy_values(self, mocker):
        """Test that numpy values serialize."""
        import numpy as np

        mock_logger = mocker.patch("hybrid_irs.telemetry.logger")
        log_event("mc_estimate_completed", {"mean": np.float64(1.5), "rates": np.arange(2)})
        record = json.loads(mock_logger.info.call_args[0][0])
        assert record["data"] == {"mean": 1.5, "rates": [0, 1]}


class TestMetrics:
    """Test metric records."""

    def test_metric_record(self, mocker):
        """Test namespace, value and unit."""
        mock_logger = mocker.patch("hybrid_irs.telemetry.logger")
        put_simple_metric("SweepDuration", 12, "Milliseconds")
        record = json.loads(mock_logger.info.call_args[0][0])
        assert record == {
            "namespace": METRIC_NAMESPACE,
            "metric_name": "SweepDuration",
            "value": 12.0,
            "unit": "Milliseconds",
        }

    def test_bad_value_is_a_warning(self, mocker):
        """Test that an unconvertible value is logged, not raised."""
        mock_logger = mocker.patch("hybrid_irs.telemetry.logger")
        put_simple_metric("SweepPoints", "many")
        mock_logger.warning.assert_called_once()
        mock_logger.info.assert_not_called()


class TestConfigureLogging:
    """Test CLI log levels."""

    def test_levels(self, mocker):
        """Test the verbosity to level mapping."""
        mock_config = mocker.patch("hybrid_irs.telemetry.logging.basicConfig")
        for verbosity, level in ((0, logging.WARNING), (1, logging.INFO), (2, logging.DEBUG), (5, logging.DEBUG)):
            configure_logging(verbosity)
            assert mock_config.call_args.kwargs["level"] == level
            assert mock_config.call_args.kwargs["force"] is True
