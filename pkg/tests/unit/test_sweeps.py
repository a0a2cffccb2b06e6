"""
Unit tests for sweeps, their output formats and landmark reports.
"""

import json
import math

import pandas as pd
import pytest

from hybrid_irs.config import parse_config
from hybrid_irs.errors import InvalidSweepAxis, OutputError
from hybrid_irs.sweeps import (
    COLUMNS,
    apply_axis,
    axis_label,
    axis_number,
    evaluate_point,
    format_rows,
    landmark_report,
    read_output,
    run_sweep,
    write_output,
)


@pytest.fixture
def budget_cfg():
    """Small budget sweep with two Rician series and no Monte Carlo."""
    return parse_config({
        "sweep": {
            "axis": "budget",
            "values": [200, 400, 800],
            "series": {"axis": "rician_db", "values": ["los", 10]},
        }
    })


@pytest.fixture
def saturated_rho_cfg():
    """LoS budget-percentage sweep in the saturated power regime."""
    return parse_config({
        "w0": 3000,
        "p_irs_dbm": 15,
        "sweep": {
            "axis": "rho",
            "values": [0.0, 0.35, 0.7, 1.0],
            "series": {"axis": "rician_db", "values": ["los"]},
        },
        "landmark": {"expected": {"los": 0.35}, "tolerance": 0.05},
    })


class TestAxes:
    """Test sweep coordinates."""

    def test_apply_axis(self, default_params):
        """Test each axis on the default scenario."""
        assert apply_axis(default_params, "budget", 500).w0 == 500.0
        assert apply_axis(default_params, "rician_db", "los").pure_los
        assert apply_axis(default_params, "p_irs_dbm", 30).p_irs == pytest.approx(1.0)
        assert apply_axis(default_params, "cost_ratio", 3).w_act == 3.0
        assert apply_axis(default_params, "n_elements", 10).w0 == 60.0
        assert apply_axis(default_params, "rho", 0.5) is default_params

    def test_unknown_axis(self, default_params):
        """Test that unknown axes are rejected."""
        with pytest.raises(InvalidSweepAxis):
            apply_axis(default_params, "frequency", 1)

    def test_labels(self):
        """Test series labels and numeric axis values."""
        assert axis_label("LoS") == "los"
        assert axis_label(15) == "15"
        assert axis_label(0.35) == "0.35"
        assert axis_number("rician_db", "los") == math.inf
        assert axis_number("rician_db", "rayleigh") == -math.inf
        assert axis_number("budget", 500) == 500.0


class TestEvaluatePoint:
    """Test single sweep points."""

    def test_schemes(self, budget_cfg):
        """Test that the optimized hybrid dominates the fixed schemes."""
        row = evaluate_point(budget_cfg, "los", 800)
        assert row.series == "los"
        assert row.axis_value == 800.0
        assert row.hybrid_opt_capacity >= row.hybrid_equal_capacity
        assert row.hybrid_opt_capacity >= row.all_passive_capacity
        assert row.hybrid_opt_capacity >= row.all_active_capacity
        assert row.eval_capacity == pytest.approx(row.hybrid_opt_capacity)
        assert row.mc_samples == 0 and math.isnan(row.mc_mean)

    def test_passive_only_has_no_active_scheme(self):
        """Test that the all-active scheme is not applicable without amplification power."""
        cfg = parse_config({"p_irs_dbm": -60, "sweep": {"axis": "budget", "values": [100]}})
        row = evaluate_point(cfg, None, 100)
        assert row.regime == "PassiveOnly"
        assert math.isnan(row.all_active_capacity)
        assert row.n_act == 0

    def test_n_elements_focus(self):
        """Test that the element-count axis evaluates N active plus N passive elements."""
        cfg = parse_config({"sweep": {"axis": "n_elements", "values": [20]}})
        row = evaluate_point(cfg, None, 20)
        assert (row.eval_n_act, row.eval_n_pas) == (20, 20)

    def test_monte_carlo_column(self):
        """Test that enabling Monte Carlo fills the estimate columns."""
        cfg = parse_config({"sweep": {"axis": "n_elements", "values": [10]}, "mc": {"samples": 20, "seed": 3}})
        row = evaluate_point(cfg, None, 10)
        assert row.mc_samples == 20
        assert row.mc_mean > 0.0 and row.mc_std_error > 0.0


class TestRunSweep:
    """Test whole sweeps."""

    def test_row_order(self, budget_cfg):
        """Test series-major, axis-minor row order."""
        rows = run_sweep(budget_cfg)
        assert [(r.series, r.axis_value) for r in rows] == [
            ("los", 200.0), ("los", 400.0), ("los", 800.0),
            ("10", 200.0), ("10", 400.0), ("10", 800.0),
        ]

    def test_workers_do_not_change_rows(self, budget_cfg):
        """Test identical rows for one and three workers."""
        assert run_sweep(budget_cfg, workers=1) == run_sweep(budget_cfg, workers=3)

    def test_los_dominates_rician(self, budget_cfg):
        """Test that pure LoS is never worse than K = 10 dB at the same budget."""
        rows = run_sweep(budget_cfg)
        los = {r.axis_value: r.hybrid_opt_capacity for r in rows if r.series == "los"}
        rician = {r.axis_value: r.hybrid_opt_capacity for r in rows if r.series == "10"}
        for budget, capacity in los.items():
            assert capacity >= rician[budget]

    def test_rayleigh_rho_curve_is_non_increasing(self):
        """Test that spending more budget on active elements never helps under Rayleigh fading here."""
        cfg = parse_config({
            "rician_db": "rayleigh",
            "sigma2_amp_dbm": -50,
            "p_irs_dbm": -25,
            "sweep": {"axis": "rho", "values": {"start": 0.0, "stop": 1.0, "step": 0.05}},
        })
        rows = run_sweep(cfg)
        capacities = [r.eval_capacity for r in rows if not math.isnan(r.eval_capacity)]
        assert len(capacities) > 2
        assert all(b <= a for a, b in zip(capacities, capacities[1:]))
        assert rows[0].n_act == 0


class TestOutput:
    """Test CSV and JSON output."""

    def test_empty_csv_is_header_only(self):
        """Test that zero rows give the header line."""
        assert format_rows([], "csv") == ",".join(COLUMNS) + "\n"

    def test_csv_not_applicable(self):
        """Test that NaN cells are written as NA."""
        cfg = parse_config({"p_irs_dbm": -60, "sweep": {"axis": "budget", "values": [100]}})
        text = format_rows(run_sweep(cfg), "csv")
        assert ",NA," in text.splitlines()[1]

    def test_json_values(self):
        """Test JSON nulls and infinite axis values."""
        cfg = parse_config({"sweep": {"axis": "rician_db", "values": ["los"]}})
        records = json.loads(format_rows(run_sweep(cfg), "json"))
        assert records[0]["axis_value"] == "inf"
        assert records[0]["mc_mean"] is None
        assert list(records[0]) == list(COLUMNS)

    def test_csv_round_trip(self, budget_cfg, tmp_path):
        """Test reading a written CSV back."""
        rows = run_sweep(budget_cfg)
        path = write_output(rows, tmp_path / "sweep.csv")
        frame = read_output(path)
        assert list(frame.columns) == list(COLUMNS)
        assert frame["n_act"].tolist() == [r.n_act for r in rows]
        assert frame["hybrid_opt_capacity"].tolist() == pytest.approx([r.hybrid_opt_capacity for r in rows], rel=1e-15)
        assert frame["mc_mean"].isna().all()

    def test_json_round_trip(self, budget_cfg, tmp_path):
        """Test reading a written JSON file back."""
        rows = run_sweep(budget_cfg)
        frame = read_output(write_output(rows, tmp_path / "sweep.json", "json"), "json")
        assert isinstance(frame, pd.DataFrame)
        assert frame["series"].tolist() == [r.series for r in rows]

    def test_repeat_output_is_byte_identical(self, budget_cfg, tmp_path):
        """Test that the same sweep writes the same bytes."""
        first = write_output(run_sweep(budget_cfg), tmp_path / "a.csv").read_bytes()
        second = write_output(run_sweep(budget_cfg, workers=2), tmp_path / "b.csv").read_bytes()
        assert first == second

    def test_unwritable_path(self, budget_cfg, tmp_path):
        """Test that write failures raise OutputError."""
        blocker = tmp_path / "blocker"
        blocker.write_text("not a directory")
        with pytest.raises(OutputError):
            write_output([], blocker / "sweep.csv")

    def test_unknown_format(self):
        """Test that unsupported formats are rejected."""
        with pytest.raises(OutputError):
            format_rows([], "xml")


class TestLandmarks:
    """Test landmark discrepancy reports."""

    def test_discrepancy_is_reported(self, saturated_rho_cfg, mocker):
        """Test that a saturated LoS scenario moves the argmax away from the expected value."""
        mock_log = mocker.patch("hybrid_irs.sweeps.log_event")
        rows = run_sweep(saturated_rho_cfg)
        report = landmark_report(saturated_rho_cfg, rows)

        assert len(report) == 1
        assert report[0]["reproduced_argmax"] == 1.0
        assert report[0]["expected_argmax"] == 0.35
        assert report[0]["within_tolerance"] is False
        events = [call.args[0] for call in mock_log.call_args_list]
        assert "landmark_discrepancy" in events

    def test_within_tolerance(self, saturated_rho_cfg):
        """Test a matching expectation."""
        from dataclasses import replace

        cfg = replace(saturated_rho_cfg, landmark=replace(saturated_rho_cfg.landmark, expected={"los": 0.98}))
        report = landmark_report(cfg, run_sweep(cfg))
        assert report[0]["within_tolerance"] is True

    def test_only_for_rho_sweeps(self, budget_cfg):
        """Test that other sweeps produce no report."""
        assert landmark_report(budget_cfg, run_sweep(budget_cfg)) == []

    def test_rayleigh_expectation_is_checked(self):
        """Test that a Rayleigh series with an expected rho* of zero is compared, not skipped."""
        cfg = parse_config({
            "w0": 3000,
            "p_irs_dbm": 15,
            "sweep": {
                "axis": "rho",
                "values": [0.0, 0.5, 1.0],
                "series": {"axis": "rician_db", "values": ["rayleigh"]},
            },
            "landmark": {"expected": {"rayleigh": 0.0}},
        })
        report = landmark_report(cfg, run_sweep(cfg))
        assert report[0]["series"] == "rayleigh"
        assert report[0]["expected_argmax"] == 0.0
        assert report[0]["reproduced_argmax"] == 1.0
        assert report[0]["within_tolerance"] is False
