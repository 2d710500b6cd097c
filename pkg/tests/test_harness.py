"""Experiment harness: configs, determinism, reports, point-file parsing."""

import json
import math

import pytest

from slidestats import (
    Aggregate,
    ConfigError,
    ExperimentConfig,
    ExperimentReport,
    ParseError,
    ProcessSpec,
    StatisticRequest,
    emit_report,
    load_points,
    load_report,
    render_report,
    render_reports,
    run_experiment,
)


def small_config(**overrides):
    base = dict(
        process=ProcessSpec("uniform_cube", {"dim": 2}),
        sample_size=40,
        replicates=5,
        statistics=(
            StatisticRequest("slide", (1, 2)),
            StatisticRequest("level", (1, 2)),
        ),
        master_seed=314,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestStatisticRequest:
    def test_orders_are_sorted(self):
        assert StatisticRequest("slide", (2, 1)).orders == (1, 2)

    def test_duplicate_orders_rejected(self):
        with pytest.raises(ConfigError):
            StatisticRequest("slide", (1, 1))

    def test_slide_orders_capped(self):
        with pytest.raises(ConfigError):
            StatisticRequest("slide", (1, 5))
        assert StatisticRequest("level", (1, 7)).orders == (1, 7)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            StatisticRequest("entropy", (1,))

    def test_key(self):
        assert StatisticRequest("assembly", (1,)).key(1) == "assembly:1"


class TestConfigValidation:
    def test_sample_size_too_small(self):
        with pytest.raises(ConfigError):
            small_config(sample_size=1)

    def test_replicates_positive(self):
        with pytest.raises(ConfigError):
            small_config(replicates=0)

    def test_bool_is_not_an_int(self):
        with pytest.raises(ConfigError):
            small_config(replicates=True)

    def test_repeated_statistic_kind(self):
        with pytest.raises(ConfigError):
            small_config(
                statistics=(
                    StatisticRequest("slide", (1,)),
                    StatisticRequest("slide", (2,)),
                )
            )

    def test_assembly_respects_pairwise_cap(self):
        with pytest.raises(ConfigError):
            small_config(
                statistics=(StatisticRequest("assembly", (1,)),),
                sample_size=10_001,
            )

    def test_dict_round_trip(self):
        config = small_config()
        assert ExperimentConfig.from_dict(config.to_dict()) == config

    def test_unknown_key_rejected(self):
        data = small_config().to_dict()
        data["verbosity"] = 3
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(data)

    def test_missing_required_key(self):
        data = small_config().to_dict()
        del data["replicates"]
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(data)


class TestRunExperiment:
    def test_end_to_end(self):
        report = run_experiment(small_config())
        assert set(report.per_replicate) >= {
            "slide:1",
            "slide:2",
            "slide:2:oracle_gap",
            "level:1",
            "level:2",
        }
        assert len(report.per_replicate["slide:1"]) == 5
        agg = report.aggregates["slide:1"]
        assert agg.count == 5 and agg.sd is not None and agg.mean > 0.0
        assert report.dimension_estimates is not None
        assert report.tangibility is not None
        assert report.failed_replicates == ()
        assert report.provenance["generator"] == "Philox"
        assert report.provenance["master_seed"] == 314

    def test_deterministic(self):
        a = run_experiment(small_config())
        b = run_experiment(small_config())
        assert a.to_dict() == b.to_dict()

    def test_worker_count_is_invisible(self):
        serial = run_experiment(small_config(replicates=6))
        pooled = run_experiment(small_config(replicates=6, workers=2))
        assert serial.per_replicate == pooled.per_replicate

    def test_single_replicate_has_no_sd(self):
        report = run_experiment(small_config(replicates=1))
        assert report.aggregates["slide:1"].sd is None

    def test_cross_check_off_drops_oracle_gap(self):
        report = run_experiment(small_config(cross_check=False))
        assert "slide:2:oracle_gap" not in report.per_replicate

    def test_tangibility_needs_two_orders(self):
        config = small_config(statistics=(StatisticRequest("slide", (1,)),))
        report = run_experiment(config)
        assert report.tangibility is None
        assert report.dimension_estimates is not None

    def test_all_replicates_fail_on_coincident_file(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("1.0,0.0\n1.0,0.0\n2.0,0.0\n")
        config = small_config(
            process=ProcessSpec("from_file", {"path": str(path)}),
            sample_size=3,
            replicates=2,
            statistics=(StatisticRequest("slide", (1,)),),
        )
        report = run_experiment(config)
        assert report.per_replicate == {}
        assert report.aggregates == {}
        assert report.dimension_estimates is None
        assert len(report.failed_replicates) == 2
        assert all(f.attempts == 4 for f in report.failed_replicates)
        assert "coincid" in report.failed_replicates[0].error

    def test_uniform_square_values_are_sane(self):
        # rho_1 over the unit square sits near 1/2 already at n = 300.
        config = small_config(sample_size=300, replicates=3)
        report = run_experiment(config)
        assert abs(report.aggregates["slide:1"].mean - 0.5) < 0.1
        assert abs(report.dimension_estimates[1] - 2.0) < 0.5


class TestSerialization:
    def test_json_round_trip(self, tmp_path):
        report = run_experiment(small_config())
        path = tmp_path / "report.json"
        emit_report(report, "json", path)
        loaded = load_report(path)
        assert loaded.to_dict() == report.to_dict()
        assert loaded.aggregates["slide:1"] == report.aggregates["slide:1"]

    def test_schema_version_checked(self, tmp_path):
        report = run_experiment(small_config(replicates=1))
        data = json.loads(render_report(report, "json"))
        data["schema_version"] = 999
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ParseError):
            load_report(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_report(path)

    def test_truncated_report(self, tmp_path):
        path = tmp_path / "bad.json"
        config = small_config(replicates=1).to_dict()
        path.write_text(json.dumps({"schema_version": 1, "config": config}))
        with pytest.raises(ParseError, match="malformed report"):
            load_report(path)

    def test_csv_rendering(self):
        report = run_experiment(small_config(replicates=2))
        lines = render_reports([report], "csv").splitlines()
        assert lines[0] == "process,statistic,order,method,replicates,mean,sd"
        assert len(lines) == 5  # header + slide 1,2 + level 1,2
        first = lines[1].split(",")
        assert first[0] == "uniform_cube(dim=2)"
        assert first[1] == "slide" and first[2] == "1"
        assert first[3] == "closed_form"
        # repr round-trips the float exactly
        assert float(first[5]) == report.aggregates["slide:1"].mean

    def test_table_rendering(self):
        report = run_experiment(small_config(replicates=2))
        text = render_reports([report], "table")
        lines = text.splitlines()
        assert lines[0].split() == [
            "process", "statistic", "n", "reps", "mean", "sd", "1/mean",
        ]
        assert set(lines[1]) <= {"-", " "}
        assert "rho" in text and "lambda" in text
        mean = report.aggregates["slide:1"].mean
        assert f"{1.0 / mean:.6f}" in lines[2]

    def test_unknown_format(self):
        report = run_experiment(small_config(replicates=1))
        with pytest.raises(ConfigError):
            render_reports([report], "yaml")

    def test_aggregate_equality(self):
        assert Aggregate(1.0, None, 1) == Aggregate(1.0, None, 1)


class TestLoadPoints:
    def test_csv_with_header_and_comments(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("x,y\n# comment\n0.0,1.0\n\n2.0,3.0\n")
        points = load_points(path)
        assert points.coords.tolist() == [[0.0, 1.0], [2.0, 3.0]]

    def test_csv_reports_offending_line(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("0.0,1.0\n2.0,oops\n")
        with pytest.raises(ParseError, match=r"line 2: non-numeric value 'oops'"):
            load_points(path)

    def test_csv_column_mismatch(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("0.0,1.0\n2.0\n")
        with pytest.raises(ParseError, match=r"line 2: expected 2 columns"):
            load_points(path)

    def test_csv_no_data(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("# nothing here\n")
        with pytest.raises(ParseError, match="no data rows"):
            load_points(path)

    def test_json_flat_array(self, tmp_path):
        path = tmp_path / "pts.json"
        path.write_text("[1.0, 2.5, 4.0]")
        points = load_points(path)
        assert points.dimension == 1
        assert points.coords[:, 0].tolist() == [1.0, 2.5, 4.0]

    def test_json_coordinate_rows(self, tmp_path):
        path = tmp_path / "pts.json"
        path.write_text("[[0, 0], [1, 0], [0, 2]]")
        points = load_points(path)
        assert points.coords.shape == (3, 2)

    def test_json_rejects_booleans(self, tmp_path):
        path = tmp_path / "pts.json"
        path.write_text("[1.0, true, 2.0]")
        with pytest.raises(ParseError):
            load_points(path)

    def test_json_ragged_rows(self, tmp_path):
        path = tmp_path / "pts.json"
        path.write_text("[[1.0, 2.0], [3.0]]")
        with pytest.raises(ParseError):
            load_points(path)

    def test_unknown_suffix_needs_format(self, tmp_path):
        path = tmp_path / "pts.xyz"
        path.write_text("1.0\n2.0\n")
        with pytest.raises(ParseError, match="cannot infer format"):
            load_points(path)
        assert len(load_points(path, format="csv")) == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_points(tmp_path / "absent.csv")

    def test_nan_rejected(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("1.0\nnan\n")
        with pytest.raises(ParseError):
            load_points(path)


class TestReportFromDict:
    def test_rejects_non_object(self):
        with pytest.raises(ParseError):
            ExperimentReport.from_dict([1, 2, 3])
