"""Tests for sweep result files."""

import csv

import pytest

from tests.test_harness import make_result


@pytest.fixture
def thirty_record_result(trained_desk, small_split):
    from src.harness import SweepConfig, run_sweep

    config = SweepConfig(
        treatments=["synapse_knockout"], layers=["conv_1", "dense_1"], magnitudes=[0.0, 0.4, 0.8], trials=5
    )
    return run_sweep(config, network=trained_desk, dataset=small_split.test)


class TestCsvExport:
    """Test the trial CSV."""

    def test_empty_result_is_header_only(self, tmp_path):
        from src.harness import SweepResult, export

        path = export(SweepResult(), "csv", tmp_path / "empty.csv")
        assert path.read_text() == "treatment,layer,magnitude,trial,seed,top_k,accuracy,n_images,wall_ms\n"

    def test_thirty_records_thirty_one_lines(self, thirty_record_result, tmp_path):
        from src.harness import export

        path = export(thirty_record_result, "csv", tmp_path / "sweep.csv")
        lines = path.read_text().splitlines()
        assert len(lines) == 31
        assert lines[1].startswith("synapse_knockout,conv_1,0.0,0,")

    def test_rows_in_grid_order_even_when_records_are_not(self, thirty_record_result, tmp_path):
        from src.harness import export

        shuffled = thirty_record_result.model_copy(
            update={"records": list(reversed(thirty_record_result.records))}
        )
        a = export(thirty_record_result, "csv", tmp_path / "a.csv").read_text()
        b = export(shuffled, "csv", tmp_path / "b.csv").read_text()
        assert a == b

    def test_identical_results_identical_bytes(self, thirty_record_result, tmp_path):
        from src.harness import export

        a = export(thirty_record_result, "csv", tmp_path / "a.csv").read_bytes()
        b = export(thirty_record_result.model_copy(deep=True), "csv", tmp_path / "b.csv").read_bytes()
        assert a == b

    def test_unknown_format(self, tmp_path):
        from src.errors import DataError
        from src.harness import SweepResult, export

        with pytest.raises(DataError):
            export(SweepResult(), "xml", tmp_path / "r.xml")


class TestLoadResult:
    """Test reading results back."""

    def test_json_round_trip(self, thirty_record_result, tmp_path):
        from src.harness import export, load_result

        path = export(thirty_record_result, "json", tmp_path / "sweep.json")
        assert load_result(path).model_dump() == thirty_record_result.model_dump()

    def test_csv_recomputes_cells(self, thirty_record_result, tmp_path):
        from src.harness import export, load_result

        loaded = load_result(export(thirty_record_result, "csv", tmp_path / "sweep.csv"))
        assert loaded.baseline is None
        assert len(loaded.records) == 30
        for ours, theirs in zip(loaded.cells, thirty_record_result.cells, strict=True):
            assert ours.key == theirs.key
            assert ours.mean == pytest.approx(theirs.mean)
            assert ours.std == pytest.approx(theirs.std)

    def test_bad_csv_header(self, tmp_path):
        from src.errors import DataError
        from src.harness import load_result

        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(DataError, match="header"):
            load_result(path)

    def test_missing_file(self, tmp_path):
        from src.errors import DataError
        from src.harness import load_result

        with pytest.raises(DataError):
            load_result(tmp_path / "absent.json")


class TestPlotSeries:
    """Test per-layer series output."""

    def test_one_series_per_layer(self, tmp_path):
        from src.harness import write_plot_series

        result = make_result(
            {(layer, m): [0.5 - m / 4, 0.6 - m / 4] for layer in ("conv_1", "conv_2", "dense_1") for m in (0.0, 0.5)}
        )
        paths = write_plot_series(result, tmp_path / "series")
        assert sorted(p.name for p in paths) == [
            "synapse_knockout__conv_1.csv",
            "synapse_knockout__conv_2.csv",
            "synapse_knockout__dense_1.csv",
        ]

    def test_values_rederivable_from_records(self, thirty_record_result, tmp_path):
        import numpy as np

        from src.harness import write_plot_series

        write_plot_series(thirty_record_result, tmp_path)
        with open(tmp_path / "synapse_knockout__dense_1.csv", newline="") as f:
            rows = list(csv.DictReader(f))
        assert [float(r["magnitude"]) for r in rows] == [0.0, 0.4, 0.8]
        for row in rows:
            values = [
                r.accuracy
                for r in thirty_record_result.records
                if r.layer == "dense_1" and r.magnitude == float(row["magnitude"])
            ]
            assert float(row["mean"]) == pytest.approx(np.mean(values))
            assert float(row["std"]) == pytest.approx(np.std(values, ddof=1))
            assert int(row["trials"]) == 5

    def test_empty_result_writes_nothing(self, tmp_path):
        from src.harness import SweepResult, write_plot_series

        assert write_plot_series(SweepResult(), tmp_path) == []
