import pytest

from entqkd_plots import PlotRequest, SchemaError, read_sweep_csv, render
from entqkd_plots.cli import main

from conftest import make_csv


class TestReader:
    def test_reads_series_in_order(self, six_curve_csv):
        data = read_sweep_csv(six_curve_csv)
        assert data.labels == ["0", "1", "10", "100", "1000", "inf"]
        mus, values = data.metric_series("10", "p_sift_err")
        assert mus == [0.0, 0.004, 0.01, 0.04]
        assert len(values) == 4

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("mu,zeta,p_good\n0.0,0,0.5\n")
        with pytest.raises(SchemaError, match="missing columns"):
            read_sweep_csv(path)

    def test_empty_rows(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("mu,zeta,p_good,p_sift_err,av_ent,fig_merit\n")
        with pytest.raises(SchemaError, match="no data rows"):
            read_sweep_csv(path)

    def test_extra_columns_become_annotation(self, tmp_path):
        path = tmp_path / "extra.csv"
        path.write_text(
            "mu,zeta,p_good,p_sift_err,av_ent,fig_merit,vsq\n"
            "0.0,0,0.1,0.5,1.0,0.1,0.25\n")
        data = read_sweep_csv(path)
        assert data.annotation == "vsq=0.25"


class TestRender:
    def test_six_curves(self, six_curve_csv, tmp_path):
        req = PlotRequest(csv_path=str(six_curve_csv), metric="p_sift_err",
                          out_path=str(tmp_path / "fig.png"))
        series = render(req)
        assert len(series) == 6
        assert (tmp_path / "fig.png").stat().st_size > 0
        assert (tmp_path / "fig.svg").stat().st_size > 0

    def test_series_match_csv_exactly(self, six_curve_csv, tmp_path):
        data = read_sweep_csv(six_curve_csv)
        req = PlotRequest(csv_path=str(six_curve_csv), metric="av_ent",
                          out_path=str(tmp_path / "fig"))
        series = render(req)
        for label in data.labels:
            assert series[label] == data.metric_series(label, "av_ent")

    def test_deterministic_series(self, six_curve_csv, tmp_path):
        req = PlotRequest(csv_path=str(six_curve_csv), metric="fig_merit",
                          out_path=str(tmp_path / "fig"))
        assert render(req) == render(req)

    def test_single_row_plot(self, tmp_path):
        path = make_csv(tmp_path / "one.csv", [(0.01, "0", 0.1, 0.5, 1.0, 0.1)])
        req = PlotRequest(csv_path=str(path), metric="p_good",
                          out_path=str(tmp_path / "one"))
        series = render(req)
        assert series["0"] == ([0.01], [0.1])

    def test_crop_filters_and_limits(self, six_curve_csv, tmp_path):
        req = PlotRequest(csv_path=str(six_curve_csv), metric="p_sift_err",
                          out_path=str(tmp_path / "crop"), mu_min=0.004,
                          mu_max=0.04)
        series = render(req)
        for mus, _ in series.values():
            assert all(0.004 <= mu <= 0.04 for mu in mus)

    def test_crop_outside_range_rejected(self, six_curve_csv, tmp_path):
        req = PlotRequest(csv_path=str(six_curve_csv), metric="p_sift_err",
                          out_path=str(tmp_path / "crop"), mu_min=1.0)
        with pytest.raises(SchemaError, match="outside the data range"):
            render(req)

    def test_bad_metric_rejected(self, six_curve_csv, tmp_path):
        with pytest.raises(SchemaError, match="metric"):
            PlotRequest(csv_path=str(six_curve_csv), metric="qber",
                        out_path=str(tmp_path / "x"))


class TestCli:
    def test_ok(self, six_curve_csv, tmp_path, capsys):
        code = main(["--csv", str(six_curve_csv), "--metric", "p_sift_err",
                     "--out", str(tmp_path / "fig.png")])
        assert code == 0
        assert "6 curves" in capsys.readouterr().out

    def test_schema_error_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        code = main(["--csv", str(bad), "--metric", "p_good",
                     "--out", str(tmp_path / "fig")])
        assert code == 2
        assert capsys.readouterr().err.startswith("PLOT-SCHEMA-ERROR")

    def test_io_error_exit(self, tmp_path, capsys):
        code = main(["--csv", str(tmp_path / "nope.csv"), "--metric", "p_good",
                     "--out", str(tmp_path / "fig")])
        assert code == 3
        assert capsys.readouterr().err.startswith("PLOT-IO-ERROR")
