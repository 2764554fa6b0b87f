"""Unit tests for the sweep-report renderer."""

import numpy as np
import pytest

from fjmgt_report import FigureSpec, SchemaError, fit_loglog, render
from fjmgt_report.render import (
    main,
    read_sweep_csv,
    reference_slope_from_kernel,
    theorem_threshold,
)

HEADER = "tau,error,norm_kind,family,alpha_or_delta0,dt,n_modes,status"


def sweep_csv(tmp_path, rows, name="sweep.csv", header=HEADER):
    path = tmp_path / name
    path.write_text(header + "\n" + "\n".join(rows) + ("\n" if rows else ""))
    return path


def power_law_rows(slope, coeff=3.0, kernel="abel(0.75)", n=6):
    taus = 0.2 * 2.0 ** -np.arange(n)
    return [
        f"{tau:.17g},{coeff * tau**slope:.17g},west_rate,westervelt,"
        f"{kernel},0.001,64,ok"
        for tau in taus
    ]


class TestSchema:
    def test_missing_column_is_named(self, tmp_path):
        path = sweep_csv(tmp_path, ["0.1,0.01,west_rate,westervelt,abel(0.75),0.001,64"],
                         header=HEADER.rsplit(",", 1)[0])
        with pytest.raises(SchemaError, match="status"):
            read_sweep_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            read_sweep_csv(path)

    def test_header_only(self, tmp_path):
        with pytest.raises(SchemaError, match="no data rows"):
            read_sweep_csv(sweep_csv(tmp_path, []))

    def test_reads_contract_columns(self, tmp_path):
        s = read_sweep_csv(sweep_csv(tmp_path, power_law_rows(0.75)))
        assert s.family == "westervelt" and s.kind == "west_rate"
        assert s.kernel == "abel(0.75)"
        assert s.taus.size == 6 and all(st == "ok" for st in s.statuses)


class TestFit:
    def test_exact_power_law_is_exact(self):
        taus = np.array([0.2, 0.1, 0.05, 0.025])
        slope, intercept, residual = fit_loglog(taus, 2.0 * taus**1.0)
        assert slope == pytest.approx(1.0, abs=1e-13)
        assert residual < 1e-12

    def test_zero_rows_dropped(self):
        slope, _, _ = fit_loglog([0.2, 0.1, 0.05, 0.025], [0.2, 0.1, 0.05, 0.0])
        assert slope == pytest.approx(1.0, abs=1e-12)

    def test_insufficient_data(self):
        with pytest.raises(SchemaError, match="insufficient"):
            fit_loglog([0.1, 0.05], [0.1, 0.05])


class TestReference:
    def test_kernel_labels(self):
        assert reference_slope_from_kernel("abel(0.75)") == 0.75
        assert reference_slope_from_kernel("delta0") == 1.0
        assert reference_slope_from_kernel("tabulated(n=40)") is None

    def test_threshold_mapping(self):
        assert theorem_threshold("westervelt", "west_rate", 0.75) == pytest.approx(0.65)
        assert theorem_threshold("kuznetsov-blackstock", "blackstock_rate", 0.75) \
            == pytest.approx(0.65)
        assert theorem_threshold("kuznetsov-blackstock", "west_rate", 0.75) is None
        assert theorem_threshold("westervelt", "west_rate", None) is None


class TestRender:
    def test_figure_and_summary_written(self, tmp_path):
        csv_path = sweep_csv(tmp_path, power_law_rows(0.75))
        out = tmp_path / "fig.png"
        text = render(FigureSpec(csv_paths=[csv_path], output_path=str(out)))
        assert out.exists() and out.stat().st_size > 0
        assert (tmp_path / "fig.txt").exists()
        assert "fitted slope = 0.750000000" in text
        assert "PASS" in text
        assert not list(tmp_path.glob("*.part"))

    def test_exact_power_law_summary(self, tmp_path):
        csv_path = sweep_csv(tmp_path, power_law_rows(1.0, kernel="delta0"))
        text = render(FigureSpec(csv_paths=[csv_path],
                                 output_path=str(tmp_path / "f.png")))
        assert "reference slope a = 1" in text
        line = next(l for l in text.splitlines() if "residual" in l)
        assert float(line.split("=")[1]) < 1e-12

    def test_failed_rows_excluded_and_noted(self, tmp_path):
        rows = power_law_rows(0.75, n=5) + [
            "0.00625,nan,west_rate,westervelt,abel(0.75),0.001,64,degenerate"
        ]
        text = render(FigureSpec(csv_paths=[sweep_csv(tmp_path, rows)],
                                 output_path=str(tmp_path / "f.png")))
        assert "1 failed run(s) excluded" in text
        assert "5 ok, 1 failed" in text

    def test_only_failed_rows_is_insufficient(self, tmp_path):
        rows = ["0.1,nan,west_rate,westervelt,abel(0.75),0.001,64,degenerate"] * 4
        with pytest.raises(SchemaError, match="insufficient"):
            render(FigureSpec(csv_paths=[sweep_csv(tmp_path, rows)],
                              output_path=str(tmp_path / "f.png")))

    def test_multiple_series_overlay(self, tmp_path):
        a = sweep_csv(tmp_path, power_law_rows(0.75), name="a.csv")
        b = sweep_csv(tmp_path, power_law_rows(1.0, kernel="delta0"), name="b.csv")
        text = render(FigureSpec(csv_paths=[a, b],
                                 output_path=str(tmp_path / "f.png")))
        assert text.count("fitted slope") == 2


class TestCli:
    def test_success_exit_zero(self, tmp_path, capsys):
        csv_path = sweep_csv(tmp_path, power_law_rows(0.75))
        code = main([str(csv_path), "--out", str(tmp_path / "f.png")])
        assert code == 0
        assert "fitted slope" in capsys.readouterr().out

    def test_empty_csv_fails_gracefully(self, tmp_path, capsys):
        path = tmp_path / "empty.csv"
        path.write_text("")
        code = main([str(path), "--out", str(tmp_path / "f.png")])
        assert code == 2
        assert "empty" in capsys.readouterr().err

    def test_reference_override(self, tmp_path, capsys):
        csv_path = sweep_csv(tmp_path, power_law_rows(0.7))
        code = main([str(csv_path), "--out", str(tmp_path / "f.png"),
                     "--reference-slope", "0.7"])
        assert code == 0
        assert "reference slope a = 0.7" in capsys.readouterr().out
