import json
import math

import numpy as np

from lfmdfn.core.lightfield import LightField4D
from lfmdfn.evaluation import MetricsReport, MetricsRow, evaluate_dataset
from lfmdfn.model.config import MDFNConfig
from lfmdfn.training.data import DatasetEntry, LfDataset, make_pair

from lfsynth import synth_lf


def _dataset(n=3):
    entries = []
    for k in range(n):
        lr, hr = make_pair(synth_lf(u=7, v=7, x=24, y=24, seed=40 + k), 2)
        entries.append(DatasetEntry(name=f"lf{k}", hr=hr, lr=lr))
    return LfDataset(entries, 2)


def _nn_predict(lr: LightField4D) -> LightField4D:
    d = lr.data[..., 0].repeat(2, axis=2).repeat(2, axis=3)
    return LightField4D(d[..., None])


class TestReportMath:
    def test_means_recompute_from_rows(self):
        report = evaluate_dataset(_dataset(), _nn_predict, scale=2, param_count=123)
        assert len(report.rows) == 3
        ps = [r.psnr for r in report.rows]
        ss = [r.ssim for r in report.rows]
        assert report.mean_psnr == sum(ps) / 3
        assert report.mean_ssim == sum(ss) / 3
        assert report.n_inf == 0
        assert report.param_count == 123
        assert report.wall_time_s >= 0

    def test_rows_keep_dataset_order(self):
        report = evaluate_dataset(_dataset(), _nn_predict, scale=2)
        assert [r.name for r in report.rows] == ["lf0", "lf1", "lf2"]

    def test_inf_rows_excluded_from_psnr_mean(self):
        rows = [
            MetricsRow("a", 30.0, 0.9),
            MetricsRow("b", math.inf, 1.0),
            MetricsRow("c", 40.0, 0.8),
        ]
        report = MetricsReport(rows=rows, scale=2)
        assert report.n_inf == 1
        assert report.mean_psnr == 35.0
        assert report.mean_ssim == (0.9 + 1.0 + 0.8) / 3

    def test_all_inf_gives_nan_mean(self):
        report = MetricsReport(rows=[MetricsRow("a", math.inf, 1.0)], scale=2)
        assert math.isnan(report.mean_psnr)

    def test_oracle_mode_scores_truth_against_itself(self):
        report = evaluate_dataset(_dataset(2), _nn_predict, scale=2, oracle=True)
        assert all(math.isinf(r.psnr) for r in report.rows)
        assert all(abs(r.ssim - 1.0) < 1e-12 for r in report.rows)
        assert report.n_inf == 2


class TestFormats:
    def test_table_layout(self):
        rows = [MetricsRow("scene", 31.2345, 0.98765), MetricsRow("b", math.inf, 1.0)]
        text = MetricsReport(rows=rows, scale=2).table()
        lines = text.splitlines()
        assert lines[0].endswith("PSNR/SSIM")
        assert "31.23/0.988" in lines[1]
        assert "inf/1.000" in lines[2]
        assert lines[3].startswith("mean")
        assert "excluded from the mean" in lines[4]

    def test_csv_round_trips_exact_floats(self):
        report = evaluate_dataset(_dataset(), _nn_predict, scale=2, param_count=7)
        text = report.to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "# scale = 2"
        assert lines[1] == "# param_count = 7"
        assert lines[4] == "name,psnr_db,ssim"
        for line, row in zip(lines[5:8], report.rows):
            name, p, s = line.split(",")
            assert name == row.name
            assert float(p) == row.psnr
            assert float(s) == row.ssim
        mean_line = lines[8].split(",")
        assert mean_line[0] == "mean"
        assert float(mean_line[1]) == report.mean_psnr

    def test_json_matches_csv(self):
        report = evaluate_dataset(_dataset(), _nn_predict, scale=2, config_echo="n = 8")
        data = json.loads(report.to_json())
        csv_lines = report.to_csv().strip().splitlines()
        csv_rows = [ln.split(",") for ln in csv_lines[5:8]]
        for jrow, crow in zip(data["rows"], csv_rows):
            assert jrow["name"] == crow[0]
            assert jrow["psnr_db"] == float(crow[1])
            assert jrow["ssim"] == float(crow[2])
        assert data["mean_psnr_db"] == report.mean_psnr
        assert data["scale"] == 2
        assert data["config"] == "n = 8"

    def test_json_serializes_infinity(self):
        report = MetricsReport(rows=[MetricsRow("a", math.inf, 1.0)], scale=2)
        data = json.loads(report.to_json())
        assert data["rows"][0]["psnr_db"] == math.inf
        assert data["excluded_inf_rows"] == 1

    def test_config_echo_survives(self):
        cfg = MDFNConfig()
        report = evaluate_dataset(_dataset(1), _nn_predict, scale=2,
                                  config_echo=cfg.to_text())
        assert "c = 80" in json.loads(report.to_json())["config"]
