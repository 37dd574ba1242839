from pathlib import Path

import numpy as np
import pytest
import yaml
from pydantic import ValidationError

from sgexposure.cli import format_grid_report, grid_report, main
from sgexposure.config import RunConfig, build_model, build_portfolio, dump_config, exposure_dates, load_config
from sgexposure.instruments import SwaptionSpec, swap_value_hw

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = {
    "model": {
        "base_currency": "EUR",
        "base_rates": {"kind": "hull_white", "mean_reversion": 0.02, "volatility": 0.007, "curve": {"kind": "flat", "rate": 0.01}},
        "foreign": [
            {
                "currency": "USD",
                "fx_spot": 1.2,
                "fx_vol": 0.1,
                "rates": {"kind": "hull_white", "mean_reversion": 0.03, "volatility": 0.01, "curve": {"kind": "flat", "rate": 0.02}},
            }
        ],
        "correlation": [[1.0, 0.3, 0.5], [0.3, 1.0, 0.2], [0.5, 0.2, 1.0]],
    },
    "portfolio": {
        "trades": [
            {"type": "swap", "currency": "EUR", "notional": 1e6, "fixed_rate": "par", "maturity": 5.0},
            {"type": "swap", "currency": "USD", "notional": 5e5, "fixed_rate": 0.02, "maturity": 4.0, "payer": False},
        ]
    },
    "simulation": {"n_paths": 3000, "seed": 7, "dates": {"count": 8, "horizon": 4.0}},
    "proxy": {"mode": "smolyak", "level": 2},
    "output": {"name": "small"},
}


def _write(tmp_path, data, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


class TestConfig:
    @pytest.mark.parametrize("name", ["hw_single_swap", "hw_25_swaps", "fx_hybrid_7d", "g2_swaptions"])
    def test_shipped_configs_round_trip(self, name):
        cfg = load_config(CONFIGS / f"{name}.yaml")
        again = RunConfig.model_validate(yaml.safe_load(dump_config(cfg)))
        assert again == cfg

    def test_fx_hybrid_config_model(self):
        cfg = load_config(CONFIGS / "fx_hybrid_7d.yaml")
        p = build_model(cfg.model)
        assert p.driver_names == ("r_EUR", "fx_USD", "fx_GBP", "fx_PLN", "r_USD", "r_GBP", "r_PLN")
        assert len(build_portfolio(cfg, p)) == 30
        assert exposure_dates(cfg.simulation).size == 75

    def test_g2_config_model(self):
        cfg = load_config(CONFIGS / "g2_swaptions.yaml")
        book = build_portfolio(cfg)
        assert p_dim(cfg) == 11
        assert sum(isinstance(t, SwaptionSpec) for t in book.trades) == 12

    def test_par_strike(self):
        cfg = RunConfig.model_validate(SMALL)
        p = build_model(cfg.model)
        swap = build_portfolio(cfg, p).trades[0]
        assert abs(swap_value_hw(swap, p.base_rates, 0.0, p.base_rates.r0)) < 1e-6

    def test_unknown_key_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig.model_validate({**SMALL, "extra": 1})

    def test_non_psd_matrix_rejected(self):
        bad = yaml.safe_load(yaml.safe_dump(SMALL))
        bad["model"]["correlation"] = [[1.0, 0.9, 0.9], [0.9, 1.0, -0.9], [0.9, -0.9, 1.0]]
        with pytest.raises(ValidationError, match="correlation matrix"):
            RunConfig.model_validate(bad)

    def test_swaption_needs_g2(self):
        bad = yaml.safe_load(yaml.safe_dump(SMALL))
        bad["portfolio"]["trades"].append(
            {"type": "swaption", "currency": "EUR", "notional": 1e6, "fixed_rate": 0.01, "expiry": 1.0, "tenor": 2.0}
        )
        with pytest.raises(ValidationError, match="G2"):
            RunConfig.model_validate(bad)

    def test_dates(self):
        cfg = RunConfig.model_validate(SMALL)
        np.testing.assert_allclose(exposure_dates(cfg.simulation), np.arange(1, 9) * 0.5)


def p_dim(cfg):
    return build_model(cfg.model).dimension


class TestGridReport:
    def test_values(self):
        rows = grid_report(8, 4)
        assert rows[6]["smolyak_2"] == 113 and rows[6]["smolyak_3"] == 589
        assert rows[1]["tensor_3"] == 9 and rows[7]["tensor_5"] == 390625

    def test_limits(self):
        with pytest.raises(ValueError):
            grid_report(11, 2)

    def test_cli(self, capsys):
        assert main(["grid-report", "--d-max", "3", "--mu-max", "2"]) == 0
        out = capsys.readouterr().out
        assert out == format_grid_report(grid_report(3, 2))
        assert "smolyak_2" in out


class TestCli:
    def test_run(self, tmp_path, capsys):
        path = _write(tmp_path, SMALL)
        assert main(["run", str(path), "--out", str(tmp_path / "out")]) == 0
        out = tmp_path / "out"
        assert (out / "small_smolyak.csv").exists() and (out / "small_brute.csv").exists()
        summary = (out / "small_summary.txt").read_text()
        assert "8x25" in summary and "CVA[brute]" in summary
        assert (out / "small_errors.csv").read_text().startswith("run,metric,column,value")

    def test_brute_only_matches_reference(self, tmp_path):
        path = _write(tmp_path, SMALL)
        main(["run", str(path), "--out", str(tmp_path / "a")])
        main(["run", str(path), "--out", str(tmp_path / "b"), "--mode", "brute"])
        assert (tmp_path / "a" / "small_brute.csv").read_bytes() == (tmp_path / "b" / "small_brute.csv").read_bytes()
        assert not (tmp_path / "b" / "small_smolyak.csv").exists()

    def test_threads_byte_identical(self, tmp_path):
        path = _write(tmp_path, SMALL)
        main(["run", str(path), "--out", str(tmp_path / "t1"), "--threads", "1"])
        main(["run", str(path), "--out", str(tmp_path / "t3"), "--threads", "3"])
        for name in ("small_smolyak.csv", "small_brute.csv"):
            assert (tmp_path / "t1" / name).read_bytes() == (tmp_path / "t3" / name).read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        path = _write(tmp_path, SMALL)
        main(["run", str(path), "--out", str(tmp_path / "a"), "--mode", "brute"])
        main(["run", str(path), "--out", str(tmp_path / "b"), "--mode", "brute", "--seed", "8"])
        assert (tmp_path / "a" / "small_brute.csv").read_bytes() != (tmp_path / "b" / "small_brute.csv").read_bytes()

    def test_convergence(self, tmp_path, capsys):
        path = _write(tmp_path, SMALL)
        assert main(["convergence", str(path), "--levels", "1", "2", "--out", str(tmp_path)]) == 0
        text = (tmp_path / "small_convergence.csv").read_text().splitlines()
        assert text[0].startswith("level,evaluations,speed_up,mean_relative_EE")
        assert [r.split(",")[1] for r in text[1:]] == ["8x7", "8x25"]

    def test_n1_sweep(self, tmp_path):
        data = yaml.safe_load(yaml.safe_dump(SMALL))
        data["proxy"] = {"mode": "subportfolio", "n1": 3}
        path = _write(tmp_path, data)
        assert main(["convergence", str(path), "--n1", "2", "3", "4", "--out", str(tmp_path)]) == 0
        rows = (tmp_path / "small_convergence.csv").read_text().splitlines()[1:]
        assert [r.split(",")[1] for r in rows] == ["8x2", "8x3", "8x4"]

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = yaml.safe_load(yaml.safe_dump(SMALL))
        bad["model"]["correlation"] = [[1.0, 0.9, 0.9], [0.9, 1.0, -0.9], [0.9, -0.9, 1.0]]
        assert main(["run", str(_write(tmp_path, bad))]) == 2
        assert "correlation matrix" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "nope.yaml")]) == 2
