import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgexposure.exposure import (
    ExposureProfile,
    ProxyConfig,
    cva_weight,
    domain_box_from_paths,
    error_metrics,
    evaluate_exposures,
    format_summary,
    speed_up,
    xva_aggregate,
)
from sgexposure.instruments import PortfolioSpec, SwapSpec, decompose_by_currency, portfolio_value
from sgexposure.models import (
    FlatCurve,
    ForeignCurrency,
    HullWhiteParams,
    HybridParams,
    simulate_fx_system,
    simulate_hull_white,
)

HW = HullWhiteParams(0.02, 0.007, FlatCurve(0.01))


def _profile(ee, pfe99=None, dates=None, n_paths=100):
    ee = np.asarray(ee, dtype=float)
    dates = np.arange(1, ee.size + 1, dtype=float) if dates is None else np.asarray(dates, dtype=float)
    pfe = {0.99: np.asarray(pfe99 if pfe99 is not None else ee, dtype=float)}
    return ExposureProfile(dates, ee, pfe, np.ones(ee.size, int), n_paths, np.zeros(ee.size), "brute", 0)


def _seven_factor():
    c = np.array(
        [
            [1.0, 0.5, 0.5, 0.65, 0.7, 0.75, 0.8],
            [0.5, 1.0, 0.45, 0.35, 0.5, 0.5, 0.6],
            [0.5, 0.45, 1.0, 0.5, 0.5, 0.5, 0.7],
            [0.65, 0.35, 0.5, 1.0, 0.5, 0.5, 0.5],
            [0.7, 0.5, 0.5, 0.5, 1.0, 0.5, 0.58],
            [0.75, 0.5, 0.5, 0.5, 0.5, 1.0, 0.55],
            [0.8, 0.6, 0.7, 0.5, 0.58, 0.55, 1.0],
        ]
    )
    f = (
        ForeignCurrency("USD", HullWhiteParams(0.003, 0.01, FlatCurve(0.01)), 1.2, 0.1),
        ForeignCurrency("GBP", HullWhiteParams(0.002, 0.02, FlatCurve(0.015)), 0.86, 0.15),
        ForeignCurrency("PLN", HullWhiteParams(0.001, 0.003, FlatCurve(0.02)), 4.59, 0.2),
    )
    return HybridParams("EUR", HullWhiteParams(0.003, 0.01, FlatCurve(0.01)), f, c)


def _book(ccys=("EUR", "USD", "GBP", "PLN")):
    trades = []
    for i, ccy in enumerate(ccys):
        trades.append(SwapSpec.from_schedule(1e6, 0.012, 0.0, 5.0 + i, 1, i % 2 == 0, ccy))
    return PortfolioSpec("EUR", tuple(trades))


class TestErrorMetrics:
    def test_identical(self):
        p = _profile([1.0, 2.0, 0.0])
        m = error_metrics(p, p)
        assert m["mean_relative"]["EE"] == 0.0 and m["max_absolute"]["EE"] == 0.0

    @given(st.lists(st.floats(1e-3, 1e6), min_size=1, max_size=20))
    @settings(max_examples=50, deadline=None)
    def test_homogeneity(self, f):
        f = np.asarray(f)
        m = error_metrics(_profile(f), _profile(1.1 * f))
        assert m["mean_relative"]["EE"] == pytest.approx(0.1, rel=1e-12)

    def test_hand_example(self):
        m = error_metrics(_profile([1.0, 2.0, 0.0]), _profile([1.1, 1.8, 0.3]))
        assert m["mean_relative"]["EE"] == pytest.approx(0.2 / 3, rel=1e-12)
        assert m["max_absolute"]["EE"] == pytest.approx(0.3)
        assert m["max_relative"]["EE"] == pytest.approx(0.1)

    def test_date_grids_must_match(self):
        with pytest.raises(ValueError):
            error_metrics(_profile([1.0, 2.0]), _profile([1.0, 2.0], dates=[1.0, 3.0]))


class TestXva:
    def test_zero_weight(self):
        assert xva_aggregate(_profile([1.0, 2.0, 3.0]), lambda t, x: 0.0 * x) == 0.0

    def test_unit_step_sums_ee(self):
        p = _profile([1.0, 2.0, 3.5])
        assert xva_aggregate(p, lambda t, x: np.maximum(x, 0), dt=1.0) == pytest.approx(6.5)

    def test_left_point_steps(self):
        p = _profile([1.0, 1.0, 1.0], dates=[0.5, 1.0, 2.0])
        assert xva_aggregate(p, lambda t, x: x) == pytest.approx(0.5 + 1.0 + 1.0)

    def test_path_form_matches_profile_form(self):
        rng = np.random.default_rng(0)
        dates = np.array([1.0, 2.0, 3.0])
        values = rng.normal(size=(3, 500))
        disc = np.exp(-0.01 * dates)[:, None] * np.ones((3, 500))
        chi = cva_weight(0.4, 0.02)
        ee = np.mean(disc * np.maximum(values, 0), axis=1)
        assert xva_aggregate((dates, values, disc), chi) == pytest.approx(xva_aggregate(_profile(ee, dates=dates), chi))

    def test_cva_weight(self):
        chi = cva_weight(0.4, 0.02)
        assert chi(2.0, np.array([-1.0, 10.0])).tolist() == pytest.approx([0.0, 0.6 * 10 * 0.02 * math.exp(-0.04)])
        with pytest.raises(ValueError):
            cva_weight(1.5, 0.02)

    def test_speed_up(self):
        assert [speed_up(25000, n) for n in (15, 113, 589)] == [1666, 221, 42]


class TestDomainBox:
    def test_alpha_one_is_min_max(self):
        s = simulate_hull_white(HW, [1.0, 2.0], 500, seed=0)
        box = domain_box_from_paths(s, 2, ["r_EUR"], 1.0)
        x = s.factors["r_EUR"][2]
        assert box.lower == (x.min(),) and box.upper == (x.max(),)

    def test_standard_normal_box(self):
        # eta and lambda chosen so r(1) - r0 has unit variance around the mean
        lam = 1e-6
        p = HullWhiteParams(lam, 1.0, FlatCurve(0.0))
        s = simulate_hull_white(p, [1.0], 200_000, seed=1)
        mean = float(np.mean(s.factors["r_EUR"][1]))
        box = domain_box_from_paths(s, 1, ["r_EUR"], 0.95)
        assert box.lower[0] - mean == pytest.approx(-1.645, abs=0.02)
        assert box.upper[0] - mean == pytest.approx(1.645, abs=0.02)

    @pytest.mark.parametrize("alpha", [0.9, 0.95, 0.99])
    def test_coverage_on_independent_paths(self, alpha):
        p = _seven_factor()
        fit = simulate_fx_system(p, [2.0], 20_000, seed=3)
        box = domain_box_from_paths(fit, 1, p.driver_names, alpha)
        fresh = simulate_fx_system(p, [2.0], 20_000, seed=4)
        target = 2 * alpha - 1
        se = math.sqrt(target * (1 - target) / 20_000)
        for i, n in enumerate(p.driver_names):
            x = fresh.factors[n][1]
            frac = np.mean((x >= box.lower[i]) & (x <= box.upper[i]))
            assert abs(frac - target) < 3 * se + 1e-12
        assert all(lo < hi for lo, hi in zip(box.lower, box.upper))

    def test_degenerate_factor_flagged(self):
        s = simulate_hull_white(HullWhiteParams(0.1, 0.0, FlatCurve(0.01)), [1.0], 20, seed=0)
        box = domain_box_from_paths(s, 1, ["r_EUR"])
        assert box.degenerate == (True,)

    def test_bad_alpha(self):
        s = simulate_hull_white(HW, [1.0], 20, seed=0)
        with pytest.raises(ValueError):
            domain_box_from_paths(s, 1, ["r_EUR"], 0.4)


class TestEvaluationCounts:
    def test_seven_dimensional_level_two(self):
        p = _seven_factor()
        s = simulate_fx_system(p, [1.0, 2.0], 300, seed=0)
        prof = evaluate_exposures(_book(), s, ProxyConfig("smolyak", level=2))
        assert prof.eval_counts.tolist() == [113, 113]
        assert prof.total_evaluations == 226 and prof.reference_evaluations == 600

    @pytest.mark.parametrize("n1", [2, 4, 6])
    def test_subportfolio_one_dimensional(self, n1):
        p = _seven_factor()
        s = simulate_fx_system(p, [1.0, 2.0, 3.0], 300, seed=0)
        prof = evaluate_exposures(_book(), s, ProxyConfig("subportfolio", n1=n1))
        assert prof.eval_counts.tolist() == [n1] * 3
        assert prof.sub_counts == {c: 3 * n1 for c in ("EUR", "USD", "GBP", "PLN")}

    def test_brute_force_counts(self):
        s = simulate_hull_white(HW, [1.0, 2.0], 250, seed=0)
        prof = evaluate_exposures(_book(("EUR",)), s, ProxyConfig("brute"))
        assert prof.eval_counts.tolist() == [250, 250]


class TestProfiles:
    def test_linear_value_reproduced(self):
        # zero rate vols: a USD swap is worth fx * constant in EUR, linear in the state
        usd = ForeignCurrency("USD", HullWhiteParams(0.05, 0.0, FlatCurve(0.02)), 1.2, 0.2)
        p = HybridParams("EUR", HullWhiteParams(0.05, 0.0, FlatCurve(0.01)), (usd,))
        s = simulate_fx_system(p, [1.0, 3.0], 2000, seed=2)
        book = PortfolioSpec("EUR", (SwapSpec.from_schedule(1e6, 0.0, 0.0, 10.0, 1, True, "USD"),))
        for cfg in (ProxyConfig("smolyak", level=1), ProxyConfig("subportfolio", n1=2)):
            prox = evaluate_exposures(book, s, cfg, keep_paths=True)
            brute = evaluate_exposures(book, s, ProxyConfig("brute"), keep_paths=True)
            np.testing.assert_allclose(prox.values, brute.values, rtol=1e-10)

    def test_brute_force_identity(self):
        s = simulate_hull_white(HW, [1.0, 2.0], 400, seed=5)
        book = _book(("EUR",))
        prof = evaluate_exposures(book, s, ProxyConfig("brute"), quantiles=(0.9,))
        v = portfolio_value(book, s.params, 2.0, s.point(2))
        assert prof.ee[1] == pytest.approx(np.mean(np.maximum(v, 0) * s.discount(2)), rel=1e-14)
        assert prof.pfe[0.9][1] == pytest.approx(np.quantile(np.maximum(v, 0), 0.9), rel=1e-14)

    def test_all_negative_book(self):
        s = simulate_hull_white(HW, [1.0, 2.0], 300, seed=0)
        book = PortfolioSpec("EUR", (SwapSpec.from_schedule(1e6, 0.5, 0.0, 5.0, 1, True, "EUR"),))
        prof = evaluate_exposures(book, s, ProxyConfig("brute"))
        assert np.all(prof.ee == 0) and np.all(prof.pfe[0.99] == 0)

    def test_deep_in_the_money_martingale(self):
        # receiver forward swap with a high fixed rate is positive on every path,
        # so EE before the start date equals its time-0 value
        spec = SwapSpec.from_schedule(1e6, 0.1, 5.0, 10.0, 1, False, "EUR")
        dates = np.linspace(0.1, 5.0, 50)
        s = simulate_hull_white(HW, dates, 20_000, seed=6)
        prof = evaluate_exposures(PortfolioSpec("EUR", (spec,)), s, ProxyConfig("brute"), keep_paths=True)
        v0 = portfolio_value(PortfolioSpec("EUR", (spec,)), s.params, 0.0, {"r_EUR": HW.r0})
        assert np.all(prof.values > 0)
        disc_v = prof.values[-1] * prof.discount[-1]
        se = disc_v.std() / math.sqrt(disc_v.size)
        assert abs(prof.ee[-1] - v0) < 4 * se

    def test_pfe_monotone_and_ee_nonnegative(self):
        p = _seven_factor()
        s = simulate_fx_system(p, np.linspace(0.5, 6.0, 12), 2000, seed=8)
        for cfg in (ProxyConfig("brute"), ProxyConfig("smolyak", level=1), ProxyConfig("subportfolio", n1=3)):
            prof = evaluate_exposures(_book(), s, cfg, quantiles=(0.5, 0.9, 0.95, 0.99))
            assert np.all(prof.ee >= 0)
            levels = [prof.pfe[q] for q in prof.quantiles]
            for lo, hi in zip(levels, levels[1:]):
                assert np.all(lo <= hi)

    def test_threads_do_not_change_results(self, tmp_path):
        p = _seven_factor()
        s = simulate_fx_system(p, [1.0, 2.0, 3.0], 500, seed=1)
        a = evaluate_exposures(_book(), s, ProxyConfig("smolyak", level=2), n_threads=1)
        b = evaluate_exposures(_book(), s, ProxyConfig("smolyak", level=2), n_threads=3)
        a.to_csv(tmp_path / "a.csv")
        b.to_csv(tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_csv_layout(self, tmp_path):
        s = simulate_hull_white(HW, [1.0, 2.0], 100, seed=0)
        prof = evaluate_exposures(_book(("EUR",)), s, ProxyConfig("subportfolio", n1=3))
        prof.to_csv(tmp_path / "p.csv")
        lines = (tmp_path / "p.csv").read_text().splitlines()
        assert lines[0] == "date,EE,PFE_0.95,PFE_0.99,eval_count,extrapolated_fraction"
        assert len(lines) == 3

    def test_summary_mentions_counts(self):
        s = simulate_hull_white(HW, [1.0, 2.0], 100, seed=0)
        ref = evaluate_exposures(_book(("EUR",)), s, ProxyConfig("brute"))
        prox = evaluate_exposures(_book(("EUR",)), s, ProxyConfig("subportfolio", n1=3))
        text = format_summary({"proxy": prox, "brute": ref}, ref)
        assert "2x3" in text and "2x100" in text

    def test_subportfolio_sum_matches_full(self):
        p = _seven_factor()
        s = simulate_fx_system(p, [1.5], 300, seed=2)
        book = _book()
        full = portfolio_value(book, p, 1.5, s.point(1))
        parts = np.zeros(300)
        from sgexposure.instruments import currency_value

        for sub in decompose_by_currency(book, p):
            local = currency_value(sub.trades, p, sub.currency, 1.5, s.point(1))
            parts += local if sub.fx_factor is None else s.factors[sub.fx_factor][1] * local
        np.testing.assert_array_equal(parts, full)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            ProxyConfig("other")
        with pytest.raises(ValueError):
            ProxyConfig(n1=1)
