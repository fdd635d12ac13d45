import math

import pytest

import pentest as pt


def test_inverse_demand_exponential():
    d = pt.ValueDistribution.exponential(1.0)
    assert d.inverse_demand(0.5) == pytest.approx(math.log(2.0))
    assert d.inverse_demand(1.0) == 0.0


def test_uniform_hull_is_chord():
    b = pt.ironed_curves(pt.ValueDistribution.uniform(0.0, 1.0), 100)
    for q, u in zip(b.grid, b.U_ironed):
        assert u == pytest.approx(q / 2.0, abs=1e-12)
    assert len(b.ironed_intervals) == 1


def test_virtual_price_uniform():
    b = pt.ironed_curves(pt.ValueDistribution.uniform(0.0, 1.0))
    assert pt.virtual_price(b, 0.3) == pytest.approx((1.0, 0.0))
    assert pt.virtual_price(b, 0.6) == pytest.approx((0.0, 1.0))


def test_clock_and_pen_agree():
    c = pt.FeasibilityConstraint.k_of_n(2, 1)
    mech = pt.k_clock_da(c)
    out = pt.run_da(mech, [3.0, 1.0])
    assert out["winners"] == [0]
    assert out["consumer_surplus"] == pytest.approx(2.0)
    run = pt.run_pen_algorithm(mech, [3.0, 1.0], c)
    assert run["chosen_before_padding"] == out["winners"]
    assert run["total_residual_before_padding"] == out["consumer_surplus"]


def test_knapsack_optimum():
    c = pt.FeasibilityConstraint.knapsack([3.0, 4.0, 5.0], 7.0)
    subset, total = c.max_weight_feasible([4.0, 5.0, 7.0])
    assert subset == [0, 1]
    assert total == 9.0


def test_table_and_errors():
    rows = pt.table1_report(["knapsack", "online-iid"], 10)
    assert rows[0].pi_upper == pytest.approx(2.0 * rows[0].zeta_upper)
    assert rows[1].pi_upper == pytest.approx(pt.harmonic(10) + 1.0)
    with pytest.raises(ValueError):
        pt.table1_report(["nope"], 10)
    with pytest.raises(ValueError):
        pt.buffered_quantile(0.3, 0.5)


def test_measured_ratio_iid_exponential():
    dists = [pt.ValueDistribution.exponential(1.0)] * 10
    est = pt.measure_environment("online-iid", 10, 1, dists, 20000, 5)
    assert est.ratio == pytest.approx(pt.harmonic(10), rel=0.05)
