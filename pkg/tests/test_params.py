from fractions import Fraction

import pytest

from sqsieve.params import (
    GapSet,
    check_type_ii_range,
    constraint_report,
    binding_delta_constraint,
    derive_parameters,
    factorization_windows,
    iter_rational_grid,
    load_config,
    max_admissible_delta,
    parse_rational,
    reference_parameters,
)

SIGMA = Fraction(2, 39)  # 1/19.5
VARPI = Fraction(1, 4000)


def test_parse_rational_forms():
    assert parse_rational("1/19.5") == Fraction(2, 39)
    assert parse_rational("1/4000") == Fraction(1, 4000)
    assert parse_rational("0.00025") == Fraction(1, 4000)
    assert parse_rational(Fraction(3, 7)) == Fraction(3, 7)
    assert parse_rational(2) == 2


def test_derive_parameters_reference_values():
    p = derive_parameters("1/19.5", "1/4000", "1/100000", 0)
    assert p.z_exp == Fraction(2, 39) - Fraction(1, 2000) - Fraction(1, 100000)
    assert p.d_exp == Fraction(1, 2) + Fraction(1, 2000)
    assert p.alpha_threshold == Fraction(1, 8) + SIGMA / 2 - 5 * VARPI / 2


def test_derive_parameters_rejects_degenerate_interior():
    # 1/4 = 2 * (1/8) + 0 sits exactly on the boundary.
    with pytest.raises(ValueError):
        derive_parameters(Fraction(1, 4), Fraction(1, 8), 0, 0)
    with pytest.raises(ValueError):
        derive_parameters(Fraction(3, 2), VARPI, 0, 0)
    with pytest.raises(ValueError):
        derive_parameters(SIGMA, VARPI, 0, 1)


def test_gap_set_membership():
    gap = reference_parameters().gap
    assert Fraction(45, 100) in gap
    assert Fraction(1, 2) not in gap  # inside the removed middle
    assert Fraction(44, 100) not in gap
    assert gap.outer_lo in gap and gap.outer_hi in gap
    assert gap.inner_lo not in gap and gap.inner_hi not in gap
    with pytest.raises(ValueError):
        GapSet(Fraction(1, 2), Fraction(3, 4), Fraction(1, 4), Fraction(2, 3))


def test_max_admissible_delta_reference():
    sup = max_admissible_delta("1/19.5", "1/4000")
    expected = (1 - Fraction(19, 1) * SIGMA - 90 * VARPI) / 71
    assert sup == expected == Fraction(49, 1107600)
    assert abs(float(sup) - 4.424e-5) < 1e-8
    assert binding_delta_constraint("1/19.5", "1/4000") == "type_ii_width"


def test_max_admissible_delta_threshold_at_one_nineteenth():
    # 19 * (1/19) = 1 forces delta below a negative number: infeasible.
    assert max_admissible_delta("1/19", "1/4000") <= 0
    assert max_admissible_delta("1/19.5", "1/4000") > 0


def test_max_admissible_delta_varpi_zero():
    assert max_admissible_delta(Fraction(1, 40), 0) == Fraction(21, 2840)


def test_max_admissible_delta_purity():
    a = max_admissible_delta("1/19.5", "1/4000")
    b = max_admissible_delta("1/19.5", "1/4000")
    assert a == b and isinstance(a, Fraction)


def test_constraint_report_rows():
    report = constraint_report(SIGMA, VARPI, Fraction(1, 100000))
    rows = report.as_rows()
    assert {r["name"] for r in rows} >= {"type_ii_width", "dispersion_diagonal", "type_i_q_window"}
    for row in rows:
        margin = Fraction(row["bound"]) - Fraction(row["value"])
        assert Fraction(row["margin"]) == margin
    assert report.all_satisfied


def test_check_type_ii_range_examples():
    p = derive_parameters(SIGMA, VARPI, Fraction(1, 100000), 0)
    assert not check_type_ii_range(Fraction(1, 2), p)
    assert check_type_ii_range(Fraction(1, 2) - SIGMA, p)  # closed outer endpoint
    assert check_type_ii_range(Fraction(46, 100), p)
    with pytest.raises(ValueError):
        check_type_ii_range(Fraction(3, 2), p)


def test_check_type_ii_range_symmetry():
    p = derive_parameters(SIGMA, VARPI, Fraction(1, 100000), 0)
    for x in iter_rational_grid(Fraction(1, 100), Fraction(99, 100), 197):
        assert check_type_ii_range(x, p) == check_type_ii_range(1 - x, p)


def test_factorization_windows_reference():
    delta = Fraction(1, 100000)
    p = derive_parameters(SIGMA, VARPI, delta, 0)
    win = factorization_windows(p, SIGMA)
    assert win.q_window == (
        4 * VARPI + 2 * SIGMA + 2 * delta,
        4 * VARPI + 2 * SIGMA + 3 * delta,
    )
    assert win.type_i_q_window == (16 * VARPI + 8 * delta, 16 * VARPI + 9 * delta)
    assert win.w_exp == 2 * SIGMA - 4 * VARPI - 2 * delta


def test_factorization_windows_boundary_gamma():
    delta = Fraction(1, 100000)
    p = derive_parameters(SIGMA, VARPI, delta, 0)
    win = factorization_windows(p, 2 * VARPI + delta)
    assert win.w_exp == 0
    with pytest.raises(ValueError):
        factorization_windows(p, SIGMA + Fraction(1, 1000))
    with pytest.raises(ValueError):
        factorization_windows(p, VARPI)


def test_factorization_w_exponent_cross_check():
    # M^2 X^(-2 delta) / (R Q)^2 with M = X^(1/2+gamma), RQ = X^(1/2+2 varpi),
    # expanded symbolically over rationals.
    delta = Fraction(1, 100000)
    p = derive_parameters(SIGMA, VARPI, delta, 0)
    for gamma in iter_rational_grid(2 * VARPI + delta, SIGMA, 23):
        win = factorization_windows(p, gamma)
        m_exp = Fraction(1, 2) + gamma
        rq_exp = Fraction(1, 2) + 2 * VARPI
        assert win.w_exp == 2 * m_exp - 2 * delta - 2 * rq_exp
        assert win.r_window[0] <= win.r_window[1]
        assert win.q_window[0] <= win.q_window[1]
        assert win.type_i_q_window[0] <= win.type_i_q_window[1]


def test_load_config_roundtrip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("sigma = 1/19.5\nvarpi = 1/4000  # gain\n\ndelta = 0\n")
    values = load_config(str(cfg))
    assert values == {"sigma": "1/19.5", "varpi": "1/4000", "delta": "0"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("just words\n")
    with pytest.raises(ValueError):
        load_config(str(bad))
