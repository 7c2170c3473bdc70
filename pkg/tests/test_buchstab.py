import math

import numpy as np
import pytest

from sqsieve.buchstab import build_table, dump_csv, omega, omega_upper


@pytest.fixture(scope="module")
def table():
    return build_table(u_max=10.0, step=1e-4)


def test_omega_upper_rows():
    assert omega_upper(0.5) == 0.0
    assert omega_upper(1.5) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert omega_upper(2.5) == pytest.approx((1 + math.log(1.5)) / 2.5, abs=1e-12)
    assert omega_upper(2.5) == pytest.approx(0.562186, abs=5e-7)
    assert omega_upper(3.5) == 0.5644
    assert omega_upper(100.0) == 0.5617


def test_omega_matches_reciprocal_branch(table):
    assert omega(1.0, table) == 1.0
    assert omega(2.0, table) == pytest.approx(0.5, abs=1e-12)
    for u in (1.1, 1.5, 1.9):
        assert omega(u, table) == pytest.approx(1.0 / u, abs=1e-9)


def test_omega_at_three_closed_form(table):
    # Integrating (u w)' = 1/(u-1) across (2, 3] gives w(3) = (1 + ln 2)/3.
    assert omega(3.0, table) == pytest.approx((1 + math.log(2)) / 3, abs=1e-8)


def test_omega_long_run_limit(table):
    assert omega(10.0, table) == pytest.approx(0.561459, abs=1e-3)
    assert omega(10.0, table) == pytest.approx(math.exp(-0.5772156649015329), abs=1e-6)


def test_table_below_upper_bound(table):
    grid = np.arange(1.0, 10.0001, 1e-3)
    for u in grid:
        assert omega(float(u), table) <= omega_upper(float(u)) + 1e-6


def test_table_values_positive_and_bounded(table):
    assert table.values.min() > 0
    assert table.values.max() <= 1.0


def test_continuity(table):
    diffs = np.abs(np.diff(table.values))
    assert diffs.max() < 10 * table.step


def test_order_of_convergence():
    # Trapezoidal stepping: halving the step should shrink the change ~4x.
    vals = {}
    for step in (4e-3, 2e-3, 1e-3):
        t = build_table(u_max=6.0, step=step)
        vals[step] = omega(5.5, t)
    change_coarse = abs(vals[4e-3] - vals[2e-3])
    change_fine = abs(vals[2e-3] - vals[1e-3])
    assert change_fine < change_coarse / 2.5


def test_domain_and_step_validation(table):
    with pytest.raises(ValueError):
        omega(0.5, table)
    with pytest.raises(ValueError):
        omega(11.0, table)
    with pytest.raises(ValueError):
        build_table(u_max=10.0, step=0.3)
    with pytest.raises(ValueError):
        build_table(u_max=3.0)


def test_csv_dump(tmp_path, table):
    path = tmp_path / "omega.csv"
    dump_csv(table, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "u,omega,omega_upper"
    assert len(lines) > 100
    u, om, up = lines[1].split(",")
    assert float(u) == 1.0 and float(om) == 1.0
