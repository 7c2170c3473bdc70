"""Buchstab's function: the piecewise upper-bound table and a delay-equation solver.

omega(u) = 1/u on (1, 2] and (u*omega(u))' = omega(u-1) for u > 2. The
certification runs integrate against the upper-bound table; the solver is for
sharper exploratory runs and cross-checks.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

# Piecewise upper bound used by the certification integrals.
UPPER_FLAT_3_4 = 0.5644
UPPER_FLAT_4_INF = 0.5617


def omega_upper(u: float) -> float:
    """Piecewise upper bound for omega(u); exact on [1, 3), flat caps beyond."""
    if u < 1.0:
        return 0.0
    if u < 2.0:
        return 1.0 / u
    if u < 3.0:
        return (1.0 + math.log(u - 1.0)) / u
    if u < 4.0:
        return UPPER_FLAT_3_4
    return UPPER_FLAT_4_INF


@dataclass(frozen=True)
class BuchstabTable:
    """omega sampled on a uniform grid over [1, u_max]; immutable once built."""

    step: float
    u_max: float
    values: np.ndarray  # omega at 1 + i*step

    def __post_init__(self) -> None:
        self.values.setflags(write=False)


def build_table(u_max: float = 10.0, step: float = 1e-4) -> BuchstabTable:
    """Integrate (u*omega(u))' = omega(u-1) by trapezoidal stepping.

    step must divide 1 exactly (the delay is one unit, so u-1 stays on-grid).
    """
    if u_max < 4.0:
        raise ValueError("u_max must be >= 4")
    m = round(1.0 / step)
    if m < 10 or abs(m * step - 1.0) > 1e-12:
        raise ValueError("step must be 1/m for an integer m >= 10")
    h = 1.0 / m
    n = round((u_max - 1.0) * m)
    u = 1.0 + np.arange(n + 1) / m
    v = np.empty(n + 1)  # v(u) = u * omega(u)
    v[: m + 1] = 1.0  # omega = 1/u on [1, 2]

    # g(u) = v(u-1)/(u-1) is known up to the current index because of the delay.
    def g(i: int) -> float:
        return v[i - m] / (u[i] - 1.0)

    for i in range(m + 1, n + 1):
        v[i] = v[i - 1] + 0.5 * h * (g(i - 1) + g(i))
    return BuchstabTable(step=h, u_max=float(u[-1]), values=v / u)


def omega(u: float, table: BuchstabTable) -> float:
    """omega(u) by linear interpolation on the table grid."""
    if not 1.0 <= u <= table.u_max:
        raise ValueError(f"u={u} outside [1, {table.u_max}]")
    x = (u - 1.0) / table.step
    i = min(int(x), len(table.values) - 2)
    frac = x - i
    return float(table.values[i] * (1.0 - frac) + table.values[i + 1] * frac)


def dump_csv(table: BuchstabTable, path: str, stride: int = 100) -> None:
    """Write (u, omega, omega_upper) rows for plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "omega", "omega_upper"])
        for i in range(0, len(table.values), stride):
            u = 1.0 + i * table.step
            writer.writerow([f"{u:.6f}", f"{table.values[i]:.9f}", f"{omega_upper(u):.9f}"])
