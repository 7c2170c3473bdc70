"""Numpy implementation of the block integrand kernels.

Drop-in fallback for the compiled `_kernels` extension: same region codes,
same constants layout, same (weight_sum, accepted_count) contract. The
compiled and numpy paths may differ in the last few ulps (different reduction
trees and libm vs numpy transcendentals); each is individually deterministic.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Region codes shared with the compiled kernel.
CODE_F131 = 0
CODE_F132 = 1
CODE_G132 = 2
CODE_F2 = 3
CODE_G2 = 4
CODE_F3 = 5
CODE_SELFTEST = 6

# consts layout
LO, HMS, HPS, HM2W, ATHR, GOL, GOH, GIL, GIH, STRICT = range(10)

OMEGA_UPPER_MODE = 0
OMEGA_TABLE_MODE = 1
OMEGA_ONE_MODE = 2

_SUBSET_MASKS = {
    k: np.array(
        [[(m >> j) & 1 for j in range(k)] for m in range(1, 1 << k)], dtype=np.float64
    )
    for k in (2, 3, 4, 5, 6)
}


def _omega_upper_vec(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    m = (u >= 1.0) & (u < 2.0)
    out[m] = 1.0 / u[m]
    m = (u >= 2.0) & (u < 3.0)
    out[m] = (1.0 + np.log(u[m] - 1.0)) / u[m]
    out[(u >= 3.0) & (u < 4.0)] = 0.5644
    out[u >= 4.0] = 0.5617
    return out


def _omega_factor(u: np.ndarray, mode: int, table: np.ndarray, step: float) -> np.ndarray:
    if mode == OMEGA_ONE_MODE:
        return np.ones_like(u)
    if mode == OMEGA_UPPER_MODE:
        return _omega_upper_vec(u)
    x = np.clip((u - 1.0) / step, 0.0, len(table) - 1.0)
    i = np.minimum(x.astype(np.int64), len(table) - 2)
    frac = x - i
    return table[i] * (1.0 - frac) + table[i + 1] * frac


def _gap_hit(s: np.ndarray, c: np.ndarray) -> np.ndarray:
    return (s >= c[GOL]) & (s <= c[GOH]) & ~((s >= c[GIL]) & (s <= c[GIH]))


def _subsets_clear(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """True where no nonempty subset sum of the row lands in the gap set."""
    if a.shape[0] == 0:
        return np.ones(0, dtype=bool)
    sums = a @ _SUBSET_MASKS[a.shape[1]].T
    return ~_gap_hit(sums, c).any(axis=1)


def _descending(a: np.ndarray, c: np.ndarray, upper: float) -> np.ndarray:
    m = (a[:, -1] > c[LO]) & (a[:, 0] < upper)
    for j in range(a.shape[1] - 1):
        m &= a[:, j + 1] < a[:, j]
    return m


def _prefix_budget(a: np.ndarray) -> np.ndarray:
    acc = np.cumsum(a, axis=1)
    return (a + acc).max(axis=1) <= 1.0


def _short_cap(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    return 2.0 * a[:, 1] <= np.maximum(2.0 * c[ATHR], c[HPS] - a[:, 0])


def _f132_base_mask(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    m = _descending(a, c, c[HMS])
    m &= a[:, 0] + a[:, 1] <= c[HMS]
    m &= _short_cap(a, c)
    m &= _prefix_budget(a)
    m &= a[:, 0] + a[:, 1] + a[:, 2] + a[:, 3] >= c[HM2W]
    return m


def _accept_mask(code: int, c: np.ndarray, pts: np.ndarray) -> np.ndarray:
    if code == CODE_F131:
        m = _descending(pts, c, c[HMS])
        m &= pts[:, 0] + pts[:, 1] + pts[:, 2] + pts[:, 3] <= c[HMS]
        m &= _short_cap(pts, c)
        m &= _prefix_budget(pts)
        idx = np.flatnonzero(m)
        m[idx] = _subsets_clear(pts[idx], c)
        return m
    if code == CODE_F132:
        m = _f132_base_mask(pts, c)
        idx = np.flatnonzero(m)
        m[idx] = _subsets_clear(pts[idx], c)
        return m
    if code == CODE_G132:
        head, a5 = pts[:, :4], pts[:, 4]
        m = _f132_base_mask(head, c)
        m &= (a5 > pts[:, 3]) & (a5 <= (1.0 - head.sum(axis=1)) / 2.0)
        idx = np.flatnonzero(m)
        m[idx] = _subsets_clear(pts[idx], c)
        return m
    if code in (CODE_F2, CODE_G2):
        a1, a2 = pts[:, 0], pts[:, 1]
        m = (a2 > c[LO]) & (a2 < a1)
        m &= a1 + a2 <= c[HMS]
        m &= a2 > c[ATHR]
        m &= a1 + 2.0 * a2 > c[HPS]
        if code == CODE_G2:
            a3 = pts[:, 2]
            m &= (a3 > a2) & (a3 <= (1.0 - a1 - a2) / 2.0)
            idx = np.flatnonzero(m)
            if c[STRICT] != 0.0:
                m[idx] = _subsets_clear(pts[idx], c)
            else:
                sub = pts[idx]
                m[idx] = ~_gap_hit(sub[:, 0] + sub[:, 2], c) & ~_gap_hit(
                    sub[:, 1] + sub[:, 2], c
                )
        return m
    if code == CODE_F3:
        a1, a2 = pts[:, 0], pts[:, 1]
        m = (a2 > c[LO]) & (a2 < a1) & (a1 < 0.5)
        m &= a1 + a2 > c[HM2W]
        m &= a1 + 2.0 * a2 < 1.0
        idx = np.flatnonzero(m)
        if c[STRICT] != 0.0:
            m[idx] = _subsets_clear(pts[idx], c)
        else:
            sub = pts[idx]
            m[idx] = ~_gap_hit(sub[:, 0], c) & ~_gap_hit(sub[:, 0] + sub[:, 1], c)
        return m
    if code == CODE_SELFTEST:
        a1, a2 = pts[:, 0], pts[:, 1]
        return (a2 > 0.2) & (a2 < a1) & (a1 < 0.3)
    raise ValueError(f"unknown region code {code}")


def eval_block(
    code: int,
    consts: np.ndarray,
    pts: np.ndarray,
    weight_prime: bool,
    omega_mode: int,
    omega_table: np.ndarray,
    omega_step: float,
    log_density: bool = False,
) -> tuple[float, int]:
    """Sum of (indicator * weight) over the block, plus the accepted count.

    With log_density the points are understood as drawn with density
    1/prod(a_j) (log-uniform), so each weight is multiplied by prod(a_j).
    """
    mask = _accept_mask(code, consts, pts)
    a = pts[mask]
    if a.shape[0] == 0:
        return 0.0, 0
    s = a.sum(axis=1)
    if weight_prime:
        if log_density:
            w = 1.0 / (1.0 - s)
        else:
            w = 1.0 / ((1.0 - s) * np.prod(a, axis=1))
    else:
        u = (1.0 - s) / a[:, -1]
        w = _omega_factor(u, omega_mode, omega_table, omega_step)
        if log_density:
            w = w / a[:, -1]
        else:
            w = w / (np.prod(a[:, :-1], axis=1) * a[:, -1] * a[:, -1])
    if not np.isfinite(w).all():
        raise FloatingPointError(
            f"non-finite weight inside region code {code}: indicator/precondition mismatch"
        )
    return float(np.sum(w)), int(a.shape[0])
