"""Indicator predicates for the six discarded-sum integration domains.

Each region is a set of exponent vectors alpha in [sigma-2*varpi, 1]^k cut out
by the ordering, budget, and gap-avoidance inequalities of the decomposition.
Strict vs non-strict signs follow the source displays verbatim; the integrals
are insensitive to the (measure-zero) boundaries.

The scalar `indicator` here is the reference implementation; the integrator's
block kernels (compiled or numpy) evaluate the same constants from
`region_constants`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .params import GapSet, SieveParameters


class RegionId(enum.Enum):
    F131 = "F131"
    F132 = "F132"
    G132 = "G132"
    F2 = "F2"
    G2 = "G2"
    F3 = "F3"


class WeightKind(enum.Enum):
    # omega((1-sum)/a_k) / (a_1...a_{k-1} a_k^2)
    ALMOST_PRIME = "almost_prime"
    # 1 / ((1-sum) a_1...a_k)
    PRIME = "prime"


REGION_DIMENSION = {
    RegionId.F131: 6,
    RegionId.F132: 4,
    RegionId.G132: 5,
    RegionId.F2: 2,
    RegionId.G2: 3,
    RegionId.F3: 2,
}

REGION_WEIGHT = {
    RegionId.F131: WeightKind.ALMOST_PRIME,
    RegionId.F132: WeightKind.PRIME,
    RegionId.G132: WeightKind.ALMOST_PRIME,
    RegionId.F2: WeightKind.PRIME,
    RegionId.G2: WeightKind.ALMOST_PRIME,
    RegionId.F3: WeightKind.ALMOST_PRIME,
}


@dataclass(frozen=True)
class Region:
    """One integration domain, bound to a parameter bundle.

    strict_gap extends the gap-avoidance rule in G2/F3 from the printed
    pair/singleton sums to all nonempty subset sums (sensitivity variant).
    """

    id: RegionId
    params: SieveParameters
    strict_gap: bool = False

    @property
    def dimension(self) -> int:
        return REGION_DIMENSION[self.id]

    @property
    def weight_kind(self) -> WeightKind:
        return REGION_WEIGHT[self.id]


def make_region(region_id: RegionId | str, params: SieveParameters, strict_gap: bool = False) -> Region:
    rid = RegionId(region_id) if not isinstance(region_id, RegionId) else region_id
    return Region(id=rid, params=params, strict_gap=strict_gap)


def subset_sums_avoid(
    alpha: Sequence[float], gap: GapSet, families: Sequence[Sequence[int]] | None = None
) -> bool:
    """True iff no listed subset sum of alpha lands in the gap set.

    families defaults to all nonempty subsets. Empty alpha is vacuously true.
    """
    if families is None:
        idx = range(len(alpha))
        families = [c for r in range(1, len(alpha) + 1) for c in combinations(idx, r)]
    lo, hi = float(gap.outer_lo), float(gap.outer_hi)
    ilo, ihi = float(gap.inner_lo), float(gap.inner_hi)
    for fam in families:
        s = sum(alpha[j] for j in fam)
        if lo <= s <= hi and not (ilo <= s <= ihi):
            return False
    return True


def region_constants(region: Region) -> dict[str, float]:
    """Float constants consumed by the scalar and block indicator kernels."""
    p = region.params
    return {
        "lo": float(p.sigma - 2 * p.varpi),
        "half_m_sigma": float(0.5 - p.sigma),
        "half_p_sigma": float(0.5 + p.sigma),
        "half_m_2w": float(0.5 - 2 * p.varpi),
        "alpha_thr": float(p.alpha_threshold),
        "gap_out_lo": float(p.gap.outer_lo),
        "gap_out_hi": float(p.gap.outer_hi),
        "gap_in_lo": float(p.gap.inner_lo),
        "gap_in_hi": float(p.gap.inner_hi),
        "strict_gap": 1.0 if region.strict_gap else 0.0,
    }


def _in_gap(s: float, c: dict[str, float]) -> bool:
    return c["gap_out_lo"] <= s <= c["gap_out_hi"] and not (
        c["gap_in_lo"] <= s <= c["gap_in_hi"]
    )


def _all_subsets_avoid(alpha: Sequence[float], c: dict[str, float]) -> bool:
    for r in range(1, len(alpha) + 1):
        for comb in combinations(alpha, r):
            if _in_gap(sum(comb), c):
                return False
    return True


def _descending_in_box(alpha: Sequence[float], c: dict[str, float], upper: float) -> bool:
    """lo < a_k < ... < a_1 < upper, all strict."""
    if not alpha[-1] > c["lo"]:
        return False
    for j in range(len(alpha) - 1):
        if not alpha[j + 1] < alpha[j]:
            return False
    return alpha[0] < upper


def _prefix_budget_ok(alpha: Sequence[float]) -> bool:
    """max_k (a_k + sum_{j<=k} a_j) <= 1."""
    acc = 0.0
    for a in alpha:
        acc += a
        if a + acc > 1.0:
            return False
    return True


def _short_variable_cap_ok(alpha: Sequence[float], c: dict[str, float]) -> bool:
    """2*a_2 <= max(2*alpha_thr, 1/2 + sigma - a_1)."""
    return 2.0 * alpha[1] <= max(2.0 * c["alpha_thr"], c["half_p_sigma"] - alpha[0])


def _f132_base(alpha: Sequence[float], c: dict[str, float]) -> bool:
    """The four-variable base set shared by F132 and G132 (without its subset rule)."""
    return (
        _descending_in_box(alpha, c, c["half_m_sigma"])
        and alpha[0] + alpha[1] <= c["half_m_sigma"]
        and _short_variable_cap_ok(alpha, c)
        and _prefix_budget_ok(alpha)
        and alpha[0] + alpha[1] + alpha[2] + alpha[3] >= c["half_m_2w"]
    )


def indicator(region: Region, alpha: Sequence[float]) -> int:
    """Evaluate the region's characteristic function at alpha (1 or 0)."""
    k = region.dimension
    if len(alpha) != k:
        raise ValueError(f"{region.id.value} expects {k} coordinates, got {len(alpha)}")
    c = region_constants(region)
    rid = region.id

    if rid is RegionId.F131:
        ok = (
            _descending_in_box(alpha, c, c["half_m_sigma"])
            and alpha[0] + alpha[1] + alpha[2] + alpha[3] <= c["half_m_sigma"]
            and _short_variable_cap_ok(alpha, c)
            and _prefix_budget_ok(alpha)
            and _all_subsets_avoid(alpha, c)
        )
    elif rid is RegionId.F132:
        ok = _f132_base(alpha, c) and _all_subsets_avoid(alpha, c)
    elif rid is RegionId.G132:
        a5 = alpha[4]
        head = alpha[:4]
        ok = (
            _f132_base(head, c)
            and head[3] < a5 <= (1.0 - sum(head)) / 2.0
            and _all_subsets_avoid(alpha, c)
        )
    elif rid is RegionId.F2:
        a1, a2 = alpha
        ok = (
            c["lo"] < a2 < a1
            and a1 + a2 <= c["half_m_sigma"]
            and a2 > c["alpha_thr"]
            and a1 + 2.0 * a2 > c["half_p_sigma"]
        )
    elif rid is RegionId.G2:
        a1, a2, a3 = alpha
        ok = (
            c["lo"] < a2 < a1
            and a1 + a2 <= c["half_m_sigma"]
            and a2 > c["alpha_thr"]
            and a1 + 2.0 * a2 > c["half_p_sigma"]
            and a2 < a3 <= (1.0 - a1 - a2) / 2.0
        )
        if ok:
            if region.strict_gap:
                ok = _all_subsets_avoid(alpha, c)
            else:
                ok = not _in_gap(a1 + a3, c) and not _in_gap(a2 + a3, c)
    elif rid is RegionId.F3:
        a1, a2 = alpha
        ok = (
            c["lo"] < a2 < a1 < 0.5
            and a1 + a2 > c["half_m_2w"]
            and a1 + 2.0 * a2 < 1.0
        )
        if ok:
            if region.strict_gap:
                ok = _all_subsets_avoid(alpha, c)
            else:
                ok = not _in_gap(a1, c) and not _in_gap(a1 + a2, c)
    else:  # pragma: no cover
        raise ValueError(f"unknown region {rid}")
    return 1 if ok else 0
