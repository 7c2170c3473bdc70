"""Desk-scale families of smooth-square moduli and prime counts in progressions.

The family construction mirrors the product-of-K-primes structure with dyadic
prime intervals re-centered so that d^2 stays within a bounded constant of
D = X^(1/2 + 2*varpi); the asymptotic statements are not reproducible at desk
scale, so the report checks distributional sanity (Poisson bands) instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .nt import is_prime
from .params import REFERENCE_VARPI, RatLike, parse_rational

SIEVE_MODULUS_LIMIT = 10_000_000
SIEVE_RANGE_LIMIT = 10_000_000_000
_SEGMENT_ODDS = 1 << 22

RATIO_THRESHOLD = 0.05  # the lower-bound constant the asymptotic result certifies


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def segmented_prime_counts(
    x_lo: int, x_hi: int, residue_specs: list[tuple[int, int]]
) -> tuple[list[int], int]:
    """Counts of primes in (x_lo, x_hi] for each (modulus, residue), plus the total.

    One odd-wheel segmented pass; segments are merged in index order, so the
    output is deterministic under any parallel segment schedule.
    """
    if x_hi > SIEVE_RANGE_LIMIT:
        raise ValueError(f"range end {x_hi} beyond sieve limit {SIEVE_RANGE_LIMIT}")
    counts = [0] * len(residue_specs)
    total = 0
    if x_hi <= x_lo:
        return counts, total
    if x_lo < 2 <= x_hi:
        total += 1
        for i, (m, a) in enumerate(residue_specs):
            if 2 % m == a % m:
                counts[i] += 1
    base = simple_sieve(math.isqrt(x_hi))
    base_odd = base[base > 2]
    lo = max(3, x_lo + 1)
    if lo % 2 == 0:
        lo += 1
    while lo <= x_hi:
        hi = min(lo + 2 * _SEGMENT_ODDS - 2, x_hi if x_hi % 2 else x_hi - 1)
        n_odds = (hi - lo) // 2 + 1
        flags = np.ones(n_odds, dtype=bool)
        for p in base_odd:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start > hi:
                continue
            flags[(start - lo) // 2 :: p] = False
        if lo <= 3 <= hi:
            pass  # 3 survives: clearing starts at p*p
        values = lo + 2 * np.flatnonzero(flags).astype(np.int64)
        total += len(values)
        for i, (m, a) in enumerate(residue_specs):
            counts[i] += int(np.count_nonzero(values % m == a % m))
        lo = hi + 2
    return counts, total


def prime_count_in_progression(x_scale: int, modulus: int, residue: int) -> int:
    """Exact count of primes p in (X, 2X] with p = residue (mod modulus).

    modulus = 1 counts unconditionally. The residue is normalized mod the
    modulus; non-coprime residues are rejected (the count would be trivially
    0 or 1, and asking for it is almost always a bug upstream).
    """
    if modulus < 1 or modulus > SIEVE_MODULUS_LIMIT:
        raise ValueError(f"modulus must be in [1, {SIEVE_MODULUS_LIMIT}]")
    if 2 * x_scale > SIEVE_RANGE_LIMIT:
        raise ValueError(f"X={x_scale} beyond the sieve range")
    if modulus == 1:
        _, total = segmented_prime_counts(x_scale, 2 * x_scale, [])
        return total
    a = residue % modulus
    if math.gcd(a, modulus) != 1:
        raise ValueError(f"residue {residue} not coprime to modulus {modulus}")
    counts, _ = segmented_prime_counts(x_scale, 2 * x_scale, [(modulus, a)])
    return counts[0]


def mr_count_in_progression(x_scale: int, modulus: int, residue: int) -> int:
    """Miller-Rabin scan of the progression; the independent cross-check oracle."""
    if modulus == 1:
        return sum(1 for n in range(x_scale + 1, 2 * x_scale + 1) if is_prime(n))
    a = residue % modulus
    first = x_scale + 1 + (a - (x_scale + 1)) % modulus
    return sum(1 for n in range(first, 2 * x_scale + 1, modulus) if is_prime(n))


@dataclass(frozen=True)
class FamilyMember:
    primes: tuple[int, ...]
    d: int
    r: int  # product of the first split_index primes
    q: int  # product of the rest


@dataclass(frozen=True)
class ModuliFamily:
    x_scale: int
    block_count: int
    varpi: Fraction
    delta: Fraction
    d_size: float  # D = X^(1/2 + 2*varpi)
    p_size: float  # P = D^(1/K)
    intervals: tuple[tuple[float, float], ...]
    members: tuple[FamilyMember, ...]
    split_index: int
    split_in_window: bool
    q_window: tuple[float, float]
    d_sq_constants: tuple[float, float]
    notes: tuple[str, ...] = field(default_factory=tuple)


def build_family(
    x_scale: int,
    block_count: int,
    delta: RatLike = Fraction(1, 100),
    varpi: RatLike = REFERENCE_VARPI,
    max_members: int | None = None,
    seed: int = 0,
) -> ModuliFamily:
    """Enumerate the moduli d = p_1 ... p_K with one prime per dyadic interval.

    The K intervals are (2^(j-1-s) sqrt(P), 2^(j-s) sqrt(P)] with s = floor(K/2),
    which keeps d^2 within family constants of D at every desk-scale K. The
    split index realizing the Type-I Q-window is recorded when achievable;
    otherwise the closest split is kept and noted.
    """
    if x_scale < 10**6:
        raise ValueError("X must be at least 1e6")
    if block_count < 1:
        raise ValueError("need at least one prime block")
    w = parse_rational(varpi)
    dlt = parse_rational(delta)
    notes: list[str] = []
    d_size = x_scale ** (0.5 + 2 * float(w))
    p_size = d_size ** (1.0 / block_count)
    sqrt_p = math.sqrt(p_size)
    shift = block_count // 2

    intervals = []
    primes_per_block = []
    for j in range(1, block_count + 1):
        lo = 2.0 ** (j - 1 - shift) * sqrt_p
        hi = 2.0 ** (j - shift) * sqrt_p
        intervals.append((lo, hi))
        candidates = simple_sieve(math.floor(hi))
        block = candidates[(candidates > lo) & (candidates <= hi)]
        if len(block) == 0:
            raise ValueError(f"interval I_{j} = ({lo:.3f}, {hi:.3f}] contains no primes")
        primes_per_block.append([int(p) for p in block])

    combos = list(product(*primes_per_block))
    if max_members is not None and len(combos) > max_members:
        rng = np.random.default_rng(seed)
        picks = rng.choice(len(combos), size=max_members, replace=False)
        notes.append(f"sampled {max_members} of {len(combos)} members")
        combos = [combos[i] for i in sorted(picks)]

    # Type-I window for Q = P^(K - K0); pick the split whose log-Q is nearest.
    q_window = (
        x_scale ** float(16 * w + 8 * dlt),
        x_scale ** float(16 * w + 9 * dlt),
    )
    center = math.sqrt(q_window[0] * q_window[1])
    split_index = min(
        range(block_count + 1),
        key=lambda k0: abs(math.log(p_size ** (block_count - k0)) - math.log(center)),
    )
    q_achieved = p_size ** (block_count - split_index)
    split_in_window = q_window[0] <= q_achieved <= q_window[1]
    if not split_in_window:
        notes.append(
            f"no split lands in the Type-I Q-window [{q_window[0]:.3f}, {q_window[1]:.3f}]; "
            f"closest is K0={split_index} with Q~{q_achieved:.3f}"
        )

    c_const = 2.0 ** (block_count * (block_count - 1) - 2 * block_count * shift)
    big_const = 2.0 ** (block_count * (block_count + 1) - 2 * block_count * shift)
    members = []
    for primes in combos:
        d = math.prod(primes)
        r = math.prod(primes[:split_index])
        q = math.prod(primes[split_index:])
        if not c_const * d_size < d * d <= big_const * d_size:
            raise AssertionError(f"member d={d}: d^2 outside [{c_const}*D, {big_const}*D]")
        if math.gcd(r, q) != 1:
            raise AssertionError(f"member d={d}: split ({r}, {q}) not coprime")
        members.append(FamilyMember(primes=tuple(primes), d=d, r=r, q=q))

    return ModuliFamily(
        x_scale=x_scale,
        block_count=block_count,
        varpi=w,
        delta=dlt,
        d_size=d_size,
        p_size=p_size,
        intervals=tuple(intervals),
        members=tuple(members),
        split_index=split_index,
        split_in_window=split_in_window,
        q_window=q_window,
        d_sq_constants=(c_const, big_const),
        notes=tuple(notes),
    )


def phi_of_d_squared(member: FamilyMember) -> int:
    """phi(d^2) = prod p(p-1) for squarefree d with known prime factors."""
    return math.prod(p * (p - 1) for p in member.primes)


@dataclass(frozen=True)
class CountRow:
    d: int
    d_sq: int
    count: int
    expectation: float
    ratio: float
    z: float


@dataclass(frozen=True)
class CountReport:
    rows: tuple[CountRow, ...]
    residue: int
    interval_primes: int
    mean_ratio: float
    frac_below_threshold: float
    frac_within_3sigma: float
    skipped: tuple[int, ...]


def equidistribution_report(family: ModuliFamily, residue: int) -> CountReport:
    """Per-member prime counts in (X, 2X] against the (pi(2X)-pi(X))/phi(d^2) expectation.

    Members with gcd(residue, d^2) > 1 are skipped (only finitely many primes
    could ever land there). The 0.05 lower-bound threshold is reported against;
    acceptance at desk scale is the Poisson 3-sigma band.
    """
    if not family.members:
        raise ValueError("family has no members")
    x = family.x_scale
    usable, skipped = [], []
    for m in family.members:
        if math.gcd(residue, m.d * m.d) == 1:
            usable.append(m)
        else:
            skipped.append(m.d)
    if not usable:
        raise ValueError("every member shares a factor with the residue")
    specs = [(m.d * m.d, residue % (m.d * m.d)) for m in usable]
    counts, total = segmented_prime_counts(x, 2 * x, specs)
    rows = []
    for m, count in zip(usable, counts):
        expectation = total / phi_of_d_squared(m)
        ratio = count / expectation
        z = (count - expectation) / math.sqrt(expectation)
        rows.append(
            CountRow(
                d=m.d, d_sq=m.d * m.d, count=count,
                expectation=expectation, ratio=ratio, z=z,
            )
        )
    ratios = [r.ratio for r in rows]
    return CountReport(
        rows=tuple(rows),
        residue=residue,
        interval_primes=total,
        mean_ratio=float(np.mean(ratios)),
        frac_below_threshold=float(np.mean([r <= RATIO_THRESHOLD for r in ratios])),
        frac_within_3sigma=float(np.mean([abs(r.z) <= 3.0 for r in rows])),
        skipped=tuple(skipped),
    )
