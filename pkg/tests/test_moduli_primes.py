import math

import numpy as np
import pytest

from sqsieve.moduli_primes import (
    CountRow,
    build_family,
    equidistribution_report,
    mr_count_in_progression,
    phi_of_d_squared,
    prime_count_in_progression,
    segmented_prime_counts,
    simple_sieve,
)
from sqsieve.nt import is_prime


def test_simple_sieve():
    primes = simple_sieve(100)
    assert len(primes) == 25
    assert primes[0] == 2 and primes[-1] == 97


def test_unconditional_count_small():
    assert prime_count_in_progression(100, 1, 0) == 21
    assert prime_count_in_progression(100, 1, 5) == 21  # residue ignored at m = 1


def test_progression_counts_match_miller_rabin():
    assert prime_count_in_progression(10**4, 9, 1) == mr_count_in_progression(10**4, 9, 1)


def test_residue_normalization():
    m = 7
    assert prime_count_in_progression(10**4, m, m + 1) == prime_count_in_progression(10**4, m, 1)


def test_non_coprime_residue_rejected():
    with pytest.raises(ValueError):
        prime_count_in_progression(10**4, 9, 3)
    with pytest.raises(ValueError):
        prime_count_in_progression(10**4, 6, 0)


def test_range_and_modulus_limits():
    with pytest.raises(ValueError):
        prime_count_in_progression(10**4, 10**7 + 1, 1)
    with pytest.raises(ValueError):
        prime_count_in_progression(10**10 + 1, 3, 1)


def test_interval_prime_count_against_two_methods():
    # pi(2e6) - pi(1e6) computed by the sieve and by a Miller-Rabin scan.
    sieve_count = prime_count_in_progression(10**6, 1, 0)
    mr_count = mr_count_in_progression(10**6, 1, 0)
    assert sieve_count == mr_count == 70435


def test_sieve_vs_bruteforce_on_random_instances():
    rng = np.random.default_rng(0xC0FFEE)
    for _ in range(100):
        x = int(rng.integers(10**4, 10**6))
        m = int(rng.integers(2, 1001))
        residues = [a for a in range(1, m) if math.gcd(a, m) == 1]
        a = int(residues[rng.integers(0, len(residues))])
        assert prime_count_in_progression(x, m, a) == mr_count_in_progression(x, m, a)


def test_segment_boundaries_exact():
    # Straddle the segment size to catch off-by-one clearing.
    counts, total = segmented_prime_counts(0, 100, [(4, 1), (4, 3)])
    assert total == 25
    assert counts[0] == 11 and counts[1] == 13  # 2 falls in neither class


def test_family_reference_example():
    fam = build_family(10**8, 2)
    assert [m.d for m in fam.members] == [77, 91, 119, 133]
    assert fam.members[0].primes == (7, 11)
    lo1, hi1 = fam.intervals[0]
    assert lo1 == pytest.approx(5.01, abs=0.02)
    assert hi1 == pytest.approx(10.02, abs=0.03)
    d_size = fam.d_size
    for m in fam.members:
        assert d_size / 16 <= m.d**2 <= 16 * d_size


def test_family_single_block():
    fam = build_family(10**8, 1)
    sqrt_p = math.sqrt(fam.p_size)
    for m in fam.members:
        assert len(m.primes) == 1
        assert sqrt_p < m.primes[0] <= 2 * sqrt_p
        assert is_prime(m.d)
        assert fam.d_size / 16 <= m.d**2 <= 16 * fam.d_size


def test_family_empty_interval_error():
    with pytest.raises(ValueError, match="I_1"):
        build_family(10**6, 5)


def test_family_member_invariants():
    fam = build_family(10**8, 2)
    c_lo, c_hi = fam.d_sq_constants
    for m in fam.members:
        assert len(set(m.primes)) == fam.block_count
        assert m.r * m.q == m.d
        assert math.gcd(m.r, m.q) == 1
        assert c_lo * fam.d_size < m.d**2 <= c_hi * fam.d_size
        for p, (lo, hi) in zip(m.primes, fam.intervals):
            assert lo < p <= hi


def test_family_split_window_note():
    fam = build_family(10**8, 2)
    # Desk scale cannot realize the Type-I window; the closest split is logged.
    assert not fam.split_in_window
    assert any("Q-window" in note for note in fam.notes)
    assert 0 <= fam.split_index <= fam.block_count


def test_family_member_cap():
    full = build_family(10**8, 2)
    capped = build_family(10**8, 2, max_members=2, seed=3)
    assert len(capped.members) == 2
    assert {m.d for m in capped.members} <= {m.d for m in full.members}
    again = build_family(10**8, 2, max_members=2, seed=3)
    assert [m.d for m in again.members] == [m.d for m in capped.members]


def test_phi_of_d_squared():
    fam = build_family(10**8, 2)
    m = fam.members[0]  # d = 77
    assert phi_of_d_squared(m) == 7 * 6 * 11 * 10
    assert phi_of_d_squared(m) == sum(
        1 for k in range(1, 77**2 + 1) if math.gcd(k, 77**2) == 1
    )


def test_equidistribution_report_small_scale():
    fam = build_family(4 * 10**6, 2)
    rep = equidistribution_report(fam, 1)
    assert rep.interval_primes == prime_count_in_progression(4 * 10**6, 1, 0)
    for row in rep.rows:
        assert row.expectation > 0
        assert row.count >= 0
        assert row.ratio == pytest.approx(row.count / row.expectation)
        assert row.z == pytest.approx(
            (row.count - row.expectation) / math.sqrt(row.expectation)
        )


def test_equidistribution_skips_shared_factor_members():
    fam = build_family(10**8, 2)
    rep = equidistribution_report(fam, 11)  # only d = 77 shares the factor 11
    assert set(rep.skipped) == {77}
    assert len(rep.rows) + len(rep.skipped) == len(fam.members)
    with pytest.raises(ValueError):
        equidistribution_report(fam, 7)  # every member contains the prime 7


def test_symmetric_residues_agree_loosely():
    # a = 1 vs a = -1 summaries agree within 3 sigma; reported, not asserted
    # beyond the band check.
    fam = build_family(10**7, 2)
    plus = equidistribution_report(fam, 1)
    minus = equidistribution_report(fam, -1)
    for r1, r2 in zip(plus.rows, minus.rows):
        spread = 3 * math.sqrt(r1.expectation)
        assert abs(r1.count - r2.count) < 2 * spread


def test_zero_count_member_is_flagged():
    row = CountRow(d=77, d_sq=5929, count=0, expectation=30.0, ratio=0.0,
                   z=(0 - 30.0) / math.sqrt(30.0))
    assert abs(row.z) > 3  # the 3-sigma rule catches a dead progression
