import numpy as np
import pytest

from sqsieve import _kernels_py
from sqsieve.integrator import _consts_vector
from sqsieve.params import GapSet, derive_parameters, reference_parameters
from sqsieve.regions import (
    REGION_DIMENSION,
    RegionId,
    WeightKind,
    indicator,
    make_region,
    region_constants,
    subset_sums_avoid,
)

try:
    from sqsieve import _kernels
except ImportError:
    _kernels = None

PARAMS = reference_parameters()

KERNEL_CODES = {
    RegionId.F131: _kernels_py.CODE_F131,
    RegionId.F132: _kernels_py.CODE_F132,
    RegionId.G132: _kernels_py.CODE_G132,
    RegionId.F2: _kernels_py.CODE_F2,
    RegionId.G2: _kernels_py.CODE_G2,
    RegionId.F3: _kernels_py.CODE_F3,
}


def test_dimensions_and_weights():
    dims = {r: make_region(r, PARAMS).dimension for r in RegionId}
    assert dims == {
        RegionId.F131: 6, RegionId.F132: 4, RegionId.G132: 5,
        RegionId.F2: 2, RegionId.G2: 3, RegionId.F3: 2,
    }
    assert make_region(RegionId.F132, PARAMS).weight_kind is WeightKind.PRIME
    assert make_region(RegionId.F2, PARAMS).weight_kind is WeightKind.PRIME
    for rid in (RegionId.F131, RegionId.G132, RegionId.G2, RegionId.F3):
        assert make_region(rid, PARAMS).weight_kind is WeightKind.ALMOST_PRIME


def test_f3_examples():
    f3 = make_region(RegionId.F3, PARAMS)
    assert indicator(f3, (0.44, 0.17)) == 1
    assert indicator(f3, (0.30, 0.24)) == 0  # 0.54 lands in the gap set
    assert indicator(f3, (0.30, 0.02)) == 0  # below the lower edge


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        indicator(make_region(RegionId.F3, PARAMS), (0.3, 0.2, 0.1))


def test_subset_sums_avoid_examples():
    gap = PARAMS.gap
    assert subset_sums_avoid((0.1, 0.1), gap)
    assert not subset_sums_avoid((0.45, 0.02), gap)
    assert subset_sums_avoid((), gap)
    # restricting the families can rescue a vector the full rule rejects
    assert subset_sums_avoid((0.45, 0.02), gap, families=[(1,)])


def test_ordering_is_enforced():
    f131 = make_region(RegionId.F131, PARAMS)
    good = (0.09, 0.08, 0.07, 0.065, 0.06, 0.055)
    assert indicator(f131, good) == 1
    swapped = (0.08, 0.09, 0.07, 0.065, 0.06, 0.055)
    assert indicator(f131, swapped) == 0
    f2 = make_region(RegionId.F2, PARAMS)
    pt = (0.29, 0.155)
    assert indicator(f2, pt) == 1
    assert indicator(f2, pt[::-1]) == 0


def test_gap_monotonicity_on_constructed_points():
    # Growing varpi shrinks the gap set; with every other constant held fixed,
    # an accepted point stays accepted under the smaller gap.
    wide = GapSet(*(PARAMS.gap.outer_lo, PARAMS.gap.outer_hi,
                    PARAMS.gap.inner_lo, PARAMS.gap.inner_hi))
    narrow = GapSet(wide.outer_lo, wide.outer_hi,
                    wide.inner_lo - 0.01, wide.inner_hi + 0.01)
    pts = [(0.1, 0.2), (0.3, 0.199), (0.05, 0.44), (0.26, 0.24)]
    for pt in pts:
        if subset_sums_avoid(pt, wide):
            assert subset_sums_avoid(pt, narrow)


def test_strict_gap_variant_is_stronger():
    rng = np.random.default_rng(7)
    plain = make_region(RegionId.F3, PARAMS)
    strict = make_region(RegionId.F3, PARAMS, strict_gap=True)
    pts = rng.uniform(0.05, 0.55, size=(20000, 2))
    pts.sort(axis=1)
    pts = pts[:, ::-1]
    kept_plain = kept_strict = 0
    for pt in pts:
        a, b = indicator(plain, pt), indicator(strict, pt)
        assert b <= a
        kept_plain += a
        kept_strict += b
    assert kept_plain > 0


@pytest.mark.parametrize("rid", list(RegionId))
def test_contained_in_simplex(rid):
    # Accepted points always satisfy sum(alpha) < 1; one million samples per region.
    region = make_region(rid, PARAMS)
    consts = _consts_vector(region)
    rng = np.random.default_rng(int(KERNEL_CODES[rid]))
    k = region.dimension
    pts = np.exp(rng.uniform(np.log(0.0508), np.log(0.5513), size=(1_000_000, k)))
    prefix = {6: 6, 4: 4, 5: 4, 2: 2, 3: 2}[k]
    pts[:, :prefix] = -np.sort(-pts[:, :prefix], axis=1)
    mask = _kernels_py._accept_mask(KERNEL_CODES[rid], consts, pts)
    assert np.all(pts[mask].sum(axis=1) < 1.0)


@pytest.mark.parametrize("rid", list(RegionId))
def test_scalar_matches_block_kernel(rid):
    region = make_region(rid, PARAMS)
    consts = _consts_vector(region)
    rng = np.random.default_rng(42 + int(KERNEL_CODES[rid]))
    k = region.dimension
    pts = np.exp(rng.uniform(np.log(0.0508), np.log(0.5513), size=(40000, k)))
    prefix = {6: 6, 4: 4, 5: 4, 2: 2, 3: 2}[k]
    pts[:, :prefix] = -np.sort(-pts[:, :prefix], axis=1)
    mask = _kernels_py._accept_mask(KERNEL_CODES[rid], consts, pts)
    idx = rng.choice(len(pts), size=500, replace=False)
    for i in idx:
        assert indicator(region, tuple(pts[i])) == int(mask[i])


@pytest.mark.skipif(_kernels is None, reason="compiled kernels unavailable")
@pytest.mark.parametrize("rid", list(RegionId))
def test_compiled_matches_python_kernel(rid):
    region = make_region(rid, PARAMS)
    consts = _consts_vector(region)
    rng = np.random.default_rng(99 + int(KERNEL_CODES[rid]))
    k = region.dimension
    pts = np.exp(rng.uniform(np.log(0.0508), np.log(0.5513), size=(200000, k)))
    prefix = {6: 6, 4: 4, 5: 4, 2: 2, 3: 2}[k]
    pts[:, :prefix] = -np.sort(-pts[:, :prefix], axis=1)
    pts = np.ascontiguousarray(pts)
    empty = np.zeros(2)
    args = (consts, pts, region.weight_kind is WeightKind.PRIME,
            _kernels_py.OMEGA_UPPER_MODE, empty, 1.0, True)
    s_py, n_py = _kernels_py.eval_block(KERNEL_CODES[rid], *args)
    s_c, n_c = _kernels.eval_block(KERNEL_CODES[rid], *args)
    assert n_py == n_c
    assert s_c == pytest.approx(s_py, rel=1e-12, abs=1e-12)


def test_region_constants_reflect_params():
    small_sigma = derive_parameters("1/25", "1/4000", "1/100000")
    c_ref = region_constants(make_region(RegionId.F3, PARAMS))
    c_small = region_constants(make_region(RegionId.F3, small_sigma))
    assert c_small["lo"] < c_ref["lo"]
    assert c_small["gap_out_lo"] > c_ref["gap_out_lo"]
    assert c_ref["strict_gap"] == 0.0


def test_region_enlarges_when_sigma_shrinks():
    # Every constraint of the two- and three-variable regions loosens as the
    # bilinear width shrinks, so acceptance can only grow pointwise.
    small = derive_parameters("1/25", "1/4000", 0)
    rng = np.random.default_rng(5)
    for rid in (RegionId.F2, RegionId.G2, RegionId.F3):
        wide_r = make_region(rid, PARAMS)
        narrow_r = make_region(rid, small)
        k = wide_r.dimension
        pts = np.exp(rng.uniform(np.log(0.0508), np.log(0.5513), size=(60000, k)))
        pts[:, :2] = -np.sort(-pts[:, :2], axis=1)
        c_wide = _consts_vector(wide_r)
        c_narrow = _consts_vector(narrow_r)
        m_wide = _kernels_py._accept_mask(KERNEL_CODES[rid], c_wide, pts)
        m_narrow = _kernels_py._accept_mask(KERNEL_CODES[rid], c_narrow, pts)
        assert not np.any(m_wide & ~m_narrow)
