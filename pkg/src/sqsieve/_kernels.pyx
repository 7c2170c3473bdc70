# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled block integrand kernels (see _kernels_py for the reference)."""

from libc.math cimport isfinite
from libc.math cimport log as clog

import numpy as np

BACKEND_NAME = "compiled"

cdef enum RegionCode:
    _F131 = 0
    _F132 = 1
    _G132 = 2
    _F2 = 3
    _G2 = 4
    _F3 = 5
    _SELFTEST = 6

cdef enum OmegaMode:
    _OMEGA_UPPER = 0
    _OMEGA_TABLE = 1
    _OMEGA_ONE = 2

CODE_F131 = <int> _F131
CODE_F132 = <int> _F132
CODE_G132 = <int> _G132
CODE_F2 = <int> _F2
CODE_G2 = <int> _G2
CODE_F3 = <int> _F3
CODE_SELFTEST = <int> _SELFTEST

OMEGA_UPPER_MODE = <int> _OMEGA_UPPER
OMEGA_TABLE_MODE = <int> _OMEGA_TABLE
OMEGA_ONE_MODE = <int> _OMEGA_ONE

cdef int _LO = 0, _HMS = 1, _HPS = 2, _HM2W = 3, _ATHR = 4
cdef int _GOL = 5, _GOH = 6, _GIL = 7, _GIH = 8, _STRICT = 9


cdef inline bint _gap_hit(double s, const double * c) noexcept nogil:
    return s >= c[_GOL] and s <= c[_GOH] and not (s >= c[_GIL] and s <= c[_GIH])


cdef inline bint _subsets_clear(const double * a, int k, const double * c) noexcept nogil:
    cdef unsigned int m
    cdef int j
    cdef double s
    for m in range(1, <unsigned int> 1 << k):
        s = 0.0
        for j in range(k):
            if m & (<unsigned int> 1 << j):
                s += a[j]
        if _gap_hit(s, c):
            return False
    return True


cdef inline bint _descending(const double * a, int k, const double * c, double upper) noexcept nogil:
    cdef int j
    if a[k - 1] <= c[_LO] or a[0] >= upper:
        return False
    for j in range(k - 1):
        if a[j + 1] >= a[j]:
            return False
    return True


cdef inline bint _prefix_budget(const double * a, int k) noexcept nogil:
    cdef double acc = 0.0
    cdef int j
    for j in range(k):
        acc += a[j]
        if a[j] + acc > 1.0:
            return False
    return True


cdef inline bint _short_cap(const double * a, const double * c) noexcept nogil:
    cdef double cap = c[_HPS] - a[0]
    if 2.0 * c[_ATHR] > cap:
        cap = 2.0 * c[_ATHR]
    return 2.0 * a[1] <= cap


cdef inline bint _f132_base(const double * a, const double * c) noexcept nogil:
    if not _descending(a, 4, c, c[_HMS]):
        return False
    if a[0] + a[1] > c[_HMS]:
        return False
    if not _short_cap(a, c):
        return False
    if not _prefix_budget(a, 4):
        return False
    return a[0] + a[1] + a[2] + a[3] >= c[_HM2W]


cdef inline bint _accept(int code, const double * c, const double * a) noexcept nogil:
    cdef double a1, a2, a3
    if code == _F131:
        if not _descending(a, 6, c, c[_HMS]):
            return False
        if a[0] + a[1] + a[2] + a[3] > c[_HMS]:
            return False
        if not _short_cap(a, c):
            return False
        if not _prefix_budget(a, 6):
            return False
        return _subsets_clear(a, 6, c)
    if code == _F132:
        return _f132_base(a, c) and _subsets_clear(a, 4, c)
    if code == _G132:
        if not _f132_base(a, c):
            return False
        if a[4] <= a[3] or a[4] > (1.0 - a[0] - a[1] - a[2] - a[3]) / 2.0:
            return False
        return _subsets_clear(a, 5, c)
    if code == _F2 or code == _G2:
        a1 = a[0]
        a2 = a[1]
        if a2 <= c[_LO] or a2 >= a1:
            return False
        if a1 + a2 > c[_HMS]:
            return False
        if a2 <= c[_ATHR]:
            return False
        if a1 + 2.0 * a2 <= c[_HPS]:
            return False
        if code == _F2:
            return True
        a3 = a[2]
        if a3 <= a2 or a3 > (1.0 - a1 - a2) / 2.0:
            return False
        if c[_STRICT] != 0.0:
            return _subsets_clear(a, 3, c)
        return not _gap_hit(a1 + a3, c) and not _gap_hit(a2 + a3, c)
    if code == _F3:
        a1 = a[0]
        a2 = a[1]
        if a2 <= c[_LO] or a2 >= a1 or a1 >= 0.5:
            return False
        if a1 + a2 <= c[_HM2W]:
            return False
        if a1 + 2.0 * a2 >= 1.0:
            return False
        if c[_STRICT] != 0.0:
            return _subsets_clear(a, 2, c)
        return not _gap_hit(a1, c) and not _gap_hit(a1 + a2, c)
    # CODE_SELFTEST
    return 0.2 < a[1] < a[0] < 0.3


cdef inline double _omega_factor(double u, int mode, const double * table,
                                 long table_len, double step) noexcept nogil:
    cdef double x, frac
    cdef long i
    if mode == _OMEGA_ONE:
        return 1.0
    if mode == _OMEGA_UPPER:
        if u < 1.0:
            return 0.0
        if u < 2.0:
            return 1.0 / u
        if u < 3.0:
            return (1.0 + clog(u - 1.0)) / u
        if u < 4.0:
            return 0.5644
        return 0.5617
    x = (u - 1.0) / step
    if x < 0.0:
        x = 0.0
    if x > table_len - 1.0:
        x = table_len - 1.0
    i = <long> x
    if i > table_len - 2:
        i = table_len - 2
    frac = x - i
    return table[i] * (1.0 - frac) + table[i + 1] * frac


def eval_block(
    int code,
    const double[::1] consts,
    const double[:, ::1] pts,
    bint weight_prime,
    int omega_mode,
    const double[::1] omega_table,
    double omega_step,
    bint log_density=False,
):
    """Sum of (indicator * weight) over the block, plus the accepted count."""
    cdef long n = pts.shape[0]
    cdef int k = <int> pts.shape[1]
    cdef const double * c = &consts[0]
    cdef const double * table = &omega_table[0]
    cdef long table_len = omega_table.shape[0]
    cdef double wsum = 0.0, w, s, u, head
    cdef long i, accepted = 0
    cdef int j
    cdef bint bad = False
    with nogil:
        for i in range(n):
            if not _accept(code, c, &pts[i, 0]):
                continue
            accepted += 1
            s = 0.0
            for j in range(k):
                s += pts[i, j]
            if weight_prime:
                if log_density:
                    w = 1.0 / (1.0 - s)
                else:
                    head = 1.0
                    for j in range(k):
                        head *= pts[i, j]
                    w = 1.0 / ((1.0 - s) * head)
            else:
                u = (1.0 - s) / pts[i, k - 1]
                w = _omega_factor(u, omega_mode, table, table_len, omega_step)
                if log_density:
                    w = w / pts[i, k - 1]
                else:
                    head = 1.0
                    for j in range(k - 1):
                        head *= pts[i, j]
                    w = w / (head * pts[i, k - 1] * pts[i, k - 1])
            if not isfinite(w):
                bad = True
                break
            wsum += w
    if bad:
        raise FloatingPointError(
            f"non-finite weight inside region code {code}: indicator/precondition mismatch"
        )
    return wsum, accepted
