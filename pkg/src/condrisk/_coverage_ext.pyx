# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled coverage kernel.

Line-for-line twin of _coverage_py.cover_sums.  Both lanes must return
bit-identical sums: same expression trees, same libm calls, and the
extension is compiled with -ffp-contract=off so no operations are fused.
Keep any change in sync with the pure-Python lane.
"""

from libc.math cimport exp, fabs, sqrt

BACKEND = "compiled"


def cover_sums(double[::1] pa, double[::1] pc,
               long a_lo, long a_hi, long c_lo, long c_hi,
               long n_e, long n_ne, double z, double true_rr):
    """Sum joint pmf mass over covering and non-covering count pairs.

    Same contract as _coverage_py.cover_sums.
    """
    cdef long a, c
    cdef double risk_e, term_e, risk_ne, point, var, half
    cdef double x, t, row
    cdef double cov_s = 0.0, cov_comp = 0.0
    cdef double non_s = 0.0, non_comp = 0.0
    cdef double in_cov_s, in_cov_comp, in_non_s, in_non_comp
    cdef bint covered

    for a in range(a_lo, a_hi + 1):
        risk_e = (<double> a) / (<double> n_e)
        term_e = (1.0 - risk_e) / ((<double> n_e) * risk_e)
        in_cov_s = 0.0
        in_cov_comp = 0.0
        in_non_s = 0.0
        in_non_comp = 0.0
        for c in range(c_lo, c_hi + 1):
            risk_ne = (<double> c) / (<double> n_ne)
            point = risk_e / risk_ne
            var = term_e + (1.0 - risk_ne) / ((<double> n_ne) * risk_ne)
            half = z * sqrt(var)
            covered = point * exp(-half) <= true_rr and true_rr <= point * exp(half)
            x = pc[c]
            if covered:
                t = in_cov_s + x
                if fabs(in_cov_s) >= fabs(x):
                    in_cov_comp += (in_cov_s - t) + x
                else:
                    in_cov_comp += (x - t) + in_cov_s
                in_cov_s = t
            else:
                t = in_non_s + x
                if fabs(in_non_s) >= fabs(x):
                    in_non_comp += (in_non_s - t) + x
                else:
                    in_non_comp += (x - t) + in_non_s
                in_non_s = t
        row = pa[a] * (in_cov_s + in_cov_comp)
        t = cov_s + row
        if fabs(cov_s) >= fabs(row):
            cov_comp += (cov_s - t) + row
        else:
            cov_comp += (row - t) + cov_s
        cov_s = t
        row = pa[a] * (in_non_s + in_non_comp)
        t = non_s + row
        if fabs(non_s) >= fabs(row):
            non_comp += (non_s - t) + row
        else:
            non_comp += (row - t) + non_s
        non_s = t
    return cov_s + cov_comp, non_s + non_comp
