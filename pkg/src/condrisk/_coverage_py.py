"""Pure-Python coverage kernel.

Reference implementation of the hot loop: for every pair of outcome
counts (a, c) inside the retained windows it rebuilds the log-scale Wald
interval exactly as measures.stratum_rr_estimate does and accumulates
the joint probability mass of covering and non-covering pairs.

The compiled kernel in _coverage_ext.pyx mirrors this code line for
line.  Both lanes must produce bit-identical sums, so the expression
trees, the hoisting of the exposed-group variance term, and the
compensated-summation pattern here are load-bearing; do not "simplify"
one lane without the other.
"""

import math

__all__ = ["cover_sums", "BACKEND"]

BACKEND = "python"


def cover_sums(pa, pc, a_lo, a_hi, c_lo, c_hi, n_e, n_ne, z, true_rr):
    """Sum joint pmf mass over covering and non-covering count pairs.

    pa, pc: full pmf arrays for the exposed / non-exposed outcome counts
    (index = count).  Windows are inclusive.  Returns (cover, noncover),
    each a two-level compensated sum: inner over c at fixed a, then the
    row masses over a, ascending in both indices.
    """
    pa = pa.tolist() if hasattr(pa, "tolist") else list(pa)
    pc = pc.tolist() if hasattr(pc, "tolist") else list(pc)
    exp = math.exp
    sqrt = math.sqrt

    cov_s = 0.0
    cov_comp = 0.0
    non_s = 0.0
    non_comp = 0.0
    for a in range(a_lo, a_hi + 1):
        risk_e = a / n_e
        # identical to the first variance term in stratum_rr_estimate
        term_e = (1.0 - risk_e) / (n_e * risk_e)
        in_cov_s = 0.0
        in_cov_comp = 0.0
        in_non_s = 0.0
        in_non_comp = 0.0
        for c in range(c_lo, c_hi + 1):
            risk_ne = c / n_ne
            point = risk_e / risk_ne
            var = term_e + (1.0 - risk_ne) / (n_ne * risk_ne)
            half = z * sqrt(var)
            covered = point * exp(-half) <= true_rr and true_rr <= point * exp(half)
            x = pc[c]
            if covered:
                t = in_cov_s + x
                if abs(in_cov_s) >= abs(x):
                    in_cov_comp += (in_cov_s - t) + x
                else:
                    in_cov_comp += (x - t) + in_cov_s
                in_cov_s = t
            else:
                t = in_non_s + x
                if abs(in_non_s) >= abs(x):
                    in_non_comp += (in_non_s - t) + x
                else:
                    in_non_comp += (x - t) + in_non_s
                in_non_s = t
        row = pa[a] * (in_cov_s + in_cov_comp)
        t = cov_s + row
        if abs(cov_s) >= abs(row):
            cov_comp += (cov_s - t) + row
        else:
            cov_comp += (row - t) + cov_s
        cov_s = t
        row = pa[a] * (in_non_s + in_non_comp)
        t = non_s + row
        if abs(non_s) >= abs(row):
            non_comp += (non_s - t) + row
        else:
            non_comp += (row - t) + non_s
        non_s = t
    return cov_s + cov_comp, non_s + non_comp
