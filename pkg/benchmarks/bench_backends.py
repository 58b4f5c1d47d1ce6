"""Benchmark the compiled coverage kernel against its pure-Python twin.

Runs cover_sums on the full (unpruned) nondegenerate windows of
representative cohort sizes, checks that both lanes return bit-identical
sums, and prints a timing table.  The workload is the hot loop of the
exact coverage engine: one (a, c) double loop per scenario, so the cell
counts below are (n_e - 1) * (n_ne - 1).

Usage: python3 benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

from condrisk._backend import available_backends, backend_name
from condrisk.binomial import pmf_vector, prune_window
from condrisk.coverage import Scenario, true_conditional_risks
from condrisk.measures import z_quantile

CASES = [
    Scenario(n_e=50, n_ne=50, pi_e=0.3, pi_ne=0.3, rho_e=0.5, rho_ne=0.5),
    Scenario(n_e=500, n_ne=500, pi_e=0.3, pi_ne=0.1, rho_e=0.9, rho_ne=0.1),
    Scenario(n_e=2000, n_ne=1000, pi_e=0.5, pi_ne=0.5, rho_e=0.5, rho_ne=0.5),
    Scenario(n_e=2000, n_ne=2000, pi_e=0.7, pi_ne=0.1, rho_e=0.1, rho_ne=0.9),
]


def kernel_inputs(scenario):
    p_e, p_ne, true_rr = true_conditional_risks(scenario)
    pa = pmf_vector(scenario.n_e, p_e)
    pc = pmf_vector(scenario.n_ne, p_ne)
    a_lo, a_hi = prune_window(pa, 0.0)
    c_lo, c_hi = prune_window(pc, 0.0)
    z = z_quantile(scenario.level)
    return (pa, pc, a_lo, a_hi, c_lo, c_hi, scenario.n_e, scenario.n_ne, z, true_rr)


def best_time(fn, args, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repetitions per case; best is reported")
    opts = parser.parse_args(argv)

    backends = available_backends()
    print(f"active backend: {backend_name()}")
    print(f"available: {', '.join(sorted(backends))}")
    if "compiled" not in backends:
        print("compiled extension not built; timing the python lane only")
    print()

    header = f"{'cells':>12} {'python':>12}"
    if "compiled" in backends:
        header += f" {'compiled':>12} {'speedup':>9} {'identical':>10}"
    print(header)

    for scenario in CASES:
        args = kernel_inputs(scenario)
        cells = (scenario.n_e - 1) * (scenario.n_ne - 1)
        t_py, r_py = best_time(backends["python"], args, opts.repeats)
        line = f"{cells:>12,} {t_py:>11.4f}s"
        if "compiled" in backends:
            t_ext, r_ext = best_time(backends["compiled"], args, opts.repeats)
            same = r_ext == r_py  # exact float equality, by construction
            line += f" {t_ext:>11.4f}s {t_py / t_ext:>8.1f}x {str(same):>10}"
            if not same:
                raise SystemExit(
                    f"lane mismatch for {scenario}: python={r_py!r} compiled={r_ext!r}"
                )
        print(line)


if __name__ == "__main__":
    main()
