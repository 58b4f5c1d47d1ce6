"""Risk-ratio estimators on stratified 2x2 tables.

Observed data for a visit pair (j, k) are two exposure-by-outcome tables
at time j: one over subjects whose outcome at the earlier time k was 1,
one over those with 0.  The crude risk ratio ignores the stratification;
the conditional ratios are the time-j risk ratios within each stratum.
All confidence intervals are the usual log-scale normal-approximation
intervals, symmetric on the log scale by construction.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist

from .errors import (
    DegenerateTableError,
    DomainError,
    UndefinedCorrelationError,
    UndefinedMeasureError,
)
from .model import BernoulliPairParams, cond_prob_given0, cond_prob_given1


@dataclass(frozen=True)
class StratumTable:
    """One 2x2 exposure-by-outcome table.

    a/b: exposed with/without the outcome, c/d: non-exposed likewise.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise DegenerateTableError(f"count {name} must be a nonnegative integer, got {v!r}")

    @property
    def n_exposed(self) -> int:
        return self.a + self.b

    @property
    def n_unexposed(self) -> int:
        return self.c + self.d


@dataclass(frozen=True)
class StratifiedTables:
    """The pair of stratum tables for one visit pair: earlier outcome 1 / 0."""

    stratum1: StratumTable
    stratum0: StratumTable

    @property
    def n_exposed(self) -> int:
        return self.stratum1.n_exposed + self.stratum0.n_exposed

    @property
    def n_unexposed(self) -> int:
        return self.stratum1.n_unexposed + self.stratum0.n_unexposed


@dataclass(frozen=True)
class RiskRatioEstimate:
    """Point estimate with its log-scale SE and CI.

    ci bounds are point * exp(-+ z * log_se) where z is the standard
    normal quantile at 1 - alpha/2.
    """

    point: float
    log_se: float
    ci_lower: float
    ci_upper: float
    level: float


@lru_cache(maxsize=None)
def z_quantile(level: float) -> float:
    """Standard normal quantile at 1 - alpha/2 for a two-sided CI."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must be in (0, 1), got {level!r}")
    return NormalDist().inv_cdf(0.5 + level / 2.0)


def stratum_rr_estimate(a: int, n_e: int, c: int, n_ne: int, level: float = 0.95) -> RiskRatioEstimate:
    """Risk ratio (a/n_e) / (c/n_ne) with the log-scale Wald CI.

    This is the shared arithmetic behind rr1_estimate and rr0_estimate;
    the exact coverage engine replicates this expression tree, so keep
    the order of operations stable.
    """
    if n_e < 1 or n_ne < 1:
        raise DegenerateTableError("empty exposure row in stratum table")
    if a < 1 or c < 1:
        raise DegenerateTableError(
            f"zero outcome count (a={a}, c={c}): estimate or its log undefined"
        )
    z = z_quantile(level)
    risk_e = a / n_e
    risk_ne = c / n_ne
    point = risk_e / risk_ne
    var = (1.0 - risk_e) / (n_e * risk_e) + (1.0 - risk_ne) / (n_ne * risk_ne)
    log_se = math.sqrt(var)
    half = z * log_se
    return RiskRatioEstimate(
        point=point,
        log_se=log_se,
        ci_lower=point * math.exp(-half),
        ci_upper=point * math.exp(half),
        level=level,
    )


def rr_crude(table: StratumTable, level: float = 0.95) -> RiskRatioEstimate:
    """Crude risk ratio of a cohort 2x2 table with its log-scale Wald CI."""
    n_e, n_ne = table.n_exposed, table.n_unexposed
    if n_e < 1 or n_ne < 1:
        raise DegenerateTableError("empty exposure row in cohort table")
    if table.a < 1 or table.c < 1:
        raise DegenerateTableError(
            f"zero outcome count (a={table.a}, c={table.c}): estimate or its log undefined"
        )
    z = z_quantile(level)
    risk_e = table.a / n_e
    risk_ne = table.c / n_ne
    point = risk_e / risk_ne
    log_se = math.sqrt((1.0 - risk_e) / table.a + (1.0 - risk_ne) / table.c)
    half = z * log_se
    return RiskRatioEstimate(
        point=point,
        log_se=log_se,
        ci_lower=point * math.exp(-half),
        ci_upper=point * math.exp(half),
        level=level,
    )


def rr1_estimate(tables: StratifiedTables, level: float = 0.95) -> RiskRatioEstimate:
    """Conditional risk ratio among subjects with the earlier outcome = 1."""
    t = tables.stratum1
    return stratum_rr_estimate(t.a, t.n_exposed, t.c, t.n_unexposed, level)


def rr0_estimate(tables: StratifiedTables, level: float = 0.95) -> RiskRatioEstimate:
    """Conditional risk ratio among subjects with the earlier outcome = 0."""
    t = tables.stratum0
    return stratum_rr_estimate(t.a, t.n_exposed, t.c, t.n_unexposed, level)


def _phi(x1: int, y1: int, x0: int, y0: int) -> float:
    """Phi coefficient of the 2x2 table [[x1, y1], [x0, y0]].

    Rows are the earlier outcome (1 then 0), columns the later outcome
    (1 then 0).  Equals the Pearson correlation of the paired binary
    observations.
    """
    n1 = x1 + y1
    n0 = x0 + y0
    col_yes = x1 + x0
    col_no = y1 + y0
    if n1 == 0 or n0 == 0 or col_yes == 0 or col_no == 0:
        raise UndefinedCorrelationError(
            "zero margin: within-subject correlation undefined"
        )
    num = x1 * n0 - x0 * n1  # == x1*y0 - x0*y1
    return num / math.sqrt(float(n1) * n0 * col_yes * col_no)


def phi_correlations(
    tables: StratifiedTables, paper_literal: bool = False
) -> tuple[float, float]:
    """Within-subject outcome correlations (exposed, non-exposed).

    Each is the phi coefficient of that group's earlier-by-later outcome
    table.  paper_literal=True reproduces, for audit, the published form
    of the non-exposed denominator, which mixes in the exposed group's
    no-outcome column margin (b1+b0) instead of (d1+d0).
    """
    s1, s0 = tables.stratum1, tables.stratum0
    rho_e = _phi(s1.a, s1.b, s0.a, s0.b)
    if paper_literal:
        n1, n0 = s1.n_unexposed, s0.n_unexposed
        col_yes = s1.c + s0.c
        wrong_col = s1.b + s0.b
        if n1 == 0 or n0 == 0 or col_yes == 0 or wrong_col == 0:
            raise UndefinedCorrelationError(
                "zero margin: within-subject correlation undefined"
            )
        num = s1.c * n0 - s0.c * n1
        rho_ne = num / math.sqrt(float(n1) * n0 * col_yes * wrong_col)
    else:
        rho_ne = _phi(s1.c, s1.d, s0.c, s0.d)
    return rho_e, rho_ne


def plug_in_rr1(
    pi_j_e: float,
    pi_k_e: float,
    rho_e: float,
    pi_j_ne: float,
    pi_k_ne: float,
    rho_ne: float,
) -> float:
    """Population risk ratio at j among subjects with the earlier outcome = 1."""
    num = cond_prob_given1(BernoulliPairParams(pi_j_e, pi_k_e, rho_e))
    den = cond_prob_given1(BernoulliPairParams(pi_j_ne, pi_k_ne, rho_ne))
    if den <= 0.0:
        raise UndefinedMeasureError("non-exposed conditional probability is zero")
    return num / den


def plug_in_rr0(
    pi_j_e: float,
    pi_k_e: float,
    rho_e: float,
    pi_j_ne: float,
    pi_k_ne: float,
    rho_ne: float,
) -> float:
    """Population risk ratio at j among subjects with the earlier outcome = 0."""
    num = cond_prob_given0(BernoulliPairParams(pi_j_e, pi_k_e, rho_e))
    den = cond_prob_given0(BernoulliPairParams(pi_j_ne, pi_k_ne, rho_ne))
    if den <= 0.0:
        raise UndefinedMeasureError("non-exposed conditional probability is zero")
    return num / den
