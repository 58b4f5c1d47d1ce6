"""Exact coverage probabilities of the conditional risk-ratio intervals.

For a scenario with fixed stratum margins, the two outcome counts are
independent binomials.  The engine enumerates every count pair whose
stratum table has all entries positive, rebuilds the log-scale Wald
interval for each pair, and sums the joint probability of the pairs
whose interval covers the population ratio.  Tail pruning with a
certified bound keeps large margins tractable; prune 0 is exhaustive.
"""

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from . import _backend
from ._version import __version__
from .binomial import neumaier_sum, pmf_vector, prune_window
from .errors import DomainError, ParseError, UndefinedMeasureError
from .measures import z_quantile
from .model import BernoulliPairParams

COVERAGE_CSV_HEADER = (
    "n_E,n_nonE,pi_E,pi_nonE,rho_E,rho_nonE,stratum,level,"
    "true_rr,p_c,p_c_normalized,degenerate_mass,truncation_bound"
)

DEFAULT_PRUNE = 1e-12

# default study-grid axes
DEFAULT_N_AXIS = (500, 1000, 2000)
DEFAULT_PI_AXIS = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_RHO_AXIS = (0.1, 0.5, 0.9)


def _check_prune(prune_epsilon: float) -> None:
    if not 0.0 <= prune_epsilon < 1e-6:
        raise DomainError(
            f"prune_epsilon must be in [0, 1e-6), got {prune_epsilon!r}"
        )


def _stratum_risk(pi: float, rho: float, stratum: int) -> float:
    """Outcome probability at the later visit within one stratum.

    Both visits share the marginal pi, so conditioning on the earlier
    outcome gives pi + rho*(1-pi) (stratum 1) or (1-rho)*pi (stratum 0).
    """
    if stratum == 1:
        return pi + rho * (1.0 - pi)
    return (1.0 - rho) * pi


@dataclass(frozen=True)
class Scenario:
    """One coverage-study cell: stratum margins, group parameters, CI level.

    n_e and n_ne are the margins of the stratum table itself, so the
    exposed outcome count is Binomial(n_e, p_e) directly.  Within each
    exposure group both visits share one marginal probability.
    """

    n_e: int
    n_ne: int
    pi_e: float
    pi_ne: float
    rho_e: float
    rho_ne: float
    stratum: int = 1
    level: float = 0.95

    def __post_init__(self):
        for name in ("n_e", "n_ne"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
        if self.stratum not in (0, 1):
            raise DomainError(f"stratum must be 0 or 1, got {self.stratum!r}")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"confidence level must be in (0, 1), got {self.level!r}")
        for pi, rho, grp in ((self.pi_e, self.rho_e, "exposed"), (self.pi_ne, self.rho_ne, "non-exposed")):
            if not 0.0 < pi < 1.0:
                raise DomainError(f"{grp} marginal probability must be in (0, 1), got {pi!r}")
            BernoulliPairParams(pi, pi, rho)  # admissibility check
            p = _stratum_risk(pi, rho, self.stratum)
            if not 0.0 < p < 1.0:
                raise DomainError(
                    f"{grp} stratum-{self.stratum} outcome probability {p!r} "
                    "is degenerate; coverage is undefined"
                )


def true_conditional_risks(scenario: Scenario) -> tuple[float, float, float]:
    """Population stratum risks (exposed, non-exposed) and their ratio."""
    p_e = _stratum_risk(scenario.pi_e, scenario.rho_e, scenario.stratum)
    p_ne = _stratum_risk(scenario.pi_ne, scenario.rho_ne, scenario.stratum)
    if p_ne <= 0.0:
        raise UndefinedMeasureError("non-exposed stratum risk is zero: true ratio undefined")
    return p_e, p_ne, p_e / p_ne


@dataclass(frozen=True)
class CoverageResult:
    """Probability masses from one exact enumeration.

    p_c sums covering nondegenerate pairs against the full joint
    distribution (unnormalized); noncover_mass is the examined
    complement; degenerate_mass covers excluded zero-entry tables;
    truncation_bound bounds whatever pruning skipped.
    """

    true_rr: float
    p_c: float
    noncover_mass: float
    degenerate_mass: float
    truncation_bound: float

    @property
    def p_c_normalized(self) -> float:
        """Coverage conditional on the table being nondegenerate."""
        nondegenerate = 1.0 - self.degenerate_mass
        if nondegenerate <= 0.0:
            return math.nan
        return self.p_c / nondegenerate


def exact_coverage(scenario: Scenario, prune_epsilon: float = DEFAULT_PRUNE) -> CoverageResult:
    """Exact CI coverage for one scenario by full table enumeration.

    Enumerates outcome-count pairs (a, c) with 0 < a < n_e, 0 < c < n_ne
    inside the pruned windows, in fixed ascending order with compensated
    accumulation, so the result is reproducible to the last bit and
    independent of any parallel scheduling above it.
    """
    _check_prune(prune_epsilon)
    p_e, p_ne, true_rr = true_conditional_risks(scenario)
    z = z_quantile(scenario.level)
    pa = pmf_vector(scenario.n_e, p_e)
    pc = pmf_vector(scenario.n_ne, p_ne)
    nondegen_a = neumaier_sum(pa, 1, scenario.n_e)
    nondegen_c = neumaier_sum(pc, 1, scenario.n_ne)
    a_lo, a_hi = prune_window(pa, prune_epsilon)
    c_lo, c_hi = prune_window(pc, prune_epsilon)
    if a_lo > a_hi or c_lo > c_hi:
        cover, noncover = 0.0, 0.0
        window = 0.0
    else:
        cover, noncover = _backend.cover_sums(
            pa, pc, a_lo, a_hi, c_lo, c_hi,
            scenario.n_e, scenario.n_ne, z, true_rr,
        )
        window = neumaier_sum(pa, a_lo, a_hi + 1) * neumaier_sum(pc, c_lo, c_hi + 1)
    return CoverageResult(
        true_rr=true_rr,
        p_c=cover,
        noncover_mass=noncover,
        degenerate_mass=1.0 - nondegen_a * nondegen_c,
        truncation_bound=max(0.0, nondegen_a * nondegen_c - window),
    )


@dataclass(frozen=True)
class GridSpec:
    """Cartesian scenario grid plus the run settings shared by its points."""

    n_e_axis: tuple
    n_ne_axis: tuple
    pi_e_axis: tuple
    pi_ne_axis: tuple
    rho_e_axis: tuple
    rho_ne_axis: tuple
    stratum: int = 1
    level: float = 0.95
    prune_epsilon: float = DEFAULT_PRUNE

    def __post_init__(self):
        for name in ("n_e_axis", "n_ne_axis", "pi_e_axis", "pi_ne_axis", "rho_e_axis", "rho_ne_axis"):
            if len(getattr(self, name)) == 0:
                raise DomainError(f"grid axis {name} is empty")
        if self.stratum not in (0, 1):
            raise DomainError(f"stratum must be 0 or 1, got {self.stratum!r}")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"confidence level must be in (0, 1), got {self.level!r}")
        _check_prune(self.prune_epsilon)

    def points(self):
        """Grid points in lexicographic axis order."""
        return itertools.product(
            self.n_e_axis, self.n_ne_axis,
            self.pi_e_axis, self.pi_ne_axis,
            self.rho_e_axis, self.rho_ne_axis,
        )

    def size(self) -> int:
        out = 1
        for name in ("n_e_axis", "n_ne_axis", "pi_e_axis", "pi_ne_axis", "rho_e_axis", "rho_ne_axis"):
            out *= len(getattr(self, name))
        return out


def paper_grid(stratum: int = 1, level: float = 0.95, prune_epsilon: float = DEFAULT_PRUNE) -> GridSpec:
    """The default 2025-point study grid (3x3 sizes, 5x5 risks, 3x3 correlations)."""
    return GridSpec(
        n_e_axis=DEFAULT_N_AXIS,
        n_ne_axis=DEFAULT_N_AXIS,
        pi_e_axis=DEFAULT_PI_AXIS,
        pi_ne_axis=DEFAULT_PI_AXIS,
        rho_e_axis=DEFAULT_RHO_AXIS,
        rho_ne_axis=DEFAULT_RHO_AXIS,
        stratum=stratum,
        level=level,
        prune_epsilon=prune_epsilon,
    )


@dataclass(frozen=True)
class GridRecord:
    """One grid point with its result, or the reason it was inadmissible."""

    n_e: int
    n_ne: int
    pi_e: float
    pi_ne: float
    rho_e: float
    rho_ne: float
    stratum: int
    level: float
    result: CoverageResult | None
    error: str | None = None


def _evaluate_point(args) -> GridRecord:
    (n_e, n_ne, pi_e, pi_ne, rho_e, rho_ne), stratum, level, prune = args
    try:
        scenario = Scenario(n_e, n_ne, pi_e, pi_ne, rho_e, rho_ne, stratum, level)
        result = exact_coverage(scenario, prune)
    except DomainError as exc:
        return GridRecord(n_e, n_ne, pi_e, pi_ne, rho_e, rho_ne, stratum, level, None, str(exc))
    return GridRecord(n_e, n_ne, pi_e, pi_ne, rho_e, rho_ne, stratum, level, result)


def run_grid(grid: GridSpec, prune_epsilon: float | None = None, threads: int = 1) -> list:
    """Evaluate every grid point, in grid order, flagging inadmissible ones.

    Points are independent, so workers only change wall time: the output
    is bitwise identical for any thread count.
    """
    prune = grid.prune_epsilon if prune_epsilon is None else prune_epsilon
    _check_prune(prune)
    items = [(point, grid.stratum, grid.level, prune) for point in grid.points()]
    if threads <= 1 or len(items) < 2:
        return [_evaluate_point(item) for item in items]
    chunk = max(1, len(items) // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_evaluate_point, items, chunksize=chunk))


def _fmt(value: float) -> str:
    return format(value, ".12g")


def write_coverage_csv(records, out) -> None:
    """Write grid records as CSV (12 significant digits, nan for flagged)."""
    if hasattr(out, "write"):
        _write_coverage(records, out)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            _write_coverage(records, handle)


def _write_coverage(records, handle) -> None:
    handle.write(f"# condrisk {__version__}\n")
    handle.write(COVERAGE_CSV_HEADER + "\n")
    for rec in records:
        r = rec.result
        if r is None:
            tail = [math.nan] * 5
        else:
            tail = [r.true_rr, r.p_c, r.p_c_normalized, r.degenerate_mass, r.truncation_bound]
        fields = [
            str(rec.n_e), str(rec.n_ne),
            _fmt(rec.pi_e), _fmt(rec.pi_ne), _fmt(rec.rho_e), _fmt(rec.rho_ne),
            str(rec.stratum), _fmt(rec.level),
        ] + [_fmt(v) for v in tail]
        handle.write(",".join(fields) + "\n")


_GRID_AXIS_KEYS = {
    "n_E": "n_e_axis",
    "n_nonE": "n_ne_axis",
    "pi_E": "pi_e_axis",
    "pi_nonE": "pi_ne_axis",
    "rho_E": "rho_e_axis",
    "rho_nonE": "rho_ne_axis",
}
_GRID_SCALAR_KEYS = ("stratum", "level", "prune_epsilon")


def _parse_axis(key: str, raw: str, lineno: int):
    tokens = raw.replace(",", " ").split()
    if not tokens:
        raise ParseError(f"axis {key} has no values", line=lineno)
    out = []
    for tok in tokens:
        try:
            if key.startswith("n_"):
                value = int(tok)
            else:
                value = float(tok)
        except ValueError:
            raise ParseError(f"invalid value {tok!r} for {key}", line=lineno) from None
        out.append(value)
    return tuple(out)


def parse_grid_file(source) -> GridSpec:
    """Parse a plain-text grid description into a GridSpec.

    Format: one `key = values` entry per line; values separated by
    spaces or commas; `#` starts a comment.  Axis keys n_E, n_nonE,
    pi_E, pi_nonE, rho_E, rho_nonE are required; scalar keys stratum,
    level, prune_epsilon are optional.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    axes = {}
    scalars = {}
    for lineno, rawline in enumerate(lines, start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = values', got {rawline.strip()!r}", line=lineno)
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key in _GRID_AXIS_KEYS:
            if key in axes:
                raise ParseError(f"duplicate key {key}", line=lineno)
            axes[key] = _parse_axis(key, raw, lineno)
        elif key in _GRID_SCALAR_KEYS:
            if key in scalars:
                raise ParseError(f"duplicate key {key}", line=lineno)
            try:
                if key == "stratum":
                    value = int(raw)
                    if value not in (0, 1):
                        raise ValueError
                else:
                    value = float(raw)
            except ValueError:
                raise ParseError(f"invalid value {raw!r} for {key}", line=lineno) from None
            scalars[key] = value
        else:
            raise ParseError(f"unknown key {key!r}", line=lineno)
    missing = [k for k in _GRID_AXIS_KEYS if k not in axes]
    if missing:
        raise ParseError(f"missing required axis keys: {', '.join(missing)}")
    kwargs = {attr: axes[key] for key, attr in _GRID_AXIS_KEYS.items()}
    kwargs.update(scalars)
    try:
        return GridSpec(**kwargs)
    except DomainError as exc:
        raise ParseError(str(exc)) from None


def with_stratum(grid: GridSpec, stratum: int) -> GridSpec:
    """Copy of a grid spec targeting the other stratum."""
    return replace(grid, stratum=stratum)
