"""Longitudinal dataset parsing and the full per-visit-pair analysis.

Input is one row per subject: an id, an exposure label, and one binary
outcome column per visit.  Subjects with any missing outcome are
dropped at parse time and counted (complete-case rule).  For each
requested visit pair (j, k) the analysis stratifies the time-j
exposure-by-outcome table on the time-k outcome and reports the crude
and conditional risk ratios with CIs plus the within-group outcome
correlations.  Degenerate cells yield "not estimable" entries, never a
crash.
"""

import csv
import math
import os
from dataclasses import dataclass

from ._version import __version__
from .errors import DegenerateTableError, DomainError, ParseError
from .measures import (
    RiskRatioEstimate,
    StratifiedTables,
    StratumTable,
    phi_correlations,
    rr0_estimate,
    rr1_estimate,
    rr_crude,
)

RISKS_CSV_HEADER = "visit,group,risk"
MEASURES_CSV_HEADER = "j,k,measure,point,ci_lower,ci_upper,rho_E,rho_nonE"

GROUP_EXPOSED = "E"
GROUP_UNEXPOSED = "nonE"


@dataclass(frozen=True)
class Subject:
    id: str
    exposed: bool
    outcomes: tuple


@dataclass(frozen=True)
class LongitudinalDataset:
    """Complete-case cohort: every subject has all n_visits outcomes."""

    subjects: tuple
    n_visits: int
    dropped_incomplete: int
    exposed_label: str
    unexposed_label: str

    @property
    def n_exposed(self) -> int:
        return sum(1 for s in self.subjects if s.exposed)

    @property
    def n_unexposed(self) -> int:
        return sum(1 for s in self.subjects if not s.exposed)


def _parse_outcome(token: str, lineno: int):
    token = token.strip()
    if token == "":
        return None
    if token == "0":
        return 0
    if token == "1":
        return 1
    raise ParseError(f"outcome value must be 0, 1, or empty, got {token!r}", line=lineno)


def _check_exposure_labels(values_seen: dict, exposed_value: str, any_rows: bool) -> tuple[str, str]:
    if len(values_seen) > 2:
        labels = ", ".join(repr(v) for v in values_seen)
        raise ParseError(f"exposure column has more than two values: {labels}")
    if any_rows and exposed_value not in values_seen:
        labels = ", ".join(repr(v) for v in values_seen) or "none"
        raise ParseError(
            f"exposed value {exposed_value!r} not present in exposure column (found: {labels})"
        )
    others = [v for v in values_seen if v != exposed_value]
    return exposed_value, others[0] if others else ""


def parse_dataset(source, exposed_value: str) -> LongitudinalDataset:
    """Parse the wide per-subject CSV: header id,exposure,y1,...,yT.

    exposed_value names the exposure label coded as exposed.  Subjects
    with empty outcome cells are dropped and counted; structurally bad
    rows raise ParseError with the line number.
    """
    if hasattr(source, "read"):
        return _parse_wide(source, exposed_value)
    with open(source, "r", encoding="utf-8", newline="") as handle:
        return _parse_wide(handle, exposed_value)


def _parse_wide(handle, exposed_value: str) -> LongitudinalDataset:
    reader = csv.reader(handle)
    header = None
    for row in reader:
        if row and any(f.strip() for f in row):
            header = [f.strip() for f in row]
            break
    if header is None:
        raise ParseError("empty file")
    n_visits = len(header) - 2
    expected = ["id", "exposure"] + [f"y{i}" for i in range(1, n_visits + 1)]
    if n_visits < 2 or header != expected:
        raise ParseError(
            f"header must be id,exposure,y1,...,yT with T >= 2, got {','.join(header)}",
            line=reader.line_num,
        )
    subjects = []
    dropped = 0
    values_seen = {}
    for row in reader:
        if not row or not any(f.strip() for f in row):
            continue
        lineno = reader.line_num
        if len(row) != n_visits + 2:
            raise ParseError(
                f"expected {n_visits + 2} fields, got {len(row)}", line=lineno
            )
        sid = row[0].strip()
        label = row[1].strip()
        values_seen.setdefault(label, lineno)
        if len(values_seen) > 2:
            raise ParseError(
                f"exposure column has more than two values (third value {label!r})",
                line=lineno,
            )
        outcomes = [_parse_outcome(tok, lineno) for tok in row[2:]]
        if any(o is None for o in outcomes):
            dropped += 1
            continue
        subjects.append(Subject(id=sid, exposed=(label == exposed_value), outcomes=tuple(outcomes)))
    exposed_label, unexposed_label = _check_exposure_labels(
        values_seen, exposed_value, any_rows=bool(subjects) or dropped > 0
    )
    return LongitudinalDataset(
        subjects=tuple(subjects),
        n_visits=n_visits,
        dropped_incomplete=dropped,
        exposed_label=exposed_label,
        unexposed_label=unexposed_label,
    )


def parse_long_dataset(source, exposed_value: str) -> LongitudinalDataset:
    """Parse the long per-observation CSV: header id,exposure,visit,y.

    Visits must be integers 1..T; T is the largest visit in the file.
    A subject missing any visit (or with an empty y) is dropped and
    counted.  Conflicting exposure labels or duplicate (id, visit) rows
    raise ParseError.
    """
    if hasattr(source, "read"):
        return _parse_long(source, exposed_value)
    with open(source, "r", encoding="utf-8", newline="") as handle:
        return _parse_long(handle, exposed_value)


def _parse_long(handle, exposed_value: str) -> LongitudinalDataset:
    reader = csv.reader(handle)
    header = None
    for row in reader:
        if row and any(f.strip() for f in row):
            header = [f.strip() for f in row]
            break
    if header is None:
        raise ParseError("empty file")
    if header != ["id", "exposure", "visit", "y"]:
        raise ParseError(
            f"header must be id,exposure,visit,y, got {','.join(header)}",
            line=reader.line_num,
        )
    order = []
    exposure = {}
    obs = {}
    values_seen = {}
    max_visit = 0
    for row in reader:
        if not row or not any(f.strip() for f in row):
            continue
        lineno = reader.line_num
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", line=lineno)
        sid = row[0].strip()
        label = row[1].strip()
        try:
            visit = int(row[2].strip())
        except ValueError:
            raise ParseError(f"visit must be an integer, got {row[2].strip()!r}", line=lineno) from None
        if visit < 1:
            raise ParseError(f"visit must be >= 1, got {visit}", line=lineno)
        y = _parse_outcome(row[3], lineno)
        values_seen.setdefault(label, lineno)
        if len(values_seen) > 2:
            raise ParseError(
                f"exposure column has more than two values (third value {label!r})",
                line=lineno,
            )
        if sid not in exposure:
            order.append(sid)
            exposure[sid] = label
            obs[sid] = {}
        elif exposure[sid] != label:
            raise ParseError(
                f"subject {sid!r} has conflicting exposure labels "
                f"{exposure[sid]!r} and {label!r}", line=lineno,
            )
        if visit in obs[sid]:
            raise ParseError(f"duplicate visit {visit} for subject {sid!r}", line=lineno)
        obs[sid][visit] = y
        max_visit = max(max_visit, visit)
    if max_visit < 2:
        raise ParseError("need outcomes for at least 2 visits")
    subjects = []
    dropped = 0
    for sid in order:
        outcomes = [obs[sid].get(v) for v in range(1, max_visit + 1)]
        if any(o is None for o in outcomes):
            dropped += 1
            continue
        subjects.append(
            Subject(id=sid, exposed=(exposure[sid] == exposed_value), outcomes=tuple(outcomes))
        )
    exposed_label, unexposed_label = _check_exposure_labels(
        values_seen, exposed_value, any_rows=bool(subjects) or dropped > 0
    )
    return LongitudinalDataset(
        subjects=tuple(subjects),
        n_visits=max_visit,
        dropped_incomplete=dropped,
        exposed_label=exposed_label,
        unexposed_label=unexposed_label,
    )


def build_conditional_tables(data: LongitudinalDataset, j: int, k: int) -> StratifiedTables:
    """Time-j exposure-by-outcome tables stratified on the time-k outcome."""
    if not 1 <= k < j <= data.n_visits:
        raise DomainError(
            f"need 1 <= k < j <= {data.n_visits}, got j={j}, k={k}"
        )
    counts = [[0, 0, 0, 0], [0, 0, 0, 0]]  # [stratum][a, b, c, d]
    for s in data.subjects:
        y_k = s.outcomes[k - 1]
        y_j = s.outcomes[j - 1]
        if s.exposed:
            cell = 0 if y_j == 1 else 1
        else:
            cell = 2 if y_j == 1 else 3
        counts[y_k][cell] += 1
    one, zero = counts[1], counts[0]
    return StratifiedTables(
        stratum1=StratumTable(a=one[0], b=one[1], c=one[2], d=one[3]),
        stratum0=StratumTable(a=zero[0], b=zero[1], c=zero[2], d=zero[3]),
    )


def visit_risks(data: LongitudinalDataset) -> list:
    """Rows (visit, exposed risk, non-exposed risk); nan when a group is empty."""
    n_e = data.n_exposed
    n_ne = data.n_unexposed
    rows = []
    for visit in range(1, data.n_visits + 1):
        yes_e = sum(1 for s in data.subjects if s.exposed and s.outcomes[visit - 1] == 1)
        yes_ne = sum(1 for s in data.subjects if not s.exposed and s.outcomes[visit - 1] == 1)
        risk_e = yes_e / n_e if n_e else math.nan
        risk_ne = yes_ne / n_ne if n_ne else math.nan
        rows.append((visit, risk_e, risk_ne))
    return rows


@dataclass(frozen=True)
class VisitPairAnalysis:
    """All measures for one visit pair; None/nan marks not-estimable cells."""

    j: int
    k: int
    tables: StratifiedTables
    rr: RiskRatioEstimate | None
    rr1: RiskRatioEstimate | None
    rr0: RiskRatioEstimate | None
    rho_e: float
    rho_ne: float


@dataclass(frozen=True)
class AnalysisReport:
    n_visits: int
    n_exposed: int
    n_unexposed: int
    dropped_incomplete: int
    exposed_label: str
    unexposed_label: str
    level: float
    risks: tuple
    pairs: tuple


def default_pairs(n_visits: int) -> tuple:
    """Consecutive visit pairs (2,1), (3,2), ..., (T, T-1)."""
    return tuple((j, j - 1) for j in range(2, n_visits + 1))


def analyze_pair(
    data: LongitudinalDataset, j: int, k: int,
    level: float = 0.95, paper_literal_rho: bool = False,
) -> VisitPairAnalysis:
    tables = build_conditional_tables(data, j, k)
    s1, s0 = tables.stratum1, tables.stratum0
    crude = StratumTable(a=s1.a + s0.a, b=s1.b + s0.b, c=s1.c + s0.c, d=s1.d + s0.d)

    def attempt(fn, *args):
        try:
            return fn(*args)
        except DegenerateTableError:
            return None

    rr = attempt(rr_crude, crude, level)
    rr1 = attempt(rr1_estimate, tables, level)
    rr0 = attempt(rr0_estimate, tables, level)
    rhos = attempt(phi_correlations, tables, paper_literal_rho)
    rho_e, rho_ne = rhos if rhos is not None else (math.nan, math.nan)
    return VisitPairAnalysis(j=j, k=k, tables=tables, rr=rr, rr1=rr1, rr0=rr0,
                             rho_e=rho_e, rho_ne=rho_ne)


def analyze(
    data: LongitudinalDataset,
    pairs=None,
    level: float = 0.95,
    paper_literal_rho: bool = False,
) -> AnalysisReport:
    """Per-visit risks plus every requested visit-pair analysis."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must be in (0, 1), got {level!r}")
    if pairs is None:
        pairs = default_pairs(data.n_visits)
    analyses = tuple(
        analyze_pair(data, j, k, level=level, paper_literal_rho=paper_literal_rho)
        for j, k in pairs
    )
    return AnalysisReport(
        n_visits=data.n_visits,
        n_exposed=data.n_exposed,
        n_unexposed=data.n_unexposed,
        dropped_incomplete=data.dropped_incomplete,
        exposed_label=data.exposed_label,
        unexposed_label=data.unexposed_label,
        level=level,
        risks=tuple(visit_risks(data)),
        pairs=analyses,
    )


def _fmt_full(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def write_risks_csv(report: AnalysisReport, out) -> None:
    """risks.csv: one row per (visit, group), full-precision risks."""
    if hasattr(out, "write"):
        handle = out
        _write_risks(report, handle)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            _write_risks(report, handle)


def _write_risks(report, handle) -> None:
    handle.write(f"# condrisk {__version__}\n")
    handle.write(RISKS_CSV_HEADER + "\n")
    for visit, risk_e, risk_ne in report.risks:
        handle.write(f"{visit},{GROUP_EXPOSED},{_fmt_full(risk_e)}\n")
        handle.write(f"{visit},{GROUP_UNEXPOSED},{_fmt_full(risk_ne)}\n")


def write_measures_csv(report: AnalysisReport, out) -> None:
    """measures.csv: one row per (pair, measure), full precision, empty = not estimable."""
    if hasattr(out, "write"):
        _write_measures(report, out)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            _write_measures(report, handle)


def _write_measures(report, handle) -> None:
    handle.write(f"# condrisk {__version__}\n")
    handle.write(MEASURES_CSV_HEADER + "\n")
    for pair in report.pairs:
        rho_e = _fmt_full(pair.rho_e)
        rho_ne = _fmt_full(pair.rho_ne)
        for name, est in (("rr", pair.rr), ("rr1", pair.rr1), ("rr0", pair.rr0)):
            if est is None:
                point = lower = upper = ""
            else:
                point = _fmt_full(est.point)
                lower = _fmt_full(est.ci_lower)
                upper = _fmt_full(est.ci_upper)
            handle.write(
                f"{pair.j},{pair.k},{name},{point},{lower},{upper},{rho_e},{rho_ne}\n"
            )


def _pct(value: float) -> str:
    if value is None or math.isnan(value):
        return "not estimable"
    return f"{100.0 * value:.1f}"


def _est_line(label: str, est, level: float) -> str:
    pct = f"{100.0 * level:g}%"
    if est is None:
        return f"  {label}: not estimable"
    return (
        f"  {label}: {est.point:.2f} ({pct} CI {est.ci_lower:.2f}, {est.ci_upper:.2f})"
    )


def _rho_text(value: float) -> str:
    return "not estimable" if math.isnan(value) else f"{value:.2f}"


def format_report(report: AnalysisReport) -> str:
    """Human-readable analysis summary (risks in %, measures to 2 decimals)."""
    total = report.n_exposed + report.n_unexposed
    lines = [
        f"condrisk {__version__} analysis report",
        "",
        f"subjects analyzed: {total} "
        f"(exposed [{report.exposed_label}]: {report.n_exposed}, "
        f"non-exposed [{report.unexposed_label}]: {report.n_unexposed})",
        f"subjects dropped (incomplete outcomes): {report.dropped_incomplete}",
        f"visits: {report.n_visits}",
        f"confidence level: {100.0 * report.level:g}%",
        "",
        "Outcome risk (%) by visit",
        f"{'visit':>5}  {'exposed':>12}  {'non-exposed':>12}",
    ]
    for visit, risk_e, risk_ne in report.risks:
        lines.append(f"{visit:>5}  {_pct(risk_e):>12}  {_pct(risk_ne):>12}")
    for pair in report.pairs:
        lines.append("")
        lines.append(f"Visit pair j={pair.j}, k={pair.k} (outcome at {pair.j}, conditioning on {pair.k})")
        lines.append(_est_line("crude risk ratio          ", pair.rr, report.level))
        lines.append(_est_line("risk ratio | earlier = yes", pair.rr1, report.level))
        lines.append(_est_line("risk ratio | earlier = no ", pair.rr0, report.level))
        lines.append(
            f"  correlation (exposed): {_rho_text(pair.rho_e)}, "
            f"correlation (non-exposed): {_rho_text(pair.rho_ne)}"
        )
    lines.append("")
    return "\n".join(lines)


def write_report_files(report: AnalysisReport, out_dir: str) -> dict:
    """Write report.txt, risks.csv, and measures.csv into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "report": os.path.join(out_dir, "report.txt"),
        "risks": os.path.join(out_dir, "risks.csv"),
        "measures": os.path.join(out_dir, "measures.csv"),
    }
    with open(paths["report"], "w", encoding="utf-8") as handle:
        handle.write(format_report(report))
    write_risks_csv(report, paths["risks"])
    write_measures_csv(report, paths["measures"])
    return paths
