"""Dataset parsing (wide and long), table building, analysis, writers."""

import io
import math
import textwrap

import pytest

from condrisk import __version__
from condrisk.errors import DomainError, ParseError
from condrisk.ingest import (
    GROUP_EXPOSED,
    GROUP_UNEXPOSED,
    MEASURES_CSV_HEADER,
    RISKS_CSV_HEADER,
    LongitudinalDataset,
    Subject,
    analyze,
    analyze_pair,
    build_conditional_tables,
    default_pairs,
    format_report,
    parse_dataset,
    parse_long_dataset,
    visit_risks,
    write_measures_csv,
    write_report_files,
    write_risks_csv,
)
from condrisk.mc import equal_marginal_spec, simulate_cohort
from condrisk.measures import (
    StratifiedTables,
    StratumTable,
    phi_correlations,
    rr0_estimate,
    rr1_estimate,
)

WIDE_TEXT = textwrap.dedent(
    """\
    id,exposure,y1,y2,y3
    s1,150,1,0,1
    s2,100,0,0,1
    s3,150,1,1,1
    """
)

LONG_TEXT = textwrap.dedent(
    """\
    id,exposure,visit,y
    s1,150,1,1
    s2,100,1,0
    s1,150,2,0
    s3,150,1,1
    s2,100,2,0
    s3,150,2,1
    s1,150,3,1
    s2,100,3,1
    s3,150,3,1
    """
)


def dataset_from_subjects(subjects, n_visits, exposed_label="150", unexposed_label="100"):
    return LongitudinalDataset(
        subjects=tuple(subjects),
        n_visits=n_visits,
        dropped_incomplete=0,
        exposed_label=exposed_label,
        unexposed_label=unexposed_label,
    )


def expand_tables(tables: StratifiedTables) -> LongitudinalDataset:
    """Subjects with outcomes (earlier, later) reproducing the given counts."""
    subjects = []

    def add(count, exposed, earlier, later):
        for _ in range(count):
            subjects.append(
                Subject(id=f"s{len(subjects)}", exposed=exposed, outcomes=(earlier, later))
            )

    s1, s0 = tables.stratum1, tables.stratum0
    add(s1.a, True, 1, 1)
    add(s1.b, True, 1, 0)
    add(s1.c, False, 1, 1)
    add(s1.d, False, 1, 0)
    add(s0.a, True, 0, 1)
    add(s0.b, True, 0, 0)
    add(s0.c, False, 0, 1)
    add(s0.d, False, 0, 0)
    return dataset_from_subjects(subjects, n_visits=2)


class TestParseWide:
    def test_basic_fixture(self):
        ds = parse_dataset(io.StringIO(WIDE_TEXT), exposed_value="150")
        assert ds.n_visits == 3
        assert ds.dropped_incomplete == 0
        assert [s.id for s in ds.subjects] == ["s1", "s2", "s3"]
        assert [s.exposed for s in ds.subjects] == [True, False, True]
        assert ds.subjects[0].outcomes == (1, 0, 1)
        assert (ds.exposed_label, ds.unexposed_label) == ("150", "100")
        assert ds.n_exposed == 2 and ds.n_unexposed == 1

    def test_incomplete_subject_dropped_and_counted(self):
        text = WIDE_TEXT.replace("s2,100,0,0,1", "s2,100,0,,1")
        ds = parse_dataset(io.StringIO(text), exposed_value="150")
        assert ds.dropped_incomplete == 1
        assert [s.id for s in ds.subjects] == ["s1", "s3"]
        # the label of a dropped subject still counts as seen
        assert ds.unexposed_label == "100"

    def test_blank_lines_and_padding_ignored(self):
        text = "id,exposure,y1,y2\n\n a ,150,1,0\n   \nb,100,0,1\n"
        ds = parse_dataset(io.StringIO(text), exposed_value="150")
        assert [s.id for s in ds.subjects] == ["a", "b"]

    def test_reads_from_path(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text(WIDE_TEXT)
        ds = parse_dataset(path, exposed_value="150")
        assert len(ds.subjects) == 3

    def test_empty_file(self):
        with pytest.raises(ParseError, match="empty file"):
            parse_dataset(io.StringIO(""), exposed_value="150")
        with pytest.raises(ParseError, match="empty file"):
            parse_dataset(io.StringIO("\n  \n"), exposed_value="150")

    def test_bad_header(self):
        with pytest.raises(ParseError, match="header must be") as exc:
            parse_dataset(io.StringIO("id,arm,y1,y2\nx,150,0,1\n"), exposed_value="150")
        assert exc.value.line == 1

    def test_too_few_visits_rejected(self):
        with pytest.raises(ParseError, match="T >= 2"):
            parse_dataset(io.StringIO("id,exposure,y1\nx,150,0\n"), exposed_value="150")

    def test_wrong_field_count_carries_line(self):
        text = "id,exposure,y1,y2\nx,150,1,0\ny,100,1\n"
        with pytest.raises(ParseError, match="expected 4 fields") as exc:
            parse_dataset(io.StringIO(text), exposed_value="150")
        assert exc.value.line == 3

    def test_bad_outcome_value(self):
        text = "id,exposure,y1,y2\nx,150,1,2\n"
        with pytest.raises(ParseError, match="outcome value") as exc:
            parse_dataset(io.StringIO(text), exposed_value="150")
        assert exc.value.line == 2

    def test_three_exposure_labels(self):
        text = "id,exposure,y1,y2\nx,150,1,0\ny,100,1,0\nz,200,1,0\n"
        with pytest.raises(ParseError, match="more than two") as exc:
            parse_dataset(io.StringIO(text), exposed_value="150")
        assert exc.value.line == 4

    def test_exposed_value_must_appear(self):
        text = "id,exposure,y1,y2\nx,100,1,0\n"
        with pytest.raises(ParseError, match="not present"):
            parse_dataset(io.StringIO(text), exposed_value="150")

    def test_single_label_cohort_is_allowed(self):
        text = "id,exposure,y1,y2\nx,150,1,0\ny,150,0,1\n"
        ds = parse_dataset(io.StringIO(text), exposed_value="150")
        assert ds.n_exposed == 2 and ds.n_unexposed == 0
        assert ds.unexposed_label == ""


class TestParseLong:
    def test_matches_wide(self):
        wide = parse_dataset(io.StringIO(WIDE_TEXT), exposed_value="150")
        long = parse_long_dataset(io.StringIO(LONG_TEXT), exposed_value="150")
        assert long.subjects == wide.subjects
        assert long.n_visits == wide.n_visits
        assert (long.exposed_label, long.unexposed_label) == ("150", "100")

    def test_missing_visit_drops_subject(self):
        text = LONG_TEXT.replace("s2,100,2,0\n", "")
        ds = parse_long_dataset(io.StringIO(text), exposed_value="150")
        assert ds.dropped_incomplete == 1
        assert [s.id for s in ds.subjects] == ["s1", "s3"]

    def test_empty_outcome_drops_subject(self):
        text = LONG_TEXT.replace("s2,100,2,0\n", "s2,100,2,\n")
        ds = parse_long_dataset(io.StringIO(text), exposed_value="150")
        assert ds.dropped_incomplete == 1

    def test_duplicate_visit(self):
        text = LONG_TEXT + "s1,150,2,1\n"
        with pytest.raises(ParseError, match="duplicate visit") as exc:
            parse_long_dataset(io.StringIO(text), exposed_value="150")
        assert exc.value.line == 11

    def test_conflicting_exposure(self):
        text = LONG_TEXT.replace("s1,150,3,1", "s1,100,3,1")
        with pytest.raises(ParseError, match="conflicting exposure"):
            parse_long_dataset(io.StringIO(text), exposed_value="150")

    def test_bad_visit_values(self):
        with pytest.raises(ParseError, match="visit must be an integer"):
            parse_long_dataset(
                io.StringIO("id,exposure,visit,y\nx,150,one,1\n"), exposed_value="150"
            )
        with pytest.raises(ParseError, match="visit must be >= 1"):
            parse_long_dataset(
                io.StringIO("id,exposure,visit,y\nx,150,0,1\n"), exposed_value="150"
            )

    def test_needs_two_visits(self):
        text = "id,exposure,visit,y\nx,150,1,1\ny,100,1,0\n"
        with pytest.raises(ParseError, match="at least 2 visits"):
            parse_long_dataset(io.StringIO(text), exposed_value="150")

    def test_bad_header(self):
        with pytest.raises(ParseError, match="header must be"):
            parse_long_dataset(io.StringIO("id,visit,y\n"), exposed_value="150")


class TestBuildTables:
    def test_four_subject_example(self):
        subjects = [
            Subject("a", True, (1, 1)),
            Subject("b", True, (0, 1)),
            Subject("c", False, (1, 0)),
            Subject("d", False, (0, 0)),
        ]
        ds = dataset_from_subjects(subjects, n_visits=2)
        tables = build_conditional_tables(ds, 2, 1)
        assert tables.stratum1 == StratumTable(1, 0, 0, 1)
        assert tables.stratum0 == StratumTable(1, 0, 0, 1)

    def test_all_earlier_positive_empties_stratum0(self):
        subjects = [Subject(str(i), i % 2 == 0, (1, i % 3 == 0)) for i in range(6)]
        subjects = [
            Subject(s.id, s.exposed, (1, int(s.outcomes[1]))) for s in subjects
        ]
        ds = dataset_from_subjects(subjects, n_visits=2)
        tables = build_conditional_tables(ds, 2, 1)
        assert tables.stratum0 == StratumTable(0, 0, 0, 0)
        assert tables.n_exposed == 3 and tables.n_unexposed == 3

    def test_pair_validation(self):
        ds = parse_dataset(io.StringIO(WIDE_TEXT), exposed_value="150")
        for j, k in [(1, 1), (2, 2), (1, 2), (4, 1), (2, 0)]:
            with pytest.raises(DomainError):
                build_conditional_tables(ds, j, k)

    def test_count_conservation(self):
        ds = parse_dataset(io.StringIO(WIDE_TEXT), exposed_value="150")
        for j, k in [(2, 1), (3, 1), (3, 2)]:
            tables = build_conditional_tables(ds, j, k)
            assert tables.n_exposed == ds.n_exposed
            assert tables.n_unexposed == ds.n_unexposed

    def test_round_trip_from_simulated_counts(self):
        spec = equal_marginal_spec(350, 364, 0.5, 0.5, 0.5, 0.5, seed=42, reps=1)
        simulated = simulate_cohort(spec, rep=0)
        ds = expand_tables(simulated)
        assert build_conditional_tables(ds, 2, 1) == simulated

    def test_simulated_correlation_near_truth(self):
        # sampling check on the ingest path: with rho = 0.5 and n = 2000
        # per group the empirical phi should sit within 3 standard errors
        # (se ~ (1 - rho^2)/sqrt(n)) of 0.5
        spec = equal_marginal_spec(2000, 2000, 0.5, 0.5, 0.5, 0.5, seed=2024, reps=1)
        ds = expand_tables(simulate_cohort(spec, rep=0))
        rho_e, rho_ne = phi_correlations(build_conditional_tables(ds, 2, 1))
        bound = 3.0 * (1.0 - 0.25) / math.sqrt(2000.0)
        assert abs(rho_e - 0.5) < bound
        assert abs(rho_ne - 0.5) < bound


class TestAnalyze:
    def fixture(self):
        # 16 subjects, 2 visits, chosen so every measure is estimable
        rows = ["id,exposure,y1,y2"]
        pattern = [
            ("150", 1, 1), ("150", 1, 1), ("150", 1, 0), ("150", 0, 1),
            ("150", 0, 0), ("150", 0, 0), ("150", 1, 1), ("150", 0, 1),
            ("100", 1, 1), ("100", 1, 0), ("100", 1, 0), ("100", 0, 0),
            ("100", 0, 1), ("100", 0, 0), ("100", 1, 1), ("100", 0, 0),
        ]
        for i, (arm, y1, y2) in enumerate(pattern):
            rows.append(f"p{i},{arm},{y1},{y2}")
        return parse_dataset(io.StringIO("\n".join(rows) + "\n"), exposed_value="150")

    def test_default_pairs(self):
        assert default_pairs(4) == ((2, 1), (3, 2), (4, 3))
        assert default_pairs(2) == ((2, 1),)
        assert default_pairs(1) == ()

    def test_matches_direct_measure_calls(self):
        ds = self.fixture()
        report = analyze(ds)
        [pair] = report.pairs
        tables = build_conditional_tables(ds, 2, 1)
        assert pair.tables == tables
        assert pair.rr1 == rr1_estimate(tables)
        assert pair.rr0 == rr0_estimate(tables)
        assert (pair.rho_e, pair.rho_ne) == phi_correlations(tables)

    def test_risk_table_consistency(self):
        ds = self.fixture()
        tables = build_conditional_tables(ds, 2, 1)
        [(v1, r1e, r1ne), (v2, r2e, r2ne)] = visit_risks(ds)
        assert (v1, v2) == (1, 2)
        s1, s0 = tables.stratum1, tables.stratum0
        assert r2e == (s1.a + s0.a) / ds.n_exposed
        assert r2ne == (s1.c + s0.c) / ds.n_unexposed
        assert r1e == tables.stratum1.n_exposed / ds.n_exposed
        assert r1ne == tables.stratum1.n_unexposed / ds.n_unexposed

    def test_explicit_pairs_and_level(self):
        ds = parse_dataset(io.StringIO(WIDE_TEXT), exposed_value="150")
        report = analyze(ds, pairs=[(3, 1)], level=0.9)
        assert [(p.j, p.k) for p in report.pairs] == [(3, 1)]
        assert report.level == 0.9
        with pytest.raises(DomainError):
            analyze(ds, level=1.0)
        with pytest.raises(DomainError):
            analyze(ds, pairs=[(5, 1)])

    def test_paper_literal_rho_passthrough(self):
        tables = StratifiedTables(StratumTable(3, 1, 2, 2), StratumTable(2, 4, 1, 2))
        ds = expand_tables(tables)
        corrected = analyze(ds).pairs[0]
        literal = analyze(ds, paper_literal_rho=True).pairs[0]
        assert corrected.rho_ne != literal.rho_ne
        assert literal.rho_ne == phi_correlations(tables, paper_literal=True)[1]
        assert corrected.rho_e == literal.rho_e

    def test_never_any_outcome_is_not_estimable(self):
        text = "id,exposure,y1,y2\n" + "".join(
            f"s{i},{'150' if i % 2 else '100'},0,0\n" for i in range(8)
        )
        ds = parse_dataset(io.StringIO(text), exposed_value="150")
        report = analyze(ds)
        [pair] = report.pairs
        assert pair.rr is None and pair.rr1 is None and pair.rr0 is None
        assert math.isnan(pair.rho_e) and math.isnan(pair.rho_ne)
        text_report = format_report(report)
        assert text_report.count("not estimable") >= 4


class TestWriters:
    def make_report(self):
        ds = TestAnalyze().fixture()
        return analyze(ds)

    def test_risks_csv(self):
        report = self.make_report()
        buf = io.StringIO()
        write_risks_csv(report, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == f"# condrisk {__version__}"
        assert lines[1] == RISKS_CSV_HEADER
        assert len(lines) == 2 + 2 * report.n_visits
        visit, group, risk = lines[2].split(",")
        assert (visit, group) == ("1", GROUP_EXPOSED)
        assert float(risk) == report.risks[0][1]  # repr round-trips exactly
        assert lines[3].split(",")[1] == GROUP_UNEXPOSED

    def test_measures_csv(self):
        report = self.make_report()
        buf = io.StringIO()
        write_measures_csv(report, buf)
        lines = buf.getvalue().splitlines()
        assert lines[1] == MEASURES_CSV_HEADER
        assert len(lines) == 2 + 3 * len(report.pairs)
        rows = [line.split(",") for line in lines[2:]]
        assert [r[2] for r in rows] == ["rr", "rr1", "rr0"]
        [pair] = report.pairs
        rr1_row = rows[1]
        assert (rr1_row[0], rr1_row[1]) == ("2", "1")
        assert float(rr1_row[3]) == pair.rr1.point
        assert float(rr1_row[4]) == pair.rr1.ci_lower
        assert float(rr1_row[6]) == pair.rho_e

    def test_not_estimable_cells_are_empty(self):
        text = "id,exposure,y1,y2\n" + "".join(
            f"s{i},{'150' if i % 2 else '100'},0,0\n" for i in range(4)
        )
        report = analyze(parse_dataset(io.StringIO(text), exposed_value="150"))
        buf = io.StringIO()
        write_measures_csv(report, buf)
        for line in buf.getvalue().splitlines()[2:]:
            assert line.split(",")[3:] == [""] * 5

    def test_report_text_shape(self):
        report = self.make_report()
        text = format_report(report)
        assert "subjects analyzed: 16" in text
        assert "confidence level: 95%" in text
        assert "Visit pair j=2, k=1" in text
        assert "risk ratio | earlier = yes" in text
        # risks are percentages to one decimal
        assert f"{100.0 * report.risks[0][1]:.1f}" in text

    def test_write_report_files(self, tmp_path):
        report = self.make_report()
        paths = write_report_files(report, str(tmp_path / "out"))
        assert sorted(paths) == ["measures", "report", "risks"]
        for path in paths.values():
            with open(path, "r", encoding="utf-8") as handle:
                assert handle.read()

    def test_empty_group_risk_is_blank(self):
        text = "id,exposure,y1,y2\nx,150,1,0\ny,150,0,1\n"
        ds = parse_dataset(io.StringIO(text), exposed_value="150")
        report = analyze(ds, pairs=())
        buf = io.StringIO()
        write_risks_csv(report, buf)
        non_exposed_rows = [
            line for line in buf.getvalue().splitlines()[2:]
            if line.split(",")[1] == GROUP_UNEXPOSED
        ]
        assert all(line.endswith(",") for line in non_exposed_rows)
        assert "not estimable" in format_report(report)
