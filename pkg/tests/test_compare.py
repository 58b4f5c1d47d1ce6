"""Population comparison grid: worked points, orderings, CSV output."""

import io
import itertools
import math

import pytest

from condrisk import __version__
from condrisk.compare import (
    COMPARE_CSV_HEADER,
    compare_grid,
    compare_point,
    write_compare_csv,
)
from condrisk.errors import DomainError


def by_point(records):
    return {(r.pi_e, r.pi_ne, r.rho_e, r.rho_ne): r for r in records}


class TestComparePoint:
    def test_low_risk_amplification(self):
        rec = compare_point(0.1, 0.1, 0.9, 0.1)
        assert rec.rr == 1.0
        assert rec.rr1 == pytest.approx(0.91 / 0.19, rel=1e-12)
        assert rec.rr1 == pytest.approx(4.7895, abs=5e-5)
        assert rec.error is None

    def test_high_risk_amplification(self):
        rec = compare_point(0.9, 0.1, 0.1, 0.9)
        assert rec.rr == pytest.approx(9.0, rel=1e-15)
        assert rec.rr0 == pytest.approx(81.0, rel=1e-9)

    def test_independence_collapses_everything(self):
        for pi_e, pi_ne in [(0.1, 0.1), (0.5, 0.25), (0.7, 0.9)]:
            rec = compare_point(pi_e, pi_ne, 0.0, 0.0)
            assert rec.rr1 == pytest.approx(rec.rr, abs=1e-12)
            assert rec.rr0 == pytest.approx(rec.rr, abs=1e-12)

    def test_inadmissible_point_is_flagged(self):
        # equal marginals 0.1 cannot be correlated below -1/9
        rec = compare_point(0.1, 0.5, -0.5, 0.1)
        assert math.isnan(rec.rr) and math.isnan(rec.rr1) and math.isnan(rec.rr0)
        assert rec.error

    def test_degenerate_denominator_is_flagged(self):
        # rho_ne = 1 empties the non-exposed stratum-0 risk
        rec = compare_point(0.5, 0.5, 0.1, 1.0)
        assert math.isnan(rec.rr0)
        assert rec.error

    def test_boundary_marginals_are_flagged(self):
        for pi_e, pi_ne in [(0.0, 0.5), (0.5, 1.0)]:
            rec = compare_point(pi_e, pi_ne, 0.1, 0.1)
            assert rec.error


class TestCompareGrid:
    def test_default_has_225_rows_in_grid_order(self):
        records = compare_grid()
        assert len(records) == 225
        assert all(r.error is None for r in records)
        assert (records[0].pi_e, records[0].pi_ne) == (0.1, 0.1)
        assert (records[0].rho_e, records[0].rho_ne) == (0.1, 0.1)
        assert (records[-1].pi_e, records[-1].pi_ne) == (0.9, 0.9)
        assert (records[-1].rho_e, records[-1].rho_ne) == (0.9, 0.9)

    def test_crude_column_ignores_correlations(self):
        for rec in compare_grid():
            assert rec.rr == rec.pi_e / rec.pi_ne

    def test_extremal_orderings_hold_at_every_marginal_pair(self):
        # over the default correlation grid, the stratum-1 ratio peaks at
        # (0.9, 0.1) and bottoms at (0.1, 0.9); the stratum-0 ratio is
        # ordered the opposite way
        recs = by_point(compare_grid())
        pis = (0.1, 0.3, 0.5, 0.7, 0.9)
        rhos = (0.1, 0.5, 0.9)
        for pi_e, pi_ne in itertools.product(pis, pis):
            cell = {
                (re, rn): recs[(pi_e, pi_ne, re, rn)]
                for re, rn in itertools.product(rhos, rhos)
            }
            rr1_by = {k: v.rr1 for k, v in cell.items()}
            rr0_by = {k: v.rr0 for k, v in cell.items()}
            assert max(rr1_by, key=rr1_by.get) == (0.9, 0.1)
            assert min(rr1_by, key=rr1_by.get) == (0.1, 0.9)
            assert max(rr0_by, key=rr0_by.get) == (0.1, 0.9)
            assert min(rr0_by, key=rr0_by.get) == (0.9, 0.1)

    def test_crude_underestimates_when_exposed_more_correlated(self):
        # provable form of the attenuation trend: rho_E > rho_nonE and
        # pi_E <= pi_nonE force RR < RR1 (the odds-weighted inequality
        # can reverse when pi_E > pi_nonE, so the premise matters)
        for rec in compare_grid():
            if rec.rho_e > rec.rho_ne and rec.pi_e <= rec.pi_ne:
                assert rec.rr < rec.rr1

    def test_independence_augmented_grid(self):
        records = compare_grid(rho_e_axis=(0.0,), rho_ne_axis=(0.0,))
        assert len(records) == 25
        for rec in records:
            assert rec.rr1 == pytest.approx(rec.rr, abs=1e-12)
            assert rec.rr0 == pytest.approx(rec.rr, abs=1e-12)

    def test_rejects_empty_axis(self):
        with pytest.raises(DomainError):
            compare_grid(pi_e_axis=())

    def test_flagged_points_dont_stop_the_grid(self):
        records = compare_grid(
            pi_e_axis=(0.1,), pi_ne_axis=(0.5,), rho_e_axis=(-0.5, 0.1), rho_ne_axis=(0.1,)
        )
        assert len(records) == 2
        assert records[0].error and math.isnan(records[0].rr1)
        assert records[1].error is None


class TestCompareCsv:
    def test_format_and_roundtrip(self):
        records = compare_grid(
            pi_e_axis=(0.1, 0.9), pi_ne_axis=(0.1,), rho_e_axis=(0.9,), rho_ne_axis=(0.1,)
        )
        buf = io.StringIO()
        write_compare_csv(records, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == f"# condrisk {__version__}"
        assert lines[1] == COMPARE_CSV_HEADER
        assert len(lines) == 4
        fields = lines[2].split(",")
        assert len(fields) == 7
        assert float(fields[5]) == pytest.approx(records[0].rr1, rel=1e-9)

    def test_nan_rows_serialize(self):
        rec = compare_point(0.1, 0.5, -0.5, 0.1)
        buf = io.StringIO()
        write_compare_csv([rec], buf)
        fields = buf.getvalue().splitlines()[2].split(",")
        assert fields[4:] == ["nan", "nan", "nan"]

    def test_writes_to_path(self, tmp_path):
        out = tmp_path / "cmp.csv"
        write_compare_csv(compare_grid(), out)
        assert len(out.read_text().splitlines()) == 227
