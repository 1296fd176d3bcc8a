import numpy as np
import pytest

from gossipsim.persuasion import (PhiSpecError, parse_phi, validate_assumptions)


class TestParse:
    def test_linear(self):
        phi = parse_phi("linear")
        assert phi(0.25) == 0.25
        assert phi.at_zero() == 0.0

    def test_constant(self):
        phi = parse_phi("constant:0.3")
        assert phi(0.0) == 0.3
        assert phi(1.0) == 0.3

    def test_poly(self):
        phi = parse_phi("poly:0.1,0.5")
        assert abs(phi(0.5) - 0.35) < 1e-15

    def test_table_interpolates_through_knots(self):
        phi = parse_phi("table:0:0,0.5:0.4,1:0.6")
        assert phi(0.0) == 0.0
        assert abs(phi(0.5) - 0.4) < 1e-12
        assert abs(phi(1.0) - 0.6) < 1e-12

    def test_table_no_overshoot(self):
        phi = parse_phi("table:0:0,0.2:0.9,0.4:1.0,1:1.0")
        zs = np.linspace(0, 1, 2001)
        vals = phi(zs)
        assert np.all(vals >= -1e-12)
        assert np.all(vals <= 1.0 + 1e-12)

    def test_bad_specs_rejected(self):
        for spec in ("", "linear:1", "constant:", "poly:", "table:0:0",
                     "gaussian", "constant:2.0"):
            with pytest.raises(PhiSpecError):
                parse_phi(spec)

    def test_vectorized_call(self):
        phi = parse_phi("linear")
        zs = np.array([0.0, 0.5, 1.0])
        assert np.array_equal(phi(zs), zs)

    def test_to_spec_roundtrip(self):
        for spec in ("linear", "constant:0.3", "poly:0.1,0.5"):
            phi = parse_phi(spec)
            again = parse_phi(phi.to_spec())
            zs = np.linspace(0, 1, 101)
            assert np.allclose(phi(zs), again(zs))


class TestValidation:
    def test_linear_standard_not_strong(self):
        report = validate_assumptions(parse_phi("linear"))
        assert report.standard
        assert not report.strong
        assert report.range_ok

    def test_constant_standard_and_strong(self):
        # constant: nondecreasing, concave, and slope 0 < value at 0
        report = validate_assumptions(parse_phi("constant:0.5"))
        assert report.standard
        assert report.strong

    def test_decreasing_fails(self):
        report = validate_assumptions(parse_phi("poly:0.9,-0.5"))
        assert not report.standard
        assert report.first_violation is not None

    def test_convex_fails(self):
        # z^2 is increasing but strictly convex
        report = validate_assumptions(parse_phi("poly:0,0,1"))
        assert not report.standard

    def test_concave_increasing_passes(self):
        # z - 0.4 z^2: increasing on [0,1] (slope >= 0.2) and concave
        report = validate_assumptions(parse_phi("poly:0,1,-0.4"))
        assert report.standard

    def test_out_of_range_detected(self):
        report = validate_assumptions(parse_phi("poly:0.5,1.0"))
        assert not report.range_ok

    def test_matches_closed_form_for_every_grid(self):
        for grid in (3, 11, 101):
            assert validate_assumptions(parse_phi("linear"), grid_size=grid).standard
            assert validate_assumptions(parse_phi("constant:0.2"), grid_size=grid).strong


class TestTable:
    def test_lattice_table_endpoints(self):
        phi = parse_phi("linear")
        table = phi.table(10)
        assert table[0] == 0.0
        assert table[-1] == 1.0
        assert np.allclose(table, np.linspace(0, 1, 11))
