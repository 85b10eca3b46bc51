"""Product-rule checks on the independent-edge measure."""

from fractions import Fraction

import pytest

from amalgam.formulas import FormulaInstance, parse_shape
from amalgam.graphs import InvalidInput
from amalgam.sampling import er_product_check


def _inst(text, *params):
    return FormulaInstance(parse_shape(text)[0], params)


PHI = _inst("E(x,a)", 0)
PSI = _inst("E(x,a)", 1)


class TestExact:
    def test_half_half_quarter(self):
        rep = er_product_check(Fraction(1, 2), PHI, PSI)
        assert rep.exact_joint == Fraction(1, 4)
        assert rep.exact_product == Fraction(1, 4)
        assert rep.deviation == 0
        assert rep.passed

    def test_degenerate_zero(self):
        rep = er_product_check(Fraction(0), PHI, PSI)
        assert rep.exact_phi == rep.exact_psi == rep.exact_joint == 0
        assert rep.passed

    def test_negative_atoms(self):
        phi = _inst("E(x,a) & !E(x,b)", 0, 1)
        psi = _inst("!E(x,a)", 2)
        rep = er_product_check(Fraction(1, 3), phi, psi)
        assert rep.exact_phi == Fraction(1, 3) * Fraction(2, 3)
        assert rep.exact_psi == Fraction(2, 3)
        assert rep.deviation == 0

    def test_rejects_bad_probability(self):
        with pytest.raises(InvalidInput):
            er_product_check(Fraction(3, 2), PHI, PSI)

    def test_rejects_shared_parameters(self):
        with pytest.raises(InvalidInput):
            er_product_check(Fraction(1, 2), PHI, _inst("E(x,a)", 0))

    def test_rejects_distance_atoms(self):
        with pytest.raises(InvalidInput):
            er_product_check(Fraction(1, 2), _inst("dist=2(x,a)", 0), PSI)

    def test_exact_deviation_zero_across_probabilities(self):
        for num in range(0, 11):
            rep = er_product_check(Fraction(num, 10), PHI, PSI)
            assert rep.deviation == 0 and rep.passed


class TestSample:
    def test_seed_seven_within_band(self):
        rep = er_product_check(Fraction(1, 2), PHI, PSI, sample=100_000, seed=7)
        assert rep.passed
        assert rep.stderr == pytest.approx((0.25 * 0.75 / 100_000) ** 0.5)
        assert abs(rep.estimate_joint - 0.25) < 0.01

    def test_deterministic(self):
        r1 = er_product_check(Fraction(1, 2), PHI, PSI, sample=20_000, seed=3)
        r2 = er_product_check(Fraction(1, 2), PHI, PSI, sample=20_000, seed=3)
        assert r1 == r2

    def test_different_seeds_differ(self):
        r1 = er_product_check(Fraction(1, 2), PHI, PSI, sample=20_000, seed=3)
        r2 = er_product_check(Fraction(1, 2), PHI, PSI, sample=20_000, seed=4)
        assert r1.estimate_joint != r2.estimate_joint

    def test_report_text_fields(self):
        rep = er_product_check(Fraction(1, 2), PHI, PSI, sample=10_000, seed=1)
        text = rep.text()
        for field in ("exact", "estimate", "stderr", "pass", "deviation"):
            assert field in text

    def test_rejects_empty_sample(self):
        with pytest.raises(InvalidInput):
            er_product_check(Fraction(1, 2), PHI, PSI, sample=0)
