import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shiftlab.scalars import (
    LogMagnitude,
    ZERO_LOG2,
    compensated_sum,
    exact,
    exact_arith,
    exact_from_json,
    exact_to_json,
    log2_exact,
    to_log,
)

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=997)
nonzero_rationals = rationals.filter(lambda f: f != 0)


def ulp_tol(*values, n=2):
    scale = max([abs(v) for v in values] + [1.0])
    return n * math.ulp(scale)


class TestExactArith:
    def test_mul(self):
        assert exact_arith(Fraction(1, 2), Fraction(1, 2), "mul") == Fraction(1, 4)

    def test_block_norm_sum(self):
        # the twelve first-block orbit norms: 2,4,8,16,16,8,4,2 and four halves
        values = [2, 4, 8, 16, 16, 8, 4, 2] + [Fraction(1, 2)] * 4
        total = Fraction(0)
        for v in values:
            total = exact_arith(total, v, "add")
        assert total == 62

    def test_div_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            exact_arith(1, 0, "div")

    def test_cmp(self):
        assert exact_arith(Fraction(1, 3), Fraction(1, 2), "cmp") == -1
        assert exact_arith(2, 2, "cmp") == 0

    @given(rationals, nonzero_rationals)
    def test_field_roundtrip(self, a, b):
        q = exact_arith(a, b, "div")
        assert exact_arith(q, b, "mul") == a

    def test_canonical(self):
        assert exact(6, 4) == Fraction(3, 2)
        assert exact("31/6").denominator == 6

    def test_json_roundtrip(self):
        x = Fraction(-(10 ** 40) + 1, 3 ** 30)
        assert exact_from_json(exact_to_json(x)) == x


class TestToLog:
    def test_quarter_exact(self):
        lm = to_log(Fraction(1, 4))
        assert lm.log2 == -2.0 and lm.exact

    def test_power_exact(self):
        lm = to_log(Fraction(2 ** 13))
        assert lm.log2 == 13.0 and lm.exact

    def test_zero_sentinel(self):
        assert to_log(0).log2 == ZERO_LOG2

    def test_nontrivial_value(self):
        # independent evaluator: math.log2 on the small fraction directly
        got = to_log(Fraction(31, 6)).log2
        want = math.log2(31 / 6)
        assert got == pytest.approx(want, abs=ulp_tol(want))

    def test_huge_value_no_overflow(self):
        x = Fraction(2 ** 5000 + 1, 3)
        got = log2_exact(x)
        want = 5000 - math.log2(3)
        assert got == pytest.approx(want, rel=1e-14)

    @given(nonzero_rationals, nonzero_rationals)
    def test_product_law(self, a, b):
        la, lb, lab = log2_exact(a), log2_exact(b), log2_exact(a * b)
        assert abs(lab - (la + lb)) <= ulp_tol(la, lb, lab)

    @given(st.integers(min_value=-200, max_value=200),
           st.integers(min_value=-200, max_value=200))
    def test_product_law_exact_for_dyadics(self, e1, e2):
        a, b = Fraction(2) ** e1, Fraction(2) ** e2
        assert to_log(a * b).log2 == to_log(a).log2 + to_log(b).log2
        assert to_log(a * b).exact

    @given(nonzero_rationals, nonzero_rationals)
    def test_cmp_agrees_with_logs(self, a, b):
        la, lb = log2_exact(abs(a)), log2_exact(abs(b))
        if abs(la - lb) > 2.0 ** -30:
            assert (la < lb) == (abs(a) < abs(b))


class TestLogMagnitude:
    def test_mul_is_add(self):
        x = LogMagnitude(3.0, True) * LogMagnitude(4.0, True)
        assert x.log2 == 7.0 and x.exact

    def test_zero_absorbs(self):
        assert (LogMagnitude.zero() * LogMagnitude(5.0)).is_zero

    def test_div_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            LogMagnitude.one() / LogMagnitude.zero()

    def test_magnitude_overflow_to_inf(self):
        assert LogMagnitude(40000.0).magnitude() == math.inf


class TestCompensatedSum:
    def test_four_ones(self):
        s = compensated_sum([LogMagnitude(0.0, True)] * 4)
        assert s.log2 == 2.0

    def test_geometric(self):
        # 2^1 + ... + 2^10 = 2^11 - 2 = 2046
        s = compensated_sum([LogMagnitude(float(m)) for m in range(1, 11)])
        assert s.log2 == pytest.approx(math.log2(2046), rel=1e-12)

    def test_first_block_norms_vs_exact(self):
        values = [2, 4, 8, 16, 16, 8, 4, 2] + [Fraction(1, 2)] * 4
        s = compensated_sum([to_log(v) for v in values])
        assert s.log2 == pytest.approx(math.log2(62), rel=2.0 ** -40)

    def test_empty(self):
        assert compensated_sum([]).is_zero

    def test_order_independence(self):
        vals = [to_log(Fraction(3, 7) ** k) for k in range(50)]
        a = compensated_sum(vals).log2
        b = compensated_sum(list(reversed(vals))).log2
        assert a == b

    @given(st.lists(st.integers(min_value=-80, max_value=80), min_size=1, max_size=300))
    def test_dyadic_against_exact_oracle(self, exponents):
        # exact oracle: sum the dyadics as Fractions
        truth = sum((Fraction(2) ** e for e in exponents), Fraction(0))
        got = compensated_sum([to_log(Fraction(2) ** e) for e in exponents]).log2
        assert got == pytest.approx(log2_exact(truth), abs=2.0 ** -40 + ulp_tol(got))

    def test_million_term_dyadic(self):
        # 2^20 copies of 1 sum to exactly 2^20
        got = compensated_sum([LogMagnitude(0.0, True)] * (2 ** 20)).log2
        assert abs(got - 20.0) <= 2.0 ** -40 * 20
