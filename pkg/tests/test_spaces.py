from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shiftlab.scalars import LogMagnitude
from shiftlab.spaces import (
    InvalidSpecError,
    SparseVector,
    basis_vector,
    index_support,
    parse_space,
    preset,
    seminorm,
    space_from_json,
    space_to_json,
    table_matrix,
)

PRESETS = {
    "c0_Z": preset("c0_Z"),
    "lp_Z(2)": preset("lp_Z", 2),
    "c0_N": preset("c0_N"),
    "lp_N(1)": preset("lp_N", 1),
    "s_Z": preset("s_Z"),
    "halfline_Z": preset("halfline_Z"),
}


class TestPresets:
    def test_s_Z_entries(self):
        m = PRESETS["s_Z"].matrix
        assert m.entry(5, 2) == 36
        assert m.entry(-3, 1) == 4
        assert PRESETS["s_Z"].p == 1

    def test_lp_unit_matrix(self):
        sp = PRESETS["lp_Z(2)"]
        assert sp.p == 2 and sp.matrix.entry(123456, 7) == 1

    def test_halfline_step(self):
        m = PRESETS["halfline_Z"].matrix
        assert m.entry(0, 1) == 1
        assert m.entry(-1, 1) == 0
        assert m.entry(-1, 2) == 1

    def test_unknown_name(self):
        with pytest.raises(InvalidSpecError):
            preset("weird")

    def test_parse_shorthand(self):
        sp = parse_space("lp_Z:2")
        assert sp.p == 2

    @given(st.sampled_from(sorted(PRESETS)), st.integers(-30, 30), st.integers(1, 5))
    def test_level_monotonicity(self, name, j, k):
        sp = PRESETS[name]
        if sp.index_set == "N":
            j = abs(j) + 1
        assert sp.matrix.entry(j, k) <= sp.matrix.entry(j, k + 1)


class TestSeminorm:
    def test_basis_on_s_Z(self):
        assert seminorm(basis_vector(5), 2, PRESETS["s_Z"]) == 36

    @given(st.sampled_from(sorted(PRESETS)), st.integers(-20, 20), st.integers(1, 4))
    def test_basis_vector_gives_entry(self, name, j, k):
        sp = PRESETS[name]
        if sp.index_set == "N":
            j = abs(j) + 1
        assert seminorm(basis_vector(j), k, sp) == sp.matrix.entry(j, k)

    def test_two_coordinates_l1(self):
        x = SparseVector.from_pairs([(0, 1), (1, 1)])
        assert seminorm(x, 1, preset("lp_Z", 1)) == 2

    def test_two_coordinates_sup(self):
        x = SparseVector.from_pairs([(0, Fraction(1, 2)), (3, 2)])
        assert seminorm(x, 1, PRESETS["c0_Z"]) == 2

    def test_p2_multi_support_is_log(self):
        x = SparseVector.from_pairs([(0, 1), (1, 1)])
        v = seminorm(x, 1, PRESETS["lp_Z(2)"])
        assert isinstance(v, LogMagnitude)
        assert v.log2 == pytest.approx(0.5)  # sqrt(2)

    def test_zero_vector(self):
        assert seminorm(SparseVector(), 3, PRESETS["s_Z"]) == 0

    @given(st.integers(-10, 10), st.fractions(min_value=-9, max_value=9, max_denominator=64))
    def test_p0_equals_p1_on_single_support(self, j, c):
        x = SparseVector.from_pairs([(j, c)])
        a = seminorm(x, 2, preset("lp_Z", 1))
        b = seminorm(x, 2, preset("c0_Z"))
        assert a == b


class TestIndexSupport:
    def test_halfline_window(self):
        got = index_support(PRESETS["halfline_Z"], 2, (-5, 5))
        assert got == list(range(-1, 6))

    def test_unit_full_window(self):
        assert index_support(PRESETS["c0_Z"], 1, (-3, 3)) == list(range(-3, 4))

    def test_s_Z_all_positive(self):
        assert index_support(PRESETS["s_Z"], 1, (-2, 2)) == [-2, -1, 0, 1, 2]

    def test_unilateral_clips(self):
        assert index_support(PRESETS["c0_N"], 1, (-3, 3)) == [1, 2, 3]


class TestSparseVector:
    def test_merges_and_drops_zeros(self):
        x = SparseVector.from_pairs([(0, 1), (0, -1), (2, Fraction(1, 3))])
        assert x.support == (2,)

    def test_scale(self):
        x = basis_vector(4).scale(Fraction(3, 2))
        assert x.coeff(4) == Fraction(3, 2)
        assert x.scale(0).is_zero


class TestTableMatrix:
    def test_tail_error(self):
        m = table_matrix({0: [1, 2], 1: [1, 1]}, 0, 1)
        assert m.entry(0, 2) == 2
        with pytest.raises(IndexError):
            m.entry(5, 1)

    def test_tail_hold(self):
        m = table_matrix({0: [1, 2], 1: [3, 4]}, 0, 1, tail="hold")
        assert m.entry(9, 1) == 3

    def test_rejects_bad_rows(self):
        with pytest.raises(InvalidSpecError):
            table_matrix({0: [2, 1]}, 0, 0)
        with pytest.raises(InvalidSpecError):
            table_matrix({0: [0, 0]}, 0, 0)


def test_json_roundtrip():
    for name in ("c0_Z", "s_Z", "halfline_Z"):
        sp = PRESETS.get(name) or preset(name)
        again = space_from_json(space_to_json(sp))
        assert again.p == sp.p
        for j in (-3, 0, 2):
            for k in (1, 2):
                assert again.matrix.entry(j, k) == sp.matrix.entry(j, k)
