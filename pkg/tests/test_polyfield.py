"""Exact rational polynomial ring: arithmetic, calculus, determinants."""

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from mlab import PolyField, perm_sign, poly_const, poly_det, poly_var, poly_zero

from oracles import det_cofactor, eval_poly_terms, perm_sign_by_inversions


def _rand_poly(d: int, rng_vals: list[int], max_exp: int = 2) -> PolyField:
    """Deterministic small polynomial from a flat list of integers."""
    terms: dict[tuple[int, ...], Fraction] = {}
    per_term = d + 2
    for k in range(len(rng_vals) // per_term):
        chunk = rng_vals[k * per_term : (k + 1) * per_term]
        expo = tuple(abs(v) % (max_exp + 1) for v in chunk[:d])
        num, den_raw = chunk[d], chunk[d + 1]
        terms[expo] = terms.get(expo, Fraction(0)) + Fraction(num, abs(den_raw) % 5 + 1)
    return PolyField(d, terms)


small_ints = st.lists(st.integers(-9, 9), min_size=12, max_size=12)


class TestRing:
    def test_zero_and_const(self):
        z = poly_zero(2)
        assert z.is_zero
        c = poly_const(2, Fraction(3, 7))
        assert c.eval((5, -2)) == Fraction(3, 7)

    def test_var_eval(self):
        x1 = poly_var(3, 1)
        assert x1.eval((9, Fraction(2, 3), 4)) == Fraction(2, 3)

    def test_mul_known_product(self):
        x = poly_var(1, 0)
        p = (x + poly_const(1, 1)) * (x - poly_const(1, 1))
        assert p.terms == {(2,): Fraction(1), (0,): Fraction(-1)}

    def test_zero_coefficients_are_dropped(self):
        x = poly_var(1, 0)
        p = x - x
        assert p.is_zero and p.terms == {}

    @given(small_ints, small_ints, small_ints)
    def test_add_associative(self, a, b, c):
        p, q, r = (_rand_poly(2, v) for v in (a, b, c))
        assert ((p + q) + r).terms == (p + (q + r)).terms

    @given(small_ints, small_ints, small_ints)
    def test_mul_distributes(self, a, b, c):
        p, q, r = (_rand_poly(2, v) for v in (a, b, c))
        assert (p * (q + r)).terms == (p * q + p * r).terms

    @given(small_ints, small_ints)
    def test_mul_commutative(self, a, b):
        p, q = _rand_poly(2, a), _rand_poly(2, b)
        assert (p * q).terms == (q * p).terms

    @given(small_ints)
    def test_eval_matches_term_oracle(self, a):
        p = _rand_poly(2, a)
        point = (Fraction(3, 2), Fraction(-1, 3))
        assert p.eval(point) == eval_poly_terms(p.terms, point)

    def test_dimension_mismatch_rejected(self):
        import pytest

        with pytest.raises(ValueError):
            poly_var(2, 0) + poly_var(3, 0)


class TestCalculus:
    def test_power_rule(self):
        x = poly_var(1, 0)
        p = x * x * x
        assert p.diff(0).terms == {(2,): Fraction(3)}

    @given(small_ints, small_ints)
    def test_product_rule(self, a, b):
        p, q = _rand_poly(2, a), _rand_poly(2, b)
        lhs = (p * q).diff(0)
        rhs = p.diff(0) * q + p * q.diff(0)
        assert lhs.terms == rhs.terms

    @given(small_ints)
    def test_mixed_partials_commute(self, a):
        p = _rand_poly(2, a, max_exp=3)
        assert p.diff(0).diff(1).terms == p.diff(1).diff(0).terms

    def test_axis_out_of_range(self):
        import pytest

        with pytest.raises(ValueError):
            poly_var(2, 0).diff(2)


class TestPermSign:
    def test_identity_and_swap(self):
        assert perm_sign((0, 1, 2)) == 1
        assert perm_sign((1, 0, 2)) == -1

    @given(st.permutations(list(range(5))))
    def test_matches_inversion_count(self, perm):
        assert perm_sign(tuple(perm)) == perm_sign_by_inversions(tuple(perm))


class TestPolyDet:
    def test_identity_matrix(self):
        eye = [
            [poly_const(1, 1 if i == j else 0) for j in range(3)]
            for i in range(3)
        ]
        assert poly_det(eye).terms == {(0,): Fraction(1)}

    def test_two_by_two_formula(self):
        a, b = poly_var(2, 0), poly_var(2, 1)
        mat = [[a, b], [b, a]]
        want = a * a - b * b
        assert poly_det(mat).terms == want.terms

    @given(st.lists(st.integers(-6, 6), min_size=9, max_size=9))
    def test_matches_cofactor_oracle_3x3(self, vals):
        mat = [
            [poly_const(1, vals[3 * i + j]) for j in range(3)] for i in range(3)
        ]
        got = poly_det(mat).eval((0,))
        want = det_cofactor([[Fraction(v) for v in row] for row in
                             [vals[0:3], vals[3:6], vals[6:9]]])
        assert got == want

    @given(small_ints, small_ints, small_ints, small_ints)
    def test_row_swap_flips_sign(self, a, b, c, d):
        rows = [[_rand_poly(2, a), _rand_poly(2, b)],
                [_rand_poly(2, c), _rand_poly(2, d)]]
        swapped = [rows[1], rows[0]]
        assert poly_det(swapped).terms == (-poly_det(rows)).terms

    def test_rejects_non_square(self):
        import pytest

        with pytest.raises(ValueError):
            poly_det([[poly_const(1, 1), poly_const(1, 2)]])
