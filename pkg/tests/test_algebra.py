import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import finite, multicomplex
from mcbrot.algebra import (
    Multicomplex,
    OrderMismatchError,
    RecursiveMulticomplex,
    add,
    flat_from_recursive,
    is_hyperbolic,
    is_imaginary,
    mul,
    norm,
    power,
    recursive_from_flat,
    recursive_mul,
    square_sign,
    unit_name,
    unit_product,
)
from mcbrot.literal import parse_literal

I1, I2, I3, I4 = 1, 2, 4, 8


def lit(text, n=3):
    return parse_literal(text, n)


def rel_err(a, b):
    return np.max(np.abs(a.coeffs - b.coeffs)) / max(1.0, np.max(np.abs(b.coeffs)))


class TestUnits:
    def test_unit_product_examples(self):
        assert unit_product(I1, I1) == (-1, 0)
        assert unit_product(I1 | I2, I1 | I2) == (1, 0)
        assert unit_product(I1 | I3, I2 | I3) == (-1, I1 | I2)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_unit_counts(self, n):
        units = range(1, 1 << n)
        assert sum(is_imaginary(u) for u in units) == 2 ** (n - 1)
        assert sum(is_hyperbolic(u) for u in units) == 2 ** (n - 1) - 1
        assert all(square_sign(u) == (-1 if is_imaginary(u) else 1) for u in units)

    def test_unit_table_matches_recursive_oracle(self):
        for u in range(16):
            for v in range(16):
                sign, w = unit_product(u, v)
                a = recursive_from_flat(Multicomplex.unit(4, u))
                b = recursive_from_flat(Multicomplex.unit(4, v))
                assert flat_from_recursive(recursive_mul(a, b)) == Multicomplex.unit(4, w, float(sign))

    def test_unit_names(self):
        assert unit_name(0) == "1"
        assert unit_name(0b101) == "i1i3"

    @given(st.integers(0, 63), st.integers(0, 63))
    def test_unit_product_commutes(self, u, v):
        assert unit_product(u, v) == unit_product(v, u)


class TestArithmetic:
    def test_add_examples(self):
        assert add(lit("1 + i1"), lit("i2")) == lit("1 + i1 + i2")
        a = lit("3 - i1i2 + 0.5*i3")
        assert a + Multicomplex.zero(3) == a
        assert lit("1 + i1i2") + lit("-1 - i1i2") == Multicomplex.zero(3)

    def test_mul_examples(self):
        assert mul(lit("1 + i1"), lit("1 + i2")) == lit("1 + i1 + i2 + i1i2")
        a = lit("2 - i3 + 4*i1i2i3")
        assert a * Multicomplex.one(3) == a

    def test_pow_examples(self):
        assert power(lit("i1"), 2) == lit("-1")
        assert power(lit("i1i2"), 2) == lit("1")
        a = lit("0.5 + i1 - 2*i2i3")
        assert power(a, 1) == a

    def test_norm_examples(self):
        assert norm(Multicomplex.zero(3)) == 0
        assert norm(lit("1 + i1 + i2 + i1i2")) == 2
        assert norm(lit("3*i1i2i3")) == 3

    def test_order_mismatch(self):
        with pytest.raises(OrderMismatchError):
            Multicomplex.one(2) + Multicomplex.one(3)
        with pytest.raises(OrderMismatchError):
            Multicomplex.one(2) * Multicomplex.one(3)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Multicomplex(1, [np.nan, 0])
        with pytest.raises(ValueError):
            Multicomplex(2, [1, 2, 3])

    def test_immutable(self):
        a = Multicomplex.one(2)
        with pytest.raises(AttributeError):
            a.order = 3
        with pytest.raises(ValueError):
            a.coeffs[0] = 5.0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_flat_matches_recursive_oracle(self, n, rng):
        for _ in range(300):
            a = Multicomplex(n, rng.uniform(-1, 1, 1 << n))
            b = Multicomplex(n, rng.uniform(-1, 1, 1 << n))
            oracle = flat_from_recursive(recursive_mul(recursive_from_flat(a), recursive_from_flat(b)))
            assert rel_err(a * b, oracle) <= 1e-12

    def test_pow3_is_repeated_mul(self, rng):
        for _ in range(50):
            a = Multicomplex(3, rng.uniform(-2, 2, 8))
            assert rel_err(a**3, a * (a * a)) <= 1e-12


@st.composite
def same_order_triple(draw):
    n = draw(st.integers(1, 5))
    return n, draw(multicomplex(n)), draw(multicomplex(n)), draw(multicomplex(n))


class TestRingLaws:
    @given(same_order_triple())
    def test_commutative(self, t):
        _, a, b, _ = t
        assert rel_err(a * b, b * a) <= 1e-12

    @given(same_order_triple())
    def test_associative(self, t):
        _, a, b, c = t
        # products reach ~1e3 * 32**2, so compare relative to the magnitude
        want = a * (b * c)
        scale = max(1.0, a.norm() * b.norm() * c.norm())
        assert np.max(np.abs(((a * b) * c).coeffs - want.coeffs)) <= 1e-12 * scale

    @given(same_order_triple())
    def test_distributive(self, t):
        _, a, b, c = t
        want = a * b + a * c
        scale = max(1.0, a.norm() * (b.norm() + c.norm()))
        assert np.max(np.abs((a * (b + c)).coeffs - want.coeffs)) <= 1e-12 * scale

    @given(st.integers(1, 5).flatmap(lambda n: multicomplex(n)), finite)
    def test_norm_homogeneous(self, a, s):
        assert abs((a * s).norm() - abs(s) * a.norm()) <= 1e-12 * max(1.0, abs(s) * a.norm())


class TestRecursive:
    def test_bicomplex_layout(self):
        r = RecursiveMulticomplex(
            lo=RecursiveMulticomplex(lo=RecursiveMulticomplex(1.0), hi=RecursiveMulticomplex(2.0)),
            hi=RecursiveMulticomplex(lo=RecursiveMulticomplex(3.0), hi=RecursiveMulticomplex(4.0)),
        )
        assert flat_from_recursive(r) == lit("1 + 2*i1 + 3*i2 + 4*i1i2", 2)

    def test_scalar(self):
        assert flat_from_recursive(RecursiveMulticomplex(5.0)) == Multicomplex(0, [5.0])
        assert recursive_from_flat(Multicomplex(0, [5.0])) == RecursiveMulticomplex(5.0)

    def test_round_trip_exact(self, rng):
        for _ in range(1000):
            a = Multicomplex(4, rng.normal(size=16))
            assert flat_from_recursive(recursive_from_flat(a)) == a

    def test_mismatched_halves(self):
        with pytest.raises(ValueError):
            RecursiveMulticomplex(lo=RecursiveMulticomplex(1.0), hi=RecursiveMulticomplex.zero(1))
