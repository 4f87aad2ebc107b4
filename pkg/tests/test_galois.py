import numpy as np
import pytest
from hypothesis import given, strategies as st

from cycloc.galois import (BINARY_MODULI, FieldElement, FieldError, build_field,
                           eval_binary_at_powers, get_field, is_irreducible, mult_order,
                           nth_root, poly_eval)


def naive_order(q, n):
    m, x = 1, q % n
    while x != 1:
        x = (x * q) % n
        m += 1
    return m


@pytest.mark.parametrize("q,n,m", [(2, 63, 6), (2, 255, 8), (17, 16, 1), (2, 21, 6), (2, 7, 3)])
def test_mult_order_examples(q, n, m):
    assert mult_order(q, n) == m


@given(st.integers(3, 500).filter(lambda n: n % 2))
def test_mult_order_matches_iteration(n):
    assert mult_order(2, n) == naive_order(2, n)


def test_mult_order_rejects_common_factor():
    with pytest.raises(FieldError):
        mult_order(2, 6)


def test_gf2_base_field():
    f = build_field(2, 1)
    assert f.exp.tolist() == [1]
    assert f.order == 1


def test_gf64_generator_order():
    f = build_field(2, 6)
    a = FieldElement(f, 1)
    assert (a ** 63).value == 1
    assert all((a ** j).value != 1 for j in range(1, 63))
    assert a.multiplicative_order() == 63


def test_prime_field_17():
    f = build_field(17, 1)
    assert f.order == 16
    g = int(f.exp[1])
    assert sorted(pow(g, i, 17) for i in range(16)) == list(range(1, 17))


@pytest.mark.parametrize("m", sorted(BINARY_MODULI))
def test_builtin_moduli_are_primitive(m):
    digits = [(BINARY_MODULI[m] >> i) & 1 for i in range(m + 1)]
    if m <= 16:
        assert is_irreducible(digits, 2)
    f = build_field(2, m)
    # the generator x reaches every nonzero element, so the modulus is primitive
    assert len(set(f.exp.tolist())) == f.order


def test_nonbinary_extension_field():
    f = build_field(3, 2)
    assert f.size == 9
    assert sorted(f.exp.tolist()) == list(range(1, 9))


def test_nth_root_examples():
    f = get_field(2, 6)
    assert nth_root(f, 63).log == 1
    assert nth_root(f, 21).log == 3
    assert nth_root(f, 7).log == 9
    with pytest.raises(FieldError):
        nth_root(f, 10)


def test_poly_eval_examples():
    f = get_field(2, 6)
    beta = nth_root(f, 21)
    assert poly_eval([0] * 21, beta).is_zero
    # x^21 - 1 vanishes at every 21st root of unity
    assert poly_eval([1] + [0] * 20 + [1], beta).is_zero
    f4 = get_field(2, 2)
    a = FieldElement(f4, 1)
    assert poly_eval([1, 1], a) == FieldElement.one(f4) + a


def _gf_mul_bits(a, b, mod, m):
    """Carry-less multiply then reduce; an independent oracle for GF(2^m)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= mod
    return r


@given(st.integers(1, 255), st.integers(1, 255))
def test_gf256_mul_matches_carryless(a, b):
    f = get_field(2, 8)
    assert f.mul(a, b) == _gf_mul_bits(a, b, BINARY_MODULI[8], 8)


@given(st.integers(0, 63), st.integers(0, 63), st.integers(0, 63))
def test_field_axioms_gf64(a, b, c):
    f = get_field(2, 6)
    x, y, z = (FieldElement.from_int(f, v) for v in (a, b, c))
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x + y == y + x
    if not x.is_zero:
        assert (x * x.inverse()).value == 1
        assert (y / x) * x == y


@given(st.integers(0, 16), st.integers(0, 16))
def test_prime_field_arithmetic(a, b):
    f = get_field(17, 1)
    x, y = FieldElement.from_int(f, a), FieldElement.from_int(f, b)
    assert (x + y).value == (a + b) % 17
    assert (x - y).value == (a - b) % 17
    assert (x * y).value == (a * b) % 17


def test_elements_of_different_fields_do_not_mix():
    a = FieldElement.one(get_field(2, 4))
    b = FieldElement.one(get_field(2, 6))
    with pytest.raises(FieldError):
        a + b


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        FieldElement.zero(get_field(2, 4)).inverse()


@given(st.lists(st.integers(0, 1), min_size=21, max_size=21))
def test_vectorized_evaluation_matches_horner(bits):
    f = get_field(2, 6)
    vals = eval_binary_at_powers(f, np.asarray(bits), 3, range(21))
    beta = nth_root(f, 21)
    for lam in range(21):
        assert vals[lam] == poly_eval(bits, beta ** lam).value


def test_field_size_limit():
    with pytest.raises(FieldError):
        build_field(2, 21)
    with pytest.raises(FieldError):
        build_field(4, 1)
