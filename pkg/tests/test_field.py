import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_irreducible_p, gf_mul, gf_rem

from cutpaste.field import (
    FIELD_SIZE_CAP,
    Field,
    FieldElem,
    FieldError,
    field_create,
    is_prime,
)

FIELDS = [(5, 1), (7, 1), (5, 2), (7, 2), (5, 3), (11, 2)]


def _to_gf(code, p, k):
    # sympy's dense lists are highest degree first
    return [int(c) for c in reversed([(code // p**i) % p for i in range(k)])] or [0]


def _from_gf(poly, p, k):
    poly = list(poly)
    coeffs = list(reversed(poly)) + [0] * k
    return sum(int(coeffs[i]) % p * p**i for i in range(k))


def _sympy_ops(f: Field):
    mod = [1] + [int(c) for c in reversed(f.modulus)]
    p, k = f.p, f.k

    def mul(a, b):
        return _from_gf(gf_rem(gf_mul(_to_gf(a, p, k), _to_gf(b, p, k), p, ZZ), mod, p, ZZ), p, k)

    def add(a, b):
        return _from_gf(gf_add(_to_gf(a, p, k), _to_gf(b, p, k), p, ZZ), p, k)

    return add, mul


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_modulus_regression():
    # frozen: F_25 is built on x^2 + 2
    assert list(field_create(5, 2).modulus) == [2, 0]


@pytest.mark.parametrize("p,k", [(5, 2), (7, 2), (5, 3), (7, 3), (11, 2)])
def test_modulus_is_smallest_irreducible(p, k):
    f = field_create(p, k)
    mod_code = sum(c * p**i for i, c in enumerate(f.modulus))
    dense = [1] + [int(c) for c in reversed(f.modulus)]
    assert gf_irreducible_p(dense, p, ZZ)
    for code in range(mod_code):
        tail = [(code // p**i) % p for i in range(k)]
        assert not gf_irreducible_p([1] + list(reversed(tail)), p, ZZ)


def test_rejects_bad_parameters():
    for p in (4, 9, 15):
        with pytest.raises(FieldError):
            field_create(p)
    for p in (2, 3):
        with pytest.raises(FieldError):
            field_create(p)
    with pytest.raises(FieldError):
        field_create(5, 9)  # 5^9 > 2^20
    assert 5**8 <= FIELD_SIZE_CAP


@pytest.mark.parametrize("p,k", FIELDS)
def test_arithmetic_matches_sympy(p, k):
    f = Field(p, k, field_create(p, k).modulus)  # fresh instance: canonical path
    add, mul = _sympy_ops(f)
    Q = f.order
    rng = np.random.default_rng(p * 10 + k)
    for a, b in rng.integers(0, Q, size=(300, 2)).tolist():
        assert f.add(a, b) == add(a, b)
        assert f.mul(a, b) == mul(a, b)
        if b:
            assert f.mul(f.div(a, b), b) == a


@pytest.mark.parametrize("p,k", FIELDS)
def test_tables_match_canonical(p, k):
    f = field_create(p, k)
    fresh = Field(p, k, f.modulus)
    t = f.tables()
    Q = f.order
    for a, b in itertools.product(range(0, Q, max(1, Q // 40)), repeat=2):
        assert t.add[a, b] == fresh.add(a, b)
        assert t.mul[a, b] == fresh.mul(a, b)
        assert t.sub[a, b] == fresh.sub(a, b)
    assert t.inv[0] == 0 and t.log[0] == -1
    for a in range(1, Q):
        assert t.mul[a, t.inv[a]] == 1
        assert t.exp[t.log[a]] == a


def test_prime_codes_embed():
    F, E = field_create(7), field_create(7, 2)
    for a, b in itertools.product(range(7), repeat=2):
        assert E.add(a, b) == F.add(a, b)
        assert E.mul(a, b) == F.mul(a, b)


def test_enumerate_order_and_size():
    E = field_create(5, 2)
    codes = [e.code for e in E.enumerate()]
    assert codes == list(range(25))


def test_elem_interface():
    E = field_create(5, 2)
    a = E.elem([1, 2])  # 1 + 2x
    assert a.code == 11
    assert a.coeffs == [1, 2]
    assert a * a.inverse() == E.one
    assert a - a == E.zero
    assert E.elem(7) == 2  # ints are prime-field residues
    assert a ** (E.order - 1) == 1
    assert a.to_json() == [1, 2]
    with pytest.raises(ZeroDivisionError):
        E.zero.inverse()
    with pytest.raises(FieldError):
        field_create(7).elem(E.one)


codes25 = st.integers(0, 24)


@settings(max_examples=200, deadline=None)
@given(codes25, codes25, codes25)
def test_field_axioms_f25(a, b, c):
    f = field_create(5, 2)
    assert f.add(a, f.add(b, c)) == f.add(f.add(a, b), c)
    assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.add(a, f.neg(a)) == 0
    if a:
        assert f.mul(a, f.inv(a)) == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 342), st.integers(0, 342))
def test_frobenius_is_additive_f343(a, b):
    f = field_create(7, 3)
    fr = lambda x: f.pow(x, 7)  # noqa: E731
    assert fr(f.add(a, b)) == f.add(fr(a), fr(b))
    assert f.pow(a, 343) == a


def test_json():
    assert field_create(7, 2).to_json() == {"p": 7, "k": 2, "modulus": list(field_create(7, 2).modulus)}
    assert isinstance(FieldElem(field_create(5), 3), FieldElem)
