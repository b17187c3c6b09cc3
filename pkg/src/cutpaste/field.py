"""Finite fields F_{p^k} in the polynomial basis.

Elements are stored as integer codes ``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``
where ``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` is the residue modulo the
field's modulus. Prime-field elements keep the same code inside every
extension, so forms drawn over F_p can be evaluated over F_{p^k} directly.

Canonical arithmetic is polynomial-basis arithmetic (extended Euclid for
inverses). Dense lookup tables are derived from it on demand for the
enumeration kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "FIELD_SIZE_CAP",
    "TABLE_SIZE_CAP",
    "Field",
    "FieldElem",
    "FieldError",
    "field_create",
    "is_prime",
]

#: Largest p**k accepted by :func:`field_create`.
FIELD_SIZE_CAP = 2**20
#: Largest p**k for which dense add/mul tables are built.
TABLE_SIZE_CAP = 2**12


class FieldError(ValueError):
    """Invalid field parameters or illegal field operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


# -- polynomials over F_p as coefficient lists, lowest degree first ----------


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _ptrim([c % p for c in a])
    m = _ptrim(list(m))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _ptrim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _ptrim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def _ppowmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _is_irreducible(f: list[int], p: int) -> bool:
    """Ben-Or test: gcd(x^(p^i) - x, f) = 1 for i <= deg f / 2."""
    k = len(f) - 1
    if k == 1:
        return True
    h = [0, 1]
    for _ in range(k // 2):
        h = _ppowmod(h, p, f, p)
        g = _pgcd(f, _psub(h, [0, 1], p), p)
        if len(g) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (0,)
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        if low[0] == 0:
            continue
        if _is_irreducible(low + [1], p):
            return tuple(low)
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")  # unreachable


# -- field -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Field:
    """The finite field F_{p^k}.

    ``modulus`` holds the non-leading coefficients ``[m_0, ..., m_{k-1}]`` of
    the monic modulus ``x^k + m_{k-1} x^{k-1} + ... + m_0``.
    """

    p: int
    k: int
    modulus: tuple[int, ...]
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def order(self) -> int:
        return self.p**self.k

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        return f"Field(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    # coding

    def to_coeffs(self, code: int) -> list[int]:
        return [(code // self.p**i) % self.p for i in range(self.k)]

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.k:
            raise FieldError(f"expected at most {self.k} coefficients, got {len(coeffs)}")
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs))

    def _full_modulus(self) -> list[int]:
        return list(self.modulus) + [1]

    # canonical arithmetic on codes

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        t = self._cache.get("tables")
        if t is not None:
            return int(t.add[a, b])
        ca, cb = self.to_coeffs(a), self.to_coeffs(b)
        return self.from_coeffs([x + y for x, y in zip(ca, cb)])

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        t = self._cache.get("tables")
        if t is not None:
            return int(t.neg[a])
        return self.from_coeffs([-c for c in self.to_coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        t = self._cache.get("tables")
        if t is not None:
            return int(t.mul[a, b])
        prod = _pmul(_ptrim(self.to_coeffs(a)), _ptrim(self.to_coeffs(b)), self.p)
        return self.from_coeffs(_pmod(prod, self._full_modulus(), self.p))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        # extended Euclid: s*a + t*m = 1
        p = self.p
        r0, r1 = self._full_modulus(), _ptrim(self.to_coeffs(a))
        s0, s1 = [], [1]
        while len(r1) > 1:
            q, r = _pdivmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1, p), p)
        c = pow(r1[0], p - 2, p)
        return self.from_coeffs(_pmod([x * c for x in s1], self._full_modulus(), p))

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    # elements

    def elem(self, value) -> "FieldElem":
        """Build an element from an int (prime-field residue) or a coefficient list."""
        if isinstance(value, FieldElem):
            if value.field != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, (list, tuple)):
            return FieldElem(self, self.from_coeffs(value))
        return FieldElem(self, int(value) % self.p)

    def code(self, value) -> int:
        return self.elem(value).code

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, 1)

    def enumerate(self) -> Iterator["FieldElem"]:
        """All elements in code order: 0, 1, ..., p-1, x, x+1, ...

        Equivalently lexicographic on the reversed coefficient vector
        ``(c_{k-1}, ..., c_0)``.
        """
        for code in range(self.order):
            yield FieldElem(self, code)

    def extension(self, k: int) -> "Field":
        """F_{p^(self.k * k)}; only defined from the prime field."""
        if self.k != 1:
            raise FieldError("extensions are built from the prime field")
        return field_create(self.p, k)

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    # dense tables for the kernels

    def tables(self) -> "FieldTables":
        t = self._cache.get("tables")
        if t is None:
            t = _build_tables(self)
            self._cache["tables"] = t
        return t


def _pdivmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    q = [0] * max(len(a) - len(b) + 1, 0)
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        q[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bc) % p
        _ptrim(a)
    return _ptrim(q), a


@dataclass(frozen=True)
class FieldTables:
    """Dense lookup tables; ``add[a, b]`` is the code of a + b, etc."""

    add: np.ndarray
    sub: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray  # inv[0] == 0 by convention
    log: np.ndarray  # log[0] == -1
    exp: np.ndarray


def _build_tables(f: Field) -> FieldTables:
    Q, p, k = f.order, f.p, f.k
    if Q > TABLE_SIZE_CAP:
        raise FieldError(f"tables for a field of size {Q} exceed TABLE_SIZE_CAP={TABLE_SIZE_CAP}")
    codes = np.arange(Q, dtype=np.int64)
    digits = np.stack([(codes // p**i) % p for i in range(k)], axis=1)
    weights = p ** np.arange(k, dtype=np.int64)
    add = (((digits[:, None, :] + digits[None, :, :]) % p) @ weights).astype(np.int32)
    neg = (((-digits) % p) @ weights).astype(np.int32)
    sub = add[:, neg]

    # primitive element search with canonical multiplication
    order_factors = _prime_factors(Q - 1)
    gen = None
    for g in range(1, Q):
        if all(f.pow(g, (Q - 1) // r) != 1 for r in order_factors):
            gen = g
            break
    exp = np.empty(Q - 1, dtype=np.int32)
    v = 1
    for i in range(Q - 1):
        exp[i] = v
        v = f.mul(v, gen)
    log = np.full(Q, -1, dtype=np.int64)
    log[exp] = np.arange(Q - 1)
    mul = np.zeros((Q, Q), dtype=np.int32)
    lg = log[1:]
    mul[1:, 1:] = exp[(lg[:, None] + lg[None, :]) % (Q - 1)]
    inv = np.zeros(Q, dtype=np.int32)
    inv[1:] = exp[(-lg) % (Q - 1)]
    for arr in (add, sub, mul, neg, inv, log, exp):
        arr.setflags(write=False)
    return FieldTables(add=add, sub=sub, mul=mul, neg=neg, inv=inv, log=log, exp=exp)


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def field_create(p: int, k: int = 1) -> Field:
    """Return F_{p^k} with the smallest monic irreducible modulus.

    Moduli are compared by the code of their non-leading coefficients, the
    same order used by :meth:`Field.enumerate`. Raises :class:`FieldError`
    for non-prime ``p``, ``p < 5`` or ``p**k > FIELD_SIZE_CAP``.
    """
    p, k = int(p), int(k)
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if p < 5:
        raise FieldError(f"characteristic {p} < 5 is not supported")
    if k < 1:
        raise FieldError("extension degree must be >= 1")
    if p**k > FIELD_SIZE_CAP:
        raise FieldError(f"field size {p}^{k} exceeds FIELD_SIZE_CAP={FIELD_SIZE_CAP}")
    return Field(p, k, _smallest_irreducible(p, k))


@dataclass(frozen=True)
class FieldElem:
    field: Field
    code: int

    @property
    def coeffs(self) -> list[int]:
        return self.field.to_coeffs(self.code)

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldError("mixed fields")
            return other.code
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.field, self.field.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.field, self.field.sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.field, self.field.sub(o, self.code))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.field, self.field.mul(self.code, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.div(self.code, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.div(o, self.code))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.code))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.code, int(e)))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.code))

    def __bool__(self):
        return self.code != 0

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == int(other) % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.code))

    def __repr__(self):
        if self.field.k == 1:
            return f"{self.code} (mod {self.field.p})"
        return f"FieldElem({self.coeffs} in F_{self.field.p}^{self.field.k})"

    def to_json(self) -> list[int]:
        return self.coeffs
