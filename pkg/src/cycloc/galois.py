"""Finite fields GF(p^m) backed by exp/log tables.

Elements are stored by their integer encoding: the base-p digits of the
integer are the polynomial coefficients modulo the field's modulus (for p = 2
this is the usual bit-vector form). ``FieldElement`` wraps the log-index form
for code that wants operator syntax; the hot paths in the rest of the package
work directly on integer encodings and the tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import gcd
from typing import Optional, Sequence

import numpy as np

MAX_FIELD_SIZE = 1 << 20

# Primitive polynomials over GF(2), bit i = coefficient of x^i.
BINARY_MODULI = {
    1: 0b11,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
    17: 0x20009,
    18: 0x40081,
    19: 0x80027,
    20: 0x100009,
}


class FieldError(ValueError):
    """Invalid field parameters or an element from a foreign field."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def mult_order(q: int, n: int) -> int:
    """Smallest m >= 1 with q**m == 1 (mod n)."""
    if q < 2 or n < 2:
        raise FieldError(f"need q >= 2 and n >= 2, got q={q}, n={n}")
    if gcd(q, n) != 1:
        raise FieldError(f"q={q} and n={n} are not coprime")
    m, x = 1, q % n
    while x != 1:
        x = (x * q) % n
        m += 1
    return m


# -- polynomials over GF(p) as coefficient lists, lowest degree first ---------

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], b: list[int], p: int) -> list[int]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bi) % p
        _ptrim(a)
    return a


def _monic_polys(degree: int, p: int):
    for code in range(p ** degree):
        coeffs = []
        for _ in range(degree):
            coeffs.append(code % p)
            code //= p
        yield coeffs + [1]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _ptrim([c % p for c in poly])
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for div in _monic_polys(d, p):
            if not _pmod(poly, div, p):
                return False
    return True


def _int_to_digits(x: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(x % p)
        x //= p
    return out


def _digits_to_int(d: Sequence[int], p: int) -> int:
    x = 0
    for c in reversed(d):
        x = x * p + c
    return x


@dataclass(frozen=True, eq=False)
class Field:
    """GF(p^m) with exp/log tables relative to a fixed generator.

    ``exp[i]`` is the integer encoding of generator**i for i in [0, order);
    ``log[v]`` inverts it on nonzero encodings (``log[0]`` is -1).
    """

    p: int
    m: int
    modulus: tuple[int, ...]
    exp: np.ndarray = dc_field(repr=False)
    log: np.ndarray = dc_field(repr=False)

    @property
    def size(self) -> int:
        return self.p ** self.m

    @property
    def order(self) -> int:
        """Order of the multiplicative group, p^m - 1."""
        return self.p ** self.m - 1

    # integer-encoding arithmetic -------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        da = _int_to_digits(a, self.p, self.m)
        db = _int_to_digits(b, self.p, self.m)
        return _digits_to_int([(x + y) % self.p for x, y in zip(da, db)], self.p)

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        return _digits_to_int([(-x) % self.p for x in _int_to_digits(a, self.p, self.m)], self.p)

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(int(self.log[a]) + int(self.log[b])) % self.order])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.exp[(-int(self.log[a])) % self.order])

    def power(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.exp[(int(self.log[a]) * e) % self.order])

    def alpha_pow(self, e: int) -> int:
        """Encoding of generator**e."""
        return int(self.exp[e % self.order])

    def element(self, value: int) -> "FieldElement":
        return FieldElement.from_int(self, value)

    def __repr__(self) -> str:
        return f"Field(GF({self.p}^{self.m}), modulus={self.modulus})"


def _mul_by_x_table(p: int, m: int, modulus: Sequence[int]) -> Optional[list[int]]:
    """Powers of x modulo ``modulus``; None if x is not a generator."""
    order = p ** m - 1
    if p == 2:
        mod = _digits_to_int(modulus, 2)
        out, cur = [], 1
        for _ in range(order):
            out.append(cur)
            cur <<= 1
            if cur >> m:
                cur ^= mod
        if cur != 1 or len(set(out)) != order:
            return None
        return out
    seen = set()
    out = []
    cur = [1] + [0] * (m - 1)
    for _ in range(order):
        v = _digits_to_int(cur, p)
        if v in seen:
            return None
        seen.add(v)
        out.append(v)
        # cur *= x, reduce x^m = -(modulus[0..m-1])
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(m):
                cur[i] = (cur[i] - top * modulus[i]) % p
    if _digits_to_int(cur, p) != 1:
        return None
    return out


def _generic_tables(p: int, m: int, modulus: Sequence[int]) -> list[int]:
    """Exp table for an irreducible but possibly non-primitive modulus."""
    order = p ** m - 1

    def mulpoly(a: int, b: int) -> int:
        da, db = _int_to_digits(a, p, m), _int_to_digits(b, p, m)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        return _digits_to_int(_pmod(prod, list(modulus), p), p)

    for g in range(2, p ** m):
        out, cur = [], 1
        for _ in range(order):
            out.append(cur)
            cur = mulpoly(cur, g)
        if cur == 1 and len(set(out)) == order:
            return out
    raise FieldError(f"no generator found for GF({p}^{m})")


def build_field(p: int, m: int = 1) -> Field:
    """Construct GF(p^m).

    Binary fields with m <= 16 use the built-in primitive modulus; everything
    else searches monic polynomials of degree m for an irreducible one. For
    prime fields the generator is the smallest primitive root.
    """
    if not _is_prime(p):
        raise FieldError(f"characteristic must be prime, got {p}")
    if m < 1:
        raise FieldError(f"extension degree must be >= 1, got {m}")
    if p ** m > MAX_FIELD_SIZE:
        raise FieldError(f"GF({p}^{m}) exceeds the table size limit {MAX_FIELD_SIZE}")
    order = p ** m - 1

    if m == 1:
        if p == 2:
            exp_list = [1]
            modulus: tuple[int, ...] = (1, 1)
        else:
            for g in range(2, p):
                exp_list = [pow(g, i, p) for i in range(order)]
                if len(set(exp_list)) == order:
                    break
            else:  # pragma: no cover - every prime field has a primitive root
                raise FieldError(f"no primitive root mod {p}")
            modulus = ((-g) % p, 1)
    else:
        exp_list = None
        candidates = []
        if p == 2 and m in BINARY_MODULI:
            # known primitive; skips the trial-division search
            candidates.append((_int_to_digits(BINARY_MODULI[m], 2, m + 1), True))
        candidates.extend((c, False) for c in _monic_polys(m, p) if c[0] != 0)
        for cand, known in candidates:
            if not known and not is_irreducible(cand, p):
                continue
            exp_list = _mul_by_x_table(p, m, cand)
            if exp_list is None:
                exp_list = _generic_tables(p, m, cand)
            modulus = tuple(cand)
            break
        if exp_list is None:
            raise FieldError(f"no irreducible modulus of degree {m} over GF({p})")

    exp = np.asarray(exp_list, dtype=np.int64)
    log = np.full(p ** m, -1, dtype=np.int64)
    log[exp] = np.arange(order, dtype=np.int64)
    exp.setflags(write=False)
    log.setflags(write=False)
    return Field(p=p, m=m, modulus=modulus, exp=exp, log=log)


_FIELD_CACHE: dict[tuple[int, int], Field] = {}


def get_field(p: int, m: int) -> Field:
    """Cached :func:`build_field`; fields are immutable so sharing is safe."""
    key = (p, m)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = build_field(p, m)
    return _FIELD_CACHE[key]


@dataclass(frozen=True)
class FieldElement:
    """An element in log-index form; ``log is None`` marks zero."""

    field: Field = dc_field(compare=False, repr=False)
    log: Optional[int]

    @classmethod
    def from_int(cls, field: Field, value: int) -> "FieldElement":
        if not 0 <= value < field.size:
            raise FieldError(f"encoding {value} outside GF({field.p}^{field.m})")
        return cls(field, None if value == 0 else int(field.log[value]))

    @classmethod
    def zero(cls, field: Field) -> "FieldElement":
        return cls(field, None)

    @classmethod
    def one(cls, field: Field) -> "FieldElement":
        return cls(field, 0)

    @property
    def is_zero(self) -> bool:
        return self.log is None

    @property
    def value(self) -> int:
        return 0 if self.log is None else int(self.field.exp[self.log])

    def _check(self, other: "FieldElement") -> None:
        if other.field is not self.field:
            raise FieldError("elements belong to different fields")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement.from_int(self.field, self.field.add(self.value, other.value))

    def __neg__(self) -> "FieldElement":
        return FieldElement.from_int(self.field, self.field.neg(self.value))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        if self.log is None or other.log is None:
            return FieldElement(self.field, None)
        return FieldElement(self.field, (self.log + other.log) % self.field.order)

    def __pow__(self, e: int) -> "FieldElement":
        if self.log is None:
            return FieldElement(self.field, 0 if e == 0 else None)
        return FieldElement(self.field, (self.log * e) % self.field.order)

    def inverse(self) -> "FieldElement":
        if self.log is None:
            raise ZeroDivisionError("zero has no inverse")
        return FieldElement(self.field, (-self.log) % self.field.order)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inverse()

    def multiplicative_order(self) -> int:
        if self.log is None:
            raise FieldError("zero has no multiplicative order")
        return self.field.order // gcd(self.log, self.field.order)


def nth_root(field: Field, n: int) -> FieldElement:
    """Primitive n-th root of unity, generator**((p^m - 1) / n)."""
    if n < 1 or field.order % n:
        raise FieldError(f"n={n} does not divide {field.order}")
    return FieldElement(field, field.order // n)


def poly_eval(coeffs: Sequence[int], point: FieldElement) -> FieldElement:
    """Evaluate sum_i coeffs[i] * x**i at ``point`` by Horner's rule.

    Coefficients are base-field scalars (0/1 for binary codes), embedded as
    field encodings.
    """
    f = point.field
    acc = 0
    x = point.value
    for c in reversed(list(coeffs)):
        acc = f.add(f.mul(acc, x), int(c) % f.p)
    return FieldElement.from_int(f, acc)


def eval_binary_at_powers(field: Field, words: np.ndarray, root_log: int,
                          exponents: Sequence[int]) -> np.ndarray:
    """Evaluate binary words at root**lam for each lam in ``exponents``.

    ``words`` has shape (..., n). Returns integer encodings with shape
    (..., len(exponents)). Only valid for characteristic 2.
    """
    if field.p != 2:
        raise FieldError("binary evaluation needs characteristic 2")
    words = np.asarray(words, dtype=np.uint8)
    n = words.shape[-1]
    t = np.arange(n, dtype=np.int64)
    lam = np.asarray(list(exponents), dtype=np.int64)
    # vals[l, t] = encoding of root^(lam_l * t)
    vals = field.exp[(np.outer(lam, t) * root_log) % field.order]
    flat = words.reshape(-1, n).astype(bool)
    out = np.zeros((flat.shape[0], lam.size), dtype=np.int64)
    for col in range(n):
        rows = flat[:, col]
        if rows.any():
            out[rows] ^= vals[:, col]
    return out.reshape(words.shape[:-1] + (lam.size,))
