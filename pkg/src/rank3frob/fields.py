"""Arithmetic in F_{p^k} for odd p and small k.

Elements are coordinate vectors over F_p with respect to the power basis of
a fixed modulus.  For table-driven work every element also has an integer
*encoding* ``sum(c_i * p**i)``, and the multiplicative group is indexed by
discrete logarithms to a fixed primitive element.  The log-domain tables
(exp, log, Zech) are what the counting kernels consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import _kernels

#: Full tables (exp/log/Zech/chi) are built only up to this field size.
TABLE_LIMIT = 1 << 24

Poly = tuple  # coefficient tuple over F_p, lowest degree first


class FieldError(ValueError):
    """Raised for unsupported field parameters."""


# ---------------------------------------------------------------------------
# integer helpers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def primes_in(lo: int, hi: int) -> list[int]:
    """Primes in the closed interval [lo, hi]."""
    return [n for n in range(max(lo, 2), hi + 1) if is_prime(n)]


# ---------------------------------------------------------------------------
# dense polynomials over F_p (coefficient tuples, low first, no trailing zeros)


def _trim(c: list[int]) -> Poly:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _pmul(a: Poly, b: Poly, p: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pmod(a: Poly, m: Poly, p: int) -> Poly:
    r = list(a)
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(r) - 1 >= dm and r:
        c = r[-1] * inv % p
        shift = len(r) - 1 - dm
        for i, y in enumerate(m):
            r[shift + i] = (r[shift + i] - c * y) % p
        r = list(_trim(r))
    return tuple(r)


def _psub(a: Poly, b: Poly, p: int) -> Poly:
    n = max(len(a), len(b))
    a = tuple(a) + (0,) * (n - len(a))
    b = tuple(b) + (0,) * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _pgcd(a: Poly, b: Poly, p: int) -> Poly:
    while b:
        a, b = b, _pmod(a, b, p)
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return tuple(x * inv % p for x in a)


def _ppowmod(base: Poly, e: int, m: Poly, p: int) -> Poly:
    result: Poly = (1,)
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p (coefficients low first)."""
    m = _trim([c % p for c in modulus])
    k = len(m) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = (0, 1)
    if _psub(_ppowmod(x, p**k, m, p), x, p):
        return False
    for r in prime_factors(k):
        h = _psub(_ppowmod(x, p ** (k // r), m, p), x, p)
        if len(_pgcd(m, h, p)) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# field specification


@dataclass(frozen=True)
class FieldSpec:
    """The field F_q, q = p**k, presented as F_p[x]/(modulus)."""

    p: int
    k: int
    modulus: Poly = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def has_tables(self) -> bool:
        return self.q <= TABLE_LIMIT

    # -- element construction ---------------------------------------------

    def elem(self, value: int | Sequence[int]) -> FieldElem:
        """Element from an encoding (int) or a coordinate sequence."""
        if isinstance(value, (int, np.integer)):
            return FieldElem(self, self.decode(int(value)))
        coords = [int(c) % self.p for c in value]
        if len(coords) > self.k:
            coords = list(_pmod(tuple(coords), self.modulus, self.p))
        coords += [0] * (self.k - len(coords))
        return FieldElem(self, tuple(coords))

    def from_int(self, n: int) -> FieldElem:
        """Image of a rational integer."""
        return FieldElem(self, (n % self.p,) + (0,) * (self.k - 1))

    @property
    def zero(self) -> FieldElem:
        return self.from_int(0)

    @property
    def one(self) -> FieldElem:
        return self.from_int(1)

    def generator(self) -> FieldElem:
        """The class of x (a root of the modulus)."""
        if self.k == 1:
            return self.from_int(-self.modulus[0])
        return self.elem([0, 1])

    def elements(self) -> Iterator[FieldElem]:
        for n in range(self.q):
            yield self.elem(n)

    def decode(self, n: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            n, r = divmod(n, self.p)
            out.append(r)
        return tuple(out)

    def encode(self, coords: Sequence[int]) -> int:
        n = 0
        for c in reversed(coords):
            n = n * self.p + c
        return n

    # -- structure ------------------------------------------------------------

    def mul_matrix(self, a: FieldElem) -> np.ndarray:
        """Matrix over F_p of multiplication by ``a`` on coordinate columns."""
        k = self.k
        cols = []
        for i in range(k):
            prod = _pmod(_pmul(a.coords, (0,) * i + (1,), self.p), self.modulus, self.p)
            cols.append(list(prod) + [0] * (k - len(prod)))
        return np.array(cols, dtype=np.int64).T

    @cached_property
    def primitive(self) -> FieldElem:
        """Smallest (by encoding) generator of the multiplicative group."""
        order = self.q - 1
        factors = prime_factors(order)
        for n in range(1, self.q):
            g = self.elem(n)
            if all(g ** (order // r) != self.one for r in factors):
                return g
        raise FieldError("no primitive element found")  # pragma: no cover

    @cached_property
    def exp_table(self) -> np.ndarray:
        """``exp_table[n]`` is the encoding of primitive**n, 0 <= n < q-1."""
        self._require_tables()
        return _kernels.build_exp_table(self)

    @cached_property
    def log_table(self) -> np.ndarray:
        """Inverse of :attr:`exp_table`; the entry for 0 is -1."""
        exp = self.exp_table
        log = np.full(self.q, -1, dtype=np.int64)
        log[exp] = np.arange(self.q - 1, dtype=np.int64)
        return log

    @cached_property
    def zech_table(self) -> np.ndarray:
        """``zech_table[n] = log(1 + primitive**n)``, -1 where that sum is 0."""
        exp = self.exp_table
        p = self.p
        digit0 = exp % p
        plus_one = exp - digit0 + (digit0 + 1) % p
        return self.log_table[plus_one]

    @cached_property
    def chi_table(self) -> np.ndarray:
        """Quadratic character indexed by encoding."""
        log = self.log_table
        chi = np.where(log % 2 == 0, 1, -1).astype(np.int8)
        chi[0] = 0
        return chi

    def log(self, a: FieldElem) -> int:
        """Discrete log to :attr:`primitive` (-1 for zero)."""
        if self.has_tables:
            return int(self.log_table[a.encoding])
        if a.is_zero():
            return -1
        g = self.primitive
        x = self.one
        for n in range(self.q - 1):  # pragma: no cover - huge fields only
            if x == a:
                return n
            x = x * g
        raise FieldError("log not found")  # pragma: no cover

    def _require_tables(self) -> None:
        if not self.has_tables:
            raise FieldError(f"q = {self.q} exceeds the table limit {TABLE_LIMIT}")

    def nonsquare(self) -> FieldElem:
        """Smallest (by encoding) non-square."""
        for n in range(1, self.q):
            a = self.elem(n)
            if quad_char(self, a) == -1:
                return a
        raise FieldError("no non-square")  # pragma: no cover


@dataclass(frozen=True)
class FieldElem:
    spec: FieldSpec
    coords: tuple[int, ...]

    @property
    def encoding(self) -> int:
        return self.spec.encode(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _coerce(self, other) -> FieldElem:
        if isinstance(other, FieldElem):
            if other.spec != self.spec:
                raise FieldError("elements of different fields")
            return other
        if isinstance(other, (int, np.integer)):
            return self.spec.from_int(int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.spec.p
        return FieldElem(self.spec, tuple((a + b) % p for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self) -> FieldElem:
        p = self.spec.p
        return FieldElem(self.spec, tuple((-a) % p for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        s = self.spec
        prod = _pmod(_pmul(_trim(list(self.coords)), _trim(list(o.coords)), s.p), s.modulus, s.p)
        return FieldElem(s, tuple(prod) + (0,) * (s.k - len(prod)))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> FieldElem:
        s = self.spec
        if e < 0:
            if self.is_zero():
                raise ZeroDivisionError("zero has no inverse")
            e %= s.q - 1
        result = s.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> FieldElem:
        return self ** -1

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __repr__(self) -> str:
        return f"F{self.spec.q}{list(self.coords)}"


# ---------------------------------------------------------------------------
# public operations


@lru_cache(maxsize=None)
def field_make(p: int, k: int) -> FieldSpec:
    """F_{p^k} with the smallest monic irreducible modulus.

    Candidate moduli are enumerated by the integer whose base-p digits are
    the non-leading coefficients, lowest degree first; the first irreducible
    one wins, so the choice is reproducible.
    """
    if p == 2:
        raise FieldError("characteristic 2 is not supported")
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if not 1 <= k <= 6:
        raise FieldError(f"extension degree {k} outside 1..6")
    for n in range(p**k):
        coeffs = []
        m = n
        for _ in range(k):
            m, r = divmod(m, p)
            coeffs.append(r)
        modulus = tuple(coeffs) + (1,)
        if is_irreducible(modulus, p):
            return FieldSpec(p, k, modulus)
    raise FieldError("no irreducible polynomial found")  # pragma: no cover


def quad_char(spec: FieldSpec, a: FieldElem) -> int:
    """Quadratic character of ``a`` in F_q: 0, +1 or -1."""
    if a.is_zero():
        return 0
    if spec.has_tables:
        return int(spec.chi_table[a.encoding])
    return 1 if a ** ((spec.q - 1) // 2) == spec.one else -1


def frobenius(spec: FieldSpec, a: FieldElem) -> FieldElem:
    """The arithmetic Frobenius a -> a**p."""
    return a**spec.p
