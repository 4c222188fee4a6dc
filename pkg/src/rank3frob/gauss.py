"""Exact arithmetic over Z[i] and Q(i), with dense polynomials over Q(i).

Everything here is immutable and uses unbounded Python integers and
``fractions.Fraction``; there is deliberately no fixed-width fast path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union


class GaussError(ArithmeticError):
    pass


def _as_frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


# ---------------------------------------------------------------------------
# Gaussian integers and rationals


@dataclass(frozen=True)
class GaussInt:
    """re + im*i with integer parts."""

    re: int = 0
    im: int = 0

    def __post_init__(self):
        if not isinstance(self.re, int) or not isinstance(self.im, int):
            object.__setattr__(self, "re", int(self.re))
            object.__setattr__(self, "im", int(self.im))

    @staticmethod
    def coerce(x) -> "GaussInt":
        if isinstance(x, GaussInt):
            return x
        if isinstance(x, int):
            return GaussInt(x, 0)
        if isinstance(x, GaussRat):
            return x.to_int()
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return GaussInt(int(x[0]), int(x[1]))
        raise TypeError(f"cannot make a Gaussian integer from {x!r}")

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __add__(self, o):
        if isinstance(o, GaussRat):
            return GaussRat.coerce(self) + o
        o = _maybe_int(o)
        if o is NotImplemented:
            return o
        return GaussInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, GaussRat):
            return GaussRat.coerce(self) * o
        o = _maybe_int(o)
        if o is NotImplemented:
            return o
        return GaussInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        return GaussRat.coerce(self) / o

    def __rtruediv__(self, o):
        return GaussRat.coerce(o) / self

    def __pow__(self, e: int):
        if e < 0:
            return GaussRat.coerce(self) ** e
        out = GaussInt(1, 0)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, GaussInt):
            return self.re == o.re and self.im == o.im
        if isinstance(o, GaussRat):
            return o == self
        if isinstance(o, int):
            return self.im == 0 and self.re == o
        if isinstance(o, complex):
            return complex(self) == o
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __complex__(self):
        return complex(self.re, self.im)

    def divides(self, o: "GaussInt") -> bool:
        if self.is_zero():
            return o.is_zero()
        n = self.norm()
        q = o * self.conj()
        return q.re % n == 0 and q.im % n == 0

    def exact_div(self, o) -> "GaussInt":
        """self / o, which must be a Gaussian integer."""
        return (GaussRat.coerce(self) / o).to_int()

    def to_list(self) -> list[int]:
        return [self.re, self.im]

    def __str__(self):
        return _fmt(self.re, self.im)

    def __repr__(self):
        return f"GaussInt({self.re}, {self.im})"


def _maybe_int(o):
    if isinstance(o, GaussInt):
        return o
    if isinstance(o, int):
        return GaussInt(o, 0)
    return NotImplemented


def _fmt(re, im) -> str:
    if im == 0:
        return str(re)
    sign = "-" if im < 0 else "+"
    mag = abs(im)
    imag = "i" if mag == 1 else f"{mag}i"
    if re == 0:
        return ("-" if im < 0 else "") + imag
    return f"{re}{sign}{imag}"


@dataclass(frozen=True)
class GaussRat:
    """re + im*i with rational parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def coerce(x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, GaussInt):
            return GaussRat(Fraction(x.re), Fraction(x.im))
        if isinstance(x, (int, Fraction)):
            return GaussRat(Fraction(x), Fraction(0))
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return GaussRat(_as_frac(x[0]), _as_frac(x[1]))
        raise TypeError(f"cannot make a Gaussian rational from {x!r}")

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_integral(self) -> bool:
        return self.re.denominator == 1 and self.im.denominator == 1

    def to_int(self) -> GaussInt:
        if not self.is_integral():
            raise GaussError(f"{self} is not a Gaussian integer")
        return GaussInt(int(self.re), int(self.im))

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, o):
        o = _rat_or_ni(o)
        if o is NotImplemented:
            return o
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussRat.coerce(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = _rat_or_ni(o)
        if o is NotImplemented:
            return o
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRat":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * GaussRat.coerce(o).inverse()

    def __rtruediv__(self, o):
        return GaussRat.coerce(o) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = GaussRat(Fraction(1), Fraction(0))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, o):
        try:
            o = GaussRat.coerce(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.is_integral():
            return hash(self.to_int())
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        return _fmt(self.re, self.im)

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"


def _rat_or_ni(o):
    try:
        return GaussRat.coerce(o)
    except TypeError:
        return NotImplemented


Scalar = Union[int, Fraction, GaussInt, GaussRat]


def conj(z):
    """Complex conjugate of a Gaussian integer or rational."""
    return z.conj()


# ---------------------------------------------------------------------------
# univariate polynomials over Q(i)


class GaussPoly:
    """Dense polynomial over Q(i), coefficients lowest degree first.

    The zero polynomial has an empty coefficient tuple and degree
    :data:`GaussPoly.ZERO_DEGREE`.
    """

    __slots__ = ("coeffs",)

    ZERO_DEGREE = None

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [GaussRat.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple[GaussRat, ...] = tuple(cs)

    @classmethod
    def monomial(cls, c: Scalar, n: int) -> "GaussPoly":
        return cls([0] * n + [c])

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else self.ZERO_DEGREE

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> GaussRat:
        if not self.coeffs:
            raise GaussError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, n: int) -> GaussRat:
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else GaussRat.coerce(0)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.coeffs)

    def int_coeffs(self) -> list[GaussInt]:
        return [c.to_int() for c in self.coeffs]

    def conj(self) -> "GaussPoly":
        return GaussPoly(c.conj() for c in self.coeffs)

    def __add__(self, o):
        o = _poly(o)
        n = max(len(self.coeffs), len(o.coeffs))
        return GaussPoly(self.coeff(i) + o.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return GaussPoly(-c for c in self.coeffs)

    def __sub__(self, o):
        return self + (-_poly(o))

    def __rsub__(self, o):
        return _poly(o) - self

    def __mul__(self, o):
        o = _poly(o)
        if self.is_zero() or o.is_zero():
            return GaussPoly()
        out = [GaussRat.coerce(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return GaussPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = GaussPoly([1])
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, o):
        try:
            o = _poly(o)
        except TypeError:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = GaussRat.coerce(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose_scale(self, s: Scalar) -> "GaussPoly":
        """P(s*T)."""
        s = GaussRat.coerce(s)
        return GaussPoly(c * s**i for i, c in enumerate(self.coeffs))

    def derivative(self) -> "GaussPoly":
        return GaussPoly(c * i for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> "GaussPoly":
        lc = self.lead()
        return GaussPoly(c / lc for c in self.coeffs)

    def eval_complex(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def to_json(self) -> list:
        out = []
        for c in self.coeffs:
            if c.is_integral():
                out.append(c.to_int().to_list())
            else:
                out.append([str(c.re), str(c.im)])
        return out

    def __repr__(self):
        return f"GaussPoly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return self.render("T")

    def render(self, var: str = "T", ascending: bool = False) -> str:
        if not self.coeffs:
            return "0"
        order = range(len(self.coeffs)) if ascending else range(len(self.coeffs) - 1, -1, -1)
        parts = []
        for n in order:
            c = self.coeffs[n]
            if c.is_zero():
                continue
            mono = "" if n == 0 else (var if n == 1 else f"{var}^{n}")
            sign = "+"
            if c.im == 0:
                sign = "-" if c.re < 0 else "+"
                mag = abs(c.re)
                body = str(mag) if (mag != 1 or not mono) else ""
            elif c.re == 0:
                sign = "-" if c.im < 0 else "+"
                body = str(GaussRat(Fraction(0), abs(c.im)))
            else:
                if c.re < 0:
                    sign, c = "-", -c
                body = f"({c})"
            parts.append((sign, body + mono))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _poly(o) -> GaussPoly:
    if isinstance(o, GaussPoly):
        return o
    return GaussPoly([o])


def poly_divrem(dividend: GaussPoly, divisor: GaussPoly) -> tuple[GaussPoly, GaussPoly]:
    """Schoolbook division over Q(i): dividend = divisor*q + r, deg r < deg divisor."""
    if divisor.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    r = list(dividend.coeffs)
    d = len(divisor.coeffs) - 1
    inv = divisor.lead().inverse()
    if len(r) - 1 < d:
        return GaussPoly(), GaussPoly(r)
    q = [GaussRat.coerce(0)] * (len(r) - d)
    for n in range(len(r) - 1, d - 1, -1):
        c = r[n] * inv
        if c.is_zero():
            continue
        q[n - d] = c
        for j, b in enumerate(divisor.coeffs):
            r[n - d + j] = r[n - d + j] - c * b
    return GaussPoly(q), GaussPoly(r[:d])


def poly_gcd(a: GaussPoly, b: GaussPoly) -> GaussPoly:
    """Monic gcd over Q(i) (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, poly_divrem(a, b)[1]
    return a.monic() if not a.is_zero() else a


def squarefree_part(f: GaussPoly) -> GaussPoly:
    g = poly_gcd(f, f.derivative())
    if g.degree in (None, 0):
        return f.monic()
    return poly_divrem(f, g)[0].monic()


def discriminant_cubic(f: GaussPoly) -> GaussRat:
    """Discriminant of a cubic a3 T^3 + a2 T^2 + a1 T + a0."""
    if f.degree != 3:
        raise GaussError("not a cubic")
    d, c, b, a = f.coeffs
    return (
        b * b * c * c
        - 4 * a * c**3
        - 4 * b**3 * d
        - 27 * a * a * d * d
        + 18 * a * b * c * d
    )


def poly_expand_shaped(b, p: int) -> GaussPoly:
    """T^3 - b T^2 + p*conj(b) T - p^3."""
    if p == 2:
        raise GaussError("p = 2 is the bad prime")
    if p < 3 or p % 2 == 0:
        raise GaussError(f"{p} is not an odd prime")
    b = GaussInt.coerce(b)
    return GaussPoly([-(p**3), b.conj() * p, -b, 1])


# ---------------------------------------------------------------------------
# sparse bivariate integer polynomials


class BivarIntPoly:
    """Integer polynomial in x, y stored as {(i, j): coefficient}."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], int] | None = None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            c = int(c)
            if c:
                clean[(int(i), int(j))] = clean.get((int(i), int(j)), 0) + c
        self.terms: dict[tuple[int, int], int] = {k: v for k, v in clean.items() if v}

    @classmethod
    def x(cls):
        return cls({(1, 0): 1})

    @classmethod
    def y(cls):
        return cls({(0, 1): 1})

    @classmethod
    def const(cls, c: int):
        return cls({(0, 0): c})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, o):
        o = _bivar(o)
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
        return BivarIntPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return BivarIntPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, o):
        return self + (-_bivar(o))

    def __rsub__(self, o):
        return _bivar(o) - self

    def __mul__(self, o):
        o = _bivar(o)
        t: dict = {}
        for (i, j), a in self.terms.items():
            for (k, l), b in o.terms.items():
                t[(i + k, j + l)] = t.get((i + k, j + l), 0) + a * b
        return BivarIntPoly(t)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = BivarIntPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, o):
        if isinstance(o, BivarIntPoly):
            return self.terms == o.terms
        if isinstance(o, int):
            return self == BivarIntPoly.const(o)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def substitute_linear(self, ax: tuple[int, int], ay: tuple[int, int]) -> "BivarIntPoly":
        """f(x', y') where x' = ax[0]*x + ax[1]*y and y' = ay[0]*x + ay[1]*y."""
        X = BivarIntPoly({(1, 0): ax[0], (0, 1): ax[1]})
        Y = BivarIntPoly({(1, 0): ay[0], (0, 1): ay[1]})
        out = BivarIntPoly()
        for (i, j), c in self.terms.items():
            out = out + c * (X**i) * (Y**j)
        return out

    def evaluate(self, x, y, one=1):
        """Evaluate over any commutative ring; ``one`` is the ring's unit."""
        total = None
        for (i, j), c in sorted(self.terms.items()):
            term = one * c
            if i:
                term = term * x**i
            if j:
                term = term * y**j
            total = term if total is None else total + term
        return one * 0 if total is None else total

    @property
    def total_degree(self) -> int:
        return max((i + j for i, j in self.terms), default=0)

    def degree_in(self, var: int) -> int:
        return max((k[var] for k in self.terms), default=0)

    def __repr__(self):
        items = ", ".join(f"{k}: {v}" for k, v in sorted(self.terms.items()))
        return f"BivarIntPoly({{{items}}})"


def _bivar(o) -> BivarIntPoly:
    if isinstance(o, BivarIntPoly):
        return o
    if isinstance(o, int):
        return BivarIntPoly.const(o)
    raise TypeError(f"cannot combine BivarIntPoly with {o!r}")
