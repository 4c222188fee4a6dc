"""Local data at a good prime p: the shaped cubic and what it implies.

The Frobenius cubic is T^3 - b T^2 + p*conj(b) T - p^3 with b in Z[i].
This module builds it from the eigenspace trace a_p, checks its shape and
purity, counts its distinct roots in Q_2(i), finds roots of the form
(root of unity) * p, and renders the Euler factor.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .fields import is_prime
from .gauss import (
    GaussError,
    GaussInt,
    GaussPoly,
    GaussRat,
    poly_divrem,
    poly_expand_shaped,
    poly_gcd,
    squarefree_part,
)

CONVENTIONS = ("chi", "none")


class LocalError(ValueError):
    pass


class WeilBoundError(LocalError):
    pass


class RootFindingError(ArithmeticError):
    pass


class PrecisionExhausted(ArithmeticError):
    def __init__(self, required: int):
        self.required = required
        super().__init__(f"2-adic root analysis needs more than {required} valuation units")


def _odd_prime(p: int) -> None:
    if p == 2:
        raise LocalError("p = 2 is ramified")
    if p < 3 or not is_prime(p):
        raise LocalError(f"{p} is not an odd prime")


def chi_minus2(p: int) -> int:
    """Quadratic character of Q(sqrt(-2)): +1 iff -2 is a square mod p."""
    _odd_prime(p)
    return 1 if pow(-2 % p, (p - 1) // 2, p) == 1 else -1


def weil_ok(a: GaussInt, p: int) -> bool:
    return a.norm() <= 9 * p * p


def bp_from_ap(a, p: int, convention: str = "chi") -> GaussInt:
    """b_p from the eigenspace trace a_p under a twist convention.

    ``chi`` multiplies by chi_{-2}(p); ``none`` returns a_p unchanged.
    """
    a = GaussInt.coerce(a)
    _odd_prime(p)
    if not weil_ok(a, p):
        raise WeilBoundError(f"|{a}|^2 = {a.norm()} exceeds 9p^2 = {9 * p * p}")
    if convention == "chi":
        return a * chi_minus2(p)
    if convention == "none":
        return a
    raise LocalError(f"unknown convention {convention!r}")


# ---------------------------------------------------------------------------
# shape


@dataclass(frozen=True)
class ShapeResult:
    ok: bool
    b: GaussInt | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def shape_check(poly: GaussPoly, p: int) -> ShapeResult:
    """Is ``poly`` equal to T^3 - b T^2 + p*conj(b) T - p^3 for a Gaussian integer b?"""
    if poly.degree != 3 or not poly.is_monic():
        return ShapeResult(False, None, "not monic of degree 3")
    c0, c1, c2, _ = poly.coeffs
    if c0 != -(p**3):
        return ShapeResult(False, None, f"constant term is {c0}, expected {-(p ** 3)}")
    if not c2.is_integral():
        return ShapeResult(False, None, f"T^2 coefficient {c2} is not a Gaussian integer")
    b = (-c2).to_int()
    want = b.conj() * p
    if c1 != want:
        return ShapeResult(
            False, b, f"T coefficient is {c1} but the shape with b = {b} demands {want}"
        )
    return ShapeResult(True, b, "")


# ---------------------------------------------------------------------------
# purity


def _mp(c: GaussRat):
    return mpmath.mpc(mpmath.mpf(c.re.numerator) / c.re.denominator,
                      mpmath.mpf(c.im.numerator) / c.im.denominator)


def certified_roots(poly: GaussPoly, dps: int = 60):
    """Approximate complex roots of a squarefree polynomial with error radii.

    Each returned radius r bounds the distance to a true root via
    |z - root| <= deg * |f(z) / f'(z)|; the disks are checked to be pairwise
    disjoint, so every root is enclosed exactly once.
    """
    n = poly.degree
    if n is None or n < 1:
        return []
    with mpmath.workdps(dps):
        cs = [_mp(c) for c in reversed(poly.coeffs)]
        try:
            zs = mpmath.polyroots(cs, maxsteps=500, extraprec=2 * dps)
        except mpmath.libmp.libhyper.NoConvergence as exc:
            raise RootFindingError(str(exc)) from exc
        dcs = [_mp(c) for c in reversed(poly.derivative().coeffs)]
        out = []
        for z in zs:
            fz = mpmath.polyval(cs, z)
            dz = mpmath.polyval(dcs, z) if dcs else mpmath.mpc(0)
            if dz == 0:
                raise RootFindingError("derivative vanishes at an approximate root")
            out.append((complex(z), float(n * abs(fz / dz)), z))
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                if abs(out[i][2] - out[j][2]) <= out[i][1] + out[j][1]:
                    raise RootFindingError("root enclosures overlap")
    return [(z, r) for z, r, _ in out]


def is_pure(poly: GaussPoly, p: int, w: int = 2, tol: float = 1e-9) -> bool:
    """Every root has absolute value p^(w/2), up to a relative ``tol``.

    The constant term is checked exactly first: the product of the roots
    must have absolute value p^(deg*w/2).
    """
    if not poly.is_monic():
        raise LocalError("purity is defined here for monic polynomials")
    c0 = poly.coeff(0)
    if c0.is_zero():
        raise LocalError("constant term must be nonzero")
    n = poly.degree
    if c0.norm() != Fraction(p) ** (n * w):
        return False
    target = p ** (w / 2)
    for z, r in certified_roots(squarefree_part(poly)):
        if r >= tol * p:
            raise RootFindingError(f"root enclosure {r} is not below tol*p")
        if abs(abs(z) - target) + r >= tol * target:
            return False
    return True


# ---------------------------------------------------------------------------
# roots in Q_2(i)
#
# Z_2[i] has uniformizer pi = 1 + i, residue field F_2 and v(2) = 2.  A
# Gaussian integer is divisible by pi iff re + im is even, and its residue
# mod pi is (re + im) mod 2.


def v_pi(z: GaussInt) -> int | None:
    """pi-adic valuation, None for zero."""
    if z.is_zero():
        return None
    x, y, n = z.re, z.im, 0
    while (x + y) % 2 == 0:
        x, y = (x + y) // 2, (y - x) // 2
        n += 1
    return n


def _div_pi(z: GaussInt, times: int) -> GaussInt:
    x, y = z.re, z.im
    for _ in range(times):
        x, y = (x + y) // 2, (y - x) // 2
    return GaussInt(x, y)


_PI = GaussInt(1, 1)


def newton_polygon(coeffs: list[GaussInt]) -> list[tuple[int, int, Fraction]]:
    """Lower convex hull of (n, v(c_n)) as (start, end, slope) segments."""
    pts = [(n, v_pi(c)) for n, c in enumerate(coeffs) if not c.is_zero()]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return [
        (a[0], b[0], Fraction(b[1] - a[1], b[0] - a[0]))
        for a, b in zip(hull, hull[1:])
    ]


def _shift(coeffs: list[GaussInt], r: int) -> list[GaussInt]:
    """Coefficients of f(r + pi*U)."""
    n = len(coeffs)
    out = [GaussInt(0, 0)] * n
    # Horner on polynomials in U
    for c in reversed(coeffs):
        # out = out * (r + pi U) + c
        new = [GaussInt(0, 0)] * n
        for d, o in enumerate(out):
            if o.is_zero():
                continue
            new[d] = new[d] + o * r
            if d + 1 < n:
                new[d + 1] = new[d + 1] + o * _PI
        new[0] = new[0] + c
        out = new
    return out


def _residue(z: GaussInt) -> int:
    return (z.re + z.im) % 2


def _count_roots(coeffs: list[GaussInt], depth: int, cap: int) -> int:
    if depth > cap:
        raise PrecisionExhausted(cap)
    vals = [v_pi(c) for c in coeffs if not c.is_zero()]
    m = min(vals)
    coeffs = [_div_pi(c, m) if not c.is_zero() else c for c in coeffs]
    red = [_residue(c) for c in coeffs]
    if not any(red[1:]):
        return 0  # nonzero constant mod pi
    total = 0
    for r in (0, 1):
        fr = sum(red[n] * r**n for n in range(len(red))) % 2
        if fr:
            continue
        dr = sum(n * red[n] * r ** (n - 1) for n in range(1, len(red))) % 2
        if dr:
            total += 1  # simple root mod pi lifts uniquely
        else:
            total += _count_roots(_shift(coeffs, r), depth + 1, cap)
    return total


@dataclass(frozen=True)
class Q2iAnalysis:
    distinct_roots: int
    slopes: tuple[Fraction, ...]
    disc_valuation: int | None
    precision_used: int


def analyze_q2i(poly: GaussPoly, precision: int = 64, max_precision: int = 1 << 14) -> Q2iAnalysis:
    """Distinct roots of a monic Z[i]-polynomial in Q_2(i).

    Works on the squarefree part with exact arithmetic.  Roots exist only on
    Newton-polygon segments of integral slope; each residue class mod pi is
    then refined until the reduction has a simple root (Hensel) or none.
    ``precision`` caps the refinement depth in valuation units and doubles on
    exhaustion up to ``max_precision``.
    """
    if not poly.is_monic() or not poly.is_integral():
        raise LocalError("expected a monic polynomial with Gaussian-integer coefficients")
    sf = squarefree_part(poly)
    coeffs = sf.int_coeffs()
    segs = newton_polygon(coeffs)
    slopes = tuple(-s for _, _, s in segs)
    disc = _disc_valuation(sf)
    if not any(s.denominator == 1 for s in slopes) and coeffs[0] != 0:
        return Q2iAnalysis(0, slopes, disc, 0)
    cap = precision
    while True:
        try:
            n = _count_roots(coeffs, 0, cap)
            return Q2iAnalysis(n, slopes, disc, cap)
        except PrecisionExhausted:
            if cap >= max_precision:
                raise PrecisionExhausted(cap) from None
            cap *= 2


def _disc_valuation(f: GaussPoly) -> int | None:
    if f.degree is None or f.degree < 1:
        return None
    if f.degree == 1:
        return 0
    from .gauss import discriminant_cubic

    if f.degree == 3:
        d = discriminant_cubic(f)
    elif f.degree == 2:
        c, b, a = f.coeffs
        d = b * b - 4 * a * c
    else:
        return None
    return v_pi(d.to_int()) if d.is_integral() else None


def roots_in_Q2i(poly: GaussPoly) -> int:
    """Number of distinct roots of ``poly`` in Q_2(i)."""
    return analyze_q2i(poly).distinct_roots


# ---------------------------------------------------------------------------
# roots of the form zeta * p


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> GaussPoly:
    """The n-th cyclotomic polynomial (integer coefficients)."""
    f = GaussPoly([-1] + [0] * (n - 1) + [1])
    for d in range(1, n):
        if n % d == 0:
            f = poly_divrem(f, cyclotomic(d))[0]
    return f


@dataclass(frozen=True)
class UnitRoot:
    order: int
    root: complex
    exact: GaussInt | None = None

    def to_json(self):
        if self.exact is not None:
            return [self.order, self.exact.to_list()]
        return [self.order, [round(self.root.real, 12), round(self.root.imag, 12)]]


def unit_times_p_roots(poly: GaussPoly, p: int, max_order: int = 64) -> list[UnitRoot]:
    """Distinct roots zeta*p of ``poly`` with zeta of order at most ``max_order``.

    poly(p*T) is compared with each cyclotomic polynomial by an exact gcd over
    Q(i); the common factor's roots are then located among the primitive
    roots of unity.
    """
    h = poly.compose_scale(p)
    out: list[UnitRoot] = []
    for n in range(1, max_order + 1):
        g = poly_gcd(h, cyclotomic(n))
        if g.degree in (None, 0):
            continue
        for m in range(n):
            if math.gcd(m, n) != 1:
                continue
            z = cmath.exp(2j * math.pi * m / n)
            if abs(g.eval_complex(z)) > 1e-8:
                continue
            exact = None
            if n in (1, 2, 4):
                exact = GaussInt(round(z.real), round(z.imag)) * p
                if not g(exact / p).is_zero():  # pragma: no cover
                    raise ArithmeticError("inexact root of unity")
            out.append(UnitRoot(n, z * p, exact))
    return out


# ---------------------------------------------------------------------------
# cubic and Euler factor


@dataclass(frozen=True)
class FrobCubic:
    p: int
    b: GaussInt

    @property
    def poly(self) -> GaussPoly:
        return poly_expand_shaped(self.b, self.p)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return is_pure(self.poly, self.p, 2, tol)

    def roots_in_Q2i(self) -> int:
        return roots_in_Q2i(self.poly)


@dataclass(frozen=True)
class LocalFactor:
    """det(1 - X Frob) with X = p^-s; the local L-factor is its inverse."""

    p: int
    b: GaussInt

    @property
    def poly(self) -> GaussPoly:
        return GaussPoly([1, -self.b, self.b.conj() * self.p, -(self.p**3)])

    def __call__(self, X):
        return self.poly(X)

    def __str__(self):
        return self.poly.render("X", ascending=True)

    def render_l_factor(self) -> str:
        return f"L(s, pi_{self.p}) = ({self})^-1, X = {self.p}^-s"


def euler_factor(b, p: int) -> LocalFactor:
    b = GaussInt.coerce(b)
    _odd_prime(p)
    return LocalFactor(p, b)


def cubic_from_ap(a, p: int, convention: str = "chi") -> FrobCubic:
    return FrobCubic(p, bp_from_ap(a, p, convention))


__all__ = [
    "CONVENTIONS",
    "FrobCubic",
    "GaussError",
    "LocalFactor",
    "PrecisionExhausted",
    "Q2iAnalysis",
    "RootFindingError",
    "ShapeResult",
    "UnitRoot",
    "WeilBoundError",
    "analyze_q2i",
    "bp_from_ap",
    "certified_roots",
    "chi_minus2",
    "cubic_from_ap",
    "cyclotomic",
    "euler_factor",
    "is_pure",
    "newton_polygon",
    "roots_in_Q2i",
    "shape_check",
    "unit_times_p_roots",
]
