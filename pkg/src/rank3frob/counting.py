"""Straight and automorphism-twisted point counts of t^2 = f(x, y).

For q = p^k the straight count is

    N = #{(x, y, t) in F_q^3 : t^2 = f(x, y)} = q^2 + sum_{x,y} chi(f(x, y)).

The twisted count is the number of points P with Frob_q(P) = phi(P), where
phi(x, y, t) = (y, -x, t).  Such points have y = x^q and x^(q^2) = -x, so x
lives in F_{q^4}.  Writing g for a non-square of F_{q^2} and w for a square
root of g, those x are exactly c*w with c in F_{q^2}, and then
y = conj(c) * h * w with h = g^((q-1)/2).  Because every monomial of f has
i = j (mod 2), f(x, y) = sum a_ij h^j g^((i+j)/2) c^i conj(c)^j lies in
F_{q^2}; phi-invariance puts it in F_q.  With F_{q^2} = F_q(theta),
theta^2 = n, c = c0 + c1*theta, the sum becomes A(c0, c1) + B(c0, c1)*theta
for polynomials A, B over F_q.  The kernel sums chi(A) and checks B = 0
cell by cell.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from . import _kernels
from .fields import FieldElem, FieldError, FieldSpec, field_make, is_prime, quad_char
from .gauss import BivarIntPoly

#: Default cap on character evaluations per record.
DEFAULT_BUDGET = 1 << 36

AUTOMORPHISMS = {
    # name -> (image of x, image of y) as integer linear forms in (x, y)
    "rotation": ((0, 1), (-1, 0)),
    "identity": ((1, 0), (0, 1)),
    "swap": ((0, 1), (1, 0)),
}


class CountingError(Exception):
    pass


class BadPrime(CountingError, ValueError):
    pass


class BudgetExceeded(CountingError):
    def __init__(self, cells: int, budget: int, p: int, k: int, kind: str):
        self.cells = cells
        self.budget = budget
        self.p, self.k, self.kind = p, k, kind
        super().__init__(
            f"{kind} count over F_{p}^{k} needs {cells} character evaluations "
            f"(budget {budget})"
        )


class InvarianceViolation(CountingError):
    pass


class SeriesError(CountingError):
    """A count series stopped at its first infeasible record."""

    def __init__(self, records, k: int, kind: str, cause: Exception):
        self.records = list(records)
        self.k = k
        self.kind = kind
        self.cause = cause
        super().__init__(f"series stopped at k={k} ({kind}): {cause}")


def branch_polynomial(a: int = 2) -> BivarIntPoly:
    """xy(x^2 - 1)(y^2 - 1)(x^2 - y^2 + a*xy)."""
    x, y = BivarIntPoly.x(), BivarIntPoly.y()
    return x * y * (x**2 - 1) * (y**2 - 1) * (x**2 - y**2 + a * x * y)


@dataclass(frozen=True)
class SurfaceModel:
    """The double cover t^2 = f(x, y) together with an automorphism of (x, y).

    ``f`` defaults to the branch polynomial with parameter ``a``.  The
    automorphism must preserve f; this is checked at construction unless
    ``validate`` is false (useful only for negative tests).
    """

    a: int = 2
    automorphism: str = "rotation"
    f: BivarIntPoly | None = None
    validate: bool = True
    bad_primes: tuple[int, ...] = (2,)
    poly: BivarIntPoly = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.automorphism not in AUTOMORPHISMS:
            raise ValueError(f"unknown automorphism {self.automorphism!r}")
        poly = self.f if self.f is not None else branch_polynomial(self.a)
        object.__setattr__(self, "poly", poly)
        if self.validate and not self.is_invariant():
            raise InvarianceViolation(
                f"f is not invariant under the {self.automorphism} map"
            )

    @property
    def linear_map(self):
        return AUTOMORPHISMS[self.automorphism]

    def pulled_back(self) -> BivarIntPoly:
        """f composed with the coordinate map."""
        ax, ay = self.linear_map
        return self.poly.substitute_linear(ax, ay)

    def is_invariant(self) -> bool:
        return self.pulled_back() == self.poly

    def automorphism_order(self) -> int:
        m = np.array(self.linear_map, dtype=np.int64)
        acc = np.eye(2, dtype=np.int64)
        for n in range(1, 13):
            acc = m @ acc
            if (acc == np.eye(2, dtype=np.int64)).all():
                return n
        raise ValueError("automorphism has no small finite order")  # pragma: no cover


@dataclass(frozen=True)
class CountRecord:
    p: int
    k: int
    kind: str
    count: int
    elapsed: float = field(default=0.0, compare=False)

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def char_sum(self) -> int:
        """count - q^2."""
        return self.count - self.q**2

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "kind": self.kind,
            "count": self.count,
            "elapsed_s": round(self.elapsed, 6),
        }


# ---------------------------------------------------------------------------
# the quadratic extension F_q(theta) used by the twisted count


@dataclass(frozen=True)
class TwistFrame:
    """F_{q^2} = F_q(theta) with theta^2 = n, and the non-square g of F_{q^2}.

    Elements of F_{q^2} are pairs (u0, u1) meaning u0 + u1*theta.
    """

    spec: FieldSpec
    n: FieldElem
    g: tuple[FieldElem, FieldElem]
    h: tuple[FieldElem, FieldElem]

    def mul(self, u, v):
        return (u[0] * v[0] + self.n * u[1] * v[1], u[0] * v[1] + u[1] * v[0])

    def pow(self, u, e: int):
        out = (self.spec.one, self.spec.zero)
        while e:
            if e & 1:
                out = self.mul(out, u)
            u = self.mul(u, u)
            e >>= 1
        return out


def twist_frame(spec: FieldSpec) -> TwistFrame:
    n = spec.nonsquare()
    q = spec.q
    # g = t + theta has norm t^2 - n; it is a non-square of F_{q^2} exactly
    # when that norm is a non-square of F_q.
    for e in range(q):
        t = spec.elem(e)
        if quad_char(spec, t * t - n) == -1:
            g = (t, spec.one)
            break
    else:  # pragma: no cover
        raise FieldError("no non-square in F_{q^2}")
    frame = TwistFrame(spec, n, g, (spec.one, spec.zero))
    h = frame.pow(g, (q - 1) // 2)
    return TwistFrame(spec, n, g, h)


# ---------------------------------------------------------------------------
# kernel inputs


def _rows_from(spec: FieldSpec, coeffs: dict) -> list:
    """{(i, j): FieldElem} -> kernel rows indexed by j."""
    if not coeffs:
        return [[(0, -1)]]
    J = max(j for _, j in coeffs)
    rows: list[list] = [[] for _ in range(J + 1)]
    for (i, j), c in sorted(coeffs.items()):
        if not c.is_zero():
            rows[j].append((i, spec.log(c)))
    for r in rows:
        if not r:
            r.append((0, -1))
    while len(rows) > 1 and rows[-1] == [(0, -1)]:
        rows.pop()
    return rows


def straight_rows(model: SurfaceModel, spec: FieldSpec) -> list:
    coeffs = {}
    for (i, j), a in model.poly.terms.items():
        coeffs[(i, j)] = spec.from_int(a)
    return _rows_from(spec, coeffs)


def twisted_polys(model: SurfaceModel, spec: FieldSpec, frame: TwistFrame | None = None):
    """Coefficient maps of A and B in f(x, x^q) = A(c0, c1) + B(c0, c1)*theta."""
    fr = frame or twist_frame(spec)
    zero = spec.zero
    A: dict = {}
    B: dict = {}
    for (i, j), a in sorted(model.poly.terms.items()):
        if (i + j) % 2:
            raise InvarianceViolation(
                f"monomial x^{i} y^{j} has odd total degree; f(x, x^q) leaves F_q^2"
            )
        b = fr.mul(fr.pow(fr.h, j), fr.pow(fr.g, (i + j) // 2))
        b = (b[0] * a, b[1] * a)
        # (c0 + c1 theta)^i (c0 - c1 theta)^j
        for r in range(i + 1):
            for s in range(j + 1):
                m = r + s
                kappa = comb(i, r) * comb(j, s) * (-1) ** s
                sc = spec.from_int(kappa) * fr.n ** (m // 2)
                if m % 2 == 0:
                    u0, u1 = b[0] * sc, b[1] * sc
                else:
                    u0, u1 = b[1] * fr.n * sc, b[0] * sc
                key = (i - r + j - s, m)
                A[key] = A.get(key, zero) + u0
                B[key] = B.get(key, zero) + u1
    return A, B


def twisted_rows(model: SurfaceModel, spec: FieldSpec, frame: TwistFrame | None = None):
    A, B = twisted_polys(model, spec, frame)
    return _rows_from(spec, A), _rows_from(spec, B)


# ---------------------------------------------------------------------------
# execution


def _check_prime(model: SurfaceModel, p: int) -> None:
    if p in model.bad_primes:
        raise BadPrime(f"p = {p} is a bad prime for this model")
    if not is_prime(p) or p % 2 == 0:
        raise BadPrime(f"{p} is not an odd prime")


def default_workers() -> int:
    env = os.environ.get("RANK3FROB_WORKERS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


_WORKER_STATE: dict = {}


def _worker_init(zech, q, rows_a, rows_b, backend):
    _WORKER_STATE.update(zech=zech, q=q, rows_a=rows_a, rows_b=rows_b, backend=backend)


def _worker_chunk(bounds):
    s = _WORKER_STATE
    return _kernels.char_sum(
        s["zech"], s["q"], s["rows_a"], s["rows_b"], bounds[0], bounds[1],
        backend=s["backend"],
    )


def _chunks(q: int, workers: int, chunk: int | None) -> list[tuple[int, int]]:
    size = chunk or max(1, q // (4 * workers))
    return [(lo, min(lo + size, q - 1)) for lo in range(-1, q - 1, size)]


def run_char_sum(spec, rows_a, rows_b, workers=None, chunk=None, backend=None):
    """Exact chi-sum over all cells, optionally split across processes."""
    q = spec.q
    zech = spec.zech_table
    workers = workers or default_workers()
    if workers <= 1:
        return _kernels.char_sum(zech, q, rows_a, rows_b, -1, q - 1, backend=backend)
    parts = _chunks(q, workers, chunk)
    with ProcessPoolExecutor(
        max_workers=workers,
        initializer=_worker_init,
        initargs=(zech, q, rows_a, rows_b, backend),
    ) as ex:
        results = list(ex.map(_worker_chunk, parts))
    return sum(r[0] for r in results), sum(r[1] for r in results)


def _guard(model, p, k, kind, budget):
    _check_prime(model, p)
    if not 1 <= k <= 6:
        raise ValueError(f"degree k={k} outside 1..6")
    cells = p ** (2 * k)
    if cells > budget:
        raise BudgetExceeded(cells, budget, p, k, kind)


def count_straight(
    model: SurfaceModel,
    p: int,
    k: int,
    *,
    workers: int | None = None,
    budget: int = DEFAULT_BUDGET,
    chunk: int | None = None,
    backend: str | None = None,
) -> CountRecord:
    _guard(model, p, k, "straight", budget)
    t0 = time.perf_counter()
    spec = field_make(p, k)
    total, _ = run_char_sum(spec, straight_rows(model, spec), [], workers, chunk, backend)
    return CountRecord(p, k, "straight", spec.q**2 + total, time.perf_counter() - t0)


def count_twisted(
    model: SurfaceModel,
    p: int,
    k: int,
    *,
    workers: int | None = None,
    budget: int = DEFAULT_BUDGET,
    chunk: int | None = None,
    backend: str | None = None,
) -> CountRecord:
    _guard(model, p, k, "twisted", budget)
    t0 = time.perf_counter()
    spec = field_make(p, k)
    if model.automorphism == "identity":
        rows_a, rows_b = straight_rows(model, spec), []
    elif model.automorphism == "rotation":
        rows_a, rows_b = twisted_rows(model, spec)
    else:
        raise InvarianceViolation(
            f"twisted counts are implemented for the rotation only, not {model.automorphism!r}"
        )
    total, bad = run_char_sum(spec, rows_a, rows_b, workers, chunk, backend)
    if bad:
        raise InvarianceViolation(
            f"f(x, x^q) left F_q at {bad} points over F_{p}^{k}: the model is not invariant"
        )
    return CountRecord(p, k, "twisted", spec.q**2 + total, time.perf_counter() - t0)


def count_series(model: SurfaceModel, p: int, K: int, **kw) -> list[CountRecord]:
    """Straight and twisted records for k = 1..K, in that order per k."""
    out: list[CountRecord] = []
    for k in range(1, K + 1):
        for kind, fn in (("straight", count_straight), ("twisted", count_twisted)):
            try:
                out.append(fn(model, p, k, **kw))
            except (BudgetExceeded, FieldError) as exc:
                raise SeriesError(out, k, kind, exc) from exc
    return out


# ---------------------------------------------------------------------------
# per-cell evaluation for spot checks


def cell_characters(model: SurfaceModel, p: int, k: int, kind: str, cells: Sequence) -> np.ndarray:
    """chi of the summand at individual cells, through the log-domain path.

    ``cells`` are pairs of field encodings: (x, y) for straight counts and
    (c0, c1) with c = c0 + c1*theta for twisted ones.  For twisted cells the
    B-part is also checked to vanish.
    """
    spec = field_make(p, k)
    log = spec.log_table
    xs = log[np.array([c[0] for c in cells], dtype=np.int64)]
    ys = log[np.array([c[1] for c in cells], dtype=np.int64)]
    if kind == "straight":
        rows_a, rows_b = straight_rows(model, spec), []
    else:
        rows_a, rows_b = twisted_rows(model, spec)
    zech = spec.zech_table
    va = _kernels.python.cell_logs(zech, spec.q, rows_a, xs, ys)
    if rows_b:
        vb = _kernels.python.cell_logs(zech, spec.q, rows_b, xs, ys)
        if (vb >= 0).any():
            raise InvarianceViolation("f(x, x^q) left F_q at a sampled cell")
    return np.where(va < 0, 0, 1 - 2 * (va & 1))
