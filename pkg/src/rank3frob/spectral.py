"""Recover the eigenspace trace a_p from straight and twisted count series.

Model of the affine counts at degree k (q = p^k):

    straight  N_k = c + t*q^2 + q*G(k)  + 2 Re s_k       + e*E_k
    twisted   T_k = c' + t'*q^2 + q*G'(k) + sign*2 Im s_k + e'*E_k

* s_k is the k-th power sum of the three Frobenius eigenvalues on the
  phi*-eigenspace V+; they are the roots of
  T^3 - a T^2 + eps*p*conj(a) T - eps*p^3 with eps = chi_{-2}(p) (twist
  ``chi``) or eps = 1 (twist ``none``), and s_1 = a.
* G(k) = sum_{d | D} n_d c_d(k) collects classes with eigenvalues p*zeta,
  zeta of order d; c_d is the Ramanujan sum.  The cost sum phi(d)|n_d| is
  bounded by r_max.
* E_k is the trace of Frob^k on H^1 of the weight-one boundary curve
  s^2 = u^3 + A u^2 - u (A the family parameter); e, e' are its
  multiplicities.
* c, t - 1 and the elliptic multiplicities are small boundary corrections.

The V- eigenvalues are the complex conjugates of the V+ ones, which is why
the straight count sees 2 Re s_k and the twisted count, where phi* acts by
+i on V+ and -i on V-, sees -2 Im s_k.  Every (a, dictionary) pair that
reproduces all supplied counts exactly is a candidate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .counting import CountRecord, SurfaceModel, count_series
from .fields import is_prime
from .gauss import GaussInt
from .local import chi_minus2

KINDS = ("straight", "twisted")

#: The value of a_3 that fixes the orientation (phi* eigenvalue +i <-> +i).
ANCHOR_P = 3
ANCHOR_A3 = GaussInt(1, 2)


class SolverError(Exception):
    pass


class NoSolution(SolverError):
    pass


class CalibrationError(SolverError):
    pass


# ---------------------------------------------------------------------------
# small number theory helpers


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _mobius(n: int) -> int:
    out, m, d = 1, n, 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            out = -out
        d += 1
    return -out if m > 1 else out


def _phi(n: int) -> int:
    return sum(1 for m in range(1, n + 1) if math.gcd(m, n) == 1)


def ramanujan_sum(d: int, k: int) -> int:
    """Sum of zeta^k over primitive d-th roots of unity zeta."""
    g = math.gcd(d, k)
    return sum(_mobius(d // m) * m for m in _divisors(g))


def boundary_curve_traces(p: int, K: int, family_a: int = 2) -> list[int]:
    """[2, E_1, ..., E_K]: Frob^k traces on H^1 of s^2 = u^3 + A u^2 - u."""
    n = 0
    for u in range(p):
        v = (u * u * u + family_a * u * u - u) % p
        if v:
            n += 1 if pow(v, (p - 1) // 2, p) == 1 else -1
    e1 = -n
    out = [2, e1]
    for _ in range(2, K + 1):
        out.append(e1 * out[-1] - p * out[-2])
    return out[: K + 1]


def vplus_eps(p: int, twist: str) -> int:
    if twist == "chi":
        return chi_minus2(p)
    if twist == "none":
        return 1
    raise ValueError(f"unknown twist {twist!r}")


def power_sums(a: GaussInt, p: int, K: int, eps: int) -> list[GaussInt]:
    """[3, s_1, ..., s_K] for the V+ cubic with trace a."""
    e1 = a
    e2 = a.conj() * (eps * p)
    e3 = GaussInt(eps * p**3, 0)
    s = [GaussInt(3, 0)]
    for k in range(1, K + 1):
        if k == 1:
            s.append(e1)
        elif k == 2:
            s.append(e1 * s[1] - e2 * 2)
        elif k == 3:
            s.append(e1 * s[2] - e2 * s[1] + e3 * 3)
        else:
            s.append(e1 * s[k - 1] - e2 * s[k - 2] + e3 * s[k - 3])
    return s


# ---------------------------------------------------------------------------
# model types


@dataclass(frozen=True)
class SolverConfig:
    D: int = 8
    r_max: int = 24
    K: int | None = None
    boundary: int = 4
    top_shift: int = 1
    twist: str = "chi"
    family_a: int = 2
    pairing_sign: int = -1
    orientation: str = "calibrate"  # "calibrate", "raw" or "conjugate"

    def __post_init__(self):
        if self.D < 1 or self.r_max < 0 or self.boundary < 0 or self.top_shift < 0:
            raise ValueError("solver bounds must be non-negative (D >= 1)")
        if self.pairing_sign not in (1, -1):
            raise ValueError("pairing_sign must be +1 or -1")
        if self.orientation not in ("calibrate", "raw", "conjugate"):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        vplus_eps(3, self.twist)


@dataclass(frozen=True)
class Dictionary:
    """Non-transcendental part of one count series."""

    constant: int = 0
    top: int = 1
    elliptic: int = 0
    roots_of_unity: tuple[tuple[int, int], ...] = ()  # (order d, multiplicity n_d)

    def G(self, k: int) -> int:
        return sum(n * ramanujan_sum(d, k) for d, n in self.roots_of_unity)

    @property
    def rank(self) -> int:
        return sum(_phi(d) * abs(n) for d, n in self.roots_of_unity)

    def to_json(self) -> dict:
        return {
            "constant": self.constant,
            "top": self.top,
            "elliptic": self.elliptic,
            "roots_of_unity": [[d, n] for d, n in self.roots_of_unity],
        }


EMPTY = Dictionary(0, 0, 0, ())


@dataclass(frozen=True)
class SpectralModel:
    p: int
    a: GaussInt
    straight: Dictionary = EMPTY
    twisted: Dictionary = EMPTY
    sign: int = -1
    twist: str = "chi"
    family_a: int = 2
    D: int = 8
    r_max: int = 24

    def predict(self, kind: str, k: int) -> int:
        q = self.p**k
        s = power_sums(self.a, self.p, k, vplus_eps(self.p, self.twist))[k]
        E = boundary_curve_traces(self.p, k, self.family_a)[k]
        if kind == "straight":
            d, trans = self.straight, 2 * s.re
        elif kind == "twisted":
            d, trans = self.twisted, self.sign * 2 * s.im
        else:
            raise ValueError(kind)
        return d.constant + d.top * q * q + q * d.G(k) + trans + d.elliptic * E

    def counts(self, K: int) -> list[CountRecord]:
        return [
            CountRecord(self.p, k, kind, self.predict(kind, k))
            for k in range(1, K + 1)
            for kind in KINDS
        ]

    def to_json(self) -> dict:
        return {
            "a": self.a.to_list(),
            "straight": self.straight.to_json(),
            "twisted": self.twisted.to_json(),
        }


@dataclass(frozen=True)
class Candidate:
    a: GaussInt
    model: SpectralModel
    exact: bool = True
    bound_hit: bool = False

    def to_json(self) -> dict:
        out = self.model.to_json()
        out["exact"] = self.exact
        out["bound_hit"] = self.bound_hit
        return out


@dataclass(frozen=True)
class SpectralSolution:
    p: int
    K: int
    candidates: tuple[Candidate, ...]
    orientation: str = "raw"

    @property
    def unique(self) -> bool:
        return len(self.candidates) == 1

    @property
    def values(self) -> list[GaussInt]:
        return [c.a for c in self.candidates]

    @property
    def bound_hit(self) -> bool:
        return any(c.bound_hit for c in self.candidates)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "K": self.K,
            "unique": self.unique,
            "orientation": self.orientation,
            "candidates": [c.to_json() for c in self.candidates],
        }


# ---------------------------------------------------------------------------
# dictionary tables


@lru_cache(maxsize=64)
def _realizable(D: int, r_max: int, classes: tuple[int, ...]):
    """Cheapest (n_d) realizing each vector (G(g))_{g in classes}.

    Returns (sorted int keys, costs, n-vectors, radius) with keys encoding the
    vector in base 2*radius+1.
    """
    divs = _divisors(D)
    phis = [_phi(d) for d in divs]
    table = np.array([[ramanujan_sum(d, g) for d in divs] for g in classes], dtype=np.int64)
    best: dict = {}

    def rec(i, left, ns):
        if i == len(divs):
            vec = tuple(int(v) for v in table @ np.array(ns, dtype=np.int64)) if classes else ()
            cost = r_max - left
            cur = best.get(vec)
            if cur is None or (cost, tuple(ns)) < cur:
                best[vec] = (cost, tuple(ns))
            return
        m = left // phis[i]
        for n in range(-m, m + 1):
            rec(i + 1, left - phis[i] * abs(n), ns + [n])

    rec(0, r_max, [])
    radius = max([abs(v) for vec in best for v in vec] + [0])
    base = 2 * radius + 1
    keys = []
    for vec in best:
        key = 0
        for v in vec:
            key = key * base + (v + radius)
        keys.append(key)
    order = np.argsort(keys)
    vecs = list(best)
    keys_arr = np.array(keys, dtype=np.int64)[order]
    costs = np.array([best[vecs[i]][0] for i in order], dtype=np.int64)
    ns = [best[vecs[i]][1] for i in order]
    return keys_arr, costs, ns, radius, tuple(divs)


# ---------------------------------------------------------------------------
# the solver


def _gather(counts: Sequence[CountRecord], K: int | None):
    if not counts:
        raise SolverError("no counts supplied")
    ps = {c.p for c in counts}
    if len(ps) != 1:
        raise SolverError(f"counts mix primes {sorted(ps)}")
    p = ps.pop()
    if p == 2 or not is_prime(p):
        raise SolverError(f"{p} is not an odd prime")
    table = {(c.kind, c.k): c.count for c in counts}
    have = 0
    while all((kind, have + 1) in table for kind in KINDS):
        have += 1
    if have == 0:
        raise SolverError("need straight and twisted counts for k = 1")
    if K is None:
        K = have
    if K < 1 or K > have:
        raise SolverError(f"K = {K} but complete records exist only for k <= {have}")
    return p, K, table


def _grid(p: int):
    R = 3 * p
    xs = np.arange(-R, R + 1, dtype=np.int64)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    m = X * X + Y * Y <= 9 * p * p
    return X[m], Y[m]


def _power_sum_arrays(re, im, p, K, eps, dtype):
    re = re.astype(dtype)
    im = im.astype(dtype)
    e2r, e2i = eps * p * re, -eps * p * im
    e3 = eps * p**3
    S = [(np.full_like(re, 3), np.zeros_like(re)), (re, im)]

    def cm(a, b):
        return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]

    for k in range(2, K + 1):
        if k == 2:
            S.append((re * re - im * im - 2 * e2r, 2 * re * im - 2 * e2i))
            continue
        t1 = cm((re, im), S[k - 1])
        t2 = cm((e2r, e2i), S[k - 2])
        if k == 3:
            S.append((t1[0] - t2[0] + 3 * e3, t1[1] - t2[1]))
        else:
            s3 = S[k - 3]
            S.append((t1[0] - t2[0] + e3 * s3[0], t1[1] - t2[1] + e3 * s3[1]))
    return S


def _fit_side(obs, trans, p, K, E, cfg: SolverConfig, classes, cls_of_k):
    """Feasibility mask and cheapest dictionary per grid point for one series."""
    keys, costs, ns, radius, divs = _realizable(cfg.D, cfg.r_max, classes)
    base = 2 * radius + 1
    n = len(trans[1])
    best = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    choice = np.full((n, 4), 0, dtype=np.int64)  # c, t, e, key index
    B = cfg.boundary
    for c, t, e in itertools.product(
        range(-B, B + 1), range(1 - cfg.top_shift, 1 + cfg.top_shift + 1), range(-B, B + 1)
    ):
        ok = np.ones(n, dtype=bool)
        G = {}
        for k in range(1, K + 1):
            q = p**k
            x = obs[k] - trans[k] - (c + t * q * q + e * E[k])
            ok &= (x % q == 0).astype(bool)
            g = x // q
            cls = cls_of_k[k]
            if cls in G:
                ok &= (G[cls] == g).astype(bool)
            else:
                G[cls] = g
        if not ok.any():
            continue
        key = np.zeros(n, dtype=np.int64)
        for cls in classes:
            g = G[cls]
            inside = (np.abs(g) <= radius).astype(bool)
            ok &= inside
            key = key * base + np.where(inside, g, 0).astype(np.int64) + radius
        idx = np.searchsorted(keys, key)
        idx_c = np.minimum(idx, len(keys) - 1)
        ok &= keys[idx_c] == key
        if not ok.any():
            continue
        score = costs[idx_c] + abs(c) + abs(t - 1) + abs(e)
        better = ok & (score < best)
        best[better] = score[better]
        choice[better] = np.array([c, t, e, 0])
        choice[better, 3] = idx_c[better]
    feasible = best < np.iinfo(np.int64).max
    return feasible, choice, ns, costs, divs


def _dict_from(choice_row, ns, costs, divs, cfg: SolverConfig):
    c, t, e, ki = (int(v) for v in choice_row)
    nvec = ns[ki]
    rou = tuple((d, n) for d, n in zip(divs, nvec) if n)
    d = Dictionary(c, t, e, rou)
    hit = (
        abs(c) == cfg.boundary
        or abs(e) == cfg.boundary
        or abs(t - 1) == cfg.top_shift and cfg.top_shift > 0
        or int(costs[ki]) == cfg.r_max
    )
    return d, hit


def solve_raw(counts: Sequence[CountRecord], config: SolverConfig, sign: int) -> SpectralSolution:
    """Exact fits with a given twisted pairing sign and no calibration."""
    p, K, table = _gather(counts, config.K)
    eps = vplus_eps(p, config.twist)
    E = boundary_curve_traces(p, K, config.family_a)
    re, im = _grid(p)
    big = 3 * p ** (2 * K) + 27 * p ** (K + 1) > 2**62
    dtype = object if big else np.int64
    S = _power_sum_arrays(re, im, p, K, eps, dtype)
    classes = tuple(sorted({math.gcd(k, config.D) for k in range(1, K + 1)}))
    cls_of_k = {k: math.gcd(k, config.D) for k in range(1, K + 1)}
    sides = {}
    for kind in KINDS:
        obs = {k: table[(kind, k)] for k in range(1, K + 1)}
        if kind == "straight":
            trans = {k: 2 * S[k][0] for k in range(1, K + 1)}
        else:
            trans = {k: sign * 2 * S[k][1] for k in range(1, K + 1)}
        sides[kind] = _fit_side(obs, trans, p, K, E, config, classes, cls_of_k)
    both = sides["straight"][0] & sides["twisted"][0]
    idx = np.nonzero(both)[0]
    cands = []
    for i in sorted(idx, key=lambda j: (int(re[j]), int(im[j]))):
        a = GaussInt(int(re[i]), int(im[i]))
        dicts, hits = [], []
        for kind in KINDS:
            _, choice, ns, costs, divs = sides[kind]
            d, h = _dict_from(choice[i], ns, costs, divs, config)
            dicts.append(d)
            hits.append(h)
        model = SpectralModel(
            p, a, dicts[0], dicts[1], sign, config.twist, config.family_a, config.D, config.r_max
        )
        cand = Candidate(a, model, True, any(hits))
        if not forward_check(cand, [c for c in counts if c.k <= K]):
            raise SolverError(f"internal: candidate {a} does not reproduce its counts")
        cands.append(cand)
    if not cands:
        raise NoSolution(f"no (a, dictionary) reproduces the counts at p = {p}, K = {K}")
    return SpectralSolution(p, K, tuple(cands), "raw")


def forward_check(candidate: Candidate, counts: Iterable[CountRecord]) -> bool:
    """True iff the candidate's model predicts every supplied count exactly."""
    m = candidate.model
    for c in counts:
        if c.p != m.p or m.predict(c.kind, c.k) != c.count:
            return False
    return True


# ---------------------------------------------------------------------------
# orientation


def _conjugated(sol: SpectralSolution) -> SpectralSolution:
    out = []
    for c in sol.candidates:
        m = replace(c.model, a=c.a.conj(), sign=-c.model.sign)
        out.append(Candidate(c.a.conj(), m, c.exact, c.bound_hit))
    out.sort(key=lambda c: (c.a.re, c.a.im))
    return SpectralSolution(sol.p, sol.K, tuple(out), "conjugate")


@lru_cache(maxsize=8)
def calibrate(config: SolverConfig = SolverConfig(), max_K: int = 4) -> str:
    """'raw' or 'conjugate': whichever makes the p = 3 anchor equal 1+2i."""
    base = replace(config, K=None, orientation="raw")
    model = SurfaceModel(a=config.family_a)
    for K in range(1, max_K + 1):
        counts = count_series(model, ANCHOR_P, K)
        sol = solve_raw(counts, base, config.pairing_sign)
        if sol.unique:
            a = sol.candidates[0].a
            if a == ANCHOR_A3:
                return "raw"
            if a == ANCHOR_A3.conj():
                return "conjugate"
            raise CalibrationError(f"p = 3 anchor fit {a} is neither 1+2i nor 1-2i")
    raise CalibrationError(f"p = 3 anchor is still ambiguous at K = {max_K}")


def orientation_of(config: SolverConfig) -> str:
    if config.orientation == "calibrate":
        return calibrate(replace(config, K=None))
    return config.orientation


def solve_ap(counts: Sequence[CountRecord], config: SolverConfig = SolverConfig()) -> SpectralSolution:
    """All Gaussian integers a (with dictionaries) that fit the counts exactly.

    Candidates are ordered by (Re a, Im a).  Raises :class:`NoSolution` when
    nothing fits; ambiguity is reported through ``unique``.
    """
    sol = solve_raw(counts, config, config.pairing_sign)
    if orientation_of(config) == "conjugate":
        return _conjugated(sol)
    return sol


def effective_sign(config: SolverConfig) -> int:
    """Twisted pairing sign of the models returned by :func:`solve_ap`."""
    return -config.pairing_sign if orientation_of(config) == "conjugate" else config.pairing_sign


def random_model(rng, p: int, config: SolverConfig = SolverConfig(), sign: int | None = None) -> SpectralModel:
    """A random model within the solver's bounds (for round-trip tests)."""
    while True:
        a = GaussInt(int(rng.integers(-3 * p, 3 * p + 1)), int(rng.integers(-3 * p, 3 * p + 1)))
        if a.norm() <= 9 * p * p:
            break
    divs = _divisors(config.D)

    def rand_dict():
        left = int(rng.integers(0, config.r_max + 1))
        rou = []
        for d in divs:
            m = left // _phi(d)
            n = int(rng.integers(-m, m + 1)) if m else 0
            left -= _phi(d) * abs(n)
            if n:
                rou.append((d, n))
        B = config.boundary
        return Dictionary(
            int(rng.integers(-B, B + 1)),
            int(rng.integers(1 - config.top_shift, 1 + config.top_shift + 1)),
            int(rng.integers(-B, B + 1)),
            tuple(rou),
        )

    s = config.pairing_sign if sign is None else sign
    return SpectralModel(
        p, a, rand_dict(), rand_dict(), s, config.twist, config.family_a, config.D, config.r_max
    )
