"""End-to-end acceptance checks, one test per criterion.

Each test stores a one-line summary on its node; ``conftest.py`` prints a
PASS/FAIL line per criterion at the end of the run.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from oracles import naive_straight, naive_twisted
from rank3frob.comparison import Distinct, Equivalent, distinct_root_census, grenie_compare, hypothesis_ledger
from rank3frob.counting import SurfaceModel, branch_polynomial, count_straight, count_twisted
from rank3frob.fields import primes_in
from rank3frob.gauss import GaussInt, GaussPoly, poly_divrem, poly_expand_shaped
from rank3frob.hecke import DISTINCT_ROOT_PRIMES, geometric_declarations, parse_hecke, serialize_hecke
from rank3frob.local import FrobCubic, is_pure, shape_check, unit_times_p_roots
from rank3frob.comparison import table_from_bs
from rank3frob.pipeline import CountCache, resolve_prime
from rank3frob.spectral import SolverConfig, random_model, solve_ap

RANGE = (3, 67)
CONVENTION = "chi"


def note(request, text):
    request.node.criterion_detail = text


@pytest.fixture(scope="module")
def census_run():
    cache = CountCache()
    t0 = time.perf_counter()
    rs = {p: resolve_prime(p, convention=CONVENTION, cache=cache) for p in primes_in(*RANGE)}
    return rs, time.perf_counter() - t0


def _resolved_table(rs):
    bs = {p: r.b(CONVENTION) for p, r in rs.items() if r.status == "resolved"}
    return geometric_declarations(table_from_bs(bs))


@pytest.mark.criterion(1)
def test_criterion_1_anchor_p3(request):
    t0 = time.perf_counter()
    r = resolve_prime(3, convention=CONVENTION, cache=CountCache())
    elapsed = time.perf_counter() - t0
    b = r.b(CONVENTION)
    note(request, f"b_3 = {b}, {elapsed:.1f}s")
    assert r.status == "resolved" and b == GaussInt(1, 2)
    T = GaussPoly([0, 1])
    lin = T - GaussInt(0, 3)
    quad = T * T - GaussInt(1, -1) * T - GaussInt(0, 9)
    q, rem = poly_divrem(poly_expand_shaped(b, 3), lin)
    assert rem.is_zero() and q == quad
    assert elapsed < 10


@pytest.mark.criterion(2)
def test_criterion_2_anchor_p11(request):
    t0 = time.perf_counter()
    r = resolve_prime(11, convention=CONVENTION, cache=CountCache())
    elapsed = time.perf_counter() - t0
    readings = {GaussInt(-7, -10), GaussInt(-7, 10)}
    bs = [r.b(CONVENTION)] if r.status == "resolved" else []
    note(request, f"survivor b_11 = {', '.join(map(str, bs)) or 'none'}, K = {r.K}, {elapsed:.1f}s")
    assert r.status == "resolved" and len(r.survivors) == 1
    assert set(bs) <= readings
    c = GaussInt(7, 10)
    displayed = GaussPoly([-(11**3), -11 * c, c, 1])
    assert not shape_check(displayed, 11)
    cub = FrobCubic(11, bs[0]).poly
    assert shape_check(cub, 11) and is_pure(cub, 11)
    assert elapsed < 30


@pytest.mark.criterion(3)
def test_criterion_3_distinct_root_census(request, census_run):
    rs, elapsed = census_run
    resolved = {p for p, r in rs.items() if r.status == "resolved"}
    cen = distinct_root_census(_resolved_table(rs), *RANGE)
    want = set(DISTINCT_ROOT_PRIMES) & resolved
    got = set(cen.primes)
    note(
        request,
        f"computed {sorted(got)}, listed {sorted(want)}, "
        f"{len(resolved)}/{len(rs)} resolved, {elapsed:.0f}s",
    )
    assert {3, 11} <= resolved and {3, 11} <= got
    assert elapsed < 600
    assert got == want, (
        f"census mismatch: computed {sorted(got)} but the list has {sorted(want)}; "
        f"p = 61 has b = {rs[61].b(CONVENTION)} whose cubic has "
        f"{cen.counts.get(61)} root(s) in Q2(i)"
    )


@pytest.mark.criterion(4)
def test_criterion_4_purity(request, census_run):
    rs, _ = census_run
    cubics = {p: r.cubic(CONVENTION) for p, r in rs.items() if r.status == "resolved"}
    failures = [p for p, c in cubics.items() if not is_pure(c.poly, p, 2, 1e-9)]
    note(request, f"{len(cubics) - len(failures)}/{len(cubics)} pure")
    assert len(cubics) == len(rs)
    assert failures == []


@pytest.mark.criterion(5)
def test_criterion_5_cuspidality_witness(request, census_run):
    rs, _ = census_run
    r5 = unit_times_p_roots(rs[5].cubic(CONVENTION).poly, 5, 64)
    r3 = unit_times_p_roots(rs[3].cubic(CONVENTION).poly, 3, 64)
    note(request, f"p=5: {len(r5)} roots, p=3: {[str(u.exact) for u in r3]}")
    assert r5 == []
    assert [u.exact for u in r3] == [GaussInt(0, 3)]


@pytest.mark.criterion(6)
def test_criterion_6_grenie(request, census_run):
    rs, _ = census_run
    computed = _resolved_table(rs)
    designated = (5, 7, 11, 17, 23, 31)
    header = "level=128 convention=chi semisimple=yes irreducible=yes ramification=2 field=Q2(i)\n"
    body = "".join(
        f"{p}\t{computed[p].b.re}\t{computed[p].b.im}\n" for p in designated
    )
    user = parse_hecke(header + body)
    assert grenie_compare(computed, user) == Equivalent()
    witnesses = []
    for p in designated:
        for delta in (GaussInt(1, 0), GaussInt(0, -1), GaussInt(2, 3)):
            b = computed[p].b + delta
            if b.norm() > 9 * p * p:
                continue
            v = grenie_compare(computed, user.with_b(p, b))
            assert v == Distinct(p)
            assert grenie_compare(user.with_b(p, b), computed) == Distinct(p)
        witnesses.append(p)
    led = hypothesis_ledger(computed)
    status = {i.name: i.status for i in led.items}
    note(request, f"Equivalent; witnesses {witnesses}; ledger {status}")
    assert witnesses == list(designated)
    assert status["irreducible"] == "declared"
    assert status["ramification"] == "declared"
    assert led.ok
    assert parse_hecke(serialize_hecke(user)) == user


@pytest.mark.criterion(7)
def test_criterion_7_oracle_equivalence(request):
    t0 = time.perf_counter()
    m = SurfaceModel()
    rows = []
    for p in (3, 5, 7):
        for k in (1, 2):
            s, t = count_straight(m, p, k).count, count_twisted(m, p, k).count
            assert s == naive_straight(p, k), (p, k, "straight")
            assert t == naive_twisted(p, k), (p, k, "twisted")
            rows.append((p, k))
    elapsed = time.perf_counter() - t0
    note(request, f"{len(rows)} (p, k) pairs, both kinds, {elapsed:.1f}s")
    assert elapsed < 120


@pytest.mark.criterion(8)
def test_criterion_8_symbolic_invariance(request):
    for a in [2] + list(range(-9, 10, 2)):
        f = branch_polynomial(a)
        assert f.substitute_linear((0, 1), (-1, 0)) == f, a
    ident = SurfaceModel(automorphism="identity")
    for p, k in [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1)]:
        assert count_twisted(ident, p, k).count == count_straight(ident, p, k).count
    note(request, "a in {2} and odd a in [-9, 9]; identity model on 5 fields")


@pytest.mark.criterion(9)
def test_criterion_9_solver_round_trip(request):
    rng = np.random.default_rng(20261016)
    primes = primes_in(*RANGE)
    cfg = replace(SolverConfig(orientation="raw"), K=3)
    unique = contained = 0
    for _ in range(100):
        p = int(rng.choice(primes))
        m = random_model(rng, p, cfg)
        sol = solve_ap(m.counts(3), cfg)
        contained += m.a in sol.values
        unique += sol.unique and sol.values == [m.a]
    note(request, f"{unique}/100 unique, {contained}/100 in candidate set")
    assert unique >= 95
    assert contained == 100
