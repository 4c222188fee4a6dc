from rank3frob.gauss import GaussInt
from rank3frob.pipeline import CountCache, local_filter, resolve_prime


def test_p3_escalates_to_K3_and_resolves():
    r = resolve_prime(3, cache=CountCache())
    assert r.status == "resolved" and r.K == 3
    assert r.a == GaussInt(1, 2) and r.b() == GaussInt(1, 2)
    assert r.cubic().is_pure()


def test_p17_resolved_by_purity_at_K2():
    r = resolve_prime(17, cache=CountCache())
    assert r.K == 2 and r.status == "resolved"
    assert not r.solution.unique
    assert r.a == GaussInt(7, 0)
    assert "purity" in r.note


def test_local_filter_drops_impure_candidates():
    kept = local_filter([GaussInt(7, 0), GaussInt(-26, 0), GaussInt(-25, 27)], 17)
    assert kept == [GaussInt(7, 0)]


def test_escalation_budget_leaves_ambiguity():
    r = resolve_prime(11, escalation_budget=11**4, cache=CountCache())
    assert r.status == "ambiguous" and r.K == 2
    assert GaussInt(-7, -10) in r.survivors
    assert r.a is None and r.b() is None


def test_budget_failure_is_reported():
    r = resolve_prime(11, budget=1000, cache=CountCache())
    assert r.status == "failed" and "budget" in r.note


def test_cache_reuses_counts():
    cache = CountCache()
    r1 = resolve_prime(5, cache=cache)
    n = len(cache._store)
    r2 = resolve_prime(5, cache=cache)
    assert len(cache._store) == n
    assert r1.a == r2.a == GaussInt(1, 4)
    assert r1.b("none") == GaussInt(1, 4) and r1.b("chi") == GaussInt(-1, -4)
