"""Per-prime orchestration: counts -> exact fits -> local filters -> b_p.

A prime is *resolved* when exactly one exact-fit candidate survives the
shape and purity filters.  If several survive and the next degree's counts
fit the escalation budget, the series is extended by one degree and solved
again (adding counts can only shrink the candidate set).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from .counting import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    CountRecord,
    SurfaceModel,
    count_straight,
    count_twisted,
)
from .gauss import GaussInt
from .local import FrobCubic, RootFindingError, bp_from_ap, is_pure, shape_check
from .spectral import NoSolution, SolverConfig, SpectralSolution, solve_ap

#: Default cap on character evaluations for an automatic escalation step.
ESCALATION_BUDGET = 1 << 30


@dataclass
class PrimeResolution:
    p: int
    K: int
    counts: list[CountRecord]
    solution: SpectralSolution | None
    survivors: list[GaussInt] = field(default_factory=list)
    status: str = "failed"  # resolved | ambiguous | failed
    note: str = ""
    elapsed: float = 0.0

    @property
    def a(self) -> GaussInt | None:
        return self.survivors[0] if self.status == "resolved" else None

    def b(self, convention: str = "chi") -> GaussInt | None:
        a = self.a
        return None if a is None else bp_from_ap(a, self.p, convention)

    def cubic(self, convention: str = "chi") -> FrobCubic | None:
        b = self.b(convention)
        return None if b is None else FrobCubic(self.p, b)


def local_filter(values, p: int, convention: str = "chi") -> list[GaussInt]:
    """Candidates whose cubic has the Frobenius shape and is pure of weight 2."""
    out = []
    for a in values:
        try:
            cub = FrobCubic(p, bp_from_ap(a, p, convention))
            if shape_check(cub.poly, p) and is_pure(cub.poly, p):
                out.append(a)
        except RootFindingError:
            continue
    return out


class CountCache:
    """Memo of count records keyed by (model, p, k, kind)."""

    def __init__(self):
        self._store: dict = {}

    def get(self, model: SurfaceModel, p: int, k: int, kind: str, **kw) -> CountRecord:
        key = (model.a, model.automorphism, p, k, kind)
        if key not in self._store:
            fn = count_straight if kind == "straight" else count_twisted
            self._store[key] = fn(model, p, k, **kw)
        return self._store[key]

    def series(self, model, p, K, **kw) -> list[CountRecord]:
        return [self.get(model, p, k, kind, **kw) for k in range(1, K + 1) for kind in ("straight", "twisted")]


_DEFAULT_CACHE = CountCache()


def resolve_prime(
    p: int,
    *,
    K: int = 2,
    max_K: int = 3,
    config: SolverConfig = SolverConfig(),
    model: SurfaceModel | None = None,
    convention: str = "chi",
    workers: int | None = None,
    budget: int = DEFAULT_BUDGET,
    escalation_budget: int = ESCALATION_BUDGET,
    cache: CountCache | None = None,
) -> PrimeResolution:
    model = model or SurfaceModel(a=config.family_a)
    cache = cache or _DEFAULT_CACHE
    t0 = time.perf_counter()
    k_now = K
    sol = None
    counts: list[CountRecord] = []
    while True:
        try:
            counts = cache.series(model, p, k_now, workers=workers, budget=budget)
        except BudgetExceeded as exc:
            return PrimeResolution(p, k_now, counts, sol, [], "failed", str(exc), time.perf_counter() - t0)
        try:
            sol = solve_ap(counts, replace(config, K=k_now))
        except NoSolution as exc:
            return PrimeResolution(p, k_now, counts, None, [], "failed", str(exc), time.perf_counter() - t0)
        survivors = local_filter(sol.values, p, convention)
        if len(survivors) == 1:
            note = "" if sol.unique else f"{len(sol.candidates)} exact fits, 1 passes shape and purity"
            return PrimeResolution(p, k_now, counts, sol, survivors, "resolved", note, time.perf_counter() - t0)
        nxt = k_now + 1
        if nxt > max_K or p ** (2 * nxt) > min(escalation_budget, budget):
            status = "ambiguous" if survivors else "failed"
            note = f"{len(survivors)} candidates pass shape and purity at K = {k_now}"
            return PrimeResolution(p, k_now, counts, sol, survivors, status, note, time.perf_counter() - t0)
        k_now = nxt
