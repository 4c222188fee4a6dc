"""Tables of local Frobenius data and designated-prime comparison.

A :class:`CharPolyTable` maps odd primes to characteristic polynomials and
carries *declared* metadata (dimension, semisimplicity, ramification set,
field of definition).  The ledger tracks those declarations against a
:class:`ComparisonPolicy`; it never proves them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .fields import is_prime
from .gauss import GaussInt, GaussPoly, poly_expand_shaped
from .local import PrecisionExhausted, analyze_q2i, shape_check

PROVENANCES = ("computed", "ingested", "fixture")

#: Field descriptors accepted as "Q(i) completed at the prime above 2".
Q2I_NAMES = (
    "Q2(i)",
    "Q(i)_v2",
    "totally ramified quadratic extension of Q2",
)


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class TableEntry:
    p: int
    polys: tuple[GaussPoly, ...]
    provenance: str = "computed"
    raw: bool = False
    flags: tuple[str, ...] = ()

    @property
    def ambiguous(self) -> bool:
        return len(self.polys) != 1

    @property
    def poly(self) -> GaussPoly:
        if self.ambiguous:
            raise TableError(f"entry at {self.p} holds {len(self.polys)} readings")
        return self.polys[0]

    @property
    def bs(self) -> tuple[GaussInt | None, ...]:
        out = []
        for f in self.polys:
            r = shape_check(f, self.p)
            out.append(r.b if r.ok else None)
        return tuple(out)

    @property
    def b(self) -> GaussInt | None:
        return None if self.ambiguous else self.bs[0]


@dataclass(frozen=True)
class CharPolyTable:
    entries: Mapping[int, TableEntry] = field(default_factory=dict)
    dimension: int = 3
    semisimple: bool | None = None
    ramification: frozenset[int] | None = None
    field_name: str | None = None
    irreducible: bool | None = None
    level: int = 128
    convention: str = "chi"
    annotations: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for p, e in self.entries.items():
            if p != e.p or p == 2 or not is_prime(p):
                raise TableError(f"bad key {p}")
            if e.provenance not in PROVENANCES:
                raise TableError(f"unknown provenance {e.provenance!r}")

    @property
    def primes(self) -> list[int]:
        return sorted(self.entries)

    def __contains__(self, p) -> bool:
        return p in self.entries

    def __getitem__(self, p) -> TableEntry:
        return self.entries[p]

    def __len__(self):
        return len(self.entries)

    def with_entry(self, entry: TableEntry) -> "CharPolyTable":
        d = dict(self.entries)
        d[entry.p] = entry
        return replace(self, entries=d)

    def without(self, p: int) -> "CharPolyTable":
        d = dict(self.entries)
        d.pop(p, None)
        return replace(self, entries=d)

    def with_b(self, p: int, b, provenance: str | None = None) -> "CharPolyTable":
        prov = provenance or (self.entries[p].provenance if p in self.entries else "computed")
        return self.with_entry(make_entry(p, [b], prov))

    def restricted(self, primes: Iterable[int]) -> "CharPolyTable":
        keep = set(primes)
        return replace(self, entries={p: e for p, e in self.entries.items() if p in keep})

    def merged(self, other: "CharPolyTable") -> "CharPolyTable":
        d = dict(self.entries)
        d.update(other.entries)
        return replace(self, entries=d)


def make_entry(p: int, bs, provenance: str = "computed", flags=()) -> TableEntry:
    polys = tuple(poly_expand_shaped(GaussInt.coerce(b), p) for b in bs)
    fl = tuple(flags) + (("ambiguous",) if len(polys) > 1 and "ambiguous" not in flags else ())
    return TableEntry(p, polys, provenance, False, fl)


def raw_entry(p: int, poly: GaussPoly, provenance: str = "ingested") -> TableEntry:
    ok = bool(shape_check(poly, p))
    return TableEntry(p, (poly,), provenance, not ok, () if ok else ("raw",))


def table_from_bs(bs: Mapping[int, object], provenance: str = "computed", **meta) -> CharPolyTable:
    return CharPolyTable({p: make_entry(p, [b], provenance) for p, b in bs.items()}, **meta)


# ---------------------------------------------------------------------------
# policy


@dataclass(frozen=True)
class ComparisonPolicy:
    name: str
    dimensions: frozenset[int]
    ramification: frozenset[int]
    field_names: tuple[str, ...]
    primes: tuple[int, ...]

    def __post_init__(self):
        clash = set(self.primes) & set(self.ramification)
        if clash:
            raise ValueError(f"designated primes {sorted(clash)} lie in the ramification set")


GRENIE3 = ComparisonPolicy(
    name="grenie3",
    dimensions=frozenset({3, 4}),
    ramification=frozenset({2}),
    field_names=Q2I_NAMES,
    primes=(5, 7, 11, 17, 23, 31),
)

POLICIES = {"grenie3": GRENIE3}


def custom_policy(primes: Iterable[int], base: ComparisonPolicy = GRENIE3, name: str = "custom") -> ComparisonPolicy:
    return replace(base, name=name, primes=tuple(primes))


# ---------------------------------------------------------------------------
# ledger


@dataclass(frozen=True)
class LedgerItem:
    name: str
    status: str  # satisfied | declared | unverifiable | violated
    detail: str


@dataclass(frozen=True)
class LedgerReport:
    policy: str
    items: tuple[LedgerItem, ...]

    @property
    def ok(self) -> bool:
        return all(i.status in ("satisfied", "declared") for i in self.items)

    def problems(self) -> list[LedgerItem]:
        return [i for i in self.items if i.status not in ("satisfied", "declared")]

    def to_json(self) -> dict:
        return {
            "policy": self.policy,
            "ok": self.ok,
            "items": [{"name": i.name, "status": i.status, "detail": i.detail} for i in self.items],
        }


def hypothesis_ledger(table: CharPolyTable, policy: ComparisonPolicy = GRENIE3) -> LedgerReport:
    items = []
    degs = {f.degree for e in table.entries.values() for f in e.polys}
    if table.dimension not in policy.dimensions:
        items.append(LedgerItem("dimension", "violated",
                                f"dimension {table.dimension} not in {sorted(policy.dimensions)}"))
    elif degs - {table.dimension}:
        items.append(LedgerItem("dimension", "violated",
                                f"polynomial degrees {sorted(degs)} disagree with {table.dimension}"))
    else:
        items.append(LedgerItem("dimension", "satisfied",
                                f"dimension {table.dimension} in {sorted(policy.dimensions)}"))

    if table.ramification is None:
        items.append(LedgerItem("ramification", "unverifiable", "no ramification set declared"))
    elif not set(table.ramification) <= set(policy.ramification):
        extra = sorted(set(table.ramification) - set(policy.ramification))
        items.append(LedgerItem("ramification", "violated",
                                f"declared ramification at {extra} outside S = {sorted(policy.ramification)}"))
    else:
        items.append(LedgerItem("ramification", "declared",
                                f"unramified outside {sorted(table.ramification)} and infinity"))

    if table.field_name is None:
        items.append(LedgerItem("field", "unverifiable", "no field of definition declared"))
    elif table.field_name in policy.field_names:
        items.append(LedgerItem("field", "declared", f"defined over {table.field_name}"))
    else:
        items.append(LedgerItem("field", "violated",
                                f"{table.field_name!r} is not a totally ramified quadratic extension of Q2"))

    if table.semisimple is None:
        items.append(LedgerItem("semisimple", "unverifiable", "semisimplicity not declared"))
    elif table.semisimple:
        items.append(LedgerItem("semisimple", "declared", "declared semisimple"))
    else:
        items.append(LedgerItem("semisimple", "violated", "declared not semisimple"))

    if table.irreducible:
        items.append(LedgerItem("irreducible", "declared", "declared absolutely irreducible"))

    raws = sorted(p for p, e in table.entries.items() if e.raw)
    if raws:
        items.append(LedgerItem("shape", "violated", f"entries at {raws} fail the Frobenius shape"))
    return LedgerReport(policy.name, tuple(items))


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Equivalent:
    tag = "equivalent"

    def to_json(self):
        return {"verdict": self.tag}


@dataclass(frozen=True)
class Distinct:
    witness: int
    tag = "distinct"

    def to_json(self):
        return {"verdict": self.tag, "witness": self.witness}


@dataclass(frozen=True)
class Insufficient:
    missing: tuple[int, ...]
    ambiguous: tuple[int, ...] = ()
    tag = "insufficient"

    def to_json(self):
        return {"verdict": self.tag, "missing": list(self.missing), "ambiguous": list(self.ambiguous)}


@dataclass(frozen=True)
class HypothesisUnmet:
    reason: str
    tag = "hypothesis_unmet"

    def to_json(self):
        return {"verdict": self.tag, "reason": self.reason}


def grenie_compare(left: CharPolyTable, right: CharPolyTable, policy: ComparisonPolicy = GRENIE3):
    """Designated-prime comparison of two tables; every outcome is a verdict value."""
    for side, t in (("left", left), ("right", right)):
        led = hypothesis_ledger(t, policy)
        if not led.ok:
            why = "; ".join(f"{i.name}: {i.detail}" for i in led.problems())
            return HypothesisUnmet(f"{side} table: {why}")
    missing, ambiguous = [], []
    for p in policy.primes:
        if p not in left or p not in right:
            missing.append(p)
            continue
        a, b = left[p], right[p]
        if a.ambiguous or b.ambiguous:
            ambiguous.append(p)
            continue
        if a.poly != b.poly:
            return Distinct(p)
    if missing or ambiguous:
        return Insufficient(tuple(missing), tuple(ambiguous))
    return Equivalent()


# ---------------------------------------------------------------------------
# census


@dataclass(frozen=True)
class CensusResult:
    primes: tuple[int, ...]
    counts: Mapping[int, int]
    skipped: Mapping[int, str]
    failures: Mapping[int, str]

    def to_json(self):
        return {
            "primes": list(self.primes),
            "roots": {str(p): n for p, n in sorted(self.counts.items())},
            "skipped": {str(p): r for p, r in sorted(self.skipped.items())},
            "failures": {str(p): r for p, r in sorted(self.failures.items())},
        }


def distinct_root_census(table: CharPolyTable, lo: int, hi: int) -> CensusResult:
    """Primes in [lo, hi] whose cubic has three distinct roots in Q_2(i).

    An entry holding several readings counts only if all readings agree.
    """
    found, counts, skipped, failures = [], {}, {}, {}
    for p in range(max(lo, 3), hi + 1):
        if not is_prime(p):
            continue
        if p not in table:
            skipped[p] = "missing"
            continue
        try:
            ns = {analyze_q2i(f).distinct_roots for f in table[p].polys}
        except PrecisionExhausted as exc:
            failures[p] = str(exc)
            continue
        if len(ns) != 1:
            skipped[p] = f"readings disagree: {sorted(ns)}"
            continue
        n = ns.pop()
        counts[p] = n
        if n == 3:
            found.append(p)
    return CensusResult(tuple(found), counts, skipped, failures)
