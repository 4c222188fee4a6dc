"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 budget exceeded,
4 ambiguity under ``--strict``, 5 a check against the built-in fixtures
failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from importlib import resources

import jsonschema

from . import comparison, hecke
from .counting import (
    DEFAULT_BUDGET,
    BadPrime,
    BudgetExceeded,
    CountingError,
    SurfaceModel,
    count_straight,
    count_twisted,
)
from .fields import is_prime, primes_in
from .gauss import GaussInt
from .local import (
    LocalError,
    PrecisionExhausted,
    FrobCubic,
    analyze_q2i,
    bp_from_ap,
    euler_factor,
    is_pure,
    unit_times_p_roots,
)
from .pipeline import ESCALATION_BUDGET, CountCache, PrimeResolution, resolve_prime
from .spectral import SolverConfig, SolverError

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_AMBIGUOUS, EXIT_MISMATCH = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


class Outcome(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    command: str
    fmt: str = "text"
    workers: int | None = None
    budget: int = DEFAULT_BUDGET
    strict: bool = False
    family_a: int = 2
    convention: str = "chi"
    K: int = 2
    max_K: int = 3
    escalation_budget: int = ESCALATION_BUDGET
    D: int = 8
    r_max: int = 24

    def validate(self) -> None:
        if self.workers is not None and self.workers < 1:
            raise UsageError("--workers must be at least 1")
        if self.budget < 1:
            raise UsageError("--budget must be positive")
        if self.convention not in ("chi", "none"):
            raise UsageError("--convention must be chi or none")
        if not 1 <= self.K <= self.max_K:
            raise UsageError("need 1 <= --K <= --max-K")
        try:
            SurfaceModel(a=self.family_a)
            self.solver()
        except (CountingError, ValueError) as exc:
            raise UsageError(str(exc)) from None

    def solver(self) -> SolverConfig:
        return SolverConfig(D=self.D, r_max=self.r_max, family_a=self.family_a)

    def model(self) -> SurfaceModel:
        return SurfaceModel(a=self.family_a)


def _prime_arg(s: str) -> int:
    p = int(s)
    if p < 3 or not is_prime(p):
        raise argparse.ArgumentTypeError(f"{s} is not an odd prime")
    return p


def _range_arg(s: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in s.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like 3..67, got {s!r}") from None
    if lo > hi or lo < 1:
        raise argparse.ArgumentTypeError(f"empty range {s!r}")
    return lo, hi


def _gauss_arg(s: str) -> GaussInt:
    try:
        re, im = (int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {s!r}") from None
    return GaussInt(re, im)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: $RANK3FROB_WORKERS or CPU count)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="maximum character evaluations per count")
    common.add_argument("--strict", action="store_true", help="exit 4 when a prime stays ambiguous")
    common.add_argument("--family-a", type=int, default=2, help="parameter a of the branch polynomial")
    common.add_argument("--convention", choices=("chi", "none"), default="chi")
    common.add_argument("--K", type=int, default=2, help="highest extension degree counted initially")
    common.add_argument("--max-K", type=int, default=3, help="highest degree reached by escalation")
    common.add_argument("--escalation-budget", type=int, default=ESCALATION_BUDGET)
    common.add_argument("--D", type=int, default=8, help="root-of-unity order bound")
    common.add_argument("--r-max", "--rmax", dest="r_max", type=int, default=24, help="root-of-unity rank bound")
    common.add_argument("--fixtures", help="fixture table (JSON) to check against instead of the built-in one")

    ap = argparse.ArgumentParser(prog="rank3frob", description="Frobenius data of a level-128 surface family")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="point count over F_{p^k}")
    c.add_argument("--p", type=_prime_arg, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--twisted", action="store_true")

    for name, hlp in (
        ("solve", "exact fits of a_p from the counts"),
        ("bp", "resolve b_p"),
        ("lfactor", "local Euler factor"),
        ("purity", "purity of the Frobenius cubic"),
        ("roots2", "distinct roots of the cubic in Q_2(i)"),
        ("cusp", "roots of the form zeta*p"),
    ):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--p", type=_prime_arg, required=True)
        if name == "cusp":
            s.add_argument("--max-order", type=int, default=64)

    for name in ("lfactor", "purity", "roots2", "cusp"):
        sub.choices[name].add_argument("--b", type=_gauss_arg, help="use this b_p (RE,IM) instead of computing it")

    i = sub.add_parser("ingest", parents=[common], help="parse and validate a Hecke table")
    i.add_argument("--file", required=True)
    i.add_argument("--format", choices=("tsv", "json"))

    m = sub.add_parser("compare", parents=[common], help="designated-prime comparison of two tables")
    m.add_argument("--left", required=True, help="table file, or 'computed' for this package's results")
    m.add_argument("--right", required=True)
    m.add_argument("--policy", choices=sorted(comparison.POLICIES), default="grenie3")

    for name in ("census", "report"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--range", type=_range_arg, default=(3, 67), dest="prange")
        if name == "report":
            s.add_argument("--table", help="Hecke table to compare against the computed data")
            s.add_argument("--timing", help="write per-prime timings and worker count to this file")
    return ap


def config_from(args) -> RunConfig:
    workers = args.workers
    if workers is None and os.environ.get("RANK3FROB_WORKERS"):
        try:
            workers = int(os.environ["RANK3FROB_WORKERS"])
        except ValueError:
            raise UsageError("RANK3FROB_WORKERS must be an integer") from None
    cfg = RunConfig(
        command=args.command,
        fmt=args.fmt or "text",
        workers=workers,
        budget=args.budget,
        strict=args.strict,
        family_a=args.family_a,
        convention=args.convention,
        K=args.K,
        max_K=args.max_K,
        escalation_budget=args.escalation_budget,
        D=args.D,
        r_max=args.r_max,
    )
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# helpers


def _load_table(path: str, fmt: str | None = None) -> comparison.CharPolyTable:
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "tsv"
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        return hecke.parse_hecke(text, fmt)
    except hecke.HeckeParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _fixtures(args) -> comparison.CharPolyTable:
    if not args.fixtures:
        return hecke.builtin_fixtures()
    return _load_table(args.fixtures)


def _resolve(cfg: RunConfig, p: int, cache: CountCache) -> PrimeResolution:
    r = resolve_prime(
        p,
        K=cfg.K,
        max_K=cfg.max_K,
        config=cfg.solver(),
        model=cfg.model(),
        convention=cfg.convention,
        workers=cfg.workers,
        budget=cfg.budget,
        escalation_budget=cfg.escalation_budget,
        cache=cache,
    )
    if r.status == "failed" and "budget" in r.note:
        raise Outcome(EXIT_BUDGET, f"p = {p}: {r.note}")
    return r


def _need_b(cfg: RunConfig, args, cache: CountCache) -> tuple[GaussInt, PrimeResolution | None]:
    if getattr(args, "b", None) is not None:
        return args.b, None
    r = _resolve(cfg, args.p, cache)
    if r.status == "ambiguous":
        cands = ", ".join(str(bp_from_ap(a, args.p, cfg.convention)) for a in r.survivors)
        raise Outcome(EXIT_AMBIGUOUS if cfg.strict else EXIT_OK, f"p = {args.p}: ambiguous, b in {{{cands}}}")
    if r.status != "resolved":
        raise Outcome(EXIT_MISMATCH, f"p = {args.p}: no admissible a_p ({r.note})")
    b = r.b(cfg.convention)
    if cfg.convention == "chi":
        err = _check_fixture(_fixtures(args), args.p, b)
        if err:
            raise Outcome(EXIT_MISMATCH, err)
    return b, r


def _check_fixture(fixtures: comparison.CharPolyTable, p: int, b: GaussInt) -> str | None:
    if p not in fixtures:
        return None
    allowed = [x for x in fixtures[p].bs if x is not None]
    if b not in allowed:
        return f"p = {p}: computed b = {b}, fixture allows {', '.join(map(str, allowed))}"
    return None


def _cubic_json(p: int, b: GaussInt) -> list:
    return euler_factor(b, p).poly.to_json()


def _prime_row(cfg: RunConfig, r: PrimeResolution) -> dict:
    row = {
        "p": r.p,
        "status": r.status,
        "K": r.K,
        "unique": bool(r.solution is not None and r.solution.unique),
        "candidates": [a.to_list() for a in r.survivors],
        "counts": [
            {"k": c.k, "kind": c.kind, "count": c.count} for c in r.counts
        ],
    }
    if r.status == "resolved":
        b = r.b(cfg.convention)
        cub = r.cubic(cfg.convention)
        row.update(
            a=r.a.to_list(),
            b=b.to_list(),
            cubic=cub.poly.to_json(),
            euler=_cubic_json(r.p, b),
            pure=is_pure(cub.poly, r.p),
            roots_q2i=analyze_q2i(cub.poly).distinct_roots,
            unit_roots=[u.to_json() for u in unit_times_p_roots(cub.poly, r.p)],
        )
    return row


# ---------------------------------------------------------------------------
# commands


def cmd_count(cfg, args, cache):
    kind = "twisted" if args.twisted else "straight"
    fn = count_twisted if args.twisted else count_straight
    rec = fn(cfg.model(), args.p, args.k, workers=cfg.workers, budget=cfg.budget)
    return {"command": "count", **rec.to_json()}, [rec.to_json()], (
        f"{kind} count over F_{args.p}^{args.k}: {rec.count}  ({rec.elapsed:.2f}s)"
    )


def cmd_solve(cfg, args, cache):
    r = _resolve(cfg, args.p, cache)
    sol = r.solution
    doc = {
        "command": "solve",
        "p": args.p,
        "K": r.K,
        "exact_fits": [c.a.to_list() for c in sol.candidates] if sol else [],
        "survivors": [a.to_list() for a in r.survivors],
        "status": r.status,
        "orientation": sol.orientation if sol else None,
    }
    text = [f"p = {args.p}, K = {r.K}: {len(doc['exact_fits'])} exact fit(s)"]
    text += [f"  a_p = {a}" for a in (sol.values if sol else [])]
    text.append(f"after shape and purity: {', '.join(map(str, r.survivors)) or 'none'} ({r.status})")
    if cfg.strict and r.status == "ambiguous":
        raise Outcome(EXIT_AMBIGUOUS, "\n".join(text))
    rows = [{"p": args.p, "a": str(a)} for a in r.survivors]
    return doc, rows, "\n".join(text)


def cmd_bp(cfg, args, cache):
    b, r = _need_b(cfg, args, cache)
    doc = {"command": "bp", "p": args.p, "convention": cfg.convention, "a": r.a.to_list(), "b": b.to_list()}
    return doc, [{"p": args.p, "a": str(r.a), "b": str(b)}], f"b_{args.p} = {b}  (a_{args.p} = {r.a})"


def cmd_lfactor(cfg, args, cache):
    b, _ = _need_b(cfg, args, cache)
    ef = euler_factor(b, args.p)
    doc = {"command": "lfactor", "p": args.p, "b": b.to_list(), "euler": ef.poly.to_json()}
    return doc, [{"p": args.p, "euler": str(ef)}], ef.render_l_factor()


def cmd_purity(cfg, args, cache):
    b, _ = _need_b(cfg, args, cache)
    ok = is_pure(FrobCubic(args.p, b).poly, args.p)
    doc = {"command": "purity", "p": args.p, "b": b.to_list(), "pure": ok}
    return doc, [{"p": args.p, "pure": ok}], f"p = {args.p}: {'pure' if ok else 'NOT pure'} of weight 2"


def cmd_roots2(cfg, args, cache):
    b, _ = _need_b(cfg, args, cache)
    try:
        res = analyze_q2i(FrobCubic(args.p, b).poly)
    except PrecisionExhausted as exc:
        raise Outcome(EXIT_BUDGET, str(exc)) from None
    doc = {
        "command": "roots2",
        "p": args.p,
        "b": b.to_list(),
        "distinct_roots": res.distinct_roots,
        "precision": res.precision_used,
    }
    return doc, [{"p": args.p, "roots": res.distinct_roots}], (
        f"p = {args.p}: {res.distinct_roots} distinct root(s) in Q2(i)"
    )


def cmd_cusp(cfg, args, cache):
    b, _ = _need_b(cfg, args, cache)
    roots = unit_times_p_roots(FrobCubic(args.p, b).poly, args.p, args.max_order)
    doc = {"command": "cusp", "p": args.p, "b": b.to_list(), "roots": [u.to_json() for u in roots]}
    text = [f"p = {args.p}: {len(roots)} root(s) of the form zeta*p"]
    text += [f"  order {u.order}: {u.exact if u.exact is not None else u.root}" for u in roots]
    return doc, [{"p": args.p, "order": u.order} for u in roots], "\n".join(text)


def _table_json(t: comparison.CharPolyTable) -> dict:
    return json.loads(hecke.serialize_hecke(t, "json"))


def cmd_ingest(cfg, args, cache):
    t = _load_table(args.file, args.format)
    led = comparison.hypothesis_ledger(t)
    doc = {"command": "ingest", "table": _table_json(t), "ledger": led.to_json()}
    text = [f"{len(t)} row(s), level {t.level}, convention {t.convention}"]
    text += [f"  {i.name}: {i.status} ({i.detail})" for i in led.items]
    rows = [{"p": p, "b": str(t[p].b)} for p in t.primes]
    return doc, rows, "\n".join(text)


def _computed_table(cfg, primes, cache) -> comparison.CharPolyTable:
    bs, amb = {}, {}
    for p in primes:
        r = _resolve(cfg, p, cache)
        if r.status == "resolved":
            bs[p] = r.b(cfg.convention)
        elif r.survivors:
            amb[p] = [bp_from_ap(a, p, cfg.convention) for a in r.survivors]
    t = comparison.table_from_bs(bs, convention=cfg.convention)
    for p, vals in amb.items():
        t = t.with_entry(comparison.make_entry(p, vals, "computed"))
    return hecke.geometric_declarations(t)


def cmd_compare(cfg, args, cache):
    pol = comparison.POLICIES[args.policy]
    sides = []
    for src in (args.left, args.right):
        sides.append(_computed_table(cfg, pol.primes, cache) if src == "computed" else _load_table(src))
    v = comparison.grenie_compare(sides[0], sides[1], pol)
    doc = {"command": "compare", "policy": pol.name, **v.to_json()}
    detail = ""
    if isinstance(v, comparison.Distinct):
        detail = f" at p = {v.witness}"
    elif isinstance(v, comparison.Insufficient):
        detail = f" (missing {list(v.missing)}, ambiguous {list(v.ambiguous)})"
    elif isinstance(v, comparison.HypothesisUnmet):
        detail = f": {v.reason}"
    return doc, [doc], f"{v.tag}{detail}"


def _census(cfg, lo, hi, cache):
    rs = {p: _resolve(cfg, p, cache) for p in primes_in(lo, hi)}
    table = hecke.geometric_declarations(comparison.CharPolyTable(convention=cfg.convention))
    for p, r in rs.items():
        if r.status == "resolved":
            table = table.with_b(p, r.b(cfg.convention))
        elif r.survivors:
            table = table.with_entry(
                comparison.make_entry(p, [bp_from_ap(a, p, cfg.convention) for a in r.survivors])
            )
    return rs, table, comparison.distinct_root_census(table, lo, hi)


def _strict_check(cfg, rs):
    amb = [p for p, r in rs.items() if r.status == "ambiguous"]
    if cfg.strict and amb:
        return f"ambiguous primes: {amb}"
    return None


def cmd_census(cfg, args, cache):
    lo, hi = args.prange
    rs, table, cen = _census(cfg, lo, hi, cache)
    doc = {"command": "census", "range": [lo, hi], **cen.to_json()}
    text = f"primes in [{lo}, {hi}] with 3 distinct roots in Q2(i): {list(cen.primes)}"
    if cen.skipped:
        text += f"\nskipped: {dict(cen.skipped)}"
    rows = [{"p": p, "roots": n} for p, n in sorted(cen.counts.items())]
    msg = _strict_check(cfg, rs)
    if msg:
        raise Outcome(EXIT_AMBIGUOUS, text + "\n" + msg)
    return doc, rows, text


def cmd_report(cfg, args, cache):
    lo, hi = args.prange
    t0 = time.perf_counter()
    rs, table, cen = _census(cfg, lo, hi, cache)
    fixtures = _fixtures(args)
    checks = []
    for p in sorted(fixtures.primes):
        if p in rs and rs[p].status == "resolved":
            err = _check_fixture(fixtures, p, rs[p].b(cfg.convention))
            checks.append({"name": f"b_{p}", "ok": err is None, "detail": err or "matches fixture"})
    listed = fixtures.annotations.get("distinct_root_primes")
    if listed is not None:
        want = sorted(p for p in listed if lo <= p <= hi)
        got = sorted(cen.primes)
        ok = want == got
        detail = "matches fixture list" if ok else f"computed {got}, fixture lists {want}"
        checks.append({"name": "distinct_root_census", "ok": ok, "detail": detail})
    grenie = None
    if args.table:
        user = _load_table(args.table)
        grenie = comparison.grenie_compare(table, user).to_json()
    doc = {
        "command": "report",
        "config": {
            "range": [lo, hi],
            "family_a": cfg.family_a,
            "convention": cfg.convention,
            "K": cfg.K,
            "max_K": cfg.max_K,
            "D": cfg.D,
            "r_max": cfg.r_max,
            "budget": cfg.budget,
            "escalation_budget": cfg.escalation_budget,
        },
        "primes": [_prime_row(cfg, rs[p]) for p in sorted(rs)],
        "census": cen.to_json(),
        "ledger": comparison.hypothesis_ledger(table).to_json(),
        "checks": checks,
        "grenie": grenie,
    }
    if args.timing:
        with open(args.timing, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "workers": cfg.workers,
                    "total_s": round(time.perf_counter() - t0, 3),
                    "primes": {str(p): round(r.elapsed, 3) for p, r in sorted(rs.items())},
                },
                fh,
                indent=2,
                sort_keys=True,
            )
    lines = []
    for row in doc["primes"]:
        if row["status"] == "resolved":
            b = GaussInt(*row["b"])
            lines.append(f"{row['p']:>3}  b = {str(b):<10} K = {row['K']}  roots in Q2(i): {row['roots_q2i']}")
        else:
            lines.append(f"{row['p']:>3}  {row['status']}")
    lines.append(f"census: {list(cen.primes)}")
    if grenie is not None:
        lines.append(f"comparison with {args.table}: {grenie['verdict']}")
    lines += [f"check {c['name']}: {'ok' if c['ok'] else 'MISMATCH'} ({c['detail']})" for c in checks]
    rows = [
        {"p": r["p"], "status": r["status"], "b": str(GaussInt(*r["b"])) if "b" in r else "",
         "roots_q2i": r.get("roots_q2i", "")}
        for r in doc["primes"]
    ]
    code = EXIT_OK
    if not all(c["ok"] for c in checks):
        code = EXIT_MISMATCH
    elif _strict_check(cfg, rs):
        code = EXIT_AMBIGUOUS
    return doc, rows, "\n".join(lines), code


COMMANDS = {
    "count": cmd_count,
    "solve": cmd_solve,
    "bp": cmd_bp,
    "lfactor": cmd_lfactor,
    "purity": cmd_purity,
    "roots2": cmd_roots2,
    "cusp": cmd_cusp,
    "ingest": cmd_ingest,
    "compare": cmd_compare,
    "census": cmd_census,
    "report": cmd_report,
}


# ---------------------------------------------------------------------------
# output


def load_schema() -> dict:
    with resources.files("rank3frob").joinpath("schema/report.schema.json").open(encoding="utf-8") as fh:
        return json.load(fh)


def render_json(doc: dict) -> str:
    jsonschema.validate(doc, load_schema())
    return json.dumps(doc, indent=2, sort_keys=True)


def render_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    keys = list(rows[0])
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    return buf.getvalue().rstrip("\n")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = config_from(args)
    except UsageError as exc:
        print(f"rank3frob: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cache = CountCache()
    try:
        out = COMMANDS[args.command](cfg, args, cache)
    except Outcome as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except UsageError as exc:
        print(f"rank3frob: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"rank3frob: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (BadPrime, LocalError) as exc:
        print(f"rank3frob: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"rank3frob: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    doc, rows, text, *rest = out
    code = rest[0] if rest else EXIT_OK
    if cfg.fmt == "json":
        print(render_json(doc))
    elif cfg.fmt == "csv":
        print(render_csv(rows))
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
