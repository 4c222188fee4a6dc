"""Hecke-eigenvalue tables: parsing, serialization and built-in fixtures.

TSV grammar (UTF-8)::

    # comments start with '#', anywhere on a line
    level=128 convention=chi [semisimple=yes] [ramification=2] [field=Q2(i)]
    3	1	2
    5	-1	-4	flag1,flag2

The header line is optional and must be the first non-comment line.  Rows
are ``p  re(b)  im(b)  [flags]``, tab separated, primes strictly increasing.
The JSON form is ``{"level": .., "convention": .., "rows": [{"p", "b", "flags"}]}``
plus the same optional declarations.
"""

from __future__ import annotations

import json
from dataclasses import replace

from .comparison import CharPolyTable, TableEntry, make_entry
from .fields import is_prime
from .gauss import GaussInt

DEFAULT_LEVEL = 128

#: Primes in [3, 67] listed as having three distinct roots in Q_2(i).
DISTINCT_ROOT_PRIMES = (3, 11, 19, 47, 61)


class HeckeParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


_TRUE = {"yes", "true", "1"}
_FALSE = {"no", "false", "0"}


def _parse_header(tokens: list[str], lineno: int) -> dict:
    meta = {}
    col = 1
    for tok in tokens:
        if "=" not in tok:
            raise HeckeParseError(f"header token {tok!r} is not key=value", lineno, col)
        key, val = tok.split("=", 1)
        if key == "level":
            try:
                meta["level"] = int(val)
            except ValueError:
                raise HeckeParseError(f"level {val!r} is not an integer", lineno, col) from None
        elif key == "convention":
            if val not in ("chi", "none"):
                raise HeckeParseError(f"convention must be chi or none, not {val!r}", lineno, col)
            meta["convention"] = val
        elif key == "semisimple":
            meta["semisimple"] = _flag(val, lineno, col)
        elif key == "irreducible":
            meta["irreducible"] = _flag(val, lineno, col)
        elif key == "ramification":
            try:
                meta["ramification"] = frozenset(int(x) for x in val.split(",") if x)
            except ValueError:
                raise HeckeParseError(f"bad ramification set {val!r}", lineno, col) from None
        elif key == "field":
            meta["field_name"] = val
        elif key == "dimension":
            meta["dimension"] = int(val)
        else:
            raise HeckeParseError(f"unknown header key {key!r}", lineno, col)
        col += len(tok) + 1
    if "level" not in meta or "convention" not in meta:
        raise HeckeParseError("header needs level=<N> and convention=<chi|none>", lineno, 1)
    return meta


def _flag(val, lineno, col) -> bool:
    v = val.lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise HeckeParseError(f"expected yes/no, got {val!r}", lineno, col)


def _check_row(p: int, re: int, im: int, prev: int | None, where: str):
    if p == 2 or p % 2 == 0 or not is_prime(p):
        raise HeckeParseError(f"{where}: {p} is not an odd prime")
    if prev is not None and p <= prev:
        raise HeckeParseError(f"{where}: primes must be strictly increasing ({prev} then {p})")
    if re * re + im * im > 9 * p * p:
        raise HeckeParseError(
            f"{where}: Weil bound violated, |b|^2 = {re * re + im * im} > 9p^2 = {9 * p * p}"
        )


def _build(rows, meta) -> CharPolyTable:
    entries = {p: make_entry(p, [GaussInt(re, im)], "ingested", tuple(flags)) for p, re, im, flags in rows}
    return CharPolyTable(entries, **meta)


def parse_tsv(text: str) -> CharPolyTable:
    meta = {"level": DEFAULT_LEVEL, "convention": "chi"}
    rows = []
    seen_content = False
    prev = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if not seen_content and "=" in line:
            meta.update(_parse_header(line.split(), lineno))
            seen_content = True
            continue
        seen_content = True
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise HeckeParseError(f"expected 3 or 4 tab-separated fields, got {len(fields)}", lineno, 1)
        nums = []
        col = 1
        for f in fields[:3]:
            try:
                nums.append(int(f.strip()))
            except ValueError:
                raise HeckeParseError(f"{f!r} is not an integer", lineno, col) from None
            col += len(f) + 1
        flags = tuple(x for x in fields[3].strip().split(",") if x) if len(fields) == 4 else ()
        _check_row(nums[0], nums[1], nums[2], prev, f"row at line {lineno}")
        prev = nums[0]
        rows.append((nums[0], nums[1], nums[2], flags))
    return _build(rows, meta)


def parse_json(text: str) -> CharPolyTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HeckeParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or "rows" not in doc:
        raise HeckeParseError("expected an object with a 'rows' array")
    meta = {"level": int(doc.get("level", DEFAULT_LEVEL)), "convention": doc.get("convention", "chi")}
    if meta["convention"] not in ("chi", "none"):
        raise HeckeParseError(f"convention must be chi or none, not {meta['convention']!r}")
    for key in ("semisimple", "irreducible", "dimension"):
        if key in doc:
            meta[key] = doc[key]
    if "ramification" in doc:
        meta["ramification"] = frozenset(int(x) for x in doc["ramification"])
    if "field" in doc:
        meta["field_name"] = doc["field"]
    rows, prev = [], None
    for n, row in enumerate(doc["rows"], start=1):
        try:
            p = int(row["p"])
            re, im = (int(x) for x in row["b"])
        except (KeyError, TypeError, ValueError):
            raise HeckeParseError(f"row {n}: expected {{'p': int, 'b': [re, im]}}") from None
        _check_row(p, re, im, prev, f"row {n}")
        prev = p
        rows.append((p, re, im, tuple(row.get("flags", ()))))
    return _build(rows, meta)


def parse_hecke(text: str, format: str = "tsv") -> CharPolyTable:
    if format == "tsv":
        return parse_tsv(text)
    if format == "json":
        return parse_json(text)
    raise ValueError(f"unknown format {format!r}")


def _header_meta(table: CharPolyTable) -> list[tuple[str, str]]:
    out = [("level", str(table.level)), ("convention", table.convention)]
    if table.dimension != 3:
        out.append(("dimension", str(table.dimension)))
    if table.semisimple is not None:
        out.append(("semisimple", "yes" if table.semisimple else "no"))
    if table.irreducible is not None:
        out.append(("irreducible", "yes" if table.irreducible else "no"))
    if table.ramification is not None:
        out.append(("ramification", ",".join(str(p) for p in sorted(table.ramification))))
    if table.field_name is not None:
        out.append(("field", table.field_name))
    return out


def _single_b(entry: TableEntry) -> GaussInt:
    if entry.ambiguous or entry.b is None:
        raise ValueError(f"entry at {entry.p} is not a single shaped cubic")
    return entry.b


def serialize_hecke(table: CharPolyTable, format: str = "tsv") -> str:
    if format == "tsv":
        lines = [" ".join(f"{k}={v}" for k, v in _header_meta(table))]
        for p in table.primes:
            e = table[p]
            b = _single_b(e)
            row = f"{p}\t{b.re}\t{b.im}"
            flags = [f for f in e.flags if f != "ambiguous"]
            if flags:
                row += "\t" + ",".join(flags)
            lines.append(row)
        return "\n".join(lines) + "\n"
    if format == "json":
        doc: dict = {"level": table.level, "convention": table.convention}
        if table.dimension != 3:
            doc["dimension"] = table.dimension
        if table.semisimple is not None:
            doc["semisimple"] = table.semisimple
        if table.irreducible is not None:
            doc["irreducible"] = table.irreducible
        if table.ramification is not None:
            doc["ramification"] = sorted(table.ramification)
        if table.field_name is not None:
            doc["field"] = table.field_name
        doc["rows"] = []
        for p in table.primes:
            e = table[p]
            b = _single_b(e)
            doc["rows"].append({"p": p, "b": b.to_list(), "flags": [f for f in e.flags if f != "ambiguous"]})
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {format!r}")


def builtin_fixtures() -> CharPolyTable:
    """Reference values for p = 3 and p = 11.

    p = 3 carries b = 1+2i.  The recorded p = 11 polynomial is not of the
    Frobenius shape, so both shape-consistent readings are stored and the
    entry is flagged ambiguous.
    """
    entries = {
        3: make_entry(3, [GaussInt(1, 2)], "fixture"),
        11: make_entry(11, [GaussInt(-7, -10), GaussInt(-7, 10)], "fixture", ("ambiguous",)),
    }
    return CharPolyTable(
        entries,
        dimension=3,
        semisimple=True,
        irreducible=True,
        ramification=frozenset({2}),
        field_name="Q2(i)",
        level=DEFAULT_LEVEL,
        convention="chi",
        annotations={"distinct_root_primes": list(DISTINCT_ROOT_PRIMES), "range": [3, 67]},
    )


def geometric_declarations(table: CharPolyTable) -> CharPolyTable:
    """Attach the declarations known for the geometric side."""
    return replace(
        table,
        dimension=3,
        semisimple=True,
        irreducible=True,
        ramification=frozenset({2}),
        field_name="Q2(i)",
    )
