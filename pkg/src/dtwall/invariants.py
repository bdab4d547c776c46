"""Invariant tables keyed by (curve degree k, Euler characteristic n).

Tables come in from JSON or TSV files, or are synthesised for tests.  Kinds
DT_ideal and PT (and their hatted Euler-characteristic versions) are integer
valued; DT4 tables may carry arbitrary rationals.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from dtwall._rational import as_q, fmt_q, norm
from dtwall.errors import TableError
from dtwall.numclass import Geometry

log = logging.getLogger(__name__)

KINDS = ("DT_ideal", "PT", "DT4", "DT_ideal_hat", "PT_hat", "DT4_hat")
INTEGER_KINDS = frozenset({"DT_ideal", "PT", "DT_ideal_hat", "PT_hat"})


@dataclass(frozen=True)
class InvariantTable:
    kind: str
    geometry_id: str = ""
    entries: Mapping[tuple[int, int], int | Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise TableError(f"unknown table kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        clean = {}
        for key, value in dict(self.entries).items():
            try:
                k, n = key
            except (TypeError, ValueError):
                raise TableError(f"table key {key!r} is not a (k, n) pair") from None
            if isinstance(k, bool) or isinstance(n, bool) or int(k) != k or int(n) != n:
                raise TableError(f"table key {key!r} must be integers")
            k, n = int(k), int(n)
            if k < 0:
                raise TableError(f"negative curve degree k={k} at n={n}")
            try:
                value = as_q(value)
            except (TypeError, ValueError, ZeroDivisionError):
                raise TableError(f"value {value!r} at (k={k}, n={n}) is not an exact rational") from None
            if self.kind in INTEGER_KINDS and value.denominator != 1:
                raise TableError(f"{self.kind} tables are integer valued; got {value} at (k={k}, n={n})")
            clean[(k, n)] = norm(value)
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_items(cls, kind: str, items: Iterable[tuple[int, int, object]], geometry_id: str = "") -> "InvariantTable":
        """Build from (k, n, value) triples, rejecting repeated keys."""
        entries: dict = {}
        for k, n, value in items:
            if (k, n) in entries:
                raise TableError(f"duplicate entry (k={k}, n={n})")
            entries[(k, n)] = value
        return cls(kind, geometry_id, entries)

    def __len__(self):
        return len(self.entries)

    def get(self, k: int, n: int, default=None):
        return self.entries.get((k, n), default)

    def sorted_items(self):
        return sorted(self.entries.items())

    def check_geometry(self, geom: Geometry) -> bool:
        """False (with a logged warning) when both ids are set and differ."""
        if self.geometry_id and geom.id and self.geometry_id != geom.id:
            log.warning("table geometry_id %r differs from geometry id %r", self.geometry_id, geom.id)
            return False
        return True


# -- serialisation -----------------------------------------------------------


def _value_json(v):
    v = as_q(v)
    return v.numerator if v.denominator == 1 else fmt_q(v)


def dumps_json(table: InvariantTable) -> str:
    obj = {
        "kind": table.kind,
        "geometry_id": table.geometry_id,
        "entries": [{"k": k, "n": n, "value": _value_json(v)} for (k, n), v in table.sorted_items()],
    }
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def loads_json(text: str) -> InvariantTable:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableError(f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict) or "kind" not in obj or "entries" not in obj:
        raise TableError("table JSON needs 'kind' and 'entries'")
    if not isinstance(obj["entries"], list):
        raise TableError("'entries' must be a list")
    items = []
    for i, e in enumerate(obj["entries"]):
        if not isinstance(e, dict) or not {"k", "n", "value"} <= set(e):
            raise TableError(f"entry {i} needs k, n and value")
        k, n, v = e["k"], e["n"], e["value"]
        if not (isinstance(k, int) and isinstance(n, int)) or isinstance(k, bool) or isinstance(n, bool):
            raise TableError(f"entry {i}: k and n must be integers")
        if isinstance(v, float) or isinstance(v, bool):
            raise TableError(f"entry {i}: value must be an integer or a 'p/q' string")
        items.append((k, n, v))
    return InvariantTable.from_items(obj["kind"], items, str(obj.get("geometry_id", "")))


def dumps_tsv(table: InvariantTable) -> str:
    out = io.StringIO()
    out.write(f"# kind {table.kind}\n")
    if table.geometry_id:
        out.write(f"# geometry_id {table.geometry_id}\n")
    w = csv.writer(out, delimiter="\t", lineterminator="\n")
    w.writerow(["k", "n", "value"])
    for (k, n), v in table.sorted_items():
        w.writerow([k, n, fmt_q(v)])
    return out.getvalue()


def loads_tsv(text: str, kind: str | None = None, geometry_id: str | None = None) -> InvariantTable:
    """TSV with header ``k n value``; ``# kind`` / ``# geometry_id`` comment lines carry metadata."""
    meta = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            parts = line[1:].split(None, 1)
            if len(parts) == 2:
                meta[parts[0]] = parts[1].strip()
            continue
        if line.strip():
            rows.append(line)
    kind = kind or meta.get("kind")
    if kind is None:
        raise TableError("TSV table has no kind (add a '# kind <KIND>' line)")
    if geometry_id is None:
        geometry_id = meta.get("geometry_id", "")
    reader = csv.reader(rows, delimiter="\t")
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["k", "n", "value"]:
        raise TableError("TSV header must be 'k<TAB>n<TAB>value'")
    items = []
    for lineno, row in enumerate(reader, 2):
        if len(row) != 3:
            raise TableError(f"TSV row {lineno}: expected 3 fields, got {len(row)}")
        try:
            k, n = int(row[0]), int(row[1])
            v = Fraction(row[2].strip())
        except ValueError:
            raise TableError(f"TSV row {lineno}: cannot parse {row!r}") from None
        if "." in row[2] or "e" in row[2].lower():
            raise TableError(f"TSV row {lineno}: decimal values are not exact; use p/q")
        items.append((k, n, v))
    return InvariantTable.from_items(kind, items, geometry_id)


def load_table(path, format: str | None = None) -> InvariantTable:
    """Read a table; ``format`` is json or tsv (default: from the file suffix)."""
    path = Path(path)
    if format is None:
        format = "tsv" if path.suffix.lower() in (".tsv", ".txt") else "json"
    text = path.read_text(encoding="utf-8")
    if format == "json":
        return loads_json(text)
    if format == "tsv":
        return loads_tsv(text)
    raise TableError(f"unknown table format {format!r}")


def dump_table(table: InvariantTable, path, format: str | None = None) -> None:
    path = Path(path)
    if format is None:
        format = "tsv" if path.suffix.lower() in (".tsv", ".txt") else "json"
    text = dumps_json(table) if format == "json" else dumps_tsv(table)
    path.write_text(text, encoding="utf-8")


# -- synthetic tables --------------------------------------------------------


def toy_degree0(chiX: int, nmax: int, geometry_id: str = "") -> tuple[InvariantTable, InvariantTable]:
    """Degree-zero tables: I_{n,0} from M(−x)^{χ(X)}, P = {(0,0): 1}."""
    from dtwall.series.generating import macmahon

    if nmax < 0:
        raise TableError(f"nmax must be >= 0, got {nmax}")
    series = macmahon(-1, chiX, nmax)
    entries = {(0, int(e[0])): c for e, c in series.items()}
    return (
        InvariantTable("DT_ideal", geometry_id, entries),
        InvariantTable("PT", geometry_id, {(0, 0): 1}),
    )


def table_support_in(table, m: int, epsilon) -> bool:
    """Every key satisfies k < εm² and |n| < εm³."""
    epsilon = as_q(epsilon)
    entries = getattr(table, "entries", table)
    a, b = epsilon * m * m, epsilon * m ** 3
    return all(k < a and abs(n) < b for k, n in entries)


def random_table(kind: str, kmax: int, nmax: int, seed: int, density=Fraction(1, 2),
                 value_range: int = 5, geometry_id: str = "") -> InvariantTable:
    """Seeded integer table on 0 ≤ k ≤ kmax, |n| ≤ nmax with roughly ``density`` fill."""
    rng = random.Random(seed)
    density = as_q(density)
    entries = {}
    for k in range(kmax + 1):
        for n in range(-nmax, nmax + 1):
            if rng.random() < density:
                v = rng.randint(-value_range, value_range)
                if v:
                    entries[(k, n)] = v
    return InvariantTable(kind, geometry_id, entries)
