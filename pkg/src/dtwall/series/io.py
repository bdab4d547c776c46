"""Bit-exact text and JSON dumps of truncated series.

Text layout::

    var x scale 6 window -12 60
    var y scale 2 window 0 4
    -10/1 -12 0

Exponents are in scaled units; terms are sorted lexicographically.
"""
from __future__ import annotations

import json
from fractions import Fraction

from dtwall._rational import fmt_pq, norm
from dtwall.errors import DomainError
from dtwall.series.laurent import LaurentSeries


def dump_text(s: LaurentSeries) -> str:
    lines = [
        f"var {n} scale {d} window {lo} {hi}" for n, d, (lo, hi) in zip(s.names, s.scales, s.window)
    ]
    for e in sorted(s.terms):
        lines.append(" ".join([fmt_pq(s.terms[e])] + [str(x) for x in e]))
    return "\n".join(lines) + "\n"


def load_text(text: str) -> LaurentSeries:
    names, scales, window, terms = [], [], [], {}
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "var":
            if len(parts) != 7 or parts[2] != "scale" or parts[4] != "window":
                raise DomainError(f"line {lineno}: malformed header {line!r}")
            names.append(parts[1])
            scales.append(int(parts[3]))
            window.append((int(parts[5]), int(parts[6])))
            continue
        if len(parts) != len(names) + 1:
            raise DomainError(f"line {lineno}: expected {len(names)} exponents")
        terms[tuple(int(x) for x in parts[1:])] = norm(Fraction(parts[0]))
    return LaurentSeries(names, scales, window, terms)


def to_json_obj(s: LaurentSeries) -> dict:
    return {
        "vars": [
            {"name": n, "scale": d, "window": [lo, hi]} for n, d, (lo, hi) in zip(s.names, s.scales, s.window)
        ],
        "terms": [{"coeff": fmt_pq(s.terms[e]), "exp": list(e)} for e in sorted(s.terms)],
    }


def dump_json(s: LaurentSeries) -> str:
    return json.dumps(to_json_obj(s), sort_keys=True, separators=(",", ":")) + "\n"


def load_json(text: str) -> LaurentSeries:
    obj = json.loads(text)
    vs = obj["vars"]
    terms = {tuple(t["exp"]): norm(Fraction(t["coeff"])) for t in obj["terms"]}
    return LaurentSeries(
        [v["name"] for v in vs], [v["scale"] for v in vs], [tuple(v["window"]) for v in vs], terms
    )
