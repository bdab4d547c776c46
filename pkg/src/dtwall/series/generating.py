"""Generating series: MacMahon and Göttsche products, the local D4 series,
the D6/anti-D6 assembly and its z-derivative, and the coefficient checks."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from dtwall._rational import as_q, norm
from dtwall.errors import DomainError, IntegralityError
from dtwall.numclass import Geometry
from dtwall.series.laurent import (
    LaurentSeries,
    SeriesWindow,
    embed,
    series_mul,
    substitute_monomial,
)
from dtwall.tilt import mu_over_mxi_exceeds
from dtwall.wallcross import Box


def euler_transform(exponent, order: int) -> list[Fraction]:
    """Coefficients of ∏_{n≥1} (1 − x^n)^{−a(n)} up to x^order.

    Uses n·f_n = Σ_{j=1..n} b_j f_{n−j} with b_j = Σ_{d | j} d·a(d).
    """
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    a = [0] + [exponent(n) for n in range(1, order + 1)]
    b = [0] * (order + 1)
    for d in range(1, order + 1):
        if a[d]:
            for j in range(d, order + 1, d):
                b[j] += d * a[d]
    f = [Fraction(1)] + [Fraction(0)] * order
    for n in range(1, order + 1):
        f[n] = sum((b[j] * f[n - j] for j in range(1, n + 1)), Fraction(0)) / n
    return f


def _one_var(coeffs: Sequence, name="x") -> LaurentSeries:
    return LaurentSeries.build((name,), [(0, len(coeffs) - 1)], {(i,): c for i, c in enumerate(coeffs)})


def macmahon(arg_sign: int, power: int, order: int) -> LaurentSeries:
    """M(±x)^power to x^order, where M(x) = ∏ (1 − x^n)^{−n}."""
    if arg_sign not in (1, -1):
        raise DomainError("arg_sign must be +1 or -1")
    f = euler_transform(lambda n: n * power, order)
    if arg_sign < 0:
        f = [c if j % 2 == 0 else -c for j, c in enumerate(f)]
    return _one_var(f)


def gottsche(chiP: int, order: int) -> LaurentSeries:
    """∏ (1 − x^N)^{−χ(P)} to x^order."""
    return _one_var(euler_transform(lambda n: chiP, order))


def d4_sign_exponent(m: int, geom: Geometry) -> int:
    """H³m³/6 + c₂·H·m/12, which must be an integer."""
    e = geom.chi_line_bundle(m)
    if e.denominator != 1:
        raise IntegralityError(
            f"H3*m^3/6 + c2H*m/12 = {e} is not an integer for m={m}, "
            f"geometry (H3={geom.h3}, c2H={geom.c2h})"
        )
    return int(e)


def local_d4_series(m: int, a_range: tuple[int, int], geom: Geometry, window) -> LaurentSeries:
    """Local D4 generating series of a smooth divisor P ∈ |mH| with NS(P) = Z·H|_P.

    (−1)^{e−1} ∏(1 − x^N)^{−(H³m³ + c₂·H·m)} Σ_a x^{−H³m³/6 + a m²H³/2 − a²mH³/2} y^{H³m²/2 − amH³}
    with e = H³m³/6 + c₂·H·m/12 and a over ``a_range`` (inclusive). ``window``
    bounds (x, y).
    """
    if m < 1:
        raise DomainError(f"divisor multiple m must be >= 1, got {m}")
    e = d4_sign_exponent(m, geom)
    sign = 1 if (e - 1) % 2 == 0 else -1
    h = geom.h3
    chiP = h * m ** 3 + geom.c2h * m
    bounds = window.bounds if isinstance(window, SeriesWindow) else tuple(window)
    (xlo, xhi), (ylo, yhi) = [(as_q(lo), as_q(hi)) for lo, hi in bounds]
    a_lo, a_hi = a_range
    lattice = {}
    for a in range(a_lo, a_hi + 1):
        ex = Fraction(-h * m ** 3, 6) + Fraction(a * m * m * h, 2) - Fraction(a * a * m * h, 2)
        ey = Fraction(h * m * m, 2) - a * m * h
        lattice[(ex, ey)] = lattice.get((ex, ey), 0) + sign
    if not lattice:
        return LaurentSeries.build(("x", "y"), [(xlo, xhi), (ylo, yhi)], {})
    min_x = min(ex for ex, _ in lattice)
    order = max(0, math.floor(xhi - min_x))
    g = euler_transform(lambda n: chiP, order)
    terms: dict = {}
    for (ex, ey), c in lattice.items():
        if not ylo <= ey <= yhi:
            continue
        for N, gc in enumerate(g):
            x = ex + N
            if x > xhi:
                break
            if x >= xlo and gc:
                terms[(x, ey)] = terms.get((x, ey), 0) + c * gc
    return LaurentSeries.build(("x", "y"), [(xlo, xhi), (ylo, yhi)], terms)


def _entries(table):
    return getattr(table, "entries", table) or {}


def table_to_series(table, window=None) -> LaurentSeries:
    """Σ value·x^n y^k over entries (k, n) inside the (x, y) window.

    Default window: bounding box of the entries (the origin if empty).
    """
    entries = _entries(table)
    if window is None:
        if entries:
            ks = [k for k, _ in entries]
            ns = [n for _, n in entries]
            bounds = [(min(ns), max(ns)), (min(ks), max(ks))]
        else:
            bounds = [(0, 0), (0, 0)]
    else:
        bounds = list(window.bounds if isinstance(window, SeriesWindow) else window)
    (xlo, xhi), (ylo, yhi) = [(as_q(lo), as_q(hi)) for lo, hi in bounds]
    terms = {(n, k): v for (k, n), v in entries.items() if xlo <= n <= xhi and ylo <= k <= yhi}
    return LaurentSeries.build(("x", "y"), [(xlo, xhi), (ylo, yhi)], terms)


def cut_table(table, box: Box) -> dict:
    """Entries of ``table`` inside the box C(m, ε)."""
    return {kn: v for kn, v in _entries(table).items() if box.contains(*kn)}


def zd6_prefactor(m1: int, m: int, geom: Geometry) -> tuple[Fraction, Fraction, Fraction]:
    m2 = m1 + m
    h = geom.h3
    return (
        Fraction(h, 6) * (m1 ** 3 - m2 ** 3),
        Fraction(h, 2) * (m1 ** 2 - m2 ** 2),
        Fraction(h * m ** 3, 6) + Fraction(geom.c2h * m, 12),
    )


def zd6_m1_range(m: int, box: Box, y_window: tuple, geom: Geometry) -> tuple[int, int]:
    """m₁ values whose terms can reach the y-window.

    A term with curve degrees (k₂ from I, k₁ from P) sits at
    y^{k₂ − k₁ − (H³/2)m(2m₁ + m)}, so with 0 ≤ k_i ≤ kmax only finitely many
    m₁ land in [ylo, yhi].
    """
    ylo, yhi = as_q(y_window[0]), as_q(y_window[1])
    c = Fraction(geom.h3 * m, 2)
    # need −kmax − c(2m₁+m) ≤ yhi and kmax − c(2m₁+m) ≥ ylo
    lo = math.ceil(((-box.kmax - yhi) / c - m) / 2)
    hi = math.floor(((box.kmax - ylo) / c - m) / 2)
    return lo, hi


def assemble_zd6(m: int, epsilon, tableI, tableP, geom: Geometry, m1_range: tuple[int, int], window) -> LaurentSeries:
    """Truncated D6/anti-D6 series in (x, y, z).

    Σ_{m₁} x^{(H³/6)(m₁³−m₂³)} y^{(H³/2)(m₁²−m₂²)} z^{H³m³/6 + c₂·H·m/12}
           · I^{m,ε}(x z⁻¹, x^{m₂} y z^{−m}) · P^{m,ε}(x z⁻¹, x^{−m₁} y⁻¹ z^{−m})

    ``epsilon`` is a rational ε or a prepared :class:`Box`; ``m1_range`` is
    inclusive; ``window`` bounds (x, y, z).
    """
    if m < 1:
        raise DomainError(f"divisor multiple m must be >= 1, got {m}")
    box = epsilon if isinstance(epsilon, Box) else Box.from_epsilon(m, epsilon)
    bounds = window.bounds if isinstance(window, SeriesWindow) else tuple(window)
    bounds = [(as_q(lo), as_q(hi)) for lo, hi in bounds]
    if len(bounds) != 3:
        raise DomainError("assemble_zd6 needs an (x, y, z) window")
    Is = table_to_series(cut_table(tableI, box), [(-box.nmax, box.nmax), (0, box.kmax)])
    Ps = table_to_series(cut_table(tableP, box), [(-box.nmax, box.nmax), (0, box.kmax)])
    names = ("x", "y", "z")
    total = LaurentSeries.build(names, bounds, {})
    scales = total.scales
    acc: dict = {}
    if Is.is_zero() or Ps.is_zero():
        return total
    for m1 in range(m1_range[0], m1_range[1] + 1):
        m2 = m1 + m
        pre = zd6_prefactor(m1, m, geom)
        si = substitute_monomial(
            Is, {"x": {"x": 1, "z": -1}, "y": {"x": m2, "y": 1, "z": -m}}, names, out_scales=scales
        )
        sp = substitute_monomial(
            Ps, {"x": {"x": 1, "z": -1}, "y": {"x": -m1, "y": -1, "z": -m}}, names, out_scales=scales
        )
        inner = [(lo - p, hi - p) for (lo, hi), p in zip(bounds, pre)]
        if any(lo > hi for lo, hi in SeriesWindow(names, tuple(inner)).scaled(scales)):
            continue
        prod = series_mul(si, sp, inner).shifted(pre)
        for e, c in prod.terms.items():
            acc[e] = acc.get(e, 0) + c
    return LaurentSeries(names, scales, total.window, acc)


def dz_at(s: LaurentSeries, z0: int, zname: str = "z") -> LaurentSeries:
    """∂/∂z followed by z = z0 ∈ {−1, +1}."""
    if z0 not in (1, -1):
        raise DomainError("z0 must be +1 or -1")
    if zname not in s.names:
        raise DomainError(f"series has no variable {zname!r}")
    i = s.names.index(zname)
    dz = s.scales[i]
    names = s.names[:i] + s.names[i + 1:]
    if not names:
        raise DomainError("cannot evaluate away the only variable")
    terms: dict = {}
    for e, c in s.terms.items():
        if e[i] % dz:
            raise IntegralityError(f"z-exponent {Fraction(e[i], dz)} is not an integer")
        ez = e[i] // dz
        if ez == 0:
            continue
        w = ez if (z0 == 1 or (ez - 1) % 2 == 0) else -ez
        key = e[:i] + e[i + 1:]
        terms[key] = terms.get(key, 0) + c * w
    return LaurentSeries(names, s.scales[:i] + s.scales[i + 1:], s.window[:i] + s.window[i + 1:], terms)


def in_theorem_range(k, n, m: int, xi, mu, geom: Geometry) -> bool:
    """n + k²/(2mH³) < −(H³/24)m³(1 − µ/m^ξ), i.e. η < µ/m^ξ."""
    k, n = as_q(k), as_q(n)
    h = geom.h3
    top = Fraction(h * m ** 3, 24)
    eta = (n + k * k / (2 * m * h) + top) / top
    return mu_over_mxi_exceeds(eta, m, xi, mu)


def compare_modulo(a: LaurentSeries, b: LaurentSeries, m: int, xi, mu, geom: Geometry) -> list[tuple]:
    """Positions (k, n) in the common window where the coefficients differ,
    restricted to n + k²/(2mH³) < −(H³/24)m³(1 − µ/m^ξ)."""
    if a.names != ("x", "y") or b.names != ("x", "y"):
        raise DomainError("compare_modulo works on series in (x, y)")
    wa, wb = a.real_window(), b.real_window()
    common = [(max(p[0], q[0]), min(p[1], q[1])) for p, q in zip(wa.bounds, wb.bounds)]
    ca = {e: c for e, c in a.items()}
    cb = {e: c for e, c in b.items()}
    out = []
    for e in sorted(set(ca) | set(cb)):
        x, y = e
        if not (common[0][0] <= x <= common[0][1] and common[1][0] <= y <= common[1][1]):
            continue
        if not in_theorem_range(y, x, m, xi, mu, geom):
            continue
        if ca.get(e, 0) != cb.get(e, 0):
            out.append((norm(y), norm(x)))
    return sorted(out)


def dtpt_check(tableI, tableP, chiX: int, order: int) -> list[tuple]:
    """(k, n) where I(x, y) and M(−x)^{χ}·P(x, y) disagree, for n up to ``order``."""
    I, P = _entries(tableI), _entries(tableP)
    keys = list(I) + list(P)
    nlo = min([n for _, n in keys] + [0])
    klo = min([k for k, _ in keys] + [0])
    khi = max([k for k, _ in keys] + [0])
    if order < nlo:
        return []
    window = [(nlo, order), (klo, khi)]
    Is = table_to_series(I, window)
    Ps = table_to_series(P, window)
    M = embed(macmahon(-1, chiX, order - nlo), ("x", "y"))
    rhs = series_mul(M, Ps, window)
    diff = {}
    for e, c in Is.items():
        diff[e] = c
    for e, c in rhs.items():
        diff[e] = diff.get(e, 0) - c
    return sorted((norm(e[1]), norm(e[0])) for e, c in diff.items() if c != 0)
