"""Splittings v = v₁ + v₂ of a D4 class into shifted ideal-sheaf / pair classes.

For a class ``v = (0, m, -k, -n)`` and the B-field ``b = -k/(mH³)`` each term
of the wall-crossing sum is indexed by an integer m₁ with ``b - m < m₁ < b``
and curve data ``(k₁, n₁), (k₂, n₂)``::

    v₂ =  e^{m₂H}(1, 0, -k₂, -n₂),   v₁ = -e^{m₁H}(1, 0, -k₁, -n₁),   m₂ = m₁ + m

Conservation of ch₂ and ch₃ fixes (k₂, n₂) from (k₁, n₁); both sides are then
cut to the box C(m, ε) = {0 ≤ k < εm², |n| < εm³}.

The DT4 value weights each term with ``(-1)^{χ-1} χ · I(k₂, n₂) · P(k₁, -n₁)``
where χ = χ(v₂, v₁).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Optional

from dtwall._rational import as_q, norm
from dtwall.errors import DomainError, IntegralityError
from dtwall.numclass import (
    Geometry,
    NumClass,
    b_twist,
    choose_b,
    class_d4,
    euler_pairing,
    eta as eta_of,
    twist_exp,
)
from dtwall.tilt import check_bg, check_bmt, wall_u_for, wall_window

log = logging.getLogger(__name__)


# -- the cut-off box ---------------------------------------------------------


def strict_int_bound(coef, m: int, exponent) -> int:
    """Largest integer L with ``L < coef · m^exponent`` (coef > 0, exponent rational).

    Exact: ``x < c·m^{p/q}`` is tested as ``x^q < c^q · m^p`` for x > 0.
    """
    coef, exponent = as_q(coef), as_q(exponent)
    if coef <= 0:
        raise DomainError(f"box coefficient must be positive, got {coef}")
    p, q = exponent.numerator, exponent.denominator
    rhs = coef ** q * Fraction(m) ** p

    def below(x: int) -> bool:
        return x <= 0 or Fraction(x) ** q < rhs

    guess = int(math.floor(float(coef) * float(m) ** float(exponent)))
    guess = max(guess, 0)
    while not below(guess):
        guess -= 1
    while below(guess + 1):
        guess += 1
    return guess


@dataclass(frozen=True)
class Box:
    """Integer form of C(m, ε): ``0 ≤ k ≤ kmax`` and ``|n| ≤ nmax``."""

    kmax: int
    nmax: int

    @classmethod
    def from_epsilon(cls, m: int, epsilon) -> "Box":
        epsilon = as_q(epsilon)
        if epsilon <= 0:
            raise DomainError(f"epsilon must be positive, got {epsilon}")
        return cls(strict_int_bound(epsilon, m, 2), strict_int_bound(epsilon, m, 3))

    @classmethod
    def from_xi_mu(cls, m: int, xi, mu, geom: Geometry) -> "Box":
        """Box for ε = δ/m^ξ with δ = µH³/2; ξ may be any rational."""
        xi, mu = as_q(xi), as_q(mu)
        if mu <= 0:
            raise DomainError(f"mu must be positive, got {mu}")
        delta = mu * geom.h3 / 2
        return cls(strict_int_bound(delta, m, 2 - xi), strict_int_bound(delta, m, 3 - xi))

    def contains(self, k: int, n: int) -> bool:
        return 0 <= k <= self.kmax and -self.nmax <= n <= self.nmax


def table_box(m: int, epsilon=None, xi=None, mu=None, geom: Geometry | None = None) -> Box:
    if epsilon is not None:
        return Box.from_epsilon(m, epsilon)
    if xi is None or mu is None or geom is None:
        raise DomainError("need either epsilon or (xi, mu, geometry)")
    return Box.from_xi_mu(m, xi, mu, geom)


# -- splittings --------------------------------------------------------------


@dataclass(frozen=True)
class Splitting:
    m1: int
    m2: int
    k1: int
    n1: int
    k2: int
    n2: int
    b: Fraction
    v1: NumClass
    v2: NumClass
    u0: Optional[Fraction]
    chi: Fraction

    def twisted(self, geom: Geometry) -> tuple[NumClass, NumClass]:
        return b_twist(self.v1, self.b, geom), b_twist(self.v2, self.b, geom)

    @property
    def d1(self) -> Fraction:
        return self.b - self.m1

    @property
    def d2(self) -> Fraction:
        return self.m2 - self.b


def ideal_class(mi: int, ki: int, ni: int, geom: Geometry) -> NumClass:
    """``e^{mi H}(1, 0, -ki, -ni)``."""
    return twist_exp(NumClass.of(1, 0, -ki, -ni), mi, geom)


def m1_range(m: int, b: Fraction) -> range:
    """Integers strictly between b - m and b."""
    lo = math.floor(b - m) + 1
    hi = math.ceil(b) - 1
    return range(lo, hi + 1)


@dataclass(frozen=True)
class _Shift:
    """Integer bookkeeping for one m₁: k₂ = k₁ + dk and n₂ = n₁ + c0 + c1·k₁."""

    m1: int
    m2: int
    dk: int
    c0: int
    c1: int


def _shift(m: int, k: int, n: int, m1: int, geom: Geometry) -> Optional[_Shift]:
    h = geom.h3
    m2 = m1 + m
    dk = k + Fraction(h, 2) * (m2 * m2 - m1 * m1)
    if dk.denominator != 1:
        return None
    cube = Fraction(h, 6) * (m1 ** 3 - m2 ** 3)
    if cube.denominator != 1:
        return None
    dk = int(dk)
    # n₂ = n + n₁ − m₂k₂ + m₁k₁ − (H³/6)(m₁³ − m₂³), with k₂ = k₁ + dk
    c0 = n - m2 * dk - int(cube)
    c1 = m1 - m2
    return _Shift(m1, m2, dk, c0, c1)


def _make(m1, m2, k1, n1, k2, n2, b, geom) -> Splitting:
    v1 = -ideal_class(m1, k1, n1, geom)
    v2 = ideal_class(m2, k2, n2, geom)
    u0 = wall_u_for(b_twist(v2, b, geom), geom)
    chi = euler_pairing(v2, v1, geom)
    return Splitting(m1, m2, k1, n1, k2, n2, b, v1, v2, u0, chi)


def _enumerate_box(m: int, k: int, n: int, box: Box, geom: Geometry) -> list[Splitting]:
    b = choose_b(m, k, geom)
    out = []
    for m1 in m1_range(m, b):
        sh = _shift(m, k, n, m1, geom)
        if sh is None:
            continue
        for k1 in range(0, box.kmax + 1):
            k2 = k1 + sh.dk
            if not 0 <= k2 <= box.kmax:
                continue
            c = sh.c0 + sh.c1 * k1
            lo = max(-box.nmax, -box.nmax - c)
            hi = min(box.nmax, box.nmax - c)
            for n1 in range(lo, hi + 1):
                out.append(_make(m1, sh.m2, k1, n1, k2, n1 + c, b, geom))
    return out


def enumerate_splittings(m: int, k: int, n: int, epsilon, geom: Geometry) -> list[Splitting]:
    """All splittings of class_d4(m, k, n) with both curve pairs in C(m, ε).

    Sorted by (m₁, k₁, n₁).
    """
    if m < 1:
        raise DomainError(f"divisor multiple m must be >= 1, got {m}")
    return _enumerate_box(m, k, n, Box.from_epsilon(m, epsilon), geom)


def count_splittings(m: int, k: int, n: int, box: Box, geom: Geometry) -> int:
    """Size of the enumeration without materialising it."""
    b = choose_b(m, k, geom)
    total = 0
    for m1 in m1_range(m, b):
        sh = _shift(m, k, n, m1, geom)
        if sh is None:
            continue
        for k1 in range(0, box.kmax + 1):
            if not 0 <= k1 + sh.dk <= box.kmax:
                continue
            c = sh.c0 + sh.c1 * k1
            total += max(0, min(box.nmax, box.nmax - c) - max(-box.nmax, -box.nmax - c) + 1)
    return total


# -- the DT4 sum -------------------------------------------------------------


def wall_sign_weight(chi) -> int:
    """``(-1)^{χ-1} χ`` for integral χ."""
    chi = as_q(chi)
    if chi.denominator != 1:
        raise IntegralityError(f"Euler pairing {chi} is not an integer; check H3 and c2H")
    c = int(chi)
    return -c if c % 2 == 0 else c


@dataclass
class DT4Result:
    m: int
    k: int
    n: int
    value: Fraction | int
    terms: int = 0
    splittings: int = 0
    missing: int = 0
    box: Box | None = None

    @property
    def missing_warning(self) -> bool:
        return self.missing > 0


def _lookup(table):
    if table is None:
        return {}
    entries = getattr(table, "entries", table)
    return entries


def dt4_from_splittings(splittings: Iterable[Splitting], tableI, tableP) -> Fraction | int:
    """Reference evaluation of the sum, one splitting at a time."""
    I, P = _lookup(tableI), _lookup(tableP)
    total = 0
    for sp in splittings:
        w = wall_sign_weight(sp.chi)
        a = I.get((sp.k2, sp.n2))
        c = P.get((sp.k1, -sp.n1))
        if a is None or c is None:
            continue
        total += w * a * c
    return norm(as_q(total))


@lru_cache(maxsize=4096)
def _chi_basis(m: int, m1: int, geom: Geometry) -> tuple[tuple[Fraction, Fraction, Fraction], ...]:
    """Pairings χ(w, u) for w in (v(0,0), ∂_k v, ∂_n v) and u in (v₁(0,0), ∂_k₁ v₁, ∂_n₁ v₁)."""
    v0 = class_d4(m, 0, 0)
    vs = (v0, class_d4(m, 1, 0) - v0, class_d4(m, 0, 1) - v0)
    base = -ideal_class(m1, 0, 0, geom)
    us = (base, -ideal_class(m1, 1, 0, geom) - base, -ideal_class(m1, 0, 1, geom) - base)
    return tuple(tuple(euler_pairing(w, u, geom) for u in us) for w in vs)


def _chi_affine(m: int, k: int, n: int, m1: int, geom: Geometry) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients of χ(v₂, v₁) = A + B·k₁ + C·n₁ for fixed m₁.

    v₂ = v − v₁ and χ is antisymmetric, so χ(v₂, v₁) = χ(v, v₁), which is
    bilinear in (v, v₁); both classes are affine in their (k, n) labels.
    """
    p0, pk, pn = _chi_basis(m, m1, geom)
    return tuple(p0[j] + k * pk[j] + n * pn[j] for j in range(3))


def dt4_sum(m: int, k: int, n: int, box: Box, geom: Geometry, tableI, tableP,
            p_rows: dict | None = None) -> DT4Result:
    """Evaluate the sum over splittings in ``box``, driven by the P-table support.

    Only splittings whose P entry exists can contribute, so the loop runs over
    P entries and looks up I. The number of skipped (missing-entry) splittings
    is reported in ``missing``.
    """
    if m < 1:
        raise DomainError(f"divisor multiple m must be >= 1, got {m}")
    I = _lookup(tableI)
    if p_rows is None:
        p_rows = p_rows_in_box(tableP, box)
    b = choose_b(m, k, geom)
    total = 0
    terms = 0
    for m1 in m1_range(m, b):
        sh = _shift(m, k, n, m1, geom)
        if sh is None:
            continue
        A, B, C = _chi_affine(m, k, n, m1, geom)
        integral = A.denominator == B.denominator == C.denominator == 1
        if integral:
            A, B, C = int(A), int(B), int(C)
        for k1 in range(max(0, -sh.dk), min(box.kmax, box.kmax - sh.dk) + 1):
            row = p_rows.get(k1)
            if not row:
                continue
            k2 = k1 + sh.dk
            c = sh.c0 + sh.c1 * k1
            chi_k = A + B * k1
            for n1, pval in row:
                n2 = n1 + c
                if n2 > box.nmax or n2 < -box.nmax:
                    continue
                ival = I.get((k2, n2))
                if ival is None:
                    continue
                chi = chi_k + C * n1
                if not integral and Fraction(chi).denominator != 1:
                    raise IntegralityError(
                        f"Euler pairing {chi} at m1={m1}, k1={k1}, n1={n1} is not an integer; "
                        "check H3 and c2H"
                    )
                chi = int(chi)
                w = -chi if chi % 2 == 0 else chi
                total += w * ival * pval
                terms += 1
    count = count_splittings(m, k, n, box, geom)
    return DT4Result(m, k, n, norm(as_q(total)), terms, count, count - terms, box)


def p_rows_in_box(tableP, box: Box) -> dict[int, list[tuple[int, object]]]:
    """P entries regrouped as k₁ → [(n₁, value)] with n₁ = −n, restricted to the box."""
    rows: dict[int, list] = {}
    for (kk, nn), val in sorted(_lookup(tableP).items()):
        n1 = -nn
        if box.contains(kk, n1):
            rows.setdefault(kk, []).append((n1, val))
    return rows


def dt4_via_wallcross(m: int, k: int, n: int, xi, mu, geom: Geometry, tableI, tableP,
                      epsilon=None) -> Fraction | int:
    """DT4 of class_d4(m, k, n) with C(m, ε), ε = δ/m^ξ, δ = µH³/2.

    ``epsilon`` overrides the ε derived from (ξ, µ).
    """
    box = table_box(m, epsilon, xi, mu, geom)
    res = dt4_sum(m, k, n, box, geom, tableI, tableP)
    if res.missing:
        log.debug("dt4(%s,%s,%s): %d splittings had no table entry", m, k, n, res.missing)
    return res.value


# -- walls -------------------------------------------------------------------


def admissible(sp: Splitting, m: int, k: int, n: int, geom: Geometry) -> bool:
    """Numerical conditions every genuine wall splitting must meet.

    Positive wall location, Bogomolov-Gieseker on both twisted factors, and
    the BMT inequality at u₀ on both factors and on the D4 class itself.
    """
    if sp.u0 is None:
        return False
    w1, w2 = sp.twisted(geom)
    if not (check_bg(w1, geom) and check_bg(w2, geom)):
        return False
    vB = b_twist(class_d4(m, k, n), sp.b, geom)
    return (
        check_bmt(w1, sp.u0, geom)
        and check_bmt(w2, sp.u0, geom)
        and check_bmt(vB, sp.u0, geom)
    )


def admissible_splittings(m: int, k: int, n: int, epsilon, geom: Geometry) -> list[Splitting]:
    """Same as filtering :func:`enumerate_splittings` by :func:`admissible`, but pruned.

    All conditions except the factor BMT bounds depend on k₁ alone; the two
    factor BMT bounds cut n₁ to an interval.
    """
    if m < 1:
        raise DomainError(f"divisor multiple m must be >= 1, got {m}")
    box = Box.from_epsilon(m, epsilon)
    h = geom.h3
    b = choose_b(m, k, geom)
    vB = b_twist(class_d4(m, k, n), b, geom)
    out = []
    for m1 in m1_range(m, b):
        sh = _shift(m, k, n, m1, geom)
        if sh is None:
            continue
        d1, d2 = b - m1, sh.m2 - b
        for k1 in range(0, box.kmax + 1):
            k2 = k1 + sh.dk
            if not 0 <= k2 <= box.kmax:
                continue
            g2 = -k2 + d2 * d2 * h / 2
            u0 = 6 * g2 / h
            if u0 <= 0:
                continue
            g1 = k1 - d1 * d1 * h / 2
            if d1 * d1 * h + 2 * g1 < 0 or d2 * d2 * h - 2 * g2 < 0:
                continue
            if vB.s > u0 * m * h / 18:
                continue
            c = sh.c0 + sh.c1 * k1
            # s₁ᴮ = n₁ − d₁k₁ + d₁³H³/6 ≤ u₀d₁H³/18
            hi1 = u0 * d1 * h / 18 + d1 * k1 - d1 ** 3 * h / 6
            # s₂ᴮ = −n₂ − d₂k₂ + d₂³H³/6 ≤ u₀d₂H³/18
            lo2 = -(u0 * d2 * h / 18) - d2 * k2 + d2 ** 3 * h / 6
            lo = max(-box.nmax, -box.nmax - c, math.ceil(lo2) - c)
            hi = min(box.nmax, box.nmax - c, math.floor(hi1))
            for n1 in range(lo, hi + 1):
                sp = _make(m1, sh.m2, k1, n1, k2, n1 + c, b, geom)
                if admissible(sp, m, k, n, geom):
                    out.append(sp)
    return out


@dataclass
class WallReport:
    m: int
    k: int
    n: int
    eta: Fraction
    walls: list[tuple[Fraction, list[Splitting]]] = field(default_factory=list)
    window: Optional[tuple[Fraction, Fraction]] = None

    @property
    def u_values(self) -> list[Fraction]:
        return [u for u, _ in self.walls]


def group_walls(splittings: Iterable[Splitting]) -> list[tuple[Fraction, list[Splitting]]]:
    groups: dict[Fraction, list[Splitting]] = {}
    for sp in splittings:
        if sp.u0 is not None:
            groups.setdefault(sp.u0, []).append(sp)
    return [(u, groups[u]) for u in sorted(groups, reverse=True)]


def find_walls(m: int, k: int, n: int, epsilon, geom: Geometry) -> WallReport:
    """Admissible splittings in C(m, ε) grouped by wall location, largest u₀ first."""
    e = eta_of(m, k, n, geom)
    window = wall_window(m, e, geom) if e >= 0 else None
    walls = group_walls(admissible_splittings(m, k, n, epsilon, geom))
    return WallReport(m, k, n, e, walls, window)


# -- extreme polar bounds ----------------------------------------------------


@dataclass(frozen=True)
class PolarCheck:
    splitting: Splitting
    k_ok: bool
    n_ok: bool
    d_ok: bool
    g_ok: bool
    boundary: bool

    @property
    def passes(self) -> bool:
        return self.k_ok and self.n_ok and self.d_ok and self.g_ok


@dataclass
class PolarReport:
    m: int
    eta: Fraction
    checks: list[PolarCheck]

    @property
    def all_pass(self) -> bool:
        return all(c.passes for c in self.checks)


def extreme_polar_band(m: int, eta) -> tuple[Fraction, Fraction]:
    """Open u-interval (¾m²(1−2η/3)², ¾m²(1+2η/3)²) forced by the g-bounds."""
    eta = as_q(eta)
    q = Fraction(3 * m * m, 4)
    return q * (1 - 2 * eta / 3) ** 2, q * (1 + 2 * eta / 3) ** 2


def _polar_one(sp: Splitting, m: int, eta: Fraction, geom: Geometry) -> PolarCheck:
    h = geom.h3
    kb = eta * h * m * m / 2
    nb = eta * h * m ** 3 / 2
    db = m * eta / 3
    w1, w2 = sp.twisted(geom)
    glo = Fraction(h, 8) * m * m * (1 - 2 * eta / 3) ** 2
    ghi = Fraction(h, 8) * m * m * (1 + 2 * eta / 3) ** 2
    ks, ns = (sp.k1, sp.k2), (abs(sp.n1), abs(sp.n2))
    ds = (abs(sp.d1 - Fraction(m, 2)), abs(sp.d2 - Fraction(m, 2)))
    gs = (-w1.g, w2.g)  # (−1)^i g_iᴮ

    k_ok = all(x < kb for x in ks)
    n_ok = all(x < nb for x in ns)
    d_ok = all(x < db for x in ds)
    g_ok = all(glo < x < ghi for x in gs)
    weak = (
        all(x <= kb for x in ks)
        and all(x <= nb for x in ns)
        and all(x <= db for x in ds)
        and all(glo <= x <= ghi for x in gs)
    )
    strict = k_ok and n_ok and d_ok and g_ok
    return PolarCheck(sp, k_ok, n_ok, d_ok, g_ok, weak and not strict)


def validate_extreme_polar(splittings: Iterable[Splitting], m: int, eta_val, geom: Geometry) -> PolarReport:
    eta_val = as_q(eta_val)
    if eta_val < 0:
        raise DomainError(f"extreme polar bounds need eta >= 0, got {eta_val}")
    return PolarReport(m, eta_val, [_polar_one(sp, m, eta_val, geom) for sp in splittings])
