"""Chern-character arithmetic on a Calabi-Yau 3-fold with Pic(X) = Z·H.

Every even cohomology class is recorded by four rationals ``(r, d, g, s)``::

    r = ch_0,  ch_1 = d·H,  g = ch_2·H,  s = ∫ ch_3

Because every divisor is a multiple of H and every curve class is seen only
through its H-degree, all pairings in scope reduce to products of these four
numbers and the constants ``H^3`` and ``c_2(X)·H``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from dtwall._rational import as_q
from dtwall.errors import DomainError


@dataclass(frozen=True)
class Geometry:
    """Intersection data fixing all numerical evaluations.

    ``chiX`` is only used by degree-zero toy tables (the MacMahon exponent).
    """

    h3: int
    c2h: int
    chiX: int = 0
    id: str = ""

    def __post_init__(self):
        if int(self.h3) != self.h3 or self.h3 < 1:
            raise DomainError(f"H^3 must be a positive integer, got {self.h3!r}")
        if int(self.c2h) != self.c2h or int(self.chiX) != self.chiX:
            raise DomainError("c2H and chiX must be integers")

    @classmethod
    def from_dict(cls, data: dict) -> "Geometry":
        try:
            return cls(int(data["H3"]), int(data["c2H"]), int(data.get("chiX", 0)), str(data.get("id", "")))
        except KeyError as exc:
            raise DomainError(f"geometry is missing field {exc.args[0]!r}") from None

    @classmethod
    def load(cls, path) -> "Geometry":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        out = {"H3": self.h3, "c2H": self.c2h, "chiX": self.chiX}
        if self.id:
            out["id"] = self.id
        return out

    def chi_line_bundle(self, m) -> Fraction:
        """χ(O_X(mH)) = H³m³/6 + (c₂·H)m/12 (Riemann-Roch on a CY3)."""
        m = as_q(m)
        return Fraction(self.h3) * m ** 3 / 6 + Fraction(self.c2h) * m / 12


@dataclass(frozen=True)
class NumClass:
    """A Chern character ``(r, d, g, s)``; see the module docstring."""

    r: Fraction
    d: Fraction
    g: Fraction
    s: Fraction

    def __post_init__(self):
        for name in ("r", "d", "g", "s"):
            value = getattr(self, name)
            if not isinstance(value, Fraction):
                object.__setattr__(self, name, as_q(value))

    @classmethod
    def of(cls, r, d, g, s) -> "NumClass":
        return cls(as_q(r), as_q(d), as_q(g), as_q(s))

    def __iter__(self):
        return iter((self.r, self.d, self.g, self.s))

    def __add__(self, other: "NumClass") -> "NumClass":
        return NumClass(self.r + other.r, self.d + other.d, self.g + other.g, self.s + other.s)

    def __sub__(self, other: "NumClass") -> "NumClass":
        return NumClass(self.r - other.r, self.d - other.d, self.g - other.g, self.s - other.s)

    def __neg__(self) -> "NumClass":
        return NumClass(-self.r, -self.d, -self.g, -self.s)

    def scale(self, c) -> "NumClass":
        c = as_q(c)
        return NumClass(c * self.r, c * self.d, c * self.g, c * self.s)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.r, self.d, self.g, self.s)


@dataclass(frozen=True)
class CurvePoint:
    """Key of an invariant table: curve degree ``k = β·H`` and ``n = χ``."""

    k: int
    n: int

    def __post_init__(self):
        if self.k < 0:
            raise DomainError(f"curve degree must be non-negative, got k={self.k}")


UNIT = NumClass.of(1, 0, 0, 0)
POINT = NumClass.of(0, 0, 0, 1)


def twist_exp(v: NumClass, m, geom: Geometry) -> NumClass:
    """Multiply by ``e^{mH}``."""
    m = as_q(m)
    h = geom.h3
    r, d, g, s = v.r, v.d, v.g, v.s
    m2 = m * m / 2
    return NumClass(
        r,
        d + m * r,
        g + m * d * h + m2 * r * h,
        s + m * g + m2 * d * h + m2 * m / 3 * r * h,
    )


def b_twist(v: NumClass, b, geom: Geometry) -> NumClass:
    """Twisted Chern character ``ch^B = e^{-B} v`` with ``B = bH``."""
    return twist_exp(v, -as_q(b), geom)


def class_d4(m: int, k: int, n: int) -> NumClass:
    """Class ``(0, mH, -β, -n)`` of a torsion sheaf on a divisor in |mH|, with β·H = k."""
    if m < 1:
        raise DomainError(f"divisor multiple m must be >= 1, got {m}")
    return NumClass.of(0, m, -k, -n)


def choose_b(m: int, k: int, geom: Geometry) -> Fraction:
    """The B-field ``b = -k/(m H^3)`` that kills ch_2^B of :func:`class_d4`."""
    if m < 1:
        raise DomainError(f"divisor multiple m must be >= 1, got {m}")
    return Fraction(-k, m * geom.h3)


def eta(m: int, k: int, n, geom: Geometry) -> Fraction:
    """Normalised defect ``η = (n + k²/(2mH³) + H³m³/24) / (H³m³/24)``."""
    if m < 1:
        raise DomainError(f"divisor multiple m must be >= 1, got {m}")
    h = geom.h3
    top = Fraction(h * m ** 3, 24)
    return (as_q(n) + Fraction(k * k, 2 * m * h) + top) / top


def euler_pairing(a: NumClass, b: NumClass, geom: Geometry) -> Fraction:
    """Antisymmetric Euler form χ(a, b) reduced to the H-ladder.

    χ(a,b) = r_a s_b − d_a g_b + g_a d_b − r_b s_a + (c₂·H/12)(r_a d_b − r_b d_a)
    """
    c = Fraction(geom.c2h, 12)
    return (
        a.r * b.s
        - a.d * b.g
        + a.g * b.d
        - b.r * a.s
        + c * (a.r * b.d - b.r * a.d)
    )


def hilbert_poly(v: NumClass, b, geom: Geometry) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Coefficients ``(a3, a2, a1, a0)`` of χ(E, n) = ∫ ch^B(E) e^{nH} td_X."""
    w = b_twist(v, b, geom)
    h = Fraction(geom.h3)
    c = Fraction(geom.c2h, 12)
    return (w.r * h / 6, w.d * h / 2, w.g + w.r * c, w.s + w.d * c)
