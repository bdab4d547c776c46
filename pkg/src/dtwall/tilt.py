"""Tilt slopes in the squared parameter ``u = t^2`` and the inequality checkers.

With ω = tH and t > 0, the tilt slope of a B-twisted class is a positive
multiple of ``ρ_u = (g − (u/6)H³r) / d``, so every sign test and ordering is
done on ρ_u with exact rationals.  ``t`` itself is never formed.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Optional

from dtwall._rational import as_q
from dtwall.errors import DomainError
from dtwall.numclass import Geometry, NumClass, eta as eta_of


@dataclass(frozen=True)
class SlopeValue:
    """An element of ℚ ∪ {∞}. ``value`` is None exactly when infinite."""

    kind: str
    value: Optional[Fraction] = None

    @property
    def infinite(self) -> bool:
        return self.kind == "infinite"

    def __str__(self):
        return "inf" if self.infinite else str(self.value)


INFINITE = SlopeValue("infinite")


def reduced_slope(vB: NumClass, u, geom: Geometry) -> SlopeValue:
    u = as_q(u)
    if u <= 0:
        raise DomainError(f"u = t^2 must be positive, got {u}")
    if vB.d == 0:
        return INFINITE
    return SlopeValue("finite", (vB.g - u * geom.h3 * vB.r / 6) / vB.d)


def wall_u_for(vB: NumClass, geom: Geometry) -> Optional[Fraction]:
    """The u where ρ_u(vB) vanishes, or None if that u is not positive."""
    if vB.r == 0:
        raise DomainError("wall location needs a class of nonzero rank")
    u0 = 6 * vB.g / (geom.h3 * vB.r)
    return u0 if u0 > 0 else None


def wall_window(m: int, eta, geom: Geometry | None = None) -> tuple[Fraction, Fraction]:
    """Closed u-interval that may carry walls for a D4 class of defect η.

    The lower end rests on the conjectural BMT inequality; see
    :func:`validity_report` for how that dependence is labelled.
    """
    eta = as_q(eta)
    if eta < 0:
        raise DomainError(f"wall window needs eta >= 0, got {eta}")
    hi = Fraction(3 * m * m, 4)
    return max(Fraction(0), hi * (1 - eta)), hi


def bg_discriminant(vB: NumClass, geom: Geometry) -> Fraction:
    return vB.d * vB.d * geom.h3 - 2 * vB.r * vB.g


def check_bg(vB: NumClass, geom: Geometry) -> bool:
    """Classical Bogomolov-Gieseker: d²H³ − 2rg ≥ 0."""
    return bg_discriminant(vB, geom) >= 0


def check_bmt(vB: NumClass, u, geom: Geometry) -> bool:
    """BMT inequality s ≤ u·d·H³/18, only meaningful where ρ_u(vB) = 0."""
    u = as_q(u)
    rho = reduced_slope(vB, u, geom)
    if rho.infinite or rho.value != 0:
        raise DomainError(f"BMT check applies only on the slope-zero locus, got rho={rho}")
    return vB.s <= u * vB.d * geom.h3 / 18


def check_d4_bound(m: int, k: int, n: int, geom: Geometry) -> bool:
    """−H³m³/24 ≤ n + k²/(2mH³), i.e. η ≥ 0."""
    if m < 1:
        raise DomainError(f"divisor multiple m must be >= 1, got {m}")
    return Fraction(-geom.h3 * m ** 3, 24) <= n + Fraction(k * k, 2 * m * geom.h3)


def _check_xi(xi: Fraction):
    if xi < 1:
        raise DomainError(f"xi must be >= 1, got {xi}")


def mu_over_mxi_exceeds(eta, m: int, xi, mu) -> bool:
    """Exact test of η < µ/m^ξ for rational ξ = p/q (q > 0).

    For η ≥ 0 it is equivalent to η^q·m^p < µ^q, all integers-over-integers.
    """
    eta, xi, mu = as_q(eta), as_q(xi), as_q(mu)
    if mu <= 0:
        return eta < 0
    if eta < 0:
        return True
    p, q = xi.numerator, xi.denominator
    return eta ** q * Fraction(m) ** p < mu ** q


def stability_gap_positive(m: int, xi, mu) -> bool:
    """Whether 3m² − µm^{3−ξ} − 3m > 0.

    Written as µ·m^{3−ξ} < 3m² − 3m and compared after raising both sides to
    the power q, the denominator of ξ.
    """
    xi, mu = as_q(xi), as_q(mu)
    _check_xi(xi)
    if mu <= 0:
        raise DomainError(f"mu must be positive, got {mu}")
    rhs = Fraction(3 * m * m - 3 * m)
    if rhs <= 0:
        return False
    e = 3 - xi
    p, q = e.numerator, e.denominator
    # (µ m^{p/q})^q = µ^q m^p; both sides positive
    return mu ** q * Fraction(m) ** p < rhs ** q


def check_hcn(m: int, degC: int, N: int, geom: Geometry | None = None) -> bool:
    """Destabilising-curve degree bound m·(H·C) ≤ 3N."""
    return m * degC <= 3 * N


def mu_window_ok(xi, mu) -> bool:
    xi, mu = as_q(xi), as_q(mu)
    if xi > 1:
        return mu > 0
    if xi == 1:
        return 0 < mu < Fraction(3, 2)
    return False


@dataclass(frozen=True)
class ValidityReport:
    m: int
    k: int
    n: int
    eta: Fraction
    eta_nonneg: bool
    eta_below_mu_over_mxi: bool
    cond_eta: bool
    gap_positive: bool
    mu_window_ok: bool
    # wall_window's lower end is only as good as the BMT inequality
    lower_bound_status: str = "conditional on BMT"

    def as_dict(self) -> dict:
        out = asdict(self)
        out["eta"] = self.eta
        return out


def validity_report(m: int, k: int, n: int, xi, mu, geom: Geometry) -> ValidityReport:
    xi, mu = as_q(xi), as_q(mu)
    e = eta_of(m, k, n, geom)
    cond = 0 <= e < min(Fraction(3, 2 * m), Fraction(1, 2))
    if xi >= 1 and mu > 0:
        gap = stability_gap_positive(m, xi, mu)
    else:
        gap = False
    return ValidityReport(
        m=m,
        k=k,
        n=n,
        eta=e,
        eta_nonneg=e >= 0,
        eta_below_mu_over_mxi=mu_over_mxi_exceeds(e, m, xi, mu),
        cond_eta=cond,
        gap_positive=gap,
        mu_window_ok=mu_window_ok(xi, mu),
    )
