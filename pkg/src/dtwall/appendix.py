"""Brute-force checks of the rank-weighted Bogomolov-type bound for sheaves
whose pushforward has a Harder-Narasimhan filtration by slope steps of at
most L² on a surface lattice.

For HN factors (r_i, l_i, s_i) with total (r, l, s) the bound reads::

    s ≤ (L²/24)(r³ − r) + l²/(2r)

and it is attained by O_{S_m} on the m-th thickening of a section.
"""
from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from dtwall._rational import as_q
from dtwall.errors import DomainError, SamplerExhausted

Vector = tuple


@dataclass(frozen=True)
class SurfaceLattice:
    """NS(S) of rank 1 or 2 with a symmetric integer Gram matrix of signature (1, rank−1)."""

    gram: tuple[tuple[int, ...], ...]
    L: Vector

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        L = tuple(as_q(x) for x in self.L)
        rank = len(gram)
        if rank not in (1, 2) or any(len(row) != rank for row in gram):
            raise DomainError("gram must be a 1x1 or 2x2 matrix")
        if any(gram[i][j] != gram[j][i] for i in range(rank) for j in range(rank)):
            raise DomainError("gram must be symmetric")
        if len(L) != rank:
            raise DomainError("L must have one coordinate per lattice rank")
        if rank == 1 and gram[0][0] <= 0:
            raise DomainError("rank-1 lattice needs a positive form")
        if rank == 2 and gram[0][0] * gram[1][1] - gram[0][1] ** 2 >= 0:
            # a 2x2 form has signature (1,1) exactly when det < 0
            raise DomainError("rank-2 lattice needs signature (1, 1)")
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "L", L)
        if self.dot(L, L) <= 0:
            raise DomainError("L must satisfy L·L > 0")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def dot(self, u: Sequence, v: Sequence) -> Fraction:
        g = self.gram
        if len(g) == 1:
            return as_q(u[0] * g[0][0] * v[0])
        return as_q(
            u[0] * (g[0][0] * v[0] + g[0][1] * v[1]) + u[1] * (g[1][0] * v[0] + g[1][1] * v[1])
        )

    def sq(self, u: Sequence) -> Fraction:
        return self.dot(u, u)

    @property
    def L2(self) -> Fraction:
        return self.dot(self.L, self.L)


def rank1_lattice(L2: int = 1) -> SurfaceLattice:
    return SurfaceLattice(((L2,),), (1,))


@dataclass(frozen=True)
class HNFactor:
    r: int
    l: Vector
    s: Fraction

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise DomainError(f"factor rank must be a positive integer, got {self.r}")
        object.__setattr__(self, "l", tuple(as_q(x) for x in self.l))
        object.__setattr__(self, "s", as_q(self.s))


@dataclass(frozen=True)
class HNData:
    factors: tuple[HNFactor, ...]

    def __post_init__(self):
        fs = tuple(f if isinstance(f, HNFactor) else HNFactor(*f) for f in self.factors)
        if not fs:
            raise DomainError("HN data needs at least one factor")
        object.__setattr__(self, "factors", fs)

    def total(self) -> tuple[int, Vector, Fraction]:
        r = sum(f.r for f in self.factors)
        dim = len(self.factors[0].l)
        l = tuple(sum((f.l[i] for f in self.factors), Fraction(0)) for i in range(dim))
        s = sum((f.s for f in self.factors), Fraction(0))
        return r, l, s


def slope(f: HNFactor, lat: SurfaceLattice) -> Fraction:
    return lat.dot(f.l, lat.L) / f.r


def hn_hypotheses_ok(data: HNData, lat: SurfaceLattice) -> bool:
    """Strictly decreasing slopes, steps of at most L², and l_i² ≥ 2 r_i s_i."""
    fs = data.factors
    if any(len(f.l) != lat.rank for f in fs):
        return False
    L2 = lat.L2
    for a, b in zip(fs, fs[1:]):
        mu_a, mu_b = slope(a, lat), slope(b, lat)
        if not mu_a > mu_b:
            return False
        if mu_a > mu_b + L2:
            return False
    return all(lat.sq(f.l) >= 2 * f.r * f.s for f in fs)


def rank_spread_sum(ranks: Sequence[int]) -> int:
    """Σ_{i<j} r_i r_j (j−i)²."""
    return sum(ranks[i] * ranks[j] * (j - i) ** 2 for i in range(len(ranks)) for j in range(i + 1, len(ranks)))


def spread_cap(r: int) -> Fraction:
    """r²(r²−1)/12 = Σ_{1≤i<j≤r} (j−i)²."""
    return Fraction(r * r * (r * r - 1), 12)


@dataclass
class InequalityReport:
    holds: bool
    slack: Fraction
    lhs: Fraction
    rhs: Fraction
    intermediate: Fraction = field(default=Fraction(0))


def appendix_inequality_holds(data: HNData, lat: SurfaceLattice, details: bool = False):
    """Returns (holds, slack) with slack = (L²/24)(r³−r) + l²/(2r) − s.

    Each step of the chain behind the bound is asserted exactly on the way;
    a failure there is a bug, never a finding about the data.
    """
    if not hn_hypotheses_ok(data, lat):
        raise DomainError("HN data violates the slope / Bogomolov hypotheses")
    r, l, s = data.total()
    L2 = lat.L2
    rhs = L2 * (r ** 3 - r) / 24 + lat.sq(l) / (2 * r)
    slack = rhs - s
    fs = data.factors

    # s − l²/(2r) ≤ Σ_{i<j} (r_j l_i − r_i l_j)²/(2 r_i r_j r), with equality when
    # every factor sits on its Bogomolov bound (Lagrange identity)
    pair_sum = Fraction(0)
    hodge_sum = Fraction(0)
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            a, b = fs[i], fs[j]
            w = tuple(b.r * x - a.r * y for x, y in zip(a.l, b.l))
            w2 = lat.sq(w)
            wL = lat.dot(w, lat.L)
            pair_sum += w2 / (2 * a.r * b.r * r)
            # Hodge index on a signature (1, ρ−1) lattice
            _require(w2 * L2 <= wL * wL, "Hodge index step")
            _require(0 < wL / (a.r * b.r) <= (j - i) * L2, "slope-step bound")
            hodge_sum += (wL * wL / L2) / (2 * a.r * b.r * r)
    bogomolov_total = sum((lat.sq(f.l) / (2 * f.r) for f in fs), Fraction(0))
    _require(bogomolov_total - lat.sq(l) / (2 * r) == pair_sum, "Lagrange identity")
    _require(s - lat.sq(l) / (2 * r) <= pair_sum, "intermediate bound")
    _require(pair_sum <= hodge_sum, "Hodge index sum")
    ranks = [f.r for f in fs]
    spread = rank_spread_sum(ranks)
    _require(spread <= spread_cap(r), "rank spread cap")
    _require(hodge_sum <= L2 * spread / (2 * r), "slope-step sum")
    if details:
        return InequalityReport(slack >= 0, slack, s, rhs, pair_sum)
    return slack >= 0, slack


def _require(cond: bool, what: str):
    if not cond:
        raise AssertionError(f"internal check failed: {what}")


def thickened_section_data(m: int, lat: SurfaceLattice) -> HNData:
    """Factors (1, −jL, j²L²/2) for j = 0..m−1."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    L2 = lat.L2
    return HNData(tuple(HNFactor(1, tuple(-j * x for x in lat.L), Fraction(j * j) * L2 / 2) for j in range(m)))


@dataclass(frozen=True)
class SampleBounds:
    """Box for the rejection sampler.

    ``offsets`` are subtracted from the Bogomolov value l²/(2r) to get s, so
    0 keeps a factor on the binding surface.
    """

    rmax: int = 3
    coord: int = 4
    offsets: tuple = (Fraction(0), Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3))
    retries: int = 2000


@lru_cache(maxsize=32)
def _grid(lat: SurfaceLattice, c: int):
    grid = [(x,) for x in range(-c, c + 1)]
    if lat.rank == 2:
        grid = [(x, y) for x in range(-c, c + 1) for y in range(-c, c + 1)]
    return grid, {l: lat.dot(l, lat.L) for l in grid}


def random_hn(seed: int, nfactors: int, bounds: SampleBounds | None = None,
              lat: SurfaceLattice | None = None) -> HNData:
    """Seeded sampler whose output always passes :func:`hn_hypotheses_ok`."""
    bounds = bounds or SampleBounds()
    lat = lat or rank1_lattice()
    if nfactors < 1:
        raise DomainError("nfactors must be >= 1")
    rng = random.Random(seed)
    L2 = lat.L2
    grid, degree = _grid(lat, bounds.coord)
    for _ in range(bounds.retries):
        factors = []
        prev = None
        for _i in range(nfactors):
            r = rng.randint(1, bounds.rmax)
            if prev is None:
                choices = grid
            else:
                # next slope µ must satisfy prev − L² ≤ µ < prev
                choices = [l for l in grid if prev - L2 <= degree[l] / r < prev]
            if not choices:
                break
            l = rng.choice(choices)
            off = as_q(rng.choice(bounds.offsets))
            factors.append(HNFactor(r, l, lat.sq(l) / (2 * r) - off))
            prev = degree[l] / r
        else:
            data = HNData(tuple(factors))
            if hn_hypotheses_ok(data, lat):
                return data
    raise SamplerExhausted(f"no admissible HN data after {bounds.retries} retries (seed {seed})")
