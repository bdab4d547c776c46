"""Sparse truncated Laurent series in up to three variables.

Exponents of variable v live in ``(1/D_v)·Z`` and are stored as scaled
integers ``e·D_v``.  A series is a finite map from scaled exponent tuples to
nonzero exact coefficients together with a closed window per variable; every
stored exponent lies inside the window.

Products multiply the stored terms and keep what lands in the output window.
For two truncations of power series (window lower ends at the true minimal
exponents) the default output window is the one on which the product of the
truncations agrees with the product of the full series.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from dtwall._rational import as_q, norm
from dtwall.errors import DomainError, ScaleError

DEFAULT_SCALES = {"x": 6, "y": 2, "z": 12}


def default_scale(name: str) -> int:
    return DEFAULT_SCALES.get(name, 1)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True)
class SeriesWindow:
    """Closed per-variable exponent bounds, as exact rationals (unscaled)."""

    names: tuple[str, ...]
    bounds: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if len(self.names) != len(self.bounds):
            raise DomainError("window needs one (lo, hi) pair per variable")
        fixed = []
        for lo, hi in self.bounds:
            lo, hi = as_q(lo), as_q(hi)
            if lo > hi:
                raise DomainError(f"empty window [{lo}, {hi}]")
            fixed.append((lo, hi))
        object.__setattr__(self, "bounds", tuple(fixed))

    @classmethod
    def of(cls, **bounds) -> "SeriesWindow":
        names = tuple(bounds)
        return cls(names, tuple(bounds[n] for n in names))

    def scaled(self, scales: Sequence[int]) -> tuple[tuple[int, int], ...]:
        """Inward rounding to the lattice (1/D)Z."""
        return tuple(
            (math.ceil(lo * d), math.floor(hi * d)) for (lo, hi), d in zip(self.bounds, scales)
        )


class LaurentSeries:
    """Immutable sparse series. Construct through :meth:`build` or module helpers."""

    __slots__ = ("names", "scales", "window", "terms")

    def __init__(self, names, scales, window, terms: Mapping[tuple[int, ...], object], check=True):
        names = tuple(names)
        scales = tuple(int(d) for d in scales)
        window = tuple((int(lo), int(hi)) for lo, hi in window)
        if not 1 <= len(names) <= 3:
            raise DomainError("a series has one to three variables")
        if len(set(names)) != len(names):
            raise DomainError(f"repeated variable names {names}")
        if len(scales) != len(names) or len(window) != len(names):
            raise DomainError("scales and window must match the variables")
        if any(d < 1 for d in scales):
            raise ScaleError(f"scales must be positive, got {scales}")
        if check:
            clean = {}
            for e, c in terms.items():
                if c == 0:
                    continue
                e = tuple(e)
                if any(not lo <= x <= hi for x, (lo, hi) in zip(e, window)):
                    continue
                clean[e] = norm(c) if isinstance(c, Fraction) else c
            terms = clean
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "terms", dict(terms))

    def __setattr__(self, key, value):
        raise AttributeError("LaurentSeries is immutable")

    # -- construction --------------------------------------------------------

    @classmethod
    def build(cls, names: Sequence[str], window, terms: Mapping | Iterable = (), scales=None) -> "LaurentSeries":
        """From unscaled rational exponents.

        ``window`` is a :class:`SeriesWindow` or a sequence of (lo, hi).
        Scales start at the defaults and are raised to cover every exponent
        and window bound given.
        """
        names = tuple(names)
        bounds = window.bounds if isinstance(window, SeriesWindow) else tuple(window)
        bounds = tuple((as_q(lo), as_q(hi)) for lo, hi in bounds)
        items = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
        items = [(tuple(as_q(x) for x in e), as_q(c)) for e, c in items]
        if scales is None:
            scales = [default_scale(n) for n in names]
            for i in range(len(names)):
                for e, _ in items:
                    scales[i] = _lcm(scales[i], e[i].denominator)
                for b in bounds[i]:
                    scales[i] = _lcm(scales[i], b.denominator)
        scales = tuple(scales)
        win = []
        for (lo, hi), d in zip(bounds, scales):
            if lo > hi:
                raise DomainError(f"empty window [{lo}, {hi}]")
            win.append((math.ceil(lo * d), math.floor(hi * d)))
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in items:
            key = []
            for x, d in zip(e, scales):
                y = x * d
                if y.denominator != 1:
                    raise ScaleError(f"exponent {x} is not representable at scale {d}")
                key.append(int(y))
            key = tuple(key)
            out[key] = out.get(key, 0) + c
        return cls(names, scales, win, out)

    @classmethod
    def zero(cls, names, window, scales=None) -> "LaurentSeries":
        return cls.build(names, window, {}, scales)

    @classmethod
    def monomial(cls, names, exps, coeff=1, window=None, scales=None) -> "LaurentSeries":
        exps = tuple(as_q(e) for e in exps)
        if window is None:
            window = tuple((e, e) for e in exps)
        return cls.build(names, window, {exps: coeff}, scales)

    @classmethod
    def one(cls, names, window, scales=None) -> "LaurentSeries":
        return cls.monomial(names, (0,) * len(tuple(names)), 1, window, scales)

    # -- inspection ----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.names)

    def real_window(self) -> SeriesWindow:
        return SeriesWindow(
            self.names,
            tuple((Fraction(lo, d), Fraction(hi, d)) for (lo, hi), d in zip(self.window, self.scales)),
        )

    def coefficient(self, *exps) -> Fraction | int:
        key = []
        for x, d in zip(exps, self.scales):
            y = as_q(x) * d
            if y.denominator != 1:
                return 0
            key.append(int(y))
        return self.terms.get(tuple(key), 0)

    def items(self):
        """(unscaled exponent tuple, coefficient), lexicographic in exponents."""
        for e in sorted(self.terms):
            yield tuple(Fraction(x, d) for x, d in zip(e, self.scales)), self.terms[e]

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.names == other.names
            and self.scales == other.scales
            and self.window == other.window
            and self.terms == other.terms
        )

    __hash__ = None

    def __repr__(self):
        body = " + ".join(
            f"({c})*" + "*".join(f"{n}^{x}" for n, x in zip(self.names, e)) for e, c in self.items()
        )
        return f"LaurentSeries[{','.join(self.names)}]({body or '0'})"

    # -- reshaping -----------------------------------------------------------

    def rescaled(self, scales: Sequence[int]) -> "LaurentSeries":
        scales = tuple(scales)
        if scales == self.scales:
            return self
        f = []
        for new, old in zip(scales, self.scales):
            if new % old:
                raise ScaleError(f"cannot rescale from {old} to {new}")
            f.append(new // old)
        terms = {tuple(x * k for x, k in zip(e, f)): c for e, c in self.terms.items()}
        window = tuple((lo * k, hi * k) for (lo, hi), k in zip(self.window, f))
        return LaurentSeries(self.names, scales, window, terms, check=False)

    def restrict(self, window) -> "LaurentSeries":
        """Cut to a window (SeriesWindow or unscaled pairs), intersected with the current one."""
        bounds = window.bounds if isinstance(window, SeriesWindow) else tuple(window)
        win = []
        for (lo, hi), (slo, shi), d in zip(bounds, self.window, self.scales):
            a = max(math.ceil(as_q(lo) * d), slo)
            b = min(math.floor(as_q(hi) * d), shi)
            if a > b:
                raise DomainError("restricted window is empty")
            win.append((a, b))
        return LaurentSeries(self.names, self.scales, win, self.terms)

    def with_window_scaled(self, window) -> "LaurentSeries":
        return LaurentSeries(self.names, self.scales, window, self.terms)

    def shifted(self, exps) -> "LaurentSeries":
        """Multiply by the monomial with unscaled exponents ``exps``; window moves along."""
        shift = []
        for x, d in zip(exps, self.scales):
            y = as_q(x) * d
            if y.denominator != 1:
                raise ScaleError(f"shift {x} not representable at scale {d}")
            shift.append(int(y))
        terms = {tuple(a + b for a, b in zip(e, shift)): c for e, c in self.terms.items()}
        window = tuple((lo + s, hi + s) for (lo, hi), s in zip(self.window, shift))
        return LaurentSeries(self.names, self.scales, window, terms, check=False)

    def map_coefficients(self, fn) -> "LaurentSeries":
        return LaurentSeries(self.names, self.scales, self.window, {e: fn(c) for e, c in self.terms.items()})

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        return series_add(self, other)

    def __sub__(self, other):
        return series_add(self, -other)

    def __neg__(self):
        return LaurentSeries(self.names, self.scales, self.window, {e: -c for e, c in self.terms.items()}, check=False)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return series_mul(self, other)
        c = as_q(other)
        return LaurentSeries(self.names, self.scales, self.window, {e: v * c for e, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return series_pow(self, e)


def align(a: LaurentSeries, b: LaurentSeries) -> tuple[LaurentSeries, LaurentSeries]:
    """Bring two series to common scales (lcm per variable)."""
    if a.names != b.names:
        raise DomainError(f"incompatible variable sets {a.names} and {b.names}")
    scales = tuple(_lcm(x, y) for x, y in zip(a.scales, b.scales))
    return a.rescaled(scales), b.rescaled(scales)


def series_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Sum on the intersection of the two windows."""
    a, b = align(a, b)
    window = []
    for (alo, ahi), (blo, bhi) in zip(a.window, b.window):
        lo, hi = max(alo, blo), min(ahi, bhi)
        if lo > hi:
            raise DomainError("windows do not intersect")
        window.append((lo, hi))
    terms = dict(a.terms)
    for e, c in b.terms.items():
        terms[e] = terms.get(e, 0) + c
    return LaurentSeries(a.names, a.scales, window, terms)


def product_window(a: LaurentSeries, b: LaurentSeries) -> tuple[tuple[int, int], ...]:
    """Window on which the product of two truncations is exact."""
    return tuple(
        (alo + blo, min(ahi + blo, bhi + alo)) for (alo, ahi), (blo, bhi) in zip(a.window, b.window)
    )


def series_mul(a: LaurentSeries, b: LaurentSeries, window=None) -> LaurentSeries:
    """Product of stored terms, truncated to ``window``.

    ``window`` is a SeriesWindow / unscaled pairs; default :func:`product_window`.
    """
    a, b = align(a, b)
    if window is None:
        win = product_window(a, b)
    else:
        bounds = window.bounds if isinstance(window, SeriesWindow) else tuple(window)
        win = tuple(
            (math.ceil(as_q(lo) * d), math.floor(as_q(hi) * d)) for (lo, hi), d in zip(bounds, a.scales)
        )
    if any(lo > hi for lo, hi in win):
        raise DomainError("product window is empty")
    return LaurentSeries(a.names, a.scales, win, _mul_terms(a.terms, b.terms, win), check=False)


def _mul_terms(ta, tb, win) -> dict:
    if len(ta) > len(tb):
        ta, tb = tb, ta
    bitems = sorted(tb.items())
    first = [e[0] for e, _ in bitems]
    lo0, hi0 = win[0]
    out: dict = {}
    nv = len(win)
    if nv == 1:
        for (ea,), ca in ta.items():
            i = bisect_left(first, lo0 - ea)
            j = bisect_right(first, hi0 - ea)
            for (eb,), cb in bitems[i:j]:
                key = (ea + eb,)
                out[key] = out.get(key, 0) + ca * cb
    elif nv == 2:
        lo1, hi1 = win[1]
        for (a0, a1), ca in ta.items():
            i = bisect_left(first, lo0 - a0)
            j = bisect_right(first, hi0 - a0)
            for (b0, b1), cb in bitems[i:j]:
                e1 = a1 + b1
                if lo1 <= e1 <= hi1:
                    key = (a0 + b0, e1)
                    out[key] = out.get(key, 0) + ca * cb
    else:
        lo1, hi1 = win[1]
        lo2, hi2 = win[2]
        for (a0, a1, a2), ca in ta.items():
            i = bisect_left(first, lo0 - a0)
            j = bisect_right(first, hi0 - a0)
            for (b0, b1, b2), cb in bitems[i:j]:
                e1 = a1 + b1
                if not lo1 <= e1 <= hi1:
                    continue
                e2 = a2 + b2
                if lo2 <= e2 <= hi2:
                    key = (a0 + b0, e1, e2)
                    out[key] = out.get(key, 0) + ca * cb
    return {e: norm(c) for e, c in out.items() if c != 0}


def series_inverse(a: LaurentSeries) -> LaurentSeries:
    """Inverse of a series with nonzero constant term and non-negative window.

    Written a = c(1 + t); the geometric sum of -t terminates because every
    term of t raises some exponent and the window is bounded.
    """
    if any(lo < 0 for lo, _ in a.window):
        raise DomainError("inverse needs a window with non-negative lower ends")
    zero = (0,) * a.nvars
    c = a.terms.get(zero, 0)
    if c == 0:
        raise DomainError("inverse needs a nonzero constant term")
    c = as_q(c)
    t = {e: as_q(v) / c for e, v in a.terms.items() if e != zero}
    win = tuple((0, hi) for _, hi in a.window)
    result = {zero: Fraction(1)}
    power = {zero: Fraction(1)}
    neg_t = {e: -v for e, v in t.items()}
    while power:
        power = _mul_terms(power, neg_t, win)
        for e, v in power.items():
            result[e] = result.get(e, 0) + v
    return LaurentSeries(a.names, a.scales, win, {e: v / c for e, v in result.items()})


def series_pow(a: LaurentSeries, e: int, window=None) -> LaurentSeries:
    """Integer power by repeated squaring; negative powers go through :func:`series_inverse`."""
    if int(e) != e:
        raise DomainError("series_pow takes integer exponents")
    e = int(e)
    if e < 0:
        a = series_inverse(a)
        e = -e
    if e == 0:
        zero = (0,) * a.nvars
        return LaurentSeries(a.names, a.scales, a.window, {zero: 1})
    result = None
    base = a
    while e:
        if e & 1:
            result = base if result is None else series_mul(result, base, window)
        e >>= 1
        if e:
            base = series_mul(base, base, window)
    return result if window is None else result.restrict(window)


def embed(s: LaurentSeries, names: Sequence[str], window=None) -> LaurentSeries:
    """View ``s`` inside a larger variable set; new variables get exponent 0.

    ``window`` gives unscaled bounds for the new variables (default (0, 0)).
    """
    names = tuple(names)
    missing = [n for n in s.names if n not in names]
    if missing:
        raise DomainError(f"variables {missing} are not in {names}")
    extra = dict(window or {})
    idx = [s.names.index(n) if n in s.names else None for n in names]
    scales = []
    win = []
    for n, i in zip(names, idx):
        if i is None:
            d = default_scale(n)
            lo, hi = extra.get(n, (0, 0))
            scales.append(d)
            win.append((math.ceil(as_q(lo) * d), math.floor(as_q(hi) * d)))
        else:
            scales.append(s.scales[i])
            win.append(s.window[i])
    terms = {tuple(e[i] if i is not None else 0 for i in idx): c for e, c in s.terms.items()}
    return LaurentSeries(names, scales, win, terms)


def drop_variable(s: LaurentSeries, name: str) -> LaurentSeries:
    """Sum over the exponent of ``name`` (i.e. set that variable to 1)."""
    i = s.names.index(name)
    if s.nvars == 1:
        raise DomainError("cannot drop the only variable")
    names = s.names[:i] + s.names[i + 1:]
    terms: dict = {}
    for e, c in s.terms.items():
        key = e[:i] + e[i + 1:]
        terms[key] = terms.get(key, 0) + c
    return LaurentSeries(names, s.scales[:i] + s.scales[i + 1:], s.window[:i] + s.window[i + 1:], terms)


def substitute_monomial(s: LaurentSeries, rules: Mapping[str, Mapping[str, object]],
                        out_names: Sequence[str] | None = None, window=None,
                        out_scales: Sequence[int] | None = None) -> LaurentSeries:
    """Replace each variable v of ``s`` by the monomial ``Π_w w^{rules[v][w]}``.

    A term with exponents (e_v) goes to exponents ``f_w = Σ_v e_v·rules[v][w]``.
    Output scales default to the smallest ones (≥ defaults) holding every
    produced exponent; fixed ``out_scales`` that cannot represent one raise
    ScaleError. The default output window is the bounding box of the images
    of the input window corners.
    """
    for v in s.names:
        if v not in rules:
            raise DomainError(f"no substitution rule for variable {v!r}")
    if out_names is None:
        seen: list[str] = []
        for v in s.names:
            for w in rules[v]:
                if w not in seen:
                    seen.append(w)
        out_names = tuple(sorted(seen, key=lambda n: ("xyz".find(n) if n in "xyz" else 3, n)))
    out_names = tuple(out_names)
    mat = [[as_q(rules[v].get(w, 0)) for w in out_names] for v in s.names]
    for v in s.names:
        for w in rules[v]:
            if w not in out_names:
                raise DomainError(f"rule for {v!r} uses unknown output variable {w!r}")

    def image(e_scaled: Sequence[int]) -> list[Fraction]:
        ex = [Fraction(x, d) for x, d in zip(e_scaled, s.scales)]
        return [sum((ex[i] * mat[i][j] for i in range(len(ex))), Fraction(0)) for j in range(len(out_names))]

    images = [(image(e), c) for e, c in s.terms.items()]
    corners = [[]]
    for lo, hi in s.window:
        corners = [c + [x] for c in corners for x in (lo, hi)]
    corner_images = [image(c) for c in corners]

    if out_scales is None:
        scales = [default_scale(n) for n in out_names]
        for img, _ in images:
            for j, f in enumerate(img):
                scales[j] = _lcm(scales[j], f.denominator)
    else:
        scales = list(out_scales)

    if window is None:
        bounds = [
            (min(ci[j] for ci in corner_images), max(ci[j] for ci in corner_images))
            for j in range(len(out_names))
        ]
    else:
        bounds = list(window.bounds if isinstance(window, SeriesWindow) else window)
    win = tuple((math.ceil(as_q(lo) * d), math.floor(as_q(hi) * d)) for (lo, hi), d in zip(bounds, scales))

    terms: dict = {}
    for img, c in images:
        key = []
        for f, d in zip(img, scales):
            y = f * d
            if y.denominator != 1:
                raise ScaleError(f"exponent {f} is not representable at scale {d}")
            key.append(int(y))
        key = tuple(key)
        terms[key] = terms.get(key, 0) + c
    return LaurentSeries(out_names, scales, win, terms)
