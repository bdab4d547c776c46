from fractions import Fraction as F
from pathlib import Path

import pytest

from dtwall.errors import DomainError, IntegralityError
from dtwall.invariants import toy_degree0
from dtwall.numclass import Geometry
from dtwall.series import (
    LaurentSeries,
    assemble_zd6,
    compare_modulo,
    d4_sign_exponent,
    dtpt_check,
    dump_text,
    dz_at,
    euler_transform,
    gottsche,
    load_text,
    local_d4_series,
    macmahon,
    series_pow,
    table_to_series,
    zd6_m1_range,
)
from dtwall.wallcross import Box
from oracles import local_d4_oracle, naive_product, partition_numbers, plane_partition_count

GOLDEN = Path(__file__).parent / "golden"
G6 = Geometry(6, 12)
G5 = Geometry(5, 50)
TOY = {(0, 0): 1}


def coeffs(s, order):
    return [s.coefficient(i) for i in range(order + 1)]


def test_macmahon_counts_plane_partitions():
    assert coeffs(macmahon(1, 1, 10), 10) == [plane_partition_count(i) for i in range(11)]


def test_gottsche_counts_partitions():
    assert coeffs(gottsche(1, 20), 20) == partition_numbers(20)


@pytest.mark.parametrize("chi", [-3, -1, 0, 2, 5])
def test_gottsche_is_power_of_partition_series(chi):
    assert gottsche(chi, 12) == series_pow(gottsche(1, 12), chi)


@pytest.mark.parametrize("sign,power", [(-1, -2), (1, 3), (-1, 4), (1, -1), (-1, -200)])
def test_macmahon_powers_match_naive_product(sign, power):
    s = macmahon(sign, power, 10)
    assert coeffs(s, 10) == naive_product({n: n * power for n in range(1, 11)}, 10, arg_sign=sign)


def test_macmahon_minus_x_inverse_square():
    assert coeffs(macmahon(-1, -2, 4), 4) == [1, 2, -3, -2, 6]


def test_euler_transform_rejects_negative_order():
    with pytest.raises(DomainError):
        euler_transform(lambda n: 1, -1)


@pytest.mark.parametrize("geom", [G5, G6])
@pytest.mark.parametrize("m", range(1, 6))
def test_d4_sign_exponent_integral(geom, m):
    e = d4_sign_exponent(m, geom)
    assert e == F(geom.h3 * m ** 3, 6) + F(geom.c2h * m, 12)


def test_d4_sign_exponent_rejects_bad_geometry():
    with pytest.raises(IntegralityError):
        d4_sign_exponent(1, Geometry(5, 1))
    with pytest.raises(IntegralityError):
        local_d4_series(1, (0, 1), Geometry(5, 1), [(-5, 0), (-5, 5)])


def golden_cases():
    for name, geom in (("quintic", G5), ("h6", G6)):
        for m in (1, 2, 3):
            x0 = F(-geom.h3 * m ** 3, 6)
            xwin = (x0, x0 + 5)
            ywin = (-geom.h3 * m * m, geom.h3 * m * m)
            yield f"local_d4_{name}_m{m}.txt", geom, m, (-1, m + 1), xwin, ywin


CASES = list(golden_cases())


@pytest.mark.parametrize("fname,geom,m,a_range,xwin,ywin", CASES, ids=[c[0] for c in CASES])
def test_local_d4_matches_oracle_and_golden(fname, geom, m, a_range, xwin, ywin):
    s = local_d4_series(m, a_range, geom, [xwin, ywin])
    assert dict(s.items()) == local_d4_oracle(m, a_range, geom.h3, geom.c2h, xwin, ywin)
    text = dump_text(s)
    golden = (GOLDEN / fname).read_bytes()
    assert text.encode() == golden
    assert load_text(golden.decode()) == s
    # a second computation is byte-identical
    assert dump_text(local_d4_series(m, a_range, geom, [xwin, ywin])).encode() == golden


def test_local_d4_sign_and_leading_terms():
    # H³ = 6, c₂·H = 12, m = 1: e = 2, sign −1; a = 0 and a = 1 both sit at x^{−1}
    s = local_d4_series(1, (0, 1), G6, [(-1, 0), (-3, 3)])
    assert s.coefficient(-1, 3) == -1 and s.coefficient(-1, -3) == -1
    # next term: Göttsche with χ(P) = 18 gives 18 x
    assert s.coefficient(0, 3) == -18
    s5 = local_d4_series(1, (0, 0), G5, [(F(-5, 6), F(-5, 6)), (-5, 5)])
    # e = 5/6 + 50/12 = 5, sign +1
    assert dict(s5.items()) == {(F(-5, 6), F(5, 2)): 1}


def test_table_to_series():
    s = table_to_series({(0, 2): 3, (1, -1): 4})
    assert dict(s.items()) == {(F(2), F(0)): 3, (F(-1), F(1)): 4}
    assert table_to_series({}).is_zero()
    cut = table_to_series({(0, 2): 3, (1, -1): 4}, [(0, 5), (0, 5)])
    assert dict(cut.items()) == {(F(2), F(0)): 3}


def toy_zd6(m1_range=(-3, 2), window=((-6, 4), (-4, 4), (-2, 14))):
    return assemble_zd6(2, Box.from_xi_mu(2, 1, 1, G6), TOY, TOY, G6, m1_range, window)


def test_assemble_toy():
    z = toy_zd6()
    assert z.coefficient(-2, 0, 10) == 1
    d = dz_at(z, -1)
    assert d.coefficient(-2, 0) == -10
    assert dz_at(z, 1).coefficient(-2, 0) == 10


def test_assemble_stable_under_larger_m1_range():
    assert toy_zd6((-3, 2)) == toy_zd6((-10, 10))


def test_zd6_m1_range_covers_toy():
    lo, hi = zd6_m1_range(2, Box.from_xi_mu(2, 1, 1, G6), (-4, 4), G6)
    assert lo <= -1 <= hi
    assert toy_zd6((lo, hi)) == toy_zd6((-10, 10))


def test_dz_at():
    s = LaurentSeries.build(("x", "z"), [(0, 2), (-3, 3)], {(0, 2): 1, (1, -3): 2, (2, 0): 7})
    assert dict(dz_at(s, 1).items()) == {(F(0),): 2, (F(1),): -6}
    # z = −1: 2z → 2·(−1) = −2; −3·2 z^{−4} → −6
    assert dict(dz_at(s, -1).items()) == {(F(0),): -2, (F(1),): -6}
    bad = LaurentSeries.build(("x", "z"), [(0, 1), (0, 1)], {(0, F(1, 2)): 1})
    with pytest.raises(IntegralityError):
        dz_at(bad, -1)
    with pytest.raises(DomainError):
        dz_at(s, 0)


def test_compare_modulo():
    # m = 2, H³ = 6: η < 1/2 iff n + k²/24 < −1
    w = [(-5, 5), (0, 3)]
    a = LaurentSeries.build(("x", "y"), w, {(-2, 0): 1, (0, 0): 5, (-3, 2): 4})
    b = LaurentSeries.build(("x", "y"), w, {(-2, 0): 2, (0, 0): 6, (-3, 2): 4})
    assert compare_modulo(a, b, 2, 1, 1, G6) == [(0, -2)]
    assert compare_modulo(a, a, 2, 1, 1, G6) == []


@pytest.mark.parametrize("chi", [-200, -2, 0, 4])
def test_dtpt_on_toy_tables(chi):
    I, P = toy_degree0(chi, 10)
    assert dtpt_check(I, P, chi, 10) == []


def test_dtpt_detects_single_perturbation():
    I, P = toy_degree0(-2, 10)
    bad = dict(I.entries)
    bad[(0, 3)] = bad.get((0, 3), 0) + 1
    assert dtpt_check(bad, P, -2, 10) == [(0, 3)]


def regenerate():
    GOLDEN.mkdir(exist_ok=True)
    for fname, geom, m, a_range, xwin, ywin in CASES:
        s = local_d4_series(m, a_range, geom, [xwin, ywin])
        assert dict(s.items()) == local_d4_oracle(m, a_range, geom.h3, geom.c2h, xwin, ywin)
        (GOLDEN / fname).write_bytes(dump_text(s).encode())


if __name__ == "__main__":
    regenerate()
