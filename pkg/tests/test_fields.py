import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skone.errors import FieldSyntaxError, PrecisionExhausted
from skone.fields import (
    FiniteField,
    LaurentExt,
    PAdicDescriptor,
    Rationals,
    RootAdjunction,
    is_nth_power,
    laurent_split,
    parse_field,
    primitive_root_of_unity,
)

TOWERS = ["Q", "F(7)", "F(49)", "F(121)", "Qp(5)", "Qp(2)",
          "Q((t))", "F(7)((t))", "Qp(5)((t1))((t2))",
          "Q[zeta_4]", "Q[zeta_2]", "Qp(13)[zeta_4]", "F(7)[zeta_3]",
          "Qp(13)[zeta_3]((t1))((t2))"]


@pytest.mark.parametrize("desc", TOWERS)
def test_parse_print_roundtrip(desc):
    tower = parse_field(desc)
    assert parse_field(str(tower)) == tower


def test_parse_examples():
    assert isinstance(parse_field("Q"), Rationals)
    t = parse_field("F(7)((t))")
    assert t.characteristic == 7
    assert [(v, str(k)) for v, k in t.residue_chain()] == [("t", "F(7)")]
    t = parse_field("Qp(5)((t1))((t2))")
    assert len(t.residue_chain()) == 2


def test_parse_errors():
    with pytest.raises(FieldSyntaxError):
        parse_field("F(6)")           # not a prime power
    with pytest.raises(FieldSyntaxError):
        parse_field("Qp(4)")          # not prime
    with pytest.raises(FieldSyntaxError):
        parse_field("F(7)[zeta_5]")   # mu_5 needs an explicit extension
    with pytest.raises(FieldSyntaxError):
        parse_field("Qp(2)[zeta_4]")  # wild adjunction rejected
    with pytest.raises(FieldSyntaxError):
        parse_field("Q((t))((t))")    # repeated variable
    parse_field("F(7^4)[zeta_5]")     # explicit extension works


@pytest.mark.parametrize("desc", ["Q", "F(7)", "F(49)", "Qp(5)", "Q((t))",
                                  "Q[zeta_4]", "F(7)((t))"])
def test_field_axioms(desc):
    tower = parse_field(desc)
    rng = random.Random(hash(desc) & 0xFFFF)
    for _ in range(1000):
        a, b, c = (tower.elem(rng.randint(-20, 20)) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * (b * c) == (a * b) * c
        assert a * (b + c) == a * b + a * c
        if not a.is_zero():
            assert (a * a.inverse()).is_one()


def test_laurent_axioms_with_monomials():
    QT = parse_field("Q((t))")
    rng = random.Random(5)
    for _ in range(300):
        a = QT.elem(rng.randint(-5, 5)) + \
            QT.monomial(rng.randint(-2, 3), rng.randint(-5, 5))
        b = QT.monomial(rng.randint(-2, 2), rng.randint(-5, 5))
        c = QT.elem(rng.randint(-5, 5))
        assert a * (b + c) == a * b + a * c
        if not a.is_zero():
            assert (a * a.inverse()).is_one()


def test_is_nth_power_examples():
    F7 = FiniteField(7)
    res = is_nth_power(F7.elem(2), 2)
    assert res.is_power and str(res.witness) == "3"
    Q = Rationals()
    res = is_nth_power(Q.elem(4), 2)
    assert res.is_power and str(res.witness) == "2"
    Q5 = PAdicDescriptor(5)
    res = is_nth_power(Q5.elem(5), 2)
    assert not res.is_power and res.certificate == "odd valuation"


def test_is_nth_power_exhaustive_finite_fields():
    # agreement with exhaustive search on all of F_q for q <= 121, n <= 12
    for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49, 81, 121]:
        F = FiniteField(q)
        elems = [x for x in F.elements() if not x.is_zero()]
        for n in range(1, 13):
            powers = set()
            for y in elems:
                powers.add(str(y ** n))
            for x in elems:
                res = is_nth_power(x, n)
                assert res.is_power == (str(x) in powers), (q, n, str(x))
                if res.is_power:
                    assert (res.witness ** n) == x


def test_padic_nth_power_witnesses():
    Q5 = PAdicDescriptor(5)
    res = is_nth_power(Q5.elem(4), 2)
    assert res.is_power
    assert (res.witness * res.witness) == Q5.elem(4)
    res = is_nth_power(Q5.elem(2), 2)
    assert not res.is_power
    # 2-adic squares: u = 1 mod 8
    Q2 = PAdicDescriptor(2)
    res = is_nth_power(Q2.elem(17), 2)
    assert res.is_power
    assert (res.witness * res.witness) == Q2.elem(17)
    assert not is_nth_power(Q2.elem(3), 2).is_power
    assert not is_nth_power(Q2.elem(2), 2).is_power
    res = is_nth_power(Q2.elem(16), 4)
    assert res.is_power


def test_primitive_roots():
    F7 = FiniteField(7)
    z, _ = primitive_root_of_unity(F7, 3)
    assert str(z) == "2"
    assert (z ** 3).is_one() and not z.is_one()
    Q = Rationals()
    z, _ = primitive_root_of_unity(Q, 2)
    assert str(z) == "-1"
    z, reason = primitive_root_of_unity(F7, 5)
    assert z is None and "q-1" in reason
    # cyclotomic
    Q4 = parse_field("Q[zeta_4]")
    z = Q4.zeta()
    assert (z ** 4).is_one() and not (z ** 2).is_one()
    # tame p-adic
    Q13 = parse_field("Qp(13)")
    z, _ = primitive_root_of_unity(Q13, 4)
    assert (z ** 4).is_one()
    assert not (z ** 2).is_one()


def test_laurent_split_examples():
    QT = parse_field("Q((t))")
    t = QT.monomial(1)
    x = QT.elem(3) * t * t + t ** 3  # 3t^2 + t^3
    sp = laurent_split(x)
    assert sp.valuation == 2 and str(sp.unit) == "3"
    back = QT.monomial(sp.valuation) * QT.elem(sp.unit) * sp.tail
    assert back == x
    sp = laurent_split(QT.monomial(-1))
    assert sp.valuation == -1 and sp.unit.is_one()
    Q5T = parse_field("Qp(5)((t))")
    sp = laurent_split(Q5T.monomial(1, 5))
    assert sp.valuation == 1 and sp.base_valuation == 1


@given(st.integers(min_value=-30, max_value=30).filter(lambda n: n != 0),
       st.integers(min_value=-3, max_value=3),
       st.integers(min_value=1, max_value=4))
def test_laurent_split_reassembly(c, v, extra):
    QT = parse_field("Q((t))")
    x = QT.monomial(v, c) + QT.monomial(v + extra, 7)
    sp = laurent_split(x)
    back = QT.monomial(sp.valuation) * QT.elem(sp.unit) * sp.tail
    assert back == x


def test_precision_exhaustion_is_loud():
    Q5 = PAdicDescriptor(5)
    w = is_nth_power(Q5.elem(4), 2).witness  # approximate unit
    with pytest.raises(PrecisionExhausted):
        _ = (w - w)  # cancels every certified digit


def test_root_adjunction_zeta_arithmetic():
    T = parse_field("Q[zeta_4]")
    z = T.zeta()
    assert z * z == T.elem(-1)
    assert (T.elem(1) + z) * (T.elem(1) - z) == T.elem(2)
    inv = z.inverse()
    assert (z * inv).is_one()
