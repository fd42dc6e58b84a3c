import random
from fractions import Fraction

import pytest

from chromalg.errors import CoefficientNotInFpn, NonzeroConstantTerm
from chromalg.fields import Fq, QPoly
from chromalg.fgl import (
    FGL,
    associativity_defect,
    commutativity_defect,
    detected_height,
    e_theory_fgl,
    endo_compose,
    endo_defect,
    endo_formal_sum,
    fgl_neg,
    formal_sum,
    honda_endo,
    honda_fgl,
    hazewinkel_log,
    p_series,
    recognize_honda_endo,
    specialize_hazewinkel,
    strict_height_defect,
    unit_defect,
    xy_table,
)
from chromalg.gseries import TruncSeries
from chromalg.tower import TowerField

from oracles import honda_p_series_oracle

F3 = Fq(3)
F9 = Fq(3, 2)


def test_hazewinkel_recursion():
    # p m_k = sum_{i<k} m_i v_{k-i}^{p^i} with m_0 = 1, checked exactly
    p = 3
    ms = hazewinkel_log(p, 3)
    assert ms[0] == {(): Fraction(1)}
    from chromalg.fgl import _vpoly_mul

    for k in range(1, 4):
        acc = {}
        for i in range(k):
            vexp = [0] * (k - i)
            vexp[k - i - 1] = p ** i
            term = _vpoly_mul(ms[i], {tuple(vexp): Fraction(1)})
            for e, c in term.items():
                acc[e] = acc.get(e, Fraction(0)) + c
        lhs = {e: p * c for e, c in ms[k].items()}
        assert lhs == {e: c for e, c in acc.items() if c}


def test_honda_p_series_n1():
    # [3](X) = X^3 exactly through X^27, against the characteristic-zero oracle
    H = honda_fgl(1, F3, 27)
    ps = p_series(H)
    oracle = honda_p_series_oracle(1, 3, 27)
    expect = {(k,): F3.from_int(c) for k, c in enumerate(oracle) if c}
    assert ps.terms == expect
    assert list(ps.terms) == [(3,)]


def test_honda_unit_and_commutativity():
    H = honda_fgl(2, F3, 26)
    u1, u2 = unit_defect(H)
    assert u1.is_zero() and u2.is_zero()
    assert commutativity_defect(H).is_zero()
    assert strict_height_defect(H, 2).is_zero()


def test_honda_p_series_n2():
    H = honda_fgl(2, F3, 26)
    assert list(p_series(H).terms) == [(9,)]
    assert detected_height(H) == 2


def test_additive_specialization():
    add = specialize_hazewinkel(3, {}, F3, 15)
    assert add.series.terms == {(1, 0): F3.one, (0, 1): F3.one}
    assert p_series(add).is_zero()
    assert detected_height(add) is None


def test_vn_to_one_agrees_with_honda():
    # v_n -> 1 reproduces the Honda law coefficient-by-coefficient through p^{2n}
    q = QPoly(3)
    for n in (1, 2):
        cap = 3 ** (2 * n)
        sp = specialize_hazewinkel(3, {n: q.one}, F3, cap)
        assert sp.series == honda_fgl(n, F3, cap).series


def test_deformation_law_p_series():
    # the lowest p-series term is u_n X^{p^n}; the X^{p^{n+1}} coefficient is a
    # unit at u_n = 0
    T = TowerField(F9, e=1, uprec=6)
    E = e_theory_fgl(3, 1, T, 12)
    assert strict_height_defect(E, 1).is_zero()
    ps = p_series(E)
    low = min(ps.terms, key=lambda e: e[0])
    assert low == (3,) and ps.terms[low] == T.u()
    c9 = ps.terms[(9,)]
    assert c9.get(((), 0)) is not None  # unit residue at u = 0


def test_multiplicative_law_p_series():
    tab = xy_table(12)
    mult = FGL(3, F3, TruncSeries(tab, F3, {(1, 0): F3.one, (0, 1): F3.one,
                                            (1, 1): F3.one}), 12)
    assert list(p_series(mult).terms) == [(3,)]


def test_formal_sum_basics():
    H = honda_fgl(1, F3, 9)
    x = H.x_gen()
    assert formal_sum(H, [x]) == x
    with pytest.raises(NonzeroConstantTerm):
        formal_sum(H, [TruncSeries.one(H.x_table(), F3)])
    add = specialize_hazewinkel(3, {}, F3, 9)
    tab = add.x_table()
    s1 = TruncSeries(tab, F3, {(1,): F3.one})
    s2 = TruncSeries(tab, F3, {(3,): F3.from_int(2)})
    assert formal_sum(add, [s1, s2]) == s1.add(s2)


def test_formal_sum_reassociation():
    rng = random.Random(0)
    H = honda_fgl(1, F9, 12)
    tab = H.x_table()
    for _ in range(10):
        parts = []
        for _k in range(3):
            terms = {}
            for d in (1, 2, 3):
                c = F9.rand(rng)
                if c != F9.zero:
                    terms[(d,)] = c
            parts.append(TruncSeries(tab, F9, terms))
        left = H.apply(H.apply(parts[0], parts[1]), parts[2])
        right = H.apply(parts[0], H.apply(parts[1], parts[2]))
        assert left == right


def test_fgl_neg():
    H = honda_fgl(1, F3, 9)
    x = H.x_gen()
    nx = fgl_neg(H, x)
    assert H.apply(x, nx).is_zero()


def test_honda_endo_examples():
    H = honda_fgl(1, F3, 12)
    ident = honda_endo(H, (F3.one,), 1)
    assert ident.series == H.x_gen()
    frob = honda_endo(H, (F3.zero, F3.one), 1)
    assert frob.series.terms == {(3,): F3.one}
    # at n = 1 the Frobenius IS the p-series, and t o t = [p] o [p]
    assert frob.series == p_series(H)
    pp = formal_sum(H, [H.x_gen()] * 9)
    assert endo_compose(frob, frob) == pp


def test_honda_endo_closure_and_membership():
    rng = random.Random(1)
    H = honda_fgl(2, F9, 20)
    with pytest.raises(CoefficientNotInFpn):
        # F_9 has elements outside F_3 when n = 1
        honda_endo(honda_fgl(1, F9, 12), (next(
            a for a in F9.elements() if a != F9.zero and not F9.in_subfield(a, 1)
        ),), 1)
    for _ in range(5):
        a0 = F9.rand(rng)
        a1 = F9.rand(rng)
        if a0 == F9.zero:
            continue
        t = honda_endo(H, (a0, a1), 2)
        assert endo_defect(t).is_zero()
        s = honda_endo(H, (F9.one, F9.from_int(2)), 2)
        comp = endo_compose(t, s)
        assert recognize_honda_endo(H, comp, 2) is not None
        fsum = endo_formal_sum(t, s)
        assert recognize_honda_endo(H, fsum, 2) is not None


def test_deformation_associativity_small():
    T = TowerField(F9, e=1, uprec=6)
    E = e_theory_fgl(3, 1, T, 12)
    assert associativity_defect(E).is_zero()


def test_base_extension_commutes():
    # specialize over F_3 then embed into F_9 equals specializing over F_9
    from chromalg.fields import embed_field

    q = QPoly(3)
    small = specialize_hazewinkel(3, {1: q.one}, F3, 9)
    em = embed_field(F3, F9)
    big = specialize_hazewinkel(3, {1: q.one}, F9, 9)
    lifted = small.map_coefficients(em, F9)
    assert lifted.series == big.series
