import random
from fractions import Fraction

import pytest

from chromalg.errors import NonzeroConstantTerm, VarMismatch
from chromalg.fields import Fq
from chromalg.gseries import TensorRing, TruncSeries, Var, VarTable, rand_series

from oracles import lagrange_reversion, reduce_mod_p, series_compose

F3 = Fq(3)


def uni(trunc, name="X"):
    return VarTable([Var(name, 2, 0, trunc)])


def test_mul_example():
    t = uni(3)
    one = TruncSeries.one(t, F3)
    X = TruncSeries.gen(t, F3, "X")
    prod = (one + X) * (one - X)
    assert prod.terms == {(0,): F3.one, (2,): F3.from_int(2)}


def test_odd_nilsquare_and_anticommute():
    tab = VarTable([Var("a0", -1, 1), Var("a1", -1, 1)])
    a0 = TruncSeries.gen(tab, F3, "a0")
    a1 = TruncSeries.gen(tab, F3, "a1")
    assert (a0 * a0).is_zero()
    assert a0 * a1 == (a1 * a0).neg()
    assert ((a0 * a1) * a0).is_zero()


def test_compose_example():
    # oracle: dense expansion of X^2 o (X + X^2) over Q, reduced mod 3
    t = uni(4)
    f = TruncSeries(t, F3, {(2,): F3.one})
    g = TruncSeries(t, F3, {(1,): F3.one, (2,): F3.one})
    expected = reduce_mod_p(
        series_compose([Fraction(0), Fraction(0), Fraction(1)],
                       [Fraction(0), Fraction(1), Fraction(1)], 3),
        3,
    )
    got = f.compose(g)
    assert [got.coeff((k,)) for k in range(4)] == [F3.from_int(c) for c in expected]


def test_compose_identity_and_errors():
    t = uni(5)
    g = TruncSeries(t, F3, {(1,): F3.one, (3,): F3.from_int(2)})
    x = TruncSeries.gen(t, F3, "X")
    assert x.compose(g) == g
    bad = TruncSeries(t, F3, {(0,): F3.one, (1,): F3.one})
    with pytest.raises(NonzeroConstantTerm):
        x.compose(bad)


def test_reverse_example():
    # oracle: Lagrange inversion over Q, then reduce mod 3
    t = uni(4)
    g = TruncSeries(t, F3, {(1,): F3.one, (2,): F3.one})
    expected = reduce_mod_p(
        lagrange_reversion([Fraction(0), Fraction(1), Fraction(1)], 3), 3
    )
    rev = g.reverse()
    assert [rev.coeff((k,)) for k in range(4)] == [F3.from_int(c) for c in expected]
    x = TruncSeries.gen(t, F3, "X")
    assert g.compose(rev) == x
    assert rev.compose(g) == x


def test_reverse_trivial_and_scaled():
    t = uni(6)
    x = TruncSeries.gen(t, F3, "X")
    assert x.reverse() == x
    c = F3.from_int(2)
    scaled = TruncSeries(t, F3, {(1,): c})
    assert scaled.reverse() == TruncSeries(t, F3, {(1,): F3.inv(c)})


def test_var_mismatch():
    a = TruncSeries.gen(uni(3), F3, "X")
    b = TruncSeries.gen(uni(4), F3, "X")
    with pytest.raises(VarMismatch):
        a.mul(b)


def test_tensor_examples():
    tb = VarTable([Var("y", 1, 1), Var("b", -1, 1)])
    T2 = TensorRing(tb, F3, 2)
    y = TruncSeries.gen(tb, F3, "y")
    b = TruncSeries.gen(tb, F3, "b")
    one = TruncSeries.one(tb, F3)
    el = T2.pure(one, y) + T2.pure(b, one)
    assert (el * el).is_zero()
    tx = VarTable([Var("x", 2, 0, 5)])
    TX = TensorRing(tx, F3, 2)
    xg = TruncSeries.gen(tx, F3, "x")
    onex = TruncSeries.one(tx, F3)
    assert TX.pure(xg, onex) * TX.pure(onex, xg) == TX.pure(xg, xg)


def test_tensor_flip_involution_and_koszul():
    rng = random.Random(0)
    tb = VarTable([Var("y", 1, 1), Var("x", 2, 0, 4)])
    T2 = TensorRing(tb, F3, 2)
    for _ in range(40):
        s = rand_series(T2.table, F3, rng)
        assert T2.flip(T2.flip(s)) == s
    y = TruncSeries.gen(tb, F3, "y")
    one = TruncSeries.one(tb, F3)
    # tau(y (x) y) = -(y (x) y)
    yy = T2.pure(y, y)
    assert T2.flip(yy) == yy.neg()
    assert T2.flip(T2.pure(y, one)) == T2.pure(one, y)


def test_ring_axioms_random():
    rng = random.Random(1)
    tab = VarTable([Var("x", 2, 0, 4), Var("y", 1, 1), Var("b", -1, 1)])
    for _ in range(200):
        f, g, h = (rand_series(tab, F3, rng) for _ in range(3))
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h


def test_graded_commutativity():
    rng = random.Random(2)
    tab = VarTable([Var("x", 2, 0, 4), Var("y", 1, 1), Var("b", -1, 1)])
    for _ in range(200):
        f = rand_series(tab, F3, rng, nterms=1)
        g = rand_series(tab, F3, rng, nterms=1)
        df, dg = f.degree(), g.degree()
        if df is None or dg is None:
            continue
        fg, gf = f * g, g * f
        assert fg == (gf.neg() if (df % 2 and dg % 2) else gf)


def test_degree_homogeneity_preserved():
    rng = random.Random(3)
    tab = VarTable([Var("x", 2, 0, 5), Var("b", -1, 1)])
    for _ in range(100):
        f = rand_series(tab, F3, rng, nterms=1)
        g = rand_series(tab, F3, rng, nterms=1)
        if f.degree() is None or g.degree() is None or (f * g).is_zero():
            continue
        assert (f * g).degree() == f.degree() + g.degree()


def test_text_and_json_round_trip():
    rng = random.Random(4)
    tab = VarTable([Var("x", 2, 0, 5), Var("b", -1, 1)], total_cap=6)
    for _ in range(30):
        s = rand_series(tab, F3, rng)
        again = TruncSeries.from_json(s.to_json(), F3)
        assert again == s
        assert again.json_text() == s.json_text()
