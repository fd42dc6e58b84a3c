import random

import pytest

from chromalg.comod import extract_milnor
from chromalg.fields import Fq
from chromalg.fgl import e_theory_fgl, honda_fgl
from chromalg.gseries import TruncSeries, Var, VarTable
from chromalg.hopfalg import CompositeHopf
from chromalg.isofind import (
    FGLIso,
    derive_deformation_witness,
    derive_honda_witness,
    solve_phi,
    verify_iso,
)
from chromalg.spaces import (
    ChernCharacter,
    _xname,
    _yname,
    bhat_invariance_report,
    bhat_matrix_report,
    build_chern_data,
    chern_transport_report,
    coaction_x,
    coaction_y,
    lens_model,
    proj_model,
    recognize_lens_derivation,
)
from chromalg.tower import TowerAuto, TowerField

F3 = Fq(3)
F9 = Fq(3, 2)


@pytest.fixture(scope="module")
def comp1():
    return CompositeHopf(honda_fgl(1, F3, 9), 1)


@pytest.fixture(scope="module")
def comp2():
    return CompositeHopf(honda_fgl(2, F3, 27), 2)


def test_lens_coaction_x_truncates_at_n1(comp1):
    # x^p = 0 at n = 1, so rho(x) = x on the nose
    ty = coaction_y(comp1)
    tab = ty.table
    tx = TruncSeries.gen(tab, F3, "x")
    from chromalg.spaces import t_of_x

    assert t_of_x(comp1, tab) == tx


def test_lens_coaction_y_displayed(comp1):
    ty = coaction_y(comp1)
    tab = ty.table
    want = TruncSeries.gen(tab, F3, "y").add(
        TruncSeries.gen(tab, F3, "b0#g").mul(TruncSeries.gen(tab, F3, "x"))
    )
    assert ty == want


def test_counit_collapse(comp1):
    # (eps (x) 1) rho(y) = y: the gamma-free part of the coaction of y is y
    L = lens_model(comp1)
    row = L.rho[_yname(0)]
    assert row[_yname(0)] == TruncSeries.one(comp1.table, F3)
    ev = comp1.eps(row[_xname(1)])
    assert F3.is_zero(ev)


def test_proj_model_shows_t1(comp1):
    P = proj_model(comp1, 9)
    assert P.check().ok
    row = P.rho[_xname(1)]
    assert row[_xname(3)] == TruncSeries.gen(comp1.table, F3, "t1")


def test_lens_q1_value(comp2):
    L = lens_model(comp2)
    act = extract_milnor(L)
    assert act.matrices[1][_yname(0)] == {_xname(3): F3.one}


@pytest.fixture(scope="module")
def chern1():
    T = TowerField(F9, e=1, uprec=6)
    iso = solve_phi(e_theory_fgl(3, 1, T, 10), honda_fgl(1, F9, 10), 1, 10)
    assert verify_iso(iso).ok
    return build_chern_data(iso, 1)


def test_bhat_leading_value(chern1):
    # bhat_0 = (leading coefficient of the inverse) b_0 = phi0^{-1} b_0
    R = chern1.iso.tower
    assert chern1.bhat[0][0] == R.inv(chern1.phi0)
    assert bhat_matrix_report(chern1).ok


def test_bhat_identity_when_phi_is_x():
    T = TowerField(F9, e=1, uprec=6)
    H = honda_fgl(1, F9, 10)
    Hb = H.map_coefficients(lambda c: T.scalar(c), T)
    iso = solve_phi(Hb, H, 1, 10)
    data = build_chern_data(iso, 1)
    assert data.bhat == [[iso.tower.one]]


def test_bhat_triangularity_n2():
    F36 = Fq(3, 6)
    T = TowerField(F36, e=1, uprec=6)
    iso = solve_phi(e_theory_fgl(3, 2, T, 9), honda_fgl(2, F36, 9), 2, 8)
    data = build_chern_data(iso, 2)
    R = iso.tower
    assert R.is_zero(data.bhat[0][1])       # nothing above the diagonal
    assert not R.is_zero(data.bhat[1][1])   # unit diagonal
    assert bhat_matrix_report(data).ok


def test_chern_ring_map(chern1):
    cc = ChernCharacter(chern1, 3)
    rep = cc.ring_map_report()
    assert rep.ok, [c.id for c in rep.failures()]
    # generator images
    assert cc.y_img == TruncSeries.gen(cc.tab, cc.ring, "y")
    assert cc.x_img.coeff((0, 1)) == chern1.x_image.coeff((1,))


def test_theta_substitution_is_inverse_iso(chern1):
    # the substitution series is the inverse of the stored isomorphism
    comp = chern1.iso.phi.compose(chern1.x_image)
    x = TruncSeries.gen(chern1.iso.phi.table, chern1.iso.tower, "X")
    assert comp == x


def test_chern_transport(chern1):
    assert chern_transport_report(chern1, 3).ok


def test_chern_transport_n2():
    F36 = Fq(3, 6)
    T = TowerField(F36, e=1, uprec=6)
    iso = solve_phi(e_theory_fgl(3, 2, T, 9), honda_fgl(2, F36, 9), 2, 8)
    data = build_chern_data(iso, 2)
    assert ChernCharacter(data, 3).ring_map_report().ok
    assert chern_transport_report(data, 3).ok


def test_bhat_invariance(chern1):
    Tw = chern1.iso.tower
    sigmas = [TowerAuto(Tw, 0, {})]
    for g in Tw.gens:
        if g.kind == "additive":
            sigmas.append(TowerAuto(Tw, 0, {g.name: Tw.add(Tw.gen(g.name), Tw.one)}))
    if Tw.fq.m > 1:
        sigmas.append(TowerAuto(Tw, 1, {}))
    witnesses = [derive_deformation_witness(chern1.iso, s) for s in sigmas]
    witnesses += [derive_honda_witness(chern1.iso, s) for s in sigmas]
    rep = bhat_invariance_report(chern1, witnesses)
    assert rep.ok, [c.id for c in rep.failures()]


def test_recognizer_planted(comp2):
    rng = random.Random(0)
    L = lens_model(comp2)
    act = extract_milnor(L)
    qs = [F3.from_int(2), F3.one]
    op = {}
    for a, _d in L.basis:
        row = {}
        for i, qi in enumerate(qs):
            for b, c in act.matrices[i].get(a, {}).items():
                s = F3.add(row.get(b, F3.zero), F3.mul(qi, c))
                if s == F3.zero:
                    row.pop(b, None)
                else:
                    row[b] = s
        op[a] = row
    assert recognize_lens_derivation(L, op) == qs
    # a non-derivation is rejected
    op[_xname(1)] = {_xname(2): F3.one}
    assert recognize_lens_derivation(L, op) is None


def test_lens_comodule_axioms_e_flavor():
    # the deformation-flavor lens model is also a comodule
    T = TowerField(F9, e=1, uprec=4)
    E = e_theory_fgl(3, 1, T, 9)
    CE = CompositeHopf(E, 1)
    L = lens_model(CE)
    assert L.check().ok
