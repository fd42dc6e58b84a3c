import dataclasses
import random

import pytest

from chromalg.errors import InvalidWitness, UnsupportedExtension
from chromalg.fields import Fq
from chromalg.fgl import FGL, e_theory_fgl, honda_fgl, recognize_honda_endo
from chromalg.gseries import TruncSeries, Var, VarTable
from chromalg.isofind import (
    check_equivariance,
    derive_deformation_witness,
    derive_honda_witness,
    homomorphy_defect,
    solve_phi,
    verify_iso,
)
from chromalg.tower import TowerAuto, TowerField

F9 = Fq(3, 2)


def make_base(uprec=6):
    return TowerField(F9, e=1, uprec=uprec)


def honda_over(T, cap):
    H = honda_fgl(1, F9, cap)
    return H.map_coefficients(lambda c: T.scalar(c), T)


def test_trivial_iso_is_identity():
    T = make_base()
    H = honda_fgl(1, F9, 10)
    iso = solve_phi(honda_over(T, 10), H, 1, 10)
    assert iso.phi.terms == {(1,): iso.tower.one}
    assert iso.tower.r == 0 and iso.tower.e == 1
    assert verify_iso(iso).ok


def test_deformation_solve_and_verify():
    T = make_base()
    E = e_theory_fgl(3, 1, T, 10)
    H = honda_fgl(1, F9, 10)
    iso = solve_phi(E, H, 1, 10)
    rep = verify_iso(iso)
    assert rep.ok
    # leading coefficient satisfies the Kummer relation c1^2 = u1 * unit:
    # its square has u-valuation one
    c1 = iso.phi0()
    sq = iso.tower.mul(c1, c1)
    assert iso.tower.valuation(sq) == iso.tower.e
    kinds = {g.kind for g in iso.tower.gens}
    assert kinds <= {"kummer", "additive"}
    assert iso.tower.e == 2


def test_solver_determinism():
    a = solve_phi(e_theory_fgl(3, 1, make_base(), 10), honda_fgl(1, F9, 10), 1, 10)
    b = solve_phi(e_theory_fgl(3, 1, make_base(), 10), honda_fgl(1, F9, 10), 1, 10)
    assert a.tower.descriptor() == b.tower.descriptor()
    assert a.phi.terms == b.phi.terms


def test_conjugated_law_round_trip():
    T = make_base()
    H = honda_over(T, 10)
    Hbase = honda_fgl(1, F9, 10)
    uni = VarTable([Var("X", 2, 0, 11)])
    c = TruncSeries(uni, T, {(1,): T.one, (2,): T.u(), (3,): T.one})
    cinv = c.reverse()
    tab = H.series.table
    cx = c.subs({"X": TruncSeries.gen(tab, T, "X")})
    cy = c.subs({"X": TruncSeries.gen(tab, T, "Y")})
    Fconj = FGL(3, T, cinv.compose(H.series.subs({"X": cx, "Y": cy})), 10)
    iso = solve_phi(Fconj, Hbase, 1, 10)
    assert verify_iso(iso).ok
    cinv_big = TruncSeries(uni, iso.tower,
                           {e: iso.base_conv(v) for e, v in cinv.terms.items()})
    comp = iso.phi.compose(cinv_big)
    coeffs = recognize_honda_endo(iso.target, comp)
    assert coeffs is not None
    assert not iso.tower.is_zero(coeffs[0])


def test_low_height_rejected():
    # the multiplicative law has height 1; asking for height 2 must fail
    T = make_base()
    tab = VarTable([Var("X", 2, 0, 11), Var("Y", 2, 0, 11)], total_cap=10)
    mult = FGL(3, T, TruncSeries(tab, T, {(1, 0): T.one, (0, 1): T.one,
                                          (1, 1): T.one}), 10)
    with pytest.raises(UnsupportedExtension):
        solve_phi(mult, honda_fgl(2, F9, 10), 2, 10)


def test_corruption_detected_with_witness():
    iso = solve_phi(e_theory_fgl(3, 1, make_base(), 10), honda_fgl(1, F9, 10), 1, 10)
    Tw = iso.tower
    bad_phi = iso.phi.add(TruncSeries(iso.phi.table, Tw, {(4,): Tw.one}))
    bad = dataclasses.replace(iso, phi=bad_phi, inverse=bad_phi.reverse())
    rep = verify_iso(bad)
    assert not rep.ok
    witness = rep.failures()[0].witness
    assert "X^1Y^3" in witness or "X^3Y^1" in witness


@pytest.fixture(scope="module")
def solved():
    return solve_phi(e_theory_fgl(3, 1, make_base(), 10), honda_fgl(1, F9, 10), 1, 10)


def test_identity_witness(solved):
    ident = TowerAuto(solved.tower, 0, {})
    wk = derive_honda_witness(solved, ident)
    assert wk.t_series == TruncSeries.gen(wk.t_series.table, solved.tower, "X")
    assert check_equivariance(solved, wk).ok
    we = derive_deformation_witness(solved, ident)
    assert check_equivariance(solved, we).ok


def test_translate_witnesses(solved):
    Tw = solved.tower
    name = next(g.name for g in Tw.gens if g.kind == "additive")
    sigma = TowerAuto(Tw, 0, {name: Tw.add(Tw.gen(name), Tw.one)})
    assert sigma.validate()
    wk = derive_honda_witness(solved, sigma)
    assert check_equivariance(solved, wk).ok
    assert recognize_honda_endo(solved.target, wk.t_series) is not None
    we = derive_deformation_witness(solved, sigma)
    assert check_equivariance(solved, we).ok


def test_frobenius_witness(solved):
    sigma = TowerAuto(solved.tower, 1, {})
    assert sigma.validate()
    assert check_equivariance(solved, derive_honda_witness(solved, sigma)).ok


def test_corrupted_witness_rejected(solved):
    Tw = solved.tower
    name = next(g.name for g in Tw.gens if g.kind == "additive")
    bad = TowerAuto(Tw, 0, {name: Tw.add(Tw.gen(name), Tw.u())})
    with pytest.raises(InvalidWitness):
        check_equivariance(solved, derive_honda_witness(solved, bad))


def test_post_composition_with_automorphism_still_verifies(solved):
    # composing with a target automorphism yields another valid solution
    from chromalg.fgl import honda_endo

    Tw = solved.tower
    t = honda_endo(solved.target, (Tw.from_int(2),), None)
    phi2 = t.series.compose(solved.phi)
    iso2 = dataclasses.replace(solved, phi=phi2, inverse=phi2.reverse())
    assert homomorphy_defect(iso2).is_zero()
