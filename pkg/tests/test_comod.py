import random

import pytest

from chromalg.comod import (
    CComodule,
    CLambdaComodule,
    Comodule,
    MilnorTwistWitness,
    ccomod_equal,
    character_ccomodule,
    check_assembled_comultiplication,
    clambda_equal,
    cofree_clambda,
    comod_to_twisted,
    comodule_matrices_equal,
    conjugate_ccomodule,
    conjugate_clambda,
    extract_milnor,
    lambda_comodule_from_clambda,
    milnor_anticommute_report,
    milnor_derivation_report,
    milnor_twist_report,
    nine_diagram_report,
    random_graded_automorphism,
    regular_ccomodule,
    split_comodule,
    twisted_equal,
    twisted_to_comod,
)
from chromalg.errors import CompatibilityFailure, InvalidWitness
from chromalg.fields import Fq
from chromalg.fgl import honda_fgl, honda_endo
from chromalg.gseries import TruncSeries
from chromalg.hopfalg import (
    CompositeHopf,
    FiniteGroup,
    FunctionHopf,
    LambdaHopf,
    RAction,
    SeriesRing,
)
from chromalg.spaces import _xname, _yname, lens_model, model_aux_table, _rows_from_aux

F3 = Fq(3)
F9 = Fq(3, 2)


def frobenius_hopf(k=2):
    K = Fq(3, k)
    return FunctionHopf(FiniteGroup.cyclic(k), RAction(K, lambda r, g: K.frobenius(r, g)))


# -- twisted-module equivalence --------------------------------------------------------


def test_regular_round_trip_and_axioms():
    rng = random.Random(0)
    fh = frobenius_hopf()
    M = regular_ccomodule(fh)
    assert M.check().ok
    T = comod_to_twisted(M)
    assert T.check(rng).ok
    assert ccomod_equal(twisted_to_comod(T), M)
    assert twisted_equal(comod_to_twisted(twisted_to_comod(T)), T)


def test_trivial_coaction_gives_trivial_action():
    fh = frobenius_hopf()
    M = CComodule(fh, [("m", 0)], {"m": {"m": fh.one()}})
    T = comod_to_twisted(M)
    for g in fh.G.elements:
        assert T.apply({"m": fh.R.one}, g) == {"m": fh.R.one}


def test_rank_one_sign_example():
    rng = random.Random(1)
    from chromalg.gseries import Var, VarTable

    stab = VarTable([Var("s", 0, 0, 2)])
    R = SeriesRing(stab, F3)

    def act(r, g):
        if g % 2 == 0:
            return r
        return TruncSeries(stab, F3, {e: (F3.neg(c) if e[0] % 2 else c)
                                      for e, c in r.terms.items()})

    fh = FunctionHopf(FiniteGroup.cyclic(2), RAction(R, act))
    alpha = {0: R.one, 1: R.one.neg()}
    M = character_ccomodule(fh, alpha)
    assert M.check().ok
    T = comod_to_twisted(M)
    assert T.check(rng).ok
    assert T.apply({"m": R.one}, 1) == {"m": R.one.neg()}


def test_equivalence_monoidality_random():
    rng = random.Random(2)
    fh = frobenius_hopf()
    for _ in range(8):
        M = regular_ccomodule(fh)
        P, Pinv = random_graded_automorphism(M.basis, fh.R, rng)
        M = conjugate_ccomodule(M, P, Pinv)
        assert M.check().ok
        T = comod_to_twisted(M)
        assert T.check(rng).ok
        assert ccomod_equal(twisted_to_comod(T), M)
        MM = M.tensor(M)
        assert MM.check().ok
        assert twisted_equal(comod_to_twisted(MM), T.tensor(T))
        assert ccomod_equal(twisted_to_comod(T.tensor(T)), MM)


# -- Milnor operations -------------------------------------------------------------------


@pytest.fixture(scope="module")
def comp2():
    return CompositeHopf(honda_fgl(2, F3, 27), 2)


@pytest.fixture(scope="module")
def lens2(comp2):
    return lens_model(comp2)


def test_trivial_coaction_all_q_vanish():
    L = LambdaHopf(F3, 2)
    M = Comodule(L, [("m", 0)], {"m": {"m": TruncSeries.one(L.table, F3)}})
    act = extract_milnor(M)
    assert act.matrices[0] == {} and act.matrices[1] == {}


def test_lens_q_values(lens2):
    act = extract_milnor(lens2)
    assert act.matrices[0][_yname(0)] == {_xname(1): F3.one}
    assert act.matrices[1][_yname(0)] == {_xname(3): F3.one}
    assert milnor_anticommute_report(act).ok


def test_rank_two_toy_signs():
    # rho(m1) = 1 (x) m1 + b0 (x) m0: (m1)Q_0 = (-1)^{|m1|+1} m0
    L = LambdaHopf(F3, 1)
    one = TruncSeries.one(L.table, F3)
    b0 = TruncSeries.gen(L.table, F3, "b0")
    for deg1 in (0, 1):
        M = Comodule(
            L,
            [("m0", deg1 + 1), ("m1", deg1)],
            {"m0": {"m0": one}, "m1": {"m1": one, "m0": b0}},
        )
        act = extract_milnor(M)
        got = act.matrices[0]["m1"]["m0"]
        want = F3.one if (deg1 + 1) % 2 == 0 else F3.neg(F3.one)
        assert got == want


def test_derivation_lens_tensor_lens(lens2):
    rep = milnor_derivation_report(lens2, lens2)
    assert rep.ok
    # the displayed y (x) y case: (y (x) y)Q_0 = y (x) x - x (x) y
    MN = lens2.tensor(lens2)
    act = extract_milnor(MN)
    key = "%s*%s" % (_yname(0), _yname(0))
    row = act.matrices[0].get(key, {})
    assert row == {
        "%s*%s" % (_yname(0), _xname(1)): F3.one,
        "%s*%s" % (_xname(1), _yname(0)): F3.neg(F3.one),
    }


def test_milnor_annihilated_reduces_to_one_term(lens2):
    # x-part elements are annihilated by every Q, so the tensor rule has one term
    act = extract_milnor(lens2)
    assert _xname(0) not in act.matrices[0]
    assert _xname(1) not in act.matrices[0]


def test_twist_identity_witness(lens2):
    n = 2
    ident = {a: {a: F3.one} for a, _ in lens2.basis}
    w = MilnorTwistWitness([F3.one], lambda c: c, ident)
    assert milnor_twist_report(lens2, w, n).ok


def _lens_action_from_endo(H, t, n):
    """Module action x -> t(x), y -> y, extended multiplicatively."""
    K = H.ring
    p = H.p
    tab = model_aux_table(H, p ** n, with_y=True)
    tser = TruncSeries(tab, K)
    for e, c in t.series.terms.items():
        if e[0] < p ** n:
            key = tuple(e[0] if nm == "x" else 0 for nm in tab.names)
            tser = tser.add(TruncSeries(tab, K, {key: c}))
    action = {}
    pw = TruncSeries.one(tab, K)
    for k in range(p ** n):
        action[_xname(k)] = {
            b: g.constant_term() for b, g in _rows_from_aux(H, tab, pw, True).items()
        }
        yrow = _rows_from_aux(H, tab, TruncSeries.gen(tab, K, "y").mul(pw), True)
        action[_yname(k)] = {b: g.constant_term() for b, g in yrow.items()}
        if k + 1 < p ** n:
            pw = pw.mul(tser)
    return action


def test_twist_law_n1():
    H1 = CompositeHopf(honda_fgl(1, F9, 9), 1)
    L1 = lens_model(H1)
    a0 = F9.from_int(2)
    t = honda_endo(H1.F, (a0,), 1)
    w = MilnorTwistWitness([a0], lambda c: c, _lens_action_from_endo(H1, t, 1))
    assert milnor_twist_report(L1, w, 1).ok


def test_twist_law_n2():
    K = F9
    H2 = CompositeHopf(honda_fgl(2, K, 27), 2)
    L2 = lens_model(H2)
    a0, a1 = K.from_int(2), K.one
    t = honda_endo(H2.F, (a0, a1), 2)
    w = MilnorTwistWitness([a0, a1], lambda c: c, _lens_action_from_endo(H2, t, 2))
    rep = milnor_twist_report(L2, w, 2)
    assert rep.ok, [c.id for c in rep.failures()]


def test_twist_witness_validation(lens2):
    with pytest.raises(InvalidWitness):
        milnor_twist_report(lens2, MilnorTwistWitness([F3.zero], lambda c: c, {}), 2)


def test_anticommutation_random_instances(comp2):
    rng = random.Random(3)
    L = LambdaHopf(F3, 2)
    for k in range(6):
        M0 = cofree_clambda(comp2, [("v", k % 2)])
        P, Pinv = random_graded_automorphism(M0.basis, F3, rng)
        M1 = conjugate_clambda(M0, P, Pinv)
        LM = lambda_comodule_from_clambda(M1, L)
        assert LM.check().ok
        assert milnor_anticommute_report(extract_milnor(LM)).ok


# -- assembly ------------------------------------------------------------------------------


def test_lens_assembly_round_trip(comp2, lens2):
    S = split_comodule(lens2)
    assert S.compatibility_defect() is None
    A = S.assemble()
    assert comodule_matrices_equal(A, lens2)
    # rho(y) = 1 (x) y + b(x) is reproduced
    row = A.rho[_yname(0)]
    b0 = TruncSeries.gen(comp2.table, F3, "b0")
    b1 = TruncSeries.gen(comp2.table, F3, "b1")
    assert row[_yname(0)] == TruncSeries.one(comp2.table, F3)
    assert row[_xname(1)] == b0
    assert row[_xname(3)] == b1


def test_trivial_assembly(comp2):
    one = TruncSeries.one(comp2.table, F3)
    M = CLambdaComodule(comp2, [("m", 0)], {"m": {"m": one}}, {"m": {"m": one}})
    A = M.assemble()
    assert A.rho["m"]["m"] == one
    assert A.check().ok


def test_assembly_round_trips_random(comp2):
    rng = random.Random(4)
    for k in range(6):
        M0 = cofree_clambda(comp2, [("v", k % 2)])
        P, Pinv = random_graded_automorphism(M0.basis, F3, rng)
        M1 = conjugate_clambda(M0, P, Pinv)
        assert M1.compatibility_defect() is None
        A = M1.assemble()
        assert A.check().ok
        S = split_comodule(A)
        assert clambda_equal(S, M1)
        assert comodule_matrices_equal(S.assemble(), A)


def test_nine_diagram(comp2, lens2):
    S = split_comodule(lens2)
    rep = nine_diagram_report(S)
    assert rep.ok, [c.id for c in rep.failures()]


def test_nine_diagram_random(comp2):
    rng = random.Random(5)
    M0 = cofree_clambda(comp2, [("v", 0)])
    P, Pinv = random_graded_automorphism(M0.basis, F3, rng)
    rep = nine_diagram_report(conjugate_clambda(M0, P, Pinv))
    assert rep.ok, [c.id for c in rep.failures()]


def test_assembled_comultiplication(comp2):
    rep = check_assembled_comultiplication(comp2)
    assert rep.ok, [c.id for c in rep.failures()]


def test_compatibility_failure_detected(comp2):
    M = cofree_clambda(comp2, [("v", 0)])
    bad = {a: dict(row) for a, row in M.rho_C.items()}
    a1 = M.basis[1][0]
    bad[a1][M.basis[0][0]] = TruncSeries.gen(comp2.table, F3, "t1")
    Mbad = CLambdaComodule(comp2, M.basis, bad, M.rho_L)
    assert Mbad.compatibility_defect() is not None
    with pytest.raises(CompatibilityFailure):
        Mbad.assemble()
