"""Command-line front end: construct objects, run verification suites, and
emit canonical text/JSON reports."""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time

from . import comod, hopfalg, isofind, spaces
from .errors import ChromalgError, ConfigError
from .fgl import (
    FGL,
    e_theory_fgl,
    honda_fgl,
    honda_endo,
    p_series,
    specialize_hazewinkel,
)
from .fields import Fq, QPoly, is_prime
from .gseries import TruncSeries, Var, VarTable
from .hopfalg import CompositeHopf, FiniteGroup, FunctionHopf, LambdaHopf, RAction
from .report import Report
from .tower import TowerAuto, TowerField, parse_tower_descriptor

SCHEMA = "chromalg-report/1"


def rng_for(seed: int, check_id: str) -> random.Random:
    return random.Random("%d:%s" % (seed, check_id))


def field_for(p: int, n: int) -> Fq:
    """The smallest field containing both relevant residue extensions."""
    m = n * (n + 1)
    return Fq(p, m if m > 0 else 1)


def base_tower(p: int, n: int, uprec: int) -> TowerField:
    return TowerField(field_for(p, n), e=1, uprec=uprec)


def embed_base_into(base: TowerField, tower: TowerField):
    """Transport elements of the rank-one base tower into a solver tower
    (ramification scales the uniformizer exponent, new generators pad)."""
    factor = tower.e // base.e

    def conv(a):
        return {((0,) * tower.r, t * factor): c for ((_z, t), c) in
                [(k, v) for k, v in a.items()] if t * factor < tower.tprec}

    return conv


# -- suites ---------------------------------------------------------------------------


def suite_fgl(p: int, n: int, seed: int) -> Report:
    from .fgl import (
        associativity_defect,
        commutativity_defect,
        detected_height,
        strict_height_defect,
        unit_defect,
    )

    rep = Report("fgl")
    cap = p ** (n + 1) + p
    K = field_for(p, n)
    H = honda_fgl(n, K, cap)
    T = base_tower(p, n, 8)
    E = e_theory_fgl(p, n, T, cap)
    for tag, F in (("honda", H), ("deformation", E)):
        u1, u2 = unit_defect(F)
        rep.record("%s-unit" % tag, u1.is_zero() and u2.is_zero())
        rep.record("%s-commutative" % tag, commutativity_defect(F).is_zero())
        rep.record("%s-associative" % tag, associativity_defect(F).is_zero())
        rep.record("%s-strict-height" % tag, strict_height_defect(F, n).is_zero())
    ps = p_series(H)
    rep.record("honda-p-series", list(ps.terms) == [(p ** n,)]
               and ps.terms[(p ** n,)] == K.one)
    rep.record("honda-height", detected_height(H) == n)
    psE = p_series(E)
    low = min(psE.terms, key=lambda e: e[0])
    rep.record("deformation-p-series-low",
               low == (p ** n,) and psE.terms[low] == T.u())
    rng = rng_for(seed, "fgl-linearization")
    K9 = Fq(3, 2)
    Hn = honda_fgl(n if p == 3 else 1, K9, 3 ** (n + 1) if p == 3 else 9)
    nn = n if p == 3 else 1
    ok = True
    for _ in range(100):
        coeffs = [K9.rand(rng) for _ in range(nn)]
        tab = Hn.x_table()
        summands = [
            TruncSeries(tab, K9, {(3 ** i,): c})
            for i, c in enumerate(coeffs)
            if c != K9.zero
        ]
        if not summands:
            continue
        from .fgl import formal_sum

        total = formal_sum(Hn, summands)
        plain = TruncSeries(tab, K9)
        for i, c in enumerate(coeffs):
            if c != K9.zero:
                plain = plain.add(TruncSeries(tab, K9, {(3 ** i,): c}))
        diff = total.sub(plain)
        if any(e[0] < 3 ** nn for e in diff.terms):
            ok = False
            break
    rep.record("formal-sum-linearization", ok)
    return rep


def _s_ring():
    """F_3[s]/(s^2) with its sign action, used by the function-Hopf suites."""
    F3 = Fq(3)
    stab = VarTable([Var("s", 0, 0, 2)])
    R = hopfalg.SeriesRing(stab, F3)

    def act(r, g):
        if g % 2 == 0:
            return r
        return TruncSeries(stab, F3, {e: (F3.neg(c) if e[0] % 2 else c)
                                      for e, c in r.terms.items()})

    return R, act


def function_hopf_instances(seed: int):
    """The (G, R-action) pairs exercised by the axiom suites."""
    out = []
    F9, F27 = Fq(3, 2), Fq(3, 3)
    R2, act2 = _s_ring()
    G2 = FiniteGroup.cyclic(2)
    out.append(("Z2-frobenius", FunctionHopf(G2, RAction(F9, lambda r, g: F9.frobenius(r, g)))))
    out.append(("Z2-sign", FunctionHopf(G2, RAction(R2, lambda r, g: act2(r, g)))))
    G3 = FiniteGroup.cyclic(3)
    out.append(("Z3-frobenius", FunctionHopf(G3, RAction(F27, lambda r, g: F27.frobenius(r, g)))))
    F3 = Fq(3)
    s3tab = VarTable([Var("s", 0, 0, 3)])
    R3 = hopfalg.SeriesRing(s3tab, F3)
    s = TruncSeries.gen(s3tab, F3, "s")
    shift = s.add(s.mul(s))  # s -> s + s^2 generates an order-3 automorphism

    def act3(r, g):
        out_r = r
        for _ in range(g % 3):
            out_r = out_r.subs({"s": shift}, target_table=s3tab, target_ring=F3)
        return out_r

    out.append(("Z3-unipotent", FunctionHopf(G3, RAction(R3, act3))))
    S3 = FiniteGroup.symmetric3()

    def sign_of(perm):
        inv = sum(
            1
            for i in range(3)
            for j in range(i + 1, 3)
            if perm[i] > perm[j]
        )
        return inv % 2

    out.append(("S3-sign-frobenius",
                FunctionHopf(S3, RAction(F9, lambda r, g: F9.frobenius(r, sign_of(g))))))
    out.append(("S3-sign",
                FunctionHopf(S3, RAction(R2, lambda r, g: act2(r, sign_of(g))))))
    return out


def suite_hopf(instance: str, p: int, n: int, seed: int) -> Report:
    rep = Report("hopf-%s" % instance)
    if instance == "lambda":
        for nn in range(1, n + 1):
            L = LambdaHopf(field_for(p, 1), nn)
            sub = hopfalg.check_axioms(L, rng_for(seed, "lambda%d" % nn))
            for c in sub.checks:
                c.id = "n%d:%s" % (nn, c.id)
            rep.merge(sub)
        return rep
    if instance == "cgr":
        for name, fh in function_hopf_instances(seed):
            sub = hopfalg.check_axioms(fh, rng_for(seed, name))
            for c in sub.checks:
                c.id = "%s:%s" % (name, c.id)
            rep.merge(sub)
            miso = hopfalg.check_m_isomorphism(fh, rng_for(seed, name + "-m"))
            for c in miso.checks:
                c.id = "%s:%s" % (name, c.id)
            rep.merge(miso)
        return rep
    if instance == "composite":
        for nn in range(1, n + 1):
            F3 = Fq(p)
            H = honda_fgl(nn, F3, p ** (nn + 1))
            C = CompositeHopf(H, nn)
            sub = hopfalg.check_axioms(C, rng_for(seed, "composite%d" % nn))
            for c in sub.checks:
                c.id = "n%d:%s" % (nn, c.id)
            rep.merge(sub)
            routes = hopfalg.derive_psi_from_coaction(C)
            for i in range(nn):
                rep.record(
                    "n%d:two-route-psi-b%d" % (nn, i),
                    routes[i] is not None
                    and routes[i].sub(hopfalg.composite_psi_b(C, i)).is_zero(),
                )
        return rep
    raise ConfigError("unknown hopf instance %r" % instance)


def suite_equivalence(seed: int, count: int = 10) -> Report:
    rep = Report("equivalence")
    rng = rng_for(seed, "equivalence")
    instances = function_hopf_instances(seed)
    for k in range(count):
        name, fh = instances[k % len(instances)]
        M = comod.regular_ccomodule(fh)
        P, Pinv = comod.random_graded_automorphism(M.basis, fh.R, rng)
        M = comod.conjugate_ccomodule(M, P, Pinv)
        ok_ax = M.check().ok
        T = comod.comod_to_twisted(M)
        ok_tw = T.check(rng).ok
        back = comod.twisted_to_comod(T)
        ok_rt = comod.ccomod_equal(M, back)
        ok_rt2 = comod.twisted_equal(T, comod.comod_to_twisted(back))
        MM = M.tensor(M)
        ok_mon = comod.twisted_equal(comod.comod_to_twisted(MM), T.tensor(T))
        ok_mon2 = comod.ccomod_equal(comod.twisted_to_comod(T.tensor(T)), MM)
        rep.record("roundtrip:%d:%s" % (k, name),
                   ok_ax and ok_tw and ok_rt and ok_rt2)
        rep.record("monoidal:%d:%s" % (k, name), ok_mon and ok_mon2)
    return rep


def suite_milnor(p: int, n: int, seed: int) -> Report:
    rep = Report("milnor")
    rng = rng_for(seed, "milnor")
    K = Fq(p, 2)
    H = honda_fgl(n, K, p ** (n + 1))
    C = CompositeHopf(H, n)
    L = spaces.lens_model(C)
    rep.record("lens-axioms", L.check().ok)
    act = comod.extract_milnor(L)
    for i in range(n):
        got = act.matrices[i].get(spaces._yname(0), {})
        rep.record("lens-Qi-value:%d" % i,
                   got == {spaces._xname(p ** i): K.one})
    rep.merge(comod.milnor_anticommute_report(act))
    rep.merge(comod.milnor_derivation_report(L, L))
    LH = LambdaHopf(K, n)
    for k in range(3):
        M0 = comod.cofree_clambda(C, [("v%d" % k, k % 2)])
        P, Pinv = comod.random_graded_automorphism(M0.basis, K, rng)
        M1 = comod.conjugate_clambda(M0, P, Pinv)
        LM = comod.lambda_comodule_from_clambda(M1, LH)
        rep.record("random-lambda-axioms:%d" % k, LM.check().ok)
        rep.merge(comod.milnor_anticommute_report(comod.extract_milnor(LM)))
    # twist law with a Honda-automorphism witness
    a0 = K.from_int(2)
    witness_coeffs = [a0] + ([K.one] if n >= 2 else [])
    t = honda_endo(H, witness_coeffs, n)
    coeffs = list(witness_coeffs) + [K.zero] * (n - len(witness_coeffs))
    # module action: x -> t(x), y -> y, extended multiplicatively
    tab = spaces.model_aux_table(C, p ** n, with_y=True)
    tser = TruncSeries(tab, K)
    for e, c in t.series.terms.items():
        if e[0] < p ** n:
            key = tuple(e[0] if nm == "x" else 0 for nm in tab.names)
            tser = tser.add(TruncSeries(tab, K, {key: c}))
    action = {}
    pw = TruncSeries.one(tab, K)
    for k in range(p ** n):
        action[spaces._xname(k)] = spaces._rows_from_aux(C, tab, pw, True)
        action[spaces._yname(k)] = spaces._rows_from_aux(
            C, tab, TruncSeries.gen(tab, K, "y").mul(pw), True
        )
        if k + 1 < p ** n:
            pw = pw.mul(tser)
    mod_action = {
        a: {b: g.constant_term() for b, g in row.items()}
        for a, row in action.items()
    }
    w = comod.MilnorTwistWitness(coeffs, lambda c: c, mod_action)
    rep.merge(comod.milnor_twist_report(L, w, n))
    # recognizer: plant coefficients and recover them
    act2 = comod.extract_milnor(L)
    qs = [K.rand(rng) for _ in range(n)]
    op = {}
    for a, _d in L.basis:
        row = {}
        for i in range(n):
            for b, c in act2.matrices[i].get(a, {}).items():
                s = K.add(row.get(b, K.zero), K.mul(qs[i], c))
                if s == K.zero:
                    row.pop(b, None)
                else:
                    row[b] = s
        op[a] = row
    got = spaces.recognize_lens_derivation(L, op)
    rep.record("derivation-recognizer", got == qs)
    return rep


def suite_assembly(p: int, n: int, seed: int, count: int = 10) -> Report:
    rep = Report("assembly")
    rng = rng_for(seed, "assembly")
    F3 = Fq(p)
    H = honda_fgl(n, F3, p ** (n + 1))
    C = CompositeHopf(H, n)
    rep.merge(comod.check_assembled_comultiplication(C))
    L = spaces.lens_model(C)
    S = comod.split_comodule(L)
    rep.record("lens-compat", S.compatibility_defect() is None)
    A = S.assemble()
    rep.record("lens-reassemble", comod.comodule_matrices_equal(A, L))
    rep.merge(comod.nine_diagram_report(S))
    for k in range(count):
        M0 = comod.cofree_clambda(C, [("v%d" % k, k % 2)])
        P, Pinv = comod.random_graded_automorphism(M0.basis, F3, rng)
        M1 = comod.conjugate_clambda(M0, P, Pinv)
        ok_compat = M1.compatibility_defect() is None
        A1 = M1.assemble()
        ok_ax = A1.check().ok
        S1 = comod.split_comodule(A1)
        ok_rt = comod.clambda_equal(S1, M1)
        ok_rt2 = comod.comodule_matrices_equal(S1.assemble(), A1)
        rep.record("random-roundtrip:%d" % k, ok_compat and ok_ax and ok_rt and ok_rt2)
    return rep


def suite_iso(p: int, n: int, xdeg: int, uprec: int) -> Report:
    rep = Report("iso")
    K = field_for(p, n)
    T = base_tower(p, n, uprec)
    E = e_theory_fgl(p, n, T, xdeg)
    H = honda_fgl(n, K, xdeg)
    iso = isofind.solve_phi(E, H, n, xdeg)
    sub = isofind.verify_iso(iso)
    rep.merge(sub)
    kinds = {g.kind for g in iso.tower.gens}
    rep.record("only-supported-adjunctions", kinds <= {"kummer", "additive"})
    return rep


def suite_chern(p: int, n: int, xdeg: int, uprec: int) -> Report:
    rep = Report("chern")
    K = field_for(p, n)
    T = base_tower(p, n, uprec)
    E = e_theory_fgl(p, n, T, xdeg)
    H = honda_fgl(n, K, xdeg)
    iso = isofind.solve_phi(E, H, n, xdeg)
    rep.merge(isofind.verify_iso(iso))
    data = spaces.build_chern_data(iso, n)
    rep.merge(spaces.bhat_matrix_report(data))
    cc = spaces.ChernCharacter(data, p)
    rep.merge(cc.ring_map_report())
    rep.record(
        "theta-x-image",
        cc.x_img.coeff((0, 1)) == data.iso.inverse.coeff((1,)),
    )
    rep.merge(spaces.chern_transport_report(data, p))
    return rep


def suite_equivariance(p: int, n: int, xdeg: int, uprec: int) -> Report:
    rep = Report("iso-equivariance")
    K = field_for(p, n)
    T = base_tower(p, n, uprec)
    E = e_theory_fgl(p, n, T, xdeg)
    H = honda_fgl(n, K, xdeg)
    iso = isofind.solve_phi(E, H, n, xdeg)
    Tw = iso.tower
    sigmas = [("identity", TowerAuto(Tw, 0, {}))]
    if Tw.fq.m > 1:
        sigmas.append(("frobenius", TowerAuto(Tw, 1, {})))
    for g in Tw.gens:
        if g.kind == "additive":
            sigmas.append(
                ("translate-%s" % g.name,
                 TowerAuto(Tw, 0, {g.name: Tw.add(Tw.gen(g.name), Tw.one)}))
            )
    for name, sigma in sigmas:
        if not sigma.validate():
            rep.record("sigma-valid:%s" % name, False)
            continue
        wk = isofind.derive_honda_witness(iso, sigma)
        sub = isofind.check_equivariance(iso, wk)
        rep.record("honda:%s" % name, sub.ok)
        we = isofind.derive_deformation_witness(iso, sigma)
        sub2 = isofind.check_equivariance(iso, we)
        rep.record("deformation:%s" % name, sub2.ok)
    data = spaces.build_chern_data(iso, n)
    witnesses = [isofind.derive_deformation_witness(iso, s) for _n, s in sigmas] + [
        isofind.derive_honda_witness(iso, s) for _n, s in sigmas
    ]
    rep.merge(spaces.bhat_invariance_report(data, witnesses))
    return rep


# -- command-line plumbing --------------------------------------------------------------


def check_p(p: int) -> int:
    if not is_prime(p) or p < 3:
        raise ConfigError("p must be an odd prime, got %r" % p)
    return p


def emit(report: Report, args, extra=None) -> int:
    payload = report.to_json()
    payload["schema"] = SCHEMA
    payload["seed"] = args.seed
    if extra:
        payload.update(extra)
    if getattr(args, "timings", False):
        payload["elapsed"] = round(time.time() - args._t0, 3)
    if args.format == "json":
        text = json.dumps(payload, sort_keys=True, indent=1)
    else:
        lines = ["suite %s: %s" % (payload["suite"], "ok" if report.ok else "FAILED")]
        for c in report.checks:
            mark = "pass" if c.ok else "FAIL"
            w = "" if c.witness is None else "  [%s]" % c.witness
            lines.append("  %-4s %s%s" % (mark, c.id, w))
        text = "\n".join(lines)
    out = getattr(args, "output", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return 0 if report.ok else 1


def series_payload(series: TruncSeries, ring) -> dict:
    return {"terms": [{"exp": list(e), "coeff": ring.text(c)}
                      for e, c in sorted(series.terms.items())]}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="chromalg")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--timings", action="store_true")
    ap.add_argument("-o", "--output", default=None)
    sub = ap.add_subparsers(dest="verb", required=True)

    p_fgl = sub.add_parser("fgl")
    p_fgl.add_argument("action", choices=("honda", "specialize", "pseries", "endo"))
    p_fgl.add_argument("--p", type=int, default=3)
    p_fgl.add_argument("--n", type=int, default=1)
    p_fgl.add_argument("--cap", type=int, default=None)
    p_fgl.add_argument("--coeffs", default="1")
    p_fgl.add_argument("--assign", action="append", default=None)

    p_iso = sub.add_parser("iso")
    p_iso.add_argument("action", choices=("solve", "verify", "equivariance"))
    p_iso.add_argument("--p", type=int, default=3)
    p_iso.add_argument("--n", type=int, default=1)
    p_iso.add_argument("--xdeg", type=int, default=10)
    p_iso.add_argument("--uprec", type=int, default=6)
    p_iso.add_argument("--law", default="e")
    p_iso.add_argument("--in", dest="infile", default=None)

    p_hopf = sub.add_parser("hopf")
    p_hopf.add_argument("action", choices=("check",))
    p_hopf.add_argument("--instance", choices=("lambda", "cgr", "composite"),
                        required=True)
    p_hopf.add_argument("--p", type=int, default=3)
    p_hopf.add_argument("--n", type=int, default=2)

    p_com = sub.add_parser("comod")
    p_com.add_argument("action", choices=("check",))
    p_com.add_argument("--suite", choices=("equivalence", "milnor", "assembly"),
                       required=True)
    p_com.add_argument("--p", type=int, default=3)
    p_com.add_argument("--n", type=int, default=2)
    p_com.add_argument("--count", type=int, default=10)

    p_sp = sub.add_parser("spaces")
    p_sp.add_argument("action", choices=("chern", "coaction"))
    p_sp.add_argument("--p", type=int, default=3)
    p_sp.add_argument("--n", type=int, default=1)
    p_sp.add_argument("--xdeg", type=int, default=10)
    p_sp.add_argument("--uprec", type=int, default=6)

    sub.add_parser("all")

    args = ap.parse_args(argv)
    args._t0 = time.time()
    if args.seed is None:
        args.seed = int(os.environ.get("CHROMALG_SEED", "0"))

    try:
        return run(args)
    except ConfigError as exc:
        sys.stderr.write("config error: %s\n" % exc)
        return 2
    except ChromalgError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1


def run(args) -> int:
    verb = args.verb
    if verb == "fgl":
        p = check_p(args.p)
        n = args.n
        if n < 1:
            raise ConfigError("n must be at least 1")
        cap = args.cap or p ** (n + 1) + p
        if args.action == "honda":
            F = honda_fgl(n, field_for(p, n), cap)
            rep = Report("fgl-honda")
            rep.record("constructed", True)
            return emit(rep, args, {"series": series_payload(F.series, F.ring)})
        if args.action == "pseries":
            if args.assign:
                F = _specialized(args, p, cap)
            else:
                F = honda_fgl(n, field_for(p, n), cap)
            ps = p_series(F)
            rep = Report("fgl-pseries")
            rep.record("constructed", True)
            return emit(rep, args, {"series": series_payload(ps, F.ring)})
        if args.action == "specialize":
            F = _specialized(args, p, cap)
            rep = Report("fgl-specialize")
            rep.record("constructed", True)
            return emit(rep, args, {"series": series_payload(F.series, F.ring)})
        if args.action == "endo":
            K = field_for(p, n)
            H = honda_fgl(n, K, cap)
            coeffs = [K.from_int(int(c)) for c in args.coeffs.split(",")]
            t = honda_endo(H, coeffs, n)
            rep = Report("fgl-endo")
            rep.record("endomorphism", True)
            return emit(rep, args, {"series": series_payload(t.series, K)})
    if verb == "iso":
        p = check_p(args.p)
        n = args.n
        if args.action == "solve":
            if args.law != "e":
                raise ConfigError("only the standard deformation law is built in")
            K = field_for(p, n)
            T = base_tower(p, n, args.uprec)
            E = e_theory_fgl(p, n, T, args.xdeg)
            H = honda_fgl(n, K, args.xdeg)
            iso = isofind.solve_phi(E, H, n, args.xdeg)
            rep = isofind.verify_iso(iso)
            phi_terms = {str(e[0]): iso.tower.text(c) for e, c in iso.phi.terms.items()}
            return emit(rep, args, {
                "tower": iso.tower.descriptor(),
                "phi": phi_terms,
                "p": p, "n": n, "xdeg": args.xdeg, "uprec": args.uprec,
            })
        if args.action == "verify":
            payload = _load_iso_payload(args)
            iso = _rebuild_iso(payload)
            return emit(isofind.verify_iso(iso), args)
        if args.action == "equivariance":
            if args.infile:
                payload = _load_iso_payload(args)
                rep = suite_equivariance(payload["p"], payload["n"],
                                         payload["xdeg"], payload["uprec"])
            else:
                rep = suite_equivariance(check_p(args.p), args.n, args.xdeg, args.uprec)
            return emit(rep, args)
    if verb == "hopf":
        return emit(suite_hopf(args.instance, check_p(args.p), args.n, args.seed), args)
    if verb == "comod":
        p, n = check_p(args.p), args.n
        if args.suite == "equivalence":
            rep = suite_equivalence(args.seed, args.count)
        elif args.suite == "milnor":
            rep = suite_milnor(p, n, args.seed)
        else:
            rep = suite_assembly(p, n, args.seed, args.count)
        return emit(rep, args)
    if verb == "spaces":
        p, n = check_p(args.p), args.n
        if args.action == "chern":
            return emit(suite_chern(p, n, args.xdeg, args.uprec), args)
        C = CompositeHopf(honda_fgl(n, field_for(p, n), p ** (n + 1)), n)
        rep = Report("spaces-coaction")
        rep.record("constructed", True)
        tx = spaces.coaction_x(C, min(args.xdeg + 1, p ** (n + 1)))
        ty = spaces.coaction_y(C)
        return emit(rep, args, {
            "coaction-x": series_payload(tx, C.ring),
            "coaction-y": series_payload(ty, C.ring),
        })
    if verb == "all":
        rep = Report("all")
        rep.merge(suite_fgl(3, 1, args.seed))
        rep.merge(suite_hopf("lambda", 3, 2, args.seed))
        rep.merge(suite_hopf("cgr", 3, 1, args.seed))
        rep.merge(suite_hopf("composite", 3, 2, args.seed))
        rep.merge(suite_equivalence(args.seed, 4))
        rep.merge(suite_milnor(3, 2, args.seed))
        rep.merge(suite_assembly(3, 2, args.seed, 4))
        rep.merge(suite_iso(3, 1, 10, 6))
        rep.merge(suite_chern(3, 1, 10, 6))
        rep.merge(suite_equivariance(3, 1, 10, 6))
        return emit(rep, args)
    raise ConfigError("unknown verb %r" % verb)


def _specialized(args, p, cap) -> FGL:
    q = QPoly(p)
    assignments = {}
    for item in args.assign or []:
        key, val = item.split("=", 1)
        i = int(key)
        if val == "u":
            assignments[i] = q.u(1)
        elif val.startswith("u^"):
            assignments[i] = q.u(int(val[2:]))
        else:
            assignments[i] = q.poly([(0, int(val))])
    n = max([1] + [i for i in assignments])
    if any(val == q.u(1) for val in assignments.values()) or any(
        k > 0 for a in assignments.values() for k in a
    ):
        target = base_tower(p, max(args.n, 1), 8)
    else:
        target = field_for(p, max(args.n, 1))
    return specialize_hazewinkel(p, assignments, target, cap)


def _load_iso_payload(args) -> dict:
    if not args.infile:
        raise ConfigError("--in FILE is required")
    with open(args.infile) as fh:
        return json.load(fh)


def _rebuild_iso(payload: dict):
    p, n = payload["p"], payload["n"]
    xdeg, uprec = payload["xdeg"], payload["uprec"]
    tower = parse_tower_descriptor(payload["tower"])
    base = base_tower(p, n, uprec)
    conv = embed_base_into(base, tower)
    E = e_theory_fgl(p, n, base, xdeg)
    H = honda_fgl(n, field_for(p, n), xdeg)
    Ef = E.map_coefficients(conv, tower)
    Hf = H.map_coefficients(lambda c: tower.scalar(c), tower)
    uni = VarTable([Var("X", 2, 0, xdeg + 1)])
    phi = TruncSeries(
        uni, tower, {(int(k),): tower.parse(v) for k, v in payload["phi"].items()}
    )
    from .isofind import FGLIso

    return FGLIso(Ef, Hf, phi, phi.reverse(), tower, conv)


if __name__ == "__main__":
    raise SystemExit(main())
