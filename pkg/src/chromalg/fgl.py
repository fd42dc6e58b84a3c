"""p-typical formal group laws at finite truncation.

Construction runs in characteristic zero: Hazewinkel logarithm coefficients
are exact rational polynomials, the group law is exp(log X + log Y), and a
single mod-p reduction lands in the target ring.  p-integrality of every
surviving monomial is asserted during reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    CoefficientNotInFpn,
    GradingMismatch,
    NonzeroConstantTerm,
    NotPIntegral,
)
from .fields import Fq, QPoly, ZERO
from .gseries import TruncSeries, Var, VarTable, map_into
from .tower import TowerField

XY_NAMES = ("X", "Y")


# -- Hazewinkel logarithm ----------------------------------------------------------


def _vpoly_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            n = max(len(ea), len(eb))
            e = tuple(
                (ea[i] if i < len(ea) else 0) + (eb[i] if i < len(eb) else 0)
                for i in range(n)
            )
            s = out.get(e, Fraction(0)) + ca * cb
            if s:
                out[e] = s
            elif e in out:
                del out[e]
    return out


def _vpoly_pow(a, k):
    acc = {(): Fraction(1)}
    base = a
    while k:
        if k & 1:
            acc = _vpoly_mul(acc, base)
        base = _vpoly_mul(base, base) if k > 1 else base
        k >>= 1
    return acc


def hazewinkel_log(p: int, depth: int):
    """Coefficients m_0..m_depth of the universal p-typical logarithm,
    as rational polynomials in v_1, v_2, ... (exponent tuples index the v's,
    v_i at position i-1).  They satisfy p*m_k = sum_i m_i v_{k-i}^{p^i}."""
    ms = [{(): Fraction(1)}]
    for k in range(1, depth + 1):
        acc = {}
        for i in range(k):
            vexp = [0] * (k - i)
            vexp[k - i - 1] = p ** i
            term = _vpoly_mul(ms[i], {tuple(vexp): Fraction(1)})
            for e, c in term.items():
                s = acc.get(e, Fraction(0)) + c
                if s:
                    acc[e] = s
                elif e in acc:
                    del acc[e]
        ms.append({e: c / p for e, c in acc.items()})
    return ms


def specialize_vpoly(m, assignments: dict, qring: QPoly):
    """Evaluate a v-polynomial with v_i -> assignments.get(i, 0) in Q[U]."""
    out = qring.zero
    for e, c in m.items():
        term = {0: c}
        ok = True
        for pos, exp in enumerate(e):
            if exp == 0:
                continue
            val = assignments.get(pos + 1)
            if val is None or qring.is_zero(val):
                ok = False
                break
            base = val
            acc = qring.one
            k = exp
            while k:
                if k & 1:
                    acc = qring.mul(acc, base)
                base = qring.mul(base, base) if k > 1 else base
                k >>= 1
            term = qring.mul(term, acc)
        if ok:
            out = qring.add(out, term)
    return out


# -- group-law container -------------------------------------------------------------


@dataclass
class FGL:
    p: int
    ring: object
    series: TruncSeries  # two variables X, Y with a total-degree cap
    cap: int
    provenance: str = "USER"

    def x_table(self) -> VarTable:
        return VarTable([Var("X", 2, 0, self.cap + 1)])

    def x_gen(self) -> TruncSeries:
        return TruncSeries.gen(self.x_table(), self.ring, "X")

    def apply(self, a: TruncSeries, b: TruncSeries) -> TruncSeries:
        """F(a, b) for series a, b with zero constant term over a common ring."""
        for s in (a, b):
            if not s.ring.is_zero(s.constant_term()):
                raise NonzeroConstantTerm("group-law arguments need zero constant term")
        return self.series.subs({"X": a, "Y": b})

    def map_coefficients(self, fn, ring) -> "FGL":
        table = self.series.table
        out = {}
        for e, c in self.series.terms.items():
            c2 = fn(c)
            if not ring.is_zero(c2):
                out[e] = c2
        return FGL(self.p, ring, TruncSeries(table, ring, out), self.cap, self.provenance)


def xy_table(cap: int) -> VarTable:
    return VarTable([Var("X", 2, 0, cap + 1), Var("Y", 2, 0, cap + 1)], total_cap=cap)


def _build_from_log(p: int, log_coeffs, cap: int, qring: QPoly) -> TruncSeries:
    """exp(log X + log Y) over Q[U] from p-power log coefficients {p^k: m_k}."""
    uni = VarTable([Var("X", 2, 0, cap + 1)])
    terms = {}
    for k, m in log_coeffs.items():
        if not qring.is_zero(m) and k <= cap:
            terms[(k,)] = m
    log_series = TruncSeries(uni, qring, terms)
    exp_series = log_series.reverse()
    tab = xy_table(cap)
    lx = map_into(log_series, tab, qring)
    ly = TruncSeries(
        tab, qring, {(0, e[0]): c for e, c in log_series.terms.items()}
    )
    return exp_series.compose(lx.add(ly))


def _reduce_series(series: TruncSeries, ring, qring: QPoly) -> TruncSeries:
    """Reduce Q[U]-coefficients mod p into the target ring (U -> u)."""
    out = {}
    for e, q in series.terms.items():
        if isinstance(ring, TowerField):
            val = ring.zero
            for uexp, frac in q.items():
                val = ring.add(
                    val, ring.scalar_mul(qring.plocal.reduce_into(frac, ring.fq), ring.u(uexp))
                )
        elif isinstance(ring, Fq):
            val = ring.zero
            for uexp, frac in q.items():
                if uexp != 0:
                    raise GradingMismatch("u-power assigned into a ring without u")
                val = ring.add(val, qring.plocal.reduce_into(frac, ring))
        else:
            raise GradingMismatch("unsupported target ring for reduction")
        if not ring.is_zero(val):
            out[e] = val
    return TruncSeries(series.table, ring, out)


def honda_fgl(n: int, K, cap: int) -> FGL:
    """The height-n Honda law, with [p](X) = X^{p^n} exactly mod truncation."""
    p = K.p if isinstance(K, Fq) else K.fq.p
    qring = QPoly(p)
    logc = {}
    k = 0
    while p ** (n * k) <= cap:
        logc[p ** (n * k)] = {0: Fraction(1, p ** k)}
        k += 1
    F0 = _build_from_log(p, logc, cap, qring)
    series = _reduce_series(F0, K, qring)
    return FGL(p, K, series, cap, "HONDA(%d)" % n)


def specialize_hazewinkel(p: int, assignments: dict, target, cap: int) -> FGL:
    """Specialize the universal p-typical law; assignments map i to Q[U]
    polynomials (U reduces to the distinguished degree-0 parameter)."""
    qring = QPoly(p)
    for i, val in assignments.items():
        if i < 1:
            raise GradingMismatch("v-index must be positive")
        if not isinstance(val, dict):
            raise GradingMismatch("assignments must be Q[U] polynomials")
    depth = 0
    while p ** (depth + 1) <= cap:
        depth += 1
    ms = hazewinkel_log(p, depth)
    logc = {p ** k: specialize_vpoly(ms[k], assignments, qring) for k in range(depth + 1)}
    F0 = _build_from_log(p, logc, cap, qring)
    series = _reduce_series(F0, target, qring)
    return FGL(p, target, series, cap, "HAZEWINKEL_SPECIALIZED")


def e_theory_fgl(p: int, n: int, target: TowerField, cap: int) -> FGL:
    """The mod-I_n reduction of the height-(n+1) universal deformation law:
    v_n -> u_n, v_{n+1} -> 1, the rest 0."""
    q = QPoly(p)
    return specialize_hazewinkel(p, {n: q.u(1), n + 1: q.one}, target, cap)


def log_p_series_oracle(p: int, logc: dict, cap: int, qring: QPoly) -> TruncSeries:
    """Independent p-series: exp(p * log X) over Q[U]."""
    uni = VarTable([Var("X", 2, 0, cap + 1)])
    terms = {(k,): m for k, m in logc.items() if k <= cap and not qring.is_zero(m)}
    log_series = TruncSeries(uni, qring, terms)
    exp_series = log_series.reverse()
    plog = log_series.scale(qring.from_int(p))
    return exp_series.compose(plog)


# -- formal sums and the p-series -----------------------------------------------------


def formal_sum(F: FGL, summands) -> TruncSeries:
    summands = list(summands)
    if not summands:
        raise ValueError("formal sum needs at least one summand")
    acc = summands[0]
    if not acc.ring.is_zero(acc.constant_term()):
        raise NonzeroConstantTerm("summands need zero constant term")
    for s in summands[1:]:
        acc = F.apply(acc, s)
    return acc


def p_series(F: FGL) -> TruncSeries:
    x = F.x_gen()
    return formal_sum(F, [x] * F.p)


def fgl_neg(F: FGL, s: TruncSeries) -> TruncSeries:
    """The formal inverse: F(s, neg(s)) = 0 mod truncation."""
    out = s.neg()
    bound = (s.table.total_cap or s.table.truncs[0] or 64) + 2
    for _ in range(bound):
        err = F.apply(s, out)
        if err.is_zero():
            return out
        exps = sorted(err.terms, key=lambda e: (sum(e), e))
        low = exps[0]
        out = out.sub(TruncSeries(s.table, s.ring, {low: err.terms[low]}))
    raise RuntimeError("formal inverse did not converge")


def detected_height(F: FGL) -> int | None:
    """h with [p](X) = (unit) X^{p^h} + higher, or None for the additive law."""
    ps = p_series(F)
    if ps.is_zero():
        return None
    k = min(e[0] for e in ps.terms)
    h = 0
    while F.p ** h < k:
        h += 1
    return h if F.p ** h == k else 0


# -- axiom checks ------------------------------------------------------------------


def unit_defect(F: FGL):
    zero = TruncSeries.zero(F.x_table(), F.ring)
    x = F.x_gen()
    return F.apply(x, zero).sub(x), F.apply(zero, x).sub(x)


def commutativity_defect(F: FGL) -> TruncSeries:
    flipped = {}
    for (a, b), c in F.series.terms.items():
        flipped[(b, a)] = c
    return F.series.sub(TruncSeries(F.series.table, F.ring, flipped))


def associativity_defect(F: FGL) -> TruncSeries:
    cap = F.cap
    tab3 = VarTable(
        [Var("X", 2, 0, cap + 1), Var("Y", 2, 0, cap + 1), Var("Z", 2, 0, cap + 1)],
        total_cap=cap,
    )
    X = TruncSeries.gen(tab3, F.ring, "X")
    Y = TruncSeries.gen(tab3, F.ring, "Y")
    Z = TruncSeries.gen(tab3, F.ring, "Z")
    inner_xy = F.series.subs({"X": X, "Y": Y})
    inner_yz = F.series.subs({"X": Y, "Y": Z})
    left = F.series.subs({"X": inner_xy, "Y": Z})
    right = F.series.subs({"X": X, "Y": inner_yz})
    return left.sub(right)


def strict_height_defect(F: FGL, n: int) -> TruncSeries:
    """F(X,Y) - (X+Y) below total degree p^n."""
    lin = {(1, 0), (0, 1)}
    bad = {
        e: c
        for e, c in F.series.terms.items()
        if sum(e) < F.p ** n and e not in lin
    }
    for e in lin:
        c = F.series.terms.get(e)
        one = F.ring.one
        if c != one:
            bad[e] = F.ring.sub(c if c is not None else F.ring.zero, one)
    return TruncSeries(F.series.table, F.ring, bad)


# -- Honda endomorphisms ----------------------------------------------------------


@dataclass
class HondaEndo:
    fgl: FGL
    coeffs: tuple
    series: TruncSeries


def honda_endo(H: FGL, coeffs, n: int | None = None, verify: bool = True) -> HondaEndo:
    """t(X) = sum^H of a_i X^{p^i}; with n given, coefficients must lie in F_{p^n}."""
    K = H.ring
    coeffs = tuple(coeffs)
    if n is not None:
        for a in coeffs:
            if not K.in_subfield(a, n):
                raise CoefficientNotInFpn("coefficient outside the height-n subfield")
    tab = H.x_table()
    summands = []
    for i, a in enumerate(coeffs):
        if K.is_zero(a) or H.p ** i > H.cap:
            continue
        summands.append(TruncSeries(tab, K, {(H.p ** i,): a}))
    if not summands:
        series = TruncSeries.zero(tab, K)
    else:
        series = formal_sum(H, summands)
    endo = HondaEndo(H, coeffs, series)
    if verify and not endo_defect(endo).is_zero():
        raise CoefficientNotInFpn("series fails the endomorphism identity")
    return endo


def endo_defect(t: HondaEndo) -> TruncSeries:
    H = t.fgl
    tab2 = H.series.table
    tx = map_into(t.series, tab2, H.ring)
    ty = TruncSeries(tab2, H.ring, {(0, e[0]): c for e, c in t.series.terms.items()})
    lhs = t.series.subs({"X": H.series})
    rhs = H.series.subs({"X": tx, "Y": ty})
    return lhs.sub(rhs)


def endo_compose(a: HondaEndo, b: HondaEndo) -> TruncSeries:
    return a.series.compose(b.series)


def endo_formal_sum(a: HondaEndo, b: HondaEndo) -> TruncSeries:
    return a.fgl.apply(a.series, b.series)


def recognize_honda_endo(H: FGL, series: TruncSeries, n: int | None = None,
                         max_index: int | None = None):
    """Write an endomorphism as sum^H a_i X^{p^i}; returns coefficients or None.

    With n given, coefficients are additionally required to lie in F_{p^n};
    without it, any ring coefficients are accepted (the truncated-automorphism
    case, where unconstrained p-power slots need not be rational).
    """
    p, K = H.p, H.ring
    if max_index is None:
        max_index = 0
        while p ** (max_index + 1) <= H.cap:
            max_index += 1
    rest = series
    coeffs = []
    for i in range(max_index + 1):
        a = rest.coeff((p ** i,))
        coeffs.append(a)
        if not K.is_zero(a):
            mono = TruncSeries(series.table, K, {(p ** i,): a})
            rest = H.apply(fgl_neg(H, mono), rest)
        low = min((sum(e) for e in rest.terms), default=None)
        if low is None:
            break
        if low < p ** (i + 1):
            return None
    if not rest.is_zero():
        return None
    while coeffs and K.is_zero(coeffs[-1]):
        coeffs.pop()
    try:
        rebuilt = honda_endo(H, coeffs, n, verify=False)
    except CoefficientNotInFpn:
        return None
    if rebuilt.series.sub(series).is_zero():
        return tuple(coeffs)
    return None
