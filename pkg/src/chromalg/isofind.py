"""Order-by-order construction of the degeneration isomorphism.

Given a law F of generic height n over F((u_n)) and the Honda law H_n, the
solver builds Phi with Phi(F(X,Y)) = H(Phi(X), Phi(Y)) mod truncation, one
coefficient degree at a time.  Non-p-power coefficients appear linearly with
the binomial cocycle and are solved in the current tower; p-power
coefficients cancel at their own degree, ride along as free symbols, and are
pinned when an obstruction presents them linearly or in the twisted
z^{p^m} = z + c shape (adjoining roots as needed).  Symbols still free at the
requested degree are set to zero, a valid truncated solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import InvalidWitness, PrecisionExhausted, UnsupportedExtension
from .fgl import FGL, HondaEndo, endo_defect, p_series
from .gseries import TruncSeries, Var, VarTable
from .report import Report
from .tower import (
    Additive,
    Kummer,
    TowerAuto,
    TowerField,
    add_free_gens,
    adjoin_root,
    pin_free_gen,
)


@dataclass
class FGLIso:
    source: FGL
    target: FGL
    phi: TruncSeries      # univariate over the tower
    inverse: TruncSeries
    tower: TowerField
    base_conv: object     # transports elements of the original base tower

    def phi0(self):
        return self.phi.coeff((1,))


@dataclass
class ActionWitness:
    """Action data for one symbolic group element.

    kind "deformation": t_series is an isomorphism F -> F^sigma.
    kind "honda": t_series is an automorphism of the Honda target.
    """

    kind: str
    t_series: TruncSeries
    sigma: TowerAuto


def series_map_coeffs(s: TruncSeries, fn, ring=None) -> TruncSeries:
    ring = ring or s.ring
    out = {}
    for e, c in s.terms.items():
        c2 = fn(c)
        if not ring.is_zero(c2):
            out[e] = c2
    return TruncSeries(s.table, ring, out)


class _SolverState:
    def __init__(self, R: TowerField, Fterms: dict, Hterms: dict, cap: int):
        self.R = R
        self.Fterms = Fterms        # {(a,b): element}
        self.Hterms = Hterms
        self.cap = cap
        self.phi = {1: None}        # degree -> element
        self.free_names = []
        self.deferred = []

    def transport(self, conv):
        self.Fterms = {e: conv(c) for e, c in self.Fterms.items()}
        self.Hterms = {e: conv(c) for e, c in self.Hterms.items()}
        self.phi = {k: conv(c) if c is not None else None for k, c in self.phi.items()}
        self.deferred = [conv(q) for q in self.deferred]

    def fpowers(self, dmax: int):
        """F^k truncated to total degree dmax, k = 1..dmax."""
        R = self.R
        pw = {1: {e: c for e, c in self.Fterms.items() if sum(e) <= dmax}}
        for k in range(2, dmax + 1):
            prev = pw[k - 1]
            cur = {}
            for (a1, b1), c1 in prev.items():
                for (a2, b2), c2 in self.Fterms.items():
                    a, b = a1 + a2, b1 + b2
                    if a + b > dmax:
                        continue
                    key = (a, b)
                    s = R.add(cur.get(key, R.zero), R.mul(c1, c2))
                    if R.is_zero(s):
                        cur.pop(key, None)
                    else:
                        cur[key] = s
            pw[k] = cur
        return pw


def _free_exponent_profile(R: TowerField, q: dict):
    """Map free-generator index -> set of exponents occurring in q."""
    prof = {}
    for i, g in enumerate(R.gens):
        if g.kind != "free":
            continue
        exps = {z[i] for (z, _t) in q}
        if exps - {0}:
            prof[i] = exps | {0} if 0 in exps else exps
    return prof


def _split_by_exp(R: TowerField, q: dict, i: int):
    """Group terms of q by the exponent of generator i, dropping that slot."""
    parts = {}
    for (z, t), c in q.items():
        k = z[i]
        nz = z[:i] + (0,) + z[i + 1 :]
        parts.setdefault(k, {})[(nz, t)] = c
    return parts


class PhiSolver:
    def __init__(self, F: FGL, H: FGL, n: int, xdeg: int, pole_bound: int | None = None):
        if not isinstance(F.ring, TowerField):
            raise UnsupportedExtension("the source law must live over a tower field")
        self.F0 = F
        self.H0 = H
        self.n = n
        self.p = F.p
        self.xdeg = xdeg
        self.pole_bound = 2 * (self.p ** n - 1) if pole_bound is None else pole_bound
        self.base_conv = lambda a: a
        self.adjunction_log = []

    def _compose_conv(self, conv):
        old = self.base_conv
        self.base_conv = lambda a, _o=old, _c=conv: _c(_o(a))

    def solve(self) -> FGLIso:
        F, H, n, p = self.F0, self.H0, self.n, self.p
        R0 = F.ring
        ps = p_series(F)
        if ps.is_zero():
            raise UnsupportedExtension("additive law has no finite height")
        low = min(e[0] for e in ps.terms)
        if low < p ** n:
            raise UnsupportedExtension("[p]-series has terms below X^{p^n}")
        if low > p ** n:
            raise UnsupportedExtension("[p]-series starts above X^{p^n}")
        lam = ps.terms[(p ** n,)]

        R, root, conv = adjoin_root(R0, Kummer(p ** n - 1, lam), "c1")
        self.adjunction_log.append("kummer:%d" % (p ** n - 1))
        self._compose_conv(conv)

        if isinstance(H.ring, TowerField):
            hconv = conv

            def hmap(c, _f=hconv):
                return _f(c)
        else:
            em = R.scalar

            def hmap(c, _em=em):
                return _em(c)

        state = _SolverState(
            R,
            {e: conv(c) for e, c in F.series.terms.items()},
            {e: hmap(c) for e, c in H.series.terms.items()},
            self.xdeg,
        )
        state.phi[1] = root
        self._sweep(state)
        return self._finish(state)

    # -- the graded sweep ---------------------------------------------------------

    def _change_ring(self, state: _SolverState, R2, conv):
        state.R = R2
        state.transport(conv)
        self._compose_conv(conv)

    def _sweep(self, state: _SolverState):
        for d in range(2, self.xdeg + 1):
            self._degree_step(state, d)
        # remaining free symbols take the canonical value zero
        for name in list(state.free_names):
            self._pin(state, name, None)
        leftovers = [q for q in state.deferred if q]
        if leftovers:
            raise UnsupportedExtension(
                "unresolved obstruction after the sweep: %s" % state.R.text(leftovers[0])
            )

    def _degree_step(self, state: _SolverState, d: int):
        p = self.p
        is_ppow = self._is_p_power(d)
        obstruction = self._obstruction(state, d)
        if is_ppow:
            name = "e%d" % d
            R2, conv = add_free_gens(state.R, [name])
            self._change_ring(state, R2, conv)
            state.free_names.append(name)
            state.phi[d] = state.R.gen(name)
            obstruction = {key: conv(q) for key, q in obstruction.items()}
            for key, q in obstruction.items():
                if q:
                    self._constraint(state, q)
            return
        pivot = None
        for i in range(1, d):
            if comb(d, i) % p:
                pivot = (i, d - i)
                break
        if pivot is None:
            raise UnsupportedExtension("no unit binomial coefficient at degree %d" % d)
        i, j = pivot
        binv = pow(comb(d, i), -1, p)
        piv_val = obstruction.get(pivot, state.R.zero)
        cd = state.R.neg(state.R.scalar_mul(state.R.fq.from_int(binv), piv_val))
        state.phi[d] = cd
        self._pole_check(state, cd, d)
        for (i2, j2), q in obstruction.items():
            bin2 = comb(d, i2) % p
            resid = state.R.add(q, state.R.scalar_mul(state.R.fq.from_int(bin2), cd))
            if resid:
                self._constraint(state, resid)

    def _is_p_power(self, d: int) -> bool:
        while d % self.p == 0:
            d //= self.p
        return d == 1

    def _pole_check(self, state, c, d):
        v = state.R.valuation(c)
        if v is not None and v < -self.pole_bound * state.R.e:
            raise PrecisionExhausted(
                "coefficient of X^%d has a pole below the declared bound" % d
            )

    def _obstruction(self, state: _SolverState, d: int):
        """Degree-d part of Phi(F) - H(Phi X, Phi Y) with phi_d = 0, mixed monomials only."""
        R = state.R
        fpow = state.fpowers(d)
        out = {}

        def bump(key, val):
            if R.is_zero(val):
                return
            s = R.add(out.get(key, R.zero), val)
            if R.is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s

        for k, c in state.phi.items():
            if k >= d or c is None:
                continue
            for (a, b), fc in fpow[k].items():
                if a + b == d and a >= 1 and b >= 1:
                    bump((a, b), R.mul(c, fc))
        # right side: sum over H-terms (a,b) of h_ab * Phi(X)^a Phi(Y)^b
        upow = {1: [state.phi.get(k) or R.zero for k in range(d + 1)]}

        def get_upow(a):
            if a not in upow:
                prev = get_upow(a - 1)
                base = upow[1]
                cur = [R.zero] * (d + 1)
                for i1, c1 in enumerate(prev):
                    if R.is_zero(c1):
                        continue
                    for i2, c2 in enumerate(base):
                        if i1 + i2 > d or R.is_zero(c2):
                            continue
                        cur[i1 + i2] = R.add(cur[i1 + i2], R.mul(c1, c2))
                upow[a] = cur
            return upow[a]

        for (a, b), hc in state.Hterms.items():
            if a + b > d or a < 1 or b < 1:
                continue
            pa, pb = get_upow(a), get_upow(b)
            for i in range(1, d):
                j = d - i
                if R.is_zero(pa[i]) or R.is_zero(pb[j]):
                    continue
                bump((i, j), R.neg(R.mul(hc, R.mul(pa[i], pb[j]))))
        return out

    # -- constraint resolution ----------------------------------------------------

    def _constraint(self, state: _SolverState, q: dict):
        R = state.R
        prof = _free_exponent_profile(R, q)
        if not prof:
            if q:
                raise UnsupportedExtension("inconsistent obstruction with no free symbol")
            return
        if len(prof) > 1:
            state.deferred.append(q)
            return
        ((i, _exps),) = prof.items()
        name = R.gens[i].name
        parts = _split_by_exp(R, q, i)
        gamma = parts.get(0, {})
        nz = sorted(e for e in parts if e != 0)
        if nz == [1]:
            alpha = parts[1]
            value = R.neg(R.mul(R.inv(alpha), gamma))
            self._pin(state, name, value)
            return
        if len(nz) == 2 and nz[0] == 1 and self._is_p_power(nz[1]):
            self._pin_twisted(state, name, parts[1], parts[nz[1]], gamma, nz[1])
            return
        # other shapes usually become resolvable after another symbol is pinned
        state.deferred.append(q)

    def _pin(self, state: _SolverState, name: str, value_in_smaller):
        R2, conv = pin_free_gen(state.R, name, value_in_smaller)
        self._change_ring(state, R2, conv)
        state.free_names.remove(name)
        self._recheck_deferred(state)

    def _pin_twisted(self, state, name, beta, alpha, gamma, q):
        """Resolve alpha*eps^q + beta*eps + gamma = 0 via mu^(q-1) = -beta/alpha,
        eps = mu z, z^q = z + gamma/(beta mu)."""
        R = state.R
        if not gamma:
            # z^q = z has the canonical root 0
            self._pin(state, name, None)
            return
        i = R.gen_index[name]

        def drop(el):
            return {(z[:i] + z[i + 1 :], t): c for (z, t), c in el.items()}

        R_small, _ = pin_free_gen(R, name, None)
        alpha_s, beta_s, gamma_s = drop(alpha), drop(beta), drop(gamma)
        ratio = R_small.neg(R_small.mul(R_small.inv(alpha_s), beta_s))
        R1, mu, conv1 = adjoin_root(R_small, Kummer(q - 1, ratio), "m" + name)
        self.adjunction_log.append("kummer:%d" % (q - 1))
        c_add = R1.mul(conv1(gamma_s), R1.inv(R1.mul(conv1(beta_s), mu)))
        R2, z, conv2 = adjoin_root(R1, Additive(q, c_add), "s" + name)
        self.adjunction_log.append("additive:%d" % q)
        value = R2.mul(conv2(mu), z)

        def lift_small(a):
            return conv2(conv1(a))

        Rbig, conv_big = add_free_gens(R2, [name])
        j = Rbig.gen_index[name]

        def full(el):
            # decompose by the eps exponent, lift the rest, restore eps powers
            out = Rbig.zero
            for (zv, t), c in el.items():
                k = zv[i]
                rest = zv[:i] + zv[i + 1 :]
                base = conv_big(lift_small({(rest, t): c}))
                if k:
                    zkey = tuple(k if s == j else 0 for s in range(Rbig.r))
                    base = Rbig.mul(base, {(zkey, 0): Rbig.fq.one})
                out = Rbig.add(out, base)
            return out

        state.R = Rbig
        state.transport(full)
        self._compose_conv(full)
        self._pin(state, name, value)

    def _recheck_deferred(self, state: _SolverState):
        pending = state.deferred
        state.deferred = []
        for q in pending:
            if q:
                self._constraint(state, q)

    # -- assembly ------------------------------------------------------------------

    def _finish(self, state: _SolverState) -> FGLIso:
        R = state.R
        if any(g.kind == "free" for g in R.gens):
            raise UnsupportedExtension("free symbols survived the sweep")
        uni = VarTable([Var("X", 2, 0, self.xdeg + 1)])
        terms = {}
        for k, c in state.phi.items():
            if c is not None and not R.is_zero(c):
                terms[(k,)] = c
        phi = TruncSeries(uni, R, terms)
        tab = self.F0.series.table
        Fser = TruncSeries(tab, R, {e: c for e, c in state.Fterms.items() if not R.is_zero(c)})
        Hser = TruncSeries(tab, R, {e: c for e, c in state.Hterms.items() if not R.is_zero(c)})
        Ff = FGL(self.p, R, Fser, self.F0.cap, self.F0.provenance)
        Hf = FGL(self.p, R, Hser, self.H0.cap, self.H0.provenance)
        inverse = phi.reverse()
        return FGLIso(Ff, Hf, phi, inverse, R, self.base_conv)


def solve_phi(F: FGL, H: FGL, n: int, xdeg: int, pole_bound: int | None = None) -> FGLIso:
    return PhiSolver(F, H, n, xdeg, pole_bound).solve()


# -- verification -----------------------------------------------------------------


def homomorphy_defect(iso: FGLIso) -> TruncSeries:
    F, H, phi = iso.source, iso.target, iso.phi
    cap = min(F.cap, phi.table.truncs[0] - 1)
    tab = VarTable([Var("X", 2, 0, cap + 1), Var("Y", 2, 0, cap + 1)], total_cap=cap)
    ring = iso.tower
    X = TruncSeries.gen(tab, ring, "X")
    Y = TruncSeries.gen(tab, ring, "Y")
    Fxy = F.series.subs({"X": X, "Y": Y})
    lhs = phi.subs({"X": Fxy})
    px = phi.subs({"X": X})
    py = phi.subs({"X": Y})
    rhs = H.series.subs({"X": px, "Y": py})
    return lhs.sub(rhs)


def verify_iso(iso: FGLIso) -> Report:
    rep = Report("iso-verify")
    defect = homomorphy_defect(iso)
    if defect.is_zero():
        rep.record("homomorphy", True)
    else:
        low = min(defect.terms, key=lambda e: (sum(e), e))
        rep.record(
            "homomorphy",
            False,
            "first discrepancy at X^%dY^%d: %s"
            % (low[0], low[1], iso.tower.text(defect.terms[low])),
        )
    comp = iso.phi.compose(iso.inverse)
    x = TruncSeries.gen(iso.phi.table, iso.tower, "X")
    rep.record("two-sided-inverse", comp == x, "phi(inverse) != X")
    lead = iso.phi0()
    try:
        iso.tower.inv(lead)
        rep.record("leading-unit", True)
    except Exception:
        rep.record("leading-unit", False, "leading coefficient is not a unit")
    return rep


def apply_sigma_to_series(s: TruncSeries, sigma: TowerAuto) -> TruncSeries:
    return series_map_coeffs(s, sigma.apply)


def check_equivariance(iso: FGLIso, w: ActionWitness) -> Report:
    rep = Report("iso-equivariance")
    R = iso.tower
    if not w.sigma.validate():
        raise InvalidWitness("tower action does not respect the adjunction rules")
    if w.kind == "deformation":
        Fs = iso.source.series
        Fsig = series_map_coeffs(Fs, w.sigma.apply)
        tx = w.t_series
        lhs = tx.subs({"X": Fs.subs({
            "X": TruncSeries.gen(Fs.table, R, "X"),
            "Y": TruncSeries.gen(Fs.table, R, "Y"),
        })})
        txX = tx.subs({"X": TruncSeries.gen(Fs.table, R, "X")})
        txY = tx.subs({"X": TruncSeries.gen(Fs.table, R, "Y")})
        rhs = Fsig.subs({"X": txX, "Y": txY})
        if not lhs.sub(rhs).is_zero():
            raise InvalidWitness("t-series is not an isomorphism onto the twisted law")
        phi_sig = apply_sigma_to_series(iso.phi, w.sigma)
        left = phi_sig.compose(w.t_series)
        rep.record("phi-sigma-compat", left == iso.phi,
                   "sigma(phi) o t differs from phi")
        return rep
    if w.kind == "honda":
        Ht = iso.target
        endo = HondaEndo(Ht, (), w.t_series)
        if not endo_defect(endo).is_zero():
            raise InvalidWitness("t-series is not an endomorphism of the Honda law")
        if R.is_zero(w.t_series.coeff((1,))):
            raise InvalidWitness("t-series is not an automorphism")
        left = w.t_series.compose(iso.phi)
        right = apply_sigma_to_series(iso.phi, w.sigma)
        rep.record("honda-twist-compat", left == right,
                   "t o phi differs from sigma(phi)")
        return rep
    raise InvalidWitness("unknown witness kind %r" % w.kind)


def derive_honda_witness(iso: FGLIso, sigma: TowerAuto) -> ActionWitness:
    """Builds the Honda-side witness t with t o phi = sigma(phi)."""
    phi_sig = apply_sigma_to_series(iso.phi, sigma)
    t = phi_sig.compose(iso.inverse)
    return ActionWitness("honda", t, sigma)


def derive_deformation_witness(iso: FGLIso, sigma: TowerAuto) -> ActionWitness:
    """Builds the deformation-side witness t = sigma(phi)^{-1} o phi."""
    phi_sig = apply_sigma_to_series(iso.phi, sigma)
    t = phi_sig.reverse().compose(iso.phi)
    return ActionWitness("deformation", t, sigma)
