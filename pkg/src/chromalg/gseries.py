"""Weighted-graded multivariate truncated series with Koszul signs.

A series is a sparse map from exponent vectors to nonzero coefficients in an
arbitrary coefficient ring (anything implementing the small ring protocol of
``fields``/``tower``).  Odd variables square to zero and reordering odd
factors produces signs; per-variable truncation orders and an optional total
exponent cap are applied eagerly so normal forms stay canonical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import (
    NonUnitLeadingCoefficient,
    NonzeroConstantTerm,
    VarMismatch,
)

EVEN, ODD = 0, 1


@dataclass(frozen=True)
class Var:
    name: str
    degree: int = 0
    parity: int = EVEN
    trunc: int | None = None  # exponents < trunc; odd vars always < 2

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise ValueError("parity must be 0 or 1")
        if self.parity != (self.degree % 2):
            raise ValueError("parity of %s must match degree mod 2" % self.name)
        if self.parity == ODD:
            object.__setattr__(self, "trunc", 2)


class VarTable:
    def __init__(self, vars, total_cap: int | None = None):
        self.vars = tuple(vars)
        names = [v.name for v in self.vars]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(names)}
        self.total_cap = total_cap
        self.odd_positions = tuple(i for i, v in enumerate(self.vars) if v.parity == ODD)
        self._odd_ordinal = {pos: k for k, pos in enumerate(self.odd_positions)}
        self.truncs = tuple(v.trunc for v in self.vars)
        self.degrees = tuple(v.degree for v in self.vars)

    def n(self):
        return len(self.vars)

    def zero_exp(self):
        return (0,) * len(self.vars)

    def unit_exp(self, name):
        e = [0] * len(self.vars)
        e[self.index[name]] = 1
        return tuple(e)

    def admissible(self, exp) -> bool:
        if self.total_cap is not None and sum(exp) > self.total_cap:
            return False
        for e, t in zip(exp, self.truncs):
            if t is not None and e >= t:
                return False
        return True

    def odd_mask(self, exp) -> int:
        m = 0
        for k, pos in enumerate(self.odd_positions):
            if exp[pos]:
                m |= 1 << k
        return m

    def mono_degree(self, exp) -> int:
        return sum(e * d for e, d in zip(exp, self.degrees))

    def __eq__(self, other):
        return (
            isinstance(other, VarTable)
            and self.vars == other.vars
            and self.total_cap == other.total_cap
        )

    def __hash__(self):
        return hash((self.vars, self.total_cap))

    def __repr__(self):
        return "VarTable(%s)" % ",".join(self.names)


def _koszul_sign_parity(mask_a: int, mask_b: int) -> int:
    """Parity of the number of transpositions merging two ordered odd-factor sets."""
    par = 0
    b = mask_b
    while b:
        j = (b & -b).bit_length() - 1
        par ^= bin(mask_a >> (j + 1)).count("1") & 1
        b &= b - 1
    return par


class TruncSeries:
    __slots__ = ("table", "ring", "terms")

    def __init__(self, table: VarTable, ring, terms=None):
        self.table = table
        self.ring = ring
        self.terms = terms if terms is not None else {}

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, table, ring):
        return cls(table, ring)

    @classmethod
    def const(cls, table, ring, c):
        if ring.is_zero(c):
            return cls(table, ring)
        return cls(table, ring, {table.zero_exp(): c})

    @classmethod
    def one(cls, table, ring):
        return cls.const(table, ring, ring.one)

    @classmethod
    def gen(cls, table, ring, name, c=None):
        c = ring.one if c is None else c
        if ring.is_zero(c):
            return cls(table, ring)
        return cls(table, ring, {table.unit_exp(name): c})

    def copy(self):
        return TruncSeries(self.table, self.ring, dict(self.terms))

    # -- basic queries ---------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def coeff(self, exp):
        return self.terms.get(tuple(exp), self.ring.zero)

    def coeff_of(self, **powers):
        e = [0] * self.table.n()
        for name, k in powers.items():
            e[self.table.index[name]] = k
        return self.coeff(tuple(e))

    def constant_term(self):
        return self.coeff(self.table.zero_exp())

    def degree(self):
        """Common weighted degree of all monomials, or None if inhomogeneous/zero."""
        degs = {self.table.mono_degree(e) for e in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def max_exp(self, name):
        i = self.table.index[name]
        return max((e[i] for e in self.terms), default=0)

    def homogeneous_part(self, total: int):
        out = {e: c for e, c in self.terms.items() if sum(e) == total}
        return TruncSeries(self.table, self.ring, out)

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeries)
            and self.table == other.table
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("TruncSeries is unhashable")

    # -- ring operations -------------------------------------------------------

    def _check_compat(self, other):
        if self.table != other.table or self.ring is not other.ring:
            raise VarMismatch("series live in different rings")

    def add(self, other):
        self._check_compat(other)
        r = self.ring
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = r.add(out.get(e, r.zero), c)
            if r.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return TruncSeries(self.table, r, out)

    def neg(self):
        r = self.ring
        return TruncSeries(self.table, r, {e: r.neg(c) for e, c in self.terms.items()})

    def sub(self, other):
        return self.add(other.neg())

    def scale(self, c):
        r = self.ring
        if r.is_zero(c):
            return TruncSeries(self.table, r)
        out = {}
        for e, v in self.terms.items():
            s = r.mul(c, v)
            if not r.is_zero(s):
                out[e] = s
        return TruncSeries(self.table, r, out)

    def mul(self, other):
        self._check_compat(other)
        r, tab = self.ring, self.table
        cap = tab.total_cap
        truncs = tab.truncs
        nv = tab.n()
        a_items = [(e, c, tab.odd_mask(e), sum(e)) for e, c in self.terms.items()]
        b_items = [(e, c, tab.odd_mask(e), sum(e)) for e, c in other.terms.items()]
        out = {}
        for ea, ca, ma, da in a_items:
            for eb, cb, mb, db in b_items:
                if cap is not None and da + db > cap:
                    continue
                if ma & mb:
                    continue
                e = tuple(ea[i] + eb[i] for i in range(nv))
                ok = True
                for i in range(nv):
                    t = truncs[i]
                    if t is not None and e[i] >= t:
                        ok = False
                        break
                if not ok:
                    continue
                c = r.mul(ca, cb)
                if _koszul_sign_parity(ma, mb):
                    c = r.neg(c)
                s = r.add(out.get(e, r.zero), c)
                if r.is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return TruncSeries(self.table, r, out)

    def pow(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        acc = TruncSeries.one(self.table, self.ring)
        base = self
        while k:
            if k & 1:
                acc = acc.mul(base)
            base = base.mul(base) if k > 1 else base
            k >>= 1
        return acc

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = neg

    # -- substitution ------------------------------------------------------------

    def subs(self, images: dict, target_table=None, target_ring=None, coeff_map=None):
        """Substitute each variable by a series in the target ring.

        ``images`` maps variable names to TruncSeries over the target; every
        variable occurring with nonzero exponent needs an image.  Coefficients
        pass through ``coeff_map`` (defaults to identity).
        """
        sample = next(iter(images.values()), None)
        if target_table is None:
            target_table = sample.table if sample is not None else self.table
        if target_ring is None:
            target_ring = sample.ring if sample is not None else self.ring
        cmap = coeff_map or (lambda c: c)
        out = TruncSeries(target_table, target_ring)
        powers = {}

        def var_power(name, k):
            key = (name, k)
            if key not in powers:
                if k == 1:
                    powers[key] = images[name]
                else:
                    powers[key] = var_power(name, k - 1).mul(images[name])
            return powers[key]

        one = TruncSeries.one(target_table, target_ring)
        for e, c in self.terms.items():
            term = TruncSeries.const(target_table, target_ring, cmap(c))
            for i, k in enumerate(e):
                if k:
                    name = self.table.names[i]
                    if name not in images:
                        raise VarMismatch("no image supplied for %s" % name)
                    term = term.mul(var_power(name, k))
            out = out.add(term)
        del one
        return out

    def compose(self, g: "TruncSeries"):
        """f(g) for univariate f; g must have zero constant term."""
        if self.table.n() != 1:
            raise VarMismatch("compose requires a univariate outer series")
        if not g.ring.is_zero(g.constant_term()):
            raise NonzeroConstantTerm("inner series has nonzero constant term")
        name = self.table.names[0]
        return self.subs({name: g}, target_table=g.table, target_ring=g.ring)

    def reverse(self):
        """Compositional inverse of a univariate series with unit linear term."""
        if self.table.n() != 1:
            raise VarMismatch("reverse requires a univariate series")
        r, tab = self.ring, self.table
        if not r.is_zero(self.constant_term()):
            raise NonzeroConstantTerm("reversion needs zero constant term")
        f1 = self.coeff((1,))
        try:
            f1inv = r.inv(f1)
        except Exception as exc:
            raise NonUnitLeadingCoefficient(str(exc))
        T = tab.truncs[0]
        if T is None:
            raise ValueError("reversion needs a truncated variable")
        g = TruncSeries(tab, r, {(1,): f1inv})
        for k in range(2, T):
            h = self.compose(g)
            hk = h.coeff((k,))
            if r.is_zero(hk):
                continue
            gk = r.neg(r.mul(f1inv, hk))
            g = g.add(TruncSeries(tab, r, {(k,): gk}))
        return g

    # -- rendering -----------------------------------------------------------------

    def _sorted_exps(self):
        return sorted(self.terms, key=lambda e: (sum(e), e))

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in self._sorted_exps():
            factors = []
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(self.table.names[i])
                elif k:
                    factors.append("%s^%d" % (self.table.names[i], k))
            c = self.ring.text(self.terms[e])
            mono = "*".join(factors)
            parts.append("(%s)%s" % (c, "*" + mono if mono else ""))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "vars": [
                {"name": v.name, "degree": v.degree, "parity": v.parity, "trunc": v.trunc}
                for v in self.table.vars
            ],
            "cap": self.table.total_cap,
            "terms": [
                {"exp": list(e), "coeff": self.ring.text(self.terms[e])}
                for e in self._sorted_exps()
            ],
        }

    @classmethod
    def from_json(cls, data: dict, ring):
        table = VarTable(
            [Var(v["name"], v["degree"], v["parity"], v["trunc"]) for v in data["vars"]],
            total_cap=data.get("cap"),
        )
        terms = {}
        for t in data["terms"]:
            terms[tuple(t["exp"])] = ring.parse(t["coeff"])
        return cls(table, ring, terms)

    def json_text(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        return self.text()


# -- ring-to-ring transport -----------------------------------------------------


def map_into(series: TruncSeries, table: VarTable, ring=None, coeff_map=None) -> TruncSeries:
    """Re-express a series in a supertable containing the same-named variables."""
    ring = ring or series.ring
    cmap = coeff_map or (lambda c: c)
    out = {}
    for e, c in series.terms.items():
        ne = [0] * table.n()
        for i, k in enumerate(e):
            if k:
                ne[table.index[series.table.names[i]]] = k
        c2 = cmap(c)
        if not ring.is_zero(c2):
            out[tuple(ne)] = c2
    return TruncSeries(table, ring, out)


def merge_tables(*tables: VarTable, total_cap=None) -> VarTable:
    vars = []
    for t in tables:
        vars.extend(t.vars)
    return VarTable(vars, total_cap=total_cap)


# -- tensor powers of one ring ---------------------------------------------------


class TensorRing:
    """k-fold tensor power of a series ring over its coefficient ring.

    Slot s variables are tagged ``name@s``; the slot order is the variable
    order, so Koszul signs fall out of ordinary multiplication.
    """

    def __init__(self, table: VarTable, ring, k: int):
        self.base_table = table
        self.ring = ring
        self.k = k
        vars = []
        for s in range(k):
            for v in table.vars:
                vars.append(Var("%s@%d" % (v.name, s), v.degree, v.parity, v.trunc))
        self.table = VarTable(vars)
        self.nbase = table.n()

    def embed(self, series: TruncSeries, slot: int) -> TruncSeries:
        if series.table != self.base_table:
            raise VarMismatch("series not over the base table")
        out = {}
        for e, c in series.terms.items():
            ne = [0] * self.table.n()
            for i, kexp in enumerate(e):
                if kexp:
                    ne[slot * self.nbase + i] = kexp
            out[tuple(ne)] = c
        return TruncSeries(self.table, self.ring, out)

    def pure(self, *factors: TruncSeries) -> TruncSeries:
        if len(factors) != self.k:
            raise VarMismatch("expected %d tensor factors" % self.k)
        acc = TruncSeries.one(self.table, self.ring)
        for s, f in enumerate(factors):
            acc = acc.mul(self.embed(f, s))
        return acc

    def one(self):
        return TruncSeries.one(self.table, self.ring)

    def slot_part(self, exp, slot):
        return exp[slot * self.nbase : (slot + 1) * self.nbase]

    def flip(self, series: TruncSeries, s1: int = 0, s2: int = 1) -> TruncSeries:
        """The symmetry x (x) y -> (-1)^{|x||y|} y (x) x on adjacent slots."""
        out = {}
        r = self.ring
        for e, c in series.terms.items():
            parts = [list(self.slot_part(e, s)) for s in range(self.k)]
            d1 = sum(
                parts[s1][i] * self.base_table.vars[i].degree for i in range(self.nbase)
            )
            d2 = sum(
                parts[s2][i] * self.base_table.vars[i].degree for i in range(self.nbase)
            )
            parts[s1], parts[s2] = parts[s2], parts[s1]
            ne = tuple(x for part in parts for x in part)
            nc = r.neg(c) if (d1 % 2) and (d2 % 2) else c
            out[ne] = r.add(out.get(ne, r.zero), nc) if ne in out else nc
            if r.is_zero(out[ne]):
                del out[ne]
        return TruncSeries(self.table, r, out)

    def collapse(self, series: TruncSeries) -> TruncSeries:
        """Multiply all slots together back into the base ring."""
        images = {}
        for s in range(self.k):
            for v in self.base_table.vars:
                images["%s@%d" % (v.name, s)] = TruncSeries.gen(
                    self.base_table, self.ring, v.name
                )
        return series.subs(images, target_table=self.base_table, target_ring=self.ring)

    def map_slot(self, series: TruncSeries, slot: int, target: "TensorRing", images: dict):
        """Apply a generator-level map to one slot, landing in ``target``.

        ``images[name]`` gives the image in ``target`` of base variable
        ``name`` in ``slot``; other slots shift to fill the remaining target
        slots in order.
        """
        n_extra = target.k - (self.k - 1)
        subs_images = {}
        for s in range(self.k):
            for i, v in enumerate(self.base_table.vars):
                tagged = "%s@%d" % (v.name, s)
                if s == slot:
                    subs_images[tagged] = images[v.name]
                else:
                    ns = s if s < slot else s - 1 + n_extra
                    subs_images[tagged] = TruncSeries.gen(
                        target.table, target.ring, "%s@%d" % (v.name, ns)
                    )
        return series.subs(subs_images, target_table=target.table, target_ring=target.ring)


def rand_series(table, ring, rng, nterms=4, max_exp=2):
    out = TruncSeries(table, ring)
    for _ in range(nterms):
        e = []
        for v in table.vars:
            hi = 1 if v.parity == ODD else max_exp
            if v.trunc is not None:
                hi = min(hi, v.trunc - 1)
            e.append(rng.randint(0, hi))
        if table.total_cap is not None and sum(e) > table.total_cap:
            continue
        c = ring.rand(rng)
        if not ring.is_zero(c):
            out = out.add(TruncSeries(table, ring, {tuple(e): c}))
    return out
