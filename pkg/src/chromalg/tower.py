"""Truncated Laurent towers over finite fields with root adjunctions.

A tower is F_q[z_1,...,z_r]((t)) truncated at t^tprec, where u = t^e and each
generator carries a rewrite rule:

  kummer:   z^k   -> c          (gcd(k, p) = 1)
  additive: z^q   -> z + c      (q a power of p)
  free:     none                (polynomial symbol; internal to the solver)

Elements are dicts mapping (z-exponent tuple, t-exponent) to nonzero field
scalars, kept in normal form: generator exponents below their rule degree,
t-exponents below tprec.  Kummer adjunctions fold t-valuation into the
uniformizer (re-ramification) and solve the unit part in place when the
residue field permits, so towers stay as small as the arithmetic allows.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import DivisionByZero, PrecisionExhausted, UnsupportedExtension
from .fields import Fq, ZERO, parse_field_descriptor


@dataclass(frozen=True)
class Kummer:
    degree: int
    const: dict  # element of the tower being extended

    kind = "kummer"


@dataclass(frozen=True)
class Additive:
    degree: int  # a power of p
    const: dict

    kind = "additive"


@dataclass(frozen=True)
class Gen:
    name: str
    kind: str          # kummer | additive | free
    bound: int | None  # exponents < bound; None for free
    rhs: dict | None   # full right-hand side of z^bound, in this tower


class TowerField:
    def __init__(self, fq: Fq, e: int = 1, uprec: int = 8, gens=()):
        self.fq = fq
        self.e = e
        self.uprec = uprec
        self.tprec = e * uprec
        self.gens = tuple(gens)
        self.r = len(self.gens)
        self.gen_index = {g.name: i for i, g in enumerate(self.gens)}
        self.zero = {}
        self.one = {((0,) * self.r, 0): fq.one}

    # -- element constructors --------------------------------------------------

    def scalar(self, code: int) -> dict:
        if code == ZERO:
            return {}
        return {((0,) * self.r, 0): code}

    def from_int(self, k: int) -> dict:
        return self.scalar(self.fq.from_int(k))

    def t(self, k: int = 1) -> dict:
        if k >= self.tprec:
            return {}
        return {((0,) * self.r, k): self.fq.one}

    def u(self, k: int = 1) -> dict:
        return self.t(self.e * k)

    def gen(self, name: str) -> dict:
        z = [0] * self.r
        z[self.gen_index[name]] = 1
        return {(tuple(z), 0): self.fq.one}

    # -- normal form -------------------------------------------------------------

    def _normalize(self, raw) -> dict:
        f = self.fq
        out = {}
        stack = [(z, t, c) for (z, t), c in raw.items()]
        while stack:
            z, t, c = stack.pop()
            if c == ZERO:
                continue
            hit = None
            for i in range(self.r - 1, -1, -1):
                g = self.gens[i]
                if g.bound is not None and z[i] >= g.bound:
                    hit = i
                    break
            if hit is None:
                if t < self.tprec:
                    key = (z, t)
                    s = f.add(out.get(key, ZERO), c)
                    if s == ZERO:
                        out.pop(key, None)
                    else:
                        out[key] = s
                continue
            g = self.gens[hit]
            rest = list(z)
            rest[hit] -= g.bound
            for (zr, tr), cr in g.rhs.items():
                nz = tuple(a + b for a, b in zip(rest, zr))
                stack.append((nz, t + tr, f.mul(c, cr)))
        return out

    # -- ring protocol --------------------------------------------------------------

    def add(self, a: dict, b: dict) -> dict:
        f = self.fq
        out = dict(a)
        for k, c in b.items():
            s = f.add(out.get(k, ZERO), c)
            if s == ZERO:
                out.pop(k, None)
            else:
                out[k] = s
        return out

    def neg(self, a: dict) -> dict:
        f = self.fq
        return {k: f.neg(c) for k, c in a.items()}

    def sub(self, a: dict, b: dict) -> dict:
        return self.add(a, self.neg(b))

    def mul(self, a: dict, b: dict) -> dict:
        f = self.fq
        tprec = self.tprec
        raw = {}
        for (za, ta), ca in a.items():
            for (zb, tb), cb in b.items():
                t = ta + tb
                z = tuple(x + y for x, y in zip(za, zb))
                key = (z, t)
                s = f.add(raw.get(key, ZERO), f.mul(ca, cb))
                if s == ZERO:
                    raw.pop(key, None)
                else:
                    raw[key] = s
        needs_rewrite = any(
            g.bound is not None and any(z[i] >= g.bound for (z, t) in raw)
            for i, g in enumerate(self.gens)
        )
        if not needs_rewrite:
            return {k: c for k, c in raw.items() if k[1] < tprec}
        return self._normalize(raw)

    def scalar_mul(self, code: int, a: dict) -> dict:
        f = self.fq
        if code == ZERO:
            return {}
        return {k: f.mul(code, c) for k, c in a.items()}

    def pow(self, a: dict, k: int) -> dict:
        if k < 0:
            return self.inv(self.pow(a, -k))
        acc = self.one
        base = a
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base) if k > 1 else base
            k >>= 1
        return acc

    def frobenius(self, a: dict, times: int = 1) -> dict:
        return self.pow(a, self.fq.p ** times)

    def is_zero(self, a: dict) -> bool:
        return not a

    # -- inversion ----------------------------------------------------------------

    def _laurent_inv(self, a: dict) -> dict:
        f = self.fq
        if not a:
            raise DivisionByZero("inverse of zero")
        v = min(t for (_, t) in a)
        lead = a[((0,) * self.r, v)] if ((0,) * self.r, v) in a else None
        if lead is None:
            raise DivisionByZero("leading term involves generators")
        linv = f.inv(lead)
        # a = lead * t^v * (1 + m); invert with a geometric series
        m = {}
        for (z, t), c in a.items():
            if t == v:
                continue
            m[(z, t - v)] = f.mul(linv, c)
        inv0 = {((0,) * self.r, -v): linv}
        acc = self.one
        term = self.one
        mneg = self.neg(m)
        for _ in range(self.tprec + 1):
            term = self.mul(term, mneg)
            if not term:
                break
            acc = self.add(acc, term)
        return self.mul(inv0, acc)

    def _basis(self):
        bounds = []
        for g in self.gens:
            if g.bound is None:
                raise DivisionByZero("cannot invert an element over free symbols")
            bounds.append(g.bound)
        basis = [()]
        for b in bounds:
            basis = [z + (k,) for z in basis for k in range(b)]
        return basis

    def inv(self, a: dict) -> dict:
        if not a:
            raise DivisionByZero("inverse of zero")
        if self.r == 0 or all(all(x == 0 for x in z) for (z, _) in a):
            # scalar-in-z elements invert as Laurent series
            return self._laurent_inv(a)
        basis = self._basis()
        idx = {z: i for i, z in enumerate(basis)}
        D = len(basis)
        f = self.fq

        def lau_is_zero(x):
            return not x

        def lau_add(x, y):
            out = dict(x)
            for t, c in y.items():
                s = f.add(out.get(t, ZERO), c)
                if s == ZERO:
                    out.pop(t, None)
                else:
                    out[t] = s
            return out

        def lau_neg(x):
            return {t: f.neg(c) for t, c in x.items()}

        def lau_mul(x, y):
            out = {}
            for tx, cx in x.items():
                for ty, cy in y.items():
                    t = tx + ty
                    if t >= 2 * self.tprec:
                        continue
                    s = f.add(out.get(t, ZERO), f.mul(cx, cy))
                    if s == ZERO:
                        out.pop(t, None)
                    else:
                        out[t] = s
            return out

        def lau_div(x, y):
            if not y:
                raise DivisionByZero("division by zero Laurent series")
            v = min(y)
            lead = y[v]
            linv = f.inv(lead)
            m = {t - v: f.mul(linv, c) for t, c in y.items() if t != v}
            inv0 = {-v: linv}
            acc = {0: f.one}
            term = {0: f.one}
            mneg = lau_neg(m)
            for _ in range(2 * self.tprec + 1):
                term = lau_mul(term, mneg)
                if not term:
                    break
                acc = lau_add(acc, term)
            return lau_mul(x, lau_mul(inv0, acc))

        # multiplication-by-a matrix over the Laurent subring
        cols = []
        for z in basis:
            col_elem = self.mul(a, {(z, 0): f.one})
            col = [dict() for _ in range(D)]
            for (zz, t), c in col_elem.items():
                col[idx[zz]][t] = c
            cols.append(col)
        # solve M x = e_0 by Gaussian elimination with min-valuation pivoting
        M = [[cols[j][i] for j in range(D)] for i in range(D)]
        rhs = [dict() for _ in range(D)]
        rhs[idx[(0,) * self.r]] = {0: f.one}
        perm = list(range(D))
        for col in range(D):
            piv, piv_val = None, None
            for row in range(col, D):
                entry = M[row][col]
                if entry:
                    v = min(entry)
                    if piv is None or v < piv_val:
                        piv, piv_val = row, v
            if piv is None:
                raise DivisionByZero("element is not a unit")
            M[col], M[piv] = M[piv], M[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
            pivot = M[col][col]
            for row in range(D):
                if row == col or lau_is_zero(M[row][col]):
                    continue
                factor = lau_div(M[row][col], pivot)
                for j in range(col, D):
                    M[row][j] = lau_add(M[row][j], lau_neg(lau_mul(factor, M[col][j])))
                rhs[row] = lau_add(rhs[row], lau_neg(lau_mul(factor, rhs[col])))
        out = {}
        for i in range(D):
            xi = lau_div(rhs[i], M[i][i])
            for t, c in xi.items():
                if t < self.tprec:
                    out[(basis[i], t)] = c
        del perm
        return self._normalize(out)

    # -- misc queries -------------------------------------------------------------

    def valuation(self, a: dict):
        if not a:
            return None
        return min(t for (_, t) in a)

    def residue(self, a: dict) -> int:
        """Scalar coefficient at t^0 (generator-free part)."""
        return a.get(((0,) * self.r, 0), ZERO)

    def rank1(self, a: dict) -> bool:
        return all(all(x == 0 for x in z) for (z, _) in a)

    def in_subfield(self, a: dict, k: int) -> bool:
        """True when a is a constant scalar lying in the subfield with p^k elements."""
        if not a:
            return True
        if list(a) != [((0,) * self.r, 0)]:
            return False
        return self.fq.in_subfield(a[((0,) * self.r, 0)], k)

    def involves_free(self, a: dict) -> bool:
        free = [i for i, g in enumerate(self.gens) if g.kind == "free"]
        return any(any(z[i] for i in free) for (z, _) in a)

    def rand(self, rng) -> dict:
        out = {}
        for _ in range(rng.randint(1, 4)):
            z = tuple(
                rng.randrange(g.bound if g.bound else 3) if rng.random() < 0.5 else 0
                for g in self.gens
            )
            t = rng.randrange(0, self.tprec)
            c = self.fq.rand(rng)
            if c != ZERO:
                out[(z, t)] = c
        return self._normalize(out)

    # -- serialization --------------------------------------------------------------

    def text(self, a: dict) -> str:
        if not a:
            return "0"
        parts = []
        for (z, t) in sorted(a, key=lambda k: (k[1], k[0])):
            c = a[(z, t)]
            frag = [self.fq.text(c), "t^%d" % t]
            for i, e in enumerate(z):
                if e:
                    frag.append("%s^%d" % (self.gens[i].name, e))
            parts.append("|".join(frag))
        return " ; ".join(parts)

    def parse(self, s: str) -> dict:
        if s == "0":
            return {}
        out = {}
        for part in s.split(" ; "):
            frags = part.split("|")
            c = self.fq.parse(frags[0])
            t = int(frags[1][2:])
            z = [0] * self.r
            for frag in frags[2:]:
                name, e = frag.split("^")
                z[self.gen_index[name]] = int(e)
            out[(tuple(z), t)] = c
        return out

    def descriptor(self) -> str:
        parts = [self.fq.descriptor(), "[t;e=%d;prec=%d]" % (self.e, self.uprec)]
        for g in self.gens:
            parts.append(
                "[%s:%s^%s=%s]"
                % (g.name, g.kind, g.bound if g.bound is not None else "*",
                   self.text(g.rhs) if g.rhs is not None else "-")
            )
        return "".join(parts)

    def __repr__(self):
        return self.descriptor()

    def __eq__(self, other):
        return isinstance(other, TowerField) and self.descriptor() == other.descriptor()


def parse_tower_descriptor(s: str) -> TowerField:
    head, rest = s.split(")", 1)
    fq = parse_field_descriptor(head + ")")
    blocks = []
    depth, cur = 0, ""
    for ch in rest:
        if ch == "[":
            depth += 1
            if depth == 1:
                cur = ""
                continue
        if ch == "]":
            depth -= 1
            if depth == 0:
                blocks.append(cur)
                continue
        if depth >= 1:
            cur += ch
    tblock = blocks[0]
    e = int(tblock.split("e=")[1].split(";")[0])
    uprec = int(tblock.split("prec=")[1])
    T = TowerField(fq, e, uprec)
    for blk in blocks[1:]:
        name, rest2 = blk.split(":", 1)
        kindpart, rhstext = rest2.split("=", 1)
        kind, boundpart = kindpart.split("^")
        bound = None if boundpart == "*" else int(boundpart)
        padded = TowerField(fq, e, uprec, T.gens + (Gen(name, kind, bound, None),))
        rhs = padded.parse(rhstext) if rhstext != "-" else None
        T = TowerField(fq, e, uprec, T.gens + (Gen(name, kind, bound, rhs),))
    # stored right-hand sides live in full-tower coordinates
    r = T.r
    gens = tuple(
        Gen(g.name, g.kind, g.bound,
            {(z + (0,) * (r - len(z)), t): c for (z, t), c in g.rhs.items()}
            if g.rhs is not None else None)
        for g in T.gens
    )
    return TowerField(fq, e, uprec, gens)


# -- tower surgery ---------------------------------------------------------------


def _conv_pad(a: dict, extra: int = 1) -> dict:
    return {(z + (0,) * extra, t): c for (z, t), c in a.items()}


def _conv_scale_t(a: dict, factor: int) -> dict:
    return {(z, t * factor): c for (z, t), c in a.items()}


def ramify(T: TowerField, factor: int):
    """Refine the uniformizer: t_old = t_new^factor.  Returns (tower, conv)."""
    if factor == 1:
        return T, lambda a: a
    gens = tuple(
        Gen(g.name, g.kind, g.bound, _conv_scale_t(g.rhs, factor) if g.rhs else None)
        for g in T.gens
    )
    T2 = TowerField(T.fq, T.e * factor, T.uprec, gens)

    def conv(a):
        return {k: c for k, c in _conv_scale_t(a, factor).items() if k[1] < T2.tprec}

    return T2, conv


def append_gen(T: TowerField, name: str, kind: str, bound, rhs_builder):
    """Add one generator; rhs_builder receives the padded tower and returns the rhs."""
    if name in T.gen_index:
        raise ValueError("generator name %r already used" % name)
    stub = TowerField(
        T.fq, T.e, T.uprec,
        tuple(Gen(g.name, g.kind, g.bound, _conv_pad(g.rhs) if g.rhs else None)
              for g in T.gens) + (Gen(name, kind, bound, None),),
    )
    rhs = rhs_builder(stub)
    gens = stub.gens[:-1] + (Gen(name, kind, bound, rhs),)
    T2 = TowerField(T.fq, T.e, T.uprec, gens)
    return T2, lambda a: _conv_pad(a)


def unit_kth_root(T: TowerField, w: dict, k: int):
    """Deterministic k-th root of a generator-free unit, or None."""
    f = T.fq
    w0 = T.residue(w)
    if w0 == ZERO:
        raise PrecisionExhausted("unit has vanishing residue")
    r0 = f.kth_root(w0, k)
    if r0 is None:
        return None
    if k % f.p == 0:
        raise UnsupportedExtension("inseparable root")
    y = T.scalar(r0)
    for _ in range(max(1, T.tprec.bit_length() + 1)):
        yk = T.pow(y, k)
        err = T.sub(yk, w)
        if not err:
            break
        corr = T.mul(err, T.inv(T.mul(T.from_int(k), T.pow(y, k - 1))))
        y = T.sub(y, corr)
    if T.sub(T.pow(y, k), w):
        raise PrecisionExhausted("Newton iteration failed to converge")
    return y


def adjoin_root(T: TowerField, rule, name: str | None = None):
    """Adjoin a root of a Kummer or additive rule.

    Returns (tower, root, conv) where conv transports elements of T into the
    new tower.  Kummer rules fold valuation into the uniformizer and solve
    unit parts in the residue field when possible.
    """
    if isinstance(rule, Kummer):
        k, c = rule.degree, rule.const
        if k <= 0 or gcd(k, T.fq.p) != 1:
            raise UnsupportedExtension("Kummer degree must be positive and prime to p")
        if not c:
            raise UnsupportedExtension("Kummer constant must be nonzero")
        if name is None:
            name = "z%d" % (T.r + 1)
        if not T.rank1(c):
            T2, conv = append_gen(T, name, "kummer", k, lambda stub: _conv_pad(c))
            return T2, T2.gen(name), conv
        v = T.valuation(c)
        g = gcd(abs(v), k) if v else k
        factor = k // g
        T1, conv1 = ramify(T, factor)
        c1 = conv1(c)
        m = (v * factor) // k
        w = T1.mul(c1, T1.t(0) if m == 0 else {((0,) * T1.r, -m * k): T1.fq.one})
        root0 = unit_kth_root(T1, w, k)
        if root0 is not None:
            root = T1.mul({((0,) * T1.r, m): T1.fq.one}, root0) if m else root0
            return T1, root, conv1
        T2, conv2 = append_gen(T1, name, "kummer", k, lambda stub: _conv_pad(w))
        y = T2.gen(name)
        root = T2.mul({((0,) * T2.r, m): T2.fq.one}, y) if m else y
        return T2, root, lambda a: conv2(conv1(a))
    if isinstance(rule, Additive):
        q, c = rule.degree, rule.const
        p = T.fq.p
        qq = q
        while qq % p == 0:
            qq //= p
        if qq != 1 or q <= 1:
            raise UnsupportedExtension("additive degree must be a power of p")
        if name is None:
            name = "z%d" % (T.r + 1)

        def build(stub):
            return stub.add(stub.gen(name), _conv_pad(c))

        T2, conv = append_gen(T, name, "additive", q, build)
        return T2, T2.gen(name), conv
    raise UnsupportedExtension("rule shape %r is not supported" % (rule,))


def add_free_gens(T: TowerField, names):
    gens = tuple(
        Gen(g.name, g.kind, g.bound, _conv_pad(g.rhs, len(names)) if g.rhs else None)
        for g in T.gens
    ) + tuple(Gen(n, "free", None, None) for n in names)
    T2 = TowerField(T.fq, T.e, T.uprec, gens)
    return T2, lambda a: _conv_pad(a, len(names))


def pin_free_gen(T: TowerField, name: str, value_in_smaller=None):
    """Remove a free generator, substituting a value for it.

    The value is an element of the tower *without* the generator; returns
    (tower, conv).
    """
    i = T.gen_index[name]
    if T.gens[i].kind != "free":
        raise ValueError("%s is not a free generator" % name)

    def drop(z):
        return z[:i] + z[i + 1 :]

    gens = tuple(
        Gen(g.name, g.kind, g.bound,
            {(drop(z), t): c for (z, t), c in g.rhs.items()} if g.rhs else None)
        for j, g in enumerate(T.gens)
        if j != i
    )
    T2 = TowerField(T.fq, T.e, T.uprec, gens)
    value = value_in_smaller if value_in_smaller is not None else T2.zero

    def conv(a):
        out = T2.zero
        powers = {0: T2.one}

        def vp(k):
            if k not in powers:
                powers[k] = T2.mul(vp(k - 1), value)
            return powers[k]

        for (z, t), c in a.items():
            k = z[i]
            mono = {(drop(z), t): c}
            out = T2.add(out, T2.mul(mono, vp(k)) if k else mono)
        return out

    return T2, conv


class TowerAuto:
    """Automorphism of a tower: a Frobenius power on scalars, t fixed, and a
    chosen image for each generator (validated against its rule)."""

    def __init__(self, T: TowerField, frob_power: int = 0, gen_images: dict | None = None):
        self.T = T
        self.frob_power = frob_power % max(1, T.fq.m)
        self.gen_images = dict(gen_images or {})
        for g in T.gens:
            if g.kind == "free":
                continue
            self.gen_images.setdefault(g.name, T.gen(g.name))

    def apply(self, a: dict) -> dict:
        T, f = self.T, self.T.fq
        out = T.zero
        powers = {}

        def gp(i, k):
            key = (i, k)
            if key not in powers:
                img = self.gen_images[T.gens[i].name]
                powers[key] = img if k == 1 else T.mul(gp(i, k - 1), img)
            return powers[key]

        for (z, t), c in a.items():
            c2 = f.frobenius(c, self.frob_power) if self.frob_power else c
            term = {((0,) * T.r, t): c2}
            for i, k in enumerate(z):
                if k:
                    term = T.mul(term, gp(i, k))
            out = T.add(out, term)
        return out

    def validate(self) -> bool:
        T = self.T
        for g in T.gens:
            if g.kind == "free":
                continue
            img = self.gen_images[g.name]
            lhs = T.pow(img, g.bound)
            rhs = self.apply(T.sub(g.rhs, T.gen(g.name))) if g.kind == "additive" else self.apply(g.rhs)
            if g.kind == "additive":
                rhs = T.add(img, rhs)
            if T.sub(lhs, rhs):
                return False
        return True
