"""Prime fields, finite extensions, and p-local rationals.

Finite-field elements are Zech log codes: an element is an ``int``, with -1
for zero and k in 0..q-2 for g^k, g a fixed primitive element.  Addition is
one table lookup, multiplication one modular add, Frobenius one modular
multiply.  All tables are built once per field and cached.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import DivisionByZero, NotPIntegral

ZERO = -1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_mulmod(a, b, modulus, p):
    # dense coefficient lists, ascending degree; modulus monic of degree m
    m = len(modulus) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = (out[i + j] + ai * bj) % p
    for d in range(len(out) - 1, m - 1, -1):
        c = out[d]
        if c:
            out[d] = 0
            for j in range(m):
                out[d - m + j] = (out[d - m + j] - c * modulus[j]) % p
    return out[:m]


def _poly_gcd(a, b, p):
    a = [c % p for c in a]
    b = [c % p for c in b]

    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    a, b = trim(a), trim(b)
    while b:
        inv = pow(b[-1], -1, p)
        r = list(a)
        for d in range(len(r) - 1, len(b) - 2, -1):
            if d >= len(r) or r[d] == 0:
                continue
            c = (r[d] * inv) % p
            for j in range(len(b)):
                r[d - (len(b) - 1) + j] = (r[d - (len(b) - 1) + j] - c * b[j]) % p
        a, b = b, trim(r)
    return a


def _poly_is_irreducible(poly, p):
    """Rabin test: x^(p^m) = x mod f, and gcd(x^(p^(m/r)) - x, f) = 1 for prime r | m."""
    m = len(poly) - 1

    def powx(e):
        r = ([0, 1] + [0] * (m - 2))[:m] if m >= 2 else [0]
        for _ in range(e):
            acc = [1] + [0] * (m - 1)
            base = r
            k = p
            while k:
                if k & 1:
                    acc = _poly_mulmod(acc, base, poly, p)
                base = _poly_mulmod(base, base, poly, p)
                k >>= 1
            r = acc
        return r

    if m == 1:
        return True
    x = ([0, 1] + [0] * (m - 2))[:m]
    xq = powx(m)
    if xq != x:
        return False
    for r in {d for d in range(2, m + 1) if m % d == 0 and is_prime(d)}:
        xe = powx(m // r)
        diff = [(xe[i] - x[i]) % p for i in range(m)]
        g = _poly_gcd(diff, list(poly), p)
        if len(g) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree m over F_p."""
    if m == 1:
        return (0, 1)
    bound = p ** m
    for code in range(bound):
        coeffs = []
        c = code
        for _ in range(m):
            coeffs.append(c % p)
            c //= p
        poly = coeffs + [1]
        if poly[0] == 0:
            continue
        if _poly_is_irreducible(poly, p):
            return tuple(poly)
    raise RuntimeError("no irreducible polynomial found")


class Fq:
    """The field with p^m elements; p an odd prime.

    Scalars are log codes (ints).  The same class serves as the prime field
    when m == 1.
    """

    def __init__(self, p: int, m: int = 1, modulus=None):
        if not is_prime(p) or p < 3:
            raise ValueError("p must be an odd prime >= 3")
        if m < 1:
            raise ValueError("extension degree must be positive")
        self.p = p
        self.m = m
        self.q = p ** m
        if modulus is None:
            modulus = default_modulus(p, m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[m] != 1:
            raise ValueError("modulus must be monic of degree m")
        if not _poly_is_irreducible(list(modulus), p):
            raise ValueError("modulus is not irreducible")
        self.modulus = modulus
        self._build_tables()
        self.zero = ZERO
        self.one = 0

    # -- table construction -------------------------------------------------

    def _code(self, vec):
        c = 0
        for d in reversed(vec):
            c = c * self.p + d
        return c

    def _vec(self, code):
        v = []
        for _ in range(self.m):
            v.append(code % self.p)
            code //= self.p
        return v

    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        mod = list(self.modulus)
        # find a primitive element by trying poly codes in ascending order
        for cand in range(1, q):
            vec = self._vec(cand)
            seen = [ZERO] * q
            exp = []
            cur = [1] + [0] * (m - 1)
            ok = True
            for k in range(q - 1):
                code = self._code(cur)
                if seen[code] != ZERO:
                    ok = False
                    break
                seen[code] = k
                exp.append(code)
                cur = _poly_mulmod(cur, vec, mod, p)
            if ok and self._code(cur) == exp[0]:
                self._exp = exp          # log -> poly code
                self._log = seen         # poly code -> log
                break
        else:
            raise RuntimeError("no primitive element found")
        # zech[d] = log(1 + g^d), or ZERO when 1 + g^d = 0
        zech = [ZERO] * (q - 1)
        for d in range(q - 1):
            vec = self._vec(self._exp[d])
            vec[0] = (vec[0] + 1) % p
            code = self._code(vec)
            zech[d] = ZERO if code == 0 else self._log[code]
        self._zech = zech
        self._neg_shift = 0 if p == 2 else (q - 1) // 2

    # -- ring protocol -------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if a == ZERO:
            return b
        if b == ZERO:
            return a
        n = self.q - 1
        z = self._zech[(b - a) % n]
        return ZERO if z == ZERO else (a + z) % n

    def neg(self, a: int) -> int:
        if a == ZERO:
            return ZERO
        return (a + self._neg_shift) % (self.q - 1)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == ZERO or b == ZERO:
            return ZERO
        return (a + b) % (self.q - 1)

    def inv(self, a: int) -> int:
        if a == ZERO:
            raise DivisionByZero("inverse of zero")
        return (-a) % (self.q - 1)

    def pow(self, a: int, k: int) -> int:
        if a == ZERO:
            if k == 0:
                return self.one
            if k < 0:
                raise DivisionByZero("negative power of zero")
            return ZERO
        return (a * k) % (self.q - 1)

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.pow(a, self.p ** times)

    def is_zero(self, a: int) -> bool:
        return a == ZERO

    def from_int(self, k: int) -> int:
        code = k % self.p
        return ZERO if code == 0 else self._log[code]

    def elements(self):
        yield ZERO
        yield from range(self.q - 1)

    def rand(self, rng) -> int:
        return rng.randrange(self.q) - 1

    def in_subfield(self, a: int, k: int) -> bool:
        """True when a lies in the subfield with p^k elements."""
        return self.frobenius(a, k) == a

    def kth_root(self, a: int, k: int) -> int | None:
        """Canonical k-th root (smallest log code) or None when a is not a k-th power."""
        if a == ZERO:
            return ZERO
        n = self.q - 1
        from math import gcd

        g = gcd(k, n)
        if a % g != 0:
            return None
        kk, nn, aa = k // g, n // g, a // g
        x0 = (aa * pow(kk, -1, nn)) % nn
        return min((x0 + j * nn) % n for j in range(g))

    # -- text form -----------------------------------------------------------

    def coords(self, a: int) -> tuple[int, ...]:
        if a == ZERO:
            return (0,) * self.m
        return tuple(self._vec(self._exp[a]))

    def from_coords(self, vec) -> int:
        code = self._code([c % self.p for c in vec])
        return ZERO if code == 0 else self._log[code]

    def text(self, a: int) -> str:
        if self.m == 1:
            return str(self.coords(a)[0])
        return ",".join(str(c) for c in self.coords(a))

    def parse(self, s: str) -> int:
        parts = s.split(",")
        vec = [int(x) for x in parts]
        if len(vec) != self.m:
            vec = vec + [0] * (self.m - len(vec))
        return self.from_coords(vec)

    def descriptor(self) -> str:
        return "Fq(%d,%d,%s)" % (self.p, self.m, ":".join(str(c) for c in self.modulus))

    def __repr__(self):
        return "Fq(%d^%d)" % (self.p, self.m)

    def __eq__(self, other):
        return (
            isinstance(other, Fq)
            and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))


def parse_field_descriptor(s: str) -> Fq:
    body = s[s.index("(") + 1 : s.rindex(")")]
    p_s, m_s, mod_s = body.split(",", 2)
    modulus = tuple(int(c) for c in mod_s.split(":"))
    return Fq(int(p_s), int(m_s), modulus)


def embed_field(small: Fq, big: Fq):
    """Deterministic embedding small -> big: sends the generator of small to
    the root of small.modulus in big with smallest log code."""
    if big.q % small.p != 0 or big.m % small.m != 0:
        raise ValueError("no embedding exists")
    root = None
    for a in sorted(big.elements()):
        acc = big.zero
        for c in reversed(small.modulus):
            acc = big.add(big.mul(acc, a), big.from_int(c))
        if big.is_zero(acc):
            root = a
            break
    if root is None:
        raise ValueError("modulus has no root in target field")

    def em(x):
        acc = big.zero
        for c in reversed(small.coords(x)):
            acc = big.add(big.mul(acc, root), big.from_int(c))
        return acc

    return em


class PLocal:
    """Rationals with exact arithmetic and a mod-p reduction that fails
    precisely when p divides the denominator."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError("p must be prime")
        self.p = p
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def from_int(self, k: int):
        return Fraction(k)

    def rand(self, rng):
        return Fraction(rng.randrange(-30, 31), rng.randrange(1, 12))

    def reduce_int(self, a: Fraction) -> int:
        """Image of a in F_p as an int in 0..p-1."""
        if a.denominator % self.p == 0:
            raise NotPIntegral("denominator %d is divisible by %d" % (a.denominator, self.p))
        return (a.numerator * pow(a.denominator, -1, self.p)) % self.p

    def reduce_into(self, a: Fraction, field: Fq) -> int:
        return field.from_int(self.reduce_int(a))

    def text(self, a) -> str:
        return str(a)

    def parse(self, s: str):
        return Fraction(s)


class QPoly:
    """Sparse polynomials in one symbol U over the rationals.

    Used as the exact characteristic-zero carrier for formal-group logarithm
    work before the single mod-p reduction; U reduces to the distinguished
    degree-zero parameter of the target ring.
    """

    def __init__(self, p: int):
        self.p = p
        self.plocal = PLocal(p)
        self.zero = {}
        self.one = {0: Fraction(1)}

    def poly(self, pairs) -> dict:
        out = {}
        for e, c in pairs:
            c = Fraction(c)
            if c:
                out[e] = out.get(e, Fraction(0)) + c
        return {e: c for e, c in out.items() if c}

    def u(self, k: int = 1) -> dict:
        return {k: Fraction(1)}

    def add(self, a, b):
        out = dict(a)
        for e, c in b.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        return {e: -c for e, c in a.items()}

    def mul(self, a, b):
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                s = out.get(e, Fraction(0)) + ca * cb
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return out

    def inv(self, a):
        if set(a) == {0}:
            return {0: 1 / a[0]}
        raise DivisionByZero("only degree-zero units are invertible here")

    def is_zero(self, a) -> bool:
        return not a

    def from_int(self, k: int):
        return {0: Fraction(k)} if k else {}

    def rand(self, rng):
        return self.poly([(rng.randrange(3), self.plocal.rand(rng))])

    def text(self, a) -> str:
        if not a:
            return "0"
        return "+".join("%s*U^%d" % (c, e) for e, c in sorted(a.items()))

    def parse(self, s: str):
        if s == "0":
            return {}
        pairs = []
        for part in s.split("+"):
            c, e = part.split("*U^")
            pairs.append((int(e), Fraction(c)))
        return self.poly(pairs)
