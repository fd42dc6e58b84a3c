"""Independent brute-force oracles used to freeze expected test values.

Everything here is deliberately naive (dense lists, Fractions, int
arithmetic) and shares no code with the library paths it checks.
"""

from fractions import Fraction


def poly_mul_mod_p(a, b, p):
    """Dense coefficient lists over F_p."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def poly_pow_mod(a, k, modpoly, p):
    """a^k in F_p[x]/(modpoly), dense lists, modpoly monic."""
    m = len(modpoly) - 1

    def red(v):
        v = list(v)
        for d in range(len(v) - 1, m - 1, -1):
            c = v[d] % p
            if c:
                for j in range(m + 1):
                    v[d - m + j] = (v[d - m + j] - c * modpoly[j]) % p
        return [x % p for x in v[:m]]

    acc = [1] + [0] * (m - 1)
    base = red(a)
    while k:
        if k & 1:
            acc = red(poly_mul_mod_p(acc, base, p))
        base = red(poly_mul_mod_p(base, base, p))
        k >>= 1
    return acc


def series_mul(a, b, N):
    """Dense rational coefficient lists mod X^(N+1)."""
    out = [Fraction(0)] * (N + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if i + j <= N and y != 0:
                out[i + j] += x * y
    return out


def series_compose(f, g, N):
    """f(g(X)) mod X^(N+1); g[0] must be 0."""
    out = [Fraction(0)] * (N + 1)
    pw = [Fraction(0)] * (N + 1)
    pw[0] = Fraction(1)
    for k, c in enumerate(f):
        if k > N:
            break
        if c != 0:
            for i, v in enumerate(pw):
                out[i] += c * v
        pw = series_mul(pw, g, N)
    return out


def lagrange_reversion(f, N):
    """Compositional inverse over the rationals by coefficient solving."""
    g = [Fraction(0)] * (N + 1)
    g[1] = 1 / Fraction(f[1])
    for k in range(2, N + 1):
        h = series_compose(f, g, k)
        g[k] = -h[k] / Fraction(f[1])
    return g


def reduce_mod_p(series, p):
    out = []
    for c in series:
        if c.denominator % p == 0:
            raise ZeroDivisionError("not p-integral")
        out.append((c.numerator * pow(c.denominator, -1, p)) % p)
    return out


def honda_log(n, p, N):
    out = [Fraction(0)] * (N + 1)
    k = 0
    while p ** (n * k) <= N:
        out[p ** (n * k)] = Fraction(1, p ** k)
        k += 1
    return out


def honda_p_series_oracle(n, p, N):
    """[p](X) = exp(p log X) over the rationals, reduced mod p."""
    log = honda_log(n, p, N)
    exp = lagrange_reversion(log, N)
    plog = [p * c for c in log]
    return reduce_mod_p(series_compose(exp, plog, N), p)
