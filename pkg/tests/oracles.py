"""Slow, independent reference implementations used only by the tests.

Nothing here calls into fhsopt's arithmetic or correlation code: field
elements are handled as coefficient lists with schoolbook multiplication,
and correlations are counted with plain loops.
"""

from __future__ import annotations

import itertools


# -- field arithmetic on coefficient lists ----------------------------------

def to_coeffs(code: int, p: int, m: int) -> list[int]:
    return [(code // p ** i) % p for i in range(m)]


def to_code(coeffs, p: int) -> int:
    return sum(c * p ** i for i, c in enumerate(coeffs))


def poly_mulmod(a, b, modulus, p):
    """Schoolbook product of two residues modulo a monic modulus."""
    m = len(modulus) - 1
    prod = [0] * (2 * m)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for deg in range(2 * m - 1, m - 1, -1):
        c = prod[deg]
        if c:
            for i in range(m + 1):
                prod[deg - m + i] = (prod[deg - m + i] - c * modulus[i]) % p
    return prod[:m]


def mul(a: int, b: int, modulus, p: int) -> int:
    m = len(modulus) - 1
    return to_code(poly_mulmod(to_coeffs(a, p, m), to_coeffs(b, p, m), modulus, p), p)


def add(a: int, b: int, p: int, m: int) -> int:
    return to_code([(x + y) % p for x, y in zip(to_coeffs(a, p, m), to_coeffs(b, p, m))], p)


def sub(a: int, b: int, p: int, m: int) -> int:
    return to_code([(x - y) % p for x, y in zip(to_coeffs(a, p, m), to_coeffs(b, p, m))], p)


def power(a: int, e: int, modulus, p: int) -> int:
    r = 1
    for _ in range(e):
        r = mul(r, a, modulus, p)
    return r


def order(a: int, modulus, p: int) -> int:
    """Multiplicative order by repeated multiplication."""
    x, k = a, 1
    while x != 1:
        x = mul(x, a, modulus, p)
        k += 1
    return k


def trace(a: int, modulus, p: int, k: int = 1) -> int:
    """sum of a^(p^(k i)) by repeated multiplication."""
    m = len(modulus) - 1
    s, y = 0, a
    for _ in range(m // k):
        s = add(s, y, p, m)
        y = power(y, p ** k, modulus, p)
    return s


def span_size(vectors, p: int) -> int:
    """|GF(p)-span| by enumerating all combinations."""
    vecs = [tuple(v) for v in vectors]
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(vecs)):
        out.add(tuple(sum(c * v[i] for c, v in zip(coeffs, vecs)) % p
                      for i in range(len(vecs[0]))))
    return len(out)


# -- correlation ---------------------------------------------------------------

def naive_hamming(X, Y, tau: int, start: int, L: int) -> int:
    N = len(X)
    return sum(1 for t in range(start, start + L) if X[t % N] == Y[(t + tau) % N])


def naive_profile(rows) -> list[int]:
    """[M(F; L) for L = 1..N] by looping over (i, j, tau, start) and growing L."""
    M, N = len(rows), len(rows[0])
    best = [0] * N
    for i in range(M):
        for j in range(M):
            for tau in range(N):
                if i == j and tau == 0:
                    continue
                X, Y = rows[i], rows[j]
                for start in range(N):
                    count = 0
                    for L in range(1, N + 1):
                        t = (start + L - 1) % N
                        if X[t] == Y[(t + tau) % N]:
                            count += 1
                        if count > best[L - 1]:
                            best[L - 1] = count
    return best


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)
