"""Dense univariate polynomials over a prime field F_p.

Polynomials are tuples of coefficients, lowest degree first, with no
trailing zeros; the zero polynomial is ``()``.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

Poly = tuple[int, ...]

ZERO: Poly = ()


def trim(c: Sequence[int], p: int) -> Poly:
    c = [x % p for x in c]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def const(a: int, p: int) -> Poly:
    return trim((a,), p)


def x_poly(p: int) -> Poly:
    return (0, 1)


def deg(f: Poly) -> int:
    return len(f) - 1


def add(f: Poly, g: Poly, p: int) -> Poly:
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)], p)


def neg(f: Poly, p: int) -> Poly:
    return trim([-a for a in f], p)


def sub(f: Poly, g: Poly, p: int) -> Poly:
    return add(f, neg(g, p), p)


def mul(f: Poly, g: Poly, p: int) -> Poly:
    if not f or not g:
        return ZERO
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim(out, p)


def scale(f: Poly, a: int, p: int) -> Poly:
    return trim([a * x for x in f], p)


def power(f: Poly, e: int, p: int) -> Poly:
    out: Poly = (1,)
    base = f
    while e:
        if e & 1:
            out = mul(out, base, p)
        base = mul(base, base, p)
        e >>= 1
    return out


def divmod_poly(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(g[-1], -1, p)
    r = list(f)
    q = [0] * max(len(f) - len(g) + 1, 0)
    dg = len(g) - 1
    for i in range(len(f) - 1, dg - 1, -1):
        c = (r[i] * inv) % p
        if c:
            q[i - dg] = c
            for j, b in enumerate(g):
                r[i - dg + j] = (r[i - dg + j] - c * b) % p
    return trim(q, p), trim(r, p)


def rem(f: Poly, g: Poly, p: int) -> Poly:
    return divmod_poly(f, g, p)[1]


def monic(f: Poly, p: int) -> Poly:
    if not f:
        return f
    return scale(f, pow(f[-1], -1, p), p)


def gcd(f: Poly, g: Poly, p: int) -> Poly:
    while g:
        f, g = g, rem(f, g, p)
    return monic(f, p)


def xgcd(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly, Poly]:
    """(d, s, t) with s*f + t*g == d monic gcd (d == () iff both zero)."""
    r0, r1 = f, g
    s0, s1 = (1,), ZERO
    t0, t1 = ZERO, (1,)
    while r1:
        q, r = divmod_poly(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
        t0, t1 = t1, sub(t0, mul(q, t1, p), p)
    if not r0:
        return ZERO, ZERO, ZERO
    inv = pow(r0[-1], -1, p)
    return scale(r0, inv, p), scale(s0, inv, p), scale(t0, inv, p)


def divides(g: Poly, f: Poly, p: int) -> bool:
    if not g:
        return not f
    return not rem(f, g, p)


def evaluate(f: Poly, a: int, p: int) -> int:
    out = 0
    for c in reversed(f):
        out = (out * a + c) % p
    return out


def derivative(f: Poly, p: int) -> Poly:
    return trim([i * f[i] for i in range(1, len(f))], p)


def monic_polys(d: int, p: int) -> Iterator[Poly]:
    """All monic polynomials of exact degree d, in lexicographic order."""
    for low in product(range(p), repeat=d):
        yield tuple(low) + (1,)


@lru_cache(maxsize=None)
def irreducibles(d: int, p: int) -> tuple[Poly, ...]:
    """Monic irreducible polynomials of exact degree d, by sieving products."""
    if d < 1:
        return ()
    reducible = set()
    for a in range(1, d // 2 + 1):
        for f in irreducibles_up_to(a, p):
            if deg(f) != a:
                continue
            for g in monic_polys(d - a, p):
                reducible.add(mul(f, g, p))
    return tuple(f for f in monic_polys(d, p) if f not in reducible)


def irreducibles_up_to(d: int, p: int) -> tuple[Poly, ...]:
    out: list[Poly] = []
    for k in range(1, d + 1):
        out.extend(irreducibles(k, p))
    return tuple(out)


def is_irreducible(f: Poly, p: int) -> bool:
    f = monic(f, p)
    if deg(f) < 1:
        return False
    return f in irreducibles(deg(f), p)


def factor(f: Poly, p: int) -> list[tuple[Poly, int]]:
    """Factor a nonzero polynomial into monic irreducibles by trial division."""
    if not f:
        raise ValueError("cannot factor zero")
    f = monic(f, p)
    found: dict[Poly, int] = {}
    k = 1
    while 2 * k <= deg(f):
        for g in irreducibles(k, p):
            while True:
                q, r = divmod_poly(f, g, p)
                if r:
                    break
                f = q
                found[g] = found.get(g, 0) + 1
        k += 1
    if deg(f) > 0:
        found[f] = found.get(f, 0) + 1
    return sorted(found.items())


def compose(f: Poly, g: Poly, p: int) -> Poly:
    out: Poly = ZERO
    for c in reversed(f):
        out = add(mul(out, g, p), const(c, p), p)
    return out


def fmt(f: Poly, var: str = "t") -> str:
    if not f:
        return "0"
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            mono = var if i == 1 else f"{var}^{i}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(terms)
