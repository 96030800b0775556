"""Brute-force reference computations. Nothing here imports rosenspec."""
from __future__ import annotations

import itertools
from math import gcd


def span(rows, n, ncols):
    """All Z-combinations of rows in (Z/n)^ncols, by closure."""
    zero = tuple([0] * ncols)
    seen = {zero}
    frontier = [zero]
    gens = [tuple(x % n for x in r) for r in rows]
    while frontier:
        nxt = []
        for v in frontier:
            for r in gens:
                w = tuple((a + b) % n for a, b in zip(v, r))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def quotient_elements(rows, n, g):
    """Coset representatives of (Z/n)^g / span(rows), as frozensets."""
    S = span(rows, n, g)
    cosets = set()
    for v in itertools.product(range(n), repeat=g):
        cosets.add(frozenset(tuple((a + b) % n for a, b in zip(v, s)) for s in S))
    return S, cosets


def group_type(rows, n, g):
    """Counts |{x : d x = 0}| for each d | n: determines a finite abelian group of exponent dividing n."""
    S = span(rows, n, g)
    out = []
    for d in divisors(n):
        killed = 0
        for v in itertools.product(range(n), repeat=g):
            if tuple(d * a % n for a in v) in S:
                killed += 1
        out.append(killed // len(S))
    return tuple(out)


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_divisors(n):
    return [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]


def module_size(rows, n, g):
    return n ** g // len(span(rows, n, g))


def annihilator(rows, n, g):
    """{r in Z/n : r (Z/n)^g inside span(rows)}."""
    S = span(rows, n, g)
    units = [tuple(1 if i == j else 0 for i in range(g)) for j in range(g)]
    return {r for r in range(n) if all(tuple(r * a % n for a in e) in S for e in units)}


def in_support(rows, n, g, p):
    """M_p != 0 for Z/n modules: the p-primary part is nontrivial."""
    return _p_part(rows, n, g, p) > 1


def _p_part(rows, n, g, p):
    S = span(rows, n, g)
    e = 1
    while n % (e * p) == 0:
        e *= p
    count = 0
    for v in itertools.product(range(n), repeat=g):
        if tuple(e * a % n for a in v) in S:
            count += 1
    return count // len(S)


def cyclic_decomposition(rows, n, g):
    """Invariant orders of the cyclic factors, by counting elements of each order."""
    S = span(rows, n, g)
    orders = []
    for v in itertools.product(range(n), repeat=g):
        if tuple(v) in S:
            continue
        k = 1
        while tuple(k * a % n for a in v) not in S:
            k += 1
        orders.append(k)
    return sorted(orders)


def embeds(small_rows, small_g, big_rows, big_g, n, copies):
    """Is (Z/n)^small_g/span(small_rows) isomorphic to a subgroup of (big module)^copies?

    Finite abelian groups: subquotients of A are exactly the groups isomorphic to subgroups of A.
    """
    want = group_type(small_rows, n, small_g)
    g = big_g * copies
    big = []
    for c in range(copies):
        for r in big_rows:
            row = [0] * g
            row[c * big_g:(c + 1) * big_g] = r
            big.append(row)
    S = span(big, n, g)
    elems = sorted({min(frozenset(tuple((a + b) % n for a, b in zip(v, s)) for s in S))
                    for v in itertools.product(range(n), repeat=g)})
    k = max(1, small_g)
    for gens in itertools.combinations_with_replacement(elems, k):
        H = span(list(gens) + big, n, g)
        # subgroup generated by gens, modulo S
        if _type_of_sub(H, S, n, g) == want:
            return True
    return False


def _type_of_sub(H, S, n, g):
    out = []
    for d in divisors(n):
        killed = {frozenset(tuple((a + b) % n for a, b in zip(v, s)) for s in S)
                  for v in H if tuple(d * a % n for a in v) in S}
        out.append(len(killed))
    return tuple(out)


def hom_count(m_rows, m_g, n_rows, n_g, n):
    """|Hom(M, N)| over Z/n by checking every assignment of generator images."""
    SN = span(n_rows, n, n_g)
    reps = sorted({min(frozenset(tuple((a + b) % n for a, b in zip(v, s)) for s in SN))
                   for v in itertools.product(range(n), repeat=n_g)})
    count = 0
    for imgs in itertools.product(reps, repeat=m_g):
        ok = True
        for r in m_rows:
            w = [0] * n_g
            for c, img in zip(r, imgs):
                w = [(x + c * y) % n for x, y in zip(w, img)]
            if tuple(w) not in SN:
                ok = False
                break
        count += ok
    return count


# ---------------------------------------------------------------------------
# polynomials over F_p, coefficient lists low degree first


def p_trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return tuple(f)


def p_mul(f, g, p):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = (out[i + j] + a * b) % p
    return p_trim(out)


def monic_irreducible_count(d, p):
    """Number of monic irreducibles of degree d over F_p, by sieving all products."""
    monics = {k: [tuple(c) + (1,) for c in itertools.product(range(p), repeat=k)] for k in range(1, d + 1)}
    reducible = set()
    for a in range(1, d):
        for f in monics[a]:
            for g in monics[d - a]:
                reducible.add(p_mul(f, g, p))
    return len([f for f in monics[d] if f not in reducible])


def lcm(a, b):
    return a * b // gcd(a, b)
