"""Rings the engine computes with, their ideals, primes, quotients and localizations.

Finite rings are stored additively as Z/d_1 x ... x Z/d_k with structure
constants for the product of basis elements.  Ideals of a finite ring are
additive subgroups, kept as Howell bases after embedding the additive group
into (Z/N)^k with N = lcm(d_i) (coordinate i is scaled by N/d_i).

The infinite rings are F_p[t] and its localizations F_p[t][1/f]; both are
principal ideal domains and their ideals are stored by a normalized
generator.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache, reduce
from math import gcd, lcm
from typing import Any, Iterator, Sequence

from . import howell as H
from . import poly as P
from .errors import (BadModulus, MixedRings, NeedsBound, NonAssociative,
                     NonCommutative, NotPrime, RosenspecError, TooLarge)
from .smith import INTEGERS, smith

ELEMENT_CAP = 10 ** 5
LATTICE_CAP = 10 ** 4

Elem = tuple[int, ...]


def prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            return (p, k) if r == 1 else None
    return None


def is_prime(n: int) -> bool:
    pp = prime_power(n)
    return pp is not None and pp[1] == 1


# ---------------------------------------------------------------------------
# finite rings


class FiniteRing:
    """A finite commutative ring given by additive orders and structure constants."""

    is_finite = True
    is_pid = False

    def __init__(self, orders: Sequence[int], table: Sequence[Sequence[Sequence[int]]],
                 one: Sequence[int], label: str = "R", descriptor: dict | None = None,
                 cap: int = ELEMENT_CAP, verify: bool = True):
        self.orders: tuple[int, ...] = tuple(int(d) for d in orders)
        if any(d < 2 for d in self.orders):
            raise ValueError("additive orders must be >= 2")
        k = len(self.orders)
        self.table: tuple[tuple[Elem, ...], ...] = tuple(
            tuple(self.canon(table[i][j]) for j in range(k)) for i in range(k))
        self.one: Elem = self.canon(one)
        self.label = label
        self.descriptor = descriptor or {"kind": "table", "orders": list(self.orders),
                                         "table": [[list(e) for e in r] for r in self.table],
                                         "one": list(self.one)}
        self.size = 1
        for d in self.orders:
            self.size *= d
        if self.size > cap:
            raise TooLarge(f"ring {label} has {self.size} elements > cap {cap}")
        self.N = reduce(lcm, self.orders, 1)
        self._scale = tuple(self.N // d for d in self.orders)
        if verify:
            self._verify()

    # -- basic arithmetic
    @property
    def k(self) -> int:
        return len(self.orders)

    def canon(self, x: Sequence[int]) -> Elem:
        if len(x) != len(self.orders):
            raise ValueError(f"element {tuple(x)} has wrong length for {self.orders}")
        return tuple(int(a) % d for a, d in zip(x, self.orders))

    @property
    def zero(self) -> Elem:
        return (0,) * self.k

    def basis(self) -> list[Elem]:
        return [tuple(1 if i == j else 0 for j in range(self.k)) for i in range(self.k)]

    def add(self, a: Elem, b: Elem) -> Elem:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.orders))

    def neg(self, a: Elem) -> Elem:
        return tuple((-x) % d for x, d in zip(a, self.orders))

    def sub(self, a: Elem, b: Elem) -> Elem:
        return tuple((x - y) % d for x, y, d in zip(a, b, self.orders))

    def smul(self, n: int, a: Elem) -> Elem:
        return tuple((n * x) % d for x, d in zip(a, self.orders))

    def mul(self, a: Elem, b: Elem) -> Elem:
        out = [0] * self.k
        for i, x in enumerate(a):
            if not x:
                continue
            row = self.table[i]
            for j, y in enumerate(b):
                if not y:
                    continue
                c = x * y
                for t, z in enumerate(row[j]):
                    if z:
                        out[t] += c * z
        return tuple(v % d for v, d in zip(out, self.orders))

    def power(self, a: Elem, e: int) -> Elem:
        out, base = self.one, a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def from_int(self, n: int) -> Elem:
        return self.smul(n, self.one)

    def elements(self) -> Iterator[Elem]:
        return itertools.product(*(range(d) for d in self.orders))

    def is_zero_ring(self) -> bool:
        return self.k == 0

    # -- scaled embedding used by the Howell calculus
    def scaled(self, a: Elem) -> Elem:
        return tuple(x * s for x, s in zip(a, self._scale))

    def unscaled(self, v: Sequence[int]) -> Elem:
        return tuple((x // s) % d for x, s, d in zip(v, self._scale, self.orders))

    def scaled_vec(self, vec: Sequence[Elem]) -> tuple[int, ...]:
        out: list[int] = []
        for a in vec:
            out.extend(self.scaled(a))
        return tuple(out)

    def unscaled_vec(self, coords: Sequence[int], g: int) -> tuple[Elem, ...]:
        k = self.k
        return tuple(self.unscaled(coords[i * k:(i + 1) * k]) for i in range(g))

    # -- axioms
    def _verify(self) -> None:
        B = self.basis()
        for i in range(self.k):
            for j in range(self.k):
                g = gcd(self.orders[i], self.orders[j])
                if any(self.smul(g, self.table[i][j])):
                    raise RosenspecError(
                        f"structure constant ({i},{j}) not killed by gcd of orders")
                if self.table[i][j] != self.table[j][i]:
                    raise NonCommutative(f"b{i}*b{j} != b{j}*b{i}")
        for i, a in enumerate(B):
            for j, b in enumerate(B):
                ab = self.mul(a, b)
                for c in B:
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)):
                        raise NonAssociative(f"(b{i}*b{j})*c != b{i}*(b{j}*c)")
            if self.mul(self.one, a) != a:
                raise RosenspecError("unit element does not act as identity")

    # -- field test with inverse-table certificate
    @cached_property
    def inverse_table(self) -> dict[Elem, Elem] | None:
        """Inverse of every nonzero element, or None if some element has none."""
        if self.k == 0:
            return None
        inv: dict[Elem, Elem] = {}
        e = self.size - 2
        for a in self.elements():
            if not any(a):
                continue
            b = self.power(a, e)
            if self.mul(a, b) != self.one:
                return None
            inv[a] = b
        return inv

    @property
    def is_domain(self) -> bool:
        return self.inverse_table is not None

    # -- ideals
    def ideal(self, gens: Sequence[Sequence[int]]) -> "Ideal":
        gens = [self.canon(g) for g in gens]
        rows = [self.scaled(self.mul(b, g)) for g in gens for b in self.basis()]
        return Ideal(self, H.howell_form(rows, self.N, self.k), tuple(gens))

    def zero_ideal(self) -> "Ideal":
        return self.ideal([])

    def unit_ideal(self) -> "Ideal":
        return self.ideal([self.one])

    def __repr__(self) -> str:
        return f"<FiniteRing {self.label} orders={self.orders}>"

    def to_json(self) -> dict:
        return self.descriptor

    def fmt(self, a: Elem) -> str:
        if self.k == 1:
            return str(a[0])
        return "(" + ",".join(map(str, a)) + ")"


@dataclass(frozen=True)
class Ideal:
    """An ideal of a finite ring; equality is equality of Howell bases."""

    ring: FiniteRing = field(compare=False, hash=False)
    basis: tuple[tuple[int, ...], ...]
    gens: tuple[Elem, ...] = field(default=(), compare=False, hash=False)

    def contains(self, a: Elem) -> bool:
        return H.in_span(self.ring.scaled(a), self.basis, self.ring.N)

    def reduce(self, a: Elem) -> Elem:
        return self.ring.unscaled(H.reduce_vector(self.ring.scaled(a), self.basis, self.ring.N))

    @property
    def order(self) -> int:
        return H.span_order(self.basis, self.ring.N)

    def elements(self) -> list[Elem]:
        return [self.ring.unscaled(v) for v in H.enumerate_span(self.basis, self.ring.N, self.ring.k)]

    def generators(self) -> list[Elem]:
        """Additive generators (also ring generators)."""
        return [self.ring.unscaled(r) for r in self.basis]

    def is_unit(self) -> bool:
        return self.contains(self.ring.one)

    def is_zero(self) -> bool:
        return not self.basis

    def issubset(self, other: "Ideal") -> bool:
        return all(H.in_span(r, other.basis, self.ring.N) for r in self.basis)

    def label(self) -> str:
        gens = minimal_generators(self)
        if not gens:
            return "(0)"
        return "(" + ",".join(self.ring.fmt(g) for g in gens) + ")"

    def sort_key(self):
        return (-self.order, self.basis)


def minimal_generators(I: Ideal) -> list[Elem]:
    """A short generating list, greedily chosen in element order."""
    R = I.ring
    if I.is_zero():
        return []
    # principal check first
    best: list[Elem] = []
    current = R.zero_ideal()
    for a in sorted(I.elements(), key=lambda e: (sum(1 for x in e if x), e)):
        if not any(a) or current.contains(a):
            continue
        cand = ideal_sum(current, R.ideal([a]))
        if cand == I:
            return best + [a]
    for r in I.generators():
        if not current.contains(r):
            best.append(r)
            current = R.ideal(best)
    return best


def _check(*ideals) -> None:
    r = ideals[0].ring
    for I in ideals[1:]:
        if I.ring is not r:
            raise MixedRings("ideals belong to different rings")


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    _check(I, J)
    R = I.ring
    return Ideal(R, H.join(I.basis, J.basis, R.N, R.k), I.gens + J.gens)


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    _check(I, J)
    R = I.ring
    return R.ideal([R.mul(a, b) for a in I.generators() for b in J.generators()])


def ideal_intersect(I: Ideal, J: Ideal) -> Ideal:
    _check(I, J)
    R = I.ring
    return Ideal(R, H.intersect(I.basis, J.basis, R.N, R.k))


def ideal_colon(I: Ideal, r: Elem) -> Ideal:
    """(I : r) = {a : a*r in I}."""
    R = I.ring
    pairs = [(R.scaled(R.mul(b, r)), R.scaled(b)) for b in R.basis()]
    return Ideal(R, H.kernel(pairs, R.N, R.k, R.k, I.basis))


def ideal_ops(ring, request: str, *args):
    """Dispatch the ideal requests by name (span, member, equal, product, colon, sum, intersect)."""
    if request == "span":
        return ring.ideal(args[0])
    if request == "member":
        I, r = args
        return I.contains(r)
    if request == "equal":
        I, J = args
        if I.ring != J.ring:
            raise MixedRings("ideals belong to different rings")
        return I == J
    if isinstance(ring, PolyRing):
        table = {"product": pid_product, "colon": pid_colon,
                 "sum": pid_sum, "intersect": pid_intersect}
    else:
        table = {"product": ideal_product, "colon": ideal_colon,
                 "sum": ideal_sum, "intersect": ideal_intersect}
    if request not in table:
        raise ValueError(f"unknown ideal request {request!r}")
    return table[request](*args)


# ---------------------------------------------------------------------------
# constructors


@lru_cache(maxsize=None)
def zmod(n: int) -> FiniteRing:
    if n < 1:
        raise BadModulus(f"Z/{n}")
    if n == 1:
        return FiniteRing((), (), (), label="0", descriptor={"kind": "zmod", "n": 1})
    return FiniteRing((n,), [[(1,)]], (1,), label=f"Z/{n}", descriptor={"kind": "zmod", "n": n})


def gf(q: int, modulus: Sequence[int] | None = None) -> FiniteRing:
    return _gf(q, None if modulus is None else tuple(modulus))


@lru_cache(maxsize=None)
def _gf(q: int, modulus: tuple[int, ...] | None) -> FiniteRing:
    pp = prime_power(q)
    if pp is None:
        raise BadModulus(f"{q} is not a prime power")
    p, k = pp
    if k == 1:
        return FiniteRing((p,), [[(1,)]], (1,), label=f"GF({p})", descriptor={"kind": "gf", "q": q})
    if modulus is None:
        modulus = P.irreducibles(k, p)[0]
    modulus = P.monic(P.trim(modulus, p), p)
    if P.deg(modulus) != k or not P.is_irreducible(modulus, p):
        raise BadModulus(f"modulus {modulus} is not irreducible of degree {k} over F_{p}")
    table = []
    for i in range(k):
        row = []
        for j in range(k):
            prod = P.rem(tuple([0] * (i + j)) + (1,), modulus, p)
            row.append(tuple(prod[t] if t < len(prod) else 0 for t in range(k)))
        table.append(row)
    one = (1,) + (0,) * (k - 1)
    return FiniteRing((p,) * k, table, one, label=f"GF({q})",
                      descriptor={"kind": "gf", "q": q, "modulus": list(modulus)})


def product_ring(factors: Sequence[FiniteRing]) -> FiniteRing:
    orders: list[int] = []
    offs = []
    for R in factors:
        offs.append(len(orders))
        orders.extend(R.orders)
    k = len(orders)
    table = [[(0,) * k for _ in range(k)] for _ in range(k)]
    one = [0] * k
    for R, o in zip(factors, offs):
        for i in range(R.k):
            one[o + i] = R.one[i]
            for j in range(R.k):
                v = [0] * k
                v[o:o + R.k] = R.table[i][j]
                table[o + i][o + j] = tuple(v)
    return FiniteRing(orders, table, one, label=" x ".join(R.label for R in factors),
                      descriptor={"kind": "product", "factors": [R.descriptor for R in factors]})


@dataclass
class RingHom:
    """Additive map given on basis elements; used for residue and projection maps."""

    source: Any
    target: Any
    images: tuple[Any, ...]

    def __call__(self, a: Elem) -> Any:
        T = self.target
        out = T.zero
        for x, img in zip(a, self.images):
            if x:
                out = T.add(out, T.smul(x, img))
        return out

    def is_ring_hom(self) -> bool:
        S, T = self.source, self.target
        if self(S.one) != T.one:
            return False
        B = S.basis()
        return all(self(S.mul(a, b)) == T.mul(self(a), self(b)) for a in B for b in B)


def quotient_ring(R: FiniteRing, I: Ideal) -> tuple[FiniteRing, RingHom]:
    """R/I together with the residue map; the unit ideal yields the zero ring."""
    if I.ring is not R:
        raise MixedRings("ideal over a different ring")
    k = R.k
    rows = [[R.orders[i] if j == i else 0 for j in range(k)] for i in range(k)]
    rows += [list(R.unscaled(b)) for b in I.basis]
    _, D, V, _, Vinv = smith(rows, k, INTEGERS)
    keep = [j for j in range(k) if abs(D[j][j]) != 1]
    orders = [abs(D[j][j]) for j in keep]

    def residue(a: Elem) -> Elem:
        y = [sum(a[i] * V[i][j] for i in range(k)) for j in keep]
        return tuple(v % d for v, d in zip(y, orders))

    lifts = [tuple(x % d for x, d in zip(Vinv[j], R.orders)) for j in keep]
    table = [[residue(R.mul(a, b)) for b in lifts] for a in lifts]
    label = f"{R.label}/{I.label()}"
    desc = {"kind": "quotient", "base": R.descriptor,
            "ideal": [list(g) for g in I.generators()]}
    if not keep:
        Q = FiniteRing((), (), (), label="0", descriptor=desc)
    else:
        Q = FiniteRing(orders, table, residue(R.one), label=label, descriptor=desc, verify=True)
    hom = RingHom(R, Q, tuple(residue(b) for b in R.basis()))
    Q.lift = lambda y, _l=lifts, _R=R: reduce(_R.add, (_R.smul(c, l) for c, l in zip(y, _l)), _R.zero)
    return Q, hom


# ---------------------------------------------------------------------------
# enumeration of ideals and primes


def _close_under_sums(atoms: list, key, add, cap: int, what: str) -> list:
    seen = {key(a): a for a in atoms}
    frontier = list(seen.values())
    while frontier:
        new = []
        for A in frontier:
            for B in atoms:
                C = add(A, B)
                kc = key(C)
                if kc not in seen:
                    seen[kc] = C
                    new.append(C)
                    if len(seen) > cap:
                        raise TooLarge(f"more than {cap} {what}")
        frontier = new
    return list(seen.values())


def all_ideals(R: FiniteRing, cap: int = LATTICE_CAP) -> list[Ideal]:
    if R.size > ELEMENT_CAP:
        raise TooLarge("ring too large for ideal enumeration")
    principal = {}
    for a in R.elements():
        I = R.ideal([a])
        principal.setdefault(I.basis, I)
    atoms = list(principal.values())
    ideals = _close_under_sums(atoms, lambda I: I.basis, ideal_sum, cap, "ideals")
    return sorted(ideals, key=Ideal.sort_key)


@dataclass(frozen=True)
class PrimeIdeal:
    ideal: Any
    certificate: Any = field(compare=False, hash=False, default=None)

    @property
    def ring(self):
        return self.ideal.ring

    def label(self) -> str:
        return self.ideal.label()


def prime_certificate(I: Ideal) -> dict | None:
    """Inverse table of R/I when that quotient is a field, else None."""
    if I.is_unit():
        return None
    Q, res = quotient_ring(I.ring, I)
    inv = Q.inverse_table
    if inv is None:
        return None
    return {"quotient": Q.orders, "inverses": {Q.fmt(a): Q.fmt(b) for a, b in inv.items()}}


def is_prime_ideal(I) -> bool:
    if isinstance(I, PidIdeal):
        return I.ring.is_prime(I)
    return prime_certificate(I) is not None


def enumerate_ideals_primes(R, degree_bound: int | None = None):
    """(ideals, primes); for the infinite PIDs the ideal list is None."""
    if isinstance(R, FiniteRing):
        ideals = all_ideals(R)
        primes = []
        for I in ideals:
            cert = prime_certificate(I)
            if cert is not None:
                primes.append(PrimeIdeal(I, cert))
        return ideals, primes
    if degree_bound is None:
        raise NeedsBound(f"{R.label} is infinite; a degree bound is required")
    return None, R.primes(degree_bound)


# ---------------------------------------------------------------------------
# localization of finite rings


def idempotents(R: FiniteRing) -> list[Elem]:
    return [e for e in R.elements() if R.mul(e, e) == e]


def primitive_idempotents(R: FiniteRing) -> list[Elem]:
    idem = [e for e in idempotents(R) if any(e)]
    prim = []
    for e in idem:
        if not any(f != e and R.mul(e, f) == f for f in idem):
            prim.append(e)
    return sorted(prim)


def local_idempotent(p: "PrimeIdeal | Ideal") -> Elem:
    """The primitive idempotent outside p (exactly one exists)."""
    I = p.ideal if isinstance(p, PrimeIdeal) else p
    R = I.ring
    outside = [e for e in primitive_idempotents(R) if not I.contains(e)]
    if len(outside) != 1:
        raise NotPrime(f"{I.label()} is not a prime of {R.label}")
    return outside[0]


def localize(R, p):
    """Localization at a prime.

    Finite rings: the local factor R*e (e the primitive idempotent outside
    p) as R/(1-e), with the projection.  Polynomial rings: a symbolic
    handle whose module queries go through annihilators.
    """
    if isinstance(R, FiniteRing):
        I = p.ideal if isinstance(p, PrimeIdeal) else p
        if not is_prime_ideal(I):
            raise NotPrime(f"{I.label()} is not prime")
        e = local_idempotent(I)
        return quotient_ring(R, R.ideal([R.sub(R.one, e)]))
    I = p.ideal if isinstance(p, PrimeIdeal) else p
    if not R.is_prime(I):
        raise NotPrime(f"{I.label()} is not prime")
    return LocalizationHandle(R, I), None


@dataclass(frozen=True)
class LocalizationHandle:
    """Stands for R_p without materializing fractions."""

    ring: Any
    prime: Any

    def module_nonzero(self, M) -> bool:
        from .pidmod import support_contains
        return support_contains(M, self.prime)


# ---------------------------------------------------------------------------
# principal ideal domains: F_p[t] and F_p[t][1/f]


@dataclass(frozen=True)
class PidIdeal:
    ring: Any = field(compare=False, hash=False)
    gen: P.Poly

    def contains(self, a) -> bool:
        return P.divides(self.gen, self.ring.assoc(a), self.ring.p)

    def is_zero(self) -> bool:
        return not self.gen

    def is_unit(self) -> bool:
        return self.gen == (1,)

    def issubset(self, other: "PidIdeal") -> bool:
        return P.divides(other.gen, self.gen, self.ring.p)

    def label(self) -> str:
        return "(" + P.fmt(self.gen, self.ring.var) + ")"

    def sort_key(self):
        return (len(self.gen) if self.gen else 10 ** 9, self.gen)


class PolyRing:
    """F_p[var] (prime p)."""

    is_finite = False
    is_domain = True
    is_pid = True

    def __init__(self, p: int, var: str = "t"):
        if not is_prime(p):
            raise BadModulus(f"polynomial coefficients must be a prime field, got q={p}")
        self.p, self.var = p, var
        self.label = f"GF({p})[{var}]"
        self.descriptor = {"kind": "poly", "coeff": {"kind": "gf", "q": p}, "var": var}
        self.zero, self.one = P.ZERO, (1,)
        self.invert = P.ZERO  # no inverted element

    def __eq__(self, other):
        return isinstance(other, PolyRing) and not isinstance(other, LocalizedPolyRing) \
            and (self.p, self.var) == (other.p, other.var)

    def __hash__(self):
        return hash(("poly", self.p, self.var))

    def __repr__(self):
        return f"<PolyRing {self.label}>"

    def to_json(self):
        return self.descriptor

    def elem(self, c) -> P.Poly:
        return P.trim(c, self.p)

    def add(self, a, b):
        return P.add(a, b, self.p)

    def sub(self, a, b):
        return P.sub(a, b, self.p)

    def neg(self, a):
        return P.neg(a, self.p)

    def mul(self, a, b):
        return P.mul(a, b, self.p)

    def is_unit(self, a) -> bool:
        return len(a) == 1

    def assoc(self, a) -> P.Poly:
        """Normalized generator of the principal ideal (a)."""
        return P.monic(a, self.p)

    def normalize(self, a):
        return P.monic(a, self.p)

    def divides(self, a, b) -> bool:
        return P.divides(a, b, self.p)

    def gcd(self, a, b):
        return P.gcd(a, b, self.p)

    def fmt(self, a) -> str:
        return P.fmt(a, self.var)

    def ideal(self, gens) -> PidIdeal:
        g = P.ZERO
        for a in gens:
            g = P.gcd(g, self.elem(a), self.p)
        return PidIdeal(self, g)

    def is_prime(self, I: PidIdeal) -> bool:
        return I.is_zero() or P.is_irreducible(I.gen, self.p)

    def primes(self, degree_bound: int) -> list[PrimeIdeal]:
        out = [PrimeIdeal(PidIdeal(self, P.ZERO), "zero ideal of a domain")]
        for f in P.irreducibles_up_to(degree_bound, self.p):
            out.append(PrimeIdeal(PidIdeal(self, f), {"irreducible": list(f)}))
        return out

    def sample(self, degree: int) -> list[P.Poly]:
        out = [P.ZERO]
        for d in range(degree + 1):
            for c in itertools.product(range(self.p), repeat=d + 1):
                if c[-1]:
                    out.append(tuple(c))
        return out


def _pid(R, g: P.Poly) -> PidIdeal:
    g = P.monic(g, R.p)
    if isinstance(R, LocalizedPolyRing):
        g = R.strip(g)
    return PidIdeal(R, g)


def pid_product(I: PidIdeal, J: PidIdeal) -> PidIdeal:
    return _pid(I.ring, P.mul(I.gen, J.gen, I.ring.p))


def pid_sum(I: PidIdeal, J: PidIdeal) -> PidIdeal:
    return _pid(I.ring, P.gcd(I.gen, J.gen, I.ring.p))


def pid_intersect(I: PidIdeal, J: PidIdeal) -> PidIdeal:
    R, p = I.ring, I.ring.p
    if I.is_zero() or J.is_zero():
        return PidIdeal(R, P.ZERO)
    g = P.gcd(I.gen, J.gen, p)
    return _pid(R, P.divmod_poly(P.mul(I.gen, J.gen, p), g, p)[0])


def pid_colon(I: PidIdeal, r) -> PidIdeal:
    R, p = I.ring, I.ring.p
    a = R.assoc(r)
    if I.is_zero():
        return PidIdeal(R, P.ZERO) if a else _pid(R, (1,))
    g = P.gcd(I.gen, a, p)
    return _pid(R, P.divmod_poly(I.gen, g, p)[0])


class LocalizedPolyRing(PolyRing):
    """F_p[var][1/f]: elements are reduced fractions (num, den) with den | f^oo monic.

    For f = var this is the Laurent ring and den is a power of var, i.e.
    the representative is normalized to lowest degree 0 by extracting a unit var^k.
    """

    def __init__(self, p: int, f: P.Poly, var: str = "t"):
        super().__init__(p, var)
        f = P.monic(P.trim(f, p), p)
        if P.deg(f) < 1:
            raise ValueError("the inverted element must be a nonconstant polynomial")
        self.f = f
        self.inverted_primes = tuple(g for g, _ in P.factor(f, p))
        if f == (0, 1):
            self.label = f"GF({p})[{var},{var}^-1]"
        else:
            self.label = f"GF({p})[{var}, 1/({P.fmt(f, var)})]"
        self.descriptor = {"kind": "laurent", "base": {"kind": "poly", "coeff": {"kind": "gf", "q": p},
                                                       "var": var},
                           "invert": list(f)}
        self.zero = (P.ZERO, (1,))
        self.one = ((1,), (1,))

    def __eq__(self, other):
        return isinstance(other, LocalizedPolyRing) and (self.p, self.var, self.inverted_primes) == \
            (other.p, other.var, other.inverted_primes)

    def __hash__(self):
        return hash(("loc", self.p, self.var, self.inverted_primes))

    def strip(self, a: P.Poly) -> P.Poly:
        """Remove every inverted prime from a nonzero polynomial (unit part)."""
        if not a:
            return a
        for g in self.inverted_primes:
            while True:
                q, r = P.divmod_poly(a, g, self.p)
                if r:
                    break
                a = q
        return P.monic(a, self.p)

    def allowed_den(self, d: P.Poly) -> bool:
        return bool(d) and P.deg(self.strip(d)) == 0

    def frac(self, num, den=(1,)):
        p = self.p
        num, den = P.trim(num, p), P.trim(den, p)
        if not den:
            raise ZeroDivisionError
        if not num:
            return self.zero
        g = P.gcd(num, den, p)
        num = P.divmod_poly(num, g, p)[0]
        den = P.divmod_poly(den, g, p)[0]
        c = pow(den[-1], -1, p)
        num, den = P.scale(num, c, p), P.scale(den, c, p)
        if not self.allowed_den(den):
            raise ValueError(f"{P.fmt(den, self.var)} is not invertible in {self.label}")
        return (num, den)

    def elem(self, c):
        if isinstance(c, tuple) and len(c) == 2 and isinstance(c[0], tuple):
            return self.frac(*c)
        return self.frac(P.trim(c, self.p))

    def add(self, a, b):
        p = self.p
        return self.frac(P.add(P.mul(a[0], b[1], p), P.mul(b[0], a[1], p), p), P.mul(a[1], b[1], p))

    def neg(self, a):
        return (P.neg(a[0], self.p), a[1])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        p = self.p
        return self.frac(P.mul(a[0], b[0], p), P.mul(a[1], b[1], p))

    def is_unit(self, a) -> bool:
        return bool(a[0]) and P.deg(self.strip(a[0])) == 0

    def inverse(self, a):
        return self.frac(a[1], a[0])

    def assoc(self, a) -> P.Poly:
        return self.strip(a[0]) if a[0] else P.ZERO

    def normalize(self, a):
        """Associate generator: the numerator with inverted primes removed."""
        if not a[0]:
            return P.ZERO
        return self.strip(a[0])

    def divides(self, a, b) -> bool:
        ga, gb = self.normalize(a), self.normalize(b)
        return P.divides(ga, gb, self.p)

    def fmt(self, a) -> str:
        if a[1] == (1,):
            return P.fmt(a[0], self.var)
        return f"({P.fmt(a[0], self.var)})/({P.fmt(a[1], self.var)})"

    def ideal(self, gens) -> PidIdeal:
        g = P.ZERO
        for a in gens:
            g = P.gcd(g, self.normalize(self.elem(a)), self.p)
        return PidIdeal(self, self.strip(g) if g else g)

    def primes(self, degree_bound: int) -> list[PrimeIdeal]:
        return [q for q in PolyRing.primes(self, degree_bound)
                if q.ideal.is_zero() or q.ideal.gen not in self.inverted_primes]

    def is_prime(self, I) -> bool:
        return I.is_zero() or (P.is_irreducible(I.gen, self.p) and I.gen not in self.inverted_primes)

    def from_poly(self, a):
        return self.frac(a)

    def sample(self, degree: int) -> list:
        out = [self.frac(c) for c in PolyRing.sample(self, degree)]
        for g in self.inverted_primes:
            out.append(self.frac((1,), g))
        return out


# ---------------------------------------------------------------------------
# descriptors


def make_ring(descriptor: dict | str, cap: int = ELEMENT_CAP):
    """Build a ring from a JSON descriptor (dict or JSON text)."""
    if isinstance(descriptor, str):
        descriptor = json.loads(descriptor)
    kind = descriptor.get("kind")
    if kind == "zmod":
        return zmod(int(descriptor["n"]))
    if kind == "gf":
        return gf(int(descriptor["q"]), descriptor.get("modulus"))
    if kind == "product":
        return product_ring([make_ring(d, cap) for d in descriptor["factors"]])
    if kind == "table":
        return FiniteRing(descriptor["orders"], descriptor["table"], descriptor["one"],
                          label=descriptor.get("label", "R"), cap=cap)
    if kind == "poly":
        coeff = descriptor.get("coeff", {"kind": "gf", "q": 2})
        if coeff.get("kind") not in ("gf", "zmod"):
            raise BadModulus("polynomial coefficients must be a prime field")
        q = int(coeff.get("q", coeff.get("n", 0)))
        return PolyRing(q, descriptor.get("var", "t"))
    if kind == "laurent":
        base = make_ring(descriptor["base"], cap)
        return LocalizedPolyRing(base.p, tuple(descriptor["invert"]), base.var)
    if kind == "quotient":
        base = make_ring(descriptor["base"], cap)
        if isinstance(base, PolyRing):
            gens = [tuple(g) for g in descriptor["ideal"]]
            f = base.ideal(gens).gen
            if not f:
                raise TooLarge("quotient by the zero ideal of an infinite ring is infinite")
            return poly_quotient(base, f)
        I = base.ideal([tuple(g) for g in descriptor["ideal"]])
        return quotient_ring(base, I)[0]
    raise ValueError(f"unknown ring kind {kind!r}")


@lru_cache(maxsize=None)
def poly_quotient(R: PolyRing, f: P.Poly) -> FiniteRing:
    """F_p[t]/(f) as a finite ring with basis 1, t, ..., t^(d-1)."""
    p, f = R.p, P.monic(f, R.p)
    d = P.deg(f)
    if d == 0:
        return zmod(1)
    table = []
    for i in range(d):
        row = []
        for j in range(d):
            r = P.rem(tuple([0] * (i + j)) + (1,), f, p)
            row.append(tuple(r[t] if t < len(r) else 0 for t in range(d)))
        table.append(row)
    one = (1,) + (0,) * (d - 1)
    return FiniteRing((p,) * d, table, one, label=f"{R.label}/({P.fmt(f, R.var)})",
                      descriptor={"kind": "quotient", "base": R.descriptor, "ideal": [list(f)]})


def poly_to_elem(a: P.Poly, d: int) -> Elem:
    return tuple(a[i] if i < len(a) else 0 for i in range(d))


def parse_shorthand(text: str):
    """zmod:n, gf:q, poly:gf:q:t (and poly:q:t)."""
    parts = text.split(":")
    try:
        if parts[0] == "zmod":
            return zmod(int(parts[1]))
        if parts[0] == "gf":
            return gf(int(parts[1]))
        if parts[0] == "poly":
            rest = [x for x in parts[1:] if x != "gf"]
            var = rest[1] if len(rest) > 1 else "t"
            return PolyRing(int(rest[0]), var)
        if parts[0] == "z4x2":
            return z4_dual()
    except (IndexError, ValueError) as exc:
        raise ValueError(f"cannot parse ring shorthand {text!r}") from exc
    raise ValueError(f"cannot parse ring shorthand {text!r}")


@lru_cache(maxsize=None)
def z4_dual() -> FiniteRing:
    """Z/4[x]/(x^2) as a finite-table ring."""
    return FiniteRing((4, 4), [[(1, 0), (0, 1)], [(0, 1), (0, 0)]], (1, 0), label="Z/4[x]/(x^2)")
