"""Schemes glued from affine charts along basic opens, quasi-coherent sheaves
as chart modules with transition matrices, and the reconstruction of a
scheme from its category of sheaves.

Polynomial charts carry modules as presentations R^g / rows; a transition
tau_ij sends generator k of chart i to row k of a g_i x g_j matrix whose
entries are fractions (num, den) in the variable of chart j.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Callable, Sequence

from . import howell as H
from . import poly as P
from . import smith as S
from .errors import (BadGluing, BadModulus, IncompatibleTransitions, MismatchBug, MixedCharacteristic,
                     MixedSchemes, NeedsBound, NotIntegral, NotInvertible)
from .modules import FGModule, annihilator as fg_annihilator, cyclic, direct_sum as fg_direct_sum
from .modules import free, support as fg_support
from .pidmod import PidModule, pid_annihilator, present_pid_module, support_contains
from .rings import (FiniteRing, LocalizedPolyRing, PidIdeal, PolyRing, PrimeIdeal, enumerate_ideals_primes,
                    is_prime, is_prime_ideal, local_idempotent, make_ring, parse_shorthand, quotient_ring)
from .spectrum import NO, UNKNOWN, YES, PrecedesVerdict, is_spectral, precedes, precedes_pid, spec_points

INF = "inf"
Rat = tuple
ONE: Rat = ((1,), (1,))
ZERO: Rat = ((), (1,))
VAR_NAMES = ("t", "s", "u", "v", "w", "z")


# ---------------------------------------------------------------------------
# rational functions in one variable over F_p


def rat(num, den=(1,), p: int = 2) -> Rat:
    num, den = P.trim(num, p), P.trim(den, p)
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return ZERO
    g = P.gcd(num, den, p)
    num, den = P.divmod_poly(num, g, p)[0], P.divmod_poly(den, g, p)[0]
    c = pow(den[-1], -1, p)
    return P.scale(num, c, p), P.scale(den, c, p)


def r_add(a: Rat, b: Rat, p: int) -> Rat:
    return rat(P.add(P.mul(a[0], b[1], p), P.mul(b[0], a[1], p), p), P.mul(a[1], b[1], p), p)


def r_neg(a: Rat, p: int) -> Rat:
    return (P.neg(a[0], p), a[1])


def r_sub(a: Rat, b: Rat, p: int) -> Rat:
    return r_add(a, r_neg(b, p), p)


def r_mul(a: Rat, b: Rat, p: int) -> Rat:
    return rat(P.mul(a[0], b[0], p), P.mul(a[1], b[1], p), p)


def r_inv(a: Rat, p: int) -> Rat:
    if not a[0]:
        raise ZeroDivisionError("inverting zero")
    return rat(a[1], a[0], p)


def r_pow(a: Rat, n: int, p: int) -> Rat:
    if n < 0:
        a, n = r_inv(a, p), -n
    out = ONE
    for _ in range(n):
        out = r_mul(out, a, p)
    return out


def subst(g: P.Poly, r: Rat, p: int) -> Rat:
    """g(r) by Horner."""
    out = ZERO
    for c in reversed(g):
        out = r_add(r_mul(out, r, p), rat((c,), (1,), p), p)
    return out


def subst_rat(a: Rat, r: Rat, p: int) -> Rat:
    return r_mul(subst(a[0], r, p), r_inv(subst(a[1], r, p), p), p)


def var_rat() -> Rat:
    return ((0, 1), (1,))


def _lcm(a: P.Poly, b: P.Poly, p: int) -> P.Poly:
    return P.divmod_poly(P.mul(a, b, p), P.gcd(a, b, p), p)[0]


# fractional-linear maps x -> (a x + b) / (c x + d), as 4-tuples mod p

def mob_norm(A, p: int) -> tuple:
    A = tuple(x % p for x in A)
    lead = next(x for x in A if x)
    inv = pow(lead, -1, p)
    return tuple(x * inv % p for x in A)


def mob_mul(A, B, p: int) -> tuple:
    """A after B."""
    a, b, c, d = A
    e, f, g, h = B
    return mob_norm((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h), p)


def mob_inv(A, p: int) -> tuple:
    a, b, c, d = A
    return mob_norm((d, -b, -c, a), p)


def mob_rat(A, p: int) -> Rat:
    a, b, c, d = A
    return rat((b, a), (d, c), p)


def mob_point(A, pt, p: int):
    a, b, c, d = A
    if pt == INF:
        num, den = a % p, c % p
    else:
        num, den = (a * pt + b) % p, (c * pt + d) % p
    if den == 0:
        return INF
    return num * pow(den, -1, p) % p


def pgl2(p: int) -> list[tuple]:
    out = set()
    for A in itertools.product(range(p), repeat=4):
        if (A[0] * A[3] - A[1] * A[2]) % p:
            out.add(mob_norm(A, p))
    return sorted(out)


def mob_from_points(images: dict, p: int) -> tuple:
    """The unique fractional-linear map with prescribed images of inf, 0 and 1."""
    hits = [A for A in pgl2(p) if all(mob_point(A, x, p) == y for x, y in images.items())]
    if len(hits) != 1:
        raise MismatchBug(f"{len(hits)} fractional-linear maps fit the point images")
    return hits[0]


@lru_cache(maxsize=None)
def loc_ring(p: int, f: P.Poly, var: str) -> LocalizedPolyRing:
    return LocalizedPolyRing(p, f, var)


# ---------------------------------------------------------------------------
# glued schemes


@dataclass(frozen=True)
class Glue:
    f: P.Poly      # f_ij in chart i
    g: P.Poly      # f_ji in chart j
    image: Rat     # theta_ij(x_i), a fraction in x_j


class GluedScheme:
    """Charts R_i with gluing data theta_ij : R_i[1/f_ij] -> R_j[1/f_ji]."""

    def __init__(self, charts: Sequence, gluing: dict | None = None, kind: str = "glued",
                 label: str | None = None, separated: bool = False, p1: dict | None = None):
        self.charts = list(charts)
        self.gluing: dict[tuple[int, int], Glue] = dict(gluing or {})
        self.kind = kind
        self.label = label or kind
        self.separated = separated
        self.p1 = p1
        for (i, j) in self.gluing:
            if not (isinstance(self.charts[i], PolyRing) and isinstance(self.charts[j], PolyRing)):
                raise BadGluing("only polynomial charts can be glued")
            if self.charts[i].p != self.charts[j].p:
                raise MixedCharacteristic(f"charts {i} and {j} have different characteristic")
        ps = {R.p for R in self.charts if isinstance(R, PolyRing)}
        self.p = min(ps) if ps else None
        self.certificates = self._verify()
        self.components = self._components()

    def __repr__(self):
        return f"<GluedScheme {self.label}: {len(self.charts)} charts>"

    def var(self, i: int) -> str:
        return self.charts[i].var

    def overlap(self, i: int, j: int) -> LocalizedPolyRing:
        """R_i[1/f_ij]."""
        return loc_ring(self.p, self.gluing[(i, j)].f, self.var(i))

    def theta(self, i: int, j: int, a: Rat) -> Rat:
        return subst_rat(a, self.gluing[(i, j)].image, self.p)

    def glued(self, i: int, j: int) -> bool:
        return (i, j) in self.gluing

    def triples(self):
        n = len(self.charts)
        for i, j, k in itertools.permutations(range(n), 3):
            if self.glued(i, j) and self.glued(j, k) and self.glued(i, k):
                yield i, j, k

    def triple_ring(self, k: int, i: int, j: int) -> LocalizedPolyRing:
        f = P.mul(self.gluing[(k, i)].f, self.gluing[(k, j)].f, self.p)
        return loc_ring(self.p, f, self.var(k))

    def _verify(self) -> list[dict]:
        p = self.p
        certs = []
        for (i, j), G in self.gluing.items():
            if (j, i) not in self.gluing:
                raise BadGluing(f"missing gluing {j}->{i}")
            back = self.gluing[(j, i)]
            if back.f != G.g or back.g != G.f:
                raise BadGluing(f"gluing elements of {i},{j} disagree")
            target = self.overlap(j, i)
            if not target.allowed_den(G.image[1]):
                raise BadGluing(f"theta_{i}{j}(x) is not in the overlap ring")
            fimg = subst(G.f, G.image, p)
            if not target.allowed_den(fimg[1]) or not target.is_unit(fimg):
                raise BadGluing(f"theta_{i}{j}(f_{i}{j}) is not a unit")
            if subst_rat(G.image, back.image, p) != var_rat():
                raise BadGluing(f"theta_{j}{i} is not inverse to theta_{i}{j}")
            certs.append({"pair": [i, j], "inverse": True, "unit": True})
        for i, j, k in self.triples():
            lhs = subst_rat(self.gluing[(i, j)].image, self.gluing[(j, k)].image, p)
            if lhs != self.gluing[(i, k)].image:
                raise BadGluing(f"cocycle fails on charts {i},{j},{k}")
            certs.append({"triple": [i, j, k], "cocycle": True})
        return certs

    def _components(self) -> list[list[int]]:
        seen, comps = set(), []
        for i in range(len(self.charts)):
            if i in seen:
                continue
            comp, stack = [], [i]
            while stack:
                a = stack.pop()
                if a in seen:
                    continue
                seen.add(a)
                comp.append(a)
                stack.extend(b for b in range(len(self.charts)) if self.glued(a, b))
            comps.append(sorted(comp))
        return comps

    def component_of(self, i: int) -> int:
        return next(n for n, c in enumerate(self.components) if i in c)

    def is_integral(self) -> bool:
        return len(self.components) == 1 and all(isinstance(R, PolyRing) for R in self.charts)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "label": self.label,
                     "charts": [R.label for R in self.charts]}
        if self.gluing:
            out["gluing"] = [{"i": i, "j": j, "f": list(G.f), "g": list(G.g),
                              "image": [list(G.image[0]), list(G.image[1])]}
                             for (i, j), G in sorted(self.gluing.items())]
        return out


def affine(R) -> GluedScheme:
    return GluedScheme([R], kind="affine", label=f"Spec {R.label}", separated=True)


def empty() -> GluedScheme:
    return GluedScheme([], kind="empty", label="empty", separated=True)


def _mu(pt, p: int) -> tuple:
    """Coordinate on the complement of pt as a fractional-linear function of t."""
    if pt == INF:
        return (1, 0, 0, 1)
    return mob_norm((0, 1, 1, -pt), p)


def _linear_form(pt, p: int) -> tuple:
    """(u, v) with u*T0 + v*T1 vanishing exactly at pt, where t = T1/T0."""
    if pt == INF:
        return (1, 0)
    return (-pt % p, 1)


def p1(q: int, cover: str = "standard") -> GluedScheme:
    """The projective line over F_q, covered by complements of rational points.

    ``standard``: two charts, t and s = 1/t.  ``rational``: the complements of
    all q + 1 rational points, a cover permuted by every automorphism.
    """
    if not is_prime(q):
        raise BadModulus("the projective line is built over prime fields only")
    p = q
    removed = [INF, 0] if cover == "standard" else [INF] + list(range(p))
    names = list(VAR_NAMES) + [f"x{i}" for i in range(len(VAR_NAMES), len(removed))]
    charts = [PolyRing(p, names[i]) for i in range(len(removed))]
    mus = [_mu(a, p) for a in removed]
    gluing = {}
    for i, a in enumerate(removed):
        for j, b in enumerate(removed):
            if i == j:
                continue
            fi = P.monic(P.sub((0, 1), (mob_point(mus[i], b, p),), p), p)
            fj = P.monic(P.sub((0, 1), (mob_point(mus[j], a, p),), p), p)
            image = mob_rat(mob_mul(mus[i], mob_inv(mus[j], p), p), p)
            gluing[(i, j)] = Glue(fi, fj, image)
    label = f"P1(GF({p}))" + ("" if cover == "standard" else f" with {len(removed)} charts")
    return GluedScheme(charts, gluing, kind="p1", label=label, separated=True,
                       p1={"p": p, "removed": removed, "mu": mus, "cover": cover})


def disjoint_union(*schemes: GluedScheme) -> GluedScheme:
    charts, gluing, offset = [], {}, 0
    for X in schemes:
        for (i, j), G in X.gluing.items():
            gluing[(i + offset, j + offset)] = G
        charts.extend(X.charts)
        offset += len(X.charts)
    return GluedScheme(charts, gluing, kind="disjoint", separated=all(X.separated for X in schemes),
                       label=" + ".join(X.label for X in schemes) or "empty")


def build_scheme(descriptor) -> GluedScheme:
    """Schemes from JSON descriptors or shorthand (p1:q, p1:q:rational, affine:<ring>, empty)."""
    if isinstance(descriptor, str):
        text = descriptor.strip()
        if text == "empty":
            return empty()
        if text.startswith("p1:"):
            parts = text.split(":")
            return p1(int(parts[1]), parts[2] if len(parts) > 2 else "standard")
        if text.startswith("affine:"):
            return affine(parse_shorthand(text[len("affine:"):]))
        from .errors import ParseError
        raise ParseError(f"unknown scheme shorthand {descriptor!r}")
    kind = descriptor.get("kind")
    if kind == "empty":
        return empty()
    if kind == "affine":
        return affine(make_ring(descriptor["ring"]))
    if kind == "p1":
        return p1(int(descriptor["q"]), descriptor.get("cover", "standard"))
    if kind == "disjoint":
        return disjoint_union(*[build_scheme(d) for d in descriptor["parts"]])
    if kind == "glued":
        # charts are polynomial ring descriptors, or bare {"var": ...} with a shared "p"
        charts = []
        for n, c in enumerate(descriptor["charts"]):
            var = c.get("var", VAR_NAMES[n % len(VAR_NAMES)])
            if "p" in descriptor:
                charts.append(PolyRing(int(descriptor["p"]), var))
            else:
                R = make_ring(dict(c, var=var))
                if not isinstance(R, PolyRing):
                    raise BadGluing("glued charts must be polynomial rings")
                charts.append(R)
        if not charts:
            return empty()
        p = charts[0].p
        gluing = {}
        for g in descriptor["gluing"]:
            num, den = g["image"]
            gluing[(g["i"], g["j"])] = Glue(P.monic(tuple(g["f"]), p), P.monic(tuple(g["g"]), p),
                                            rat(tuple(num), tuple(den), p))
        return GluedScheme(charts, gluing, kind="glued", label=descriptor.get("label", "glued"),
                           separated=bool(descriptor.get("separated", False)))
    from .errors import ParseError
    raise ParseError(f"unknown scheme kind {kind!r}")


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True, eq=False)
class SchemePoint:
    owner: int
    prime: Any            # polynomial in the owner's variable (() = generic) or a PrimeIdeal
    ideals: tuple         # J_x per chart: polynomial, or an Ideal for finite charts
    label: str
    degree: int           # residue degree over the prime field (0 for a generic point)

    def key(self):
        if isinstance(self.prime, PrimeIdeal):
            return (self.owner, self.prime.ideal.basis)
        return (self.owner, self.prime)

    def __eq__(self, other):
        return isinstance(other, SchemePoint) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def is_generic(self) -> bool:
        return not isinstance(self.prime, PrimeIdeal) and self.prime == P.ZERO

    def to_json(self) -> dict:
        return {"label": self.label, "chart": self.owner, "degree": self.degree}


def transport(X: GluedScheme, i: int, g: P.Poly, j: int) -> P.Poly:
    """Generator in chart j of the ideal cut out by the prime (g) of chart i."""
    if i == j:
        return g
    if not X.glued(i, j):
        return (1,)
    if g == P.ZERO:
        return P.ZERO
    num = X.theta(i, j, (g, (1,)))[0]
    h = X.overlap(j, i).strip(num)
    return h if P.deg(h) > 0 else (1,)


def _point_label(X: GluedScheme, owner: int, text: str) -> str:
    if len(X.components) > 1:
        return f"{X.component_of(owner)}:{text}"
    return text


def points(X: GluedScheme, degree_bound: int | None = None) -> list[SchemePoint]:
    """Window of points, each stored once in the least chart that contains it."""
    out = []
    n = len(X.charts)
    for i, R in enumerate(X.charts):
        if isinstance(R, FiniteRing):
            _, primes = enumerate_ideals_primes(R)
            for q in primes:
                ideals = tuple(q.ideal if j == i else None for j in range(n))
                out.append(SchemePoint(i, q, ideals, _point_label(X, i, q.label()), -1))
            continue
        if degree_bound is None:
            raise NeedsBound(f"chart {i} is infinite: a degree bound is required")
        p = R.p
        earlier = [j for j in range(i) if X.glued(i, j)]
        if not earlier:
            ideals = tuple(P.ZERO if (j == i or X.glued(i, j)) else (1,) for j in range(n))
            out.append(SchemePoint(i, P.ZERO, ideals, _point_label(X, i, "(0)"), 0))
        for g in P.irreducibles_up_to(degree_bound, p):
            if any(P.deg(transport(X, i, g, j)) > 0 for j in earlier):
                continue
            ideals = tuple(transport(X, i, g, j) for j in range(n))
            out.append(SchemePoint(i, g, ideals, _point_label(X, i, "(" + P.fmt(g, R.var) + ")"), P.deg(g)))
    return out


def contains_ideal(X: GluedScheme, j: int, I, J) -> bool:
    """I inside J for chart-j ideals."""
    if isinstance(X.charts[j], FiniteRing):
        R = X.charts[j]
        I = R.unit_ideal() if I is None else I
        J = R.unit_ideal() if J is None else J
        return I.issubset(J)
    return P.divides(J, I, X.p) if J else I == P.ZERO


def in_closure(X: GluedScheme, y: SchemePoint, x: SchemePoint) -> bool:
    """y in the closure of x: J_x inside J_y where y lives."""
    j = y.owner
    return contains_ideal(X, j, _prime_of(x, j), _prime_of(y, j))


def _prime_of(x: SchemePoint, j: int):
    J = x.ideals[j]
    if isinstance(J, PrimeIdeal):
        return J.ideal
    return J


# ---------------------------------------------------------------------------
# chart modules over polynomial charts


class Presented:
    """R^g modulo the row span of ``rels``, over a polynomial chart ring."""

    def __init__(self, ring: PolyRing, g: int, rels: Sequence[Sequence] = ()):
        self.ring, self.g = ring, g
        p = ring.p
        rows = []
        for r in rels:
            r = tuple(P.trim(x, p) for x in r)
            if len(r) != g:
                raise ValueError(f"relation of length {len(r)}, expected {g}")
            if any(r):
                rows.append(r)
        self.rels = tuple(rows)

    def __repr__(self):
        return f"<Presented {self.pid.describe()} over {self.ring.label}>"

    @cached_property
    def smith(self) -> tuple[list, list, list]:
        """(diagonal, V, Vinv) with rels * V spanning the diagonal relations."""
        ops = S.poly_ops(self.ring.p)
        if not self.rels or not self.g:
            I = S.identity(self.g, ops)
            return [P.ZERO] * self.g, I, [row[:] for row in I]
        _, D, V, _, Vinv = S.smith([list(r) for r in self.rels], self.g, ops)
        diag = [D[i][i] if i < len(D) else P.ZERO for i in range(self.g)]
        return diag, V, Vinv

    @cached_property
    def pid(self) -> PidModule:
        return present_pid_module(self.ring, self.g, self.rels)

    def is_zero(self) -> bool:
        return self.pid.is_zero()

    def _slots(self, vec: Sequence[Rat], loc) -> list[tuple[P.Poly, P.Poly | None]]:
        """Smith coordinates of vec (scaled by a unit) with the modulus per slot."""
        p = self.ring.p
        L: P.Poly = (1,)
        for _, d in vec:
            L = _lcm(L, d, p)
        if loc is not None and not loc.allowed_den(L):
            raise IncompatibleTransitions(f"denominator {P.fmt(L, self.ring.var)} not invertible")
        if loc is None and P.deg(L) > 0:
            raise IncompatibleTransitions("fraction outside the chart ring")
        w = [P.mul(n, P.divmod_poly(L, d, p)[0], p) for n, d in vec]
        diag, V, _ = self.smith
        y = [P.ZERO] * self.g
        for k, wk in enumerate(w):
            if wk:
                for i in range(self.g):
                    y[i] = P.add(y[i], P.mul(wk, V[k][i], p), p)
        out = []
        for i, d in enumerate(diag):
            if not d:
                out.append((y[i], None))
            else:
                dd = loc.strip(d) if loc is not None else P.monic(d, p)
                out.append((P.rem(y[i], dd, p) if P.deg(dd) > 0 else P.ZERO, dd))
        return out

    def in_span(self, vec: Sequence[Rat], loc=None) -> bool:
        """vec lies in the relation span after inverting loc's element."""
        return all(not r for r, _ in self._slots(vec, loc))


def _is_zero_chart(M) -> bool:
    return M.size == 1 if isinstance(M, FGModule) else M.is_zero()


def _chart_pid(M):
    return M.pid if isinstance(M, Presented) else M


def _gens(M) -> int:
    return M.g


# ---------------------------------------------------------------------------
# sheaves


class QcohSheaf:
    """Chart modules with transition matrices over the overlap rings."""

    def __init__(self, X: GluedScheme, modules: Sequence, transitions: dict | None = None,
                 label: str | None = None, point: SchemePoint | None = None, check: bool = True):
        self.X = X
        self.modules = list(modules)
        self.trans = {k: tuple(tuple(e for e in row) for row in T) for k, T in (transitions or {}).items()}
        self.label = label or "sheaf"
        self.point = point
        if len(self.modules) != len(X.charts):
            raise IncompatibleTransitions("one module per chart is required")
        self.certificates = self._verify() if check else []

    def __repr__(self):
        return f"<QcohSheaf {self.label} on {self.X.label}>"

    def push(self, i: int, j: int, vec: Sequence[Rat]) -> list[Rat]:
        """Image of a section of (M_i)_{f_ij} in (M_j)_{f_ji}."""
        p = self.X.p
        T = self.trans[(i, j)]
        out = [ZERO] * self.modules[j].g
        for k, a in enumerate(vec):
            if not a[0]:
                continue
            ta = self.X.theta(i, j, a)
            for l in range(len(out)):
                out[l] = r_add(out[l], r_mul(ta, T[k][l], p), p)
        return out

    def _verify(self) -> list[dict]:
        X, p = self.X, self.X.p
        certs = []
        for (i, j) in X.gluing:
            if (i, j) not in self.trans:
                raise IncompatibleTransitions(f"missing transition {i}->{j}")
            Mi, Mj, T = self.modules[i], self.modules[j], self.trans[(i, j)]
            if len(T) != Mi.g or any(len(row) != Mj.g for row in T):
                raise IncompatibleTransitions(f"transition {i}->{j} has the wrong shape")
            lj, li = X.overlap(j, i), X.overlap(i, j)
            for rel in Mi.rels:
                if not Mj.in_span(self.push(i, j, [(x, (1,)) for x in rel]), lj):
                    raise IncompatibleTransitions(f"transition {i}->{j} does not respect relations")
            for k in range(Mi.g):
                e = [ONE if m == k else ZERO for m in range(Mi.g)]
                back = self.push(j, i, self.push(i, j, e))
                if not Mi.in_span([r_sub(b, a, p) for a, b in zip(e, back)], li):
                    raise IncompatibleTransitions(f"transitions {i}<->{j} are not inverse")
            certs.append({"pair": [i, j], "well_defined": True, "invertible": True})
        for i, j, k in X.triples():
            ring = X.triple_ring(k, i, j)
            Mi = self.modules[i]
            for l in range(Mi.g):
                e = [ONE if m == l else ZERO for m in range(Mi.g)]
                a = self.push(j, k, self.push(i, j, e))
                b = self.push(i, k, e)
                if not self.modules[k].in_span([r_sub(x, y, p) for x, y in zip(a, b)], ring):
                    raise IncompatibleTransitions(f"transition cocycle fails on {i},{j},{k}")
            certs.append({"triple": [i, j, k], "cocycle": True})
        return certs

    def is_zero(self) -> bool:
        return all(_is_zero_chart(M) for M in self.modules)

    def describe(self) -> list[str]:
        return [(_chart_pid(M).describe() if isinstance(M, Presented) else M.label) for M in self.modules]

    def to_json(self) -> dict:
        mods = []
        for M in self.modules:
            if isinstance(M, Presented):
                mods.append({"g": M.g, "relations": [[list(x) for x in r] for r in M.rels]})
            else:
                mods.append(M.to_json())
        return {"label": self.label, "modules": mods,
                "transitions": [{"i": i, "j": j, "matrix": [[[list(e[0]), list(e[1])] for e in row]
                                                             for row in T]}
                                for (i, j), T in sorted(self.trans.items())]}


def _same_scheme(*sheaves: QcohSheaf) -> GluedScheme:
    X = sheaves[0].X
    if any(M.X is not X for M in sheaves):
        raise MixedSchemes("sheaves on different schemes")
    return X


def _identity_trans(X: GluedScheme, dims: Sequence[int]) -> dict:
    return {(i, j): tuple(tuple(ONE if a == b else ZERO for b in range(dims[j])) for a in range(dims[i]))
            for (i, j) in X.gluing}


def structure_sheaf(X: GluedScheme) -> QcohSheaf:
    mods = [Presented(R, 1) if isinstance(R, PolyRing) else free(R, 1) for R in X.charts]
    return QcohSheaf(X, mods, _identity_trans(X, [1] * len(mods)), label="O")


def ideal_quotient(X: GluedScheme, gens: Sequence, label: str | None = None) -> QcohSheaf:
    """O/I for an ideal sheaf given by one generator per chart (an Ideal on finite charts)."""
    mods = []
    for R, g in zip(X.charts, gens):
        if isinstance(R, FiniteRing):
            mods.append(cyclic(R, g if g is not None else R.unit_ideal()))
        elif g == (1,) or (g and P.deg(g) == 0):
            mods.append(Presented(R, 0))
        else:
            mods.append(Presented(R, 1, [[g]] if g else []))
    dims = [M.g for M in mods]
    trans = {(i, j): tuple(tuple(ONE if dims[j] else ZERO for _ in range(dims[j])) for _ in range(dims[i]))
             for (i, j) in X.gluing}
    return QcohSheaf(X, mods, trans, label=label or "O/I")


def skyscraper(X: GluedScheme, x: SchemePoint) -> QcohSheaf:
    gens = [(J.ideal if isinstance(J, PrimeIdeal) else J) for J in x.ideals]
    S_ = ideal_quotient(X, gens, label=f"O/J{x.label}")
    S_.point = x
    return S_


def vanishing_ideal(X: GluedScheme, x: SchemePoint) -> list:
    return [(J.ideal if isinstance(J, PrimeIdeal) else J) for J in x.ideals]


def _block(A, B, ga, gb, ha, hb):
    rows = [tuple(A[k]) + (ZERO,) * hb for k in range(ga)]
    rows += [(ZERO,) * ha + tuple(B[k]) for k in range(gb)]
    return tuple(rows)


def direct_sum(M: QcohSheaf, N: QcohSheaf) -> QcohSheaf:
    X = _same_scheme(M, N)
    mods = []
    for A, B in zip(M.modules, N.modules):
        if isinstance(A, FGModule):
            mods.append(fg_direct_sum(A, B))
        else:
            rels = [tuple(r) + (P.ZERO,) * B.g for r in A.rels] + [(P.ZERO,) * A.g + tuple(r) for r in B.rels]
            mods.append(Presented(A.ring, A.g + B.g, rels))
    trans = {(i, j): _block(M.trans[(i, j)], N.trans[(i, j)], M.modules[i].g, N.modules[i].g,
                            M.modules[j].g, N.modules[j].g) for (i, j) in X.gluing}
    return QcohSheaf(X, mods, trans, label=f"{M.label} + {N.label}")


def tensor(M: QcohSheaf, N: QcohSheaf) -> QcohSheaf:
    X = _same_scheme(M, N)
    p = X.p
    mods = []
    for A, B in zip(M.modules, N.modules):
        if not isinstance(A, Presented):
            raise TypeError("tensor products are implemented on polynomial charts")
        g = A.g * B.g
        rels = []
        for r in A.rels:
            for l in range(B.g):
                rels.append(tuple(r[k] if m == l else P.ZERO for k in range(A.g) for m in range(B.g)))
        for r in B.rels:
            for k in range(A.g):
                rels.append(tuple(r[m] if kk == k else P.ZERO for kk in range(A.g) for m in range(B.g)))
        mods.append(Presented(A.ring, g, rels))
    trans = {}
    for (i, j) in X.gluing:
        T, U = M.trans[(i, j)], N.trans[(i, j)]
        rows = []
        for a in range(M.modules[i].g):
            for b in range(N.modules[i].g):
                rows.append(tuple(r_mul(T[a][c], U[b][d], p)
                                  for c in range(M.modules[j].g) for d in range(N.modules[j].g)))
        trans[(i, j)] = tuple(rows)
    return QcohSheaf(X, mods, trans, label=f"{M.label} (x) {N.label}")


def is_line_bundle(L: QcohSheaf) -> bool:
    return all(isinstance(A, Presented) and A.g == 1 and not A.rels for A in L.modules)


def dual(L: QcohSheaf) -> QcohSheaf:
    """Inverse of a line bundle presented on one free generator per chart."""
    if not is_line_bundle(L):
        raise NotInvertible("dual is defined here for line bundles on one free generator")
    p = L.X.p
    trans = {k: ((r_inv(T[0][0], p),),) for k, T in L.trans.items()}
    return QcohSheaf(L.X, L.modules, trans, label=f"{L.label}^-1")


def line_ratio(X: GluedScheme, a: int, b: int) -> Rat:
    """l_a / l_b as a fraction in the variable of chart b (l_c the form vanishing at c's removed point)."""
    p = X.p
    ra, rb = X.p1["removed"][a], X.p1["removed"][b]
    (ua, va), (ub, vb) = _linear_form(ra, p), _linear_form(rb, p)
    in_t = rat((ua, va), (ub, vb), p)
    return subst_rat(in_t, mob_rat(mob_inv(X.p1["mu"][b], p), p), p)


def twist(X: GluedScheme, n: int) -> QcohSheaf:
    """O(n) on a projective-line model; on the standard cover tau_01 = s^n."""
    if X.p1 is None:
        raise TypeError("twists O(n) are defined on projective-line models")
    p = X.p
    mods = [Presented(R, 1) for R in X.charts]
    trans = {(a, b): ((r_pow(line_ratio(X, a, b), n, p),),) for (a, b) in X.gluing}
    return QcohSheaf(X, mods, trans, label=f"O({n})")


def sub(M: QcohSheaf, gens: Sequence[Sequence[Sequence]]) -> QcohSheaf:
    """Subsheaf generated chartwise; the transitions are solved for and must exist."""
    X = M.X
    p = X.p
    mods = []
    for A, G in zip(M.modules, gens):
        if isinstance(A, FGModule):
            sm = A.submodule([tuple(v) for v in G])
            mods.append(sm.as_module()[0])
            continue
        G = [tuple(P.trim(x, p) for x in v) for v in G]
        stacked = [list(v) for v in G] + [list(r) for r in A.rels]
        if stacked:
            ker = S.left_kernel(stacked, A.g, S.poly_ops(p))
            rels = [tuple(row[:len(G)]) for row in ker]
        else:
            rels = []
        mods.append(Presented(A.ring, len(G), rels))
    trans = {}
    for (i, j) in X.gluing:
        rows = []
        for v in gens[i]:
            w = M.push(i, j, [(P.trim(x, p), (1,)) for x in v])
            c = _solve(M.modules[j], [tuple(P.trim(x, p) for x in u) for u in gens[j]], w, X.overlap(j, i))
            if c is None:
                raise IncompatibleTransitions(f"subsheaf generators are not compatible on {i}->{j}")
            rows.append(tuple(c))
        trans[(i, j)] = tuple(rows)
    return QcohSheaf(X, mods, trans, label=f"sub({M.label})")


def _solve(A: Presented, gens: Sequence[Sequence[P.Poly]], target: Sequence[Rat], loc) -> list[Rat] | None:
    """Coefficients c with sum c_l gens_l = target modulo rels, over loc."""
    p = A.ring.p
    m = len(gens)
    rows = [list(v) for v in gens] + [list(r) for r in A.rels]
    if not rows:
        return [] if all(not t[0] for t in target) else None
    L: P.Poly = (1,)
    for _, d in target:
        L = _lcm(L, d, p)
    w = [P.mul(n, P.divmod_poly(L, d, p)[0], p) for n, d in target]
    ops = S.poly_ops(p)
    U, D, V, _, _ = S.smith(rows, A.g, ops)
    y = [P.ZERO] * A.g
    for k in range(A.g):
        for i in range(A.g):
            y[i] = P.add(y[i], P.mul(w[k], V[k][i], p), p)
    z = []
    for i in range(len(rows)):
        d = D[i][i] if i < A.g else P.ZERO
        yi = y[i] if i < A.g else P.ZERO
        if not d:
            if yi:
                return None
            z.append(ZERO)
            continue
        dd = loc.strip(d)
        if P.deg(dd) > 0 and P.rem(yi, dd, p):
            return None
        z.append(rat(yi, d, p))
    for i in range(len(rows), A.g):
        if y[i]:
            return None
    inv_L = rat((1,), L, p)
    coeffs = []
    for l in range(m):
        c = ZERO
        for i in range(len(rows)):
            c = r_add(c, r_mul(z[i], (U[i][l], (1,)), p), p)
        coeffs.append(r_mul(c, inv_L, p))
    return coeffs


def quotient(M: QcohSheaf, gens: Sequence[Sequence[Sequence]]) -> QcohSheaf:
    """M modulo the subsheaf generated chartwise by gens (checked compatible)."""
    sub(M, gens)
    mods = []
    for A, G in zip(M.modules, gens):
        if isinstance(A, FGModule):
            from .modules import quotient as fg_quotient
            mods.append(fg_quotient(A, A.submodule([tuple(v) for v in G])))
        else:
            mods.append(Presented(A.ring, A.g, list(A.rels) + [tuple(v) for v in G]))
    return QcohSheaf(M.X, mods, M.trans, label=f"{M.label}/sub")


@dataclass
class SheafMap:
    source: QcohSheaf
    target: QcohSheaf
    mats: list            # per chart: g_source rows of g_target polynomials

    def __post_init__(self):
        X = _same_scheme(self.source, self.target)
        p = X.p
        for (i, j) in X.gluing:
            loc = X.overlap(j, i)
            Mi = self.source.modules[i]
            for k in range(Mi.g):
                e = [ONE if m == k else ZERO for m in range(Mi.g)]
                a = self.target.push(i, j, [(x, (1,)) for x in self.mats[i][k]])
                b = _apply_mat(self.mats[j], self.source.push(i, j, e), p)
                if not self.target.modules[j].in_span([r_sub(x, y, p) for x, y in zip(a, b)], loc):
                    raise IncompatibleTransitions(f"map does not commute with transitions {i}->{j}")


def _apply_mat(mat, vec: Sequence[Rat], p: int) -> list[Rat]:
    n = len(mat[0]) if mat else 0
    out = [ZERO] * n
    for k, a in enumerate(vec):
        for l in range(n):
            out[l] = r_add(out[l], r_mul(a, (P.trim(mat[k][l], p), (1,)), p), p)
    return out


def cokernel(f: SheafMap) -> QcohSheaf:
    return quotient(f.target, [[tuple(r) for r in m] for m in f.mats])


def kernel(f: SheafMap) -> QcohSheaf:
    X = f.source.X
    p = X.p
    gens = []
    for A, B, m in zip(f.source.modules, f.target.modules, f.mats):
        stacked = [list(r) for r in m] + [list(r) for r in B.rels]
        ker = S.left_kernel(stacked, B.g, S.poly_ops(p)) if stacked else []
        gens.append([tuple(row[:A.g]) for row in ker])
    return sub(f.source, gens)


# ---------------------------------------------------------------------------
# global sections


@dataclass
class Sections:
    dimension: int | None          # over the prime field; None when infinite
    basis: list                    # glued components: per basis section, chart vectors
    modules: list                  # components with a single chart: the module itself
    degree: int | None
    stable: bool

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "degree": self.degree, "stable": self.stable,
                "modules": [(_chart_pid(M).describe() if isinstance(M, Presented) else M.label)
                            for M in self.modules]}


def _default_degree(M: QcohSheaf, comp: Sequence[int]) -> int:
    D = 0
    for (i, j), T in M.trans.items():
        if i in comp:
            for row in T:
                for e in row:
                    if e[0]:
                        D = max(D, P.deg(e[0]) - P.deg(e[1]))
    return D


def _solve_sections(M: QcohSheaf, comp: Sequence[int], D: int) -> list:
    X, p = M.X, M.X.p
    unknowns = []
    for a in comp:
        A = M.modules[a]
        diag, _, Vinv = A.smith
        for i, d in enumerate(diag):
            top = D + 1 if not d else P.deg(d)
            for e in range(top):
                mono = tuple([0] * e + [1])
                unknowns.append((a, [P.mul(mono, x, p) for x in Vinv[i]]))
    if not unknowns:
        return []
    columns: list[list[int]] = [[] for _ in unknowns]
    for a in comp:
        for b in comp:
            if a >= b or not X.glued(a, b):
                continue
            loc = X.overlap(b, a)
            Bm = M.modules[b]
            imgs = []
            for c, vec in unknowns:
                if c == a:
                    imgs.append(M.push(a, b, [(x, (1,)) for x in vec]))
                elif c == b:
                    imgs.append([r_neg((x, (1,)), p) for x in vec])
                else:
                    imgs.append([ZERO] * Bm.g)
            L: P.Poly = (1,)
            for w in imgs:
                for _, d in w:
                    L = _lcm(L, d, p)
            scaled = [[(P.mul(n, P.divmod_poly(L, d, p)[0], p), (1,)) for n, d in w] for w in imgs]
            slots = [Bm._slots(w, loc) for w in scaled]
            for s in range(Bm.g):
                width = max(len(sl[s][0]) for sl in slots)
                for u, sl in enumerate(slots):
                    r = sl[s][0]
                    columns[u].extend(list(r) + [0] * (width - len(r)))
    ncols = len(columns[0])
    k = len(unknowns)
    pairs = [(col, [1 if m == u else 0 for m in range(k)]) for u, col in enumerate(columns)]
    ker = H.kernel(pairs, p, ncols, k)
    out = []
    for row in ker:
        sec = {a: [P.ZERO] * M.modules[a].g for a in comp}
        for u, c in enumerate(row):
            if c:
                a, vec = unknowns[u]
                sec[a] = [P.add(x, P.scale(y, c, p), p) for x, y in zip(sec[a], vec)]
        out.append(sec)
    return out


def global_sections(M: QcohSheaf, degree: int | None = None) -> Sections:
    """Equalizer of the chart modules over the overlaps.

    On a glued component the sections are polynomial in every chart; they are
    searched up to degree D in the free Smith coordinates (torsion coordinates
    are finite), and D is raised until two successive truncations agree.
    """
    X = M.X
    modules, basis, dim, stable, used = [], [], 0, True, None
    for comp in X.components:
        if len(comp) == 1 and not X.glued(comp[0], comp[0]):
            A = M.modules[comp[0]]
            modules.append(A)
            if isinstance(A, Presented):
                dim = None if (A.pid.rank or dim is None) else dim
                if dim is not None:
                    dim += sum(P.deg(d) for d in A.pid.factors)
            else:
                dim = None
            continue
        D = degree if degree is not None else _default_degree(M, comp)
        secs = _solve_sections(M, comp, D)
        more = _solve_sections(M, comp, D + 2)
        tries = 0
        while len(more) != len(secs) and tries < 10:
            D += 2
            secs, more = more, _solve_sections(M, comp, D + 2)
            tries += 1
        stable &= len(more) == len(secs)
        used = D if used is None else max(used, D)
        basis.extend(secs)
        if dim is not None:
            dim += len(secs)
    return Sections(dim, basis, modules, used, stable)


def line_degree(L: QcohSheaf) -> int:
    """Degree of a line bundle on a projective-line model, read off h0."""
    h = global_sections(L).dimension
    if h:
        return h - 1
    return -(global_sections(dual(L)).dimension - 1)


def line_iso(L: QcohSheaf, M: QcohSheaf) -> bool:
    """L = M iff L (x) M^-1 and its inverse both have a one-dimensional space of sections."""
    T = tensor(L, dual(M))
    return global_sections(T).dimension == 1 and global_sections(dual(T)).dimension == 1


# ---------------------------------------------------------------------------
# invariants


def in_support(M: QcohSheaf, x: SchemePoint) -> bool:
    A = M.modules[x.owner]
    if isinstance(A, FGModule):
        return bool(fg_support(A, [x.prime]))
    return support_contains(A.pid, PidIdeal(A.ring, x.prime))


def sheaf_invariants(M: QcohSheaf, request: str, degree_bound: int | None = None,
                     window: Sequence[SchemePoint] | None = None):
    X = M.X
    if request == "support":
        pts = window if window is not None else points(X, degree_bound)
        return [x for x in pts if in_support(M, x)]
    if request == "annihilator":
        gens = []
        for A in M.modules:
            gens.append(fg_annihilator(A) if isinstance(A, FGModule) else pid_annihilator(A.pid).gen)
        ok = True
        for (i, j) in X.gluing:
            loc = X.overlap(j, i)
            a = loc.strip(X.theta(i, j, (gens[i], (1,)))[0]) if gens[i] else P.ZERO
            b = loc.strip(gens[j]) if gens[j] else P.ZERO
            ok &= a == b
        return {"generators": gens, "quasi_coherent": ok}
    if request == "torsion":
        for R in X.charts:
            if not getattr(R, "is_domain", False):
                raise NotIntegral(f"{R.label} is not a domain")
        gens = []
        for A in M.modules:
            diag, _, Vinv = A.smith
            gens.append([tuple(Vinv[i]) for i, d in enumerate(diag) if d])
        return sub(M, gens)
    raise ValueError(f"unknown request {request!r}")


def is_torsion_free(M: QcohSheaf) -> bool:
    return all(isinstance(A, Presented) and not A.pid.factors for A in M.modules)


# ---------------------------------------------------------------------------
# the preorder on sheaves


def _chart_precedes(A, B) -> PrecedesVerdict:
    if isinstance(A, Presented):
        return precedes_pid(A.pid, B.pid)
    return precedes(A, B)


def precedes_sheaf(M: QcohSheaf, N: QcohSheaf, bound: int | None = None) -> PrecedesVerdict:
    """Layered decision of M < N: support criterion, chartwise obstructions, generic reduction."""
    X = _same_scheme(M, N)
    if M.is_zero():
        return PrecedesVerdict(YES, witness={"construction": "zero sheaf"}, route="zero")
    if N.is_zero():
        return PrecedesVerdict(NO, certificate={"kind": "ZeroTarget"}, route="zero")
    if M.point is not None:
        x = M.point
        inside = in_support(N, x)
        return PrecedesVerdict(YES if inside else NO, route="suppsch",
                               witness={"point": x.label, "in_support": True} if inside else None,
                               certificate=None if inside else {"kind": "SupportMiss", "point": x.label})
    charts = []
    for i, (A, B) in enumerate(zip(M.modules, N.modules)):
        v = _chart_precedes(A, B)
        if v.outcome == NO:
            return PrecedesVerdict(NO, route="chart",
                                   certificate={"kind": "ChartObstruction", "chart": i, "verdict": v.to_json()})
        charts.append(v)
    if X.is_integral() and is_torsion_free(M):
        generic = next(x for x in points(X, 0) if x.is_generic)
        inside = in_support(N, generic)
        return PrecedesVerdict(YES if inside else NO, route="toreq",
                               witness={"reduction": "torsion-free sheaf equivalent to O", "point": generic.label}
                               if inside else None,
                               certificate=None if inside else {"kind": "SupportMiss", "point": generic.label})
    if all(v.outcome == YES for v in charts):
        if X.separated:
            return PrecedesVerdict(YES, route="chartwise",
                                   witness={"construction": "chartwise", "charts": [v.to_json() for v in charts]})
        return PrecedesVerdict(UNKNOWN, route="chartwise", notes="charts agree but the scheme is not known separated")
    return PrecedesVerdict(UNKNOWN, route="chartwise")


def equivalent_sheaf(M: QcohSheaf, N: QcohSheaf, bound: int | None = None) -> bool | None:
    a, b = precedes_sheaf(M, N, bound), precedes_sheaf(N, M, bound)
    if a.outcome == NO or b.outcome == NO:
        return False
    if a.outcome == YES and b.outcome == YES:
        return True
    return None


# ---------------------------------------------------------------------------
# centers of module categories over polynomial charts (sampled)


def pid_center(R: PolyRing, degree: int = 2) -> dict:
    """Z(Mod R) = R on a sampled family of cyclic modules.

    A natural endomorphism of the identity is fixed by its value c at R
    (Yoneda: every R/(a) is a quotient of R via 1 -> 1), multiplication by c
    is natural along every generator of Hom(R/(a), R/(b)), and c -> eta_c is
    an injective ring map.
    """
    p = R.p
    mods = sorted({P.ZERO} | {P.monic(a, p) for a in R.sample(degree) if a and P.deg(a) > 0},
                  key=lambda a: (len(a), a))
    samples = R.sample(degree)

    def red(c, b):
        return P.rem(c, b, p) if b else c

    natural, checked = True, 0
    for a in mods:
        for b in mods:
            if not a:
                u = (1,)
            elif not b:
                continue
            else:
                g = P.gcd(a, b, p)
                if P.deg(g) == 0:
                    continue
                u = P.divmod_poly(b, g, p)[0]
            for c in samples:
                lhs = red(P.mul(c, u, p), b)                 # eta at the target, after h
                rhs = red(P.mul(red(c, a), u, p), b)         # h after eta at the source
                natural &= lhs == rhs
                checked += 1
    injective = len({tuple(c) for c in samples}) == len(samples)
    ring_hom = all(red(P.mul(c, d, p), a) == red(P.mul(red(c, a), red(d, a), p), a)
                   for c in samples[:8] for d in samples[:8] for a in mods[:6])
    return {"open": None, "ring": R.label, "family": len(mods), "naturality_checks": checked,
            "natural": natural, "evaluation_injective": injective, "ring_hom": ring_hom,
            "ok": natural and injective and ring_hom}


def _residue(R: LocalizedPolyRing, c, b: P.Poly) -> P.Poly:
    """c = num/den in R/(b), with b free of inverted primes."""
    p = R.p
    n, d = c
    if not b:
        return n
    g, s, _ = P.xgcd(d, b, p)
    return P.rem(P.mul(n, P.scale(s, pow(g[0], -1, p), p), p), b, p)


def overlap_check(X: GluedScheme, i: int, j: int, bound: int = 3) -> dict:
    """theta_ij is a ring isomorphism of the overlap rings; sections multiply onto the overlap."""
    p = X.p
    src, tgt = X.overlap(i, j), X.overlap(j, i)
    x = var_rat()
    inv_f = rat((1,), X.gluing[(i, j)].f, p)
    gens_ok = all(X.theta(j, i, X.theta(i, j, a)) == a for a in (x, inv_f))
    samples = [src.elem(a) for a in src.sample(2)]
    hom_ok = all(X.theta(i, j, r_mul(a, b, p)) == r_mul(X.theta(i, j, a), X.theta(i, j, b), p)
                 and X.theta(i, j, r_add(a, b, p)) == r_add(X.theta(i, j, a), X.theta(i, j, b), p)
                 for a in samples[:10] for b in samples[:10])
    lands = all(tgt.allowed_den(X.theta(i, j, a)[1]) for a in samples)
    # every fraction x_i^k with |k| <= bound is a chart-i section times the image of a chart-j section
    fi = X.gluing[(i, j)].f
    reach = True
    for k in range(-bound, bound + 1):
        want = r_pow((fi, (1,)), k, p) if k < 0 else r_pow(x, k, p)
        found = False
        for e in range(0, bound + 1):
            cand = X.theta(j, i, r_pow((X.gluing[(j, i)].f, (1,)), e, p))
            for a in PolyRing.sample(X.charts[i], bound):
                if r_mul((a, (1,)), cand, p) == want:
                    found = True
                    break
            if found:
                break
        reach &= found
    return {"open": f"chart {i} & chart {j}", "ring": src.label, "image_ring": tgt.label,
            "inverse_on_generators": gens_ok, "ring_hom": hom_ok, "lands_in_overlap": lands,
            "sections_span": reach, "ok": gens_ok and hom_ok and lands and reach}


# ---------------------------------------------------------------------------
# reconstruction


def _ring_name(S_: FiniteRing) -> str:
    return f"Z/{S_.size}" if S_.k == 1 else S_.label


def _point_records(X: GluedScheme, pts: Sequence[SchemePoint]) -> tuple[list[dict], dict]:
    sky = {x: skyscraper(X, x) for x in pts}
    records = []
    for x in pts:
        S_ = sky[x]
        spectral, ann_ok, domain = True, True, True
        for j, A in enumerate(S_.modules):
            if _is_zero_chart(A):
                continue
            v = is_spectral(_chart_pid(A))
            spectral &= v.outcome == YES
            J = _prime_of(x, j)
            if isinstance(A, FGModule):
                ann_ok &= fg_annihilator(A).basis == J.basis
                domain &= is_prime_ideal(J)
            else:
                ann_ok &= pid_annihilator(A.pid).gen == J
                domain &= J == P.ZERO or P.is_irreducible(J, X.p)
        supp = [y for y in pts if in_support(S_, y)]
        closure = [y for y in pts if in_closure(X, y, x)]
        generic_ok = x in supp and all(in_closure(X, y, x) for y in supp)
        records.append({"point": x.label, "chart": x.owner, "degree": x.degree,
                        "spectral_chartwise": spectral, "support_is_closure": supp == closure,
                        "generic_point": generic_ok, "annihilator_is_J": ann_ok,
                        "torsion_free_pullback": domain,
                        "ok": spectral and supp == closure and generic_ok and ann_ok and domain})
    order_bad, equiv_bad = [], []
    for x in pts:
        for y in pts:
            v = precedes_sheaf(sky[x], sky[y])
            want = in_closure(X, x, y)
            if (v.outcome == YES) != want or v.outcome == UNKNOWN:
                order_bad.append([x.label, y.label])
            if x != y and v.outcome == YES and precedes_sheaf(sky[y], sky[x]).outcome == YES:
                equiv_bad.append([x.label, y.label])
    bij = {"pairs": len(pts) ** 2, "order_mismatches": order_bad, "identified_distinct": equiv_bad,
           "ok": not order_bad and not equiv_bad}
    return records, bij


def _ideal_family(X: GluedScheme, pts: Sequence[SchemePoint]) -> list[tuple[str, list]]:
    n = len(X.charts)
    fam = [("(0)", [P.ZERO if isinstance(R, PolyRing) else R.zero_ideal() for R in X.charts]),
           ("(1)", [(1,) if isinstance(R, PolyRing) else R.unit_ideal() for R in X.charts])]
    closed = [x for x in pts if not x.is_generic]
    for size in (1, 2):
        for combo in itertools.combinations(closed, size):
            gens = []
            for j in range(n):
                g = (1,)
                for x in combo:
                    g = P.mul(g, _prime_of(x, j), X.p)
                gens.append(g)
            fam.append(("J" + "J".join(x.label for x in combo), gens))
    return fam


def _topology_records(X: GluedScheme, pts: Sequence[SchemePoint]) -> dict:
    fam = _ideal_family(X, pts)
    V = {}
    rec = []
    for name, gens in fam:
        # V(T_I): the skyscrapers killed by I, via annihilator containment
        inside = []
        for x in pts:
            ok = True
            for j, A in enumerate(skyscraper(X, x).modules):
                if _is_zero_chart(A):
                    continue
                ok &= P.divides(pid_annihilator(A.pid).gen, gens[j], X.p) if pid_annihilator(A.pid).gen \
                    else gens[j] == P.ZERO
            if ok:
                inside.append(x.label)
        supp = [x.label for x in sheaf_invariants(ideal_quotient(X, gens), "support", window=pts)]
        V[name] = set(inside)
        rec.append({"ideal": name, "V_T": inside, "supp": supp, "ok": inside == supp})
    laws = True
    items = list(fam)
    for (a, ga), (b, gb) in itertools.product(items[:8], repeat=2):
        prod = [P.mul(x, y, X.p) for x, y in zip(ga, gb)]
        summ = [P.gcd(x, y, X.p) for x, y in zip(ga, gb)]
        vp = {x.label for x in sheaf_invariants(ideal_quotient(X, prod), "support", window=pts)}
        vs = {x.label for x in sheaf_invariants(ideal_quotient(X, summ), "support", window=pts)}
        laws &= vp == V[a] | V[b] and vs == V[a] & V[b]
    return {"ideals": rec, "union_intersection_laws": laws,
            "ok": laws and all(r["ok"] for r in rec)}


def _finite_chart_report(R: FiniteRing) -> dict:
    """Points, topology and structure sheaf of Spec R from Mod R alone, compared with R."""
    from .quotient import opens, structure_presheaf, test_family
    from .spectrum import equivalent
    from .topology import affine_homeo_check, build_topology
    X = affine(R)
    pts = points(X)
    sp, rep = spec_points(R)
    point_recs = []
    for x in pts:
        S_ = skyscraper(X, x).modules[0]
        match = [q for q in sp if equivalent(S_, q.representative)["outcome"] == YES]
        point_recs.append({"point": x.label, "class": [q.label for q in match],
                           "ok": len(match) == 1 and match[0].label == x.label})
    prec, bij = _point_records(X, pts)
    for a, b in zip(point_recs, prec):
        a.update({k: v for k, v in b.items() if k not in ("point", "ok")})
        a["ok"] = a["ok"] and b["ok"]
    top = build_topology(R)
    homeo = affine_homeo_check(R)
    _, primes = enumerate_ideals_primes(R)
    sheaf = structure_presheaf(R, test_family(R))
    opens_rec = []
    for U in opens(R, primes):
        C = sheaf["centers"][U]
        local = 1
        idem = R.zero
        for q in primes:
            if q.label() in U:
                e = local_idempotent(q)
                local *= len({R.mul(e, r) for r in R.elements()})
                idem = R.add(idem, e)
        S_, pi = quotient_ring(R, R.ideal([R.sub(R.one, idem)]))
        image = {tuple(pi(r)): tuple(R.mul(e, r) for e in [local_idempotent(q) for q in primes
                                                           if q.label() in U]) for r in R.elements()}
        iso = len(set(image.values())) == len(image) == S_.size == local
        opens_rec.append({"open": "{" + ",".join(U) + "}", "center_order": C.report["order"],
                          "ring": R.label if C.local_ring.size == R.size else _ring_name(C.local_ring),
                          "product_of_local_rings": local,
                          "ok": C.report["ok"] and iso and C.report["order"] == local})
    return {"points": point_recs, "bijection": bij,
            "topology": {"closed_sets": top["closed_sets"], "checks_ok": top["ok"],
                         "homeomorphism": f"{homeo['matched']}/{homeo['total']}", "ok": top["ok"] and homeo["ok"]},
            "structure": {"opens": opens_rec, "triangle": sheaf["triangle"], "gluing": sheaf["gluing"],
                          "global_restriction": sheaf["global_restriction"],
                          "ok": sheaf["ok"] and all(r["ok"] for r in opens_rec)},
            "spectral_report": {"rejected": len(rep.get("rejected", []))}}


def spec_of_qcoh(X: GluedScheme, degree_bound: int | None = None) -> dict:
    """Spec of the sheaf category on a window: points, closed sets and structure rings."""
    if not X.charts:
        return {"scheme": X.label, "window": degree_bound, "components": [],
                "points": [], "ok": True}
    if any(isinstance(R, PolyRing) for R in X.charts) and degree_bound is None:
        raise NeedsBound("schemes with polynomial charts need a degree bound")
    comps = []
    for comp in X.components:
        sub_X = _restrict(X, comp)
        if len(comp) == 1 and isinstance(X.charts[comp[0]], FiniteRing):
            rep = _finite_chart_report(X.charts[comp[0]])
        else:
            rep = _glued_report(sub_X, degree_bound)
        rep["charts"] = comp
        comps.append(rep)
    all_points = [r["point"] for c in comps for r in c["points"]]
    return {"scheme": X.label, "window": degree_bound, "components": comps,
            "points": all_points, "ok": all(_report_ok(c) for c in comps)}


def _restrict(X: GluedScheme, comp: Sequence[int]) -> GluedScheme:
    if len(comp) == len(X.charts):
        return X
    idx = {c: n for n, c in enumerate(comp)}
    gluing = {(idx[i], idx[j]): G for (i, j), G in X.gluing.items() if i in idx and j in idx}
    return GluedScheme([X.charts[c] for c in comp], gluing, kind=X.kind, label=X.label,
                       separated=X.separated, p1=X.p1)


def _glued_report(X: GluedScheme, bound: int) -> dict:
    pts = points(X, bound)
    prec, bij = _point_records(X, pts)
    top = _topology_records(X, pts)
    rings = [{**pid_center(R), "open": f"chart {i}"} for i, R in enumerate(X.charts)]
    for (i, j) in sorted(X.gluing):
        if i < j:
            rings.append(overlap_check(X, i, j, bound))
    out = {"points": prec, "bijection": bij, "topology": top,
           "structure": {"rings": rings, "ok": all(r["ok"] for r in rings)}}
    if X.p1 is not None:
        secs = []
        for n in range(-1, bound + 1):
            dim = global_sections(twist(X, n)).dimension
            secs.append({"n": n, "dimension": dim, "expected": max(n + 1, 0), "ok": dim == max(n + 1, 0)})
        out["sections"] = secs
    return out


def _report_ok(rep: dict) -> bool:
    ok = all(r["ok"] for r in rep["points"]) and rep["bijection"]["ok"] and rep["topology"]["ok"] \
        and rep["structure"]["ok"]
    return ok and all(s["ok"] for s in rep.get("sections", []))


def _mismatches(rep: dict) -> list[str]:
    out = []
    for c in rep["components"]:
        out += [f"point {r['point']}" for r in c["points"] if not r["ok"]]
        if not c["bijection"]["ok"]:
            out.append("point bijection")
        if not c["topology"]["ok"]:
            out.append("topology")
        if not c["structure"]["ok"]:
            out.append("structure sheaf")
        out += [f"sections of O({s['n']})" for s in c.get("sections", []) if not s["ok"]]
    return out


def reconstruct_and_compare(X: GluedScheme, degree_bound: int | None = None) -> dict:
    """Rebuild X from its sheaf category on the window and compare; any failure is a defect."""
    rep = spec_of_qcoh(X, degree_bound)
    bad = _mismatches(rep) if X.charts else []
    rep["mismatches"] = bad
    rep["matched"] = not bad
    if bad:
        err = MismatchBug("reconstruction mismatch: " + ", ".join(bad))
        err.report = rep
        raise err
    return rep


# ---------------------------------------------------------------------------
# automorphisms and twists


@dataclass(frozen=True, eq=False)
class Automorphism:
    X: GluedScheme
    perm: tuple               # f(U_a) = U_perm[a]
    images: tuple             # f*(x_perm[a]) as a polynomial fraction in x_a
    matrix: tuple | None = None

    def key(self):
        return self.matrix if self.matrix is not None else (self.perm, self.images)


def automorphism(X: GluedScheme, A) -> Automorphism:
    """The automorphism t -> (a t + b)/(c t + d) of a projective-line model."""
    if X.p1 is None:
        raise TypeError("fractional-linear automorphisms need a projective-line model")
    p = X.p
    A = mob_norm(A, p)
    removed, mus = X.p1["removed"], X.p1["mu"]
    perm, images = [], []
    for a, r in enumerate(removed):
        target = mob_point(A, r, p)
        if target not in removed:
            raise BadGluing("the automorphism does not permute the charts of this cover")
        b = removed.index(target)
        perm.append(b)
        img = mob_rat(mob_mul(mob_mul(mus[b], A, p), mob_inv(mus[a], p), p), p)
        if P.deg(img[1]) > 0:
            raise BadGluing("chart map is not polynomial")
        images.append(img)
    f = Automorphism(X, tuple(perm), tuple(images), A)
    for (a, b) in X.gluing:
        lhs = subst_rat(images[a], X.gluing[(a, b)].image, p)
        rhs = subst_rat(X.gluing[(perm[a], perm[b])].image, images[b], p)
        if lhs != rhs:
            raise BadGluing(f"chart maps do not respect the gluing on {a},{b}")
    return f


def automorphisms(X: GluedScheme) -> list[Automorphism]:
    """Every fractional-linear automorphism that permutes the charts."""
    out = []
    for A in pgl2(X.p):
        try:
            out.append(automorphism(X, A))
        except BadGluing:
            continue
    return out


def pullback(M: QcohSheaf, f: Automorphism) -> QcohSheaf:
    X, p = M.X, M.X.p
    mods = []
    for a, b in enumerate(f.perm):
        A = M.modules[b]
        rels = [tuple(subst(x, f.images[a], p)[0] for x in r) for r in A.rels]
        mods.append(Presented(X.charts[a], A.g, rels))
    trans = {}
    for (a, c) in X.gluing:
        T = M.trans[(f.perm[a], f.perm[c])]
        trans[(a, c)] = tuple(tuple(subst_rat(e, f.images[c], p) for e in row) for row in T)
    return QcohSheaf(X, mods, trans, label=f"f*{M.label}")


@dataclass
class TwistData:
    """The autoequivalence N -> f*N (x) L."""

    f: Automorphism
    L: QcohSheaf
    certificate: dict = field(default_factory=dict)

    def __post_init__(self):
        if not is_line_bundle(self.L):
            raise NotInvertible("the twisting sheaf is not a line bundle")
        T = tensor(self.L, dual(self.L))
        trivial = all(e == ONE for Tm in T.trans.values() for row in Tm for e in row)
        if not trivial:
            raise NotInvertible("L (x) L^-1 is not the structure sheaf")
        self.certificate = {"inverse": "L (x) L^-1 has identity transitions"}

    def __call__(self, N: QcohSheaf) -> QcohSheaf:
        return tensor(pullback(N, self.f), self.L)


class TwistFunctor:
    """A composite of twists, applied right to left."""

    def __init__(self, *stages: TwistData):
        self.stages = stages

    def __call__(self, N: QcohSheaf) -> QcohSheaf:
        for st in reversed(self.stages):
            N = st(N)
        return N


def _p1_key(X: GluedScheme, x: SchemePoint):
    """A point as inf, a rational value of t, or the minimal polynomial of t."""
    if x.is_generic:
        return "generic"
    if x.owner != 0:
        return INF
    g = x.prime
    return (-g[0]) % X.p if P.deg(g) == 1 else g


def _mob_on_key(A, key, p: int):
    if key == "generic" or key == INF or isinstance(key, int):
        return key if key == "generic" else mob_point(A, key, p)
    num = subst(key, mob_rat(mob_inv(A, p), p), p)[0]
    return P.monic(num, p)


def extract_twist(X: GluedScheme, F: Callable[[QcohSheaf], QcohSheaf], degree_bound: int = 2) -> dict:
    """Recover (f, L) from a functor presented by twist data."""
    p = X.p
    L = F(structure_sheaf(X))
    if not is_line_bundle(L):
        raise NotInvertible("F(O) is not a line bundle")
    pts = points(X, degree_bound)
    keys = {x: _p1_key(X, x) for x in pts}
    pmap = {}
    for x in pts:
        img = F(skyscraper(X, x))
        supp = sheaf_invariants(img, "support", window=pts)
        cands = [y for y in supp if all(in_closure(X, z, y) for z in supp)]
        hit = [y for y in cands if equivalent_sheaf(img, skyscraper(X, y))]
        if len(hit) != 1:
            raise MismatchBug(f"F(O/J{x.label}) matches {len(hit)} points")
        pmap[keys[x]] = keys[hit[0]]
    B = mob_from_points({k: pmap[k] for k in (INF, 0, 1) if k in pmap}, p)
    consistent = all(_mob_on_key(B, k, p) == v for k, v in pmap.items())
    f = automorphism(X, mob_inv(B, p))
    return {"f": f, "L": L, "degree": line_degree(L), "point_map": pmap, "consistent": consistent}


def twist_round_trip(X: GluedScheme, A, n: int, degree_bound: int = 2) -> dict:
    f = automorphism(X, A)
    td = TwistData(f, twist(X, n))
    out = extract_twist(X, td, degree_bound)
    same_f = out["f"].matrix == f.matrix
    same_L = line_iso(out["L"], td.L)
    return {"matrix": list(f.matrix), "n": n, "recovered_matrix": list(out["f"].matrix),
            "recovered_degree": out["degree"], "same_automorphism": same_f, "same_bundle": same_L,
            "consistent": out["consistent"], "ok": same_f and same_L and out["consistent"] and out["degree"] == n}


def composition_check(X: GluedScheme, A, n: int, B, m: int, degree_bound: int = 2) -> dict:
    """(f, L) o (g, M) = (g o f, f*M (x) L)."""
    p = X.p
    f, g = automorphism(X, A), automorphism(X, B)
    Lf, Mg = twist(X, n), twist(X, m)
    comp = TwistFunctor(TwistData(f, Lf), TwistData(g, Mg))
    out = extract_twist(X, comp, degree_bound)
    want_f = mob_mul(g.matrix, f.matrix, p)
    want_L = tensor(pullback(Mg, f), Lf)
    same_f = out["f"].matrix == want_f
    same_L = line_iso(out["L"], want_L)
    return {"first": [list(A), n], "second": [list(B), m], "recovered": [list(out["f"].matrix), out["degree"]],
            "predicted": [list(want_f), line_degree(want_L)], "ok": same_f and same_L}


def sample_pairs(X: GluedScheme, count: int = 10, seed: int = 0, degrees=range(-2, 4)) -> list:
    rng = random.Random(seed)
    auts = [f.matrix for f in automorphisms(X)]
    degs = list(degrees)
    return [(rng.choice(auts), rng.choice(degs), rng.choice(auts), rng.choice(degs)) for _ in range(count)]
