"""Finitely generated modules over finite commutative rings.

A module is R^g / K where K is the R-submodule spanned by the relation
rows.  Everything additive is done in the scaled coordinates of
rings.FiniteRing (one block of k coordinates per generator), so K, every
submodule and every hom group is a Howell basis and equality is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import howell as H
from .errors import IllDefined, MixedRings, TooLarge
from .rings import (ELEMENT_CAP, LATTICE_CAP, Elem, FiniteRing, Ideal,
                    _close_under_sums)

Vec = tuple[Elem, ...]

MODULE_CAP = ELEMENT_CAP
SUBMODULE_CAP = LATTICE_CAP


def _same_ring(*mods) -> FiniteRing:
    R = mods[0].ring
    for M in mods[1:]:
        if M.ring is not R:
            raise MixedRings(f"{M.ring.label} vs {R.label}")
    return R


class FGModule:
    """R^g modulo the submodule generated by ``relations``."""

    def __init__(self, ring: FiniteRing, g: int, relations: Iterable[Sequence[Sequence[int]]] = (),
                 label: str | None = None, _K: tuple | None = None, cap: int = MODULE_CAP):
        self.ring = ring
        self.g = g
        self.ncols = ring.k * g
        if _K is None:
            rels = [tuple(ring.canon(a) for a in r) for r in relations]
            for r in rels:
                if len(r) != g:
                    raise ValueError(f"relation {r} has {len(r)} entries, expected {g}")
            _K = H.howell_form([ring.scaled_vec(ring_mul_vec(ring, b, r))
                                for r in rels for b in ring.basis()], ring.N, self.ncols)
        self.K: tuple = _K
        self.label = label or f"M{id(self) % 997}"
        # canonical data is computed eagerly (values are immutable)
        self.size = ring.size ** g // H.span_order(self.K, ring.N) if ring.k else 1
        if self.size > cap:
            raise TooLarge(f"module {self.label} has {self.size} elements > cap {cap}")

    # -- identity
    def key(self):
        return (self.g, self.K)

    def __repr__(self) -> str:
        return f"<FGModule {self.label} over {self.ring.label}: g={self.g}, |M|={self.size}>"

    @property
    def N(self) -> int:
        return self.ring.N

    # -- elements
    def canon_coords(self, v: Sequence[int]) -> tuple[int, ...]:
        return H.reduce_vector(v, self.K, self.N)

    def canon(self, vec: Sequence[Elem]) -> Vec:
        R = self.ring
        return R.unscaled_vec(self.canon_coords(R.scaled_vec([R.canon(a) for a in vec])), self.g)

    def coords(self, vec: Sequence[Elem]) -> tuple[int, ...]:
        return self.canon_coords(self.ring.scaled_vec(vec))

    def zero(self) -> Vec:
        return (self.ring.zero,) * self.g

    def gen(self, j: int) -> Vec:
        R = self.ring
        return tuple(R.one if i == j else R.zero for i in range(self.g))

    def add(self, a: Vec, b: Vec) -> Vec:
        R = self.ring
        return self.canon(tuple(R.add(x, y) for x, y in zip(a, b)))

    def act(self, r: Elem, v: Vec) -> Vec:
        return self.canon(ring_mul_vec(self.ring, r, v))

    def is_zero_elem(self, v: Vec) -> bool:
        return not any(self.coords(v))

    def additive_gens(self) -> list[tuple[int, ...]]:
        """Scaled coordinates of b_i * e_j, generating R^g additively."""
        R = self.ring
        out = []
        for j in range(self.g):
            for b in R.basis():
                vec = [R.zero] * self.g
                vec[j] = b
                out.append(R.scaled_vec(vec))
        return out

    @cached_property
    def element_coords(self) -> list[tuple[int, ...]]:
        return enumerate_quotient(self.additive_gens(), self.K, self.N, self.ncols, cap=MODULE_CAP)

    def elements(self) -> list[Vec]:
        R = self.ring
        return [R.unscaled_vec(c, self.g) for c in self.element_coords]

    def is_zero(self) -> bool:
        return self.size == 1

    # -- submodules
    def submodule(self, gens: Iterable[Sequence[Elem]]) -> "Submodule":
        R = self.ring
        rows = list(self.K)
        for v in gens:
            for b in R.basis():
                rows.append(R.scaled_vec(ring_mul_vec(R, b, v)))
        return Submodule(self, H.howell_form(rows, self.N, self.ncols))

    def whole(self) -> "Submodule":
        return self.submodule([self.gen(j) for j in range(self.g)])

    def zero_sub(self) -> "Submodule":
        return Submodule(self, self.K)

    def to_json(self) -> dict:
        R = self.ring
        rels = [list(list(a) for a in R.unscaled_vec(r, self.g)) for r in self.K]
        return {"ring": R.descriptor, "generators": self.g, "relations": rels}


def ring_mul_vec(R: FiniteRing, r: Elem, v: Sequence[Elem]) -> Vec:
    return tuple(R.mul(r, a) for a in v)


def enumerate_quotient(gens: Sequence[Sequence[int]], K: Sequence, n: int, ncols: int,
                       cap: int = MODULE_CAP) -> list[tuple[int, ...]]:
    """Canonical representatives of span(gens) + K modulo K, breadth first."""
    zero = H.reduce_vector([0] * ncols, K, n)
    seen = {zero}
    order = [zero]
    frontier = [zero]
    gens = [H.reduce_vector(g, K, n) for g in gens]
    gens = [g for g in gens if any(g)]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = H.reduce_vector([a + b for a, b in zip(x, g)], K, n)
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    new.append(y)
                    if len(seen) > cap:
                        raise TooLarge(f"more than {cap} elements")
        frontier = new
    return order


@dataclass(frozen=True)
class Submodule:
    """L/K inside ambient R^g/K, stored by the Howell basis of L."""

    ambient: FGModule = field(compare=False, hash=False)
    basis: tuple

    @property
    def size(self) -> int:
        M = self.ambient
        return H.span_order(self.basis, M.N) // H.span_order(M.K, M.N)

    def contains(self, v: Sequence[Elem]) -> bool:
        M = self.ambient
        return H.in_span(M.ring.scaled_vec(v), self.basis, M.N)

    def is_zero(self) -> bool:
        return self.basis == self.ambient.K

    def issubset(self, other: "Submodule") -> bool:
        n = self.ambient.N
        return all(H.in_span(r, other.basis, n) for r in self.basis)

    def __add__(self, other: "Submodule") -> "Submodule":
        M = self.ambient
        return Submodule(M, H.join(self.basis, other.basis, M.N, M.ncols))

    def __and__(self, other: "Submodule") -> "Submodule":
        M = self.ambient
        return Submodule(M, H.intersect(self.basis, other.basis, M.N, M.ncols))

    def generators(self) -> list[Vec]:
        """A short list of R-module generators of L/K."""
        M = self.ambient
        R = M.ring
        chosen: list[Vec] = []
        current = M.zero_sub()
        for row in self.basis:
            v = R.unscaled_vec(row, M.g)
            if not current.contains(v):
                chosen.append(v)
                current = M.submodule(chosen)
                if current.basis == self.basis:
                    break
        # drop redundant generators greedily
        i = 0
        while i < len(chosen):
            rest = chosen[:i] + chosen[i + 1:]
            if M.submodule(rest).basis == self.basis:
                chosen = rest
            else:
                i += 1
        return chosen

    def elements(self) -> list[Vec]:
        M = self.ambient
        R = M.ring
        coords = enumerate_quotient(list(self.basis), M.K, M.N, M.ncols)
        return [R.unscaled_vec(c, M.g) for c in coords]

    def as_module(self) -> tuple[FGModule, "ModuleHom"]:
        """A presentation of L/K with its inclusion into the ambient module."""
        M = self.ambient
        gens = self.generators()
        S = hom_presentation(M, gens, label=f"sub({M.label})")
        return S, ModuleHom(S, M, tuple(M.canon(v) for v in gens))

    def quotient(self) -> tuple[FGModule, "ModuleHom"]:
        M = self.ambient
        Q = FGModule(M.ring, M.g, _K=self.basis, label=f"{M.label}/sub")
        return Q, ModuleHom(M, Q, tuple(Q.canon(M.gen(j)) for j in range(M.g)))

    def sort_key(self):
        return self.basis


def free_map_kernel(N: FGModule, images: Sequence[Vec]) -> tuple:
    """Howell basis (in R^h scaled coordinates) of ker(R^h -> N, e_j -> images[j])."""
    R = N.ring
    h = len(images)
    pairs = []
    for j, img in enumerate(images):
        for b in R.basis():
            src = [R.zero] * h
            src[j] = b
            pairs.append((R.scaled_vec(ring_mul_vec(R, b, img)), R.scaled_vec(src)))
    return H.kernel(pairs, R.N, N.ncols, R.k * h, N.K)


def hom_presentation(N: FGModule, gens: Sequence[Vec], label: str | None = None) -> FGModule:
    """The submodule of N generated by gens, presented on those generators."""
    K = free_map_kernel(N, gens)
    return FGModule(N.ring, len(gens), _K=K, label=label)


class ModuleHom:
    """Homomorphism given by the images of the source generators."""

    def __init__(self, source: FGModule, target: FGModule, images: Sequence[Vec], check: bool = True):
        _same_ring(source, target)
        if len(images) != source.g:
            raise ValueError("need one image per source generator")
        self.source, self.target = source, target
        self.images = tuple(target.canon(v) for v in images)
        if check and not self.well_defined():
            raise IllDefined("relations of the source do not map to zero")

    def well_defined(self) -> bool:
        S, T, R = self.source, self.target, self.source.ring
        for row in S.K:
            r = R.unscaled_vec(row, S.g)
            if not T.is_zero_elem(self._combine(r)):
                return False
        return True

    def _combine(self, coeffs: Sequence[Elem]) -> Vec:
        T, R = self.target, self.target.ring
        acc = [R.zero] * T.g
        for c, img in zip(coeffs, self.images):
            if any(c):
                acc = [R.add(a, R.mul(c, x)) for a, x in zip(acc, img)]
        return tuple(acc)

    def __call__(self, v: Sequence[Elem]) -> Vec:
        return self.target.canon(self._combine(v))

    def key(self):
        return tuple(self.target.coords(v) for v in self.images)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModuleHom) and self.source.key() == other.source.key() \
            and self.target.key() == other.target.key() and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def compose(self, other: "ModuleHom") -> "ModuleHom":
        """self after other."""
        return ModuleHom(other.source, self.target, tuple(self(v) for v in other.images), check=False)

    def __add__(self, other: "ModuleHom") -> "ModuleHom":
        T = self.target
        return ModuleHom(self.source, T, tuple(T.add(a, b) for a, b in zip(self.images, other.images)),
                         check=False)

    def scale(self, r: Elem) -> "ModuleHom":
        T = self.target
        return ModuleHom(self.source, T, tuple(T.act(r, v) for v in self.images), check=False)

    def kernel(self) -> Submodule:
        S = self.source
        L = H.join(free_map_kernel(self.target, self.images), S.K, S.N, S.ncols)
        return Submodule(S, L)

    def image(self) -> Submodule:
        return self.target.submodule(self.images)

    def cokernel(self) -> FGModule:
        return self.image().quotient()[0]

    def is_injective(self) -> bool:
        return self.kernel().is_zero()

    def is_surjective(self) -> bool:
        return self.image().size == self.target.size

    def to_json(self) -> dict:
        return {"matrix": [[list(a) for a in v] for v in self.images]}


def identity_hom(M: FGModule) -> ModuleHom:
    return ModuleHom(M, M, tuple(M.gen(j) for j in range(M.g)), check=False)


def zero_hom(M: FGModule, N: FGModule) -> ModuleHom:
    return ModuleHom(M, N, tuple(N.zero() for _ in range(M.g)), check=False)


# ---------------------------------------------------------------------------
# constructions


def present_module(ring: FiniteRing, g: int, relations: Sequence[Sequence[Sequence[int]]] = (),
                   label: str | None = None) -> FGModule:
    return FGModule(ring, g, relations, label=label)


def cyclic(R: FiniteRing, I: Ideal, label: str | None = None) -> FGModule:
    """R/I."""
    return FGModule(R, 1, [(a,) for a in I.generators()], label=label or f"R/{I.label()}")


def free(R: FiniteRing, g: int) -> FGModule:
    return FGModule(R, g, (), label="R" if g == 1 else f"R^{g}")


def zero_module(R: FiniteRing) -> FGModule:
    return FGModule(R, 0, (), label="0")


def direct_sum(M: FGModule, N: FGModule) -> FGModule:
    R = _same_ring(M, N)
    rows = [tuple(r) + (0,) * N.ncols for r in M.K] + [(0,) * M.ncols + tuple(r) for r in N.K]
    K = H.howell_form(rows, R.N, M.ncols + N.ncols)
    return FGModule(R, M.g + N.g, _K=K, label=f"{M.label}+{N.label}")


def direct_power(M: FGModule, n: int) -> FGModule:
    if n == 0:
        return zero_module(M.ring)
    out = M
    for _ in range(n - 1):
        out = direct_sum(out, M)
    out.label = f"{M.label}^{n}"
    return out


def quotient(M: FGModule, S: Submodule) -> FGModule:
    return S.quotient()[0]


def lattice_ops(M: FGModule, request: str, arg=None):
    if request == "kernel":
        return arg.kernel()
    if request == "image":
        return arg.image()
    if request == "cokernel":
        return arg.cokernel()
    if request == "quotient":
        return quotient(M, arg)
    if request == "direct_sum":
        return direct_sum(M, arg)
    if request == "all_submodules":
        return all_submodules(M)
    raise ValueError(f"unknown lattice request {request!r}")


# ---------------------------------------------------------------------------
# lattices


def cyclic_submodules(M: FGModule) -> list[Submodule]:
    out = {}
    for v in M.elements():
        S = M.submodule([v])
        out.setdefault(S.basis, S)
    return list(out.values())


def all_submodules(M: FGModule, cap: int = SUBMODULE_CAP) -> list[Submodule]:
    """Every submodule exactly once, sorted by canonical Howell basis."""
    atoms = cyclic_submodules(M)
    subs = _close_under_sums(atoms, lambda S: S.basis, Submodule.__add__, cap, "submodules")
    return sorted(subs, key=Submodule.sort_key)


# ---------------------------------------------------------------------------
# hom groups and isomorphism


@dataclass
class HomGroup:
    source: FGModule
    target: FGModule
    basis: tuple  # Howell basis of the lifted hom tuples in (R^{g_N})^{g_M}
    base: tuple   # K_N repeated g_M times

    @property
    def order(self) -> int:
        n = self.source.N
        return H.span_order(self.basis, n) // H.span_order(self.base, n)

    def _hom(self, coords) -> ModuleHom:
        S, T, R = self.source, self.target, self.source.ring
        ims = []
        for j in range(S.g):
            ims.append(R.unscaled_vec(coords[j * T.ncols:(j + 1) * T.ncols], T.g))
        return ModuleHom(S, T, ims, check=False)

    def generators(self) -> list[ModuleHom]:
        n = self.source.N
        return [self._hom(r) for r in self.basis if not H.in_span(r, self.base, n)]

    def elements(self, cap: int = MODULE_CAP) -> list[ModuleHom]:
        S, T = self.source, self.target
        coords = enumerate_quotient(list(self.basis), self.base, S.N, S.g * T.ncols, cap=cap)
        return [self._hom(c) for c in coords]


def hom_group(M: FGModule, N: FGModule) -> HomGroup:
    """Hom_R(M, N) as the solution group of the relation constraints."""
    R = _same_ring(M, N)
    gM, gN = M.g, N.g
    rels = [R.unscaled_vec(row, gM) for row in M.K]
    width = N.ncols
    pairs = []
    for j in range(gM):
        for l in range(gN):
            for b in R.basis():
                src = [0] * (gM * width)
                vec = [R.zero] * gN
                vec[l] = b
                src[j * width:(j + 1) * width] = R.scaled_vec(vec)
                img: list[int] = []
                for r in rels:
                    out = [R.zero] * gN
                    out[l] = R.mul(r[j], b)
                    img.extend(R.scaled_vec(out))
                pairs.append((img, src))
    base = tuple()
    base_rows = []
    for j in range(gM):
        for row in N.K:
            src = [0] * (gM * width)
            src[j * width:(j + 1) * width] = row
            base_rows.append(src)
    base = H.howell_form(base_rows, R.N, gM * width)
    target_rel = []
    for i in range(len(rels)):
        for row in N.K:
            v = [0] * (len(rels) * width)
            v[i * width:(i + 1) * width] = row
            target_rel.append(v)
    if rels:
        L = H.kernel(pairs, R.N, len(rels) * width, gM * width, target_rel)
        L = H.join(L, base, R.N, gM * width)
    else:
        L = H.howell_form([s for _, s in pairs] + list(base), R.N, gM * width)
    return HomGroup(M, N, L, base)


def ann_profile(M: FGModule) -> tuple:
    """|ker(r: M -> M)| for every r in R; an isomorphism invariant."""
    R = M.ring
    out = []
    for r in R.elements():
        imgs = [M.act(r, M.gen(j)) for j in range(M.g)]
        h = ModuleHom(M, M, imgs, check=False)
        out.append(h.kernel().size)
    return tuple(out)


def is_isomorphic(M: FGModule, N: FGModule, cap: int = MODULE_CAP) -> bool:
    _same_ring(M, N)
    if M.size != N.size:
        return False
    if M.size == 1:
        return True
    if ann_profile(M) != ann_profile(N):
        return False
    G = hom_group(M, N)
    if G.order > cap:
        raise TooLarge(f"Hom group of order {G.order} exceeds cap")
    return any(h.is_injective() for h in G.elements(cap))


def hom_iso(M: FGModule, N: FGModule, request: str):
    if request == "hom_group":
        return hom_group(M, N)
    if request == "is_isomorphic":
        return is_isomorphic(M, N)
    raise ValueError(f"unknown request {request!r}")


# ---------------------------------------------------------------------------
# annihilators and supports


def annihilator(M: FGModule) -> Ideal:
    R = M.ring
    if M.g == 0:
        return R.unit_ideal()
    pairs = []
    for b in R.basis():
        img: list[int] = []
        for j in range(M.g):
            img.extend(M.canon_coords(R.scaled_vec(ring_mul_vec(R, b, M.gen(j)))))
        pairs.append((img, R.scaled(b)))
    rel = []
    for j in range(M.g):
        for row in M.K:
            v = [0] * (M.ncols * M.g)
            v[j * M.ncols:(j + 1) * M.ncols] = row
            rel.append(v)
    return Ideal(R, H.kernel(pairs, R.N, M.ncols * M.g, R.k, rel))


def element_annihilator(M: FGModule, v: Vec) -> Ideal:
    R = M.ring
    pairs = [(R.scaled_vec(ring_mul_vec(R, b, v)), R.scaled(b)) for b in R.basis()]
    return Ideal(R, H.kernel(pairs, R.N, M.ncols, R.k, M.K))


def support(M: FGModule, primes: Sequence) -> list:
    """Primes p with Ann(m) contained in p for some element m."""
    anns = {}
    for v in M.elements():
        if M.is_zero_elem(v):
            continue
        A = element_annihilator(M, v)
        anns.setdefault(A.basis, A)
    out = []
    for p in primes:
        I = p.ideal if hasattr(p, "ideal") else p
        if any(A.issubset(I) for A in anns.values()):
            out.append(p)
    return out


def annihilator_support(M: FGModule, primes: Sequence) -> tuple[Ideal, list]:
    return annihilator(M), support(M, primes)


def ideal_times_module(I: Ideal, M: FGModule) -> Submodule:
    """I*M as a submodule of M."""
    return M.submodule([ring_mul_vec(M.ring, r, M.gen(j)) for r in I.generators() for j in range(M.g)])


def in_T(I: Ideal, M: FGModule) -> bool:
    """Membership in T_I: I*M == 0."""
    return ideal_times_module(I, M).is_zero()
