"""Howell normal form over Z/N and the subgroup calculus built on it.

A subgroup of (Z/N)^m is stored as its Howell basis: a tuple of rows in
row-echelon form whose pivots divide N, with entries above each pivot
reduced modulo that pivot, and with the Howell property (the rows whose
first t entries vanish span every element of the subgroup whose first t
entries vanish).  The basis is unique per subgroup, so subgroup equality
is tuple equality.
"""
from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence

Row = tuple[int, ...]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) over the integers."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def unit_normalizer(a: int, n: int) -> int:
    """Return a unit w of Z/n with w*a == gcd(a, n) (mod n)."""
    a %= n
    if a == 0:
        return 1
    g = gcd(a, n)
    m = n // g
    if m == 1:
        return 1
    _, s, _ = xgcd((a // g) % m, m)
    w = s % m
    while gcd(w, n) != 1:
        w += m
    return w


def _combine(x: list[int], y: list[int], c: int, n: int) -> tuple[list[int], list[int]]:
    a, b = x[c], y[c]
    g, s, t = xgcd(a, b)
    u, v = -b // g, a // g
    nx = [(s * p + t * q) % n for p, q in zip(x, y)]
    ny = [(u * p + v * q) % n for p, q in zip(x, y)]
    return nx, ny


def howell_form(rows: Iterable[Sequence[int]], n: int, ncols: int) -> tuple[Row, ...]:
    """Canonical Howell basis of the subgroup of (Z/n)^ncols spanned by rows."""
    if n == 1:
        return ()
    pending = []
    for r in rows:
        r = [x % n for x in r]
        if len(r) != ncols:
            raise ValueError(f"row length {len(r)} != {ncols}")
        if any(r):
            pending.append(r)
    basis: list[list[int]] = []
    pivots: list[int] = []
    for c in range(ncols):
        pivot = None
        rest = []
        for r in pending:
            if r[c] == 0:
                rest.append(r)
            elif pivot is None:
                pivot = r
            else:
                pivot, r2 = _combine(pivot, r, c, n)
                if any(r2):
                    rest.append(r2)
        if pivot is not None:
            w = unit_normalizer(pivot[c], n)
            pivot = [(w * x) % n for x in pivot]
            ann = n // pivot[c]
            if ann != 1:
                extra = [(ann * x) % n for x in pivot]
                if any(extra):
                    rest.append(extra)
            basis.append(pivot)
            pivots.append(c)
        pending = rest
    # reduce entries above each pivot
    for i in range(len(basis)):
        c, p = pivots[i], basis[i][pivots[i]]
        for j in range(i):
            q = basis[j][c] // p
            if q:
                basis[j] = [(x - q * y) % n for x, y in zip(basis[j], basis[i])]
    return tuple(tuple(r) for r in basis)


def pivot_of(row: Row) -> int:
    for i, x in enumerate(row):
        if x:
            return i
    return -1


def reduce_vector(v: Sequence[int], basis: Sequence[Row], n: int) -> Row:
    """Canonical representative of v modulo the span of a Howell basis."""
    w = [x % n for x in v]
    for row in basis:
        c = pivot_of(row)
        q = w[c] // row[c]
        if q:
            w = [(x - q * y) % n for x, y in zip(w, row)]
    return tuple(w)


def in_span(v: Sequence[int], basis: Sequence[Row], n: int) -> bool:
    return not any(reduce_vector(v, basis, n))


def span_order(basis: Sequence[Row], n: int) -> int:
    size = 1
    for row in basis:
        size *= n // row[pivot_of(row)]
    return size


def join(a: Sequence[Row], b: Sequence[Row], n: int, ncols: int) -> tuple[Row, ...]:
    return howell_form(list(a) + list(b), n, ncols)


def kernel(pairs: Iterable[tuple[Sequence[int], Sequence[int]]], n: int,
           img_cols: int, src_cols: int,
           target_relations: Iterable[Sequence[int]] = ()) -> tuple[Row, ...]:
    """Kernel of an additive map given on generators.

    ``pairs`` lists (image, source) for a generating set of the source
    subgroup; ``target_relations`` span the subgroup of the target that is
    treated as zero.  Returns the Howell basis of the kernel inside the
    source coordinates.
    """
    rows = [list(img) + list(src) for img, src in pairs]
    rows += [list(rel) + [0] * src_cols for rel in target_relations]
    form = howell_form(rows, n, img_cols + src_cols)
    return tuple(r[img_cols:] for r in form if pivot_of(r) >= img_cols)


def intersect(a: Sequence[Row], b: Sequence[Row], n: int, ncols: int) -> tuple[Row, ...]:
    pairs = [(r, r) for r in a]
    return kernel(pairs, n, ncols, ncols, target_relations=b)


def enumerate_span(basis: Sequence[Row], n: int, ncols: int) -> list[Row]:
    """All elements of the span, in a fixed order (small subgroups only)."""
    elems = [tuple([0] * ncols)]
    for row in reversed(basis):
        order = n // row[pivot_of(row)]
        new = []
        for k in range(order):
            for e in elems:
                new.append(tuple((x + k * y) % n for x, y in zip(e, row)))
        elems = new
    return elems
