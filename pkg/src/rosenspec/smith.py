"""Smith normal form with transforms over a Euclidean domain.

Works for the integers and for F_p[t]; the domain is described by a small
ops object.  ``smith(A)`` returns ``(U, D, V, Uinv, Vinv)`` with
``U * A * V == D`` diagonal, each diagonal entry normalized and dividing
the next.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from . import poly as P

Matrix = list[list[Any]]


@dataclass(frozen=True)
class EuclidOps:
    zero: Any
    one: Any
    add: Callable[[Any, Any], Any]
    sub: Callable[[Any, Any], Any]
    mul: Callable[[Any, Any], Any]
    divmod: Callable[[Any, Any], tuple[Any, Any]]
    size: Callable[[Any], int]
    unit_part: Callable[[Any], Any]  # unit u with a == u * normalize(a)
    inv_unit: Callable[[Any], Any]

    def is_zero(self, a: Any) -> bool:
        return a == self.zero

    def normalize(self, a: Any) -> Any:
        if self.is_zero(a):
            return a
        return self.mul(self.inv_unit(self.unit_part(a)), a)

    def divides(self, a: Any, b: Any) -> bool:
        if self.is_zero(a):
            return self.is_zero(b)
        return self.is_zero(self.divmod(b, a)[1])

    def gcd(self, a: Any, b: Any) -> Any:
        while not self.is_zero(b):
            a, b = b, self.divmod(a, b)[1]
        return self.normalize(a)


INTEGERS = EuclidOps(
    zero=0, one=1,
    add=lambda a, b: a + b, sub=lambda a, b: a - b, mul=lambda a, b: a * b,
    divmod=divmod, size=abs,
    unit_part=lambda a: -1 if a < 0 else 1,
    inv_unit=lambda u: u,
)


def poly_ops(p: int) -> EuclidOps:
    return EuclidOps(
        zero=P.ZERO, one=(1,),
        add=lambda a, b: P.add(a, b, p), sub=lambda a, b: P.sub(a, b, p),
        mul=lambda a, b: P.mul(a, b, p),
        divmod=lambda a, b: P.divmod_poly(a, b, p),
        size=lambda a: len(a),
        unit_part=lambda a: (a[-1],),
        inv_unit=lambda u: (pow(u[0], -1, p),),
    )


def identity(n: int, ops: EuclidOps) -> Matrix:
    return [[ops.one if i == j else ops.zero for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix, ops: EuclidOps, inner: int | None = None) -> Matrix:
    k = len(B) if inner is None else inner
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(cols):
            acc = ops.zero
            for t in range(k):
                if not ops.is_zero(row[t]) and not ops.is_zero(B[t][j]):
                    acc = ops.add(acc, ops.mul(row[t], B[t][j]))
            new.append(acc)
        out.append(new)
    return out


def smith(A: Matrix, ncols: int, ops: EuclidOps):
    """Smith normal form of an m x ncols matrix."""
    m, n = len(A), ncols
    D = [list(r) for r in A]
    U, Uinv = identity(m, ops), identity(m, ops)
    V, Vinv = identity(n, ops), identity(n, ops)

    def row_sub(i, k, q):  # row_i -= q * row_k
        if ops.is_zero(q):
            return
        D[i] = [ops.sub(a, ops.mul(q, b)) for a, b in zip(D[i], D[k])]
        U[i] = [ops.sub(a, ops.mul(q, b)) for a, b in zip(U[i], U[k])]
        for r in Uinv:
            r[k] = ops.add(r[k], ops.mul(q, r[i]))

    def col_sub(j, k, q):  # col_j -= q * col_k
        if ops.is_zero(q):
            return
        for r in D:
            r[j] = ops.sub(r[j], ops.mul(q, r[k]))
        for r in V:
            r[j] = ops.sub(r[j], ops.mul(q, r[k]))
        Vinv[k] = [ops.add(a, ops.mul(q, b)) for a, b in zip(Vinv[k], Vinv[j])]

    def row_swap(i, k):
        if i == k:
            return
        D[i], D[k] = D[k], D[i]
        U[i], U[k] = U[k], U[i]
        for r in Uinv:
            r[i], r[k] = r[k], r[i]

    def col_swap(j, k):
        if j == k:
            return
        for r in D:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]
        Vinv[j], Vinv[k] = Vinv[k], Vinv[j]

    def row_scale(i, u):
        ui = ops.inv_unit(u)
        D[i] = [ops.mul(ui, a) for a in D[i]]
        U[i] = [ops.mul(ui, a) for a in U[i]]
        for r in Uinv:
            r[i] = ops.mul(u, r[i])

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if not ops.is_zero(D[i][j]):
                        s = ops.size(D[i][j])
                        if best is None or s < best[0]:
                            best = (s, i, j)
            if best is None:
                break
            _, i, j = best
            row_swap(t, i)
            col_swap(t, j)
            piv = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if not ops.is_zero(D[i][t]):
                    q, r = ops.divmod(D[i][t], piv)
                    row_sub(i, t, q)
                    if not ops.is_zero(r):
                        clean = False
            for j in range(t + 1, n):
                if not ops.is_zero(D[t][j]):
                    q, r = ops.divmod(D[t][j], piv)
                    col_sub(j, t, q)
                    if not ops.is_zero(r):
                        clean = False
            if not clean:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if not ops.divides(piv, D[i][j]):
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # pull the offending row into the pivot row and re-reduce
            for j in range(n):
                D[t][j] = ops.add(D[t][j], D[bad][j])
            U[t] = [ops.add(a, b) for a, b in zip(U[t], U[bad])]
            for r in Uinv:
                r[bad] = ops.sub(r[bad], r[t])
        if best is None:
            break
        if not ops.is_zero(D[t][t]):
            row_scale(t, ops.unit_part(D[t][t]))
    return U, D, V, Uinv, Vinv


def diagonal(D: Matrix, ncols: int, ops: EuclidOps) -> list[Any]:
    return [D[i][i] for i in range(min(len(D), ncols))]


def invariant_factors(A: Matrix, ncols: int, ops: EuclidOps) -> list[Any]:
    """Diagonal of the Smith form, padded with zeros to ncols entries."""
    _, D, _, _, _ = smith(A, ncols, ops)
    diag = diagonal(D, ncols, ops)
    return diag + [ops.zero] * (ncols - len(diag))


def left_kernel(A: Matrix, ncols: int, ops: EuclidOps) -> Matrix:
    """A basis of {x : x A == 0} (row vectors)."""
    U, D, _, _, _ = smith(A, ncols, ops)
    rank = sum(1 for d in diagonal(D, ncols, ops) if not ops.is_zero(d))
    return [U[i] for i in range(rank, len(A))]


def hermite(rows: Matrix, ncols: int, ops: EuclidOps) -> Matrix:
    """Row Hermite form: echelon, normalized pivots, entries above reduced."""
    pending = [list(r) for r in rows if any(not ops.is_zero(x) for x in r)]
    basis: Matrix = []
    pivots: list[int] = []
    for c in range(ncols):
        live = [r for r in pending if not ops.is_zero(r[c])]
        rest = [r for r in pending if ops.is_zero(r[c])]
        while len(live) > 1:
            live.sort(key=lambda r: ops.size(r[c]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q, _ = ops.divmod(r[c], piv[c])
                r = [ops.sub(a, ops.mul(q, b)) for a, b in zip(r, piv)]
                if ops.is_zero(r[c]):
                    if any(not ops.is_zero(x) for x in r):
                        rest.append(r)
                else:
                    nxt.append(r)
            live = nxt
        if live:
            piv = live[0]
            u = ops.inv_unit(ops.unit_part(piv[c]))
            basis.append([ops.mul(u, a) for a in piv])
            pivots.append(c)
        pending = rest
    for i in range(len(basis)):
        c = pivots[i]
        for j in range(i):
            q, _ = ops.divmod(basis[j][c], basis[i][c])
            if not ops.is_zero(q):
                basis[j] = [ops.sub(a, ops.mul(q, b)) for a, b in zip(basis[j], basis[i])]
    return basis
