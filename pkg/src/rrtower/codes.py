"""One-point AG codes C_L(s P_inf^j, D^j) over F_{p^2}."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .field import FieldCtx, Fq2Elem, fq2_sqrt, make_field_ctx
from .funcrep import EvaluationError, evaluate
from .ladder import basis, master_ladder

__all__ = [
    "GenMatrix",
    "split_places",
    "generator_matrix",
    "rank",
    "row_reduce",
    "min_distance_bruteforce",
    "BRUTE_FORCE_LIMIT",
]

BRUTE_FORCE_LIMIT = 10**7
MAX_BRUTE_DIM = 14


def _excluded(ctx: FieldCtx) -> set:
    i = ctx.i_elem
    return {ctx.zero, ctx.one, -ctx.one, i, -i}


def split_places(j: int, ctx: FieldCtx) -> list[tuple]:
    """Rational points (alpha_0, ..., alpha_j) over completely split alpha_0.

    alpha_0 is admissible if it avoids {0, +-1, +-i} and every step value
    (alpha^2 + 1)/(2 alpha) along the tree is a nonzero square; each such
    alpha_0 contributes 2^j points.
    """
    bad = _excluded(ctx)
    places = []
    for a0 in ctx.elements():
        if a0 in bad:
            continue
        layer = [(a0,)]
        ok = True
        for _ in range(j):
            nxt = []
            for pt in layer:
                a = pt[-1]
                v = (a * a + 1) / (a + a)
                r = fq2_sqrt(v) if v else None
                if r is None:
                    ok = False
                    break
                nxt.append(pt + (r,))
                nxt.append(pt + (-r,))
            if not ok:
                break
            layer = nxt
        if ok:
            places.extend(layer)
    places.sort(key=lambda pt: [x.key() for x in pt])
    return places


@dataclass(frozen=True)
class GenMatrix:
    """Evaluation matrix: row i holds basis function i at every place."""

    p: int
    j: int
    s: int
    rows: tuple
    places: tuple

    @property
    def ctx(self) -> FieldCtx:
        return make_field_ctx(self.p)

    @property
    def n(self) -> int:
        return len(self.places)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def rank(self) -> int:
        return rank(self.rows, self.ctx)

    def designed_distance(self) -> int:
        return self.n - self.s

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.rank(),
            "designed_d": self.designed_distance(),
            "matrix": [[str(x) for x in row] for row in self.rows],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in self.rows:
            w.writerow([str(x) for x in row])
        return buf.getvalue()


def generator_matrix(j: int, s: int, p: int = 3) -> GenMatrix:
    ctx = make_field_ctx(p)
    places = split_places(j, ctx)
    if not places:
        raise ValueError(f"no completely split places at level {j} over F_{p}^2")
    if s < 0:
        raise ValueError("s must be non-negative")
    funcs = basis(master_ladder(ctx, j), s)
    rows = []
    for f in funcs:
        try:
            rows.append(tuple(evaluate(f, pt, check=False) for pt in places))
        except EvaluationError as exc:
            raise RuntimeError("internal: basis has pole at split place") from exc
    return GenMatrix(p, j, s, tuple(rows), tuple(places))


def row_reduce(rows: Sequence[Sequence[Fq2Elem]], ctx: FieldCtx) -> list[list[Fq2Elem]]:
    """Reduced row echelon form (nonzero rows only)."""
    m = [list(r) for r in rows]
    if not m:
        return []
    ncols = len(m[0])
    out_rank = 0
    for col in range(ncols):
        piv = next((r for r in range(out_rank, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[out_rank], m[piv] = m[piv], m[out_rank]
        inv = 1 / m[out_rank][col]
        m[out_rank] = [x * inv for x in m[out_rank]]
        for r in range(len(m)):
            if r != out_rank and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[out_rank])]
        out_rank += 1
        if out_rank == len(m):
            break
    return m[:out_rank]


def rank(rows: Sequence[Sequence[Fq2Elem]], ctx: FieldCtx) -> int:
    return len(row_reduce(rows, ctx))


def min_distance_bruteforce(M: GenMatrix | Sequence[Sequence[Fq2Elem]], ctx: FieldCtx | None = None) -> int:
    """Minimum Hamming weight over all nonzero codewords, by enumeration."""
    if isinstance(M, GenMatrix):
        ctx = M.ctx
        rows = M.rows
    else:
        rows = M
        if ctx is None:
            ctx = rows[0][0].ctx
    basis_rows = row_reduce(rows, ctx)
    k = len(basis_rows)
    q = ctx.order
    if k == 0:
        raise ValueError("zero code has no minimum distance")
    if k > MAX_BRUTE_DIM or q**k > BRUTE_FORCE_LIMIT:
        raise ValueError("instance too large for brute force")
    p, d = ctx.p, ctx.d
    ga = np.array([[x.a for x in r] for r in basis_rows], dtype=np.int64)
    gb = np.array([[x.b for x in r] for r in basis_rows], dtype=np.int64)
    total = q**k
    powers = q ** np.arange(k, dtype=np.int64)
    best = len(basis_rows[0])
    batch = 1 << 16
    for start in range(1, total, batch):
        idx = np.arange(start, min(start + batch, total), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % q
        ma, mb = digits // p, digits % p
        ca = (ma @ ga + d * (mb @ gb)) % p
        cb = (ma @ gb + mb @ ga) % p
        w = np.count_nonzero((ca != 0) | (cb != 0), axis=1)
        best = min(best, int(w.min()))
    return best
