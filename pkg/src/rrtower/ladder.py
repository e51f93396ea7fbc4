"""Hermitian bases of L(s P_inf^j) for every s at once.

The construction runs in two sweeps.  Going down (``build_updown``) it
produces, for each level k < j and branch n, the divisors A^k_n(s) and
B^k_n(s) whose P_inf coefficients are floor((s + a)/2^(j-k)) and
floor((s + b)/2^(j-k)); only the offsets a, b and the s-free remainder are
stored.  Going up (``base_rows`` -> ``level_step2`` / ``level_step3``) it
builds basis rows (b_m, c_m, w_m) of those spaces, peeling off the
P_{-1}^k conditions one order at a time.

Every row carries its power series expansion at P_1^k (``plus``) and,
while peeling at level k, at P_{-1}^k (``minus``).  These are updated by
the same linear operations as the symbolic functions, so the integer data
c_m can be computed without materialising the functions at all
(``symbolic=False``), which is what makes level 8 tractable.
"""
from __future__ import annotations

import functools
import logging
import threading
from dataclasses import dataclass, field, replace
from typing import Optional

from .field import FieldCtx, make_field_ctx
from .funcrep import Monomial, TowerFunction, expand_at_pone, fn_linear, fn_mul_monomial, plus_branch
from .series import SeriesError, TruncSeries, ser_pow
from .tower import Divisor, genus, principal_one_plus_x, principal_x, restrict

__all__ = [
    "LadderError",
    "PrecisionExhausted",
    "Branch",
    "UpDownTables",
    "LadderRow",
    "TwistedLadder",
    "MasterLadder",
    "build_updown",
    "base_rows",
    "sigma_order",
    "peel_once",
    "level_step2",
    "level_step3",
    "twisted_ladder",
    "master_ladder",
    "basis",
    "dim",
]

log = logging.getLogger(__name__)


class LadderError(AssertionError):
    """An invariant that the construction guarantees has failed (a bug)."""


class PrecisionExhausted(SeriesError):
    """Series precision too small for the requested peel order."""


# ---------------------------------------------------------------------------
# divisor ladder


@dataclass(frozen=True)
class Branch:
    """Data of A^k_n(s), B^k_n(s) with the P_inf coefficient kept symbolic."""

    k: int
    n: int
    a: int
    b: int
    A: Divisor
    B: Divisor
    alpha: int
    gamma: int
    delta: int


@dataclass(frozen=True)
class UpDownTables:
    j: int
    levels: tuple  # levels[k][n-1] -> Branch

    def branch(self, k: int, n: int) -> Branch:
        return self.levels[k][n - 1]

    def a(self, k: int, n: int) -> int:
        return self.branch(k, n).a

    def b(self, k: int, n: int) -> int:
        return self.branch(k, n).b


def _check_odd_residues(values, modulus: int, what: str) -> None:
    got = sorted(v % modulus for v in values)
    if got != list(range(1, modulus, 2)):
        raise LadderError(f"ladder construction inconsistency: {what} mod {modulus} = {got}")


@functools.lru_cache(maxsize=None)
def build_updown(j: int) -> UpDownTables:
    """Divisor offsets and s-free parts for all levels k = j-1 .. 0."""
    if j < 1:
        raise ValueError("build_updown needs j >= 1")
    # A^{j-1}_1(s) = [s P_inf^j + (x_j)] restricted, P_inf offset -1
    current = [(-1, restrict(principal_x(j).without_inf()))]
    levels: list = [None] * j
    for k in range(j - 1, -1, -1):
        width = 2 ** (j - k)
        opx = principal_one_plus_x(k).without_inf()
        branches = []
        for n, (a, A) in enumerate(current, start=1):
            alpha = A.a_m1
            gamma, delta = divmod(-alpha, 2**k)
            B = A + gamma * opx + Divisor.from_map(k, 0, {}, delta)
            if B.a_m1 != 0:
                raise LadderError("ladder construction inconsistency: B has a P_{-1} component")
            b = a - width * gamma
            branches.append(Branch(k, n, a, b, A, B, alpha, gamma, delta))
        _check_odd_residues([br.a for br in branches], width, f"a at level {k}")
        _check_odd_residues([br.b for br in branches], width, f"b at level {k}")
        levels[k] = tuple(branches)
        if k == 0:
            break
        px = principal_x(k).without_inf()
        nxt = []
        for n in range(1, 2 * len(branches) + 1):
            parent = branches[(n + 1) // 2 - 1]
            if n % 2:
                nxt.append((parent.b, restrict(parent.B)))
            else:
                nxt.append((parent.b - width, restrict(parent.B + px)))
        current = nxt
    return UpDownTables(j, tuple(levels))


# ---------------------------------------------------------------------------
# basis rows


@dataclass(frozen=True)
class LadderRow:
    """One family x_0^l * func, 0 <= l <= floor((s - b)/2^j) - d."""

    m: int
    b: int
    d: int
    func: Optional[TowerFunction]
    plus: TruncSeries
    minus: Optional[TruncSeries] = None

    def l_max(self, s: int, j: int) -> int:
        return (s - self.b) // 2**j - self.d


def base_rows(ctx: FieldCtx, j: int, tables: UpDownTables, order: int, symbolic: bool = True) -> list[LadderRow]:
    """Level-0 rows z_m = x_0^{-beta_-2} (1 + x_0^2)^{-beta_-1}."""
    rows = []
    mod = 2**j
    for br in tables.levels[0]:
        beta2, beta1 = br.B.coef(-2), br.B.coef(-1)
        q, bm = divmod(-br.b, mod)
        d = q - beta2 - 2 * beta1
        f = TowerFunction.monomial(ctx, 0, Monomial.of({0: -beta2}, s=-beta1))
        rows.append(LadderRow(br.n, bm, d, f if symbolic else None, expand_at_pone(f, order)))
    _check_odd_residues([r.b for r in rows], mod, "base b_m")
    return rows


def sigma_order(rows) -> list[int]:
    """Row positions sorted so that (d, b) strictly decreases.

    With this order l_{sigma(1)}(s) <= l_{sigma(2)}(s) <= ... for every s.
    Accepts LadderRow objects or (d, b) pairs.
    """
    keys = [(r.d, r.b) if isinstance(r, LadderRow) else tuple(r) for r in rows]
    if len(set(keys)) != len(keys):
        raise LadderError("ordering not unique")
    return sorted(range(len(keys)), key=lambda i: keys[i], reverse=True)


def peel_once(rows: list[LadderRow], k: int, eps: int) -> list[LadderRow]:
    """Pass from a basis of L(B - eps P) to one of L(B - (eps+1) P), P = P_{-1}^k."""
    ctx = rows[0].plus.ctx
    coefs = []
    for r in rows:
        s = r.minus
        if s is None:
            raise LadderError("row has no expansion at P_{-1}^k")
        if s.prec <= eps:
            raise PrecisionExhausted("precision exhausted")
        if not s.is_zero() and s.val < eps:
            raise LadderError(f"valuation violation (bug): v = {s.val} < {eps}")
        coefs.append(s.coeff(eps))
    order = sigma_order(rows)
    pivot = None
    for i in reversed(order):
        if coefs[i]:
            pivot = i
            break
    if pivot is None:
        raise LadderError("expected nonzero order-eps coefficient missing")
    piv = rows[pivot]
    inv_piv = 1 / coefs[pivot]
    one_minus_x0 = None
    out = []
    for i, r in enumerate(rows):
        if i == pivot:
            func = None
            if r.func is not None:
                one_minus_x0 = one_minus_x0 or TowerFunction.one_minus_x0(ctx, r.func.level)
                func = r.func * one_minus_x0
            out.append(replace(r, d=r.d + 1, func=func, plus=r.plus.shift(1), minus=r.minus.shift(1)))
        elif coefs[i]:
            lam = coefs[i] * inv_piv
            func = None if r.func is None else fn_linear(ctx.one, r.func, -lam, piv.func)
            out.append(
                replace(
                    r,
                    func=func,
                    plus=r.plus - piv.plus.scale(lam),
                    minus=r.minus - piv.minus.scale(lam),
                )
            )
        else:
            out.append(r)
    return out


def level_step2(
    ctx: FieldCtx, k: int, tables: UpDownTables, rows: list[LadderRow], order: int
) -> list[LadderRow]:
    """Bases of L(B^k_n) -> bases of L(A^k_n) for every branch n at level k."""
    size = 2**k
    xk = plus_branch(ctx, k, order)[k]
    factors: dict[int, TruncSeries] = {}
    out: list[LadderRow] = []
    for br in tables.levels[k]:
        chunk = rows[(br.n - 1) * size : br.n * size]
        for eps in range(br.delta):
            chunk = peel_once(chunk, k, eps)
        g = br.gamma
        if g and g not in factors:
            factors[g] = ser_pow(xk + 1, g)
        for r in chunk:
            if g:
                func = None if r.func is None else fn_mul_monomial(r.func, Monomial.of(y={k: g}))
                r = replace(r, func=func, plus=r.plus * factors[g])
            out.append(replace(r, minus=None))
    return out


def level_step3(ctx: FieldCtx, k: int, rows: list[LadderRow], order: int) -> list[LadderRow]:
    """Bases of L(A^k_{2n-1}), L(A^k_{2n}) -> basis of L(B^{k+1}_n)."""
    size = 2**k
    x_next = plus_branch(ctx, k + 1, order)[k + 1]
    mono = Monomial.of({k + 1: 1})
    out = []
    for idx, r in enumerate(rows):
        m = idx + 1
        n = (m - 1) // (2 * size) + 1
        func = None if r.func is None else r.func.lift(k + 1)
        if m <= (2 * n - 1) * size:
            # level-k function: its expansion at P_{-1}^{k+1} is the one at P_1^k
            out.append(replace(r, func=func, minus=r.plus))
        else:
            if func is not None:
                func = fn_mul_monomial(func, mono)
            prod = r.plus * x_next
            out.append(replace(r, func=func, plus=prod, minus=-prod))
    return out


# ---------------------------------------------------------------------------
# twisted and master ladders


@dataclass(frozen=True)
class TwistedLadder:
    """Basis data of L([s P_inf^j + (x_j)] restricted to T_{j-1}), keyed by odd m."""

    j: int
    c: dict
    w: dict  # odd m -> TowerFunction at level j-1, or None
    rows: tuple = field(repr=False, default=())


def _run_twisted(ctx: FieldCtx, j: int, order: int, symbolic: bool) -> list[LadderRow]:
    tables = build_updown(j)
    rows = base_rows(ctx, j, tables, order, symbolic)
    for k in range(j):
        rows = level_step2(ctx, k, tables, rows, order)
        if k < j - 1:
            rows = level_step3(ctx, k, rows, order)
    return rows


def twisted_ladder(ctx: FieldCtx, j: int, symbolic: bool = True, order: Optional[int] = None) -> TwistedLadder:
    if j < 1:
        raise ValueError("twisted ladder needs j >= 1")
    order = order or 2 ** (j - 1) + 8
    while True:
        try:
            rows = _run_twisted(ctx, j, order, symbolic)
            break
        except PrecisionExhausted:
            order *= 2
            log.info("regrowing expansions to order %d (j=%d)", order, j)
    _check_odd_residues([r.b for r in rows], 2**j, "final b_m")
    c = {r.b: r.d for r in rows}
    w = {r.b: r.func for r in rows}
    return TwistedLadder(j, dict(sorted(c.items())), dict(sorted(w.items())), tuple(rows))


@dataclass(frozen=True)
class MasterLadder:
    """c_m^(j) and w_m^(j), 0 <= m < 2^j; w entries are None for c-only ladders."""

    p: int
    j: int
    c: tuple
    w: tuple

    @property
    def symbolic(self) -> bool:
        return all(f is not None for f in self.w)

    def pole_orders(self) -> list[int]:
        return [2**self.j * c + m for m, c in enumerate(self.c)]

    def l_max(self, m: int, s: int) -> int:
        return (s - m) // 2**self.j - self.c[m]


_LADDERS: dict[tuple[int, int, bool], MasterLadder] = {}
_LADDER_LOCK = threading.Lock()


def _master(p: int, j: int, symbolic: bool) -> MasterLadder:
    hit = _LADDERS.get((p, j, symbolic))
    if hit is None and not symbolic:
        sym = _LADDERS.get((p, j, True))
        if sym is not None:
            hit = MasterLadder(p, j, sym.c, (None,) * len(sym.c))
    if hit is not None:
        return hit
    ctx = make_field_ctx(p)
    if j == 0:
        one = TowerFunction.constant(ctx, 0) if symbolic else None
        result = MasterLadder(p, 0, (0,), (one,))
    else:
        prev = _master(p, j - 1, symbolic)
        tw = twisted_ladder(ctx, j, symbolic)
        xj = Monomial.of({j: 1})
        c, w = [], []
        for m in range(2**j):
            if m % 2 == 0:
                c.append(prev.c[m // 2])
                f = prev.w[m // 2]
                w.append(None if f is None else f.lift(j))
            else:
                c.append(tw.c[m])
                f = tw.w[m]
                w.append(None if f is None else fn_mul_monomial(f.lift(j), xj))
        result = MasterLadder(p, j, tuple(c), tuple(w))
    with _LADDER_LOCK:
        _LADDERS.setdefault((p, j, symbolic), result)
    return result


def master_ladder(ctx: FieldCtx | int, j: int, symbolic: bool = True) -> MasterLadder:
    """The ladder (c_m^(j), w_m^(j)) giving Hermitian bases of L(s P_inf^j).

    Results are memoised per (p, j, symbolic).  ``symbolic=False`` skips the
    functions and only computes the integers c_m.
    """
    p = ctx if isinstance(ctx, int) else ctx.p
    if j < 0:
        raise ValueError("level must be non-negative")
    return _master(p, j, symbolic)


def basis(ladder: MasterLadder, s: int) -> list[TowerFunction]:
    """x_0^l w_m for 0 <= l <= floor((s-m)/2^j) - c_m, ordered by pole order."""
    if not ladder.symbolic:
        raise ValueError("basis functions need a symbolic ladder")
    out = []
    for m, l in basis_index(ladder, s):
        f = ladder.w[m]
        out.append(fn_mul_monomial(f, Monomial.of({0: l})) if l else f)
    return out


def basis_index(ladder: MasterLadder, s: int) -> list[tuple[int, int]]:
    """(m, l) pairs of the basis, sorted by pole order 2^j(c_m + l) + m."""
    j = ladder.j
    pairs = [(m, l) for m in range(2**j) for l in range(ladder.l_max(m, s) + 1)]
    return sorted(pairs, key=lambda ml: 2**j * (ladder.c[ml[0]] + ml[1]) + ml[0])


def dim(ladder: MasterLadder, s: int) -> int:
    """dim L(s P_inf^j) counted from the ladder."""
    return sum(max(0, ladder.l_max(m, s) + 1) for m in range(2**ladder.j))


def check_riemann_roch(ladder: MasterLadder, s: int) -> bool:
    g = genus(ladder.j)
    return s < 2 * g - 1 or dim(ladder, s) == s - g + 1
