"""Tower functions as linear combinations of generator monomials.

A monomial is prod x_i^{ex_i} * prod (1+x_i)^{ey_i} * S^{es} with
S = 1 + x_0^2 and integer (possibly negative) exponents.  Functions can
be expanded at P_{-1}^k and P_1^k in t = 1 - x_0, Laurent-expanded at
P_inf^j in pi = 1/x_j, and evaluated at points of the tower.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .field import FieldCtx, Fq2Elem
from .series import SeriesError, TruncSeries, ser_inv, ser_mul, ser_pow, ser_sqrt_one

__all__ = [
    "EvaluationError",
    "Monomial",
    "TowerFunction",
    "generator_expansions",
    "plus_branch",
    "expand_at_pminus1",
    "expand_at_pone",
    "expand_at_infinity",
    "pole_order_at_infinity",
    "evaluate",
    "fn_linear",
    "fn_mul_monomial",
    "pole_bound_at_infinity",
]

_KEY_WIDTH = 64


class EvaluationError(ValueError):
    """Raised when a function cannot be evaluated at the given point."""


def _strip(t: Iterable[int]) -> tuple:
    t = list(t)
    while t and t[-1] == 0:
        t.pop()
    return tuple(t)


@dataclass(frozen=True)
class Monomial:
    """Exponent data; tuples are stored without trailing zeros."""

    ex: tuple = ()
    ey: tuple = ()
    es: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ex", _strip(self.ex))
        object.__setattr__(self, "ey", _strip(self.ey))

    @classmethod
    def of(cls, x: Mapping[int, int] | None = None, y: Mapping[int, int] | None = None, s: int = 0):
        def dense(m):
            if not m:
                return ()
            out = [0] * (max(m) + 1)
            for i, e in m.items():
                out[i] += e
            return out

        return cls(tuple(dense(x)), tuple(dense(y)), s)

    @property
    def top(self) -> int:
        """Highest generator index used (-1 for S-only / constants, 0 if S used)."""
        t = max(len(self.ex), len(self.ey)) - 1
        return max(t, 0) if self.es else t

    def __mul__(self, other: "Monomial") -> "Monomial":
        n = max(len(self.ex), len(other.ex))
        m = max(len(self.ey), len(other.ey))
        ex = [(self.ex[i] if i < len(self.ex) else 0) + (other.ex[i] if i < len(other.ex) else 0) for i in range(n)]
        ey = [(self.ey[i] if i < len(self.ey) else 0) + (other.ey[i] if i < len(other.ey) else 0) for i in range(m)]
        return Monomial(tuple(ex), tuple(ey), self.es + other.es)

    def sort_key(self) -> tuple:
        pad = lambda t: t + (0,) * (_KEY_WIDTH - len(t))
        return (self.es, pad(self.ey), pad(self.ex))

    def to_json(self) -> dict:
        out = {}
        for i, e in enumerate(self.ex):
            if e:
                out[f"x{i}"] = e
        for i, e in enumerate(self.ey):
            if e:
                out[f"y{i}"] = e
        if self.es:
            out["S"] = self.es
        return out

    @classmethod
    def from_json(cls, obj: Mapping[str, int]) -> "Monomial":
        x, y, s = {}, {}, 0
        for k, e in obj.items():
            if k == "S":
                s = int(e)
            elif k[0] == "x":
                x[int(k[1:])] = int(e)
            elif k[0] == "y":
                y[int(k[1:])] = int(e)
            else:
                raise ValueError(f"unknown monomial key {k!r}")
        return cls.of(x, y, s)

    def __str__(self) -> str:
        def f(name, e):
            return name if e == 1 else f"{name}^{e}"

        parts = [f(f"x{i}", e) for i, e in enumerate(self.ex) if e]
        parts += [f(f"(1+x{i})", e) for i, e in enumerate(self.ey) if e]
        if self.es:
            parts.append(f("S", self.es))
        return "*".join(parts) if parts else "1"


ONE = Monomial()


def _x(i: int, e: int = 1) -> Monomial:
    return Monomial.of({i: e})


class TowerFunction:
    """Finite F_{p^2}-combination of monomials, viewed in T_level."""

    __slots__ = ("ctx", "level", "terms")

    def __init__(self, ctx: FieldCtx, level: int, terms: Mapping[Monomial, Fq2Elem] | None = None):
        self.ctx = ctx
        self.level = level
        clean = {}
        for m, c in (terms or {}).items():
            c = ctx(c) if not isinstance(c, Fq2Elem) else c
            if c:
                if m.top > level:
                    raise ValueError(f"monomial {m} exceeds level {level}")
                clean[m] = c
        self.terms = clean

    @classmethod
    def monomial(cls, ctx: FieldCtx, level: int, m: Monomial = ONE, c=1) -> "TowerFunction":
        return cls(ctx, level, {m: ctx(c)})

    @classmethod
    def constant(cls, ctx: FieldCtx, level: int, c=1) -> "TowerFunction":
        return cls.monomial(ctx, level, ONE, c)

    @classmethod
    def one_minus_x0(cls, ctx: FieldCtx, level: int) -> "TowerFunction":
        return cls(ctx, level, {ONE: ctx.one, _x(0): -ctx.one})

    def is_zero(self) -> bool:
        return not self.terms

    def lift(self, level: int) -> "TowerFunction":
        """Same function regarded in a higher level of the tower."""
        if level < self.level:
            raise ValueError("cannot lift to a lower level")
        f = TowerFunction.__new__(TowerFunction)
        f.ctx, f.level, f.terms = self.ctx, level, self.terms
        return f

    def sorted_terms(self) -> list[tuple[Monomial, Fq2Elem]]:
        return sorted(self.terms.items(), key=lambda mc: mc[0].sort_key())

    def __add__(self, other: "TowerFunction") -> "TowerFunction":
        return fn_linear(self.ctx.one, self, self.ctx.one, other)

    def __sub__(self, other: "TowerFunction") -> "TowerFunction":
        return fn_linear(self.ctx.one, self, -self.ctx.one, other)

    def __neg__(self) -> "TowerFunction":
        return self.scale(-self.ctx.one)

    def scale(self, c) -> "TowerFunction":
        c = self.ctx(c)
        return TowerFunction(self.ctx, self.level, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, TowerFunction):
            return fn_mul(self, other)
        if isinstance(other, Monomial):
            return fn_mul_monomial(self, other)
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TowerFunction):
            return NotImplemented
        return self.level == other.level and self.terms == other.terms

    __hash__ = None

    def to_json(self) -> list:
        return [[str(c), m.to_json()] for m, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, ctx: FieldCtx, level: int, obj: Sequence) -> "TowerFunction":
        terms = {}
        for c, m in obj:
            mono = Monomial.from_json(m)
            terms[mono] = terms.get(mono, ctx.zero) + ctx.parse(c)
        return cls(ctx, level, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        one = self.ctx.one
        return " + ".join(
            str(m) if c == one else (c.pretty() if m == ONE else f"{c.pretty()}*{m}")
            for m, c in self.sorted_terms()
        )

    def __repr__(self) -> str:
        return f"TowerFunction(level={self.level}, {self})"


def fn_linear(c1, f: TowerFunction, c2, g: TowerFunction) -> TowerFunction:
    """c1*f + c2*g."""
    if f.level != g.level:
        raise ValueError("level mismatch")
    ctx = f.ctx
    c1, c2 = ctx(c1), ctx(c2)
    terms = {m: v * c1 for m, v in f.terms.items()} if c1 != ctx.one else dict(f.terms)
    if c2:
        for m, v in g.terms.items():
            terms[m] = terms.get(m, ctx.zero) + v * c2
    return TowerFunction(ctx, f.level, terms)


def fn_mul_monomial(f: TowerFunction, m) -> TowerFunction:
    """Multiply by a monomial, or by the binomial 1 - x_0 when ``m == "1-x0"``."""
    if isinstance(m, str):
        if m != "1-x0":
            raise ValueError(f"unsupported factor {m!r}")
        return fn_mul(f, TowerFunction.one_minus_x0(f.ctx, f.level))
    if m.top > f.level:
        raise ValueError("level mismatch")
    return TowerFunction(f.ctx, f.level, {mm * m: c for mm, c in f.terms.items()})


def fn_mul(f: TowerFunction, g: TowerFunction) -> TowerFunction:
    if f.level != g.level:
        raise ValueError("level mismatch")
    ctx = f.ctx
    terms: dict = {}
    for m1, c1 in f.terms.items():
        for m2, c2 in g.terms.items():
            m = m1 * m2
            terms[m] = terms.get(m, ctx.zero) + c1 * c2
    return TowerFunction(ctx, f.level, terms)


# ---------------------------------------------------------------------------
# expansions at P_{+-1}


class _PlusBranchCache:
    """Per-prime cache of the P_1-branch expansions X_0, X_1, ... in t."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict[int, tuple[int, list[TruncSeries]]] = {}

    def get(self, ctx: FieldCtx, k: int, order: int) -> list[TruncSeries]:
        prec = order + 1
        hit = self._data.get(ctx.p)
        if hit is not None and hit[0] >= prec and len(hit[1]) > k:
            return [s.truncate(prec) for s in hit[1][: k + 1]]
        with self._lock:
            hit = self._data.get(ctx.p)
            old_prec, old = hit if hit else (0, [])
            new_prec = max(prec, old_prec)
            if old_prec >= new_prec and len(old) > k:
                series = old
            else:
                # regrow at doubled order when extending precision
                if old_prec and new_prec > old_prec:
                    new_prec = max(new_prec, 2 * old_prec)
                series = _compute_plus_branch(ctx, max(k, len(old) - 1), new_prec)
                self._data[ctx.p] = (new_prec, series)
        return [s.truncate(prec) for s in series[: k + 1]]


def _compute_plus_branch(ctx: FieldCtx, k: int, prec: int) -> list[TruncSeries]:
    x = TruncSeries.from_coeffs(ctx, [1, -1], prec=prec)
    out = [x]
    for _ in range(k):
        b = ser_mul(ser_mul(x, x) + 1, ser_inv(x.scale(2)))
        x = ser_sqrt_one(b)
        out.append(x)
    return out


_PLUS = _PlusBranchCache()


def plus_branch(ctx: FieldCtx, k: int, order: int) -> list[TruncSeries]:
    """Expansions of x_0..x_k around P_1^k, to O(t^(order+1))."""
    return _PLUS.get(ctx, k, order)


def generator_expansions(ctx: FieldCtx, k: int, order: int) -> list[TruncSeries]:
    """Expansions of x_0..x_k around P_{-1}^k (k >= 1): x_k takes the other root."""
    if k < 1:
        raise ValueError("P_{-1}^k expansions in t = 1 - x_0 need k >= 1")
    xs = plus_branch(ctx, k, order)
    return xs[:-1] + [-xs[-1]]


def _expand(f: TowerFunction, gens: list[TruncSeries], order: int, ctx: FieldCtx) -> TruncSeries:
    prec = order + 1
    total = TruncSeries.zero(ctx, prec)
    for m, c in f.terms.items():
        total = total + _expand_monomial(m, gens, ctx).scale(c)
    return total.truncate(prec)


def _factor_power(base: TruncSeries, e: int) -> TruncSeries:
    if e < 0 and base.is_zero():
        raise SeriesError("pole at expansion point")
    return ser_pow(base, e)


def _expand_monomial(m: Monomial, gens: list[TruncSeries], ctx: FieldCtx) -> TruncSeries:
    prec = gens[0].prec
    acc = TruncSeries.one(ctx, prec)
    for i, e in enumerate(m.ex):
        if e:
            acc = ser_mul(acc, _factor_power(gens[i], e))
    for i, e in enumerate(m.ey):
        if e:
            acc = ser_mul(acc, _factor_power(gens[i] + 1, e))
    if m.es:
        acc = ser_mul(acc, _factor_power(ser_mul(gens[0], gens[0]) + 1, m.es))
    return acc


def _work_order(f: TowerFunction, order: int, k: int) -> int:
    # negative powers of 1+x_k (valuation 2^k at P_{-1}^k) eat precision
    extra = 0
    for m in f.terms:
        if len(m.ey) > k and m.ey[k] < 0:
            extra = max(extra, (1 - m.ey[k]) * 2**k)
    return order + extra


def expand_at_pminus1(f: TowerFunction, order: int) -> TruncSeries:
    """Expansion of f around P_{-1}^level in t = 1 - x_0, to O(t^(order+1))."""
    k = f.level
    work = _work_order(f, order, k)
    gens = generator_expansions(f.ctx, k, work)
    return _expand(f, gens, work, f.ctx).truncate(order + 1)


def expand_at_pone(f: TowerFunction, order: int) -> TruncSeries:
    """Expansion of f around P_1^level (all generators on the +1 branch)."""
    gens = plus_branch(f.ctx, max(f.level, 0), order)
    return _expand(f, gens, order, f.ctx)


# ---------------------------------------------------------------------------
# expansions at P_inf


def infinity_generators(ctx: FieldCtx, j: int, n_terms: int) -> list[TruncSeries]:
    """Laurent expansions of x_0..x_j in pi = 1/x_j, each with n_terms terms.

    x_{k-1} = x_k^2 (1 + sqrt(1 - x_k^-4)), the branch with x_{k-1} ~ 2 x_k^2.
    """
    y = TruncSeries(ctx, -1, [1], prec=-1 + n_terms)
    out = [y]
    for _ in range(j):
        y2 = ser_mul(y, y)
        inv4 = ser_inv(ser_mul(y2, y2))
        root = ser_sqrt_one((1 - inv4).truncate(n_terms))
        y = ser_mul(y2, root + 1)
        out.append(y)
    return out[::-1]


def expand_at_infinity(f: TowerFunction, order: int) -> TruncSeries:
    """Laurent expansion of f at P_inf^level in pi = 1/x_level.

    ``order`` is the number of significant terms kept per generator.  Raises
    SeriesError("precision exhausted") if f vanishes to the available
    precision.
    """
    ctx = f.ctx
    gens = infinity_generators(ctx, f.level, order + 1)
    total = None
    for m, c in f.terms.items():
        term = _expand_monomial_inf(m, gens, ctx).scale(c)
        total = term if total is None else total + term
    if total is None or total.is_zero():
        raise SeriesError("precision exhausted")
    return total


def _expand_monomial_inf(m: Monomial, gens: list[TruncSeries], ctx: FieldCtx) -> TruncSeries:
    n = len(gens[0].ca)
    acc = TruncSeries.one(ctx, n)
    for i, e in enumerate(m.ex):
        if e:
            acc = ser_mul(acc, ser_pow(gens[i], e))
    for i, e in enumerate(m.ey):
        if e:
            acc = ser_mul(acc, ser_pow(gens[i] + 1, e))
    if m.es:
        acc = ser_mul(acc, ser_pow(ser_mul(gens[0], gens[0]) + 1, m.es))
    return acc


def pole_order_at_infinity(f: TowerFunction, order: int = 16, max_order: int = 4096) -> int:
    """Exact pole order of f at P_inf^level, regrowing precision as needed."""
    while True:
        try:
            return -expand_at_infinity(f, order).val
        except SeriesError:
            if order >= max_order or f.is_zero():
                raise
            order *= 2


def pole_bound_at_infinity(f: TowerFunction) -> int:
    """Max over monomials of the monomial pole order at P_inf^level."""
    j = f.level
    best = None
    for m in f.terms:
        v = sum(e * 2 ** (j - i) for i, e in enumerate(m.ex))
        v += sum(e * 2 ** (j - i) for i, e in enumerate(m.ey))
        v += m.es * 2 ** (j + 1)
        best = v if best is None else max(best, v)
    return 0 if best is None else best


# ---------------------------------------------------------------------------
# evaluation


def check_point(pt: Sequence[Fq2Elem]) -> None:
    for i in range(len(pt) - 1):
        a, b = pt[i], pt[i + 1]
        if b * b * (a + a) != a * a + 1:
            raise EvaluationError("not a point of the tower")


def evaluate(f: TowerFunction, pt: Sequence[Fq2Elem], check: bool = True) -> Fq2Elem:
    """Value of f at the point (alpha_0, ..., alpha_k), k >= level."""
    ctx = f.ctx
    if len(pt) < f.level + 1:
        raise EvaluationError("point has fewer coordinates than the function level")
    if check:
        check_point(pt)
    s_val = pt[0] * pt[0] + 1

    def power(base: Fq2Elem, e: int) -> Fq2Elem:
        if not base:
            if e < 0:
                raise EvaluationError("function has pole at point")
            return ctx.zero if e > 0 else ctx.one
        return base**e

    total = ctx.zero
    for m, c in f.terms.items():
        v = c
        for i, e in enumerate(m.ex):
            if e:
                v = v * power(pt[i], e)
        for i, e in enumerate(m.ey):
            if e:
                v = v * power(pt[i] + 1, e)
        if m.es:
            v = v * power(s_val, m.es)
        total = total + v
    return total
