"""Truncated Laurent series over F_{p^2} in a local parameter t.

A :class:`TruncSeries` stores ``sum_k c_k t^(val+k) + O(t^prec)`` with
``prec = val + len(coeffs)``.  Nonzero series are normalised so the
leading stored coefficient is nonzero; a series that vanishes to its
precision keeps ``prec`` so "zero" and "not enough precision" stay
distinguishable.

Coefficients live in two integer numpy vectors (the a and b parts of
a + b*u).  Products use ``np.convolve`` with int64 when the accumulated
sums fit, object arrays otherwise.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .field import FieldCtx, Fq2Elem, fq2_inv

__all__ = [
    "SeriesError",
    "TruncSeries",
    "ser_mul",
    "ser_inv",
    "ser_sqrt_one",
    "ser_pow",
]

_INT64_LIMIT = 2**62


class SeriesError(ArithmeticError):
    """Raised when a series operation is undefined at the available precision."""


def _dtype(p: int, length: int):
    if max(length, 1) * (p - 1) ** 2 * 2 < _INT64_LIMIT:
        return np.int64
    return object


def _arr(values, p: int, length: int) -> np.ndarray:
    return np.asarray(values, dtype=_dtype(p, length)) % p


class TruncSeries:
    """Immutable truncated Laurent series over ``ctx``.

    Parameters
    ----------
    ctx : FieldCtx
    val : int
        Exponent of the first stored coefficient.
    ca, cb : array-like of int
        Components of the coefficients c_k = ca[k] + cb[k]*u.
    prec : int, optional
        Absolute precision (exclusive); defaults to ``val + len(ca)``.
    """

    __slots__ = ("ctx", "val", "ca", "cb")

    def __init__(self, ctx: FieldCtx, val: int, ca, cb=None, prec: int | None = None):
        p = ctx.p
        ca = np.asarray(ca)
        n = len(ca)
        if cb is None:
            cb = np.zeros(n, dtype=np.int64)
        dt = _dtype(p, n)
        ca = np.asarray(ca, dtype=dt) % p
        cb = np.asarray(cb, dtype=dt) % p
        if prec is None:
            prec = val + n
        else:
            keep = max(0, prec - val)
            ca, cb = ca[:keep], cb[:keep]
            if len(ca) < keep:
                pad = keep - len(ca)
                ca = np.concatenate([ca, np.zeros(pad, dtype=dt)])
                cb = np.concatenate([cb, np.zeros(pad, dtype=dt)])
        nz = np.flatnonzero((ca != 0) | (cb != 0))
        if len(nz) == 0:
            self.ctx, self.val = ctx, prec
            self.ca = ca[:0]
            self.cb = cb[:0]
            return
        first = int(nz[0])
        self.ctx = ctx
        self.val = val + first
        self.ca = ca[first:]
        self.cb = cb[first:]

    # constructors ---------------------------------------------------------
    @classmethod
    def from_coeffs(cls, ctx: FieldCtx, coeffs: Sequence, val: int = 0, prec: int | None = None):
        """Build from a list of Fq2Elem / int / (a, b) coefficients."""
        a, b = [], []
        for c in coeffs:
            if isinstance(c, Fq2Elem):
                a.append(c.a)
                b.append(c.b)
            elif isinstance(c, tuple):
                a.append(c[0])
                b.append(c[1])
            else:
                a.append(int(c))
                b.append(0)
        return cls(ctx, val, a, b, prec=prec)

    @classmethod
    def constant(cls, ctx: FieldCtx, c, prec: int) -> "TruncSeries":
        c = ctx(c) if not isinstance(c, Fq2Elem) else c
        return cls(ctx, 0, [c.a], [c.b], prec=prec)

    @classmethod
    def one(cls, ctx: FieldCtx, prec: int) -> "TruncSeries":
        return cls.constant(ctx, 1, prec)

    @classmethod
    def zero(cls, ctx: FieldCtx, prec: int) -> "TruncSeries":
        return cls(ctx, prec, [], [], prec=prec)

    @classmethod
    def monomial(cls, ctx: FieldCtx, k: int, prec: int, c=1) -> "TruncSeries":
        """c * t^k + O(t^prec)."""
        c = ctx(c)
        return cls(ctx, k, [c.a], [c.b], prec=prec)

    # basic properties -----------------------------------------------------
    @property
    def prec(self) -> int:
        return self.val + len(self.ca)

    @property
    def N(self) -> int:
        """Relative truncation order (number of stored terms minus one)."""
        return len(self.ca) - 1

    def is_zero(self) -> bool:
        """True if the series vanishes to its precision."""
        return len(self.ca) == 0

    def lead(self) -> Fq2Elem:
        if self.is_zero():
            raise SeriesError("zero series has no leading coefficient")
        return Fq2Elem(self.ctx, int(self.ca[0]), int(self.cb[0]))

    def coeff(self, k: int) -> Fq2Elem:
        """Coefficient of t^k (absolute exponent)."""
        if k >= self.prec:
            raise SeriesError(f"coefficient t^{k} beyond precision O(t^{self.prec})")
        if k < self.val:
            return self.ctx.zero
        i = k - self.val
        return Fq2Elem(self.ctx, int(self.ca[i]), int(self.cb[i]))

    def coeffs(self) -> list[Fq2Elem]:
        return [Fq2Elem(self.ctx, int(a), int(b)) for a, b in zip(self.ca, self.cb)]

    def truncate(self, prec: int) -> "TruncSeries":
        if prec >= self.prec:
            return self
        return TruncSeries(self.ctx, self.val, self.ca, self.cb, prec=prec)

    def with_rel_prec(self, n: int) -> "TruncSeries":
        """Keep at most n stored terms."""
        return self.truncate(self.val + n)

    # ring operations ------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(self.ctx, other, self.prec)
        prec = min(self.prec, other.prec)
        lo = min(self.val, other.val)
        if lo >= prec:
            return TruncSeries.zero(self.ctx, prec)
        n = prec - lo
        dt = _dtype(self.ctx.p, n)
        a = np.zeros(n, dtype=dt)
        b = np.zeros(n, dtype=dt)
        for s in (self, other):
            m = min(len(s.ca), prec - s.val)
            if m > 0:
                off = s.val - lo
                a[off:off + m] += s.ca[:m]
                b[off:off + m] += s.cb[:m]
        return TruncSeries(self.ctx, lo, a, b)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.ctx, self.val, -self.ca, -self.cb, prec=self.prec)

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(self.ctx, other, self.prec)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        """Multiply by a field scalar."""
        c = self.ctx(c)
        if not c:
            return TruncSeries.zero(self.ctx, self.prec)
        p, d = self.ctx.p, self.ctx.d
        a = (c.a * self.ca) % p + ((d * c.b) % p * self.cb) % p
        b = (c.a * self.cb) % p + (c.b * self.ca) % p
        return TruncSeries(self.ctx, self.val, a, b)

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by t^k."""
        if self.is_zero():
            return TruncSeries.zero(self.ctx, self.prec + k)
        return TruncSeries(self.ctx, self.val + k, self.ca, self.cb)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return ser_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        return ser_pow(self, n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.val == other.val
            and self.prec == other.prec
            and np.array_equal(self.ca, other.ca)
            and np.array_equal(self.cb, other.cb)
        )

    def agrees_with(self, other: "TruncSeries") -> bool:
        """Equality up to the smaller of the two precisions."""
        return (self - other).is_zero()

    __hash__ = None

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs()):
            if not c:
                continue
            e = self.val + k
            c = c.pretty()
            if e == 0:
                terms.append(c)
                continue
            mono = "t" if e == 1 else f"t^{e}"
            terms.append(mono if c == "1" else f"{c}*{mono}")
        terms.append(f"O(t^{self.prec})")
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"TruncSeries({self})"


def _conv(ctx: FieldCtx, a1, b1, a2, b2, n: int):
    """First n coefficients of the product of two coefficient vectors."""
    p, d = ctx.p, ctx.d
    a1, b1, a2, b2 = a1[:n], b1[:n], a2[:n], b2[:n]
    aa = np.convolve(a1, a2)[:n] % p
    bb = np.convolve(b1, b2)[:n] % p
    ab = np.convolve(a1, b2)[:n]
    ba = np.convolve(b1, a2)[:n]
    return (aa + d * bb) % p, (ab + ba) % p


def ser_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Product; relative precision is the smaller of the two."""
    ctx = a.ctx
    if a.is_zero() or b.is_zero():
        # absolute precision of the product of zero-to-prec with something
        other = b if a.is_zero() else a
        z = a if a.is_zero() else b
        if other.is_zero():
            return TruncSeries.zero(ctx, a.prec + b.prec)
        return TruncSeries.zero(ctx, z.prec + other.val)
    n = min(len(a.ca), len(b.ca))
    ra, rb = _conv(ctx, a.ca, a.cb, b.ca, b.cb, n)
    return TruncSeries(ctx, a.val + b.val, ra, rb)


def ser_inv(a: TruncSeries) -> TruncSeries:
    """Multiplicative inverse; val(result) = -val(a), same relative precision."""
    if a.is_zero():
        raise SeriesError("non-invertible series")
    ctx = a.ctx
    p, d = ctx.p, ctx.d
    n = len(a.ca)
    inv0 = fq2_inv(a.lead())
    dt = a.ca.dtype
    ra = np.zeros(n, dtype=dt)
    rb = np.zeros(n, dtype=dt)
    ra[0], rb[0] = inv0.a, inv0.b
    ca, cb = a.ca, a.cb
    for k in range(1, n):
        # s = sum_{i=1..k} a_i r_{k-i}
        xa, xb = ca[1:k + 1], cb[1:k + 1]
        ya, yb = ra[k - 1::-1], rb[k - 1::-1]
        sa = (int(np.dot(xa, ya) % p) + d * int(np.dot(xb, yb) % p)) % p
        sb = int((np.dot(xa, yb) + np.dot(xb, ya)) % p)
        r = -(Fq2Elem(ctx, sa, sb) * inv0)
        ra[k], rb[k] = r.a, r.b
    return TruncSeries(ctx, -a.val, ra, rb)


def ser_sqrt_one(b: TruncSeries) -> TruncSeries:
    """Square root with constant term 1 of a series b = 1 + b_1 t + ...

    c_0 = 1 and c_k = (b_k - sum_{l=1}^{k-1} c_l c_{k-l}) / 2.
    """
    ctx = b.ctx
    if b.is_zero() or b.val != 0 or b.lead() != ctx.one:
        raise SeriesError("sqrt branch undefined: constant term must be 1")
    p, d = ctx.p, ctx.d
    half = ctx.inv2
    n = len(b.ca)
    dt = b.ca.dtype
    ca = np.zeros(n, dtype=dt)
    cb = np.zeros(n, dtype=dt)
    ca[0] = 1
    for k in range(1, n):
        xa, xb = ca[1:k], cb[1:k]
        ya, yb = ca[k - 1:0:-1], cb[k - 1:0:-1]
        sa = (int(np.dot(xa, ya) % p) + d * int(np.dot(xb, yb) % p)) % p
        sb = int((np.dot(xa, yb) + np.dot(xb, ya)) % p)
        c = (Fq2Elem(ctx, int(b.ca[k]), int(b.cb[k])) - Fq2Elem(ctx, sa, sb)) * half
        ca[k], cb[k] = c.a, c.b
    return TruncSeries(ctx, 0, ca, cb)


def ser_pow(a: TruncSeries, n: int) -> TruncSeries:
    """a^n for any integer n; a^0 = 1 at a's relative precision."""
    if n < 0:
        if a.is_zero():
            raise SeriesError("non-invertible series")
        return ser_pow(ser_inv(a), -n)
    if n == 0:
        if a.is_zero():
            raise SeriesError("0^0 of a series that vanishes to precision")
        return TruncSeries.one(a.ctx, len(a.ca))
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else ser_mul(result, base)
        n >>= 1
        if n:
            base = ser_mul(base, base)
    return result


def series_sum(terms: Iterable[TruncSeries], ctx: FieldCtx, prec: int) -> TruncSeries:
    total = TruncSeries.zero(ctx, prec)
    for t in terms:
        total = total + t
    return total
