"""Arithmetic in F_p and F_{p^2} for odd primes p.

F_{p^2} is modelled as F_p[u]/(u^2 - d) where d is the smallest positive
quadratic non-residue mod p.  Elements are immutable pairs (a, b) meaning
a + b*u.
"""
from __future__ import annotations

import functools
import re
from typing import Iterator, Optional

__all__ = [
    "FieldError",
    "FieldCtx",
    "Fq2Elem",
    "make_field_ctx",
    "fq2_inv",
    "fq2_sqrt",
    "is_prime",
]

MAX_PRIME = 2**31 - 1


class FieldError(ValueError):
    """Raised on invalid field parameters or undefined field operations."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class FieldCtx:
    """The field F_{p^2} = F_p[u]/(u^2 - d).

    Attributes
    ----------
    p : int
        Odd prime characteristic.
    d : int
        Smallest positive quadratic non-residue mod p (u^2 = d).
    i_elem : Fq2Elem
        Canonical square root of -1.
    """

    __slots__ = ("p", "d", "i_elem", "_inv2", "_nonsquare")

    def __init__(self, p: int, d: int):
        self.p = p
        self.d = d
        self._inv2 = (p + 1) // 2
        self._nonsquare: Optional[Fq2Elem] = None
        self.i_elem = _canonical(self, _sqrt_minus_one(self))

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, d={self.d})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("FieldCtx", self.p))

    def __reduce__(self):
        return (make_field_ctx, (self.p,))

    @property
    def order(self) -> int:
        return self.p * self.p

    def __call__(self, a=0, b: int = 0) -> "Fq2Elem":
        if isinstance(a, Fq2Elem):
            return a
        return Fq2Elem(self, a, b)

    @property
    def zero(self) -> "Fq2Elem":
        return Fq2Elem(self, 0, 0)

    @property
    def one(self) -> "Fq2Elem":
        return Fq2Elem(self, 1, 0)

    @property
    def u(self) -> "Fq2Elem":
        return Fq2Elem(self, 0, 1)

    @property
    def inv2(self) -> "Fq2Elem":
        return Fq2Elem(self, self._inv2, 0)

    def elements(self) -> Iterator["Fq2Elem"]:
        """All p^2 elements in lexicographic (a, b) order."""
        p = self.p
        for a in range(p):
            for b in range(p):
                yield Fq2Elem(self, a, b)

    def nonsquare(self) -> "Fq2Elem":
        """First non-square of the form a + u, a = 0, 1, 2, ...

        (u itself when p = 1 mod 4; for p = 3 mod 4 every b*u is a square.)
        """
        if self._nonsquare is None:
            a = 0
            while is_square(Fq2Elem(self, a, 1)):
                a += 1
            self._nonsquare = Fq2Elem(self, a, 1)
        return self._nonsquare

    def parse(self, text: str) -> "Fq2Elem":
        """Inverse of ``str(elem)``; accepts "a+b*u" or a bare integer."""
        m = re.fullmatch(r"\s*(-?\d+)\s*(?:\+\s*(-?\d+)\s*\*\s*u)?\s*", text)
        if not m:
            raise FieldError(f"cannot parse field element {text!r}")
        return Fq2Elem(self, int(m.group(1)), int(m.group(2) or 0))


class Fq2Elem:
    """Element a + b*u of F_{p^2}."""

    __slots__ = ("ctx", "a", "b")

    def __init__(self, ctx: FieldCtx, a: int = 0, b: int = 0):
        p = ctx.p
        self.ctx = ctx
        self.a = int(a) % p
        self.b = int(b) % p

    def _coerce(self, other) -> "Fq2Elem":
        if isinstance(other, Fq2Elem):
            if other.ctx is not self.ctx and other.ctx.p != self.ctx.p:
                raise FieldError("elements of different fields")
            return other
        if isinstance(other, int):
            return Fq2Elem(self.ctx, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fq2Elem(self.ctx, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fq2Elem(self.ctx, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return Fq2Elem(self.ctx, -self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, e = self.a, self.b, o.a, o.b
        return Fq2Elem(self.ctx, a * c + self.ctx.d * b * e, a * e + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * fq2_inv(o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * fq2_inv(self)

    def __pow__(self, n: int):
        if n < 0:
            return fq2_inv(self) ** (-n)
        result = Fq2Elem(self.ctx, 1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Fq2Elem(self.ctx, other, 0)
        if not isinstance(other, Fq2Elem):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.ctx.p == other.ctx.p

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.a, self.b))

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def key(self) -> tuple[int, int]:
        """Lexicographic encoding used for canonical choices and ordering."""
        return (self.a, self.b)

    def __lt__(self, other: "Fq2Elem") -> bool:
        return self.key() < other.key()

    def norm(self) -> int:
        """Norm to F_p: a^2 - d b^2."""
        return (self.a * self.a - self.ctx.d * self.b * self.b) % self.ctx.p

    def __str__(self) -> str:
        return f"{self.a}+{self.b}*u"

    def pretty(self) -> str:
        """Short display form: "2", "u", "2*u" or "(1+2*u)"."""
        if not self.b:
            return str(self.a)
        bu = "u" if self.b == 1 else f"{self.b}*u"
        return bu if not self.a else f"({self.a}+{bu})"

    def __repr__(self) -> str:
        return f"Fq2Elem({self.a}+{self.b}*u mod {self.ctx.p})"


@functools.lru_cache(maxsize=None)
def make_field_ctx(p: int) -> FieldCtx:
    """Build the context for F_{p^2}; p must be an odd prime below 2^31."""
    if not isinstance(p, int) or p < 3 or p % 2 == 0 or p > MAX_PRIME or not is_prime(p):
        raise FieldError(f"invalid prime: {p!r}")
    d = next(x for x in range(2, p) if pow(x, (p - 1) // 2, p) == p - 1)
    return FieldCtx(p, d)


def fq2_inv(x: Fq2Elem) -> Fq2Elem:
    """Multiplicative inverse via the norm: 1/(a+bu) = (a-bu)/N."""
    if not x:
        raise ZeroDivisionError("division by zero")
    p = x.ctx.p
    n_inv = pow(x.norm(), p - 2, p)
    return Fq2Elem(x.ctx, x.a * n_inv, -x.b * n_inv)


def is_square(x: Fq2Elem) -> bool:
    """Euler criterion in F_{p^2}; zero counts as a square."""
    if not x:
        return True
    # x is a square in F_{p^2} iff its norm is a square in F_p
    p = x.ctx.p
    return pow(x.norm(), (p - 1) // 2, p) == 1


def _canonical(ctx: FieldCtx, y: Fq2Elem) -> Fq2Elem:
    """Pick the lexicographically smaller of y, -y."""
    return min(y, -y, key=Fq2Elem.key)


def _sqrt_minus_one(ctx: FieldCtx) -> Fq2Elem:
    p, d = ctx.p, ctx.d
    if p % 4 == 1:
        # d^((p-1)/4) has square d^((p-1)/2) = -1
        return Fq2Elem(ctx, pow(d, (p - 1) // 4, p), 0)
    # p = 3 mod 4: b^2 = -1/d is a residue, root by the (p+1)/4 power
    target = (-pow(d, p - 2, p)) % p
    return Fq2Elem(ctx, 0, pow(target, (p + 1) // 4, p))


def fq2_sqrt(x: Fq2Elem) -> Optional[Fq2Elem]:
    """Square root in F_{p^2} (Tonelli-Shanks on the group of order p^2-1).

    Returns the canonical root (lexicographically smaller encoding), or
    ``None`` if x is not a square.
    """
    ctx = x.ctx
    if not x:
        return ctx.zero
    if not is_square(x):
        return None
    order = ctx.order - 1
    s, q = 0, order
    while q % 2 == 0:
        q //= 2
        s += 1
    z = ctx.nonsquare()
    m = s
    c = z ** q
    t = x ** q
    r = x ** ((q + 1) // 2)
    one = ctx.one
    while t != one:
        # least i with t^(2^i) == 1
        i, t2 = 0, t
        while t2 != one:
            t2 = t2 * t2
            i += 1
        b = c
        for _ in range(m - i - 1):
            b = b * b
        m = i
        c = b * b
        t = t * c
        r = r * b
    return _canonical(ctx, r)
