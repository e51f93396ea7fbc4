"""Combinatorics of the tower x_{j+1}^2 = (x_j^2 + 1)/(2 x_j).

Divisors at level k are supported on P_inf^k, the divisors D_r^k for
r = -2..k-1 (D_{-2} = P_0, D_{-1} = P_i + P_{-i}, D_r = places over
P_{-1}^r) and the single place P_{-1}^k.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

__all__ = [
    "Divisor",
    "genus",
    "genus_recursive",
    "genus_riemann_hurwitz",
    "divisor_degree",
    "principal_x",
    "principal_one_plus_x",
    "restrict",
    "is_invariant",
]


def genus(j: int) -> int:
    """Closed-form genus g_j of T_j."""
    if j < 0:
        raise ValueError("level must be non-negative")
    if j % 2 == 0:
        return (2 ** ((j + 2) // 2) - 1) * (2 ** (j // 2) - 1)
    return (2 ** ((j + 1) // 2) - 1) ** 2


def genus_recursive(j: int) -> int:
    """Genus via the two-step recursion g_{j+2} = 4 g_j + ... (g_0 = 0, g_1 = 1)."""
    if j < 0:
        raise ValueError("level must be non-negative")
    if j <= 1:
        return j
    i = j - 2
    g = genus_recursive(i)
    if i % 2 == 0:
        return 4 * g + 3 * 2 ** ((i + 2) // 2) - 3
    return 4 * g + 2 ** ((i + 5) // 2) - 3


def ramification_degree(j: int) -> int:
    """R_j: total degree of places of T_j ramified in T_{j+1}."""
    if j % 2:
        return 2 ** ((j + 3) // 2)
    return 2 ** ((j + 4) // 2)


def genus_riemann_hurwitz(j: int) -> int:
    """Genus via g_{j+1} = 2 g_j - 1 + R_j / 2."""
    g = 0
    for i in range(j):
        g = 2 * g - 1 + ramification_degree(i) // 2
    return g


def divisor_degree(j: int, r: int) -> int:
    """deg D_r^j for -2 <= r <= j (r = j is the place P_{-1}^j)."""
    if j < 0 or not -2 <= r <= j:
        raise ValueError(f"invalid ramification index r={r} at level {j}")
    if j <= 2 * r + 2:
        return 2 ** (j - r)
    return 2 ** (r + 2)


@dataclass(frozen=True)
class Divisor:
    """alpha_inf P_inf + sum_r alpha_r D_r + alpha_m1 P_{-1} at a fixed level.

    ``d`` is dense, indexed by r + 2 for r = -2..level-1.
    """

    level: int
    a_inf: int
    d: tuple
    a_m1: int = 0

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be non-negative")
        if len(self.d) != self.level + 2:
            raise ValueError(
                f"level-{self.level} divisor needs {self.level + 2} D-coefficients, got {len(self.d)}"
            )

    @classmethod
    def zero(cls, level: int) -> "Divisor":
        return cls(level, 0, (0,) * (level + 2), 0)

    @classmethod
    def from_map(cls, level: int, a_inf: int = 0, d: Mapping[int, int] | None = None, a_m1: int = 0):
        coeffs = [0] * (level + 2)
        for r, c in (d or {}).items():
            if not -2 <= r <= level - 1:
                raise ValueError(f"invalid ramification index r={r} at level {level}")
            coeffs[r + 2] = c
        return cls(level, a_inf, tuple(coeffs), a_m1)

    def coef(self, r: int) -> int:
        """Coefficient of D_r; r = level means P_{-1}."""
        if r == self.level:
            return self.a_m1
        return self.d[r + 2]

    def degree(self) -> int:
        k = self.level
        total = self.a_inf + self.a_m1
        for r in range(-2, k):
            total += self.d[r + 2] * divisor_degree(k, r)
        return total

    def without_inf(self) -> "Divisor":
        return Divisor(self.level, 0, self.d, self.a_m1)

    def __add__(self, other: "Divisor") -> "Divisor":
        if self.level != other.level:
            raise ValueError("level mismatch")
        return Divisor(
            self.level,
            self.a_inf + other.a_inf,
            tuple(x + y for x, y in zip(self.d, other.d)),
            self.a_m1 + other.a_m1,
        )

    def __neg__(self) -> "Divisor":
        return self * -1

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, n: int) -> "Divisor":
        return Divisor(self.level, n * self.a_inf, tuple(n * x for x in self.d), n * self.a_m1)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "inf": self.a_inf,
            "d": {str(r): self.d[r + 2] for r in range(-2, self.level)},
            "m1": self.a_m1,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Divisor":
        return cls.from_map(
            int(obj["level"]),
            int(obj.get("inf", 0)),
            {int(r): int(c) for r, c in obj.get("d", {}).items()},
            int(obj.get("m1", 0)),
        )

    def __str__(self) -> str:
        parts = []
        if self.a_inf:
            parts.append(f"{self.a_inf}*Pinf")
        for r in range(-2, self.level):
            c = self.d[r + 2]
            if c:
                parts.append(f"{c}*D[{r}]")
        if self.a_m1:
            parts.append(f"{self.a_m1}*Pm1")
        return " + ".join(parts) if parts else "0"


def _negative_part(j: int) -> dict[int, int]:
    # poles of x_j (and 1+x_j) away from P_inf, j >= 2
    d = {}
    for r in range(-2, (j - 3) // 2 + 1):
        d[r] = -1
    for r in range((j - 1) // 2, j - 2):
        d[r] = -(2 ** (2 * r - j + 2))
    return d


def principal_x(j: int) -> Divisor:
    """The divisor (x_j) in T_j."""
    if j == 0:
        return Divisor.from_map(0, -1, {-2: 1})
    if j == 1:
        return Divisor.from_map(1, -1, {-2: -1, -1: 1})
    d = _negative_part(j)
    d[j - 2] = d.get(j - 2, 0) + 2 ** (j - 2)
    return Divisor.from_map(j, -1, d)


def principal_one_plus_x(j: int) -> Divisor:
    """The divisor (1 + x_j) in T_j."""
    if j == 0:
        return Divisor.from_map(0, -1, {}, 1)
    if j == 1:
        return Divisor.from_map(1, -1, {-2: -1}, 2)
    return Divisor.from_map(j, -1, _negative_part(j), 2**j)


def is_invariant(D: Divisor) -> bool:
    """Invariance under x_k -> -x_k, i.e. no P_{-1} component."""
    return D.a_m1 == 0


def restrict(D: Divisor) -> Divisor:
    """Restriction of an invariant level-k divisor to level k-1.

    Ramified components (P_inf and D_r with k >= 2r+3) get their
    coefficient halved and floored; D_{k-1}^k becomes P_{-1}^{k-1}.
    """
    k = D.level
    if k < 1:
        raise ValueError("cannot restrict a level-0 divisor")
    if not is_invariant(D):
        raise ValueError("divisor not Galois-invariant")
    last_ramified = (k - 3) // 2
    d = []
    for r in range(-2, k - 1):
        c = D.d[r + 2]
        d.append(c // 2 if r <= last_ramified else c)
    return Divisor(k - 1, D.a_inf // 2, tuple(d), D.d[k + 1])
