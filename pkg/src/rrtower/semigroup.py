"""Weierstrass semigroups H(P_inf^j) read off the ladder integers c_m."""
from __future__ import annotations

from dataclasses import dataclass

from .ladder import MasterLadder, master_ladder
from .tower import genus

__all__ = ["Semigroup", "member", "intervals", "gaps", "generators", "closure", "format_intervals"]

MAX_LEVEL = 10


def _ladder(j: int, p: int) -> MasterLadder:
    return master_ladder(p, j, symbolic=False)


def member_from_ladder(ladder: MasterLadder, s: int) -> bool:
    if s < 0:
        return False
    q, m = divmod(s, 2**ladder.j)
    return q >= ladder.c[m]


def member(j: int, s: int, p: int = 3) -> bool:
    """s in H(P_inf^j)  <=>  q(s) >= c_{m(s)} where s = 2^j q + m."""
    return member_from_ladder(_ladder(j, p), s)


@dataclass(frozen=True)
class Semigroup:
    j: int
    intervals: tuple  # closed (a, b) pairs, before the tail
    tail_start: int

    @property
    def genus(self) -> int:
        return genus(self.j)

    def __contains__(self, s: int) -> bool:
        if s >= self.tail_start:
            return True
        return any(a <= s <= b for a, b in self.intervals)

    def gaps(self) -> list[int]:
        return [s for s in range(self.tail_start) if s not in self]

    def text(self) -> str:
        return format_intervals(self)

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "intervals": [list(ab) for ab in self.intervals],
            "tail": self.tail_start,
            "genus": self.genus,
        }


def format_intervals(sg: Semigroup) -> str:
    """Interval listing, e.g. "0; 3-4; 6-inf"."""
    parts = [str(a) if a == b else f"{a}-{b}" for a, b in sg.intervals]
    parts.append(f"{sg.tail_start}-inf")
    return "; ".join(parts)


def semigroup_from_ladder(ladder: MasterLadder) -> Semigroup:
    j = ladder.j
    bound = 2 * genus(j)  # every gap is <= 2g - 1
    runs = []
    start = None
    for s in range(bound + 1):
        if member_from_ladder(ladder, s):
            if start is None:
                start = s
        elif start is not None:
            runs.append((start, s - 1))
            start = None
    if start is None:
        raise AssertionError(f"2g = {bound} is not in H; ladder is inconsistent")
    return Semigroup(j, tuple(runs), start)


def intervals(j: int, p: int = 3) -> Semigroup:
    if j > MAX_LEVEL:
        raise ValueError(f"level {j} exceeds the bound {MAX_LEVEL}")
    return semigroup_from_ladder(_ladder(j, p))


def gaps(j: int, p: int = 3) -> list[int]:
    return intervals(j, p).gaps()


def generators(j: int, p: int = 3) -> set[int]:
    """{2^j} together with the pole orders 2^j c_m + m of w_m, 0 < m < 2^j."""
    ladder = _ladder(j, p)
    n = 2**j
    return {n} | {n * ladder.c[m] + m for m in range(1, n)}


def closure(gens, upto: int) -> set[int]:
    """Elements <= upto of the numerical semigroup generated by ``gens``."""
    reach = [False] * (upto + 1)
    reach[0] = True
    for s in range(1, upto + 1):
        reach[s] = any(g <= s and reach[s - g] for g in gens)
    return {s for s, ok in enumerate(reach) if ok}
