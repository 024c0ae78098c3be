"""Explicit constants of the bounded-set barycentric inequality.

Everything here is a closed-form function of the dimension ``N``, the
dimensionless diameter bound ``D`` (diameter over ``|E|**(1/N)``) and the
externally supplied Fraenkel constant ``C_F``.  No value of ``C_F`` is
built in: callers must configure it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

ISODIAMETRIC = "isodiametric"
ALT_FLOOR = "alt"


@lru_cache(maxsize=None)
def omega(n: int) -> float:
    """Volume of the unit ball in R^n."""
    if n < 1:
        raise ValueError(f"omega needs n >= 1, got {n}")
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _check(n: int, cf: float) -> None:
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if not cf > 0:
        raise ValueError(f"C_F must be positive, got {cf}")


def c1(n: int, cf: float) -> float:
    _check(n, cf)
    return cf * (omega(n - 1) / omega(n) ** ((n - 1) / n) + omega(n) ** (1 / n) / 2)


def c2(n: int, cf: float) -> float:
    k1 = c1(n, cf)
    return math.sqrt(
        2 ** (1 / n - 2) * omega(n) ** (-2 / n) + 2 ** (2 + 2 / n) * (n - 1) / n**2 * k1**2
    )


def c3_branches(n: int, cf: float) -> tuple[float, float, float]:
    """The three candidates whose maximum defines C3."""
    k1 = c1(n, cf)
    k2 = c2(n, cf)
    return (
        8 * k1 / (2**n * cf),
        2 * k2 + 2 ** (3 - n) * omega(n - 1) / (7 * omega(n) ** ((n - 1) / n)),
        1 / (2 * omega(n) ** (1 / n)),
    )


def c3(n: int, cf: float) -> float:
    return max(c3_branches(n, cf))


def diameter_floor(n: int, reading: str = ISODIAMETRIC) -> float:
    """Smallest admissible D for a unit-volume set.

    ``"isodiametric"`` is ``2 * omega_N**(-1/N)`` (the diameter of the unit
    volume ball); ``"alt"`` is the ``2 * omega_N**(1/N)`` variant, kept so
    slack checks can be rerun under it.
    """
    if reading == ISODIAMETRIC:
        return 2 * omega(n) ** (-1 / n)
    if reading == ALT_FLOOR:
        return 2 * omega(n) ** (1 / n)
    raise ValueError(f"unknown floor reading {reading!r}")


def chain_constant(k: int, n: int, d: float, cf: float) -> float:
    """C_k(N, D) by direct recursion from C_N(N, D) = 2^N C_F."""
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    if k == n:
        return 2**n * cf
    return c3(n, cf) * chain_constant(k + 1, n, 3 * d, cf) * d


def c0_closed_form(n: int, d: float, cf: float) -> float:
    return 2**n * cf * c3(n, cf) ** n * 3 ** (n * (n - 1) / 2) * d**n


def constant_chain(n: int, d: float, cf: float, floor: str = ISODIAMETRIC) -> list[float]:
    """[C_N(N, 3^N D), ..., C_1(N, 3D), C_0(N, D)], i.e. the order the
    induction produces them.  Raises if ``d`` is below the diameter floor."""
    _check(n, cf)
    lo = diameter_floor(n, floor)
    if d < lo * (1 - 1e-12):
        raise ValueError(f"D={d} is below the diameter floor {lo} ({floor})")
    return [chain_constant(k, n, 3**k * d, cf) for k in range(n, -1, -1)]


def main_constant(n: int, d: float, cf: float, floor: str = ISODIAMETRIC) -> float:
    """C0(N, D) with ``d`` clamped up to the diameter floor."""
    _check(n, cf)
    return c0_closed_form(n, max(d, diameter_floor(n, floor)), cf)


def fuglede_diameter(n: int) -> float:
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return (2 * n / (n - 1)) ** (n - 1) * omega(n) ** ((n - 1) / n) / omega(n - 1)


def bch_constant(cf: float) -> float:
    """Planar constant for connected sets: max{2, C0(2, 2 sqrt(pi))}."""
    _check(2, cf)
    return max(2.0, c0_closed_form(2, 2 * math.sqrt(math.pi), cf))


def fuglede_constant(n: int, cf: float) -> float:
    """Dimensional constant for convex sets: max{2, C0(N, N * fuglede_diameter)}."""
    return max(2.0, c0_closed_form(n, n * fuglede_diameter(n), cf))


@dataclass(frozen=True)
class ConstantsTable:
    n: int
    d: float
    cf: float
    floor: str
    omega: dict[int, float]
    c1: float
    c2: float
    c3: float
    c3_branches: tuple[float, float, float]
    chain: list[float]
    c0: float
    fuglede_d: float
    bch: float
    eps_branch: float = field(default=0.0)  # 8 C1 D, the bound used when 8 eps >= lambda0

    @classmethod
    def build(cls, n: int, d: float, cf: float, floor: str = ISODIAMETRIC) -> "ConstantsTable":
        d_eff = max(d, diameter_floor(n, floor))
        chain = constant_chain(n, d_eff, cf, floor)
        return cls(
            n=n,
            d=d_eff,
            cf=cf,
            floor=floor,
            omega={k: omega(k) for k in range(1, n + 1)},
            c1=c1(n, cf),
            c2=c2(n, cf),
            c3=c3(n, cf),
            c3_branches=c3_branches(n, cf),
            chain=chain,
            c0=chain[-1],
            fuglede_d=fuglede_diameter(n),
            bch=bch_constant(cf),
            eps_branch=8 * c1(n, cf) * d_eff,
        )

    def with_diameter(self, d: float) -> "ConstantsTable":
        return ConstantsTable.build(self.n, d, self.cf, self.floor)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["omega"] = {str(k): v for k, v in self.omega.items()}
        out["c3_branches"] = list(self.c3_branches)
        return out
