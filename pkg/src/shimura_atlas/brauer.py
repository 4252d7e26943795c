"""Brauer classes of a quaternion algebra D over a totally real field F.

Every local invariant lives in (1/2)Z/Z.  D splits at exactly one real place
``sigma_nc`` and is ramified at all other real places, so the real
invariants are derived rather than stored.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptySubset, InvalidData
from .fieldmodel import TotallyRealModel, Violation
from .permgroup import popcount

INFINITY = "inf"


@dataclass(frozen=True, order=True)
class QZInvariant:
    """An element of Q/Z, kept reduced into [0, 1)."""

    value: Fraction = Fraction(0)

    def __post_init__(self):
        v = Fraction(self.value)
        object.__setattr__(self, "value", v - (v.numerator // v.denominator))

    @classmethod
    def parse(cls, text: str | int | Fraction) -> QZInvariant:
        return cls(Fraction(text))

    def __add__(self, other: QZInvariant) -> QZInvariant:
        return QZInvariant(self.value + other.value)

    def __bool__(self) -> bool:
        return self.value != 0

    def __str__(self):
        return str(self.value)

    @property
    def is_quaternionic(self) -> bool:
        return 2 % self.value.denominator == 0


ZERO = QZInvariant(Fraction(0))
HALF = QZInvariant(Fraction(1, 2))


def qz_sum(values: Iterable[QZInvariant]) -> QZInvariant:
    total = ZERO
    for v in values:
        total = total + v
    return total


@dataclass(frozen=True)
class FiniteBlock:
    prime: str
    invariants: tuple[QZInvariant, ...]

    def __post_init__(self):
        object.__setattr__(self, "invariants", tuple(QZInvariant.parse(v) if not isinstance(v, QZInvariant) else v
                                                     for v in self.invariants))


@dataclass(frozen=True)
class QuaternionData:
    field: TotallyRealModel
    sigma_nc: int
    finite_blocks: tuple[FiniteBlock, ...] = ()

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, FiniteBlock) else FiniteBlock(b[0], tuple(b[1]))
                       for b in self.finite_blocks)
        object.__setattr__(self, "finite_blocks", blocks)

    @property
    def degree(self) -> int:
        return self.field.degree

    @property
    def real_invariants(self) -> tuple[QZInvariant, ...]:
        return tuple(ZERO if s == self.sigma_nc else HALF for s in range(self.degree))

    def validate(self) -> list[Violation]:
        return validate(self)


def validate(D: QuaternionData) -> list[Violation]:
    out = list(D.field.validate())
    m = D.degree
    if not 0 <= D.sigma_nc < m:
        out.append(Violation("sigma_nc", f"index {D.sigma_nc} outside Emb(F) = 0..{m - 1}"))
    labels = [b.prime for b in D.finite_blocks]
    for dup in sorted({p for p in labels if labels.count(p) > 1}):
        out.append(Violation("distinct-primes", f"prime {dup!r} listed more than once"))
    for b in D.finite_blocks:
        if not b.invariants:
            out.append(Violation("finite-block", f"prime {b.prime!r} has no invariants"))
        if len(b.invariants) > m:
            out.append(Violation("finite-block", f"prime {b.prime!r} lists {len(b.invariants)} > {m} places"))
        for v in b.invariants:
            if not v.is_quaternionic:
                out.append(Violation("quaternion-invariant", f"{v} at {b.prime!r} is not in (1/2)Z/Z"))
    if out:
        return out
    total = qz_sum(D.real_invariants) + qz_sum(v for b in D.finite_blocks for v in b.invariants)
    if total:
        out.append(Violation("reciprocity", f"sum of all local invariants is {total}, not 0"))
    return out


def _require_valid(D: QuaternionData) -> None:
    bad = validate(D)
    if bad:
        raise InvalidData("; ".join(map(str, bad)))


def cores_to_Q_local_invariants(D: QuaternionData) -> dict[str, QZInvariant]:
    """Local invariants of Cores_{F/Q}(D): at each place of Q, sum the invariants above it."""
    _require_valid(D)
    out = {INFINITY: qz_sum(D.real_invariants)}
    for b in D.finite_blocks:
        out[b.prime] = qz_sum(b.invariants)
    return out


def cores_to_Q_is_trivial(D: QuaternionData) -> bool:
    return not any(cores_to_Q_local_invariants(D).values())


def real_invariant_along(D: QuaternionData, J: int) -> QZInvariant:
    """Sum over sigma in J of inv_sigma(D); J is a bitmask over Emb(F)."""
    if J == 0:
        raise EmptySubset("J must be nonempty")
    ramified = popcount(J) - (J >> D.sigma_nc & 1)
    return QZInvariant(Fraction(ramified, 2))


def real_invariants_along_orbit(D: QuaternionData, orbit: Sequence[int]) -> list[QZInvariant]:
    return [real_invariant_along(D, J) for J in orbit]


def contains_sigma_nc(D: QuaternionData, J: int) -> bool:
    return bool(J >> D.sigma_nc & 1)
