"""Quaternion algebras (a, b / Q) and their elements."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .arith import (
    INF,
    RatLike,
    candidate_places,
    hilbert_symbol,
    is_squarefree,
    prime_divisors,
    rat,
    squarefree_divisors,
)
from .errors import DomainError


@dataclass(frozen=True)
class RamificationData:
    ramified_primes: tuple[int, ...]
    infinite_ramified: bool
    discriminant: int

    @property
    def places(self) -> frozenset:
        return frozenset(self.ramified_primes) | ({INF} if self.infinite_ramified else set())


@dataclass(frozen=True)
class QuaternionAlgebra:
    """B = Q + Qi + Qj + Qij with i^2 = a, j^2 = b, ij = -ji."""

    a: Fraction
    b: Fraction

    def __init__(self, a: RatLike, b: RatLike):
        a, b = rat(a), rat(b)
        if a == 0 or b == 0:
            raise DomainError("quaternion algebra needs a, b != 0")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __repr__(self):
        return f"QuaternionAlgebra({self.a}, {self.b})"

    def element(self, x=0, y=0, z=0, t=0) -> "Quaternion":
        return Quaternion(self, (x, y, z, t))

    def scalar(self, c) -> "Quaternion":
        return Quaternion(self, (c, 0, 0, 0))

    @property
    def one(self) -> "Quaternion":
        return self.scalar(1)

    def basis(self) -> list["Quaternion"]:
        return [Quaternion(self, tuple(int(k == l) for l in range(4))) for k in range(4)]

    @cached_property
    def ramification(self) -> RamificationData:
        return ramification(self)

    @property
    def discriminant(self) -> int:
        return self.ramification.discriminant


class Quaternion:
    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: QuaternionAlgebra, coords: Iterable[RatLike]):
        c = tuple(rat(x) for x in coords)
        if len(c) != 4:
            raise DomainError("quaternions have four coordinates")
        self.algebra = algebra
        self.coords = c

    def _check(self, other: "Quaternion"):
        if not isinstance(other, Quaternion) or other.algebra != self.algebra:
            raise DomainError("quaternions from different algebras")

    def _coerce(self, other) -> "Quaternion":
        if isinstance(other, Quaternion):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.algebra.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.algebra, (p + q for p, q in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(self.algebra, (-p for p in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Quaternion(self.algebra, (p * other for p in self.coords))
        if not isinstance(other, Quaternion):
            return NotImplemented
        self._check(other)
        a, b = self.algebra.a, self.algebra.b
        x1, y1, z1, t1 = self.coords
        x2, y2, z2, t2 = other.coords
        return Quaternion(
            self.algebra,
            (
                x1 * x2 + a * y1 * y2 + b * z1 * z2 - a * b * t1 * t2,
                x1 * y2 + y1 * x2 - b * z1 * t2 + b * t1 * z2,
                x1 * z2 + z1 * x2 + a * y1 * t2 - a * t1 * y2,
                x1 * t2 + t1 * x2 + y1 * z2 - z1 * y2,
            ),
        )

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / other)
        if isinstance(other, Quaternion):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.algebra.one
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coords == (rat(other), 0, 0, 0)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return self.algebra == other.algebra and self.coords == other.coords

    def __hash__(self):
        return hash((self.algebra, self.coords))

    def __repr__(self):
        return "Quaternion(" + ", ".join(str(c) for c in self.coords) + ")"

    def __iter__(self):
        return iter(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def conj(self) -> "Quaternion":
        x, y, z, t = self.coords
        return Quaternion(self.algebra, (x, -y, -z, -t))

    def trace(self) -> Fraction:
        return 2 * self.coords[0]

    def norm(self) -> Fraction:
        a, b = self.algebra.a, self.algebra.b
        x, y, z, t = self.coords
        return x * x - a * y * y - b * z * z + a * b * t * t

    def pure_part(self) -> "Quaternion":
        return Quaternion(self.algebra, (0,) + self.coords[1:])

    def inverse(self) -> "Quaternion":
        n = self.norm()
        if n == 0:
            raise DomainError("element is not invertible")
        return self.conj() * (1 / n)

    def is_integral(self) -> bool:
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def is_scalar(self) -> bool:
        return not any(self.coords[1:])


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    return p * q


def trace(q: Quaternion) -> Fraction:
    return q.trace()


def norm(q: Quaternion) -> Fraction:
    return q.norm()


def conj(q: Quaternion) -> Quaternion:
    return q.conj()


def pure_part(q: Quaternion) -> Quaternion:
    return q.pure_part()


def trace_pairing(p: Quaternion, q: Quaternion) -> Fraction:
    """tr_{B/Q}(p q)."""
    return (p * q).trace()


def commutes(p: Quaternion, q: Quaternion) -> bool:
    return p * q == q * p


def anticommutes(p: Quaternion, q: Quaternion) -> bool:
    return (p * q + q * p).is_zero()


def ramification(alg: QuaternionAlgebra) -> RamificationData:
    places = [v for v in candidate_places(alg.a, alg.b) if hilbert_symbol(alg.a, alg.b, v) == -1]
    primes = tuple(v for v in places if v != INF)
    D = 1
    for p in primes:
        D *= p
    return RamificationData(primes, INF in places, D)


def is_totally_indefinite(alg: QuaternionAlgebra) -> bool:
    return not alg.ramification.infinite_ramified


def is_division(alg: QuaternionAlgebra) -> bool:
    r = alg.ramification
    return bool(r.ramified_primes) or r.infinite_ramified


def isomorphic(alg1: QuaternionAlgebra, alg2: QuaternionAlgebra) -> bool:
    return alg1.ramification.places == alg2.ramification.places


def twisting_divisors(alg: QuaternionAlgebra) -> list[int]:
    """Positive m | D with (-D, m / Q) isomorphic to alg."""
    if not is_totally_indefinite(alg) or not is_division(alg):
        raise DomainError("twisting test needs a totally indefinite division algebra")
    D = alg.discriminant
    return [m for m in squarefree_divisors(D) if isomorphic(QuaternionAlgebra(-D, m), alg)]


def is_twisting(alg: QuaternionAlgebra) -> bool:
    return bool(twisting_divisors(alg))


def algebra_for_discriminant(D: int, limit: int = 1000) -> QuaternionAlgebra:
    """Deterministic small presentation of the indefinite algebra of discriminant D.

    Scans |a|*|b| upward (then |a|, then signs) over |a|, |b| <= limit and
    keeps only candidates whose product carries every odd prime of D.
    """
    if D < 1 or not is_squarefree(D):
        raise DomainError("discriminant must be a positive squarefree integer")
    odd = D if D % 2 else D // 2
    target = set(prime_divisors(D)) if D > 1 else set()
    if len(target) % 2:
        raise DomainError("an indefinite algebra over Q has an even number of ramified primes")
    for P in range(odd, limit * limit + 1, odd):
        for x in range(1, min(P, limit) + 1):
            if P % x or P // x > limit:
                continue
            y = P // x
            for a, b in ((x, y), (-x, y), (x, -y)):
                alg = QuaternionAlgebra(a, b)
                r = alg.ramification
                if not r.infinite_ramified and set(r.ramified_primes) == target:
                    return alg
    raise DomainError(f"no presentation of discriminant {D} with |a|, |b| <= {limit}")
