"""Optimal embeddings of real quadratic orders into a maximal order."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import QuadOrder, is_squarefree, kronecker, prime_divisors
from .atkin_lehner import DEFAULT_BOUND, quadratic_order_of, twist_in_lattice
from .errors import DomainError, InvariantViolation
from .lattice import Lattice
from .polarization import PrincipalDatum
from .quaternion import Quaternion, QuaternionAlgebra, is_division, is_totally_indefinite
from .search import first_element


def saturation(order: Lattice, g: Quaternion) -> Lattice:
    """(Q + Q g) ∩ O."""
    return order.intersect_subspace([order.algebra.one, g])


@dataclass(frozen=True)
class EichlerPair:
    """A real quadratic order S with phi(S) = Z + Z g optimally embedded in O."""

    quad: QuadOrder
    order: Lattice
    g: Quaternion

    def __post_init__(self):
        if self.quad.d < 0:
            raise DomainError("Eichler pairs here are totally real")
        t, n = self.quad.generator_trace_norm()
        if self.g.trace() != t or self.g.norm() != n:
            raise InvariantViolation("g does not satisfy the generator's minimal polynomial")
        if self.g not in self.order:
            raise InvariantViolation("g is not in the order")
        if saturation(self.order, self.g) != self.phi_image:
            raise InvariantViolation("embedding is not optimal")

    @property
    def phi_image(self) -> Lattice:
        alg = self.order.algebra
        return Lattice.from_generators(alg, [alg.one, self.g])


def _check_real_d(d: int) -> None:
    if d <= 1 or not is_squarefree(d):
        raise DomainError("d must be a squarefree integer > 1")


def embeddable_maximal(alg: QuaternionAlgebra, d: int) -> bool:
    """Does the maximal order of Q(sqrt d) embed in a maximal order of alg?"""
    if not is_totally_indefinite(alg) or not is_division(alg):
        raise DomainError("criterion needs a totally indefinite division algebra")
    _check_real_d(d)
    dk = d if d % 4 == 1 else 4 * d
    return all(kronecker(dk, p) != 1 for p in prime_divisors(alg.discriminant))


def find_embedding(order: Lattice, quad: QuadOrder, bound: int = DEFAULT_BOUND) -> Optional[EichlerPair]:
    """First optimal g in O with the generator's trace and norm, or None within bound."""
    if bound <= 0:
        raise DomainError("bound must be positive")
    if quad.d < 0:
        raise DomainError("find_embedding needs a real quadratic order")
    t, n = quad.generator_trace_norm()
    alg = order.algebra
    first = order.basis()[0]
    # elements of trace t are base + (pure part of O)
    k = Fraction(t) / first.trace()
    if k.denominator != 1:
        return None
    base = first * k
    pure = order.pure_sublattice().basis()
    gens_1 = Lattice.from_generators(alg, [alg.one])

    def optimal(g: Quaternion) -> bool:
        return saturation(order, g) == gens_1 + Lattice.from_generators(alg, [g])

    hit = first_element(base, pure, [n], bound, accept=optimal)
    return None if hit is None else EichlerPair(quad, order, hit[1])


def pair_from_element(order: Lattice, g: Quaternion) -> EichlerPair:
    """The optimally embedded order (Q + Q g) ∩ O, when it is real quadratic."""
    if g.is_scalar():
        raise DomainError("g must generate a quadratic subfield")
    mo = quadratic_order_of(saturation(order, g))
    if mo.quad.d < 0:
        raise DomainError("g generates an imaginary quadratic field")
    return EichlerPair(mo.quad, order, mo.generator)


def contains_twist(pair: EichlerPair, datum: PrincipalDatum) -> bool:
    if pair.order != datum.order:
        raise DomainError("pair and datum use different orders")
    return twist_in_lattice(datum, pair.phi_image) is not None
