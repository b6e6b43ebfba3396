"""Orders, maximal orders and left ideals in a quaternion algebra over Q."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import prime_divisors, rat_gcd
from .errors import DomainError, InvariantViolation, SaturationFailed
from .lattice import Lattice, determinant, standard_lattice
from .quaternion import Quaternion, QuaternionAlgebra, is_division


class Order(Lattice):
    """A full-rank lattice containing 1, closed under multiplication."""

    __slots__ = ()

    @classmethod
    def from_lattice(cls, lat: Lattice) -> "Order":
        if not is_order(lat):
            raise DomainError("lattice is not an order")
        return cls(lat.algebra, lat.den, lat.rows, _canonical=True)


def is_order(lat: Lattice) -> bool:
    if lat.rank != 4 or lat.algebra.one not in lat:
        return False
    B = lat.basis()
    if not all(b.is_integral() for b in B):
        return False
    return all(x * y in lat for x in B for y in B)


def reduced_discriminant(order: Lattice) -> int:
    """d(O) with d(O)^2 = |det tr(e_i e_j)|."""
    if not is_order(order):
        raise DomainError("reduced discriminant needs an order")
    det = abs(determinant(order.gram()))
    if det.denominator != 1:
        raise InvariantViolation("trace form of an order must be integral")
    d = math.isqrt(det.numerator)
    if d * d != det.numerator:
        raise InvariantViolation(f"trace-form determinant {det} is not a square")
    return d


def is_maximal(order: Lattice) -> bool:
    return reduced_discriminant(order) == order.algebra.discriminant


def standard_order(alg: QuaternionAlgebra) -> Order:
    """Z<1, i', j', i'j'> with i', j' rescaled to integral squares."""
    qa, qb = alg.a.denominator, alg.b.denominator
    gens = [alg.one, alg.element(y=qa), alg.element(z=qb), alg.element(t=qa * qb)]
    return Order.from_lattice(Lattice.from_generators(alg, gens))


def _ring_closure(lat: Lattice, ceiling: Lattice):
    """Smallest ring containing lat, or None once it leaves ceiling."""
    while True:
        if not ceiling.contains_lattice(lat):
            return None
        bigger = lat + lat.product(lat)
        if bigger == lat:
            return lat
        lat = bigger


def _mod_p_row_basis(rows: list[list[int]], p: int) -> list[list[int]]:
    """Reduced row basis (entries in [0, p)) of the F_p-span of rows."""
    A = [[x % p for x in r] for r in rows]
    basis = []
    col = 0
    for col in range(len(A[0]) if A else 0):
        piv = next((r for r in A if r[col] % p), None)
        if piv is None:
            continue
        inv = pow(piv[col], -1, p)
        piv = [x * inv % p for x in piv]
        A = [r for r in A if r is not piv]
        A = [[(x - r[col] * y) % p for x, y in zip(r, piv)] for r in A]
        A = [r for r in A if any(r)]
        basis.append(piv)
    return basis


def _enlarge_at(order: Lattice, p: int):
    """An order strictly containing `order` with index a power of p, or None."""
    alg = order.algebra
    dual = order.dual()
    cand = dual.intersect(order.scale(Fraction(1, p)))
    O_basis = order.basis()
    N = []
    for b in cand.basis():
        c = order.coordinates(b)
        N.append([int(x * p) for x in c])
    U = _mod_p_row_basis(N, p)
    for coeffs in itertools.product(range(p), repeat=len(U)):
        if not any(coeffs):
            continue
        v = [sum(c * u[k] for c, u in zip(coeffs, U)) % p for k in range(4)]
        x = sum((O_basis[k] * Fraction(v[k], p) for k in range(4)), alg.scalar(0))
        if not x.is_integral():
            continue
        ring = _ring_closure(order + Lattice.from_generators(alg, [x]), dual)
        if ring is not None:
            return ring
    return None


def maximal_order(alg: QuaternionAlgebra) -> Order:
    """A maximal order of a division algebra, by p-saturation of the standard order."""
    if not is_division(alg):
        raise DomainError("maximal_order needs a division algebra")
    D = alg.discriminant
    order: Lattice = standard_order(alg)
    d = reduced_discriminant(order)
    while d != D:
        if d % D:
            raise InvariantViolation(f"d(O) = {d} not divisible by D = {D}")
        p = prime_divisors(d // D)[0]
        bigger = _enlarge_at(order, p)
        if bigger is None:
            raise SaturationFailed(f"no enlargement at p = {p} (d(O) = {d}, D = {D})")
        order = bigger
        d = reduced_discriminant(order)
    return Order.from_lattice(order)


def normalizes(order: Lattice, g: Quaternion) -> bool:
    if g.is_zero():
        raise DomainError("normalizer test needs g != 0")
    return order.conjugate_by(g) == order


@dataclass(frozen=True)
class LeftIdeal:
    lattice: Lattice
    order: Lattice

    def __post_init__(self):
        if self.lattice.algebra != self.order.algebra:
            raise DomainError("ideal and order live in different algebras")
        if self.lattice.rank != 4:
            raise DomainError("ideal must have full rank")
        B = self.lattice.basis()
        if not all(o * b in self.lattice for o in self.order.basis() for b in B):
            raise DomainError("lattice is not a left ideal of the order")

    @classmethod
    def principal(cls, order: Lattice, beta: Quaternion) -> "LeftIdeal":
        """O * beta."""
        return cls(order.right_mul(beta), order)

    @classmethod
    def unit(cls, order: Lattice) -> "LeftIdeal":
        return cls(order, order)


def ideal_norm(I: LeftIdeal) -> Fraction:
    """n(I): gcd of norms over an HNF basis and its pairwise sums."""
    B = I.lattice.basis()
    values = [b.norm() for b in B]
    values += [(x + y).norm() for x, y in itertools.combinations(B, 2)]
    return rat_gcd(values)


def conj_ideal(lat: Lattice) -> Lattice:
    return lat.conj()


def ideal_product(I: Lattice, J: Lattice) -> Lattice:
    if I.algebra != J.algebra:
        raise DomainError("lattices in different algebras")
    return I.product(J)


def norm_ideal(I: LeftIdeal) -> Lattice:
    """N(I) = I * conj(I), checked against n(I) * O."""
    N = ideal_product(I.lattice, conj_ideal(I.lattice))
    if N != I.order.scale(ideal_norm(I)):
        raise InvariantViolation("I * conj(I) differs from n(I) * O")
    return N


def codifferent(lat: Lattice) -> Lattice:
    return lat.dual()


def pure_sublattice(lat: Lattice) -> Lattice:
    return lat.pure_sublattice()
