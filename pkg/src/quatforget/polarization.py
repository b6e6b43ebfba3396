"""Principal-type data, Neron-Severi lattices, Riemann forms and the
Atkin-Lehner action on first Chern classes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DomainError, Indeterminate, InvariantViolation, NotFoundWithinBound
from .lattice import Lattice, determinant
from .orders import (
    LeftIdeal,
    codifferent,
    ideal_norm,
    is_maximal,
    norm_ideal,
    normalizes,
    pure_sublattice,
)
from .quaternion import Quaternion, QuaternionAlgebra, is_division, is_totally_indefinite, twisting_divisors
from .search import first_element
from .twists import pair_is_twisting

DEFAULT_BOUND = 50


@dataclass(frozen=True)
class PrincipalDatum:
    """(O, I, mu) with O maximal, I a left O-ideal, mu in O and mu^2 + D = 0."""

    order: Lattice
    ideal: LeftIdeal
    mu: Quaternion

    def __post_init__(self):
        O, mu = self.order, self.mu
        if not is_maximal(O):
            raise DomainError("principal datum needs a maximal order")
        if self.ideal.order != O:
            raise DomainError("ideal belongs to a different order")
        if mu not in O:
            raise DomainError("mu must lie in the order")
        if mu.trace() != 0 or mu * mu != -self.D:
            raise DomainError("mu must satisfy mu^2 + D = 0")
        if not normalizes(O, mu):
            raise DomainError("mu must normalize the order")

    @property
    def algebra(self) -> QuaternionAlgebra:
        return self.order.algebra

    @property
    def D(self) -> int:
        return self.order.algebra.discriminant

    @property
    def principal_c1(self) -> Quaternion:
        """mu / D, the degree-one representative of the principal class."""
        return self.mu / self.D


def norm_D_ideal(order: Lattice) -> Lattice:
    """The two-sided ideal J = D * O^# of reduced norm D; every x in O with D | n(x) lies in J."""
    J = codifferent(order).scale(order.algebra.discriminant)
    if not order.contains_lattice(J):
        raise InvariantViolation("D * O^# is not contained in O")
    return J


def make_principal_datum(order: Lattice, ideal: Optional[LeftIdeal] = None, bound: int = DEFAULT_BOUND) -> PrincipalDatum:
    """First mu (in search order over the pure part of J) with n(mu) = D.

    In a twisting algebra a mu admitting a twist is preferred, so the pair
    (O, mu) is itself twisting whenever one exists within the bound.
    """
    alg = order.algebra
    if not is_division(alg) or not is_totally_indefinite(alg):
        raise DomainError("principal data live in totally indefinite division algebras")
    if not is_maximal(order):
        raise DomainError("order is not maximal")
    if bound <= 0:
        raise DomainError("bound must be positive")
    D = alg.discriminant
    gens = norm_D_ideal(order).pure_sublattice().basis()
    zero = alg.scalar(0)
    hit = None
    divisors = twisting_divisors(alg)
    if divisors:
        hit = first_element(
            zero, gens, [D], bound, accept=lambda m: normalizes(order, m) and pair_is_twisting(order, m, divisors)
        )
    if hit is None:
        hit = first_element(zero, gens, [D], bound, accept=lambda m: normalizes(order, m))
    if hit is None:
        raise NotFoundWithinBound(f"no mu with mu^2 = -{D} within bound {bound}")
    return PrincipalDatum(order, ideal or LeftIdeal.unit(order), hit[1])


def ns_lattice(datum: PrincipalDatum) -> Lattice:
    """Pure part of the codifferent of N(I)."""
    return pure_sublattice(codifferent(norm_ideal(datum.ideal)))


def riemann_form(datum: Optional[PrincipalDatum], mu_pol: Quaternion, beta: Quaternion, gamma: Quaternion) -> Fraction:
    """E(beta, gamma) = tr(mu_pol * gamma * conj(beta))."""
    return (mu_pol * gamma * beta.conj()).trace()


def riemann_matrix(mu_pol: Quaternion, basis: list[Quaternion]) -> list[list[Fraction]]:
    return [[riemann_form(None, mu_pol, x, y) for y in basis] for x in basis]


def is_integral_on_ideal(datum: PrincipalDatum, mu_pol: Quaternion) -> bool:
    B = datum.ideal.lattice.basis()
    return all(e.denominator == 1 for row in riemann_matrix(mu_pol, B) for e in row)


def rosati_image(mu_pol: Quaternion, beta: Quaternion) -> Quaternion:
    """beta^o = mu^-1 conj(beta) mu."""
    return mu_pol.inverse() * beta.conj() * mu_pol


def rosati_compatibility(datum, mu_pol: Quaternion, beta: Quaternion, u: Quaternion, v: Quaternion) -> bool:
    if mu_pol.norm() == 0:
        raise DomainError("degenerate Chern class")
    lhs = riemann_form(datum, mu_pol, u, beta * v)
    rhs = riemann_form(datum, mu_pol, rosati_image(mu_pol, beta) * u, v)
    return lhs == rhs


def pullback_c1(datum, mu_pol: Quaternion, alpha: Quaternion) -> Quaternion:
    """c1 of alpha^* L: conj(alpha) * mu * alpha."""
    if alpha.is_zero():
        raise DomainError("pullback by zero")
    return alpha.conj() * mu_pol * alpha


def degree_formula(datum: PrincipalDatum, mu_pol: Quaternion) -> Fraction:
    """(n(I)^2 * D * delta)^2 with delta = n(mu_pol)."""
    if mu_pol.trace() != 0:
        raise DomainError("a first Chern class is a pure quaternion")
    delta = mu_pol.norm()
    if delta <= 0:
        raise DomainError("polarization degree needs n(mu_pol) > 0")
    nI = ideal_norm(datum.ideal)
    return (nI * nI * datum.D * delta) ** 2


def degree_oracle(datum: PrincipalDatum, mu_pol: Quaternion) -> Fraction:
    """det E(e_i, e_j) over a Z-basis of I."""
    return determinant(riemann_matrix(mu_pol, datum.ideal.lattice.basis()))


def polarization_degree(datum: PrincipalDatum, mu_pol: Quaternion) -> Fraction:
    formula = degree_formula(datum, mu_pol)
    oracle = degree_oracle(datum, mu_pol)
    if formula != oracle:
        raise InvariantViolation(f"degree formula {formula} != determinant {oracle}")
    return formula


# -- numeric positivity ----------------------------------------------------


def _qmul(a: float, b: float, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    x1, y1, z1, t1 = p
    x2, y2, z2, t2 = q
    return np.array(
        [
            x1 * x2 + a * y1 * y2 + b * z1 * z2 - a * b * t1 * t2,
            x1 * y2 + y1 * x2 - b * z1 * t2 + b * t1 * z2,
            x1 * z2 + z1 * x2 + a * y1 * t2 - a * t1 * y2,
            x1 * t2 + t1 * x2 + y1 * z2 - z1 * y2,
        ]
    )


@dataclass(frozen=True)
class ComplexPoint:
    """A point tau of the upper half plane with a real splitting of B."""

    algebra: QuaternionAlgebra
    tau: complex = 1j
    images: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.tau.imag <= 0:
            raise DomainError("tau must lie in the upper half plane")
        a, b = float(self.algebra.a), float(self.algebra.b)
        if a > 0:
            I = np.array([[math.sqrt(a), 0.0], [0.0, -math.sqrt(a)]])
            J = np.array([[0.0, b], [1.0, 0.0]])
        elif b > 0:
            J = np.array([[math.sqrt(b), 0.0], [0.0, -math.sqrt(b)]])
            I = np.array([[0.0, a], [1.0, 0.0]])
        else:
            raise DomainError("definite algebra has no real splitting")
        imgs = np.array([np.eye(2), I, J, I @ J])
        err = max(
            np.abs(I @ I - a * np.eye(2)).max(),
            np.abs(J @ J - b * np.eye(2)).max(),
            np.abs(I @ J + J @ I).max(),
        )
        if err > 1e-12 * max(1.0, abs(a), abs(b)):
            raise Indeterminate("splitting is not a homomorphism to working precision")
        object.__setattr__(self, "images", imgs)

    def coords_of_vector(self, u: np.ndarray) -> np.ndarray:
        """Real quaternion coordinates of the beta with beta * (tau, 1) = u."""
        t = self.tau
        p, r = u[0].imag / t.imag, u[1].imag / t.imag
        q, s = u[0].real - p * t.real, u[1].real - r * t.real
        target = np.array([[p, q], [r, s]])
        A = self.images.reshape(4, 4).T
        return np.linalg.solve(A, target.reshape(4))


def positivity_check(datum, mu_pol: Quaternion, point: Optional[ComplexPoint] = None, tol: float = 1e-9) -> bool:
    """Is H(u, v) = E(iu, v) + i E(u, v) positive definite on C^2?"""
    if mu_pol.norm() <= 0:
        raise DomainError("positivity check needs n(mu_pol) > 0")
    alg = mu_pol.algebra
    point = point or ComplexPoint(alg)
    a, b = float(alg.a), float(alg.b)
    mu = np.array([float(c) for c in mu_pol.coords])

    def E(u, v):
        beta, gamma = point.coords_of_vector(u), point.coords_of_vector(v)
        beta_bar = beta * np.array([1.0, -1.0, -1.0, -1.0])
        return 2.0 * _qmul(a, b, _qmul(a, b, mu, gamma), beta_bar)[0]

    e = [np.array([1.0 + 0j, 0j]), np.array([0j, 1.0 + 0j])]
    H = np.array([[E(1j * x, y) + 1j * E(x, y) for y in e] for x in e])
    m1 = H[0, 0].real
    m2 = np.linalg.det(H).real
    if abs(m1) < tol or abs(m2) < tol:
        raise Indeterminate("Hermitian form is ill-conditioned at this tau")
    if m2 < 0:
        raise Indeterminate("Hermitian form is indefinite")
    return bool(m1 > 0)


# -- Atkin-Lehner action ---------------------------------------------------


def primitive_representative(g: Quaternion) -> tuple[int, int, int, int]:
    """Coprime integer coordinates of g up to Q*, first nonzero positive."""
    den = 1
    for c in g.coords:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in g.coords]
    gg = 0
    for x in ints:
        gg = math.gcd(gg, x)
    ints = [x // gg for x in ints]
    if next(x for x in ints if x) < 0:
        ints = [-x for x in ints]
    return tuple(ints)


@dataclass(frozen=True)
class ALAction:
    conjugator: tuple[int, int, int, int]
    c1: Quaternion


def al_act(datum: PrincipalDatum, mu_pol: Quaternion, omega: Quaternion) -> ALAction:
    """iota -> omega^-1 iota omega, c1 -> omega^-1 c1 omega."""
    if omega.is_zero() or omega.norm() <= 0:
        raise DomainError("Atkin-Lehner representative needs positive norm")
    if not normalizes(datum.order, omega):
        raise DomainError("omega does not normalize the order")
    new = omega.conj() * mu_pol * omega / omega.norm()
    return ALAction(primitive_representative(omega), new)


def _in_mu_field(datum: PrincipalDatum, s: Quaternion) -> bool:
    return s * datum.mu == datum.mu * s


def verify_stable_fixes(datum: PrincipalDatum, s: Quaternion) -> bool:
    """s in Q(mu) ∩ O fixes the principal Chern class."""
    if not _in_mu_field(datum, s) or s not in datum.order:
        raise DomainError("s is not in Q(mu) ∩ O")
    if not normalizes(datum.order, s):
        raise DomainError("s does not normalize the order")
    c1 = datum.principal_c1
    return s.inverse() * c1 * s == c1


def verify_twist_transport(datum: PrincipalDatum, witness, omega: Quaternion) -> bool:
    """alpha = omega^-1 chi is a norm -1 unit carrying L_omega back to L."""
    chi = witness.chi
    if omega.norm() <= 0:
        raise DomainError("omega must have positive norm")
    alpha = omega.inverse() * chi
    if alpha not in datum.order or alpha.norm() != -1:
        return False
    c1 = datum.principal_c1
    moved = omega.inverse() * c1 * omega
    return alpha.conj() * moved * alpha == c1
