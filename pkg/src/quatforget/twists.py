"""Twists of a pair (O, mu): pure normalizers of O anticommuting with mu."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import squarefree_part
from .errors import InvariantViolation
from .lattice import Lattice, rational_kernel
from .orders import normalizes
from .quaternion import Quaternion, anticommutes
from .search import first_element


@dataclass(frozen=True)
class TwistWitness:
    chi: Quaternion
    m: int


def is_twist(order: Lattice, mu: Quaternion, chi: Quaternion) -> bool:
    return (
        not chi.is_zero()
        and chi.trace() == 0
        and chi in order
        and anticommutes(mu, chi)
        and normalizes(order, chi)
    )


def check_witness(order: Lattice, mu: Quaternion, w: TwistWitness) -> None:
    chi = w.chi
    if not is_twist(order, mu, chi):
        raise InvariantViolation("twist witness fails the twist conditions")
    if chi * chi != -chi.norm() or squarefree_part(-chi.norm()) != w.m:
        raise InvariantViolation("twist witness has the wrong class")


def anticommutant_lattice(order: Lattice, mu: Quaternion) -> Lattice:
    """O ∩ {x : tr(x) = 0, mu x + x mu = 0}, a rank-2 lattice."""
    alg = order.algebra
    # for pure x, mu x + x mu = tr(mu x)
    forms = [
        [Fraction(2), Fraction(0), Fraction(0), Fraction(0)],
        [(mu * e).trace() for e in alg.basis()],
    ]
    space = [Quaternion(alg, v) for v in rational_kernel(forms)]
    return order.intersect_subspace(space)


def exhaustive_bound(gens: list[Quaternion], target: Fraction) -> Optional[int]:
    """Box size containing every u e1 + v e2 with -n = target, if definite."""
    e1, e2 = gens
    A, C = -e1.norm(), -e2.norm()
    B = -(e1 * e2.conj()).trace()
    det = 4 * A * C - B * B
    if A <= 0 or det <= 0:
        return None
    u2, v2 = 4 * C * target / det, 4 * A * target / det
    return max(math.isqrt(math.floor(u2)), math.isqrt(math.floor(v2))) + 1


def find_twist(order: Lattice, mu: Quaternion, m: int, bound: int, lattice: Optional[Lattice] = None):
    """First twist of norm -m, plus whether a miss is a proof of absence.

    A primitive twist of class m has norm exactly -m, so that is the only
    target.  The box is widened to cover the whole ellipse when the form
    is definite, which makes the answer exact.
    """
    lam = lattice or anticommutant_lattice(order, mu)
    gens = lam.basis()
    need = exhaustive_bound(gens, Fraction(m))
    box = bound if need is None else max(bound, need)
    hit = first_element(order.algebra.scalar(0), gens, [-m], box, accept=lambda x: normalizes(order, x))
    if hit is not None:
        w = TwistWitness(hit[1], m)
        check_witness(order, mu, w)
        return w, True
    return None, need is not None


def pair_is_twisting(order: Lattice, mu: Quaternion, divisors: list[int]) -> bool:
    """Exact: does (O, mu) admit a twist with class in divisors?"""
    lam = anticommutant_lattice(order, mu)
    for m in divisors:
        w, certain = find_twist(order, mu, m, 1, lam)
        if w is not None:
            return True
        if not certain:
            raise InvariantViolation("anticommutant lattice is not definite")
    return False
