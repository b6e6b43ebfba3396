"""Atkin-Lehner classes of a maximal order over Q and the stable subgroups
U0, V0, W0 attached to a principal datum."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional

from sympy import totient

from .arith import (
    QuadOrder,
    all_representations,
    fmt_rat,
    is_squarefree,
    roots_of_unity,
    squarefree_divisors,
    squarefree_part,
)
from .errors import DomainError, InvariantViolation
from .lattice import Lattice
from .orders import normalizes
from .polarization import PrincipalDatum
from .quaternion import Quaternion, twisting_divisors
from .search import first_element
from .twists import TwistWitness, anticommutant_lattice, check_witness, find_twist, is_twist

DEFAULT_BOUND = 50
U0_MAX_K = 20


def default_bound() -> int:
    """Coordinate search bound, overridable through QUATFORGET_BOUND."""
    raw = os.environ.get("QUATFORGET_BOUND")
    if raw is None:
        return DEFAULT_BOUND
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"QUATFORGET_BOUND must be an integer, got {raw!r}") from None
    if value < 1:
        raise DomainError("QUATFORGET_BOUND must be at least 1")
    return value


# -- the symbolic group -----------------------------------------------------


def _compose(D: int, m1: int, m2: int) -> int:
    g = math.gcd(m1, m2)
    return m1 * m2 // (g * g)


@dataclass(frozen=True)
class ALClass:
    D: int
    m: int

    def __post_init__(self):
        if self.m < 1 or self.D % self.m or not is_squarefree(self.m):
            raise DomainError(f"{self.m} is not a squarefree divisor of {self.D}")


def al_compose(c1: ALClass, c2: ALClass) -> ALClass:
    if c1.D != c2.D:
        raise DomainError("classes for different discriminants")
    return ALClass(c1.D, _compose(c1.D, c1.m, c2.m))


@dataclass(frozen=True)
class ALSubgroup:
    D: int
    members: frozenset

    def __post_init__(self):
        ms = self.members
        if 1 not in ms:
            raise InvariantViolation("subgroup must contain the identity")
        for m in ms:
            ALClass(self.D, m)
        if any(_compose(self.D, x, y) not in ms for x in ms for y in ms):
            raise InvariantViolation("subgroup is not closed")
        n = len(ms)
        if n & (n - 1):
            raise InvariantViolation(f"subgroup order {n} is not a power of 2")

    @classmethod
    def generated(cls, D: int, gens: Iterable[int]) -> "ALSubgroup":
        members = {1}
        for g in gens:
            members |= {_compose(D, g, x) for x in members}
        return cls(D, frozenset(members))

    def __len__(self):
        return len(self.members)

    def __contains__(self, m):
        return m in self.members

    def __le__(self, other: "ALSubgroup") -> bool:
        return self.D == other.D and self.members <= other.members

    def sorted(self) -> list[int]:
        return sorted(self.members)


def group_W(D: int) -> ALSubgroup:
    """Every squarefree divisor of D; over Q this is also W+ and W^1."""
    return ALSubgroup(D, frozenset(squarefree_divisors(D)))


# -- representatives --------------------------------------------------------


def find_norm_class_element(order: Lattice, m: int, sign: int, bound: int = DEFAULT_BOUND) -> Optional[Quaternion]:
    """Normalizer of O with n(omega) = sign * m, or None within bound.

    A primitive normalizer of class m has norm exactly +-m, so only that
    target is searched.
    """
    if bound <= 0:
        raise DomainError("bound must be positive")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    ALClass(order.algebra.discriminant, m)
    if m == 1 and sign == 1:
        return order.algebra.one
    hit = first_element(order.algebra.scalar(0), order.basis(), [sign * m], bound, accept=lambda x: normalizes(order, x))
    return None if hit is None else hit[1]


def unit_of_norm(order: Lattice, sign: int, bound: int = DEFAULT_BOUND) -> Optional[Quaternion]:
    u = find_norm_class_element(order, 1, sign, bound)
    if u is not None and (u.inverse() not in order or u not in order):
        raise InvariantViolation("unit search returned a non-unit")
    return u


# -- the quadratic order Q(mu) ∩ O ----------------------------------------


def primitive_pure(lat: Lattice) -> Quaternion:
    """Generator of the trace-zero part of a rank-2 lattice containing 1."""
    if lat.rank != 2 or lat.algebra.one not in lat:
        raise DomainError("expected a rank-2 lattice containing 1")
    b1, b2 = lat.basis()
    t1, t2 = b1.trace(), b2.trace()
    den = t1.denominator * t2.denominator
    u, v = int(t2 * den), int(-t1 * den)
    g = math.gcd(u, v)
    return b1 * (u // g) + b2 * (v // g)


@dataclass(frozen=True)
class MuOrder:
    """S = Q(mu) ∩ O with its identification as a quadratic order."""

    lattice: Lattice
    quad: QuadOrder
    generator: Quaternion

    def element(self, x: int, y: int) -> Quaternion:
        return self.generator * y + x


def quadratic_order_of(lat: Lattice) -> MuOrder:
    """Identify a rank-2 order Z + Zw inside B with a QuadOrder."""
    pure = primitive_pure(lat)
    half = (pure + 1) / 2
    w = half if half in lat else pure
    disc = w.trace() ** 2 - 4 * w.norm()
    if disc.denominator != 1 or disc == 0:
        raise InvariantViolation("rank-2 order has a bad discriminant")
    disc = int(disc)
    d = squarefree_part(disc)
    dk = d if d % 4 == 1 else 4 * d
    f = math.isqrt(disc // dk)
    quad = QuadOrder(d, f)
    if quad.discriminant != disc:
        raise InvariantViolation("quadratic order discriminant mismatch")
    t, n = quad.generator_trace_norm()
    shift = (t - w.trace()) / 2
    if shift.denominator != 1:
        raise InvariantViolation("generator trace parity mismatch")
    gen = w + shift
    if gen.norm() != n:
        raise InvariantViolation("generator norm mismatch")
    return MuOrder(lat, quad, gen)


def mu_order(datum: PrincipalDatum) -> MuOrder:
    alg = datum.algebra
    return quadratic_order_of(datum.order.intersect_subspace([alg.one, datum.mu]))


def odd_root_count(quad: QuadOrder) -> int:
    """Number of roots of unity of odd order in a quadratic order."""
    return sum(int(totient(k)) for k in roots_of_unity(quad) if k % 2)


def omega_odd(datum: PrincipalDatum) -> int:
    return odd_root_count(mu_order(datum).quad)


# -- stable group U0 -------------------------------------------------------


@dataclass(frozen=True)
class StableSearch:
    group: ALSubgroup
    representatives: dict = field(compare=False)
    complete: bool


def stable_search(datum: PrincipalDatum, max_k: int = U0_MAX_K) -> StableSearch:
    S = mu_order(datum)
    D = datum.D
    reps = {}
    for m in squarefree_divisors(D):
        for k in range(1, max_k + 1):
            target = m * k * k
            for x, y in all_representations(S.quad, target):
                if math.gcd(x, y) != 1:
                    continue
                s = S.element(x, y)
                if normalizes(datum.order, s):
                    reps.setdefault(m, s)
                    break
            if m in reps:
                break
    group = ALSubgroup.generated(D, reps)
    if D not in group:
        raise InvariantViolation("class of mu missing from U0")
    # the enumeration of a definite binary form is exhaustive per target
    return StableSearch(group, reps, S.quad.d < 0)


def group_U0(datum: PrincipalDatum, bound: int = U0_MAX_K) -> ALSubgroup:
    return stable_search(datum, bound).group


# -- twists and V0 ---------------------------------------------------------


@dataclass(frozen=True)
class TwistSearch:
    witnesses: tuple
    missing: tuple
    exhaustive: bool


def search_twists(datum: PrincipalDatum, bound: int = DEFAULT_BOUND) -> TwistSearch:
    """Bounded search for one twist per twisting divisor.

    The anticommutant lattice is negative definite, so a miss is a proof
    of absence once the box covers the ellipse of the target norm.
    """
    divisors = twisting_divisors(datum.algebra)
    if not divisors:
        return TwistSearch((), (), True)
    lam = anticommutant_lattice(datum.order, datum.mu)
    found, missing, exhaustive = [], [], True
    for m in divisors:
        w, certain = find_twist(datum.order, datum.mu, m, bound, lam)
        if w is None:
            missing.append(m)
            exhaustive &= certain
        else:
            found.append(w)
    return TwistSearch(tuple(found), tuple(missing), exhaustive)


def twist_witnesses(datum: PrincipalDatum, bound: int = DEFAULT_BOUND) -> list[TwistWitness]:
    return list(search_twists(datum, bound).witnesses)


def group_V0(datum: PrincipalDatum, bound: int = DEFAULT_BOUND) -> ALSubgroup:
    return ALSubgroup.generated(datum.D, [w.m for w in twist_witnesses(datum, bound)])


def twist_in_lattice(datum: PrincipalDatum, lat: Lattice) -> Optional[TwistWitness]:
    """The twist inside a rank-2 lattice Z + Zg, if any.

    Pure elements there are multiples of one primitive element, and a
    multiple is a twist exactly when the primitive element is.
    """
    chi = primitive_pure(lat)
    if not is_twist(datum.order, datum.mu, chi):
        return None
    w = TwistWitness(chi, squarefree_part(-chi.norm()))
    check_witness(datum.order, datum.mu, w)
    return w


def _check_embedded_lattice(datum: PrincipalDatum, lat: Lattice) -> None:
    if lat.algebra != datum.algebra or lat.rank != 2 or datum.algebra.one not in lat:
        raise DomainError("expected a rank-2 lattice containing 1")
    if not datum.order.contains_lattice(lat):
        raise DomainError("lattice is not contained in the order")


def group_V0_restricted(datum: PrincipalDatum, S_lattice: Lattice, bound: int = DEFAULT_BOUND) -> ALSubgroup:
    _check_embedded_lattice(datum, S_lattice)
    w = twist_in_lattice(datum, S_lattice)
    return ALSubgroup.generated(datum.D, [] if w is None else [w.m])


def group_W0(datum: PrincipalDatum, bound: int = DEFAULT_BOUND) -> ALSubgroup:
    U0, V0 = group_U0(datum), group_V0(datum, bound)
    return ALSubgroup.generated(datum.D, U0.members | V0.members)


# -- degrees ---------------------------------------------------------------


@dataclass(frozen=True)
class DegreeReport:
    D: int
    omega_odd: int
    twisting: bool
    twisting_divisors: tuple
    degree_piF: int
    W0: tuple
    U0: tuple
    V0: tuple
    witnesses: tuple
    search_bound: int
    complete: bool
    missing: tuple = ()
    pair_twisting: bool = False

    @property
    def W0_order(self) -> int:
        return len(self.W0)

    @property
    def consistent(self) -> bool:
        return self.degree_piF == self.W0_order

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "omega_odd": self.omega_odd,
            "twisting": self.twisting,
            "twisting_divisors": list(self.twisting_divisors),
            "degree_piF": self.degree_piF,
            "W0": list(self.W0),
            "U0": list(self.U0),
            "V0": list(self.V0),
            "witnesses": [[fmt_rat(c) for c in w.chi.coords] for w in self.witnesses],
            "search_bound": self.search_bound,
            "complete": self.complete,
        }


def degree_forgetful_F(datum: PrincipalDatum, bound: Optional[int] = None) -> DegreeReport:
    bound = default_bound() if bound is None else bound
    if bound <= 0:
        raise DomainError("bound must be positive")
    divisors = twisting_divisors(datum.algebra)
    w_odd = omega_odd(datum)
    stable = stable_search(datum)
    twists = search_twists(datum, bound)
    # the degree follows the pair (O, mu); the algebra-level decision is
    # only a fallback when the twist search is inconclusive
    if twists.witnesses:
        pair_twisting = True
    elif twists.exhaustive:
        pair_twisting = False
    else:
        pair_twisting = bool(divisors)
    degree = 2 ** (2 * w_odd) if pair_twisting else 2 ** w_odd
    V0 = ALSubgroup.generated(datum.D, [w.m for w in twists.witnesses])
    W0 = ALSubgroup.generated(datum.D, stable.group.members | V0.members)
    return DegreeReport(
        D=datum.D,
        omega_odd=w_odd,
        twisting=bool(divisors),
        twisting_divisors=tuple(divisors),
        degree_piF=degree,
        W0=tuple(W0.sorted()),
        U0=tuple(stable.group.sorted()),
        V0=tuple(V0.sorted()),
        witnesses=twists.witnesses,
        search_bound=bound,
        complete=stable.complete and twists.exhaustive,
        missing=twists.missing,
        pair_twisting=pair_twisting,
    )


def degree_forgetful_hilbert(datum: PrincipalDatum, S_lattice: Lattice, bound: int = DEFAULT_BOUND) -> int:
    """|V0(phi(S))| for a totally real embedded order phi(S)."""
    _check_embedded_lattice(datum, S_lattice)
    if quadratic_order_of(S_lattice).quad.d < 0:
        raise DomainError("embedded order is not totally real")
    return len(group_V0_restricted(datum, S_lattice, bound))
