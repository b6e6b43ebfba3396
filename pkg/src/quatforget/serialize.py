"""JSON encodings of lattices, principal data and Eichler pairs.

Rationals are written as JSON integers when integral and as "p/q"
strings otherwise, so every encoding round-trips exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .arith import QuadOrder, fmt_rat
from .eichler import EichlerPair
from .errors import DomainError
from .lattice import Lattice
from .orders import LeftIdeal
from .polarization import PrincipalDatum
from .quaternion import Quaternion, QuaternionAlgebra


def parse_rat(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            pass
    raise DomainError(f"not a rational: {value!r}")


def _parse_int(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"not an integer: {value!r}")
    return value


def _field(obj: Any, key: str):
    if not isinstance(obj, dict) or key not in obj:
        raise DomainError(f"missing field {key!r}")
    return obj[key]


def algebra_to_json(alg: QuaternionAlgebra) -> list:
    return [fmt_rat(alg.a), fmt_rat(alg.b)]


def algebra_from_json(obj: Any) -> QuaternionAlgebra:
    if not isinstance(obj, list) or len(obj) != 2:
        raise DomainError("algebra must be [a, b]")
    return QuaternionAlgebra(parse_rat(obj[0]), parse_rat(obj[1]))


def quaternion_to_json(q: Quaternion) -> list:
    return [fmt_rat(c) for c in q.coords]


def quaternion_from_json(alg: QuaternionAlgebra, obj: Any) -> Quaternion:
    if not isinstance(obj, list) or len(obj) != 4:
        raise DomainError("quaternion must be [x, y, z, t]")
    return Quaternion(alg, [parse_rat(c) for c in obj])


def lattice_to_json(lat: Lattice) -> dict:
    return {"alg": algebra_to_json(lat.algebra), "den": lat.den, "rows": [list(r) for r in lat.rows]}


def lattice_from_json(obj: Any) -> Lattice:
    alg = algebra_from_json(_field(obj, "alg"))
    den = _parse_int(_field(obj, "den"))
    rows = _field(obj, "rows")
    if den < 1 or not isinstance(rows, list):
        raise DomainError("lattice needs den >= 1 and a list of rows")
    parsed = []
    for r in rows:
        if not isinstance(r, list) or len(r) != 4:
            raise DomainError("lattice rows have four entries")
        parsed.append([_parse_int(x) for x in r])
    return Lattice(alg, den, parsed)


def datum_to_json(datum: PrincipalDatum) -> dict:
    return {
        "alg": algebra_to_json(datum.algebra),
        "order": lattice_to_json(datum.order),
        "ideal": lattice_to_json(datum.ideal.lattice),
        "mu": quaternion_to_json(datum.mu),
    }


def datum_from_json(obj: Any) -> PrincipalDatum:
    alg = algebra_from_json(_field(obj, "alg"))
    order = lattice_from_json(_field(obj, "order"))
    ideal = lattice_from_json(_field(obj, "ideal"))
    if order.algebra != alg or ideal.algebra != alg:
        raise DomainError("datum lattices use a different algebra")
    mu = quaternion_from_json(alg, _field(obj, "mu"))
    return PrincipalDatum(order, LeftIdeal(ideal, order), mu)


def pair_to_json(pair: EichlerPair) -> dict:
    return {"d": pair.quad.d, "f": pair.quad.f, "g": quaternion_to_json(pair.g)}


def pair_from_json(obj: Any, order: Lattice) -> EichlerPair:
    quad = QuadOrder(_parse_int(_field(obj, "d")), _parse_int(_field(obj, "f")))
    g = quaternion_from_json(order.algebra, _field(obj, "g"))
    return EichlerPair(quad, order, g)
