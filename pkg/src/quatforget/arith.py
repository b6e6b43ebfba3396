"""Exact integer/rational arithmetic: factorization, square classes,
quadratic symbols, Hilbert symbols and quadratic orders."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from sympy import factorint

from .errors import DomainError

Rat = Fraction
RatLike = Union[int, Fraction, str]

INF = "inf"
FACTOR_LIMIT = 1 << 128


def rat(x: RatLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise DomainError(f"cannot read {x!r} as a rational")


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        n = self.sign
        for p, e in self.factors:
            n *= p**e
        return n

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]


def factor(n: int) -> Factorization:
    if n == 0:
        raise DomainError("cannot factor 0")
    if abs(n) >= FACTOR_LIMIT:
        raise DomainError("input exceeds desk-scale bound 2^128")
    fac = factorint(abs(n))
    return Factorization(1 if n > 0 else -1, tuple(sorted((int(p), int(e)) for p, e in fac.items())))


def prime_divisors(n: int) -> list[int]:
    return factor(n).primes()


def squarefree_part(x: RatLike) -> int:
    """Signed squarefree s with x = s * (rational square)."""
    q = rat(x)
    if q == 0:
        raise DomainError("squarefree part of 0")
    # num/den and num*den differ by den^2
    f = factor(q.numerator * q.denominator)
    s = f.sign
    for p, e in f.factors:
        if e % 2:
            s *= p
    return s


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for _, e in factor(n).factors)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def squarefree_divisors(n: int) -> list[int]:
    """Positive squarefree divisors of |n|, ascending."""
    divs = [1]
    for p in prime_divisors(n):
        divs += [d * p for d in divs]
    return sorted(divs)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n)."""
    if n == 0:
        raise DomainError("kronecker symbol needs n != 0")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a|n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _int_square_class(x: Fraction) -> int:
    return x.numerator * x.denominator


def hilbert_symbol(a: RatLike, b: RatLike, v) -> int:
    """Local Hilbert symbol (a, b)_v over Q_v; v is a prime or INF."""
    a, b = rat(a), rat(b)
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol of zero")
    if v == INF or v == math.inf:
        return -1 if a < 0 and b < 0 else 1
    p = int(v)
    if p < 2 or factor(p).factors != ((p, 1),):
        raise DomainError(f"{v!r} is not a place of Q")
    A, B = _int_square_class(a), _int_square_class(b)
    alpha, beta = valuation(A, p), valuation(B, p)
    u, w = A // p**alpha, B // p**beta
    if p == 2:
        eps_u, eps_w = ((u - 1) // 2) % 2, ((w - 1) // 2) % 2
        om_u, om_w = ((u * u - 1) // 8) % 2, ((w * w - 1) // 8) % 2
        e = eps_u * eps_w + alpha * om_w + beta * om_u
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * kronecker(u, p) ** (beta % 2) * kronecker(w, p) ** (alpha % 2)


def candidate_places(a: RatLike, b: RatLike) -> list:
    """INF, 2 and the odd primes dividing numerators/denominators of a, b."""
    a, b = rat(a), rat(b)
    ps = {2}
    for x in (a.numerator, a.denominator, b.numerator, b.denominator):
        ps.update(prime_divisors(x))
    return [INF] + sorted(ps)


@dataclass(frozen=True)
class QuadOrder:
    """Order Z + f*O_K in K = Q(sqrt d), basis (1, f*w)."""

    d: int
    f: int = 1

    def __post_init__(self):
        if self.d in (0, 1) or not is_squarefree(self.d):
            raise DomainError(f"d = {self.d} does not define a quadratic field")
        if self.f < 1:
            raise DomainError("conductor must be >= 1")

    @property
    def half_integral(self) -> bool:
        return self.d % 4 == 1

    @property
    def field_discriminant(self) -> int:
        return self.d if self.half_integral else 4 * self.d

    @property
    def discriminant(self) -> int:
        return self.f * self.f * self.field_discriminant

    def generator_trace_norm(self) -> tuple[int, int]:
        """(trace, norm) of the basis generator f*w."""
        f = self.f
        if self.half_integral:
            return f, f * f * (1 - self.d) // 4
        return 0, -f * f * self.d

    def norm(self, x: int, y: int) -> int:
        t, n = self.generator_trace_norm()
        return x * x + t * x * y + n * y * y


def _isqrt_exact(n: int) -> Optional[int]:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _signed(k: int) -> Iterator[int]:
    yield k
    if k:
        yield -k


def represent_by_norm_form(q: QuadOrder, target: int, bound: int) -> Optional[tuple[int, int]]:
    """First (x, y) with norm(x + y*f*w) == target, |x|, |y| <= bound.

    Candidates are ordered by (|y|, sign y, |x|, sign x), positive first.
    """
    if bound <= 0:
        raise DomainError("bound must be positive")
    if target == 0:
        raise DomainError("target must be nonzero")
    t, n = q.generator_trace_norm()
    for ay in range(bound + 1):
        for y in _signed(ay):
            # x^2 + t*y*x + (n*y^2 - target) = 0
            disc = (t * y) ** 2 - 4 * (n * y * y - target)
            r = _isqrt_exact(disc)
            if r is None:
                continue
            xs = [(-t * y + s) // 2 for s in {r, -r} if (-t * y + s) % 2 == 0]
            xs = [x for x in xs if abs(x) <= bound]
            if xs:
                x = min(xs, key=lambda x: (abs(x), x < 0))
                return x, y
    return None


def norm_search_is_exhaustive(q: QuadOrder, target: int, bound: int) -> bool:
    """True when the box |x|, |y| <= bound contains every solution.

    Only possible for positive-definite forms (d < 0)."""
    if q.d > 0:
        return False
    if target < 0:
        return True
    # 4*N = (2x + t y)^2 + |disc| y^2
    disc = -q.discriminant
    ymax = math.isqrt(4 * target // disc) + 1
    t, _ = q.generator_trace_norm()
    xmax = (math.isqrt(4 * target) + 1 + abs(t) * ymax) // 2 + 1
    return bound >= ymax and bound >= xmax


def all_representations(q: QuadOrder, target: int) -> list[tuple[int, int]]:
    """Every (x, y) with norm(x + y*f*w) == target, for a definite form (d < 0)."""
    if q.d > 0:
        raise DomainError("exhaustive representation needs d < 0")
    if target <= 0:
        return []
    t, n = q.generator_trace_norm()
    ymax = math.isqrt(4 * target // -q.discriminant)
    out = []
    for y in range(-ymax, ymax + 1):
        disc = (t * y) ** 2 - 4 * (n * y * y - target)
        r = _isqrt_exact(disc) if disc >= 0 else None
        if r is None:
            continue
        for s in sorted({r, -r}):
            if (-t * y + s) % 2 == 0:
                out.append(((-t * y + s) // 2, y))
    return sorted(out, key=lambda v: (abs(v[1]), v[1] < 0, abs(v[0]), v[0] < 0))


def roots_of_unity(q: QuadOrder) -> list[int]:
    """Orders of the roots of unity contained in the order."""
    if q.d == -1 and q.f == 1:
        return [1, 2, 4]
    if q.d == -3 and q.f == 1:
        return [1, 2, 3, 6]
    return [1, 2]


def rat_gcd(values) -> Fraction:
    """Positive generator of the fractional ideal generated by rationals."""
    num, den = 0, 1
    for v in values:
        v = rat(v)
        if v == 0:
            continue
        l = den * v.denominator // math.gcd(den, v.denominator)
        num = math.gcd(num * (l // den), v.numerator * (l // v.denominator))
        den = l
    if num == 0:
        raise DomainError("gcd of zeros")
    return Fraction(num, den)


def fmt_rat(x: Fraction) -> Union[int, str]:
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
