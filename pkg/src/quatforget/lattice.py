"""Z-lattices inside a quaternion algebra, kept in Hermite normal form.

A lattice of rank r is stored as ``rows / den`` where ``rows`` is the
unique row-style HNF of an integer matrix (pivots positive, entries above
each pivot reduced into [0, pivot)) and ``den`` is the least positive
integer clearing all denominators.  Equal lattices therefore have equal
``(den, rows)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import DomainError
from .quaternion import Quaternion, QuaternionAlgebra

DEN_LIMIT = 1 << 64

Matrix = list[list[int]]


def hnf(rows: Iterable[Sequence[int]], ncols: int = 4) -> Matrix:
    """Row-style Hermite normal form; zero rows are dropped."""
    A = [list(r) for r in rows if any(r)]
    out: Matrix = []
    pivots: list[int] = []
    col = 0
    while A and col < ncols:
        nz = [r for r in A if r[col]]
        if not nz:
            col += 1
            continue
        # Euclid on the column until one row survives
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for k in range(col, ncols):
                    r[k] -= q * piv[k]
            nz = [r for r in nz if r[col]]
        piv = nz[0]
        if piv[col] < 0:
            piv[:] = [-x for x in piv]
        A = [r for r in A if r is not piv and any(r)]
        out.append(piv)
        pivots.append(col)
        col += 1
    for i, (row, c) in enumerate(zip(out, pivots)):
        for prev in out[:i]:
            q = prev[c] // row[c]
            if q:
                for k in range(c, ncols):
                    prev[k] -= q * row[k]
    return out


def _det(M: Sequence[Sequence[Fraction]]) -> Fraction:
    M = [[Fraction(x) for x in r] for r in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                for k in range(c, n):
                    M[r][k] -= f * M[c][k]
    return det


def _inverse(M: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise DomainError("singular matrix")
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [r[n:] for r in A]


def determinant(M) -> Fraction:
    return _det(M)


def matrix_inverse(M) -> list[list[Fraction]]:
    return _inverse(M)


class Lattice:
    """Z-span of finitely many quaternions of one algebra."""

    __slots__ = ("algebra", "den", "rows")

    def __init__(self, algebra: QuaternionAlgebra, den: int, rows: Matrix, *, _canonical: bool = False):
        self.algebra = algebra
        if _canonical:
            self.den, self.rows = den, rows
            return
        L = Lattice.from_vectors(algebra, [[Fraction(x, den) for x in r] for r in rows])
        self.den, self.rows = L.den, L.rows

    @classmethod
    def from_vectors(cls, algebra: QuaternionAlgebra, vectors: Iterable[Sequence]) -> "Lattice":
        vecs = [[Fraction(x) for x in v] for v in vectors]
        q = 1
        for v in vecs:
            for x in v:
                q = q * x.denominator // math.gcd(q, x.denominator)
        rows = hnf([[int(x * q) for x in v] for v in vecs])
        g = 0
        for r in rows:
            for x in r:
                g = math.gcd(g, x)
        g = math.gcd(g, q) if g else q
        den = q // g
        if den >= DEN_LIMIT:
            raise OverflowError("lattice denominator exceeds 2^64")
        rows = [[x // g for x in r] for r in rows]
        return cls(algebra, den, rows, _canonical=True)

    @classmethod
    def from_generators(cls, algebra: QuaternionAlgebra, gens: Iterable[Quaternion]) -> "Lattice":
        gens = list(gens)
        for g in gens:
            if g.algebra != algebra:
                raise DomainError("generator from a different algebra")
        return cls.from_vectors(algebra, [g.coords for g in gens])

    # -- basic structure -------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> list[Quaternion]:
        return [Quaternion(self.algebra, [Fraction(x, self.den) for x in r]) for r in self.rows]

    def basis_matrix(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.den) for x in r] for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.algebra == other.algebra and self.den == other.den and self.rows == other.rows

    def __hash__(self):
        return hash((self.algebra, self.den, tuple(map(tuple, self.rows))))

    def __repr__(self):
        return f"Lattice(den={self.den}, rows={self.rows})"

    def _require_full(self):
        if self.rank != 4:
            raise DomainError("operation needs a full-rank lattice")

    def coordinates(self, q: Quaternion) -> Optional[list[Fraction]]:
        """Rational coordinates of q in this basis (None if outside the span)."""
        v = [x * self.den for x in q.coords]
        coords = []
        for row in self.rows:
            c = next(k for k, x in enumerate(row) if x)
            f = v[c] / row[c]
            coords.append(f)
            v = [a - f * b for a, b in zip(v, row)]
        if any(v):
            return None
        return coords

    def __contains__(self, q: Quaternion) -> bool:
        c = self.coordinates(q)
        return c is not None and all(x.denominator == 1 for x in c)

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(b in self for b in other.basis())

    def volume(self) -> Fraction:
        """|det| of a full-rank basis (covolume in coordinate space)."""
        self._require_full()
        d = Fraction(1)
        for k, r in enumerate(self.rows):
            d *= Fraction(r[k], self.den)
        return abs(d)

    def index_in(self, other: "Lattice") -> Fraction:
        """[other : self] as a rational (self, other full rank)."""
        return self.volume() / other.volume()

    # -- constructions ---------------------------------------------------

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.from_generators(self.algebra, self.basis() + other.basis())

    def scale(self, c) -> "Lattice":
        c = Fraction(c)
        if c == 0:
            raise DomainError("scaling by zero")
        return Lattice.from_vectors(self.algebra, [[x * c for x in v] for v in self.basis_matrix()])

    def left_mul(self, g: Quaternion) -> "Lattice":
        return Lattice.from_generators(self.algebra, [g * b for b in self.basis()])

    def right_mul(self, g: Quaternion) -> "Lattice":
        return Lattice.from_generators(self.algebra, [b * g for b in self.basis()])

    def conjugate_by(self, g: Quaternion) -> "Lattice":
        """g^-1 L g."""
        gi = g.inverse()
        return Lattice.from_generators(self.algebra, [gi * b * g for b in self.basis()])

    def conj(self) -> "Lattice":
        return Lattice.from_generators(self.algebra, [b.conj() for b in self.basis()])

    def product(self, other: "Lattice") -> "Lattice":
        return Lattice.from_generators(self.algebra, [x * y for x in self.basis() for y in other.basis()])

    def gram(self) -> list[list[Fraction]]:
        """Trace-form Gram matrix tr(e_i e_j)."""
        B = self.basis()
        return [[(x * y).trace() for y in B] for x in B]

    def dual(self) -> "Lattice":
        """Dual under (x, y) -> tr(x y)."""
        self._require_full()
        G = _inverse(self.gram())
        B = self.basis()
        dual_basis = [sum((B[j] * G[k][j] for j in range(4)), self.algebra.scalar(0)) for k in range(4)]
        return Lattice.from_generators(self.algebra, dual_basis)

    def coordinate_dual(self) -> "Lattice":
        """Dual under the standard dot product on coordinates."""
        self._require_full()
        inv = _inverse(self.basis_matrix())
        cols = [[inv[r][c] for r in range(4)] for c in range(4)]
        return Lattice.from_vectors(self.algebra, cols)

    def intersect(self, other: "Lattice") -> "Lattice":
        self._require_full()
        other._require_full()
        return (self.coordinate_dual() + other.coordinate_dual()).coordinate_dual()

    def pure_sublattice(self) -> "Lattice":
        """L ∩ {tr = 0}: the HNF rows after the first have zero 1-coordinate."""
        self._require_full()
        return Lattice(self.algebra, self.den, [list(r) for r in self.rows[1:]], _canonical=True)

    def intersect_subspace(self, vectors: Sequence[Quaternion]) -> "Lattice":
        """L ∩ (Q-span of vectors), for full-rank L."""
        self._require_full()
        span = Lattice.from_generators(self.algebra, vectors)
        # annihilator of the span under the dot product: kernel of span^T
        ann = rational_kernel([[Fraction(x) for x in r] for r in span.rows])
        M = self.basis_matrix()
        A = [[sum(M[i][k] * a[k] for k in range(4)) for a in ann] for i in range(4)]
        ker = integer_left_kernel(A)
        vecs = [[sum(z[i] * M[i][k] for i in range(4)) for k in range(4)] for z in ker]
        if not vecs:
            raise DomainError("subspace meets the lattice trivially")
        return Lattice.from_vectors(self.algebra, vecs)


def rational_kernel(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Basis of {x in Q^4 : rows . x = 0}."""
    n = 4
    A = [r[:] for r in rows]
    pivcols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivcols.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivcols]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivcols):
            v[pc] = -A[i][fcol]
        basis.append(v)
    return basis


def integer_left_kernel(A: list[list[Fraction]]) -> Matrix:
    """Z-basis of {z in Z^m : z A = 0} for a rational m x k matrix A."""
    m = len(A)
    k = len(A[0]) if A and A[0] else 0
    q = 1
    for r in A:
        for x in r:
            q = q * Fraction(x).denominator // math.gcd(q, Fraction(x).denominator)
    aug = [[int(Fraction(x) * q) for x in r] + [int(i == j) for j in range(m)] for i, r in enumerate(A)]
    H = hnf(aug, ncols=k + m)
    return [row[k:] for row in H if not any(row[:k])]


def standard_lattice(alg: QuaternionAlgebra) -> Lattice:
    return Lattice.from_generators(alg, alg.basis())


def lattice_from_generators(alg: QuaternionAlgebra, gens: Iterable[Quaternion]) -> Lattice:
    L = Lattice.from_generators(alg, gens)
    if L.rank < 4:
        raise DomainError(f"generators span a rank-{L.rank} lattice, need rank 4")
    return L
