"""Bounded searches for lattice elements of prescribed reduced norm.

Elements are ``base + sum(c_k * gens[k])`` with integer coefficients in a
box ``|c_k| <= bound``.  The norm is quadratic in the last coefficient, so
the box is scanned over the other coefficients (vectorized) and the last
one is solved for exactly.

Hits are ranked by ``search_key``: sup-norm, then l1-norm, then absolute
values, then signs (positive first).  Searching growing boxes and stopping
at the first non-empty one returns the global minimum under this key.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .quaternion import Quaternion

INT64_SAFE = 1 << 62


def search_key(c: Sequence[int]):
    return (max(map(abs, c), default=0), sum(map(abs, c)), tuple(abs(x) for x in c), tuple(x < 0 for x in c))


def _bilinear(x: Quaternion, y: Quaternion) -> Fraction:
    return (x * y.conj()).trace()


def _lcm(values) -> int:
    m = 1
    for v in values:
        d = Fraction(v).denominator
        m = m * d // math.gcd(m, d)
    return m


def _box_shells(bound: int) -> list[int]:
    hs, h = [], 1
    while h < bound:
        hs.append(h)
        h *= 2
    hs.append(bound)
    return hs


def norm_solutions(base: Quaternion, gens: Sequence[Quaternion], target, bound: int) -> list[tuple[int, ...]]:
    """All coefficient vectors in the box with n(base + sum c_k g_k) == target."""
    r = len(gens)
    if r == 0:
        return [()] if base.norm() == target else []
    target = Fraction(target)
    N0 = base.norm() - target
    L = [_bilinear(base, g) for g in gens]
    Q = [[gens[k].norm() if k == l else _bilinear(gens[k], gens[l]) for l in range(r)] for k in range(r)]
    M = _lcm([N0] + L + [Q[k][l] for k in range(r) for l in range(k, r)])
    N0, L = int(N0 * M), [int(x * M) for x in L]
    Q = [[int(Q[k][l] * M) for l in range(r)] for k in range(r)]

    H = bound
    last = r - 1
    # size estimate for the int64 fast path
    mag = abs(N0) + sum(abs(x) for x in L) * H + sum(abs(Q[k][l]) for k in range(r) for l in range(k, r)) * H * H
    dtype = np.int64 if 8 * mag * mag < INT64_SAFE else object

    rng = np.arange(-H, H + 1, dtype=np.int64)
    if last:
        grids = np.meshgrid(*([rng] * last), indexing="ij")
        cs = [g.ravel().astype(dtype) for g in grids]
    else:
        cs = []
    one = np.ones(len(cs[0]) if cs else 1, dtype=dtype)
    A = Q[last][last]
    B = one * L[last]
    C = one * N0
    for k in range(last):
        B = B + cs[k] * Q[k][last]
        C = C + cs[k] * L[k]
        for l in range(k, last):
            C = C + cs[k] * cs[l] * Q[k][l]

    out = []
    if A == 0:
        nz = np.nonzero(B != 0)[0]
        for idx in nz:
            b, c = int(B[idx]), int(C[idx])
            if c % b == 0 and abs(-c // b) <= H:
                out.append(tuple(int(cs[k][idx]) for k in range(last)) + (-c // b,))
        return out
    disc = B * B - 4 * A * C
    idx = np.nonzero(disc >= 0)[0]
    if dtype is np.int64 and len(idx):
        d = disc[idx]
        s = np.floor(np.sqrt(d.astype(np.float64))).astype(np.int64)
        square = (s * s == d) | ((s + 1) * (s + 1) == d) | ((s - 1) * (s - 1) == d)
        idx = idx[square]
    for i in idx:
        dd = int(disc[i])
        sq = math.isqrt(dd)
        if sq * sq != dd:
            continue
        b = int(B[i])
        prefix = tuple(int(cs[k][i]) for k in range(last))
        for num in {-b + sq, -b - sq}:
            if num % (2 * A) == 0 and abs(num // (2 * A)) <= H:
                out.append(prefix + (num // (2 * A),))
    return out


def combine(base: Quaternion, gens: Sequence[Quaternion], coeffs: Sequence[int]) -> Quaternion:
    x = base
    for c, g in zip(coeffs, gens):
        if c:
            x = x + g * c
    return x


def first_element(
    base: Quaternion,
    gens: Sequence[Quaternion],
    targets: Iterable,
    bound: int,
    accept: Optional[Callable[[Quaternion], bool]] = None,
) -> Optional[tuple[tuple[int, ...], Quaternion]]:
    """Key-minimal element whose norm lies in targets and passes accept."""
    targets = list(targets)
    for h in _box_shells(bound):
        hits = set()
        for t in targets:
            hits.update(norm_solutions(base, gens, t, h))
        for c in sorted(hits, key=search_key):
            x = combine(base, gens, c)
            if accept is None or accept(x):
                return c, x
    return None


def all_elements(base, gens, targets, bound, accept=None) -> list[tuple[tuple[int, ...], Quaternion]]:
    """Every accepted element in the box, in key order."""
    hits = set()
    for t in targets:
        hits.update(norm_solutions(base, gens, t, bound))
    out = []
    for c in sorted(hits, key=search_key):
        x = combine(base, gens, c)
        if accept is None or accept(x):
            out.append((c, x))
    return out
