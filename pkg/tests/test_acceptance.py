"""Acceptance criteria 1-9, one test each, with a PASS/FAIL summary line."""

import itertools
import json
import random
import time
from fractions import Fraction

from conftest import SHIPPED, datum_for, order_for
from oracles import hilbert_brute, kronecker_oracle, qmul, reduced_disc_oracle
from quatforget.arith import INF, QuadOrder, candidate_places, hilbert_symbol, is_squarefree, prime_divisors
from quatforget.atkin_lehner import (
    ALSubgroup,
    degree_forgetful_F,
    degree_forgetful_hilbert,
    find_norm_class_element,
    group_W0,
    stable_search,
    twist_witnesses,
)
from quatforget.cli import main
from quatforget.eichler import contains_twist, embeddable_maximal, find_embedding, pair_from_element
from quatforget.errors import NotFoundWithinBound
from quatforget.orders import maximal_order, reduced_discriminant
from quatforget.polarization import (
    ComplexPoint,
    degree_formula,
    degree_oracle,
    make_principal_datum,
    ns_lattice,
    polarization_degree,
    positivity_check,
    pullback_c1,
    verify_stable_fixes,
    verify_twist_transport,
)
from quatforget.quaternion import QuaternionAlgebra, algebra_for_discriminant

RESULTS = {}
TWO_PRIME = [D for D in range(6, 151) if is_squarefree(D) and len(prime_divisors(D)) == 2]


def record(n, ok, detail):
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    assert ok, RESULTS[n]


def elapsed(start):
    return time.perf_counter() - start


def test_criterion_1_explicit_degrees(capsys):
    details, ok = [], True
    for D, (a, b) in ((6, ("-1", "3")), (10, ("2", "5"))):
        start = time.perf_counter()
        code = main(["degree", "-a", a, "-b", b])
        js = json.loads(capsys.readouterr().out)
        t = elapsed(start)
        good = code == 0 and js["D"] == D and js["twisting"] is True and js["degree_piF"] == 4 and t < 5
        ok &= good
        details.append(f"D={D} degree={js['degree_piF']} {t:.2f}s")
    record(1, ok, "; ".join(details))


def test_criterion_2_dichotomy():
    start = time.perf_counter()
    bad, skipped, checked = [], [], 0
    for D in TWO_PRIME:
        try:
            datum = make_principal_datum(order_for(D))
        except NotFoundWithinBound:
            skipped.append(D)
            continue
        r = degree_forgetful_F(datum)
        W0 = group_W0(datum)
        checked += 1
        if r.degree_piF not in (2, 4) or r.degree_piF != len(W0) or not r.consistent or not r.complete:
            bad.append(D)
    t = elapsed(start)
    record(2, not bad and t < 60, f"{checked} discriminants, inconsistent={bad}, mu not found={skipped}, {t:.1f}s")


def test_criterion_3_hilbert():
    start = time.perf_counter()
    rng = random.Random(2024)
    failures = 0
    for _ in range(200):
        a = Fraction(rng.choice([-1, 1]) * rng.randint(1, 10**6), rng.randint(1, 1000))
        b = Fraction(rng.choice([-1, 1]) * rng.randint(1, 10**6), rng.randint(1, 1000))
        prod = 1
        for v in candidate_places(a, b):
            prod *= hilbert_symbol(a, b, v)
        places = QuaternionAlgebra(a, b).ramification.places
        failures += prod != 1 or len(places) % 2 != 0
    mismatches = 0
    for a, b in itertools.product(range(-20, 21), repeat=2):
        if a and b:
            for p in (2, 3, 5, 7, 11, 13):
                mismatches += hilbert_symbol(a, b, p) != hilbert_brute(a, b, p)
            mismatches += hilbert_symbol(a, b, INF) != hilbert_brute(a, b, INF)
    t = elapsed(start)
    record(3, failures == 0 and mismatches == 0 and t < 30,
           f"product/parity failures={failures}, brute-force mismatches={mismatches}, {t:.1f}s")


def test_criterion_4_maximal_orders():
    start = time.perf_counter()
    bad = []
    for D in TWO_PRIME:
        O = maximal_order(algebra_for_discriminant(D))
        alg = O.algebra
        oracle = reduced_disc_oracle((alg.a, alg.b), [b.coords for b in O.basis()])
        if reduced_discriminant(O) != D or oracle != D:
            bad.append(D)
    t = elapsed(start)
    record(4, not bad and t < 60, f"{len(TWO_PRIME)} orders, wrong discriminant={bad}, {t:.1f}s")


def _integral_class(datum, rng):
    basis = ns_lattice(datum).basis()
    while True:
        x = sum((b * rng.randint(-3, 3) for b in basis), datum.algebra.scalar(0))
        if x.norm() > 0:
            return x


def test_criterion_5_degree_oracle():
    rng = random.Random(5)
    bad, count = [], 0
    for D in (6, 10, 14, 15, 21, 22):
        d = datum_for(D)
        if degree_formula(d, d.principal_c1) != 1 or degree_oracle(d, d.principal_c1) != 1:
            bad.append((D, "principal"))
        for _ in range(20):
            x = _integral_class(d, rng)
            count += 1
            if degree_formula(d, x) != degree_oracle(d, x):
                bad.append((D, x))
    record(5, not bad, f"principal classes = 1, {count} random classes, mismatches={len(bad)}")


def _random_order_element(order, rng):
    while True:
        x = sum((b * rng.randint(-5, 5) for b in order.basis()), order.algebra.scalar(0))
        if not x.is_zero():
            return x


def test_criterion_6_pullbacks():
    rng = random.Random(6)
    bad, count = 0, 0
    for D in SHIPPED:
        d = datum_for(D)
        A, c1 = d.algebra, d.principal_c1
        for _ in range(50):
            alpha = _random_order_element(d.order, rng)
            beta = _random_order_element(d.order, rng)
            p = pullback_c1(d, c1, alpha)
            direct = qmul(A.a, A.b, qmul(A.a, A.b, alpha.conj().coords, c1.coords), alpha.coords)
            count += 1
            bad += p.coords != direct
            bad += polarization_degree(d, p) != alpha.norm() ** 4
            bad += pullback_c1(d, c1, alpha * beta) != pullback_c1(d, p, beta)
    record(6, bad == 0, f"{count} pullbacks over {len(SHIPPED)} data, failures={bad}")


def test_criterion_7_verifiers():
    lines, ok = [], True
    for D in (6, 10):
        d = datum_for(D)
        stable = stable_search(d).representatives
        gens = []
        for m, s in stable.items():
            if m != 1:
                gens.append((m, "stable", verify_stable_fixes(d, s)))
        for w in twist_witnesses(d):
            omega = find_norm_class_element(d.order, w.m, 1)
            alpha = omega.inverse() * w.chi
            good = alpha in d.order and alpha.norm() == -1 and verify_twist_transport(d, w, omega)
            gens.append((w.m, "twist", good))
        full = ALSubgroup.generated(D, [m for m, _, _ in gens]) == group_W0(d)
        ok &= full and all(g[2] for g in gens)
        lines.append(f"D={D} " + ",".join(f"{m}:{kind}={'ok' if g else 'no'}" for m, kind, g in gens))
    record(7, ok, "; ".join(lines))


def test_criterion_8_eichler():
    suite = list(itertools.product([6, 10, 14, 15], [2, 3, 5, 7, 19]))
    disagree = []
    for D, dd in suite:
        O = order_for(D)
        verdict = embeddable_maximal(O.algebra, dd)
        dk = dd if dd % 4 == 1 else 4 * dd
        independent = all(kronecker_oracle(dk, p) != 1 for p in prime_divisors(D))
        found = find_embedding(O, QuadOrder(dd)) is not None
        if not (verdict == independent == found):
            disagree.append((D, dd))
    special = embeddable_maximal(order_for(6).algebra, 2) and not embeddable_maximal(order_for(6).algebra, 19)
    wrong_degree = []
    for D in (6, 10, 14, 15):
        d = datum_for(D)
        pairs = [pair_from_element(d.order, w.chi) for w in twist_witnesses(d)]
        pairs += [find_embedding(d.order, QuadOrder(x)) for x in (2, 3, 5, 7)]
        for pair in filter(None, pairs):
            expected = 2 if contains_twist(pair, d) else 1
            if degree_forgetful_hilbert(d, pair.phi_image) != expected:
                wrong_degree.append((D, pair.quad.d))
    ok = not disagree and special and not wrong_degree
    record(8, ok, f"{len(suite)} pairs, disagreements={disagree}, wrong hilbert degree={wrong_degree}")


def test_criterion_9_positivity():
    d = datum_for(6)
    point = ComplexPoint(d.algebra, 1j)
    plus = positivity_check(d, d.principal_c1, point, 1e-9)
    minus = positivity_check(d, -d.principal_c1, point, 1e-9)
    record(9, plus != minus, f"+mu/D -> {plus}, -mu/D -> {minus}")
