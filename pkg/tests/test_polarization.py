import random
from fractions import Fraction

import pytest
import sympy

from conftest import SHIPPED, datum_for, order_for
from quatforget.atkin_lehner import find_norm_class_element, stable_search, twist_witnesses
from quatforget.errors import DomainError, Indeterminate, InvariantViolation
from quatforget.orders import LeftIdeal, normalizes, standard_order
from quatforget.polarization import (
    ComplexPoint,
    PrincipalDatum,
    al_act,
    degree_formula,
    degree_oracle,
    is_integral_on_ideal,
    make_principal_datum,
    ns_lattice,
    polarization_degree,
    positivity_check,
    pullback_c1,
    riemann_form,
    riemann_matrix,
    rosati_compatibility,
    rosati_image,
    verify_stable_fixes,
    verify_twist_transport,
)
from quatforget.quaternion import QuaternionAlgebra


def random_element(lat, rng, span=4):
    return sum((b * rng.randint(-span, span) for b in lat.basis()), lat.algebra.scalar(0))


def random_rational(alg, rng, pure=False):
    c = [Fraction(rng.randint(-9, 9), rng.choice([1, 2, 3, 5, 6, 7, 10, 14])) for _ in range(4)]
    if pure:
        c[0] = Fraction(0)
    return alg.element(*c)


def random_integral_class(datum, rng):
    while True:
        x = random_element(ns_lattice(datum), rng, 3)
        if x.norm() > 0:
            return x


class TestDatum:
    @pytest.mark.parametrize("D", SHIPPED)
    def test_construction(self, D):
        d = datum_for(D)
        assert d.mu * d.mu == -D and d.mu.trace() == 0 and d.mu in d.order

    def test_split_rejected(self):
        A = QuaternionAlgebra(1, 1)
        with pytest.raises(DomainError):
            make_principal_datum(standard_order(A))

    def test_non_maximal_rejected(self):
        O = order_for(6)
        with pytest.raises(DomainError):
            make_principal_datum(standard_order(O.algebra))

    def test_invariants_enforced(self, d6):
        with pytest.raises(DomainError):
            PrincipalDatum(d6.order, d6.ideal, d6.mu * 2)


class TestNeronSeveri:
    @pytest.mark.parametrize("D", SHIPPED)
    def test_rank_and_principal_class(self, D):
        d = datum_for(D)
        ns = ns_lattice(d)
        assert ns.rank == 3 and d.principal_c1 in ns

    def test_scaling_ideal(self, d6):
        big = PrincipalDatum(d6.order, LeftIdeal(d6.order.scale(2), d6.order), d6.mu)
        assert ns_lattice(big) == ns_lattice(d6).scale(Fraction(1, 4))

    @pytest.mark.parametrize("D", [6, 10, 15])
    def test_integrality_iff_membership(self, D):
        d = datum_for(D)
        ns = ns_lattice(d)
        rng = random.Random(D)
        hits = {True: 0, False: 0}
        for _ in range(30):
            x = random_rational(d.algebra, rng, pure=True)
            if rng.random() < 0.5:
                x = random_element(ns, rng, 3)
            verdict = is_integral_on_ideal(d, x)
            assert verdict == (x in ns)
            hits[verdict] += 1
        assert hits[True] and hits[False]


class TestRiemannForm:
    def test_alternating(self, d6):
        rng = random.Random(4)
        A = d6.algebra
        c1 = d6.principal_c1
        for _ in range(20):
            b, g = random_rational(A, rng), random_rational(A, rng)
            assert riemann_form(d6, c1, b, b) == 0
            assert riemann_form(d6, c1, b, g) == -riemann_form(d6, c1, g, b)

    def test_rosati(self, d6):
        rng = random.Random(5)
        A = d6.algebra
        c1 = d6.principal_c1
        for _ in range(20):
            beta, u, v = (random_rational(A, rng) for _ in range(3))
            assert rosati_compatibility(d6, c1, beta, u, v)
        assert rosati_image(c1, A.scalar(3)) == 3
        assert rosati_image(c1, c1) == -c1
        with pytest.raises(DomainError):
            rosati_compatibility(d6, A.scalar(0), A.one, A.one, A.one)


class TestDegree:
    @pytest.mark.parametrize("D", SHIPPED)
    def test_principal_is_one(self, D):
        d = datum_for(D)
        assert polarization_degree(d, d.principal_c1) == 1

    @pytest.mark.parametrize("D", SHIPPED)
    def test_random_classes(self, D):
        d = datum_for(D)
        rng = random.Random(100 + D)
        basis = d.ideal.lattice.basis()
        for _ in range(20):
            x = random_integral_class(d, rng)
            assert degree_formula(d, x) == degree_oracle(d, x)
            M = sympy.Matrix(riemann_matrix(x, basis))
            assert M.det() == degree_oracle(d, x)

    def test_scaling(self, d6):
        c1 = d6.principal_c1
        for k in (2, 3, 5):
            assert polarization_degree(d6, c1 * k) == k ** 4

    def test_non_principal_ideal(self, d6):
        rng = random.Random(9)
        O = d6.order
        beta = random_element(O, rng)
        I = LeftIdeal.principal(O, beta)
        d = PrincipalDatum(O, I, d6.mu)
        x = random_integral_class(d, rng)
        assert polarization_degree(d, x) == degree_oracle(d, x)

    def test_errors(self, d6, monkeypatch):
        with pytest.raises(DomainError):
            degree_formula(d6, d6.algebra.scalar(0))
        with pytest.raises(DomainError):
            degree_formula(d6, d6.algebra.element(0, 0, 1, 0))
        with pytest.raises(DomainError):
            degree_formula(d6, d6.principal_c1 + 1)
        import quatforget.polarization as pol

        monkeypatch.setattr(pol, "degree_oracle", lambda datum, x: Fraction(2))
        with pytest.raises(InvariantViolation):
            pol.polarization_degree(d6, d6.principal_c1)


class TestPullbacks:
    @pytest.mark.parametrize("D", SHIPPED)
    def test_random_alpha(self, D):
        d = datum_for(D)
        c1 = d.principal_c1
        rng = random.Random(200 + D)
        for _ in range(50):
            alpha = random_element(d.order, rng)
            if alpha.is_zero():
                continue
            p = pullback_c1(d, c1, alpha)
            assert p == alpha.conj() * c1 * alpha and p.trace() == 0
            assert p.norm() == alpha.norm() ** 2 * c1.norm()
            if alpha.norm() != 0:
                assert degree_formula(d, p) == alpha.norm() ** 4

    def test_examples(self, d6):
        c1 = d6.principal_c1
        assert pullback_c1(d6, c1, d6.mu) == c1 * 6
        assert pullback_c1(d6, c1, d6.algebra.scalar(3)) == c1 * 9
        with pytest.raises(DomainError):
            pullback_c1(d6, c1, d6.algebra.scalar(0))

    def test_composition(self, d10):
        rng = random.Random(11)
        c1 = d10.principal_c1
        for _ in range(20):
            a, b = random_element(d10.order, rng), random_element(d10.order, rng)
            if a.is_zero() or b.is_zero():
                continue
            assert pullback_c1(d10, c1, a * b) == pullback_c1(d10, pullback_c1(d10, c1, a), b)


class TestPositivity:
    @pytest.mark.parametrize("D", SHIPPED)
    def test_sign_dichotomy(self, D):
        d = datum_for(D)
        c1 = d.principal_c1
        plus, minus = positivity_check(d, c1), positivity_check(d, -c1)
        assert plus != minus
        for k in (2, 7):
            assert positivity_check(d, c1 * k) == plus

    def test_other_tau(self, d6):
        c1 = d6.principal_c1
        point = ComplexPoint(d6.algebra, 0.3 + 2.0j)
        assert positivity_check(d6, c1, point) != positivity_check(d6, -c1, point)

    def test_errors(self, d6):
        with pytest.raises(DomainError):
            ComplexPoint(d6.algebra, 1 - 1j)
        with pytest.raises(DomainError):
            ComplexPoint(QuaternionAlgebra(-1, -1))
        with pytest.raises(DomainError):
            positivity_check(d6, d6.algebra.element(0, 0, 1, 0))
        with pytest.raises(Indeterminate):
            positivity_check(d6, d6.principal_c1, tol=1e6)

    def test_splitting_homomorphism(self, d6):
        P = ComplexPoint(d6.algebra)
        one, I, J, K = P.images
        assert abs(I @ J - K).max() < 1e-12


class TestAtkinLehnerAction:
    def test_identity_and_mu(self, d6):
        c1 = d6.principal_c1
        assert al_act(d6, c1, d6.algebra.one).c1 == c1
        assert al_act(d6, c1, d6.mu).c1 == c1

    @pytest.mark.parametrize("m", [2, 3, 6])
    def test_involution_and_norm(self, d6, m):
        c1 = d6.principal_c1
        w = find_norm_class_element(d6.order, m, 1)
        once = al_act(d6, c1, w)
        assert once.c1.norm() == c1.norm()
        assert polarization_degree(d6, once.c1) == 1
        # twice is conjugation by omega^2, a rational multiple of a unit
        twice = al_act(d6, once.c1, w).c1
        u = w * w / m
        assert u in d6.order and u.norm() == 1
        assert twice == u.inverse() * c1 * u

    def test_errors(self, d6):
        c1 = d6.principal_c1
        with pytest.raises(DomainError):
            al_act(d6, c1, d6.algebra.element(1, 2, 0, 0))
        with pytest.raises(DomainError):
            al_act(d6, c1, d6.algebra.element(1, 1, 1, 0))  # norm -1


class TestVerifiers:
    @pytest.mark.parametrize("D", [6, 10])
    def test_stable(self, D):
        d = datum_for(D)
        assert verify_stable_fixes(d, d.mu)
        for s in stable_search(d).representatives.values():
            assert verify_stable_fixes(d, s)
        one_plus = 1 + d.mu
        if one_plus in d.order and normalizes(d.order, one_plus):
            assert verify_stable_fixes(d, one_plus)

    def test_stable_rejects_outside(self, d6):
        w = twist_witnesses(d6)[0]
        with pytest.raises(DomainError):
            verify_stable_fixes(d6, w.chi)

    @pytest.mark.parametrize("D", [6, 10])
    def test_twist_transport(self, D):
        d = datum_for(D)
        for w in twist_witnesses(d):
            omega = find_norm_class_element(d.order, w.m, 1)
            alpha = omega.inverse() * w.chi
            assert alpha.norm() == -1
            assert verify_twist_transport(d, w, omega)

    def test_transport_wrong_class(self, d6):
        ws = twist_witnesses(d6)
        w = next(x for x in ws if x.m == 2)
        omega = find_norm_class_element(d6.order, 3, 1)
        assert not verify_twist_transport(d6, w, omega)
