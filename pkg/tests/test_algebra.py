"""comm-algebra: structure-constant algebras, nilradical, idempotents,
unit decompositions, root classes, the unit-group square, exp/log.

Oracles: direct nilpotency scans, quadratic-residue checks, Fraction
arithmetic for split series, and hand-verified lattice examples (the
t^2 = p*t order, whose maximal order adjoins t/p).
"""

import random
from fractions import Fraction

import pytest

from padic_simpson.algebra import (
    FinAlgebra,
    Morphism,
    alg_exp,
    alg_log,
    exp_G,
    nilradical,
    quotient_by_ideal,
)
from padic_simpson.context import PrimeContext
from padic_simpson.errors import (
    NotAUnit,
    NotConnected,
    NotSurjective,
    OutsideExpDomain,
    OutsideRepresentableDomain,
    PadicError,
)
from padic_simpson.components import connected_components, idempotents
from padic_simpson.scalar import PadicScalar, big_exp, exp_scalar
from padic_simpson.unitgroup import (
    RootClass,
    cart_square_check,
    decompose_unit,
    root_class_equal,
    root_class_mul,
    scalar_pk_root,
    unipotent_root,
    unit_battery,
)

C5 = PrimeContext(5, 32)
C3 = PrimeContext(3, 32)
C7 = PrimeContext(7, 32)
C2 = PrimeContext(2, 32)


def dual_numbers(ctx):
    """K[x]/(x^2)"""
    return FinAlgebra.from_power_relation(ctx, [0, 0])


def split_quadratic(ctx):
    """K[x]/(x^2 - x)"""
    return FinAlgebra.from_power_relation(ctx, [0, 1])


def quadratic_field(ctx, c):
    """K[x]/(x^2 - c)"""
    return FinAlgebra.from_power_relation(ctx, [c, 0])


def cubic_nilpotents(ctx):
    """K[x]/(x^3)"""
    return FinAlgebra.from_power_relation(ctx, [0, 0, 0])


def spectral_like(ctx):
    """K[t]/(t^2 - p t): the coordinate ring of {0, p}; its natural order
    Z_p[t] is not maximal, the maximal order adjoins t/p."""
    return FinAlgebra.from_power_relation(ctx, [0, ctx.p])


def sum_scalars(xs):
    acc = xs[0]
    for x in xs[1:]:
        acc = acc + x
    return acc


class TestFinAlgebra:
    def test_rejects_noncommutative(self):
        one = PadicScalar.from_int(C5, 1)
        zero = PadicScalar.zero(C5)
        mul = [
            [[one, zero], [zero, one]],
            [[one, one], [zero, zero]],
        ]
        with pytest.raises(PadicError):
            FinAlgebra.create(C5, mul, [one, zero])

    def test_rejects_nonassociative(self):
        one = PadicScalar.from_int(C5, 1)
        zero = PadicScalar.zero(C5)
        # commutative but not associative: y*y = z, y*z = 1, z*z = 0 gives
        # (y y) z = z z = 0 while y (y z) = y
        def vec(*ints):
            return [PadicScalar.from_int(C5, n) for n in ints]

        mul = [
            [vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1)],
            [vec(0, 1, 0), vec(0, 0, 1), vec(1, 0, 0)],
            [vec(0, 0, 1), vec(1, 0, 0), vec(0, 0, 0)],
        ]
        with pytest.raises(PadicError):
            FinAlgebra.create(C5, mul, vec(1, 0, 0))

    def test_unit_law_checked(self):
        one = PadicScalar.from_int(C5, 1)
        zero = PadicScalar.zero(C5)
        mul = [[[zero, zero]] * 2, [[zero, zero]] * 2]
        with pytest.raises(PadicError):
            FinAlgebra.create(C5, mul, [one, zero])

    def test_element_ops(self):
        A = dual_numbers(C5)
        x = A.basis_element(1)
        u = A.unit() + x
        assert (u * u) == A.unit() + x * PadicScalar.from_int(C5, 2)
        assert (x * x).is_zero_to_precision()
        assert u.inv() * u == A.unit()

    def test_min_poly(self):
        A = split_quadratic(C5)
        x = A.basis_element(1)
        # x^2 = x: min poly T^2 - T
        mp = x.min_poly()
        assert len(mp) == 3
        assert mp[0].is_zero and mp[1] == PadicScalar.from_int(C5, -1)

    def test_nilpotency(self):
        A = cubic_nilpotents(C5)
        assert A.basis_element(1).is_nilpotent()
        assert not A.unit().is_nilpotent()


class TestNilradical:
    def test_field_has_none(self):
        assert nilradical(FinAlgebra.field(C5)) == []

    def test_dual_numbers(self):
        A = dual_numbers(C5)
        basis = nilradical(A)
        assert len(basis) == 1
        assert (basis[0] * basis[0]).is_zero_to_precision()

    def test_split_quadratic_reduced(self):
        # oracle: direct nilpotency scan over basis combinations
        A = split_quadratic(C5)
        assert nilradical(A) == []
        for a in range(3):
            for b in range(3):
                x = A.from_ints([a, b])
                if not x.is_zero_to_precision():
                    assert not x.is_nilpotent() or (a == 0 and b == 0)

    def test_quotient_by_nilradical(self):
        A = cubic_nilpotents(C5)
        S, proj, section = quotient_by_ideal(A, nilradical(A))
        assert S.dim == 1
        assert proj.apply(A.unit()) == S.unit()

    def test_power_fails_outside_span(self):
        # adding any nilpotent to a direction outside the radical never
        # produces a nilpotent: all powers stay nonzero to precision
        A = split_quadratic(C5)
        n_basis = nilradical(A)
        assert n_basis == []
        for k in range(3):
            x = A.unit() + A.basis_element(1) * PadicScalar.from_int(C5, k)
            assert not (x ** A.dim).is_zero_to_precision()

    def test_nilradical_dual_numbers_span_is_ideal(self):
        A = dual_numbers(C5)
        basis = nilradical(A)
        for n in basis:
            for i in range(A.dim):
                prod = n * A.basis_element(i)
                # products stay inside the span: here the span is {x}, and
                # x * x = 0, x * 1 = x
                assert prod.coords[0].is_zero


class TestIdempotents:
    def test_local_algebra(self):
        assert idempotents(dual_numbers(C5)) == [dual_numbers(C5).unit()]

    def test_split_quadratic(self):
        A = split_quadratic(C5)
        idems = idempotents(A)
        assert len(idems) == 2
        x = A.basis_element(1)
        one_minus_x = A.unit() - x
        assert any(e == x for e in idems)
        assert any(e == one_minus_x for e in idems)

    def test_nonsquare_quadratic_is_connected(self):
        # 2 is a quadratic non-residue mod 5 (oracle: Euler criterion)
        assert pow(2, (5 - 1) // 2, 5) != 1
        assert idempotents(quadratic_field(C5, 2)) == [quadratic_field(C5, 2).unit()]

    def test_square_quadratic_splits(self):
        # 4 is a square: K[x]/(x^2-4) = K x K
        idems = idempotents(quadratic_field(C5, 4))
        assert len(idems) == 2

    def test_ramified_quadratic_is_connected(self):
        # x^2 = p: a field (ramified), reduction is local
        assert len(idempotents(quadratic_field(C5, 5))) == 1

    def test_saturation_case(self):
        # Z_p[t]/(t^2 - p t) is not maximal; the algebra splits as K x K
        # with idempotents t/p and 1 - t/p
        A = spectral_like(C5)
        idems = idempotents(A)
        assert len(idems) == 2
        t_over_p = A.element([PadicScalar.zero(C5), PadicScalar.from_val_unit(C5, -1, 1)])
        assert any(e == t_over_p for e in idems)

    def test_completeness_invariant(self):
        for A in (split_quadratic(C3), spectral_like(C3), quadratic_field(C7, 3)):
            idems = idempotents(A)
            total = A.zero()
            for e in idems:
                assert (e * e) == e
                total = total + e
            assert total == A.unit()
            # each factor is connected: re-running returns just the unit
            for comp in connected_components(A, idems):
                assert len(idempotents(comp.algebra)) == 1

    def test_p2_split(self):
        # x^2 = x at p = 2 still splits
        assert len(idempotents(split_quadratic(C2))) == 2

    def test_saturation_squared_eigenvalues(self):
        # x^2 = p^2 splits as {p, -p}; the natural order Z_p[x] is index p
        # in the maximal one, so this also exercises saturation
        for ctx in (C3, C5):
            A = quadratic_field(ctx, ctx.p ** 2)
            idems = idempotents(A)
            assert len(idems) == 2
            # the idempotents are (1 +- x/p)/2
            for e in idems:
                assert (e * e) == e


class TestDecomposeUnit:
    def test_trivial(self):
        A = dual_numbers(C5)
        d = decompose_unit(A.unit())
        assert d.scalar_part == PadicScalar.from_int(C5, 1)
        assert d.nilpotent_part.is_zero_to_precision()

    def test_example_3_plus_x(self):
        # u = 3 + x in K[x]/(x^2): scalar 3, unipotent 1 + x/3
        A = dual_numbers(C5)
        u = A.from_ints([3, 1])
        d = decompose_unit(u)
        assert d.scalar_part == PadicScalar.from_int(C5, 3)
        third = PadicScalar.from_fraction(C5, Fraction(1, 3))
        assert d.nilpotent_part == A.basis_element(1) * third
        assert d.recombine() == u

    def test_not_a_unit(self):
        A = dual_numbers(C5)
        with pytest.raises(NotAUnit):
            decompose_unit(A.basis_element(1))

    def test_not_connected(self):
        A = split_quadratic(C5)
        # (1, 2) on the two components is a unit but not scalar * unipotent
        u = A.unit() + A.basis_element(1)
        with pytest.raises(NotConnected):
            decompose_unit(u)

    def test_round_trip_battery(self):
        A = cubic_nilpotents(C3)
        for u in unit_battery(A, seed=5):
            d = decompose_unit(u)
            assert d.recombine().agrees(u, 28)


class TestRootClasses:
    def test_defining_relation(self):
        A = FinAlgebra.field(C5)
        u = A.scalar_element(PadicScalar.from_int(C5, 7))
        assert root_class_equal(RootClass(A, u, 0), RootClass(A, u ** 5, 1))

    def test_trivial_classes(self):
        A = FinAlgebra.field(C5)
        assert root_class_equal(RootClass(A, A.unit(), 0), RootClass(A, A.unit(), 7))

    def test_distinct_units(self):
        A = FinAlgebra.field(C5)
        two = A.scalar_element(PadicScalar.from_int(C5, 2))
        three = A.scalar_element(PadicScalar.from_int(C5, 3))
        assert not root_class_equal(RootClass(A, two, 0), RootClass(A, three, 0))

    def test_equivalence_and_multiplication(self):
        A = dual_numbers(C5)
        u = A.from_ints([2, 5])
        w = A.from_ints([3, 10])
        a = RootClass(A, u, 0)
        b = RootClass(A, u ** 5, 1)
        c = RootClass(A, u ** 25, 2)
        assert root_class_equal(a, b) and root_class_equal(b, c) and root_class_equal(a, c)
        ab = root_class_mul(a, RootClass(A, w, 0))
        assert root_class_equal(ab, RootClass(A, (u * w) ** 5, 1))

    def test_p2_transitivity_with_sign(self):
        A = FinAlgebra.field(C2)
        minus_one = A.scalar_element(PadicScalar.from_int(C2, -1))
        # (-1, 0) and (1, 1) rescale to the same square; equality must agree
        a = RootClass(A, minus_one, 0)
        b = RootClass(A, A.unit(), 1)
        c = RootClass(A, A.unit(), 0)
        assert root_class_equal(a, b)
        assert root_class_equal(b, c)
        assert root_class_equal(a, c)  # transitive thanks to the extra squaring

    def test_scalar_pk_root(self):
        c = PadicScalar.from_int(C5, 1 + 5 ** 3)
        r = scalar_pk_root(c, 2)
        assert r is not None and (r ** 25).agrees(c, 28)
        assert scalar_pk_root(PadicScalar.from_int(C5, 5), 1) is None  # val 1 not divisible by 5
        assert scalar_pk_root(PadicScalar.from_int(C5, 2), 1) is None  # 2 not a 5th power unit...

    def test_unipotent_root(self):
        A = cubic_nilpotents(C5)
        u = A.unit() + A.basis_element(1)
        r = unipotent_root(u, 2)
        assert (r ** 25).agrees(u, 28)


class TestAlgExpLog:
    def test_exp_zero(self):
        A = dual_numbers(C5)
        assert alg_exp(A.zero()) == A.unit()

    def test_split_series_oracle(self):
        # alg_exp(p + x) = exp(p) * (1 + x) in K[x]/(x^2)
        A = dual_numbers(C5)
        x = A.basis_element(1)
        arg = A.scalar_element(PadicScalar.from_int(C5, 5)) + x * PadicScalar.from_int(C5, 5)
        # exp(5 + 5x) = exp(5) * (1 + 5x) since (5x)^2 = 0
        got = alg_exp(arg)
        e5 = exp_scalar(PadicScalar.from_int(C5, 5))
        expected = (A.unit() + x * PadicScalar.from_int(C5, 5)) * e5
        assert got.agrees(expected, 28)

    def test_nilpotent_series_finite(self):
        A = cubic_nilpotents(C5)
        x = A.basis_element(1) * PadicScalar.from_int(C5, 5)
        assert alg_log(alg_exp(x)).agrees(x, 30)

    def test_nilpotent_any_valuation(self):
        # nilpotent arguments need no valuation bound: series is finite
        A = dual_numbers(C5)
        x = A.basis_element(1)
        assert alg_exp(x) == A.unit() + x

    def test_domain_error(self):
        A = dual_numbers(C5)
        with pytest.raises(OutsideExpDomain):
            alg_exp(A.unit())  # eigen-scalar 1 has valuation 0

    def test_domain_on_split_algebra(self):
        # eigen-scalars (p, 1): one component violates the bound
        A = split_quadratic(C5)
        bad = A.basis_element(1) + A.scalar_element(PadicScalar.from_int(C5, 5)) \
            - A.basis_element(1) * PadicScalar.from_int(C5, 5)
        # this element is p on one component, 1 + ... on the other: build
        # directly: value (a, b) corresponds to a + (b - a) x
        x = A.basis_element(1)
        elt = A.scalar_element(PadicScalar.from_int(C5, 5)) + x * PadicScalar.from_int(C5, 1 - 5)
        with pytest.raises(OutsideExpDomain):
            alg_exp(elt)

    def test_exp_log_round_trip_battery(self):
        rng = random.Random(23)
        for ctx in (C3, C5):
            for A in (dual_numbers(ctx), split_quadratic(ctx), cubic_nilpotents(ctx)):
                for _ in range(10):
                    coords = [ctx.p * rng.randrange(0, ctx.p ** 6) for _ in range(A.dim)]
                    x = A.from_ints(coords)
                    u = alg_exp(x)
                    assert alg_log(u).agrees(x, 28), (ctx.p, coords)

    def test_homomorphism_on_commuting(self):
        A = cubic_nilpotents(C5)
        x = A.from_ints([5, 10, 15])
        y = A.from_ints([25, 5, 0])
        assert alg_exp(x + y).agrees(alg_exp(x) * alg_exp(y), 28)

    def test_against_multiplication_operator_oracle(self):
        # alg_exp must agree with the matrix exponential of the
        # multiplication operator applied to 1 (an independent kernel)
        from padic_simpson.matrix import mat_exp

        cases = []
        for ctx in (C3, C5):
            p = ctx.p
            A1 = spectral_like(ctx)  # separated eigenvalues {0, p}
            cases += [A1.from_ints([0, 1]), A1.from_ints([p, 2]), A1.from_ints([p * 2, 7])]
            A2 = dual_numbers(ctx)  # repeated eigenvalue with nilpotent part
            cases += [A2.from_ints([p, 1]), A2.from_ints([p * 4, p])]
            A3 = split_quadratic(ctx)  # distinct units on two components
            cases += [A3.from_ints([p, p * 3])]
        for x in cases:
            got = alg_exp(x)
            m = x.algebra.mult_operator(x)
            if m.min_valuation() is not None and m.min_valuation() >= x.algebra.ctx.e0:
                expected_mat = mat_exp(m)
                one = list(x.algebra.one)
                expected = x.algebra.element([
                    sum_scalars([expected_mat[i, j] * one[j] for j in range(x.algebra.dim)])
                    for i in range(x.algebra.dim)
                ])
                assert got.agrees(expected, 28), x
            assert alg_log(got).agrees(x, 28), x

    def test_semisimple_plus_nilpotent_regression(self):
        # eigenvalues {0, p} around a nilpotent: the truncation bound must
        # account for the Lagrange denominators of the separable part
        from padic_simpson.generate import gen_higgs
        from padic_simpson.higgs import higgs_to_rep, spectral_algebra
        from padic_simpson.matrix import mat_exp

        H = gen_higgs(3, 1, 4, density=0.6, seed=90_006, precision=32)
        S = spectral_algebra(H)
        got = S.embed(alg_exp(S.tau[0]))
        assert got == mat_exp(H.theta[0])


class TestExpG:
    def test_zero(self):
        A = dual_numbers(C5)
        assert exp_G(A.zero()) == A.unit()

    def test_collapses_to_big_exp_on_field(self):
        A = FinAlgebra.field(C5)
        x = A.scalar_element(PadicScalar.from_int(C5, 10))
        assert exp_G(x).coords[0] == big_exp(PadicScalar.from_int(C5, 10))

    def test_nilpotent_exact(self):
        A = dual_numbers(C5)
        assert exp_G(A.basis_element(1)) == A.unit() + A.basis_element(1)

    def test_outside_domain(self):
        A = FinAlgebra.field(C5)
        with pytest.raises(OutsideRepresentableDomain):
            exp_G(A.unit())  # scalar part 1 has valuation 0

    def test_log_inverts(self):
        A = cubic_nilpotents(C5)
        x = A.from_ints([5, 3, 7])  # scalar 5 + nilpotent part
        assert alg_log(exp_G(x)).agrees(x, 28)

    def test_functoriality(self):
        # quotient K[x]/(x^3) -> K[x]/(x^2) (x -> x)
        A = cubic_nilpotents(C5)
        B = dual_numbers(C5)
        images = [B.unit(), B.basis_element(1), B.zero()]
        f = Morphism.create(A, B, images)
        x = A.from_ints([5, 2, 3])
        assert f.apply(exp_G(x)).agrees(exp_G(f.apply(x)), 28)

    def test_functoriality_under_inclusion(self):
        # unital inclusion K -> K[x]/(x^2)
        K = FinAlgebra.field(C5)
        B = dual_numbers(C5)
        inc = Morphism.create(K, B, [B.unit()])
        a = K.scalar_element(PadicScalar.from_int(C5, 25))
        assert inc.apply(exp_G(a)).agrees(exp_G(inc.apply(a)), 28)

    def test_agrees_with_alg_exp_on_common_domain(self):
        # exp_G factors through big_exp(a) * alg_exp(nu); on the exp-domain
        # this must coincide with the one-shot algebra exponential
        for ctx in (C3, C5):
            A = cubic_nilpotents(ctx)
            x = A.from_ints([ctx.p * 2, 3, ctx.p])
            lhs = exp_G(x)
            rhs = alg_exp(x)
            k = min(lhs.min_precision(), rhs.min_precision())
            assert lhs.agrees(rhs, k)


class TestCartSquare:
    def quotient_to_field(self, A, ctx):
        """x -> 0: K[x]/(g) -> K for nilpotent-x algebras."""
        K = FinAlgebra.field(ctx)
        images = [K.unit()] + [K.zero()] * (A.dim - 1)
        return K, Morphism.create(A, K, images)

    def test_identity_on_field(self):
        K = FinAlgebra.field(C5)
        f = Morphism.create(K, K, [K.unit()])
        report = cart_square_check(K, f)
        assert report.ok, str(report)

    def test_dual_numbers(self):
        A = dual_numbers(C5)
        K, f = self.quotient_to_field(A, C5)
        report = cart_square_check(A, f)
        assert report.ok, str(report)
        assert report.pullback_checked > 0 and report.pushout_checked > 0

    def test_split_quadratic_componentwise(self):
        # R disconnected: only S must be connected; the live component wins
        A = split_quadratic(C5)
        K = FinAlgebra.field(C5)
        images = [K.unit(), K.zero()]  # x -> 0
        f = Morphism.create(A, K, images)
        report = cart_square_check(A, f)
        assert report.ok, str(report)
        assert report.components == 2

    def test_not_surjective(self):
        A = dual_numbers(C5)
        images = [A.unit(), A.zero()]
        f = Morphism.create(A, A, [A.unit(), A.zero()], validate=False)
        with pytest.raises(NotSurjective):
            cart_square_check(A, f)

    def test_target_must_be_connected(self):
        A = split_quadratic(C5)
        ident = Morphism.create(A, A, [A.basis_element(0), A.basis_element(1)], validate=False)
        with pytest.raises(NotConnected):
            cart_square_check(A, ident)


class TestMorphism:
    def test_validation(self):
        A = dual_numbers(C5)
        K = FinAlgebra.field(C5)
        with pytest.raises(PadicError):
            Morphism.create(A, K, [K.zero(), K.zero()])  # unit not preserved

    def test_kernel(self):
        A = dual_numbers(C5)
        K = FinAlgebra.field(C5)
        f = Morphism.create(A, K, [K.unit(), K.zero()])
        kern = f.kernel_basis()
        assert len(kern) == 1
        assert f.apply(kern[0]).is_zero_to_precision()
