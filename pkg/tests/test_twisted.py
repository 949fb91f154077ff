"""Twisted group ring arithmetic, minimal parts, Newton polytopes, units."""

import random
from fractions import Fraction

import pytest

from sigma_polytope.errors import TwistMismatch, ZeroInput
from sigma_polytope.fields import FunctionField, MonomialAutomorphism
from sigma_polytope.polytope import minkowski_sum
from sigma_polytope.twisted import (
    TwistData,
    TwistedPoly,
    is_unit,
    mu_phi,
    newton_polytope,
    tl_mul,
    validate_twist,
)


def commutative_2d():
    return TwistData.untwisted(2)


def u_and_v(twist):
    return TwistedPoly.generator(twist, 0), TwistedPoly.generator(twist, 1)


def random_poly(rng, twist, max_terms=3, span=2):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        h = tuple(rng.randint(-span, span) for _ in range(twist.rank))
        c = rng.randint(-3, 3)
        if c:
            terms[h] = twist.field.from_int(terms.get(h, twist.field.zero) == twist.field.zero and c or c)
    out = TwistedPoly(twist, {h: twist.field.from_int(rng.randint(-3, 3)) for h in terms})
    return out


class TestMul:
    def test_commutative_expansion(self):
        tw = commutative_2d()
        u, _ = u_and_v(tw)
        one = TwistedPoly.one(tw)
        prod = tl_mul(one + u, one - u)
        assert prod == one - tl_mul(u, u)
        assert prod.terms == {(0, 0): Fraction(1), (2, 0): Fraction(-1)}

    def test_quantum_torus_commutation(self):
        # hand evaluation of the single-term rule:
        # v*u lands at (1,1) with cocycle value x^(1*1) = x, u*v with x^0 = 1
        tw = TwistData.quantum_torus()
        u, v = u_and_v(tw)
        x = tw.field.variable(0)
        vu = tl_mul(v, u)
        uv = tl_mul(u, v)
        assert uv.terms == {(1, 1): tw.field.one}
        assert vu.terms == {(1, 1): x}
        assert vu == uv.scale(x)

    def test_singleton_supports(self):
        tw = TwistData.quantum_torus()
        a = TwistedPoly.monomial(tw, (2, -1), 3)
        b = TwistedPoly.monomial(tw, (-1, 4), 5)
        prod = tl_mul(a, b)
        assert set(prod.terms) == {(1, 3)}

    def test_twist_mismatch(self):
        a = TwistedPoly.one(commutative_2d())
        b = TwistedPoly.one(TwistData.quantum_torus())
        with pytest.raises(TwistMismatch):
            tl_mul(a, b)

    def test_associativity_and_bilinearity_random(self):
        rng = random.Random(5)
        for tw in (commutative_2d(), TwistData.quantum_torus()):
            for _ in range(15):
                x = random_poly(rng, tw)
                y = random_poly(rng, tw)
                z = random_poly(rng, tw)
                assert tl_mul(tl_mul(x, y), z) == tl_mul(x, tl_mul(y, z))
                assert tl_mul(x + y, z) == tl_mul(x, z) + tl_mul(y, z)
                assert tl_mul(z, x + y) == tl_mul(z, x) + tl_mul(z, y)

    def test_support_containment(self):
        rng = random.Random(6)
        tw = TwistData.quantum_torus()
        for _ in range(20):
            x = random_poly(rng, tw)
            y = random_poly(rng, tw)
            if x.is_zero() or y.is_zero():
                continue
            sums = {tuple(a + b for a, b in zip(h, k)) for h in x.terms for k in y.terms}
            assert set(tl_mul(x, y).terms) <= sums

    def test_no_zero_divisors(self):
        rng = random.Random(7)
        for tw in (commutative_2d(), TwistData.quantum_torus()):
            for _ in range(25):
                x = random_poly(rng, tw)
                y = random_poly(rng, tw)
                if not x.is_zero() and not y.is_zero():
                    assert not tl_mul(x, y).is_zero()


class TestMuPhi:
    def test_min_on_first_coordinate(self):
        tw = commutative_2d()
        u, v = u_and_v(tw)
        x = TwistedPoly.one(tw) + u + v
        m = mu_phi(x, (1, 0))
        assert set(m.terms) == {(0, 0), (0, 1)}

    def test_unique_minimum(self):
        tw = commutative_2d()
        u, v = u_and_v(tw)
        x = TwistedPoly.one(tw) + u + v
        assert set(mu_phi(x, (1, 1)).terms) == {(0, 0)}

    def test_multiplicative_on_derived_example(self):
        # expand both sides exactly for phi = (1, 2)
        tw = commutative_2d()
        u, v = u_and_v(tw)
        one = TwistedPoly.one(tw)
        lhs = mu_phi(tl_mul(one + u, one + v), (1, 2))
        rhs = tl_mul(mu_phi(one + u, (1, 2)), mu_phi(one + v, (1, 2)))
        assert lhs == rhs == one

    def test_multiplicative_random(self):
        rng = random.Random(8)
        for tw in (commutative_2d(), TwistData.quantum_torus()):
            for _ in range(20):
                x = random_poly(rng, tw)
                y = random_poly(rng, tw)
                if x.is_zero() or y.is_zero():
                    continue
                phi = (Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3)))
                assert mu_phi(tl_mul(x, y), phi) == tl_mul(mu_phi(x, phi), mu_phi(y, phi))

    def test_zero_input(self):
        with pytest.raises(ZeroInput):
            mu_phi(TwistedPoly.zero(commutative_2d()), (1, 0))


class TestNewtonPolytope:
    def test_triangle(self):
        tw = commutative_2d()
        u, v = u_and_v(tw)
        p = newton_polytope(TwistedPoly.one(tw) + u + v)
        assert p.vertices == ((0, 0), (0, 1), (1, 0))

    def test_one_variable_segment(self):
        tw = TwistData.untwisted(1)
        t = TwistedPoly.generator(tw, 0)
        x = TwistedPoly.monomial(tw, (-1,)) - TwistedPoly.one(tw).scale(2)
        p = newton_polytope(x)
        assert p.vertices == ((-1,), (0,))

    def test_two_point_segment(self):
        tw = commutative_2d()
        u, v = u_and_v(tw)
        p = newton_polytope(tl_mul(u, v) - TwistedPoly.one(tw))
        assert p.vertices == ((0, 0), (1, 1))

    def test_face_of_product_is_product_of_minimal_parts(self):
        rng = random.Random(9)
        tw = TwistData.quantum_torus()
        from sigma_polytope.polytope import face_min

        for _ in range(15):
            x = random_poly(rng, tw)
            if x.is_zero():
                continue
            phi = (Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2)))
            lhs = face_min(newton_polytope(x), phi).as_polytope()
            rhs = newton_polytope(mu_phi(x, phi))
            assert lhs == rhs

    def test_polytope_of_product_is_minkowski_sum(self):
        rng = random.Random(10)
        for tw in (commutative_2d(), TwistData.quantum_torus()):
            for _ in range(20):
                x = random_poly(rng, tw)
                y = random_poly(rng, tw)
                if x.is_zero() or y.is_zero():
                    continue
                assert newton_polytope(tl_mul(x, y)) == minkowski_sum(
                    newton_polytope(x), newton_polytope(y)
                )


class TestUnits:
    def test_field_unit_monomial(self):
        tw = commutative_2d()
        x = TwistedPoly.monomial(tw, (1, -1), 3)
        assert is_unit(x)

    def test_two_terms_never_unit(self):
        tw = commutative_2d()
        u, _ = u_and_v(tw)
        assert not is_unit(TwistedPoly.one(tw) + u)

    def test_integrality_flag(self):
        tw = TwistData.untwisted(1)
        x = TwistedPoly.monomial(tw, (1,), 2)
        assert is_unit(x, respect_integrality=False)
        assert not is_unit(x, respect_integrality=True)
        assert is_unit(TwistedPoly.monomial(tw, (1,), -1), respect_integrality=True)

    def test_random_two_term_elements(self):
        rng = random.Random(11)
        tw = TwistData.quantum_torus()
        for _ in range(50):
            h1 = tuple(rng.randint(-3, 3) for _ in range(2))
            h2 = tuple(rng.randint(-3, 3) for _ in range(2))
            if h1 == h2:
                continue
            x = TwistedPoly(tw, {h1: tw.field.from_int(rng.randint(1, 3)),
                                 h2: tw.field.from_int(rng.randint(1, 3))})
            assert not is_unit(x)
            assert not is_unit(x, respect_integrality=True)


class TestValidateTwist:
    def test_trivial_twist_passes(self):
        assert validate_twist(TwistData.untwisted(3)).passed

    def test_quantum_torus_passes(self):
        assert validate_twist(TwistData.quantum_torus()).passed

    def test_swap_action_with_trivial_cocycle_passes(self):
        tw = TwistData(
            2,
            field=FunctionField(1, prefix="x"),
            sigmas=[MonomialAutomorphism.identity(1), MonomialAutomorphism(((-1,),))],
        )
        assert validate_twist(tw).passed

    def test_inverting_sigma_with_nonzero_cocycle_fails(self):
        # the cocycle identity forces mu-values fixed by every sigma
        tw = TwistData(
            2,
            field=FunctionField(1, prefix="x"),
            sigmas=[MonomialAutomorphism.identity(1), MonomialAutomorphism(((-1,),))],
            cocycles=[((0, 0), (1, 0))],
        )
        report = validate_twist(tw)
        assert not report.passed
        bad = report.failures()[0]
        assert bad.axiom == "cocycle identity"
        assert len(bad.instance) == 3

    def test_non_bilinear_mu_table_fails_with_witness(self):
        tw = TwistData.quantum_torus()
        field = tw.field

        def corrupt_mu(h, hp):
            # parity truncation destroys bilinearity
            return field.monomial(((h[1] % 2) * hp[0],))

        report = validate_twist(tw, mu_override=corrupt_mu)
        assert not report.passed
        assert any(c.axiom == "cocycle identity" and not c.passed for c in report.checks)


class TestSerialization:
    def test_round_trip(self):
        tw = TwistData.quantum_torus()
        u, v = u_and_v(tw)
        x = tl_mul(v, u) + TwistedPoly.one(tw).scale(Fraction(2, 3))
        data = x.to_json()
        back = TwistedPoly.from_json(data)
        assert back == x

    def test_round_trip_prime_field(self):
        from sigma_polytope.fields import PrimeField

        tw = TwistData(1, field=PrimeField(7))
        x = TwistedPoly(tw, {(0,): tw.field.from_int(3), (2,): tw.field.from_int(6)})
        assert TwistedPoly.from_json(x.to_json()) == x
