import random
from fractions import Fraction as Fr

import mpmath
import pytest
from hypothesis import given, strategies as st

import oracles
from tridyn import DomainError
from tridyn.dynamics import (
    DigitSequence,
    RegionTag,
    classify,
    cylinder,
    first_passage,
    from_strip,
    iterate,
    jump_check,
    local_inverse,
    slow_jacobian_det,
    slow_map,
    strip_map,
    to_strip,
    triangle_map,
    triangle_sequence,
)
from tridyn.exact_core import Point2, from_fractions
from tridyn.projective import M0, M1, apply, matrix_of_word

G0, G1, LAM, CELL, SETA = RegionTag.GAMMA0, RegionTag.GAMMA1, RegionTag.LAMBDA, RegionTag.TRIANGLE_CELL, RegionTag.SET_A


def P(x, y):
    return Point2(Fr(x), Fr(y))


# random exact points of the open triangle
def rational_points(max_den=10**4):
    return st.integers(2, max_den).flatmap(
        lambda q: st.tuples(st.integers(1, q), st.integers(1, q), st.just(q))
    ).map(lambda t: P(Fr(max(t[0], t[1]), t[2]), Fr(min(t[0], t[1]), t[2])))


closed_points = st.integers(1, 500).flatmap(
    lambda q: st.tuples(st.integers(0, q), st.integers(0, q), st.just(q))
).map(lambda t: P(Fr(max(t[0], t[1]), t[2]), Fr(min(t[0], t[1]), t[2])))


class TestClassify:
    def test_gamma0_cell0(self):
        r = classify(P("3/4", "1/2"))
        assert r.tags == {G0, CELL} and r.cell == 0

    def test_gamma1_cell2(self):
        r = classify(P("1/2", "1/4"))
        assert r.tags == {G1, CELL} and r.cell == 2

    def test_lambda(self):
        assert classify(P("1/3", 0)).tags == {G1, LAM}

    def test_line_y_equals_one_minus_x_is_gamma1(self):
        # (3/5, 2/5) lies on y = 1 - x, which belongs to Gamma1 and cell 1
        r = classify(P("3/5", "2/5"))
        assert r.tags == {G1, CELL} and r.cell == 1

    def test_set_a(self):
        # centroid of the triangle (1/2,1/2), (2/3,1/3), (1,1)
        r = classify(P("13/18", "11/18"))
        assert SETA in r and G0 in r

    def test_outside(self):
        assert classify(P("1/2", "3/4")).tags == {RegionTag.OUTSIDE}

    def test_diagonal_above_half_is_gamma0(self):
        assert G0 in classify(P("2/3", "2/3"))
        assert G1 in classify(P("1/2", "1/2"))

    @given(closed_points)
    def test_tag_consistency(self, p):
        r = classify(p)
        assert (G0 in r) != (G1 in r)
        if r.cell is not None:
            assert (r.cell == 0) == (G0 in r)
        if LAM in r:
            assert G1 in r


class TestMaps:
    @pytest.mark.parametrize(
        "p, image",
        [(("2/3", "1/2"), ("3/4", "1/2")), (("3/5", "2/5"), ("2/3", 0)), ((1, 1), (1, 0))],
    )
    def test_triangle_map(self, p, image):
        assert triangle_map(P(*p)) == P(*image)
        assert tuple(triangle_map(P(*p))) == oracles.triangle_map(*p)[0]

    def test_triangle_map_undefined_on_lambda(self):
        with pytest.raises(DomainError):
            triangle_map(P("1/2", 0))

    @pytest.mark.parametrize("p, image", [(("3/4", "1/2"), ("2/3", "1/3")), (("1/2", "1/4"), ("2/3", "1/3"))])
    def test_slow_map(self, p, image):
        assert slow_map(P(*p)) == P(*image)
        assert tuple(slow_map(P(*p))) == oracles.slow_map(*p)

    def test_lambda_fixed_and_modified(self):
        assert slow_map(P("2/7", 0)) == P("2/7", 0)
        assert slow_map(P("1/3", 0), modified=True) == P("1/3", "1/3")

    def test_origin_is_fixed(self):
        assert slow_map(P(0, 0)) == P(0, 0)

    def test_int_inputs_are_exact(self):
        assert triangle_map((1, 1)) == P(1, 0)


class TestInverses:
    @pytest.mark.parametrize(
        "branch, p, image",
        [(0, ("1/2", "1/2"), ("2/3", "1/3")), (1, ("1/2", "1/2"), ("1/3", "1/3")), (2, ("2/5", "2/5"), ("2/5", 0))],
    )
    def test_examples(self, branch, p, image):
        assert local_inverse(branch, P(*p)) == P(*image)

    def test_branch2_needs_diagonal(self):
        with pytest.raises(DomainError):
            local_inverse(2, P("1/2", "1/3"))

    @given(closed_points)
    def test_phi1_right_inverse_everywhere(self, p):
        assert slow_map(local_inverse(1, p)) == p

    @given(closed_points)
    def test_phi0_right_inverse_off_diagonal(self, p):
        # on the diagonal phi0 lands on y = 1 - x, which the slow map treats as Gamma1
        if p.x != p.y:
            assert slow_map(local_inverse(0, p)) == p

    def test_phi0_on_diagonal_lands_on_boundary_line(self):
        q = local_inverse(0, P("1/3", "1/3"))
        assert q.x + q.y == 1 and slow_map(q) == P(1, "1/3")

    @given(closed_points)
    def test_phi2_with_modified_rule(self, p):
        d = P(p.x, p.x)
        assert slow_map(local_inverse(2, d), modified=True) == d


class TestFirstPassageAndJump:
    @pytest.mark.parametrize("p, tau", [(("3/4", "1/2"), 1), (("1/2", "1/4"), 3), (("3/5", "2/5"), 2)])
    def test_examples(self, p, tau):
        assert first_passage(P(*p)) == tau

    def test_lambda_never_returns(self):
        with pytest.raises(DomainError):
            first_passage(P("1/2", 0))

    @pytest.mark.parametrize("p", [("2/3", "1/2"), ("1/2", "1/4"), ("3/4", "1/2"), ("9/10", "8/10")])
    def test_jump_examples(self, p):
        assert jump_check(P(*p))

    @given(rational_points())
    def test_tau_is_one_plus_first_digit(self, p):
        assert first_passage(p) == 1 + triangle_sequence(p, 1).digits[0]

    @given(rational_points())
    def test_jump_identity_exact(self, p):
        assert jump_check(p)

    def test_jump_identity_float(self):
        rng = random.Random(5)
        for _ in range(2000):
            x, y = sorted((rng.random(), rng.random()), reverse=True)
            if y > 1e-3:  # keep tau moderate for this quick variant
                assert jump_check(Point2(x, y), atol=1e-12)


class TestDigits:
    def test_examples(self):
        assert triangle_sequence(P("2/3", "1/2")) == DigitSequence((0, 0, 1), True)
        assert triangle_sequence(P("1/2", "1/2")) == DigitSequence((1,), True)

    def test_fixed_point_digits_are_zero(self):
        mpmath.mp.dps = 120
        x = mpmath.findroot(lambda t: t**3 + t - 1, 0.68)
        fx = Fr(mpmath.nstr(x, 110))
        seq = triangle_sequence(P(fx, fx * fx), max_digits=40)
        assert seq.digits == (0,) * 40 and not seq.terminated

    def test_max_digits_zero(self):
        assert triangle_sequence(P("1/2", "1/3"), 0) == DigitSequence((), False)

    @given(rational_points(500))
    def test_matches_oracle(self, p):
        assert list(triangle_sequence(p, 200).digits) == oracles.digits(p.x, p.y, 200)

    @given(rational_points())
    def test_shift_property(self, p):
        full = triangle_sequence(p, 10**6)
        assert triangle_sequence(triangle_map(p), 10**6).digits == full.digits[1:]

    @given(rational_points())
    def test_rational_termination_and_denominators(self, p):
        assert triangle_sequence(p, 10**6).terminated
        cur, den = p, from_fractions(*p).den
        while cur.y > 0:
            nxt = slow_map(cur)
            q = from_fractions(*nxt).den
            assert q <= den
            if cur.y <= 1 - cur.x:
                assert q < den
            cur, den = nxt, q


class TestStrip:
    def test_examples(self):
        assert strip_map((Fr(2, 3), Fr(1, 2))) == (Fr(1, 2), Fr(1))
        assert strip_map((Fr(1, 2), Fr(5, 2))) == (Fr(1, 2), Fr(3, 2))
        assert strip_map((Fr(1), Fr(1, 2))) == (Fr(1, 2), Fr(0))
        assert to_strip(P("3/4", "1/2")) == (Fr(2, 3), Fr(1, 2))
        assert from_strip(to_strip(P("2/3", "1/3"))) == P("2/3", "1/3")

    def test_conjugacy_example(self):
        p = P("3/4", "1/2")
        assert to_strip(slow_map(p)) == strip_map(to_strip(p)) == (Fr(1, 2), Fr(1))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            to_strip(P("1/2", 0))
        with pytest.raises(DomainError):
            strip_map((Fr(0), Fr(1)))

    @given(rational_points())
    def test_round_trip(self, p):
        assert from_strip(to_strip(p)) == p

    def test_conjugacy_float(self):
        rng = random.Random(9)
        checked = 0
        while checked < 10_000:
            x, y = sorted((rng.random(), rng.random()), reverse=True)
            p = Point2(x, y)
            if y < 1e-6 or x > 1 - 1e-9:
                continue
            a = to_strip(slow_map(p))
            b = strip_map(to_strip(p))
            scale = max(1.0, abs(b[1]))
            assert abs(a[0] - b[0]) <= 1e-10 and abs(a[1] - b[1]) <= 1e-10 * scale
            checked += 1


class TestJacobian:
    @pytest.mark.parametrize("x", ["1/3", "1/2", "9/10", 1])
    def test_unit_on_lambda(self, x):
        assert slow_jacobian_det(P(x, 0)) == 1

    def test_finite_differences(self):
        rng = random.Random(3)
        h = 1e-6
        for _ in range(1000):
            x, y = sorted((rng.random(), rng.random()), reverse=True)
            if y < 1e-3 or x > 1 - 1e-3 or abs(y - (1 - x)) < 1e-3 or x - y < 1e-3:
                continue
            p = Point2(x, y)

            def S(a, b):
                return slow_map(Point2(a, b))

            dx = [(u - v) / (2 * h) for u, v in zip(S(x + h, y), S(x - h, y))]
            dy = [(u - v) / (2 * h) for u, v in zip(S(x, y + h), S(x, y - h))]
            det = dx[0] * dy[1] - dx[1] * dy[0]
            expected = 1 / x**3 if y > 1 - x else 1 / (1 - y) ** 3
            assert det == pytest.approx(expected, rel=1e-5)
            assert slow_jacobian_det(p) == pytest.approx(expected, rel=1e-12)


class TestCylinder:
    def test_examples(self):
        assert cylinder(()) == matrix_of_word("")
        assert cylinder((0,)) == M0
        assert cylinder((1,)) == M1 @ M0

    @given(rational_points(200))
    def test_point_lies_in_its_cylinder(self, p):
        seq = triangle_sequence(p, 6)
        m = cylinder(seq)
        q = iterate(triangle_map, p, len(seq))
        assert apply(m, q) == p
