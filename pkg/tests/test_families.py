"""Tests for degeneration families: cone and mirror constructions, fibers,
asymptotic conditions along the axis, node tracking, and the slope
specialization verdict."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from curvelab.exact import ExtensionBudgetError, MPoly, UniPoly
from curvelab.families import (
    VERTICAL,
    CurveFamily,
    Line,
    MirrorConfig,
    NodeRecord,
    RatFunc,
    SpaceCurve,
    asymptotic_check,
    cone_family,
    decimal_str,
    degenerate_fiber_check,
    fiber_at,
    fiber_proj,
    good_specialization_check,
    line_factors,
    mirror_family,
    node_track,
    tangent_gradient,
)

F = Fraction
UV = ("u", "v")
XY = ("x", "y")
XYZ = ("x", "y", "z")
V4S = ("X", "Y", "W", "s")
V4T = ("X", "Y", "W", "t")

U = MPoly.var("u", UV)
V = MPoly.var("v", UV)
AX = MPoly.var("x", XY)
AY = MPoly.var("y", XY)
SX, SY, SZ = (MPoly.var(n, XYZ) for n in XYZ)


def up(coeffs, var="s"):
    return UniPoly([F(c) for c in coeffs], var)


def pm(name, vars=V4T):
    return MPoly.var(name, vars)


# conic v^2 = u + 1 in the plane z = x, projected from centers between
# P = (1,0,2) and the pivot Q = (2,0,0)
CONIC_CFG = MirrorConfig(origin=(0, 0, 0), e1=(1, 0, 1), e2=(0, 1, 0),
                         g=V ** 2 - U - 1, p=(1, 0, 2), q=(2, 0, 0))

# quartic with a node at (2,0) whose tangents u = 2(1 -+ v) pass through the
# axis points (0, +-1); same plane and centers as the conic
QUARTIC_G = ((U - 2) ** 2 - 4 * V ** 2) * (V ** 2 - 4) + U * (U - 2) ** 3
QUARTIC_CFG = MirrorConfig(origin=(0, 0, 0), e1=(1, 0, 1), e2=(0, 1, 0),
                           g=QUARTIC_G, p=(1, 0, 2), q=(2, 0, 0))

# nodal cubic whose node tangents miss the axis points (0,1), (0,2), (0,4)
CUBIC_G = (V - 1) * (V - 2) * (V - 4) - U * ((U + V) ** 2 + V - 2)
CUBIC_CFG = MirrorConfig(origin=(0, 0, 0), e1=(1, 0, 1), e2=(0, 1, 0),
                         g=CUBIC_G, p=(1, 0, 2), q=(2, 0, 0))

# twisted space curve y = x^2, z = (x-2)(x-3)(x-4) projected from (0, 0, t)
CONE_CURVE = SpaceCurve(SY - SX ** 2, SZ - (SX - 2) * (SX - 3) * (SX - 4))

HALVING = [F(1, 2 ** k) for k in range(1, 11)]
TOL = F(1, 1000)


def conic_family():
    return mirror_family(CONIC_CFG)


@pytest.fixture(scope="module")
def conic():
    return conic_family()


@pytest.fixture(scope="module")
def cone():
    return cone_family(CONE_CURVE, (0, 0, 0), (0, 0, 1))


@pytest.fixture(scope="module")
def quartic_report():
    fam = mirror_family(QUARTIC_CFG)
    return fam, good_specialization_check(fam, HALVING, TOL)


@pytest.fixture(scope="module")
def cubic_report():
    fam = mirror_family(CUBIC_CFG)
    return fam, good_specialization_check(fam, HALVING, TOL)


def zariski_family():
    # t*(y-3x)(y-5x)*W + (y-x)(y+x)(y-2x): node pinned at the origin with
    # tangent slopes {3, 5} for every t, but the t=0 lines have slopes
    # {-1, 1, 2}
    def lin(cy, cx):
        return MPoly({(0, 1): F(cy), (1, 0): F(cx)}, ("X", "Y")).extend_vars(V4T)

    h = (pm("t") * lin(1, -3) * lin(1, -5) * pm("W")
         + lin(1, -1) * lin(1, 1) * lin(1, -2))
    return CurveFamily(h, "t", F(0))


def constant_nodal_family():
    # y^2 = x^2 (x + 1), independent of the parameter
    h = pm("Y") ** 2 * pm("W") - pm("X") ** 3 - pm("X") ** 2 * pm("W")
    return CurveFamily(h, "t", F(0))


class TestRatFunc:
    def test_reduces_common_factor(self):
        r = RatFunc.make(up([-1, 0, 1]), up([-1, 1]))
        assert r.same_as(RatFunc.make(up([1, 1]), up([1])))
        assert repr(r) == "s + 1"

    def test_canonical_scaling(self):
        r = RatFunc.make(up([F(1, 2), F(1, 2)]), up([-1, F(3, 2)]))
        assert repr(r) == "(s + 1)/(3*s - 2)"

    def test_positive_leading_denominator(self):
        r = RatFunc.make(up([1, 1]), up([2, -1]))
        assert repr(r) == "(-s - 1)/(s - 2)"

    def test_eval_and_pole(self):
        r = RatFunc.make(up([1, 1]), up([-2, 3]))
        assert r.eval(F(1)) == F(2)
        assert r.eval(F(0)) == F(-1, 2)
        with pytest.raises(ZeroDivisionError):
            r.eval(F(2, 3))

    def test_zero_numerator(self):
        assert repr(RatFunc.make(up([0]), up([-2, 3]))) == "0"

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError):
            RatFunc.make(up([1]), up([0]))

    def test_same_as_cross_multiplication(self):
        a = RatFunc.make(up([1, 1]), up([-2, 3]))
        b = RatFunc.make(up([2, 2]), up([-4, 6]))
        c = RatFunc.make(up([1, 1]), up([-2, 4]))
        assert a.same_as(b)
        assert not a.same_as(c)


class TestLine:
    def test_canonical_slant(self):
        ln = Line.make(2, 4, 6)
        assert (ln.a, ln.b, ln.c) == (F(1, 2), 1, F(3, 2))
        assert ln.slope() == F(-1, 2)

    def test_canonical_vertical(self):
        ln = Line.make(3, 0, -6)
        assert (ln.a, ln.b, ln.c) == (1, 0, -2)
        assert ln.slope() == VERTICAL
        assert ln.contains((2, 17))
        assert not ln.contains((0, 0))

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError, match="degenerate line"):
            Line.make(0, 0, 5)

    def test_line_factors_three_slants(self):
        f = (AY - 2 * AX) * (AY - 3 * AX) * (AY - 4 * AX)
        lines, residual = line_factors(f)
        assert {ln.slope() for ln in lines} == {2, 3, 4}
        assert residual.total_degree() == 0

    def test_line_factors_vertical_and_residual(self):
        f = (AX - 1) * (AY - AX) * (AX ** 2 + AY ** 2 + 1)
        lines, residual = line_factors(f)
        assert {(ln.a, ln.b, ln.c) for ln in lines} == {(1, 0, -1), (-1, 1, 0)}
        assert residual.proportional(AX ** 2 + AY ** 2 + 1)

    def test_line_factors_repeated(self):
        lines, residual = line_factors((AY - AX) ** 2)
        assert len(lines) == 2 and len(set(lines)) == 1
        assert residual.total_degree() == 0

    def test_line_factors_wrong_vars(self):
        with pytest.raises(ValueError, match="expected variables"):
            line_factors(U * V)

    def test_line_factors_zero(self):
        with pytest.raises(ValueError, match="zero polynomial"):
            line_factors(MPoly.zero(XY))


class TestSpaceCurve:
    def test_section_degrees(self):
        assert CONE_CURVE.section_degree() == 3
        assert SpaceCurve(SZ - 1, SX ** 2 + SY ** 2 - 1).section_degree() == 2
        assert SpaceCurve(SY - SX, SZ - SX).section_degree() == 1

    def test_wrong_vars(self):
        with pytest.raises(ValueError, match=r"\(x, y, z\)"):
            SpaceCurve(U - V, U + V)

    def test_constant_equation(self):
        with pytest.raises(ValueError, match="constant"):
            SpaceCurve(SX - SX + 1, SZ - SX)


class TestMirrorConfig:
    def test_axis_points(self):
        # oracle: g(0, v) = v^2 - 1 has simple roots +-1
        assert CONIC_CFG.axis_points() == {F(1): 1, F(-1): 1}
        # oracle: G4(0, v) = -4(v-2)(v-1)(v+1)(v+2)
        assert QUARTIC_CFG.axis_points() == {F(1): 1, F(-1): 1, F(2): 1, F(-2): 1}

    def test_origin_off_target(self):
        with pytest.raises(ValueError, match="origin and e2"):
            MirrorConfig((0, 0, 1), (1, 0, 1), (0, 1, 0),
                         V ** 2 - U - 1, (1, 0, 2), (2, 0, 0))

    def test_e1_inside_target(self):
        with pytest.raises(ValueError, match="e1 must leave"):
            MirrorConfig((0, 0, 0), (1, 0, 0), (0, 1, 0),
                         V ** 2 - U - 1, (1, 0, 2), (2, 0, 0))

    def test_pivot_off_target(self):
        with pytest.raises(ValueError, match="pivot q"):
            MirrorConfig((0, 0, 0), (1, 0, 1), (0, 1, 0),
                         V ** 2 - U - 1, (1, 0, 2), (2, 0, 1))

    def test_center_on_target(self):
        with pytest.raises(ValueError, match="off the target plane"):
            MirrorConfig((0, 0, 0), (1, 0, 1), (0, 1, 0),
                         V ** 2 - U - 1, (1, 0, 0), (2, 0, 0))

    def test_center_on_source_plane(self):
        # (1, 0, 1) = origin + 1*e1 sits inside the source plane
        with pytest.raises(ValueError, match="off the source plane"):
            MirrorConfig((0, 0, 0), (1, 0, 1), (0, 1, 0),
                         V ** 2 - U - 1, (1, 0, 1), (2, 0, 0))

    def test_wrong_chart_vars(self):
        with pytest.raises(ValueError, match=r"chart \(u, v\)"):
            MirrorConfig((0, 0, 0), (1, 0, 1), (0, 1, 0),
                         AY ** 2 - AX - 1, (1, 0, 2), (2, 0, 0))

    def test_axis_degree_drop(self):
        with pytest.raises(ValueError, match="degree 0, expected 2"):
            MirrorConfig((0, 0, 0), (1, 0, 1), (0, 1, 0),
                         U * V + 1, (1, 0, 2), (2, 0, 0))

    def test_axis_repeated_point(self):
        with pytest.raises(ValueError, match="repeated point"):
            MirrorConfig((0, 0, 0), (1, 0, 1), (0, 1, 0),
                         V ** 2 - U, (1, 0, 2), (2, 0, 0))


class TestConeFamily:
    def test_flagship_equation(self, cone):
        # oracle: sympy resultant of the substituted equations factors as
        # -X^3 t^6 (t+24) (X^3 t + 24X^3 - 26X^2 Y + 9XY^2 - XYt - Y^3)
        assert cone.stripped == ("X^3", "t^6", "t + 24")
        assert cone.t_star == 0
        assert cone.degree == 3 == CONE_CURVE.section_degree()
        X, Y, W, T = (pm(n) for n in V4T)
        want = T * X * (X ** 2 - Y * W) - (Y - 2 * X) * (Y - 3 * X) * (Y - 4 * X)
        assert cone.h.proportional(want)

    def test_flagship_notes(self, cone):
        assert any(n.endswith("irreducible (cubic with a single node)")
                   for n in cone.notes)

    def test_degenerate_fiber_lines(self, cone):
        # oracle: fiber t=0 is -(Y-2X)(Y-3X)(Y-4X); slopes read off directly
        f0 = fiber_at(cone, 0)
        want = (AY - 2 * AX) * (AY - 3 * AX) * (AY - 4 * AX)
        assert f0.proportional(want)
        res = degenerate_fiber_check(cone, (0, 0), (2, 3, 4))
        assert res.passed
        assert res.witness == "3 distinct lines through (0, 0) with slopes {2, 3, 4}"

    def test_degenerate_fiber_wrong_point(self, cone):
        res = degenerate_fiber_check(cone, (1, 0), (2, 3, 4))
        assert not res.passed
        assert "misses (1, 0)" in res.witness

    def test_degenerate_fiber_wrong_slopes(self, cone):
        res = degenerate_fiber_check(cone, (0, 0), (2, 3, 5))
        assert not res.passed
        assert res.witness.startswith("slopes")

    def test_single_node_with_vertical_tangent(self, cone):
        # oracle: fiber t=1 is 25X^3 - 26X^2Y + 9XY^2 - XY - Y^3, singular
        # only at the origin with second-order part -XY
        assert node_track(cone, [1]) == [
            NodeRecord(F(1), (F(0), F(0)), (F(0), VERTICAL))]

    def test_triple_point_rejected(self, cone):
        with pytest.raises(ValueError, match="second-order form vanishes"):
            node_track(cone, [0])

    def test_axis_roots_collide(self, cone):
        # oracle: F_t(0, Y) = -Y^3, a triple root at the origin
        res = asymptotic_check(cone, mode="strict")
        assert not res.passed
        assert res.witness == "(i) fails: axis intersection points collide"

    def test_good_specialization_fails_on_vertical(self, cone):
        # the tracked slopes stay {0, vertical}; no incident pair of the
        # t=0 lines contains a vertical slope
        rep = good_specialization_check(cone, [F(1, 2 ** k) for k in range(1, 7)],
                                        TOL)
        assert not rep.passed
        assert rep.gaps == (None,) * 6
        assert rep.witness == ("vertical/finite slope mismatch: "
                               "infinite gap in the sequence")

    def test_conic_in_plane(self):
        # oracle: image of {z=1, x^2+y^2=1} from (0,0,t) is
        # (t-1)^2 (X^2+Y^2) - t^2 W^2
        fam = cone_family(SpaceCurve(SZ - 1, SX ** 2 + SY ** 2 - 1),
                          (0, 0, 0), (0, 0, 1))
        assert fam.stripped == ()
        assert fam.degree == 2
        assert fiber_at(fam, 2).proportional(AX ** 2 + AY ** 2 - 4)
        res = degenerate_fiber_check(fam, (0, 0), (1, -1))
        assert not res.passed
        assert res.witness.startswith("non-linear residual factor")

    def test_line_curve(self):
        # oracle: projecting the line x=y=z from (0,0,t) gives X = Y
        fam = cone_family(SpaceCurve(SY - SX, SZ - SX), (0, 0, 0), (0, 0, 1))
        assert fam.stripped == ("t^2",)
        assert fam.degree == 1
        X, Y = pm("X"), pm("Y")
        assert fam.h.proportional(X - Y)

    def test_degree_drop_warning(self):
        # projecting the parabola {y=0, z=x^2} from (0,0,t) collapses to the
        # doubled line Y = 0; the stripped log keeps the factors
        fam = cone_family(SpaceCurve(SY, SZ - SX ** 2), (0, 0, 0), (0, 0, 1))
        assert fam.stripped == ("Y^2", "t^3")
        assert any(n.startswith("degree drop") for n in fam.notes)

    def test_scaled_target_accepted(self):
        fam = cone_family(CONE_CURVE, (0, 0, 0), (0, 0, 1), target=(0, 0, 2, 0))
        assert fam.degree == 3

    def test_tilted_target_rejected(self):
        with pytest.raises(ValueError, match="only the target plane"):
            cone_family(CONE_CURVE, (0, 0, 0), (0, 0, 1), target=(1, 0, 1, 0))

    def test_centers_inside_target(self):
        with pytest.raises(ValueError, match="center line lies in the target"):
            cone_family(CONE_CURVE, (0, 0, 0), (1, 0, 0))

    def test_centers_never_meet_target(self):
        fam = cone_family(CONE_CURVE, (0, 0, 1), (0, 1, 0))
        assert fam.t_star is None
        assert any("never meets the target plane" in n for n in fam.notes)
        with pytest.raises(ValueError, match="no degenerate parameter"):
            degenerate_fiber_check(fam, (0, 0), (2, 3, 4))

    def test_shared_factor_collapse(self):
        with pytest.raises(ValueError, match="share a factor"):
            cone_family(SpaceCurve(SY - SX ** 2, SY ** 2 - SX),
                        (0, 0, 0), (0, 0, 1))


class TestMirrorFamily:
    def test_flagship_equation(self, conic):
        # oracle: sympy elimination of the projection through
        # adj(M) (X,Y,W) gives Y^2 (3s-2)^2 - (X(2s+1)+(3s-2)W)(X+(3s-2)W)
        # after stripping the content s^2
        assert conic.stripped == ("s^2",)
        assert conic.t_star == 0
        assert conic.degree == 2
        X, Y, W, S = (pm(n, V4S) for n in V4S)
        d = 3 * S - 2
        want = Y ** 2 * d ** 2 - (X * (2 * S + 1) + d * W) * (X + d * W)
        assert conic.h.proportional(want)

    def test_generic_fiber_note(self, conic):
        assert conic.notes[-1] == ("generic fiber sampled at s=1: "
                                   "irreducible (nonsingular conic determinant)")

    def test_fixed_axis_points(self, conic):
        # every fiber meets x = 0 where y^2 = 1
        y_only = MPoly.var("y", ("y",))
        for s0 in (F(0), F(1), F(5), F(-1, 3)):
            sec = fiber_at(conic, s0).subst({"x": F(0)})
            assert sec.proportional(y_only ** 2 - 1)

    def test_degenerate_fiber(self, conic):
        # oracle: s=0 fiber factors as (2Y-X+2)(2Y+X-2) up to scalar
        assert fiber_at(conic, 0).proportional(4 * AY ** 2 - (AX - 2) ** 2)
        res = degenerate_fiber_check(conic, (2, 0), (F(1, 2), F(-1, 2)))
        assert res.passed
        assert res.witness == ("2 distinct lines through (2, 0) "
                               "with slopes {-1/2, 1/2}")

    def test_smooth_member(self, conic):
        # oracle: substituting s=1 gives Y^2 - (3X+1)(X+1), a smooth conic
        f1 = fiber_at(conic, 1)
        assert f1.proportional(AY ** 2 - (3 * AX + 1) * (AX + 1))
        assert node_track(conic, [1]) == []

    def test_tangent_gradients(self, conic):
        # oracle: -F_x/F_y on the explicit family polynomial, reduced
        th_top = tangent_gradient(conic, (0, 1))
        th_bot = tangent_gradient(conic, (0, -1))
        assert th_top.same_as(RatFunc.make(up([1, 1]), up([-2, 3])))
        assert th_bot.same_as(RatFunc.make(up([-1, -1]), up([-2, 3])))
        assert repr(th_top) == "(s + 1)/(3*s - 2)"
        assert th_top.eval(F(1)) == F(2)

    def test_tangent_gradient_off_axis(self, conic):
        with pytest.raises(ValueError, match="axis points"):
            tangent_gradient(conic, (1, 1))

    def test_tangent_gradient_moving_point(self, conic):
        with pytest.raises(ValueError, match="does not lie on every fiber"):
            tangent_gradient(conic, (0, 3))

    def test_tangent_gradient_vertical_branch(self):
        h = pm("X") * pm("W") * pm("t") + (pm("Y") - pm("W")) ** 2
        fam = CurveFamily(h, "t", F(0))
        with pytest.raises(ValueError,
                           match="branch vertical or singular for all t"):
            tangent_gradient(fam, (0, 1))

    def test_strict_check_fails_with_witness(self, conic):
        res = asymptotic_check(conic, mode="strict")
        assert not res.passed
        assert res.witness == ("tangent gradient at (0, -1) varies: "
                               "theta(s) = (-s - 1)/(3*s - 2)")

    def test_weak_check_passes(self, conic):
        res = asymptotic_check(conic, mode="weak")
        assert res.passed
        assert res.witness == ("fixed axis section with nonsingular "
                               "branches at samples")

    def test_infinity_flag_rejects_moving_section(self, conic):
        # the W=0 section Y^2(3s-2)^2 - (2s+1)X^2 is not one fixed form
        res = asymptotic_check(conic, mode="weak", infinity_checks=True)
        assert not res.passed
        assert res.witness == "the section along W = 0 moves with the parameter"

    def test_unknown_mode(self, conic):
        with pytest.raises(ValueError, match="unknown mode"):
            asymptotic_check(conic, mode="loose")

    def test_quartic_family_shape(self, quartic_report):
        fam, _ = quartic_report
        assert fam.degree == 4
        assert fam.stripped == ("s^4",)
        assert fam.t_star == 0

    def test_cubic_family_shape(self, cubic_report):
        fam, _ = cubic_report
        assert fam.degree == 3
        assert fam.stripped == ("s^3",)


class TestAsymptoticVariants:
    def test_strict_passes_on_constant_family(self):
        # x^2 + y^2 = 1 repeated at every parameter value: tangents constant
        h = pm("X") ** 2 + pm("Y") ** 2 - pm("W") ** 2
        fam = CurveFamily(h, "t", None)
        res = asymptotic_check(fam, mode="strict", infinity_checks=True)
        assert res.passed
        assert res.witness == ("fixed axis section with constant tangents "
                               "and on W = 0")

    def test_moving_axis_section_fails(self):
        res = asymptotic_check(zariski_family(), mode="weak")
        assert not res.passed
        assert res.witness == ("(i) fails: the axis section moves with t "
                               "(coefficients 0 and 1)")

    def test_axis_on_every_fiber_fails(self):
        h = pm("X") * (pm("Y") - pm("W")) + pm("t") * pm("X") ** 2
        fam = CurveFamily(h, "t", F(0))
        res = asymptotic_check(fam, mode="weak")
        assert not res.passed
        assert res.witness == "the axis x = 0 lies on every fiber"

    def test_origin_on_axis_fails(self):
        # y(y-1) = x section puts one axis point at the origin
        h = pm("Y") * (pm("Y") - pm("W")) - pm("X") * pm("W") \
            + pm("t") * pm("X") ** 2
        fam = CurveFamily(h, "t", F(0))
        res = asymptotic_check(fam, mode="weak")
        assert not res.passed
        assert res.witness == ("(i) fails: an axis intersection point "
                               "sits at the origin")

    def test_point_at_infinity_on_closure_fails(self):
        # (x^2+y^2-1)(y-3) passes through [1:0:0]
        circ = pm("X") ** 2 + pm("Y") ** 2 - pm("W") ** 2
        fam = CurveFamily(circ * (pm("Y") - 3 * pm("W")), "t", None)
        res = asymptotic_check(fam, mode="weak", infinity_checks=True)
        assert not res.passed
        assert res.witness == "a W = 0 intersection point sits at [1:0:0]"
        assert asymptotic_check(fam, mode="weak").passed


class TestNodeTrack:
    def test_quartic_node(self, quartic_report):
        # oracle: node path ((3s-2)/(s-1), 0) with slopes -+(1-s)/(3s-2);
        # at s=1/4 that is (5/3, 0) with slopes -+3/5
        fam, _ = quartic_report
        assert node_track(fam, [F(1, 4)]) == [
            NodeRecord(F(1, 4), (F(5, 3), F(0)), (F(-3, 5), F(3, 5)))]

    def test_cubic_node(self, cubic_report):
        # oracle: node path ((2-3s)/(s+1), 2s/(s+1)); at s=1/2 the node is
        # (1/3, 2/3) and the slope quadratic has roots 2 and 8
        fam, _ = cubic_report
        assert node_track(fam, [F(1, 2)]) == [
            NodeRecord(F(1, 2), (F(1, 3), F(2, 3)), (F(2), F(8)))]

    def test_sample_order_is_kept(self, quartic_report):
        fam, _ = quartic_report
        recs = node_track(fam, [F(1, 2), F(1, 4)])
        assert [r.t for r in recs] == [F(1, 2), F(1, 4)]

    def test_cusp_rejected(self):
        h = pm("Y") ** 2 * pm("W") - pm("X") ** 3
        fam = CurveFamily(h, "t", F(0))
        with pytest.raises(ValueError, match="repeated line"):
            node_track(fam, [1])

    def test_vanishing_fiber_rejected(self):
        h = pm("t") * (pm("X") ** 2 + pm("Y") ** 2 - pm("W") ** 2)
        fam = CurveFamily(h, "t", F(0))
        with pytest.raises(ValueError, match="vanishes identically"):
            node_track(fam, [0])
        assert fiber_at(fam, 0).is_zero()
        assert fiber_proj(fam, 0).is_zero()

    def test_irrational_node_needs_second_extension(self):
        # y^2 = (x^2-2)^2 has nodes at (+-sqrt2, 0) with slopes -+2 sqrt2
        h = (pm("Y") ** 2 * pm("W") ** 2 - pm("X") ** 4
             + 4 * pm("X") ** 2 * pm("W") ** 2 - 4 * pm("W") ** 4)
        fam = CurveFamily(h, "t", F(0))
        with pytest.raises(ExtensionBudgetError):
            node_track(fam, [1])


class TestGoodSpecialization:
    def test_quartic_passes(self, quartic_report):
        # oracle: gap_k = max(|s/(1-s)|, slope distance) = 1/(2^k - 1) on
        # the halving sequence; the node runs into (2,0) along y = 0
        _, rep = quartic_report
        assert rep.passed
        assert rep.gaps == tuple(F(1, 2 ** k - 1) for k in range(1, 11))
        assert all(a > b for a, b in zip(rep.gaps, rep.gaps[1:]))
        assert rep.gaps[-1] < TOL
        assert rep.limit_point == (F(2), F(0))
        assert set(rep.matched_slopes) == {F(1, 2), F(-1, 2)}
        assert rep.witness.startswith("node path reaches (2, 0)")
        assert "0.00097751711 < 0.001" in rep.witness

    def test_quartic_records_follow_one_path(self, quartic_report):
        _, rep = quartic_report
        assert len(rep.records) == 1
        path = rep.records[0]
        assert [r.t for r in path] == HALVING
        # oracle: position abscissa (3s-2)/(s-1) at s = 1/8 is 13/7
        assert path[2].position == (F(13, 7), F(0))

    def test_cubic_fails(self, cubic_report):
        # oracle: gap_1 = 17/2 and gap_10 = 6149/4090 ~ 1.5034; the slopes
        # approach {0, 1} but the incident line slopes are four-point values
        _, rep = cubic_report
        assert not rep.passed
        assert rep.gaps[0] == F(17, 2)
        assert rep.gaps[-1] == F(6149, 4090)
        assert "stays above 0.001" in rep.witness
        assert "slope pair settles away" in rep.witness

    def test_pinned_node_with_wrong_slopes_fails(self):
        rep = good_specialization_check(zariski_family(), HALVING, TOL)
        assert not rep.passed
        assert rep.gaps == (F(3),) * 10
        assert rep.limit_point == (F(0), F(0))
        assert rep.matched_slopes == (F(1), F(2))
        assert "slope pair settles away" in rep.witness

    def test_constant_family_trivially_good(self):
        rep = good_specialization_check(constant_nodal_family(),
                                        [F(1, 2), F(1, 4)], TOL)
        assert rep.passed
        assert rep.gaps == (F(0), F(0))
        assert rep.witness == ("parameter-independent family: "
                               "node data constant, gaps all 0")
        assert rep.limit_point == (F(0), F(0))
        assert set(rep.matched_slopes) == {F(1), F(-1)}

    def test_empty_samples_rejected(self):
        with pytest.raises(ValueError, match="empty sample sequence"):
            good_specialization_check(constant_nodal_family(), [], TOL)

    def test_degenerate_sample_rejected(self):
        with pytest.raises(ValueError, match="avoid the degenerate"):
            good_specialization_check(constant_nodal_family(), [F(0)], TOL)

    def test_no_degenerate_member_rejected(self):
        h = pm("Y") ** 2 * pm("W") - pm("X") ** 3 - pm("X") ** 2 * pm("W")
        fam = CurveFamily(h, "t", None)
        with pytest.raises(ValueError, match="no degenerate parameter"):
            good_specialization_check(fam, [F(1, 2)], TOL)

    def test_smooth_fiber_rejected(self, conic):
        with pytest.raises(ValueError, match="no node to track"):
            good_specialization_check(conic, [F(1, 2)], TOL)

    def test_decimal_rendering(self):
        assert decimal_str(F(1, 1023), 8) == "0.00097751711"
        assert decimal_str(F(1, 1000), 8) == "0.001"
        assert decimal_str(F(1, 3), 8) == "0.33333333"
        assert decimal_str(F(3), 8) == "3"


class TestFamilyInvariants:
    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.integers(-6, 6), min_size=2, max_size=4, unique=True),
           st.integers(-4, 4), st.integers(-4, 4))
    def test_mirror_fixes_axis_points(self, roots, p1, p2):
        # the source curve prod (v - r_i) + u*(...) meets the axis u=0 in
        # the fixed points (0, r_i); every fiber must keep that section
        g = MPoly.const(F(1), UV)
        for r in roots:
            g = g * (V - r)
        g = g + U * (U + V - 1) ** (len(roots) - 1)
        if g.total_degree() != len(roots):
            return
        p3 = p1 + 1  # anything with p3 != p1 avoids the source plane z = x
        if p3 == 0:
            p3 = p1 + 2
        cfg = MirrorConfig((0, 0, 0), (1, 0, 1), (0, 1, 0), g,
                           (p1, p2, p3), (2, 0, 0))
        fam = mirror_family(cfg)
        axis = g.subst({"u": F(0)}).to_unipoly()
        base = fam.t_star if fam.t_star is not None else F(0)
        for k in (1, 2):
            sec = fiber_at(fam, base + k).subst({"x": F(0)}).to_unipoly()
            if sec.is_zero():
                continue
            assert sec.degree == axis.degree
            lc_s, lc_a = sec.lc(), axis.lc()
            assert [c * lc_s for c in axis.coeffs] == [c * lc_a for c in sec.coeffs]

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.integers(-5, 5), min_size=2, max_size=4, unique=True),
           st.integers(-3, 3), st.integers(-3, 3))
    def test_degenerate_factorization_is_exact(self, slopes, ox, oy):
        # lines y - oy = m(x - ox) through one point, plus t*X^deg noise
        lines = MPoly.const(F(1), V4T)
        for m in slopes:
            lines = lines * (pm("Y") - oy * pm("W") - m * (pm("X") - ox * pm("W")))
        fam = CurveFamily(lines + pm("t") * pm("X") ** len(slopes), "t", F(0))
        res = degenerate_fiber_check(fam, (ox, oy), slopes)
        assert res.passed
        bad = degenerate_fiber_check(fam, (ox, oy), [m + 100 for m in slopes])
        assert not bad.passed

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.integers(-6, 6).filter(bool), min_size=2, max_size=3,
                    unique=True),
           st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
    def test_gradient_constancy_on_constant_families(self, bs, c0, c1, c2):
        # f = prod (y - b_i) + x*r(x, y) is parameter-free, so the strict
        # tangent identity must hold whenever condition (i) does
        f = MPoly.const(F(1), XY)
        for b in bs:
            f = f * (AY - b)
        r = c0 + c1 * AX + c2 * AY
        f = f + AX * r
        m = f.total_degree()
        h = MPoly.zero(V4T)
        for (ex, ey), c in f.terms.items():
            h = h + MPoly({(ex, ey, m - ex - ey, 0): c}, V4T)
        fam = CurveFamily(h, "t", None)
        res = asymptotic_check(fam, mode="strict")
        if res.passed:
            for b in bs:
                theta = tangent_gradient(fam, (0, b))
                assert theta.den.degree == 0 and theta.num.degree <= 0
        else:
            assert "(i) fails" in res.witness or "collide" in res.witness

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.integers(-5, 5), min_size=1, max_size=3, unique=True),
           st.integers(1, 3))
    def test_line_factors_recover_construction(self, slopes, mult):
        f = MPoly.const(F(1), XY)
        for m in slopes:
            f = f * (AY - m * AX - 1)
        f = f * (AX ** 2 + AY ** 2 + 1) ** (mult - 1)
        lines, residual = line_factors(f)
        assert sorted(ln.slope() for ln in lines) == sorted(F(m) for m in slopes)
        assert residual.total_degree() == 2 * (mult - 1)
