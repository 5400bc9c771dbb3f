"""Tests for asymptotes, presentation checks, Moebius transforms, branch
transport, colors, and the constructive movers."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from curvelab.curves import (
    INF_X,
    MobiusMap,
    MoverConstraints,
    ProjPoint,
    Q1,
    apply_mobius,
    asymptotes,
    branch_from_series,
    branches_at,
    build_mover,
    classify_branch,
    critical_fiber_analysis,
    interpolate,
    isolate_branch,
    mobius_inverse,
    predict_center,
    presentation_check,
    shear_to_Q1,
    transport_branch,
    uniformity_check,
)
from curvelab.exact import ExtScalar, MPoly, UniPoly
from curvelab.series import TruncSeries, local_branches

from scenarios import prediction_scenarios, unclassified_scenarios

F = Fraction
XZ = ("x", "z")
X = MPoly.var("x", XZ)
Z = MPoly.var("z", XZ)
UX = UniPoly([0, 1], "x")

CIRCLE = X ** 2 + Z ** 2 - 1
# fibre degree matches total degree; one node at (-2, 2)
NODAL = (Z - 1) * (Z - 2) * (Z - 4) + X * (-X ** 2 - 2 * X * Z - Z ** 2 - Z + 2)
QUARTIC = Z ** 4 - Z ** 2 + X ** 2
ELLIPTIC = Z ** 2 - X * (X - 1) * (X - 2)
# circle plus a horizontal chord: presented, with a mixed-color axis at x=1
MIXED = (Z ** 2 + X ** 2 - 1) * (Z - 2)


def ser(terms, order=16):
    return TruncSeries({F(k): F(v) for k, v in terms.items()}, order)


def lines(asy):
    return {(a.a, a.b, a.value) for a in asy}


class TestProjPoint:
    def test_projective_equality(self):
        assert ProjPoint(2, 4, 2) == ProjPoint(1, 2, 1)
        assert ProjPoint(0, 3, 0) == Q1
        assert ProjPoint(1, 0, 0) == INF_X
        assert ProjPoint(1, 2, 1) != ProjPoint(1, 2, 0)

    def test_canonical_and_affine(self):
        assert ProjPoint(2, 4, 2).canonical() == (F(1), F(2), F(1))
        assert ProjPoint(3, 6, 3).affine() == (F(1), F(2))
        assert not Q1.is_finite()

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            ProjPoint(0, 0, 0)


class TestMobiusMap:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError, match="b\\(0\\)"):
            MobiusMap(1, UniPoly([1], "x"), 0, 1)
        with pytest.raises(ValueError, match="a\\(0\\) d\\(0\\)"):
            MobiusMap(UX, 0, 0, 1)
        # a vanishing determinant implies a(0) d(0) = b(0) c(0) = 0, so the
        # fibre-fixing checks already reject every degenerate matrix
        with pytest.raises(ValueError):
            MobiusMap(UX + 1, UX, UX + 1, UX)

    def test_shear(self):
        g = MobiusMap.shear(3)
        assert g.is_shear
        assert g.a == UX - 3 and g.b.is_zero() and g.c.is_zero()
        assert not MobiusMap(1, 0, 1, 1).is_shear

    def test_compose_with_inverse_is_scalar_identity(self):
        g = MobiusMap(UX + 1, UniPoly([0, 2], "x"), UX ** 2, UX - 5)
        comp = mobius_inverse(g).compose(g)
        # adjugate times matrix is det times the identity
        assert comp.b.is_zero() and comp.c.is_zero()
        assert comp.a == comp.d == g.det()


class TestAsymptotes:
    def test_hyperbola(self):
        C = X * Z - 5
        assert lines(asymptotes(C)) == {(1, 0, 0), (0, 1, 0)}

    def test_parabola_has_none(self):
        assert asymptotes(X ** 2 - Z) == []

    def test_cubic_with_three(self):
        C = X * Z ** 2 - X ** 3 - 2 * X ** 2
        got = asymptotes(C)
        assert lines(got) == {(1, 0, 0), (-1, 1, 1), (1, 1, -1)}
        assert {a.provenance for a in got} == {"simple-factor"}

    def test_cuspidal_vertical_only(self):
        # the repeated direction z has an inconsistent offset equation
        assert lines(asymptotes(X * Z ** 2 - X ** 2)) == {(1, 0, 0)}

    def test_depth_two_chain(self):
        C = X * Z ** 2 + Z - 4 * X
        got = asymptotes(C)
        assert lines(got) == {(1, 0, 0), (0, 1, 2), (0, 1, -2)}
        horiz = [a for a in got if a.a == 0]
        assert {a.provenance for a in horiz} == {"multiplicity-2"}

    def test_trident(self):
        C = X * Z - X ** 3 - X ** 2 - X - 1
        got = asymptotes(C)
        assert lines(got) == {(1, 0, 0)}
        assert got[0].provenance == "multiplicity-2"

    def test_circle_conjugate_pair(self):
        got = asymptotes(CIRCLE)
        assert len(got) == 2 and sum(a.conjugates for a in got) == 2
        for a in got:
            assert isinstance(a.a, ExtScalar) and a.value == 0

    def test_count_matches_degree_when_presented(self):
        for C in (CIRCLE, NODAL, MIXED):
            assert presentation_check(C).passed
            total = sum(a.conjugates for a in asymptotes(C))
            assert total == C.total_degree()

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            asymptotes(MPoly.const(3, XZ))


class TestPresentation:
    def test_circle_passes(self):
        # oracle: Res_z(F, F_z) = 4(x-1)(x+1), folds at x = +-1
        rep = presentation_check(CIRCLE)
        assert rep.passed
        pts = {(p.abscissa, p.fiber_value, p.kind) for p in rep.critical_points}
        assert pts == {(F(1), F(0), "vertical-tangency"),
                       (F(-1), F(0), "vertical-tangency")}

    def test_quartic_fails_c4(self):
        # oracle: gcd(F(1/2, z), F_z(1/2, z)) = z^2 - 1/2, degree 2
        rep = presentation_check(QUARTIC)
        assert not rep.passed
        assert not rep.check("c4").passed
        bad = {p.abscissa for p in rep.critical_points if p.kind == "violation"}
        assert bad == {F(1, 2), F(-1, 2)}

    def test_elliptic_fails_c1(self):
        rep = presentation_check(ELLIPTIC)
        assert not rep.check("c1").passed
        assert "degree 3" in rep.check("c1").witness

    def test_nodal_cubic(self):
        # oracle: Res_z(F, F_z) = (x+2)^2 (31x^4+122x^3+113x^2-18x-9);
        # the only singular point is (-2, 2), an ordinary node
        rep = presentation_check(NODAL)
        assert rep.passed
        node = [p for p in rep.critical_points if p.kind == "node"]
        assert len(node) == 1
        assert node[0].abscissa == F(-2) and node[0].fiber_value == F(2)
        folds = [p for p in rep.critical_points if p.kind == "vertical-tangency"]
        assert sum(p.conjugates for p in folds) == 4

    def test_mixed_fixture_presented(self):
        # oracle: Res_z = 4(x-1)(x+1)(x^2+3)^2; chord meets the conic at
        # the conjugate abscissae of x^2+3, transversally
        rep = presentation_check(MIXED)
        assert rep.passed
        kinds = sorted(p.kind for p in rep.critical_points)
        assert kinds == ["node", "node", "vertical-tangency",
                         "vertical-tangency"]


class TestCriticalFibers:
    def test_circle_collisions(self):
        got = critical_fiber_analysis(CIRCLE)
        assert {(p.abscissa, p.kind) for p in got} == {
            (F(1), "vertical-tangency"), (F(-1), "vertical-tangency")}

    def test_nodal_cubic_one_collision_per_abscissa(self):
        got = critical_fiber_analysis(NODAL)
        seen = [(p.abscissa, p.conjugates) for p in got]
        assert len(seen) == len(set(seen))
        assert all(p.kind in ("vertical-tangency", "node") for p in got)

    def test_gate_on_unpresented(self):
        with pytest.raises(ValueError, match="not presented"):
            critical_fiber_analysis(QUARTIC)


class TestApplyMobius:
    def test_substitute_and_clear(self):
        g = MobiusMap(1, 0, 0, UX - 1)
        assert apply_mobius(Z - X, g) == X * Z - X - Z

    def test_shear_example(self):
        assert apply_mobius(X * Z - 1, MobiusMap.shear(1)) == X * Z - X + 1

    def test_round_trip_cubic(self):
        C = Z ** 2 - X ** 3 - 1
        g = MobiusMap(1, 0, UX, 1)
        back = apply_mobius(apply_mobius(C, g), mobius_inverse(g))
        assert back.proportional(C)

    def test_degenerate_fiber_curve(self):
        # the curve is exactly a pole fibre of g, so the image collapses
        g = MobiusMap(1, 0, UX, 1)
        with pytest.raises(ValueError, match="degenerate transform"):
            apply_mobius(X * Z + 1, g)

    @settings(max_examples=25, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_round_trip_random(self, rnd):
        # every entry has z-degree >= 2, so no pole fibre can swallow it
        curves = [CIRCLE, Z ** 2 - X ** 3 - 1, Z ** 2 - X,
                  Z ** 3 - X ** 2 - 1, NODAL]
        C = curves[rnd.randrange(len(curves))]
        g = random_mobius(rnd)
        back = apply_mobius(apply_mobius(C, g), mobius_inverse(g))
        assert back.proportional(C)

    def test_inverse_examples(self):
        g = MobiusMap(1, 0, 1, 1)
        gi = mobius_inverse(g)
        assert gi.a == UniPoly([1], "x") and gi.c == UniPoly([-1], "x")
        sh = mobius_inverse(MobiusMap.shear(1))
        assert sh.d == UX - 1 and sh.a == UniPoly([1], "x")


def random_mobius(rnd):
    # valid by construction: b(0) = 0 and a(0) d(0) != 0 also force a
    # nonvanishing determinant, so no rejection loop is needed
    def tail():
        return [F(rnd.randrange(-3, 4)) for _ in range(rnd.randrange(0, 3))]

    def unit():
        return F(rnd.choice([-3, -2, -1, 1, 2, 3]))

    a = UniPoly([unit()] + tail(), "x")
    d = UniPoly([unit()] + tail(), "x")
    b = UniPoly([F(0)] + tail(), "x")
    c = UniPoly([F(rnd.randrange(-3, 4))] + tail(), "x")
    return MobiusMap(a, b, c, d)


class TestPredictTransport:
    def test_agreement_table(self):
        table = prediction_scenarios()
        assert len(table) >= 12
        for label, br, g, expect in table:
            assert predict_center(br, g) == expect, label
            assert transport_branch(br, g).center == expect, label

    def test_unclassified_cases(self):
        for label, br, g in unclassified_scenarios():
            with pytest.raises(ValueError, match="unclassified"):
                predict_center(br, g)
            transport_branch(br, g)  # transport still resolves them

    def test_branch_kinds(self):
        hyp = branch_from_series(ser({0: 2, 1: 1}), ser({-1: 1}))
        assert hyp.kind == "hyperbolic-at-Q1" and hyp.tangent == ("x", 2)
        par = branch_from_series(ser({-1: 1}), ser({-2: 1}))
        assert par.kind == "parabolic-at-Q1" and par.tangent == "linf"
        fin = branch_from_series(ser({0: 1, 1: 1}), ser({0: 2, 2: 1}))
        assert fin.kind == "finite" and fin.tangent == ("y", 0, 2)
        oi = branch_from_series(ser({-1: 1}), ser({-1: 2, 0: 3}))
        assert oi.kind == "other-infinite" and oi.tangent == ("y", 2, 3)

    def test_vertical_tangent_read_off(self):
        br = branch_from_series(ser({0: 1, 2: 1}), ser({0: 0, 1: 1}))
        assert br.tangent == ("x", 1)

    def test_transport_insufficient_truncation(self):
        # the branch sits on the pole locus up to the visible order, so
        # the transported denominator is the zero series
        br = branch_from_series(ser({0: 1, 1: 1}, order=2),
                                ser({0: -1}, order=2))
        g = MobiusMap(1, 0, 1, 1)
        with pytest.raises(ValueError, match="increase N"):
            transport_branch(br, g)


class TestClassify:
    def test_circle_axis_zero_silver_green(self):
        (br,) = branches_at(CIRCLE, (F(0), F(1)))
        col = classify_branch(CIRCLE, br)
        assert (col.color, col.refinement) == ("silver", "green")

    def test_circle_fold_blue_violet(self):
        (br,) = branches_at(CIRCLE, (F(1), F(0)))
        col = classify_branch(CIRCLE, br)
        assert (col.color, col.refinement) == ("blue", "violet")

    def test_node_branches_silver(self):
        # both node arms are graphs over x, so they meet the axis simply
        brs = branches_at(NODAL, (F(-2), F(2)))
        assert len(brs) == 2
        for br in brs:
            col = classify_branch(NODAL, br)
            assert (col.color, col.refinement) == ("silver", "none")

    def test_cusp_blue_green(self):
        cusp = Z ** 2 - X ** 3
        (br,) = branches_at(cusp, (F(0), F(0)))
        col = classify_branch(cusp, br)
        assert (col.color, col.refinement) == ("blue", "green")

    def test_vertical_tacnode_arms_violet(self):
        # x^2 = z^4 splits into two smooth arms x = +-z^2, both folding
        tac = X ** 2 - Z ** 4
        brs = branches_at(tac, (F(0), F(0)))
        assert len(brs) == 2
        for br in brs:
            col = classify_branch(tac, br)
            assert (col.color, col.refinement) == ("blue", "violet")

    def test_q1_centered_rejected(self):
        br = branch_from_series(ser({0: 2, 1: 1}), ser({-1: 1}))
        with pytest.raises(ValueError, match="Q1"):
            classify_branch(CIRCLE, br)

    def test_off_curve_rejected(self):
        br = branch_from_series(ser({0: 5, 1: 1}), ser({0: 5}))
        with pytest.raises(ValueError, match="increase N"):
            classify_branch(CIRCLE, br)

    def test_color_invariant_under_fibrewise_maps(self):
        # the base coordinate is untouched, so the axis valuation at a
        # center staying finite on the same axis cannot change
        cases = [((F(0), F(1)), MobiusMap(1, 0, UX, 1)),
                 ((F(1), F(0)), MobiusMap(1, 0, 1, 1)),
                 ((F(1), F(0)), MobiusMap(2, UniPoly([0, 1], "x"), 0, 1))]
        for ctr, g in cases:
            (br,) = branches_at(CIRCLE, ctr)
            before = classify_branch(CIRCLE, br)
            moved = transport_branch(br, g)
            assert moved.center.is_finite()
            img = apply_mobius(CIRCLE, g)
            after = classify_branch(img, moved)
            assert before.color == after.color

    def test_symmetric_function_separates_fold_sheets(self):
        # the two sheets over x near 1 differ first at (x-1)^(1/2):
        # reversing the branch parameter swaps the sheets, and their
        # difference shows up at parameter order 1
        (lb,) = local_branches(CIRCLE, (F(1), F(0)))
        assert lb.ram_exp == 2
        flipped = TruncSeries(
            {e: (c if e % 2 == 0 else -c) for e, c in lb.y.terms.items()},
            lb.y.order)
        diff = lb.y - flipped
        assert diff.ord() == 1
        total = lb.y + flipped
        assert all(e % 2 == 0 for e in total.terms)


class TestShear:
    def test_trident_like_trace(self):
        # oracle: three rounds send xz-1 to xz - (x-1)(x-2)(x-3)
        cur, log = shear_to_Q1(X * Z - 1, F(1), max_iter=10)
        assert len(log) == 3
        want = X * Z - (X - 1) * (X - 2) * (X - 3)
        assert cur.proportional(want)
        assert cur.total_degree() == 3
        top = {e for e in cur.terms if sum(e) == 3}
        assert top == {(3, 0)}

    def test_circle_one_round(self):
        cur, log = shear_to_Q1(CIRCLE, F(2))
        assert len(log) == 1
        top = {e for e in cur.terms if sum(e) == cur.total_degree()}
        assert all(j == 0 for _, j in top)

    def test_already_pure(self):
        C = Z ** 3 - X ** 4
        cur, log = shear_to_Q1(C, F(1))
        assert log == [] and cur == C

    def test_invalid_alpha(self):
        with pytest.raises(ValueError, match="invalid shear"):
            shear_to_Q1(CIRCLE, F(1))  # critical abscissa
        with pytest.raises(ValueError, match="invalid shear"):
            shear_to_Q1(CIRCLE, F(0))

    def test_max_iter(self):
        with pytest.raises(ValueError, match="max_iter exceeded"):
            shear_to_Q1(X * Z - 1, F(1), max_iter=1)


class TestMover:
    def test_single_axis(self):
        g = build_mover(MoverConstraints(singular_axes=((1, (2,)),)))
        assert (g.a, g.b, g.c, g.d) == (
            UniPoly([1], "x"), UniPoly([], "x"), UX - 1, UX - 1)
        # the branch at (1, 2) is thrown to Q1: value 2/(3 eps) blows up
        br = branch_from_series(ser({0: 1, 1: 1}), ser({0: 2, 1: 1}))
        assert transport_branch(br, g).center == Q1

    def test_avoided_value_zero_needs_numerator(self):
        g = build_mover(MoverConstraints(singular_axes=((1, (0, 2)),)))
        assert g.b.eval(F(1)) != 0
        br = branch_from_series(ser({0: 1, 1: 1}), ser({1: 1}))
        assert transport_branch(br, g).center == Q1

    def test_fix_point_identity(self):
        g = build_mover(MoverConstraints(fix_points=((1, 1),)))
        assert g.b.is_zero() and g.c.is_zero()
        assert g.a == g.d == UniPoly([1], "x")

    def test_empty_identity(self):
        g = build_mover(MoverConstraints())
        assert g.a == g.d == UniPoly([1], "x")
        assert g.b.is_zero() and g.c.is_zero()

    def test_axis_with_fix_point(self):
        g = build_mover(MoverConstraints(singular_axes=((1, (2,)),),
                                         fix_points=((3, 5),)))
        assert g.c.eval(F(1)) == 0 and g.d.eval(F(1)) == 0
        num = g.a.eval(F(3)) * 5 + g.b.eval(F(3))
        den = g.c.eval(F(3)) * 5 + g.d.eval(F(3))
        assert num == 5 * den and den != 0

    def test_parabolic_padding(self):
        g = build_mover(MoverConstraints(singular_axes=((1, (2,)),),
                                         fix_parabolic_at_q1=True,
                                         degree_bound=3))
        lo = min(g.a.degree, g.b.degree)
        hi = max(g.c.degree, g.d.degree)
        assert hi + 3 < lo
        par = branch_from_series(ser({-1: 1}), ser({-2: 1}))
        assert predict_center(par, g) == Q1
        assert transport_branch(par, g).center == Q1

    def test_clashes(self):
        with pytest.raises(ValueError, match="x = 0"):
            build_mover(MoverConstraints(singular_axes=((0, (1,)),)))
        with pytest.raises(ValueError, match="singular axis"):
            build_mover(MoverConstraints(singular_axes=((1, (2,)),),
                                         fix_points=((1, 3),)))
        with pytest.raises(ValueError, match="degree_bound"):
            build_mover(MoverConstraints(fix_parabolic_at_q1=True))
        with pytest.raises(ValueError, match="separate modes"):
            build_mover(MoverConstraints(fix_points=((1, 1),),
                                         fix_parabolic_at_q1=True,
                                         degree_bound=2))
        with pytest.raises(ValueError, match="two values"):
            interpolate([(1, 2), (1, 3)])


class TestIsolate:
    def test_two_slopes_one_round(self):
        C = (Z - X) * (Z - 2 * X + 1) + (X - 1) ** 3
        brs = branches_at(C, (F(1), F(1)))
        slope1 = next(b for b in brs if b.tangent[1] == 1)
        cur, log = isolate_branch(C, slope1)
        assert len(log) == 1
        moved = slope1
        for g in log:
            moved = transport_branch(moved, g)
        assert moved.center == ProjPoint(1, 0, 1)
        alpha, beta = moved.center.affine()
        fib = cur.subst({"x": alpha}).to_unipoly()
        assert fib.eval(beta) == 0

    def test_already_isolated(self):
        P = Z - X ** 2
        (br,) = branches_at(P, (F(1), F(1)))
        cur, log = isolate_branch(P, br)
        assert log == [] and cur == P

    def test_second_order_contact_two_rounds(self):
        # sheets z = x + (x-1)^2 and z = x + 2(x-1)^2 agree to first order
        # at (1,1); their elementary symmetric functions give the fixture
        C = (Z ** 2 - Z * (3 * X ** 2 - 4 * X + 3)
             + (2 * X ** 4 - 5 * X ** 3 + 7 * X ** 2 - 5 * X + 2))
        brs = branches_at(C, (F(1), F(1)))
        assert len(brs) == 2
        cur, log = isolate_branch(C, brs[0])
        assert len(log) == 2

    def test_rejects_blue(self):
        (br,) = branches_at(CIRCLE, (F(1), F(0)))
        with pytest.raises(ValueError, match="not silver"):
            isolate_branch(CIRCLE, br)

    def test_rejects_axis_zero(self):
        (br,) = branches_at(CIRCLE, (F(0), F(1)))
        with pytest.raises(ValueError, match="x = 0"):
            isolate_branch(CIRCLE, br)

    def test_max_iter(self):
        C = (Z ** 2 - Z * (3 * X ** 2 - 4 * X + 3)
             + (2 * X ** 4 - 5 * X ** 3 + 7 * X ** 2 - 5 * X + 2))
        brs = branches_at(C, (F(1), F(1)))
        with pytest.raises(ValueError, match="max_iter exceeded"):
            isolate_branch(C, brs[0], max_iter=1)


class TestUniformity:
    def test_circle_fold_axis_blue(self):
        rep = uniformity_check(CIRCLE, ("x", F(1)))
        assert rep.verdict == "uniform-blue"
        assert not rep.falsification_witness

    def test_circle_generic_axis_silver(self):
        rep = uniformity_check(CIRCLE, ("x", F(1, 2)))
        assert rep.verdict == "uniform-silver"
        assert sum(e.conjugates for e in rep.branches) == 2

    def test_circle_axis_zero_silver(self):
        rep = uniformity_check(CIRCLE, ("x", F(0)))
        assert rep.verdict == "uniform-silver"

    def test_circle_line_at_infinity(self):
        rep = uniformity_check(CIRCLE, "linf")
        assert rep.verdict == "uniform-silver"
        assert sum(e.conjugates for e in rep.branches) == 2

    def test_mixed_witness(self):
        # at x=1 the conic folds (blue) while the chord sheet is simple
        # (silver): the assumed transitivity would forbid this
        rep = uniformity_check(MIXED, ("x", F(1)))
        assert rep.verdict == "MIXED"
        assert rep.falsification_witness
        assert {e.color for e in rep.branches} == {"silver", "blue"}

    def test_gate(self):
        with pytest.raises(ValueError, match="not presented"):
            uniformity_check(QUARTIC, ("x", F(1)))
