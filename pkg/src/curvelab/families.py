"""Degeneration families of plane projective curves.

Two constructions build a family H(X, Y, W, t), homogeneous in (X, Y, W)
with coefficients polynomial in the parameter: cone_family projects a
space curve from a center moving along a line, and mirror_family
re-projects a plane curve between two planes from centers on a line
through a fixed pivot.  The checks around them stay exact: fixed axis
points by cross-multiplication of coefficient vectors, tangent gradients
as reduced rational functions of the parameter, node tracking through
resultants and dynamic evaluation, and a slope-specialization verdict
along a parameter sequence with every gap kept as an exact rational.
"""

import decimal
from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd as int_gcd
from typing import Optional, Union

from .curves import CheckResult
from .exact import (
    ExtensionBudgetError,
    ExtScalar,
    MPoly,
    UniPoly,
    rational_roots,
    resultant,
    root_classes,
    sc_is_zero,
    split_cases,
)

# slope sentinel for a vertical line / vertical node tangent
VERTICAL = "inf"

Scalar = Union[Fraction, ExtScalar]
Slope = Union[Fraction, ExtScalar, str]


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"expected a rational value, got {v!r}")


def decimal_str(q: Fraction, digits: int = 50) -> str:
    """Decimal rendering of an exact rational, for reports only."""
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        d = decimal.Decimal(q.numerator) / decimal.Decimal(q.denominator)
    return str(d)


# ---------------------------------------------------------------------------
# rational functions of the parameter

@dataclass(frozen=True)
class RatFunc:
    """Quotient of two univariate polynomials, kept in reduced form."""

    num: UniPoly
    den: UniPoly

    @staticmethod
    def make(num: UniPoly, den: UniPoly) -> "RatFunc":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return RatFunc(num, UniPoly.const(1, den.var))
        g = num.gcd(den)
        if g.degree >= 1:
            num = num.exact_div(g)
            den = den.exact_div(g)
        if any(isinstance(c, ExtScalar) for c in num.coeffs + den.coeffs):
            lc = den.lc()
            return RatFunc(num.map_coeffs(lambda c: c / lc),
                           den.map_coeffs(lambda c: c / lc))
        # integral primitive pair, positive leading denominator
        mult = 1
        for c in num.coeffs + den.coeffs:
            mult = mult * c.denominator // int_gcd(mult, c.denominator)
        num = num.map_coeffs(lambda c: c * mult)
        den = den.map_coeffs(lambda c: c * mult)
        content = 0
        for c in num.coeffs + den.coeffs:
            content = int_gcd(content, c.numerator)
        if den.lc() < 0:
            content = -content
        return RatFunc(num.map_coeffs(lambda c: c / content),
                       den.map_coeffs(lambda c: c / content))

    def eval(self, t0):
        d = self.den.eval(t0)
        if sc_is_zero(d):
            raise ZeroDivisionError(f"pole at {self.den.var} = {t0}")
        return self.num.eval(t0) / d

    def same_as(self, other: "RatFunc") -> bool:
        return self.num * other.den == other.num * self.den

    def __repr__(self):
        if self.den.degree == 0 and self.den.lc() == 1:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


# ---------------------------------------------------------------------------
# rational lines in the plane

@dataclass(frozen=True)
class Line:
    """Line a*x + b*y + c = 0, scaled so b = 1, or a = 1 when vertical."""

    a: Fraction
    b: Fraction
    c: Fraction

    @staticmethod
    def make(a, b, c) -> "Line":
        a, b, c = _frac(a), _frac(b), _frac(c)
        if a == 0 and b == 0:
            raise ValueError("degenerate line: both direction coefficients zero")
        s = b if b != 0 else a
        return Line(a / s, b / s, c / s)

    def slope(self) -> Slope:
        return VERTICAL if self.b == 0 else -self.a

    def contains(self, pt) -> bool:
        return self.a * pt[0] + self.b * pt[1] + self.c == 0

    def poly(self, vars: tuple[str, str] = ("x", "y")) -> MPoly:
        return MPoly({(1, 0): self.a, (0, 1): self.b, (0, 0): self.c}, vars)

    def __repr__(self):
        return repr(self.poly())


def _intersect(l1: Line, l2: Line):
    d = l1.a * l2.b - l2.a * l1.b
    if d == 0:
        return None
    x = (l1.b * l2.c - l2.b * l1.c) / d
    y = (l2.a * l1.c - l1.a * l2.c) / d
    return (x, y)


def line_factors(f: MPoly) -> tuple[tuple[Line, ...], MPoly]:
    """Split off every rational linear factor of a bivariate polynomial.

    Returns (lines, residual); a repeated factor appears once per
    multiplicity and the residual has no rational linear factor left.
    """
    if f.vars != ("x", "y"):
        raise ValueError(f"expected variables (x, y), got {f.vars}")
    if f.is_zero():
        raise ValueError("zero polynomial has no factorization")
    res = f
    lines: list[Line] = []
    while res.total_degree() >= 1:
        found = _one_line_factor(res)
        if found is None:
            break
        ln, res = found
        lines.append(ln)
    return tuple(lines), res


def _one_line_factor(res: MPoly):
    # vertical factor: common rational root of all y-coefficients
    cont: Optional[UniPoly] = None
    for c in res.coeff_list("y"):
        if c.is_zero():
            continue
        cont = c.to_unipoly() if cont is None else cont.gcd(c.to_unipoly()).monic()
        if cont.degree == 0:
            break
    if cont is not None and cont.degree >= 1:
        for r in sorted(rational_roots(cont)):
            ln = Line.make(1, 0, -r)
            lp = ln.poly(res.vars)
            if lp.divides(res):
                return ln, res.exact_div(lp)
    # slant factor y = (b1-b0)x + b0 from the sections at x=0 and x=1
    f0 = res.subst({"x": Fraction(0)}).to_unipoly()
    f1 = res.subst({"x": Fraction(1)}).to_unipoly()
    if f0.is_zero() or f1.is_zero():
        return None
    for b0 in sorted(rational_roots(f0)):
        for b1 in sorted(rational_roots(f1)):
            ln = Line.make(b0 - b1, 1, -b0)
            lp = ln.poly(res.vars)
            if lp.divides(res):
                return ln, res.exact_div(lp)
    return None


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class SpaceCurve:
    """Curve in affine 3-space cut out by two polynomial equations."""

    f1: MPoly
    f2: MPoly

    def __post_init__(self):
        for f in (self.f1, self.f2):
            if f.vars != ("x", "y", "z"):
                raise ValueError(f"space curve equations use (x, y, z), got {f.vars}")
            if f.total_degree() <= 0:
                raise ValueError("space curve equation is constant")
        if self.section_degree() == 0:
            raise ValueError("no finite nonempty plane section found; "
                             "zero set does not look like a space curve")

    def section_degree(self) -> int:
        """Largest plane-section size found by sampling; 0 when none worked.

        Heuristic dimension check: a curve meets a generic plane in a
        finite nonempty set, read off the degree of a section resultant.
        """
        best = 0
        for vname in ("z", "x", "y"):
            rest = [v for v in ("x", "y", "z") if v != vname]
            for c in (Fraction(1, 2), Fraction(2), Fraction(5, 3)):
                s1 = self.f1.subst({vname: c})
                s2 = self.f2.subst({vname: c})
                if s1.total_degree() <= 0 or s2.total_degree() <= 0:
                    continue
                elim = rest[1] if max(s1.degree_in(rest[1]),
                                      s2.degree_in(rest[1])) > 0 else rest[0]
                keep = rest[0] if elim == rest[1] else rest[1]
                r = resultant(s1, s2, elim)
                if not r.is_zero():
                    best = max(best, r.degree_in(keep))
        return best


@dataclass(frozen=True)
class CurveFamily:
    """Family H(X, Y, W, t) of plane projective curves of one degree.

    h is homogeneous in (X, Y, W) for every parameter value; t_star marks
    the degenerate member, stripped logs factors removed after
    elimination, notes carries sampled certificates and warnings.
    """

    h: MPoly
    param: str
    t_star: Optional[Fraction]
    stripped: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.h.vars != ("X", "Y", "W", self.param):
            raise ValueError(f"family uses (X, Y, W, {self.param}), got {self.h.vars}")
        if self.h.is_zero():
            raise ValueError("family polynomial is zero")
        degs = {e[0] + e[1] + e[2] for e in self.h.terms}
        if len(degs) != 1:
            raise ValueError("family polynomial is not homogeneous in (X, Y, W)")

    @property
    def degree(self) -> int:
        e = next(iter(self.h.terms))
        return e[0] + e[1] + e[2]


@dataclass(frozen=True)
class NodeRecord:
    """One node of one fiber: parameter, position, the two tangent slopes."""

    t: Fraction
    position: tuple[Scalar, Scalar]
    slopes: tuple[Slope, Slope]


@dataclass(frozen=True)
class MirrorConfig:
    """Source data for mirror_family.

    The source plane is {origin + u*e1 + v*e2}; origin and e2 stay in the
    target plane z = 0 while e1 leaves it, so the two planes meet along
    the chart axis u = 0.  g cuts the source curve in chart coordinates
    (u, v); the projection centers run along the line from the pivot q
    (in the target plane) to p (off both planes).
    """

    origin: tuple[Fraction, Fraction, Fraction]
    e1: tuple[Fraction, Fraction, Fraction]
    e2: tuple[Fraction, Fraction, Fraction]
    g: MPoly
    p: tuple[Fraction, Fraction, Fraction]
    q: tuple[Fraction, Fraction, Fraction]

    def __post_init__(self):
        for name in ("origin", "e1", "e2", "p", "q"):
            val = tuple(_frac(v) for v in getattr(self, name))
            if len(val) != 3:
                raise ValueError(f"{name} must have three coordinates")
            object.__setattr__(self, name, val)
        if self.origin[2] != 0 or self.e2[2] != 0:
            raise ValueError("origin and e2 must lie in the target plane z = 0")
        if self.e1[2] == 0:
            raise ValueError("e1 must leave the target plane (source plane = target)")
        cross = (self.e1[1] * self.e2[2] - self.e1[2] * self.e2[1],
                 self.e1[2] * self.e2[0] - self.e1[0] * self.e2[2],
                 self.e1[0] * self.e2[1] - self.e1[1] * self.e2[0])
        if cross == (Fraction(0), Fraction(0), Fraction(0)):
            raise ValueError("e1 and e2 are parallel")
        if self.q[2] != 0:
            raise ValueError("pivot q must lie in the target plane z = 0")
        if self.p[2] == 0:
            raise ValueError("center p must be off the target plane z = 0")
        if self._on_source_plane(self.p):
            raise ValueError("center p must be off the source plane")
        if self.g.vars != ("u", "v"):
            raise ValueError(f"source curve uses chart (u, v), got {self.g.vars}")
        if self.g.total_degree() < 1:
            raise ValueError("source curve is constant")
        axis = self.g.subst({"u": Fraction(0)}).to_unipoly()
        m = self.g.total_degree()
        if axis.degree != m:
            raise ValueError(f"source curve meets the plane axis in degree "
                             f"{axis.degree}, expected {m}")
        if axis.gcd(axis.derivative()).degree != 0:
            raise ValueError("source curve meets the plane axis in a "
                             "repeated point")

    def _on_source_plane(self, pt) -> bool:
        u = pt[2] / self.e1[2]
        w = tuple(pt[i] - self.origin[i] - u * self.e1[i] for i in range(3))
        return w[0] * self.e2[1] - w[1] * self.e2[0] == 0

    def axis_points(self) -> dict[Fraction, int]:
        """Rational chart ordinates where the source curve meets the axis."""
        return rational_roots(self.g.subst({"u": Fraction(0)}).to_unipoly())


# ---------------------------------------------------------------------------
# family constructors

def _center_path(q, p, param: str) -> list[UniPoly]:
    # center at parameter t: q + t*(p - q)
    return [UniPoly([q[i], p[i] - q[i]], param) for i in range(3)]


def _strip_family(r: MPoly, param: str) -> tuple[MPoly, tuple[str, ...]]:
    stripped: list[str] = []
    core, mono = r.strip_monomial_content()
    for v, k in zip(r.vars, mono):
        if k:
            stripped.append(v if k == 1 else f"{v}^{k}")
    ip = core.vars.index(param)
    buckets: dict[tuple, dict[int, Fraction]] = {}
    for e, c in core.terms.items():
        key = tuple(x for j, x in enumerate(e) if j != ip)
        buckets.setdefault(key, {})[e[ip]] = c
    cont: Optional[UniPoly] = None
    for coeffs in buckets.values():
        d = max(coeffs)
        up = UniPoly([coeffs.get(k, Fraction(0)) for k in range(d + 1)], param)
        cont = up if cont is None else cont.gcd(up).monic()
        if cont.degree == 0:
            break
    if cont is not None and cont.degree >= 1:
        cont = cont.monic()
        core = core.exact_div(cont.to_mpoly(core.vars))
        stripped.append(repr(cont))
    return core, tuple(stripped)


def _finite_fiber_sample(fam: CurveFamily) -> Optional[Fraction]:
    base = fam.t_star if fam.t_star is not None else Fraction(0)
    for k in (1, 2, 3):
        t0 = base + k
        if fiber_at(fam, t0).total_degree() == fam.degree:
            return t0
    return None


def _irreducibility_note(f: MPoly) -> str:
    m = f.total_degree()
    if m == 1:
        return "irreducible (line)"
    if m == 2:
        # conic rank: det of the symmetric matrix of the quadratic
        def cf(i, j):
            return f.terms.get((i, j), Fraction(0))
        h = Fraction(1, 2)
        a, b, c = cf(2, 0), cf(1, 1) * h, cf(0, 2)
        d, e, g = cf(1, 0) * h, cf(0, 1) * h, cf(0, 0)
        det = a * (c * g - e * e) - b * (b * g - e * d) + d * (b * e - c * d)
        if det != 0:
            return "irreducible (nonsingular conic determinant)"
        return "reducible or degenerate conic"
    if m == 3:
        try:
            sings = _singular_points(f)
        except (ValueError, ExtensionBudgetError):
            sings = None
        if sings is not None:
            if not sings:
                return "irreducible (smooth cubic)"
            if len(sings) == 1 and sings[0][2] == 1:
                x0, y0, _ = sings[0]
                if not _degenerate_jet(f, x0, y0):
                    return "irreducible (cubic with a single node)"
        return "irreducibility not certified (sampled)"
    lines, _ = line_factors(f)
    if lines:
        return f"reducible (splits off the line {lines[0]!r})"
    return "no rational line factor; irreducibility not certified (sampled)"


def _generic_fiber_note(fam: CurveFamily) -> str:
    t0 = _finite_fiber_sample(fam)
    if t0 is None:
        return "generic fiber sampling failed: degree drops at all sampled parameters"
    return (f"generic fiber sampled at {fam.param}={t0}: "
            f"{_irreducibility_note(fiber_at(fam, t0))}")


def cone_family(curve: SpaceCurve, base, direction, param: str = "t",
                target=(0, 0, 1, 0)) -> CurveFamily:
    """Family of plane curves traced by projecting a space curve.

    The projection center at parameter value t is base + t*direction; the
    target plane must be z = 0 (coefficient tuple proportional to
    (0, 0, 1, 0)), where the image lives in coordinates (X, Y).
    Elimination goes through a resultant in z; monomial and
    parameter-only content is stripped and logged.
    """
    tg = tuple(_frac(v) for v in target)
    if len(tg) != 4 or tg[2] == 0 or tg[0] != 0 or tg[1] != 0 or tg[3] != 0:
        raise ValueError("only the target plane z = 0 is supported")
    base = tuple(_frac(v) for v in base)
    direction = tuple(_frac(v) for v in direction)
    if direction == (Fraction(0), Fraction(0), Fraction(0)):
        raise ValueError("center line needs a nonzero direction")
    c = _center_path(base, tuple(b + d for b, d in zip(base, direction)), param)
    if c[2].is_zero():
        raise ValueError("center line lies in the target plane")
    vs = ("X", "Y", "z", param)
    cm = [p.to_mpoly(vs) for p in c]
    zm = MPoly.var("z", vs)
    # projection to z = 0 from (c1, c2, c3): X = (c3*x - c1*z)/(c3 - z),
    # so substitute x -> (X*(c3 - z) + c1*z)/c3 and clear c3 powers
    xn = MPoly.var("X", vs) * (cm[2] - zm) + cm[0] * zm
    yn = MPoly.var("Y", vs) * (cm[2] - zm) + cm[1] * zm
    cleared = []
    for f in (curve.f1, curve.f2):
        d = max(e[0] + e[1] for e in f.terms)
        acc = MPoly.zero(vs)
        for (ex, ey, ez), coeff in f.terms.items():
            acc = acc + (MPoly.const(coeff, vs) * xn ** ex * yn ** ey
                         * zm ** ez * cm[2] ** (d - ex - ey))
        cleared.append(acc)
    a1, a2 = cleared
    if a1.degree_in("z") <= 0 and a2.degree_in("z") <= 0:
        raise ValueError("projection does not eliminate: equations are z-free")
    r = resultant(a1, a2, "z")
    if r.is_zero():
        raise ValueError("elimination collapsed: the substituted equations "
                         "share a factor")
    core, stripped = _strip_family(r, param)
    m = max(e[0] + e[1] for e in core.terms)
    h = MPoly({(ex, ey, m - ex - ey, ep): cc
               for (ex, ey, ep), cc in core.terms.items()},
              ("X", "Y", "W", param))
    roots = sorted(rational_roots(c[2]))
    t_star = roots[0] if roots else None
    notes: tuple[str, ...] = ()
    if t_star is None:
        notes += ("center line never meets the target plane; "
                  "no degenerate fiber",)
    fam = CurveFamily(h, param, t_star, stripped, notes)
    expected = curve.section_degree()
    if m < expected:
        fam = replace(fam, notes=fam.notes + (
            f"degree drop: fiber degree {m} below section degree {expected}; "
            f"projection may not be birational",))
    return replace(fam, notes=fam.notes + (_generic_fiber_note(fam),))


def mirror_family(cfg: MirrorConfig, param: str = "s") -> CurveFamily:
    """Family of projections of a plane curve into the plane z = 0.

    Centers run along the line from the pivot q to p; the curve's m
    intersection points with the axis u = 0 sit in the target plane and
    are fixed by every member.  The member at the pivot itself
    degenerates to lines through q.
    """
    vs = ("X", "Y", "W", param)
    c = _center_path(cfg.q, cfg.p, param)
    e1, e2, o = cfg.e1, cfg.e2, cfg.origin

    def row(uc: UniPoly, vc: UniPoly, wc: UniPoly) -> list[UniPoly]:
        return [uc, vc, wc]

    def scaled(upoly: UniPoly, k: Fraction) -> UniPoly:
        return upoly.map_coeffs(lambda cc: cc * k)

    # chart point (u, v, w) sits at origin*w + u*e1 + v*e2 with height
    # z = u*e1z; its image under projection from (c1, c2, c3) is
    # [c3*x - c1*z : c3*y - c2*z : c3*w - z] on z = 0
    mrows = [
        row(scaled(c[2], e1[0]) - scaled(c[0], e1[2]),
            scaled(c[2], e2[0]),
            scaled(c[2], o[0])),
        row(scaled(c[2], e1[1]) - scaled(c[1], e1[2]),
            scaled(c[2], e2[1]),
            scaled(c[2], o[1])),
        row(UniPoly.const(-e1[2], param), UniPoly.const(0, param), c[2]),
    ]
    adj = _adjugate3(mrows)
    lin = []
    for i in range(3):
        acc = MPoly.zero(vs)
        for j in range(3):
            for k, cc in enumerate(adj[i][j].coeffs):
                if sc_is_zero(cc):
                    continue
                exp = [0, 0, 0, k]
                exp[j] = exp[j] + 1
                acc = acc + MPoly({tuple(exp): cc}, vs)
        lin.append(acc)
    m = cfg.g.total_degree()
    h = MPoly.zero(vs)
    for (eu, ev), cc in cfg.g.terms.items():
        h = h + (MPoly.const(cc, vs) * lin[0] ** eu * lin[1] ** ev
                 * lin[2] ** (m - eu - ev))
    if h.is_zero():
        raise ValueError("elimination collapsed: projection map is singular "
                         "for every parameter value")
    core, stripped = _strip_family(h, param)
    roots = sorted(rational_roots(c[2]))
    t_star = roots[0] if roots else None
    fam = CurveFamily(core, param, t_star, stripped, ())
    if fam.degree < m:
        fam = replace(fam, notes=fam.notes + (
            f"degree drop: fiber degree {fam.degree} below source degree {m}",))
    return replace(fam, notes=fam.notes + (_generic_fiber_note(fam),))


def _adjugate3(a: list[list[UniPoly]]) -> list[list[UniPoly]]:
    return [
        [a[1][1] * a[2][2] - a[1][2] * a[2][1],
         a[0][2] * a[2][1] - a[0][1] * a[2][2],
         a[0][1] * a[1][2] - a[0][2] * a[1][1]],
        [a[1][2] * a[2][0] - a[1][0] * a[2][2],
         a[0][0] * a[2][2] - a[0][2] * a[2][0],
         a[0][2] * a[1][0] - a[0][0] * a[1][2]],
        [a[1][0] * a[2][1] - a[1][1] * a[2][0],
         a[0][1] * a[2][0] - a[0][0] * a[2][1],
         a[0][0] * a[1][1] - a[0][1] * a[1][0]],
    ]


# ---------------------------------------------------------------------------
# fibers

def fiber_at(fam: CurveFamily, t0) -> MPoly:
    """Fiber polynomial at one parameter value, dehomogenized to (x, y).

    The result is zero only when the family polynomial vanishes
    identically there; callers report that case.
    """
    proj = fiber_proj(fam, t0)
    aff = proj.subst({"W": Fraction(1)})
    return MPoly(dict(aff.terms), ("x", "y"))


def fiber_proj(fam: CurveFamily, t0) -> MPoly:
    """Projective fiber in (X, Y, W) at one parameter value."""
    return fam.h.subst({fam.param: _frac(t0)})


def degenerate_fiber_check(fam: CurveFamily, point, slopes) -> CheckResult:
    """Verify the degenerate fiber is deg-many distinct lines through point.

    slopes lists the expected line directions, Fractions with "inf" for a
    vertical line; compared as sets after exact factorization.
    """
    name = "degenerate-fiber"
    if fam.t_star is None:
        raise ValueError("family has no degenerate parameter value")
    proj = fiber_proj(fam, fam.t_star)
    if proj.is_zero():
        return CheckResult(name, False, "degenerate fiber vanishes identically")
    wpow = proj.monomial_content()[2]
    if wpow:
        return CheckResult(name, False,
                           f"degenerate fiber contains the line at infinity "
                           f"(W^{wpow} factor)")
    lines, residual = line_factors(fiber_at(fam, fam.t_star))
    if residual.total_degree() >= 1:
        return CheckResult(name, False,
                           f"non-linear residual factor {residual!r}")
    if len(set(lines)) != len(lines):
        return CheckResult(name, False, "repeated line in the degenerate fiber")
    if len(lines) != fam.degree:
        return CheckResult(name, False,
                           f"{len(lines)} lines for a degree-{fam.degree} family")
    o = (_frac(point[0]), _frac(point[1]))
    for ln in lines:
        if not ln.contains(o):
            return CheckResult(name, False,
                               f"line {ln!r} misses ({o[0]}, {o[1]})")
    want = {s if isinstance(s, str) else _frac(s) for s in slopes}
    got = {ln.slope() for ln in lines}
    if got != want:
        return CheckResult(name, False,
                           f"slopes {_slope_set_str(got)} differ from expected "
                           f"{_slope_set_str(want)}")
    return CheckResult(name, True,
                       f"{len(lines)} distinct lines through ({o[0]}, {o[1]}) "
                       f"with slopes {_slope_set_str(got)}")


def _slope_set_str(slopes) -> str:
    keyed = sorted(slopes, key=lambda s: (isinstance(s, str), s if not isinstance(s, str) else 0))
    return "{" + ", ".join(str(s) for s in keyed) + "}"


# ---------------------------------------------------------------------------
# asymptotic behaviour along the axis x = 0

def _coeff_vector(form: MPoly, param: str) -> list[UniPoly]:
    # form is homogeneous in its first two vars; c_j multiplies (2nd var)^j
    m = max(e[0] + e[1] for e in form.terms)
    coeffs: list[dict[int, Fraction]] = [dict() for _ in range(m + 1)]
    for (e0, e1, ep), c in form.terms.items():
        coeffs[e1][ep] = c
    out = []
    for d in coeffs:
        if not d:
            out.append(UniPoly.const(0, param))
        else:
            top = max(d)
            out.append(UniPoly([d.get(k, Fraction(0)) for k in range(top + 1)],
                               param))
    return out


def _sample_where_nonzero(polys: list[UniPoly], avoid=()) -> Fraction:
    bound = max(p.degree for p in polys if not p.is_zero()) + len(avoid) + 1
    k = Fraction(0)
    while k <= bound:
        if k not in avoid and any(not sc_is_zero(p.eval(k)) for p in polys):
            return k
        k += 1
    raise ValueError("no nonvanishing sample found")


def _fixed_vector_identity(cvec: list[UniPoly], param: str):
    """Cross-multiplication test: the vector of UniPolys is one fixed
    rational vector times a scalar polynomial.  Returns (ok, fixed values,
    witness index pair)."""
    t0 = _sample_where_nonzero(cvec)
    vals = [p.eval(t0) for p in cvec]
    for i in range(len(cvec)):
        for j in range(i + 1, len(cvec)):
            probe = cvec[i].map_coeffs(lambda c: c * vals[j]) - \
                cvec[j].map_coeffs(lambda c: c * vals[i])
            if not probe.is_zero():
                return False, vals, (i, j)
    return True, vals, None


def asymptotic_check(fam: CurveFamily, mode: str = "strict",
                     infinity_checks: bool = False) -> CheckResult:
    """Check the family keeps fixed points, and tangents, on the axis x = 0.

    Condition (i): the restriction H(0, Y, W, t) is one fixed form up to a
    parameter-dependent scalar, with deg-many distinct roots in finite
    position away from the origin; it gates both modes.  strict then
    demands each tangent gradient at the axis points be constant
    (polynomial identity); weak only samples non-singularity of the
    branches there (parameter values t*+1, t*+2, t*+3).  infinity_checks
    adds the mirrored conditions on the axis W = 0.
    """
    if mode not in ("strict", "weak"):
        raise ValueError(f"unknown mode {mode!r}")
    name = f"asymptotic-{mode}"
    m = fam.degree
    axis = fam.h.subst({"X": Fraction(0)})
    if axis.is_zero():
        return CheckResult(name, False, "the axis x = 0 lies on every fiber")
    cvec = _coeff_vector(axis, fam.param)
    ok, vals, pair = _fixed_vector_identity(cvec, fam.param)
    if not ok:
        return CheckResult(name, False,
                           f"(i) fails: the axis section moves with "
                           f"{fam.param} (coefficients {pair[0]} and {pair[1]})")
    # vals[j] multiplies Y^(m-j) W^j, so the affine section reads them reversed
    phi = UniPoly(list(reversed(vals)), "y")
    if phi.degree < m:
        return CheckResult(name, False,
                           "(i) fails: an axis intersection point sits at infinity")
    if phi.gcd(phi.derivative()).degree != 0:
        return CheckResult(name, False,
                           "(i) fails: axis intersection points collide")
    if sc_is_zero(phi.eval(Fraction(0))):
        return CheckResult(name, False,
                           "(i) fails: an axis intersection point sits at the origin")
    points = root_classes(phi)
    base = fam.t_star if fam.t_star is not None else Fraction(0)
    wsamples = [base + k for k in (1, 2, 3)]
    for rc in points:
        a = rc.value
        hx = _axis_gradient(fam, a, "X")
        hy = _axis_gradient(fam, a, "Y")
        if hy.is_zero():
            return CheckResult(name, False,
                               f"branch at (0, {a}) vertical or singular "
                               f"for all {fam.param}")
        for t1 in wsamples:
            if sc_is_zero(hy.eval(t1)):
                return CheckResult(name, False,
                                   f"branch at (0, {a}) singular or vertical "
                                   f"at {fam.param}={t1}")
        if mode == "strict" and not hx.is_zero():
            t1 = _sample_where_nonzero([hy])
            probe = hx.map_coeffs(lambda c: c * hy.eval(t1)) - \
                hy.map_coeffs(lambda c: c * hx.eval(t1))
            if not probe.is_zero():
                theta = RatFunc.make(-hx, hy)
                return CheckResult(name, False,
                                   f"tangent gradient at (0, {a}) varies: "
                                   f"theta({fam.param}) = {theta!r}")
    if infinity_checks:
        inf_result = _infinity_conditions(fam, name)
        if inf_result is not None:
            return inf_result
    extra = " and on W = 0" if infinity_checks else ""
    detail = ("fixed axis section with constant tangents" if mode == "strict"
              else "fixed axis section with nonsingular branches at samples")
    return CheckResult(name, True, detail + extra)


def _axis_gradient(fam: CurveFamily, a, which: str) -> UniPoly:
    g = fam.h.derivative(which).subst({"X": Fraction(0), "Y": a,
                                       "W": Fraction(1)})
    return g.to_unipoly()


def _infinity_conditions(fam: CurveFamily, name: str) -> Optional[CheckResult]:
    m = fam.degree
    inf_form = fam.h.subst({"W": Fraction(0)})
    if inf_form.is_zero():
        return CheckResult(name, False, "the axis W = 0 lies on every fiber")
    cvec = _coeff_vector(inf_form, fam.param)
    ok, vals, pair = _fixed_vector_identity(cvec, fam.param)
    if not ok:
        return CheckResult(name, False,
                           "the section along W = 0 moves with the parameter")
    psi = UniPoly(vals, "y")
    if m - psi.degree > 1:
        # the point [0:1:0] absorbs the missing degree as a repeated root
        return CheckResult(name, False,
                           "W = 0 intersection points collide at [0:1:0]")
    if sc_is_zero(vals[0]):
        return CheckResult(name, False,
                           "a W = 0 intersection point sits at [1:0:0]")
    if psi.degree >= 1 and psi.gcd(psi.derivative()).degree != 0:
        return CheckResult(name, False, "W = 0 intersection points collide")
    for lam in sorted(rational_roots(psi)):
        hy = fam.h.derivative("Y").subst({"X": Fraction(1), "Y": lam,
                                          "W": Fraction(0)}).to_unipoly()
        hw = fam.h.derivative("W").subst({"X": Fraction(1), "Y": lam,
                                          "W": Fraction(0)}).to_unipoly()
        if hy.is_zero():
            return CheckResult(name, False,
                               f"tangent at [1:{lam}:0] equals the axis W = 0")
        t1 = _sample_where_nonzero([hy])
        probe = hw.map_coeffs(lambda c: c * hy.eval(t1)) - \
            hy.map_coeffs(lambda c: c * hw.eval(t1))
        if not probe.is_zero():
            return CheckResult(name, False,
                               f"tangent at [1:{lam}:0] varies with the parameter")
    return None


def tangent_gradient(fam: CurveFamily, point) -> RatFunc:
    """Gradient of the fiber tangent at an axis point (0, a), as -F_x/F_y.

    The result is an exact reduced rational function of the parameter.
    """
    if _frac(point[0]) != 0:
        raise ValueError("tangent gradients are taken at axis points (0, a)")
    a = point[1] if isinstance(point[1], ExtScalar) else _frac(point[1])
    on_curve = fam.h.subst({"X": Fraction(0), "Y": a, "W": Fraction(1)})
    if not on_curve.is_zero():
        raise ValueError(f"(0, {a}) does not lie on every fiber")
    hx = _axis_gradient(fam, a, "X")
    hy = _axis_gradient(fam, a, "Y")
    if hy.is_zero():
        raise ValueError("branch vertical or singular for all t")
    return RatFunc.make(-hx, hy)


# ---------------------------------------------------------------------------
# node tracking

def _degenerate_jet(f: MPoly, x0, y0) -> bool:
    fxx, fxy, fyy = _second_partials(f, x0, y0)
    if sc_is_zero(fxx) and sc_is_zero(fxy) and sc_is_zero(fyy):
        return True
    return sc_is_zero(fxy * fxy - fxx * fyy)


def _second_partials(f: MPoly, x0, y0):
    fx = f.derivative("x")
    fy = f.derivative("y")
    at = {"x": x0, "y": y0}
    return (fx.derivative("x").subst(at), fx.derivative("y").subst(at),
            fy.derivative("y").subst(at))


def _jet_repr(fxx, fxy, fyy) -> str:
    half = Fraction(1, 2)
    jet = MPoly({(2, 0): fxx * half, (1, 1): fxy, (0, 2): fyy * half},
                ("dx", "dy"))
    return repr(jet)


def _node_slopes(f: MPoly, x0, y0) -> tuple[Slope, Slope]:
    fxx, fxy, fyy = _second_partials(f, x0, y0)
    if sc_is_zero(fxx) and sc_is_zero(fxy) and sc_is_zero(fyy):
        raise ValueError(f"non-nodal singularity at ({x0}, {y0}): "
                         f"second-order form vanishes")
    if sc_is_zero(fxy * fxy - fxx * fyy):
        raise ValueError(f"non-nodal singularity at ({x0}, {y0}): "
                         f"second-order form {_jet_repr(fxx, fxy, fyy)} "
                         f"is a repeated line")
    if sc_is_zero(fyy):
        finite = -fxx / (fxy + fxy)
        return (finite, VERTICAL)
    quad = UniPoly([fxx, fxy + fxy, fyy], "m")
    if quad.has_extension_coeffs():
        # slope roots would sit in a second-step extension
        raise ExtensionBudgetError(repr(quad), depth_needed=2)
    roots = [rc.value for rc in root_classes(quad)]
    if len(roots) != 2:
        raise ValueError(f"degenerate slope quadratic at ({x0}, {y0})")
    if all(isinstance(r, Fraction) for r in roots):
        roots.sort()
    return (roots[0], roots[1])


def _singular_points(f: MPoly) -> list[tuple[Scalar, Scalar, int]]:
    """Common zeros of (f, f_x, f_y): (x, y, conjugate count) triples."""
    if f.total_degree() <= 0:
        return []
    only_x = f.degree_in("y") == 0
    only_y = f.degree_in("x") == 0
    if only_x or only_y:
        up = f.to_unipoly()
        if up.gcd(up.derivative()).degree == 0:
            return []
        raise ValueError("singular locus is not finite "
                         "(repeated one-variable factor)")
    fx = f.derivative("x")
    fy = f.derivative("y")
    if fx.is_zero() or fy.is_zero():
        raise ValueError("singular locus is not finite")
    if max(fx.degree_in("y"), fy.degree_in("y")) == 0:
        # both partials involve x alone; shared abscissas give the candidates
        rxu = fx.to_unipoly().gcd(fy.to_unipoly())
        if rxu.degree == 0:
            return []
    else:
        rx = resultant(fx, fy, "y")
        if rx.is_zero():
            raise ValueError("singular locus is not finite "
                             "(the partials share a factor)")
        if rx.is_constant():
            return []
        rxu = rx.to_unipoly()
    out: list[tuple[Scalar, Scalar, int]] = []

    def at_abscissa(x0):
        return [(x0, y0, w) for y0, w in _ordinates_at(f, fx, fy, x0)]

    for xc in root_classes(rxu):
        if xc.modulus is None or xc.conjugates == 1:
            # rational abscissa, or an explicit root of an irreducible quadratic
            out.extend(at_abscissa(xc.value))
        else:
            # one representative for several conjugates: the modulus may
            # still split, so run under dynamic evaluation
            for factor, found in split_cases(xc.modulus, at_abscissa):
                weight = max(factor.degree, 1)
                out.extend((x0, y0, w * weight) for x0, y0, w in found)
    return out


def _ordinates_at(f: MPoly, fx: MPoly, fy: MPoly, x0):
    at = {"x": x0}
    g: Optional[UniPoly] = None
    for p in (f, fx, fy):
        sec = p.subst(at).to_unipoly()
        if sec.is_zero():
            continue
        g = sec if g is None else g.gcd(sec).monic()
        if g.degree == 0:
            return []
    if g is None:
        raise ValueError(f"singular locus is not finite along x = {x0}")
    return [(rc.value, rc.conjugates) for rc in root_classes(g)]


def node_track(fam: CurveFamily, samples) -> list[NodeRecord]:
    """Nodes of the fibers at the given parameter values, in sample order.

    Each singular point must be a node (nondegenerate second-order form
    with distinct tangents); anything else raises with the offending form.
    """
    out: list[NodeRecord] = []
    for t0 in samples:
        t0 = _frac(t0)
        f = fiber_at(fam, t0)
        if f.is_zero():
            raise ValueError(f"fiber at {fam.param}={t0} vanishes identically")
        for x0, y0, _ in _singular_points(f):
            out.append(NodeRecord(t0, (x0, y0), _node_slopes(f, x0, y0)))
    return out


# ---------------------------------------------------------------------------
# good specialization along a sequence

@dataclass(frozen=True)
class GoodSpecReport:
    """Verdict of a slope-specialization run, with exact gap data."""

    passed: bool
    witness: str
    gaps: tuple
    limit_point: Optional[tuple[Fraction, Fraction]]
    matched_slopes: Optional[tuple[Slope, Slope]]
    records: tuple


def _rational_node(rec: NodeRecord) -> tuple[Fraction, Fraction]:
    x0, y0 = rec.position
    if not isinstance(x0, Fraction) or not isinstance(y0, Fraction):
        raise ValueError(f"node path leaves the rational field at "
                         f"t={rec.t}: ({x0}, {y0})")
    return (x0, y0)


def _slope_gap(pair, target) -> Optional[Fraction]:
    # best of the two assignments; None encodes an infinite gap
    best: Optional[Fraction] = None
    feasible = False
    for assign in ((0, 1), (1, 0)):
        worst = Fraction(0)
        ok = True
        for got, want in zip(pair, (target[assign[0]], target[assign[1]])):
            gv = isinstance(got, str)
            wv = isinstance(want, str)
            if gv and wv:
                continue
            if gv != wv:
                ok = False
                break
            worst = max(worst, abs(got - want))
        if ok:
            feasible = True
            best = worst if best is None else min(best, worst)
    return best if feasible else None


def _gap_le(a: Optional[Fraction], b: Optional[Fraction]) -> bool:
    # None = infinity
    if b is None:
        return True
    if a is None:
        return False
    return a <= b


def good_specialization_check(fam: CurveFamily, samples, tol) -> GoodSpecReport:
    """Check tracked node data converges onto the degenerate line pattern.

    For each parameter in samples the fiber's node position and tangent
    slope pair are compared against the nearest intersection point of the
    degenerate fiber's lines and the best-matching incident line pair;
    gap_k = max(position distance, slope distance), all exact.  PASS
    needs finite, non-increasing gaps with the final one below tol.  A
    parameter-independent nodal family passes trivially.
    """
    if fam.t_star is None:
        raise ValueError("family has no degenerate parameter value")
    tol = _frac(tol)
    samples = [_frac(t) for t in samples]
    if not samples:
        raise ValueError("empty sample sequence")
    if any(t == fam.t_star for t in samples):
        raise ValueError("samples must avoid the degenerate parameter value")
    fstar = fiber_at(fam, fam.t_star)
    if fstar.is_zero():
        raise ValueError("degenerate fiber vanishes identically")
    per_sample = []
    for t0 in samples:
        recs = [r for r in node_track(fam, [t0])]
        if not recs:
            raise ValueError(f"fiber at {fam.param}={t0} has no node to track")
        per_sample.append(recs)
    counts = {len(r) for r in per_sample}
    if len(counts) != 1:
        raise ValueError(f"node count varies along the sequence: {sorted(counts)}")
    paths = _match_paths(per_sample)
    lines, residual = line_factors(fstar)
    if residual.total_degree() >= 1:
        constant = all(fiber_at(fam, t0).proportional(fstar) for t0 in samples)
        if constant:
            gaps = tuple(Fraction(0) for _ in samples)
            rec0 = paths[0][0]
            return GoodSpecReport(
                True,
                "parameter-independent family: node data constant, gaps all 0",
                gaps, _rational_node(rec0), rec0.slopes,
                tuple(tuple(p) for p in paths))
        raise ValueError(f"degenerate fiber is not a product of lines: "
                         f"residual factor {residual!r}")
    if len(lines) < 2:
        raise ValueError("degenerate fiber has fewer than two lines")
    crossings: dict[tuple[Fraction, Fraction], list[tuple[int, int]]] = {}
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            pt = _intersect(lines[i], lines[j])
            if pt is not None:
                crossings.setdefault(pt, []).append((i, j))
    if not crossings:
        raise ValueError("degenerate lines are all parallel")
    overall: list[Optional[Fraction]] = [Fraction(0)] * len(samples)
    limits = []
    matched = []
    for path in paths:
        last = _rational_node(path[-1])
        ostar = min(crossings,
                    key=lambda pt: (max(abs(pt[0] - last[0]), abs(pt[1] - last[1])),
                                    pt))
        pairs = crossings[ostar]
        final_slopes = _rational_slopes(path[-1])
        best_pair = min(
            pairs,
            key=lambda ij: _keyed_gap(_slope_gap(
                final_slopes, (lines[ij[0]].slope(), lines[ij[1]].slope()))))
        target = (lines[best_pair[0]].slope(), lines[best_pair[1]].slope())
        limits.append(ostar)
        matched.append(target)
        for k, rec in enumerate(path):
            pos = _rational_node(rec)
            posgap = max(abs(pos[0] - ostar[0]), abs(pos[1] - ostar[1]))
            sgap = _slope_gap(_rational_slopes(rec), target)
            gap = None if sgap is None else max(posgap, sgap)
            if overall[k] is not None:
                overall[k] = gap if gap is None else max(overall[k], gap)
    finite = all(g is not None for g in overall)
    monotone = all(_gap_le(overall[k + 1], overall[k])
                   for k in range(len(overall) - 1))
    small = finite and overall[-1] < tol
    passed = finite and monotone and small
    gaps = tuple(overall)
    if passed:
        witness = (f"node path reaches {_pt_str(limits[0])} matching line slopes "
                   f"{_slope_set_str(set(matched[0]))}; final gap "
                   f"{decimal_str(gaps[-1], 8)} < {decimal_str(tol, 8)}")
    elif not finite:
        witness = "vertical/finite slope mismatch: infinite gap in the sequence"
    elif not small:
        witness = (f"final gap {decimal_str(gaps[-1], 8)} at "
                   f"{fam.param}={samples[-1]} stays above {decimal_str(tol, 8)}: "
                   f"slope pair settles away from every incident line pair")
    else:
        witness = "gap sequence is not monotone"
    return GoodSpecReport(passed, witness, gaps,
                          limits[0] if limits else None,
                          matched[0] if matched else None,
                          tuple(tuple(p) for p in paths))


def _keyed_gap(g: Optional[Fraction]):
    return (g is None, g if g is not None else Fraction(0))


def _pt_str(pt) -> str:
    return f"({pt[0]}, {pt[1]})"


def _rational_slopes(rec: NodeRecord) -> tuple[Slope, Slope]:
    for s in rec.slopes:
        if not isinstance(s, (Fraction, str)):
            raise ValueError(f"node slopes leave the rational field at "
                             f"t={rec.t}: {s}")
    return rec.slopes


def _match_paths(per_sample) -> list[list[NodeRecord]]:
    paths = [[rec] for rec in per_sample[0]]
    for step in per_sample[1:]:
        unused = list(step)
        for path in paths:
            prev = _rational_node(path[-1])
            best_i = min(
                range(len(unused)),
                key=lambda i: max(abs(_rational_node(unused[i])[0] - prev[0]),
                                  abs(_rational_node(unused[i])[1] - prev[1])))
            path.append(unused.pop(best_i))
    return paths
