"""Geometry of plane curves over the rationals: asymptotes, presentation
checks, fibrewise Moebius transforms, and branch bookkeeping.

A curve is a nonzero MPoly in two variables; the first variable is the base
coordinate, the second the fibre coordinate.  Everything here is exact:
scalars are Fraction or ExtScalar, branch data are TruncSeries, and all
transforms are verified rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .exact import (
    ExtScalar,
    MPoly,
    Scalar,
    UniPoly,
    homog_parts,
    resultant_uni,
    root_classes,
    sc,
    sc_inv,
    sc_is_zero,
    split_cases,
)
from .series import TruncSeries, eval_bipoly, local_branches


# ---------------------------------------------------------------------------
# projective points in the (X, Z, W) plane

class ProjPoint:
    """Point of the projective plane holding the curve's (x, z) chart.

    Equality is projective: two triples agree when all their 2x2 minors
    vanish, so no coordinate ever needs inverting just to compare.
    """

    __slots__ = ("coords",)

    def __init__(self, x, z, w):
        t = (sc(x), sc(z), sc(w))
        if all(sc_is_zero(c) for c in t):
            raise ValueError("projective point needs a nonzero coordinate")
        self.coords = t

    def canonical(self) -> tuple[Scalar, Scalar, Scalar]:
        """Scale so the first nonzero coordinate becomes 1."""
        for c in self.coords:
            if not sc_is_zero(c):
                s = sc_inv(c)
                return tuple(s * v for v in self.coords)
        raise ValueError("projective point needs a nonzero coordinate")

    def is_finite(self) -> bool:
        return not sc_is_zero(self.coords[2])

    def affine(self) -> tuple[Scalar, Scalar]:
        x, z, w = self.coords
        s = sc_inv(w)
        return (x * s, z * s)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        a, b = self.coords, other.coords
        for i in range(3):
            for j in range(i + 1, 3):
                if not sc_is_zero(a[i] * b[j] - a[j] * b[i]):
                    return False
        return True

    __hash__ = None

    def __repr__(self):
        return "[" + " : ".join(repr(c) for c in self.coords) + "]"


Q1 = ProjPoint(0, 1, 0)
INF_X = ProjPoint(1, 0, 0)


# ---------------------------------------------------------------------------
# fibrewise Moebius maps  z -> (a(x) z + b(x)) / (c(x) z + d(x))

def _as_poly(v, var: str) -> UniPoly:
    if isinstance(v, UniPoly):
        return v.rename(var)
    return UniPoly.const(sc(v), var)


class MobiusMap:
    """Moebius transform of the fibre coordinate with x-dependent entries.

    Validity: b(0) = 0, a(0) d(0) != 0, and the determinant a d - b c is
    not identically zero, so the map is birational and fixes the fibre
    over x = 0 pointwise at z = 0.
    """

    __slots__ = ("a", "b", "c", "d", "var")

    def __init__(self, a, b, c, d, var: str = "x"):
        self.var = var
        self.a = _as_poly(a, var)
        self.b = _as_poly(b, var)
        self.c = _as_poly(c, var)
        self.d = _as_poly(d, var)
        if not sc_is_zero(self.b.constant()):
            raise ValueError("invalid MobiusMap: b(0) != 0")
        if sc_is_zero(self.a.constant() * self.d.constant()):
            raise ValueError("invalid MobiusMap: a(0) d(0) = 0")
        if (self.a * self.d - self.b * self.c).is_zero():
            raise ValueError("invalid MobiusMap: determinant identically zero")

    @classmethod
    def identity(cls, var: str = "x") -> "MobiusMap":
        return cls(1, 0, 0, 1, var)

    @classmethod
    def shear(cls, alpha, var: str = "x") -> "MobiusMap":
        """z -> (x - alpha) z, the transform contracting l_inf toward Q1."""
        return cls(UniPoly([-sc(alpha), 1], var), 0, 0, 1, var)

    @property
    def is_shear(self) -> bool:
        return (self.b.is_zero() and self.c.is_zero()
                and self.a.degree == 1 and self.d.degree == 0)

    def det(self) -> UniPoly:
        return self.a * self.d - self.b * self.c

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self after other, by 2x2 matrix product."""
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.var,
        )

    def __repr__(self):
        return (f"MobiusMap(a={self.a!r}, b={self.b!r}, "
                f"c={self.c!r}, d={self.d!r})")


def mobius_inverse(g: MobiusMap) -> MobiusMap:
    """Inverse transform (d z - b) / (-c z + a), the 2x2 adjugate."""
    return MobiusMap(g.d, -g.b, -g.c, g.a, g.var)


# ---------------------------------------------------------------------------
# asymptotes

@dataclass(frozen=True)
class Asymptote:
    """The affine line a x + b z = value approached by an infinite branch.

    conjugates counts how many lines the record stands for when either the
    direction or the offset lives in an extension class; provenance is
    "simple-factor" when the top-form factor is simple, "multiplicity-s"
    when a depth-s coefficient chain was used.
    """

    a: Scalar
    b: Scalar
    value: Scalar
    provenance: str
    conjugates: int = 1


def _dehom(form: MPoly | None, k: int) -> UniPoly:
    # P_k(1, w): the w^j coefficient is the x^(k-j) z^j coefficient of P_k
    coeffs = [sc(0)] * (k + 1)
    if form is not None:
        for e, c in form.terms.items():
            coeffs[e[1]] = c
    return UniPoly(coeffs, "w")


def _synth_div(p: UniPoly, w0) -> tuple[UniPoly, Scalar]:
    """Quotient and remainder of p by (w - w0), by Horner accumulation."""
    acc = None
    qs = []
    for c in reversed(p.coeffs):
        acc = c if acc is None else c + w0 * acc
        qs.append(acc)
    if acc is None:
        return UniPoly([], p.var), sc(0)
    rem = qs.pop()
    return UniPoly(list(reversed(qs)), p.var), rem


def _div_out_root(p: UniPoly, w0, k: int) -> UniPoly | None:
    """p / (w - w0)**k when the division is exact, else None."""
    cur = p
    for _ in range(k):
        if cur.is_zero():
            return cur
        q, rem = _synth_div(cur, w0)
        if not sc_is_zero(rem):
            return None
        cur = q
    return cur


def _largest_chain(r: int, ok: Callable[[int, int], bool]) -> int:
    # largest s <= r passing ok(s, j) for every 1 <= j <= s - 1
    for s in range(r, 0, -1):
        if all(ok(s, j) for j in range(1, s)):
            return s
    raise ValueError("chain depth search needs r >= 1")


def _offset_classes(tpoly: UniPoly, tower_depth: int) -> list[tuple[Scalar, int]]:
    """Root classes of the offset equation, as (value, conjugates)."""
    if tpoly.is_zero():
        raise ValueError("degenerate asymptote equation")
    if tpoly.degree == 0:
        return []
    return [(cl.value, cl.conjugates) for cl in root_classes(tpoly, tower_depth)]


def asymptotes(C: MPoly, tower_depth: int = 2) -> list[Asymptote]:
    """All affine asymptote lines of the curve C, exactly.

    Each direction comes from a linear factor of the top form; the offset
    is a root of the polynomial built from the coefficient forms of as
    many lower layers as the factor's divisibility chain supports.
    """
    if C.is_zero() or C.is_constant():
        raise ValueError("asymptotes need a curve of positive degree")
    parts = {h.degree: h.form for h in homog_parts(C)}
    m = max(parts)
    u = {k: _dehom(parts.get(k), k) for k in range(m + 1)}
    um = u[m]
    out: list[Asymptote] = []

    # vertical directions: the factor x^f of the top form
    f = m - um.degree
    if f >= 1:
        s = _largest_chain(f, lambda s, j: u[m - j].degree <= m - s)
        tc = [sc(0)] * (s + 1)
        tc[0] = u[m - s][m - s]
        for j in range(s):
            tc[s - j] = u[m - j][m - s]
        prov = "simple-factor" if f == 1 else f"multiplicity-{s}"
        for t0, ct in _offset_classes(UniPoly(tc, "t"), tower_depth):
            out.append(Asymptote(sc(1), sc(0), t0, prov, ct))

    # slope directions: root classes of the dehomogenized top form
    for cl in root_classes(um, tower_depth):
        if cl.modulus is None or cl.modulus.degree <= 2:
            cases = [(cl.conjugates, _slope_offsets(u, m, cl.value, cl.multiplicity, tower_depth))]
        else:
            ran = split_cases(cl.modulus,
                              lambda w0: _slope_offsets(u, m, w0, cl.multiplicity, tower_depth))
            cases = [(fac.degree, res) for fac, res in ran]
        for cf, (w0, s, r, offsets) in cases:
            prov = "simple-factor" if r == 1 else f"multiplicity-{s}"
            for t0, ct in offsets:
                out.append(Asymptote(-w0, sc(1), t0, prov, cf * ct))
    return out


def _slope_offsets(u: dict[int, UniPoly], m: int, w0, r: int, tower_depth: int):
    """Offsets of the asymptotes with direction z = w0 x + t."""
    def ok(s: int, j: int) -> bool:
        return _div_out_root(u[m - j], w0, s - j) is not None

    s = _largest_chain(r, ok)
    tc = [sc(0)] * (s + 1)
    tc[0] = u[m - s].eval(w0)
    for j in range(s):
        q = _div_out_root(u[m - j], w0, s - j)
        tc[s - j] = q.eval(w0) if q is not None else sc(0)
    return (w0, s, r, _offset_classes(UniPoly(tc, "t"), tower_depth))


# ---------------------------------------------------------------------------
# presentation checks

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str


@dataclass(frozen=True)
class CriticalPoint:
    """A special fibre point: two sheets meet over this abscissa.

    kind is vertical-tangency (the curve folds), node (two smooth arcs
    cross), or violation when the local picture breaks the presentation
    contract.  conjugates counts the abscissa's conjugacy class.
    """

    abscissa: Scalar
    fiber_value: Scalar | None
    kind: str
    conjugates: int = 1
    modulus: UniPoly | None = None


@dataclass(frozen=True)
class PresentationReport:
    checks: tuple[CheckResult, ...]
    critical_points: tuple[CriticalPoint, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _fiber(F: MPoly, alpha) -> UniPoly:
    vx, vz = F.vars
    return F.subst({vx: sc(alpha)}).to_unipoly().rename(vz)


def _is_squarefree(p: UniPoly) -> bool:
    return p.gcd(p.derivative()).degree == 0


def presentation_check(F: MPoly, tower_depth: int = 2) -> PresentationReport:
    """Check the five conditions that make a curve's fibres well-behaved.

    c1: fibre degree equals total degree (no point of the curve sits at
        the top of the fibre direction);
    c2: the fibre over 0 has the full number of distinct sheets and 0 is
        not a critical abscissa;
    c3: the top form is squarefree;
    c4: over every critical abscissa exactly two sheets meet, at a single
        fibre value of multiplicity exactly two;
    c5: every such meeting is a vertical tangency or an ordinary node.
    """
    if F.is_zero() or F.is_constant():
        raise ValueError("presentation check needs a curve of positive degree")
    vx, vz = F.vars
    m = F.total_degree()
    checks: list[CheckResult] = []

    dz = F.degree_in(vz)
    checks.append(CheckResult(
        "c1", dz == m, f"deg in {vz} is {dz}, total degree {m}"))

    R = resultant_uni(F, F.derivative(vz), vz)
    f0 = _fiber(F, 0)
    ok2 = (f0.degree == m and _is_squarefree(f0)
           and not R.is_zero() and not sc_is_zero(R.eval(sc(0))))
    checks.append(CheckResult(
        "c2", ok2,
        f"fibre over 0 has degree {f0.degree}"
        + ("" if _is_squarefree(f0) else ", repeated sheet")
        + ("" if (not R.is_zero() and not sc_is_zero(R.eval(sc(0)))) else ", 0 is critical")))

    top = _dehom(homog_parts(F)[0].form, m)
    fmult = m - top.degree
    ok3 = fmult <= 1 and _is_squarefree(top)
    checks.append(CheckResult(
        "c3", ok3, "top form squarefree" if ok3 else "top form has a repeated factor"))

    points: list[CriticalPoint] = []
    ok4 = True
    ok5 = True
    wit4: list[str] = []
    wit5: list[str] = []
    if R.is_zero():
        ok4 = False
        wit4.append("discriminant vanishes identically (repeated component)")
    else:
        rred = R.exact_div(R.gcd(R.derivative())).monic()
        for cl in root_classes(rred, tower_depth):
            if cl.modulus is None or cl.modulus.degree <= 2:
                cases = [(cl.value, cl.conjugates, cl.modulus,
                          _collision_at(F, cl.value))]
            else:
                ran = split_cases(cl.modulus, lambda xb: _collision_at(F, xb))
                cases = []
                for fac, res in ran:
                    v = -fac.coeffs[0] if fac.degree == 1 else ExtScalar.generator(fac)
                    cases.append((v, fac.degree, fac if fac.degree > 1 else None, res))
            for xb, cf, mod, (good, rho, kind, note) in cases:
                points.append(CriticalPoint(xb, rho, kind, cf, mod))
                if not good:
                    ok4 = False
                    wit4.append(note)
                if kind == "violation":
                    ok5 = False
                    wit5.append(note)
    checks.append(CheckResult(
        "c4", ok4, "; ".join(wit4) if wit4 else "one double sheet value per critical abscissa"))
    checks.append(CheckResult(
        "c5", ok5, "; ".join(wit5) if wit5 else "every collision is a fold or a node"))
    return PresentationReport(tuple(checks), tuple(points))


def _collision_at(F: MPoly, xb) -> tuple[bool, Scalar | None, str, str]:
    """Inspect the fibre over one critical abscissa.

    Returns (contract holds, double value, kind, witness note).
    """
    vx, vz = F.vars
    fib = _fiber(F, xb)
    g = fib.gcd(_fiber(F.derivative(vz), xb))
    if g.degree != 1:
        return (False, None, "violation",
                f"gcd degree {g.degree} over abscissa {xb!r}")
    rho = -g.monic().coeffs[0]
    mult = 0
    cur = fib
    while not cur.is_zero():
        q, rem = _synth_div(cur, rho)
        if not sc_is_zero(rem):
            break
        mult += 1
        cur = q
    if mult != 2:
        return (False, rho, "violation",
                f"contact order {mult} != 2 over abscissa {xb!r}")
    fx = F.derivative(vx).subst({vx: xb, vz: rho})
    if not sc_is_zero(fx):
        return (True, rho, "vertical-tangency", "")
    fxx = F.derivative(vx).derivative(vx).subst({vx: xb, vz: rho})
    fxz = F.derivative(vx).derivative(vz).subst({vx: xb, vz: rho})
    fzz = F.derivative(vz).derivative(vz).subst({vx: xb, vz: rho})
    if not sc_is_zero(fxz * fxz - fxx * fzz):
        return (True, rho, "node", "")
    return (False, rho, "violation",
            f"degenerate double point over abscissa {xb!r}")


def critical_fiber_analysis(F: MPoly,
                            tower_depth: int = 2) -> tuple[CriticalPoint, ...]:
    """Certified collision list: over each critical abscissa exactly one
    pair of sheets meets, never three, and the meeting is a fold or node.
    """
    rep = presentation_check(F, tower_depth)
    if not rep.passed:
        bad = ", ".join(c.name for c in rep.checks if not c.passed)
        raise ValueError(f"curve is not presented (failing {bad})")
    return rep.critical_points


# ---------------------------------------------------------------------------
# applying a Moebius map to a curve

def apply_mobius(C: MPoly, g: MobiusMap) -> MPoly:
    """Image curve under the fibrewise transform z -> g(x)(z).

    Substitutes the inverse map and clears denominators:
    sum of r_ij x^i (d z - b)^j (-c z + a)^(n-j) over the terms of C,
    then strips base-coordinate content and the extraneous image of the
    cleared denominator.
    """
    if C.is_zero():
        raise ValueError("degenerate transform")
    vx, vz = C.vars
    vars2 = (vx, vz)
    zM = MPoly.var(vz, vars2)
    aM = g.a.rename(vx).to_mpoly(vars2)
    bM = g.b.rename(vx).to_mpoly(vars2)
    cM = g.c.rename(vx).to_mpoly(vars2)
    dM = g.d.rename(vx).to_mpoly(vars2)
    P = dM * zM - bM
    E = aM - cM * zM
    n = max(C.degree_in(vz), 0)
    ppow = [MPoly.const(1, vars2)]
    epow = [MPoly.const(1, vars2)]
    for _ in range(n):
        ppow.append(ppow[-1] * P)
        epow.append(epow[-1] * E)
    out = MPoly.zero(vars2)
    for j, cj in enumerate(C.coeff_list(vz)):
        out = out + cj.extend_vars(vars2) * ppow[j] * epow[n - j]

    out = _strip_x_content(out)
    if not g.c.is_zero():
        while not out.is_constant() and E.divides(out):
            out = _strip_x_content(out.exact_div(E))
    if out.is_constant():
        raise ValueError("degenerate transform")
    return out


def _strip_x_content(P: MPoly) -> MPoly:
    """Remove the base-coordinate content common to all fibre coefficients."""
    if P.is_zero():
        return P
    vx, vz = P.vars
    content = UniPoly([], vx)
    for cj in P.coeff_list(vz):
        content = content.gcd(cj.to_unipoly().rename(vx))
        if content.degree == 0:
            return P
    if content.degree >= 1:
        P = P.exact_div(content.to_mpoly(P.vars))
    return P


# ---------------------------------------------------------------------------
# branches as truncated parametrizations

@dataclass(frozen=True)
class BranchParam:
    """A branch of a curve: center, parametrization, tangent, and kind.

    x and z are series in a parameter eps; tangent is ("x", alpha) for a
    vertical line, ("y", k, c) for z = k x + c, or "linf"; kind is one of
    finite, hyperbolic-at-Q1, parabolic-at-Q1, other-infinite.
    curve_degree, when known, bounds the branch exponents.
    """

    center: ProjPoint
    x: TruncSeries
    z: TruncSeries
    tangent: object
    kind: str
    curve_degree: int | None = None


def _primitive_ram(*series: TruncSeries) -> int:
    """Denominator lcm of the exponents actually present.

    Valuations must be measured in units of a primitive parameter; the
    grid ram of a series may be coarser than what its terms need.
    """
    r = 1
    for s in series:
        for e in s.terms:
            r = math.lcm(r, e.denominator)
    return r


def _prim_ord(s: TruncSeries, ram: int) -> int | None:
    o = s.ord()
    if o is None:
        return None
    v = o * ram
    if v.denominator != 1:
        raise ValueError("exponent off the primitive grid")
    return int(v)


def branch_from_series(xs: TruncSeries, zs: TruncSeries,
                       curve_degree: int | None = None) -> BranchParam:
    """Classify a parametrized branch from its two coordinate series.

    Reads off the projective center as eps -> 0, then the kind and the
    tangent line through the center.
    """
    ram = _primitive_ram(xs, zs)
    ords = []
    for s in (xs, zs):
        if s.is_zero():
            ords.append(None)
        else:
            ords.append(s.ord())
    m = min([o for o in ords if o is not None] + [Fraction(0)])
    for s, o in zip((xs, zs), ords):
        if o is None and s._ord_floor() <= m:
            raise ValueError("increase N")
    cx = xs.coeff(m)
    cz = zs.coeff(m)
    cw = sc(1) if m == 0 else sc(0)
    center = ProjPoint(cx, cz, cw)

    if m == 0:
        alpha, beta = cx, cz
        dx = xs - alpha
        dz = zs - beta
        if dx.is_zero() and dz.is_zero():
            raise ValueError("increase N")
        ox = _prim_ord(dx, ram)
        oz = _prim_ord(dz, ram)
        if dx.is_zero() or (not dz.is_zero() and oz < ox):
            tangent = ("x", alpha)
        elif dz.is_zero():
            tangent = ("y", sc(0), beta)
        else:
            slope = (dz / dx).coeff(0)
            tangent = ("y", slope, beta - slope * alpha)
        return BranchParam(center, xs, zs, tangent, "finite", curve_degree)

    if sc_is_zero(cx):
        # center Q1: x stays finite for hyperbolic, blows up for parabolic
        if not xs.is_zero() and xs.ord() < 0:
            return BranchParam(center, xs, zs, "linf", "parabolic-at-Q1",
                               curve_degree)
        alpha = xs.coeff(0)
        return BranchParam(center, xs, zs, ("x", alpha), "hyperbolic-at-Q1",
                           curve_degree)

    i_linf = -int(m * ram)
    if i_linf >= 2:
        tangent = "linf"
    else:
        gamma = cz * sc_inv(cx)
        t0 = (zs - gamma * xs).coeff(0)
        tangent = ("y", gamma, t0)
    return BranchParam(center, xs, zs, tangent, "other-infinite", curve_degree)


def branches_at(F: MPoly, center: tuple, N: int = 16, depth: int = 8,
                tower_depth: int = 2) -> tuple[BranchParam, ...]:
    """All branches of the curve at a finite center, as BranchParam values."""
    deg = F.total_degree()
    out = []
    for lb in local_branches(F, center, N=N, depth=depth,
                             tower_depth=tower_depth):
        out.append(branch_from_series(lb.x, lb.y, curve_degree=deg))
    return tuple(out)


# ---------------------------------------------------------------------------
# predicting and transporting branch centers

def _deg_max(*ps: UniPoly) -> int | None:
    ds = [p.degree for p in ps if not p.is_zero()]
    return max(ds) if ds else None


def _deg_min(*ps: UniPoly) -> int | None:
    ds = [p.degree for p in ps if not p.is_zero()]
    return min(ds) if ds else None


def _branch_exp_bound(branch: BranchParam) -> int:
    if branch.curve_degree is not None:
        return max(1, branch.curve_degree)
    ox = branch.x.ord()
    oz = branch.z.ord()
    if ox is not None and oz is not None and ox < 0:
        return max(1, math.ceil(oz / ox))
    return 1


def predict_center(branch: BranchParam, g: MobiusMap) -> ProjPoint:
    """Image center under g, by the case table, without series arithmetic.

    Raises when no case rule decides the image; transport_branch always
    works and must agree whenever a rule applies.
    """
    a, b, c, d = g.a, g.b, g.c, g.d

    if branch.kind == "hyperbolic-at-Q1":
        if isinstance(branch.tangent, tuple) and branch.tangent[0] == "x":
            alpha = branch.tangent[1]
            ca = c.eval(alpha)
            if not sc_is_zero(ca):
                return ProjPoint(alpha, a.eval(alpha) * sc_inv(ca), 1)
            if not sc_is_zero(a.eval(alpha)):
                return Q1
    elif branch.kind == "parabolic-at-Q1":
        if g.is_shear:
            return Q1
        B = _branch_exp_bound(branch)
        hi = _deg_max(a, b)
        lo = _deg_min(c, d)
        if hi is not None and lo is not None and hi + B < lo:
            return INF_X
        hi = _deg_max(c, d)
        lo = _deg_min(a, b)
        if lo is not None and (hi is None or hi + B < lo):
            return Q1
    elif branch.kind == "finite":
        alpha, beta = branch.center.affine()
        if (sc_is_zero(c.eval(alpha)) and sc_is_zero(d.eval(alpha))
                and not sc_is_zero(a.eval(alpha))
                and not sc_is_zero(a.eval(alpha) * beta + b.eval(alpha))):
            return Q1
        den = c.eval(alpha) * beta + d.eval(alpha)
        if not sc_is_zero(den):
            num = a.eval(alpha) * beta + b.eval(alpha)
            return ProjPoint(alpha, num * sc_inv(den), 1)
    elif branch.kind == "other-infinite":
        if g.is_shear and not (branch.center == INF_X):
            return Q1
    raise ValueError("unclassified — use transport_branch")


def transport_branch(branch: BranchParam, g: MobiusMap) -> BranchParam:
    """Push the parametrization through g and re-read the center.

    The base coordinate is untouched; the fibre series becomes
    (a(x) z + b(x)) / (c(x) z + d(x)) evaluated on the branch.
    """
    xs, zs = branch.x, branch.z
    av = g.a.eval(xs)
    bv = g.b.eval(xs)
    cv = g.c.eval(xs)
    dv = g.d.eval(xs)
    num = av * zs + bv
    den = cv * zs + dv
    if den.is_zero():
        raise ValueError("increase N")
    z2 = num / den
    return branch_from_series(xs, z2, curve_degree=branch.curve_degree)


# ---------------------------------------------------------------------------
# silver / blue classification

@dataclass(frozen=True)
class BranchColor:
    """color is silver or blue; refinement is violet, green, or none.

    Violet refines blue (smooth branch folding against its axis); green
    collects the silver branches on the axis x = 0 together with the
    singular blue branches.
    """

    color: str
    refinement: str

    def __post_init__(self):
        if self.color not in ("silver", "blue"):
            raise ValueError(f"unknown color {self.color!r}")
        if self.refinement not in ("violet", "green", "none"):
            raise ValueError(f"unknown refinement {self.refinement!r}")
        if self.refinement == "violet" and self.color != "blue":
            raise ValueError("violet refines blue only")


def classify_branch(F: MPoly, branch: BranchParam) -> BranchColor:
    """Color of a branch: silver when it meets its axis simply, blue when
    the axis valuation is 2 or more.

    The branch must sit away from Q1 (transport it first otherwise); its
    axis is the vertical line through a finite center, or the line at
    infinity for a branch centered there.
    """
    if branch.center == Q1:
        raise ValueError("branch centered at Q1: transport it off Q1 first")
    residual = eval_bipoly(F, branch.x, branch.z)
    if not residual.is_zero():
        raise ValueError("parametrization does not satisfy the curve; increase N")
    ram = _primitive_ram(branch.x, branch.z)

    if branch.center.is_finite():
        alpha, beta = branch.center.affine()
        dx = branch.x - alpha
        dz = branch.z - beta
        val = _prim_ord(dx, ram)
        if val is None:
            raise ValueError("branch lies inside the line; increase N")
        vz = _prim_ord(dz, ram)
        smooth = min(v for v in (val, vz) if v is not None) == 1
        on_zero_axis = sc_is_zero(alpha)
    else:
        # chart at x = infinity: coordinates (1/x, z/x)
        e = sc(1) / branch.x
        val = _prim_ord(e, ram)
        cx, cz, _ = branch.center.coords
        gamma = cz * sc_inv(cx)
        wt = branch.z / branch.x - gamma
        vz = _prim_ord(wt, ram)
        smooth = min(v for v in (val, vz) if v is not None) == 1
        on_zero_axis = False

    if val == 1:
        return BranchColor("silver", "green" if on_zero_axis else "none")
    if smooth:
        return BranchColor("blue", "violet")
    return BranchColor("blue", "green")


# ---------------------------------------------------------------------------
# shearing until the curve meets infinity only at Q1

def _critical_resultant(C: MPoly) -> UniPoly:
    vx, vz = C.vars
    R = resultant_uni(C, C.derivative(vz), vz)
    if R.is_zero():
        raise ValueError("curve has a repeated component")
    return R


def _shear_alpha_valid(C: MPoly, alpha, R: UniPoly) -> bool:
    vx, vz = C.vars
    lc = C.coeff_of(vz, C.degree_in(vz)).to_unipoly().rename(vx)
    return (not sc_is_zero(sc(alpha))
            and not sc_is_zero(lc.eval(sc(alpha)))
            and not sc_is_zero(R.eval(sc(alpha))))


def _top_is_pure_x(C: MPoly) -> bool:
    top = homog_parts(C)[0].form
    return all(e[1] == 0 for e in top.terms)


def shear_to_Q1(C: MPoly, alpha, max_iter: int = 16) -> tuple[MPoly, list[MobiusMap]]:
    """Iterate z -> (x - alpha) z until the top form is a pure x power.

    A pure-x top form means the projective closure meets the line at
    infinity only at Q1.  Each round picks a fresh valid alpha: nonzero,
    off the critical abscissae, and not a fibre-degree drop.
    """
    alpha = sc(alpha)
    cur = C
    log: list[MobiusMap] = []
    R = _critical_resultant(cur)
    if not _shear_alpha_valid(cur, alpha, R):
        raise ValueError(
            f"invalid shear abscissa {alpha!r}: zero, critical, or a fibre-degree drop")
    for _ in range(max_iter):
        if _top_is_pure_x(cur):
            return cur, log
        g = MobiusMap.shear(alpha, cur.vars[0])
        cur = apply_mobius(cur, g)
        log.append(g)
        R = _critical_resultant(cur)
        alpha = alpha + 1
        tries = 0
        while not _shear_alpha_valid(cur, alpha, R):
            alpha = alpha + 1
            tries += 1
            if tries > 1000:
                raise ValueError("no valid shear abscissa found")
    if _top_is_pure_x(cur):
        return cur, log
    raise ValueError(
        f"max_iter exceeded: {len(log)} shears applied, top form still mixed "
        f"in {cur!r}")


# ---------------------------------------------------------------------------
# movers: interpolated maps placing branches where wanted

def interpolate(points: Sequence[tuple], var: str = "x") -> UniPoly:
    """Lagrange interpolation through exact points (x_i, y_i)."""
    seen: dict = {}
    for xv, yv in points:
        xv, yv = sc(xv), sc(yv)
        if xv in seen and not sc_is_zero(seen[xv] - yv):
            raise ValueError(
                f"inconsistent constraints: two values at x = {xv!r}")
        seen[xv] = yv
    xs = list(seen)
    out = UniPoly([], var)
    for i, xi in enumerate(xs):
        num = UniPoly([1], var)
        den = sc(1)
        for j, xj in enumerate(xs):
            if i != j:
                num = num * UniPoly([-xj, 1], var)
                den = den * (xi - xj)
        out = out + num * UniPoly([seen[xi] * sc_inv(den)], var)
    return out


@dataclass(frozen=True)
class MoverConstraints:
    """What a constructed mover must do.

    singular_axes: tuples (alpha_j, (beta_j1, ...)) listing fibre values
    to throw to Q1 along each axis; fix_points: points (alpha, beta) to
    keep fixed; fix_parabolic_at_q1 keeps parabolic branches at Q1 (needs
    degree_bound for the order padding).
    """

    singular_axes: tuple = ()
    fix_points: tuple = ()
    fix_parabolic_at_q1: bool = False
    degree_bound: int | None = None


def build_mover(constraints: MoverConstraints, var: str = "x") -> MobiusMap:
    """Construct a MobiusMap meeting the constraints, verified exactly.

    On each singular axis the denominator vanishes identically while the
    numerator does not, so every listed fibre value lands at Q1; fixed
    points stay fixed; the high-order padding keeps parabolic branches at
    Q1 when asked.
    """
    axes = []
    seen_axes = set()
    for alpha, betas in constraints.singular_axes:
        alpha = sc(alpha)
        if sc_is_zero(alpha):
            raise ValueError("inconsistent constraints: axis x = 0 cannot move")
        if alpha in seen_axes:
            raise ValueError(
                f"inconsistent constraints: axis {alpha!r} listed twice")
        seen_axes.add(alpha)
        axes.append((alpha, tuple(sc(b) for b in betas)))
    fixes = []
    for alpha, beta in constraints.fix_points:
        alpha, beta = sc(alpha), sc(beta)
        if sc_is_zero(alpha):
            raise ValueError("inconsistent constraints: axis x = 0 cannot move")
        if alpha in seen_axes:
            raise ValueError(
                f"inconsistent constraints: fixed point on singular axis {alpha!r}")
        fixes.append((alpha, beta))
    if constraints.fix_parabolic_at_q1 and fixes:
        raise ValueError(
            "inconsistent constraints: point fixing and parabolic fixing "
            "are separate modes")
    if constraints.fix_parabolic_at_q1 and constraints.degree_bound is None:
        raise ValueError(
            "inconsistent constraints: parabolic fixing needs degree_bound")

    S = UniPoly([1], var)
    for alpha, _ in axes:
        S = S * UniPoly([-alpha, 1], var)

    a = UniPoly([1], var)
    b_nodes = [(sc(0), sc(0))]
    for alpha, betas in axes:
        if any(sc_is_zero(bv) for bv in betas):
            avoid = {-bv for bv in betas}
            v = sc(1)
            while any(sc_is_zero(v - w) for w in avoid):
                v = v + 1
            b_nodes.append((alpha, v))
    for alpha, _ in fixes:
        b_nodes.append((alpha, sc(0)))
    b = interpolate(b_nodes, var)

    if axes:
        c = S
        d_nodes = [(sc(0), sc(1))]
        for alpha, beta in fixes:
            d_nodes.append((alpha, sc_inv(S.eval(alpha)) - beta))
        d = S * interpolate(d_nodes, var)
    else:
        c = UniPoly([], var)
        d_nodes = [(sc(0), sc(1))]
        for alpha, _ in fixes:
            d_nodes.append((alpha, sc(1)))
        d = interpolate(d_nodes, var)

    if constraints.fix_parabolic_at_q1:
        B = max(1, constraints.degree_bound)
        hi = _deg_max(c, d)
        K = (hi if hi is not None else 0) + B + 1
        pad = None
        for t in range(1, 65):
            xa = a + UniPoly([0] * K + [t], var)
            xb = b + UniPoly([0] * K + [t], var)
            if _mover_errors(xa, xb, c, d, axes, fixes, True, B) == []:
                pad = (xa, xb)
                break
        if pad is None:
            raise ValueError(
                "inconsistent constraints: no padding keeps every condition")
        a, b = pad

    B = constraints.degree_bound if constraints.degree_bound is not None else 1
    errors = _mover_errors(a, b, c, d, axes, fixes,
                           constraints.fix_parabolic_at_q1, max(1, B))
    if errors:
        raise ValueError("inconsistent constraints: " + "; ".join(errors))
    return MobiusMap(a, b, c, d, var)


def _mover_errors(a, b, c, d, axes, fixes, parabolic, B) -> list[str]:
    errs = []
    if not sc_is_zero(b.constant()):
        errs.append("b(0) != 0")
    if sc_is_zero(a.constant() * d.constant()):
        errs.append("a(0) d(0) = 0")
    if (a * d - b * c).is_zero():
        errs.append("determinant identically zero")
    for alpha, betas in axes:
        if not sc_is_zero(c.eval(alpha)):
            errs.append(f"c({alpha!r}) != 0")
        if not sc_is_zero(d.eval(alpha)):
            errs.append(f"d({alpha!r}) != 0")
        av = a.eval(alpha)
        if sc_is_zero(av):
            errs.append(f"a({alpha!r}) = 0")
        for beta in betas:
            if sc_is_zero(b.eval(alpha) + av * beta):
                errs.append(f"numerator vanishes at ({alpha!r}, {beta!r})")
    for alpha, beta in fixes:
        den = c.eval(alpha) * beta + d.eval(alpha)
        if sc_is_zero(den):
            errs.append(f"fixed point ({alpha!r}, {beta!r}) hits the pole")
        elif not sc_is_zero(a.eval(alpha) * beta + b.eval(alpha) - beta * den):
            errs.append(f"point ({alpha!r}, {beta!r}) not fixed")
    if parabolic:
        hi = _deg_max(c, d)
        lo = _deg_min(a, b)
        if lo is None or (hi is not None and hi + B >= lo):
            errs.append("order condition for parabolic fixing fails")
    return errs


# ---------------------------------------------------------------------------
# isolating a silver branch at its own fibre value

def _fiber_multiplicity(C: MPoly, alpha, beta) -> int:
    fib = _fiber(C, alpha)
    if fib.is_zero():
        raise ValueError("fibre is a component of the curve")
    mult = 0
    cur = fib
    while not cur.is_zero():
        q, rem = _synth_div(cur, sc(beta))
        if not sc_is_zero(rem):
            break
        mult += 1
        cur = q
    return mult


def isolate_branch(C: MPoly, branch: BranchParam,
                   max_iter: int | None = None) -> tuple[MPoly, list[MobiusMap]]:
    """Move a silver branch until it is alone over its center.

    Each round applies z -> (z - beta)/(x - alpha) - beta/alpha, which
    separates sheets by one series order; the loop stops when the fibre
    value at the transported center is simple.
    """
    if not branch.center.is_finite():
        raise ValueError("isolate_branch needs a branch at a finite center")
    alpha, beta = branch.center.affine()
    if sc_is_zero(alpha):
        raise ValueError("isolate_branch cannot work on the axis x = 0")
    ram = _primitive_ram(branch.x, branch.z)
    v = _prim_ord(branch.x - alpha, ram)
    if v != 1:
        raise ValueError("branch not silver")
    bound = max_iter if max_iter is not None else 2 * int(branch.x.order)
    cur = C
    br = branch
    log: list[MobiusMap] = []
    while True:
        alpha, beta = br.center.affine()
        if _fiber_multiplicity(cur, alpha, beta) == 1:
            return cur, log
        if len(log) >= bound:
            raise ValueError(
                f"max_iter exceeded: {len(log)} rounds did not isolate")
        var = cur.vars[0]
        # z -> (z - beta)/(x - alpha) - beta/alpha over common denominator
        g = MobiusMap(UniPoly.const(alpha, var), UniPoly([0, -beta], var),
                      UniPoly([], var),
                      UniPoly([-alpha * alpha, alpha], var), var)
        cur = apply_mobius(cur, g)
        br = transport_branch(br, g)
        log.append(g)


# ---------------------------------------------------------------------------
# uniformity of colors along an axis

@dataclass(frozen=True)
class AxisBranch:
    """One branch on the inspected axis: where it sits and its color."""

    fiber_value: Scalar
    color: str
    conjugates: int = 1


@dataclass(frozen=True)
class UniformityReport:
    axis: object
    verdict: str
    branches: tuple[AxisBranch, ...]
    assumption: str

    @property
    def falsification_witness(self) -> bool:
        return self.verdict == "MIXED"


_UNIFORMITY_NOTE = ("sheet transitivity of the closure is assumed, "
                    "not verified")


def uniformity_check(F: MPoly, axis, N: int = 16,
                     tower_depth: int = 2) -> UniformityReport:
    """Colors of every branch along one axis of a presented curve.

    axis is ("x", alpha) or "linf".  Returns uniform-silver, uniform-blue,
    or MIXED; a MIXED verdict on a presented curve contradicts the assumed
    transitivity, so the report flags it as a falsification witness.
    """
    rep = presentation_check(F)
    if not rep.passed:
        bad = ", ".join(c.name for c in rep.checks if not c.passed)
        raise ValueError(f"curve is not presented (failing {bad})")

    entries: list[AxisBranch] = []
    if axis == "linf":
        m = F.total_degree()
        u = _dehom(homog_parts(F)[0].form, m)
        G = _infinity_chart(F)
        for cl in root_classes(u, tower_depth):
            if cl.multiplicity == 1:
                entries.append(AxisBranch(cl.value, "silver", cl.conjugates))
                continue
            for q, sheets in _branch_rams(G, cl, N, tower_depth):
                entries.append(AxisBranch(
                    cl.value, "silver" if q == 1 else "blue",
                    cl.conjugates * sheets))
    elif isinstance(axis, tuple) and axis[0] == "x":
        alpha = sc(axis[1])
        fib = _fiber(F, alpha)
        for cl in root_classes(fib, tower_depth):
            if cl.multiplicity == 1:
                entries.append(AxisBranch(cl.value, "silver", cl.conjugates))
                continue
            for q, sheets in _branch_rams(F, cl, N, tower_depth, alpha):
                entries.append(AxisBranch(
                    cl.value, "silver" if q == 1 else "blue",
                    cl.conjugates * sheets))
    else:
        raise ValueError(f"unknown axis spec: {axis!r}")

    colors = {e.color for e in entries}
    if colors == {"silver"}:
        verdict = "uniform-silver"
    elif colors == {"blue"}:
        verdict = "uniform-blue"
    else:
        verdict = "MIXED"
    return UniformityReport(axis, verdict, tuple(entries), _UNIFORMITY_NOTE)


def _branch_rams(F: MPoly, cl, N: int, tower_depth: int,
                 alpha=None) -> list[tuple[int, int]]:
    """(ramification, sheet count) of each branch at one fibre root class."""
    def run(beta):
        ctr = (sc(0) if alpha is None else alpha, beta)
        return [(lb.ram_exp, lb.sheets)
                for lb in local_branches(F, ctr, N=N, tower_depth=tower_depth)]

    if cl.modulus is None or cl.modulus.degree <= 2:
        return run(cl.value)
    out = []
    for _, res in split_cases(cl.modulus, run):
        out.extend(res)
    return out


def _infinity_chart(F: MPoly) -> MPoly:
    """The curve in the chart (e, zt) = (1/x, z/x) at the base's infinity."""
    vx, vz = F.vars
    m = F.total_degree()
    vars2 = ("e", "zt")
    terms = {}
    for (i, j), ccoef in F.terms.items():
        key = (m - i - j, j)
        terms[key] = terms.get(key, sc(0)) + ccoef
    return MPoly(terms, vars2)
