"""Truncated formal series and Newton-polygon machinery.

Series with rational exponents on a fixed ramification grid, two lifting
schemes for power-series roots (one term per step, and quadratically
converging), fiberwise factorization of a curve into series sheets with a
verified product identity, Newton polygons, and local branch expansion at
a point of a curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import (
    ExtScalar,
    ExtensionBudgetError,
    MPoly,
    UniPoly,
    RootClass,
    root_classes,
    sc,
    sc_inv,
    sc_is_zero,
)


class TruncSeries:
    """Truncated series: exponent -> coefficient on the grid (1/ram)Z.

    order is the largest exponent still carried; the series is known modulo
    x**(order + 1/ram).  Exponents may be negative.  Immutable by
    convention (operations return new instances).
    """

    __slots__ = ("terms", "order", "ram")

    def __init__(self, terms: dict, order, ram: int = 1):
        order = Fraction(order)
        if ram < 1:
            raise ValueError("ramification must be positive")
        if (order * ram).denominator != 1:
            raise ValueError("truncation order must sit on the exponent grid")
        clean = {}
        for e, c in terms.items():
            e = Fraction(e)
            if (e * ram).denominator != 1:
                raise ValueError(f"exponent {e} off the 1/{ram} grid")
            c = sc(c) if isinstance(c, int) else c
            if e <= order and not sc_is_zero(c):
                clean[e] = c
        self.terms = clean
        self.order = order
        self.ram = ram

    # -- constructors

    @classmethod
    def const(cls, c, order, ram: int = 1) -> "TruncSeries":
        return cls({Fraction(0): c}, order, ram)

    @classmethod
    def zero(cls, order, ram: int = 1) -> "TruncSeries":
        return cls({}, order, ram)

    @classmethod
    def x_pow(cls, e, order, ram: int = 1) -> "TruncSeries":
        return cls({Fraction(e): Fraction(1)}, order, ram)

    @classmethod
    def from_poly(cls, p: UniPoly, order, ram: int = 1) -> "TruncSeries":
        return cls({Fraction(i): c for i, c in enumerate(p.coeffs)}, order, ram)

    # -- structure

    def is_zero(self) -> bool:
        return not self.terms

    def ord(self) -> Fraction | None:
        """Smallest exponent carried, None for the (truncated) zero series."""
        if not self.terms:
            return None
        return min(self.terms)

    def _ord_floor(self) -> Fraction:
        # smallest exponent this series could still contain
        if self.terms:
            return min(self.terms)
        return self.order + Fraction(1, self.ram)

    def coeff(self, e) -> Fraction | ExtScalar:
        return self.terms.get(Fraction(e), Fraction(0))

    def leading(self):
        o = self.ord()
        if o is None:
            raise ValueError("zero series has no leading term")
        return o, self.terms[o]

    def truncate(self, order) -> "TruncSeries":
        return TruncSeries(self.terms, min(Fraction(order), self.order), self.ram)

    def extended(self, order) -> "TruncSeries":
        """Raise the truncation order (asserts the extra terms are zero)."""
        return TruncSeries(self.terms, Fraction(order), self.ram)

    def shift(self, e) -> "TruncSeries":
        e = Fraction(e)
        r = math.lcm(self.ram, e.denominator)
        return TruncSeries({k + e: c for k, c in self.terms.items()},
                           self.order + e, r)

    def regrid(self, ram: int) -> "TruncSeries":
        r = math.lcm(self.ram, ram)
        return TruncSeries(self.terms, self.order, r)

    def map_coeffs(self, fn) -> "TruncSeries":
        return TruncSeries({e: fn(c) for e, c in self.terms.items()},
                           self.order, self.ram)

    # -- arithmetic

    def _coerce(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            return TruncSeries.const(other, self.order, self.ram)
        if isinstance(other, TruncSeries):
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = math.lcm(self.ram, o.ram)
        order = min(self.order, o.order)
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return TruncSeries(out, order, r)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries({e: -c for e, c in self.terms.items()}, self.order, self.ram)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = math.lcm(self.ram, o.ram)
        order = min(self._ord_floor() + o.order, o._ord_floor() + self.order)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = e1 + e2
                if e > order:
                    continue
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return TruncSeries(out, order, r)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TruncSeries":
        if n < 0:
            return self.inverse() ** (-n)
        out = TruncSeries.const(1, self.order, self.ram)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "TruncSeries":
        if self.is_zero():
            raise ZeroDivisionError("division by zero")
        v, lead = self.leading()
        lead_inv = sc_inv(lead)
        # self = lead x^v (1 + u) with ord(u) > 0; relative precision is kept
        rel = self.order - v
        u = TruncSeries({e - v: c * lead_inv for e, c in self.terms.items() if e != v},
                        rel, self.ram)
        acc = TruncSeries.const(1, rel, self.ram)
        term = TruncSeries.const(1, rel, self.ram)
        step = u.ord()
        if step is not None:
            k = 0
            while k * step <= rel:
                term = term * (-u)
                if term.is_zero():
                    break
                acc = acc + term
                k += 1
        return TruncSeries({e - v: c * lead_inv for e, c in acc.terms.items()},
                           rel - v, math.lcm(self.ram, Fraction(v).denominator))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    # -- comparisons

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            other = TruncSeries.const(other, self.order, self.ram)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.terms == other.terms and self.order == other.order

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.order))

    def agrees_with(self, other: "TruncSeries", below=None) -> bool:
        """Coefficientwise equality below the given exponent bound.

        Defaults to the shared knowledge bound min(order) + 1/ram.
        """
        if below is None:
            below = min(self.order, other.order) + Fraction(1, math.lcm(self.ram, other.ram))
        es = {e for e in self.terms if e < below} | {e for e in other.terms if e < below}
        return all(self.coeff(e) == other.coeff(e) for e in es)

    def __repr__(self):
        if not self.terms:
            return f"O(x^{self.order + Fraction(1, self.ram)})"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if e == 0:
                mono = ""
            elif e == 1:
                mono = "x"
            elif e.denominator == 1:
                mono = f"x^{e}"
            else:
                mono = f"x^({e})"
            if mono == "":
                body = str(c)
            elif c == 1:
                body = mono
            elif c == -1:
                body = f"-{mono}"
            else:
                body = f"{c}*{mono}" if not isinstance(c, ExtScalar) else f"({c!r})*{mono}"
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            if p.startswith("-"):
                out += " - " + p[1:]
            else:
                out += " + " + p
        tail = self.order + Fraction(1, self.ram)
        return out + f" + O(x^{tail})"


def series_arith(a: TruncSeries, b: TruncSeries, op: str) -> TruncSeries:
    """Dispatcher for add, mul, div on truncated series."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op: {op}")


# ---------------------------------------------------------------------------
# evaluation helpers

def eval_bipoly(F: MPoly, sx: TruncSeries, sy: TruncSeries) -> TruncSeries:
    """Evaluate a bivariate polynomial at a pair of series.

    F's first variable is the base, second the fiber.
    """
    xv, yv = F.vars
    acc = None
    d = F.degree_in(yv)
    for k in range(d, -1, -1):
        ck = F.coeff_of(yv, k).to_unipoly()
        cs = ck.eval(sx)
        if not isinstance(cs, TruncSeries):
            cs = TruncSeries.const(cs, sx.order, sx.ram)
        acc = cs if acc is None else acc * sy + cs
    if acc is None:
        return TruncSeries.zero(sx.order, sx.ram)
    return acc


# ---------------------------------------------------------------------------
# lifting

def newton_lift(G: MPoly, y0, N: int, scheme: str = "raphson") -> TruncSeries:
    """Series root of G(x, y) = 0 through (0, y0), to order N inclusive.

    scheme "successive" adds one term per step; "raphson" doubles the
    known order each step.  Both need y0 to be a simple root of G(0, y).
    """
    xv, yv = G.vars
    y0 = sc(y0) if isinstance(y0, int) else y0
    g0 = G.subst({xv: 0, yv: y0})
    gy = G.derivative(yv).subst({xv: 0, yv: y0})
    if not sc_is_zero(g0) or sc_is_zero(gy):
        raise ValueError("simple-root precondition violated")
    N = int(N)
    if scheme == "successive":
        return _lift_successive(G, y0, gy, N)
    if scheme == "raphson":
        return _lift_raphson(G, y0, N)
    raise ValueError(f"unknown scheme: {scheme}")


def _lift_successive(G: MPoly, y0, gy, N: int) -> TruncSeries:
    xv, yv = G.vars
    g1_inv = sc_inv(gy)
    terms = {Fraction(0): y0}
    for k in range(1, N + 1):
        sx = TruncSeries.x_pow(1, k)
        s = TruncSeries(terms, k)
        r = eval_bipoly(G, sx, s).coeff(k)
        if not sc_is_zero(r):
            terms[Fraction(k)] = -r * g1_inv
    return TruncSeries(terms, N)


def _lift_raphson(G: MPoly, y0, N: int) -> TruncSeries:
    xv, yv = G.vars
    Gy = G.derivative(yv)
    s = TruncSeries.const(y0, N)
    sx = TruncSeries.x_pow(1, N)
    known = 1
    while known < N + 1:
        s = s - eval_bipoly(G, sx, s) / eval_bipoly(Gy, sx, s)
        s = s.extended(N)
        known *= 2
    return s


# ---------------------------------------------------------------------------
# fiberwise factorization

@dataclass(frozen=True)
class FibreFactorization:
    """Sheets of a curve over the base line, with a verified product identity.

    sheets[j](0) = base_points[j], and prod(y - sheet_j) matches the monic
    curve polynomial modulo x**(order + 1/ram).
    """

    curve: MPoly
    sheets: tuple[TruncSeries, ...]
    base_points: tuple
    order: Fraction
    ram: int


def factor_fibrewise(F: MPoly, N: int = 16, scheme: str = "raphson",
                     tower_depth: int = 2) -> FibreFactorization:
    """Factor the fiber polynomial into series sheets.

    Needs F monic in the fiber variable with fiber degree equal to total
    degree, and the fiber over x=0 squarefree.  One algebraic extension is
    adjoined automatically when the fiber roots demand it; anything deeper
    raises ExtensionBudgetError naming the blocking factor.
    """
    xv, yv = F.vars
    m = F.degree_in(yv)
    if m < 1 or m != F.total_degree():
        raise ValueError("fiber degree must match total degree")
    lcy = F.coeff_of(yv, m)
    if not lcy.is_constant():
        raise ValueError("fiber degree must match total degree")
    F = F * sc_inv(lcy.constant())
    f0 = F.subst({xv: 0}).to_unipoly().rename(yv)
    if f0.degree != m or f0.gcd(f0.derivative()).degree > 0:
        raise ValueError("fiber at x=0 is not squarefree of full degree; "
                         "the curve is not presented along this axis")
    classes = root_classes(f0, tower_depth=tower_depth)
    mods = {c.modulus.coeffs for c in classes if c.modulus is not None}
    for c in classes:
        if c.conjugates > 1:
            raise ExtensionBudgetError(repr(c.modulus))
    if len(mods) > 1:
        blocking = sorted(mods, key=len)[-1]
        raise ExtensionBudgetError(repr(UniPoly(blocking, "u")))
    points = [c.value for c in classes]
    sheets = tuple(newton_lift(F, a, N, scheme) for a in points)
    fact = FibreFactorization(F, sheets, tuple(points), Fraction(N), 1)
    if not verify_product(fact):
        raise AssertionError("sheet product identity failed")
    if not verify_vieta(fact):
        raise AssertionError("Vieta identities failed")
    return fact


def verify_product(fact: FibreFactorization) -> bool:
    """prod(y - sheet_j) == F coefficientwise modulo x**(order + 1/ram)."""
    F = fact.curve
    xv, yv = F.vars
    m = F.degree_in(yv)
    prod = UniPoly([Fraction(1)], yv)
    for s in fact.sheets:
        prod = prod * UniPoly([-s, Fraction(1)], yv)
    bound = fact.order + Fraction(1, fact.ram)
    for k in range(m + 1):
        want = TruncSeries.from_poly(F.coeff_of(yv, k).to_unipoly(), fact.order, fact.ram)
        got = prod[k]
        if not isinstance(got, TruncSeries):
            got = TruncSeries.const(got, fact.order, fact.ram)
        if not got.agrees_with(want, below=bound):
            return False
    return True


def verify_vieta(fact: FibreFactorization) -> bool:
    """Elementary symmetric functions of the sheets match the coefficients.

    e_k(sheets) == (-1)^k * coeff of y^(m-k), checked per truncation order.
    Built by the one-root-at-a-time recurrence, a different combination
    path from the product expansion above.
    """
    F = fact.curve
    xv, yv = F.vars
    m = F.degree_in(yv)
    bound = fact.order + Fraction(1, fact.ram)
    e = [TruncSeries.const(1, fact.order, fact.ram)] + [
        TruncSeries.zero(fact.order, fact.ram) for _ in range(m)]
    for s in fact.sheets:
        for k in range(m, 0, -1):
            e[k] = e[k] + s * e[k - 1]
    for k in range(1, m + 1):
        want = TruncSeries.from_poly(F.coeff_of(yv, m - k).to_unipoly(),
                                     fact.order, fact.ram)
        got = e[k] * Fraction((-1) ** k)
        if not got.agrees_with(want, below=bound):
            return False
    return True


# ---------------------------------------------------------------------------
# Newton polygon

@dataclass(frozen=True)
class PolygonSegment:
    """One lower-hull edge: leading exponent, vertical drop, edge polynomial."""

    slope: Fraction
    lattice_length: int
    edge_poly: UniPoly


@dataclass(frozen=True)
class NewtonPolygon:
    support: frozenset
    segments: tuple[PolygonSegment, ...]


def _lower_hull_segments(G: MPoly) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Edges of the lower-left hull of the support, top-left to bottom-right.

    Points are (i, j) = (base exponent, fiber exponent); returned edges have
    j strictly decreasing and i strictly increasing.
    """
    pts = sorted(G.terms.keys())
    if not pts:
        return []
    # start: minimal i, then minimal j among those; walking down-right
    start = min(pts, key=lambda p: (p[0], p[1]))
    end = min(pts, key=lambda p: (p[1], p[0]))
    hull = [start]
    cur = start
    while cur != end:
        best = None
        best_slope = None
        for p in pts:
            if p[1] >= cur[1] or p[0] < cur[0]:
                continue
            slope = Fraction(p[0] - cur[0], cur[1] - p[1])
            key = (slope, -(cur[1] - p[1]))
            if best is None or key < best_slope:
                best = p
                best_slope = key
        if best is None:
            break
        hull.append(best)
        cur = best
    return list(zip(hull, hull[1:]))


def newton_polygon(F: MPoly, center) -> NewtonPolygon:
    """Newton polygon of F at a point of the curve.

    Slopes are the candidate leading exponents mu with fiber ~ c * base**mu;
    lattice_length is the vertical drop of the edge; edge_poly's nonzero
    roots are the candidate leading coefficients c (in the variable
    z = c**(1/q) grouping when mu = p/q is ramified, the polynomial is in
    z**q).
    """
    xv, yv = F.vars
    a, b = center
    val = F.subst({xv: a, yv: b})
    if not sc_is_zero(val):
        raise ValueError("center not on curve")
    G = F
    if not sc_is_zero(sc(a) if isinstance(a, int) else a):
        G = G.subst_poly(xv, MPoly.var(xv, F.vars) + a)
    if not sc_is_zero(sc(b) if isinstance(b, int) else b):
        G = G.subst_poly(yv, MPoly.var(yv, F.vars) + b)
    segs = []
    for (i1, j1), (i2, j2) in _lower_hull_segments(G):
        mu = Fraction(i2 - i1, j1 - j2)
        q = mu.denominator
        drop = j1 - j2
        coeffs = [Fraction(0)] * (drop // q + 1)
        for (i, j), c in G.terms.items():
            if j2 <= j <= j1 and Fraction(i - i1, 1) == mu * (j1 - j):
                coeffs[(j - j2) // q] = c
        segs.append(PolygonSegment(mu, drop, UniPoly(coeffs, "z")))
    return NewtonPolygon(frozenset(G.terms.keys()), tuple(segs))


# ---------------------------------------------------------------------------
# local branches

@dataclass(frozen=True)
class LocalBranch:
    """A local analytic branch at a curve point.

    x(eps) = center_x + eps**ram_exp and y(eps) the matching fiber series;
    sheets is how many fiber sheets merge along this branch (ramification
    times conjugate count); resolved is False when the recursion depth ran
    out before the branch separated.
    """

    x: TruncSeries
    y: TruncSeries
    ram_exp: int
    sheets: int
    resolved: bool


def local_branches(F: MPoly, center, N: int = 16, depth: int = 8,
                   tower_depth: int = 2) -> list[LocalBranch]:
    """Branches of the curve at a finite center, as series in a parameter.

    The parameter eps satisfies base = center_x + eps**ram_exp; every local
    branch is produced, counted with ramification via the sheets field.
    """
    xv, yv = F.vars
    a, b = center
    val = F.subst({xv: a, yv: b})
    if not sc_is_zero(val):
        raise ValueError("center not on curve")
    G = F.subst_poly(xv, MPoly.var(xv, F.vars) + a)
    G = G.subst_poly(yv, MPoly.var(yv, F.vars) + b)
    out = []
    for q, ys, sheets, resolved in _puiseux_branches(G, N, depth, tower_depth):
        M = N * q
        sx = TruncSeries.x_pow(q, M) + a
        sy = ys.truncate(M) + b
        out.append(LocalBranch(sx, sy, q, sheets, resolved))
    return out


def _root_representative(w0, q: int, tower_depth: int):
    """A q-th root of w0, preferring rational values.

    Conjugate choices parametrize the same branch (reparametrize the branch
    parameter by a root of unity), so any representative serves.
    """
    if q == 1:
        return w0
    if isinstance(w0, ExtScalar):
        raise ExtensionBudgetError(f"z^{q} - ({w0!r})")
    zq = UniPoly([Fraction(0)] * q + [Fraction(1)], "z") - UniPoly.const(w0, "z")
    classes = root_classes(zq, tower_depth=tower_depth)
    rational = [c for c in classes if isinstance(c.value, Fraction)]
    if rational:
        return rational[0].value
    return classes[0].value


def _puiseux_branches(G: MPoly, N: int, depth: int, tower_depth: int):
    """Branches of G = 0 at the origin: (q, y-series in t, sheets, resolved).

    x = t**q; the y series has integer exponents in t, computed so that the
    parametrization satisfies G modulo t**(N*q + 1).
    """
    xv, yv = G.vars
    # strip fiber-line factors y^k (horizontal component through the center)
    k = min(e[1] for e in G.terms)
    if k > 0:
        y_m = MPoly.var(yv, G.vars)
        for _ in range(k):
            G = G.exact_div(y_m)
            yield 1, TruncSeries.zero(N), 1, True
    if min(e[0] for e in G.terms) > 0:
        raise ValueError("base line is a component of the curve")
    if not any(e[1] > 0 for e in G.terms):
        return
    for (i1, j1), (i2, j2) in _lower_hull_segments(G):
        mu = Fraction(i2 - i1, j1 - j2)
        if mu <= 0:
            continue
        p, q = mu.numerator, mu.denominator
        drop = j1 - j2
        coeffs = [Fraction(0)] * (drop // q + 1)
        for (i, j), c in G.terms.items():
            if j2 <= j <= j1 and Fraction(i - i1, 1) == mu * (j1 - j):
                coeffs[(j - j2) // q] = c
        phi = UniPoly(coeffs, "w")
        for cls in root_classes(phi, tower_depth=tower_depth):
            if sc_is_zero(cls.value):
                continue
            c = _root_representative(cls.value, q, tower_depth)
            n_sheets = q * cls.multiplicity * cls.conjugates
            H = _edge_substitute(G, q, p, c)
            if cls.multiplicity == 1:
                z = newton_lift(H, 0, max(N * q, 1))
                yield q, (c + z).shift(p), q * cls.conjugates, True
            elif depth <= 0:
                yield q, TruncSeries({Fraction(p): c}, N * q), n_sheets, False
            else:
                for q2, z2, sheets2, res2 in _puiseux_branches(
                        H, max(N * q, 1), depth - 1, tower_depth):
                    # inner parameter s with t = s^q2, so x = s^(q q2)
                    scaled = TruncSeries({e * q2: v for e, v in z2.terms.items()},
                                         z2.order * q2)
                    yield q * q2, (c + scaled).shift(p * q2), \
                        sheets2 * q * cls.conjugates, res2


def _edge_substitute(G: MPoly, q: int, p: int, c) -> MPoly:
    """H(t, z) = G(t**q, t**p (c + z)) / t**e with the full t-power stripped."""
    out: dict = {}
    for (i, j), coeff in G.terms.items():
        # (t^p (c+z))^j = t^(pj) sum_k C(j,k) c^(j-k) z^k
        base_t = i * q + p * j
        cj = [coeff]
        for _ in range(j):
            cj = _binom_step(cj, c)
        for k, ck in enumerate(cj):
            key = (base_t, k)
            out[key] = out.get(key, Fraction(0)) + ck
    H = MPoly(out, G.vars)
    if H.is_zero():
        raise ValueError("edge substitution collapsed")
    tmin = min(e[0] for e in H.terms)
    if tmin > 0:
        H = MPoly({(e[0] - tmin, e[1]): v for e, v in H.terms.items()}, G.vars)
    return H


def _binom_step(row, c):
    # multiply the coefficient row (in z) by (c + z)
    out = [Fraction(0)] * (len(row) + 1)
    for k, v in enumerate(row):
        out[k] = out[k] + v * c
        out[k + 1] = out[k + 1] + v
    return out


def branch_mult(F: MPoly, branch: LocalBranch, line) -> int:
    """Intersection multiplicity of a branch with a line.

    line is ("x", alpha) for a vertical axis, ("y", k, c) for y = k x + c,
    or "linf" for the line at infinity (only finite branches here, so that
    always raises).  The parametrization must satisfy the curve to
    truncation; insufficient truncation raises "increase N".
    """
    residual = eval_bipoly(F, branch.x, branch.y)
    if not residual.is_zero():
        raise ValueError("parametrization does not satisfy the curve; increase N")
    if line == "linf":
        raise ValueError("finite branch never meets the line at infinity")
    if line[0] == "x":
        s = branch.x - line[1]
    elif line[0] == "y":
        s = branch.y - (branch.x * line[1] + line[2])
    else:
        raise ValueError(f"unknown line spec: {line!r}")
    o = s.ord()
    if o is None:
        raise ValueError("branch lies inside the line; increase N")
    if o > s.order:
        raise ValueError("increase N")
    if o.denominator != 1:
        raise ValueError("branch parameter is not on an integer grid")
    return int(o)
