"""Exact scalar and polynomial arithmetic.

Rationals, one-step algebraic extensions with dynamic splitting (compute
in Q[u]/(q) as if it were a field, split q whenever a gcd exposes a zero
divisor), dense univariate polynomials over generic exact scalars, sparse
multivariate polynomials, subresultant pseudo-remainder resultants,
squarefree decomposition and rational root extraction.

Nothing here touches floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class ExtensionBudgetError(Exception):
    """A computation needs a field extension beyond the allowed tower depth."""

    def __init__(self, blocking: str, depth_needed: int = 3):
        self.blocking = blocking
        self.depth_needed = depth_needed
        super().__init__(
            f"extension tower budget exceeded: adjoining a root of {blocking} "
            f"needs tower depth {depth_needed}"
        )


class SplitRequired(Exception):
    """Raised when inverting a zero divisor in Q[u]/(q).

    Carries coprime factors of the modulus; rerun the computation in each
    factor ring (see split_cases).
    """

    def __init__(self, modulus: tuple[Fraction, ...], factors: tuple[tuple[Fraction, ...], ...]):
        self.modulus = modulus
        self.factors = factors
        super().__init__("zero divisor in quotient ring, modulus splits")

    def factor_polys(self, var: str = "u") -> list["UniPoly"]:
        return [UniPoly(f, var) for f in self.factors]


# ---------------------------------------------------------------------------
# tuple-level polynomial helpers over Fraction (low-to-high coefficients)

def _trim(c: list[Fraction]) -> tuple[Fraction, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _pneg(a):
    return tuple(-x for x in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pscale(a, s):
    if s == 0:
        return ()
    return tuple(x * s for x in a)


def _pdivmod(a, b):
    # b nonzero; works over the field Q
    if not b:
        raise ZeroDivisionError("division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lb = b[-1]
    while len(r) >= len(b) and any(x != 0 for x in r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) < len(b):
            break
        f = r[-1] / lb
        k = len(r) - len(b)
        q[k] = f
        for j, y in enumerate(b):
            r[k + j] -= f * y
        r.pop()
    return _trim(q), _trim(r)


def _pmod(a, b):
    return _pdivmod(a, b)[1]


def _pmonic(a):
    if not a:
        return a
    lc = a[-1]
    return tuple(x / lc for x in a)


def _pgcd(a, b):
    while b:
        a, b = b, _pmod(a, b)
    return _pmonic(a)


def _pxgcd(a, b):
    """Extended Euclid over Q: returns monic g and s,t with s*a + t*b = g."""
    r0, r1 = a, b
    s0, s1 = (Fraction(1),), ()
    t0, t1 = (), (Fraction(1),)
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _padd(s0, _pneg(_pmul(q, s1)))
        t0, t1 = t1, _padd(t0, _pneg(_pmul(q, t1)))
    if not r0:
        return (), s0, t0
    lc = r0[-1]
    inv = 1 / lc
    return _pmonic(r0), _pscale(s0, inv), _pscale(t0, inv)


# ---------------------------------------------------------------------------
# scalars

class ExtScalar:
    """Element of Q[u]/(q) for a monic squarefree q over Q.

    Arithmetic demands identical moduli.  Inverting a zero divisor raises
    SplitRequired carrying the coprime modulus factors.
    """

    __slots__ = ("rep", "mod")

    def __init__(self, rep, mod):
        mod = tuple(Fraction(c) for c in mod)
        if len(mod) < 3:
            raise ValueError("extension modulus must have degree >= 2")
        if mod[-1] != 1:
            raise ValueError("extension modulus must be monic")
        rep = tuple(Fraction(c) for c in rep)
        if len(rep) >= len(mod):
            rep = _pmod(rep, mod)
        else:
            rep = _trim(list(rep))
        self.rep = rep
        self.mod = mod

    @classmethod
    def generator(cls, modulus: "UniPoly") -> "ExtScalar":
        m = modulus.monic()
        if m.degree < 2:
            raise ValueError("extension modulus must have degree >= 2")
        if m.gcd(m.derivative()).degree > 0:
            raise ValueError("extension modulus must be squarefree")
        return cls((Fraction(0), Fraction(1)), m.coeffs)

    # -- predicates

    def is_zero(self) -> bool:
        return not self.rep

    def is_rational(self) -> bool:
        return len(self.rep) <= 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational element")
        return self.rep[0] if self.rep else Fraction(0)

    # -- coercion

    def _coerce(self, other):
        if isinstance(other, ExtScalar):
            if other.mod != self.mod:
                raise ValueError("extension moduli differ")
            return other
        if isinstance(other, (int, Fraction)):
            return ExtScalar((Fraction(other),), self.mod)
        return None

    # -- arithmetic

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtScalar(_padd(self.rep, o.rep), self.mod)

    __radd__ = __add__

    def __neg__(self):
        return ExtScalar(_pneg(self.rep), self.mod)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtScalar(_padd(self.rep, _pneg(o.rep)), self.mod)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtScalar(_padd(o.rep, _pneg(self.rep)), self.mod)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtScalar(_pmod(_pmul(self.rep, o.rep), self.mod), self.mod)

    __rmul__ = __mul__

    def inverse(self) -> "ExtScalar":
        if self.is_zero():
            raise ZeroDivisionError("division by zero")
        g, s, _ = _pxgcd(self.rep, self.mod)
        if len(g) == 1:
            # rep invertible: s * rep = 1 mod q (g already scaled monic = 1)
            return ExtScalar(_pmod(s, self.mod), self.mod)
        co, rem = _pdivmod(self.mod, g)
        assert not rem
        raise SplitRequired(self.mod, (g, _pmonic(co)))

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

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ExtScalar((Fraction(1),), self.mod)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, ExtScalar):
            return self.mod == other.mod and self.rep == other.rep
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.as_fraction() == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.as_fraction())
        return hash((self.rep, self.mod))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"({_fmt_qpoly(self.rep, 'u')}) mod ({_fmt_qpoly(self.mod, 'u')})"


@dataclass(frozen=True)
class Split:
    """Result marker: the working modulus split into coprime factors."""

    factors: tuple


def _fmt_coeff(c: Fraction) -> str:
    return str(c)


def _fmt_qpoly(coeffs, var: str) -> str:
    if not coeffs:
        return "0"
    parts = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if c == 0:
            continue
        if e == 0:
            mono = ""
        elif e == 1:
            mono = var
        else:
            mono = f"{var}^{e}"
        if mono:
            if c == 1:
                body = mono
            elif c == -1:
                body = f"-{mono}"
            else:
                body = f"{_fmt_coeff(c)}*{mono}"
        else:
            body = _fmt_coeff(c)
        parts.append(body)
    out = parts[0]
    for p in parts[1:]:
        if p.startswith("-"):
            out += " - " + p[1:]
        else:
            out += " + " + p
    return out


Scalar = Fraction | ExtScalar


def sc(v) -> Scalar:
    """Coerce an int to Fraction; pass exact scalars through."""
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, (Fraction, ExtScalar)):
        return v
    raise TypeError(f"not an exact scalar: {v!r}")


def sc_is_zero(v) -> bool:
    if isinstance(v, ExtScalar):
        return v.is_zero()
    if isinstance(v, (int, Fraction)):
        return v == 0
    # duck type: polynomial coefficients inside resultant lists
    return v.is_zero()


def sc_inv(v):
    if isinstance(v, ExtScalar):
        return v.inverse()
    v = sc(v)
    if v == 0:
        raise ZeroDivisionError("division by zero")
    return 1 / v


def sc_as_fraction(v) -> Fraction:
    if isinstance(v, ExtScalar):
        return v.as_fraction()
    return Fraction(v)


# ---------------------------------------------------------------------------
# dense univariate polynomials over generic exact scalars

class UniPoly:
    """Dense univariate polynomial, coefficients low-to-high, no trailing zeros.

    Coefficients are Fraction or ExtScalar (anything supporting exact ring
    ops works, which the resultant machinery uses).  deg 0 for constants,
    deg -1 sentinel for the zero polynomial.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs, var: str = "x"):
        cs = [sc(c) if isinstance(c, int) else c for c in coeffs]
        while cs and sc_is_zero(cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var

    @classmethod
    def const(cls, c, var: str = "x") -> "UniPoly":
        return cls([c], var)

    @classmethod
    def x(cls, var: str = "x") -> "UniPoly":
        return cls([0, 1], var)

    @classmethod
    def from_roots(cls, roots, var: str = "x") -> "UniPoly":
        p = cls([1], var)
        for r in roots:
            p = p * cls([-sc(r) if isinstance(r, int) else -r, 1], var)
        return p

    # -- structure

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def lc(self):
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def constant(self):
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def _join_var(self, other: "UniPoly") -> str:
        if self.var == other.var or other.is_constant():
            return self.var
        if self.is_constant():
            return other.var
        raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    # -- ring ops

    def __add__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            other = UniPoly([other], self.var)
        if not isinstance(other, UniPoly):
            return NotImplemented
        var = self._join_var(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[i] + other[i] for i in range(n)], var)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            other = UniPoly([other], self.var)
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            return UniPoly([c * other for c in self.coeffs], self.var)
        if not isinstance(other, UniPoly):
            return NotImplemented
        var = self._join_var(other)
        if self.is_zero() or other.is_zero():
            return UniPoly([], var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if sc_is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out, var)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = UniPoly([1], self.var)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "UniPoly":
        """Multiply by var**k."""
        if self.is_zero():
            return self
        return UniPoly([Fraction(0)] * k + list(self.coeffs), self.var)

    def divmod(self, other: "UniPoly"):
        if other.is_zero():
            raise ZeroDivisionError("division by zero")
        var = self._join_var(other)
        inv_lc = sc_inv(other.lc())
        q = [Fraction(0)] * max(self.degree - other.degree + 1, 0)
        r = list(self.coeffs)
        while True:
            while r and sc_is_zero(r[-1]):
                r.pop()
            if len(r) < len(other.coeffs):
                break
            f = r[-1] * inv_lc
            k = len(r) - len(other.coeffs)
            q[k] = f
            for j, b in enumerate(other.coeffs):
                r[k + j] = r[k + j] - f * b
            r.pop()
        return UniPoly(q, var), UniPoly(r, var)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("inexact polynomial division")
        return q

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = sc_inv(self.lc())
        return UniPoly([c * inv for c in self.coeffs], self.var)

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def derivative(self) -> "UniPoly":
        return UniPoly([self.coeffs[i] * i for i in range(1, len(self.coeffs))], self.var)

    def eval(self, v):
        """Horner evaluation; v may be any value supporting + and *."""
        if not self.coeffs:
            return Fraction(0)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * v + c
        return acc

    def compose(self, other: "UniPoly") -> "UniPoly":
        if not self.coeffs:
            return UniPoly([], other.var)
        acc = UniPoly([self.coeffs[-1]], other.var)
        for c in reversed(self.coeffs[:-1]):
            acc = acc * other + UniPoly([c], other.var)
        return acc

    def map_coeffs(self, fn) -> "UniPoly":
        return UniPoly([fn(c) for c in self.coeffs], self.var)

    def rename(self, var: str) -> "UniPoly":
        return UniPoly(self.coeffs, var)

    def has_extension_coeffs(self) -> bool:
        return any(isinstance(c, ExtScalar) for c in self.coeffs)

    # -- comparisons

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            other = UniPoly([other], self.var)
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return _fmt_qpoly(self.coeffs, self.var) if not self.has_extension_coeffs() else (
            "(" + " , ".join(repr(c) for c in self.coeffs) + f") in {self.var}")

    def to_mpoly(self, vars: tuple[str, ...]) -> "MPoly":
        i = vars.index(self.var)
        terms = {}
        for e, c in enumerate(self.coeffs):
            if sc_is_zero(c):
                continue
            exp = [0] * len(vars)
            exp[i] = e
            terms[tuple(exp)] = c
        return MPoly(terms, vars)


# ---------------------------------------------------------------------------
# squarefree decomposition, rational roots, root classes

def yun_squarefree(p: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm: monic squarefree factors with multiplicities.

    Char 0 only. Product of f**m over the output equals p up to a scalar.
    """
    if p.is_zero():
        raise ValueError("squarefree decomposition of zero")
    p = p.monic()
    if p.degree < 1:
        return []
    d = p.derivative()
    a = p.gcd(d)
    b = p.exact_div(a)
    c = d.exact_div(a)
    out = []
    i = 1
    while b.degree > 0:
        w = c - b.derivative()
        g = b.gcd(w)
        if g.degree > 0:
            out.append((g, i))
        b = b.exact_div(g)
        c = w.exact_div(g)
        i += 1
    return out


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_LIMIT = 1 << 16


def _is_probable_prime(n: int) -> bool:
    # deterministic for n < 3.3e24 with these witnesses
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """One nontrivial divisor of an odd composite n (Brent's cycle variant)."""
    c = 1
    while True:
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
        c += 1


def _factor_int(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1."""
    fac: dict[int, int] = {}
    while n % 2 == 0:
        fac[2] = fac.get(2, 0) + 1
        n //= 2
    d = 3
    while d * d <= n and d < _TRIAL_LIMIT:
        while n % d == 0:
            fac[d] = fac.get(d, 0) + 1
            n //= d
        d += 2
    if n == 1:
        return fac
    pending = [n]
    while pending:
        m = pending.pop()
        # a cofactor below _TRIAL_LIMIT^2 survived trial division, hence prime
        if m < _TRIAL_LIMIT * _TRIAL_LIMIT or _is_probable_prime(m):
            fac[m] = fac.get(m, 0) + 1
            continue
        g = _brent_rho(m)
        pending.extend((g, m // g))
    return fac


def _int_divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        return []
    divs = [1]
    for p, e in _factor_int(n).items():
        powers = []
        pk = 1
        for _ in range(e):
            pk *= p
            powers.append(pk)
        divs += [d * pk for d in divs for pk in powers]
    return sorted(divs)


def rational_roots(p: UniPoly) -> dict[Fraction, int]:
    """All rational roots with multiplicities, via the rational root test."""
    if p.is_zero():
        raise ValueError("roots of the zero polynomial")
    if p.has_extension_coeffs():
        raise ValueError("rational root test needs rational coefficients")
    roots: dict[Fraction, int] = {}
    coeffs = list(p.coeffs)
    k = 0
    while k < len(coeffs) and coeffs[k] == 0:
        k += 1
    if k > 0:
        roots[Fraction(0)] = k
        coeffs = coeffs[k:]
    if len(coeffs) <= 1:
        return roots
    den_lcm = math.lcm(*[c.denominator for c in coeffs])
    ints = [int(c * den_lcm) for c in coeffs]
    g = math.gcd(*ints)
    ints = [c // g for c in ints]
    # Cauchy bound: every root r satisfies |r| <= 1 + max|a_i| / |a_n|
    bound = Fraction(abs(ints[-1]) + max(abs(c) for c in ints[:-1]), abs(ints[-1]))
    cands = set()
    for r in _int_divisors(ints[0]):
        for s in _int_divisors(ints[-1]):
            if math.gcd(r, s) != 1:
                continue
            c = Fraction(r, s)
            if c <= bound:
                cands.add(c)
                cands.add(-c)
    q = UniPoly(ints, p.var)
    for c in sorted(cands):
        m = 0
        while not q.is_constant() and sc_is_zero(q.eval(c)):
            q = q.exact_div(UniPoly([-c, 1], p.var))
            m += 1
        if m:
            roots[c] = m
    return roots


def squarefree_roots(p: UniPoly) -> tuple[list[tuple[UniPoly, int]], dict[Fraction, int]]:
    """Squarefree factors with multiplicities plus all rational roots.

    Irrational content stays visible through the factor list (no full
    factorization is attempted).
    """
    factors = yun_squarefree(p)
    roots: dict[Fraction, int] = {}
    for f, m in factors:
        for r, k in rational_roots(f).items():
            roots[r] = roots.get(r, 0) + m * k
    return factors, roots


@dataclass(frozen=True)
class RootClass:
    """One root, or one conjugacy class of roots, of a rational polynomial.

    Rational roots carry value: Fraction, conjugates 1, modulus None.
    A quadratic residual factor contributes two explicit ExtScalar roots.
    A residual factor of degree d >= 3 contributes one representative
    ExtScalar root standing for its d conjugates.
    """

    value: Scalar
    multiplicity: int
    conjugates: int = 1
    modulus: UniPoly | None = None


def root_classes(p: UniPoly, tower_depth: int = 2) -> list[RootClass]:
    """Roots of p as rational values and extension-field classes.

    tower_depth counts fields: 1 allows only Q, 2 allows one simple
    extension Q(u).  Needing more raises ExtensionBudgetError.
    """
    if p.has_extension_coeffs():
        return _root_classes_ext(p, tower_depth)
    out: list[RootClass] = []
    for f, m in yun_squarefree(p):
        g = f
        for r, _ in sorted(rational_roots(f).items()):
            out.append(RootClass(r, m))
            g = g.exact_div(UniPoly([-r, 1], p.var))
        if g.degree == 0:
            continue
        if tower_depth < 2:
            raise ExtensionBudgetError(repr(g), depth_needed=2)
        gm = g.monic()
        u = ExtScalar.generator(gm)
        if g.degree == 2:
            other = -gm.coeffs[1] - u
            out.append(RootClass(u, m, 1, gm))
            out.append(RootClass(other, m, 1, gm))
        else:
            out.append(RootClass(u, m, g.degree, gm))
    return out


def _root_classes_ext(p: UniPoly, tower_depth: int) -> list[RootClass]:
    # coefficients already live in Q(u): only degree-1 residuals are free,
    # anything else would need a second extension
    if p.is_zero():
        raise ValueError("roots of the zero polynomial")
    out = []
    for f, m in yun_squarefree(p):
        if f.degree == 1:
            out.append(RootClass(-f.coeffs[0], m))
        else:
            raise ExtensionBudgetError(repr(f))
    return out


def split_cases(modulus: UniPoly, fn):
    """Dynamic evaluation driver.

    Runs fn at a root class of the squarefree modulus; whenever the
    arithmetic splits the modulus, reruns fn in each factor ring.  Returns
    [(factor, result)] covering the modulus.  Degree-1 factors hand fn the
    rational root; larger factors hand it the ExtScalar generator.
    """
    work = [modulus.monic()]
    out = []
    while work:
        q = work.pop()
        if q.degree < 1:
            raise ValueError("constant modulus")
        if q.degree == 1:
            out.append((q, fn(-q.coeffs[0])))
            continue
        u = ExtScalar.generator(q)
        try:
            out.append((q, fn(u)))
        except SplitRequired as s:
            if s.modulus != q.coeffs:
                raise
            work.extend(UniPoly(f, q.var) for f in s.factors)
    return out


def ext_arith(a: ExtScalar, b: ExtScalar | None, op: str):
    """Quotient-ring arithmetic that reports splits instead of raising.

    op is one of add, mul, invert (invert ignores b).  Returns ExtScalar,
    or Split carrying the coprime modulus factors when a zero divisor was
    hit.
    """
    try:
        if op == "add":
            return a + b
        if op == "mul":
            return a * b
        if op == "invert":
            return a.inverse()
    except SplitRequired as s:
        return Split(tuple(s.factor_polys()))
    raise ValueError(f"unknown op: {op}")


# ---------------------------------------------------------------------------
# sparse multivariate polynomials

class MPoly:
    """Sparse multivariate polynomial: exponent tuple -> nonzero coefficient.

    Variable labels are fixed per instance; binary ops require identical
    labels (use extend_vars to align).
    """

    __slots__ = ("terms", "vars")

    def __init__(self, terms: dict, vars: tuple[str, ...]):
        clean = {}
        for e, c in terms.items():
            c = sc(c) if isinstance(c, int) else c
            if not sc_is_zero(c):
                clean[tuple(e)] = c
        self.terms = clean
        self.vars = tuple(vars)

    @classmethod
    def const(cls, c, vars: tuple[str, ...]) -> "MPoly":
        return cls({(0,) * len(vars): c}, vars)

    @classmethod
    def var(cls, name: str, vars: tuple[str, ...]) -> "MPoly":
        exp = [0] * len(vars)
        exp[vars.index(name)] = 1
        return cls({tuple(exp): 1}, vars)

    @classmethod
    def zero(cls, vars: tuple[str, ...]) -> "MPoly":
        return cls({}, vars)

    # -- structure

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(x == 0 for x in e) for e in self.terms)

    def constant(self):
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, var: str) -> int:
        if not self.terms:
            return -1
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def _check(self, other: "MPoly"):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    # -- ring ops

    def __add__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            other = MPoly.const(other, self.vars)
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MPoly(out, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return MPoly({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            other = MPoly.const(other, self.vars)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            return MPoly({e: c * other for e, c in self.terms.items()}, self.vars)
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MPoly(out, self.vars)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = MPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            other = MPoly.const(other, self.vars)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return not self.is_zero()

    # -- exact division

    def _lex_lead(self):
        e = max(self.terms)
        return e, self.terms[e]

    def exact_div(self, d: "MPoly") -> "MPoly":
        """Divide by d, raising ValueError unless the division is exact."""
        self._check(d)
        if d.is_zero():
            raise ZeroDivisionError("division by zero")
        if self.is_zero():
            return self
        q: dict = {}
        r = dict(self.terms)
        de, dc = d._lex_lead()
        dc_inv = sc_inv(dc)
        while r:
            e = max(r)
            c = r[e]
            diff = tuple(a - b for a, b in zip(e, de))
            if any(x < 0 for x in diff):
                raise ValueError("inexact polynomial division")
            t = c * dc_inv
            q[diff] = q.get(diff, Fraction(0)) + t
            for e2, c2 in d.terms.items():
                e3 = tuple(a + b for a, b in zip(diff, e2))
                nv = r.get(e3, Fraction(0)) - t * c2
                if sc_is_zero(nv):
                    r.pop(e3, None)
                else:
                    r[e3] = nv
        return MPoly(q, self.vars)

    def divides(self, other: "MPoly") -> bool:
        try:
            other.exact_div(self)
            return True
        except (ValueError, ZeroDivisionError):
            return False

    # -- substitution and views

    def subst(self, assign: dict):
        """Substitute scalars for some variables; returns MPoly over the rest.

        With every variable assigned, returns the scalar value.
        """
        keep = [i for i, v in enumerate(self.vars) if v not in assign]
        vals = {i: sc(assign[v]) if isinstance(assign[v], int) else assign[v]
                for i, v in enumerate(self.vars) if v in assign}
        if not keep:
            acc = Fraction(0)
            for e, c in self.terms.items():
                t = c
                for i, v in vals.items():
                    t = t * v ** e[i]
                acc = acc + t
            return acc
        out: dict = {}
        for e, c in self.terms.items():
            t = c
            for i, v in vals.items():
                t = t * v ** e[i]
            ne = tuple(e[i] for i in keep)
            nv = out.get(ne, Fraction(0)) + t
            out[ne] = nv
        return MPoly(out, tuple(self.vars[i] for i in keep))

    def subst_poly(self, var: str, value: "MPoly") -> "MPoly":
        """Replace var by a polynomial over the same variable set."""
        self._check(value)
        i = self.vars.index(var)
        by_exp: dict[int, MPoly] = {}
        for e, c in self.terms.items():
            k = e[i]
            ne = tuple(0 if j == i else x for j, x in enumerate(e))
            cur = by_exp.setdefault(k, MPoly.zero(self.vars))
            by_exp[k] = cur + MPoly({ne: c}, self.vars)
        if not by_exp:
            return self
        acc = MPoly.zero(self.vars)
        for k in range(max(by_exp), -1, -1):
            acc = acc * value
            if k in by_exp:
                acc = acc + by_exp[k]
        return acc

    def coeff_of(self, var: str, k: int) -> "MPoly":
        """Coefficient of var**k, as an MPoly over the remaining variables."""
        i = self.vars.index(var)
        rest = tuple(v for j, v in enumerate(self.vars) if j != i)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                out[tuple(x for j, x in enumerate(e) if j != i)] = c
        return MPoly(out, rest)

    def coeff_list(self, var: str) -> list["MPoly"]:
        """Dense coefficient list in var, entries over the remaining vars."""
        d = self.degree_in(var)
        if d < 0:
            return []
        return [self.coeff_of(var, k) for k in range(d + 1)]

    def as_unipoly_in(self, var: str) -> UniPoly:
        """View as UniPoly in var with MPoly coefficients (remaining vars)."""
        return UniPoly(self.coeff_list(var), var)

    def to_unipoly(self) -> UniPoly:
        """Convert when at most one variable actually occurs."""
        used = [i for i in range(len(self.vars))
                if any(e[i] > 0 for e in self.terms)]
        if len(used) > 1:
            raise ValueError("more than one variable occurs")
        if not used:
            name = self.vars[0] if self.vars else "x"
            return UniPoly([self.constant()], name)
        i = used[0]
        out = [Fraction(0)] * (max(e[i] for e in self.terms) + 1)
        for e, c in self.terms.items():
            out[e[i]] = c
        return UniPoly(out, self.vars[i])

    def extend_vars(self, vars: tuple[str, ...]) -> "MPoly":
        idx = [vars.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for j, x in zip(idx, e):
                ne[j] = x
            out[tuple(ne)] = c
        return MPoly(out, vars)

    def drop_vars(self, names) -> "MPoly":
        keep = [i for i, v in enumerate(self.vars) if v not in names]
        for e in self.terms:
            for i, v in enumerate(self.vars):
                if v in names and e[i] != 0:
                    raise ValueError(f"variable {v} still occurs")
        return MPoly({tuple(e[i] for i in keep): c for e, c in self.terms.items()},
                     tuple(self.vars[i] for i in keep))

    def derivative(self, var: str) -> "MPoly":
        i = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = tuple(x - 1 if j == i else x for j, x in enumerate(e))
            out[ne] = out.get(ne, Fraction(0)) + c * e[i]
        return MPoly(out, self.vars)

    def homogenize(self, var: str, degree: int | None = None) -> "MPoly":
        """Multiply each term by var**(degree - total degree of the term)."""
        i = self.vars.index(var)
        if any(e[i] != 0 for e in self.terms):
            raise ValueError(f"{var} already occurs")
        d = degree if degree is not None else self.total_degree()
        out = {}
        for e, c in self.terms.items():
            pad = d - sum(e)
            if pad < 0:
                raise ValueError("degree below actual total degree")
            ne = tuple(x + pad if j == i else x for j, x in enumerate(e))
            out[ne] = c
        return MPoly(out, self.vars)

    def monomial_content(self) -> tuple[int, ...]:
        if not self.terms:
            return (0,) * len(self.vars)
        mins = None
        for e in self.terms:
            mins = e if mins is None else tuple(min(a, b) for a, b in zip(mins, e))
        return mins

    def strip_monomial_content(self) -> tuple["MPoly", tuple[int, ...]]:
        m = self.monomial_content()
        if all(x == 0 for x in m):
            return self, m
        out = {tuple(a - b for a, b in zip(e, m)): c for e, c in self.terms.items()}
        return MPoly(out, self.vars), m

    def normalized(self) -> "MPoly":
        """Scale so the lex-leading coefficient is 1 (canonical up to scalar)."""
        if self.is_zero():
            return self
        _, c = self._lex_lead()
        return self * sc_inv(c)

    def proportional(self, other: "MPoly") -> bool:
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return self.normalized() == other.normalized()

    def has_extension_coeffs(self) -> bool:
        return any(isinstance(c, ExtScalar) for c in self.terms.values())

    def __repr__(self):
        if not self.terms:
            return "0"
        def key(e):
            return (sum(e), e)
        parts = []
        for e in sorted(self.terms, key=key, reverse=True):
            c = self.terms[e]
            monos = []
            for v, x in zip(self.vars, e):
                if x == 1:
                    monos.append(v)
                elif x > 1:
                    monos.append(f"{v}^{x}")
            mono = "*".join(monos)
            if isinstance(c, ExtScalar):
                body = f"({c!r})" + (f"*{mono}" if mono else "")
            elif mono:
                if c == 1:
                    body = mono
                elif c == -1:
                    body = f"-{mono}"
                else:
                    body = f"{c}*{mono}"
            else:
                body = str(c)
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            if p.startswith("-"):
                out += " - " + p[1:]
            else:
                out += " + " + p
        return out


@dataclass(frozen=True)
class HomogForm:
    """One homogeneous component of a bivariate polynomial."""

    degree: int
    form: MPoly


def homog_parts(p: MPoly) -> list[HomogForm]:
    """Homogeneous components, highest degree first."""
    buckets: dict[int, dict] = {}
    for e, c in p.terms.items():
        buckets.setdefault(sum(e), {})[e] = c
    return [HomogForm(d, MPoly(buckets[d], p.vars))
            for d in sorted(buckets, reverse=True)]


# ---------------------------------------------------------------------------
# resultants via the subresultant pseudo-remainder sequence

def _prem(A: list, B: list, one):
    """Pseudo-remainder: lc(B)**(deg A - deg B + 1) * A mod B.

    A, B are dense coefficient lists (low-to-high) over a ring with +,-,*.
    """
    dA, dB = len(A) - 1, len(B) - 1
    lb = B[-1]
    e = dA - dB + 1
    R = list(A)
    while R and len(R) - 1 >= dB:
        lr = R[-1]
        k = len(R) - 1 - dB
        R = [lb * c for c in R]
        for j in range(dB + 1):
            R[k + j] = R[k + j] - lr * B[j]
        while R and sc_is_zero(R[-1]):
            R.pop()
        e -= 1
    f = one
    for _ in range(e):
        f = f * lb
    return [f * c for c in R]


def _rpow(base, n: int, one):
    out = one
    for _ in range(n):
        out = out * base
    return out


def resultant(p: MPoly, q: MPoly, var: str) -> MPoly:
    """Resultant of p and q with respect to var.

    Subresultant pseudo-remainder sequence over the coefficient ring in the
    remaining variables; all interior divisions are exact.
    """
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of the zero polynomial")
    if p.vars != q.vars:
        raise ValueError(f"variable mismatch: {p.vars} vs {q.vars}")
    A = p.coeff_list(var)
    B = q.coeff_list(var)
    rest = tuple(v for v in p.vars if v != var)
    one = MPoly.const(1, rest)
    zero = MPoly.zero(rest)
    m, n = len(A) - 1, len(B) - 1
    if m <= 0 and n <= 0:
        raise ValueError("no elimination variable")
    sign = 1
    if m < n:
        A, B, m, n = B, A, n, m
        if (m * n) % 2 == 1:
            sign = -sign
    if n == 0:
        r = _rpow(B[0], m, one)
        return r if sign == 1 else -r
    g = one
    h = one
    # invariant at loop top: deg A >= deg B >= 1
    while True:
        dA, dB = len(A) - 1, len(B) - 1
        delta = dA - dB
        if (dA % 2 == 1) and (dB % 2 == 1):
            sign = -sign
        R = _prem(A, B, one)
        if not R:
            return zero  # common factor of positive degree
        gh = g * _rpow(h, delta, one)
        A = B
        B = [c.exact_div(gh) for c in R]
        g = A[-1]
        if delta == 1:
            h = g
        elif delta > 1:
            h = _rpow(g, delta, one).exact_div(_rpow(h, delta - 1, one))
        if len(B) - 1 == 0:
            dA2 = len(A) - 1
            num = _rpow(B[0], dA2, one)
            r = num.exact_div(_rpow(h, dA2 - 1, one))
            return r if sign == 1 else -r


def resultant_uni(p: MPoly, q: MPoly, var: str) -> UniPoly:
    """Resultant collapsed to a univariate polynomial (bivariate inputs)."""
    return resultant(p, q, var).to_unipoly()
