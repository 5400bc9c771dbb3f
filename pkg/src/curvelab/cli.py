"""Command-line front end: parse expressions, dispatch analyses, emit reports.

Subcommands:
  analyze    asymptotes, presentation checks, sheet factorization, branch
             colors, and rational sample points of one plane curve
  transform  apply a script of fibrewise Moebius steps, optionally verifying
             each transported branch center against its prediction
  degenerate build a one-parameter family from a config file (cone or mirror
             construction) and run fiber, axis, and specialization checks

Reports render as text or JSON; all rationals print exactly as "num/den".
Exit codes: 0 pass, 1 check failed, 2 input error, 3 extension budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .curves import (
    Asymptote,
    MobiusMap,
    apply_mobius,
    asymptotes,
    branches_at,
    classify_branch,
    isolate_branch,
    predict_center,
    presentation_check,
    shear_to_Q1,
    transport_branch,
)
from .exact import ExtensionBudgetError, MPoly, UniPoly, rational_roots
from .families import (
    CurveFamily,
    MirrorConfig,
    SpaceCurve,
    asymptotic_check,
    cone_family,
    fiber_at,
    good_specialization_check,
    line_factors,
    mirror_family,
    node_track,
)
from .series import factor_fibrewise, verify_product, verify_vieta

DEFAULT_TRUNC = 16
TRUNC_ENV = "CURVELAB_TRUNC"
ALLOWED_VARS = ("x", "y", "z", "X", "Y", "W", "t", "s")


class CLIError(ValueError):
    """Bad input: malformed expression, script, config, or flag value."""


# ---------------------------------------------------------------------------
# expression grammar
#
# expr    := term (("+" | "-") term)*
# term    := unary ("*" unary)*
# unary   := ("+" | "-") unary | power
# power   := primary ("^" INT)?
# primary := INT ("/" INT)? | VAR | "(" expr ")"
#
# Variables come from ALLOWED_VARS; implicit multiplication is not allowed.

class ParseError(CLIError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (column {position + 1})")
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", or the operator character itself
    value: object
    pos: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            out.append(Token("int", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            if name not in ALLOWED_VARS:
                raise ParseError(
                    f"unknown variable {name!r}; allowed variables are "
                    + ", ".join(ALLOWED_VARS), i)
            out.append(Token("name", name, i))
            i = j
            continue
        if ch in "+-*^()/":
            out.append(Token(ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    return out


class _Parser:
    _ADD = ("+", "-")

    def __init__(self, tokens: list[Token], vars: tuple[str, ...], length: int):
        self.toks = tokens
        self.i = 0
        self.vars = vars
        self.length = length

    def _peek(self) -> str:
        return self.toks[self.i].kind if self.i < len(self.toks) else "end"

    def _pos(self) -> int:
        return self.toks[self.i].pos if self.i < len(self.toks) else self.length

    def _next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def _expect_int(self, role: str) -> int:
        if self._peek() != "int":
            raise ParseError(f"{role} must be a nonnegative integer literal",
                             self._pos())
        return self._next().value

    def parse(self) -> MPoly:
        p = self.expr()
        if self._peek() != "end":
            hint = ""
            if self._peek() in ("name", "int", "("):
                hint = "; implicit multiplication is not allowed, write a*b"
            raise ParseError(f"unexpected {self.toks[self.i].value!r}{hint}",
                             self._pos())
        return p

    def expr(self) -> MPoly:
        left = self.term()
        while self._peek() in self._ADD:
            op = self._next().kind
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self) -> MPoly:
        left = self.unary()
        while self._peek() == "*":
            self._next()
            left = left * self.unary()
        return left

    def unary(self) -> MPoly:
        if self._peek() in self._ADD:
            op = self._next().kind
            inner = self.unary()
            return inner if op == "+" else MPoly.zero(self.vars) - inner
        return self.power()

    def power(self) -> MPoly:
        base = self.primary()
        if self._peek() == "^":
            self._next()
            return base ** self._expect_int("exponent")
        return base

    def primary(self) -> MPoly:
        kind = self._peek()
        if kind == "int":
            num = self._next().value
            if self._peek() == "/":
                pos = self._pos()
                self._next()
                den = self._expect_int("denominator")
                if den == 0:
                    raise ParseError("zero denominator in rational literal", pos)
                return MPoly.const(Fraction(num, den), self.vars)
            return MPoly.const(Fraction(num), self.vars)
        if kind == "name":
            return MPoly.var(self._next().value, self.vars)
        if kind == "(":
            self._next()
            inner = self.expr()
            if self._peek() != ")":
                raise ParseError("expected ')'", self._pos())
            self._next()
            return inner
        if kind == "/":
            raise ParseError("'/' is only allowed between integer literals; "
                             "write 1/2*x for a rational coefficient",
                             self._pos())
        if kind == "end":
            raise ParseError("unexpected end of expression", self._pos())
        raise ParseError(f"unexpected {self.toks[self.i].value!r}", self._pos())


@dataclass(frozen=True)
class PolyExpr:
    """A parsed expression: source text, polynomial, and its variables."""

    source: str
    poly: MPoly
    vars: tuple[str, ...]


def parse_poly(text: str, allowed: Optional[Sequence[str]] = None) -> PolyExpr:
    """Parse text into an MPoly over the variables it actually uses.

    Variables are ordered as in ALLOWED_VARS; a constant expression gets
    the single placeholder variable "x".  allowed restricts the usable
    names (for config entries with a fixed chart).
    """
    tokens = tokenize(text)
    names = []
    for tok in tokens:
        if tok.kind == "name" and tok.value not in names:
            names.append(tok.value)
    if allowed is not None:
        for tok in tokens:
            if tok.kind == "name" and tok.value not in allowed:
                raise ParseError(
                    f"variable {tok.value!r} not allowed here; expected one of "
                    + ", ".join(allowed), tok.pos)
    vars = tuple(sorted(names, key=ALLOWED_VARS.index)) or ("x",)
    poly = _Parser(tokens, vars, len(text)).parse()
    return PolyExpr(text, poly, vars)


def parse_plane_curve(text: str) -> PolyExpr:
    """Parse a curve in exactly two variables (base first, fiber second)."""
    pe = parse_poly(text)
    used = tuple(v for v in pe.vars if pe.poly.degree_in(v) > 0)
    if len(used) != 2:
        raise CLIError(
            f"expected a curve in exactly two variables, got "
            f"{len(used)} in {text!r}")
    if used != pe.vars:
        poly = pe.poly
        for v in pe.vars:
            if v not in used:
                poly = poly.subst({v: Fraction(0)})
        pe = PolyExpr(text, poly.extend_vars(used), used)
    return pe


def parse_fraction(text: str, role: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise CLIError(f"bad {role} {text!r}: {e}") from None


def parse_tuple(text: str, role: str, size: int) -> tuple[Fraction, ...]:
    parts = [p for p in text.split(",")]
    if len(parts) != size:
        raise CLIError(f"{role} needs {size} comma-separated rationals, "
                       f"got {text!r}")
    return tuple(parse_fraction(p, role) for p in parts)


# ---------------------------------------------------------------------------
# report containers and rendering

@dataclass
class Entry:
    """One verdict line: passed True/False, or None for plain information."""

    name: str
    passed: Optional[bool]
    witness: str
    data: Optional[dict] = None


@dataclass
class Report:
    command: str
    inputs: dict
    results: list[Entry] = field(default_factory=list)
    elapsed_ms: int = 0

    def add(self, name: str, passed: Optional[bool], witness: str,
            data: Optional[dict] = None) -> None:
        self.results.append(Entry(name, passed, witness, data))

    @property
    def failed(self) -> bool:
        return any(e.passed is False for e in self.results)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": {k: str(v) for k, v in self.inputs.items()},
            "results": [
                {
                    "name": e.name,
                    "passed": e.passed,
                    "witness": e.witness,
                    **({"data": _jsonable(e.data)} if e.data is not None else {}),
                }
                for e in self.results
            ],
            "elapsed_ms": self.elapsed_ms,
        }

    def to_text(self) -> str:
        lines = [f"curvelab {self.command}"]
        for k, v in self.inputs.items():
            lines.append(f"  {k} = {v}")
        for e in self.results:
            tag = "info" if e.passed is None else ("PASS" if e.passed else "FAIL")
            lines.append(f"[{tag}] {e.name}: {e.witness}")
            if e.data:
                lines.extend(_text_data(e.data, "    "))
        lines.append(f"elapsed: {self.elapsed_ms} ms")
        return "\n".join(lines)


def _jsonable(v):
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


def _scalar_str(v) -> str:
    if isinstance(v, str):
        return v
    return str(v) if isinstance(v, (Fraction, int)) else repr(v)


def _text_data(data: dict, indent: str) -> list[str]:
    lines = []
    for k, v in data.items():
        if isinstance(v, (list, tuple)):
            lines.append(f"{indent}{k}:")
            for item in v:
                if isinstance(item, dict):
                    body = ", ".join(f"{ik}={_scalar_str(iv)}"
                                     for ik, iv in item.items())
                    lines.append(f"{indent}  - {body}")
                else:
                    lines.append(f"{indent}  - {_scalar_str(item)}")
        else:
            lines.append(f"{indent}{k}: {_scalar_str(v)}")
    return lines


def _line_str(a: Asymptote, u: str, v: str) -> str:
    """Render a x + b z = value as an affine line in the user's variables."""
    aa, bb, val = a.a, a.b, a.value
    if all(isinstance(c, (Fraction, int)) for c in (aa, bb, val)):
        if bb == 0:
            return f"{u} = {Fraction(val, 1) / aa}"
        aa, val = Fraction(aa, 1) / bb, Fraction(val, 1) / bb
        if aa == 0:
            return f"{v} = {val}"
        sign = "-" if aa < 0 else "+"
        mag = abs(aa)
        coef = "" if mag == 1 else f"{mag}*"
        return f"{v} {sign} {coef}{u} = {val}"
    return f"({_scalar_str(aa)})*{u} + ({_scalar_str(bb)})*{v} = {_scalar_str(val)}"


def _point_str(pt) -> str:
    return "(" + ", ".join(_scalar_str(c) for c in pt) + ")"


def _tangent_str(tangent, u: str, v: str) -> str:
    if tangent == "linf":
        return "line at infinity"
    if tangent[0] == "x":
        return f"{u} = {_scalar_str(tangent[1])}"
    _, k, c = tangent
    return f"{v} = {_scalar_str(k)}*{u} + {_scalar_str(c)}"


def _mobius_str(g: MobiusMap) -> str:
    return (f"z -> (({g.a!r})*z + ({g.b!r})) / (({g.c!r})*z + ({g.d!r}))")


# ---------------------------------------------------------------------------
# analyze

def cmd_analyze(args: argparse.Namespace) -> Report:
    pe = parse_plane_curve(args.expr)
    u, v = pe.vars
    F = pe.poly
    report = Report("analyze", {"expr": args.expr})
    requested = (args.asymptotes or args.present or args.factor is not None
                 or args.classify or args.emit_points)
    if not requested:
        raise CLIError("nothing to do: pass --asymptotes, --present, "
                       "--factor N, --classify, or --emit-points")

    if args.asymptotes:
        try:
            found = asymptotes(F, tower_depth=args.tower_depth)
        except ValueError as e:
            report.add("asymptotes", False, str(e))
        else:
            total = sum(a.conjugates for a in found)
            rows = [{"line": _line_str(a, u, v),
                     "provenance": a.provenance,
                     "conjugates": a.conjugates} for a in found]
            report.add("asymptotes", None,
                       f"{total} asymptote(s) in {len(found)} class(es)",
                       {"lines": rows})

    if args.present:
        rep = presentation_check(F, tower_depth=args.tower_depth)
        for c in rep.checks:
            report.add(f"present-{c.name}", c.passed, c.witness)
        pts = [{"abscissa": _scalar_str(p.abscissa),
                "fiber_value": "" if p.fiber_value is None
                else _scalar_str(p.fiber_value),
                "kind": p.kind,
                "conjugates": p.conjugates} for p in rep.critical_points]
        report.add("critical-points", None,
                   f"{len(pts)} critical abscissa class(es)", {"points": pts})

    if args.factor is not None:
        try:
            fact = factor_fibrewise(F, N=args.factor,
                                    tower_depth=args.tower_depth)
        except ValueError as e:
            report.add("factor", False, str(e))
        else:
            ok_prod = verify_product(fact)
            ok_vieta = verify_vieta(fact)
            report.add("factor", ok_prod and ok_vieta,
                       f"{len(fact.sheets)} sheet(s) to order {args.factor}; "
                       f"product identity {'holds' if ok_prod else 'FAILS'}, "
                       f"Vieta identities {'hold' if ok_vieta else 'FAIL'}",
                       {"sheets": [repr(s) for s in fact.sheets],
                        "base_points": [_scalar_str(b)
                                        for b in fact.base_points]})

    if args.classify:
        axis = F.subst({u: Fraction(0)})
        if axis.is_zero():
            report.add("classify", False, f"the axis {u} = 0 lies on the curve")
        else:
            centers = sorted(rational_roots(axis.to_unipoly()))
            rows = []
            for y0 in centers:
                for b in branches_at(F, (Fraction(0), y0), N=args.trunc,
                                     tower_depth=args.tower_depth):
                    color = classify_branch(F, b)
                    rows.append({"center": _point_str((Fraction(0), y0)),
                                 "color": color.color,
                                 "refinement": color.refinement,
                                 "tangent": _tangent_str(b.tangent, u, v)})
            report.add("classify", None,
                       f"{len(rows)} branch(es) at {len(centers)} rational "
                       f"axis point(s)", {"branches": rows})

    if args.emit_points:
        pts = []
        fibers = 0
        for k in range(-20, 21):
            x0 = Fraction(k, 4)
            fib = F.subst({u: x0})
            if fib.is_zero():
                continue
            fibers += 1
            for y0 in sorted(rational_roots(fib.to_unipoly())):
                pts.append([str(x0), str(y0)])
        report.add("points", None,
                   f"{len(pts)} rational point(s) on {fibers} sampled fiber(s)",
                   {"points": pts})
    return report


# ---------------------------------------------------------------------------
# transform

def read_script(path: str) -> list[tuple[int, str, dict[str, str]]]:
    """Read a transform script: one step per line, `kind k=v k=v ...`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as e:
        raise CLIError(f"cannot read script {path!r}: {e}") from None
    steps = []
    for lineno, line in enumerate(raw.splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        kind, kv = parts[0], {}
        for part in parts[1:]:
            if "=" not in part:
                raise CLIError(f"{path}:{lineno}: expected key=value, "
                               f"got {part!r}")
            key, _, val = part.partition("=")
            kv[key] = val
        steps.append((lineno, kind, kv))
    if not steps:
        raise CLIError(f"script {path!r} has no steps")
    return steps


def _need(kv: dict[str, str], key: str, lineno: int) -> str:
    if key not in kv:
        raise CLIError(f"script line {lineno}: missing {key}=")
    return kv[key]


def _script_poly(text: str, var: str, lineno: int) -> UniPoly:
    pe = parse_poly(text, allowed=(var,))
    return pe.poly.extend_vars((var,)).to_unipoly()


def _step_map(kind: str, kv: dict[str, str], var: str,
              lineno: int) -> Optional[MobiusMap]:
    """The single explicit map of a step, or None for iterated steps."""
    if kind == "identity":
        return MobiusMap.identity(var)
    if kind == "mobius":
        vals = [_script_poly(_need(kv, key, lineno), var, lineno)
                for key in ("a", "b", "c", "d")]
        try:
            return MobiusMap(*vals, var=var)
        except ValueError as e:
            raise CLIError(f"script line {lineno}: {e}") from None
    if kind == "shear":
        alpha = parse_fraction(_need(kv, "alpha", lineno), "alpha")
        return MobiusMap.shear(alpha, var)
    return None


def _axis_branches(F: MPoly, trunc: int, tower_depth: int):
    """Branches over rational points of the fiber x = 0, for verification."""
    u = F.vars[0]
    fib = F.subst({u: Fraction(0)})
    if fib.is_zero():
        return []
    out = []
    for y0 in sorted(rational_roots(fib.to_unipoly())):
        out.extend(branches_at(F, (Fraction(0), y0), N=trunc,
                               tower_depth=tower_depth))
    return out


def _verify_maps(cur: MPoly, maps: list[MobiusMap], args, extra=()):
    """Replay maps, checking transported centers against predictions."""
    checked, mismatches = 0, []
    for g in maps:
        branches = list(extra) + _axis_branches(cur, args.trunc,
                                                args.tower_depth)
        extra = ()
        for b in branches:
            want = predict_center(b, g)
            got = transport_branch(b, g).center
            checked += 1
            if want != got:
                mismatches.append(f"predicted {want!r}, transported {got!r}")
        cur = apply_mobius(cur, g)
    return checked, mismatches


def cmd_transform(args: argparse.Namespace) -> Report:
    pe = parse_plane_curve(args.expr)
    u, v = pe.vars
    steps = read_script(args.script)
    report = Report("transform", {"expr": args.expr, "script": args.script,
                                  "verify": str(bool(args.verify)).lower()})
    cur = pe.poly
    for lineno, kind, kv in steps:
        name = f"step-{lineno}-{kind}"
        if kind in ("identity", "mobius", "shear"):
            g = _step_map(kind, kv, u, lineno)
            if args.verify:
                checked, bad = _verify_maps(cur, [g], args)
                report.add(f"{name}-verify", not bad,
                           f"{checked} transported center(s) match predictions"
                           if not bad else "; ".join(bad))
            nxt = apply_mobius(cur, g)
            if kind == "identity":
                report.add(name, nxt == cur, "curve unchanged",
                           {"curve": repr(nxt)})
            else:
                report.add(name, None, _mobius_str(g), {"curve": repr(nxt)})
            cur = nxt
        elif kind == "shear_to_q1":
            alpha = parse_fraction(_need(kv, "alpha", lineno), "alpha")
            max_iter = int(kv.get("max_iter", "16"))
            try:
                nxt, log = shear_to_Q1(cur, alpha, max_iter=max_iter)
            except ValueError as e:
                report.add(name, False, str(e))
                continue
            if args.verify:
                checked, bad = _verify_maps(cur, log, args)
                report.add(f"{name}-verify", not bad,
                           f"{checked} transported center(s) match predictions"
                           if not bad else "; ".join(bad))
            top = {e: c for e, c in nxt.terms.items()
                   if sum(e) == nxt.total_degree()}
            report.add(name, None,
                       f"{len(log)} shear(s); top form {MPoly(top, nxt.vars)!r}",
                       {"curve": repr(nxt)})
            cur = nxt
        elif kind == "isolate":
            x0 = parse_fraction(_need(kv, "x0", lineno), "x0")
            z0 = parse_fraction(_need(kv, "z0", lineno), "z0")
            max_iter = int(kv["max_iter"]) if "max_iter" in kv else None
            branches = branches_at(cur, (x0, z0), N=args.trunc,
                                   tower_depth=args.tower_depth)
            if not branches:
                report.add(name, False, f"no branch at ({x0}, {z0})")
                continue
            picked, nxt, log, err = None, None, None, None
            for b in branches:
                try:
                    nxt, log = isolate_branch(cur, b, max_iter=max_iter)
                except ValueError as e:
                    err = str(e)
                    continue
                picked = b
                break
            if picked is None:
                report.add(name, False, err or "no branch could be isolated")
                continue
            if args.verify:
                checked, bad = _verify_maps(cur, log, args, extra=branches)
                report.add(f"{name}-verify", not bad,
                           f"{checked} transported center(s) match predictions"
                           if not bad else "; ".join(bad))
            centers = []
            for b in branches:
                tb = b
                for g in log:
                    tb = transport_branch(tb, g)
                centers.append(_point_str(tb.center.affine())
                               if tb.center.is_finite()
                               else repr(tb.center))
            report.add(name, None,
                       f"{len(log)} round(s) isolating the branch at "
                       f"({x0}, {z0})",
                       {"curve": repr(nxt), "centers": centers})
            cur = nxt
        else:
            raise CLIError(f"script line {lineno}: unknown step kind {kind!r}")
    report.add("final", None, "transform complete", {"curve": repr(cur)})
    return report


# ---------------------------------------------------------------------------
# degenerate

def read_config(path: str) -> dict[str, str]:
    """Read a flat key = value config file with # comments."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as e:
        raise CLIError(f"cannot read config {path!r}: {e}") from None
    cfg: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise CLIError(f"{path}:{lineno}: expected key = value")
        key, _, val = text.partition("=")
        key, val = key.strip(), val.strip()
        if key in cfg:
            raise CLIError(f"{path}:{lineno}: duplicate key {key!r}")
        cfg[key] = val
    return cfg


def _cfg_need(cfg: dict[str, str], key: str, path: str) -> str:
    if key not in cfg:
        raise CLIError(f"config {path!r}: missing key {key!r}")
    return cfg[key]


def build_family(cfg: dict[str, str], path: str) -> CurveFamily:
    kind = _cfg_need(cfg, "kind", path)
    if kind == "cone":
        f1 = parse_poly(_cfg_need(cfg, "f1", path), allowed=("x", "y", "z"))
        f2 = parse_poly(_cfg_need(cfg, "f2", path), allowed=("x", "y", "z"))
        try:
            curve = SpaceCurve(f1.poly.extend_vars(("x", "y", "z")),
                               f2.poly.extend_vars(("x", "y", "z")))
        except ValueError as e:
            raise CLIError(f"config {path!r}: {e}") from None
        base = parse_tuple(_cfg_need(cfg, "base", path), "base", 3)
        direction = parse_tuple(_cfg_need(cfg, "direction", path),
                                "direction", 3)
        param = cfg.get("param", "t")
        target = (parse_tuple(cfg["target"], "target", 4)
                  if "target" in cfg else (Fraction(0), Fraction(0),
                                           Fraction(1), Fraction(0)))
        return cone_family(curve, base, direction, param=param, target=target)
    if kind == "mirror":
        # g is written in (x, y) and bound positionally to the chart (u, v)
        gp = parse_poly(_cfg_need(cfg, "g", path), allowed=("x", "y"))
        g = MPoly(dict(gp.poly.extend_vars(("x", "y")).terms), ("u", "v"))
        kw = {key: parse_tuple(_cfg_need(cfg, key, path), key, 3)
              for key in ("origin", "e1", "e2", "p", "q")}
        try:
            mirror = MirrorConfig(origin=kw["origin"], e1=kw["e1"],
                                  e2=kw["e2"], g=g, p=kw["p"], q=kw["q"])
        except ValueError as e:
            raise CLIError(f"config {path!r}: {e}") from None
        return mirror_family(mirror, param=cfg.get("param", "s"))
    raise CLIError(f"config {path!r}: kind must be cone or mirror, "
                   f"got {kind!r}")


def cmd_degenerate(args: argparse.Namespace) -> Report:
    cfg = read_config(args.config)
    inputs = {"config": args.config}
    for key in ("fiber", "check_asymptotic", "track"):
        val = getattr(args, key)
        if val is not None:
            inputs[key.replace("_", "-")] = val
    if args.good_spec:
        inputs["good-spec"] = "true"
        inputs["tol"] = str(args.tol)
    report = Report("degenerate", inputs)

    # constructor errors are input errors; family assembly errors (such as
    # a collapsed elimination) are reported as a failed check
    try:
        fam = build_family(cfg, args.config)
    except ValueError as e:
        if isinstance(e, CLIError):
            raise
        report.add("family", False, str(e))
        return report

    tstar = "none" if fam.t_star is None else str(fam.t_star)
    report.add("family", None,
               f"degree {fam.degree} family in {fam.param}, "
               f"degenerate value {tstar}",
               {"curve": repr(fam.h),
                "stripped": list(fam.stripped),
                "notes": list(fam.notes)})

    if args.fiber is not None:
        t0 = parse_fraction(args.fiber, "--fiber")
        f = fiber_at(fam, t0)
        name = f"fiber-{t0}"
        if f.is_zero():
            report.add(name, False, "fiber vanishes identically")
        else:
            lines, residual = line_factors(f)
            data = {"fiber": repr(f),
                    "lines": [repr(l) for l in lines]}
            if not residual.is_constant():
                data["residual"] = repr(residual)
            report.add(name, None,
                       f"{len(lines)} line factor(s)"
                       + ("" if residual.is_constant()
                          else " and a non-linear residual"),
                       data)

    if args.check_asymptotic is not None:
        if args.check_asymptotic not in ("strict", "weak"):
            raise CLIError("--check-asymptotic takes strict or weak")
        res = asymptotic_check(fam, mode=args.check_asymptotic,
                               infinity_checks=args.infinity_checks)
        report.add(res.name, res.passed, res.witness)

    samples: Optional[list[Fraction]] = None
    if args.track is not None:
        samples = [parse_fraction(p, "--track entry")
                   for p in args.track.split(",")]

    if args.track is not None and not args.good_spec:
        try:
            recs = node_track(fam, samples)
        except ValueError as e:
            report.add("track", False, str(e))
        else:
            rows = [{fam.param: str(r.t),
                     "node": _point_str(r.position),
                     "slopes": "(" + ", ".join(_scalar_str(s)
                                               for s in r.slopes) + ")"}
                    for r in recs]
            report.add("track", None,
                       f"tracked nodes at {len(recs)} parameter value(s)",
                       {"nodes": rows})

    if args.good_spec:
        if samples is None:
            raise CLIError("--good-spec needs --track with sample values")
        try:
            rep = good_specialization_check(fam, samples, tol=args.tol)
        except ValueError as e:
            report.add("good-specialization", False, str(e))
        else:
            data = {
                "gaps": ["inf" if g is None else str(g) for g in rep.gaps],
                "limit_point": "" if rep.limit_point is None
                else _point_str(rep.limit_point),
                "matched_slopes": "" if rep.matched_slopes is None
                else "(" + ", ".join(_scalar_str(s)
                                     for s in rep.matched_slopes) + ")",
            }
            tables = []
            for path in rep.records:
                tables.append([{fam.param: str(r.t),
                                "node": _point_str(r.position),
                                "slopes": "(" + ", ".join(
                                    _scalar_str(s) for s in r.slopes) + ")"}
                               for r in path])
            for i, table in enumerate(tables):
                data[f"path-{i}"] = table
            report.add("good-specialization", rep.passed, rep.witness, data)
    return report


# ---------------------------------------------------------------------------
# argument parsing and entry point

def _default_trunc() -> int:
    raw = os.environ.get(TRUNC_ENV)
    if raw is None:
        return DEFAULT_TRUNC
    try:
        val = int(raw)
    except ValueError:
        raise CLIError(f"{TRUNC_ENV} must be an integer, got {raw!r}") from None
    if val < 1:
        raise CLIError(f"{TRUNC_ENV} must be positive, got {val}")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text",
                        help="report format (default text)")
    common.add_argument("--trunc", type=int, default=None, metavar="N",
                        help=f"series truncation order (default {DEFAULT_TRUNC}"
                             f", or ${TRUNC_ENV})")
    common.add_argument("--tower-depth", type=int, default=2, metavar="D",
                        help="extension tower budget (default 2)")

    parser = argparse.ArgumentParser(
        prog="curvelab",
        description="Exact analysis of plane curves and their degenerations.")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", parents=[common],
                        help="analyze one plane curve")
    pa.add_argument("expr", help="curve polynomial in two variables")
    pa.add_argument("--asymptotes", action="store_true",
                    help="list the asymptote lines with provenance")
    pa.add_argument("--present", action="store_true",
                    help="run the presentation checks")
    pa.add_argument("--factor", type=int, metavar="N",
                    help="factor into series sheets to order N")
    pa.add_argument("--classify", action="store_true",
                    help="color the branches at rational axis points")
    pa.add_argument("--emit-points", action="store_true",
                    help="dump rational sample points for external plotters")
    pa.set_defaults(run=cmd_analyze)

    pt = sub.add_parser("transform", parents=[common],
                        help="apply a script of fibrewise Moebius steps")
    pt.add_argument("expr", help="curve polynomial in two variables")
    pt.add_argument("script", help="step file: mobius/shear/shear_to_q1/"
                                   "isolate/identity lines")
    pt.add_argument("--verify", action="store_true",
                    help="check each transported branch center against "
                         "its prediction")
    pt.set_defaults(run=cmd_transform)

    pd = sub.add_parser("degenerate", parents=[common],
                        help="build and check a one-parameter family")
    pd.add_argument("config", help="flat key = value family description")
    pd.add_argument("--fiber", metavar="T",
                    help="print the fiber at the parameter value T")
    pd.add_argument("--check-asymptotic", metavar="MODE",
                    help="run the axis check in strict or weak mode")
    pd.add_argument("--infinity-checks", action="store_true",
                    help="also require the mirrored conditions on W = 0")
    pd.add_argument("--track", metavar="LIST",
                    help="comma-separated parameter values for node tracking")
    pd.add_argument("--good-spec", action="store_true",
                    help="check node slopes specialize onto the "
                         "degenerate lines (needs --track)")
    pd.add_argument("--tol", type=Fraction, default=Fraction(1, 1000),
                    help="gap tolerance for --good-spec (default 1/1000)")
    pd.set_defaults(run=cmd_degenerate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    start = time.monotonic()
    try:
        if args.trunc is None:
            args.trunc = _default_trunc()
        if args.trunc < 1:
            raise CLIError(f"--trunc must be positive, got {args.trunc}")
        if args.tower_depth < 1:
            raise CLIError(f"--tower-depth must be positive, "
                           f"got {args.tower_depth}")
        report = args.run(args)
    except CLIError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ExtensionBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    report.elapsed_ms = int((time.monotonic() - start) * 1000)
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.to_text())
    return 1 if report.failed else 0


if __name__ == "__main__":
    sys.exit(main())
