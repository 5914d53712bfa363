"""The ``oq`` command line: parse orbit specs and polynomials, run the
constructions, and print text or JSON reports.

Exit codes: 0 success, 1 domain error, 2 check failure, 3 parse/usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import __version__
from .envalg import ad_action, render_pbw, weyl_map
from .exactnum import H, HPoly, as_rational, format_rational
from .liealg import (
    InvalidRank,
    LieAlgebraData,
    adjoint_charpoly_invariants,
    algebra_by_name,
    invariants,
    jacobi_defects,
    structure_defects,
)
from .orbitideal import (
    OrbitError,
    RepresentationFailure,
    conjugate_point,
    equivariance_certificate,
    minimalpoly_generators,
    on_orbit,
    orbit_from_eigs,
    orbit_from_json,
    parse_eigs,
    random_unimodular,
    regular_generators,
)
from .polyring import (
    CPoly,
    MonomialOrder,
    buchberger,
    coadjoint_action,
    krull_dimension,
    monomial_str,
    monomials_up_to,
    normal_form,
    poisson_bracket,
    render_cpoly,
)
from .starquant import (
    LIFT_SCHEMES,
    MODES,
    CheckResult,
    Lemma1Violation,
    build_engine,
    check_theorem,
    evaluate_engine_h,
    evaluated_table_consistent,
    lemma1_defects,
    lift_ideal,
    star,
)

EXIT_OK, EXIT_DOMAIN, EXIT_CHECK, EXIT_PARSE = 0, 1, 2, 3
EVAL_POINTS = ("0", "1", "-1", "1/2", "1/3")


# -- polynomial parser ------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: Sequence[str] = ()):
        self.line, self.column = line, column
        self.expected = tuple(sorted(set(expected)))
        where = f"line {line}, column {column}"
        tail = f"; expected one of: {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"{message} at {where}{tail}")


class UnknownVariable(ValueError):
    def __init__(self, name: str, line: int = 1, column: int = 1):
        self.name, self.line, self.column = name, line, column
        super().__init__(f"unknown variable {name} at line {line}, column {column}")


@dataclass(frozen=True)
class Token:
    kind: str  # int | name | op | end
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            col, i = col + 1, i + 1
            continue
        j = i
        if ch.isdigit():
            while j < len(text) and text[j].isdigit():
                j += 1
            kind = "int"
        elif ch.isalpha() or ch == "_":
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            kind = "name"
        elif ch in "+-*/^":
            j = i + 1
            kind = "op"
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col,
                             ("integer", "variable", "h", "+", "-", "*", "/", "^"))
        out.append(Token(kind, text[i:j], line, col))
        col += j - i
        i = j
    out.append(Token("end", "", line, col))
    return out


class _PolyParser:
    def __init__(self, text: str, alg: LieAlgebraData):
        self.toks = tokenize(text)
        self.pos = 0
        self.alg = alg
        self.names = {v: i for i, v in enumerate(alg.variables)}
        for i in range(alg.dim):
            self.names.setdefault(f"x{i + 1}", i)

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def fail(self, message: str, expected):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"{message}, found {found}", t.line, t.column, expected)

    def take(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def nat(self) -> int:
        if self.tok.kind != "int":
            self.fail("expected a natural number", ("integer",))
        return int(self.take().text)

    def poly(self) -> CPoly:
        d = self.alg.dim
        acc = CPoly.zero(d)
        sign = 1
        if self.tok.text in "+-" and self.tok.kind == "op":
            sign = -1 if self.take().text == "-" else 1
        acc = acc + self.term().scale(sign)
        while self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.take().text == "-" else 1
            acc = acc + self.term().scale(sign)
        if self.tok.kind != "end":
            self.fail("unexpected token", ("+", "-", "*", "end of input"))
        return acc

    def term(self) -> CPoly:
        d = self.alg.dim
        if self.tok.kind == "int":
            num = self.nat()
            coeff = Fraction(num)
            if self.tok.kind == "op" and self.tok.text == "/":
                self.take()
                t = self.tok
                den = self.nat()
                if den == 0:
                    raise ParseError("zero denominator", t.line, t.column, ("positive integer",))
                coeff = Fraction(num, den)
            out = CPoly.const(d, coeff)
        elif self.tok.kind == "name":
            out = self.factor()
        else:
            self.fail("expected a term", ("integer", "variable", "h"))
        while self.tok.kind == "op" and self.tok.text == "*":
            self.take()
            out = out * self.factor()
        return out

    def factor(self) -> CPoly:
        d = self.alg.dim
        t = self.tok
        if t.kind != "name":
            self.fail("expected a factor", ("variable", "h"))
        self.take()
        if t.text == "h":
            base = CPoly._raw(d, {(0,) * d: H})
        elif t.text in self.names:
            base = CPoly.var(d, self.names[t.text])
        else:
            raise UnknownVariable(t.text, t.line, t.column)
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            return base ** self.nat()
        return base


def parse_poly(text: str, alg: LieAlgebraData) -> CPoly:
    """Parse the shared polynomial grammar over ``alg``'s coordinates."""
    return _PolyParser(text, alg).poly()


# -- argument handling ----------------------------------------------------------


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {v}")
    return v


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


VERBS = ("algebra", "invariants", "orbit", "ideal", "gb", "stdmon", "lift", "engine",
         "star", "check", "eval")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--algebra", default="sl2", help="sl2, sl3 or sl4")
    common.add_argument("--eigs", help="eigenvalues as value[:mult],... e.g. 1:2,-2:1")
    common.add_argument("--spec", help="orbit spec JSON file (overrides --algebra/--eigs)")
    common.add_argument("--source", default="auto",
                        choices=("auto", "invariants", "minimal-polynomial"))
    common.add_argument("--lift", default="weyl", choices=LIFT_SCHEMES,
                        help="how the ideal generators are lifted to U_h")
    common.add_argument("--deg", type=_nonneg_int, help="truncation degree D")
    common.add_argument("--slack", type=_nonneg_int, default=0,
                        help="extra degrees of left multiples beyond D")
    common.add_argument("--mode", default="standard-monomial", choices=MODES,
                        help="quantization map for star")
    common.add_argument("--priority", help="comma-separated variable priority for grlex")
    common.add_argument("--h0", type=_rational, help="value of h for eval")
    common.add_argument("--threads", type=_positive_int, help="engine threads (env OQ_THREADS)")
    common.add_argument("--format", default="text", choices=("text", "json"))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_nonneg_int, default=50)
    common.add_argument("--timings", action="store_true", help="print timings to stderr")

    p = _Parser(prog="oq", description="Quantization of coadjoint orbits of sl(n).")
    p.add_argument("--version", action="version", version=f"oq {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb in VERBS:
        sp = sub.add_parser(verb, parents=[common])
        if verb in ("star", "eval"):
            sp.add_argument("f", nargs="?")
            sp.add_argument("g", nargs="?")
        if verb == "star":
            sp.add_argument("--table", action="store_true",
                            help="all products of standard monomials within the budget")
    return p


@dataclass
class Context:
    args: argparse.Namespace
    alg: LieAlgebraData
    spec: object = None
    pres: object = None
    cert: object = None
    order: MonomialOrder | None = None
    threads: int = 1
    timings: dict | None = None

    def tick(self, label: str, t0: float):
        if self.timings is not None:
            self.timings[label] = time.perf_counter() - t0


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("OQ_THREADS")
    if not env:
        return 1
    try:
        return _positive_int(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"OQ_THREADS: {exc}") from None


def _order(alg: LieAlgebraData, text: str | None) -> MonomialOrder:
    if not text:
        return MonomialOrder.grlex(alg.dim)
    names = [s.strip() for s in text.split(",") if s.strip()]
    idx = {v: i for i, v in enumerate(alg.variables)}
    bad = [s for s in names if s not in idx]
    if bad:
        raise UsageError(f"--priority: unknown variable {bad[0]}")
    if sorted(idx[s] for s in names) != list(range(alg.dim)):
        raise UsageError(f"--priority must list each of {', '.join(alg.variables)} once")
    return MonomialOrder.grlex(alg.dim, [idx[s] for s in names])


def _load_spec(args, alg):
    if args.spec:
        try:
            with open(args.spec) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--spec: {exc}") from None
        spec = orbit_from_json(data, algebra_by_name)
        return spec.algebra, spec
    if args.eigs is None:
        return alg, None
    try:
        eigs = parse_eigs(args.eigs)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--eigs: {exc}") from None
    return alg, orbit_from_eigs(alg, eigs)


def presentation(spec, source: str = "auto"):
    if source == "auto":
        source = "invariants" if spec.is_regular() else "minimal-polynomial"
    if source == "invariants":
        return regular_generators(spec)
    return minimalpoly_generators(spec)


def make_context(args) -> Context:
    alg = algebra_by_name(args.algebra)
    alg, spec = _load_spec(args, alg)
    ctx = Context(args, alg, spec, order=_order(alg, args.priority), threads=_threads(args))
    if args.timings:
        ctx.timings = {}
    return ctx


def _need_orbit(ctx: Context):
    if ctx.spec is None:
        raise UsageError(f"oq {ctx.args.verb}: an orbit is required (--eigs or --spec)")
    if ctx.pres is None:
        t0 = time.perf_counter()
        ctx.pres = presentation(ctx.spec, ctx.args.source)
        ctx.cert = equivariance_certificate(ctx.pres)
        ctx.tick("presentation", t0)


def default_degree(pres) -> int:
    base = 4 if pres.algebra.n_rank_matrix == 2 else 3
    return max(base, pres.max_degree())


def _engine(ctx: Context, D: int, strict: bool = True, order=None):
    t0 = time.perf_counter()
    eng = build_engine(ctx.alg, ctx.pres, ctx.cert, D, order or ctx.order,
                       threads=ctx.threads, lift=ctx.args.lift, strict=strict,
                       slack=ctx.args.slack)
    ctx.tick(f"engine(D={D})", t0)
    return eng


# -- rendering helpers ------------------------------------------------------------


def _show(ctx: Context, f: CPoly) -> str:
    return render_cpoly(f, ctx.alg.variables, ctx.order)


def _orbit_header(ctx: Context) -> dict:
    return {"orbit": ctx.spec.to_json(), "source": ctx.pres.source}


def _emit(ctx: Context, payload: dict, lines: list[str]) -> None:
    if ctx.args.format == "json":
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")


# -- verbs --------------------------------------------------------------------------


def cmd_algebra(ctx: Context) -> int:
    alg = ctx.alg
    labels = list(alg.basis_labels)
    brackets = []
    for (i, j), out in sorted(alg.structure_constants.items()):
        if i < j:
            v = CPoly._raw(alg.dim, {tuple(int(k == q) for q in range(alg.dim)): HPoly.const(c)
                                     for k, c in out.items()})
            brackets.append({"i": labels[i], "j": labels[j], "bracket": render_cpoly(v, labels)})
    lines = [f"algebra {alg.name}  dim {alg.dim}", "basis: " + " ".join(labels)]
    width = max((len(b["i"]) + len(b["j"]) for b in brackets), default=0) + 4
    lines += [f"{'[' + b['i'] + ', ' + b['j'] + ']':<{width}} = {b['bracket']}" for b in brackets]
    _emit(ctx, {"verb": "algebra", "algebra": alg.name, "dim": alg.dim, "basis": labels,
                "variables": alg.variables, "brackets": brackets}, lines)
    return EXIT_OK


def cmd_invariants(ctx: Context) -> int:
    inv = invariants(ctx.alg)
    rows = []
    for k, p in zip(inv.degrees, inv.generators):
        row = {"degree": k, "poly": _show(ctx, p)}
        if ctx.spec is not None:
            row["value"] = format_rational(p.evaluate(ctx.spec.representative).constant_term())
        rows.append(row)
    lines = [f"p{r['degree']} = {r['poly']}" + (f"    [at orbit: {r['value']}]" if "value" in r else "")
             for r in rows]
    _emit(ctx, {"verb": "invariants", "algebra": ctx.alg.name, "invariants": rows}, lines)
    return EXIT_OK


def cmd_orbit(ctx: Context) -> int:
    if ctx.spec is None:
        raise UsageError("oq orbit: an orbit is required (--eigs or --spec)")
    sp = ctx.spec
    rep = {v: format_rational(c) for v, c in zip(ctx.alg.variables, sp.representative) if c}
    payload = {"verb": "orbit", "orbit": sp.to_json(), "regular": sp.is_regular(),
               "dimension": sp.expected_dimension(), "representative": rep}
    lines = [f"orbit {sp.algebra.name} {sp.describe()}",
             f"regular: {'yes' if sp.is_regular() else 'no'}",
             f"dimension: {sp.expected_dimension()}",
             "representative: " + ", ".join(f"{k} = {v}" for k, v in rep.items())]
    _emit(ctx, payload, lines)
    return EXIT_OK


def cmd_ideal(ctx: Context) -> int:
    _need_orbit(ctx)
    gens = [_show(ctx, g) for g in ctx.pres.generators]
    payload = {"verb": "ideal", **_orbit_header(ctx), "generators": gens,
               "certificate": {"size": len(gens), "representation": True}}
    lines = [f"ideal of {ctx.spec.describe()} ({ctx.pres.source}), {len(gens)} generators"]
    lines += [f"r{a + 1} = {g}" for a, g in enumerate(gens)]
    lines.append(f"equivariance certificate: {len(gens)}x{len(gens)} matrices, representation ok")
    _emit(ctx, payload, lines)
    return EXIT_OK


def cmd_gb(ctx: Context) -> int:
    _need_orbit(ctx)
    gb = buchberger(ctx.pres.generators, ctx.order)
    basis = [_show(ctx, g) for g in gb.generators]
    dim = krull_dimension(gb)
    prio = [ctx.alg.variables[i] for i in ctx.order.priority]
    payload = {"verb": "gb", **_orbit_header(ctx), "priority": prio, "basis": basis,
               "krull_dimension": dim}
    lines = [f"reduced Groebner basis, grlex {' > '.join(prio)}"]
    lines += [f"g{a + 1} = {g}" for a, g in enumerate(basis)]
    lines.append(f"Krull dimension: {dim}")
    _emit(ctx, payload, lines)
    return EXIT_OK


def cmd_stdmon(ctx: Context) -> int:
    from .polyring import standard_monomials
    _need_orbit(ctx)
    D = ctx.args.deg if ctx.args.deg is not None else default_degree(ctx.pres)
    gb = buchberger(ctx.pres.generators, ctx.order)
    std = standard_monomials(gb, D)
    by_deg = [[] for _ in range(D + 1)]
    for m in std.monomials:
        by_deg[sum(m)].append(monomial_str(m, ctx.alg.variables) or "1")
    payload = {"verb": "stdmon", **_orbit_header(ctx), "max_degree": D,
               "counts": std.count_by_degree(), "monomials": by_deg}
    lines = [f"standard monomials up to degree {D}: counts {std.count_by_degree()}"]
    lines += [f"deg {d}: {' '.join(ms)}" for d, ms in enumerate(by_deg)]
    _emit(ctx, payload, lines)
    return EXIT_OK


def cmd_lift(ctx: Context) -> int:
    _need_orbit(ctx)
    t0 = time.perf_counter()
    lifted = lift_ideal(ctx.pres, ctx.cert, ctx.args.lift)
    ctx.tick("lift", t0)
    rows = [{"symbol": _show(ctx, r), "lift": render_pbw(R, ctx.order)}
            for r, R in zip(ctx.pres.generators, lifted.R)]
    payload = {"verb": "lift", **_orbit_header(ctx), "lift": lifted.scheme,
               "generators": rows, "lemma1": True}
    lines = [f"lifted generators ({lifted.scheme})"]
    lines += [f"R{a + 1} = {r['lift']}" for a, r in enumerate(rows)]
    lines.append("[X_i, R_a] = h sum_b T_i[a][b] R_b: verified")
    _emit(ctx, payload, lines)
    return EXIT_OK


def cmd_engine(ctx: Context) -> int:
    _need_orbit(ctx)
    D = ctx.args.deg if ctx.args.deg is not None else default_degree(ctx.pres)
    eng = _engine(ctx, D, strict=False)
    viol = [{"error": type(v).__name__, "witness": str(v)} for v in eng.violations]
    payload = {"verb": "engine", **eng.metadata(), "rank_by_degree": eng.rank_by_degree,
               "standard_by_degree": eng.std_by_degree, "pbw_by_degree": eng.pbw_by_degree,
               "rank_identity": eng.rank_identity_holds(), "violations": viol}
    lines = [f"engine {ctx.alg.name} {ctx.spec.describe()} D={D} lift={eng.lifted.scheme}",
             f"rank per degree:     {eng.rank_by_degree}",
             f"standard per degree: {eng.std_by_degree}",
             f"PBW per degree:      {eng.pbw_by_degree}",
             f"rank identity: {'holds' if eng.rank_identity_holds() else 'FAILS'}"]
    lines += [f"{v['error']}: {v['witness']}" for v in viol]
    _emit(ctx, payload, lines)
    return EXIT_OK if eng.sound and eng.rank_identity_holds() else EXIT_CHECK


def _parse_pair(ctx: Context, verb: str):
    a = ctx.args
    if a.f is None or a.g is None:
        raise UsageError(f"oq {verb}: two polynomials f and g are required")
    return parse_poly(a.f, ctx.alg), parse_poly(a.g, ctx.alg)


def cmd_star(ctx: Context) -> int:
    _need_orbit(ctx)
    a = ctx.args
    if a.table:
        D = a.deg if a.deg is not None else default_degree(ctx.pres)
        eng = _engine(ctx, D)
        mons = [CPoly.monomial(m) for m in eng.std.monomials]
        table = []
        for f in mons:
            for g in mons:
                if f.degree() + g.degree() <= D:
                    table.append({"f": _show(ctx, f), "g": _show(ctx, g),
                                  "result": _show(ctx, star(eng, f, g, a.mode).value)})
        payload = {"verb": "star", "mode": a.mode, "engine": eng.metadata(), "table": table}
        lines = [f"({t['f']}) * ({t['g']}) = {t['result']}" for t in table]
        _emit(ctx, payload, lines)
        return EXIT_OK
    f, g = _parse_pair(ctx, "star")
    need = max(f.degree(), 0) + max(g.degree(), 0)
    D = a.deg if a.deg is not None else max(need, ctx.pres.max_degree())
    eng = _engine(ctx, D)
    res = star(eng, f, g, a.mode)
    payload = {"verb": "star", "mode": a.mode, "engine": eng.metadata(),
               "table": [{"f": _show(ctx, res.f), "g": _show(ctx, res.g),
                          "result": _show(ctx, res.value)}]}
    _emit(ctx, payload, [_show(ctx, res.value)])
    return EXIT_OK


def cmd_eval(ctx: Context) -> int:
    _need_orbit(ctx)
    a = ctx.args
    if a.h0 is None:
        raise UsageError("oq eval: --h0 is required")
    pair = _parse_pair(ctx, "eval") if a.f is not None or a.g is not None else None
    need = sum(max(p.degree(), 0) for p in pair) if pair else 0
    D = a.deg if a.deg is not None else max(default_degree(ctx.pres), need)
    eng = _engine(ctx, D)
    ev = evaluate_engine_h(eng, a.h0)
    consistent = evaluated_table_consistent(ev)
    payload = {"verb": "eval", "h0": format_rational(ev.h0), "engine": eng.metadata(),
               "rank_by_degree": ev.rank_by_degree, "independent": ev.independent,
               "consistent": consistent}
    lines = [f"h = {format_rational(ev.h0)}: rank per degree {ev.rank_by_degree}, "
             f"standard monomials independent: {'yes' if ev.independent else 'no'}",
             f"specialized table agrees with the Q[h] table: {'yes' if consistent else 'no'}"]
    if pair:
        val = star(eng, pair[0], pair[1], a.mode).value.eval_h(ev.h0)
        payload["result"] = _show(ctx, val)
        lines.append(_show(ctx, val))
    _emit(ctx, payload, lines)
    return EXIT_OK if consistent else EXIT_CHECK


# -- acceptance suite ---------------------------------------------------------------


def _casimir_checks(alg: LieAlgebraData, rng: random.Random) -> list[CheckResult]:
    out = []
    inv = invariants(alg)
    ok, wit, n = True, "", 0
    for k, p in zip(inv.degrees, inv.generators):
        for i in range(alg.dim):
            n += 1
            br = poisson_bracket(alg, p, CPoly.var(alg.dim, i))
            if br:
                ok, wit = False, f"{{p{k}, {alg.variables[i]}}} = {render_cpoly(br, alg.variables)}"
                break
        if not ok:
            break
    out.append(CheckResult("casimir/poisson-central", ok, n, wit))
    if alg.n_rank_matrix == 2:
        qs = [q for q in adjoint_charpoly_invariants(alg) if q]
        ok, wit, n = True, "", 0
        for _ in range(3):
            pt = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(alg.dim)]
            gens = [p - p.evaluate(pt) for p in inv.generators]
            gb = buchberger(gens, MonomialOrder.grlex(alg.dim))
            for q in qs:
                n += 1
                r = normal_form(q - q.evaluate(pt), gb)
                if r:
                    ok = False
                    wit = (f"point {[format_rational(x) for x in pt]}: "
                           f"NF({render_cpoly(q, alg.variables)} - value) = "
                           f"{render_cpoly(r, alg.variables)}")
                    break
            if not ok:
                break
        out.append(CheckResult("casimir/adjoint-charpoly", ok, n, wit))
    return out


def _random_poly(alg, rng, max_deg, nterms=3) -> CPoly:
    pool = monomials_up_to(alg.dim, max_deg)
    t = {m: HPoly.const(Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3)))
         for m in rng.sample(pool, min(nterms, len(pool)))}
    return CPoly(alg.dim, t)


def intertwining_check(alg: LieAlgebraData, rng: random.Random, trials: int = 100) -> CheckResult:
    """ad(X_i) W(f) = h W(X_i . f): exhaustive on monomials of degree <= 4 for
    sl(2), random polynomials of degree <= 3 otherwise."""
    if alg.n_rank_matrix == 2:
        cases = [(CPoly.monomial(m), i) for m in monomials_up_to(alg.dim, 4)
                 for i in range(alg.dim)]
    else:
        cases = [(_random_poly(alg, rng, 3), rng.randrange(alg.dim)) for _ in range(trials)]
    for n, (f, i) in enumerate(cases, 1):
        lhs = ad_action(alg, i, weyl_map(f, alg))
        rhs = weyl_map(coadjoint_action(alg, i, f), alg).scale(H)
        if lhs != rhs:
            return CheckResult("weyl/intertwining", False, n,
                               f"i={alg.basis_labels[i]}; f={render_cpoly(f, alg.variables)}; "
                               f"ad W f = {render_pbw(lhs)}; h W(X.f) = {render_pbw(rhs)}")
    return CheckResult("weyl/intertwining", True, len(cases))


def _ideal_checks(ctx: Context, rng: random.Random) -> list[CheckResult]:
    sp, pres = ctx.spec, ctx.pres
    names = ctx.alg.variables
    out = []
    gb = buchberger(pres.generators, ctx.order)
    dim = krull_dimension(gb)
    out.append(CheckResult("ideal/krull-dimension", dim == sp.expected_dimension(), 1,
                           "" if dim == sp.expected_dimension()
                           else f"Krull dimension {dim}, orbit dimension {sp.expected_dimension()}"))
    ok, wit = True, ""
    for n in range(20):
        g = random_unimodular(sp.n, rng)
        pt = conjugate_point(sp, g)
        if not on_orbit(pres, pt):
            bad = next(r for r in pres.generators if r.evaluate(pt))
            ok, wit = False, (f"conjugate by {[[format_rational(x) for x in row] for row in g]}: "
                              f"{render_cpoly(bad, names)} = "
                              f"{format_rational(bad.evaluate(pt).constant_term())}")
            break
    out.append(CheckResult("ideal/conjugate-membership", ok, 20, wit))
    if sp.is_regular():
        g1 = buchberger(regular_generators(sp).generators, ctx.order)
        g2 = buchberger(minimalpoly_generators(sp).generators, ctx.order)
        same = g1 == g2
        wit = "" if same else (f"invariants: {[render_cpoly(g, names) for g in g1.generators]}; "
                               f"minimal polynomial: {[render_cpoly(g, names) for g in g2.generators]}")
        out.append(CheckResult("ideal/presentations-agree", same, 1, wit))
    return out


def _lemma1_check(ctx: Context) -> CheckResult:
    try:
        lifted = lift_ideal(ctx.pres, ctx.cert, ctx.args.lift)
    except Lemma1Violation as exc:
        return CheckResult("lemma1/left-equals-right", False, 0, str(exc))
    bad = lemma1_defects(ctx.pres, ctx.cert, lifted.R)
    count = ctx.alg.dim * len(lifted.R)
    if bad:
        i, a, res = bad[0]
        return CheckResult("lemma1/left-equals-right", False, count,
                           f"i={ctx.alg.basis_labels[i]}; a={a}; residual {render_pbw(res)}")
    return CheckResult("lemma1/left-equals-right", True, count)


def _evaluation_checks(ctx: Context, eng, rng: random.Random) -> list[CheckResult]:
    from .starquant import SingularEvaluation
    out = []
    ev0 = None
    for text in EVAL_POINTS:
        h0 = as_rational(text)
        name = f"evaluation/h0={text}"
        try:
            ev = evaluate_engine_h(eng, h0)
        except SingularEvaluation as exc:
            out.append(CheckResult(name, False, 1, f"SingularEvaluation: {exc}"))
            continue
        if h0 == 0:
            ev0 = ev
        ok = ev.rank_by_degree == eng.rank_by_degree and evaluated_table_consistent(ev)
        wit = "" if ok else (f"ranks {ev.rank_by_degree} vs {eng.rank_by_degree}; "
                             f"table consistent: {evaluated_table_consistent(ev)}")
        out.append(CheckResult(name, ok, 1, wit))
    if ev0 is None:
        out.append(CheckResult("evaluation/projection-h0=0", False, 0, "no engine at h0 = 0"))
        return out
    ok, wit = True, ""
    for n in range(100):
        f = _random_poly(ctx.alg, rng, eng.D, nterms=4)
        lhs = ev0.nf(f)
        rhs = normal_form(f, eng.gb)
        if lhs != rhs:
            ok, wit = False, (f"f={_show(ctx, f)}; engine at h=0: {_show(ctx, lhs)}; "
                              f"normal form: {_show(ctx, rhs)}")
            break
    out.append(CheckResult("evaluation/projection-h0=0", ok, 100, wit))
    return out


def run_suite(ctx: Context, D: int) -> list[CheckResult]:
    args = ctx.args
    rng = random.Random(args.seed)
    alg = ctx.alg
    results = []

    def timed(label, fn):
        t0 = time.perf_counter()
        r = fn()
        ctx.tick(label, t0)
        return r

    jac = timed("jacobi", lambda: jacobi_defects(alg))
    results.append(CheckResult("structure/jacobi", not jac, alg.dim ** 3,
                               f"triple {jac[0]}" if jac else ""))
    sd = structure_defects(alg)
    results.append(CheckResult("structure/defining-rep", not sd, alg.dim ** 2,
                               f"pair {sd[0]}" if sd else ""))
    results += timed("casimir", lambda: _casimir_checks(alg, rng))
    results.append(timed("intertwining", lambda: intertwining_check(alg, rng)))
    results += timed("ideal", lambda: _ideal_checks(ctx, rng))
    lem = timed("lemma1", lambda: _lemma1_check(ctx))
    results.append(lem)
    if not lem.passed:
        return results
    eng = _engine(ctx, D, strict=False)
    rep = timed("theorem", lambda: check_theorem(eng, trials=args.trials, seed=args.seed))
    results += [CheckResult("theorem/" + r.name, r.passed, r.count, r.witness)
                for r in rep.results]
    results += timed("evaluation", lambda: _evaluation_checks(ctx, eng, rng))
    if alg.n_rank_matrix == 2 and args.priority is None:
        rev = MonomialOrder.grlex(alg.dim, list(reversed(range(alg.dim))))
        eng2 = _engine(ctx, D, strict=False, order=rev)
        rep2 = check_theorem(eng2, trials=min(args.trials, 10), seed=args.seed)
        bad = [r for r in rep2.results if not r.passed]
        wit = "" if not bad else f"{bad[0].name}: {bad[0].witness}"
        prio = ",".join(alg.variables[i] for i in rev.priority)
        results.append(CheckResult(f"theorem/priority={prio}", not bad, len(rep2.results), wit))
    return results


def cmd_check(ctx: Context) -> int:
    _need_orbit(ctx)
    D = ctx.args.deg if ctx.args.deg is not None else default_degree(ctx.pres)
    results = run_suite(ctx, D)
    failed = [r for r in results if not r.passed]
    payload = {"verb": "check", **_orbit_header(ctx), "lift": ctx.args.lift, "max_degree": D,
               "results": [{"name": r.name, "status": "pass" if r.passed else "fail",
                            "count": r.count, "witness": r.witness} for r in results],
               "passed": not failed}
    lines = [f"oq check {ctx.alg.name} {ctx.spec.describe()} source={ctx.pres.source} "
             f"lift={ctx.args.lift} D={D}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status} {r.name} ({r.count})" + (f": {r.witness}" if r.witness else ""))
    lines.append(f"{len(results) - len(failed)} passed, {len(failed)} failed")
    _emit(ctx, payload, lines)
    return EXIT_CHECK if failed else EXIT_OK


COMMANDS = {
    "algebra": cmd_algebra, "invariants": cmd_invariants, "orbit": cmd_orbit,
    "ideal": cmd_ideal, "gb": cmd_gb, "stdmon": cmd_stdmon, "lift": cmd_lift,
    "engine": cmd_engine, "star": cmd_star, "check": cmd_check, "eval": cmd_eval,
}

DOMAIN_ERRORS = (OrbitError, InvalidRank, RepresentationFailure, ArithmeticError,
                 AssertionError, ValueError)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        ctx = make_context(args)
        code = COMMANDS[args.verb](ctx)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ParseError, UnknownVariable) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DOMAIN_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if ctx.timings:
        for k, v in ctx.timings.items():
            print(f"timing {k}: {v:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
