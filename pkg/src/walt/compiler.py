"""Translation of SRN definitions and terms into typed lambda terms."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import combinators as cb
from .combinators import TypedTerm, _finish, _hole, untyped
from .derivations import Derivation
from .elaborate import EAGER, PVar, papp, pbox, plam
from .formulas import W, Eager, alpha_eq_type, modal_depth, pars, srn_formula
from .reducer import LEFTMOST_OUTERMOST, normalize
from .srn import (
    ApplyDef, Branch, Comp, Lit, Pred, Proj, Rec, S0, S1, SrnDef, SrnTerm, UnboundVariable, Var,
    Zero, arity, eval_term, is_clsrn, is_linear_comp, numeral, show_def, show_term, weight,
)
from .terms import Term, alpha_eq, lam, app
from .words import decode_word, word as word_term


class CompileError(ValueError):
    """A definition the translation cannot handle."""


@dataclass(eq=False)
class CompiledDef:
    source: SrnDef
    target: TypedTerm
    m: int
    clause: str
    routing: dict = field(default_factory=dict)

    @property
    def term(self) -> Term:
        return self.target.term

    @property
    def derivation(self) -> Optional[Derivation]:
        return self.target.derivation


def result_depth(formula) -> int:
    """Exponent m of the result ``$^m W`` after all eager slots."""
    while isinstance(formula, Eager):
        formula = formula.cod
    return modal_depth(formula)


def has_srn_shape(c: CompiledDef) -> bool:
    """Formula is ``($W =o)^k ($^m W =o)^l $^m W`` with m >= 1 for the source arities."""
    k, l = arity(c.source)
    return c.m >= 1 and alpha_eq_type(c.target.formula, srn_formula(k, l, c.m))


_MEMO: dict = {}
_LOCK = threading.RLock()


def compile_def(f: SrnDef) -> CompiledDef:
    """Translate a definition clause by clause; results are memoized structurally."""
    with _LOCK:
        hit = _MEMO.get(f)
        if hit is None:
            hit = _compile(f)
            _MEMO[f] = hit
        return hit


def clear_cache() -> None:
    with _LOCK:
        _MEMO.clear()


def _binders(k: int, l: int, m: int) -> list:
    return [(f"n{i}", EAGER, W) for i in range(1, k + 1)] + \
           [(f"s{j}", EAGER, pars(m - 1, W)) for j in range(1, l + 1)]


def _compile(f: SrnDef) -> CompiledDef:
    k, l = arity(f)
    if isinstance(f, Zero):
        body = _hole(cb.lembed(1, 0, cb.word(0)))
        t = _finish("zero", (k, l), plam(_binders(k, l, 1), body), srn_formula(k, l, 1))
        return CompiledDef(f, t, 1, "zero")
    if isinstance(f, (S0, S1, Pred)):
        d = {S0: 0, S1: 1, Pred: 2}[type(f)]
        return CompiledDef(f, cb.bembed(1, cb.ws(d)), 1, show_def(f))
    if isinstance(f, Proj):
        spec = _binders(k, l, 1)
        t = _finish("proj", (k, l, f.i), plam(spec, pbox(PVar(spec[f.i - 1][0]))), srn_formula(k, l, 1))
        return CompiledDef(f, t, 1, "proj")
    if isinstance(f, Branch):
        spec = _binders(0, 3, 1)
        body = pbox(papp(_hole(cb.ws(3)), *[PVar(x) for x, _, _ in spec]))
        return CompiledDef(f, _finish("branch", (), plam(spec, body), srn_formula(0, 3, 1)), 1, "branch")
    if isinstance(f, Comp):
        return _compile_comp(f)
    if isinstance(f, Rec):
        return _compile_rec(f)
    raise CompileError(f"not a definition: {f!r}")


def _normalized(c: CompiledDef, p: int, clamped: list) -> TypedTerm:
    """Component at depth p: deepen its slots and rebuild its normal arguments."""
    k, l = arity(c.source)
    e = p - c.m - 1
    if e < 0:
        clamped.append((show_def(c.source), e))
    body = cb.eembed(p - c.m, k, l, c.target)
    coer = cb.lembed(1, 1, cb.coerce(max(e, 0))).term
    xs = [f"x{i}" for i in range(1, k + 1)]
    term = lam(xs, app(body.term, *[app(coer, x) for x in xs]))
    return untyped(term, srn_formula(k, l, p), "component", (p,), "depth-normalized component")


def _compile_comp(f: Comp) -> CompiledDef:
    parts = [compile_def(x) for x in (f.f,) + f.normals + f.safes]
    p = max(c.m for c in parts)
    clamped: list = []
    fn, *rest = [_normalized(c, p, clamped) for c in parts]
    gs, hs = rest[:f.kp], rest[f.kp:]
    if f.linear:
        t = cb.lincomp(f.k, fn, gs, hs, p)
        m = result_depth(t.formula)
        routing = {"route": "lincomp", "p": p, "blocks": list(f.blocks), "clamped": clamped}
        return CompiledDef(f, t, m, "lcomp", routing)
    s = max(list(f.blocks) + [f.lp])
    sq = cb.sqcomp(f.k, s, f.kp, fn, gs, hs, p)
    t = cb.mshsqcomp(f.k, s, s, 2 * p + 1, sq)
    m = result_depth(t.formula)
    routing = {"route": "sqcomp", "p": p, "s": s, "sqcomp": [f.k, s, f.kp],
               "mshsqcomp": [f.k, s, s, 2 * p + 1], "padding": s - f.l, "clamped": clamped}
    if s > f.l:
        # safe arities below the maximum: feed zeros to the unused slots
        ns = [f"n{i}" for i in range(1, f.k + 1)]
        ys = [f"y{j}" for j in range(1, f.l + 1)]
        zero = word_term(0)
        term = lam(ns + ys, app(t.term, *ns, *ys, *[zero] * (s - f.l)))
        t = untyped(term, srn_formula(f.k, f.l, m), "comp", (f.k, f.l), t.note)
    else:
        t = untyped(t.term, t.formula, "comp", (f.k, f.l), t.note)
    return CompiledDef(f, t, m, "comp", routing)


def _compile_rec(f: Rec) -> CompiledDef:
    g, h0, h1 = (compile_def(x) for x in (f.g, f.h0, f.h1))
    p = max(g.m, h0.m, h1.m)
    k = f.k - 1
    spec = [("n0", EAGER, W)] + _binders(k, f.l, g.m) + [("r", EAGER, pars(g.m - 1, W))]
    body = papp(_hole(g.target), *[pbox(PVar(f"n{i}")) for i in range(1, k + 1)],
                *[pbox(PVar(f"s{j}"), g.m) for j in range(1, f.l + 1)])
    wrapped = _finish("rec-base", (k, f.l), plam(spec, body), srn_formula(k + 1, f.l + 1, g.m))
    base = cb.eembed(p - g.m, k + 1, f.l + 1, wrapped)
    steps = [cb.eembed(p - h.m, k + 1, f.l + 1, h.target) for h in (h0, h1)]
    t = cb.iterator(k, f.l, steps[0], steps[1], base, p)
    return CompiledDef(f, t, p + 4, "rec", {"route": "iterator", "p": p})


# -------------------------------------------------------------- interpretation


@dataclass(eq=False)
class CompiledTerm:
    source: SrnTerm
    env: dict
    target: TypedTerm
    depth: int

    @property
    def term(self) -> Term:
        return self.target.term

    @property
    def derivation(self) -> Optional[Derivation]:
        return self.target.derivation


def close(t: SrnTerm, env) -> SrnTerm:
    """Replace variables by their values as literals."""
    if isinstance(t, Var):
        if t.name not in env:
            raise UnboundVariable(t.name)
        return Lit(env[t.name])
    if isinstance(t, Lit):
        return t
    return ApplyDef(t.f, [close(a, env) for a in t.args])


def interpret(t: SrnTerm, env=None) -> CompiledTerm:
    """Translate a term; variables and literals go through their numeral terms."""
    env = dict(env or {})
    out = _interp(close(t, env))
    return CompiledTerm(t, env, out[0], out[1])


_TERM_MEMO: dict = {}


def _interp(t: SrnTerm) -> tuple:
    with _LOCK:
        hit = _TERM_MEMO.get(t)
    if hit is not None:
        return hit
    if isinstance(t, Lit):
        out = _interp(numeral(t.n))
    else:
        c = compile_def(t.f)
        k = arity(t.f)[0]
        subs = [_interp(a) for a in t.args]
        normals, safes = subs[:k], subs[k:]
        u = max([c.m] + [d for _, d in normals])
        v = max([u - 1 + c.m] + [d for _, d in safes])
        inner = cb.apply_eager(cb.deepen(u - 1, c.target), [(x, u - d) for x, d in normals])
        outer = cb.apply_eager(cb.deepen(v - u + 1 - c.m, inner), [(x, v - d) for x, d in safes])
        out = (outer, v)
    with _LOCK:
        _TERM_MEMO[t] = out
    return out


# ------------------------------------------------------------------- reports


def check_soundness(t: SrnTerm, env=None, max_steps: int = 10_000_000,
                    strategy: str = LEFTMOST_OUTERMOST) -> dict:
    """Oracle value against the normal form of the translation."""
    env = dict(env or {})
    closed = close(t, env)
    n = eval_term(closed)
    ct = interpret(closed)
    nf, steps, done = normalize(ct.term, max_steps=max_steps, strategy=strategy)
    w = weight(closed)
    equal = done and alpha_eq(nf, word_term(n))
    return {
        "term": show_term(t),
        "env": env,
        "oracle": n,
        "normal_form": decode_word(nf) if done else None,
        "equal": bool(equal),
        "steps": steps,
        "exhausted": not done,
        "depth": ct.depth,
        "typed": ct.derivation is not None,
        "weight": str(w),
        "depth_within_weight": Fraction(ct.depth) <= w,
    }


def full_to_linear_report(f: SrnDef) -> dict:
    """Linearity of ``f`` and the square-composition parameters of each composition node."""
    nodes = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Comp):
            s = max(list(g.blocks) + [g.lp])
            nodes.append({
                "def": show_def(g),
                "linear": is_linear_comp(g),
                "route": "lincomp" if g.linear else "sqcomp",
                "s": s,
                "sqcomp": [g.k, s, g.kp],
                "padding": max(s - g.l, 0),
            })
            stack.extend(reversed((g.f,) + g.normals + g.safes))
        elif isinstance(g, Rec):
            stack.extend([g.h1, g.h0, g.g])
    return {"def": show_def(f), "clsrn": is_clsrn(f), "compositions": nodes}
