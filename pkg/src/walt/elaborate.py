"""Build derivations from annotated proof terms.

A proof term fixes every choice the rules leave open: binder kind and type,
where boxes go, and the instances of quantifiers.  The elaborator computes
contexts bottom-up, adds weakening at binders and contracts repeated
polynomial variables inside ``$``-boxes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

from .derivations import (
    Derivation, Judgment, Pair, box_ctx, check_derivation, ctx, dom, eps, merge,
)
from .formulas import Bang, Eager, Forall, Formula, Lin, Par, free_tvars, is_linear, show, subst_type
from .terms import Abs, App, Term, Var, occurrences, substitute

LIN, PAR, BANG, EAGER = "lin", "par", "bang", "eager"
G, D, T, F = "G", "D", "T", "F"
_ZONE_OF_KIND = {LIN: G, PAR: D, BANG: F, EAGER: T}


class ElaborationError(ValueError):
    pass


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PLam:
    binder: str
    kind: str
    ty: Formula
    body: "Proof"


@dataclass(frozen=True)
class PApp:
    fun: "Proof"
    arg: "Proof"


@dataclass(frozen=True)
class PBox:
    kind: str  # "$" or "!"
    body: "Proof"


@dataclass(frozen=True)
class PGen:
    var: str
    body: "Proof"


@dataclass(frozen=True)
class PInst:
    body: "Proof"
    ty: Formula


@dataclass(frozen=True)
class PClosed:
    """A pre-checked derivation of a closed term with empty contexts."""
    deriv: Derivation


@dataclass(frozen=True, eq=False)
class PTerm:
    """A closed term with a stated formula but no derivation."""
    term: Term
    ty: Formula


Proof = Union[PVar, PLam, PApp, PBox, PGen, PInst, PClosed, PTerm]


# -- small constructors ------------------------------------------------------------

def plam(spec: list[tuple[str, str, Formula]], body: Proof) -> Proof:
    for x, kind, ty in reversed(spec):
        body = PLam(x, kind, ty, body)
    return body


def papp(head: Proof | str, *args: Proof | str) -> Proof:
    p = PVar(head) if isinstance(head, str) else head
    for a in args:
        p = PApp(p, PVar(a) if isinstance(a, str) else a)
    return p


def pbox(body: Proof, n: int = 1) -> Proof:
    for _ in range(n):
        body = PBox("$", body)
    return body


def erase(p: Proof) -> Term:
    if isinstance(p, PVar):
        return Var(p.name)
    if isinstance(p, PLam):
        return Abs(p.binder, erase(p.body))
    if isinstance(p, PApp):
        return App(erase(p.fun), erase(p.arg))
    if isinstance(p, (PBox, PGen)):
        return erase(p.body)
    if isinstance(p, PInst):
        return erase(p.body)
    if isinstance(p, PTerm):
        return p.term
    return p.deriv.conclusion.subject


# -- conclusion builders (also used when weakening rebuilds a node) ------------------

def _node(rule: str, premises: tuple, params: dict = None) -> Derivation:
    params = params or {}
    ps = [p.conclusion for p in premises]
    if rule in ("-oI", "-oI$", "-oI!", "=oI"):
        (p,) = ps
        x = params["x"]
        subj = Abs(x, p.subject)
        if rule == "-oI":
            a = dict(p.gamma)[x]
            c = Judgment(p.gamma - {(x, a)}, p.delta, p.eps, subj, Lin(a, p.formula))
        elif rule == "-oI$":
            a = dict(p.delta)[x]
            c = Judgment(p.gamma, p.delta - {(x, a)}, p.eps, subj, Lin(Par(a), p.formula))
        elif rule == "-oI!":
            (q,) = [q for q in p.eps if dom(q.phi) == {x}]
            (_, a), = q.phi
            rest = frozenset(e for e in p.eps if e is not q)
            c = Judgment(p.gamma, p.delta, merge(rest, eps(Pair(q.theta))), subj,
                         Lin(Bang(a), p.formula))
        else:
            (q,) = [q for q in p.eps if not q.phi and x in dom(q.theta)]
            a = dict(q.theta)[x]
            rest = frozenset(e for e in p.eps if e is not q)
            c = Judgment(p.gamma, p.delta, merge(rest, eps(Pair(q.theta - {(x, a)}))), subj,
                         Eager(Par(a), p.formula))
    elif rule in ("-oE", "-oE!", "=oE"):
        pm, pn = ps
        subj = App(pm.subject, pn.subject)
        c = Judgment(pm.gamma | pn.gamma, pm.delta | pn.delta, merge(pm.eps, pn.eps, rule),
                     subj, pm.formula.cod)
    elif rule == "C":
        (p,) = ps
        x, y, z = params["x"], params["y"], params["z"]
        (qx,) = [q for q in p.eps if dom(q.phi) == {x}]
        (qy,) = [q for q in p.eps if dom(q.phi) == {y}]
        (_, a), = qx.phi
        rest = frozenset(q for q in p.eps if q is not qx and q is not qy)
        e = merge(rest, eps(Pair(qx.theta | qy.theta, frozenset({(z, a)}))), "C")
        subj = substitute(p.subject, {x: Var(z), y: Var(z)})
        c = Judgment(p.gamma, p.delta, e, subj, p.formula)
    elif rule == "AI":
        (p,) = ps
        c = Judgment(p.gamma, p.delta, p.eps, p.subject, Forall(params["var"], p.formula))
    elif rule == "AE":
        (p,) = ps
        f = p.formula
        c = Judgment(p.gamma, p.delta, p.eps, p.subject, subst_type(f.body, f.var, params["instance"]))
    else:
        raise ElaborationError(f"no builder for rule {rule}")
    return Derivation(rule, tuple(premises), c, tuple(sorted(params.items())))


def _par_box(prem: Derivation, gamma, delta_extra, pairs: list[Pair]) -> Derivation:
    p = prem.conclusion
    theta0 = next(iter(p.eps)).theta if p.eps else frozenset()
    e = eps(Pair(box_ctx(theta0)))
    for q in pairs:
        e = merge(e, eps(q), "$")
    c = Judgment(frozenset(gamma), box_ctx(p.delta) | frozenset(delta_extra), e, p.subject,
                 Par(p.formula))
    return Derivation("$", (prem,), c, (("pairs", tuple(pairs)),))


def _bang_box(prem: Derivation, gamma, delta, pair: Pair) -> Derivation:
    p = prem.conclusion
    theta0 = next(iter(p.eps)).theta if p.eps else frozenset()
    e = merge(eps(Pair(box_ctx(theta0))), eps(pair), "!")
    c = Judgment(frozenset(gamma), frozenset(delta), e, p.subject, Bang(p.formula))
    return Derivation("!", (prem,), c, (("pair", pair),))


# -- weakening ------------------------------------------------------------------------

def weaken(d: Derivation, zone: str, x: str, a: Formula) -> Derivation | None:
    """Add an unused assumption to the conclusion, or None if no rule admits it."""
    c, r = d.conclusion, d.rule
    entry = frozenset({(x, a)})
    if r == "A":
        if zone in (G, D):
            attr = "gamma" if zone == G else "delta"
            return _replace_conclusion(d, **{attr: getattr(c, attr) | entry})
        return _replace_conclusion(d, eps=merge(c.eps, _zone_pair(zone, x, a)))
    if r == "$":
        if zone == G:
            return _replace_conclusion(d, gamma=c.gamma | entry)
        if zone == D:
            return _replace_conclusion(d, delta=c.delta | entry)
        pair = next(iter(_zone_pair(zone, x, a)))
        pairs = tuple(d.param("pairs", ())) + (pair,)
        return Derivation("$", d.premises, Judgment(c.gamma, c.delta, merge(c.eps, eps(pair)),
                                                     c.subject, c.formula), (("pairs", pairs),))
    if r == "!":
        if zone == G:
            return _replace_conclusion(d, gamma=c.gamma | entry)
        if zone == D:
            return _replace_conclusion(d, delta=c.delta | entry)
        return None
    if r == "AI" and d.param("var") in free_tvars(a):
        return None
    order = range(len(d.premises))
    if r == "-oE!" and zone == T:
        order = [1, 0]
    if r == "=oE" and zone in (G, D, F):
        order = [0]
    for i in order:
        w = weaken(d.premises[i], zone, x, a)
        if w is not None:
            ps = list(d.premises)
            ps[i] = w
            return _node(r, tuple(ps), dict(d.params))
    return None


def _zone_pair(zone: str, x: str, a: Formula):
    return eps(Pair(frozenset({(x, a)}))) if zone == T else eps(Pair(frozenset(), frozenset({(x, a)})))


def _replace_conclusion(d: Derivation, **kw) -> Derivation:
    c = d.conclusion
    fields = dict(gamma=c.gamma, delta=c.delta, eps=c.eps, subject=c.subject, formula=c.formula)
    fields.update(kw)
    return Derivation(d.rule, d.premises, Judgment(**fields), d.params)


# -- elaboration ------------------------------------------------------------------------

_counter = itertools.count()


def _fresh(x: str) -> str:
    return f"{x}#{next(_counter)}"


def _rename_occurrences(p: Proof, x: str, names: list) -> Proof:
    """Give each free occurrence of ``x`` its own name, in order."""
    if isinstance(p, PVar):
        return PVar(names.pop(0)) if p.name == x else p
    if isinstance(p, PLam):
        if p.binder == x:
            return p
        return PLam(p.binder, p.kind, p.ty, _rename_occurrences(p.body, x, names))
    if isinstance(p, PApp):
        f = _rename_occurrences(p.fun, x, names)
        return PApp(f, _rename_occurrences(p.arg, x, names))
    if isinstance(p, PBox):
        return PBox(p.kind, _rename_occurrences(p.body, x, names))
    if isinstance(p, PGen):
        return PGen(p.var, _rename_occurrences(p.body, x, names))
    if isinstance(p, PInst):
        return PInst(_rename_occurrences(p.body, x, names), p.ty)
    return p


def _count(p: Proof, x: str) -> int:
    return occurrences(x, erase(p))


def elaborate(p: Proof, env: dict | None = None) -> Derivation:
    """Derivation for ``p``; ``env`` maps free names to ``(zone, formula)``."""
    return _elab(p, dict(env or {}))


def _elab(p: Proof, env: dict) -> Derivation:
    if isinstance(p, PVar):
        if p.name not in env:
            raise ElaborationError(f"unbound variable {p.name}")
        zone, a = env[p.name]
        if zone != G:
            raise ElaborationError(f"{p.name} ({zone}:{show(a)}) used outside a box of the right kind")
        c = Judgment(ctx({p.name: a}), frozenset(), frozenset(), Var(p.name), a)
        return Derivation("A", (), c)
    if isinstance(p, PTerm):
        raise ElaborationError(f"no derivation available for a component of formula {show(p.ty)}")
    if isinstance(p, PClosed):
        c = p.deriv.conclusion
        if c.gamma or c.delta or c.eps:
            raise ElaborationError("embedded derivation is not closed")
        return p.deriv
    if isinstance(p, PLam):
        if p.kind == LIN and not is_linear(p.ty):
            raise ElaborationError(f"linear binder {p.binder} needs a linear formula")
        inner = dict(env)
        inner[p.binder] = (_ZONE_OF_KIND[p.kind], p.ty)
        d = _elab(p.body, inner)
        if p.binder not in d.conclusion.domain():
            w = weaken(d, _ZONE_OF_KIND[p.kind], p.binder, p.ty)
            if w is None:
                raise ElaborationError(f"cannot weaken {p.binder}")
            d = w
        rule = {LIN: "-oI", PAR: "-oI$", BANG: "-oI!", EAGER: "=oI"}[p.kind]
        return _node(rule, (d,), {"x": p.binder})
    if isinstance(p, PApp):
        dm = _elab(p.fun, env)
        dn = _elab(p.arg, env)
        f = dm.conclusion.formula
        if isinstance(f, Eager):
            rule = "=oE"
        elif isinstance(f, Lin):
            rule = "-oE!" if isinstance(f.dom, Bang) else "-oE"
        else:
            raise ElaborationError(f"applying a term of formula {show(f)}")
        return _node(rule, (dm, dn))
    if isinstance(p, PGen):
        return _node("AI", (_elab(p.body, env),), {"var": p.var})
    if isinstance(p, PInst):
        d = _elab(p.body, env)
        if not isinstance(d.conclusion.formula, Forall):
            raise ElaborationError("instantiating a formula without quantifier")
        return _node("AE", (d,), {"instance": p.ty})
    if p.kind == "$":
        return _elab_par_box(p, env)
    return _elab_bang_box(p, env)


def _elab_par_box(p: PBox, env: dict) -> Derivation:
    body, copies = p.body, {}
    for x, (zone, a) in env.items():
        if zone == F and is_linear(a):
            k = _count(body, x)
            if k > 1:
                names = [_fresh(x) for _ in range(k)]
                copies[x] = list(names)
                body = _rename_occurrences(body, x, names)
    inner, origin = {}, {}
    for x, (zone, a) in env.items():
        if zone == G:
            continue
        if is_linear(a) and zone in (D, T, F):
            for y in copies.get(x, [x]):
                inner[y] = (G, a)
                origin[y] = zone
        elif isinstance(a, Par) and zone in (D, T):
            inner[x] = (zone, a.body)
    prem = _elab(body, inner)
    pc = prem.conclusion
    if len(pc.eps) > 1 or any(q.phi for q in pc.eps):
        raise ElaborationError("polynomial assumption inside a $-box")
    delta_extra, pairs = [], []
    for x, a in pc.gamma:
        z = origin[x]
        if z == D:
            delta_extra.append((x, a))
        elif z == T:
            pairs.append(Pair(frozenset({(x, a)})))
        else:
            pairs.append(Pair(frozenset(), frozenset({(x, a)})))
    d = _par_box(prem, (), delta_extra, sorted(pairs, key=str))
    for x, names in copies.items():
        cur = names[0]
        for i, y in enumerate(names[1:], 1):
            z = x if i == len(names) - 1 else _fresh(x)
            d = _node("C", (d,), {"x": cur, "y": y, "z": z})
            cur = z
    return d


def _elab_bang_box(p: PBox, env: dict) -> Derivation:
    inner, origin = {}, {}
    for x, (zone, a) in env.items():
        if zone in (T, F) and is_linear(a):
            inner[x] = (G, a)
            origin[x] = zone
        elif zone == T and isinstance(a, Par):
            inner[x] = (T, a.body)
    prem = _elab(p.body, inner)
    pc = prem.conclusion
    if pc.delta or len(pc.eps) > 1 or any(q.phi for q in pc.eps):
        raise ElaborationError("!-box premise must have the form G; ; {(T;)}")
    theta = frozenset((x, a) for x, a in pc.gamma if origin[x] == T)
    phi = frozenset((x, a) for x, a in pc.gamma if origin[x] == F)
    if len(phi) > 1:
        raise ElaborationError("!-box uses more than one polynomial assumption")
    return _bang_box(prem, (), (), Pair(theta, phi))


def derive(p: Proof, env: dict | None = None) -> Derivation:
    """Elaborate and then check; raises on any rule violation."""
    d = elaborate(p, env)
    check_derivation(d)
    return d
