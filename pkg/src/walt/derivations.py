"""Judgments ``G; D; E |- M : A`` and a checker for derivations built from the
thirteen typing rules.

Zones: ``gamma`` holds linear assignments, ``delta`` the partially discharged
ones, ``eps`` a set of pairs ``(theta; phi)`` of elementary assignments and at
most one polynomial assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .formulas import (
    Bang, Eager, Forall, Formula, Lin, Par, alpha_eq_type, free_tvars, is_linear,
    parse_formula, show, subst_type,
)
from .terms import Abs, App, Term, Var, alpha_eq, parse_term, print_term, substitute

Ctx = frozenset  # of (name, Formula)

RULES = ("A", "C", "-oI", "-oI$", "-oE", "-oI!", "-oE!", "=oI", "=oE", "$", "!", "AI", "AE")


class Violation(Exception):
    """A failed rule condition: rule name, condition text, offending zone."""

    def __init__(self, rule: str, condition: str, zone: str = "", detail: str = ""):
        self.rule, self.condition, self.zone, self.detail = rule, condition, zone, detail
        msg = f"[{rule}] {condition}"
        if zone:
            msg += f" (zone {zone})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class StructureViolation(Violation):
    pass


def ctx(items: Mapping[str, Formula] | Iterable[tuple[str, Formula]] = ()) -> Ctx:
    if isinstance(items, Mapping):
        items = items.items()
    return frozenset(items)


def dom(c: Iterable[tuple[str, Formula]]) -> set:
    return {x for x, _ in c}


def _as_dict(c: Ctx, zone: str, rule: str = "judgment") -> dict:
    out: dict = {}
    for x, a in c:
        if x in out:
            raise StructureViolation(rule, "an assignment set binds each variable once", zone, x)
        out[x] = a
    return out


@dataclass(frozen=True)
class Pair:
    theta: Ctx = frozenset()
    phi: Ctx = frozenset()

    def __str__(self) -> str:
        return f"({_show_ctx(self.theta)}; {_show_ctx(self.phi)})"


Eps = frozenset  # of Pair


def eps(*pairs: Pair) -> Eps:
    return frozenset(p for p in pairs if p.theta or p.phi)


def eps_dom(e: Eps) -> set:
    out = set()
    for p in e:
        out |= dom(p.theta) | dom(p.phi)
    return out


def check_eps(e: Eps, rule: str = "judgment") -> None:
    empties = [p for p in e if not p.phi]
    if len(empties) > 1:
        raise StructureViolation(rule, "only one pair may have an empty polynomial part", "E")
    seen: set = set()
    for p in e:
        if len(p.phi) > 1:
            raise StructureViolation(rule, "a polynomial part is empty or a singleton", "E", str(p))
        for x in dom(p.phi):
            if x in seen:
                raise StructureViolation(rule, "polynomial domains are pairwise distinct", "E", x)
            seen.add(x)
    names: set = set()
    for p in e:
        for x in list(dom(p.theta)) + list(dom(p.phi)):
            if x in names:
                raise StructureViolation(rule, "domains inside E are pairwise disjoint", "E", x)
            names.add(x)


def merge(e1: Eps, e2: Eps, rule: str = "merge") -> Eps:
    """Union of two partially discharged contexts; pairs sharing their
    polynomial part are fused."""
    out = []
    by_phi2 = {p.phi: p for p in e2}
    matched = set()
    for p in e1:
        q = by_phi2.get(p.phi)
        if q is not None:
            clash = dom(p.theta) & dom(q.theta)
            if clash:
                raise StructureViolation(rule, "elementary domains of merged pairs are disjoint", "E",
                                         ", ".join(sorted(clash)))
            out.append(Pair(p.theta | q.theta, p.phi))
            matched.add(q.phi)
        else:
            out.append(p)
    out.extend(q for q in e2 if q.phi not in matched)
    result = eps(*out)
    check_eps(result, rule)
    return result


def box_ctx(c: Ctx) -> Ctx:
    """``$C``: prefix every formula with ``$``."""
    return frozenset((x, Par(a)) for x, a in c)


@dataclass(frozen=True)
class Judgment:
    gamma: Ctx
    delta: Ctx
    eps: Eps
    subject: Term
    formula: Formula

    def domain(self) -> set:
        return dom(self.gamma) | dom(self.delta) | eps_dom(self.eps)

    def __str__(self) -> str:
        es = ", ".join(sorted(str(p) for p in self.eps))
        return (f"{_show_ctx(self.gamma)}; {_show_ctx(self.delta)}; {{{es}}} |- "
                f"{print_term(self.subject)} : {show(self.formula)}")


def _show_ctx(c: Ctx) -> str:
    return ", ".join(f"{x}:{show(a)}" for x, a in sorted(c, key=lambda p: p[0]))


def check_judgment(j: Judgment, rule: str = "judgment") -> None:
    g = _as_dict(j.gamma, "G", rule)
    _as_dict(j.delta, "D", rule)
    for x, a in g.items():
        if not is_linear(a):
            raise StructureViolation(rule, "linear context holds only linear formulae", "G",
                                     f"{x}:{show(a)}")
    check_eps(j.eps, rule)
    zones = [("G", dom(j.gamma)), ("D", dom(j.delta)), ("E", eps_dom(j.eps))]
    for i in range(len(zones)):
        for k in range(i + 1, len(zones)):
            both = zones[i][1] & zones[k][1]
            if both:
                raise StructureViolation(rule, "zone domains are pairwise disjoint",
                                         zones[i][0] + "/" + zones[k][0], ", ".join(sorted(both)))


@dataclass(frozen=True)
class Derivation:
    rule: str
    premises: tuple
    conclusion: Judgment
    params: tuple = ()   # rule parameters as sorted (key, value) items

    def param(self, key: str, default=None):
        return dict(self.params).get(key, default)


def depth(d: Derivation) -> int:
    """Maximal number of ``$``/``!`` instances on a root-to-leaf path."""
    below = max((depth(p) for p in d.premises), default=0)
    return below + (1 if d.rule in ("$", "!") else 0)


def deriv_size(d: Derivation) -> int:
    return 1 + sum(deriv_size(p) for p in d.premises)


# -- rule checks ----------------------------------------------------------------

def _fail(rule: str, cond: str, zone: str = "", detail: str = "") -> None:
    raise Violation(rule, cond, zone, detail)


def _same_type(a: Formula, b: Formula) -> bool:
    return alpha_eq_type(a, b)


def _ctx_eq(a: Ctx, b: Ctx) -> bool:
    da, db = dict(a), dict(b)
    return da.keys() == db.keys() and all(_same_type(da[k], db[k]) for k in da)


def _eps_key(e: Eps) -> frozenset:
    return frozenset(p for p in e)


def _eps_eq(a: Eps, b: Eps) -> bool:
    return _eps_key(a) == _eps_key(b)


def _split_disjoint(rule: str, jm: Judgment, jn: Judgment) -> None:
    """Premises share only polynomial names that merge under the pair union."""
    phis_m = {x for p in jm.eps for x in dom(p.phi)}
    phis_n = {x for p in jn.eps for x in dom(p.phi)}
    shared_phi = {x for x in phis_m & phis_n
                  if any(p.phi == q.phi for p in jm.eps for q in jn.eps if dom(p.phi) == {x})}
    overlap = (jm.domain() & jn.domain()) - shared_phi
    if overlap:
        _fail(rule, "premise domains are disjoint outside shared polynomial assignments", "",
              ", ".join(sorted(overlap)))


def check_rule(d: Derivation) -> None:
    """Verify the node against its premises; raise :class:`Violation` on failure."""
    r, ps, c = d.rule, d.premises, d.conclusion
    check_judgment(c, r)
    if r not in RULES:
        _fail(r, "unknown rule")
    arity = {"A": 0, "-oE": 2, "-oE!": 2, "=oE": 2}.get(r, 1)
    if len(ps) != arity:
        _fail(r, f"expects {arity} premise(s)", "", str(len(ps)))
    getattr_check = _CHECKS[r]
    getattr_check(d, [p.conclusion for p in ps], c)


def _check_A(d: Derivation, ps: list, c: Judgment) -> None:
    if not isinstance(c.subject, Var):
        _fail("A", "subject is a variable")
    g = dict(c.gamma)
    x = c.subject.name
    if x not in g:
        _fail("A", "the variable is assigned in the linear context", "G", x)
    if not _same_type(g[x], c.formula):
        _fail("A", "conclusion formula equals the assumption", "G", f"{show(g[x])} vs {show(c.formula)}")


def _check_C(d: Derivation, ps: list, c: Judgment) -> None:
    (p,) = ps
    x, y, z = d.param("x"), d.param("y"), d.param("z")
    px = [q for q in p.eps if dom(q.phi) == {x}]
    py = [q for q in p.eps if dom(q.phi) == {y}]
    if not px or not py or x == y:
        _fail("C", "premise holds (Tx; {x:A}) and (Ty; {y:A})", "E", f"{x}, {y}")
    (px,), (py,) = px, py
    (_, ax), (_, ay) = next(iter(px.phi)), next(iter(py.phi))
    if not _same_type(ax, ay):
        _fail("C", "contracted assumptions have the same formula", "E")
    rest = frozenset(q for q in p.eps if q is not px and q is not py)
    expected = merge(rest, eps(Pair(px.theta | py.theta, frozenset({(z, ax)}))), "C")
    if not _eps_eq(expected, c.eps):
        _fail("C", "conclusion E is E ⊔ {(Tx,Ty; {z:A})}", "E")
    if z in (dom(p.gamma) | dom(p.delta) | eps_dom(rest)) - {x, y}:
        _fail("C", "contracted name is fresh", "", z)
    if not (_ctx_eq(p.gamma, c.gamma) and _ctx_eq(p.delta, c.delta)):
        _fail("C", "linear and partially discharged contexts unchanged", "G/D")
    if not alpha_eq(substitute(p.subject, {x: Var(z), y: Var(z)}), c.subject):
        _fail("C", "subject is M{z/x, z/y}")
    if not _same_type(p.formula, c.formula):
        _fail("C", "formula unchanged")


def _abs_parts(rule: str, p: Judgment, c: Judgment) -> str:
    if not isinstance(c.subject, Abs) or not alpha_eq(c.subject.body, p.subject) and not (
            c.subject.body == p.subject):
        _fail(rule, "subject is the abstraction of the premise subject")
    if c.subject.body != p.subject:
        _fail(rule, "abstraction body is the premise subject")
    return c.subject.binder


def _check_lin_I(d: Derivation, ps: list, c: Judgment) -> None:
    (p,) = ps
    x = _abs_parts("-oI", p, c)
    g = dict(p.gamma)
    if x not in g:
        _fail("-oI", "premise has x:L in the linear context", "G", x)
    if not isinstance(c.formula, Lin) or not _same_type(c.formula.dom, g[x]) \
            or not _same_type(c.formula.cod, p.formula):
        _fail("-oI", "conclusion formula is L -o B")
    if not (_ctx_eq(p.gamma - {(x, g[x])}, c.gamma) and _ctx_eq(p.delta, c.delta)
            and _eps_eq(p.eps, c.eps)):
        _fail("-oI", "remaining contexts unchanged")


def _check_par_I(d: Derivation, ps: list, c: Judgment) -> None:
    (p,) = ps
    x = _abs_parts("-oI$", p, c)
    dl = dict(p.delta)
    if x not in dl:
        _fail("-oI$", "premise has x:A in the partially discharged context", "D", x)
    f = c.formula
    if not isinstance(f, Lin) or not isinstance(f.dom, Par) or not _same_type(f.dom.body, dl[x]) \
            or not _same_type(f.cod, p.formula):
        _fail("-oI$", "conclusion formula is $A -o B")
    if not (_ctx_eq(p.gamma, c.gamma) and _ctx_eq(p.delta - {(x, dl[x])}, c.delta)
            and _eps_eq(p.eps, c.eps)):
        _fail("-oI$", "remaining contexts unchanged")


def _check_bang_I(d: Derivation, ps: list, c: Judgment) -> None:
    (p,) = ps
    x = _abs_parts("-oI!", p, c)
    hits = [q for q in p.eps if dom(q.phi) == {x}]
    if not hits:
        _fail("-oI!", "premise E holds (T; {x:A})", "E", x)
    (q,) = hits
    (_, a), = q.phi
    f = c.formula
    if not isinstance(f, Lin) or not isinstance(f.dom, Bang) or not _same_type(f.dom.body, a) \
            or not _same_type(f.cod, p.formula):
        _fail("-oI!", "conclusion formula is !A -o B")
    rest = frozenset(e for e in p.eps if e is not q)
    if not _eps_eq(merge(rest, eps(Pair(q.theta, frozenset())), "-oI!"), c.eps):
        _fail("-oI!", "conclusion E is E ⊔ {(T; ∅)}", "E")
    if not (_ctx_eq(p.gamma, c.gamma) and _ctx_eq(p.delta, c.delta)):
        _fail("-oI!", "linear and partially discharged contexts unchanged")


def _check_eager_I(d: Derivation, ps: list, c: Judgment) -> None:
    (p,) = ps
    x = _abs_parts("=oI", p, c)
    hits = [q for q in p.eps if not q.phi and x in dom(q.theta)]
    if not hits:
        _fail("=oI", "premise E holds (T, x:A; ∅)", "E", x)
    (q,) = hits
    a = dict(q.theta)[x]
    f = c.formula
    if not isinstance(f, Eager) or not _same_type(f.dom.body, a) or not _same_type(f.cod, p.formula):
        _fail("=oI", "conclusion formula is $A =o B")
    rest = frozenset(e for e in p.eps if e is not q)
    if not _eps_eq(merge(rest, eps(Pair(q.theta - {(x, a)}, frozenset())), "=oI"), c.eps):
        _fail("=oI", "conclusion E is E ⊔ {(T; ∅)}", "E")
    if not (_ctx_eq(p.gamma, c.gamma) and _ctx_eq(p.delta, c.delta)):
        _fail("=oI", "linear and partially discharged contexts unchanged")


def _app_parts(rule: str, pm: Judgment, pn: Judgment, c: Judgment) -> None:
    if not isinstance(c.subject, App) or c.subject.fun != pm.subject or c.subject.arg != pn.subject:
        _fail(rule, "subject is the application of the premise subjects")


def _check_lin_E(d: Derivation, ps: list, c: Judgment) -> None:
    pm, pn = ps
    _app_parts("-oE", pm, pn, c)
    f = pm.formula
    if not isinstance(f, Lin):
        _fail("-oE", "function premise has formula A -o B")
    if isinstance(f.dom, Bang):
        _fail("-oE", "A ≢ !C, for any C", "", show(f.dom))
    if not _same_type(f.dom, pn.formula) or not _same_type(f.cod, c.formula):
        _fail("-oE", "argument formula is A and conclusion is B")
    _split_disjoint("-oE", pm, pn)
    if not (_ctx_eq(pm.gamma | pn.gamma, c.gamma) and _ctx_eq(pm.delta | pn.delta, c.delta)
            and _eps_eq(merge(pm.eps, pn.eps, "-oE"), c.eps)):
        _fail("-oE", "conclusion contexts are the premise unions (E by ⊔)")


def _check_bang_E(d: Derivation, ps: list, c: Judgment) -> None:
    pm, pn = ps
    _app_parts("-oE!", pm, pn, c)
    f = pm.formula
    if not isinstance(f, Lin) or not isinstance(f.dom, Bang):
        _fail("-oE!", "function premise has formula !A -o B")
    if not _same_type(f.dom, pn.formula) or not _same_type(f.cod, c.formula):
        _fail("-oE!", "argument formula is !A and conclusion is B")
    if any(p.theta for p in pm.eps):
        _fail("-oE!", "E_M ⊆ {(∅;Φ1),…,(∅;Φn)}", "E")
    _split_disjoint("-oE!", pm, pn)
    if not (_ctx_eq(pm.gamma | pn.gamma, c.gamma) and _ctx_eq(pm.delta | pn.delta, c.delta)
            and _eps_eq(merge(pm.eps, pn.eps, "-oE!"), c.eps)):
        _fail("-oE!", "conclusion contexts are the premise unions (E by ⊔)")


def _check_eager_E(d: Derivation, ps: list, c: Judgment) -> None:
    pm, pn = ps
    _app_parts("=oE", pm, pn, c)
    f = pm.formula
    if not isinstance(f, Eager):
        _fail("=oE", "function premise has formula $A =o B")
    if not _same_type(f.dom, pn.formula) or not _same_type(f.cod, c.formula):
        _fail("=oE", "argument formula is $A and conclusion is B")
    if pn.gamma or pn.delta:
        _fail("=oE", "argument premise has empty linear and partially discharged contexts", "G/D")
    if len(pn.eps) > 1 or any(p.phi for p in pn.eps):
        _fail("=oE", "E_N ⊆ {(Θ;∅)}", "E")
    _split_disjoint("=oE", pm, pn)
    if not (_ctx_eq(pm.gamma, c.gamma) and _ctx_eq(pm.delta, c.delta)
            and _eps_eq(merge(pm.eps, pn.eps, "=oE"), c.eps)):
        _fail("=oE", "conclusion contexts are G_M; D; E_M ⊔ E_N")


def _premise_theta(rule: str, p: Judgment) -> Ctx:
    if len(p.eps) > 1 or any(q.phi for q in p.eps):
        _fail(rule, "premise E is at most {(Θ';∅)}", "E")
    return next(iter(p.eps)).theta if p.eps else frozenset()


def _decode_pairs(raw) -> list[Pair]:
    return [q if isinstance(q, Pair) else Pair(frozenset(q[0]), frozenset(q[1])) for q in raw]


def _check_par_box(d: Derivation, ps: list, c: Judgment) -> None:
    (p,) = ps
    if c.subject != p.subject:
        _fail("$", "subject unchanged")
    if not isinstance(c.formula, Par) or not _same_type(c.formula.body, p.formula):
        _fail("$", "conclusion formula is $B")
    theta0 = _premise_theta("$", p)
    pairs = _decode_pairs(d.param("pairs", ()))
    for q in pairs:
        if bool(q.theta) == bool(q.phi):
            _fail("$", "Θi ≠ ∅ iff Φi = ∅", "E", str(q))
    boxed_delta = box_ctx(p.delta)
    cd = dict(c.delta)
    for x, a in boxed_delta:
        if x not in cd or not _same_type(cd[x], a):
            _fail("$", "conclusion partially discharged context contains $Δ'", "D", x)
    plain_delta = frozenset((x, a) for x, a in c.delta if x not in dom(p.delta))
    avail: dict = dict(plain_delta)
    for q in pairs:
        for x, a in q.theta | q.phi:
            avail[x] = a
    for x, a in p.gamma:
        if x not in avail:
            _fail("$", "Γ ⊆ Δ ∪ ⋃Θi ∪ ⋃Φi", "G", x)
        if not _same_type(avail[x], a):
            _fail("$", "Γ ⊆ Δ ∪ ⋃Θi ∪ ⋃Φi (same variable, same formula)", "G",
                  f"{x}: {show(a)} vs {show(avail[x])}")
    expected = eps(Pair(box_ctx(theta0), frozenset()))
    for q in pairs:
        expected = merge(expected, eps(q), "$")
    if not _eps_eq(expected, c.eps):
        _fail("$", "conclusion E is {($Θ';∅)} ⊔ {(Θ1;Φ1)} ⊔ … ⊔ {(Θm;Φm)}", "E")


def _check_bang_box(d: Derivation, ps: list, c: Judgment) -> None:
    (p,) = ps
    if c.subject != p.subject:
        _fail("!", "subject unchanged")
    if not isinstance(c.formula, Bang) or not _same_type(c.formula.body, p.formula):
        _fail("!", "conclusion formula is !B")
    if p.delta:
        _fail("!", "premise partially discharged context is empty", "D")
    theta0 = _premise_theta("!", p)
    (q,) = _decode_pairs([d.param("pair", (frozenset(), frozenset()))])
    if len(q.phi) > 1:
        _fail("!", "Φ is empty or a singleton", "E")
    avail = dict(q.theta | q.phi)
    for x, a in p.gamma:
        if x not in avail or not _same_type(avail[x], a):
            _fail("!", "Γ ⊆ Θ ∪ Φ", "G", x)
    if q.theta and not (dom(q.phi) & p.subject.fv):
        _fail("!", "Θ ≠ ∅ ⇒ dom(Φ) ∩ FV(M) ≠ ∅", "E", str(q))
    expected = merge(eps(Pair(box_ctx(theta0), frozenset())), eps(q), "!")
    if not _eps_eq(expected, c.eps):
        _fail("!", "conclusion E is {($Θ';∅)} ⊔ {(Θ;Φ)}", "E")


def _check_forall_I(d: Derivation, ps: list, c: Judgment) -> None:
    (p,) = ps
    f = c.formula
    if not isinstance(f, Forall) or not _same_type(f.body, p.formula):
        _fail("AI", "conclusion formula is ∀α.L")
    for x, a in list(p.gamma) + list(p.delta) + [e for q in p.eps for e in q.theta | q.phi]:
        if f.var in free_tvars(a):
            _fail("AI", "α not free in Γ, Δ and E", "", f"{f.var} in {x}:{show(a)}")
    if c.subject != p.subject or not (_ctx_eq(p.gamma, c.gamma) and _ctx_eq(p.delta, c.delta)
                                      and _eps_eq(p.eps, c.eps)):
        _fail("AI", "subject and contexts unchanged")


def _check_forall_E(d: Derivation, ps: list, c: Judgment) -> None:
    (p,) = ps
    f = p.formula
    if not isinstance(f, Forall):
        _fail("AE", "premise formula is ∀α.L")
    inst = d.param("instance")
    if isinstance(inst, str):
        inst = parse_formula(inst)
    if inst is None or not is_linear(inst):
        _fail("AE", "instance L' is a linear formula")
    if not _same_type(subst_type(f.body, f.var, inst), c.formula):
        _fail("AE", "conclusion formula is L{L'/α}")
    if c.subject != p.subject or not (_ctx_eq(p.gamma, c.gamma) and _ctx_eq(p.delta, c.delta)
                                      and _eps_eq(p.eps, c.eps)):
        _fail("AE", "subject and contexts unchanged")


_CHECKS = {
    "A": _check_A, "C": _check_C, "-oI": _check_lin_I, "-oI$": _check_par_I,
    "-oE": _check_lin_E, "-oI!": _check_bang_I, "-oE!": _check_bang_E,
    "=oI": _check_eager_I, "=oE": _check_eager_E, "$": _check_par_box,
    "!": _check_bang_box, "AI": _check_forall_I, "AE": _check_forall_E,
}


def check_derivation(d: Derivation) -> Judgment:
    """Check every node bottom-up; return the root judgment."""
    stack = [(d, False)]
    while stack:
        node, done = stack.pop()
        if done:
            check_rule(node)
        else:
            stack.append((node, True))
            stack.extend((p, False) for p in reversed(node.premises))
    return d.conclusion


def is_valid(d: Derivation) -> bool:
    try:
        check_derivation(d)
    except Violation:
        return False
    return True


# -- JSON ---------------------------------------------------------------------------

SCHEMA = 1


def _ctx_json(c: Ctx) -> list:
    return [[x, show(a)] for x, a in sorted(c, key=lambda p: p[0])]


def _ctx_from(raw) -> Ctx:
    return frozenset((x, parse_formula(a)) for x, a in raw)


def _pair_json(q: Pair) -> dict:
    return {"theta": _ctx_json(q.theta), "phi": _ctx_json(q.phi)}


def _pair_from(raw) -> Pair:
    return Pair(_ctx_from(raw["theta"]), _ctx_from(raw["phi"]))


def _param_json(v):
    if isinstance(v, str):
        return {"name": v}
    if isinstance(v, Pair):
        return {"pair": _pair_json(v)}
    if isinstance(v, (list, tuple)):
        return {"pairs": [_pair_json(_decode_pairs([q])[0]) for q in v]}
    return {"formula": show(v)}


def _param_from(raw):
    if "name" in raw:
        return raw["name"]
    if "pair" in raw:
        return _pair_from(raw["pair"])
    if "pairs" in raw:
        return tuple(_pair_from(q) for q in raw["pairs"])
    return parse_formula(raw["formula"])


def judgment_to_json(j: Judgment) -> dict:
    return {"gamma": _ctx_json(j.gamma), "delta": _ctx_json(j.delta),
            "eps": sorted((_pair_json(q) for q in j.eps), key=repr),
            "subject": print_term(j.subject), "formula": show(j.formula)}


def judgment_from_json(raw: dict) -> Judgment:
    return Judgment(_ctx_from(raw["gamma"]), _ctx_from(raw["delta"]),
                    frozenset(_pair_from(q) for q in raw["eps"]),
                    parse_term(raw["subject"]), parse_formula(raw["formula"]))


def derivation_to_json(d: Derivation) -> dict:
    """Node table with shared sub-derivations stored once; premises refer to node ids."""
    ids: dict = {}
    nodes: list = []
    stack = [(d, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in ids:
            continue
        if not ready:
            stack.append((node, True))
            stack.extend((p, False) for p in reversed(node.premises) if id(p) not in ids)
            continue
        ids[id(node)] = len(nodes)
        nodes.append({"rule": node.rule, "premises": [ids[id(p)] for p in node.premises],
                      "conclusion": judgment_to_json(node.conclusion),
                      "params": {k: _param_json(v) for k, v in node.params}})
    return {"schema": SCHEMA, "root": ids[id(d)], "nodes": nodes}


def derivation_from_json(raw: dict) -> Derivation:
    if raw.get("schema") != SCHEMA:
        raise ValueError(f"unsupported derivation schema {raw.get('schema')!r}")
    built: list = []
    for i, n in enumerate(raw["nodes"]):
        if any(not 0 <= p < i for p in n["premises"]):
            raise ValueError(f"node {i}: premises must refer to earlier nodes")
        params = tuple(sorted((k, _param_from(v)) for k, v in n["params"].items()))
        built.append(Derivation(n["rule"], tuple(built[p] for p in n["premises"]),
                                judgment_from_json(n["conclusion"]), params))
    return built[raw["root"]]
