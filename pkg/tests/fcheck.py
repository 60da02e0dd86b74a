"""Node-by-node System F check of erased derivations (test oracle)."""

from __future__ import annotations

import itertools

from walt.derivations import Derivation
from walt.formulas import FArrow, FForall, FVar, erase_to_F
from walt.terms import Abs, App, Var

_fresh = itertools.count()


def f_alpha(a, b, env_a=(), env_b=()) -> bool:
    if isinstance(a, FVar) and isinstance(b, FVar):
        ia = env_a.index(a.name) if a.name in env_a else None
        ib = env_b.index(b.name) if b.name in env_b else None
        return ia == ib and (ia is not None or a.name == b.name)
    if isinstance(a, FArrow) and isinstance(b, FArrow):
        return f_alpha(a.dom, b.dom, env_a, env_b) and f_alpha(a.cod, b.cod, env_a, env_b)
    if isinstance(a, FForall) and isinstance(b, FForall):
        return f_alpha(a.body, b.body, (a.var,) + env_a, (b.var,) + env_b)
    return False


def f_free(t) -> set:
    if isinstance(t, FVar):
        return {t.name}
    if isinstance(t, FArrow):
        return f_free(t.dom) | f_free(t.cod)
    return f_free(t.body) - {t.var}


def f_subst(t, v: str, s):
    if isinstance(t, FVar):
        return s if t.name == v else t
    if isinstance(t, FArrow):
        return FArrow(f_subst(t.dom, v, s), f_subst(t.cod, v, s))
    if t.var == v:
        return t
    if t.var in f_free(s):
        z = f"_f{next(_fresh)}"
        return FForall(z, f_subst(f_subst(t.body, t.var, FVar(z)), v, s))
    return FForall(t.var, f_subst(t.body, v, s))


def _env(j) -> dict:
    out = dict(j.gamma) | dict(j.delta)
    for p in j.eps:
        out |= dict(p.theta) | dict(p.phi)
    return out


def f_check(d: Derivation) -> None:
    """Raise AssertionError unless every node erases to a System F rule instance."""
    c = d.conclusion
    t = erase_to_F(c.formula)
    ps = [p.conclusion for p in d.premises]
    r = d.rule
    if r == "A":
        assert isinstance(c.subject, Var)
        assert f_alpha(erase_to_F(_env(c)[c.subject.name]), t)
    elif r in ("-oI", "-oI$", "-oI!", "=oI"):
        assert isinstance(c.subject, Abs) and c.subject.body == ps[0].subject
        a = erase_to_F(_env(ps[0])[c.subject.binder])
        assert f_alpha(t, FArrow(a, erase_to_F(ps[0].formula)))
    elif r in ("-oE", "-oE!", "=oE"):
        assert isinstance(c.subject, App)
        assert f_alpha(erase_to_F(ps[0].formula), FArrow(erase_to_F(ps[1].formula), t))
    elif r in ("$", "!", "C"):
        assert f_alpha(erase_to_F(ps[0].formula), t)
    elif r == "AI":
        assert isinstance(t, FForall) and f_alpha(erase_to_F(ps[0].formula), t.body)
    elif r == "AE":
        q = erase_to_F(ps[0].formula)
        assert isinstance(q, FForall)
        inst = erase_to_F(d.param("instance"))
        assert f_alpha(f_subst(q.body, q.var, inst), t)
    else:
        raise AssertionError(f"unknown rule {r}")
    for p in d.premises:
        f_check(p)
