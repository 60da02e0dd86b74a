"""Formulae: linear core (variables, two arrows, quantifier) plus ``!`` and ``$``."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class Lin:
    """Linear implication ``A -o B``."""
    dom: "Formula"
    cod: "Formula"

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class Eager:
    """Eager implication ``$A =o B``; the domain is always ``$``-modal."""
    dom: "Formula"
    cod: "Formula"

    def __post_init__(self) -> None:
        if not isinstance(self.dom, Par):
            raise ValueError(f"eager arrow needs a $-modal domain, got {show(self.dom)}")

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __post_init__(self) -> None:
        if not is_linear(self.body):
            raise ValueError(f"quantifier over a modal formula: {show(self.body)}")

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class Bang:
    body: "Formula"

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class Par:
    """The ``$`` modality."""
    body: "Formula"

    def __str__(self) -> str:
        return show(self)


Formula = Union[TVar, Lin, Eager, Forall, Bang, Par]


class NonLinearSubstituent(ValueError):
    pass


def is_linear(a: Formula) -> bool:
    return not isinstance(a, (Bang, Par))


def free_tvars(a: Formula) -> frozenset:
    if isinstance(a, TVar):
        return frozenset((a.name,))
    if isinstance(a, (Lin, Eager)):
        return free_tvars(a.dom) | free_tvars(a.cod)
    if isinstance(a, Forall):
        return free_tvars(a.body) - {a.var}
    return free_tvars(a.body)


def _fresh_tvar(base: str, avoid: frozenset) -> str:
    k = 1
    while f"{base}{k}" in avoid:
        k += 1
    return f"{base}{k}"


def subst_type(a: Formula, var: str, repl: Formula) -> Formula:
    """Capture-free ``a{repl/var}``; ``repl`` must be linear."""
    if not is_linear(repl):
        raise NonLinearSubstituent(f"cannot substitute modal formula {show(repl)} for {var}")
    return _subst(a, var, repl, free_tvars(repl))


def _subst(a: Formula, var: str, repl: Formula, repl_fv: frozenset) -> Formula:
    if isinstance(a, TVar):
        return repl if a.name == var else a
    if isinstance(a, Lin):
        return Lin(_subst(a.dom, var, repl, repl_fv), _subst(a.cod, var, repl, repl_fv))
    if isinstance(a, Eager):
        return Eager(_subst(a.dom, var, repl, repl_fv), _subst(a.cod, var, repl, repl_fv))
    if isinstance(a, Bang):
        return Bang(_subst(a.body, var, repl, repl_fv))
    if isinstance(a, Par):
        return Par(_subst(a.body, var, repl, repl_fv))
    if a.var == var or var not in free_tvars(a.body):
        return a
    if a.var in repl_fv:
        z = _fresh_tvar(a.var.rstrip("0123456789") or "a", repl_fv | free_tvars(a.body) | {var})
        body = _subst(a.body, a.var, TVar(z), frozenset((z,)))
        return Forall(z, _subst(body, var, repl, repl_fv))
    return Forall(a.var, _subst(a.body, var, repl, repl_fv))


def alpha_eq_type(a: Formula, b: Formula) -> bool:
    return _key(a, ()) == _key(b, ())


def _key(a: Formula, env: tuple) -> tuple:
    if isinstance(a, TVar):
        if a.name in env:
            return ("b", len(env) - 1 - env[::-1].index(a.name))
        return ("f", a.name)
    if isinstance(a, Forall):
        return ("A", _key(a.body, env + (a.var,)))
    if isinstance(a, (Lin, Eager)):
        return (type(a).__name__, _key(a.dom, env), _key(a.cod, env))
    return (type(a).__name__, _key(a.body, env))


def modal_depth(a: Formula) -> int:
    """Number of leading ``$`` modalities."""
    n = 0
    while isinstance(a, Par):
        n, a = n + 1, a.body
    return n


# -- System F erasure -----------------------------------------------------------

@dataclass(frozen=True)
class FVar:
    name: str


@dataclass(frozen=True)
class FArrow:
    dom: "FType"
    cod: "FType"


@dataclass(frozen=True)
class FForall:
    var: str
    body: "FType"


FType = Union[FVar, FArrow, FForall]


def erase_to_F(a: Formula) -> FType:
    """Drop modalities; both arrows become the System F arrow."""
    if isinstance(a, TVar):
        return FVar(a.name)
    if isinstance(a, (Lin, Eager)):
        return FArrow(erase_to_F(a.dom), erase_to_F(a.cod))
    if isinstance(a, Forall):
        return FForall(a.var, erase_to_F(a.body))
    return erase_to_F(a.body)


def show_F(t: FType) -> str:
    if isinstance(t, FVar):
        return t.name
    if isinstance(t, FForall):
        return f"forall {t.var}. {show_F(t.body)}"
    dom = show_F(t.dom)
    if not isinstance(t.dom, FVar):
        dom = f"({dom})"
    return f"{dom} -> {show_F(t.cod)}"


# -- common formulae --------------------------------------------------------------

def pars(n: int, a: Formula) -> Formula:
    for _ in range(n):
        a = Par(a)
    return a


def endo(a: Formula) -> Formula:
    return Lin(a, a)


WORD_VAR = "a"
W = Forall(WORD_VAR, Lin(Bang(endo(TVar(WORD_VAR))), Lin(Bang(endo(TVar(WORD_VAR))), Par(endo(TVar(WORD_VAR))))))


def lin_chain(doms: Iterable[Formula], cod: Formula) -> Formula:
    doms = list(doms)
    for d in reversed(doms):
        cod = Lin(d, cod)
    return cod


def eager_chain(doms: Iterable[Formula], cod: Formula) -> Formula:
    doms = list(doms)
    for d in reversed(doms):
        cod = Eager(d, cod)
    return cod


def srn_formula(k: int, l: int, m: int) -> Formula:
    """``($W =o)^k ($^m W =o)^l $^m W`` -- the shape of a compiled definition."""
    return eager_chain([Par(W)] * k + [pars(m, W)] * l, pars(m, W))


def tensor_formula(parts: list[Formula], var: str = "t") -> Formula:
    """Eager tensor: ``forall t. (A1 =o ... =o Am =o t) -o t``."""
    return Forall(var, Lin(eager_chain(parts, TVar(var)), TVar(var)))


# -- concrete syntax --------------------------------------------------------------

def show(a: Formula) -> str:
    if isinstance(a, TVar):
        return a.name
    if isinstance(a, Bang):
        return "!" + _atom(a.body)
    if isinstance(a, Par):
        return "$" + _atom(a.body)
    if isinstance(a, Forall):
        return f"forall {a.var}. {show(a.body)}"
    arrow = " -o " if isinstance(a, Lin) else " =o "
    dom = show(a.dom)
    if isinstance(a.dom, (Lin, Eager, Forall)):
        dom = f"({dom})"
    return dom + arrow + show(a.cod)


def _atom(a: Formula) -> str:
    s = show(a)
    return f"({s})" if isinstance(a, (Lin, Eager, Forall)) else s


_FTOK = re.compile(r"\s*(-o|=o|forall\b|[!$().]|[A-Za-z_][A-Za-z0-9_']*)")


def parse_formula(text: str) -> Formula:
    toks, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _FTOK.match(text, pos)
        if not m:
            raise ValueError(f"bad formula syntax at position {pos}: {text[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    toks.append("<eof>")
    i = 0

    def expect(tok: str) -> None:
        nonlocal i
        if toks[i] != tok:
            raise ValueError(f"expected {tok!r}, found {toks[i]!r}")
        i += 1

    def formula() -> Formula:
        nonlocal i
        if toks[i] == "forall":
            i += 1
            var = toks[i]
            i += 1
            expect(".")
            return Forall(var, formula())
        left = unary()
        if toks[i] == "-o":
            i += 1
            return Lin(left, formula())
        if toks[i] == "=o":
            i += 1
            return Eager(left, formula())
        return left

    def unary() -> Formula:
        nonlocal i
        tok = toks[i]
        if tok == "!":
            i += 1
            return Bang(unary())
        if tok == "$":
            i += 1
            return Par(unary())
        if tok == "(":
            i += 1
            inner = formula()
            expect(")")
            return inner
        if re.match(r"[A-Za-z_]", tok) and tok != "forall":
            i += 1
            return TVar(tok)
        raise ValueError(f"unexpected token {tok!r}")

    result = formula()
    if toks[i] != "<eof>":
        raise ValueError(f"trailing tokens from {toks[i]!r}")
    return result


def formula_to_json(a: Formula) -> str:
    return show(a)
