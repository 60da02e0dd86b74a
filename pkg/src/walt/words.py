"""Binary words and the word-level combinators (successors, predecessor, branch)."""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

from .elaborate import BANG, LIN, PAR, PApp, PBox, PGen, PInst, PLam, PVar, Proof, erase, papp, pbox, plam
from .formulas import W, WORD_VAR, Forall, Formula, Lin, TVar, endo, lin_chain
from .terms import Abs, App, Term, Var, lam

ZERO_NAME, ONE_NAME, BASE_NAME = "0", "1", "y"


def bits_lsb_first(n: int) -> list[int]:
    """Binary digits of ``n`` least significant first; ``[]`` for 0."""
    out = []
    while n:
        out.append(n & 1)
        n >>= 1
    return out


@lru_cache(maxsize=None)
def word(n: int) -> Term:
    """``\\0 1 y. v0 (v1 (... (1 y)))`` with v0 the least significant digit."""
    if n < 0:
        raise ValueError("words encode natural numbers")
    body: Term = Var(BASE_NAME)
    for b in reversed(bits_lsb_first(n)):
        body = App(Var(ONE_NAME if b else ZERO_NAME), body)
    return lam([ZERO_NAME, ONE_NAME, BASE_NAME], body)


def decode_word(t: Term) -> Optional[int]:
    """Inverse of :func:`word` up to renaming of the three binders; None otherwise."""
    names = []
    for _ in range(3):
        if not isinstance(t, Abs):
            return None
        names.append(t.binder)
        t = t.body
    zero, one, base = names
    if len({zero, one, base}) != 3:
        return None
    digits = []
    while isinstance(t, App):
        if not isinstance(t.fun, Var) or t.fun.name not in (zero, one):
            return None
        digits.append(1 if t.fun.name == one else 0)
        t = t.arg
    if not (isinstance(t, Var) and t.name == base):
        return None
    if digits and digits[-1] != 1:
        return None  # leading zero: not a word
    return sum(d << i for i, d in enumerate(digits))


def is_word(t: Term) -> bool:
    return decode_word(t) is not None


def _ident(name: str = "z") -> Term:
    return Abs(name, Var(name))


# Proof terms: binder kinds, boxes and instances that make each combinator typeable.
_a = TVar(WORD_VAR)
_e = endo(_a)


def _pair_formula(left: Formula, right: Formula, var: str = "t") -> Formula:
    return Forall(var, Lin(lin_chain([left, right], TVar(var)), TVar(var)))


def _pair(left: Proof, right: Proof, lt: Formula, rt: Formula) -> Proof:
    return PGen("t", PLam("k", LIN, lin_chain([lt, rt], TVar("t")), papp("k", left, right)))


def _pid(x: str, ty: Formula) -> Proof:
    return PLam(x, LIN, ty, PVar(x))


def word_proof(n: int) -> Proof:
    body: Proof = PVar(BASE_NAME)
    for b in reversed(bits_lsb_first(n)):
        body = PApp(PVar(ONE_NAME if b else ZERO_NAME), body)
    inner = pbox(PLam(BASE_NAME, LIN, _a, body))
    return PGen(WORD_VAR, plam([(ZERO_NAME, BANG, _e), (ONE_NAME, BANG, _e)], inner))


def _fold(state: Formula, steps: tuple[Proof, Proof], init: Proof, final: Proof) -> Proof:
    """``\\n 0 1. (\\r. $[\\y. r init final]) (n !S0 !S1)`` at result type W."""
    run = papp(PInst(PApp(PVar("r"), init), _a), final)
    boxed = PLam("r", PAR, endo(state), pbox(PLam(BASE_NAME, LIN, _a, run)))
    it = papp(PInst(PVar("n"), state), PBox("!", steps[0]), PBox("!", steps[1]))
    body = plam([(ZERO_NAME, BANG, _e), (ONE_NAME, BANG, _e)], PApp(boxed, it))
    return PLam("n", LIN, W, PGen(WORD_VAR, body))


# Ws0 threads (wrapper, chain): the wrapper ignores 0 until a digit has been
# seen, so 0 stays 0.
_WRAP = Lin(_e, _e)
_S0 = _pair_formula(_WRAP, _e)


def ws0_proof() -> Proof:
    def step(d: str) -> Proof:
        cont = plam([("f", LIN, _WRAP), ("c", LIN, _e)],
                    _pair(_pid("w", _e), PLam(BASE_NAME, LIN, _a, papp(d, papp("c", BASE_NAME))),
                          _WRAP, _e))
        return PLam("st", LIN, _S0, PApp(PInst(PVar("st"), _S0), cont))
    init = _pair(plam([("w", LIN, _e), ("z", LIN, _a)], PVar("z")), _pid("z", _a), _WRAP, _e)
    final = plam([("f", LIN, _WRAP), ("c", LIN, _e)], papp("f", ZERO_NAME, papp("c", BASE_NAME)))
    return _fold(_S0, (step(ZERO_NAME), step(ONE_NAME)), init, final)


def ws1_proof() -> Proof:
    boxed = PLam("r", PAR, _e, pbox(PLam(BASE_NAME, LIN, _a,
                                         papp(ONE_NAME, papp("r", BASE_NAME)))))
    it = papp(PInst(PVar("n"), _a), PBox("!", PVar(ZERO_NAME)), PBox("!", PVar(ONE_NAME)))
    body = plam([(ZERO_NAME, BANG, _e), (ONE_NAME, BANG, _e)], PApp(boxed, it))
    return PLam("n", LIN, W, PGen(WORD_VAR, body))


# Pred threads (pending digit, chain) and drops the pending digit at the end.
_SP = _pair_formula(_e, _e)


def pred_proof() -> Proof:
    def step(d: str) -> Proof:
        cont = plam([("p", LIN, _e), ("c", LIN, _e)],
                    _pair(PVar(d), PLam(BASE_NAME, LIN, _a, papp("p", papp("c", BASE_NAME))),
                          _e, _e))
        return PLam("st", LIN, _SP, PApp(PInst(PVar("st"), _SP), cont))
    init = _pair(_pid("z", _a), _pid("z", _a), _e, _e)
    final = plam([("p", LIN, _e), ("c", LIN, _e)], papp("c", BASE_NAME))
    return _fold(_SP, (step(ZERO_NAME), step(ONE_NAME)), init, final)


# B iterates "pick the third argument" over the tested word starting from
# "pick the second"; zero iterations keep the initial selector.
_SEL = lin_chain([_e, _e], _e)


def branch_proof() -> Proof:
    pick_second = plam([("p", LIN, _e), ("q", LIN, _e)], PVar("p"))
    step = plam([("K", LIN, _SEL), ("p", LIN, _e), ("q", LIN, _e)], PVar("q"))
    select = plam([("r", PAR, endo(_SEL)), ("u", PAR, _e), ("v", PAR, _e)],
                  pbox(papp(PApp(PVar("r"), pick_second), "u", "v")))
    bang01 = (PBox("!", PVar(ZERO_NAME)), PBox("!", PVar(ONE_NAME)))
    body = papp(select,
                papp(PInst(PVar("n"), _SEL), PBox("!", step), PBox("!", step)),
                papp(PInst(PVar("a"), _a), *bang01),
                papp(PInst(PVar("b"), _a), *bang01))
    inner = PGen(WORD_VAR, plam([(ZERO_NAME, BANG, _e), (ONE_NAME, BANG, _e)], body))
    return plam([("n", LIN, W), ("a", LIN, W), ("b", LIN, W)], inner)


def ws0_term() -> Term:
    return erase(ws0_proof())


def ws1_term() -> Term:
    return erase(ws1_proof())


def pred_term() -> Term:
    return erase(pred_proof())


def branch_term() -> Term:
    return erase(branch_proof())
