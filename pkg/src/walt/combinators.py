"""Closed combinators with their formulae and, where available, derivations."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from .derivations import Derivation
from .elaborate import (
    EAGER, LIN, PAR, PApp, PBox, PClosed, PGen, PInst, PLam, PTerm,
    PVar, Proof, derive, erase, papp, pbox, plam,
)
from .formulas import (
    W, Eager, Formula, Lin, Par, TVar, alpha_eq_type, eager_chain, endo, is_linear,
    lin_chain, modal_depth, pars, show, srn_formula, tensor_formula,
)
from .terms import Abs, App, Term, Var, app, is_closed, lam
from . import words as _w


class TypeMismatch(ValueError):
    pass


class OpenComponent(ValueError):
    pass


@dataclass(eq=False)
class TypedTerm:
    """A closed term, its formula and (when one is known) a checked derivation."""
    term: Term
    formula: Formula
    derivation: Optional[Derivation] = None
    name: str = ""
    params: tuple = ()
    note: str = field(default="", repr=False)

    @property
    def typed(self) -> bool:
        return self.derivation is not None


def _hole(t: TypedTerm) -> Proof:
    return PClosed(t.derivation) if t.derivation is not None else PTerm(t.term, t.formula)


def _has_hole(p: Proof) -> bool:
    stack = [p]
    while stack:
        q = stack.pop()
        if isinstance(q, PTerm):
            return True
        for attr in ("body", "fun", "arg"):
            child = getattr(q, attr, None)
            if child is not None and not isinstance(child, Term.__args__):
                stack.append(child)
    return False


def _finish(name: str, params: tuple, proof: Proof, formula: Formula, note: str = "") -> TypedTerm:
    """Elaborate ``proof`` when all its parts are typed; check the stated formula."""
    if _has_hole(proof):
        return TypedTerm(erase(proof), formula, None, name, params,
                         note or "built from a component without derivation")
    d = derive(proof)
    if not alpha_eq_type(d.conclusion.formula, formula):
        raise TypeMismatch(f"{name}{params}: derived {show(d.conclusion.formula)}, "
                           f"stated {show(formula)}")
    return TypedTerm(d.conclusion.subject, formula, d, name, params)


def untyped(term: Term, formula: Formula, name: str = "", params: tuple = (), note: str = "") -> TypedTerm:
    return TypedTerm(term, formula, None, name, params, note)


# -- words and word operations ---------------------------------------------------------

@lru_cache(maxsize=None)
def word(n: int) -> TypedTerm:
    return _finish("word", (n,), _w.word_proof(n), W)


@lru_cache(maxsize=None)
def _word_ops() -> tuple:
    one, three = Lin(W, W), lin_chain([W, W, W], W)
    return (_finish("Ws0", (), _w.ws0_proof(), one),
            _finish("Ws1", (), _w.ws1_proof(), one),
            _finish("Pred", (), _w.pred_proof(), one),
            _finish("B", (), _w.branch_proof(), three))


def successors_pred_branch() -> tuple:
    """``(Ws0, Ws1, Pred, B)``."""
    return _word_ops()


def ws(d: int) -> TypedTerm:
    return _word_ops()[d]


# -- eager tensor -------------------------------------------------------------------------

def tensor(ms: Sequence[Term]) -> Term:
    """``\\z. z M1 ... Mm`` for closed ``Mi``."""
    if not ms:
        raise ValueError("a tensor needs at least one component")
    for i, m in enumerate(ms, 1):
        if not is_closed(m):
            raise OpenComponent(f"component {i} has free variables {sorted(m.fv)}")
    z = "z"
    return Abs(z, app(Var(z), *ms))


def tensor_match(binders: Sequence[str], body: Term) -> Term:
    """``\\w. w (\\x1 ... xm. body)``."""
    w = "w"
    while w in body.fv:
        w += "'"
    return Abs(w, app(Var(w), lam(list(binders), body)))


def typed_tensor(parts: Sequence[TypedTerm]) -> TypedTerm:
    tensor([p.term for p in parts])
    if any(not isinstance(p.formula, Par) for p in parts):
        raise TypeMismatch("eager tensor components need $-modal formulae")
    ty = tensor_formula([p.formula for p in parts])
    proof = PGen("t", PLam("z", LIN, eager_chain([p.formula for p in parts], TVar("t")),
                           papp("z", *[_hole(p) for p in parts])))
    return _finish("tensor", (len(parts),), proof, ty)


# -- embeddings -----------------------------------------------------------------------------

def _strip(a: Formula, n: int, what: str) -> Formula:
    for _ in range(n):
        if not isinstance(a, Par):
            raise TypeMismatch(f"{what}: expected {n} leading $ in {show(a)}")
        a = a.body
    return a


def bembed(n: int, m: TypedTerm) -> TypedTerm:
    """``\\x. M x``: from ``L -o $^k A`` to ``$^n L =o $^(k+n) A``."""
    f = m.formula
    if n < 1 or not isinstance(f, Lin) or not is_linear(f.dom):
        raise TypeMismatch(f"bembed needs n >= 1 and L -o B, got {show(f)}")
    body = pbox(PApp(_hole(m), PVar("x")), n)
    proof = PLam("x", EAGER, pars(n - 1, f.dom), body)
    return _finish("bembed", (n,), proof, Eager(pars(n, f.dom), pars(n, f.cod)))


def lembed(n: int, p: int, m: TypedTerm) -> TypedTerm:
    """``\\x1..xp. M x1..xp``: every argument and the result gain ``$^n``."""
    doms, f = [], m.formula
    for _ in range(p):
        if not isinstance(f, Lin) or not is_linear(f.dom):
            raise TypeMismatch(f"lembed needs {p} linear arguments in {show(m.formula)}")
        doms.append(f.dom)
        f = f.cod
    names = [f"x{i}" for i in range(1, p + 1)]
    body = pbox(papp(_hole(m), *names), n)
    kind = PAR if n else LIN
    spec = [(x, kind, pars(n - 1, d) if n else d) for x, d in zip(names, doms)]
    return _finish("lembed", (n, p), plam(spec, body), lin_chain([pars(n, d) for d in doms], pars(n, f)))


def _eager_doms(f: Formula, count: int, what: str) -> tuple[list, Formula]:
    doms = []
    for _ in range(count):
        if not isinstance(f, Eager):
            raise TypeMismatch(f"{what}: expected {count} eager arguments")
        doms.append(f.dom)
        f = f.cod
    return doms, f


def eembed(n: int, p: int, q: int, m: TypedTerm) -> TypedTerm:
    """Deepen the safe slots and the result of ``M`` by ``n`` boxes; normal slots stay ``$W``."""
    doms, res = _eager_doms(m.formula, p + q, "eembed")
    if any(not alpha_eq_type(d, Par(W)) for d in doms[:p]):
        raise TypeMismatch("eembed: the first p arguments must be $W")
    depth = modal_depth(res)
    if q and depth < 1:
        raise TypeMismatch("eembed: safe slots need a $-modal result")
    lins = [_strip(d, depth, "eembed safe slot") for d in doms[p:]]
    core = _strip(res, depth, "eembed result")
    ws_ = [f"w{i}" for i in range(1, p + 1)]
    vs = [f"v{i}" for i in range(1, p + 1)]
    zs = [f"z{j}" for j in range(1, q + 1)]
    inner = pbox(papp(_hole(m), *[pbox(PVar(v)) for v in vs], *[pbox(PVar(z), depth) for z in zs]), n)
    inner_lam = plam([(v, EAGER, pars(n, W)) for v in vs], inner)
    bem = bembed(1, coerce(n))
    body = papp(inner_lam, *[PApp(_hole(bem), pbox(PVar(w))) for w in ws_])
    spec = [(w, EAGER, W) for w in ws_] + [(z, EAGER, pars(depth + n - 1, l)) for z, l in zip(zs, lins)]
    ty = eager_chain([Par(W)] * p + [pars(depth + n, l) for l in lins], pars(depth + n, core))
    return _finish("eembed", (n, p, q), plam(spec, body), ty)


def deepen(n: int, m: TypedTerm) -> TypedTerm:
    """``\\z1..zq. M z1..zq`` with every eager slot and the result ``n`` boxes deeper."""
    doms, res = [], m.formula
    while isinstance(res, Eager):
        doms.append(res.dom)
        res = res.cod
    if n == 0:
        return m
    depths = [modal_depth(d) for d in doms]
    zs = [f"z{j}" for j in range(1, len(doms) + 1)]
    body = pbox(papp(_hole(m), *[pbox(PVar(z), d) for z, d in zip(zs, depths)]), n)
    spec = [(z, EAGER, pars(n - 1, dom)) for z, dom in zip(zs, doms)]
    ty = eager_chain([pars(n, d) for d in doms], pars(n, res))
    return _finish("deepen", (n,), plam(spec, body), ty)


def apply_eager(m: TypedTerm, args: Sequence[tuple[TypedTerm, int]]) -> TypedTerm:
    """``M A1..Ar`` where each ``Ai`` is boxed the given number of times to fit its slot."""
    doms, res = _eager_doms(m.formula, len(args), "apply_eager")
    proof = papp(_hole(m), *[pbox(_hole(a), k) for a, k in args])
    for (a, k), d in zip(args, doms):
        if not alpha_eq_type(pars(k, a.formula), d):
            raise TypeMismatch(f"apply_eager: argument {show(pars(k, a.formula))} for slot {show(d)}")
    return _finish("apply", (len(args),), proof, res)


# -- coerce and diagonal ------------------------------------------------------------------------

@lru_cache(maxsize=None)
def coerce(m: int) -> TypedTerm:
    """``W -o $^m W``, rebuilding its argument ``m`` boxes deep."""
    if m < 0:
        raise ValueError("coerce depth must be >= 0")
    if m == 0:
        proof = PLam("x", LIN, W, PVar("x"))
    elif m == 1:
        run = PLam("z", PAR, endo(W), pbox(PApp(PVar("z"), _hole(word(0)))))
        it = papp(PInst(PVar("n"), W), PBox("!", _hole(ws(0))), PBox("!", _hole(ws(1))))
        proof = PLam("n", LIN, W, PApp(run, it))
    else:
        proof = PLam("x", LIN, W, PApp(_hole(lembed(1, 1, coerce(m - 1))),
                                       PApp(_hole(coerce(1)), PVar("x"))))
    return _finish("coerce", (m,), proof, Lin(W, pars(m, W)))


@lru_cache(maxsize=None)
def diagonal(m: int, n: int) -> TypedTerm:
    """``W -o $(tensor of n copies of $^m W)``, each copy rebuilt from scratch."""
    if m < 1 or n < 1:
        raise ValueError("diagonal needs m, n >= 1")
    comp = pars(m, W)
    tup = tensor_formula([comp] * n)
    xs = [f"x{i}" for i in range(1, n + 1)]

    def step(d: int) -> Proof:
        emb = bembed(m, ws(d))
        out = PGen("t", PLam("z", LIN, eager_chain([comp] * n, TVar("t")),
                             papp("z", *[PApp(_hole(emb), pbox(PVar(x), m)) for x in xs])))
        cont = plam([(x, EAGER, pars(m - 1, W)) for x in xs], out)
        return PLam("w", LIN, tup, PApp(PInst(PVar("w"), tup), cont))

    zero = pbox(_hole(word(0)), m)
    zeros = PGen("t", PLam("z", LIN, eager_chain([comp] * n, TVar("t")), papp("z", *[zero] * n)))
    run = PLam("z", PAR, endo(tup), pbox(PApp(PVar("z"), zeros)))
    it = papp(PInst(PVar("w"), tup), PBox("!", step(0)), PBox("!", step(1)))
    proof = PLam("w", LIN, W, PApp(run, it))
    return _finish("diagonal", (m, n), proof, Lin(W, Par(tup)))


# -- iteration and safe-argument plumbing ---------------------------------------------------------

ITERATOR_NOTE = "no derivation: the iterator's typing is not constructed here"


def _step_gen(d: int, g: Term, nhat: int, shat: int) -> Term:
    ns = [f"n{i}" for i in range(1, nhat + 1)]
    ss = [f"s{j}" for j in range(1, shat + 1)]
    cont = lam("x r", lam("k", app("k", App(ws(d).term, Var("x")), app(g, "x", *ns, *ss, "r"))))
    return lam("st", App(Var("st"), cont))


def iterator(nhat: int, shat: int, g0: TypedTerm, g1: TypedTerm, g2: TypedTerm, m: int) -> TypedTerm:
    """Iterate over the bits of the first argument, most significant first.

    The state is a pair (prefix read so far, partial result); step ``d`` maps it
    to ``(Ws_d prefix, G_d prefix n s r)``.
    """
    gty = _g_formula(nhat, shat, m)
    for g in (g0, g1, g2):
        if not is_closed(g.term):
            raise TypeMismatch("iterator step functions must be closed")
        if not alpha_eq_type(g.formula, gty):
            raise TypeMismatch(f"iterator step has {show(g.formula)}, expected {show(gty)}")
    ns = [f"n{i}" for i in range(1, nhat + 1)]
    ss = [f"s{j}" for j in range(1, shat + 1)]
    zero = word(0).term
    init = lam("k", app("k", zero, app(g2.term, zero, *ns, *ss, zero)))
    final = lam("x r", Var("r"))
    body = app("a", _step_gen(0, g0.term, nhat, shat), _step_gen(1, g1.term, nhat, shat), init, final)
    term = lam(["a", *ns, *ss], body)
    ty = eager_chain([Par(W)] * (1 + nhat) + [pars(m + 4, W)] * shat, pars(m + 4, W))
    return untyped(term, ty, "iterator", (nhat, shat, m), ITERATOR_NOTE)


def _g_formula(nhat: int, shat: int, m: int) -> Formula:
    return eager_chain([Par(W)] * (1 + nhat) + [pars(m, W)] * (shat + 1), pars(m, W))


def _shape(m: TypedTerm, nhat: int, what: str) -> tuple[int, int]:
    """Safe arity and depth of ``M : ($W)^nhat =o ($^d W)^s =o $^d W``."""
    doms, res = [], m.formula
    while isinstance(res, Eager):
        doms.append(res.dom)
        res = res.cod
    d = modal_depth(res)
    if len(doms) < nhat or any(not alpha_eq_type(x, Par(W)) for x in doms[:nhat]):
        raise TypeMismatch(f"{what}: expected {nhat} normal $W slots in {show(m.formula)}")
    if any(not alpha_eq_type(x, pars(d, W)) for x in doms[nhat:]) or not alpha_eq_type(res, pars(d, W)):
        raise TypeMismatch(f"{what}: safe slots and result must share depth in {show(m.formula)}")
    return len(doms) - nhat, d


def share(nhat: int, shat: int, m: int, mm: TypedTerm) -> TypedTerm:
    """``share[M] n s1..ss`` rewrites to ``M n s1..ss ss``."""
    s, d = _shape(mm, nhat, "share")
    if shat < 1 or s != shat + 1 or d != m:
        raise TypeMismatch(f"share({nhat},{shat},{m}) needs {shat + 1} safe slots at depth {m}")
    ys = [f"y{j}" for j in range(1, shat + 2)]
    xs = [f"x{i}" for i in range(1, nhat + 1)]
    g0 = untyped(lam(["w", *xs, *ys], word(0).term), _g_formula(nhat, shat, m))
    g1 = untyped(Abs("w", mm.term), _g_formula(nhat, shat, m))
    g2 = untyped(lam(["w", *xs, *ys], Var(ys[shat - 1])), _g_formula(nhat, shat, m))
    it = iterator(nhat, shat, g0, g1, g2, m)
    return untyped(App(it.term, word(1).term), srn_formula(nhat, shat, m + 4), "share",
                   (nhat, shat, m), ITERATOR_NOTE)


def rotate(nhat: int, shat: int, m: int, mm: TypedTerm) -> TypedTerm:
    """``rotate[M] n s1..ss`` rewrites to ``M n s2..ss s1``."""
    s, d = _shape(mm, nhat, "rotate")
    if s != shat or d != m:
        raise TypeMismatch(f"rotate({nhat},{shat},{m}) needs {shat} safe slots at depth {m}")
    xs = [f"x{i}" for i in range(1, nhat + 1)]
    ys = [f"y{j}" for j in range(1, shat + 1)]
    order = ys[-1:] + ys[:-1]
    body = papp(_hole(mm), *[pbox(PVar(x)) for x in xs], *[pbox(PVar(y), m) for y in ys])
    spec = [(x, EAGER, W) for x in xs] + [(y, EAGER, pars(m - 1, W)) for y in order]
    return _finish("rotate", (nhat, shat, m), plam(spec, body), mm.formula)


def mshare(nhat: int, p: int, q: int, m: int, mm: TypedTerm) -> TypedTerm:
    """``mshare[M] n s1..sp`` rewrites to ``M n s1..sp sp..sp`` (q extra copies)."""
    if p == 0 or q == 0:
        return mm
    if q == 1:
        return share(nhat, p, m, mm)
    return share(nhat, p, m + 4 * (q - 1), mshare(nhat, p + 1, q - 1, m, mm))


def rmshare(nhat: int, p: int, q: int, m: int, mm: TypedTerm) -> TypedTerm:
    """``rotate`` after ``mshare``: ``M n s2..sp s1..s1`` with q+1 copies of ``s1``."""
    if p == 0 or q == 0:
        return mm
    if p == 1:
        return mshare(nhat, 1, q, m, mm)
    return rotate(nhat, p, m + 4 * q, mshare(nhat, p, q, m, mm))


def mshsqcomp(nhat: int, p: int, i: int, m: int, mm: TypedTerm) -> TypedTerm:
    """Feed ``i`` single safe arguments to ``M`` as blocks of ``p`` copies each.

    ``mshsqcomp[M] n a1..ai B1..B(p-i)`` rewrites to ``M n B1..B(p-i) A1..Ai``
    where each ``B`` is already a block and ``Aj`` is ``aj`` repeated p times.
    """
    if p <= 1 or i == 0:
        return mm
    inner = mshsqcomp(nhat, p, i - 1, m, mm)
    return rmshare(nhat, i + p * (p - i), p - 1, m + 4 * (p - 1) * (i - 1), inner)


def _eta(q: int, t: Term, stem: str = "e") -> Term:
    names = [f"{stem}{i}" for i in range(1, q + 1)]
    return lam(names, app(t, *names))


def sqcomp(nhat: int, shat: int, nprime: int, f: TypedTerm, gs: Sequence[TypedTerm],
           hs: Sequence[TypedTerm], m: int) -> TypedTerm:
    """Square composition: ``F (G1 n)..(Gn' n) (H1 n s)..(Hs' n s)`` from ``n`` and the
    ``s`` safe values each repeated ``s`` times."""
    sprime = len(hs)
    if len(gs) != nprime:
        raise TypeMismatch(f"sqcomp expects {nprime} normal functions, got {len(gs)}")
    if _shape(f, nprime, "sqcomp F") != (sprime, m):
        raise TypeMismatch(f"sqcomp: F must take {nprime} normal and {sprime} safe slots at depth {m}")
    for g in gs:
        if _shape(g, nhat, "sqcomp G") != (0, m):
            raise TypeMismatch(f"sqcomp: every G takes {nhat} normal slots, depth {m}")
    arities = [_shape(h, nhat, "sqcomp H") for h in hs]
    if any(d != m for _, d in arities):
        raise TypeMismatch(f"sqcomp: every H has depth {m}")
    if shat != max([a for a, _ in arities] + [sprime]):
        raise TypeMismatch("sqcomp: s must be the maximum of the safe arities and their count")
    s = shat
    ns = [f"n{k}" for k in range(1, nhat + 1)]
    ty = srn_formula(nhat, s * s, 2 * m + 1)
    note = "term-level construction; formula as stated, no derivation"
    if nprime + s == 0:
        return untyped(lam(ns, f.term), ty, "sqcomp", (nhat, shat, nprime, m), note)
    zero = word(0).term
    fprime = lam([f"x{i}" for i in range(1, nprime + 1)] + [f"y{j}" for j in range(1, s + 1)],
                 app(f.term, *[f"x{i}" for i in range(1, nprime + 1)],
                     *[f"y{j}" for j in range(1, sprime + 1)]))
    hprime = []
    for i in range(1, s + 1):
        zs = [f"z{k}" for k in range(1, nhat + 1)]
        wsn = [f"w{k}" for k in range(1, s + 1)]
        if i <= sprime:
            si = arities[i - 1][0]
            hprime.append(lam(zs + wsn, app(hs[i - 1].term, *zs, *wsn[:si])))
        else:
            hprime.append(lam(zs + wsn, zero))  # padding: erase everything, yield 0
    cl = lembed(1, 1, coerce(max(m - 1, 0))).term
    x = lambda i, k: f"x{i}_{k}"
    y = lambda j, k: f"y{j}_{k}"
    w = lambda r, c: f"w{r}_{c}"
    args = [app(g.term, *[x(i, k) for k in range(1, nhat + 1)]) for i, g in enumerate(gs, 1)]
    for j in range(1, s + 1):
        cols = [App(cl, Var(y(j, k))) for k in range(1, nhat + 1)]
        args.append(app(_eta(nhat + s, hprime[j - 1]), *cols, *[w(r, j) for r in range(1, s + 1)]))
    body = app(_eta(nprime + s, fprime), *args)
    body = lam([w(r, c) for r in range(1, s + 1) for c in range(1, s + 1)], body)
    for k in range(nhat, 0, -1):
        body = tensor_match([x(i, k) for i in range(1, nprime + 1)] + [y(j, k) for j in range(1, s + 1)], body)
    g_term = _eta(nhat + s * s, body, "g")
    diag = lembed(1, 1, diagonal(1, nprime + s)).term
    term = lam(ns, app(g_term, *[App(diag, Var(nk)) for nk in ns]))
    return untyped(term, ty, "sqcomp", (nhat, shat, nprime, m), note)


def lincomp(nhat: int, f: TypedTerm, gs: Sequence[TypedTerm], hs: Sequence[TypedTerm], m: int) -> TypedTerm:
    """Linear composition: ``F (G1 n)..(Gn' n) (H1 n b1)..(Hs' n bs')`` where the safe
    arguments are split into consecutive blocks ``bj``, one per ``Hj``."""
    nprime, sprime = len(gs), len(hs)
    if _shape(f, nprime, "lincomp F") != (sprime, m):
        raise TypeMismatch(f"lincomp: F must take {nprime} normal and {sprime} safe slots at depth {m}")
    for g in gs:
        if _shape(g, nhat, "lincomp G") != (0, m):
            raise TypeMismatch(f"lincomp: every G takes {nhat} normal slots, depth {m}")
    blocks = []
    for h in hs:
        width, d = _shape(h, nhat, "lincomp H")
        if d != m:
            raise TypeMismatch(f"lincomp: every H has depth {m}")
        blocks.append(width)
    ns = [f"n{k}" for k in range(1, nhat + 1)]
    ys = [f"y{j}" for j in range(1, sum(blocks) + 1)]
    ty = srn_formula(nhat, len(ys), 2 * m + 1)
    note = "term-level construction; formula as stated, no derivation"
    copies = nprime + sprime
    if copies == 0:
        return untyped(lam(ns + ys, f.term), ty, "lincomp", (nhat, tuple(blocks), nprime, m), note)
    x = lambda i, k: f"x{i}_{k}"
    args = [app(g.term, *[x(i, k) for k in range(1, nhat + 1)]) for i, g in enumerate(gs, 1)]
    at = 0
    for j, (h, width) in enumerate(zip(hs, blocks), nprime + 1):
        args.append(app(h.term, *[x(j, k) for k in range(1, nhat + 1)], *ys[at:at + width]))
        at += width
    body = lam(ys, app(f.term, *args))
    for k in range(nhat, 0, -1):
        body = tensor_match([x(i, k) for i in range(1, copies + 1)], body)
    g_term = _eta(nhat + len(ys), body, "g")
    diag = lembed(1, 1, diagonal(1, copies)).term
    term = lam(ns, app(g_term, *[App(diag, Var(nk)) for nk in ns]))
    return untyped(term, ty, "lincomp", (nhat, tuple(blocks), nprime, m), note)


# -- registry -------------------------------------------------------------------------------------

REGISTRY: tuple[dict, ...] = (
    {"name": "word", "params": ["n"], "formula": "W",
     "contract": "0 is \\0 1 y.y; otherwise the binary digits applied to y, least significant outermost"},
    {"name": "Ws0", "params": [], "formula": "W -o W", "contract": "Ws0 word(n) ->* word(2n)"},
    {"name": "Ws1", "params": [], "formula": "W -o W", "contract": "Ws1 word(n) ->* word(2n+1)"},
    {"name": "Pred", "params": [], "formula": "W -o W", "contract": "Pred word(n) ->* word(n div 2)"},
    {"name": "B", "params": [], "formula": "W -o W -o W -o W",
     "contract": "B word(0) a b ->* a; B word(n>0) a b ->* b"},
    {"name": "tensor", "params": ["M1..Mm"], "formula": "forall t. (A1 =o .. =o Am =o t) -o t",
     "contract": "(\\<<x1..xm>>.M) <<M1..Mm>> ->+ (\\x1..xm.M) M1..Mm for closed Mi"},
    {"name": "bembed", "params": ["n", "M"], "formula": "$^n L =o $^(m+n) A",
     "contract": "\\x.M x"},
    {"name": "lembed", "params": ["n", "p", "M"], "formula": "($^n L1 -o .. -o $^n Lp) -o $^(m+n) A",
     "contract": "\\x1..xp.M x1..xp"},
    {"name": "eembed", "params": ["n", "p", "q", "M"], "formula": "($W =o)^p ($^(m+n) L =o)^q $^(m+n) A",
     "contract": "normal slots rebuilt n boxes deeper, safe slots passed through"},
    {"name": "coerce", "params": ["m"], "formula": "W -o $^m W", "contract": "coerce(m) word(n) ->* word(n)"},
    {"name": "diagonal", "params": ["m", "n"], "formula": "W -o $(tensor of n copies of $^m W)",
     "contract": "diagonal(m,n) word(a) ->+ <<word(a),..,word(a)>>"},
    {"name": "iterator", "params": ["nhat", "shat", "G0", "G1", "G2", "m"],
     "formula": "$W =o ($W =o)^nhat ($^(m+4) W =o)^shat $^(m+4) W",
     "contract": "base: G2 0 n s 0; step with bit d: G_d prefix n s r"},
    {"name": "share", "params": ["nhat", "shat", "m", "M"], "formula": "($W =o)^nhat ($^(m+4) W =o)^shat $^(m+4) W",
     "contract": "share[M] n s1..ss ->+ M n s1..ss ss"},
    {"name": "rotate", "params": ["nhat", "shat", "m", "M"], "formula": "same as M",
     "contract": "rotate[M] n s1..ss ->* M n s2..ss s1"},
    {"name": "mshare", "params": ["nhat", "p", "q", "m", "M"], "formula": "($W =o)^nhat ($^(m+4q) W =o)^p $^(m+4q) W",
     "contract": "mshare[M] n s1..sp ->* M n s1..sp (sp)^q"},
    {"name": "rmshare", "params": ["nhat", "p", "q", "m", "M"], "formula": "($W =o)^nhat ($^(m+4q) W =o)^p $^(m+4q) W",
     "contract": "rmshare[M] n s1..sp ->* M n s2..sp (s1)^(q+1)"},
    {"name": "sqcomp", "params": ["nhat", "shat", "n'", "F", "Gs", "Hs", "m"],
     "formula": "($W =o)^nhat ($^(2m+1) W =o)^(shat^2) $^(2m+1) W",
     "contract": "applied to n and blocks s1^s..ss^s ->+ F g1..gn' h1..hs'"},
    {"name": "lincomp", "params": ["nhat", "F", "Gs", "Hs", "m"],
     "formula": "($W =o)^nhat ($^(2m+1) W =o)^(l1+..+ls') $^(2m+1) W",
     "contract": "n b1..bs' ->+ F (G1 n)..(Gn' n) (H1 n b1)..(Hs' n bs')"},
    {"name": "mshsqcomp", "params": ["nhat", "p", "i", "m", "M"],
     "formula": "($W =o)^nhat ($^(m+4(p-1)i) W =o)^(i+p(p-i)) $^(m+4(p-1)i) W",
     "contract": "n a1..ai B1..B(p-i) ->* M n B1..B(p-i) a1^p..ai^p"},
)


def registry_json() -> list[dict]:
    return [dict(e) for e in REGISTRY]
