"""Pure lambda-terms: construction, free variables, substitution, printing."""

from __future__ import annotations

import re
import sys
from typing import Iterable, Mapping, Union

sys.setrecursionlimit(max(sys.getrecursionlimit(), 200_000))


class Var:
    """A variable.  Nodes are immutable by convention; fields are cached at construction."""

    __slots__ = ("name", "fv", "size", "_hash", "has_redex")
    __match_args__ = ("name",)

    def __init__(self, name: str) -> None:
        self.name = name
        self.fv = frozenset((name,))
        self.size = 1
        self._hash = hash(("v", name))
        self.has_redex = False

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Var) and other.name == self.name

    def __repr__(self) -> str:
        return f"Var(name={self.name!r})"

    def __str__(self) -> str:
        return print_term(self)

    def __reduce__(self):
        return (Var, (self.name,))


class Abs:
    __slots__ = ("binder", "body", "fv", "size", "_hash", "has_redex")
    __match_args__ = ("binder", "body")

    def __init__(self, binder: str, body: "Term") -> None:
        self.binder = binder
        self.body = body
        self.has_redex = body.has_redex
        fv = body.fv
        self.fv = fv - {binder} if binder in fv else fv
        self.size = body.size + 1
        self._hash = hash(("l", binder, body._hash))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return _struct_eq(self, other)

    def __repr__(self) -> str:
        return f"Abs(binder={self.binder!r}, body={self.body!r})"

    def __str__(self) -> str:
        return print_term(self)

    def __reduce__(self):
        return (Abs, (self.binder, self.body))


class App:
    __slots__ = ("fun", "arg", "fv", "size", "_hash", "has_redex")
    __match_args__ = ("fun", "arg")

    def __init__(self, fun: "Term", arg: "Term") -> None:
        self.fun = fun
        self.arg = arg
        # some App(Abs, _) pattern occurs inside; eligibility is decided by the reducer
        self.has_redex = fun.__class__ is Abs or fun.has_redex or arg.has_redex
        a, b = fun.fv, arg.fv
        self.fv = a if b <= a else (b if a <= b else a | b)
        self.size = fun.size + arg.size + 1
        self._hash = hash(("a", fun._hash, arg._hash))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return _struct_eq(self, other)

    def __repr__(self) -> str:
        return f"App(fun={self.fun!r}, arg={self.arg!r})"

    def __str__(self) -> str:
        return print_term(self)

    def __reduce__(self):
        return (App, (self.fun, self.arg))


Term = Union[Var, Abs, App]


def _struct_eq(a: object, b: object) -> bool:
    """Syntactic (not alpha) equality, iterative to survive deep terms."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if type(x) is not type(y) or x._hash != y._hash:
            return False
        if isinstance(x, Var):
            if x.name != y.name:
                return False
        elif isinstance(x, Abs):
            if x.binder != y.binder:
                return False
            stack.append((x.body, y.body))
        else:
            stack.append((x.fun, y.fun))
            stack.append((x.arg, y.arg))
    return True


# -- smart constructors -------------------------------------------------------

def lam(binders: str | Iterable[str], body: Term) -> Term:
    """``lam("x y", M)`` is ``\\x.\\y.M``."""
    names = binders.split() if isinstance(binders, str) else list(binders)
    for name in reversed(names):
        body = Abs(name, body)
    return body


def app(head: Term | str, *args: Term | str) -> Term:
    """Left-associated application; strings are read as variables."""
    t = Var(head) if isinstance(head, str) else head
    for a in args:
        t = App(t, Var(a) if isinstance(a, str) else a)
    return t


# -- basic operations ---------------------------------------------------------

def free_vars(t: Term) -> frozenset:
    return t.fv


def size(t: Term) -> int:
    return t.size


def is_value(t: Term) -> bool:
    return not isinstance(t, App)


def is_closed(t: Term) -> bool:
    return not t.fv


def occurrences(x: str, t: Term) -> int:
    """Number of free occurrences of ``x`` in ``t``."""
    count = 0
    stack = [t]
    while stack:
        s = stack.pop()
        if x not in s.fv:
            continue
        if isinstance(s, Var):
            count += 1
        elif isinstance(s, Abs):
            stack.append(s.body)
        else:
            stack.append(s.fun)
            stack.append(s.arg)
    return count


def occurs_once(x: str, t: Term) -> bool:
    """Whether ``x`` occurs free exactly once; stops at the second occurrence."""
    seen = False
    stack = [t]
    while stack:
        s = stack.pop()
        if x not in s.fv:
            continue
        if isinstance(s, Var):
            if seen:
                return False
            seen = True
        elif isinstance(s, Abs):
            stack.append(s.body)
        else:
            stack.append(s.fun)
            stack.append(s.arg)
    return seen


_SUFFIX = re.compile(r"^(.*?)(_\d+)?$")


def fresh_name(base: str, avoid: Iterable[str] | frozenset) -> str:
    """Deterministic fresh name: ``base_k`` with the least ``k`` not in ``avoid``."""
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    stem = _SUFFIX.match(base).group(1) or base
    k = 1
    while f"{stem}_{k}" in avoid:
        k += 1
    return f"{stem}_{k}"


def substitute(t: Term, bindings: Mapping[str, Term]) -> Term:
    """Capture-free simultaneous substitution of ``bindings`` into ``t``."""
    live = {x: n for x, n in bindings.items() if x in t.fv}
    if not live:
        return t
    return _subst(t, live)


def substitute1(t: Term, x: str, n: Term) -> Term:
    """Capture-free substitution of a single variable."""
    if x not in t.fv:
        return t
    return _subst1(t, x, n, n.fv)


def _subst1(t: Term, x: str, n: Term, nfv: frozenset) -> Term:
    if isinstance(t, Var):
        return n
    if isinstance(t, App):
        f = _subst1(t.fun, x, n, nfv) if x in t.fun.fv else t.fun
        a = _subst1(t.arg, x, n, nfv) if x in t.arg.fv else t.arg
        return App(f, a)
    y, body = t.binder, t.body
    if y in nfv:
        z = fresh_name(y, body.fv | nfv | {x})
        return Abs(z, _subst(body, {y: Var(z), x: n}))
    return Abs(y, _subst1(body, x, n, nfv))


def _subst(t: Term, sub: dict) -> Term:
    if isinstance(t, Var):
        return sub.get(t.name, t)
    if isinstance(t, App):
        f = _subst(t.fun, sub) if not t.fun.fv.isdisjoint(sub) else t.fun
        a = _subst(t.arg, sub) if not t.arg.fv.isdisjoint(sub) else t.arg
        if f is t.fun and a is t.arg:
            return t
        return App(f, a)
    y, body = t.binder, t.body
    inner = {x: n for x, n in sub.items() if x != y and x in body.fv}
    if not inner:
        return t
    incoming = frozenset().union(*(n.fv for n in inner.values()))
    if y in incoming:
        z = fresh_name(y, body.fv | incoming | set(inner))
        inner[y] = Var(z)
        y = z
    return Abs(y, _subst(body, inner))


# -- alpha equivalence --------------------------------------------------------

def debruijn(t: Term) -> tuple:
    """Nameless key: bound variables become indices, free ones keep names."""
    def go(s: Term, env: tuple) -> tuple:
        if isinstance(s, Var):
            for i in range(len(env) - 1, -1, -1):
                if env[i] == s.name:
                    return ("b", len(env) - 1 - i)
            return ("f", s.name)
        if isinstance(s, Abs):
            return ("l", go(s.body, env + (s.binder,)))
        return ("a", go(s.fun, env), go(s.arg, env))
    return go(t, ())


def alpha_eq(a: Term, b: Term) -> bool:
    if a == b:
        return True
    if a.size != b.size or a.fv != b.fv:
        return False
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Term, b: Term, ea: dict, eb: dict, depth: int) -> bool:
    while True:
        if type(a) is not type(b):
            return False
        if isinstance(a, Var):
            da, db = ea.get(a.name), eb.get(b.name)
            if da is None and db is None:
                return a.name == b.name
            return da == db
        if isinstance(a, Abs):
            ea = {**ea, a.binder: depth}
            eb = {**eb, b.binder: depth}
            depth += 1
            a, b = a.body, b.body
            continue
        if not _alpha(a.fun, b.fun, ea, eb, depth):
            return False
        a, b = a.arg, b.arg


# -- concrete syntax ----------------------------------------------------------

class TermSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\\|λ)|(\.)|(\()|(\))|([A-Za-z0-9_'][A-Za-z0-9_'#]*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
        kind = ("lam", "dot", "lp", "rp", "id")[m.lastindex - 1]
        tokens.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def parse_term(text: str) -> Term:
    """Parse ``\\x y.M``, application by juxtaposition, parentheses."""
    toks = _tokenize(text)
    pos = 0

    def peek() -> tuple[str, str, int]:
        return toks[pos]

    def expect(kind: str) -> tuple[str, str, int]:
        nonlocal pos
        tok = toks[pos]
        if tok[0] != kind:
            raise TermSyntaxError(f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2])
        pos += 1
        return tok

    def term() -> Term:
        nonlocal pos
        if peek()[0] == "lam":
            pos += 1
            names = [expect("id")[1]]
            while peek()[0] == "id":
                names.append(expect("id")[1])
            expect("dot")
            return lam(names, term())
        head = atom()
        while peek()[0] in ("id", "lp", "lam"):
            if peek()[0] == "lam":
                head = App(head, term())
                break
            head = App(head, atom())
        return head

    def atom() -> Term:
        nonlocal pos
        kind, val, at = peek()
        if kind == "id":
            pos += 1
            return Var(val)
        if kind == "lp":
            pos += 1
            inner = term()
            expect("rp")
            return inner
        raise TermSyntaxError(f"unexpected {val or 'end of input'!r}", at)

    result = term()
    if peek()[0] != "eof":
        raise TermSyntaxError(f"trailing input {peek()[1]!r}", peek()[2])
    return result


def print_term(t: Term) -> str:
    out: list[str] = []

    def go(s: Term, ctx: str) -> None:
        # ctx: "top" (anything), "fun" (left of application), "arg" (right of application)
        if isinstance(s, Var):
            out.append(s.name)
        elif isinstance(s, Abs):
            names, body = [], s
            while isinstance(body, Abs):
                names.append(body.binder)
                body = body.body
            if ctx != "top":
                out.append("(")
            out.append("\\" + " ".join(names) + ".")
            go(body, "top")
            if ctx != "top":
                out.append(")")
        else:
            if ctx == "arg":
                out.append("(")
            go(s.fun, "fun")
            out.append(" ")
            go(s.arg, "arg")
            if ctx == "arg":
                out.append(")")

    go(t, "top")
    return "".join(out)


# -- JSON ---------------------------------------------------------------------

def term_to_json(t: Term) -> dict:
    if isinstance(t, Var):
        return {"var": t.name}
    if isinstance(t, Abs):
        return {"abs": [t.binder, term_to_json(t.body)]}
    return {"app": [term_to_json(t.fun), term_to_json(t.arg)]}


def term_from_json(obj: dict) -> Term:
    if "var" in obj:
        return Var(obj["var"])
    if "abs" in obj:
        name, body = obj["abs"]
        return Abs(name, term_from_json(body))
    if "app" in obj:
        f, a = obj["app"]
        return App(term_from_json(f), term_from_json(a))
    raise ValueError(f"not a term object: {sorted(obj)}")
