"""Safe recursion on notation: syntax, reference evaluator, linearity and weight.

Numerals are plain naturals; the binary view is only used by the successor,
predecessor and branch functions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union


class ArityError(ValueError):
    """A definition or application whose arities do not line up."""


class UnboundVariable(KeyError):
    """A term variable missing from the environment."""


class OpenTerm(ValueError):
    """Weight requested for a term with variables."""


# ---------------------------------------------------------------- definitions


@dataclass(frozen=True)
class Zero:
    k: int = 0
    l: int = 0

    def __post_init__(self) -> None:
        if self.k < 0 or self.l < 0:
            raise ArityError(f"z[{self.k};{self.l}]: negative arity")


@dataclass(frozen=True)
class S0:
    pass


@dataclass(frozen=True)
class S1:
    pass


@dataclass(frozen=True)
class Pred:
    pass


@dataclass(frozen=True)
class Branch:
    pass


@dataclass(frozen=True)
class Proj:
    k: int
    l: int
    i: int

    def __post_init__(self) -> None:
        if self.k < 0 or self.l < 0 or not 1 <= self.i <= self.k + self.l:
            raise ArityError(f"pi[{self.k};{self.l};{self.i}]: need 1 <= i <= k+l")


@dataclass(frozen=True)
class Comp:
    """Safe composition; ``linear`` selects the block-split (ClSRN) variant."""

    k: int
    l: int
    kp: int
    lp: int
    f: "SrnDef"
    normals: tuple = ()
    safes: tuple = ()
    linear: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "normals", tuple(self.normals))
        object.__setattr__(self, "safes", tuple(self.safes))
        tag = "lcomp" if self.linear else "comp"
        if arity(self.f) != (self.kp, self.lp):
            raise ArityError(f"{tag}: f has arity {arity(self.f)}, expected ({self.kp}, {self.lp})")
        if len(self.normals) != self.kp or len(self.safes) != self.lp:
            raise ArityError(f"{tag}: expected {self.kp} normal and {self.lp} safe components")
        for j, g in enumerate(self.normals, 1):
            if arity(g) != (self.k, 0):
                raise ArityError(f"{tag}: normal component {j} has arity {arity(g)}, expected ({self.k}, 0)")
        if self.linear:
            for j, h in enumerate(self.safes, 1):
                if arity(h)[0] != self.k:
                    raise ArityError(f"{tag}: safe component {j} has normal arity {arity(h)[0]}, expected {self.k}")
            total = sum(arity(h)[1] for h in self.safes)
            if total != self.l:
                raise ArityError(f"{tag}: safe blocks sum to {total}, expected {self.l}")
        else:
            for j, h in enumerate(self.safes, 1):
                if arity(h) != (self.k, self.l):
                    raise ArityError(f"{tag}: safe component {j} has arity {arity(h)}, expected ({self.k}, {self.l})")

    @property
    def blocks(self) -> tuple:
        """Safe arities of the safe components."""
        return tuple(arity(h)[1] for h in self.safes)


@dataclass(frozen=True)
class Rec:
    """Safe recursion; ``k`` counts the recursion argument."""

    k: int
    l: int
    g: "SrnDef"
    h0: "SrnDef"
    h1: "SrnDef"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ArityError("rec: normal arity must be at least 1")
        if arity(self.g) != (self.k - 1, self.l):
            raise ArityError(f"rec: base has arity {arity(self.g)}, expected ({self.k - 1}, {self.l})")
        for name, h in (("h0", self.h0), ("h1", self.h1)):
            if arity(h) != (self.k, self.l + 1):
                raise ArityError(f"rec: {name} has arity {arity(h)}, expected ({self.k}, {self.l + 1})")


SrnDef = Union[Zero, S0, S1, Pred, Branch, Proj, Comp, Rec]
BASE = (Zero, S0, S1, Pred, Branch, Proj)


def arity(f: SrnDef) -> tuple:
    """Normal and safe arity."""
    if isinstance(f, (Zero, Proj, Comp, Rec)):
        return (f.k, f.l)
    if isinstance(f, (S0, S1, Pred)):
        return (0, 1)
    if isinstance(f, Branch):
        return (0, 3)
    raise TypeError(f"not a definition: {f!r}")


# ---------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("literals are naturals")


@dataclass(frozen=True)
class ApplyDef:
    f: SrnDef
    args: tuple = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        k, l = arity(self.f)
        if len(self.args) != k + l:
            raise ArityError(f"application expects {k + l} arguments, got {len(self.args)}")

    @property
    def normals(self) -> tuple:
        return self.args[: arity(self.f)[0]]

    @property
    def safes(self) -> tuple:
        return self.args[arity(self.f)[0]:]


SrnTerm = Union[Var, Lit, ApplyDef]
Env = Mapping[str, int]


def free_vars(t: SrnTerm) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Lit):
        return frozenset()
    out: frozenset = frozenset()
    for a in t.args:
        out |= free_vars(a)
    return out


def numeral(n: int) -> SrnTerm:
    """The closed term s_b(...(s1(z()))...) spelling n in binary."""
    t: SrnTerm = ApplyDef(Zero(0, 0), ())
    for b in bin(n)[2:] if n else "":
        t = ApplyDef(S1() if b == "1" else S0(), (t,))
    return t


# ------------------------------------------------------------------ semantics


def eval_def(f: SrnDef, normals, safes) -> int:
    """Value of ``f`` on the given normal and safe arguments."""
    normals, safes = list(normals), list(safes)
    k, l = arity(f)
    if len(normals) != k or len(safes) != l:
        raise ArityError(f"{show_def(f)} expects ({k}, {l}) arguments, got ({len(normals)}, {len(safes)})")
    if any(not isinstance(x, int) or x < 0 for x in normals + safes):
        raise ValueError("arguments must be naturals")
    if isinstance(f, Zero):
        return 0
    if isinstance(f, S0):
        return 2 * safes[0]
    if isinstance(f, S1):
        return 2 * safes[0] + 1
    if isinstance(f, Pred):
        return safes[0] // 2
    if isinstance(f, Branch):
        y, a, b = safes
        return a if y == 0 else b
    if isinstance(f, Proj):
        return (normals + safes)[f.i - 1]
    if isinstance(f, Comp):
        gs = [eval_def(g, normals, []) for g in f.normals]
        if f.linear:
            hs, at = [], 0
            for h in f.safes:
                width = arity(h)[1]
                hs.append(eval_def(h, normals, safes[at:at + width]))
                at += width
        else:
            hs = [eval_def(h, normals, safes) for h in f.safes]
        return eval_def(f.f, gs, hs)
    if isinstance(f, Rec):
        x, rest = normals[0], normals[1:]
        r = eval_def(f.g, rest, safes)
        prefix = 0
        # unfold from the most significant bit outwards
        for b in bin(x)[2:] if x else "":
            h = f.h1 if b == "1" else f.h0
            r = eval_def(h, [prefix] + rest, safes + [r])
            prefix = 2 * prefix + int(b)
        return r
    raise TypeError(f"not a definition: {f!r}")


def eval_term(t: SrnTerm, env: Env | None = None) -> int:
    env = env or {}
    if isinstance(t, Var):
        if t.name not in env:
            raise UnboundVariable(t.name)
        return env[t.name]
    if isinstance(t, Lit):
        return t.n
    vals = [eval_term(a, env) for a in t.args]
    k = arity(t.f)[0]
    return eval_def(t.f, vals[:k], vals[k:])


def subdefs(f: SrnDef):
    """Immediate sub-definitions."""
    if isinstance(f, Comp):
        return (f.f,) + f.normals + f.safes
    if isinstance(f, Rec):
        return (f.g, f.h0, f.h1)
    return ()


def is_linear_comp(f: Comp) -> bool:
    """Safe arguments split into disjoint blocks, one per safe component."""
    return f.linear or f.lp <= 1 or f.l == 0


def is_clsrn(f: SrnDef) -> bool:
    if isinstance(f, Comp) and not is_linear_comp(f):
        return False
    return all(is_clsrn(g) for g in subdefs(f))


def weight(t) -> Fraction:
    """Weight of a closed term or of a definition."""
    if isinstance(t, BASE):
        return Fraction(0)
    if isinstance(t, Comp):
        return 3 * max([weight(g) for g in subdefs(t)] + [Fraction(1, 3)])
    if isinstance(t, Rec):
        return 2 * max([weight(g) for g in subdefs(t)] + [Fraction(1, 2)])
    if isinstance(t, Var):
        raise OpenTerm(f"variable {t.name!r} in weighted term")
    if isinstance(t, Lit):
        return weight(numeral(t.n))
    if isinstance(t, ApplyDef):
        return 2 * max([weight(t.f)] + [weight(a) for a in t.args] + [Fraction(1, 2)])
    raise TypeError(f"cannot weigh {t!r}")


# ------------------------------------------------------------ surface syntax


def show_def(f: SrnDef) -> str:
    if isinstance(f, Zero):
        return f"z[{f.k};{f.l}]"
    if isinstance(f, (S0, S1, Pred, Branch)):
        return {S0: "s0", S1: "s1", Pred: "p", Branch: "b"}[type(f)]
    if isinstance(f, Proj):
        return f"pi[{f.k};{f.l};{f.i}]"
    if isinstance(f, Comp):
        head = "lcomp" if f.linear else "comp"
        parts = "; ".join(show_def(g) for g in subdefs(f))
        return f"{head}[{f.k};{f.l};{f.kp};{f.lp}]({parts})"
    if isinstance(f, Rec):
        return f"rec[{f.k};{f.l}]({show_def(f.g)}; {show_def(f.h0)}; {show_def(f.h1)})"
    raise TypeError(f"not a definition: {f!r}")


def show_term(t: SrnTerm) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lit):
        return str(t.n)
    return f"{show_def(t.f)}({', '.join(show_term(a) for a in t.args)})"


class SrnSyntaxError(ValueError):
    """Malformed SRN text; carries the offending offset."""

    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(.))")
_KEYWORDS = {"z", "s0", "s1", "p", "pi", "b", "comp", "lcomp", "rec"}


class _Parser:
    def __init__(self, text: str, defs: Mapping[str, SrnDef] | None):
        self.toks = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group(1) is not None:
                self.toks.append(("num", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.toks.append(("id", m.group(2), m.start(2)))
            else:
                self.toks.append(("sym", m.group(3), m.start(3)))
            pos = m.end()
        self.toks.append(("eof", "", len(text)))
        self.i = 0
        self.defs = defs or {}

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, sym: str):
        kind, val, pos = self.take()
        if val != sym or kind not in ("sym", "id"):
            raise SrnSyntaxError(f"expected {sym!r}, found {val or 'end of input'!r}", pos)

    def number(self) -> int:
        kind, val, pos = self.take()
        if kind != "num":
            raise SrnSyntaxError(f"expected a number, found {val or 'end of input'!r}", pos)
        return int(val)

    def indices(self, n: int) -> list:
        self.expect("[")
        out = [self.number()]
        for _ in range(n - 1):
            self.expect(";")
            out.append(self.number())
        self.expect("]")
        return out

    def def_list(self) -> list:
        self.expect("(")
        out = [self.definition()]
        while self.peek()[1] == ";":
            self.take()
            out.append(self.definition())
        self.expect(")")
        return out

    def definition(self) -> SrnDef:
        kind, val, pos = self.take()
        if kind != "id":
            raise SrnSyntaxError(f"expected a definition, found {val or 'end of input'!r}", pos)
        try:
            if val in ("s0", "s1", "p", "b"):
                return {"s0": S0, "s1": S1, "p": Pred, "b": Branch}[val]()
            if val == "z":
                return Zero(*self.indices(2))
            if val == "pi":
                return Proj(*self.indices(3))
            if val in ("comp", "lcomp"):
                k, l, kp, lp = self.indices(4)
                parts = self.def_list()
                if len(parts) != 1 + kp + lp:
                    raise ArityError(f"{val}: expected {1 + kp + lp} components, got {len(parts)}")
                return Comp(k, l, kp, lp, parts[0], parts[1:1 + kp], parts[1 + kp:], linear=val == "lcomp")
            if val == "rec":
                k, l = self.indices(2)
                parts = self.def_list()
                if len(parts) != 3:
                    raise ArityError(f"rec: expected 3 components, got {len(parts)}")
                return Rec(k, l, *parts)
        except ArityError as e:
            raise ArityError(f"{e} at offset {pos}") from None
        if val in self.defs:
            return self.defs[val]
        raise SrnSyntaxError(f"unknown definition {val!r}", pos)

    def term(self) -> SrnTerm:
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Lit(int(val))
        if self._is_var():
            self.take()
            return Var(val)
        f = self.definition()
        return self.application(f, pos)

    def _is_var(self) -> bool:
        kind, val, _ = self.peek()
        if kind != "id" or val in _KEYWORDS or val in self.defs:
            return False
        # an unknown name applied to arguments is reported by definition()
        return self.toks[self.i + 1][1] != "("

    def application(self, f: SrnDef, pos: int) -> SrnTerm:
        self.expect("(")
        args = []
        if self.peek()[1] != ")":
            args.append(self.term())
            while self.peek()[1] == ",":
                self.take()
                args.append(self.term())
        self.expect(")")
        try:
            return ApplyDef(f, args)
        except ArityError as e:
            raise ArityError(f"{e} at offset {pos}") from None

    def top(self):
        kind, val, pos = self.peek()
        if kind == "num" or self._is_var():
            out = self.term()
        else:
            f = self.definition()
            out = self.application(f, pos) if self.peek()[1] == "(" else f
        kind, val, pos = self.peek()
        if kind != "eof":
            raise SrnSyntaxError(f"unexpected {val!r}", pos)
        return out


def parse_srn(text: str, defs: Mapping[str, SrnDef] | None = None):
    """Parse a definition, or a term when an argument list follows."""
    return _Parser(text, defs).top()


def parse_term(text: str, defs: Mapping[str, SrnDef] | None = None) -> SrnTerm:
    out = parse_srn(text, defs)
    if not isinstance(out, (Var, Lit, ApplyDef)):
        raise SrnSyntaxError("expected a term, found a definition", 0)
    return out


def parse_program(text: str) -> dict:
    """Named definitions, one ``name := def`` per line; ``#`` starts a comment."""
    sources: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, body = line.partition(":=")
        name = name.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
            raise SrnSyntaxError(f"line {lineno}: expected 'name := definition'", 0)
        if name in _KEYWORDS or name in sources:
            raise SrnSyntaxError(f"line {lineno}: name {name!r} reserved or redefined", 0)
        sources[name] = (lineno, body)
    defs: dict = {}
    active: set = set()

    def resolve(name: str) -> SrnDef:
        if name in defs:
            return defs[name]
        if name in active:
            raise SrnSyntaxError(f"cyclic reference through {name!r}", 0)
        active.add(name)
        lineno, body = sources[name]
        refs = set(re.findall(r"[A-Za-z_][A-Za-z0-9_']*", body)) & set(sources)
        scope = {r: resolve(r) for r in refs}
        try:
            f = parse_srn(body, scope)
        except SrnSyntaxError as e:
            raise SrnSyntaxError(f"line {lineno}: {e.args[0].rsplit(' at offset', 1)[0]}", e.pos) from None
        except ArityError as e:
            raise ArityError(f"line {lineno}: {e}") from None
        if not isinstance(f, BASE + (Comp, Rec)):
            raise SrnSyntaxError(f"line {lineno}: expected a definition", 0)
        active.discard(name)
        defs[name] = f
        return f

    for name in sources:
        resolve(name)
    return {name: defs[name] for name in sources}


# ----------------------------------------------------------------------- JSON


def def_to_json(f: SrnDef) -> dict:
    if isinstance(f, (S0, S1, Pred, Branch)):
        return {"kind": show_def(f)}
    if isinstance(f, Zero):
        return {"kind": "z", "k": f.k, "l": f.l}
    if isinstance(f, Proj):
        return {"kind": "pi", "k": f.k, "l": f.l, "i": f.i}
    if isinstance(f, Comp):
        return {"kind": "lcomp" if f.linear else "comp", "k": f.k, "l": f.l, "kp": f.kp, "lp": f.lp,
                "f": def_to_json(f.f), "normals": [def_to_json(g) for g in f.normals],
                "safes": [def_to_json(h) for h in f.safes]}
    if isinstance(f, Rec):
        return {"kind": "rec", "k": f.k, "l": f.l, "g": def_to_json(f.g),
                "h0": def_to_json(f.h0), "h1": def_to_json(f.h1)}
    raise TypeError(f"not a definition: {f!r}")


def def_from_json(d: dict) -> SrnDef:
    kind = d["kind"]
    simple = {"s0": S0, "s1": S1, "p": Pred, "b": Branch}
    if kind in simple:
        return simple[kind]()
    if kind == "z":
        return Zero(d["k"], d["l"])
    if kind == "pi":
        return Proj(d["k"], d["l"], d["i"])
    if kind in ("comp", "lcomp"):
        return Comp(d["k"], d["l"], d["kp"], d["lp"], def_from_json(d["f"]),
                    [def_from_json(g) for g in d["normals"]], [def_from_json(h) for h in d["safes"]],
                    linear=kind == "lcomp")
    if kind == "rec":
        return Rec(d["k"], d["l"], def_from_json(d["g"]), def_from_json(d["h0"]), def_from_json(d["h1"]))
    raise ValueError(f"unknown definition kind {kind!r}")


def term_to_json(t: SrnTerm) -> dict:
    if isinstance(t, Var):
        return {"var": t.name}
    if isinstance(t, Lit):
        return {"lit": t.n}
    return {"apply": def_to_json(t.f), "args": [term_to_json(a) for a in t.args]}


def term_from_json(d: dict) -> SrnTerm:
    if "var" in d:
        return Var(d["var"])
    if "lit" in d:
        return Lit(d["lit"])
    return ApplyDef(def_from_json(d["apply"]), [term_from_json(a) for a in d["args"]])
