"""The restricted rewriting relation: erasing, linear-value and shared-value steps.

A redex ``(\\x.M) N`` fires only when

* ``x`` does not occur in ``M`` (erase), or
* ``x`` occurs once and ``N`` is a value (linear-value), or
* ``x`` occurs more than once, ``N`` is a value and ``N`` has at most one
  free variable (shared-value).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import IO, Iterator, Optional

from .terms import (
    Abs, App, Term, Var, is_value, occurrences, occurs_once, substitute1, term_to_json,
)

ERASE = "erase"
LINEAR = "linear-value"
SHARED = "shared-value"

LEFTMOST_OUTERMOST = "leftmost-outermost"
RIGHTMOST_INNERMOST = "rightmost-innermost"
STRATEGIES = (LEFTMOST_OUTERMOST, RIGHTMOST_INNERMOST)

DEFAULT_MAX_STEPS = 10_000_000


class InvalidRedex(ValueError):
    pass


@dataclass(frozen=True)
class Redex:
    path: tuple[int, ...]
    kind: str


@dataclass
class Trace:
    initial: Term
    steps: list[tuple[Redex, Term]] = field(default_factory=list)
    reached_normal_form: bool = False

    @property
    def final(self) -> Term:
        return self.steps[-1][1] if self.steps else self.initial

    def __len__(self) -> int:
        return len(self.steps)

    def dump_jsonl(self, fh: IO[str]) -> None:
        fh.write(json.dumps({"step": 0, "term": term_to_json(self.initial)}) + "\n")
        for i, (r, t) in enumerate(self.steps, 1):
            rec = {"step": i, "path": list(r.path), "kind": r.kind, "term": term_to_json(t)}
            fh.write(json.dumps(rec) + "\n")


def redex_kind(t: Term) -> Optional[str]:
    """Which clause applies at the root of ``t``, or None."""
    if not isinstance(t, App) or not isinstance(t.fun, Abs):
        return None
    x, body, arg = t.fun.binder, t.fun.body, t.arg
    if x not in body.fv:
        return ERASE
    if not is_value(arg):
        return None
    if len(arg.fv) <= 1:
        return LINEAR if occurrences(x, body) == 1 else SHARED
    return LINEAR if occurrences(x, body) == 1 else None


def _eligible(t: Term) -> bool:
    """``redex_kind(t) is not None`` without counting every occurrence."""
    if not isinstance(t, App) or not isinstance(t.fun, Abs):
        return False
    x, body, arg = t.fun.binder, t.fun.body, t.arg
    if x not in body.fv:
        return True
    if isinstance(arg, App):
        return False
    return len(arg.fv) <= 1 or occurs_once(x, body)


def contract(t: App) -> Term:
    x, body = t.fun.binder, t.fun.body
    if x not in body.fv:
        return body
    return substitute1(body, x, t.arg)


def subterm(t: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        if isinstance(t, Abs):
            t = t.body
        elif isinstance(t, App):
            t = t.fun if i == 0 else t.arg
        else:
            raise InvalidRedex(f"path {path} leaves the term")
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    spine = []
    for i in path:
        spine.append((t, i))
        t = t.body if isinstance(t, Abs) else (t.fun if i == 0 else t.arg)
    for parent, i in reversed(spine):
        if isinstance(parent, Abs):
            new = Abs(parent.binder, new)
        elif i == 0:
            new = App(new, parent.arg)
        else:
            new = App(parent.fun, new)
    return new


def _children(t: Term) -> tuple:
    if isinstance(t, Abs):
        return ((0, t.body),)
    if isinstance(t, App):
        return ((0, t.fun), (1, t.arg))
    return ()


def iter_redexes(t: Term) -> Iterator[Redex]:
    """Eligible redexes in leftmost-outermost (pre-)order."""
    stack = [((), t)]
    while stack:
        path, s = stack.pop()
        if not s.has_redex:
            continue
        kind = redex_kind(s)
        if kind is not None:
            yield Redex(path, kind)
        for i, c in reversed(_children(s)):
            stack.append((path + (i,), c))


def eligible_redexes(t: Term) -> list[Redex]:
    return list(iter_redexes(t))


def _first_rightmost_innermost(t: Term) -> Optional[Redex]:
    # right-to-left post-order: the first hit has no eligible redex inside or to its right
    stack: list = [((), t, False)]
    while stack:
        path, s, expanded = stack.pop()
        if not s.has_redex:
            continue
        if expanded:
            kind = redex_kind(s)
            if kind is not None:
                return Redex(path, kind)
            continue
        stack.append((path, s, True))
        for i, c in _children(s):
            stack.append((path + (i,), c, False))
    return None


def next_redex(t: Term, strategy: str = LEFTMOST_OUTERMOST) -> Optional[Redex]:
    if strategy == LEFTMOST_OUTERMOST:
        return next(iter_redexes(t), None)
    if strategy == RIGHTMOST_INNERMOST:
        return _first_rightmost_innermost(t)
    raise ValueError(f"unknown strategy {strategy!r}")


def reduce_once(t: Term, r: Redex) -> Term:
    """Fire the redex at ``r.path``; it must be currently eligible."""
    s = subterm(t, r.path)
    kind = redex_kind(s)
    if kind is None:
        raise InvalidRedex(f"no eligible redex at {list(r.path)}")
    if kind != r.kind:
        raise InvalidRedex(f"redex at {list(r.path)} is {kind}, not {r.kind}")
    return replace_at(t, r.path, contract(s))


def normalize(
    t: Term,
    max_steps: int = DEFAULT_MAX_STEPS,
    strategy: str = LEFTMOST_OUTERMOST,
) -> tuple[Term, int, bool]:
    """Fire redexes under ``strategy`` until none remains or the budget is spent."""
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    if strategy == LEFTMOST_OUTERMOST:
        return _normalize_lo(t, max_steps)
    steps = 0
    while steps < max_steps:
        r = next_redex(t, strategy)
        if r is None:
            return t, steps, True
        t = replace_at(t, r.path, contract(subterm(t, r.path)))
        steps += 1
    return t, steps, next_redex(t, strategy) is None


def _plug(frames: list, focus: Term, stop: int = 0) -> Term:
    """Rebuild the ancestors above ``focus`` down to frame index ``stop``."""
    while len(frames) > stop:
        kind, data = frames.pop()
        if kind == "L":
            focus = Abs(data, focus)
        elif kind == "F":
            focus = App(focus, data)
        else:
            focus = App(data, focus)
    return focus


def _normalize_lo(t: Term, max_steps: int) -> tuple[Term, int, bool]:
    # A zipper whose frames hold only the binder or the untouched sibling;
    # ancestors are rebuilt when the search climbs past them.  After a step an
    # ancestor can turn into an eligible redex only if it is the direct parent,
    # or an erasing step dropped free variables it depends on, so only those
    # ancestors are re-examined.
    frames: list[tuple[str, object]] = []  # ("L", binder) | ("F", arg) | ("A", fun)
    focus = t
    steps = 0
    while True:
        found = False
        while True:
            if focus.has_redex:
                if _eligible(focus):
                    found = True
                    break
                if isinstance(focus, Abs):
                    frames.append(("L", focus.binder))
                    focus = focus.body
                    continue
                if isinstance(focus, App):
                    frames.append(("F", focus.arg))
                    focus = focus.fun
                    continue
            while frames and frames[-1][0] != "F":
                kind, data = frames.pop()
                focus = Abs(data, focus) if kind == "L" else App(data, focus)
            if not frames:
                break
            _, arg = frames.pop()
            frames.append(("A", focus))
            focus = arg
        if not found:
            return focus, steps, True
        if steps >= max_steps:
            return _plug(frames, focus), steps, False
        fn = focus.fun
        dropped = focus.arg.fv if fn.binder not in fn.body.fv else frozenset()
        reduct = contract(focus)
        steps += 1
        focus = reduct
        if not frames:
            continue
        if dropped:
            lowest = _outermost_candidate(frames, dropped)
            nodes = []
            node = reduct
            for j in range(len(frames) - 1, lowest - 1, -1):
                kind, data = frames[j]
                node = Abs(data, node) if kind == "L" else (App(node, data) if kind == "F" else App(data, node))
                nodes.append(node)
            nodes.reverse()
            for off, node in enumerate(nodes):
                if _eligible(node):
                    del frames[lowest + off:]
                    focus = node
                    break
            continue
        kind, data = frames[-1]
        if kind == "F" and isinstance(reduct, Abs):
            cand = App(reduct, data)
        elif kind == "A" and isinstance(data, Abs) and isinstance(reduct, (Abs, Var)):
            cand = App(data, reduct)
        else:
            continue
        if _eligible(cand):
            frames.pop()
            focus = cand


def _outermost_candidate(frames: list, dropped: frozenset) -> int:
    """Index of the outermost frame whose eligibility an erasing step may change."""
    last = len(frames) - 1
    for j in range(last):
        kind, data = frames[j]
        if kind == "A" and isinstance(data, Abs):
            return j
        if kind == "F":
            nk, nd = frames[j + 1]
            if nk == "L" and nd in dropped:
                return j
    return last


def trace(
    t: Term,
    max_steps: int = DEFAULT_MAX_STEPS,
    strategy: str = LEFTMOST_OUTERMOST,
) -> Trace:
    """Like :func:`normalize` but records every intermediate term."""
    tr = Trace(initial=t)
    while len(tr.steps) < max_steps:
        r = next_redex(t, strategy)
        if r is None:
            tr.reached_normal_form = True
            return tr
        t = replace_at(t, r.path, contract(subterm(t, r.path)))
        tr.steps.append((r, t))
    tr.reached_normal_form = next_redex(t, strategy) is None
    return tr


def random_normalize(t: Term, rng: random.Random, max_steps: int = 100_000) -> tuple[Term, int, bool]:
    """Fire a uniformly chosen eligible redex at each step."""
    steps = 0
    while steps < max_steps:
        rs = eligible_redexes(t)
        if not rs:
            return t, steps, True
        r = rng.choice(rs)
        t = replace_at(t, r.path, contract(subterm(t, r.path)))
        steps += 1
    return t, steps, not eligible_redexes(t)
