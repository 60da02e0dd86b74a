"""Step-count growth of compiled programs over input length."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compiler import compile_def
from .reducer import normalize
from .srn import SrnDef, arity
from .terms import app
from .words import word

MAX_DEGREE = 4
MIN_R2 = 0.99
MAX_TAIL_RATIO = 2.0


@dataclass
class ProbeReport:
    lengths: list
    steps: list
    degree: int = 0
    coefficients: list = field(default_factory=list)
    r2: float = 1.0
    ratios: list = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.steps, self.steps[1:]))

    @property
    def tail_ratio(self) -> float:
        """Largest steps(L+1)/steps(L) over the upper half of the lengths."""
        tail = self.ratios[len(self.ratios) // 2:]
        return max(tail) if tail else 1.0

    @property
    def polynomial(self) -> bool:
        return self.r2 >= MIN_R2 and self.tail_ratio <= MAX_TAIL_RATIO

    def as_dict(self) -> dict:
        return {"lengths": self.lengths, "steps": self.steps, "degree": self.degree,
                "coefficients": self.coefficients, "r2": self.r2, "ratios": self.ratios,
                "monotone": self.monotone, "tail_ratio": self.tail_ratio,
                "polynomial": self.polynomial}


def fit(lengths, steps, max_degree: int = MAX_DEGREE) -> tuple[int, list, float]:
    """Least-degree polynomial (up to ``max_degree``) reaching R^2 >= MIN_R2, else the best."""
    x = np.asarray(lengths, dtype=float)
    y = np.asarray(steps, dtype=float)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    best = (max_degree, [], -np.inf)
    for d in range(0, max_degree + 1):
        coef = np.polyfit(x, y, d)
        ss_res = float(((y - np.polyval(coef, x)) ** 2).sum())
        r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
        if r2 >= MIN_R2:
            return d, [float(c) for c in coef], r2
        if r2 > best[2]:
            best = (d, [float(c) for c in coef], r2)
    return best


def probe(f: SrnDef, lengths=range(1, 13), max_steps: int = 10_000_000) -> ProbeReport:
    """Normalize ``f`` on all-ones arguments of each length and fit the step counts."""
    c = compile_def(f)
    k, l = arity(f)
    lengths = list(lengths)
    steps = []
    for n in lengths:
        _, s, done = normalize(app(c.term, *[word((1 << n) - 1)] * (k + l)), max_steps=max_steps)
        if not done:
            raise RuntimeError(f"step budget exhausted at length {n}")
        steps.append(s)
    degree, coef, r2 = fit(lengths, steps)
    ratios = [b / a for a, b in zip(steps, steps[1:])]
    return ProbeReport(lengths, steps, degree, coef, r2, ratios)
