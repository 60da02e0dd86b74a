from __future__ import annotations

import pytest

from walt.corpus import corpus
from walt.probe import ProbeReport, fit, probe


def test_fit_recovers_quadratic():
    xs = list(range(1, 11))
    degree, coef, r2 = fit(xs, [3 * x * x + 2 for x in xs])
    assert degree == 2 and r2 > 0.999
    assert coef[0] == pytest.approx(3)


def test_fit_linear_and_constant():
    assert fit([1, 2, 3, 4], [5, 7, 9, 11])[0] == 1
    assert fit([1, 2, 3], [4, 4, 4])[0] == 0


def test_exponential_growth_flagged():
    xs = list(range(1, 13))
    ys = [2 ** x for x in xs]
    degree, coef, r2 = fit(xs, ys)
    rep = ProbeReport(xs, ys, degree, coef, r2, [b / a for a, b in zip(ys, ys[1:])])
    assert rep.monotone and rep.tail_ratio == 2.0
    ys3 = [3 ** x for x in xs]
    d3, c3, r3 = fit(xs, ys3)
    rep3 = ProbeReport(xs, ys3, d3, c3, r3, [b / a for a, b in zip(ys3, ys3[1:])])
    assert not rep3.polynomial


def test_probe_on_recursion():
    rep = probe(corpus()["copy"], range(1, 7))
    assert rep.monotone and rep.polynomial
    assert set(rep.as_dict()) >= {"steps", "degree", "r2", "tail_ratio"}
