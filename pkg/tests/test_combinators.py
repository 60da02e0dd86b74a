from __future__ import annotations

import pytest

from walt import combinators as cb
from walt.combinators import OpenComponent, TypeMismatch
from walt.derivations import check_derivation
from walt.formulas import W, Eager, Lin, Par, alpha_eq_type, pars, srn_formula
from walt.reducer import normalize
from walt.terms import Var, alpha_eq, app, lam, parse_term
from walt.words import decode_word, word


def nf(t):
    out, _, done = normalize(t)
    assert done
    return out


def recorder(k: int, l: int, m: int):
    """``\\a1..a(k+l) z. z a1..a(k+l)``: its normal form lists the arguments in order."""
    xs = [f"a{i}" for i in range(k + l)]
    return cb.untyped(lam(xs + ["zz"], app("zz", *xs)), srn_formula(k, l, m))


def picker(k: int, l: int, i: int, m: int):
    xs = [f"a{j}" for j in range(k + l)]
    return cb.untyped(lam(xs, Var(xs[i])), srn_formula(k, l, m))


def same(lhs, rhs):
    return alpha_eq(nf(lhs), nf(rhs))


w = word

# ---------------------------------------------------------------- words


def test_word_encodings():
    assert cb.word(0).term == parse_term("\\0 1 y.y")
    assert alpha_eq(cb.word(1).term, parse_term("\\0 1 y.1 y"))
    assert alpha_eq(cb.word(5).term, parse_term("\\0 1 y.1 (0 (1 y))"))


@pytest.mark.parametrize("n", range(65))
def test_word_roundtrip(n):
    assert decode_word(cb.word(n).term) == n


@pytest.mark.parametrize("n", range(0, 65))
def test_arithmetic_homomorphism(n):
    s0, s1, p, _ = cb.successors_pred_branch()
    assert decode_word(nf(app(s0.term, w(n)))) == 2 * n
    assert decode_word(nf(app(s1.term, w(n)))) == 2 * n + 1
    assert decode_word(nf(app(p.term, w(n)))) == n // 2


def test_word_op_examples():
    s0, s1, p, b = cb.successors_pred_branch()
    assert nf(app(p.term, w(0))) == w(0)
    assert alpha_eq(nf(app(s1.term, w(2))), w(5))
    assert alpha_eq(nf(app(b.term, w(0), w(3), w(7))), w(3))
    assert alpha_eq(nf(app(b.term, w(4), w(3), w(7))), w(7))


def test_word_op_formulas():
    ops = cb.successors_pred_branch()
    for t in ops[:3]:
        assert alpha_eq_type(t.formula, Lin(W, W))
        check_derivation(t.derivation)
    assert alpha_eq_type(ops[3].formula, Lin(W, Lin(W, Lin(W, W))))


# ---------------------------------------------------------------- tensor


def test_tensor_destructor_two_words():
    body = app("f", "x1", "x2")
    t = app(cb.tensor_match(["x1", "x2"], lam("f", body)), cb.tensor([w(2), w(3)]))
    assert same(app(t, lam("a b", Var("b"))), w(3))
    assert same(app(t, lam("a b", Var("a"))), w(2))


def test_one_tuple():
    t = app(cb.tensor_match(["x"], Var("x")), cb.tensor([w(4)]))
    assert same(t, w(4))


def test_tensor_rejects_open_component():
    with pytest.raises(OpenComponent):
        cb.tensor([Var("q")])


# ---------------------------------------------------------------- embeddings, coerce, diagonal


def test_bembed_formula():
    t = cb.bembed(1, cb.ws(0))
    assert alpha_eq_type(t.formula, Eager(Par(W), Par(W)))
    assert alpha_eq_type(cb.bembed(2, cb.ws(0)).formula, Eager(pars(2, W), pars(2, W)))
    assert same(app(t.term, w(3)), w(6))


def test_bembed_rejects_bad_source():
    with pytest.raises(TypeMismatch):
        cb.bembed(1, cb.word(0))


def test_lembed_empty_expansion():
    t = cb.lembed(1, 0, cb.word(3))
    assert same(t.term, w(3))
    assert alpha_eq_type(t.formula, Par(W))


def test_eembed_zero_is_identity():
    f = picker(1, 2, 2, 1)
    e = cb.eembed(0, 1, 2, f)
    assert same(app(e.term, w(1), w(2), w(3)), w(3))


@pytest.mark.parametrize("m, n", [(0, 5), (1, 0), (1, 9), (2, 6), (3, 11)])
def test_coerce(m, n):
    t = cb.coerce(m)
    assert alpha_eq_type(t.formula, Lin(W, pars(m, W)))
    assert same(app(t.term, w(n)), w(n))


@pytest.mark.parametrize("m, n, a", [(1, 2, 0), (1, 1, 3), (2, 3, 5)])
def test_diagonal(m, n, a):
    t = cb.diagonal(m, n)
    out = nf(app(t.term, w(a)))
    assert alpha_eq(out, nf(cb.tensor([w(a)] * n)))


# ---------------------------------------------------------------- iterator and sharing


def _g(nhat, shat, m, body):
    xs = ["d"] + [f"n{i}" for i in range(nhat)] + [f"s{j}" for j in range(shat)] + ["r"]
    return cb.untyped(lam(xs, body(xs)), cb._g_formula(nhat, shat, m))


def test_iterator_base_case():
    keep = _g(0, 0, 1, lambda xs: Var("r"))
    base = _g(0, 0, 1, lambda xs: w(0))
    it = cb.iterator(0, 0, keep, keep, base, 1)
    assert same(app(it.term, w(0)), w(0))


@pytest.mark.parametrize("x", [1, 5, 6, 13])
def test_iterator_step_count(x):
    # each bit appends a 1: the result has as many bits as the drive
    s1 = cb.ws(1).term
    step = _g(0, 0, 1, lambda xs: app(s1, "r"))
    base = _g(0, 0, 1, lambda xs: w(0))
    it = cb.iterator(0, 0, step, step, base, 1)
    assert decode_word(nf(app(it.term, w(x)))) == (1 << x.bit_length()) - 1


def test_iterator_reads_bits_msb_first():
    s0, s1 = cb.ws(0).term, cb.ws(1).term
    it = cb.iterator(0, 0, _g(0, 0, 1, lambda xs: app(s0, "r")), _g(0, 0, 1, lambda xs: app(s1, "r")),
                     _g(0, 0, 1, lambda xs: w(0)), 1)
    for x in (1, 2, 5, 12):
        assert decode_word(nf(app(it.term, w(x)))) == x


def test_iterator_rejects_wrong_step_type():
    bad = cb.untyped(lam("d r", Var("r")), Lin(W, W))
    with pytest.raises(TypeMismatch):
        cb.iterator(0, 0, bad, bad, bad, 1)


def test_share():
    m = recorder(1, 4, 1)
    sh = cb.share(1, 3, 1, m)
    assert alpha_eq_type(sh.formula, srn_formula(1, 3, 5))
    assert same(app(sh.term, w(1), w(2), w(3), w(4)), app(m.term, w(1), w(2), w(3), w(4), w(4)))


def test_rotate():
    m = recorder(1, 3, 1)
    assert same(app(cb.rotate(1, 3, 1, m).term, w(1), w(2), w(3), w(4)),
                app(m.term, w(1), w(3), w(4), w(2)))


def test_mshare_degenerate():
    m = recorder(1, 2, 1)
    assert cb.mshare(1, 0, 2, 1, m) is m
    assert cb.mshare(1, 2, 0, 1, m) is m


def test_mshare():
    m = recorder(1, 4, 1)
    assert same(app(cb.mshare(1, 2, 2, 1, m).term, w(1), w(2), w(3)),
                app(m.term, w(1), w(2), w(3), w(3), w(3)))


def test_rmshare():
    m = recorder(1, 4, 1)
    assert same(app(cb.rmshare(1, 2, 2, 1, m).term, w(1), w(2), w(3)),
                app(m.term, w(1), w(3), w(2), w(2), w(2)))
    m3 = recorder(1, 3, 1)
    assert same(app(cb.rmshare(1, 2, 1, 1, m3).term, w(1), w(2), w(3)),
                app(m3.term, w(1), w(3), w(2), w(2)))


# ---------------------------------------------------------------- square composition


def test_sqcomp_degenerate():
    f = picker(0, 1, 0, 1)
    h = picker(1, 1, 1, 1)
    g = picker(1, 0, 0, 1)
    sq = cb.sqcomp(1, 1, 0, f, [], [h], 1)
    assert same(app(sq.term, w(3), w(8)), w(8))
    sq1 = cb.sqcomp(1, 1, 1, picker(1, 1, 1, 1), [g], [h], 1)
    assert same(app(sq1.term, w(3), w(8)), w(8))


def test_sqcomp_with_padding():
    f = recorder(1, 2, 1)
    g = picker(1, 0, 0, 1)
    h1 = picker(1, 3, 3, 1)
    h2 = picker(1, 1, 1, 1)
    sq = cb.sqcomp(1, 3, 1, f, [g], [h1, h2], 1)
    assert alpha_eq_type(sq.formula, srn_formula(1, 9, 3))
    blocks = [w(5)] * 3 + [w(6)] * 3 + [w(7)] * 3
    assert same(app(sq.term, w(2), *blocks), app(f.term, w(2), w(7), w(5)))


def test_sqcomp_padding_is_erased():
    # s = 2 > s' = 1: the fake second component is computed and dropped
    f = recorder(0, 1, 1)
    h = picker(0, 2, 1, 1)
    sq = cb.sqcomp(0, 2, 0, f, [], [h], 1)
    assert same(app(sq.term, w(1), w(1), w(4), w(4)), app(f.term, w(4)))


def test_sqcomp_rejects_wrong_s():
    f = recorder(0, 1, 1)
    with pytest.raises(TypeMismatch):
        cb.sqcomp(0, 2, 0, f, [], [picker(0, 1, 0, 1)], 1)


@pytest.mark.parametrize("p, i", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_mshsqcomp(p, i):
    m = recorder(1, p * p, 1)
    t = cb.mshsqcomp(1, p, i, 1, m)
    singles = [w(10 + j) for j in range(i)]
    blocks = [w(20 + j) for j in range(p * (p - i))]
    expanded = [a for a in singles for _ in range(p)]
    assert same(app(t.term, w(1), *singles, *blocks), app(m.term, w(1), *blocks, *expanded))
    assert alpha_eq_type(t.formula, srn_formula(1, i + p * (p - i), 1 + 4 * (p - 1) * i))


def test_mshsqcomp_degenerate():
    m = recorder(1, 1, 1)
    assert cb.mshsqcomp(1, 1, 1, 1, m) is m
    assert cb.mshsqcomp(1, 3, 0, 1, m) is m


def test_lincomp():
    f = recorder(1, 2, 1)
    g = picker(1, 0, 0, 1)
    h1 = picker(1, 2, 2, 1)
    h2 = picker(1, 1, 1, 1)
    t = cb.lincomp(1, f, [g], [h1, h2], 1)
    assert same(app(t.term, w(2), w(5), w(6), w(7)), app(f.term, w(2), w(6), w(7)))


def test_registry_lists_every_builder():
    names = {e["name"] for e in cb.registry_json()}
    for name in ("word", "coerce", "diagonal", "iterator", "share", "rotate", "mshare", "rmshare",
                 "sqcomp", "mshsqcomp", "bembed", "lembed", "eembed", "tensor"):
        assert name in names
