import itertools

import numpy as np
import pytest

from rrtower.codes import split_places
from rrtower.field import make_field_ctx
from rrtower.funcrep import (
    EvaluationError,
    Monomial,
    TowerFunction,
    evaluate,
    expand_at_infinity,
    expand_at_pminus1,
    expand_at_pone,
    fn_linear,
    fn_mul_monomial,
    generator_expansions,
    infinity_generators,
    plus_branch,
    pole_bound_at_infinity,
    pole_order_at_infinity,
)
from rrtower.series import SeriesError, TruncSeries, ser_inv, ser_mul


def mono(x=None, y=None, s=0):
    return Monomial.of(x or {}, y or {}, s)


def fn(ctx, level, *terms):
    """fn(ctx, 1, (c, mono), ...)"""
    return TowerFunction(ctx, level, {m: ctx(*c) if isinstance(c, tuple) else ctx(c) for c, m in terms})


def random_function(ctx, level, rng, n_terms=3, neg=True):
    terms = {}
    lo = -2 if neg else 0
    for _ in range(n_terms):
        m = Monomial.of(
            {i: int(rng.integers(lo, 3)) for i in range(level + 1)},
            {i: int(rng.integers(lo, 2)) for i in range(level + 1)},
            int(rng.integers(lo, 2)),
        )
        terms[m] = ctx(int(rng.integers(0, ctx.p)), int(rng.integers(0, ctx.p)))
    return TowerFunction(ctx, level, terms)


def test_monomial_basics():
    m = mono({0: 2, 3: 0}, {1: -1}, 1)
    assert m.ex == (2,) and m.ey == (0, -1) and m.top == 1
    assert m * mono({0: -2}, {1: 1}, -1) == Monomial()
    assert Monomial.from_json(m.to_json()) == m
    assert str(m) == "x0^2*(1+x1)^-1*S"
    assert str(Monomial()) == "1"


def test_function_level_checks(ctx3):
    with pytest.raises(ValueError):
        TowerFunction.monomial(ctx3, 1, mono({2: 1}))
    f = TowerFunction.constant(ctx3, 1)
    g = TowerFunction.constant(ctx3, 2)
    with pytest.raises(ValueError, match="level mismatch"):
        fn_linear(1, f, 1, g)


def test_linear_and_binomial(ctx3):
    f = fn(ctx3, 1, (1, mono({0: 1, 1: 1})), (2, mono(s=-1)))
    assert fn_linear(1, f, -1, f).terms == {}
    one = TowerFunction.constant(ctx3, 0)
    g = fn_mul_monomial(one, "1-x0")
    assert len(g.terms) == 2
    x0 = TowerFunction.monomial(ctx3, 0, mono({0: 1}))
    assert fn_mul_monomial(x0, "1-x0") == fn(ctx3, 0, (1, mono({0: 1})), (-1, mono({0: 2})))


def test_json_roundtrip(ctx):
    rng = np.random.default_rng(1)
    for level in range(4):
        f = random_function(ctx, level, rng, 5)
        assert TowerFunction.from_json(ctx, level, f.to_json()) == f


def test_str(ctx3):
    f = fn(ctx3, 1, (1, mono({0: 1, 1: 1})), (2, mono()), ((0, 1), mono(s=-1)))
    assert str(f) == "u*S^-1 + 2 + x0*x1"


# generator expansions --------------------------------------------------------


def _tower_residual(xs):
    # x_{i+1}^2 * 2 x_i - (x_i^2 + 1) must vanish to precision
    for a, b in zip(xs, xs[1:]):
        lhs = ser_mul(ser_mul(b, b), a.scale(2))
        rhs = ser_mul(a, a) + 1
        yield (lhs - rhs)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_branch_expansions_satisfy_tower(p):
    ctx = make_field_ctx(p)
    for xs in (plus_branch(ctx, 6, 40), generator_expansions(ctx, 6, 40)):
        assert xs[0] == TruncSeries.from_coeffs(ctx, [1, -1], prec=41)
        for r in _tower_residual(xs):
            assert r.is_zero() and r.prec >= 41


@pytest.mark.parametrize("p", [3, 5, 7])
def test_infinity_expansions_satisfy_tower(p):
    ctx = make_field_ctx(p)
    for j in range(5):
        xs = infinity_generators(ctx, j, 30)
        assert xs[j] == TruncSeries.monomial(ctx, -1, 29)
        for i, x in enumerate(xs):
            assert x.val == -(2 ** (j - i))
            assert x.lead() == ctx(2) ** (2 ** (j - i) - 1)
        for r in _tower_residual(xs):
            assert r.is_zero()


def test_x1_examples(ctx3):
    x1p = plus_branch(ctx3, 1, 3)[1]
    assert x1p == TruncSeries.from_coeffs(ctx3, [1, 0, 1, 1])  # 1 + t^2/4 + t^3/4
    x1m = generator_expansions(ctx3, 1, 3)[1]
    assert x1m == -x1p
    with pytest.raises(ValueError):
        generator_expansions(ctx3, 0, 3)


def test_expand_at_pminus1_examples(ctx3):
    for level in (1, 2, 3):
        f = TowerFunction.one_minus_x0(ctx3, level)
        assert expand_at_pminus1(f, 5) == TruncSeries.monomial(ctx3, 1, 6)
    f = TowerFunction.monomial(ctx3, 1, mono({0: 1, 1: 1}))
    got = expand_at_pminus1(f, 3)
    # (1 - t) * (-1 - t^2 - t^3) = -1 + t - t^2 + 0 t^3 at p = 3
    assert got == TruncSeries.from_coeffs(ctx3, [-1, 1, -1, 0])


def test_expand_at_infinity_examples(ctx3):
    for j in range(4):
        xj = TowerFunction.monomial(ctx3, j, mono({j: 1}))
        assert expand_at_infinity(xj, 5) == TruncSeries.monomial(ctx3, -1, 5)
    x0 = TowerFunction.monomial(ctx3, 1, mono({0: 1}))
    s = expand_at_infinity(x0, 8)
    # x0 = 2 pi^-2 - pi^2/2 + O(pi^6) ; -1/2 = 1 mod 3
    assert s.coeff(-2) == ctx3(2) and s.coeff(2) == -ctx3.inv2
    assert all(s.coeff(k) == 0 for k in (-1, 0, 1, 3, 4, 5))
    x0x1 = TowerFunction.monomial(ctx3, 1, mono({0: 1, 1: 1}))
    assert pole_order_at_infinity(x0x1) == 3


def test_pole_bound_examples(ctx3):
    assert pole_bound_at_infinity(TowerFunction.monomial(ctx3, 1, mono({0: 2, 1: 1}))) == 5
    for j in range(5):
        assert pole_bound_at_infinity(TowerFunction.monomial(ctx3, j, mono(s=1))) == 2 ** (j + 1)
        assert pole_order_at_infinity(TowerFunction.monomial(ctx3, j, mono(s=1))) == 2 ** (j + 1)
    assert pole_bound_at_infinity(TowerFunction.constant(ctx3, 2)) == 0


def test_pole_order_cancellation(ctx3):
    # x0 - x1^2 has lower pole order than either monomial
    f = fn(ctx3, 1, (1, mono({0: 1})), (-2, mono({1: 2})))
    assert pole_bound_at_infinity(f) == 2
    assert pole_order_at_infinity(f) < 2
    with pytest.raises(SeriesError):
        pole_order_at_infinity(TowerFunction(ctx3, 1, {}))


@pytest.mark.parametrize("p", [3, 5])
def test_expansion_is_multiplicative(p):
    ctx = make_field_ctx(p)
    rng = np.random.default_rng(p)
    for level in (1, 2, 3):
        for _ in range(5):
            f = random_function(ctx, level, rng, neg=False)
            g = random_function(ctx, level, rng, neg=False)
            prod = expand_at_pminus1(f * g, 12)
            assert prod.agrees_with(ser_mul(expand_at_pminus1(f, 12), expand_at_pminus1(g, 12)))
            ssum = expand_at_pone(f + g, 12)
            assert ssum.agrees_with(expand_at_pone(f, 12) + expand_at_pone(g, 12))


def test_negative_exponent_precision(ctx3):
    # (1+x1)^-1 has a pole of order 2 at P_-1^1; product back gives 1
    f = TowerFunction.monomial(ctx3, 1, mono(y={1: -1}))
    g = TowerFunction.monomial(ctx3, 1, mono(y={1: 1}))
    sf = expand_at_pminus1(f, 6)
    assert sf.val == -2
    assert ser_mul(sf, expand_at_pminus1(g, 6)).agrees_with(TruncSeries.one(ctx3, 7))
    assert ser_mul(expand_at_pminus1(g, 10), ser_inv(expand_at_pminus1(g, 10))).agrees_with(
        TruncSeries.one(ctx3, 9)
    )


# evaluation -----------------------------------------------------------------


def test_evaluate_examples(ctx3):
    pts = split_places(1, ctx3)
    f = TowerFunction.monomial(ctx3, 1, mono({0: 1, 1: 1}))
    S = TowerFunction.monomial(ctx3, 1, mono(s=1))
    for pt in pts:
        assert evaluate(f, pt) == pt[0] * pt[1]
        v = evaluate(S, pt)
        assert v == pt[0] * pt[0] + 1 and v
    inv = TowerFunction.monomial(ctx3, 0, mono({0: -1}))
    with pytest.raises(EvaluationError, match="pole"):
        evaluate(inv, (ctx3.zero,))
    with pytest.raises(EvaluationError, match="not a point"):
        evaluate(f, (ctx3(2), ctx3(2)))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_evaluate_is_ring_homomorphism(p):
    ctx = make_field_ctx(p)
    rng = np.random.default_rng(11)
    for level in (1, 2):
        pts = split_places(level, ctx)[:10]
        for _ in range(5):
            f = random_function(ctx, level, rng)
            g = random_function(ctx, level, rng)
            for pt in pts:
                assert evaluate(f * g, pt) == evaluate(f, pt) * evaluate(g, pt)
                assert evaluate(f - g, pt) == evaluate(f, pt) - evaluate(g, pt)


@pytest.mark.parametrize("p", [3, 5])
def test_value_at_p1_is_constant_term(p):
    ctx = make_field_ctx(p)
    rng = np.random.default_rng(5)
    for level in range(4):
        pt = (ctx.one,) * (level + 1)  # P_1^level
        for _ in range(6):
            f = random_function(ctx, level, rng, neg=False)
            assert expand_at_pone(f, 4).coeff(0) == evaluate(f, pt)


def test_split_point_coordinates_avoid_bad_values(ctx3):
    bad = {ctx3.zero, ctx3.one, -ctx3.one, ctx3.i_elem, -ctx3.i_elem}
    for pt in split_places(3, ctx3):
        assert not bad.intersection(pt)
    assert list(itertools.islice(split_places(0, ctx3), 1))
