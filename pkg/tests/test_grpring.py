"""Truncated group algebra R(n, m): ring law, structural maps, local splitting."""

import itertools
import random

import numpy as np
import pytest

from metab import grpring
from metab.grpring import (
    augmentation,
    local_decompose,
    monomial_part,
    ring_make,
    special_split,
    try_invert,
    unit_in_factor,
)


def naive_mul(ctx, x, y):
    """Oracle: schoolbook polynomial product with exponent wrap, no convolution code."""
    out = {}
    for i in range(ctx.m):
        for j in range(ctx.m):
            for k in range(ctx.m):
                for l in range(ctx.m):
                    key = ((i + k) % ctx.m, (j + l) % ctx.m)
                    out[key] = (out.get(key, 0) + int(x.coeffs[i, j]) * int(y.coeffs[k, l])) % ctx.n
    arr = np.zeros((ctx.m, ctx.m), dtype=np.int64)
    for (i, j), c in out.items():
        arr[i, j] = c
    return ctx.elem(arr)


def test_ring_make_basics():
    ctx = ring_make(2, 2)
    assert ctx.size == 16
    assert ctx.monomial(0, 0) == ctx.one()
    with pytest.raises(ValueError):
        grpring.RingCtx(1, 2)
    with pytest.raises(ValueError):
        grpring.RingCtx(3, 1)


def test_mul_examples():
    ctx = ring_make(2, 2)
    one, a1 = ctx.one(), ctx.monomial(1, 0)
    x = ctx.elem([[1, 1], [0, 1]])
    assert one * x == x
    # (1 + a1)^2 = 1 + 2 a1 + a1^2 = 2(1 + a1) = 0 mod 2
    s = one + a1
    assert naive_mul(ctx, s, s) == ctx.zero()
    assert s * s == ctx.zero()
    for i, j, k, l in itertools.product(range(2), repeat=4):
        assert ctx.monomial(i, j) * ctx.monomial(k, l) == ctx.monomial(i + k, j + l)


def test_mul_matches_naive_oracle():
    rng = random.Random(7)
    for n, m in [(2, 2), (3, 3), (4, 2), (6, 3)]:
        ctx = ring_make(n, m)
        for _ in range(10):
            x, y = ctx.random_elem(rng), ctx.random_elem(rng)
            assert x * y == naive_mul(ctx, x, y)


def test_ring_axioms_exhaustive_r22():
    ctx = ring_make(2, 2)
    elems = list(ctx.all_elements())
    assert len(elems) == 16
    for x, y in itertools.product(elems, repeat=2):
        assert x * y == y * x
        assert x * (y + y) == x * y + x * y
    rng = random.Random(1)
    triples = [(rng.choice(elems), rng.choice(elems), rng.choice(elems)) for _ in range(200)]
    for x, y, z in triples:
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z


def test_augmentation():
    ctx = ring_make(5, 3)
    for i in range(3):
        for j in range(3):
            assert augmentation(ctx.monomial(i, j)) == 1
    assert augmentation(ctx.one() - ctx.monomial(0, 1)) == 0
    rng = random.Random(3)
    for _ in range(25):
        x, y = ctx.random_elem(rng), ctx.random_elem(rng)
        assert augmentation(x * y) == (augmentation(x) * augmentation(y)) % 5
        assert augmentation(x + y) == (augmentation(x) + augmentation(y)) % 5


def brute_is_unit(ctx, x, elems):
    return any(x * y == ctx.one() for y in elems)


def test_try_invert_monomials_and_zero():
    ctx = ring_make(4, 3)
    for i in range(3):
        for j in range(3):
            inv = try_invert(ctx.monomial(i, j))
            assert inv == ctx.monomial(-i, -j)
    assert try_invert(ctx.zero()) is None


def test_try_invert_census_exhaustive():
    for n, m in [(2, 2), (3, 2)]:
        ctx = ring_make(n, m)
        elems = list(ctx.all_elements())
        for x in elems:
            inv = try_invert(x)
            if inv is not None:
                assert x * inv == ctx.one()
            assert (inv is not None) == brute_is_unit(ctx, x, elems)


def test_one_minus_a2_not_unit_in_r22():
    ctx = ring_make(2, 2)
    x = ctx.one() - ctx.monomial(0, 1)
    assert not brute_is_unit(ctx, x, list(ctx.all_elements()))
    assert try_invert(x) is None


def test_monomial_part():
    ctx = ring_make(3, 4)
    assert monomial_part(ctx.monomial(1, 2)) == (1, 2)
    assert monomial_part(ctx.one() + ctx.monomial(1, 0)) is None
    assert monomial_part(2 * ctx.monomial(1, 0)) is None
    assert monomial_part(ctx.zero()) is None


def test_special_split():
    ctx = ring_make(3, 3)
    x = ctx.elem([[1, 1], [0, 1]] + [[0, 0]]) if False else ctx.one() + ctx.monomial(1, 1)
    # augmentation 2, a unit mod 3
    split = special_split(x)
    assert split is not None
    assert split.scalar == augmentation(x)
    assert augmentation(split.special) == 1
    assert ctx.scalar(split.scalar) * split.special == x

    two_a1 = 2 * ctx.monomial(1, 0)
    split = special_split(two_a1)
    assert split is not None and split.scalar == 2
    assert augmentation(split.special) == 1
    assert ctx.scalar(2) * split.special == two_a1

    ctx42 = ring_make(4, 2)
    assert special_split(2 * ctx42.monomial(1, 0)) is None  # 2 is a zero divisor mod 4
    x_aug1 = ctx42.monomial(1, 1)
    split = special_split(x_aug1)
    assert split == grpring.SpecialSplit(1, x_aug1)


@pytest.mark.parametrize("n,m,expected_factors", [(2, 3, 2), (3, 2, 2), (4, 3, 2), (8, 3, 2), (9, 2, 2), (5, 4, 4), (2, 7, 3)])
def test_local_decompose_partition_of_unity(n, m, expected_factors):
    ctx = ring_make(n, m)
    factors = local_decompose(ctx)
    assert len(factors) == expected_factors**2
    assert sum(f.distinguished for f in factors) == 1
    total = ctx.zero()
    for f in factors:
        total = total + f.idempotent
        assert f.idempotent * f.idempotent == f.idempotent
    assert total == ctx.one()
    for f, g in itertools.combinations(factors, 2):
        assert (f.idempotent * g.idempotent).is_zero()


def test_local_decompose_rejects_bad_inputs():
    with pytest.raises(ValueError):
        local_decompose(ring_make(6, 5))  # composite modulus
    with pytest.raises(ValueError):
        local_decompose(ring_make(3, 3))  # p | m
    with pytest.raises(ValueError):
        local_decompose(ring_make(2, 4))


@pytest.mark.parametrize("n,m", [(2, 3), (3, 2), (4, 3)])
def test_local_units_match_global_units(n, m):
    ctx = ring_make(n, m)
    factors = local_decompose(ctx)
    rng = random.Random(n * 100 + m)
    samples = [ctx.random_elem(rng) for _ in range(30)] + [
        ctx.one() - ctx.monomial(1, 0),
        ctx.norm1(),
        ctx.zero(),
        ctx.one(),
    ]
    for x in samples:
        local_verdict = all(unit_in_factor(x, f) for f in factors)
        assert local_verdict == (try_invert(x) is not None)


@pytest.mark.parametrize("n,m", [(2, 3), (3, 2), (4, 3), (9, 2)])
def test_distinguished_coordinate_detects_augmentation_ideal(n, m):
    ctx = ring_make(n, m)
    factors = local_decompose(ctx)
    a1m1 = ctx.monomial(1, 0) - ctx.one()
    a2m1 = ctx.monomial(0, 1) - ctx.one()
    for f in factors:
        u1 = unit_in_factor(a1m1, f)
        u2 = unit_in_factor(a2m1, f)
        if f.distinguished:
            assert not u1 and not u2
        else:
            assert u1 or u2


def test_json_round_trip():
    ctx = ring_make(6, 2)
    x = ctx.elem([[1, 5], [2, 3]])
    data = x.to_json()
    assert data == {"n": 6, "m": 2, "coeffs": [1, 5, 2, 3]}
    assert grpring.elem_from_json(data) == x


def test_pow():
    ctx = ring_make(5, 3)
    a1 = ctx.monomial(1, 0)
    x = ctx.one() + 2 * a1
    assert x**0 == ctx.one()
    assert x**3 == x * x * x
    assert a1**-1 == ctx.monomial(2, 0)
