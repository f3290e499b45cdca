"""Arithmetic in the truncated group algebra R(n, m) = (Z/n)[a1, a2] / (a1^m - 1, a2^m - 1).

R(n, m) is the level-(n, m) truncation of the completed group algebra of the
rank-2 profinite abelianization.  Elements are m x m coefficient arrays with
entry (i, j) the coefficient of a1^i a2^j; multiplication is 2-D cyclic
convolution of the exponents.

Beyond the ring operations this module provides the structural maps the
IA-calculus rests on: the augmentation, unit inversion (CRT over the prime
powers of n plus Hensel lifting), monomial recognition, the scalar/special
split of elements with invertible augmentation, and the local decomposition
of R(p^k, m) into factor rings via the idempotents of x^m - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from . import cyclofactor, linalg
from .errors import BudgetError


def _factor_prime_powers(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


class RingCtx:
    """Truncation parameters (n, m); hands out elements of R(n, m)."""

    def __init__(self, n: int, m: int):
        if n < 2 or m < 2:
            raise ValueError(f"need n >= 2 and m >= 2, got ({n}, {m})")
        self.n = n
        self.m = m
        self.prime_powers = _factor_prime_powers(n)

    def __eq__(self, other):
        return isinstance(other, RingCtx) and (self.n, self.m) == (other.n, other.m)

    def __hash__(self):
        return hash((self.n, self.m))

    def __repr__(self):
        return f"RingCtx(n={self.n}, m={self.m})"

    @property
    def size(self) -> int:
        return self.n ** (self.m * self.m)

    def elem(self, coeffs) -> RingElem:
        arr = np.asarray(coeffs, dtype=np.int64) % self.n
        if arr.shape != (self.m, self.m):
            raise ValueError(f"coefficient array must be {self.m}x{self.m}")
        return RingElem(self, arr)

    def zero(self) -> RingElem:
        return RingElem(self, np.zeros((self.m, self.m), dtype=np.int64))

    def one(self) -> RingElem:
        return self.monomial(0, 0)

    def monomial(self, i: int, j: int) -> RingElem:
        arr = np.zeros((self.m, self.m), dtype=np.int64)
        arr[i % self.m, j % self.m] = 1
        return RingElem(self, arr)

    def scalar(self, c: int) -> RingElem:
        arr = np.zeros((self.m, self.m), dtype=np.int64)
        arr[0, 0] = c % self.n
        return RingElem(self, arr)

    def monomials(self) -> list[RingElem]:
        return [self.monomial(i, j) for i in range(self.m) for j in range(self.m)]

    def norm1(self) -> RingElem:
        """Norm element 1 + a1 + ... + a1^(m-1)."""
        arr = np.zeros((self.m, self.m), dtype=np.int64)
        arr[:, 0] = 1
        return RingElem(self, arr)

    def norm2(self) -> RingElem:
        arr = np.zeros((self.m, self.m), dtype=np.int64)
        arr[0, :] = 1
        return RingElem(self, arr)

    def geom1(self, k: int) -> RingElem:
        """1 + a1 + ... + a1^(k-1) for any integer k >= 0, exponents wrapped."""
        arr = np.zeros((self.m, self.m), dtype=np.int64)
        for i in range(k):
            arr[i % self.m, 0] += 1
        return RingElem(self, arr % self.n)

    def geom2(self, k: int) -> RingElem:
        arr = np.zeros((self.m, self.m), dtype=np.int64)
        for j in range(k):
            arr[0, j % self.m] += 1
        return RingElem(self, arr % self.n)

    def random_elem(self, rng) -> RingElem:
        arr = np.array(
            [[rng.randrange(self.n) for _ in range(self.m)] for _ in range(self.m)],
            dtype=np.int64,
        )
        return RingElem(self, arr)

    def all_elements(self):
        """Iterate over the whole ring (desk-scale contexts only)."""
        m2 = self.m * self.m
        if self.n**m2 > 10**6:
            raise BudgetError(f"R({self.n},{self.m}) has {self.n**m2} elements")
        for flat in np.ndindex(*([self.n] * m2)):
            yield self.elem(np.array(flat, dtype=np.int64).reshape(self.m, self.m))


class RingElem:
    """Immutable element of R(n, m)."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx: RingCtx, coeffs: np.ndarray):
        self.ctx = ctx
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        self._hash = None

    def __eq__(self, other):
        return (
            isinstance(other, RingElem)
            and self.ctx == other.ctx
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.n, self.ctx.m, self.coeffs.tobytes()))
        return self._hash

    def __repr__(self):
        terms = []
        for i in range(self.ctx.m):
            for j in range(self.ctx.m):
                c = int(self.coeffs[i, j])
                if c == 0:
                    continue
                mono = ("" if i == 0 else f"a1^{i}" if i > 1 else "a1") + (
                    "" if j == 0 else f"a2^{j}" if j > 1 else "a2"
                )
                if not mono:
                    terms.append(str(c))
                elif c == 1:
                    terms.append(mono)
                else:
                    terms.append(f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"

    def _check(self, other: RingElem):
        if self.ctx != other.ctx:
            raise ValueError("ring context mismatch")

    def __add__(self, other: RingElem) -> RingElem:
        self._check(other)
        return RingElem(self.ctx, (self.coeffs + other.coeffs) % self.ctx.n)

    def __sub__(self, other: RingElem) -> RingElem:
        self._check(other)
        return RingElem(self.ctx, (self.coeffs - other.coeffs) % self.ctx.n)

    def __neg__(self) -> RingElem:
        return RingElem(self.ctx, (-self.coeffs) % self.ctx.n)

    def __mul__(self, other) -> RingElem:
        if isinstance(other, int):
            return RingElem(self.ctx, (self.coeffs * other) % self.ctx.n)
        self._check(other)
        acc = np.zeros_like(self.coeffs)
        ys = other.coeffs
        for i, j in zip(*np.nonzero(self.coeffs)):
            acc = acc + int(self.coeffs[i, j]) * np.roll(np.roll(ys, i, axis=0), j, axis=1)
        return RingElem(self.ctx, acc % self.ctx.n)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> RingElem:
        if e < 0:
            inv = try_invert(self)
            if inv is None:
                raise ValueError("negative power of a non-unit")
            return inv ** (-e)
        result = self.ctx.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def vec(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def to_json(self) -> dict:
        return {
            "n": self.ctx.n,
            "m": self.ctx.m,
            "coeffs": [int(c) for c in self.coeffs.reshape(-1)],
        }


def elem_from_json(data: dict) -> RingElem:
    ctx = ring_make(int(data["n"]), int(data["m"]))
    arr = np.array(data["coeffs"], dtype=np.int64).reshape(ctx.m, ctx.m)
    return ctx.elem(arr)


@lru_cache(maxsize=None)
def ring_make(n: int, m: int) -> RingCtx:
    """Context for R(n, m); cached so equal parameters share solver caches."""
    return RingCtx(n, m)


def augmentation(x: RingElem) -> int:
    """Sum of all coefficients mod n; the unique ring map onto Z/n fixing scalars."""
    return int(x.coeffs.sum() % x.ctx.n)


def _mult_matrix(x: RingElem) -> np.ndarray:
    """Matrix of y -> x*y on the monomial basis (column (i,j) = vec(x * a1^i a2^j))."""
    m, n = x.ctx.m, x.ctx.n
    cols = []
    for i in range(m):
        for j in range(m):
            cols.append(np.roll(np.roll(x.coeffs, i, axis=0), j, axis=1).reshape(-1))
    return np.array(cols, dtype=np.int64).T % n


def try_invert(x: RingElem) -> RingElem | None:
    """Inverse of x in R(n, m), or None when x is not a unit.

    Per prime power p^k | n: solve the multiplication-by-x system over F_p,
    Hensel-lift the inverse to Z/p^k, then CRT the branches together.
    A non-unit is a legitimate outcome, reported as None.
    """
    ctx = x.ctx
    branches = []
    for p, k in ctx.prime_powers:
        y = _invert_mod_prime_power(x, p, k)
        if y is None:
            return None
        branches.append((p**k, y))
    acc = np.zeros_like(x.coeffs)
    for q, y in branches:
        rest = ctx.n // q
        acc = acc + y * rest * linalg.inv_mod(rest, q)
    inv = RingElem(ctx, acc % ctx.n)
    assert (x * inv) == ctx.one()
    return inv


def _fold_exponents(coeffs: np.ndarray, m_red: int, n: int) -> np.ndarray:
    """Image under R(n, m) -> R(n, m_red), a_i -> a_i (m_red | m)."""
    m = coeffs.shape[0]
    out = np.zeros((m_red, m_red), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            out[i % m_red, j % m_red] += coeffs[i, j]
    return out % n


def _invert_mod_prime_power(x: RingElem, p: int, k: int) -> np.ndarray | None:
    """Inverse of x mod p^k, or None.

    Unit-ness only depends on the image in the etale quotient R(p, m')
    with m' the prime-to-p part of m (the fold kernel and p are nilpotent),
    where it is a linear solve over F_p.  Any preimage of that inverse is a
    Newton seed: y <- y (2 - x y) converges (p, a_i - 1)-adically.
    """
    ctx = x.ctx
    m_red = ctx.m
    while m_red % p == 0:
        m_red //= p
    if m_red == 1:
        if augmentation(x) % p == 0:
            return None
        seed = np.zeros((ctx.m, ctx.m), dtype=np.int64)
        seed[0, 0] = linalg.inv_mod(int(x.coeffs.sum()) % p, p)
    else:
        sub = ring_make(p, m_red)
        x_red = sub.elem(_fold_exponents(x.coeffs, m_red, p))
        M = _mult_matrix(x_red) % p
        e0 = np.zeros(m_red * m_red, dtype=np.int64)
        e0[0] = 1
        y_red = linalg.solve(M, e0, p)
        if y_red is None:
            return None
        seed = np.zeros((ctx.m, ctx.m), dtype=np.int64)
        seed[:m_red, :m_red] = y_red.reshape(m_red, m_red)
    q = p**k
    big = ring_make(q, ctx.m)
    xq = big.elem(x.coeffs % q)
    y = big.elem(seed % q)
    one = big.one()
    for _ in range(64):
        err = xq * y - one
        if err.is_zero():
            return y.coeffs % q
        y = y * (one - err)  # Newton: y (2 - x y), err squares each round
    raise AssertionError("Newton inversion failed to converge on a unit")


def monomial_part(x: RingElem) -> tuple[int, int] | None:
    """Exponents (i, j) when x = a1^i a2^j exactly, else None."""
    nz = np.nonzero(x.coeffs)
    if len(nz[0]) != 1:
        return None
    i, j = int(nz[0][0]), int(nz[1][0])
    if int(x.coeffs[i, j]) != 1:
        return None
    return i, j


@dataclass(frozen=True)
class SpecialSplit:
    """x = scalar * special with augmentation(special) = 1."""

    scalar: int
    special: RingElem


def special_split(x: RingElem) -> SpecialSplit | None:
    """Split off the scalar part u = augmentation(x) when u is a unit mod n.

    At finite level the split only exists when the augmentation is invertible;
    a zero-divisor augmentation returns None rather than guessing.
    """
    u = augmentation(x)
    if gcd(u, x.ctx.n) != 1:
        return None
    u_inv = linalg.inv_mod(u, x.ctx.n)
    return SpecialSplit(scalar=u, special=u_inv * x)


@dataclass(frozen=True)
class LocalFactor:
    """One coordinate of the decomposition of R(p^k, m), gcd(m, p) = 1."""

    idempotent: RingElem
    f1: tuple[int, ...]  # factor of x^m - 1 carried by a1
    f2: tuple[int, ...]  # factor carried by a2
    distinguished: bool


def local_decompose(ctx: RingCtx) -> list[LocalFactor]:
    """Orthogonal idempotents of R(p^k, m) from the factors of x^m - 1.

    Requires n = p^k and gcd(m, p) = 1 (the etale case; otherwise no such
    splitting exists at finite level and a ValueError is raised).  One factor
    per pair (f1, f2) of irreducible factors; the pair (x-1, x-1) is the
    distinguished coordinate, where both a1 - 1 and a2 - 1 stay non-units.
    """
    if len(ctx.prime_powers) != 1:
        raise ValueError("local decomposition needs a prime-power modulus")
    p, k = ctx.prime_powers[0]
    if gcd(ctx.m, p) != 1:
        raise ValueError(f"no etale splitting: gcd(m={ctx.m}, p={p}) != 1")
    pairs = cyclofactor.cyclic_idempotents(ctx.m, p, k)
    x_minus_1 = cyclofactor.trim([-1 % ctx.n, 1])
    out = []
    for f1, e1 in pairs:
        for f2, e2 in pairs:
            arr = np.zeros((ctx.m, ctx.m), dtype=np.int64)
            for i, c1 in enumerate(e1):
                for j, c2 in enumerate(e2):
                    arr[i, j] = (c1 * c2) % ctx.n
            out.append(
                LocalFactor(
                    idempotent=ctx.elem(arr),
                    f1=f1,
                    f2=f2,
                    distinguished=(f1 == x_minus_1 and f2 == x_minus_1),
                )
            )
    return out


def unit_in_factor(x: RingElem, factor: LocalFactor) -> bool:
    """Is the image of x a unit of the factor ring e*R?

    e*R has identity e; x*e is invertible there iff x*e + (1 - e) is a unit
    of R, which the CRT inverter decides.
    """
    e = factor.idempotent
    probe = x * e + e.ctx.one() - e
    return try_invert(probe) is not None
