"""The finite Magnus model W(n, m) inside T x| A.

T = R(n, m)^2 is a free rank-2 module over the truncated group algebra and
A = (Z/m)^2 acts on it by monomial scaling; the semidirect product carries
the images x1 = (t1, a1), x2 = (t2, a2) of the free metabelian generators.
W(n, m) is the subgroup they generate.

The derived subgroup of W is exactly R*kappa with kappa = (1 - a2, a1 - 1)
the commutator vector.  Unlike the profinite picture, the T-part of W is
strictly larger than the kappa line: x_i^m contributes the norm vector
N_i t_i (N_i = 1 + a_i + ... + a_i^(m-1)), which wraps around at finite
level and generally lies outside R*kappa.  Membership therefore solves
against the lattice

    Lambda_0 = R*kappa + (Z/n) N1 t1 + (Z/n) N2 t2,

preferring a pure kappa witness when one exists.  The quotient
|Lambda_0| / |R*kappa| ("norm defect") measures how far the finite level
strays from the profinite derived-line picture; `norm_defect_index` and
`d_locus_excess` report these per context instead of assuming them away.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .grpring import BudgetError, RingCtx, RingElem, elem_from_json, ring_make


class MagnusElem:
    """Element (b1 t1 + b2 t2, a1^v1 a2^v2) of T x| A, immutable."""

    __slots__ = ("ctx", "b1", "b2", "v")

    def __init__(self, ctx: RingCtx, b1: RingElem, b2: RingElem, v: tuple[int, int]):
        self.ctx = ctx
        self.b1 = b1
        self.b2 = b2
        self.v = (v[0] % ctx.m, v[1] % ctx.m)

    def __eq__(self, other):
        return (
            isinstance(other, MagnusElem)
            and self.ctx == other.ctx
            and self.v == other.v
            and self.b1 == other.b1
            and self.b2 == other.b2
        )

    def __hash__(self):
        return hash((self.v, self.b1, self.b2))

    def __repr__(self):
        return f"({self.b1}; {self.b2}; a^{self.v})"

    def _check(self, other: MagnusElem):
        if self.ctx != other.ctx:
            raise ValueError("ring context mismatch")

    def mono(self) -> RingElem:
        return self.ctx.monomial(*self.v)

    def bvec(self) -> np.ndarray:
        return np.concatenate([self.b1.vec(), self.b2.vec()])

    def __mul__(self, other: MagnusElem) -> MagnusElem:
        self._check(other)
        a = self.mono()
        return MagnusElem(
            self.ctx,
            self.b1 + a * other.b1,
            self.b2 + a * other.b2,
            (self.v[0] + other.v[0], self.v[1] + other.v[1]),
        )

    def inv(self) -> MagnusElem:
        # (t, a)^-1 = (-a^-1 t, a^-1)
        a_inv = self.ctx.monomial(-self.v[0], -self.v[1])
        return MagnusElem(
            self.ctx, -(a_inv * self.b1), -(a_inv * self.b2), (-self.v[0], -self.v[1])
        )

    def __pow__(self, k: int) -> MagnusElem:
        if k < 0:
            return self.inv() ** (-k)
        result = identity(self.ctx)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def to_json(self) -> dict:
        return {"b1": self.b1.to_json(), "b2": self.b2.to_json(), "v": list(self.v)}


def elem_from_json_magnus(data: dict) -> MagnusElem:
    b1 = elem_from_json(data["b1"])
    b2 = elem_from_json(data["b2"])
    return MagnusElem(b1.ctx, b1, b2, tuple(data["v"]))


def identity(ctx: RingCtx) -> MagnusElem:
    return MagnusElem(ctx, ctx.zero(), ctx.zero(), (0, 0))


def gens(ctx: RingCtx) -> tuple[MagnusElem, MagnusElem]:
    """The standard generators x1 = (t1, a1) and x2 = (t2, a2)."""
    return (
        MagnusElem(ctx, ctx.one(), ctx.zero(), (1, 0)),
        MagnusElem(ctx, ctx.zero(), ctx.one(), (0, 1)),
    )


def conj(x: MagnusElem, y: MagnusElem) -> MagnusElem:
    """y x y^-1."""
    return y * x * y.inv()


def commutator(x: MagnusElem, y: MagnusElem) -> MagnusElem:
    return x * y * x.inv() * y.inv()


def kappa_vec(ctx: RingCtx) -> tuple[RingElem, RingElem]:
    """The commutator vector kappa = (1 - a2, a1 - 1) in T."""
    return (ctx.one() - ctx.monomial(0, 1), ctx.monomial(1, 0) - ctx.one())


def kappa_elem(ctx: RingCtx) -> MagnusElem:
    """mu([x1, x2]) = (kappa, 1)."""
    k1, k2 = kappa_vec(ctx)
    return MagnusElem(ctx, k1, k2, (0, 0))


def derived_elem(ctx: RingCtx, alpha: RingElem) -> MagnusElem:
    """[x1, x2]^alpha = (alpha * kappa, 1)."""
    k1, k2 = kappa_vec(ctx)
    return MagnusElem(ctx, alpha * k1, alpha * k2, (0, 0))


def section(ctx: RingCtx, v: tuple[int, int]) -> MagnusElem:
    """Canonical lift of v: the image of x1^v1 x2^v2 with v_i in [0, m)."""
    v1, v2 = v[0] % ctx.m, v[1] % ctx.m
    return MagnusElem(
        ctx,
        ctx.geom1(v1),
        ctx.monomial(v1, 0) * ctx.geom2(v2),
        (v1, v2),
    )


def d_value(z: MagnusElem) -> RingElem:
    """The crossed homomorphism D(t, a) = a - 1 - (b1 (a1-1) + b2 (a2-1)).

    D vanishes on all of W, so D != 0 is a fast membership rejection; the
    converse can fail at finite level (see d_locus_excess).
    """
    ctx = z.ctx
    a1, a2 = ctx.monomial(1, 0), ctx.monomial(0, 1)
    return z.mono() - ctx.one() - (z.b1 * (a1 - ctx.one()) + z.b2 * (a2 - ctx.one()))


@dataclass(frozen=True)
class Witness:
    """Membership certificate: z.b - section(z.v).b = alpha*kappa + q1 N1 t1 + q2 N2 t2.

    alpha is unique modulo Ann(kappa); q1 = q2 = 0 whenever a pure kappa
    solution exists (in particular on the derived subgroup).
    """

    alpha: RingElem
    q1: int
    q2: int


class _CtxCache:
    """Per-(n, m) solvers for the kappa line and the full W lattice."""

    def __init__(self, ctx: RingCtx):
        self.ctx = ctx
        n, m = ctx.n, ctx.m
        k1, k2 = kappa_vec(ctx)
        kappa_rows = []
        for mono in ctx.monomials():
            kappa_rows.append(np.concatenate([(mono * k1).vec(), (mono * k2).vec()]))
        self.kappa_rows = np.array(kappa_rows, dtype=np.int64)
        zero = np.zeros(m * m, dtype=np.int64)
        n1 = np.concatenate([ctx.norm1().vec(), zero])
        n2 = np.concatenate([zero, ctx.norm2().vec()])
        self.norm_rows = np.array([n1, n2], dtype=np.int64)
        self.rk_solver = linalg.SpanSolver(self.kappa_rows, n)
        self.lambda_solver = linalg.SpanSolver(
            np.vstack([self.kappa_rows, self.norm_rows]), n
        )
        # Ann(kappa) = kernel of alpha |-> (alpha(1-a2), alpha(a1-1))
        self.ann_basis = linalg.kernel(self.kappa_rows.T, n)


@lru_cache(maxsize=None)
def _cache(n: int, m: int) -> _CtxCache:
    return _CtxCache(ring_make(n, m))


def ann_kappa(ctx: RingCtx) -> list[RingElem]:
    """Generators of the annihilator ideal of kappa (as ring elements)."""
    cache = _cache(ctx.n, ctx.m)
    return [ctx.elem(row.reshape(ctx.m, ctx.m)) for row in cache.ann_basis]


def witness_equal(a: RingElem, b: RingElem) -> bool:
    """Equality of kappa witnesses, i.e. modulo Ann(kappa)."""
    k1, k2 = kappa_vec(a.ctx)
    d = a - b
    return (d * k1).is_zero() and (d * k2).is_zero()


def reduce_mod_ann(alpha: RingElem) -> RingElem:
    """Canonical representative of alpha modulo Ann(kappa)."""
    cache = _cache(alpha.ctx.n, alpha.ctx.m)
    if cache.ann_basis.shape[0] == 0:
        return alpha
    residue, _ = linalg.reduce_vector(cache.ann_basis, alpha.vec(), alpha.ctx.n)
    return alpha.ctx.elem(residue.reshape(alpha.ctx.m, alpha.ctx.m))


def membership(z: MagnusElem) -> Witness | None:
    """Solve for a witness that z lies in W(n, m); None if it does not."""
    ctx = z.ctx
    if not d_value(z).is_zero():
        return None
    cache = _cache(ctx.n, ctx.m)
    delta = (z.bvec() - section(ctx, z.v).bvec()) % ctx.n
    coeffs = cache.rk_solver.solve(delta)
    if coeffs is not None:
        alpha = ctx.elem(coeffs.reshape(ctx.m, ctx.m))
        return Witness(alpha=alpha, q1=0, q2=0)
    coeffs = cache.lambda_solver.solve(delta)
    if coeffs is None:
        return None
    m2 = ctx.m * ctx.m
    alpha = ctx.elem(coeffs[:m2].reshape(ctx.m, ctx.m))
    return Witness(alpha=alpha, q1=int(coeffs[m2]), q2=int(coeffs[m2 + 1]))


def word_decomposition(z: MagnusElem) -> tuple[int, int, RingElem] | None:
    """Write z = x1^e1 * x2^e2 * [x1,x2]^alpha with e_i in [0, n*m).

    Inverts the normal form underlying `membership`; None when z is not in W.
    """
    w = membership(z)
    if w is None:
        return None
    ctx = z.ctx
    e1 = z.v[0] + ctx.m * w.q1
    e2 = z.v[1] + ctx.m * w.q2
    correction = ctx.geom1(z.v[0]) * ctx.norm2() * w.q2
    alpha = ctx.monomial(-z.v[0], -z.v[1]) * (w.alpha - correction)
    return e1, e2, alpha


def lambda_basis(ctx: RingCtx) -> np.ndarray:
    """Howell basis of the T-part lattice Lambda_0 of W."""
    return _cache(ctx.n, ctx.m).lambda_solver.basis()


def kappa_line_basis(ctx: RingCtx) -> np.ndarray:
    """Howell basis of R*kappa as vectors in T."""
    return _cache(ctx.n, ctx.m).rk_solver.basis()


def w_order(ctx: RingCtx) -> int:
    """|W(n, m)| = m^2 * |Lambda_0|."""
    n = ctx.n
    return ctx.m**2 * linalg.span_size(lambda_basis(ctx), n)


def norm_defect_index(ctx: RingCtx) -> int:
    """|Lambda_0| / |R*kappa|: 1 recovers the profinite picture exactly."""
    n = ctx.n
    return linalg.span_size(lambda_basis(ctx), n) // linalg.span_size(
        kappa_line_basis(ctx), n
    )


def d_locus_excess(ctx: RingCtx) -> int:
    """|{z : D(z) = 0}| - |W|, the failure of the image characterization.

    Zero means D = 0 exactly cuts out W at this level; positive values
    quantify the finite-level gap (the profinite proof uses coprimality of
    a_i - 1, which truncation destroys).
    """
    n, m = ctx.n, ctx.m
    a1m1 = ctx.monomial(1, 0) - ctx.one()
    a2m1 = ctx.monomial(0, 1) - ctx.one()
    rows = [(mono * a1m1).vec() for mono in ctx.monomials()]
    rows += [(mono * a2m1).vec() for mono in ctx.monomials()]
    rows = np.array(rows, dtype=np.int64)
    phi = rows.T % n  # maps vec(b1, b2) to vec(b1(a1-1) + b2(a2-1))
    ker_size = linalg.span_size(linalg.kernel(phi, n), n)
    img = linalg.SpanSolver(rows, n)
    count = 0
    for v1 in range(m):
        for v2 in range(m):
            target = (ctx.monomial(v1, v2) - ctx.one()).vec()
            if img.contains(target):
                count += ker_size
    return count - w_order(ctx)


def enumerate_w(ctx: RingCtx, budget: int = 10**6) -> list[MagnusElem]:
    """Every element of W(n, m), ordered lexicographically by (v, T-part).

    Deterministic; raises BudgetError when |W| exceeds the budget.
    """
    total = w_order(ctx)
    if total > budget:
        raise BudgetError(f"|W({ctx.n},{ctx.m})| = {total} exceeds budget {budget}")
    n, m = ctx.n, ctx.m
    lattice = sorted(
        tuple(int(c) for c in vec)
        for vec in linalg.enumerate_span(lambda_basis(ctx), n, 2 * m * m)
    )
    out = []
    for v1 in range(m):
        for v2 in range(m):
            base = section(ctx, (v1, v2)).bvec()
            for lam in lattice:
                vec = (base + np.array(lam, dtype=np.int64)) % n
                out.append(
                    MagnusElem(
                        ctx,
                        ctx.elem(vec[: m * m].reshape(m, m)),
                        ctx.elem(vec[m * m :].reshape(m, m)),
                        (v1, v2),
                    )
                )
    return out


def random_word_element(ctx: RingCtx, rng, length: int = 12) -> MagnusElem:
    """Random product of generator letters; always a member of W."""
    x1, x2 = gens(ctx)
    letters = [x1, x2, x1.inv(), x2.inv()]
    z = identity(ctx)
    for _ in range(length):
        z = z * rng.choice(letters)
    return z
