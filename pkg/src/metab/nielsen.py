"""Epimorphism classes of F2 onto a finite group and the mapping-class action.

Epi^ext(F2, G) is realized as the set of generating pairs of G up to
simultaneous conjugation, each class held by its lexicographically minimal
representative (element order = image-tuple order of the group).  The moves

    S: (h1, h2) -> (h2, h1^-1)      T: (h1, h2) -> (h2 h1, h2)
    U(u): (h1, h2) -> (h1, h2^u)    (gcd(u, e) = 1)

descend to classes and generate the SL2(Z)- resp. GL2(Z)-action.  Under
abelianization the moves act by right multiplication with

    M_S = [[0, -1], [1, 0]]   M_T = [[1, 0], [1, 1]]   M_U(u) = diag(1, u)

(column convention; T sends e1 to e1 + e2).  Orbits are connected
components of the move graph; stabilizers inside SL2/GL2(Z/e) are computed
by orbit-stabilizer with Schreier generators once the congruence module has
certified that the action factors through level e.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, InvariantViolation
from .fingrp import Endo, FinGroup, outer_representatives

M_S = ((0, -1), (1, 0))
M_T = ((1, 0), (1, 1))


def m_u(u: int) -> tuple[tuple[int, int], tuple[int, int]]:
    return ((1, 0), (0, u))


def mat_mul(a, b, e: int | None = None):
    out = (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )
    if e is None:
        return out
    return ((out[0][0] % e, out[0][1] % e), (out[1][0] % e, out[1][1] % e))


def mat_mod(a, e: int):
    return ((a[0][0] % e, a[0][1] % e), (a[1][0] % e, a[1][1] % e))


def mat_inv_mod(a, e: int):
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    from .linalg import inv_mod

    d = inv_mod(det % e, e)
    return (
        ((a[1][1] * d) % e, (-a[0][1] * d) % e),
        ((-a[1][0] * d) % e, (a[0][0] * d) % e),
    )


IDENT2 = ((1, 0), (0, 1))


def canonical_pair(G: FinGroup, pair: tuple[int, int]) -> tuple[int, int]:
    """Lexicographically minimal simultaneous conjugate of the pair."""
    if G.is_abelian:
        return (pair[0], pair[1])
    h1, h2 = pair
    best = None
    for g in range(G.order):
        cand = (G.conj(h1, g), G.conj(h2, g))
        if best is None or cand < best:
            best = cand
    return best


@dataclass(frozen=True)
class EpiClass:
    """Conjugacy class of generating pairs, held by its canonical representative."""

    group: FinGroup = field(compare=False, hash=False, repr=False)
    rep: tuple[int, int] = field(compare=True)


def epi_classes(G: FinGroup, budget: int = 10**6) -> list[EpiClass]:
    """All classes of Epi^ext(F2, G), sorted by canonical representative."""
    if G.order**2 > budget:
        raise BudgetError(f"|G|^2 = {G.order ** 2} exceeds budget {budget}")
    reps = set()
    for h1 in range(G.order):
        for h2 in range(G.order):
            if not G.generates((h1, h2)):
                continue
            reps.add(canonical_pair(G, (h1, h2)))
    return [EpiClass(G, rep) for rep in sorted(reps)]


def act_pair(G: FinGroup, move: str, pair: tuple[int, int], u: int | None = None):
    h1, h2 = pair
    if move == "S":
        return (h2, G.inv(h1))
    if move == "T":
        return (G.mul(h2, h1), h2)
    if move == "U":
        return (h1, G.power(h2, u))
    raise ValueError(f"unknown move {move!r}")


def act(move: str, cls: EpiClass, u: int | None = None) -> EpiClass:
    """Apply a move to a class (conjugation-compatible, so well-defined)."""
    G = cls.group
    if move == "U":
        from math import gcd

        if u is None or gcd(u, G.exponent) != 1:
            raise ValueError(f"u = {u} is not a unit mod {G.exponent}")
    return EpiClass(G, canonical_pair(G, act_pair(G, move, cls.rep, u)))


class ActionTable:
    """Classes of Epi^ext(F2, G) with the move permutations S, T, U(u)."""

    def __init__(self, group: FinGroup, budget: int = 10**6, threads: int = 1):
        self.group = group
        self.e = group.exponent
        self.classes = epi_classes(group, budget)
        self.index = {cls.rep: i for i, cls in enumerate(self.classes)}

        def img(move, u=None):
            def one(cls):
                return self.index[act(move, cls, u).rep]

            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    return np.array(list(pool.map(one, self.classes)), dtype=np.int64)
            return np.array([one(c) for c in self.classes], dtype=np.int64)

        self.perm_s = img("S")
        self.perm_t = img("T")
        self.units = [u for u in range(1, self.e + 1) if np.gcd(u, self.e) == 1]
        self.perm_u = {u: img("U", u) for u in self.units}

    def __len__(self):
        return len(self.classes)

    def class_of(self, pair: tuple[int, int]) -> int:
        return self.index[canonical_pair(self.group, pair)]

    def letter_perm(self, letter: str) -> np.ndarray:
        """Permutation of a word letter: S, s, T, t or U<u>."""
        n = len(self.classes)
        if letter == "S":
            return self.perm_s
        if letter == "T":
            return self.perm_t
        if letter in ("s", "t"):
            fwd = self.perm_s if letter == "s" else self.perm_t
            inv = np.empty(n, dtype=np.int64)
            inv[fwd] = np.arange(n)
            return inv
        if letter.startswith("U"):
            return self.perm_u[int(letter[1:])]
        raise ValueError(f"unknown letter {letter!r}")

    def word_perm(self, word) -> np.ndarray:
        """Permutation of a word, letters applied left to right."""
        perm = np.arange(len(self.classes), dtype=np.int64)
        for letter in word:
            perm = self.letter_perm(letter)[perm]
        return perm

    def to_json(self) -> dict:
        return {
            "e": self.e,
            "classes": [list(c.rep) for c in self.classes],
            "perm_s": [int(x) for x in self.perm_s],
            "perm_t": [int(x) for x in self.perm_t],
            "perm_u": {str(u): [int(x) for x in p] for u, p in self.perm_u.items()},
        }


def braid_u_perms(table: ActionTable) -> dict[int, np.ndarray]:
    """Class permutations of the braid-like lifts of diag(1, u), u a unit mod e.

    The plain u-twist gamma_u: (x1, x2) -> (x1, x2^u) has generalized
    determinant 1 + a2 + ... + a2^(u-1), which is braid-like only up to an
    IA part; mixing it with S and T therefore need not factor through
    GL2(Z/e) (it demonstrably does not for C7:C3).  The braid-like
    representative above diag(1, u) is beta_u = gamma_r o gamma_u with r
    solving

        r1 (1 - a2) + r2 (a1 - 1) = u * (1 + a2 + ... + a2^(u-1))^-1 - 1,

    which forces det_c(beta_u) = u modulo monomials.  On a class (h1, h2)
    it acts through the pair's own module structure:

        (h1, h2) -> (c^(r1) h1, c^(r2 * (1 + ... + a2^(u-1))) h2^u).

    Homomorphy in u is asserted; failures would falsify the finite-level
    braid section and must surface.
    """
    cached = getattr(table, "_braid_perms", None)
    if cached is not None:
        return cached
    G = table.group
    if G.is_abelian:
        table._braid_perms = dict(table.perm_u)
        return table._braid_perms
    from . import linalg as _lin
    from .fingrp import ModuleCtx
    from .grpring import try_invert

    mcs = [ModuleCtx(G, cls.rep) for cls in table.classes]
    ring = mcs[0].ring
    one = ring.one()
    v = one - ring.monomial(0, 1)
    w = ring.monomial(1, 0) - one
    cols = [(mono * v).vec() for mono in ring.monomials()]
    cols += [(mono * w).vec() for mono in ring.monomials()]
    A = np.array(cols, dtype=np.int64).T % ring.n
    m2 = ring.m * ring.m
    out: dict[int, np.ndarray] = {}
    for u in table.units:
        geom = ring.geom2(u)
        geom_inv = try_invert(geom)
        if geom_inv is None:
            raise InvariantViolation(f"1 + a2 + ... + a2^{u - 1} is not a unit")
        delta = (u % ring.n) * geom_inv
        sol = _lin.solve(A, (delta - one).vec(), ring.n)
        if sol is None:
            raise InvariantViolation("braid determinant equation is unsolvable")
        r1 = ring.elem(sol[:m2].reshape(ring.m, ring.m))
        r2_geom = ring.elem(sol[m2:].reshape(ring.m, ring.m)) * geom
        images = []
        for mc, cls in zip(mcs, table.classes):
            h1, h2 = cls.rep
            n1 = G.mul(mc.module_evaluate(r1, mc.c), h1)
            n2 = G.mul(mc.module_evaluate(r2_geom, mc.c), G.power(h2, u))
            images.append(table.index[canonical_pair(G, (n1, n2))])
        out[u] = np.array(images, dtype=np.int64)
    ident = np.arange(len(table.classes))
    if not np.array_equal(out[1], ident):
        raise InvariantViolation("braid u-twist at u = 1 is not the identity")
    for u1 in table.units:
        for u2 in table.units:
            u12 = _unit_rep_static(table.units, (u1 * u2) % table.e, table.e)
            if not np.array_equal(out[u2][out[u1]], out[u12]):
                raise InvariantViolation("braid u-twists fail homomorphy")
    table._braid_perms = out
    return out


def _unit_rep_static(units, u: int, e: int) -> int:
    for v in units:
        if v % e == u % e:
            return v
    raise KeyError(u)


def orbits(table: ActionTable, ambient: str = "SL2", braid: bool = False) -> list[list[int]]:
    """Connected components of the move graph, ordered by smallest member.

    With braid=True the GL2 part uses the braid-like u-twists (the grouping
    of Thm-5.5-type Q-components); the plain u-twists give a possibly
    coarser partition glued along target-side twists.
    """
    moves = [table.perm_s, table.perm_t]
    if ambient == "GL2":
        u_perms = braid_u_perms(table) if braid else table.perm_u
        moves += [u_perms[u] for u in table.units]
    elif ambient != "SL2":
        raise ValueError("ambient must be SL2 or GL2")
    n = len(table.classes)
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = True
        queue = [start]
        while queue:
            x = queue.pop(0)
            for p in moves:
                y = int(p[x])
                if not seen[y]:
                    seen[y] = True
                    orbit.append(y)
                    queue.append(y)
        out.append(sorted(orbit))
    return out


@dataclass(frozen=True)
class MatrixSubgroup:
    """A subgroup of SL2/GL2(Z/e) as explicit elements plus Schreier generators."""

    e: int
    ambient: str
    ambient_order: int
    elements: tuple
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def to_json(self) -> dict:
        return {
            "e": self.e,
            "ambient": self.ambient,
            "ambient_order": self.ambient_order,
            "order": self.order,
            "generators": [[list(row) for row in g] for g in self.generators],
        }


def matrix_group_closure(generators, e: int) -> set:
    seen = {IDENT2}
    frontier = [IDENT2]
    gens = [mat_mod(g, e) for g in generators]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = mat_mul(a, g, e)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


def ambient_group(e: int, ambient: str) -> set:
    gens = [M_S, M_T]
    if ambient == "GL2":
        gens += [m_u(u) for u in range(1, e) if np.gcd(u, e) == 1]
    return matrix_group_closure(gens, e)


def stabilizer_mod(
    table: ActionTable, class_idx: int, certificate, ambient: str = "SL2"
) -> MatrixSubgroup:
    """Point stabilizer of a class inside SL2/GL2(Z/e), e from the certificate.

    Requires a level certificate with a true verdict (the action must be
    known to factor through matrices mod e for the stabilizer to be a
    subgroup of the finite matrix group at all).  Orbit-stabilizer with
    Schreier generators; the order identity |orbit| * |H| = |ambient| is
    asserted.
    """
    if not getattr(certificate, "verdict", False):
        raise ValueError("level certification missing or failed")
    e = certificate.e
    letters = [("S", M_S, table.perm_s), ("T", M_T, table.perm_t)]
    if ambient == "GL2":
        # u-twists only factor mod e when exp(G) divides e
        if e % table.e != 0:
            raise ValueError(f"GL2 stabilizers need exp(G) = {table.e} to divide e = {e}")
        u_perms = braid_u_perms(table)
        for u in range(1, e + 1):
            if np.gcd(u, e) != 1:
                continue
            letters.append((f"U{u}", m_u(u % e), u_perms[_unit_rep(table, u, table.e)]))
    transversal = {class_idx: IDENT2}
    order = [class_idx]
    queue = [class_idx]
    schreier = set()
    while queue:
        x = queue.pop(0)
        mx = transversal[x]
        for _, mat, perm in letters:
            y = int(perm[x])
            my = mat_mul(mx, mat, e)
            if y not in transversal:
                transversal[y] = my
                order.append(y)
                queue.append(y)
            else:
                gen = mat_mul(my, mat_inv_mod(transversal[y], e), e)
                if gen != IDENT2:
                    schreier.add(gen)
    H = matrix_group_closure(schreier, e) if schreier else {IDENT2}
    amb = ambient_group(e, ambient)
    if len(order) * len(H) != len(amb):
        raise InvariantViolation(
            f"orbit-stabilizer mismatch: {len(order)} * {len(H)} != {len(amb)}"
        )
    return MatrixSubgroup(
        e=e,
        ambient=ambient,
        ambient_order=len(amb),
        elements=tuple(sorted(H)),
        generators=tuple(sorted(schreier)),
    )


def _unit_rep(table: ActionTable, u: int, exp_g: int) -> int:
    """The table's unit exponent representing u mod exp(G)."""
    for v in table.units:
        if v % exp_g == u % exp_g:
            return v
    raise KeyError(u)


def out_action_on_orbits(
    G: FinGroup, table: ActionTable, ambient: str = "GL2", braid: bool = False
) -> tuple[list[list[int]], bool]:
    """Permutations of the GL2-orbits induced by Out(G), plus transitivity.

    Post-composition with an automorphism commutes with the source moves, so
    each outer representative permutes the orbits; the expected verdict for
    metabelian G is a transitive action (on the braid orbits, hence also on
    the coarser plain-twist orbits).
    """
    orbs = orbits(table, ambient, braid)
    orbit_of = {}
    for i, orb in enumerate(orbs):
        for x in orb:
            orbit_of[x] = i
    reps = outer_representatives(G)
    perms = []
    for sigma in reps:
        images = []
        for orb in orbs:
            # the action permutes orbits (post-composition commutes with the
            # moves); map the representative, spot-check one more member
            img_orbits = set()
            for x in orb[: min(2, len(orb))]:
                h1, h2 = table.classes[x].rep
                moved = table.class_of((sigma(h1), sigma(h2)))
                img_orbits.add(orbit_of[moved])
            if len(img_orbits) != 1:
                raise InvariantViolation("outer action did not permute orbits")
            images.append(img_orbits.pop())
        perms.append(images)
    reachable = {0}
    changed = True
    while changed:
        changed = False
        for p in perms:
            for x in list(reachable):
                if p[x] not in reachable:
                    reachable.add(p[x])
                    changed = True
    transitive = len(reachable) == len(orbs)
    return perms, transitive
