"""Nielsen-move action tables, orbits, stabilizers, and the Out(G)-action."""

import random

import numpy as np
import pytest

from metab.catalog import get_group
from metab.errors import BudgetError
from metab.nielsen import (
    ActionTable,
    EpiClass,
    act,
    canonical_pair,
    epi_classes,
    orbits,
    out_action_on_orbits,
    stabilizer_mod,
)


def test_epi_class_counts():
    assert len(epi_classes(get_group("S3"))) == 3
    assert len(epi_classes(get_group("Z2xZ2"))) == 6  # ordered bases of F_2^2
    # |Epi(F2, (Z/N)^2)| = |GL2(Z/N)|
    assert len(epi_classes(get_group("Z3xZ3"))) == 48
    assert len(epi_classes(get_group("Z5xZ5"))) == 480


def test_epi_classes_budget():
    with pytest.raises(BudgetError):
        epi_classes(get_group("S3"), budget=4)


def test_canonicalization_idempotent_and_well_defined():
    G = get_group("S3")
    rng = random.Random(2)
    pairs = [
        (h1, h2)
        for h1 in range(G.order)
        for h2 in range(G.order)
        if G.generates((h1, h2))
    ]
    for pair in pairs:
        canon = canonical_pair(G, pair)
        assert canonical_pair(G, canon) == canon
        # acting on two random conjugates lands in the same class
        g = rng.randrange(G.order)
        conj = (G.conj(pair[0], g), G.conj(pair[1], g))
        assert canonical_pair(G, conj) == canon
        cls = EpiClass(G, canon)
        for move in ("S", "T"):
            assert act(move, EpiClass(G, canonical_pair(G, conj))) == act(move, cls)


def test_move_relations():
    for name in ["S3", "D4", "Q8", "Heis27", "Z3xZ3", "C7C3"]:
        table = ActionTable(get_group(name))
        n = len(table.classes)
        ident = np.arange(n)
        s, t = table.perm_s, table.perm_t
        s2 = s[s]
        assert np.array_equal(s2[s2], ident)  # S^4 = 1
        st = t[s]  # S then T
        st3 = st[st[st]]
        assert np.array_equal(st3[st3], ident)  # (ST)^6 = 1
        assert np.array_equal(table.word_perm("STSTST" * 2), ident)
        # U(1) is the identity move
        assert np.array_equal(table.perm_u[1], ident)


def test_act_formulas():
    G = get_group("S3")
    table = ActionTable(G)
    cls = table.classes[0]
    h1, h2 = cls.rep
    assert act("S", act("S", act("S", act("S", cls)))) == cls
    ss = act("S", act("S", cls))
    assert ss.rep == canonical_pair(G, (G.inv(h1), G.inv(h2)))
    with pytest.raises(ValueError):
        act("U", cls, u=2)  # gcd(2, 6) != 1


def test_commutator_class_invariant_along_moves():
    # the conjugacy class of [h1, h2] is unchanged by S and T
    for name in ["S3", "D4", "Q8", "Heis27", "C7C3", "D6"]:
        G = get_group(name)
        table = ActionTable(G)
        for cls in table.classes:
            h1, h2 = cls.rep
            base = G.class_size(G.commutator_elem(h1, h2))
            base_cls = next(
                i
                for i, c in enumerate(G.conjugacy_classes())
                if G.commutator_elem(h1, h2) in c
            )
            for move in ("S", "T"):
                m1, m2 = act(move, cls).rep
                moved = G.commutator_elem(m1, m2)
                got = next(
                    i for i, c in enumerate(G.conjugacy_classes()) if moved in c
                )
                assert got == base_cls and G.class_size(moved) == base


def test_orbits_s3():
    table = ActionTable(get_group("S3"))
    orbs = orbits(table, "SL2")
    assert orbs == [[0, 1, 2]]
    assert orbits(table, "GL2") == [[0, 1, 2]]


def test_orbits_abelian_full_level():
    table = ActionTable(get_group("Z2xZ2"))
    assert orbits(table, "SL2") == [sorted(range(6))]
    t3 = ActionTable(get_group("Z3xZ3"))
    sl_orbits = orbits(t3, "SL2")
    # SL2(Z/3)-orbits on bases are the det fibers: |units| = 2 orbits of 24
    assert sorted(len(o) for o in sl_orbits) == [24, 24]
    assert len(orbits(t3, "GL2")) == 1


class FakeCert:
    def __init__(self, e, verdict=True):
        self.e = e
        self.verdict = verdict


def test_stabilizer_requires_certificate():
    table = ActionTable(get_group("S3"))
    with pytest.raises(ValueError):
        stabilizer_mod(table, 0, FakeCert(6, verdict=False), "SL2")


def test_stabilizer_s3_level6():
    from metab.congruence import certify

    table = ActionTable(get_group("S3"))
    cert = certify(table, 6, "S3")
    assert cert.verdict
    H = stabilizer_mod(table, 0, cert, "SL2")
    assert H.ambient_order == 144  # |SL2(Z/6)|
    assert H.order == 48  # index 3 = orbit size
    Hgl = stabilizer_mod(table, 0, cert, "GL2")
    assert Hgl.ambient_order == 288
    assert Hgl.order == 96


def test_stabilizer_abelian_full_level():
    from metab.congruence import certify

    for name, N in [("Z2xZ2", 2), ("Z3xZ3", 3)]:
        table = ActionTable(get_group(name))
        cert = certify(table, N, name)
        assert cert.verdict
        H = stabilizer_mod(table, 0, cert, "GL2")
        assert H.order == 1  # stabilizer of an ordered basis is trivial
        Hsl = stabilizer_mod(table, 0, cert, "SL2")
        assert Hsl.order == 1


def test_out_action_transitive():
    for name in ["S3", "Heis27", "Z2xZ2", "D4", "C7C3"]:
        G = get_group(name)
        table = ActionTable(G)
        perms, transitive = out_action_on_orbits(G, table)
        assert transitive, name


def test_threaded_table_identical():
    G = get_group("D4")
    t1 = ActionTable(G, threads=1)
    t2 = ActionTable(G, threads=3)
    assert t1.to_json() == t2.to_json()
