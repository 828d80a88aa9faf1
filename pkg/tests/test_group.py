import itertools

import numpy as np
import pytest

from pronorm.errors import AmbientMismatch, CapExceeded, ElementNotInAmbient, IncompatiblePayloads, NotNormal
from pronorm.group import (
    Subgroup,
    all_subgroups,
    alternating_group,
    closure,
    commutator_subgroup,
    conjugate_subgroup,
    direct_product,
    has_odd_index,
    in_class_Xp,
    intersection,
    is_normal,
    join,
    normal_subgroups,
    normalizer,
    overgroups_of,
    p_core,
    p_part,
    quotient,
    sylow_p,
    symmetric_group,
)
from pronorm.perm import Perm
from pronorm.wreath import wreath_product


def c(n, *cycles):
    return Perm.from_cycles(n, *cycles)


def small_groups():
    return [symmetric_group(3), symmetric_group(4), alternating_group(4), wreath_product(2, 2), wreath_product(3, 2)]


class TestGroupAxioms:
    @pytest.mark.parametrize("G", small_groups(), ids=lambda G: repr(G))
    def test_exhaustive_triples(self, G):
        n = G.order
        a, b, x = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        assert np.array_equal(G.mul(G.mul(a, b), x), G.mul(a, G.mul(b, x)))
        e = G.identity_index
        idx = np.arange(n)
        assert np.array_equal(G.mul(e, idx), idx) and np.array_equal(G.mul(idx, e), idx)
        assert np.all(G.mul(idx, G.inv) == e)

    @pytest.mark.parametrize("G", small_groups(), ids=lambda G: repr(G))
    def test_canonical_order_is_injective_and_sorted(self, G):
        keys = [G.domain.key(x) for x in G.elements]
        assert keys == sorted(set(keys))
        assert all(G.index(x) == i for i, x in enumerate(G.elements))


class TestClosure:
    def test_identity(self):
        assert closure([Perm.identity(3)]).order == 1

    def test_sym3(self):
        assert closure([c(3, (0, 1)), c(3, (0, 1, 2))]).order == 6

    def test_cap(self):
        with pytest.raises(CapExceeded):
            closure([c(5, (0, 1)), c(5, (0, 1, 2, 3, 4))], cap=100)

    def test_incompatible(self):
        with pytest.raises(IncompatiblePayloads):
            closure([c(3, (0, 1)), c(4, (0, 1))])


class TestConjugation:
    def test_identity(self):
        G = symmetric_group(4)
        H = G.subgroup([c(4, (0, 1, 2))])
        assert conjugate_subgroup(H, G.identity_index) == H

    def test_normal(self):
        G = symmetric_group(3)
        A3 = G.subgroup([c(3, (0, 1, 2))])
        assert conjugate_subgroup(A3, c(3, (0, 1))) == A3

    def test_transposition(self):
        G = symmetric_group(3)
        H = G.subgroup([c(3, (0, 1))])
        assert conjugate_subgroup(H, c(3, (0, 2))) == G.subgroup([c(3, (1, 2))])

    def test_outside_ambient(self):
        A4 = alternating_group(4)
        H = A4.subgroup([c(4, (0, 1, 2))])
        with pytest.raises(ElementNotInAmbient):
            conjugate_subgroup(H, c(4, (0, 1)))

    def test_preserves_order_and_odd_index(self, z3s3):
        S = sylow_p(z3s3, 2)
        for H in overgroups_of(S, z3s3):
            for g in range(0, z3s3.order, 17):
                Hg = conjugate_subgroup(H, g)
                assert Hg.order == H.order
                assert has_odd_index(z3s3, Hg) == has_odd_index(z3s3, H)


class TestJoinAndIntersection:
    def test_idempotent(self):
        G = symmetric_group(4)
        H = G.subgroup([c(4, (0, 1))])
        assert join(H, H) == H

    def test_two_transpositions(self):
        G = symmetric_group(3)
        assert join(G.subgroup([c(3, (0, 1))]), G.subgroup([c(3, (1, 2))])) == G.whole

    def test_klein_four(self):
        G = symmetric_group(4)
        V4 = join(G.subgroup([c(4, (0, 1), (2, 3))]), G.subgroup([c(4, (0, 2), (1, 3))]))
        assert V4.order == 4 and is_normal(V4, G)

    def test_mismatch(self):
        with pytest.raises(AmbientMismatch):
            join(symmetric_group(3).whole, symmetric_group(4).whole)

    def test_intersection(self):
        G = symmetric_group(4)
        assert intersection(alternating_in(G), G.subgroup([c(4, (0, 1)), c(4, (2, 3))])).order == 2


def alternating_in(G):
    return G.subgroup([c(4, (0, 1, 2)), c(4, (1, 2, 3))])


class TestNormalizer:
    def test_normal(self):
        G = symmetric_group(4)
        assert normalizer(G, alternating_in(G)) == G.whole

    def test_sylow2_of_sym4_self_normalizing(self):
        G = symmetric_group(4)
        S = sylow_p(G, 2)
        assert S.order == 8 and normalizer(G, S) == S

    def test_klein_in_alt5(self):
        A5 = alternating_group(5)
        S = sylow_p(A5, 2)
        N = normalizer(A5, S)
        assert S.order == 4 and N.order == 12


class TestCommutators:
    def test_trivial(self):
        G = symmetric_group(4)
        assert commutator_subgroup(G.whole, G.trivial()).order == 1

    @pytest.mark.parametrize("p,n,order", [(3, 3, 9), (3, 2, 3)])
    def test_base_commutator(self, p, n, order):
        W = wreath_product(p, n)
        C = commutator_subgroup(W.B, W.V)
        assert C.order == order and C == W.v_minus

    def test_derived_subgroup(self):
        G = symmetric_group(4)
        assert commutator_subgroup(G.whole, G.whole) == alternating_in(G)


class TestSylow:
    def test_sym3(self):
        assert sylow_p(symmetric_group(3), 2).order == 2

    def test_sp2(self):
        from pronorm.matgrp import build_sp2

        S = sylow_p(build_sp2(3), 2)
        assert S.order == 8
        # quaternion: a unique involution
        assert int((S.ambient.element_orders[S.indices] == 2).sum()) == 1

    def test_wreath(self, z3s3):
        assert sylow_p(z3s3, 2).order == 2

    def test_absent_prime(self):
        assert sylow_p(symmetric_group(3), 5).order == 1

    @pytest.mark.parametrize("G", small_groups() + [alternating_group(5)], ids=lambda G: repr(G))
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_order_is_p_part(self, G, p):
        S = sylow_p(G, p)
        assert S.order == p_part(G.order, p)

    def test_deterministic(self):
        a = sylow_p(symmetric_group(5), 2)
        b = sylow_p(symmetric_group(5), 2)
        assert np.array_equal(a.indices, b.indices)


class TestPCore:
    def test_sym3(self):
        assert p_core(symmetric_group(3), 2).order == 1

    def test_sp2(self):
        from pronorm.matgrp import build_sp2

        L = build_sp2(3)
        O = p_core(L, 2)
        assert O.order == 8 and O == sylow_p(L, 2)

    def test_wreath(self, z3s3):
        O = p_core(z3s3, 3)
        assert O.order == 81 and z3s3.V.issubset(O) and O != z3s3.V
        assert z3s3.bar(O).order == 3

    @pytest.mark.parametrize("G", small_groups(), ids=lambda G: repr(G))
    def test_normal_and_in_every_sylow(self, G):
        for p in (2, 3):
            O = p_core(G, p)
            assert is_normal(O, G)
            S = sylow_p(G, p)
            for g in range(G.order):
                assert O.issubset(conjugate_subgroup(S, g))


class TestQuotient:
    def test_sym3_mod_alt3(self):
        G = symmetric_group(3)
        assert quotient(G, G.subgroup([c(3, (0, 1, 2))])).order == 2

    def test_sp2_mod_o2(self):
        from pronorm.matgrp import build_sp2

        L = build_sp2(3)
        Q = quotient(L, p_core(L, 2))
        assert Q.order == 3
        assert Q.element_orders.max() == 3

    def test_wreath_mod_vminus(self, z3s3):
        Q = quotient(z3s3, z3s3.v_minus)
        assert Q.order == 18 and Q.verify_projection()

    def test_not_normal(self):
        G = symmetric_group(3)
        with pytest.raises(NotNormal):
            quotient(G, G.subgroup([c(3, (0, 1))]))

    @pytest.mark.parametrize("G", small_groups(), ids=lambda G: repr(G))
    def test_orders_and_projection(self, G):
        for N in normal_subgroups(G):
            Q = quotient(G, N)
            assert Q.order * N.order == G.order
            assert Q.verify_projection()
            # coset labels are the minimal elements of their cosets
            for ci, r in enumerate(Q.reps):
                assert r == int(np.flatnonzero(Q.coset_of == ci).min())

    def test_preimage_roundtrip(self, z3s3):
        Q = quotient(z3s3, z3s3.V)
        for H in overgroups_of(z3s3.V, z3s3):
            assert Q.preimage(Q.project(H)) == H


class TestOddIndex:
    def test_whole(self):
        G = symmetric_group(4)
        assert has_odd_index(G, G.whole)

    def test_alt4(self):
        G = symmetric_group(4)
        assert not has_odd_index(G, alternating_in(G))

    def test_complement(self, z3s3):
        assert has_odd_index(z3s3, z3s3.B)


class TestOvergroups:
    def test_sym4(self):
        G = symmetric_group(4)
        S = sylow_p(G, 2)
        assert overgroups_of(S, G) == [S, G.whole]

    def test_wreath(self, z3s3):
        S = sylow_p(z3s3, 2)
        overs = overgroups_of(S, z3s3)
        orders = [H.order for H in overs]
        assert orders == sorted(orders)
        assert S in overs and z3s3.whole in overs
        assert join(S, z3s3.v_plus) in overs and join(S, z3s3.v_plus).order == 6
        BV = join(z3s3.B, z3s3.v_minus)
        assert BV.order == 54 and join(S, BV) in overs
        # every overgroup from the full subgroup list shows up
        expected = {H.key for H in all_subgroups(z3s3) if S.issubset(H)}
        assert {H.key for H in overs} == expected

    def test_whole_only(self, z3s3):
        assert overgroups_of(z3s3.whole, z3s3) == [z3s3.whole]


class TestClassX:
    def test_sym4(self):
        assert in_class_Xp(symmetric_group(4), 2)

    def test_sp2(self):
        from pronorm.matgrp import build_sp2

        assert not in_class_Xp(build_sp2(3), 2)

    def test_alt5(self):
        assert not in_class_Xp(alternating_group(5), 2)


class TestDirectProduct:
    def test_single(self):
        G = symmetric_group(3)
        assert direct_product([G]) is G

    def test_sym3_squared(self):
        assert direct_product([symmetric_group(3)] * 2).order == 36

    def test_alt5_squared(self):
        P = direct_product([alternating_group(5)] * 2)
        assert P.order == 3600
        A = P.factor(0)
        assert is_normal(A, P) and P.project(0, A).order == 60 and P.project(1, A).order == 1

    def test_embed_project(self):
        G = symmetric_group(3)
        P = direct_product([G, G])
        H = G.subgroup([c(3, (0, 1))])
        E = P.embed(1, H)
        assert E.order == 2 and P.project(1, E) == H


class TestLagrange:
    @pytest.mark.parametrize("G", small_groups(), ids=lambda G: repr(G))
    def test_subgroup_orders_divide(self, G):
        for H in all_subgroups(G):
            assert G.order % H.order == 0
            assert set(H.indices.tolist()) <= set(range(G.order))


def test_subgroup_counts():
    assert len(all_subgroups(symmetric_group(4))) == 30
    assert len(all_subgroups(alternating_group(5))) == 59


def test_element_roundtrip_for_products():
    G = symmetric_group(3)
    P = direct_product([G, G])
    for i, j in itertools.product(range(6), repeat=2):
        e = P.element(P.compose_index([np.array([i]), np.array([j])])[0])
        assert P.domain.from_json(P.domain.to_json(e)) == e
    assert isinstance(P.whole, Subgroup)
