import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import sylow2_corpus
from pronorm.criteria import (
    Decision,
    Verdict,
    binary_dominance,
    lemma14_predicate,
    lemma15_predicate,
    odd_prime_power,
    special_form,
    theorem1_predicate,
    thm2_decide,
)
from pronorm.errors import AmbientMismatch, BadPrimePower
from pronorm.group import join, sylow_p
from pronorm.oracle import prn_definition
from pronorm.wreath import build_product, wreath_product


def bv_minus(W):
    return join(W.B, W.v_minus)


class TestDecide:
    def test_normal_subgroup(self, z3s3):
        d = thm2_decide([(3, 3)], z3s3.whole, bv_minus(z3s3))
        assert d.verdict is Verdict.PRONORMAL

    def test_complement(self, z3s3):
        d = thm2_decide([(3, 3)], z3s3.whole, z3s3.B)
        assert d.verdict is Verdict.NOT_PRONORMAL
        assert [r.criterion for r in d.reasons] == ["sum-zero-containment"]

    def test_coprime_degree(self, z3s2):
        _, _, tops = sylow2_corpus(z3s2)
        assert tops
        for H in tops:
            d = thm2_decide([(3, 2)], z3s2.whole, H)
            assert d.pronormal and d.reasons[0].criterion == "coprime-degree"

    def test_proper_overgroup(self, z3s3):
        d = thm2_decide(z3s3, bv_minus(z3s3), z3s3.B)
        assert d.pronormal and d.reasons[0].criterion == "proper-overgroup"

    def test_gate_top_image(self, z3s3):
        S = sylow_p(z3s3, 2)
        d = thm2_decide(z3s3, z3s3.whole, S)
        assert d.verdict is Verdict.NOT_APPLICABLE
        assert d.reasons[0].criterion == "surjective-top-gate"
        assert d.exit_code == 2

    def test_gate_odd_index(self, z3s3):
        d = thm2_decide(z3s3, z3s3.whole, z3s3.V)
        assert {r.criterion for r in d.reasons} == {"odd-index-gate", "surjective-top-gate"}

    def test_spec_must_match(self, z3s3):
        with pytest.raises(AmbientMismatch):
            thm2_decide([(3, 2)], z3s3.whole, z3s3.B)
        with pytest.raises(AmbientMismatch):
            thm2_decide(z3s3, z3s3.B, z3s3.whole)

    def test_not_applicable_needs_reason(self):
        with pytest.raises(ValueError):
            Decision(Verdict.NOT_APPLICABLE, [])

    def test_degree_one_factor(self):
        G = build_product([(3, 1), (3, 2)])
        _, _, tops = sylow2_corpus(G)
        for H in tops:
            d = thm2_decide(G, G.whole, H)
            assert d.reasons[0].criterion == "trivial-top"
            assert d.verdict == prn_definition(H, G).verdict

    def test_two_factor_follows_the_rest(self):
        # a p = 2 factor never blocks pronormality; the odd factor decides
        G = build_product([(2, 2), (3, 3)])
        _, overs, tops = sylow2_corpus(G)
        assert tops
        for H in tops:
            d = thm2_decide(G, G.whole, H)
            assert d.reasons[0].criterion == "self-normalizing-2-factor"
            assert d.verdict == prn_definition(H, G).verdict
            assert d.verdict == thm2_decide(G.components[1], G.components[1].whole, G.project(1, H)).verdict


def test_inside_split_subgroup_is_pronormal(two_factor, two_factor_corpus):
    # R = B1 V1 x B2 V2^-, with 3 not dividing 2 and 3 dividing 3
    G = two_factor
    R = join(join(G.B, G.V_i(0)), G.v_minus(1))
    assert R.order == 18 * 54
    _, overs, tops = two_factor_corpus
    inside = [K for K in overs if K.issubset(R)]
    checked = 0
    for H in tops:
        if not H.issubset(R) or G.bar(H).order != G.B.order:
            continue
        for K in inside:
            if H.issubset(K):
                assert thm2_decide(G, K, H).pronormal
                assert prn_definition(H, K).pronormal
                checked += 1
    assert checked > 0


class TestComplementPredicates:
    def test_single_degree_examples(self):
        assert not lemma14_predicate(3, 3)
        assert lemma14_predicate(3, 4)
        assert all(lemma14_predicate(1, n) for n in range(1, 20))

    def test_degree_list_examples(self):
        assert not lemma15_predicate(3, [3])
        assert lemma15_predicate(3, [2])
        assert lemma15_predicate(5, [4])

    @given(st.integers(1, 500), st.lists(st.integers(1, 30), min_size=1, max_size=4), st.data())
    def test_antitone(self, a, ns, data):
        i = data.draw(st.integers(0, len(ns) - 1))
        bigger = list(ns)
        bigger[i] += data.draw(st.integers(0, 10))
        if lemma15_predicate(a, bigger):
            assert lemma15_predicate(a, ns)

    @given(st.integers(0, 250).map(lambda k: 2 * k + 1), st.lists(st.integers(1, 30), min_size=1, max_size=4))
    def test_odd_order_means_coprime(self, a, ns):
        from math import gcd

        assert lemma15_predicate(a, ns) == all(gcd(a, m) == 1 for m in range(1, max(ns) + 1))


class TestSpecialForm:
    @pytest.mark.parametrize("n,expected", [(4, True), (5, True), (3, False), (1, True), (2, True),
                                            (6, False), (10, True), (17, True), (9, False), (34, True)])
    def test_values(self, n, expected):
        assert special_form(n) is expected

    def test_brute_force(self):
        forms = {2**w for w in range(12)} | {2**w * (4**k + 1) for w in range(12) for k in range(6)}
        for n in range(1, 3000):
            assert special_form(n) == (n in forms)


class TestSymplecticProductPredicate:
    @pytest.mark.parametrize("factors,expected", [
        ([(3, 3)], False),
        ([(5, 3)], True),
        ([(3, 7)], True),
        ([(4, 5), (2, 3)], True),
        ([(17, 3)], True),
        ([(6, 11)], False),
    ])
    def test_table(self, factors, expected):
        assert theorem1_predicate(factors) is expected

    @pytest.mark.parametrize("q", [1, 2, 4, 6, 9 * 5, 15, -3])
    def test_bad_q(self, q):
        with pytest.raises(BadPrimePower):
            theorem1_predicate([(2, q)])

    def test_prime_powers(self):
        assert odd_prime_power(729) == (3, 6)
        assert odd_prime_power(125) == (5, 3)
        assert odd_prime_power(7) == (7, 1)

    @given(st.lists(st.tuples(st.integers(1, 40), st.sampled_from([3, 5, 7, 9, 11, 13, 25, 27, 49, 81])),
                    min_size=1, max_size=5), st.data())
    def test_monotone_under_removal(self, factors, data):
        i = data.draw(st.integers(0, len(factors) - 1))
        if theorem1_predicate(factors):
            assert theorem1_predicate(factors[:i] + factors[i + 1:])

    @given(st.lists(st.tuples(st.integers(0, 8).map(lambda e: 2**e), st.sampled_from([3, 5, 11, 13, 27])),
                    min_size=1, max_size=4))
    def test_powers_of_two_always_hold(self, factors):
        assert theorem1_predicate(factors)


class TestBinaryDominance:
    def test_values(self):
        assert binary_dominance(5, 7)
        assert not binary_dominance(2, 5)
        assert all(binary_dominance(0, n) for n in range(64))

    def test_complement_symmetry(self):
        for n in range(1025):
            for m in range(n + 1):
                assert binary_dominance(m, n) == binary_dominance(n - m, n)

    def test_negative(self):
        with pytest.raises(ValueError):
            binary_dominance(-1, 3)
