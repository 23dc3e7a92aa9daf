"""Scoring function tests; expected numbers were derived by direct
evaluation against the verified probability oracle."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from lcsbeam.heuristics import (
    HeuristicKind,
    HeuristicSpec,
    Score,
    round_half_away,
    score_gcov,
    score_gcov_batch,
    score_minlen,
    score_minlen_batch,
    score_prob,
    score_prob_batch,
    select_k,
)
from lcsbeam.instance import build_instance
from lcsbeam.probability import exact_table, get_kernel

UNCORR = HeuristicSpec(kind=HeuristicKind.PROB_K_ANALYTIC_UNCORR)
CORR = HeuristicSpec(kind=HeuristicKind.PROB_K_ANALYTIC_CORR)
GUESS = HeuristicSpec(kind=HeuristicKind.PROB_K_GUESS)
GCOV = HeuristicSpec(kind=HeuristicKind.GCOV)


class TestSelectK:
    def test_uncorrelated_rule(self):
        # 600 * (1.8233 - 0.1588 ln 10) / 4 = 218.647... -> 219
        assert select_k(UNCORR, 500, 600, 4, 10) == 219

    def test_correlated_rule(self):
        assert select_k(CORR, 1000, 1000, 2, 10) == 484

    def test_correlated_clamps_to_one(self):
        assert select_k(CORR, 20, 600, 4, 10) == 1

    def test_guess_rule(self):
        assert select_k(GUESS, 600, 600, 4, 10) == 150
        assert select_k(GUESS, 7, 600, 4, 10) == 1

    def test_upper_clamp(self):
        assert select_k(UNCORR, 3, 3, 4, 10) <= 3

    def test_deterministic(self):
        args = (UNCORR, 123, 456, 4, 17)
        assert select_k(*args) == select_k(*args)

    def test_minlen_has_no_rule(self):
        with pytest.raises(ValueError):
            select_k(HeuristicSpec(kind=HeuristicKind.MINLEN), 1, 2, 4, 2)

    def test_round_half_away(self):
        assert round_half_away(2.5) == 3
        assert round_half_away(2.4) == 2
        assert round_half_away(-2.5) == -3


class TestGamma:
    def test_published_rule(self):
        assert GCOV.gamma(2) == pytest.approx(-0.0089, abs=1e-12)
        assert GCOV.gamma(200) == pytest.approx(0.7039, abs=1e-12)

    def test_constants_echoed(self):
        d = UNCORR.to_dict()
        assert d["a"] == 1.8233
        assert d["b"] == 0.1588
        assert d["c"] == 31.0
        assert d["kind"] == "kanalytic-uncorr"


class TestScoreProb:
    def test_two_equal_remainders(self):
        inst = build_instance("ABCD", ["ABC", "BCA"])
        kernel = get_kernel(4, 3)
        s = score_prob(inst, inst.root(), 2, kernel)
        assert s.value == pytest.approx(2 * math.log(0.15625), abs=1e-9)

    def test_k_zero_scores_zero(self):
        inst = build_instance("AB", ["ABAB", "BA"])
        kernel = get_kernel(2, 4)
        assert score_prob(inst, inst.root(), 0, kernel).value == 0.0

    def test_short_remainder_is_minus_inf(self):
        inst = build_instance("ABCD", ["A", "ABCDA"])
        kernel = get_kernel(4, 5)
        assert score_prob(inst, inst.root(), 2, kernel).value == -math.inf

    def test_batch_matches_scalar(self):
        kernel = get_kernel(4, 60)
        rem = np.array([[3, 3], [1, 5], [20, 41]])
        batch = score_prob_batch(rem, 2, kernel)
        inst = build_instance("ABCD", ["AAA", "AAA"])
        assert batch[0] == pytest.approx(
            score_prob(inst, inst.root(), 2, kernel).value, abs=1e-12
        )
        assert batch[1] == -math.inf
        assert np.isfinite(batch[2])


class TestScoreGcov:
    def test_derived_value(self):
        # remainders (4, 6), ub = 3, N = 2, gamma = -0.0089
        inst = build_instance("ABC", ["AAAB", "ABCABC"])
        root = inst.root()
        ub = inst.upper_bound(root)
        assert ub == 3
        s = score_gcov(inst, root, GCOV)
        assert s.value == pytest.approx(43.56922180230345, abs=1e-9)

    def test_zero_upper_bound(self):
        inst = build_instance("ABC", ["AAAAA", "BBBBB", "CCCCC"])
        # no symbol common to all three strings: ub = 0, score = 0
        assert inst.upper_bound(inst.root()) == 0
        assert score_gcov(inst, inst.root(), GCOV).value == 0.0

    def test_zero_variance_term_neutralized(self):
        inst = build_instance("AB", ["ABABA", "BABAB"])
        root = inst.root()
        ub = inst.upper_bound(root)
        assert ub == 4
        assert score_gcov(inst, root, GCOV).value == pytest.approx(25 * 2.0, abs=1e-12)

    def test_non_negative(self):
        rng = random.Random(9)
        for _ in range(30):
            strings = [
                "".join(rng.choice("AB") for _ in range(rng.randint(1, 12)))
                for _ in range(rng.choice([2, 3, 5]))
            ]
            inst = build_instance("AB", strings)
            assert score_gcov(inst, inst.root(), GCOV).value >= 0.0

    def test_batch_matches_scalar(self):
        inst = build_instance("ABC", ["ABCA", "ABCABC"])
        root = inst.root()
        rem = np.array([inst.remaining_lengths(root)])
        ubs = np.array([inst.upper_bound(root)])
        batch = score_gcov_batch(rem, ubs, GCOV.gamma(2))
        assert batch[0] == pytest.approx(score_gcov(inst, root, GCOV).value, abs=1e-12)


class TestScoreMinlen:
    def test_examples(self):
        inst = build_instance("ABC", ["BCABAABC", "CAACBBAA"])
        child = inst.successor(inst.root(), "B")
        assert score_minlen(inst, child).value == 3.0
        assert score_minlen(inst, inst.root()).value == 8.0

    def test_terminal(self):
        inst = build_instance("AB", ["A", "A"])
        state = inst.successor(inst.root(), "A")
        assert score_minlen(inst, state).value == 0.0

    def test_batch(self):
        rem = np.array([[7, 3], [5, 5], [0, 0]])
        assert list(score_minlen_batch(rem)) == [3.0, 5.0, 0.0]


class TestScoreOrdering:
    def test_value_dominates(self):
        hi = Score(value=1.0, tie_key=(9,))
        lo = Score(value=0.5, tie_key=(0,))
        assert hi.ranks_before(lo)
        assert sorted([hi, lo], reverse=True) == [hi, lo]

    def test_tie_uses_cursor_key(self):
        a = Score(value=1.0, tie_key=(0, 2))
        b = Score(value=1.0, tie_key=(0, 3))
        assert a.ranks_before(b)

    def test_log_ordering_matches_exact_products(self):
        """Ordering under summed logs equals ordering under the literal
        probability product computed in exact rationals (n <= 30)."""
        kernel = get_kernel(3, 30)
        exact = exact_table(3, 30)
        rng = random.Random(21)
        for _ in range(200):
            k = rng.randint(1, 8)
            rems_a = [rng.randint(k, 30) for _ in range(4)]
            rems_b = [rng.randint(k, 30) for _ in range(4)]
            prod_a = math.prod((exact[k][r] for r in rems_a), start=Fraction(1))
            prod_b = math.prod((exact[k][r] for r in rems_b), start=Fraction(1))
            log_a = sum(kernel.log_p(k, r) for r in rems_a)
            log_b = sum(kernel.log_p(k, r) for r in rems_b)
            if prod_a == prod_b:
                assert log_a == pytest.approx(log_b, abs=1e-9)
            elif abs(log_a - log_b) > 1e-12:
                assert (log_a > log_b) == (prod_a > prod_b)
