"""Beam engine behavior: search results, determinism, tie policy,
duplicate merging, and the two-heuristic wrapper."""

import random

import pytest

from lcsbeam.datasets import gen_correlated, gen_uncorrelated
from lcsbeam.engine import (
    BeamConfig,
    RunReport,
    beam_search,
    hyper_heuristic,
    verify_solution,
)
from lcsbeam.heuristics import HeuristicKind, HeuristicSpec
from lcsbeam.instance import build_instance
from lcsbeam.oracle import exact_lcs2, exhaustive_lcs

MINLEN = HeuristicSpec(kind=HeuristicKind.MINLEN)
GUESS = HeuristicSpec(kind=HeuristicKind.PROB_K_GUESS)
UNCORR = HeuristicSpec(kind=HeuristicKind.PROB_K_ANALYTIC_UNCORR)
GCOV = HeuristicSpec(kind=HeuristicKind.GCOV)

ALL_KINDS = [MINLEN, GUESS, UNCORR, GCOV]


def cfg(spec, beta=10, **kw):
    kw.setdefault("beta_h", min(beta, 5))
    return BeamConfig(heuristic=spec, beta=beta, **kw)


class TestVerifySolution:
    def test_examples(self):
        inst = build_instance("ABC", ["BCABAABC", "CAACBBAA"])
        # "BAA" scans through both strings; "BC" fails the second one
        # (its last C sits before its first B)
        assert verify_solution(inst, "BAA")
        assert not verify_solution(inst, "BC")
        assert verify_solution(inst, "")
        inst2 = build_instance("AB", ["AB", "BA"])
        assert not verify_solution(inst2, "AB")


class TestBeamSearch:
    def test_identical_strings(self):
        inst = build_instance("AB", ["AB", "AB"])
        for spec in ALL_KINDS:
            report = beam_search(inst, cfg(spec, beta=1))
            assert report.length == 2
            assert report.solution == "AB"

    def test_small_derived_case(self):
        # exhaustive enumeration says the best common subsequence has length 2
        inst = build_instance("ABC", ["ABC", "BCA"])
        assert exhaustive_lcs(["ABC", "BCA"]) == 2
        report = beam_search(inst, cfg(MINLEN, beta=3))
        assert report.length == 2

    def test_no_common_symbol(self):
        inst = build_instance("AB", ["A", "B"])
        report = beam_search(inst, cfg(MINLEN, beta=2))
        assert report.length == 0
        assert report.solution == ""
        assert report.levels == 0

    def test_report_counters(self):
        inst = build_instance("AB", ["ABAB", "BABA"])
        report = beam_search(inst, cfg(GUESS, beta=4))
        assert report.length == len(report.solution) == report.levels
        assert report.nodes_expanded > 0
        assert report.wall_time >= 0.0
        assert report.verified

    def test_solution_bounded_by_ub_and_minlen(self):
        rng = random.Random(2)
        for _ in range(15):
            strings = [
                "".join(rng.choice("ABCD") for _ in range(rng.randint(3, 30)))
                for _ in range(rng.choice([2, 3, 5]))
            ]
            inst = build_instance("ABCD", strings)
            report = beam_search(inst, cfg(GUESS, beta=8))
            assert verify_solution(inst, report.solution)
            assert report.length <= inst.upper_bound(inst.root())
            assert report.length <= min(len(s) for s in strings)

    def test_beam_never_beats_exact(self):
        rng = random.Random(7)
        for _ in range(20):
            a = "".join(rng.choice("AB") for _ in range(rng.randint(2, 25)))
            b = "".join(rng.choice("AB") for _ in range(rng.randint(2, 25)))
            inst = build_instance("AB", [a, b])
            exact, _ = exact_lcs2(a, b)
            for spec in ALL_KINDS:
                assert beam_search(inst, cfg(spec, beta=12)).length <= exact

    def test_determinism(self):
        inst, _ = gen_uncorrelated(4, 5, 80, 42)
        for spec in ALL_KINDS:
            r1 = beam_search(inst, cfg(spec, beta=20))
            r2 = beam_search(inst, cfg(spec, beta=20))
            assert r1.solution == r2.solution
            assert r1.nodes_expanded == r2.nodes_expanded
            assert r1.levels == r2.levels

    def test_width_monotonicity_statistical(self):
        """Wider beams win on at least 95% of seeds (not a strict law)."""
        wins = 0
        for seed in range(50):
            inst, _ = gen_uncorrelated(4, 3, 60, seed)
            narrow = beam_search(inst, cfg(GUESS, beta=30)).length
            wide = beam_search(inst, cfg(GUESS, beta=120)).length
            wins += wide >= narrow
        assert wins >= 48

    def test_dominance_filter_dedupes(self):
        # "AAAB"/"AABA": many parents reach identical cursor vectors
        inst = build_instance("AB", ["AAAB", "AABA"])
        plain = beam_search(inst, cfg(GUESS, beta=6))
        merged = beam_search(inst, cfg(GUESS, beta=6, dominance_filter=True))
        assert merged.length >= plain.length
        assert merged.nodes_expanded <= plain.nodes_expanded
        assert verify_solution(inst, merged.solution)

    def test_fixed_k_scoring(self):
        inst, _ = gen_uncorrelated(4, 3, 50, 9)
        spec = HeuristicSpec(kind=HeuristicKind.PROB_K_GUESS, fixed_k=5)
        report = beam_search(inst, cfg(spec, beta=10))
        assert report.length > 0
        assert verify_solution(inst, report.solution)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BeamConfig(heuristic=MINLEN, beta=0)
        with pytest.raises(ValueError):
            BeamConfig(heuristic=MINLEN, beta=10, beta_h=20)
        with pytest.raises(ValueError):
            BeamConfig(heuristic=MINLEN, tie_break="random")


class TestHyperHeuristic:
    def test_tie_prefers_first(self):
        # identical heuristics force equal probes; the first must win
        inst, _ = gen_uncorrelated(4, 4, 60, 3)
        config = cfg(UNCORR, beta=20)
        report = hyper_heuristic(inst, config, UNCORR, UNCORR)
        assert report.probe_lengths[0] == report.probe_lengths[1]
        assert report.chosen_heuristic == UNCORR.kind.value

    def test_selection_rule_against_independent_probes(self):
        for seed in range(12):
            inst, _ = (
                gen_uncorrelated(4, 4, 70, seed)
                if seed % 2
                else gen_correlated(4, 4, 70, 0.2, seed)
            )
            config = cfg(UNCORR, beta=30)
            report = hyper_heuristic(inst, config, UNCORR, GCOV)
            p1 = beam_search(inst, cfg(UNCORR, beta=30), width=config.beta_h).length
            p2 = beam_search(inst, cfg(GCOV, beta=30), width=config.beta_h).length
            assert report.probe_lengths == (p1, p2)
            expected = UNCORR if p1 >= p2 else GCOV
            assert report.chosen_heuristic == expected.kind.value

    def test_report_echoes_config(self):
        inst, _ = gen_uncorrelated(4, 4, 40, 5)
        report = hyper_heuristic(inst, cfg(UNCORR, beta=10), UNCORR, GCOV)
        assert report.config["beta"] == 10
        assert "hyper_heuristics" in report.config
        assert report.config["heuristic"]["a"] == 1.8233


class TestRunReport:
    def test_dict_round_trip(self):
        inst, _ = gen_uncorrelated(4, 3, 30, 1)
        report = hyper_heuristic(inst, cfg(UNCORR, beta=8), UNCORR, GCOV)
        d = report.to_dict()
        again = RunReport.from_dict(d).to_dict()
        assert d == again
