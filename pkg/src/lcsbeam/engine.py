"""Beam search over LCS construction, plus the two-heuristic wrapper.

Each level expands every feasible single-symbol extension of every beam
node, scores the children under the configured heuristic, and keeps the
best `beta` of them.  Children are ranked by (score desc, cursor vector
lex asc); the fixed tie policy makes runs reproducible across machines.
The longest solution seen anywhere in the run is returned.

The wrapper trial-runs two heuristics at a reduced width and replays the
winner (first one on ties) at full width.

Internally a level is a set of numpy arrays (cursors, parent indices,
chosen symbols); per-level parent/symbol arrays form the arena that the
final solution is reconstructed from.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .heuristics import (
    HeuristicKind,
    HeuristicSpec,
    score_gcov_batch,
    score_minlen_batch,
    score_prob_batch,
    select_k,
)
from .instance import NO_OCCURRENCE, Instance
from .probability import ProbKernel, get_kernel


@dataclass(frozen=True)
class BeamConfig:
    heuristic: HeuristicSpec
    beta: int = 200
    beta_h: int | None = None  # defaults to min(60, beta)
    dominance_filter: bool = False
    tie_break: str = "cursor-lex"

    def __post_init__(self):
        if self.beta < 1:
            raise ValueError(f"beam width must be >= 1, got {self.beta}")
        if self.beta_h is None:
            object.__setattr__(self, "beta_h", min(60, self.beta))
        if not 1 <= self.beta_h <= self.beta:
            raise ValueError(
                f"probe width must be in [1, beta], got {self.beta_h} (beta={self.beta})"
            )
        if self.tie_break != "cursor-lex":
            raise ValueError(f"unknown tie-break policy {self.tie_break!r}")

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "beta_h": self.beta_h,
            "dominance_filter": self.dominance_filter,
            "tie_break": self.tie_break,
            "heuristic": self.heuristic.to_dict(),
        }


@dataclass
class RunReport:
    """Outcome of one solve: the solution, its length, and run counters."""

    solution: str
    length: int
    levels: int
    nodes_expanded: int
    wall_time: float
    config: dict = field(default_factory=dict)
    chosen_heuristic: str | None = None
    probe_lengths: tuple[int, int] | None = None
    verified: bool = False

    def to_dict(self) -> dict:
        return {
            "solution": self.solution,
            "length": self.length,
            "levels": self.levels,
            "nodes_expanded": self.nodes_expanded,
            "wall_time": self.wall_time,
            "config": self.config,
            "chosen_heuristic": self.chosen_heuristic,
            "probe_lengths": list(self.probe_lengths) if self.probe_lengths else None,
            "verified": self.verified,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        probe = d.get("probe_lengths")
        return cls(
            solution=d["solution"],
            length=d["length"],
            levels=d["levels"],
            nodes_expanded=d["nodes_expanded"],
            wall_time=d["wall_time"],
            config=d.get("config", {}),
            chosen_heuristic=d.get("chosen_heuristic"),
            probe_lengths=tuple(probe) if probe else None,
            verified=d.get("verified", False),
        )


def verify_solution(instance: Instance, solution: str) -> bool:
    """Subsequence check against every input string by plain linear scan."""
    for s in instance.strings:
        it = iter(s)
        if not all(ch in it for ch in solution):
            return False
    return True


def beam_search(instance: Instance, config: BeamConfig, width: int | None = None) -> RunReport:
    """Run the beam search; `width` overrides config.beta (probe runs)."""
    if instance is None or instance.n_strings == 0:
        raise ValueError("beam search needs a non-empty instance")
    beta = config.beta if width is None else width
    spec = config.heuristic
    kernel: ProbKernel | None = None
    if spec.kind.uses_probability:
        # built outside the timed section; shared and cached per process
        kernel = get_kernel(instance.sigma_size, instance.max_len)
    gamma = spec.gamma(instance.n_strings)

    n = instance.n_strings
    sigma = instance.sigma_size
    lengths = instance.lengths[None, :]
    row_idx = np.arange(n)[None, :]
    next_table = instance.next_table

    t0 = time.perf_counter()
    beam = np.zeros((1, n), dtype=np.int32)
    arena: list[tuple[np.ndarray, np.ndarray]] = []  # (parents, symbol codes)
    levels = 0
    nodes_expanded = 0

    while True:
        blocks = []  # (symbol code, parent indices, child cursors)
        for code in range(sigma):
            nxt = next_table[row_idx, beam, code]  # (B, N)
            feasible = (nxt != NO_OCCURRENCE).all(axis=1)
            if feasible.any():
                blocks.append(
                    (code, np.nonzero(feasible)[0], nxt[feasible] + 1)
                )
        if not blocks:
            break

        remainders = [lengths - cursors for _, _, cursors in blocks]
        k = None
        if spec.kind.uses_probability:
            if spec.fixed_k is not None:
                k = spec.fixed_k
            else:
                lo = min(int(r.min()) for r in remainders)
                hi = max(int(r.max()) for r in remainders)
                k = select_k(spec, lo, hi, sigma, n)
                # cap at the smallest remainder of the level so every child
                # is scored with the same finite k; letting k overshoot any
                # remainder sends scores to -inf and erases the ranking
                # signal exactly when the endgame needs it
                k = max(1, min(k, lo))

        scores = []
        for (_, _, cursors), rem in zip(blocks, remainders):
            if spec.kind is HeuristicKind.MINLEN:
                scores.append(score_minlen_batch(rem))
            elif spec.kind is HeuristicKind.GCOV:
                counts = instance.suffix_table[row_idx, cursors]  # (B, N, sigma)
                ubs = counts.min(axis=1).sum(axis=1)
                scores.append(score_gcov_batch(rem, ubs, gamma))
            else:
                scores.append(score_prob_batch(rem, k, kernel))

        all_cursors = np.concatenate([b[2] for b in blocks])
        all_parents = np.concatenate([b[1] for b in blocks])
        all_codes = np.concatenate(
            [np.full(len(b[1]), b[0], dtype=np.int16) for b in blocks]
        )
        all_scores = np.concatenate(scores)
        nodes_expanded += len(all_scores)

        if config.dominance_filter and len(all_cursors) > 1:
            keep = _merge_duplicates(all_cursors, all_scores)
            all_cursors = all_cursors[keep]
            all_parents = all_parents[keep]
            all_codes = all_codes[keep]
            all_scores = all_scores[keep]

        order = _rank(all_scores, all_cursors)[:beta]
        beam = all_cursors[order]
        arena.append((all_parents[order], all_codes[order]))
        levels += 1

    wall = time.perf_counter() - t0
    solution = _walk_arena(instance, arena)
    report = RunReport(
        solution=solution,
        length=len(solution),
        levels=levels,
        nodes_expanded=nodes_expanded,
        wall_time=wall,
        config=config.to_dict(),
    )
    report.verified = verify_solution(instance, solution)
    if not report.verified:
        raise AssertionError("search produced an invalid solution (engine bug)")
    return report


def _rank(scores: np.ndarray, cursors: np.ndarray) -> np.ndarray:
    """Indices ordered by score descending, cursor vector lex ascending."""
    keys = tuple(cursors[:, i] for i in range(cursors.shape[1] - 1, -1, -1))
    return np.lexsort(keys + (-scores,))


def _merge_duplicates(cursors: np.ndarray, scores: np.ndarray) -> np.ndarray:
    """Keep one child per distinct cursor vector, preferring the best score."""
    order = _rank(scores, cursors)
    _, first = np.unique(cursors[order], axis=0, return_index=True)
    return np.sort(order[first])


def _walk_arena(instance: Instance, arena) -> str:
    """Reconstruct the top-ranked deepest node's symbol path."""
    symbols = []
    idx = 0
    for parents, codes in reversed(arena):
        symbols.append(instance.alphabet[codes[idx]])
        idx = int(parents[idx])
    symbols.reverse()
    return "".join(symbols)


def hyper_heuristic(
    instance: Instance,
    config: BeamConfig,
    hf1: HeuristicSpec,
    hf2: HeuristicSpec,
) -> RunReport:
    """Probe both heuristics at the reduced width, replay the winner.

    The first heuristic wins ties (probe length greater or equal).  The
    report records both probe lengths and which heuristic ran at full
    width; its wall time covers the winning full-width run only.
    """
    probe1 = beam_search(instance, _with_heuristic(config, hf1), width=config.beta_h)
    probe2 = beam_search(instance, _with_heuristic(config, hf2), width=config.beta_h)
    winner = hf1 if probe1.length >= probe2.length else hf2
    final = beam_search(instance, _with_heuristic(config, winner))
    final.chosen_heuristic = winner.kind.value
    final.probe_lengths = (probe1.length, probe2.length)
    final.config = config.to_dict()
    final.config["hyper_heuristics"] = [hf1.to_dict(), hf2.to_dict()]
    return final


def _with_heuristic(config: BeamConfig, spec: HeuristicSpec) -> BeamConfig:
    return BeamConfig(
        heuristic=spec,
        beta=config.beta,
        beta_h=config.beta_h,
        dominance_filter=config.dominance_filter,
        tie_break=config.tie_break,
    )
