"""Node-scoring functions for the beam search.

Five scoring kinds: the minimum-remaining-length baseline, the
probability-product score under three rules for picking the target
length k (a plain guess and two fitted analytic rules, one for
uncorrelated and one for correlated string sets), and the generalized
coefficient-of-variation score.

The probability product is carried as a sum of logs; orderings are
unchanged and underflow is impossible.  For the Prob* kinds, k is chosen
once per search level from the min/max remainder lengths over all
children of that level, so scores stay comparable across the level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from enum import Enum

import numpy as np

from .instance import Instance, NodeState
from .probability import ProbKernel

# Published constants of the fitted k rules and the GCoV exponent rule.
UNCORR_A = 1.8233
UNCORR_B = 0.1588
CORR_C = 31.0
GAMMA_SLOPE = 0.0036
GAMMA_INTERCEPT = -0.0161


class HeuristicKind(Enum):
    MINLEN = "minlen"
    PROB_K_GUESS = "kguess"
    PROB_K_ANALYTIC_UNCORR = "kanalytic-uncorr"
    PROB_K_ANALYTIC_CORR = "kanalytic-corr"
    GCOV = "gcov"

    @property
    def uses_probability(self) -> bool:
        return self in (
            HeuristicKind.PROB_K_GUESS,
            HeuristicKind.PROB_K_ANALYTIC_UNCORR,
            HeuristicKind.PROB_K_ANALYTIC_CORR,
        )


@dataclass(frozen=True)
class HeuristicSpec:
    """Scoring function choice plus the constants it evaluates with.

    Constants default to the published fitted values and are echoed into
    every run report.  fixed_k pins the probability score to a constant
    target length (used by the k-sweep harness) instead of a per-level rule.
    """

    kind: HeuristicKind
    a: float = UNCORR_A
    b: float = UNCORR_B
    c: float = CORR_C
    gamma_slope: float = GAMMA_SLOPE
    gamma_intercept: float = GAMMA_INTERCEPT
    fixed_k: int | None = None

    def gamma(self, n_strings: int) -> float:
        """Variance exponent; may be negative for small string counts."""
        return self.gamma_slope * n_strings + self.gamma_intercept

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "HeuristicSpec":
        """Build a spec from a parsed config mapping (CLI --heuristic-config)."""
        kind = HeuristicKind(d["kind"])
        fields = ("a", "b", "c", "gamma_slope", "gamma_intercept", "fixed_k")
        return cls(kind=kind, **{k: d[k] for k in fields if k in d})


@dataclass(frozen=True)
class Score:
    """Comparable node score; ties fall back to the cursor vector.

    Higher value ranks first; among equal values the lexicographically
    smaller tie key ranks first.
    """

    value: float
    tie_key: tuple[int, ...] = ()

    def ranks_before(self, other: "Score") -> bool:
        if self.value != other.value:
            return self.value > other.value
        return self.tie_key < other.tie_key

    def __lt__(self, other: "Score") -> bool:
        # natural "<" means worse rank, so sorted() ascends to the best
        return other.ranks_before(self)


def round_half_away(x: float) -> float:
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


def select_k(
    spec: HeuristicSpec,
    min_remaining: int,
    max_remaining: int,
    sigma_size: int,
    n_strings: int,
) -> int:
    """Target subsequence length for the probability product.

    min/max_remaining aggregate over every remainder of every child at the
    current level.  The result is clamped into [1, max_remaining].
    """
    kind = spec.kind
    if kind is HeuristicKind.PROB_K_GUESS:
        k = math.floor(min_remaining / sigma_size)
    elif kind is HeuristicKind.PROB_K_ANALYTIC_UNCORR:
        k = round_half_away(
            max_remaining * (spec.a - spec.b * math.log(n_strings)) / sigma_size
        )
    elif kind is HeuristicKind.PROB_K_ANALYTIC_CORR:
        k = math.floor((min_remaining - spec.c) / sigma_size)
    else:
        raise ValueError(f"{kind} has no k-selection rule")
    k = min(int(k), int(max_remaining))
    return max(1, k)


def score_prob(
    instance: Instance, state: NodeState, k: int, kernel: ProbKernel
) -> Score:
    """Sum of ln p(k, remainder length) over the strings.

    -inf as soon as any remainder is shorter than k (that factor is 0).
    """
    total = 0.0
    for rem in instance.remaining_lengths(state):
        lp = kernel.log_p(k, rem)
        if lp == -math.inf:
            return Score(value=-math.inf, tie_key=state.cursors)
        total += lp
    return Score(value=total, tie_key=state.cursors)


def score_gcov(instance: Instance, state: NodeState, spec: HeuristicSpec) -> Score:
    """mean^2 / variance^gamma, scaled by sqrt of the occurrence bound.

    Zero variance carries no dispersion signal, so that factor is taken
    as 1.  The result is >= 0 and is 0 exactly when the bound or the mean
    vanishes.
    """
    mean, var = instance.stats(state)
    ub = instance.upper_bound(state)
    gamma = spec.gamma(instance.n_strings)
    denom = var**gamma if var > 0.0 else 1.0
    return Score(value=mean * mean / denom * math.sqrt(ub), tie_key=state.cursors)


def score_minlen(instance: Instance, state: NodeState) -> Score:
    """Length of the shortest remainder."""
    return Score(
        value=float(min(instance.remaining_lengths(state))), tie_key=state.cursors
    )


# --------------------------------------------------------------------------
# vectorised variants used by the engine (one call per level per symbol)
# --------------------------------------------------------------------------


def score_prob_batch(remaining: np.ndarray, k: int, kernel: ProbKernel) -> np.ndarray:
    """ln-probability sums for a (children x strings) remainder matrix."""
    row = kernel.log_row(k)
    with np.errstate(invalid="ignore"):
        return row[remaining].sum(axis=1)


def score_gcov_batch(
    remaining: np.ndarray, upper_bounds: np.ndarray, gamma: float
) -> np.ndarray:
    mean = remaining.mean(axis=1)
    var = remaining.var(axis=1, ddof=1)
    denom = np.where(var > 0.0, var, 1.0) ** gamma
    return mean * mean / denom * np.sqrt(upper_bounds)


def score_minlen_batch(remaining: np.ndarray) -> np.ndarray:
    return remaining.min(axis=1).astype(float)
