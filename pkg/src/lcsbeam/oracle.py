"""Ground-truth LCS solvers for testing: exact DP for 2-3 strings and
exhaustive enumeration for tiny many-string cases.

These are referees for the beam search, kept deliberately independent of
the instance tables (plain string scans only)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


class BudgetError(Exception):
    """The requested oracle computation exceeds its configured budget."""


@dataclass(frozen=True)
class OracleBudget:
    max_cells: int = 25_000_000   # DP table cells
    max_enum: int = 1 << 20       # subsequence enumeration bound

    def __post_init__(self):
        if self.max_cells < 1 or self.max_enum < 1:
            raise ValueError("budget caps must be positive")


DEFAULT_BUDGET = OracleBudget()


def exact_lcs2(s1: str, s2: str, budget: OracleBudget = DEFAULT_BUDGET):
    """Classical two-string DP; returns (length, one witness)."""
    if (len(s1) + 1) * (len(s2) + 1) > budget.max_cells:
        raise BudgetError(
            f"2-string DP needs {(len(s1)+1)*(len(s2)+1)} cells, cap is {budget.max_cells}"
        )
    a = np.frombuffer(s1.encode("utf-8"), dtype=np.uint8)
    b = np.frombuffer(s2.encode("utf-8"), dtype=np.uint8)
    if a.size != len(s1) or b.size != len(s2):
        # non-ASCII symbols: fall back to per-character integer codes
        pool = {ch: i for i, ch in enumerate(dict.fromkeys(s1 + s2))}
        a = np.array([pool[ch] for ch in s1], dtype=np.int32)
        b = np.array([pool[ch] for ch in s2], dtype=np.int32)
    dp = np.zeros((len(s1) + 1, len(s2) + 1), dtype=np.int32)
    for i in range(1, len(s1) + 1):
        eq = (b == a[i - 1]).astype(np.int32)
        np.maximum.accumulate(
            np.maximum(dp[i - 1, 1:], dp[i - 1, :-1] + eq), out=dp[i, 1:]
        )
    length = int(dp[len(s1), len(s2)])
    # traceback for one witness
    witness = []
    i, j = len(s1), len(s2)
    while i > 0 and j > 0:
        if s1[i - 1] == s2[j - 1] and dp[i, j] == dp[i - 1, j - 1] + 1:
            witness.append(s1[i - 1])
            i -= 1
            j -= 1
        elif dp[i - 1, j] >= dp[i, j - 1]:
            i -= 1
        else:
            j -= 1
    witness.reverse()
    return length, "".join(witness)


def exact_lcs3(s1: str, s2: str, s3: str, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Exact three-string LCS length by 3-D DP (no witness)."""
    cells = (len(s1) + 1) * (len(s2) + 1) * (len(s3) + 1)
    if cells > budget.max_cells:
        raise BudgetError(f"3-string DP needs {cells} cells, cap is {budget.max_cells}")
    l2, l3 = len(s2), len(s3)
    prev = np.zeros((l2 + 1, l3 + 1), dtype=np.int32)
    eq23 = np.zeros((l2 + 1, l3 + 1), dtype=bool)
    b = np.array(list(s2))
    c = np.array(list(s3)) if s3 else np.array([], dtype="<U1")
    for ch1 in s1:
        if l2 and l3:
            eq23[1:, 1:] = (b == ch1)[:, None] & (c == ch1)[None, :]
        cur = prev.copy()
        take = np.zeros_like(prev)
        take[1:, 1:] = prev[:-1, :-1] + 1
        cur = np.where(eq23, np.maximum(cur, take), cur)
        np.maximum.accumulate(cur, axis=0, out=cur)
        np.maximum.accumulate(cur, axis=1, out=cur)
        prev = cur
    return int(prev[l2, l3])


def _is_subsequence(pattern: str, s: str) -> bool:
    it = iter(s)
    return all(ch in it for ch in pattern)


def exhaustive_lcs(strings, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Brute-force referee: try subsequences of the shortest string,
    longest first, and return the first length common to all strings."""
    strings = list(strings)
    if not strings:
        raise ValueError("need at least one string")
    shortest = min(strings, key=len)
    if len(shortest) > 20 or 2 ** len(shortest) > budget.max_enum:
        raise BudgetError(
            f"enumeration over a length-{len(shortest)} string exceeds the cap"
        )
    others = [s for s in strings if s is not shortest]
    for size in range(len(shortest), 0, -1):
        seen = set()
        for positions in itertools.combinations(range(len(shortest)), size):
            cand = "".join(shortest[p] for p in positions)
            if cand in seen:
                continue
            seen.add(cand)
            if all(_is_subsequence(cand, s) for s in others):
                return size
    return 0
