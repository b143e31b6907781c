"""Permutation algebra and minimum partitions into increasing subsequences."""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch


def as_permutation(values) -> np.ndarray:
    """Return ``values`` as an int64 array, checking it is a bijection on [0, n)."""
    p = np.asarray(getattr(values, "order", values), dtype=np.int64)
    n = len(p)
    if n and (p.min() < 0 or p.max() >= n or len(np.unique(p)) != n):
        raise ValueError("not a permutation of [0, n)")
    return p


def compose(p, q) -> np.ndarray:
    """``result[i] = p[q[i]]``."""
    p = np.asarray(getattr(p, "order", p), dtype=np.int64)
    q = np.asarray(getattr(q, "order", q), dtype=np.int64)
    if len(p) != len(q):
        raise LengthMismatch(f"lengths differ: {len(p)} vs {len(q)}")
    return p[q]


def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class IncreasingPartition:
    rho: int
    label_of_position: np.ndarray
    subsequences: list

    def values(self, perm, j: int) -> np.ndarray:
        """Values of ``perm`` along subsequence ``j``."""
        return np.asarray(perm)[self.subsequences[j]]


def partition_increasing(p) -> IncreasingPartition:
    """Greedy minimum partition of ``p`` into increasing subsequences.

    Each element joins the subsequence whose tail is the largest value not
    exceeding it, or opens a new one.  The number of subsequences equals the
    length of the longest decreasing subsequence, which makes it minimal.
    Runs in O(n lg rho).
    """
    p = np.asarray(getattr(p, "order", p), dtype=np.int64)
    n = len(p)
    labels = np.empty(n, dtype=np.int64)
    # Tails are kept negated so the list stays ascending and new
    # subsequences (smallest tail so far) are appended at the end.
    neg_tails: list = []
    ids: list = []
    for i, x in enumerate(p.tolist()):
        k = bisect_left(neg_tails, -x)
        if k == len(neg_tails):
            neg_tails.append(-x)
            ids.append(len(ids))
        else:
            neg_tails[k] = -x
        labels[i] = ids[k]
    rho = len(ids)
    order = np.argsort(labels, kind="stable")
    bounds = np.cumsum(np.bincount(labels, minlength=rho))[:-1] if rho else []
    subsequences = np.split(order, bounds) if rho else []
    return IncreasingPartition(rho=rho, label_of_position=labels, subsequences=subsequences)


def lds_length(p) -> int:
    """Longest strictly decreasing subsequence, by quadratic DP."""
    p = np.asarray(getattr(p, "order", p), dtype=np.int64)
    best = np.ones(len(p), dtype=np.int64)
    for i in range(1, len(p)):
        longer = best[:i][p[:i] > p[i]]
        if len(longer):
            best[i] = longer.max() + 1
    return int(best.max()) if len(p) else 0


def lis_indices(seq) -> list:
    """Indices of one longest strictly increasing subsequence of ``seq``."""
    seq = list(seq)
    tails: list = []
    tail_idx: list = []
    prev = [-1] * len(seq)
    for i, x in enumerate(seq):
        k = bisect_left(tails, x)
        if k == len(tails):
            tails.append(x)
            tail_idx.append(i)
        else:
            tails[k] = x
            tail_idx[k] = i
        prev[i] = tail_idx[k - 1] if k else -1
    out = []
    i = tail_idx[-1] if tail_idx else -1
    while i != -1:
        out.append(i)
        i = prev[i]
    return out[::-1]
