"""Suffix arrays and spaced suffix arrays.

Both are built with numpy sorts.  The suffix array uses prefix doubling;
the spaced suffix array sorts positions by their seed key and breaks ties
by suffix rank, which is exactly "key first, then the whole suffix".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .textmodel import SpacedSeed, Text, key_alphabet_size, key_columns


@dataclass(frozen=True, eq=False)
class SuffixArray:
    order: np.ndarray
    text_ref: str = ""

    def __len__(self) -> int:
        return len(self.order)

    def __getitem__(self, i):
        return self.order[i]


@dataclass(frozen=True, eq=False)
class SpacedSuffixArray:
    order: np.ndarray
    seed_ref: Optional[SpacedSeed] = None
    text_ref: str = ""

    def __len__(self) -> int:
        return len(self.order)

    def __getitem__(self, i):
        return self.order[i]


def _dense_ranks(order: np.ndarray, *keys: np.ndarray) -> np.ndarray:
    """Ranks (0-based, ties equal) of positions already sorted by ``keys``."""
    n = len(order)
    diff = np.zeros(n - 1, dtype=bool)
    for k in keys:
        s = k[order]
        diff |= s[1:] != s[:-1]
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.concatenate(([0], np.cumsum(diff)))
    return ranks


def suffix_ranks(symbols: np.ndarray) -> np.ndarray:
    """Inverse suffix array by prefix doubling.  A proper prefix sorts first."""
    n = len(symbols)
    rank = np.asarray(symbols, dtype=np.int64)
    order = np.argsort(rank, kind="stable")
    rank = _dense_ranks(order, rank)
    k = 1
    while n > 1 and rank.max() < n - 1:
        second = np.full(n, -1, dtype=np.int64)
        second[: n - k] = rank[k:]
        order = np.lexsort((second, rank))
        rank = _dense_ranks(order, rank, second)
        k *= 2
        if k >= n:
            break
    return rank


def build_sa(text: Text) -> SuffixArray:
    rank = suffix_ranks(text.symbols)
    return SuffixArray(order=inverse(rank), text_ref=text.ident)


def _pack_columns(cols: list, base: int) -> list:
    """Fold key columns into as few int64 columns as keeps order intact."""
    per = 1
    while base ** (per + 1) < 2**62:
        per += 1
    packed = []
    for start in range(0, len(cols), per):
        acc = np.zeros_like(cols[0])
        for col in cols[start : start + per]:
            acc = acc * base + (col + 1)
        # Pad short final chunks so all chunks weigh digits equally.
        acc = acc * base ** (per - len(cols[start : start + per]))
        packed.append(acc)
    return packed


def build_ssa(text: Text, seed: SpacedSeed, sa: Optional[SuffixArray] = None) -> SpacedSuffixArray:
    """Sort positions by ``(seed key, suffix)``.

    ``sa`` may be passed to avoid rebuilding the suffix array.
    """
    if sa is None:
        sa = build_sa(text)
    rank = inverse(sa.order)
    cols = key_columns(text, seed)
    packed = _pack_columns(cols, key_alphabet_size(text, seed) + 1)
    order = np.lexsort([rank] + packed[::-1])
    return SpacedSuffixArray(order=order.astype(np.int64), seed_ref=seed, text_ref=text.ident)


def inverse(perm) -> np.ndarray:
    """``result[perm[k]] = k``."""
    perm = np.asarray(getattr(perm, "order", perm), dtype=np.int64)
    out = np.empty_like(perm)
    out[perm] = np.arange(len(perm), dtype=np.int64)
    return out
