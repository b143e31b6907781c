"""Rank/select bitvectors and labeled sequences (wavelet matrix).

``RsBitvector`` keeps a two-level rank directory: an absolute count every
2048 bits and a 16-bit relative count every 256 bits.  Counts that are
always zero (the first superblock, the first block of each superblock)
are not stored and not charged.  Select binary-searches the directory and
then scans at most four words.

``LabeledSequence`` stores a string over ``[0, rho)`` as ``ceil(lg rho)``
bitvector levels of a wavelet matrix, giving access, partial rank and
select in O(lg rho) bitvector operations.
"""

from __future__ import annotations

from bisect import bisect_left
from typing import NamedTuple

import numpy as np

from .errors import (
    FormatError,
    IndexOutOfRange,
    LabelOutOfRange,
    SelectOverflow,
    UnknownLabel,
)
from .serial import Reader, Writer, bits_for, bits_to_words, pack_uints, unpack_uints

SUPERBLOCK_BITS = 2048
BLOCK_BITS = 256
WORDS_PER_BLOCK = BLOCK_BITS // 64
BLOCKS_PER_SUPER = SUPERBLOCK_BITS // BLOCK_BITS

MAGIC = b"CSSA\x01"


class SizeBits(NamedTuple):
    payload: int
    overhead: int

    @property
    def total(self) -> int:
        return self.payload + self.overhead

    def __add__(self, other):
        return SizeBits(self.payload + other.payload, self.overhead + other.overhead)


def _directory_bits(n: int) -> int:
    nsb = -(-n // SUPERBLOCK_BITS)
    nblk = -(-n // BLOCK_BITS)
    if n == 0:
        return 0
    return 64 * (nsb - 1) + 16 * (nblk - nsb)


class RsBitvector:
    """Static bitvector with inclusive rank and 1-indexed select."""

    def __init__(self, bits=None, *, _words=None, _n=None):
        if _words is not None:
            self.n = int(_n)
            words = np.asarray(_words, dtype=np.uint64)
        else:
            bits = np.asarray(bits, dtype=np.uint8)
            self.n = len(bits)
            words = bits_to_words(bits)
        nblk = -(-self.n // BLOCK_BITS)
        need = nblk * WORDS_PER_BLOCK
        if len(words) < need:
            words = np.concatenate([words, np.zeros(need - len(words), dtype=np.uint64)])
        self.words = words
        self._build_directory()

    def _build_directory(self) -> None:
        nblk = -(-self.n // BLOCK_BITS)
        pc = np.bitwise_count(self.words[: nblk * WORDS_PER_BLOCK]).astype(np.int64)
        per_block = pc.reshape(nblk, WORDS_PER_BLOCK).sum(axis=1) if nblk else pc
        before_block = np.concatenate(([0], np.cumsum(per_block)))[:nblk]
        sb_of_block = np.arange(nblk) // BLOCKS_PER_SUPER
        supers = before_block[::BLOCKS_PER_SUPER]
        self._super = supers.tolist()
        self._block = (before_block - supers[sb_of_block]).tolist() if nblk else []
        self._words = self.words.tolist()
        self.ones = int(per_block.sum()) if nblk else 0

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"bit {i} outside [0, {self.n})")
        return (self._words[i >> 6] >> (i & 63)) & 1

    def _rank(self, i: int) -> int:
        """Ones in ``bits[0:i]`` (exclusive end); ``0 <= i <= n``."""
        if i >= self.n:
            return self.ones
        b = i >> 8
        r = self._super[i >> 11] + self._block[b]
        w = i >> 6
        words = self._words
        for k in range(b * WORDS_PER_BLOCK, w):
            r += words[k].bit_count()
        return r + (words[w] & ((1 << (i & 63)) - 1)).bit_count()

    def rank1(self, i: int) -> int:
        """Ones in ``bits[0..i]``, inclusive."""
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"rank position {i} outside [0, {self.n})")
        return self._rank(i + 1)

    def rank0(self, i: int) -> int:
        return i + 1 - self.rank1(i)

    @staticmethod
    def _nth_set(word: int, k: int) -> int:
        """Bit index of the k-th (1-indexed) set bit of ``word``."""
        for _ in range(k - 1):
            word &= word - 1
        return (word & -word).bit_length() - 1

    def select1(self, k: int) -> int:
        """Position of the k-th 1, k counted from 1."""
        if not 1 <= k <= self.ones:
            raise SelectOverflow(f"select1({k}) with {self.ones} ones")
        s = bisect_left(self._super, k) - 1
        base = self._super[s]
        lo = s * BLOCKS_PER_SUPER
        hi = min(lo + BLOCKS_PER_SUPER, len(self._block))
        b = bisect_left(self._block, k - base, lo, hi) - 1
        k -= base + self._block[b]
        words = self._words
        w = b * WORDS_PER_BLOCK
        while True:
            c = words[w].bit_count()
            if c >= k:
                return (w << 6) + self._nth_set(words[w], k)
            k -= c
            w += 1

    def select0(self, k: int) -> int:
        """Position of the k-th 0, k counted from 1."""
        zeros = self.n - self.ones
        if not 1 <= k <= zeros:
            raise SelectOverflow(f"select0({k}) with {zeros} zeros")
        sup = self._super
        lo, hi = 0, len(sup)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if mid * SUPERBLOCK_BITS - sup[mid] < k:
                lo = mid
            else:
                hi = mid
        s = lo
        k -= s * SUPERBLOCK_BITS - sup[s]
        b = s * BLOCKS_PER_SUPER
        last = min(b + BLOCKS_PER_SUPER, len(self._block)) - 1
        while b < last and (b + 1 - s * BLOCKS_PER_SUPER) * BLOCK_BITS - self._block[b + 1] < k:
            b += 1
        k -= (b - s * BLOCKS_PER_SUPER) * BLOCK_BITS - self._block[b]
        words = self._words
        w = b * WORDS_PER_BLOCK
        mask = (1 << 64) - 1
        while True:
            inv = ~words[w] & mask
            c = inv.bit_count()
            if c >= k:
                return (w << 6) + self._nth_set(inv, k)
            k -= c
            w += 1

    def to_bits(self) -> np.ndarray:
        from .serial import words_to_bits

        return words_to_bits(self.words, self.n)

    def size_bits(self) -> SizeBits:
        return SizeBits(self.n, _directory_bits(self.n))

    # -- serialization ---------------------------------------------------

    def _stored_directory(self):
        supers = self._super[1:]
        blocks = [c for b, c in enumerate(self._block) if b % BLOCKS_PER_SUPER]
        return supers, blocks

    def write(self, w: Writer) -> None:
        w.u64(self.n)
        w.words(self.words[: -(-self.n // 64)])
        supers, blocks = self._stored_directory()
        w.words(np.asarray(supers, dtype=np.uint64))
        w.u64(len(blocks))
        w.words(pack_uints(blocks, 16))

    @classmethod
    def read(cls, r: Reader) -> "RsBitvector":
        n = r.u64()
        words = r.words()
        supers = r.words()
        nblocks = r.u64()
        blocks = unpack_uints(r.words(), 16, nblocks)
        bv = cls(_words=words, _n=n)
        got_s, got_b = bv._stored_directory()
        if list(supers.tolist()) != got_s or list(blocks.tolist()) != got_b:
            raise FormatError("rank directory does not match bit payload")
        return bv


class LabeledSequence:
    """Sequence over ``[0, rho)`` with access, partial rank and select.

    Stored as a wavelet matrix: level ``l`` holds bit ``L-1-l`` of every
    label, in the order produced by stably partitioning on the previous
    levels' bits.
    """

    def __init__(self, labels, rho: int = None):
        labels = np.asarray(labels, dtype=np.int64)
        if rho is None:
            rho = int(labels.max()) + 1 if len(labels) else 1
        if rho < 1:
            raise LabelOutOfRange("rho must be at least 1")
        if len(labels) and (labels.min() < 0 or labels.max() >= rho):
            raise LabelOutOfRange(f"label outside [0, {rho})")
        self.n = len(labels)
        self.rho = int(rho)
        self.n_levels = bits_for(self.rho)
        levels = []
        cur = labels
        for lv in range(self.n_levels):
            bit = (cur >> (self.n_levels - 1 - lv)) & 1
            levels.append(RsBitvector(bit))
            cur = np.concatenate([cur[bit == 0], cur[bit == 1]])
        self._set_levels(levels)

    def _set_levels(self, levels) -> None:
        self.levels = levels
        self.zeros = [lv.n - lv.ones for lv in levels]
        self._counts = None

    @classmethod
    def _from_levels(cls, n: int, rho: int, levels) -> "LabeledSequence":
        self = cls.__new__(cls)
        self.n, self.rho, self.n_levels = n, rho, len(levels)
        self._set_levels(levels)
        return self

    def __len__(self) -> int:
        return self.n

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"index {i} outside [0, {self.n})")

    def _check_label(self, c: int) -> None:
        if not 0 <= c < self.rho:
            raise UnknownLabel(f"label {c} outside [0, {self.rho})")

    def access(self, i: int) -> int:
        self._check_index(i)
        c = 0
        for lv, bv in enumerate(self.levels):
            ones_before = bv._rank(i)
            if (bv._words[i >> 6] >> (i & 63)) & 1:
                c = (c << 1) | 1
                i = self.zeros[lv] + ones_before
            else:
                c <<= 1
                i -= ones_before
        return c

    def rank(self, c: int, i: int) -> int:
        """Occurrences of ``c`` in ``labels[0:i]`` (exclusive end)."""
        self._check_label(c)
        s, e = 0, i
        for lv, bv in enumerate(self.levels):
            if (c >> (self.n_levels - 1 - lv)) & 1:
                s = self.zeros[lv] + bv._rank(s)
                e = self.zeros[lv] + bv._rank(e)
            else:
                s -= bv._rank(s)
                e -= bv._rank(e)
        return e - s

    def count(self, c: int) -> int:
        return self.rank(c, self.n)

    def prank(self, i: int) -> int:
        """Occurrences of ``labels[i]`` in ``labels[0..i]``, inclusive."""
        self._check_index(i)
        return self.rank(self.access(i), i + 1)

    def select(self, c: int, k: int) -> int:
        """Position of the k-th occurrence of ``c`` (k counted from 1)."""
        self._check_label(c)
        L = self.n_levels
        s = 0
        for lv, bv in enumerate(self.levels):
            if (c >> (L - 1 - lv)) & 1:
                s = self.zeros[lv] + bv._rank(s)
            else:
                s -= bv._rank(s)
        total = self.rank(c, self.n)
        if not 1 <= k <= total:
            raise SelectOverflow(f"select({c}, {k}) with {total} occurrences")
        pos = s + k - 1
        for lv in range(L - 1, -1, -1):
            bv = self.levels[lv]
            if (c >> (L - 1 - lv)) & 1:
                pos = bv.select1(pos - self.zeros[lv] + 1)
            else:
                pos = bv.select0(pos + 1)
        return pos

    def to_list(self) -> list:
        return self.to_array().tolist()

    def to_array(self) -> np.ndarray:
        """All labels at once, level by level in numpy."""
        pos = np.arange(self.n, dtype=np.int64)
        out = np.zeros(self.n, dtype=np.int64)
        for lv, bv in enumerate(self.levels):
            bits = bv.to_bits().astype(np.int64)
            ones_before = np.concatenate(([0], np.cumsum(bits)))[:-1]
            b = bits[pos]
            r1 = ones_before[pos]
            pos = np.where(b == 1, self.zeros[lv] + r1, pos - r1)
            out = (out << 1) | b
        return out

    def size_bits(self) -> SizeBits:
        out = SizeBits(0, 0)
        for bv in self.levels:
            out = out + bv.size_bits()
        return out

    def write(self, w: Writer) -> None:
        w.raw(MAGIC)
        w.u64(self.n)
        w.u64(self.rho)
        w.u64(self.n_levels)
        for bv in self.levels:
            w.u64(bv.n)
            w.words(bv.words[: -(-bv.n // 64)])
        for bv in self.levels:
            supers, blocks = bv._stored_directory()
            w.words(np.asarray(supers, dtype=np.uint64))
            w.u64(len(blocks))
            w.words(pack_uints(blocks, 16))

    @classmethod
    def read(cls, r: Reader) -> "LabeledSequence":
        r.expect(MAGIC)
        n, rho, n_levels = r.u64(), r.u64(), r.u64()
        if n_levels != bits_for(rho):
            raise FormatError("level count inconsistent with rho")
        levels = []
        for _ in range(n_levels):
            ln = r.u64()
            if ln != n:
                raise FormatError("level length differs from sequence length")
            levels.append(RsBitvector(_words=r.words(), _n=ln))
        for bv in levels:
            supers = r.words().tolist()
            nblocks = r.u64()
            blocks = unpack_uints(r.words(), 16, nblocks).tolist()
            if (supers, blocks) != tuple(map(list, bv._stored_directory())):
                raise FormatError("rank directory does not match bit payload")
        return cls._from_levels(n, rho, levels)

    def to_bytes(self) -> bytes:
        w = Writer()
        self.write(w)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, buf: bytes) -> "LabeledSequence":
        return cls.read(Reader(buf))


def build_labeled(labels, rho: int = None) -> LabeledSequence:
    return LabeledSequence(labels, rho)


def access(seq: LabeledSequence, i: int) -> int:
    return seq.access(i)


def prank(seq: LabeledSequence, i: int) -> int:
    return seq.prank(i)


def select(seq: LabeledSequence, c: int, k: int) -> int:
    return seq.select(c, k)


def size_bits(seq: LabeledSequence) -> SizeBits:
    return seq.size_bits()
