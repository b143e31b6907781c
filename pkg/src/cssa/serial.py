"""Little-endian binary reader/writer and fixed-width integer packing."""

from __future__ import annotations

import struct

import numpy as np

from .errors import FormatError


def bits_for(n: int) -> int:
    """``ceil(lg n)``, with 0 for n <= 1."""
    return max(int(n) - 1, 0).bit_length()


def pack_uints(values, width: int) -> np.ndarray:
    """Pack non-negative ints into little-endian uint64 words, LSB first."""
    values = np.asarray(values, dtype=np.uint64)
    if width == 0 or len(values) == 0:
        return np.zeros(0, dtype=np.uint64)
    shifts = np.arange(width, dtype=np.uint64)
    bits = ((values[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()
    return bits_to_words(bits)


def unpack_uints(words: np.ndarray, width: int, count: int) -> np.ndarray:
    if width == 0 or count == 0:
        return np.zeros(count, dtype=np.int64)
    bits = words_to_bits(words, width * count).reshape(count, width).astype(np.uint64)
    weights = np.uint64(1) << np.arange(width, dtype=np.uint64)
    return (bits * weights).sum(axis=1).astype(np.int64)


def bits_to_words(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    raw = np.packbits(bits, bitorder="little")
    pad = (-len(raw)) % 8
    if pad:
        raw = np.concatenate([raw, np.zeros(pad, dtype=np.uint8)])
    return raw.view("<u8").astype(np.uint64)


def words_to_bits(words: np.ndarray, n: int) -> np.ndarray:
    raw = np.asarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n]


class Writer:
    def __init__(self):
        self._parts: list = []

    def u64(self, x: int) -> None:
        self._parts.append(struct.pack("<Q", int(x)))

    def raw(self, b: bytes) -> None:
        self._parts.append(bytes(b))

    def words(self, arr) -> None:
        arr = np.asarray(arr, dtype="<u8")
        self.u64(len(arr))
        self._parts.append(arr.tobytes())

    def string(self, s: str) -> None:
        b = s.encode("utf-8")
        self.u64(len(b))
        self._parts.append(b)

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, buf: bytes, pos: int = 0):
        self.buf = memoryview(buf)
        self.pos = pos

    def _take(self, k: int) -> memoryview:
        if self.pos + k > len(self.buf):
            raise FormatError("truncated input")
        out = self.buf[self.pos : self.pos + k]
        self.pos += k
        return out

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def raw(self, k: int) -> bytes:
        return bytes(self._take(k))

    def expect(self, magic: bytes) -> None:
        got = self.raw(len(magic))
        if got != magic:
            raise FormatError(f"bad magic {got!r}, expected {magic!r}")

    def words(self) -> np.ndarray:
        k = self.u64()
        return np.frombuffer(self._take(8 * k), dtype="<u8").astype(np.uint64)

    def string(self) -> str:
        k = self.u64()
        return bytes(self._take(k)).decode("utf-8")

    def at_end(self) -> bool:
        return self.pos == len(self.buf)
