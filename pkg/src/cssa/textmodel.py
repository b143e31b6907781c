"""Texts, alphabets and spaced/subset seeds.

A seed is a string over ``1`` (characters must match), ``0`` (don't care)
and ``T`` (characters must fall in the same equivalence class).  For a text
position ``i`` the seed selects the *key* (the ``1``/``T`` positions of the
window starting at ``i``) and the *complement* (the ``0`` positions).  Keys
are what spaced suffix arrays sort by.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    AllDontCare,
    EmptySeed,
    IllegalDigit,
    MissingClassMap,
    PositionOutOfRange,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Text:
    """A text remapped onto the dense alphabet ``[0, sigma)``.

    ``raw_alphabet`` maps each input byte value to its code point; the map
    preserves byte order, so lexicographic order is unchanged by remapping.
    """

    symbols: np.ndarray
    sigma: int
    raw_alphabet: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise ValueError("text must be non-empty")
        if self.sigma < 1:
            raise ValueError("sigma must be at least 1")
        if int(self.symbols.max()) >= self.sigma or int(self.symbols.min()) < 0:
            raise ValueError("symbol outside [0, sigma)")
        self.symbols.setflags(write=False)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def n(self) -> int:
        return len(self.symbols)

    @property
    def ident(self) -> str:
        """Content hash, used to check that two arrays come from one text."""
        h = hashlib.sha1(self.symbols.astype(np.int32).tobytes())
        h.update(str(self.sigma).encode())
        return h.hexdigest()[:16]

    def code_of(self, raw: Union[str, int]) -> int:
        if isinstance(raw, str):
            raw = raw.encode("latin-1")[0]
        return self.raw_alphabet[raw]

    def decode(self) -> bytes:
        back = {v: k for k, v in self.raw_alphabet.items()}
        return bytes(back[int(c)] for c in self.symbols)

    @classmethod
    def from_bytes(cls, data: bytes, sentinel: Optional[Union[str, int]] = None) -> "Text":
        """Remap ``data`` to a dense alphabet.

        If ``sentinel`` is given it is appended and always receives code 0,
        i.e. it sorts before every other symbol.
        """
        raw = np.frombuffer(bytes(data), dtype=np.uint8)
        if sentinel is not None:
            if isinstance(sentinel, str):
                sentinel = sentinel.encode("latin-1")[0]
            if sentinel in set(raw.tolist()):
                raise ValueError(f"sentinel {chr(sentinel)!r} occurs in the text")
        present = np.unique(raw)
        alphabet = {}
        code = 0
        if sentinel is not None:
            alphabet[int(sentinel)] = 0
            code = 1
        for b in present.tolist():
            alphabet[int(b)] = code
            code += 1
        lut = np.zeros(256, dtype=np.int32)
        for b, c in alphabet.items():
            lut[b] = c
        symbols = lut[raw]
        if sentinel is not None:
            symbols = np.append(symbols, 0).astype(np.int32)
        if len(symbols) == 0:
            raise ValueError("text must be non-empty")
        return cls(symbols=symbols, sigma=len(alphabet), raw_alphabet=alphabet)

    @classmethod
    def from_string(cls, s: str, sentinel: Optional[str] = None) -> "Text":
        return cls.from_bytes(s.encode("latin-1"), sentinel=sentinel)


def strip_fasta(data: bytes) -> bytes:
    """Drop ``>`` header lines and all line breaks."""
    out = []
    for line in data.splitlines():
        if line.startswith(b">"):
            continue
        out.append(line.strip(b"\r\n"))
    return b"".join(out)


def load_text(path: Union[str, Path], fasta: bool = False, sentinel: Optional[str] = None) -> Text:
    data = Path(path).read_bytes()
    if fasta:
        data = strip_fasta(data)
    return Text.from_bytes(data, sentinel=sentinel)


class Digit(Enum):
    MATCH = "1"
    DONTCARE = "0"
    CLASS = "T"


@dataclass(frozen=True)
class SpacedSeed:
    digits: tuple
    class_map: Optional[Mapping[int, int]] = None

    @property
    def spec(self) -> str:
        return "".join(d.value for d in self.digits)

    @property
    def length(self) -> int:
        return len(self.digits)

    @property
    def weight(self) -> int:
        return sum(d is Digit.MATCH for d in self.digits)

    @property
    def n_class(self) -> int:
        return sum(d is Digit.CLASS for d in self.digits)

    @property
    def effective_weight(self) -> float:
        """MATCH digits plus half a unit per CLASS digit (reporting only)."""
        return self.weight + 0.5 * self.n_class

    @property
    def key_offsets(self) -> list:
        return [k for k, d in enumerate(self.digits) if d is not Digit.DONTCARE]

    @property
    def complement_offsets(self) -> list:
        return [k for k, d in enumerate(self.digits) if d is Digit.DONTCARE]

    @property
    def is_all_match(self) -> bool:
        return all(d is Digit.MATCH for d in self.digits)

    def n_classes(self) -> int:
        if not self.class_map:
            return 0
        return max(self.class_map.values()) + 1

    def check_alphabet(self, sigma: int) -> None:
        """Raise unless the class map (if needed) covers ``[0, sigma)``."""
        if self.n_class == 0:
            return
        missing = [c for c in range(sigma) if c not in self.class_map]
        if missing:
            raise MissingClassMap(f"class map does not cover code points {missing}")

    def __str__(self) -> str:
        return self.spec


def parse_seed(spec: str, class_map: Optional[Mapping[int, int]] = None) -> SpacedSeed:
    """Parse a seed such as ``"1101"`` or ``"1T01"``.

    Leading ``0`` digits are dropped so that every seed starts with a MATCH
    digit.  ``class_map`` maps code points to class ids and is required iff
    the seed contains a ``T``.
    """
    spec = spec.strip()
    if not spec:
        raise EmptySeed("empty seed")
    digits = []
    for ch in spec:
        try:
            digits.append(Digit(ch.upper()))
        except ValueError:
            raise IllegalDigit(f"illegal seed digit {ch!r} in {spec!r}") from None
    if not any(d is Digit.MATCH for d in digits):
        raise AllDontCare(f"seed {spec!r} has no match digit")
    lead = 0
    while digits[lead] is Digit.DONTCARE:
        lead += 1
    if lead:
        logger.warning("dropping %d leading don't-care digit(s) from %r", lead, spec)
        digits = digits[lead:]
    if digits[0] is not Digit.MATCH:
        raise IllegalDigit(f"seed {spec!r} must start with a match digit")
    has_class = any(d is Digit.CLASS for d in digits)
    if has_class and class_map is None:
        raise MissingClassMap(f"seed {spec!r} has class digits but no class map")
    cmap = dict(class_map) if (class_map is not None and has_class) else None
    return SpacedSeed(digits=tuple(digits), class_map=cmap)


def class_map_from_groups(text: Text, groups: Iterable[str]) -> dict:
    """Build a code-point class map from groups of raw characters.

    Characters in one group share a class; every code point not named in
    any group gets a singleton class, so the map is total over the text's
    alphabet.
    """
    cmap = {}
    cid = 0
    for group in groups:
        members = [c for c in group if c.encode("latin-1")[0] in text.raw_alphabet]
        if not members:
            continue
        for ch in members:
            cmap[text.code_of(ch)] = cid
        cid += 1
    for code in range(text.sigma):
        if code not in cmap:
            cmap[code] = cid
            cid += 1
    return cmap


def read_seed_file(path: Union[str, Path]) -> list:
    """Read seed lines as ``(spec, class_groups)`` pairs.

    Lines are ``SPEC [GROUP/GROUP/...]``; ``#`` starts a comment.
    """
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        groups = parts[1].split("/") if len(parts) > 1 else None
        out.append((parts[0], groups))
    return out


@dataclass(frozen=True)
class SeedKey:
    key_symbols: tuple
    complement_symbols: tuple


def _key_code(seed: SpacedSeed, digit: Digit, sym: int, sigma: int) -> int:
    if digit is Digit.CLASS:
        return sigma + seed.class_map[sym]
    return sym


def extract_key(text: Text, seed: SpacedSeed, i: int) -> SeedKey:
    """Return the key and complement of the window of ``seed`` at ``i``.

    CLASS digits contribute ``sigma + class_id`` so they never collide with
    raw code points.
    """
    n = len(text)
    if not 0 <= i < n:
        raise PositionOutOfRange(f"position {i} outside [0, {n})")
    key, comp = [], []
    syms = text.symbols
    for off, d in enumerate(seed.digits):
        j = i + off
        if j >= n:
            break
        s = int(syms[j])
        if d is Digit.DONTCARE:
            comp.append(s)
        else:
            key.append(_key_code(seed, d, s, text.sigma))
    return SeedKey(tuple(key), tuple(comp))


def key_columns(text: Text, seed: SpacedSeed) -> list:
    """Vectorised keys: one column per key digit, ``-1`` past the text end.

    Comparing rows of these columns lexicographically is the same as
    comparing :func:`extract_key` results, because missing digits are
    always trailing and ``-1`` is smaller than any code.
    """
    seed.check_alphabet(text.sigma)
    n = len(text)
    syms = np.asarray(text.symbols, dtype=np.int64)
    cols = []
    for off in seed.key_offsets:
        col = np.full(n, -1, dtype=np.int64)
        if off < n:
            part = syms[off:]
            if seed.digits[off] is Digit.CLASS:
                lut = np.array([text.sigma + seed.class_map[c] for c in range(text.sigma)], dtype=np.int64)
                part = lut[part]
            col[: n - off] = part
        cols.append(col)
    return cols


def key_alphabet_size(text: Text, seed: SpacedSeed) -> int:
    return text.sigma + seed.n_classes()
