"""Store a permutation relative to a partition of it into subsequences.

Given ``pi`` split into subsequences ``tau_0 .. tau_{rho-1}``:

* ``R[i]`` is the subsequence holding position ``i`` (indexed by position),
* ``R'[v]`` is the subsequence holding value ``v`` (indexed by value),
* ``pi_j[k]`` is the rank of ``tau_j[k]`` among the elements of ``tau_j``.

Then ``pi[i] = R'.select_j(pi_j[R.prank(i) - 1] + 1)`` with ``j = R[i]``.
Each ``pi_j`` is stored in one of three ways: implicitly (the subsequence
is increasing, so ``pi_j`` is the identity), explicitly as a packed array,
or by pointing at a subsequence of a stored reference permutation that has
the same relative order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import (
    DanglingReference,
    FormatError,
    IncompleteCover,
    IndexOutOfRange,
    NotIncreasing,
    ReferenceMismatch,
    UnknownLabel,
)
from .serial import Reader, Writer, bits_for, pack_uints, unpack_uints
from .succinct import LabeledSequence, SizeBits


class Mode(Enum):
    IDENTITY = 0
    EXPLICIT = 1
    REFERENCE = 2


def local_ranks(values) -> np.ndarray:
    """Rank of each value among ``values`` (0 = smallest)."""
    values = np.asarray(values)
    out = np.empty(len(values), dtype=np.int64)
    out[np.argsort(values, kind="stable")] = np.arange(len(values))
    return out


class ReferenceBundle:
    """A stored permutation together with its own ``R`` and ``R'``.

    Sub-permutations of the reference are computed on demand, so a target
    can borrow them without materialising anything.
    """

    def __init__(self, name: str, perm, R: LabeledSequence, Rprime: LabeledSequence):
        self.name = name
        self.perm = np.asarray(perm, dtype=np.int64)
        self._perm = self.perm.tolist()
        self.R = R
        self.Rprime = Rprime

    @classmethod
    def build(cls, name: str, perm, labels) -> "ReferenceBundle":
        perm = np.asarray(perm, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        rho = int(labels.max()) + 1 if len(labels) else 1
        by_value = np.empty_like(labels)
        by_value[perm] = labels
        return cls(name, perm, LabeledSequence(labels, rho), LabeledSequence(by_value, rho))

    @property
    def rho(self) -> int:
        return self.R.rho

    def size(self, j: int) -> int:
        return self.R.count(j)

    def subperm(self, j: int, i: int) -> int:
        """``pi_j[i] = R'.prank(pi[R.select_j(i + 1)]) - 1``."""
        if not 0 <= j < self.R.rho:
            raise UnknownLabel(f"label {j} outside [0, {self.R.rho})")
        if not 0 <= i < self.size(j):
            raise IndexOutOfRange(f"index {i} outside subsequence {j} of size {self.size(j)}")
        return self.Rprime.prank(self._perm[self.R.select(j, i + 1)]) - 1

    def sub_permutation(self, j: int) -> np.ndarray:
        """Materialised ``pi_j`` computed directly from the partition."""
        labels = self.R.to_array()
        return local_ranks(self.perm[labels == j])

    def size_bits(self) -> SizeBits:
        return self.R.size_bits() + self.Rprime.size_bits()


def subperm_via_reference(ref: ReferenceBundle, j: int, i: int) -> int:
    return ref.subperm(j, i)


@dataclass
class ReferenceLink:
    """Borrow ``pi_j`` from subsequence ``label`` of a reference bundle."""

    name: str
    label: int
    ref: Optional[ReferenceBundle] = field(default=None, repr=False)

    @classmethod
    def to(cls, ref: ReferenceBundle, label: int) -> "ReferenceLink":
        return cls(ref.name, label, ref)

    def resolved(self) -> ReferenceBundle:
        if self.ref is None:
            raise DanglingReference(f"reference {self.name!r} is not resolved")
        return self.ref


ModeSpec = Union[Mode, ReferenceLink]


@dataclass(frozen=True)
class SizeReport:
    payload_bits: int
    overhead_bits: int
    explicit_bits: int
    n: int

    @property
    def total_bits(self) -> int:
        return self.payload_bits + self.overhead_bits

    @property
    def bpc(self) -> float:
        return self.total_bits / self.n if self.n else 0.0

    @property
    def payload_bpc(self) -> float:
        return self.payload_bits / self.n if self.n else 0.0

    @property
    def overhead_bpc(self) -> float:
        return self.overhead_bits / self.n if self.n else 0.0


class RelativePermutation:
    def __init__(self, n: int, R: LabeledSequence, Rprime: LabeledSequence, subperms: list):
        self.n = n
        self.R = R
        self.Rprime = Rprime
        self.subperms = subperms

    @property
    def rho(self) -> int:
        return self.R.rho

    def modes(self) -> list:
        out = []
        for s in self.subperms:
            if s is Mode.IDENTITY:
                out.append(Mode.IDENTITY)
            elif isinstance(s, ReferenceLink):
                out.append(Mode.REFERENCE)
            else:
                out.append(Mode.EXPLICIT)
        return out

    def subperm_value(self, j: int, k: int) -> int:
        s = self.subperms[j]
        if s is Mode.IDENTITY:
            return k
        if isinstance(s, ReferenceLink):
            return s.resolved().subperm(s.label, k)
        return s[k]

    def access(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"index {i} outside [0, {self.n})")
        j = self.R.access(i)
        k = self.R.rank(j, i + 1)
        return self.Rprime.select(j, self.subperm_value(j, k - 1) + 1)

    def __getitem__(self, i: int) -> int:
        return self.access(i)

    def __len__(self) -> int:
        return self.n

    def decode(self) -> np.ndarray:
        """Whole permutation, reconstructed in bulk from the label strings."""
        labels = self.R.to_array()
        by_value = self.Rprime.to_array()
        out = np.empty(self.n, dtype=np.int64)
        for j, s in enumerate(self.subperms):
            positions = np.flatnonzero(labels == j)
            values = np.flatnonzero(by_value == j)
            if s is Mode.IDENTITY:
                out[positions] = values
            elif isinstance(s, ReferenceLink):
                out[positions] = values[s.resolved().sub_permutation(s.label)]
            else:
                out[positions] = values[np.asarray(s, dtype=np.int64)]
        return out

    def explicit_entries(self) -> int:
        return sum(len(s) for s in self.subperms if isinstance(s, list))

    def size_report(self) -> SizeReport:
        explicit = sum(len(s) * bits_for(len(s)) for s in self.subperms if isinstance(s, list))
        seq = self.R.size_bits() + self.Rprime.size_bits()
        return SizeReport(seq.payload + explicit, seq.overhead, explicit, self.n)

    # -- serialization ---------------------------------------------------

    def write(self, w: Writer) -> None:
        w.u64(self.n)
        self.R.write(w)
        self.Rprime.write(w)
        for s in self.subperms:
            if s is Mode.IDENTITY:
                w.u64(Mode.IDENTITY.value)
            elif isinstance(s, ReferenceLink):
                w.u64(Mode.REFERENCE.value)
                w.string(s.name)
                w.u64(s.label)
            else:
                w.u64(Mode.EXPLICIT.value)
                w.u64(len(s))
                w.words(pack_uints(s, bits_for(len(s))))

    @classmethod
    def read(cls, r: Reader, resolve: Optional[Callable[[str], ReferenceBundle]] = None) -> "RelativePermutation":
        n = r.u64()
        R = LabeledSequence.read(r)
        Rprime = LabeledSequence.read(r)
        subperms = []
        for _ in range(R.rho):
            tag = r.u64()
            if tag == Mode.IDENTITY.value:
                subperms.append(Mode.IDENTITY)
            elif tag == Mode.REFERENCE.value:
                name, label = r.string(), r.u64()
                subperms.append(ReferenceLink(name, label, resolve(name) if resolve else None))
            elif tag == Mode.EXPLICIT.value:
                m = r.u64()
                subperms.append(unpack_uints(r.words(), bits_for(m), m).tolist())
            else:
                raise FormatError(f"unknown sub-permutation tag {tag}")
        return cls(n, R, Rprime, subperms)


def encode(pi, labels, modes: Union[ModeSpec, Sequence[ModeSpec]] = Mode.IDENTITY) -> RelativePermutation:
    """Encode ``pi`` against the partition given by ``labels`` (one id per position).

    ``modes`` is one mode for all subsequences or a list indexed by id.
    Every id in ``[0, rho)`` must label at least one position; ``-1``
    marks an unassigned position and is rejected.
    """
    pi = np.asarray(getattr(pi, "order", pi), dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    n = len(pi)
    if len(labels) != n:
        raise IncompleteCover(f"{len(labels)} labels for {n} positions")
    if n and labels.min() < 0:
        raise IncompleteCover(f"{int((labels < 0).sum())} positions unassigned")
    rho = int(labels.max()) + 1 if n else 1
    counts = np.bincount(labels, minlength=rho) if n else np.zeros(1, dtype=np.int64)
    if n and (counts == 0).any():
        raise IncompleteCover(f"empty subsequence ids {np.flatnonzero(counts == 0).tolist()}")
    if isinstance(modes, (Mode, ReferenceLink)):
        modes = [modes] * rho
    if len(modes) != rho:
        raise ValueError(f"{len(modes)} modes for {rho} subsequences")

    by_value = np.empty(n, dtype=np.int64)
    by_value[pi] = labels
    subperms = []
    for j, mode in enumerate(modes):
        tau = pi[labels == j]
        if mode is Mode.IDENTITY:
            if np.any(np.diff(tau) <= 0):
                raise NotIncreasing(f"subsequence {j} is not increasing")
            subperms.append(Mode.IDENTITY)
        elif mode is Mode.EXPLICIT:
            subperms.append(local_ranks(tau).tolist())
        elif isinstance(mode, ReferenceLink):
            ref = mode.resolved()
            if not 0 <= mode.label < ref.rho:
                raise ReferenceMismatch(f"reference has no subsequence {mode.label}")
            theirs = ref.sub_permutation(mode.label)
            if len(theirs) != len(tau) or np.any(theirs != local_ranks(tau)):
                raise ReferenceMismatch(
                    f"subsequence {j} does not share its relative order with {ref.name}:{mode.label}"
                )
            subperms.append(mode)
        else:
            raise ValueError(f"bad mode {mode!r}")
    return RelativePermutation(n, LabeledSequence(labels, rho), LabeledSequence(by_value, rho), subperms)


def access(rp: RelativePermutation, i: int) -> int:
    return rp.access(i)


def size_report(rp: RelativePermutation) -> SizeReport:
    return rp.size_report()
