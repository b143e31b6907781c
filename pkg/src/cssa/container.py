"""On-disk container for suffix arrays, compressed SSAs and relative SAs.

Layout (all integers little-endian u64, strings length-prefixed UTF-8)::

    "CSSAColl\\x01"  n  sigma  entry_count
    entry*           kind  name  body
    tree_count       (child, parent)*

Entry bodies by kind:

* ``RAW``    -- bit width, then the permutation packed at that width
* ``SSA``    -- base name, seed spec, class map pairs, relative permutation
* ``RELDOC`` -- reference entry name, reference handle, reference R and R',
  relative permutation
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from .errors import DanglingReference, FormatError, IndexOutOfRange, UnknownEntry
from .relative_index import ROOT, CompressedSSA, RelativeDocumentSA, ReferenceTree, SeedCollection, _depths
from .relperm import ReferenceBundle, RelativePermutation
from .serial import Reader, Writer, bits_for, pack_uints, unpack_uints
from .succinct import LabeledSequence
from .suffixes import SuffixArray
from .textmodel import parse_seed

MAGIC = b"CSSAColl\x01"


class Kind(IntEnum):
    RAW = 0
    SSA = 1
    RELDOC = 2


@dataclass
class Container:
    n: int
    sigma: int = 0
    raw: Dict[str, np.ndarray] = field(default_factory=dict)
    ssas: Dict[str, CompressedSSA] = field(default_factory=dict)
    docs: Dict[str, RelativeDocumentSA] = field(default_factory=dict)
    doc_refs: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_collection(cls, coll: SeedCollection, sigma: int = 0) -> "Container":
        return cls(n=coll.n, sigma=sigma, raw={ROOT: np.asarray(coll.sa.order)}, ssas=dict(coll.entries))

    def collection(self) -> SeedCollection:
        if ROOT not in self.raw:
            raise UnknownEntry("container holds no suffix array")
        return SeedCollection(SuffixArray(self.raw[ROOT]), self.ssas)

    def names(self) -> list:
        return list(self.raw) + list(self.ssas) + list(self.docs)

    def lookup(self, name: str):
        for table in (self.raw, self.ssas, self.docs):
            if name in table:
                return table[name]
        raise UnknownEntry(f"no entry named {name!r}")

    def access(self, name: str, i: int) -> int:
        obj = self.lookup(name)
        if isinstance(obj, np.ndarray):
            if not 0 <= i < len(obj):
                raise IndexOutOfRange(f"index {i} outside [0, {len(obj)})")
            return int(obj[i])
        return obj.access(i)

    def length(self, name: str) -> int:
        return len(self.lookup(name))

    def tree(self) -> ReferenceTree:
        parent = {k: e.base for k, e in self.ssas.items()}
        return ReferenceTree(parent, _depths(parent, ROOT), 0.0)

    # -- serialization ---------------------------------------------------

    def to_bytes(self) -> bytes:
        w = Writer()
        w.raw(MAGIC)
        w.u64(self.n)
        w.u64(self.sigma)
        w.u64(len(self.raw) + len(self.ssas) + len(self.docs))
        for name, perm in self.raw.items():
            w.u64(Kind.RAW)
            w.string(name)
            width = bits_for(len(perm))
            w.u64(len(perm))
            w.u64(width)
            w.words(pack_uints(perm, width))
        for name, e in self.ssas.items():
            w.u64(Kind.SSA)
            w.string(name)
            w.string(e.base)
            seed = e.seed_ref
            w.string(seed.spec if seed is not None else "")
            cmap = sorted((seed.class_map or {}).items()) if seed is not None else []
            w.u64(len(cmap))
            for code, cls_id in cmap:
                w.u64(code)
                w.u64(cls_id)
            e.rel.write(w)
        for name, d in self.docs.items():
            w.u64(Kind.RELDOC)
            w.string(name)
            w.string(self.doc_refs.get(name, d.reference.name))
            w.string(d.reference.name)
            d.reference.R.write(w)
            d.reference.Rprime.write(w)
            d.target_rel.write(w)
        tree = {k: e.base for k, e in self.ssas.items()}
        w.u64(len(tree))
        for child, parent in tree.items():
            w.string(child)
            w.string(parent)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, buf: bytes) -> "Container":
        r = Reader(buf)
        r.expect(MAGIC)
        n, sigma, count = r.u64(), r.u64(), r.u64()
        self = cls(n=n, sigma=sigma)
        for _ in range(count):
            kind = r.u64()
            name = r.string()
            if kind == Kind.RAW:
                length, width = r.u64(), r.u64()
                self.raw[name] = unpack_uints(r.words(), width, length)
            elif kind == Kind.SSA:
                base = r.string()
                spec = r.string()
                cmap = {}
                for _ in range(r.u64()):
                    code = r.u64()
                    cmap[code] = r.u64()
                seed = parse_seed(spec, cmap or None) if spec else None
                rel = RelativePermutation.read(r)
                self.ssas[name] = CompressedSSA(rel, base=base, seed=seed, name=name)
            elif kind == Kind.RELDOC:
                ref_name = r.string()
                handle = r.string()
                if ref_name not in self.raw:
                    raise DanglingReference(f"document {name!r} references unknown {ref_name!r}")
                R = LabeledSequence.read(r)
                Rp = LabeledSequence.read(r)
                bundle = ReferenceBundle(handle, self.raw[ref_name], R, Rp)
                rel = RelativePermutation.read(r, resolve=lambda handle, b=bundle: _resolve(handle, b))
                self.docs[name] = RelativeDocumentSA(bundle, rel)
                self.doc_refs[name] = ref_name
            else:
                raise FormatError(f"unknown entry kind {kind}")
        tree = {}
        for _ in range(r.u64()):
            child = r.string()
            tree[child] = r.string()
        if not r.at_end():
            raise FormatError("trailing bytes after container")
        for k, e in self.ssas.items():
            if tree.get(k) != e.base:
                raise FormatError(f"tree disagrees with entry {k!r}")
            if e.base == ROOT:
                e.base_link = self.raw.get(ROOT)
            elif e.base in self.ssas:
                e.base_link = self.ssas[e.base]
            else:
                raise DanglingReference(f"{k!r} references unknown base {e.base!r}")
            if e.base_link is None:
                raise DanglingReference(f"{k!r} references missing {ROOT!r}")
        return self


def _resolve(handle: str, bundle: ReferenceBundle) -> ReferenceBundle:
    if handle != bundle.name:
        raise DanglingReference(f"unknown reference handle {handle!r}")
    return bundle


def write_container(path: Union[str, Path], container: Container) -> None:
    Path(path).write_bytes(container.to_bytes())


def read_container(path: Union[str, Path]) -> Container:
    return Container.from_bytes(Path(path).read_bytes())
