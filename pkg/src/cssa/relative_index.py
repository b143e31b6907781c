"""Compressed spaced suffix arrays and relative document suffix arrays.

An SSA is stored as ``base^-1 o SSA`` encoded with increasing-subsequence
labels, where ``base`` is the suffix array or another (compressed) SSA.
Random access is ``base[rel.access(i)]``, so chains of references cost one
extra relative lookup per hop.

Collections choose, for every SSA, which stored permutation to compress
against by building a minimum spanning arborescence rooted at the SA over
pairwise encoding costs.
"""

from __future__ import annotations

import difflib
import itertools
import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import (
    DanglingReference,
    IncompleteCosts,
    IndexOutOfRange,
    LengthMismatch,
    NonMonotoneMatching,
    OrderMismatch,
    TextMismatch,
    UnknownEntry,
)
from .permutations import compose, lis_indices, partition_increasing
from .relperm import Mode, ReferenceBundle, ReferenceLink, RelativePermutation, encode, local_ranks
from .serial import bits_for
from .succinct import _directory_bits
from .suffixes import SpacedSuffixArray, SuffixArray, build_sa, build_ssa, inverse
from .textmodel import SpacedSeed, Text

logger = logging.getLogger(__name__)

ROOT = "SA"
DEFAULT_MAX_DEPTH = 4


def rho_bound(sigma: int, seed: SpacedSeed) -> int:
    """``min(sigma^w + w, sigma^(l-w) + l - w)`` with ``w`` = MATCH digits."""
    w, l = seed.weight, seed.length
    return min(sigma**w + w, sigma ** (l - w) + l - w)


class CompressedSSA:
    """A permutation stored relative to a base permutation.

    ``base`` is the name of the base; ``base_link`` is the resolved object
    (a numpy array for the SA, or another ``CompressedSSA``).
    """

    def __init__(self, rel: RelativePermutation, base: str = ROOT, seed: Optional[SpacedSeed] = None,
                 name: str = "", base_link=None):
        self.rel = rel
        self.base = base
        self.seed_ref = seed
        self.name = name
        self.base_link = base_link

    @property
    def rho(self) -> int:
        return self.rel.rho

    @property
    def n(self) -> int:
        return self.rel.n

    def __len__(self) -> int:
        return self.rel.n

    def _base(self):
        if self.base_link is None:
            raise DanglingReference(f"base {self.base!r} of {self.name!r} is not resolved")
        return self.base_link

    @property
    def is_alias(self) -> bool:
        """True when the entry equals its base (rho = 1, nothing stored)."""
        return self.rel.rho == 1 and self.rel.subperms == [Mode.IDENTITY]

    def access(self, i: int) -> int:
        if not 0 <= i < self.rel.n:
            raise IndexOutOfRange(f"index {i} outside [0, {self.rel.n})")
        if self.is_alias:
            return int(self._base()[i])
        return int(self._base()[self.rel.access(i)])

    __getitem__ = access

    @property
    def depth(self) -> int:
        """Reference hops to the SA."""
        base = self._base()
        return 1 + base.depth if isinstance(base, CompressedSSA) else 1

    @property
    def hops(self) -> int:
        """Non-trivial relative lookups per access (aliases cost nothing)."""
        base = self._base()
        own = 0 if self.is_alias else 1
        return own + (base.hops if isinstance(base, CompressedSSA) else 0)

    def decode(self) -> np.ndarray:
        base = self._base()
        base_arr = base.decode() if isinstance(base, CompressedSSA) else np.asarray(base)
        return base_arr[self.rel.decode()]

    def size_report(self):
        return self.rel.size_report()


def compress_relative(base, target, base_name: str = ROOT, seed: Optional[SpacedSeed] = None,
                      name: str = "", base_link=None) -> CompressedSSA:
    """Encode ``target`` as ``base^-1 o target`` with an increasing partition."""
    base_arr = np.asarray(getattr(base, "order", base), dtype=np.int64)
    target_arr = np.asarray(getattr(target, "order", target), dtype=np.int64)
    if len(base_arr) != len(target_arr):
        raise LengthMismatch(f"lengths differ: {len(base_arr)} vs {len(target_arr)}")
    rel_perm = compose(inverse(base_arr), target_arr)
    part = partition_increasing(rel_perm)
    rel = encode(rel_perm, part.label_of_position, Mode.IDENTITY)
    link = base_link if base_link is not None else base_arr
    return CompressedSSA(rel, base=base_name, seed=seed, name=name, base_link=link)


def compress_ssa(sa: SuffixArray, ssa: SpacedSuffixArray) -> CompressedSSA:
    """Compress an SSA against the suffix array of the same text."""
    if len(sa) != len(ssa):
        raise TextMismatch(f"SA has length {len(sa)}, SSA has length {len(ssa)}")
    if sa.text_ref and ssa.text_ref and sa.text_ref != ssa.text_ref:
        raise TextMismatch("SA and SSA were built from different texts")
    name = ssa.seed_ref.spec if ssa.seed_ref is not None else ""
    return compress_relative(sa.order, ssa.order, ROOT, ssa.seed_ref, name)


def access_ssa(c: CompressedSSA, i: int) -> int:
    return c.access(i)


# -- pairwise costs and reference trees ---------------------------------------


@dataclass(frozen=True)
class PairCost:
    rho: int
    payload_bits: int
    overhead_bits: int

    @property
    def total_bits(self) -> int:
        return self.payload_bits + self.overhead_bits


def estimate_pair_cost(a, b) -> PairCost:
    """Bits needed to store ``b`` relative to ``a``: two label strings of
    ``ceil(lg rho)`` levels each, where ``rho`` partitions ``a^-1 o b``."""
    a = np.asarray(getattr(a, "order", a), dtype=np.int64)
    b = np.asarray(getattr(b, "order", b), dtype=np.int64)
    if len(a) != len(b):
        raise LengthMismatch(f"lengths differ: {len(a)} vs {len(b)}")
    rho = partition_increasing(compose(inverse(a), b)).rho
    levels = bits_for(rho)
    n = len(a)
    return PairCost(rho, 2 * n * levels, 2 * levels * _directory_bits(n))


def cost_matrix(perms: Mapping[str, np.ndarray], root: str = ROOT, threads: int = 1) -> Dict[Tuple[str, str], int]:
    """Directed costs ``(parent, child) -> bits`` for every ordered pair.

    Edges into ``root`` are omitted.  Pairs are evaluated independently;
    the result is keyed, so the thread count never changes it.
    """
    pairs = [(u, v) for u in perms for v in perms if u != v and v != root]

    def one(pair):
        return estimate_pair_cost(perms[pair[0]], perms[pair[1]]).total_bits

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, pairs))
    else:
        values = [one(p) for p in pairs]
    return dict(zip(pairs, values))


@dataclass
class ReferenceTree:
    parent: Dict[str, str]
    depth: Dict[str, int]
    total_cost: float
    root: str = ROOT

    def order(self) -> list:
        """Non-root nodes, parents before children."""
        children: Dict[str, list] = {}
        for v, p in self.parent.items():
            children.setdefault(p, []).append(v)
        out, queue = [], deque([self.root])
        while queue:
            u = queue.popleft()
            for v in sorted(children.get(u, [])):
                out.append(v)
                queue.append(v)
        return out


def _depths(parent: Mapping[str, str], root: str) -> Dict[str, int]:
    depth = {root: 0}

    def walk(v, seen=()):
        if v in depth:
            return depth[v]
        if v in seen:
            raise ValueError(f"cycle through {v!r}")
        depth[v] = walk(parent[v], seen + (v,)) + 1
        return depth[v]

    for v in parent:
        walk(v)
    depth.pop(root)
    return depth


def _tree_cost(parent: Mapping[str, str], costs: Mapping[Tuple[str, str], float]) -> float:
    return sum(costs[(p, v)] for v, p in parent.items())


def _subtree(parent: Mapping[str, str], v: str) -> set:
    out = {v}
    changed = True
    while changed:
        changed = False
        for c, p in parent.items():
            if p in out and c not in out:
                out.add(c)
                changed = True
    return out


def _cap_depth(parent: Dict[str, str], costs, root: str, max_depth: int) -> Dict[str, str]:
    """Re-hang nodes deeper than ``max_depth`` onto the cheapest shallow parent."""
    parent = dict(parent)
    while True:
        depth = _depths(parent, root)
        depth[root] = 0
        too_deep = sorted((d, v) for v, d in depth.items() if d > max_depth)
        if not too_deep:
            return parent
        v = too_deep[0][1]
        banned = _subtree(parent, v)
        options = [u for u in depth if u not in banned and depth[u] < max_depth]
        parent[v] = min(options, key=lambda u: (costs[(u, v)], u != root, u))


def plan_reference_tree(costs: Mapping[Tuple[str, str], float], nodes: Sequence[str], root: str = ROOT,
                        method: str = "mst-directed", max_depth: Optional[int] = DEFAULT_MAX_DEPTH) -> ReferenceTree:
    """Choose a parent for every non-root node.

    ``method`` is ``star`` (everything against the root), ``mst-directed``
    (minimum spanning arborescence on the asymmetric costs) or
    ``mst-undirected`` (minimum spanning tree on averaged costs, oriented
    away from the root).  ``max_depth`` caps reference chains.
    """
    others = [v for v in nodes if v != root]
    for v in others:
        for u in [root] + others:
            if u != v and (u, v) not in costs and (method != "star" or u == root):
                raise IncompleteCosts(f"missing cost for {u!r} -> {v!r}")
    if method == "star":
        parent = {v: root for v in others}
    elif method == "mst-directed":
        g = nx.DiGraph()
        g.add_nodes_from([root] + others)
        for (u, v), c in costs.items():
            if v != root and u in g and v in g:
                g.add_edge(u, v, weight=c)
        arb = nx.minimum_spanning_arborescence(g, attr="weight", preserve_attrs=True)
        parent = {v: u for u, v in arb.edges()}
    elif method == "mst-undirected":
        g = nx.Graph()
        g.add_nodes_from([root] + others)
        for v in others:
            g.add_edge(root, v, weight=costs[(root, v)])
        for u, v in itertools.combinations(others, 2):
            g.add_edge(u, v, weight=(costs[(u, v)] + costs[(v, u)]) / 2)
        mst = nx.minimum_spanning_tree(g, weight="weight")
        parent = {v: u for u, v in nx.bfs_edges(mst, root)}
    else:
        raise ValueError(f"unknown tree method {method!r}")
    if max_depth is not None and others:
        parent = _cap_depth(parent, costs, root, max(1, max_depth))
    return ReferenceTree(parent, _depths(parent, root), _tree_cost(parent, costs), root)


# -- collections --------------------------------------------------------------


class SeedCollection:
    """The SA of one text plus named compressed SSAs and their reference tree."""

    def __init__(self, sa: SuffixArray, entries: Optional[Dict[str, CompressedSSA]] = None,
                 tree: Optional[ReferenceTree] = None, costs: Optional[dict] = None):
        self.sa = sa
        self.entries: Dict[str, CompressedSSA] = dict(entries or {})
        self.tree = tree or ReferenceTree({k: e.base for k, e in self.entries.items()}, {}, 0.0)
        self.costs = costs
        self.resolve()

    @property
    def n(self) -> int:
        return len(self.sa)

    def names(self) -> list:
        return list(self.entries)

    def lookup(self, name: str):
        if name == ROOT:
            return self.sa.order
        try:
            return self.entries[name]
        except KeyError:
            raise UnknownEntry(f"no entry named {name!r}") from None

    def resolve(self) -> None:
        """Point every entry's ``base_link`` at the object its base names."""
        for e in self.entries.values():
            if e.base != ROOT and e.base not in self.entries:
                raise DanglingReference(f"{e.name!r} references unknown base {e.base!r}")
            e.base_link = self.lookup(e.base)
        self.tree.parent = {k: e.base for k, e in self.entries.items()}
        self.tree.depth = _depths(self.tree.parent, ROOT)
        if self.costs:
            self.tree.total_cost = _tree_cost(self.tree.parent, self.costs)

    def access(self, name: str, i: int) -> int:
        if name == ROOT:
            if not 0 <= i < self.n:
                raise IndexOutOfRange(f"index {i} outside [0, {self.n})")
            return int(self.sa.order[i])
        return self.lookup(name).access(i)

    def decode(self, name: str) -> np.ndarray:
        if name == ROOT:
            return np.asarray(self.sa.order)
        return self.lookup(name).decode()

    def depth(self, name: str) -> int:
        return 0 if name == ROOT else self.tree.depth[name]

    @classmethod
    def from_permutations(cls, sa: SuffixArray, perms: Mapping[str, np.ndarray],
                          seeds: Optional[Mapping[str, Optional[SpacedSeed]]] = None,
                          tree: str = "star", max_depth: Optional[int] = DEFAULT_MAX_DEPTH,
                          threads: int = 1) -> "SeedCollection":
        """Compress named permutations of ``[0, n)`` (SSAs or imported ones)."""
        seeds = dict(seeds or {})
        all_perms = {ROOT: np.asarray(sa.order)}
        for k, p in perms.items():
            if k == ROOT:
                raise ValueError(f"entry name {ROOT!r} is reserved")
            p = np.asarray(getattr(p, "order", p), dtype=np.int64)
            if len(p) != len(sa):
                raise LengthMismatch(f"{k!r} has length {len(p)}, text has {len(sa)}")
            all_perms[k] = p
        costs = None
        if tree == "star":
            costs = {(ROOT, k): estimate_pair_cost(sa.order, p).total_bits for k, p in all_perms.items() if k != ROOT}
        else:
            costs = cost_matrix(all_perms, ROOT, threads)
        plan = plan_reference_tree(costs, list(all_perms), ROOT, tree, max_depth)
        entries: Dict[str, CompressedSSA] = {}
        for k in plan.order():
            base = plan.parent[k]
            link = np.asarray(sa.order) if base == ROOT else entries[base]
            entries[k] = compress_relative(all_perms[base], all_perms[k], base, seeds.get(k), k, link)
        # Keep the caller's entry order.
        entries = {k: entries[k] for k in perms}
        return cls(sa, entries, plan, costs)

    @classmethod
    def build(cls, text: Text, seeds: Sequence[Tuple[str, SpacedSeed]], tree: str = "star",
              max_depth: Optional[int] = DEFAULT_MAX_DEPTH, threads: int = 1) -> "SeedCollection":
        sa = build_sa(text)
        perms, seed_map = {}, {}
        for name, seed in seeds:
            perms[name] = build_ssa(text, seed, sa).order
            seed_map[name] = seed
        return cls.from_permutations(sa, perms, seed_map, tree, max_depth, threads)


# -- relative document suffix arrays -------------------------------------------


class RelativeDocumentSA:
    """The SA of an edited document stored against the original's SA.

    The matched subsequence borrows its sub-permutation from the reference;
    the remaining positions form one explicitly stored subsequence.
    """

    def __init__(self, reference: ReferenceBundle, target: RelativePermutation):
        self.reference = reference
        self.target_rel = target

    @property
    def n(self) -> int:
        return self.target_rel.n

    def __len__(self) -> int:
        return self.target_rel.n

    def access(self, i: int) -> int:
        return self.target_rel.access(i)

    __getitem__ = access

    def decode(self) -> np.ndarray:
        return self.target_rel.decode()

    def explicit_entries(self) -> int:
        return self.target_rel.explicit_entries()

    def size_report(self):
        """Target's R, R' and explicit entries plus the reference's two label strings."""
        from .relperm import SizeReport

        t = self.target_rel.size_report()
        r = self.reference.size_bits()
        return SizeReport(t.payload_bits + r.payload, t.overhead_bits + r.overhead, t.explicit_bits, t.n)


def _check_matching(pi: np.ndarray, pihat: np.ndarray, matching) -> Tuple[np.ndarray, np.ndarray]:
    m = np.asarray(matching, dtype=np.int64).reshape(-1, 2)
    ps, qs = m[:, 0], m[:, 1]
    if len(m) and (ps.min() < 0 or ps.max() >= len(pi) or qs.min() < 0 or qs.max() >= len(pihat)):
        raise NonMonotoneMatching("matching position out of range")
    if np.any(np.diff(ps) <= 0) or np.any(np.diff(qs) <= 0):
        raise NonMonotoneMatching("matched positions must increase in both permutations")
    if np.any(local_ranks(pi[ps]) != local_ranks(pihat[qs])):
        raise OrderMismatch("matched elements do not share their relative order")
    return ps, qs


def compress_relative_document_sa(pi, ref, matching, ref_name: str = "original") -> RelativeDocumentSA:
    """Store ``pi`` against ``ref`` given matched ``(pos_in_pi, pos_in_ref)`` pairs."""
    pi = np.asarray(getattr(pi, "order", pi), dtype=np.int64)
    pihat = np.asarray(getattr(ref, "order", ref), dtype=np.int64)
    ps, qs = _check_matching(pi, pihat, matching)
    ref_labels = np.ones(len(pihat), dtype=np.int64)
    ref_labels[qs] = 0
    if len(qs) == 0:
        ref_labels[:] = 0
    bundle = ReferenceBundle.build(ref_name, pihat, ref_labels)

    labels = np.ones(len(pi), dtype=np.int64)
    labels[ps] = 0
    if len(ps) == 0:
        labels[:] = 0
        modes = [Mode.EXPLICIT]
    elif len(ps) == len(pi):
        modes = [ReferenceLink.to(bundle, 0)]
    else:
        modes = [ReferenceLink.to(bundle, 0), Mode.EXPLICIT]
    return RelativeDocumentSA(bundle, encode(pi, labels, modes))


def _match_with_value_map(pi: np.ndarray, pihat: np.ndarray, value_map: np.ndarray) -> list:
    pos_hat = inverse(pihat)
    mapped = value_map[pi]
    ps = np.flatnonzero(mapped >= 0)
    qs = pos_hat[mapped[ps]]
    keep = lis_indices(qs.tolist())
    return [(int(ps[k]), int(qs[k])) for k in keep]


def _shift_map(n: int, nhat: int, cut: int, shift: int) -> np.ndarray:
    """``v -> v`` below ``cut``, ``v -> v - shift`` from ``cut + max(shift, 0)`` on."""
    v = np.arange(n, dtype=np.int64)
    g = np.where(v < cut, v, v - shift)
    if shift > 0:
        g[(v >= cut) & (v < cut + shift)] = -1
    g[(g < 0) | (g >= nhat)] = -1
    return g


def find_matching(pi, pihat, value_map=None, max_cuts: int = 64) -> list:
    """Heuristic order-preserving matching between two permutations.

    Values of ``pi`` are paired with values of ``pihat`` through a monotone
    value map, and a longest increasing run of paired ``pihat`` positions
    (taken in ``pi`` order) is kept.  Without an explicit ``value_map`` the
    identity is tried, and when lengths differ so are maps that shift
    values past a cut point by the length difference (the shape an edit
    gives suffix-array values).  The best result is returned.
    """
    pi = np.asarray(getattr(pi, "order", pi), dtype=np.int64)
    pihat = np.asarray(getattr(pihat, "order", pihat), dtype=np.int64)
    n, nhat = len(pi), len(pihat)
    if value_map is not None:
        best = _match_with_value_map(pi, pihat, np.asarray(value_map, dtype=np.int64))
    else:
        best = _match_with_value_map(pi, pihat, _shift_map(n, nhat, n, 0))
        d = n - nhat
        if d != 0:
            top = max(n, nhat)

            def at(cut):
                return _match_with_value_map(pi, pihat, _shift_map(n, nhat, cut, d))

            cuts = sorted(set(np.linspace(0, top, min(max_cuts, top + 1)).astype(int).tolist()))
            scored = [(len(m), -c, m) for c in cuts for m in [at(c)]]
            _, neg_cut, m = max(scored, key=lambda t: t[:2])
            if len(m) > len(best):
                best = m
            step = top // max(len(cuts) - 1, 1)
            lo, hi = max(0, -neg_cut - step), min(top, -neg_cut + step)
            fine = sorted(set(np.linspace(lo, hi, min(max_cuts, hi - lo + 1)).astype(int).tolist()))
            for c in fine:
                m = at(c)
                if len(m) > len(best):
                    best = m
    if best:
        _check_matching(pi, pihat, best)
    return best


def text_value_map(edited: bytes, original: bytes) -> np.ndarray:
    """Monotone map from positions of ``edited`` to positions of ``original``.

    Lines are aligned with ``difflib``; inside changed line runs the common
    character prefix and suffix are aligned too.  Unaligned positions map
    to -1.  Both texts should include any sentinel.
    """
    g = np.full(len(edited), -1, dtype=np.int64)
    a_lines = edited.splitlines(keepends=True)
    b_lines = original.splitlines(keepends=True)
    a_off = np.concatenate(([0], np.cumsum([len(x) for x in a_lines]))).astype(int)
    b_off = np.concatenate(([0], np.cumsum([len(x) for x in b_lines]))).astype(int)
    sm = difflib.SequenceMatcher(None, a_lines, b_lines, autojunk=False)
    for tag, i1, i2, j1, j2 in sm.get_opcodes():
        a0, a1, b0, b1 = a_off[i1], a_off[i2], b_off[j1], b_off[j2]
        if tag == "equal":
            g[a0:a1] = np.arange(b0, b1)
            continue
        if tag in ("insert", "delete"):
            continue
        seg_a, seg_b = edited[a0:a1], original[b0:b1]
        k = 0
        while k < min(len(seg_a), len(seg_b)) and seg_a[k] == seg_b[k]:
            k += 1
        g[a0 : a0 + k] = np.arange(b0, b0 + k)
        t = 0
        while t < min(len(seg_a), len(seg_b)) - k and seg_a[-1 - t] == seg_b[-1 - t]:
            t += 1
        if t:
            g[a1 - t : a1] = np.arange(b1 - t, b1)
    return g
