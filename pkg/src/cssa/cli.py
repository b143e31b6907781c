"""Command-line front end.

Exit codes: 0 on success, 1 on usage errors, 2 on domain errors (bad
inputs, unknown entries, out-of-range indices, unreadable files).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .container import Container, read_container, write_container
from .errors import CSSAError, IndexOutOfRange
from .relative_index import (
    DEFAULT_MAX_DEPTH,
    ROOT,
    SeedCollection,
    compress_relative_document_sa,
    cost_matrix,
    find_matching,
    plan_reference_tree,
    text_value_map,
)
from .serial import bits_for
from .stats import DEFAULT_ACCESSES, collect_stats, format_numbered_layout, format_table, mean_latency_us, to_csv
from .suffixes import SuffixArray, build_sa
from .textmodel import class_map_from_groups, load_text, parse_seed, read_seed_file, strip_fasta, Text

logger = logging.getLogger("cssa")

USAGE_EXIT = 1
DOMAIN_EXIT = 2

TREE_METHODS = ["star", "mst-directed", "mst-undirected"]
# Permutation-only matching tries many cut points; skip it on big inputs.
PERM_MATCHING_LIMIT = 20_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _unique_name(name: str, taken: set) -> str:
    if name not in taken and name != ROOT:
        return name
    k = 2
    while f"{name}#{k}" in taken:
        k += 1
    return f"{name}#{k}"


def cmd_build(args) -> int:
    text = load_text(args.text, fasta=args.fasta, sentinel=args.sentinel)
    seeds = []
    taken: set = set()
    for spec, groups in read_seed_file(args.seeds):
        cmap = class_map_from_groups(text, groups) if groups else None
        seed = parse_seed(spec, cmap)
        name = _unique_name(seed.spec, taken)
        taken.add(name)
        seeds.append((name, seed))
    if not seeds:
        raise UsageError(f"no seeds in {args.seeds}")
    coll = SeedCollection.build(text, seeds, tree=args.tree, max_depth=args.max_depth, threads=args.threads)
    write_container(args.out, Container.from_collection(coll, text.sigma))
    for name, e in coll.entries.items():
        rep = e.size_report()
        print(f"{name}\tbase={e.base}\trho={e.rho}\tbpc={rep.bpc:.4f}")
    return 0


def _parse_indices(spec: str):
    if ".." in spec:
        a, b = spec.split("..", 1)
        try:
            lo, hi = int(a), int(b)
        except ValueError:
            raise UsageError(f"bad index range {spec!r}") from None
        return range(lo, hi + 1)
    try:
        return [int(spec)]
    except ValueError:
        raise UsageError(f"bad index {spec!r}") from None


def cmd_query(args) -> int:
    cont = read_container(args.container)
    n = cont.length(args.name)
    idx = _parse_indices(args.index)
    for i in idx:
        if not 0 <= i < n:
            raise IndexOutOfRange(f"index {i} outside [0, {n})")
    out = [str(cont.access(args.name, i)) for i in idx]
    sys.stdout.write("\n".join(out) + "\n")
    return 0


def cmd_stats(args) -> int:
    cont = read_container(args.container)
    rows = collect_stats(cont, accesses=args.accesses)
    if args.csv:
        sys.stdout.write(to_csv(rows))
    elif args.paper_layout:
        print(format_numbered_layout(rows))
    else:
        print(format_table(rows))
    return 0


def _read_doc(path: str, fasta: bool) -> bytes:
    data = Path(path).read_bytes()
    return strip_fasta(data) if fasta else data


def cmd_diffsa(args) -> int:
    original = _read_doc(args.original, args.fasta)
    edited = _read_doc(args.edited, args.fasta)
    # Both texts share one alphabet mapping so SA values are comparable.
    joint = Text.from_bytes(original + edited, sentinel=args.sentinel)
    lut = np.zeros(256, dtype=np.int64)
    for raw, code in joint.raw_alphabet.items():
        lut[raw] = code

    def sa_of(doc: bytes) -> np.ndarray:
        syms = lut[np.frombuffer(doc, dtype=np.uint8)]
        if args.sentinel is not None:
            syms = np.append(syms, 0)
        return build_sa(Text(symbols=syms, sigma=joint.sigma, raw_alphabet=joint.raw_alphabet)).order

    pihat, pi = sa_of(original), sa_of(edited)
    sent = args.sentinel.encode("latin-1") if args.sentinel else b""
    matching = find_matching(pi, pihat, text_value_map(edited + sent, original + sent))
    if len(pi) <= PERM_MATCHING_LIMIT:
        alt = find_matching(pi, pihat)
        if len(alt) > len(matching):
            matching = alt
    doc = compress_relative_document_sa(pi, pihat, matching, ref_name="original")
    cont = Container(n=len(pi), sigma=joint.sigma, raw={"original": pihat}, docs={"edited": doc},
                     doc_refs={"edited": "original"})
    if args.out:
        write_container(args.out, cont)
    rep = doc.size_report()
    print(f"original_n\t{len(pihat)}")
    print(f"edited_n\t{len(pi)}")
    print(f"matched\t{len(matching)}")
    print(f"explicit_entries\t{doc.explicit_entries()}")
    print(f"payload_bits\t{rep.payload_bits}")
    print(f"overhead_bits\t{rep.overhead_bits}")
    print(f"explicit_bpc\t{rep.explicit_bits / len(pi):.4f}")
    print(f"delta_bpc\t{rep.bpc:.4f}")
    print(f"packed_sa_bpc\t{bits_for(len(pi))}")
    return 0


def cmd_plan_tree(args) -> int:
    cont = read_container(args.container)
    coll = cont.collection()
    perms = {ROOT: np.asarray(coll.sa.order)}
    for name in coll.names():
        perms[name] = coll.decode(name)
    costs = cost_matrix(perms, ROOT, args.threads)
    plan = plan_reference_tree(costs, list(perms), ROOT, args.tree, args.max_depth)
    star = sum(costs[(ROOT, v)] for v in perms if v != ROOT)
    print("entry\tparent\tdepth\tbits")
    for v in coll.names():
        p = plan.parent[v]
        print(f"{v}\t{p}\t{plan.depth[v]}\t{costs[(p, v)]}")
    print(f"total_bits\t{plan.total_cost}")
    print(f"star_bits\t{star}")
    if args.out:
        seeds = {k: coll.entries[k].seed_ref for k in coll.names()}
        new = SeedCollection.from_permutations(SuffixArray(perms[ROOT]), {k: perms[k] for k in coll.names()},
                                               seeds, args.tree, args.max_depth, args.threads)
        write_container(args.out, Container.from_collection(new, cont.sigma))
    return 0


def cmd_bench(args) -> int:
    cont = read_container(args.container)
    print("entry\tn\tmean_us\tmin_us")
    for name in cont.names():
        obj = cont.lookup(name)
        times = [mean_latency_us(lambda i: cont.access(name, i), len(obj), args.accesses, seed)
                 for seed in range(args.repeat)]
        print(f"{name}\t{len(obj)}\t{np.mean(times):.3f}\t{min(times):.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cssa", description="Compressed spaced suffix arrays.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="build SA and compressed SSAs for a text and seed file")
    b.add_argument("text")
    b.add_argument("seeds")
    b.add_argument("--out", required=True)
    b.add_argument("--fasta", action="store_true")
    b.add_argument("--sentinel", default=None)
    b.add_argument("--tree", choices=TREE_METHODS, default="star")
    b.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    b.add_argument("--threads", type=int, default=1)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="print SSA entries")
    q.add_argument("container")
    q.add_argument("name")
    q.add_argument("index", help="INDEX or FIRST..LAST (inclusive)")
    q.set_defaults(func=cmd_query)

    s = sub.add_parser("stats", help="space (bpc) and access time per entry")
    s.add_argument("container")
    s.add_argument("--csv", action="store_true")
    s.add_argument("--paper-layout", action="store_true")
    s.add_argument("--accesses", type=int, default=DEFAULT_ACCESSES)
    s.set_defaults(func=cmd_stats)

    d = sub.add_parser("diffsa", help="store an edited document's SA against the original's")
    d.add_argument("original")
    d.add_argument("edited")
    d.add_argument("--out")
    d.add_argument("--fasta", action="store_true")
    d.add_argument("--sentinel", default=None)
    d.set_defaults(func=cmd_diffsa)

    t = sub.add_parser("plan-tree", help="plan which permutation each SSA is stored against")
    t.add_argument("container")
    t.add_argument("--tree", choices=TREE_METHODS, default="mst-directed")
    t.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    t.add_argument("--threads", type=int, default=1)
    t.add_argument("--out")
    t.set_defaults(func=cmd_plan_tree)

    m = sub.add_parser("bench", help="random-access microbenchmark")
    m.add_argument("container")
    m.add_argument("--accesses", type=int, default=DEFAULT_ACCESSES)
    m.add_argument("--repeat", type=int, default=3)
    m.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"cssa: error: {e}", file=sys.stderr)
        return USAGE_EXIT
    except (CSSAError, OSError, ValueError) as e:
        print(f"cssa: {type(e).__name__}: {e}", file=sys.stderr)
        return DOMAIN_EXIT


if __name__ == "__main__":
    sys.exit(main())
