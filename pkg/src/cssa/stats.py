"""Space and latency reporting in bits per character of the text."""

from __future__ import annotations

import csv
import io
import os
import time
from dataclasses import astuple, dataclass, fields
from typing import Iterable, List, Optional

import numpy as np

from .container import Container
from .relative_index import ROOT
from .serial import bits_for

DEFAULT_ACCESSES = 10_000


@dataclass(frozen=True)
class StatsRow:
    seed: str
    reference: str
    rho: int
    payload_bpc: float
    overhead_bpc: float
    latency_us: float
    depth: int

    @property
    def space_bpc(self) -> float:
        return self.payload_bpc + self.overhead_bpc


def rng_seed() -> int:
    return int(os.environ.get("CSSA_SEED", "0"))


def mean_latency_us(access, n: int, accesses: int = DEFAULT_ACCESSES, seed: Optional[int] = None) -> float:
    """Mean wall time of ``access(i)`` over uniform random ``i``.

    Indices are drawn up front from a seeded generator; a short warm-up
    pass runs first.
    """
    if n == 0 or accesses == 0:
        return 0.0
    rng = np.random.default_rng(rng_seed() if seed is None else seed)
    idx = rng.integers(0, n, size=accesses).tolist()
    for i in idx[: min(100, accesses)]:
        access(i)
    t0 = time.perf_counter_ns()
    for i in idx:
        access(i)
    return (time.perf_counter_ns() - t0) / accesses / 1000.0


def collect_stats(container: Container, accesses: int = DEFAULT_ACCESSES, seed: Optional[int] = None) -> List[StatsRow]:
    rows = []
    n = container.n
    for name, perm in container.raw.items():
        lat = mean_latency_us(lambda i: int(perm[i]), len(perm), accesses, seed)
        rows.append(StatsRow(name, "-", 1, float(bits_for(len(perm))), 0.0, lat, 0))
    for name, e in container.ssas.items():
        rep = e.size_report()
        lat = mean_latency_us(e.access, e.n, accesses, seed)
        rows.append(StatsRow(name, e.base, e.rho, rep.payload_bits / n, rep.overhead_bits / n, lat, e.hops))
    for name, d in container.docs.items():
        rep = d.size_report()
        lat = mean_latency_us(d.access, d.n, accesses, seed)
        rows.append(StatsRow(name, container.doc_refs.get(name, d.reference.name), d.target_rel.rho,
                             rep.payload_bits / d.n, rep.overhead_bits / d.n, lat, 1))
    return rows


COLUMNS = [f.name for f in fields(StatsRow)]


def to_csv(rows: Iterable[StatsRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in astuple(r)])
    return buf.getvalue()


def from_csv(text: str) -> List[StatsRow]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append(StatsRow(
            seed=rec["seed"],
            reference=rec["reference"],
            rho=int(rec["rho"]),
            payload_bpc=float(rec["payload_bpc"]),
            overhead_bpc=float(rec["overhead_bpc"]),
            latency_us=float(rec["latency_us"]),
            depth=int(rec["depth"]),
        ))
    return out


def format_table(rows: Iterable[StatsRow]) -> str:
    rows = list(rows)
    width = max([len("seed")] + [len(r.seed) for r in rows])
    refw = max([len("reference")] + [len(r.reference) for r in rows])
    lines = [f"{'seed':<{width}}  {'reference':<{refw}}  {'rho':>5}  {'space':>8}  {'time':>8}  {'hops':>4}",
             f"{'':<{width}}  {'':<{refw}}  {'':>5}  {'(bpc)':>8}  {'(us)':>8}  {'':>4}"]
    for r in rows:
        lines.append(f"{r.seed:<{width}}  {r.reference:<{refw}}  {r.rho:>5}  {r.space_bpc:>8.2f}  "
                     f"{r.latency_us:>8.2f}  {r.depth:>4}")
    return "\n".join(lines)


def format_numbered_layout(rows: Iterable[StatsRow]) -> str:
    """Numbered rows with seed, reference, space and time columns."""
    rows = list(rows)
    names = {r.seed: k for k, r in enumerate(rows, 1)}
    lines = [f"{'#':>3}  {'seed':<12} {'ref':>4}  {'space':>6}  {'time':>5}",
             f"{'':>3}  {'':<12} {'':>4}  {'(bpc)':>6}  {'(us)':>5}"]
    lines.append("-" * len(lines[0]))
    for k, r in enumerate(rows, 1):
        ref = "-" if r.reference == "-" else str(names.get(r.reference, r.reference))
        lines.append(f"{k:>3}  {r.seed[:12]:<12} {ref:>4}  {r.space_bpc:>6.2f}  {r.latency_us:>5.0f}")
    return "\n".join(lines)
