import os
import subprocess
import sys

import numpy as np
import pytest

from cssa.cli import main
from cssa.container import Container, read_container
from cssa.errors import FormatError
from cssa.stats import collect_stats, from_csv, to_csv

SSA_101 = [10, 3, 5, 7, 0, 8, 1, 4, 6, 9, 2]
SA = [10, 7, 0, 3, 5, 8, 1, 4, 6, 9, 2]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def kv(out: str) -> dict:
    return dict(line.split("\t", 1) for line in out.strip().splitlines())


@pytest.fixture
def abra(tmp_path, capsys):
    text = tmp_path / "abra.txt"
    text.write_bytes(b"abracadabra")
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("# example\n101\n1\n")
    out = tmp_path / "abra.cssa"
    code, _, _ = run(capsys, "build", text, seeds, "--out", out)
    assert code == 0
    return out


def test_build_and_query(abra, capsys):
    code, out, _ = run(capsys, "query", abra, "101", "0")
    assert code == 0 and out == "10\n"
    code, out, _ = run(capsys, "query", abra, "101", "0..10")
    assert [int(x) for x in out.split()] == SSA_101
    code, out, _ = run(capsys, "query", abra, "SA", "0..10")
    assert [int(x) for x in out.split()] == SA
    code, out, _ = run(capsys, "query", abra, "1", "0..10")
    assert [int(x) for x in out.split()] == SA


def test_query_errors(abra, capsys):
    code, _, err = run(capsys, "query", abra, "101", "11")
    assert code == 2 and "IndexOutOfRange" in err
    code, _, err = run(capsys, "query", abra, "nope", "0")
    assert code == 2 and "UnknownEntry" in err
    code, _, _ = run(capsys, "query", abra, "101", "x")
    assert code == 1
    code, _, _ = run(capsys, "query", abra.with_name("missing.cssa"), "101", "0")
    assert code == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["build", "only-one-arg"])
    assert e.value.code == 1


def test_bad_seed_is_domain_error(tmp_path, capsys):
    text = tmp_path / "t.txt"
    text.write_bytes(b"abracadabra")
    seeds = tmp_path / "s.txt"
    seeds.write_text("1x1\n")
    code, _, _ = run(capsys, "build", text, seeds, "--out", tmp_path / "o.cssa")
    assert code == 2


def test_stats(abra, capsys):
    code, out, _ = run(capsys, "stats", abra, "--csv", "--accesses", "200")
    assert code == 0
    rows = {r.seed: r for r in from_csv(out)}
    assert rows["101"].rho == 2 and rows["101"].reference == "SA"
    assert rows["101"].payload_bpc == pytest.approx(2.0)
    assert rows["101"].space_bpc >= 2.0
    assert rows["1"].payload_bpc == 0.0 and rows["1"].space_bpc == 0.0 and rows["1"].depth == 0
    assert rows["SA"].payload_bpc == 4.0
    for flag in ([], ["--paper-layout"]):
        code, out, _ = run(capsys, "stats", abra, "--accesses", "10", *flag)
        assert code == 0 and "101" in out


def test_csv_round_trip(abra):
    rows = collect_stats(read_container(abra), accesses=50)
    assert from_csv(to_csv(rows)) == rows


def test_stats_seeded_indices(abra, monkeypatch):
    monkeypatch.setenv("CSSA_SEED", "7")
    rows = collect_stats(read_container(abra), accesses=20)
    assert len(rows) == 3


def test_star_tree_references(tmp_path, capsys, rng):
    text = tmp_path / "t.txt"
    text.write_bytes(bytes(rng.choice(list(b"acgt"), 500).tolist()))
    seeds = tmp_path / "s.txt"
    seeds.write_text("1101\n11011\n110111\n")
    out = tmp_path / "o.cssa"
    assert run(capsys, "build", text, seeds, "--out", out, "--tree", "star")[0] == 0
    rows = collect_stats(read_container(out), accesses=10)
    assert all(r.reference == "SA" for r in rows if r.seed != "SA")
    out2 = tmp_path / "o2.cssa"
    code, report, _ = run(capsys, "plan-tree", out, "--out", out2, "--threads", "2")
    assert code == 0
    info = kv(report.split("\n", 1)[1])
    assert float(info["total_bits"]) <= float(info["star_bits"])
    a, b = read_container(out), read_container(out2)
    for name in ["1101", "11011", "110111"]:
        assert [a.access(name, i) for i in range(500)] == [b.access(name, i) for i in range(500)]


def test_bench(abra, capsys):
    code, out, _ = run(capsys, "bench", abra, "--accesses", "50", "--repeat", "2")
    assert code == 0
    assert {line.split("\t")[0] for line in out.strip().splitlines()[1:]} == {"SA", "101", "1"}


def test_serialization_round_trip(abra):
    data = abra.read_bytes()
    cont = Container.from_bytes(data)
    assert cont.to_bytes() == data
    assert [cont.access("101", i) for i in range(11)] == SSA_101
    with pytest.raises(FormatError):
        Container.from_bytes(data + b"\0" * 8)


def test_diffsa_identical(tmp_path, capsys):
    a = tmp_path / "a.txt"
    a.write_bytes(b"the quick brown fox\njumps over\nthe lazy dog\n")
    code, out, _ = run(capsys, "diffsa", a, a, "--sentinel", "$")
    info = kv(out)
    assert code == 0
    assert info["explicit_entries"] == "0" and float(info["explicit_bpc"]) == 0.0


def test_diffsa_sec4_pair(tmp_path, capsys):
    a, b = tmp_path / "orig.txt", tmp_path / "edit.txt"
    a.write_bytes(b"abracadabra")
    b.write_bytes(b"abrabbababra")
    out = tmp_path / "d.cssa"
    code, report, _ = run(capsys, "diffsa", a, b, "--sentinel", "$", "--out", out)
    assert code == 0
    assert int(kv(report)["explicit_entries"]) <= 5
    cont = read_container(out)
    assert [cont.access("edited", i) for i in range(13)] == [12, 11, 6, 3, 8, 0, 5, 7, 4, 9, 1, 10, 2]
    assert cont.to_bytes() == out.read_bytes()


def _paragraphs(rng, size):
    words = ["".join(rng.choice(list("abcdefghijklmnopqrstuvwxyz"), int(rng.integers(2, 9)))) for _ in range(3000)]
    paras, total = [], 0
    while total < size:
        lines = [" ".join(rng.choice(words, int(rng.integers(6, 14)))) for _ in range(int(rng.integers(3, 8)))]
        p = "\n".join(lines) + "\n\n"
        paras.append(p)
        total += len(p)
    return paras


def test_diffsa_swapped_paragraph(tmp_path, capsys, rng):
    paras = _paragraphs(rng, 100_000)
    a, b = tmp_path / "orig.txt", tmp_path / "edit.txt"
    a.write_text("".join(paras))
    swapped = list(paras)
    k = len(paras) // 2
    swapped[k], swapped[k + 1] = swapped[k + 1], swapped[k]
    b.write_text("".join(swapped))
    code, report, _ = run(capsys, "diffsa", a, b, "--sentinel", "\x01")
    info = kv(report)
    assert code == 0
    assert int(info["original_n"]) >= 100_000
    assert float(info["delta_bpc"]) < int(info["packed_sa_bpc"])


def test_console_script(abra):
    exe = os.path.join(os.path.dirname(sys.executable), "cssa")
    cmd = [exe] if os.path.exists(exe) else [sys.executable, "-m", "cssa.cli"]
    res = subprocess.run(cmd + ["query", str(abra), "101", "3"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "7\n"
    res = subprocess.run(cmd + ["query", str(abra), "101", "99"], capture_output=True, text=True)
    assert res.returncode == 2


def _key_less(sym, spec, i, j):
    """Naive SSA order test for text positions i, j."""
    n = len(sym)
    ki = [sym[i + d] for d, c in enumerate(spec) if c == "1" and i + d < n]
    kj = [sym[j + d] for d, c in enumerate(spec) if c == "1" and j + d < n]
    if ki != kj:
        return ki < kj
    return bytes(sym[i:]) < bytes(sym[j:])


@pytest.mark.slow
def test_megabyte_shrimp_seeds(tmp_path, capsys):
    rng = np.random.default_rng(2024)
    dna = rng.choice(list(b"ACGT"), 1 << 20).astype(np.uint8).tobytes()
    fa = tmp_path / "g.fa"
    fa.write_bytes(b">chr\n" + b"\n".join(dna[i:i + 60] for i in range(0, len(dna), 60)) + b"\n")
    seeds = tmp_path / "shrimp.txt"
    specs = ["11110111101111", "1111011100100001111", "1111000011001101111"]
    seeds.write_text("\n".join(specs) + "\n")
    out = tmp_path / "g.cssa"
    assert run(capsys, "build", fa, seeds, "--out", out, "--fasta", "--sentinel", "$")[0] == 0
    cont = read_container(out)
    sym = list(dna) + [0]
    n = len(sym)
    for spec in specs:
        idx = rng.integers(0, n - 1, 10_000)
        for k in idx.tolist():
            a, b = cont.access(spec, k), cont.access(spec, k + 1)
            assert _key_less(sym, spec, a, b)
        assert np.array_equal(np.sort(cont.lookup(spec).decode()), np.arange(n))
