import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cssa.errors import FormatError, IndexOutOfRange, LabelOutOfRange, SelectOverflow, UnknownLabel
from cssa.serial import Reader, Writer, bits_for, pack_uints, unpack_uints
from cssa.succinct import LabeledSequence, RsBitvector, build_labeled

R_SEC2 = [0, 1, 1, 0, 0, 1, 1, 1, 1, 1, 1]
RP_SEC2 = [0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1]
R_SEC4 = [int(c) for c in "01010010111001101101"]
RP_SEC4 = [int(c) for c in "00011001111100100111"]

label_lists = st.integers(1, 20).flatmap(
    lambda rho: st.tuples(st.just(rho), st.lists(st.integers(0, rho - 1), max_size=300))
)


def test_bitvector_against_scan(rng):
    for n in [0, 1, 63, 64, 65, 255, 256, 257, 2047, 2048, 2049, 4100, 9000]:
        bits = rng.integers(0, 2, n)
        bv = RsBitvector(bits)
        csum = np.cumsum(bits)
        for i in range(n):
            assert bv[i] == bits[i]
            assert bv.rank1(i) == csum[i]
            assert bv.rank0(i) == i + 1 - csum[i]
        ones, zeros = np.flatnonzero(bits), np.flatnonzero(bits == 0)
        for k in range(1, len(ones) + 1):
            assert bv.select1(k) == ones[k - 1]
        for k in range(1, len(zeros) + 1):
            assert bv.select0(k) == zeros[k - 1]


def test_bitvector_select_overflow():
    bv = RsBitvector([1, 0, 1])
    with pytest.raises(SelectOverflow):
        bv.select1(3)
    with pytest.raises(SelectOverflow):
        bv.select0(0)
    with pytest.raises(IndexOutOfRange):
        bv.rank1(3)


def test_bitvector_overhead_ratio(rng):
    for n in [1, 100, 256, 257, 2048, 2049, 2304, 10_000, 1 << 20]:
        sb = RsBitvector(rng.integers(0, 2, n)).size_bits()
        assert sb.payload == n
        assert sb.overhead <= 0.25 * sb.payload


def test_bitvector_serialization_round_trip(rng):
    bv = RsBitvector(rng.integers(0, 2, 5000))
    w = Writer()
    bv.write(w)
    back = RsBitvector.read(Reader(w.getvalue()))
    assert np.array_equal(back.to_bits(), bv.to_bits())


def test_labeled_sec2_example():
    seq = build_labeled(R_SEC2, 2)
    assert seq.access(1) == 1
    assert seq.prank(1) == 1
    assert seq.prank(3) == 2
    # a1 occurs at 0, 3, 4; select_a1(3) on R' gives 2 = (SA^-1 o SSA)[4].
    assert seq.prank(4) == 3


def test_labeled_sec2_rprime_select():
    seq = build_labeled(RP_SEC2, 2)
    assert seq.select(0, 1) == 0
    assert seq.select(1, 1) == 3


def test_labeled_sec4_queries():
    assert build_labeled(RP_SEC4, 2).select(1, 5) == 9
    assert build_labeled(R_SEC4, 2).prank(6) == 3


def test_labeled_all_same():
    seq = build_labeled([0] * 30, 1)
    for i in range(30):
        assert seq.access(i) == 0
        assert seq.prank(i) == i + 1
        assert seq.select(0, i + 1) == i


def test_labeled_against_scan(rng):
    for _ in range(1000):
        n = int(rng.integers(0, 201))
        rho = int(rng.integers(1, 17))
        labels = rng.integers(0, rho, n)
        seq = build_labeled(labels, rho)
        for i in range(n):
            assert seq.access(i) == labels[i]
            assert seq.prank(i) == int((labels[: i + 1] == labels[i]).sum())
        for c in range(rho):
            pos = np.flatnonzero(labels == c)
            for k, p in enumerate(pos, 1):
                assert seq.select(c, k) == p
        assert seq.to_array().tolist() == labels.tolist()


@settings(max_examples=150, deadline=None)
@given(label_lists)
def test_labeled_round_trips(case):
    rho, labels = case
    seq = build_labeled(labels, rho)
    for i in range(len(labels)):
        assert seq.select(seq.access(i), seq.prank(i)) == i
    for c in range(rho):
        for k in range(1, seq.count(c) + 1):
            p = seq.select(c, k)
            assert seq.access(p) == c and seq.prank(p) == k


def test_labeled_errors():
    seq = build_labeled([0, 1, 1], 3)
    with pytest.raises(IndexOutOfRange):
        seq.access(3)
    with pytest.raises(SelectOverflow):
        seq.select(1, 3)
    with pytest.raises(SelectOverflow):
        seq.select(2, 1)
    with pytest.raises(UnknownLabel):
        seq.select(3, 1)
    with pytest.raises(LabelOutOfRange):
        build_labeled([0, 4], 3)


def test_size_bits_examples(rng):
    assert build_labeled([0] * 100, 1).size_bits().payload == 0
    assert build_labeled(R_SEC2, 2).size_bits().payload == 11
    sb = build_labeled(rng.integers(0, 5, 1000), 5).size_bits()
    # Level lengths are n each, one level per code bit.
    assert sb.payload == 1000 * bits_for(5) == 3000


def test_size_bits_bounds(rng):
    for _ in range(50):
        n = int(rng.integers(1, 20_000))
        rho = int(rng.integers(1, 40))
        sb = build_labeled(rng.integers(0, rho, n), rho).size_bits()
        assert sb.payload <= n * bits_for(rho)
        assert sb.overhead <= 0.25 * sb.payload


def test_labeled_serialization(rng):
    labels = rng.integers(0, 7, 3000)
    seq = build_labeled(labels, 7)
    blob = seq.to_bytes()
    assert blob.startswith(b"CSSA\x01")
    back = LabeledSequence.from_bytes(blob)
    assert back.to_list() == labels.tolist()
    assert back.to_bytes() == blob
    with pytest.raises(FormatError):
        LabeledSequence.from_bytes(b"XXXX\x01" + blob[5:])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 20).flatmap(lambda w: st.tuples(st.just(w), st.lists(st.integers(0, 2**w - 1 if w else 0), max_size=100))))
def test_pack_round_trip(case):
    width, values = case
    assert unpack_uints(pack_uints(values, width), width, len(values)).tolist() == (values if width else [0] * len(values))
