import numpy as np
import pytest

from cssa.textmodel import Text


def naive_sa(seq):
    seq = list(seq)
    return sorted(range(len(seq)), key=lambda i: seq[i:])


def naive_key(seq, spec, i, class_of=None):
    """Seed key of ``seq`` at ``i``, straight from the seed string."""
    out = []
    for off, d in enumerate(spec):
        j = i + off
        if j >= len(seq):
            break
        if d == "1":
            out.append((0, seq[j]))
        elif d == "T":
            out.append((1, class_of[seq[j]]))
    return out


def naive_ssa(seq, spec, class_of=None):
    seq = list(seq)
    return sorted(range(len(seq)), key=lambda i: (naive_key(seq, spec, i, class_of), seq[i:]))


def random_text(rng, n, sigma):
    syms = rng.integers(0, sigma, n)
    data = bytes(ord("a") + int(c) for c in syms)
    return Text.from_bytes(data)


def random_seed_spec(rng, max_len, zero_frac=0.3):
    length = int(rng.integers(1, max_len + 1))
    digits = ["1"] + ["0" if rng.random() < zero_frac else "1" for _ in range(length - 1)]
    return "".join(digits)


def random_perm(rng, n):
    return rng.permutation(n).astype(np.int64)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def abracadabra():
    return Text.from_string("abracadabra")
