"""Kernel correctness: the compiled path and the pure path must agree
with each other and with brute-force oracles."""

import itertools
import random
from collections import Counter

import pytest

from mcqforge import _kernels_py
from mcqforge import kernels


def lcs_oracle(a, b):
    # Exponential recursive definition, memoized; the textbook recurrence.
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def rec(i, j):
        if i == 0 or j == 0:
            return 0
        if a[i - 1] == b[j - 1]:
            return rec(i - 1, j - 1) + 1
        return max(rec(i - 1, j), rec(i, j - 1))

    return rec(len(a), len(b))


def ngram_oracle(hyp, refs, n):
    hyp_grams = Counter(tuple(hyp[i:i + n]) for i in range(len(hyp) - n + 1))
    clipped = 0
    for gram, count in hyp_grams.items():
        best = max((sum(1 for i in range(len(r) - n + 1) if tuple(r[i:i + n]) == gram)
                    for r in refs), default=0)
        clipped += min(count, best)
    return clipped, sum(hyp_grams.values())


def test_lcs_exhaustive_small():
    # every pair over a 2-symbol alphabet with lengths <= 4
    sym = [0, 1]
    seqs = []
    for length in range(5):
        seqs.extend(list(p) for p in itertools.product(sym, repeat=length))
    for a in seqs:
        for b in seqs:
            assert kernels.lcs_length_ids(a, b) == lcs_oracle(tuple(a), tuple(b))


def test_lcs_random_1000_cases():
    rng = random.Random(42)
    for _ in range(1000):
        a = [rng.randrange(5) for _ in range(rng.randrange(9))]
        b = [rng.randrange(5) for _ in range(rng.randrange(9))]
        assert kernels.lcs_length_ids(a, b) == lcs_oracle(tuple(a), tuple(b))


def test_lcs_known_pair():
    # "police kill the gunman" vs "police killed the gunman" as ids
    a, b = [0, 1, 2, 3], [0, 4, 2, 3]
    assert kernels.lcs_length_ids(a, b) == 3


def test_ngram_clip_random_agrees_with_counter():
    rng = random.Random(7)
    for _ in range(300):
        hyp = [rng.randrange(4) for _ in range(rng.randrange(10))]
        refs = [[rng.randrange(4) for _ in range(rng.randrange(10))]
                for _ in range(rng.randrange(1, 4))]
        n = rng.randrange(1, 4)
        assert kernels.ngram_clip(hyp, refs, n) == ngram_oracle(hyp, refs, n)


def test_ngram_clip_multi_reference_takes_max():
    # clip of the repeated unigram is the max count over references
    hyp = [1, 1, 1]
    assert kernels.ngram_clip(hyp, [[1], [1, 1]], 1) == (2, 3)


def test_backends_agree():
    if kernels.BACKEND != "cython":
        pytest.skip("compiled extension not present")
    rng = random.Random(3)
    for _ in range(200):
        a = [rng.randrange(6) for _ in range(rng.randrange(12))]
        b = [rng.randrange(6) for _ in range(rng.randrange(12))]
        assert kernels.lcs_length_ids(a, b) == _kernels_py.lcs_length_ids(a, b)
        n = rng.randrange(1, 4)
        assert kernels.ngram_clip(a, [b], n) == _kernels_py.ngram_clip(a, [b], n)


def test_empty_inputs():
    assert kernels.lcs_length_ids([], [1, 2]) == 0
    assert kernels.ngram_clip([], [[1, 2]], 1) == (0, 0)
    assert kernels.ngram_clip([1, 2], [[]], 1) == (0, 2)
