"""Pure-Python fallback for the compiled kernels in ``_speedups``.

Both modules expose the same two functions over int64 id arrays; see
``mcqforge.kernels`` for the selection logic.
"""

from collections import Counter


def lcs_length_ids(a, b) -> int:
    """Length of the longest common subsequence of two id sequences.

    Classic O(len(a) * len(b)) dynamic program over two rows.
    """
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    cur = [0] * (m + 1)
    for i in range(n):
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                cur[j + 1] = prev[j] + 1
            else:
                up = prev[j + 1]
                left = cur[j]
                cur[j + 1] = up if up >= left else left
        prev, cur = cur, prev
    return int(prev[m])


def ngram_clip(hyp, refs, n: int) -> tuple[int, int]:
    """Clipped n-gram matches of ``hyp`` against one or more references.

    Returns ``(clipped_matches, total_hyp_ngrams)``; hypothesis counts are
    clipped at the maximum count across references.
    """
    total = len(hyp) - n + 1
    if total <= 0:
        return (0, 0)
    ref_max: Counter = Counter()
    for ref in refs:
        counts = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
        for gram, c in counts.items():
            if c > ref_max[gram]:
                ref_max[gram] = c
    hyp_counts = Counter(tuple(hyp[i : i + n]) for i in range(total))
    clipped = sum(min(c, ref_max[gram]) for gram, c in hyp_counts.items())
    return (clipped, total)
