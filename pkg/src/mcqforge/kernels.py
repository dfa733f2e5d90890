"""Kernel selection: compiled extension when built, pure Python otherwise.

Set ``MCQFORGE_PURE_PYTHON=1`` to force the fallback (used by the
benchmark to compare both implementations).
"""

import os

if os.environ.get("MCQFORGE_PURE_PYTHON") == "1":
    from mcqforge import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from mcqforge import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from mcqforge import _kernels_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"


def lcs_length_ids(a, b) -> int:
    return _impl.lcs_length_ids(a, b)


def ngram_clip(hyp, refs, n: int) -> tuple[int, int]:
    return _impl.ngram_clip(hyp, refs, n)
