"""Set-partition enumeration via restricted-growth strings.

``set_partitions`` yields every partition of a finite sequence into at most
a given number of nonempty blocks.  ``min_rank_deficient_partition`` is the
adversarial search used by the excitation checker: the smallest number of
nonempty blocks into which a set of regressor rows can be split with every
block's Gram matrix rank-deficient.  The search walks restricted-growth
strings depth-first and prunes any branch as soon as one block reaches full
rank, since adding rows to a full-rank block cannot lower its rank.
"""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

GRAM_RTOL = 1e-10


def set_partitions(items: Sequence, max_blocks: int) -> Iterator[list[list]]:
    """Yield all partitions of ``items`` into 1..max_blocks nonempty blocks.

    Partitions are produced in restricted-growth-string order, each as a
    list of blocks; blocks preserve the input ordering of their elements.
    """
    items = list(items)
    m = len(items)
    if m == 0 or max_blocks < 1:
        return
    code = [0] * m

    def rec(i: int, used: int):
        if i == m:
            blocks: list[list] = [[] for _ in range(used)]
            for idx, b in enumerate(code):
                blocks[b].append(items[idx])
            yield blocks
            return
        cap = min(used + 1, max_blocks)
        for b in range(cap):
            code[i] = b
            yield from rec(i + 1, max(used, b + 1))

    # the first element always opens block 0
    yield from rec(1, 1)


def gram_nonsingular(rows: np.ndarray, n: int, rtol: float = GRAM_RTOL) -> bool:
    """Whether sum_k x_k x_k^T over the given rows has full rank n.

    The decision is scale-invariant: the Gram is nonsingular when its
    smallest singular value exceeds ``rtol`` times its largest.
    """
    if rows.shape[0] == 0:
        return False
    gram = rows.T @ rows
    svals = np.linalg.svd(gram, compute_uv=False)
    return bool(svals[0] > 0.0 and svals[-1] > rtol * svals[0])


def min_rank_deficient_partition(
    rows: np.ndarray, max_blocks: int, rtol: float = GRAM_RTOL
) -> tuple[int, list[list[int]]] | None:
    """Smallest all-rank-deficient split of ``rows`` into <= max_blocks blocks.

    Returns ``(block_count, blocks)`` where blocks hold 0-based row indices,
    or None when every partition with at most ``max_blocks`` nonempty blocks
    contains a block of full rank.  Deterministic: for each block count the
    first witness in restricted-growth order is returned.
    """
    m, n = rows.shape
    if m == 0:
        return 0, []
    singular_cache: dict[frozenset[int], bool] = {}

    def block_singular(members: tuple[int, ...]) -> bool:
        key = frozenset(members)
        hit = singular_cache.get(key)
        if hit is None:
            hit = not gram_nonsingular(rows[list(members)], n, rtol)
            singular_cache[key] = hit
        return hit

    def search(target: int) -> list[list[int]] | None:
        blocks: list[list[int]] = []

        def rec(i: int) -> bool:
            if i == m:
                return True
            for b in range(min(len(blocks) + 1, target)):
                if b == len(blocks):
                    blocks.append([])
                blocks[b].append(i)
                if block_singular(tuple(blocks[b])) and rec(i + 1):
                    return True
                blocks[b].pop()
                if not blocks[b]:
                    blocks.pop()
            return False

        return [list(b) for b in blocks] if rec(0) else None

    for count in range(1, max_blocks + 1):
        found = search(count)
        if found is not None:
            return len(found), found
    return None
