"""Pure-Python kernels. Reference implementation and fallback for ``_ckernels``.

All functions take sequences of Python ints (arbitrary size) and return
exact integers.
"""

from bisect import bisect_left, bisect_right


def count_pairs_brute(a, b):
    """(wins, ties, losses) over all pairs (x in a, y in b), wins meaning x > y."""
    wins = ties = losses = 0
    for x in a:
        for y in b:
            if x > y:
                wins += 1
            elif x == y:
                ties += 1
            else:
                losses += 1
    return wins, ties, losses


def count_pairs_merge(a, b):
    """Same counts as :func:`count_pairs_brute` in O((n1 + n2) log n2)."""
    sb = sorted(b)
    wins = ties = 0
    for x in a:
        lo = bisect_left(sb, x)
        wins += lo
        ties += bisect_right(sb, x, lo) - lo
    return wins, ties, len(a) * len(sb) - wins - ties


def midranks2(values):
    """Twice the midrank of each value among ``values``, in input order.

    Doubling keeps tied ranks integral: a tie block occupying 0-based sorted
    positions i..j-1 gets doubled rank i + j + 1.
    """
    n = len(values)
    order = sorted(range(n), key=values.__getitem__)
    out = [0] * n
    i = 0
    while i < n:
        j = i + 1
        v = values[order[i]]
        while j < n and values[order[j]] == v:
            j += 1
        r2 = i + j + 1
        for k in range(i, j):
            out[order[k]] = r2
        i = j
    return out
