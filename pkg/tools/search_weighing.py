"""Backtracking search for weighing matrices W(n, k).

Used once to produce the literal entries in the shipped catalog; not imported
by the package. Usage: python tools/search_weighing.py N K
"""
import itertools
import sys

import numpy as np


def candidates(n, k):
    out = []
    for support in itertools.combinations(range(n), k):
        # first nonzero fixed to +1: rows are determined up to sign
        for signs in itertools.product((1, -1), repeat=k - 1):
            row = np.zeros(n, dtype=np.int64)
            row[list(support)] = (1,) + signs
            out.append(row)
    return np.array(out)


def search(n, k):
    cands = candidates(n, k)
    gram = cands @ cands.T
    support = (cands != 0).astype(np.int64)
    first = np.zeros(n, dtype=np.int64)
    first[:k] = 1
    start = int(np.flatnonzero((cands == first).all(axis=1))[0])
    rows = [start]
    colcount = support[start].copy()

    def rec(alive):
        if len(rows) == n:
            return True
        # rows are taken in increasing candidate index to kill permutations
        for c in alive[alive > rows[-1]]:
            new = colcount + support[c]
            if (new > k).any():
                continue
            remaining = n - len(rows) - 1
            if ((k - new) > remaining).any():
                continue
            rows.append(c)
            colcount[:] = new
            ok = rec(alive[gram[c, alive] == 0])
            if ok:
                return True
            rows.pop()
            colcount[:] = new - support[c]
        return False

    alive = np.flatnonzero(gram[start] == 0)
    if rec(alive):
        return cands[rows]
    return None


if __name__ == "__main__":
    n, k = int(sys.argv[1]), int(sys.argv[2])
    w = search(n, k)
    if w is None:
        print("none")
    else:
        assert (w @ w.T == k * np.eye(n)).all() and (w.T @ w == k * np.eye(n)).all()
        for row in w:
            print("".join({1: "+", -1: "-", 0: "0"}[int(v)] for v in row))
