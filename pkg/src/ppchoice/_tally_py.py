"""Vectorised numpy implementation of the component-pair tallies.

Output convention shared with the compiled kernel (0-based factors):

* ``eta1_plus[h, k]`` / ``eta1_minus[h, k]``: pairs of type (00,11) / (01,10)
  on factors {h, k}; symmetric, zero diagonal.
* ``eta2_plus[h, k]`` / ``eta2_minus[h, k]``: pairs differing at h, agreeing
  at k with common level 1 / 0; zero diagonal.
* ``eta3_plus[h, k, l]`` / ``eta3_minus[h, k, l]``: pairs differing at h where
  the member with level 0 at h has k != l and the other has k == l (plus) or
  the reverse (minus); symmetric in (k, l), zero whenever h is in {k, l}.
"""
import numpy as np


def pair_arrays(levels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    N, m, n = levels.shape
    i, j = np.triu_indices(m, k=1)
    a = levels[:, i, :].reshape(-1, n).astype(np.int64)
    b = levels[:, j, :].reshape(-1, n).astype(np.int64)
    return a, b


def tally(levels: np.ndarray, broader: bool = True) -> dict[str, np.ndarray]:
    levels = np.ascontiguousarray(levels, dtype=np.uint8)
    n = levels.shape[2]
    a, b = pair_arrays(levels)
    d = a ^ b
    one = d * a
    zero = d * (1 - a)
    out = {
        "eta1_plus": one.T @ one + zero.T @ zero,
        "eta1_minus": one.T @ zero + zero.T @ one,
    }
    np.fill_diagonal(out["eta1_plus"], 0)
    np.fill_diagonal(out["eta1_minus"], 0)
    if not broader:
        return out

    same = 1 - d
    out["eta2_plus"] = d.T @ (same * a)
    out["eta2_minus"] = d.T @ (same * (1 - a))

    ea = a[:, :, None] ^ a[:, None, :]
    eb = b[:, :, None] ^ b[:, None, :]
    f = ea * (1 - eb)
    g = eb * (1 - ea)
    # "zero" marks pairs where a carries the 0 at h, "one" where b does
    plus = np.einsum("ph,pkl->hkl", zero, f) + np.einsum("ph,pkl->hkl", one, g)
    minus = np.einsum("ph,pkl->hkl", zero, g) + np.einsum("ph,pkl->hkl", one, f)
    idx = np.arange(n)
    for arr in (plus, minus):
        arr[idx, idx, :] = 0
        arr[idx, :, idx] = 0
    out["eta3_plus"] = plus
    out["eta3_minus"] = minus
    return out
