"""Hadamard and weighing matrices.

Availability is catalog-relative: a matrix is "available" when one of the
constructions below produces it, not whenever it exists mathematically.

* Hadamard H_r: r in {1, 2}; Paley type I for r = q + 1 with q a prime,
  q = 3 (mod 4); Kronecker products of available orders (this includes
  Sylvester doubling).
* Weighing W(n, rho):
    - H_n when rho == n;
    - I_{n/rho} (x) H_rho when rho divides n;
    - a primitive entry from the shipped catalog file;
    - a direct sum diag(B1, B2) of two *base* matrices of weight rho, where
      a base matrix is a catalog entry or an I_k (x) H_rho block.

Direct sums are deliberately one level deep.  Deeper sums (W(12,3) from three
copies of W(4,3), say) are left out so that the planner's output lines up with
the published minimum-N table, which treats those orders as unavailable.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np


class CatalogError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WeighingMatrix:
    order: int
    weight: int
    entries: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        problem = weighing_problem(a, self.weight)
        if problem:
            raise CatalogError(f"W({self.order},{self.weight}) [{self.provenance}]: {problem}")
        if a.shape != (self.order, self.order):
            raise CatalogError(f"W({self.order},{self.weight}): shape {a.shape}")

    @property
    def is_hadamard(self) -> bool:
        return self.weight == self.order

    def __eq__(self, other):
        if not isinstance(other, WeighingMatrix):
            return NotImplemented
        return self.weight == other.weight and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"WeighingMatrix(order={self.order}, weight={self.weight}, provenance={self.provenance!r})"


def weighing_problem(a: np.ndarray, weight: int) -> str | None:
    """Return a description of why ``a`` is not a W(n, weight), or None."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return f"not square: shape {a.shape}"
    if not np.isin(a, (-1, 0, 1)).all():
        return "entries outside {-1, 0, +1}"
    target = weight * np.eye(a.shape[0], dtype=np.int64)
    if not np.array_equal(a @ a.T, target):
        return f"W W' != {weight} I"
    if not np.array_equal(a.T @ a, target):
        return f"W' W != {weight} I"
    return None


# -- catalog file -------------------------------------------------------------

_SYMBOLS = {"+": 1, "-": -1, "0": 0}


def parse_catalog(text: str, source: str = "<catalog>") -> list[WeighingMatrix]:
    """Parse catalog records; see data/weighing.txt for the grammar."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(maxsplit=3)
        if len(parts) < 3:
            raise CatalogError(f"{source}:{lineno}: expected '<order> <weight> <rows> [provenance]'")
        try:
            order, weight = int(parts[0]), int(parts[1])
        except ValueError:
            raise CatalogError(f"{source}:{lineno}: order and weight must be integers") from None
        rows = parts[2].split("/")
        if len(rows) != order or any(len(r) != order for r in rows):
            raise CatalogError(f"{source}:{lineno}: expected {order} rows of length {order}")
        try:
            entries = [[_SYMBOLS[c] for c in r] for r in rows]
        except KeyError as e:
            raise CatalogError(f"{source}:{lineno}: bad entry symbol {e.args[0]!r}") from None
        provenance = parts[3] if len(parts) > 3 else ""
        try:
            out.append(WeighingMatrix(order, weight, np.array(entries), provenance))
        except CatalogError as e:
            raise CatalogError(f"{source}:{lineno}: {e}") from None
    return out


def format_record(w: WeighingMatrix) -> str:
    sym = {1: "+", -1: "-", 0: "0"}
    rows = "/".join("".join(sym[int(v)] for v in row) for row in w.entries)
    return f"{w.order} {w.weight} {rows} {w.provenance}".rstrip()


@functools.lru_cache(maxsize=None)
def catalog_entries() -> tuple[WeighingMatrix, ...]:
    text = resources.files("ppchoice").joinpath("data/weighing.txt").read_text()
    return tuple(parse_catalog(text, "weighing.txt"))


def _catalog_lookup(order: int, weight: int) -> WeighingMatrix | None:
    for w in catalog_entries():
        if w.order == order and w.weight == weight:
            return w
    return None


# -- Hadamard -----------------------------------------------------------------


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % f for f in range(2, math.isqrt(q) + 1))


def paley_hadamard(q: int) -> np.ndarray:
    """Paley type I Hadamard matrix of order q + 1 (q prime, q = 3 mod 4)."""
    if not (is_prime(q) and q % 4 == 3):
        raise CatalogError(f"Paley type I needs a prime q = 3 (mod 4), got {q}")
    residues = {(x * x) % q for x in range(1, q)}
    chi = np.array([0] + [1 if x in residues else -1 for x in range(1, q)])
    # Jacobsthal matrix Q[i, j] = chi(j - i); skew since -1 is a non-residue
    Q = chi[(np.arange(q)[None, :] - np.arange(q)[:, None]) % q]
    S = np.zeros((q + 1, q + 1), dtype=np.int64)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    return S + np.eye(q + 1, dtype=np.int64)


@functools.lru_cache(maxsize=None)
def _hadamard_entries(r: int) -> np.ndarray | None:
    if r < 1:
        return None
    if r == 1:
        return np.ones((1, 1), dtype=np.int64)
    if r == 2:
        return np.array([[1, 1], [1, -1]], dtype=np.int64)
    if r % 4:
        return None
    if r % 2 == 0:
        half = _hadamard_entries(r // 2)
        if half is not None:
            return np.kron(np.array([[1, 1], [1, -1]]), half)
    if is_prime(r - 1) and (r - 1) % 4 == 3:
        return paley_hadamard(r - 1)
    for a in range(4, math.isqrt(r) + 1):
        if r % a == 0:
            ha, hb = _hadamard_entries(a), _hadamard_entries(r // a)
            if ha is not None and hb is not None:
                return np.kron(ha, hb)
    w = _catalog_lookup(r, r)
    return None if w is None else w.entries


def hadamard(r: int) -> WeighingMatrix | None:
    """H_r with H H' = r I, or None when no construction here yields it."""
    h = _hadamard_entries(r)
    if h is None:
        return None
    return WeighingMatrix(r, r, h, provenance=f"Hadamard H_{r}")


def h_of(rho: int) -> int:
    """Least r >= rho for which H_r is available."""
    if rho < 1:
        raise CatalogError(f"rho must be positive, got {rho}")
    r = rho
    while _hadamard_entries(r) is None:
        r += 1
    return r


# -- weighing -----------------------------------------------------------------


def _base(order: int, weight: int) -> WeighingMatrix | None:
    if order == weight:
        return hadamard(order)
    if order % weight == 0 and _hadamard_entries(weight) is not None:
        k = order // weight
        return WeighingMatrix(
            order, weight, np.kron(np.eye(k, dtype=np.int64), _hadamard_entries(weight)),
            provenance=f"I_{k} (x) H_{weight}",
        )
    return _catalog_lookup(order, weight)


def direct_sum(a: WeighingMatrix, b: WeighingMatrix) -> WeighingMatrix:
    if a.weight != b.weight:
        raise CatalogError(f"direct sum needs equal weights, got {a.weight} and {b.weight}")
    n = a.order + b.order
    out = np.zeros((n, n), dtype=np.int64)
    out[: a.order, : a.order] = a.entries
    out[a.order:, a.order:] = b.entries
    return WeighingMatrix(n, a.weight, out, provenance=f"diag(W({a.order},{a.weight}), W({b.order},{b.weight}))")


@functools.lru_cache(maxsize=None)
def weighing(n: int, rho: int) -> WeighingMatrix | None:
    """A verified W(n, rho), or None when not available here."""
    if not 1 <= rho <= n:
        raise CatalogError(f"invalid weighing query W({n},{rho}): need 1 <= rho <= n")
    w = _base(n, rho)
    if w is not None:
        return w
    for a in range(rho, n - rho + 1):
        left, right = _base(a, rho), _base(n - a, rho)
        if left is not None and right is not None:
            return direct_sum(left, right)
    return None


def smallest_weighing_orders(rho: int, n_max: int) -> list[int]:
    """Sorted orders nu <= n_max with W(nu, rho) available."""
    return [nu for nu in range(rho, n_max + 1) if weighing(nu, rho) is not None]
