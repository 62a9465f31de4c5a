"""Optimality certificates for partial-profile designs.

Two independent engines compute the main-effects information matrix:

* the counting engine tallies component-pair types and per-set level counts
  (:func:`tally_counts`, :func:`c_matrix_from_counts`); everything is integer;
* the brute-force engine builds the 2^n x 2^n treatment information matrix
  from the choice sets and contracts it with explicit contrast matrices
  (:func:`brute_force_lambda`, :func:`brute_force_c_matrix`).

Treatments are indexed lexicographically: profile (i_1 .. i_n) has index
sum_h i_h 2^(n-1-h) with factor 1 most significant.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .design import DesignParams, PartialDesign

MAX_BRUTE_FORCE_N = 12

Effect = tuple[int, ...]  # (h,) main effect, (k, l) two-factor interaction


class SizeGuardError(ValueError):
    pass


# -- counting engine ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BalanceCounts:
    eta1_plus: np.ndarray
    eta1_minus: np.ndarray
    n_ph: np.ndarray  # (N, n): zeros at factor h among the m options of set p
    params: DesignParams
    eta2_plus: np.ndarray | None = None
    eta2_minus: np.ndarray | None = None
    eta3_plus: np.ndarray | None = None
    eta3_minus: np.ndarray | None = None

    @property
    def component_pairs(self) -> int:
        return self.params.component_pairs

    @property
    def has_interactions(self) -> bool:
        return self.eta2_plus is not None


def tally_counts(d: PartialDesign, broader: bool = True) -> BalanceCounts:
    """Tally every component pair of ``d`` by type.

    With ``broader=False`` only the main-effect tallies are filled, which is
    much cheaper for large n.
    """
    raw = _kernels.tally(d.levels, broader=broader)
    n_ph = (d.levels == 0).sum(axis=1).astype(np.int64)
    return BalanceCounts(params=d.params, n_ph=n_ph, **raw)


@dataclass(frozen=True, eq=False)
class InformationMatrix:
    """Exact matrix ``numerator / denominator`` with integer numerator."""

    numerator: np.ndarray
    denominator: int

    def __post_init__(self):
        a = np.array(self.numerator, dtype=np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "numerator", a)

    def __getitem__(self, idx) -> Fraction:
        return Fraction(int(self.numerator[idx]), self.denominator)

    @property
    def shape(self):
        return self.numerator.shape

    def trace(self) -> Fraction:
        return Fraction(int(np.trace(self.numerator)), self.denominator)

    def is_diagonal(self) -> bool:
        off = self.numerator - np.diag(np.diag(self.numerator))
        return not off.any()

    def to_float(self) -> np.ndarray:
        return self.numerator / self.denominator

    def to_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(v), self.denominator) for v in row] for row in self.numerator]

    def __eq__(self, other):
        if not isinstance(other, InformationMatrix):
            return NotImplemented
        # cross-multiply to compare without normalising
        return np.array_equal(
            self.numerator.astype(object) * other.denominator,
            other.numerator.astype(object) * self.denominator,
        )

    def __repr__(self):
        return f"InformationMatrix(shape={self.shape}, denominator={self.denominator})"


def _scale(params: DesignParams) -> int:
    return 2 ** params.n * params.N * params.m ** 2


def c_matrix_from_counts(counts: BalanceCounts) -> InformationMatrix:
    """Main-effects C from pair tallies and per-set level counts."""
    p = counts.params
    num = 4 * (counts.eta1_plus - counts.eta1_minus)
    diag = (4 * counts.n_ph * (p.m - counts.n_ph)).sum(axis=0)
    num[np.diag_indices(p.n)] = diag
    return InformationMatrix(num, max(_scale(p), 1))


def c_matrix(d: PartialDesign) -> InformationMatrix:
    return c_matrix_from_counts(tally_counts(d, broader=False))


def c_matrix_from_difference(X: np.ndarray) -> InformationMatrix:
    """C = X'X / (N 2^n) for a paired design with difference matrix X."""
    X = np.asarray(X, dtype=np.int64)
    N, n = X.shape
    return InformationMatrix(X.T @ X, N * 2 ** n)


def trace_bound(params: DesignParams) -> Fraction:
    """Largest trace(C) attainable with the given N, n, m, rho (N >= 1)."""
    n, m, rho = params.n, params.m, params.rho
    if m % 2 == 0:
        return Fraction(rho, 2 ** n)
    return Fraction(rho * (m * m - 1), 2 ** n * m * m)


def optimal_nph(m: int) -> set[int]:
    if m % 2 == 0:
        return {m // 2}
    return {(m - 1) // 2, (m + 1) // 2}


# -- certificates ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OptimalityCertificate:
    model: str
    params: DesignParams
    c_matrix: InformationMatrix
    trace: Fraction
    trace_bound: Fraction
    connected: bool
    unbalanced_eta1: tuple[tuple[int, int], ...]
    bad_nph: tuple[tuple[int, int, int], ...]  # (set, factor, n_ph)
    unbalanced_eta2: tuple[tuple[int, int], ...] = ()
    unbalanced_eta3: tuple[tuple[int, int, int], ...] = ()

    @property
    def diagonal(self) -> bool:
        return not self.unbalanced_eta1

    @property
    def max_trace(self) -> bool:
        return not self.bad_nph and self.trace == self.trace_bound

    @property
    def interactions_null(self) -> bool:
        return not self.unbalanced_eta2 and not self.unbalanced_eta3

    @property
    def passed(self) -> bool:
        ok = self.diagonal and self.max_trace and self.connected
        if self.model == "broader":
            ok = ok and self.interactions_null
        return ok

    def summary(self) -> dict:
        return {
            "model": self.model,
            "passed": self.passed,
            "trace": str(self.trace),
            "trace_bound": str(self.trace_bound),
            "diagonal": self.diagonal,
            "max_trace": self.max_trace,
            "connected": self.connected,
            "unbalanced_eta1": len(self.unbalanced_eta1),
            "bad_nph": len(self.bad_nph),
            "unbalanced_eta2": len(self.unbalanced_eta2),
            "unbalanced_eta3": len(self.unbalanced_eta3),
        }

    def lines(self, limit: int = 20) -> list[str]:
        """Human-readable report; factor and set indices are 1-based."""
        p = self.params
        out = [
            f"model: {self.model}",
            f"design: N={p.N} n={p.n} m={p.m} rho={p.rho}",
            f"result: {'PASS' if self.passed else 'FAIL'}",
            f"trace(C): {self.trace} (bound {self.trace_bound})",
            f"diagonal C: {'yes' if self.diagonal else 'no'}",
            f"level balance: {'yes' if not self.bad_nph else 'no'}",
            f"connected: {'yes' if self.connected else 'no'}",
        ]

        def listing(title, items, fmt):
            if not items:
                return
            out.append(f"{title}: {len(items)}")
            for item in items[:limit]:
                out.append("  " + fmt(item))
            if len(items) > limit:
                out.append(f"  ... {len(items) - limit} more")

        listing("unbalanced eta1 (h,k)", self.unbalanced_eta1, lambda t: f"({t[0] + 1},{t[1] + 1})")
        listing("unbalanced n_ph (set,factor,n_ph)", self.bad_nph,
                lambda t: f"set {t[0] + 1} factor {t[1] + 1}: n_ph={t[2]}")
        if self.model == "broader":
            out.append(f"interaction block null: {'yes' if self.interactions_null else 'no'}")
            listing("unbalanced eta2 (h,k)", self.unbalanced_eta2, lambda t: f"({t[0] + 1},{t[1] + 1})")
            listing("unbalanced eta3 (h,{k,l})", self.unbalanced_eta3,
                    lambda t: f"({t[0] + 1},{{{t[1] + 1},{t[2] + 1}}})")
        return out


def certify(d: PartialDesign, model: str = "main") -> OptimalityCertificate:
    """Check the sufficient optimality conditions under ``model``.

    main: off-diagonal pair balance for every factor pair, the per-set level
    split on every active factor, trace at its bound, positive diagonal.
    broader: additionally the eta2 / eta3 balances, which make the
    main-effect x interaction block of the information matrix vanish.
    """
    if model not in ("main", "broader"):
        raise ValueError(f"model must be 'main' or 'broader', got {model!r}")
    counts = tally_counts(d, broader=(model == "broader"))
    C = c_matrix_from_counts(counts)
    n, m = d.n, d.m

    h_idx, k_idx = np.triu_indices(n, k=1)
    bad = counts.eta1_plus[h_idx, k_idx] != counts.eta1_minus[h_idx, k_idx]
    unbalanced1 = tuple((int(h), int(k)) for h, k in zip(h_idx[bad], k_idx[bad]))

    allowed = np.zeros(m + 1, dtype=bool)
    allowed[list(optimal_nph(m))] = True
    wrong = d.active & ~allowed[counts.n_ph]
    bad_nph = tuple((int(p), int(h), int(counts.n_ph[p, h])) for p, h in zip(*np.nonzero(wrong)))

    diag = np.diag(C.numerator)
    connected = C.is_diagonal() and bool((diag > 0).all()) and d.N > 0
    bound = trace_bound(d.params) if d.N else Fraction(0)

    unbalanced2: tuple = ()
    unbalanced3: tuple = ()
    if model == "broader":
        off = ~np.eye(n, dtype=bool)
        e2 = (counts.eta2_plus != counts.eta2_minus) & off
        unbalanced2 = tuple((int(h), int(k)) for h, k in zip(*np.nonzero(e2)))
        e3 = counts.eta3_plus != counts.eta3_minus
        unbalanced3 = tuple(
            (int(h), int(k), int(l)) for h, k, l in zip(*np.nonzero(e3)) if k < l and h != k and h != l
        )

    return OptimalityCertificate(
        model=model,
        params=d.params,
        c_matrix=C,
        trace=C.trace(),
        trace_bound=bound,
        connected=connected,
        unbalanced_eta1=unbalanced1,
        bad_nph=bad_nph,
        unbalanced_eta2=unbalanced2,
        unbalanced_eta3=unbalanced3,
    )


# -- brute-force engine ---------------------------------------------------------


def treatment_index(levels: np.ndarray) -> np.ndarray:
    """Lexicographic treatment index of each profile along the last axis."""
    levels = np.asarray(levels, dtype=np.int64)
    n = levels.shape[-1]
    weights = 2 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return levels @ weights


def _guard(n: int) -> None:
    if n > MAX_BRUTE_FORCE_N:
        raise SizeGuardError(f"brute-force engine limited to n <= {MAX_BRUTE_FORCE_N}, got n={n}")


@dataclass(frozen=True, eq=False)
class TreatmentInformation:
    """Treatment information matrix Lambda = star / denominator (2^n x 2^n)."""

    star: sp.csr_matrix  # integer entries
    denominator: int

    def toarray(self) -> np.ndarray:
        return self.star.toarray() / self.denominator


def brute_force_lambda(d: PartialDesign) -> TreatmentInformation:
    """Lambda from set membership counts.

    Diagonal (s, s): (m - 1) times the number of sets containing treatment s;
    off-diagonal (s, t): minus the number of sets containing both.  Repeated
    sets count with multiplicity.
    """
    _guard(d.n)
    size = 2 ** d.n
    idx = treatment_index(d.levels)  # (N, m)
    m = d.m
    rows, cols, vals = [], [], []
    for members in idx:
        rows.extend(members)
        cols.extend(members)
        vals.extend([m - 1] * m)
        for s, t in itertools.permutations(members, 2):
            rows.append(s)
            cols.append(t)
            vals.append(-1)
    star = sp.coo_matrix(
        (np.array(vals, dtype=np.int64), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(size, size),
    ).tocsr()
    return TreatmentInformation(star, max(d.N * m * m, 1))


def main_effect_contrasts(n: int) -> np.ndarray:
    """B_(1): row h is (1 1) x .. x (-1 1) x .. x (1 1), -1/1 at factor h."""
    ones, sign = np.array([1, 1]), np.array([-1, 1])
    rows = []
    for h in range(n):
        v = np.ones(1, dtype=np.int64)
        for r in range(n):
            v = np.kron(v, sign if r == h else ones)
        rows.append(v)
    return np.array(rows, dtype=np.int64).reshape(n, 2 ** n)


def interaction_pairs(n: int) -> list[tuple[int, int]]:
    """Two-factor interactions (k, l), k < l, in contrast-row order."""
    return list(itertools.combinations(range(n), 2))


def interaction_contrasts(n: int) -> np.ndarray:
    B1 = main_effect_contrasts(n)
    pairs = interaction_pairs(n)
    if not pairs:
        return np.zeros((0, 2 ** n), dtype=np.int64)
    return np.array([B1[k] * B1[l] for k, l in pairs], dtype=np.int64)


def _quadratic(B: np.ndarray, star: sp.csr_matrix, B2: np.ndarray | None = None) -> np.ndarray:
    right = B if B2 is None else B2
    return B @ np.asarray(star @ right.T)


def brute_force_c_matrix(d: PartialDesign) -> InformationMatrix:
    """(1 / 2^n) B_(1) Lambda B_(1)' computed from the full Lambda."""
    lam = brute_force_lambda(d)
    B1 = main_effect_contrasts(d.n)
    return InformationMatrix(_quadratic(B1, lam.star), lam.denominator * 2 ** d.n)


def contrast_values(levels: np.ndarray, effect: Effect) -> np.ndarray:
    """Contrast coefficient of each profile: product over factors of -1/+1."""
    levels = np.asarray(levels, dtype=np.int64)
    out = np.ones(levels.shape[:-1], dtype=np.int64)
    for f in effect:
        out = out * (2 * levels[..., f] - 1)
    return out


def pair_contrast(t_i: Sequence[int], t_j: Sequence[int], x: Effect, y: Effect) -> int:
    """B_x M^(ij) B_y' for one component pair: (x_i - x_j)(y_i - y_j)."""
    ti, tj = np.asarray(t_i), np.asarray(t_j)
    return int((contrast_values(ti, x) - contrast_values(tj, x)) * (contrast_values(ti, y) - contrast_values(tj, y)))


def contrast_product(x: Effect, y: Effect, d: PartialDesign) -> int:
    """Sum of pair contributions over all component pairs of ``d``.

    Equals the (x, y) entry of B Lambda* B' from the brute-force engine.
    """
    cx = contrast_values(d.levels, x)  # (N, m)
    cy = contrast_values(d.levels, y)
    i, j = np.triu_indices(d.m, k=1)
    return int(((cx[:, i] - cx[:, j]) * (cy[:, i] - cy[:, j])).sum())


def _pinv_sym(a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    vals, vecs = np.linalg.eigh(a)
    cutoff = tol * max(1.0, float(np.abs(vals).max(initial=0.0)))
    inv = np.where(np.abs(vals) > cutoff, 1.0 / np.where(vals == 0, 1, vals), 0.0)
    return (vecs * inv) @ vecs.T


@dataclass(frozen=True, eq=False)
class BroaderInformation:
    c: np.ndarray  # main-effects C under the broader model
    main_c: np.ndarray  # (1/2^n) B1 Lambda B1'
    cross: np.ndarray  # B1 Lambda B2' (scaled by Lambda's denominator)
    ginverse_discrepancy: float | None = None

    def trace(self) -> float:
        return float(np.trace(self.c))


def broader_c_matrix(d: PartialDesign, check_ginverse: bool = False, seed: int = 0) -> BroaderInformation:
    """Main-effects information under the broader model.

    C = (1/2^n) {B1 L B1' - B1 L B2' [B2 L B2']^- B2 L B1'} with a symmetric
    eigen-decomposition pseudo-inverse.  With ``check_ginverse`` the result is
    recomputed with a second, non-Moore-Penrose g-inverse
    G + (I - G A) U + V (I - A G) and the largest entrywise difference recorded.
    """
    lam = brute_force_lambda(d)
    B1 = main_effect_contrasts(d.n)
    B2 = interaction_contrasts(d.n)
    m11 = _quadratic(B1, lam.star).astype(float)
    m12 = _quadratic(B1, lam.star, B2).astype(float)
    m22 = _quadratic(B2, lam.star).astype(float)
    scale = lam.denominator * 2 ** d.n

    g = _pinv_sym(m22)
    c = (m11 - m12 @ g @ m12.T) / scale
    discrepancy = None
    if check_ginverse and m22.size:
        rng = np.random.default_rng(seed)
        u = rng.standard_normal(m22.shape)
        v = rng.standard_normal(m22.shape)
        eye = np.eye(m22.shape[0])
        g2 = g + (eye - g @ m22) @ u + v @ (eye - m22 @ g)
        c2 = (m11 - m12 @ g2 @ m12.T) / scale
        discrepancy = float(np.abs(c - c2).max())
    return BroaderInformation(c=c, main_c=m11 / scale, cross=m12 / lam.denominator,
                              ginverse_discrepancy=discrepancy)


def is_positive_definite(a: np.ndarray, tol: float = 1e-12) -> bool:
    """General connectivity check on a (float) information matrix."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return False
    return bool(np.linalg.eigvalsh((a + a.T) / 2).min() > tol)
