"""Profiles, choice sets and partial-profile designs.

A design stores every profile level explicitly, including positions where a
factor is held constant within a choice set (the inactive positions).  The
active mask records which positions vary; inactive positions carry a concrete
constant level so that interaction balance counts are well defined.

Layout conventions (0-based throughout the library):

* ``levels[p, i, r]`` is the level (0/1) of factor ``r`` in option ``i`` of
  choice set ``p``; shape ``(N, m, n)``.
* ``active[p, r]`` is True when factor ``r`` is active in set ``p``; shape
  ``(N, n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np


class DesignError(ValueError):
    """Raised when a design or design operation is malformed."""


class StructureError(DesignError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("invalid design structure:\n" + "\n".join(map(str, report.issues)))


@dataclass(frozen=True)
class DesignParams:
    n: int
    m: int
    rho: int
    N: int

    def __post_init__(self):
        if self.n < 1:
            raise DesignError(f"n must be positive, got {self.n}")
        if self.m < 2:
            raise DesignError(f"m must be at least 2, got {self.m}")
        if not 1 <= self.rho <= self.n:
            raise DesignError(f"rho must lie in 1..n={self.n}, got {self.rho}")
        if self.N < 0:
            raise DesignError(f"N must be non-negative, got {self.N}")

    @property
    def component_pairs(self) -> int:
        """Total number of unordered option pairs, N m (m-1) / 2."""
        return self.N * self.m * (self.m - 1) // 2


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChoiceSet:
    profiles: np.ndarray  # (m, n) uint8
    active: np.ndarray  # (n,) bool

    def __post_init__(self):
        object.__setattr__(self, "profiles", _frozen(np.asarray(self.profiles, dtype=np.uint8)))
        object.__setattr__(self, "active", _frozen(np.asarray(self.active, dtype=bool)))

    @property
    def m(self) -> int:
        return self.profiles.shape[0]

    def render(self) -> list[str]:
        """Profiles as strings with '*' on inactive positions."""
        return [render_profile(row, self.active) for row in self.profiles]

    def __eq__(self, other):
        if not isinstance(other, ChoiceSet):
            return NotImplemented
        return (np.array_equal(self.profiles, other.profiles)
                and np.array_equal(self.active, other.active))


def render_profile(row: np.ndarray, active: np.ndarray) -> str:
    return "".join(str(int(v)) if a else "*" for v, a in zip(row, active))


@dataclass(frozen=True, eq=False)
class PartialDesign:
    """An immutable design d(N, n, m, rho).

    ``levels`` has shape (N, m, n) over {0, 1}; ``active`` has shape (N, n).
    Only shapes and value ranges are checked here; use
    :func:`validate_structure` (or ``check=True`` constructors) for the
    combinatorial invariants.
    """

    levels: np.ndarray
    active: np.ndarray
    rho: int
    params: DesignParams = field(init=False)

    def __post_init__(self):
        levels = np.asarray(self.levels)
        active = np.asarray(self.active, dtype=bool)
        if levels.ndim != 3:
            raise DesignError(f"levels must have shape (N, m, n), got {levels.shape}")
        N, m, n = levels.shape
        if active.shape != (N, n):
            raise DesignError(f"active mask shape {active.shape} does not match (N, n) = {(N, n)}")
        if levels.size and not np.isin(levels, (0, 1)).all():
            raise DesignError("levels must be 0 or 1")
        object.__setattr__(self, "levels", _frozen(levels.astype(np.uint8)))
        object.__setattr__(self, "active", _frozen(active))
        object.__setattr__(self, "params", DesignParams(n=n, m=m, rho=self.rho, N=N))

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def m(self) -> int:
        return self.params.m

    def __len__(self) -> int:
        return self.N

    def __iter__(self) -> Iterator[ChoiceSet]:
        for p in range(self.N):
            yield ChoiceSet(self.levels[p], self.active[p])

    @property
    def sets(self) -> list[ChoiceSet]:
        return list(self)

    def option_matrix(self, i: int) -> np.ndarray:
        """The N x n option matrix A_i (0-based i)."""
        return self.levels[:, i, :]

    def __eq__(self, other):
        if not isinstance(other, PartialDesign):
            return NotImplemented
        return (self.rho == other.rho
                and np.array_equal(self.levels, other.levels)
                and np.array_equal(self.active, other.active))

    def __repr__(self):
        p = self.params
        return f"PartialDesign(N={p.N}, n={p.n}, m={p.m}, rho={p.rho})"

    @classmethod
    def from_sets(cls, sets: Sequence[ChoiceSet], rho: int, check: bool = True) -> "PartialDesign":
        if not sets:
            raise DesignError("from_sets needs at least one set; use empty() for N=0")
        d = cls(np.stack([s.profiles for s in sets]), np.stack([s.active for s in sets]), rho)
        return d.checked() if check else d

    @classmethod
    def empty(cls, n: int, m: int, rho: int) -> "PartialDesign":
        return cls(np.zeros((0, m, n), dtype=np.uint8), np.zeros((0, n), dtype=bool), rho)

    def checked(self) -> "PartialDesign":
        report = validate_structure(self)
        if not report.ok:
            raise StructureError(report)
        return self


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Issue:
    kind: str  # "mask-size" | "constancy" | "duplicate"
    set_index: int
    detail: str
    position: int | None = None

    def __str__(self):
        where = f"set {self.set_index + 1}"
        if self.position is not None:
            where += f", position {self.position + 1}"
        return f"{self.kind}: {where}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def by_kind(self, kind: str) -> list[Issue]:
        return [i for i in self.issues if i.kind == kind]


def validate_structure(d: PartialDesign) -> ValidationReport:
    counts = d.active.sum(axis=1)
    varying = ~d.active & (d.levels != d.levels[:, :1, :]).any(axis=1)  # (N, n)
    iu, ju = np.triu_indices(d.m, k=1)
    same = (d.levels[:, iu, :] == d.levels[:, ju, :]).all(axis=2)  # (N, pairs)
    flagged = np.flatnonzero((counts != d.rho) | varying.any(axis=1) | same.any(axis=1))

    issues: list[Issue] = []
    for p in flagged.tolist():
        if counts[p] != d.rho:
            issues.append(Issue("mask-size", p, f"{int(counts[p])} active factors, expected rho={d.rho}"))
        for r in np.flatnonzero(varying[p]):
            col = d.levels[p, :, r]
            issues.append(Issue("constancy", p, f"inactive factor takes levels {sorted(set(col.tolist()))}", int(r)))
        for q in np.flatnonzero(same[p]):
            issues.append(Issue("duplicate", p, f"options {iu[q] + 1} and {ju[q] + 1} are identical"))
    return ValidationReport(tuple(issues))


# -- paired designs and difference matrices ---------------------------------


def check_difference_matrix(X: np.ndarray, rho: int) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2:
        raise DesignError(f"difference matrix must be 2-D, got shape {X.shape}")
    if X.size and not np.isin(X, (-1, 0, 1)).all():
        raise DesignError("difference matrix entries must be -1, 0 or +1")
    counts = (X != 0).sum(axis=1)
    bad = np.flatnonzero(counts != rho)
    if bad.size:
        p = int(bad[0])
        raise DesignError(
            f"malformed difference matrix: row {p + 1} has {int(counts[p])} nonzero entries, expected rho={rho}"
        )
    return X.astype(np.int64)


def paired_design_from_difference(X, rho: int | None = None, fixed_level: int = 0) -> PartialDesign:
    """Build the paired design (A1, A2) with A1 - A2 = X.

    +1 maps to (1, 0), -1 to (0, 1); zero positions are inactive and carry
    ``fixed_level`` in both options.  ``rho`` defaults to the nonzero count
    of the first row.
    """
    X = np.asarray(X)
    if rho is None:
        if X.ndim != 2 or X.shape[0] == 0:
            raise DesignError("cannot infer rho from an empty difference matrix")
        rho = int((X[0] != 0).sum())
    X = check_difference_matrix(X, rho)
    _check_level(fixed_level)
    N, n = X.shape
    a1 = np.where(X == 1, 1, np.where(X == -1, 0, fixed_level))
    a2 = np.where(X == 1, 0, np.where(X == -1, 1, fixed_level))
    return PartialDesign(np.stack([a1, a2], axis=1), X != 0, rho).checked()


def difference_from_paired_design(d: PartialDesign) -> np.ndarray:
    if d.m != 2:
        raise DesignError(f"difference matrix needs m=2, design has m={d.m}")
    X = d.levels[:, 0, :].astype(np.int64) - d.levels[:, 1, :].astype(np.int64)
    return np.where(d.active, X, 0)


# -- structural transformations ---------------------------------------------


def complement(d: PartialDesign) -> PartialDesign:
    """Flip every level 0 <-> 1; masks and parameters are unchanged."""
    return PartialDesign(1 - d.levels, d.active, d.rho)


def stack(*designs: PartialDesign) -> PartialDesign:
    if not designs:
        raise DesignError("stack needs at least one design")
    first = designs[0]
    for other in designs[1:]:
        if (other.n, other.m, other.rho) != (first.n, first.m, first.rho):
            raise DesignError(
                "cannot stack designs with different (n, m, rho): "
                f"{(first.n, first.m, first.rho)} vs {(other.n, other.m, other.rho)}"
            )
    return PartialDesign(
        np.concatenate([d.levels for d in designs]),
        np.concatenate([d.active for d in designs]),
        first.rho,
    )


def kronecker_inflate(d: PartialDesign, t: int, fixed_level: int | Sequence[int] = 0) -> PartialDesign:
    """Place ``t`` copies of ``d`` on disjoint factor blocks (A_i -> I_t (x) A_i).

    Block ``b`` contributes the N sets of ``d`` on factors ``b*n .. b*n+n-1``;
    every other factor is inactive in those sets.  ``fixed_level`` is the
    level of those padding factors: one value for all sets, or one value per
    set of ``d`` (reused in every block).  Complement-doubled designs need the
    mirrored halves padded with opposite levels to keep interaction balance.
    """
    if t < 1:
        raise DesignError(f"t must be at least 1, got {t}")
    pad = np.broadcast_to(np.asarray(fixed_level, dtype=np.int64), (d.N,))
    if not np.isin(pad, (0, 1)).all():
        raise DesignError("padding levels must be 0 or 1")
    N, m, n = d.levels.shape
    levels = np.empty((N * t, m, n * t), dtype=np.uint8)
    levels[:] = np.tile(pad, t)[:, None, None]
    active = np.zeros((N * t, n * t), dtype=bool)
    for b in range(t):
        rows = slice(b * N, (b + 1) * N)
        cols = slice(b * n, (b + 1) * n)
        levels[rows, :, cols] = d.levels
        active[rows, cols] = d.active
    return PartialDesign(levels, active, d.rho)


def _check_level(level: int) -> None:
    if level not in (0, 1):
        raise DesignError(f"fixed level must be 0 or 1, got {level!r}")
