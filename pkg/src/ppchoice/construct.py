"""Constructions of optimal partial-profile designs.

Paired designs (m = 2) come from a difference matrix X with X'X = (N rho / n) I:

* saturated: X = W(n, rho), N = n;
* weighing expansion: cyclic incidence of block size nu, each row's ones
  replaced by the nu columns of W(nu, rho), N = n nu / gcd(n, nu);
* Hadamard expansion: cyclic incidence of block size rho, ones replaced by
  the first rho columns of H_h(rho), N = n h(rho) / gcd(n, rho).

Larger choice sets are spawned from a paired design with generators, and
complement doubling gives designs for the broader main-effects model.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import catalog
from .design import (
    DesignError,
    PartialDesign,
    complement,
    paired_design_from_difference,
    stack,
    validate_structure,
)
from .verify import certify


class NotAvailable(LookupError):
    """The catalog (or generator search) cannot supply what was asked for."""


class GeneratorError(DesignError):
    pass


SATURATED = "saturated"
METHOD_W = "method-w"
METHOD_H = "method-h"


# -- paired designs -----------------------------------------------------------


def cyclic_incidence(n: int, k: int) -> np.ndarray:
    """n/gcd(n,k) x n 0-1 matrix; row b has ones at bk .. bk+k-1 (mod n)."""
    if not 1 <= k <= n:
        raise DesignError(f"block size k must lie in 1..n={n}, got {k}")
    rows = n // math.gcd(n, k)
    M = np.zeros((rows, n), dtype=np.int64)
    for b in range(rows):
        M[b, (b * k + np.arange(k)) % n] = 1
    return M


def expand_incidence(M: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """Replace the ones of each row of M, left to right, by ``columns``.

    ``columns`` is an r x k matrix whose k columns go in order into the k one
    positions; zeros become zero columns of length r.  Result has
    rows(M) * r rows.
    """
    r, k = columns.shape
    blocks = []
    for row in M:
        pos = np.flatnonzero(row)
        if pos.size != k:
            raise DesignError(f"incidence row has {pos.size} ones, expected {k}")
        block = np.zeros((r, M.shape[1]), dtype=np.int64)
        block[:, pos] = columns
        blocks.append(block)
    return np.vstack(blocks)


def saturated_difference(n: int, rho: int) -> np.ndarray:
    w = catalog.weighing(n, rho)
    if w is None:
        raise NotAvailable(f"no W({n},{rho}) available for a saturated design")
    return np.array(w.entries)


def method_w_difference(n: int, rho: int, nu: int) -> np.ndarray:
    if nu > n:
        raise DesignError(f"need n >= nu, got n={n}, nu={nu}")
    w = catalog.weighing(nu, rho)
    if w is None:
        raise NotAvailable(f"no W({nu},{rho}) available")
    return expand_incidence(cyclic_incidence(n, nu), w.entries)


def method_h_difference(n: int, rho: int) -> np.ndarray:
    if not 1 <= rho <= n:
        raise DesignError(f"rho must lie in 1..n={n}, got {rho}")
    r = catalog.h_of(rho)
    H = catalog.hadamard(r)
    return expand_incidence(cyclic_incidence(n, rho), H.entries[:, :rho])


def construct_saturated(n: int, rho: int, fixed_level: int = 0) -> PartialDesign:
    return paired_design_from_difference(saturated_difference(n, rho), rho, fixed_level)


def construct_method_w(n: int, rho: int, nu: int, fixed_level: int = 0) -> PartialDesign:
    return paired_design_from_difference(method_w_difference(n, rho, nu), rho, fixed_level)


def construct_method_h(n: int, rho: int, fixed_level: int = 0) -> PartialDesign:
    return paired_design_from_difference(method_h_difference(n, rho), rho, fixed_level)


# -- minimum-N planner ----------------------------------------------------------


@dataclass(frozen=True)
class ConstructionPlan:
    n: int
    rho: int
    method: str | None  # SATURATED, METHOD_W, METHOD_H, or None if unplannable
    N: int | None
    nu: int | None = None  # weighing order used by METHOD_W (n for SATURATED)
    h: int | None = None  # Hadamard order h(rho)
    N1: int | None = None  # best weighing expansion
    N2: int | None = None  # Hadamard expansion
    candidates: tuple[tuple[int, int], ...] = field(default=())  # (nu, K) pairs considered

    @property
    def plannable(self) -> bool:
        return self.method is not None

    @property
    def improved(self) -> bool:
        """Weighing expansion strictly beats the Hadamard expansion."""
        return self.method == METHOD_W and self.N2 is not None and self.N < self.N2

    def tag(self) -> str:
        """Short method tag: 'W', 'W(nu,rho)' or 'H(r)'."""
        if self.method == SATURATED:
            return "W"
        if self.method == METHOD_W:
            return f"W({self.nu},{self.rho})"
        if self.method == METHOD_H:
            return f"H({self.h})"
        return "-"

    def cell(self) -> str:
        """Table cell text: N, '*' when improved, then the tag."""
        if not self.plannable:
            return "-"
        return f"{self.N}{'*' if self.improved else ''} {self.tag()}"

    def describe(self) -> str:
        if self.method == SATURATED:
            return f"N={self.N}, saturated W({self.n},{self.rho})"
        if self.method == METHOD_W:
            return f"N={self.N}, Method-W with W({self.nu},{self.rho})"
        if self.method == METHOD_H:
            return f"N={self.N}, Method-H with H{self.h}"
        return "not plannable"

    def build(self, fixed_level: int = 0) -> PartialDesign:
        if self.method == SATURATED:
            return construct_saturated(self.n, self.rho, fixed_level)
        if self.method == METHOD_W:
            return construct_method_w(self.n, self.rho, self.nu, fixed_level)
        if self.method == METHOD_H:
            return construct_method_h(self.n, self.rho, fixed_level)
        raise NotAvailable(f"no construction available for n={self.n}, rho={self.rho}")


def plan_minimum_N(n: int, rho: int) -> ConstructionPlan:
    """Smallest-N paired construction available for (n, rho).

    1. W(n, rho) available -> saturated, N = n.
    2-4. K = n nu / gcd(n, nu) over available W(nu, rho), nu < n; N1 = min K.
    5. N2 = n h(rho) / gcd(n, rho).
    6. N = min(N1, N2).  Ties go to the weighing expansion, except when its
       W(nu, rho) is the Hadamard matrix H_rho, where the two constructions
       coincide and the Hadamard label is used.
    """
    if not 1 <= rho <= n:
        raise DesignError(f"need 1 <= rho <= n, got n={n}, rho={rho}")
    if catalog.weighing(n, rho) is not None:
        return ConstructionPlan(n, rho, SATURATED, n, nu=n)

    cands = tuple(
        (nu, n * nu // math.gcd(n, nu)) for nu in catalog.smallest_weighing_orders(rho, n - 1)
    )
    N1 = nu = None
    if cands:
        nu, N1 = min(cands, key=lambda c: (c[1], c[0]))
    h = catalog.h_of(rho)
    N2 = n * h // math.gcd(n, rho)

    if N1 is not None and (N1 < N2 or (N1 == N2 and nu != rho)):
        method, N = METHOD_W, N1
    else:
        method, N = METHOD_H, N2
    return ConstructionPlan(n, rho, method, N, nu=nu if method == METHOD_W else None, h=h,
                            N1=N1, N2=N2, candidates=cands)


def construct_paired(n: int, rho: int, fixed_level: int = 0) -> PartialDesign:
    return plan_minimum_N(n, rho).build(fixed_level)


# -- generators ---------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise GeneratorError(f"generator bits must be 0/1, got {self.bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "Generator":
        text = text.strip()
        if not text or any(c not in "01" for c in text):
            raise GeneratorError(f"generator must be a 0/1 string, got {text!r}")
        return cls(tuple(int(c) for c in text))

    @property
    def weight(self) -> int:
        return sum(self.bits)

    @property
    def n(self) -> int:
        return len(self.bits)

    def complement(self) -> "Generator":
        return Generator(tuple(1 - b for b in self.bits))

    def __str__(self):
        return "".join(map(str, self.bits))


def weight_range(n: int, rho: int) -> range:
    """Allowed generator weights: min(rho, n-rho) < w < max(rho, n-rho)."""
    lo, hi = sorted((rho, n - rho))
    return range(lo + 1, hi)


@dataclass(frozen=True)
class GeneratorSet:
    generators: tuple[Generator, ...]
    rho: int

    def __post_init__(self):
        gens = tuple(g if isinstance(g, Generator) else Generator.parse(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            return
        n = gens[0].n
        allowed = weight_range(n, self.rho)
        for g in gens:
            if g.n != n:
                raise GeneratorError(f"generators have different lengths: {gens[0]} vs {g}")
            if g.weight not in allowed:
                raise GeneratorError(
                    f"generator {g} has weight {g.weight}; need "
                    f"{allowed.start - 1} < w < {allowed.stop} for n={n}, rho={self.rho}"
                )
        for a, b in itertools.combinations(gens, 2):
            if a == b:
                raise GeneratorError(f"generator {a} appears twice")
            if a.complement() == b:
                raise GeneratorError(f"generators {a} and {b} are complements of each other")

    @property
    def alpha(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


def apply_generator(levels: np.ndarray, active: np.ndarray, g: Generator | Sequence[int]) -> np.ndarray:
    """Add ``g`` mod 2 on active positions of each row; inactive ones unchanged.

    ``levels`` is an N x n option matrix, ``active`` the N x n mask.
    """
    bits = np.asarray(g.bits if isinstance(g, Generator) else g, dtype=np.uint8)
    levels = np.asarray(levels, dtype=np.uint8)
    if bits.shape != (levels.shape[-1],):
        raise GeneratorError(f"generator length {bits.size} does not match n={levels.shape[-1]}")
    return levels ^ (bits & np.asarray(active, dtype=np.uint8))


def spawn_options(d2: PartialDesign, generators: Iterable[Generator], m: int) -> PartialDesign:
    """A1, A2, A1+g1, A2+g1, A1+g2, ... truncated to the first m options.

    No validation; see :func:`extend_to_m` for the checked version.
    """
    if d2.m != 2:
        raise DesignError(f"base design must be paired (m=2), got m={d2.m}")
    a1, a2 = d2.option_matrix(0), d2.option_matrix(1)
    options = [a1, a2]
    for g in generators:
        options += [apply_generator(a1, d2.active, g), apply_generator(a2, d2.active, g)]
    if m > len(options):
        raise GeneratorError(f"m={m} needs at least {math.ceil((m - 2) / 2)} generators")
    return PartialDesign(np.stack(options[:m], axis=1), d2.active, d2.rho)


def extend_to_m(d2: PartialDesign, G: GeneratorSet | Sequence, m: int, require_optimal: bool = True) -> PartialDesign:
    """Extend a paired design to choice sets of size m with generators.

    Raises GeneratorError on weight-range or complement violations, and when
    the result contains repeated options in a set.
    """
    if not isinstance(G, GeneratorSet):
        G = GeneratorSet(tuple(G), d2.rho)
    if G.generators and G.generators[0].n != d2.n:
        raise GeneratorError(f"generator length {G.generators[0].n} does not match n={d2.n}")
    if not 2 <= m <= 2 * G.alpha + 2:
        raise GeneratorError(f"m={m} outside 2..{2 * G.alpha + 2} for {G.alpha} generators")
    if require_optimal and not certify(d2, "main").passed:
        raise DesignError("base paired design does not pass the main-effects certificate")
    d = spawn_options(d2, G.generators, m)
    report = validate_structure(d)
    if not report.ok:
        dup = report.by_kind("duplicate")
        where = ", ".join(sorted({str(i.set_index + 1) for i in dup}))
        raise GeneratorError(f"generators produce repeated options in set(s) {where}")
    return d


def _candidate_generators(n: int, rho: int) -> Iterable[Generator]:
    for w in weight_range(n, rho):
        for pos in itertools.combinations(range(n), w):
            bits = [0] * n
            for p in pos:
                bits[p] = 1
            yield Generator(tuple(bits))


def auto_generators(d2: PartialDesign, count: int, m: int | None = None, max_nodes: int = 100_000) -> GeneratorSet:
    """Deterministic search for ``count`` generators usable on ``d2``.

    Candidates run through allowed weights in increasing order and, within a
    weight, in the order of their support positions (lexicographic
    combinations).  A depth-first search keeps a candidate only if the
    extended design has distinct options in every set and passes the
    main-effects certificate.
    """
    n, rho = d2.n, d2.rho
    if not weight_range(n, rho):
        raise NotAvailable(
            f"empty generator weight range for n={n}, rho={rho}: "
            f"need {min(rho, n - rho)} < w < {max(rho, n - rho)}"
        )
    if count == 0:
        return GeneratorSet((), rho)
    target_m = 2 * count + 2 if m is None else m
    # A1 + g must differ from A1 and A2 in every set, whatever else is chosen
    pool = [g for g in _candidate_generators(n, rho) if validate_structure(spawn_options(d2, [g], 3)).ok]
    nodes = 0

    def ok(chosen):
        k = min(target_m, 2 * len(chosen) + 2)
        d = spawn_options(d2, chosen, k)
        return validate_structure(d).ok and certify(d, "main").passed

    def search(start, chosen):
        nonlocal nodes
        if len(chosen) == count:
            return chosen
        for i in range(start, len(pool)):
            nodes += 1
            if nodes > max_nodes:
                return None
            g = pool[i]
            if any(g.complement() == c for c in chosen):
                continue
            trial = chosen + [g]
            if ok(trial):
                found = search(i + 1, trial)
                if found is not None:
                    return found
        return None

    found = search(0, [])
    if found is None:
        raise NotAvailable(f"no set of {count} generators found for n={n}, rho={rho}")
    return GeneratorSet(tuple(found), rho)


# -- broader model --------------------------------------------------------------


def construct_broader(d: PartialDesign, check: bool = True) -> PartialDesign:
    """Stack d over its complement; optimal under the broader model."""
    if check and not certify(d, "main").passed:
        raise DesignError("input design does not pass the main-effects certificate")
    return stack(d, complement(d))


def construct(n: int, rho: int, m: int = 2, model: str = "main", generators: Sequence | None = None,
              fixed_level: int = 0) -> PartialDesign:
    """Plan, build, extend and (for the broader model) double a design.

    ``generators=None`` with m > 2 runs :func:`auto_generators`.
    """
    if model not in ("main", "broader"):
        raise ValueError(f"model must be 'main' or 'broader', got {model!r}")
    plan = plan_minimum_N(n, rho)
    d = plan.build(fixed_level)
    if m > 2:
        alpha = math.ceil((m - 2) / 2)
        if generators is None:
            G = auto_generators(d, alpha, m)
        else:
            G = GeneratorSet(tuple(generators), rho)
        d = extend_to_m(d, G, m)
    if model == "broader":
        d = construct_broader(d)
    return d
