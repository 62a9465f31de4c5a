"""Minimum-N tables over a (rho, n) grid."""
from __future__ import annotations

from .construct import plan_minimum_N

RHO_RANGE = range(2, 7)
N_RANGE = range(3, 16)
CELL_WIDTH = 12


def grid_cells(rhos=RHO_RANGE, ns=N_RANGE) -> dict[tuple[int, int], str]:
    """Cell text for every (rho, n) with rho < n; see ConstructionPlan.cell."""
    return {(rho, n): plan_minimum_N(n, rho).cell() for rho in rhos for n in ns if n > rho}


def improved_cases(rhos=RHO_RANGE, ns=N_RANGE) -> list[tuple[int, int, int, int]]:
    """(rho, n, N via Hadamard expansion, N via weighing expansion) where the latter wins."""
    out = []
    for rho in rhos:
        for n in ns:
            if n <= rho:
                continue
            plan = plan_minimum_N(n, rho)
            if plan.improved:
                out.append((rho, n, plan.N2, plan.N))
    return out


def format_minimum_n_table(cells: dict[tuple[int, int], str], rhos=RHO_RANGE, ns=N_RANGE) -> str:
    w = CELL_WIDTH
    lines = ["rho\\n".ljust(6) + "".join(str(n).rjust(w) for n in ns)]
    for rho in rhos:
        row = str(rho).ljust(6) + "".join(cells.get((rho, n), "").rjust(w) for n in ns)
        lines.append(row.rstrip())
    return "\n".join(lines) + "\n"


def format_improved_table(cases: list[tuple[int, int, int, int]]) -> str:
    w = 9
    head = "(rho,n)".ljust(10) + "".join(f"({r},{n})".rjust(w) for r, n, _, _ in cases)
    h_row = "Method-H".ljust(10) + "".join(str(h).rjust(w) for _, _, h, _ in cases)
    w_row = "Method-W".ljust(10) + "".join(str(v).rjust(w) for _, _, _, v in cases)
    return "\n".join([head, h_row, w_row]) + "\n"


def table1() -> str:
    return format_minimum_n_table(grid_cells())


def table2() -> str:
    return format_improved_table(improved_cases())
