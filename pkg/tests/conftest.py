import sys

import numpy as np
import pytest

from ppchoice.design import PartialDesign

# Reference designs, '*' = inactive factor, 'u' = -1 in difference matrices.
SAT85_X = "11111000 1u1u0100 11uu0010 1uu10001 u0001111 0u001u1u 00u011uu 000u1uu1".split()
SAT85_D = [
    ("11111***", "00000***"),
    ("1010*1**", "0101*0**"),
    ("1100**1*", "0011**0*"),
    ("1001***1", "0110***0"),
    ("0***1111", "1***0000"),
    ("*0**1010", "*1**0101"),
    ("**0*1100", "**1*0011"),
    ("***01001", "***10110"),
]
D5 = [
    ("111111**", "000000**", "000111**", "111000**", "110000**"),
    ("101010**", "010101**", "010010**", "101101**", "100101**"),
    ("1100**11", "0011**00", "0010**11", "1101**00", "1111**11"),
    ("1001**10", "0110**01", "0111**10", "1000**01", "1010**10"),
    ("00**1111", "11**0000", "11**1111", "00**0000", "00**0011"),
    ("01**1010", "10**0101", "10**1010", "01**0101", "01**0110"),
    ("**001100", "**110011", "**101100", "**010011", "**110000"),
    ("**011001", "**100110", "**111001", "**000110", "**100101"),
]


def parse_x(rows):
    return np.array([[{"1": 1, "0": 0, "u": -1}[c] for c in r] for r in rows])


def parse_sets(rows, rho=None, fixed_level=0):
    """Design from rows of starred profile strings (no validation)."""
    levels = np.array([[[fixed_level if c == "*" else int(c) for c in p] for p in row] for row in rows])
    active = np.array([[c != "*" for c in row[0]] for row in rows])
    if rho is None:
        rho = int(active[0].sum())
    return PartialDesign(levels, active, rho)


def random_design(rng, N, n, m, rho):
    """Random structurally valid design (distinct options, rho active)."""
    levels = np.zeros((N, m, n), dtype=np.uint8)
    active = np.zeros((N, n), dtype=bool)
    for p in range(N):
        act = rng.choice(n, size=rho, replace=False)
        active[p, act] = True
        const = rng.integers(0, 2, size=n)
        while True:
            block = np.tile(const, (m, 1))
            block[:, act] = rng.integers(0, 2, size=(m, rho))
            if len({tuple(r) for r in block}) == m:
                break
        levels[p] = block
    return PartialDesign(levels, active, rho)


@pytest.fixture
def sat85_X():
    return parse_x(SAT85_X)


@pytest.fixture
def sat85_design():
    return parse_sets(SAT85_D)


@pytest.fixture
def d5():
    return parse_sets(D5)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
