"""Text design files and CSV export.

Design file grammar (one item per line; '#' starts a comment line)::

    ppchoice-design 1
    n <int>
    m <int>
    rho <int>
    N <int>
    model <main|broader>
    fixed_level <0|1>
    sets
    <profile_1> <profile_2> ... <profile_m> | <levels>
    ...
    end
    [certificate
    <free text lines>
    end]

Each profile is n characters over {0, 1, *}; '*' marks an inactive factor
and must occupy the same positions in all m profiles of the set.  <levels>
lists the instantiated constant level of each '*' column, left to right, as
a 0/1 string, or '-' when the set has no inactive factor.  Header keys must
appear in the order shown.  The certificate block is informational and is
ignored when reading.

CSV export columns: set, option, f1 .. fn, active.  ``set`` and ``option``
are 1-based; f1..fn hold instantiated levels; ``active`` is the n-character
0/1 mask of the set.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .design import PartialDesign

MAGIC = "ppchoice-design 1"
HEADER_KEYS = ("n", "m", "rho", "N", "model", "fixed_level")


class DesignFileError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class DesignFile:
    design: PartialDesign
    model: str = "main"
    fixed_level: int = 0
    certificate: tuple[str, ...] = ()


def write_design(d: PartialDesign, model: str = "main", fixed_level: int = 0,
                 certificate: list[str] | tuple[str, ...] = ()) -> str:
    out = [MAGIC]
    for key, value in zip(HEADER_KEYS, (d.n, d.m, d.rho, d.N, model, fixed_level)):
        out.append(f"{key} {value}")
    out.append("sets")
    for s in d:
        inactive = np.flatnonzero(~s.active)
        levels = "".join(str(int(s.profiles[0, r])) for r in inactive) or "-"
        out.append(" ".join(s.render()) + " | " + levels)
    out.append("end")
    if certificate:
        out.append("certificate")
        out.extend(certificate)
        out.append("end")
    return "\n".join(out) + "\n"


def read_design(text: str) -> DesignFile:
    lines = [(i, ln.rstrip("\n")) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 1
            raise DesignFileError(f"unexpected end of file, expected {what}", last)
        item = lines[pos]
        pos += 1
        return item

    lineno, line = take("header")
    if line.strip() != MAGIC:
        raise DesignFileError(f"expected '{MAGIC}'", lineno, 1)
    header = {}
    for key in HEADER_KEYS:
        lineno, line = take(f"'{key}'")
        parts = line.split()
        if len(parts) != 2 or parts[0] != key:
            raise DesignFileError(f"expected '{key} <value>'", lineno, 1)
        value = parts[1]
        col = line.index(value) + 1
        if key == "model":
            if value not in ("main", "broader"):
                raise DesignFileError(f"model must be main or broader, got {value!r}", lineno, col)
            header[key] = value
        else:
            try:
                header[key] = int(value)
            except ValueError:
                raise DesignFileError(f"{key} must be an integer, got {value!r}", lineno, col) from None
    n, m, rho, N = (header[k] for k in ("n", "m", "rho", "N"))
    if n < 1 or m < 2 or not 1 <= rho <= n or N < 0:
        raise DesignFileError(f"invalid header values n={n} m={m} rho={rho} N={N}", lineno)
    if header["fixed_level"] not in (0, 1):
        raise DesignFileError("fixed_level must be 0 or 1", lineno)

    lineno, line = take("'sets'")
    if line.strip() != "sets":
        raise DesignFileError("expected 'sets'", lineno, 1)

    levels = np.zeros((N, m, n), dtype=np.uint8)
    active = np.zeros((N, n), dtype=bool)
    for p in range(N):
        lineno, line = take(f"choice set {p + 1}")
        _parse_set(line, lineno, n, m, rho, levels[p], active[p])
    lineno, line = take("'end'")
    if line.strip() != "end":
        raise DesignFileError(f"expected 'end' after {N} sets", lineno, 1)

    certificate: list[str] = []
    if pos < len(lines):
        lineno, line = take("'certificate'")
        if line.strip() != "certificate":
            raise DesignFileError("expected 'certificate' block or end of file", lineno, 1)
        while True:
            lineno, line = take("'end' closing the certificate")
            if line.strip() == "end":
                break
            certificate.append(line)
        if pos < len(lines):
            raise DesignFileError("unexpected content after certificate", lines[pos][0], 1)

    design = PartialDesign(levels, active, rho)
    return DesignFile(design, header["model"], header["fixed_level"], tuple(certificate))


def _parse_set(line, lineno, n, m, rho, levels, active):
    if "|" not in line:
        raise DesignFileError("missing '|' before the fixed levels", lineno)
    bar = line.index("|")
    left, right = line[:bar], line[bar + 1:]
    tokens = []
    i = 0
    while i < len(left):
        if left[i].isspace():
            i += 1
            continue
        j = i
        while j < len(left) and not left[j].isspace():
            j += 1
        tokens.append((i + 1, left[i:j]))
        i = j
    if len(tokens) != m:
        raise DesignFileError(f"expected {m} profiles, found {len(tokens)}", lineno, 1)
    mask = None
    for opt, (col, tok) in enumerate(tokens):
        if len(tok) != n:
            raise DesignFileError(f"profile has length {len(tok)}, expected n={n}", lineno, col)
        for r, ch in enumerate(tok):
            if ch not in "01*":
                raise DesignFileError(f"invalid character {ch!r}", lineno, col + r)
        this = np.array([c != "*" for c in tok])
        if mask is None:
            mask = this
        elif not np.array_equal(mask, this):
            r = int(np.flatnonzero(mask != this)[0])
            raise DesignFileError("'*' positions differ between profiles of the set", lineno, col + r)
        levels[opt] = [int(c) if c != "*" else 0 for c in tok]
    if int(mask.sum()) != rho:
        raise DesignFileError(f"set has {int(mask.sum())} active factors, expected rho={rho}", lineno, tokens[0][0])
    fixed = right.strip()
    col = bar + 2 + (len(right) - len(right.lstrip()))
    inactive = np.flatnonzero(~mask)
    if fixed == "-":
        fixed = ""
    if len(fixed) != inactive.size or any(c not in "01" for c in fixed):
        raise DesignFileError(
            f"expected {inactive.size} fixed levels over {{0,1}}"
            + (" or '-'" if inactive.size == 0 else ""), lineno, col)
    for r, c in zip(inactive, fixed):
        levels[:, r] = int(c)
    active[:] = mask


def load_design(path) -> DesignFile:
    with open(path) as fh:
        return read_design(fh.read())


def save_design(path, d: PartialDesign, **kwargs) -> None:
    with open(path, "w") as fh:
        fh.write(write_design(d, **kwargs))


def csv_header(n: int) -> list[str]:
    return ["set", "option", *[f"f{r + 1}" for r in range(n)], "active"]


def to_csv(d: PartialDesign) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(d.n))
    for p, s in enumerate(d, 1):
        mask = "".join("1" if a else "0" for a in s.active)
        for i, row in enumerate(s.profiles, 1):
            w.writerow([p, i, *map(int, row), mask])
    return buf.getvalue()

