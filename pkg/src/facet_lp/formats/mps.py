"""Reader and writer for a minimal free-format MPS subset.

Supported sections are NAME, ROWS (N/E/G/L), COLUMNS, RHS, BOUNDS (LO/UP/FR only) and ENDATA.
The objective is always minimized and an OBJSENSE section is refused. The reader converts the
model to standard form:

- L rows get a slack column with coefficient +1, G rows a surplus column with coefficient -1.
- LO bounds shift the variable, UP bounds add a row x + s = u with its own slack column.
- FR variables are split into x+ - x-; the x- columns follow the original columns.

Columns keep their first-appearance order; slack columns are named `_s<k>` and come last.
"""
from dataclasses import dataclass
from dataclasses import field
from typing import Dict
from typing import List
from typing import Optional
from typing import Set

import numpy as np

from facet_lp.errors import ParseError
from facet_lp.errors import UnsupportedBound
from facet_lp.errors import UnsupportedSection
from facet_lp.lp.data_structures import StandardFormLP


SECTIONS = {"NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"}
ROW_TYPES = {"N", "E", "G", "L"}
BOUND_TYPES = {"LO", "UP", "FR"}


@dataclass
class MpsModel:
    """Raw model collected from the sections, before the conversion to standard form."""

    objective_row: Optional[str] = None
    free_rows: Set[str] = field(default_factory=set)
    row_types: Dict[str, str] = field(default_factory=dict)
    columns: Dict[str, Dict[str, float]] = field(default_factory=dict)
    rhs: Dict[str, float] = field(default_factory=dict)
    lower: Dict[str, float] = field(default_factory=dict)
    upper: Dict[str, float] = field(default_factory=dict)
    free: Set[str] = field(default_factory=set)


def _number(token: str, line: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected a number, got {token!r}", line) from None


def _pairs(tokens: List[str], line: int) -> List[List[str]]:
    if len(tokens) % 2:
        raise ParseError("row names and values must come in pairs", line)
    return [tokens[k : k + 2] for k in range(0, len(tokens), 2)]


class MpsReader:
    """Line-by-line reader that switches mode on section headers."""

    def __init__(self) -> None:
        """Start before the first section."""
        self.model = MpsModel()
        self.mode = ""

    def header(self, tokens: List[str], line: int) -> None:
        """Enter a new section.

        Args:
            tokens (List[str]): the header line split on whitespace
            line (int): one-based line number
        """
        section = tokens[0].upper()
        if section not in SECTIONS:
            raise UnsupportedSection(f"line {line}: section {section} is not supported")
        self.mode = section

    def data(self, tokens: List[str], line: int) -> None:
        """Add a data line to the model according to the current mode.

        Args:
            tokens (List[str]): the data line split on whitespace
            line (int): one-based line number
        """
        if self.mode in ("", "NAME"):
            raise ParseError("data line outside of a section", line)
        getattr(self, f"_{self.mode.lower()}")(tokens, line)

    def _rows(self, tokens: List[str], line: int) -> None:
        if len(tokens) != 2 or tokens[0].upper() not in ROW_TYPES:
            raise ParseError(f"malformed row definition {' '.join(tokens)!r}", line)
        kind, name = tokens[0].upper(), tokens[1]
        if name in self.model.row_types or name in self.model.free_rows:
            raise ParseError(f"row {name} defined twice", line)
        if kind == "N":
            if self.model.objective_row is None:
                self.model.objective_row = name
            else:
                self.model.free_rows.add(name)
        else:
            self.model.row_types[name] = kind

    def _columns(self, tokens: List[str], line: int) -> None:
        if "'MARKER'" in tokens:
            raise UnsupportedSection(f"line {line}: integer markers are not supported")
        column = self.model.columns.setdefault(tokens[0], {})
        for row, value in _pairs(tokens[1:], line):
            if row != self.model.objective_row and row not in self.model.row_types:
                if row in self.model.free_rows:
                    continue
                raise ParseError(f"unknown row {row}", line)
            column[row] = _number(value, line)

    def _rhs(self, tokens: List[str], line: int) -> None:
        for row, value in _pairs(tokens[len(tokens) % 2 :], line):
            if row in self.model.row_types:
                self.model.rhs[row] = _number(value, line)
            elif row != self.model.objective_row and row not in self.model.free_rows:
                raise ParseError(f"unknown row {row}", line)

    def _bounds(self, tokens: List[str], line: int) -> None:
        kind = tokens[0].upper()
        if kind not in BOUND_TYPES:
            raise UnsupportedBound(f"line {line}: bound type {kind} is not supported")
        width = 2 if kind == "FR" else 3
        if len(tokens) not in (width, width + 1):
            raise ParseError(f"malformed {kind} bound", line)
        column = tokens[len(tokens) - width + 1]
        if column not in self.model.columns:
            raise ParseError(f"bound on unknown column {column}", line)
        if kind == "FR":
            self.model.free.add(column)
        elif kind == "LO":
            self.model.lower[column] = _number(tokens[-1], line)
        else:
            self.model.upper[column] = _number(tokens[-1], line)


def _standard_form(model: MpsModel) -> StandardFormLP:
    rows = list(model.row_types)
    names = list(model.columns)
    index = {row: i for i, row in enumerate(rows)}
    A = np.zeros((len(rows), len(names)))
    c = np.zeros(len(names))
    for j, name in enumerate(names):
        for row, value in model.columns[name].items():
            if row == model.objective_row:
                c[j] = value
            else:
                A[index[row], j] = value
    b = np.array([model.rhs.get(row, 0.0) for row in rows])

    conflicts = sorted(model.free & (set(model.lower) | set(model.upper)))
    if conflicts:
        raise UnsupportedBound(f"free columns {conflicts} also have a finite bound")
    lower = np.array([model.lower.get(name, 0.0) for name in names])
    b = b - A @ lower

    bounded = [j for j, name in enumerate(names) if name in model.upper]
    bound_rows = np.zeros((len(bounded), len(names)))
    for k, j in enumerate(bounded):
        bound_rows[k, j] = 1.0
    A = np.vstack([A, bound_rows])
    b = np.concatenate([b, [model.upper[names[j]] - lower[j] for j in bounded]])
    kinds = [model.row_types[row] for row in rows] + ["L"] * len(bounded)

    split = [j for j, name in enumerate(names) if name in model.free]
    A = np.hstack([A, -A[:, split]])
    c = np.concatenate([c, -c[split]])
    names += [f"{names[j]}_neg" for j in split]

    slack_rows = [i for i, kind in enumerate(kinds) if kind != "E"]
    slacks = np.zeros((len(kinds), len(slack_rows)))
    for k, i in enumerate(slack_rows):
        slacks[i, k] = 1.0 if kinds[i] == "L" else -1.0
    A = np.hstack([A, slacks])
    c = np.concatenate([c, np.zeros(len(slack_rows))])
    names += [f"_s{k + 1}" for k in range(len(slack_rows))]
    return StandardFormLP(A, b, c, tuple(names))


def parse_mps(text: str) -> StandardFormLP:
    """Parse free-format MPS text into a standard-form LP.

    Args:
        text (str): the MPS text

    Returns:
        StandardFormLP: the LP in standard form, not yet validated

    Raises:
        ParseError: the text violates the grammar; the line number is attached
        UnsupportedSection: RANGES, integer markers, maximization or other unsupported sections
        UnsupportedBound: a bound type other than LO, UP and FR
    """
    reader = MpsReader()
    lines = text.splitlines()
    for number, raw in enumerate(lines, start=1):
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        tokens = raw.split()
        if raw[0].isspace():
            reader.data(tokens, number)
        elif tokens[0].upper() == "ENDATA":
            break
        else:
            reader.header(tokens, number)
    else:
        raise ParseError("missing ENDATA", len(lines) + 1)

    if not reader.model.row_types:
        raise ParseError("no constraint rows", len(lines))
    if not reader.model.columns:
        raise ParseError("no columns", len(lines))
    return _standard_form(reader.model)


def _format(value: float) -> str:
    return repr(float(value))


def write_mps(lp: StandardFormLP, name: str = "FACETLP") -> str:
    """Write an LP as free-format MPS with equality rows R1..Rm and objective row COST.

    Args:
        lp (StandardFormLP): the LP
        name (str): model name for the NAME section

    Returns:
        str: the MPS text
    """
    out = [f"NAME {name}", "ROWS", " N COST"]
    out += [f" E R{i + 1}" for i in range(lp.m)]
    out.append("COLUMNS")
    for j in range(lp.n):
        column = lp.variable_name(j)
        entries = [("COST", lp.objective[j])] + [(f"R{i + 1}", lp.A[i, j]) for i in range(lp.m)]
        nonzero = [(row, value) for row, value in entries if value != 0.0] or entries[:1]
        out += [f" {column} {row} {_format(value)}" for row, value in nonzero]
    out.append("RHS")
    out += [f" RHS R{i + 1} {_format(v)}" for i, v in enumerate(lp.b) if v != 0.0]
    out.append("ENDATA")
    return "\n".join(out) + "\n"
