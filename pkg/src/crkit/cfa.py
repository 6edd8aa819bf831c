"""Configural frequency analysis of a cohort's citation matrix.

Observed counts are compared against the independence model: the expected
count for a cell is (row total * column total) / grand total, the cell's
standardized residual is z = (o - e) / sqrt(e), and chi-square is the sum
of the squared residuals with (r-1)(c-1) degrees of freedom. Per-reference
rows of z-values are discretized into +/0/- impact sequences, which a rule
chain classifies into citation-dynamics types.

The z-values serve pattern recognition, not inference: cells with expected
counts below 5 are reported as a warning list rather than rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConfigError, EmptyMatrix, ZeroExpected
from .model import CitationMatrix

TypeLabel = Literal[
    "hot_paper", "sleeping_beauty", "life_cycle", "constant_performer", "unclassified"
]

TYPE_LABELS: tuple[TypeLabel, ...] = (
    "hot_paper",
    "sleeping_beauty",
    "life_cycle",
    "constant_performer",
    "unclassified",
)

LOW_EXPECTED_LIMIT = 5.0


@dataclass(frozen=True)
class CfaResult:
    """Expected counts, standardized residuals, and table-level statistics."""

    rpy: int
    cr_ids: tuple[str, ...]
    citing_years: tuple[int, ...]
    expected: tuple[tuple[float, ...], ...]
    z: tuple[tuple[float, ...], ...]
    chi_square: float
    df: int
    low_expected_cells: tuple[tuple[int, int], ...]

    def z_row(self, cr_id: str) -> tuple[float, ...]:
        return self.z[self.cr_ids.index(cr_id)]


@dataclass(frozen=True)
class Sequence:
    """Discretized impact trajectory of one cited reference."""

    cr_id: str
    symbols: str
    theta: float


@dataclass(frozen=True)
class ClassifierParams:
    """Rule parameters: early window (hot papers), dormancy span (sleeping
    beauties), and the minimum sequence length worth classifying."""

    hot_window: int = 3
    sleep_years: int = 5
    min_length: int = 5

    def __post_init__(self) -> None:
        if self.hot_window < 1 or self.sleep_years < 1 or self.min_length < 1:
            raise ConfigError("classifier parameters must be >= 1")


def prune_matrix(
    matrix: CitationMatrix,
) -> tuple[CitationMatrix, tuple[str, ...], tuple[int, ...]]:
    """Drop all-zero rows and columns, which carry no information and would
    force zero expected counts. Returns (reduced matrix, dropped reference
    ids, dropped citing years)."""
    keep_rows = [i for i, total in enumerate(matrix.row_totals) if total > 0]
    keep_cols = [j for j, total in enumerate(matrix.col_totals) if total > 0]
    dropped_rows = tuple(
        matrix.cr_ids[i] for i in range(len(matrix.cr_ids)) if i not in keep_rows
    )
    dropped_cols = tuple(
        matrix.citing_years[j] for j in range(len(matrix.citing_years)) if j not in keep_cols
    )
    if not dropped_rows and not dropped_cols:
        return matrix, (), ()
    cells = tuple(tuple(matrix.cells[i][j] for j in keep_cols) for i in keep_rows)
    row_totals = tuple(sum(row) for row in cells)
    col_totals = tuple(sum(row[j] for row in cells) for j in range(len(keep_cols)))
    reduced = CitationMatrix(
        rpy=matrix.rpy,
        cr_ids=tuple(matrix.cr_ids[i] for i in keep_rows),
        citing_years=tuple(matrix.citing_years[j] for j in keep_cols),
        cells=cells,
        row_totals=row_totals,
        col_totals=col_totals,
        grand_total=sum(row_totals),
        warnings=matrix.warnings,
    )
    return reduced, dropped_rows, dropped_cols


def expected_counts(matrix: CitationMatrix) -> tuple[tuple[float, ...], ...]:
    """Independence-model expected counts: row total * column total / grand total."""
    if matrix.grand_total == 0:
        raise EmptyMatrix(f"cohort {matrix.rpy} matrix has grand total 0")
    rows = np.asarray(matrix.row_totals, dtype=np.float64)
    cols = np.asarray(matrix.col_totals, dtype=np.float64)
    expected = np.outer(rows, cols) / float(matrix.grand_total)
    return tuple(tuple(row) for row in expected.tolist())


def z_values(
    matrix: CitationMatrix, expected: tuple[tuple[float, ...], ...]
) -> CfaResult:
    """Standardized residuals plus chi-square, degrees of freedom, and the
    list of cells whose expected count falls below the usual limit of 5."""
    e = np.asarray(expected, dtype=np.float64)
    if np.any(e == 0.0):
        raise ZeroExpected(
            "expected count of 0; prune all-zero rows/columns before analysis"
        )
    o = np.asarray(matrix.cells, dtype=np.float64)
    z = (o - e) / np.sqrt(e)
    low = [
        (i, j)
        for i in range(e.shape[0])
        for j in range(e.shape[1])
        if e[i, j] < LOW_EXPECTED_LIMIT
    ]
    return CfaResult(
        rpy=matrix.rpy,
        cr_ids=matrix.cr_ids,
        citing_years=matrix.citing_years,
        expected=tuple(tuple(row) for row in e.tolist()),
        z=tuple(tuple(row) for row in z.tolist()),
        chi_square=float((z * z).sum()),
        df=(e.shape[0] - 1) * (e.shape[1] - 1),
        low_expected_cells=tuple(low),
    )


def analyze_matrix(
    matrix: CitationMatrix,
) -> tuple[CfaResult, tuple[str, ...], tuple[int, ...]]:
    """Prune degenerate rows/columns, then compute the full CFA result."""
    reduced, dropped_rows, dropped_cols = prune_matrix(matrix)
    result = z_values(reduced, expected_counts(reduced))
    return result, dropped_rows, dropped_cols


def sequence(cr_id: str, z_row: tuple[float, ...], theta: float = 1.0) -> Sequence:
    """Discretize a row of z-values: '+' above theta, '-' below -theta,
    '0' in between."""
    if theta <= 0:
        raise ConfigError(f"z threshold must be positive, got {theta}")
    symbols = "".join(
        "+" if z > theta else "-" if z < -theta else "0" for z in z_row
    )
    return Sequence(cr_id=cr_id, symbols=symbols, theta=theta)


def classify(seq: Sequence | str, params: ClassifierParams = ClassifierParams()) -> TypeLabel:
    """Assign exactly one citation-dynamics type to a sequence.

    Rules are tried in order; the first match wins:

    1. hot_paper          — above-average impact somewhere in the first
                            `hot_window` years, never after, and below
                            average at least once after.
    2. sleeping_beauty    — never above average in the first `sleep_years`
                            years, below average at least once there, and
                            above average at least once later.
    3. life_cycle         — a below / above / below progression exists.
    4. constant_performer — never below average.
    5. unclassified       — everything else, including sequences shorter
                            than `min_length`.
    """
    symbols = seq.symbols if isinstance(seq, Sequence) else seq
    if len(symbols) < params.min_length:
        return "unclassified"

    early = symbols[: params.hot_window]
    after_early = symbols[params.hot_window :]
    if "+" in early and "+" not in after_early and "-" in after_early:
        return "hot_paper"

    dormant = symbols[: params.sleep_years]
    awake = symbols[params.sleep_years :]
    if "+" not in dormant and "-" in dormant and "+" in awake:
        return "sleeping_beauty"

    first_minus = symbols.find("-")
    if first_minus != -1:
        rise = symbols.find("+", first_minus + 1)
        if rise != -1 and symbols.find("-", rise + 1) != -1:
            return "life_cycle"

    if "-" not in symbols:
        return "constant_performer"
    return "unclassified"
