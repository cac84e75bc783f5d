"""Risk priority number computation and ranking for FMEA tables."""

from __future__ import annotations

from .model import FmeaRow, FmeaTable


def compute_rpn(severity: int, occurrence: int, detection: int) -> int:
    """Product of the three 1..10 factors."""
    for name, value in (
        ("severity", severity),
        ("occurrence", occurrence),
        ("detection", detection),
    ):
        if not isinstance(value, int) or not 1 <= value <= 10:
            raise ValueError(f"{name} must be an integer in 1..10, got {value!r}")
    return severity * occurrence * detection


def rank_failures(table: FmeaTable) -> list[str]:
    """Row ids by descending RPN; ties by severity descending, then row order.

    Occurrence never enters the tie-break: it reflects fault likelihood, not
    attack likelihood, so it carries no weight for security prioritisation.
    """
    indexed = list(enumerate(table.rows))
    indexed.sort(key=lambda pair: (-pair[1].rpn, -pair[1].severity, pair[0]))
    return [row.id for _, row in indexed]


def ranked_rows(table: FmeaTable) -> list[FmeaRow]:
    by_id = {row.id: row for row in table.rows}
    return [by_id[rid] for rid in rank_failures(table)]
