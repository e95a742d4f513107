"""Markdown rendering of algorithm groupings."""

from __future__ import annotations

from typing import Iterable, Tuple

from ..dsc import GroupPartition

HEADER = "| k | F(x) | G |\n|---|---|---|\n"


def format_partition(partition: GroupPartition) -> str:
    """``{{A}, {B, C}, {D}}`` with groups and members in stable algorithm order."""
    return "{" + ", ".join("{" + ", ".join(g) + "}" for g in partition.groups) + "}"


def render_grouping_table(partitions: Iterable[Tuple[str, int, GroupPartition]]) -> str:
    """Table of scenarios having at least one non-singleton group.

    Scenarios whose relation was intransitive are listed below the table.
    """
    rows = []
    notes = []
    for problem, k, part in partitions:
        if part.all_singletons:
            continue
        rows.append(f"| {k}D | {problem} | {format_partition(part)} |\n")
        if not part.transitive:
            triples = "; ".join("(" + ", ".join(v) + ")" for v in part.violations)
            notes.append(f"- {k}D {problem}: intransitive, grouped by transitive closure; violations {triples}\n")
    text = HEADER + "".join(rows)
    if notes:
        text += "\n**Intransitive scenarios**\n\n" + "".join(notes)
    return text
