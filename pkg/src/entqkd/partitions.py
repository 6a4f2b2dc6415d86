"""Integer partitions in multiplicity-vector form, with a text cache.

A partition of n is stored as a vector nu of length n where nu[j-1] counts
the parts equal to j, so sum(j * nu[j-1]) = n.  These vectors index the
conjugacy classes of S_n and drive the frequency-entanglement sums in
:mod:`entqkd.kernel`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import CacheFormatError

PartitionVector = tuple[int, ...]

_HEADER_RE = re.compile(r"^partitions v1 n_cap=(\d+)$")


@dataclass(frozen=True)
class PartitionTable:
    """All partitions of 1..n_cap, each as a fixed-width multiplicity row.

    Rows for a given n are lexicographically sorted so that enumeration and
    cache files are canonical.
    """

    n_cap: int
    per_n: Mapping[int, tuple[PartitionVector, ...]]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartitionTable):
            return NotImplemented
        return self.n_cap == other.n_cap and dict(self.per_n) == dict(other.per_n)


def enumerate_partitions(n_cap: int) -> PartitionTable:
    """Enumerate every partition of n for n = 1..n_cap.

    Parts are generated in descending order and converted to multiplicity
    vectors; the result is deterministic (rows sorted ascending).
    """
    if n_cap < 1:
        raise ValueError(f"n_cap must be >= 1, got {n_cap}")
    per_n: dict[int, tuple[PartitionVector, ...]] = {}
    for n in range(1, n_cap + 1):
        rows: list[PartitionVector] = []
        _descending_parts(n, n, [], rows)
        per_n[n] = tuple(sorted(rows))
    return PartitionTable(n_cap=n_cap, per_n=per_n)


def _descending_parts(remaining: int, max_part: int, parts: list[int],
                      out: list[PartitionVector]) -> None:
    if remaining == 0:
        n = sum(parts)
        nu = [0] * n
        for p in parts:
            nu[p - 1] += 1
        out.append(tuple(nu))
        return
    for p in range(min(max_part, remaining), 0, -1):
        parts.append(p)
        _descending_parts(remaining - p, p, parts, out)
        parts.pop()


def save_partitions(table: PartitionTable, path: str | Path) -> None:
    """Write the table as UTF-8 text: a header line, then one row per partition."""
    lines = [f"partitions v1 n_cap={table.n_cap}"]
    for n in range(1, table.n_cap + 1):
        for row in table.per_n[n]:
            lines.append(f"{n}: " + " ".join(str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_partitions(path: str | Path) -> PartitionTable:
    """Parse a cache file written by :func:`save_partitions`.

    Raises CacheFormatError naming the offending line for malformed input or
    rows that violate sum(j * nu[j-1]) = n, duplicate rows, or missing n.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise CacheFormatError("line 1: empty partition cache file")
    match = _HEADER_RE.match(lines[0])
    if match is None:
        raise CacheFormatError(f"line 1: bad header {lines[0]!r}")
    n_cap = int(match.group(1))
    if n_cap < 1:
        raise CacheFormatError("line 1: n_cap must be >= 1")

    per_n: dict[int, list[PartitionVector]] = {n: [] for n in range(1, n_cap + 1)}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise CacheFormatError(f"line {lineno}: blank line not allowed")
        head, sep, tail = line.partition(":")
        if not sep:
            raise CacheFormatError(f"line {lineno}: missing ':' separator")
        try:
            n = int(head)
            row = tuple(int(tok) for tok in tail.split())
        except ValueError as exc:
            raise CacheFormatError(f"line {lineno}: {exc}") from exc
        if not 1 <= n <= n_cap:
            raise CacheFormatError(f"line {lineno}: n={n} outside 1..{n_cap}")
        if len(row) != n:
            raise CacheFormatError(f"line {lineno}: expected {n} entries, got {len(row)}")
        if any(v < 0 for v in row):
            raise CacheFormatError(f"line {lineno}: negative multiplicity")
        if sum(j * v for j, v in enumerate(row, start=1)) != n:
            raise CacheFormatError(f"line {lineno}: row weights do not sum to {n}")
        if row in per_n[n]:
            raise CacheFormatError(f"line {lineno}: duplicate partition of {n}")
        per_n[n].append(row)

    for n in range(1, n_cap + 1):
        if not per_n[n]:
            raise CacheFormatError(f"no partitions listed for n={n}")
    return PartitionTable(n_cap=n_cap, per_n={n: tuple(sorted(v)) for n, v in per_n.items()})
