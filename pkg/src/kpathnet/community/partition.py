"""Crisp and overlapping community assignments, and their file formats."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ParseError


@dataclass(frozen=True, eq=False)
class Partition:
    """Crisp assignment; community ids are dense and numbered by first
    appearance in vertex order."""

    assignment: np.ndarray

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        labels = np.asarray(labels)
        if labels.ndim != 1:
            raise DomainError("labels must be one-dimensional")
        _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
        # renumber by first appearance
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        a = rank[inv.reshape(-1)]
        a.setflags(write=False)
        return cls(a)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls.from_labels(np.arange(n))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def community_count(self) -> int:
        return int(self.assignment.max()) + 1 if self.n else 0

    def communities(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.community_count)]
        for v, c in enumerate(self.assignment.tolist()):
            out[c].append(v)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and np.array_equal(self.assignment, other.assignment)

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, communities={self.community_count})"


@dataclass(frozen=True, eq=False)
class CoverPartition:
    """Overlapping assignment: per vertex, community id -> belonging coefficient."""

    memberships: tuple[dict[int, float], ...]

    @property
    def n(self) -> int:
        return len(self.memberships)

    def crisp(self) -> Partition:
        """Project each vertex onto its strongest community (lowest id on ties)."""
        best = [min(m.items(), key=lambda kv: (-kv[1], kv[0]))[0] for m in self.memberships]
        return Partition.from_labels(np.asarray(best, dtype=np.int64))

    def community_ids(self) -> set[int]:
        return {c for m in self.memberships for c in m}


def _sink_write(sink, text: str) -> None:
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    elif isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(text.encode("utf-8"))


def _source_lines(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return fh.read().splitlines()
    if isinstance(source, (bytes, bytearray)):
        return source.decode("utf-8").splitlines()
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data.splitlines()


def write_partition(p: Partition, sink, labels=None) -> None:
    """``vertex community`` per line; ``labels`` maps dense ids to output ids."""
    labels = np.arange(p.n) if labels is None else np.asarray(labels)
    _sink_write(sink, "".join(f"{labels[v]} {c}\n" for v, c in enumerate(p.assignment.tolist())))


def write_cover(cover: CoverPartition, sink, labels=None) -> None:
    labels = np.arange(cover.n) if labels is None else np.asarray(labels)
    lines = []
    for v, mem in enumerate(cover.memberships):
        pairs = " ".join(f"{c}:{b!r}" for c, b in sorted(mem.items()))
        lines.append(f"{labels[v]} {pairs}\n")
    _sink_write(sink, "".join(lines))


def read_partition(source) -> dict[int, int]:
    """Parse a ``vertex community`` file into ``{vertex id: community id}``."""
    out: dict[int, int] = {}
    for lineno, raw in enumerate(_source_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", "%")):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'vertex community'", lineno)
        try:
            v, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", lineno) from None
        if v in out:
            raise ParseError(f"vertex {v} assigned twice", lineno)
        out[v] = c
    return out


def read_cover(source) -> dict[int, dict[int, float]]:
    out: dict[int, dict[int, float]] = {}
    for lineno, raw in enumerate(_source_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", "%")):
            continue
        head, *pairs = line.split()
        try:
            mem = {int(c): float(b) for c, b in (p.split(":") for p in pairs)}
            out[int(head)] = mem
        except ValueError:
            raise ParseError(f"bad cover entry {line!r}", lineno) from None
    return out


def align_partition(mapping: dict[int, int], labels) -> Partition:
    """Order a vertex->community mapping by a graph's original vertex ids."""
    labels = np.asarray(labels).tolist()
    if set(mapping) != set(labels):
        missing = len(set(labels) - set(mapping))
        extra = len(set(mapping) - set(labels))
        raise DomainError(f"partition does not cover the graph ({missing} missing, {extra} extra vertices)")
    return Partition.from_labels(np.array([mapping[v] for v in labels], dtype=np.int64))
