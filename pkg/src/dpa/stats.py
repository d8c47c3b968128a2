"""Degree statistics of a directed multigraph.

Histograms are over vertices (zero-degree vertices included); the edge
joint counts classify every non-loop edge by the final out-degree of
its source and the final in-degree of its target.  Loops are tallied
separately and excluded from the joint table.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DirectedMultigraph


@dataclass
class DegreeHistogram:
    """Sparse degree histogram.

    ``counts[d]`` is the number of vertices with degree d on the given
    side; degrees with no vertices are absent from the map.
    """

    side: str  # "in" or "out"
    counts: dict[int, int]
    n: int

    def total_degree(self) -> int:
        return sum(d * c for d, c in self.counts.items())

    def count(self, d: int) -> int:
        return self.counts.get(d, 0)


@dataclass
class EdgeDegreeJointCounts:
    """Joint classification of non-loop edges by endpoint degrees.

    ``counts[(d1, d2)]`` is the number of edges whose source has final
    out-degree d1 and whose target has final in-degree d2.  Both are at
    least 1 because the edge itself contributes to each.
    """

    counts: dict[tuple[int, int], int]
    loop_count: int
    t: int

    def count(self, d1: int, d2: int) -> int:
        return self.counts.get((d1, d2), 0)


def degree_histogram(graph: DirectedMultigraph, side: str) -> DegreeHistogram:
    """Histogram of in- or out-degrees over all n vertices."""
    if side == "in":
        deg = graph.in_deg
    elif side == "out":
        deg = graph.out_deg
    else:
        raise ValueError(f"side must be 'in' or 'out', got {side!r}")
    if graph.n == 0:
        return DegreeHistogram(side=side, counts={}, n=0)
    binc = np.bincount(deg)
    counts = {int(d): int(c) for d, c in enumerate(binc) if c > 0}
    return DegreeHistogram(side=side, counts=counts, n=graph.n)


def edge_joint_counts(graph: DirectedMultigraph) -> EdgeDegreeJointCounts:
    """Classify every edge by (source out-degree, target in-degree).

    Degrees are the final degrees in the graph as given.  Loops are
    counted in ``loop_count`` and excluded from the joint map.
    """
    src, dst = graph.src, graph.dst
    if graph.t == 0:
        return EdgeDegreeJointCounts(counts={}, loop_count=0, t=0)
    non_loop = src != dst
    loop_count = int(graph.t - non_loop.sum())
    d1 = graph.out_deg[src[non_loop]]
    d2 = graph.in_deg[dst[non_loop]]
    pairs = np.stack([d1, d2], axis=1)
    uniq, cnt = np.unique(pairs, axis=0, return_counts=True)
    counts = {(int(a), int(b)): int(c) for (a, b), c in zip(uniq, cnt)}
    return EdgeDegreeJointCounts(counts=counts, loop_count=loop_count, t=graph.t)


def x_count(graph: DirectedMultigraph, d1: int, d2: int) -> int:
    """Number of non-loop edges from an out-degree-d1 source to an
    in-degree-d2 target.  Requires d1, d2 >= 1 (an edge endpoint always
    carries the edge itself)."""
    if d1 < 1 or d2 < 1:
        raise ValueError(f"edge endpoint degrees start at 1, got ({d1}, {d2})")
    non_loop = graph.src != graph.dst
    return int(
        np.sum(
            (graph.out_deg[graph.src[non_loop]] == d1)
            & (graph.in_deg[graph.dst[non_loop]] == d2)
        )
    )


# ---------------------------------------------------------------------------
# CSV emission ("degree,count" and "d1,d2,count", ascending keys)
# ---------------------------------------------------------------------------


def write_histogram_csv(hist: DegreeHistogram, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("degree", "count"))
        for d in sorted(hist.counts):
            w.writerow((d, hist.counts[d]))


def read_histogram_csv(path, side: str = "in") -> DegreeHistogram:
    counts: dict[int, int] = {}
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if [h.strip() for h in header] != ["degree", "count"]:
            raise ValueError(f"expected header 'degree,count', got {header!r}")
        for row in r:
            if not row:
                continue
            counts[int(row[0])] = int(row[1])
    return DegreeHistogram(side=side, counts=counts, n=sum(counts.values()))


def write_joint_csv(joint: EdgeDegreeJointCounts, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("d1", "d2", "count"))
        for d1, d2 in sorted(joint.counts):
            w.writerow((d1, d2, joint.counts[(d1, d2)]))


def read_joint_csv(path) -> EdgeDegreeJointCounts:
    counts: dict[tuple[int, int], int] = {}
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if [h.strip() for h in header] != ["d1", "d2", "count"]:
            raise ValueError(f"expected header 'd1,d2,count', got {header!r}")
        for row in r:
            if not row:
                continue
            counts[(int(row[0]), int(row[1]))] = int(row[2])
    total = sum(counts.values())
    return EdgeDegreeJointCounts(counts=counts, loop_count=0, t=total)
