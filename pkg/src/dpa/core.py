"""Model parameters, seed graphs, the multigraph container, and CSV I/O.

The random process grows a directed multigraph one edge per step.  With
probability ``alpha`` a new vertex is created and wired to an existing
target chosen by in-degree preference, with probability ``gamma`` a new
vertex receives an edge from a source chosen by out-degree preference,
and with probability ``beta = 1 - alpha - gamma`` an edge is added
between two existing vertices (source by out-degree preference, target
by in-degree preference, sampled independently).  Loops and parallel
edges are kept.

This module holds the parameter and graph containers shared by the
generator, the statistics layer, the exact recurrences, and the
analytic formulas.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

PROB_ATOL = 1e-12


class ParamError(ValueError):
    """Base class for parameter and seed-graph validation failures."""


class ProbabilitySumError(ParamError):
    """alpha + beta + gamma does not sum to 1 within tolerance."""


class ProbabilityRangeError(ParamError):
    """A probability lies outside [0, 1] or an offset is negative."""


class NoVertexGrowthError(ParamError):
    """alpha + gamma = 0, so the vertex count can never grow."""


class SeedEdgeError(ParamError):
    """A seed edge is required (some offset is zero) but none is present."""


class EndpointRangeError(ParamError):
    """A seed edge endpoint is not a valid vertex index."""


class GraphFormatError(ValueError):
    """An edge CSV file is malformed or does not describe a valid graph."""


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the attachment process.

    Attributes
    ----------
    alpha : float
        Probability of a new-source step (new vertex v, edge v -> w with
        w chosen by in-degree preference).
    beta : float
        Probability of an internal edge step (both endpoints existing).
    gamma : float
        Probability of a new-target step (new vertex w, edge v -> w with
        v chosen by out-degree preference).
    delta_in : float
        Additive in-degree offset, >= 0.
    delta_out : float
        Additive out-degree offset, >= 0.
    """

    alpha: float
    beta: float
    gamma: float
    delta_in: float
    delta_out: float

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "delta_in": self.delta_in,
            "delta_out": self.delta_out,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(
            alpha=float(d["alpha"]),
            beta=float(d["beta"]),
            gamma=float(d["gamma"]),
            delta_in=float(d["delta_in"]),
            delta_out=float(d["delta_out"]),
        )


@dataclass(frozen=True)
class SeedGraph:
    """Deterministic starting graph.

    ``n0`` vertices labelled ``0 .. n0-1`` and an ordered tuple of seed
    edges.  The process appends to this graph; seed edges keep their
    positions ``0 .. t0-1`` in the creation order.
    """

    n0: int
    edges: tuple[tuple[int, int], ...] = ()

    @property
    def t0(self) -> int:
        return len(self.edges)

    def in_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n0, dtype=np.int64)
        for _, dst in self.edges:
            deg[dst] += 1
        return deg

    def out_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n0, dtype=np.int64)
        for src, _ in self.edges:
            deg[src] += 1
        return deg


@dataclass
class DirectedMultigraph:
    """Directed multigraph stored as parallel endpoint arrays.

    ``src[k]`` and ``dst[k]`` are the endpoints of the k-th edge in
    creation order.  Degrees are kept consistent with the edge arrays.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    in_deg: np.ndarray
    out_deg: np.ndarray

    @property
    def t(self) -> int:
        return int(self.src.shape[0])

    @property
    def edges(self) -> np.ndarray:
        """Edge list as a (t, 2) array of (src, dst) in creation order."""
        return np.column_stack([self.src, self.dst])

    @classmethod
    def from_edges(cls, n: int, edges) -> "DirectedMultigraph":
        """Build a graph from an edge sequence, recomputing degrees."""
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise GraphFormatError("edge list must be a sequence of (src, dst) pairs")
        src = np.ascontiguousarray(arr[:, 0])
        dst = np.ascontiguousarray(arr[:, 1])
        if src.shape[0] and (arr.min() < 0 or arr.max() >= n):
            raise EndpointRangeError(
                f"edge endpoint out of range for n={n}: "
                f"min={arr.min()}, max={arr.max()}"
            )
        in_deg, out_deg = recompute_degrees(src, dst, n)
        return cls(n=n, src=src, dst=dst, in_deg=in_deg, out_deg=out_deg)

    @classmethod
    def from_seed(cls, seed: SeedGraph) -> "DirectedMultigraph":
        return cls.from_edges(seed.n0, seed.edges)


def recompute_degrees(src: np.ndarray, dst: np.ndarray, n: int):
    """Recompute (in_deg, out_deg) from endpoint arrays.

    Loops count once toward each of the two degrees of their vertex.
    """
    in_deg = np.bincount(dst, minlength=n).astype(np.int64)
    out_deg = np.bincount(src, minlength=n).astype(np.int64)
    return in_deg, out_deg


def default_seed(params: ModelParams) -> SeedGraph:
    """Smallest legal seed for the given parameters.

    One vertex with no edges, except that a single loop edge is added
    when ``delta_in`` or ``delta_out`` is zero (the preference weights
    would otherwise all vanish on the first draw).
    """
    if params.delta_in == 0.0 or params.delta_out == 0.0:
        return SeedGraph(n0=1, edges=((0, 0),))
    return SeedGraph(n0=1, edges=())


def validate_params(params: ModelParams, seed: SeedGraph | None = None):
    """Check model invariants; return the validated (params, seed) pair.

    The returned params carry ``beta`` recomputed as ``1 - alpha - gamma``
    so the three probabilities sum exactly in float arithmetic.  When
    ``seed`` is None the default seed for the parameters is supplied.

    Raises
    ------
    ProbabilityRangeError
        A probability outside [0, 1] or a negative offset.
    ProbabilitySumError
        alpha + beta + gamma differs from 1 by more than 1e-12.
    NoVertexGrowthError
        alpha + gamma = 0.
    SeedEdgeError
        delta_in = 0 or delta_out = 0 with an edgeless seed.
    EndpointRangeError
        A seed edge endpoint outside 0 .. n0-1.
    """
    p = params
    for name in ("alpha", "beta", "gamma"):
        v = getattr(p, name)
        if not (0.0 <= v <= 1.0) or not np.isfinite(v):
            raise ProbabilityRangeError(f"{name}={v} outside [0, 1]")
    for name in ("delta_in", "delta_out"):
        v = getattr(p, name)
        if v < 0.0 or not np.isfinite(v):
            raise ProbabilityRangeError(f"{name}={v} must be >= 0")
    if abs(p.alpha + p.beta + p.gamma - 1.0) > PROB_ATOL:
        raise ProbabilitySumError(
            f"alpha+beta+gamma = {p.alpha + p.beta + p.gamma!r}, expected 1"
        )
    if p.alpha + p.gamma == 0.0:
        raise NoVertexGrowthError("alpha + gamma = 0: no new vertices can appear")

    validated = ModelParams(
        alpha=p.alpha,
        beta=1.0 - p.alpha - p.gamma,
        gamma=p.gamma,
        delta_in=p.delta_in,
        delta_out=p.delta_out,
    )

    if seed is None:
        seed = default_seed(validated)
    if seed.n0 < 1:
        raise ParamError("seed graph needs at least one vertex")
    if (validated.delta_in == 0.0 or validated.delta_out == 0.0) and seed.t0 == 0:
        raise SeedEdgeError(
            "delta_in = 0 or delta_out = 0 requires at least one seed edge"
        )
    for src, dst in seed.edges:
        if not (0 <= src < seed.n0) or not (0 <= dst < seed.n0):
            raise EndpointRangeError(
                f"seed edge ({src}, {dst}) outside vertex range 0..{seed.n0 - 1}"
            )
    return validated, seed


# ---------------------------------------------------------------------------
# CSV I/O
# ---------------------------------------------------------------------------

HEADER = ("src", "dst")


def save_graph(graph: DirectedMultigraph, path) -> None:
    """Write the edge list to CSV with header ``src,dst``.

    Every vertex must appear as an endpoint of some edge; the file
    carries no separate vertex count, so a graph with an uncovered
    (isolated) vertex cannot round-trip and is rejected.
    """
    covered = np.zeros(graph.n, dtype=bool)
    covered[graph.src] = True
    covered[graph.dst] = True
    if graph.n > 0 and not covered.all():
        missing = int(np.flatnonzero(~covered)[0])
        raise GraphFormatError(
            f"vertex {missing} has no incident edge; "
            "the CSV format cannot represent isolated vertices"
        )
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        for s, d in zip(graph.src.tolist(), graph.dst.tolist()):
            writer.writerow((s, d))


def load_graph(path) -> DirectedMultigraph:
    """Read an edge CSV written by :func:`save_graph`.

    The vertex count is inferred as ``max index + 1``.  Raises
    :class:`GraphFormatError` for malformed rows, non-integer indices,
    negative indices, or an index gap (every vertex in ``0..n-1`` must
    appear as an endpoint).
    """
    path = Path(path)
    srcs: list[int] = []
    dsts: list[int] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != list(HEADER):
            raise GraphFormatError(f"expected header 'src,dst', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise GraphFormatError(f"line {lineno}: expected 2 fields, got {len(row)}")
            try:
                s = int(row[0])
                d = int(row[1])
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: non-integer index in {row!r}") from exc
            if s < 0 or d < 0:
                raise GraphFormatError(f"line {lineno}: negative vertex index in {row!r}")
            srcs.append(s)
            dsts.append(d)
    if not srcs:
        return DirectedMultigraph.from_edges(0, [])
    src = np.asarray(srcs, dtype=np.int64)
    dst = np.asarray(dsts, dtype=np.int64)
    n = int(max(src.max(), dst.max())) + 1
    covered = np.zeros(n, dtype=bool)
    covered[src] = True
    covered[dst] = True
    if not covered.all():
        missing = int(np.flatnonzero(~covered)[0])
        raise GraphFormatError(
            f"index gap: vertex {missing} never appears as an endpoint"
        )
    in_deg, out_deg = recompute_degrees(src, dst, n)
    return DirectedMultigraph(n=n, src=src, dst=dst, in_deg=in_deg, out_deg=out_deg)
