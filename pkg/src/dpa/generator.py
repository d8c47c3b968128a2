"""Sampling the attachment process.

One step appends one edge.  A branch draw ``u ~ U[0,1)`` selects the
step kind: ``u < alpha`` creates a new source vertex wired to an
in-degree-preferential target, ``alpha <= u < alpha + gamma`` creates a
new target vertex wired from an out-degree-preferential source, and
otherwise an edge is added between two existing vertices, source drawn
first by the out-degree law and target second by the in-degree law,
both from the pre-step graph.

Each preferential draw is realised as a mixture: with probability
``t / (t + delta * n)`` copy the relevant endpoint of a uniformly
chosen existing edge, otherwise pick a uniform existing vertex.  The
endpoint multiset of the edge list is exactly the degree-weighted
vertex multiset, so the mixture reproduces the
``(degree + delta) / (t + delta * n)`` law without bookkeeping beyond
the edge arrays themselves.

The bulk path (:func:`generate`) runs a compiled kernel; :func:`step`
is the interpreted reference.  Both consume the random stream in the
same fixed order, so they produce bit-identical graphs from the same
seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (
    DirectedMultigraph,
    ModelParams,
    SeedGraph,
    validate_params,
)

MAX_INDEX = 2**31 - 1


def make_rng(rng_seed) -> np.random.Generator:
    """Build the process RNG (Philox counter-based bit generator).

    Accepts an int, a sequence of ints, a SeedSequence, or an existing
    Generator (returned unchanged).
    """
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    if not isinstance(rng_seed, np.random.SeedSequence):
        rng_seed = np.random.SeedSequence(rng_seed)
    return np.random.Generator(np.random.Philox(rng_seed))


@dataclass
class GenState:
    """Mutable generation state.

    ``src_endpoints[k]`` / ``dst_endpoints[k]`` for ``k < t`` are the
    endpoints of edge k in creation order; the arrays are preallocated
    beyond ``t`` and grown on demand.  Degree arrays cover ``n`` live
    vertices and are kept consistent with the endpoint arrays.
    """

    params: ModelParams
    n: int
    t: int
    src_endpoints: np.ndarray
    dst_endpoints: np.ndarray
    in_deg: np.ndarray
    out_deg: np.ndarray
    rng: np.random.Generator

    def graph(self) -> DirectedMultigraph:
        """Snapshot the current graph (trimmed copies of the arrays)."""
        return DirectedMultigraph(
            n=self.n,
            src=self.src_endpoints[: self.t].copy(),
            dst=self.dst_endpoints[: self.t].copy(),
            in_deg=self.in_deg[: self.n].astype(np.int64),
            out_deg=self.out_deg[: self.n].astype(np.int64),
        )


def init_state(
    params: ModelParams,
    seed_graph: SeedGraph | None,
    rng_seed,
    capacity_t: int | None = None,
) -> GenState:
    """Validate inputs and set up a generation state over the seed graph."""
    params, seed_graph = validate_params(params, seed_graph)
    t0 = seed_graph.t0
    n0 = seed_graph.n0
    cap_t = max(capacity_t if capacity_t is not None else 0, t0, 16)
    cap_n = n0 + (cap_t - t0)
    if cap_t > MAX_INDEX or cap_n > MAX_INDEX:
        raise ValueError("requested size exceeds 32-bit index range")
    src = np.zeros(cap_t, dtype=np.int32)
    dst = np.zeros(cap_t, dtype=np.int32)
    for k, (s, d) in enumerate(seed_graph.edges):
        src[k] = s
        dst[k] = d
    in_deg = np.zeros(cap_n, dtype=np.int32)
    out_deg = np.zeros(cap_n, dtype=np.int32)
    in_deg[:n0] = seed_graph.in_degrees()
    out_deg[:n0] = seed_graph.out_degrees()
    return GenState(
        params=params,
        n=n0,
        t=t0,
        src_endpoints=src,
        dst_endpoints=dst,
        in_deg=in_deg,
        out_deg=out_deg,
        rng=make_rng(rng_seed),
    )


def sample_in_target(state: GenState) -> int:
    """Draw a vertex by the (in-degree + delta_in) preferential law.

    Consumes one uniform for the mixture choice and one integer draw.
    """
    t, n = state.t, state.n
    u = state.rng.random()
    if u * (t + state.params.delta_in * n) < t:
        k = int(state.rng.integers(0, t))
        return int(state.dst_endpoints[k])
    return int(state.rng.integers(0, n))


def sample_out_source(state: GenState) -> int:
    """Draw a vertex by the (out-degree + delta_out) preferential law."""
    t, n = state.t, state.n
    u = state.rng.random()
    if u * (t + state.params.delta_out * n) < t:
        k = int(state.rng.integers(0, t))
        return int(state.src_endpoints[k])
    return int(state.rng.integers(0, n))


def _grow(state: GenState) -> None:
    cap = state.src_endpoints.shape[0]
    new_cap = min(max(2 * cap, 16), MAX_INDEX)
    grow = new_cap - cap
    pad = lambda a: np.concatenate([a, np.zeros(grow, dtype=a.dtype)])
    state.src_endpoints = pad(state.src_endpoints)
    state.dst_endpoints = pad(state.dst_endpoints)
    state.in_deg = pad(state.in_deg)
    state.out_deg = pad(state.out_deg)


def step(state: GenState) -> tuple[int, int]:
    """Advance the process by one edge; returns the new (src, dst).

    Reference implementation of the step law.  The compiled kernel in
    :func:`generate` consumes the random stream identically.
    """
    if state.t >= state.src_endpoints.shape[0] or state.n >= state.in_deg.shape[0]:
        _grow(state)
    p = state.params
    u = state.rng.random()
    if u < p.alpha:
        w = sample_in_target(state)
        v = state.n
        state.n += 1
    elif u < p.alpha + p.gamma:
        v = sample_out_source(state)
        w = state.n
        state.n += 1
    else:
        v = sample_out_source(state)
        w = sample_in_target(state)
    k = state.t
    state.src_endpoints[k] = v
    state.dst_endpoints[k] = w
    state.out_deg[v] += 1
    state.in_deg[w] += 1
    state.t += 1
    return v, w


@njit(cache=True)
def _run_kernel(gen, src, dst, in_deg, out_deg, t0, n0, steps,
                alpha, gamma, delta_in, delta_out):
    t = t0
    n = n0
    ag = alpha + gamma
    for _ in range(steps):
        u = gen.random()
        if u < alpha:
            u2 = gen.random()
            if u2 * (t + delta_in * n) < t:
                w = np.int64(dst[gen.integers(0, t)])
            else:
                w = gen.integers(0, n)
            v = n
            n += 1
        elif u < ag:
            u2 = gen.random()
            if u2 * (t + delta_out * n) < t:
                v = np.int64(src[gen.integers(0, t)])
            else:
                v = gen.integers(0, n)
            w = n
            n += 1
        else:
            u2 = gen.random()
            if u2 * (t + delta_out * n) < t:
                v = np.int64(src[gen.integers(0, t)])
            else:
                v = gen.integers(0, n)
            u3 = gen.random()
            if u3 * (t + delta_in * n) < t:
                w = np.int64(dst[gen.integers(0, t)])
            else:
                w = gen.integers(0, n)
        src[t] = v
        dst[t] = w
        out_deg[v] += 1
        in_deg[w] += 1
        t += 1
    return n


def generate(
    params: ModelParams,
    seed_graph: SeedGraph | None,
    t: int,
    rng_seed,
) -> DirectedMultigraph:
    """Run the process until the graph has ``t`` edges in total.

    Parameters
    ----------
    params : ModelParams
        Process parameters; ``beta`` is recomputed as ``1 - alpha - gamma``.
    seed_graph : SeedGraph or None
        Starting graph; None selects the default seed.
    t : int
        Target total edge count, ``t >= t0``.  Seed edges count.
    rng_seed : int, sequence, SeedSequence, or Generator
        Source of randomness.  Identical seeds and inputs give a
        bit-identical graph.

    Returns
    -------
    DirectedMultigraph
    """
    params, seed_graph = validate_params(params, seed_graph)
    t0 = seed_graph.t0
    if t < t0:
        raise ValueError(f"target edges t={t} below seed edge count t0={t0}")
    steps = t - t0
    state = init_state(params, seed_graph, rng_seed, capacity_t=max(t, t0))
    n_max = seed_graph.n0 + steps
    if t > MAX_INDEX or n_max > MAX_INDEX:
        raise ValueError("requested size exceeds 32-bit index range")
    n = _run_kernel(
        state.rng,
        state.src_endpoints,
        state.dst_endpoints,
        state.in_deg,
        state.out_deg,
        t0,
        seed_graph.n0,
        steps,
        params.alpha,
        params.gamma,
        params.delta_in,
        params.delta_out,
    )
    return DirectedMultigraph(
        n=int(n),
        src=state.src_endpoints[:t],
        dst=state.dst_endpoints[:t],
        in_deg=state.in_deg[:n],
        out_deg=state.out_deg[:n],
    )
