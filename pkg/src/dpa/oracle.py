"""Exact finite-t references: degree-count recurrences and brute-force
enumeration.

Everything here conditions on N, the number of vertex-adding steps
among the first T process steps (so the graph has n0 + N vertices and
t0 + T edges).  Conditioned on N, the step-type probabilities reduce
to a = alpha/(alpha+gamma) for "new vertex is a source" against
1 - a for "new vertex is a target", and beta drops out entirely; the
unconditional curve is recovered by binomial mixing over N.

Tables:

* ``dp_E_in`` / ``dp_E_out``: E_d(T, N), expected number of vertices
  of in-(out-)degree d.  Exact to rounding.
* ``dp_D2``: D_{d1,d2}(T, N) = E[n_{d1} n_{d2}] - [d1=d2] E[n_{d1}],
  the ordered distinct-pair expectation for in-degrees.  Exact.
* ``dp_EX``: E_X(T, N, d1, d2), expected number of non-loop edges with
  source out-degree d1 and target in-degree d2.  This recurrence drops
  O(1/T) coupling terms (the product of the two endpoint hit
  probabilities, and the covariance between the out- and in-degree
  counts), so it is asymptotically exact but not an identity at small
  T; the exact small-T reference is :func:`enumerate_exact`.

``enumerate_exact`` expands every labelled trajectory of the process
for a few steps and merges states by edge multiset.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .core import ModelParams, SeedGraph, validate_params

DP_T_MAX = 2000
DP_ENTRY_BUDGET = 50_000_000


class OracleResourceError(ValueError):
    """A requested table would be too large to hold in memory."""


def tri_off(T: int) -> int:
    """Offset of the (T, N=0) entry in triangle-packed storage."""
    return T * (T + 1) // 2


def tri_size(T_max: int) -> int:
    return (T_max + 1) * (T_max + 2) // 2


@dataclass
class DPTable:
    """Triangle-packed table of a conditional expectation over (T, N).

    ``values`` has shape (rows..., tri_size(T_max)); the (T, N) entry
    of a row sits at index ``tri_off(T) + N``, for 0 <= N <= T.  For
    kind 'E_in'/'E_out' the row index is the degree d; for 'D2' and
    'EX' the rows are indexed (d1, d2).
    """

    kind: str
    params: ModelParams
    n0: int
    t0: int
    T_max: int
    A_in: float
    A_out: float
    values: np.ndarray

    def plane(self, T: int) -> np.ndarray:
        """All rows at fixed T: shape (rows..., T+1), N along the last axis."""
        if not 0 <= T <= self.T_max:
            raise IndexError(f"T={T} outside 0..{self.T_max}")
        off = tri_off(T)
        return self.values[..., off : off + T + 1]

    def at(self, T: int, N: int) -> np.ndarray | float:
        if not 0 <= N <= T:
            raise IndexError(f"need 0 <= N <= T, got N={N}, T={T}")
        return self.plane(T)[..., N]


def _check_budget(rows: int, T_max: int, cap_T: int) -> None:
    if T_max < 0:
        raise ValueError(f"T_max must be >= 0, got {T_max}")
    if T_max > cap_T:
        raise OracleResourceError(f"T_max={T_max} exceeds the supported {cap_T}")
    entries = rows * tri_size(T_max)
    if entries > DP_ENTRY_BUDGET:
        raise OracleResourceError(
            f"table would need {entries} entries (budget {DP_ENTRY_BUDGET})"
        )


def _dp_e_values(a: float, delta: float, A: float, base: np.ndarray,
                 T_max: int, d_max: int) -> np.ndarray:
    """Run the degree-count recurrence for one side.

    a is the conditional probability that a vertex-adding step creates
    a source (whose tracked degree starts at 0); 1 - a creates a
    target (tracked degree starts at 1).  delta and A = t0 + delta*n0
    belong to the tracked side.
    """
    values = np.zeros((d_max + 1, tri_size(T_max)), dtype=np.float64)
    values[: base.shape[0], 0] = base
    for d in range(d_max + 1):
        row = values[d]
        row_prev = values[d - 1] if d > 0 else None
        for T in range(T_max):
            off, noff = tri_off(T), tri_off(T + 1)
            old = row[off : off + T + 1]
            old_m1 = row_prev[off : off + T + 1] if d > 0 else None
            N = np.arange(T + 2, dtype=np.float64)
            w_vert = N / (T + 1.0)
            w_stay = (T + 1.0 - N) / (T + 1.0)
            # denominator of the preferential law seen by the new edge:
            # vertex-adding step has n0 + N - 1 pre-step vertices,
            # edge-only step has n0 + N.
            den1 = T + delta * N[1:] + A - delta
            den2 = T + delta * np.arange(T + 1, dtype=np.float64) + A

            vert = np.zeros(T + 2)
            vert[1:] = a * old * (1.0 - (d + delta) / den1) + (1.0 - a) * old
            if d > 0:
                vert[1:] += a * old_m1 * (d - 1.0 + delta) / den1
            if d == 0:
                vert[1:] += a
            elif d == 1:
                vert[1:] += 1.0 - a

            stay = np.zeros(T + 2)
            stay[: T + 1] = old * (1.0 - (d + delta) / den2)
            if d > 0:
                stay[: T + 1] += old_m1 * (d - 1.0 + delta) / den2

            row[noff : noff + T + 2] = w_vert * vert + w_stay * stay
    return values


def dp_E_in(params: ModelParams, seed: SeedGraph | None, T_max: int,
            d_max: int) -> DPTable:
    """Expected in-degree counts E_d(T, N), d = 0..d_max, exact."""
    p, seed = validate_params(params, seed)
    _check_budget(d_max + 1, T_max, DP_T_MAX)
    ag = p.alpha + p.gamma
    base = np.bincount(seed.in_degrees(), minlength=1).astype(np.float64)[: d_max + 1]
    values = _dp_e_values(
        p.alpha / ag, p.delta_in, seed.t0 + p.delta_in * seed.n0,
        base, T_max, d_max,
    )
    return DPTable(
        kind="E_in", params=p, n0=seed.n0, t0=seed.t0, T_max=T_max,
        A_in=seed.t0 + p.delta_in * seed.n0,
        A_out=seed.t0 + p.delta_out * seed.n0,
        values=values,
    )


def dp_E_out(params: ModelParams, seed: SeedGraph | None, T_max: int,
             d_max: int) -> DPTable:
    """Expected out-degree counts; the in-side recurrence with the
    roles of alpha and gamma (and the two offsets) exchanged."""
    p, seed = validate_params(params, seed)
    _check_budget(d_max + 1, T_max, DP_T_MAX)
    ag = p.alpha + p.gamma
    base = np.bincount(seed.out_degrees(), minlength=1).astype(np.float64)[: d_max + 1]
    values = _dp_e_values(
        p.gamma / ag, p.delta_out, seed.t0 + p.delta_out * seed.n0,
        base, T_max, d_max,
    )
    return DPTable(
        kind="E_out", params=p, n0=seed.n0, t0=seed.t0, T_max=T_max,
        A_in=seed.t0 + p.delta_in * seed.n0,
        A_out=seed.t0 + p.delta_out * seed.n0,
        values=values,
    )


def dp_D2(params: ModelParams, seed: SeedGraph | None, T_max: int,
          d1_max: int, d2_max: int) -> DPTable:
    """Ordered distinct-pair expectations D_{d1,d2}(T, N) for in-degrees.

    D_{d1,d2} = E[n_{d1} n_{d2}] - [d1=d2] E[n_{d1}]; the in-degree
    variance is D_{d,d} + E_d - E_d**2.  Exact to rounding: the pairs
    (new vertex, old vertex) created by a vertex-adding source step
    use the one-step-evolved partner count (the partner may be the
    edge's target in the same step), not the pre-step count.
    """
    p, seed = validate_params(params, seed)
    _check_budget((d1_max + 1) * (d2_max + 1), T_max, 500)
    ag = p.alpha + p.gamma
    a = p.alpha / ag
    delta = p.delta_in
    A = seed.t0 + p.delta_in * seed.n0
    e_tab = dp_E_in(p, seed, T_max, max(d1_max, d2_max))
    E = e_tab.values

    base_cnt = np.bincount(seed.in_degrees(), minlength=1).astype(np.float64)
    n_tri = tri_size(T_max)
    values = np.zeros((d1_max + 1, d2_max + 1, n_tri), dtype=np.float64)
    for d1 in range(d1_max + 1):
        for d2 in range(d2_max + 1):
            c1 = base_cnt[d1] if d1 < base_cnt.shape[0] else 0.0
            c2 = base_cnt[d2] if d2 < base_cnt.shape[0] else 0.0
            values[d1, d2, 0] = c1 * c2 - (c1 if d1 == d2 else 0.0)

    zeros_cache: dict[int, np.ndarray] = {}

    def zrow(T):
        if T not in zeros_cache:
            zeros_cache[T] = np.zeros(T + 1)
        return zeros_cache[T]

    for d1 in range(d1_max + 1):
        for d2 in range(d2_max + 1):
            row = values[d1, d2]
            row_m1 = values[d1 - 1, d2] if d1 > 0 else None
            row_m2 = values[d1, d2 - 1] if d2 > 0 else None
            dd = d1 + d2 + 2.0 * delta
            for T in range(T_max):
                off, noff = tri_off(T), tri_off(T + 1)
                old = row[off : off + T + 1]
                old_m1 = row_m1[off : off + T + 1] if d1 > 0 else zrow(T)
                old_m2 = row_m2[off : off + T + 1] if d2 > 0 else zrow(T)
                e1 = E[d1, off : off + T + 1]
                e2 = E[d2, off : off + T + 1]
                e1m = E[d1 - 1, off : off + T + 1] if d1 > 0 else zrow(T)
                e2m = E[d2 - 1, off : off + T + 1] if d2 > 0 else zrow(T)
                N = np.arange(T + 2, dtype=np.float64)
                w_vert = N / (T + 1.0)
                w_stay = (T + 1.0 - N) / (T + 1.0)
                den1 = T + delta * N[1:] + A - delta
                den2 = T + delta * np.arange(T + 1, dtype=np.float64) + A

                vert = np.zeros(T + 2)
                vert[1:] = a * (
                    old * (1.0 - dd / den1)
                    + old_m1 * (d1 - 1.0 + delta) / den1
                    + old_m2 * (d2 - 1.0 + delta) / den1
                ) + (1.0 - a) * old
                if d1 == 0:
                    vert[1:] += a * (
                        e2 * (1.0 - (d2 + delta) / den1)
                        + e2m * (d2 - 1.0 + delta) / den1
                    )
                if d2 == 0:
                    vert[1:] += a * (
                        e1 * (1.0 - (d1 + delta) / den1)
                        + e1m * (d1 - 1.0 + delta) / den1
                    )
                if d1 == 1:
                    vert[1:] += (1.0 - a) * e2
                if d2 == 1:
                    vert[1:] += (1.0 - a) * e1

                stay = np.zeros(T + 2)
                stay[: T + 1] = (
                    old * (1.0 - dd / den2)
                    + old_m1 * (d1 - 1.0 + delta) / den2
                    + old_m2 * (d2 - 1.0 + delta) / den2
                )

                row[noff : noff + T + 2] = w_vert * vert + w_stay * stay
    return DPTable(
        kind="D2", params=p, n0=seed.n0, t0=seed.t0, T_max=T_max,
        A_in=A, A_out=seed.t0 + p.delta_out * seed.n0, values=values,
    )


def dp_EX(params: ModelParams, seed: SeedGraph | None, T_max: int,
          d1_max: int, d2_max: int) -> DPTable:
    """Expected edge-class counts E_X(T, N, d1, d2), d1/d2 up to the
    given maxima.

    Implements the truncated recurrence: terms of order 1/T (the
    simultaneous hit of both endpoints and the out/in count
    covariance) are dropped, so values converge to the exact ones at
    rate O(1) absolute as T grows but differ at small T.
    """
    p, seed = validate_params(params, seed)
    _check_budget((d1_max + 1) * (d2_max + 1), T_max, DP_T_MAX)
    ag = p.alpha + p.gamma
    a = p.alpha / ag
    din, dout = p.delta_in, p.delta_out
    A_in = seed.t0 + din * seed.n0
    A_out = seed.t0 + dout * seed.n0
    e_in = dp_E_in(p, seed, T_max, max(d2_max - 1, 0)).values
    e_out = dp_E_out(p, seed, T_max, max(d1_max - 1, 0)).values

    n_tri = tri_size(T_max)
    values = np.zeros((d1_max + 1, d2_max + 1, n_tri), dtype=np.float64)

    in_deg = seed.in_degrees()
    out_deg = seed.out_degrees()
    for s, t in seed.edges:
        if s == t:
            continue
        d1, d2 = int(out_deg[s]), int(in_deg[t])
        if d1 <= d1_max and d2 <= d2_max:
            values[d1, d2, 0] += 1.0

    for d1 in range(1, d1_max + 1):
        for d2 in range(1, d2_max + 1):
            row = values[d1, d2]
            row_m_in = values[d1, d2 - 1]
            row_m_out = values[d1 - 1, d2]
            for T in range(T_max):
                off, noff = tri_off(T), tri_off(T + 1)
                sl = slice(off, off + T + 1)
                old = row[sl]
                old_m_in = row_m_in[sl]
                old_m_out = row_m_out[sl]
                eo = e_out[d1 - 1, sl]
                ei = e_in[d2 - 1, sl]
                N = np.arange(T + 2, dtype=np.float64)
                w_vert = N / (T + 1.0)
                w_stay = (T + 1.0 - N) / (T + 1.0)
                den_in_v = T + din * (N[1:] - 1.0) + A_in
                den_out_v = T + dout * (N[1:] - 1.0) + A_out
                Nold = np.arange(T + 1, dtype=np.float64)
                den_in_s = T + din * Nold + A_in
                den_out_s = T + dout * Nold + A_out

                # new vertex is a source: the target's in-degree moves
                alpha_part = (
                    old * (1.0 - (d2 + din) / den_in_v)
                    + ((d2 - 1.0 + din) / den_in_v)
                    * (( ei if d1 == 1 else 0.0) + old_m_in)
                )
                # new vertex is a target: mirrored on the out side
                gamma_part = (
                    old * (1.0 - (d1 + dout) / den_out_v)
                    + ((d1 - 1.0 + dout) / den_out_v)
                    * ((eo if d2 == 1 else 0.0) + old_m_out)
                )
                vert = np.zeros(T + 2)
                vert[1:] = a * alpha_part + (1.0 - a) * gamma_part

                stay = np.zeros(T + 2)
                stay[: T + 1] = (
                    old * (1.0 - (d2 + din) / den_in_s - (d1 + dout) / den_out_s)
                    + old_m_in * (d2 - 1.0 + din) / den_in_s
                    + old_m_out * (d1 - 1.0 + dout) / den_out_s
                    + eo * ei * ((d1 - 1.0 + dout) / den_out_s)
                    * ((d2 - 1.0 + din) / den_in_s)
                )

                row[noff : noff + T + 2] = w_vert * vert + w_stay * stay
    return DPTable(
        kind="EX", params=p, n0=seed.n0, t0=seed.t0, T_max=T_max,
        A_in=A_in, A_out=A_out, values=values,
    )


def mix_binomial(table: DPTable, params: ModelParams | None = None) -> np.ndarray:
    """Average a table over N ~ Binomial(T, alpha + gamma).

    Returns the unconditional expectation curve: index 0 is the seed
    plane (T = 0), index T the expectation after T process steps.
    Shape is (T_max + 1, rows...) matching the table's row structure.
    """
    p = table.params if params is None else params
    ag = p.alpha + p.gamma
    beta = 1.0 - ag
    rows_shape = table.values.shape[:-1]
    out = np.zeros((table.T_max + 1,) + rows_shape, dtype=np.float64)
    for T in range(table.T_max + 1):
        plane = table.plane(T)
        if beta <= 0.0:
            out[T] = plane[..., T]
            continue
        N = np.arange(T + 1, dtype=np.float64)
        logw = (
            gammaln(T + 1.0) - gammaln(N + 1.0) - gammaln(T - N + 1.0)
            + N * math.log(ag) + (T - N) * math.log(beta)
        )
        w = np.exp(logw)
        out[T] = plane @ w
    return out


# ---------------------------------------------------------------------------
# Brute-force enumeration
# ---------------------------------------------------------------------------

ENUM_T_MAX = 6
ENUM_N_MAX = 7


def _degrees(n: int, edges) -> tuple[np.ndarray, np.ndarray]:
    in_deg = np.zeros(n, dtype=np.int64)
    out_deg = np.zeros(n, dtype=np.int64)
    for s, t in edges:
        out_deg[s] += 1
        in_deg[t] += 1
    return in_deg, out_deg


@dataclass
class ExactDistribution:
    """Full outcome distribution of the process after T steps.

    ``outcomes`` maps each reachable labelled state, merged by vertex
    count and edge multiset, to its exact probability.
    """

    params: ModelParams
    n0: int
    t0: int
    T: int
    outcomes: list[tuple[int, tuple[tuple[int, int], ...], float]]

    def total_probability(self) -> float:
        return sum(pr for _, _, pr in self.outcomes)

    def prob_N(self, N: int) -> float:
        n_target = self.n0 + N
        return sum(pr for n, _, pr in self.outcomes if n == n_target)

    def _expect(self, stat, N: int | None = None) -> float:
        """E[stat(n, edges)], optionally conditioned on N added vertices."""
        total = 0.0
        mass = 0.0
        for n, edges, pr in self.outcomes:
            if N is not None and n != self.n0 + N:
                continue
            total += pr * stat(n, edges)
            mass += pr
        if N is None:
            return total
        return total / mass if mass > 0.0 else 0.0

    def e_n_in(self, d: int, N: int | None = None) -> float:
        return self._expect(
            lambda n, e: int(np.sum(_degrees(n, e)[0] == d)), N
        )

    def e_n_out(self, d: int, N: int | None = None) -> float:
        return self._expect(
            lambda n, e: int(np.sum(_degrees(n, e)[1] == d)), N
        )

    def e_pair_in(self, d1: int, d2: int, N: int | None = None) -> float:
        """E[n_{d1} n_{d2}] - [d1=d2] E[n_{d1}] over in-degrees."""

        def stat(n, e):
            cnt = _degrees(n, e)[0]
            c1 = int(np.sum(cnt == d1))
            c2 = int(np.sum(cnt == d2))
            return c1 * c2 - (c1 if d1 == d2 else 0)

        return self._expect(stat, N)

    def var_n_in(self, d: int, N: int | None = None) -> float:
        m1 = self.e_n_in(d, N)
        return self.e_pair_in(d, d, N) + m1 - m1 * m1

    def e_x(self, d1: int, d2: int, N: int | None = None) -> float:
        """Expected count of non-loop edges with endpoint degrees (d1, d2)."""

        def stat(n, e):
            in_deg, out_deg = _degrees(n, e)
            return sum(
                1 for s, t in e
                if s != t and out_deg[s] == d1 and in_deg[t] == d2
            )

        return self._expect(stat, N)


def enumerate_exact(params: ModelParams, seed: SeedGraph | None, T: int) -> ExactDistribution:
    """Expand every trajectory of T steps; exact outcome probabilities.

    States reached by different histories but sharing the same edge
    multiset are merged (all degree statistics depend only on the
    multiset).  Guarded to T <= 6 and n0 + T <= 7.
    """
    p, seed = validate_params(params, seed)
    if T > ENUM_T_MAX or seed.n0 + T > ENUM_N_MAX:
        raise ValueError(
            f"enumeration supports T <= {ENUM_T_MAX} and n0 + T <= {ENUM_N_MAX}"
        )
    states: dict[tuple[int, tuple], float] = {
        (seed.n0, tuple(sorted(seed.edges))): 1.0
    }
    for _ in range(T):
        nxt: dict[tuple[int, tuple], float] = defaultdict(float)
        for (n, edges), pr in states.items():
            t = len(edges)
            in_deg, out_deg = _degrees(n, edges)
            den_in = t + p.delta_in * n
            den_out = t + p.delta_out * n
            if p.alpha > 0.0:
                for w in range(n):
                    pw = (in_deg[w] + p.delta_in) / den_in
                    key = (n + 1, tuple(sorted(edges + ((n, w),))))
                    nxt[key] += pr * p.alpha * pw
            if p.gamma > 0.0:
                for v in range(n):
                    pv = (out_deg[v] + p.delta_out) / den_out
                    key = (n + 1, tuple(sorted(edges + ((v, n),))))
                    nxt[key] += pr * p.gamma * pv
            if p.beta > 0.0:
                for v in range(n):
                    pv = (out_deg[v] + p.delta_out) / den_out
                    for w in range(n):
                        pw = (in_deg[w] + p.delta_in) / den_in
                        key = (n, tuple(sorted(edges + ((v, w),))))
                        nxt[key] += pr * p.beta * pv * pw
        states = dict(nxt)
    outcomes = [(n, edges, pr) for (n, edges), pr in sorted(states.items())]
    return ExactDistribution(params=p, n0=seed.n0, t0=seed.t0, T=T, outcomes=outcomes)
