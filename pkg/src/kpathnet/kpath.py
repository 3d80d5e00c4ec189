"""WERW-Kpath: k-path edge centrality by weight-reinforced random walks.

Each of ``rho`` iterations picks a source vertex, clears every traversal
flag and lets a message wander along untraversed edges for at most
``kappa`` hops. At every hop the next edge is drawn with probability
proportional to its accumulated weight, and the chosen edge's weight is
bumped by one. Walks never reuse an edge, but may revisit a vertex.

Randomness comes from two PCG64 streams spawned from one seed: the first
drives source selection (one uniform draw per iteration), the second
drives edge selection (one uniform draw per hop). Given a graph and a
``WalkConfig`` the output is bit-for-bit reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DomainError, ValidationError
from .graph import Graph


class SourcePolicy(str, enum.Enum):
    DEGREE = "degree"
    UNIFORM = "uniform"


class Convention(str, enum.Enum):
    # (omega - 1) / rho: expected per-walk traversal probability
    THEOREM = "theorem"
    # omega / rho, including the initial unit weight
    PSEUDOCODE = "pseudocode"


@dataclass(frozen=True)
class WalkConfig:
    kappa: int = 20
    rho: int | None = None  # None means one walk per edge
    seed: int = 0
    source_policy: SourcePolicy = SourcePolicy.DEGREE
    convention: Convention = Convention.THEOREM
    # select edges as if every weight were still 1; counts still accumulate
    static_weights: bool = False

    def __post_init__(self):
        object.__setattr__(self, "source_policy", SourcePolicy(self.source_policy))
        object.__setattr__(self, "convention", Convention(self.convention))
        if int(self.kappa) < 1:
            raise ValidationError(f"kappa must be >= 1, got {self.kappa}")
        if self.rho is not None and int(self.rho) < 1:
            raise ValidationError(f"rho must be >= 1, got {self.rho}")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")

    def resolved_rho(self, g: Graph) -> int:
        return g.edge_count if self.rho is None else int(self.rho)


@dataclass(frozen=True, eq=False)
class CentralityMap:
    omega: np.ndarray
    estimate: np.ndarray
    rho_used: int
    kappa_used: int
    convention: Convention

    @property
    def traversals(self) -> np.ndarray:
        return self.omega - 1


@dataclass(frozen=True)
class WalkTrace:
    source: int
    edge_ids: tuple[int, ...]


@dataclass
class WalkState:
    """Mutable per-run state: weights, traversal stamps and the edge stream.

    Everything a hop needs lives in one record per adjacency slot, so a
    step reads the current vertex's block and writes one mirror record.
    Each edge has two slots whose weights are kept equal. ``stamp == walk``
    marks a slot as traversed in the current walk, so clearing every flag
    is a single increment of ``walk``.
    """

    # columns: WEIGHT, STAMP, NBR, MIRROR, EDGE
    slots: np.ndarray
    edge_slot: np.ndarray
    edge_rng: np.random.Generator
    walk: int = 0
    static_weights: bool = False

    @classmethod
    def fresh(cls, g: Graph, edge_rng, static_weights=False, rho=None) -> "WalkState":
        # 32-bit records halve the memory traffic; weights and walk stamps
        # are bounded by rho + 1, so only huge runs need 64 bits
        big = max(len(g.adj_edge), rho or 0) >= 2**31 - 2
        slots = np.empty((len(g.adj_edge), 5), dtype=np.int64 if big else np.int32)
        slots[:, WEIGHT] = 1
        slots[:, STAMP] = -1
        slots[:, NBR] = g.adj_nbr
        slots[:, MIRROR] = g.adj_mirror
        slots[:, EDGE] = g.adj_edge
        return cls(slots, g.edge_slot, edge_rng, 0, static_weights)

    @property
    def omega(self) -> np.ndarray:
        """Per-edge accumulated weight, indexed by edge id."""
        return self.slots[self.edge_slot, WEIGHT].astype(np.int64)

    def reset_flags(self) -> None:
        self.walk += 1


WEIGHT, STAMP, NBR, MIRROR, EDGE = range(5)


def make_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (source, edge) generators derived from one seed."""
    ss = np.random.SeedSequence(seed)
    a, b = ss.spawn(2)
    return np.random.Generator(np.random.PCG64(a)), np.random.Generator(np.random.PCG64(b))


@numba.njit(cache=True)
def _pick(weights, u):
    """Index chosen by cumulative-sum inversion of ``u * sum(weights)``."""
    total = 0.0
    for x in weights:
        total += x
    r = u * total
    acc = 0.0
    last = -1
    for i in range(len(weights)):
        if weights[i] > 0.0:
            acc += weights[i]
            last = i
            if r < acc:
                return i
    return last


@numba.njit(cache=True)
def _propagate(start, kappa, indptr, slots, walk, static, edge_rng, trace):
    v = start
    steps = 0
    while steps < kappa:
        lo = indptr[v]
        hi = indptr[v + 1]
        total = 0.0
        for j in range(lo, hi):
            if slots[j, 1] != walk:
                total += 1.0 if static else slots[j, 0]
        if total == 0.0:
            break
        r = edge_rng.random() * total
        acc = 0.0
        chosen = -1
        for j in range(lo, hi):
            if slots[j, 1] != walk:
                acc += 1.0 if static else slots[j, 0]
                chosen = j
                if r < acc:
                    break
        back = slots[chosen, 3]
        slots[chosen, 0] += 1
        slots[back, 0] += 1
        slots[chosen, 1] = walk
        slots[back, 1] = walk
        trace[steps] = slots[chosen, 4]
        v = slots[chosen, 2]
        steps += 1
    return steps


@numba.njit(cache=True)
def _run(rho, kappa, uniform_sources, n, cum_deg, indptr, slots, first_walk, static,
         src_rng, edge_rng):
    trace = np.empty(kappa, dtype=np.int64)
    total_steps = 0
    two_m = cum_deg[n]
    for it in range(rho):
        u = src_rng.random()
        if uniform_sources:
            s = min(int(u * n), n - 1)
        else:
            s = np.searchsorted(cum_deg, u * two_m, side="right") - 1
            if s >= n:
                s = n - 1
        total_steps += _propagate(s, kappa, indptr, slots, first_walk + it, static,
                                  edge_rng, trace)
    return total_steps


def select_edge(weights, traversed, rng: np.random.Generator) -> int:
    """Index of an untraversed entry drawn with probability proportional to
    its weight. Consumes one uniform draw from ``rng``."""
    w = np.asarray(weights, dtype=np.float64)
    mask = np.asarray(traversed, dtype=bool)
    if w.shape != mask.shape:
        raise ValidationError("weights and flags must align")
    live = np.where(mask, 0.0, w)
    if not np.any(live > 0):
        raise DomainError("no untraversed incident edge to select")
    return int(_pick(live, rng.random()))


def select_source(g: Graph, policy: SourcePolicy | str, rng: np.random.Generator) -> int:
    policy = SourcePolicy(policy)
    if g.n == 0:
        raise DomainError("graph has no vertices")
    u = rng.random()
    if policy is SourcePolicy.UNIFORM:
        return min(int(u * g.n), g.n - 1)
    if g.edge_count == 0:
        raise DomainError("degree-proportional sources need at least one edge")
    cum = g.indptr
    return min(int(np.searchsorted(cum, u * cum[-1], side="right")) - 1, g.n - 1)


def source_probabilities(g: Graph, policy: SourcePolicy | str) -> np.ndarray:
    policy = SourcePolicy(policy)
    if policy is SourcePolicy.UNIFORM:
        return np.full(g.n, 1.0 / g.n)
    if g.edge_count == 0:
        raise DomainError("degree-proportional sources need at least one edge")
    return g.degrees() / (2.0 * g.edge_count)


def message_propagation(g: Graph, start: int, kappa: int, state: WalkState) -> WalkTrace:
    """Run one walk from ``start`` against the current flags in ``state``.

    Flags are not cleared here; call ``state.reset_flags()`` first to start
    a fresh iteration.
    """
    if not 0 <= start < g.n:
        raise DomainError(f"start vertex {start} out of range")
    if kappa < 1:
        raise ValidationError("kappa must be >= 1")
    trace = np.empty(kappa, dtype=np.int64)
    k = _propagate(start, kappa, g.indptr, state.slots, state.walk,
                   state.static_weights, state.edge_rng, trace)
    return WalkTrace(start, tuple(trace[:k].tolist()))


def estimates_from_omega(omega: np.ndarray, rho: int, convention) -> np.ndarray:
    convention = Convention(convention)
    if convention is Convention.THEOREM:
        return (omega - 1) / rho
    return omega / rho


def werw_kpath(g: Graph, cfg: WalkConfig | None = None) -> CentralityMap:
    """Estimate the k-path centrality of every edge of ``g``."""
    cfg = cfg or WalkConfig()
    if g.edge_count == 0:
        raise DomainError("graph has no edges")
    rho = cfg.resolved_rho(g)
    kappa = int(cfg.kappa)
    src_rng, edge_rng = make_streams(cfg.seed)
    state = WalkState.fresh(g, edge_rng, cfg.static_weights, rho)
    _run(rho, kappa, cfg.source_policy is SourcePolicy.UNIFORM, g.n, g.indptr,
         g.indptr, state.slots, 0, cfg.static_weights, src_rng, edge_rng)
    omega = state.omega
    est = estimates_from_omega(omega, rho, cfg.convention)
    omega.setflags(write=False)
    est.setflags(write=False)
    return CentralityMap(omega, est, rho, kappa, cfg.convention)


def werw_kpath_traced(g: Graph, cfg: WalkConfig) -> tuple[CentralityMap, list[WalkTrace]]:
    """Reference loop built from the public single-step operations.

    Consumes the random streams exactly as :func:`werw_kpath` does, so both
    return identical weights. Slow; intended for diagnostics and tests.
    """
    if g.edge_count == 0:
        raise DomainError("graph has no edges")
    rho = cfg.resolved_rho(g)
    src_rng, edge_rng = make_streams(cfg.seed)
    state = WalkState.fresh(g, edge_rng, cfg.static_weights, rho)
    traces = []
    for _ in range(rho):
        s = select_source(g, cfg.source_policy, src_rng)
        state.reset_flags()
        traces.append(message_propagation(g, s, cfg.kappa, state))
    omega = state.omega
    est = estimates_from_omega(omega, rho, cfg.convention)
    return CentralityMap(omega, est, rho, cfg.kappa, cfg.convention), traces
