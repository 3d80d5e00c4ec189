"""LFR-style planted-partition benchmark graphs.

Degrees follow a truncated power law with exponent ``gamma``; community
sizes follow a power law with exponent ``beta`` and sum to ``n``. A vertex
of degree ``k`` gets ``(1 - mu) * k`` edges inside its community, rounded
up or down at random so that ``mu`` is the expected fraction of external
edges.
Stubs are paired by a configuration model; bad pairs (self-loops,
duplicates, internal stubs that leave the community, external stubs that
stay inside it) are repaired by degree-preserving swaps.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .community.partition import Partition, write_partition
from .errors import GenerationError, ValidationError
from .graph import Graph, write_edge_list

SWAP_SWEEPS = 10
MAX_ATTEMPTS = 20


@dataclass(frozen=True)
class GenSpec:
    n: int = 1000
    avg_degree: float = 20.0
    gamma: float = 2.0
    beta: float = 1.0
    mu: float = 0.1
    max_degree: int | None = None  # default max(n // 10, 2 <k>)
    min_community: int | None = None  # default max(10, k_min + 1)
    seed: int = 0

    def __post_init__(self):
        if self.n < 10:
            raise ValidationError("n must be >= 10")
        if not 0 < self.mu < 1:
            raise ValidationError(f"mu must lie in (0, 1), got {self.mu}")
        if self.gamma <= 1:
            raise ValidationError("gamma must be > 1")
        if self.beta < 1:
            raise ValidationError("beta must be >= 1")
        if self.avg_degree <= 0:
            raise ValidationError("avg_degree must be positive")
        if self.avg_degree >= self.n - 1:
            raise ValidationError("avg_degree must be below n - 1")

    @property
    def degree_cap(self) -> int:
        if self.max_degree is not None:
            return int(self.max_degree)
        # n // 10, but never so tight that the mean degree is unreachable
        return min(self.n - 1, max(2, self.n // 10, math.ceil(2 * self.avg_degree)))

    def tag(self) -> str:
        return (f"n{self.n}_k{self.avg_degree:g}_g{self.gamma:g}_b{self.beta:g}"
                f"_mu{self.mu:g}_s{self.seed}")


@dataclass(eq=False)
class Benchmark:
    spec: GenSpec
    graph: Graph
    truth: Partition
    realized_mu: float
    realized_avg_degree: float
    community_sizes: list[int] = field(default_factory=list)

    def sidecar(self) -> dict:
        return {
            "schema_version": 1,
            "spec": asdict(self.spec),
            "realized_mu": self.realized_mu,
            "realized_avg_degree": self.realized_avg_degree,
            "vertices": self.graph.n,
            "edges": self.graph.edge_count,
            "communities": len(self.community_sizes),
            "community_sizes": self.community_sizes,
        }


def _powerlaw_mean(lo: float, hi: float, exponent: float) -> float:
    """Mean of a continuous power law x^-exponent on [lo, hi]."""
    a = exponent
    if abs(a - 1) < 1e-12:
        return (hi - lo) / math.log(hi / lo)
    if abs(a - 2) < 1e-12:
        return math.log(hi / lo) / (1 / lo - 1 / hi)
    num = (hi ** (2 - a) - lo ** (2 - a)) / (2 - a)
    den = (hi ** (1 - a) - lo ** (1 - a)) / (1 - a)
    return num / den


def _powerlaw_sample(rng, lo: float, hi: float, exponent: float, size: int) -> np.ndarray:
    u = rng.random(size)
    a = exponent
    if abs(a - 1) < 1e-12:
        return lo * (hi / lo) ** u
    p = 1 - a
    return (lo ** p + u * (hi ** p - lo ** p)) ** (1 / p)


def _solve_kmin(avg: float, cap: float, gamma: float) -> float:
    """Lower cutoff giving the continuous power law a mean of ``avg``."""
    lo, hi = 1.0, float(cap)
    if _powerlaw_mean(lo, cap, gamma) > avg:
        raise GenerationError(f"average degree {avg} unreachable: even k_min=1 gives a larger mean")
    if avg >= cap:
        raise GenerationError(f"average degree {avg} must be below the degree cap {cap}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _powerlaw_mean(mid, cap, gamma) < avg:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sample_degrees(spec: GenSpec, rng) -> np.ndarray:
    cap = spec.degree_cap
    kmin = _solve_kmin(spec.avg_degree, cap, spec.gamma)
    # floor(x + u) is an unbiased integer rounding, keeping the mean on target
    raw = _powerlaw_sample(rng, kmin, cap, spec.gamma, spec.n)
    deg = np.floor(raw + rng.random(spec.n)).astype(np.int64)
    deg = np.clip(deg, max(1, int(math.floor(kmin))), cap)
    if deg.sum() % 2:
        i = int(np.argmin(deg))
        deg[i] += 1
    return deg


def sample_sizes(spec: GenSpec, rng, smin: int, smax: int) -> list[int]:
    """Community sizes summing to exactly ``n``; surplus is removed by dropping
    the last draw and any deficit is spread over the smallest communities."""
    if smin > smax:
        raise GenerationError(f"minimum community size {smin} exceeds maximum {smax}")
    sizes: list[int] = []
    total = 0
    while total < spec.n:
        s = int(round(_powerlaw_sample(rng, smin, smax + 0.5, spec.beta, 1)[0]))
        s = min(max(s, smin), smax)
        sizes.append(s)
        total += s
    if total > spec.n:
        total -= sizes.pop()
    if not sizes:
        return [spec.n]
    deficit = spec.n - total
    while deficit > 0:
        i = min(range(len(sizes)), key=lambda j: (sizes[j], j))
        sizes[i] += 1
        deficit -= 1
    return sizes


def _assign(internal: np.ndarray, sizes: list[int], rng) -> np.ndarray:
    """Place vertices, largest internal degree first, into communities big
    enough to hold their internal edges."""
    n = len(internal)
    room = np.array(sizes, dtype=np.int64)
    cap = np.array(sizes, dtype=np.int64) - 1  # max internal degree a member can have
    comm = np.full(n, -1, dtype=np.int64)
    order = np.argsort(-internal, kind="stable")
    for v in order.tolist():
        ok = np.flatnonzero((room > 0) & (cap >= internal[v]))
        if len(ok) == 0:
            raise GenerationError(
                f"vertex with internal degree {internal[v]} fits no community "
                f"(largest community size {max(sizes)})")
        # weight by remaining room so large communities fill proportionally
        p = room[ok] / room[ok].sum()
        c = int(ok[rng.choice(len(ok), p=p)])
        comm[v] = c
        room[c] -= 1
    return comm


def _pair_stubs(stubs: np.ndarray, rng, allowed, existing: set, label: str,
                leftovers: list | None = None) -> list[tuple[int, int]]:
    """Random perfect matching of ``stubs`` with swap repair of bad pairs.

    Pairs still bad after the repair sweeps are either handed back through
    ``leftovers`` (both stubs appended) or, if it is None, reported as a
    generation error.
    """
    if len(stubs) % 2:
        raise GenerationError(f"odd {label} stub count")
    s = stubs.copy()
    rng.shuffle(s)
    pairs = s.reshape(-1, 2).tolist()
    if not pairs:
        return []
    used: dict[tuple[int, int], int] = {}

    def key(a, b):
        return (a, b) if a < b else (b, a)

    def good(a, b):
        return a != b and allowed(a, b) and key(a, b) not in existing and used.get(key(a, b), 0) == 0

    for a, b in pairs:
        used[key(a, b)] = used.get(key(a, b), 0) + 1

    def is_bad(i):
        a, b = pairs[i]
        k = key(a, b)
        return a == b or not allowed(a, b) or k in existing or used[k] > 1

    bad = [i for i in range(len(pairs)) if is_bad(i)]
    npairs = len(pairs)
    for _ in range(SWAP_SWEEPS):
        if not bad:
            break
        still = []
        for i in bad:
            if not is_bad(i):
                continue
            fixed = False
            for j in rng.permutation(npairs).tolist():
                if j == i:
                    continue
                a, b = pairs[i]
                c, d = pairs[j]
                for x1, y1, x2, y2 in ((a, c, b, d), (a, d, b, c)):
                    used[key(a, b)] -= 1
                    used[key(c, d)] -= 1
                    if good(x1, y1) and good(x2, y2) and key(x1, y1) != key(x2, y2):
                        pairs[i], pairs[j] = [x1, y1], [x2, y2]
                        used[key(x1, y1)] = used.get(key(x1, y1), 0) + 1
                        used[key(x2, y2)] = used.get(key(x2, y2), 0) + 1
                        fixed = True
                        break
                    used[key(a, b)] += 1
                    used[key(c, d)] += 1
                if fixed:
                    break
            if not fixed:
                still.append(i)
        bad = still
    bad = [i for i in bad if is_bad(i)]
    if bad and leftovers is not None:
        drop = set(bad)
        for i in bad:
            leftovers.extend(pairs[i])
        return [tuple(p) for i, p in enumerate(pairs) if i not in drop]
    if bad:
        raise GenerationError(f"{len(bad)} {label} stub pairs could not be repaired "
                              f"after {SWAP_SWEEPS} swap sweeps")
    return [tuple(p) for p in pairs]


def generate(spec: GenSpec) -> Benchmark:
    """Build one benchmark. Wiring failures are retried with fresh draws from
    the same seeded stream, up to ``MAX_ATTEMPTS`` times."""
    _solve_kmin(spec.avg_degree, spec.degree_cap, spec.gamma)
    rng = np.random.default_rng(spec.seed)
    err = None
    for _ in range(MAX_ATTEMPTS):
        try:
            return _generate_once(spec, rng)
        except GenerationError as exc:
            err = exc
    raise GenerationError(f"no valid wiring after {MAX_ATTEMPTS} attempts: {err}")


def _generate_once(spec: GenSpec, rng) -> Benchmark:
    deg = sample_degrees(spec, rng)
    kmin = int(deg.min())
    # stochastic rounding keeps the expected external fraction at mu
    internal = np.floor((1 - spec.mu) * deg + rng.random(spec.n)).astype(np.int64)
    internal = np.minimum(internal, deg)

    smin = spec.min_community if spec.min_community is not None else max(10, kmin + 1)
    smax = max(spec.degree_cap, int(internal.max()) + 1, smin)
    smax = min(smax, spec.n)
    if int(internal.max()) + 1 > smax:
        raise GenerationError(
            f"internal degree {int(internal.max())} needs a community of "
            f"{int(internal.max()) + 1} vertices; at most {smax} allowed")
    sizes = sample_sizes(spec, rng, smin, smax)
    comm = _assign(internal, sizes, rng)

    # each community needs an even internal stub total
    for c in range(len(sizes)):
        members = np.flatnonzero(comm == c)
        if internal[members].sum() % 2:
            cand = members[(internal[members] > 0) & (deg[members] > 1)]
            if len(cand) == 0:
                cand = members[internal[members] > 0]
            v = int(cand[rng.integers(len(cand))])
            internal[v] -= 1
            deg[v] -= 1
    external = deg - internal
    if external.sum() % 2:
        cand = np.flatnonzero((external > 0) & (deg > 1))
        if len(cand) == 0:
            cand = np.flatnonzero(external > 0)
        v = int(cand[rng.integers(len(cand))])
        external[v] -= 1

    edges: list[tuple[int, int]] = []
    existing: set[tuple[int, int]] = set()
    # internal stubs that cannot form a simple subgraph become external
    spill: list[int] = []
    for c in range(len(sizes)):
        members = np.flatnonzero(comm == c)
        stubs = np.repeat(members, internal[members])
        new = _pair_stubs(stubs, rng, lambda a, b: True, existing,
                          f"community {c} internal", leftovers=spill)
        for a, b in new:
            existing.add((min(a, b), max(a, b)))
        edges.extend(new)
    comm_list = comm.tolist()
    stubs = np.concatenate([np.repeat(np.arange(spec.n), external),
                            np.asarray(spill, dtype=np.int64)])
    new = _pair_stubs(stubs, rng, lambda a, b: comm_list[a] != comm_list[b], existing, "external")
    edges.extend(new)

    g = Graph.from_edges(spec.n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))
    if g.edge_count != len(edges):
        raise GenerationError("wiring produced duplicate edges")
    truth = Partition.from_labels(comm)
    realized_mu, realized_k = _mixing(g, comm)
    return Benchmark(spec, g, truth, realized_mu, realized_k, [int(s) for s in sizes])


def _mixing(g: Graph, comm: np.ndarray) -> tuple[float, float]:
    deg = g.degrees()
    cross = (comm[g.src] != comm[g.dst]).astype(np.int64)
    ext = np.bincount(g.src, weights=cross, minlength=g.n) + np.bincount(g.dst, weights=cross, minlength=g.n)
    has = deg > 0
    mu = float(np.mean(ext[has] / deg[has])) if has.any() else 0.0
    return mu, float(deg.mean())


def realized_mixing(g: Graph, truth: Partition) -> float:
    return _mixing(g, truth.assignment)[0]


GRID_GAMMA_BETA = ((2, 1), (2, 2), (3, 1), (3, 2))
GRID_AVG_DEGREE = (15, 20, 25)
GRID_MU = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)


def parameter_grid(n: int = 1000, seed: int = 0) -> list[GenSpec]:
    """The 4 x 3 x 6 benchmark grid over (gamma, beta), <k> and mu."""
    return [
        GenSpec(n=n, avg_degree=k, gamma=g, beta=b, mu=mu, seed=seed)
        for g, b in GRID_GAMMA_BETA
        for k in GRID_AVG_DEGREE
        for mu in GRID_MU
    ]


def write_benchmark(bench: Benchmark, prefix) -> dict[str, str]:
    """Write ``<prefix>.edges``, ``<prefix>.truth`` and ``<prefix>.json``."""
    prefix = os.fspath(prefix)
    paths = {"graph": prefix + ".edges", "truth": prefix + ".truth", "sidecar": prefix + ".json"}
    write_edge_list(bench.graph, paths["graph"])
    write_partition(bench.truth, paths["truth"], labels=bench.graph.labels)
    with open(paths["sidecar"], "w", encoding="utf-8") as fh:
        json.dump(bench.sidecar(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
