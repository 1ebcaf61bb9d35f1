"""Synthetic instance generation and longest-directed-distance features.

DAG families: layered, Erdős–Rényi and stochastic block graphs, the latter
two oriented from lower to higher node index.  Durations come from a clamped
four-component Gaussian mixture.  Heterogeneity is attached by a
:class:`Profile` that samples task types and demands and supplies pools and a
type-level compatibility table.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np
from scipy import stats

from .errors import ProfileError
from .model import CompatTable, Instance, Pool, Task, fits, topological_sort, validate_instance

GMM_MEANS = (0.5, 1.0, 3.0, 5.0)
GMM_SDS = (0.5, 1.0, 1.0, 1.0)
D_MAX = 500


@dataclass(frozen=True)
class Layered:
    sigma_n: float = 0.75
    rho_e: float = 0.2
    rho_s: float = 0.14


@dataclass(frozen=True)
class ErdosRenyi:
    p: float = 0.05


@dataclass(frozen=True)
class StochasticBlock:
    p_in: float = 0.3
    p_out: float = 0.005
    blocks: int = 5


DagKind = Union[Layered, ErdosRenyi, StochasticBlock]


def _check_prob(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


def _layer_sizes(n: int, sigma: float, rng: np.random.Generator) -> list[int]:
    n_layers = math.ceil(math.sqrt(n))
    mean = n / n_layers
    sd = sigma * mean
    if sd > 0:
        raw = stats.truncnorm.rvs((0.5 - mean) / sd, np.inf, loc=mean, scale=sd,
                                  size=n_layers, random_state=rng)
    else:
        raw = np.full(n_layers, mean)
    # Largest-remainder allocation of n nodes, at least one per layer.
    spare = n - n_layers
    share = raw / raw.sum() * spare
    sizes = np.floor(share).astype(int)
    order = np.argsort(-(share - sizes), kind="stable")
    sizes[order[: spare - sizes.sum()]] += 1
    return [int(s) + 1 for s in sizes]


def gen_dag(kind: DagKind, n: int, seed: int) -> list[tuple[int, int]]:
    """Random DAG on nodes ``1..n``; every edge goes from a lower to a higher id."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int]] = []
    if isinstance(kind, ErdosRenyi):
        _check_prob("p", kind.p)
        draws = rng.random((n, n))
        edges = [(i + 1, j + 1) for i in range(n) for j in range(i + 1, n) if draws[i, j] < kind.p]
    elif isinstance(kind, StochasticBlock):
        _check_prob("p_in", kind.p_in)
        _check_prob("p_out", kind.p_out)
        if kind.blocks < 1:
            raise ValueError("blocks must be positive")
        block = [i * kind.blocks // n for i in range(n)]
        draws = rng.random((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                p = kind.p_in if block[i] == block[j] else kind.p_out
                if draws[i, j] < p:
                    edges.append((i + 1, j + 1))
    elif isinstance(kind, Layered):
        _check_prob("rho_e", kind.rho_e)
        _check_prob("rho_s", kind.rho_s)
        if kind.sigma_n < 0:
            raise ValueError("sigma_n must be nonnegative")
        sizes = _layer_sizes(n, kind.sigma_n, rng)
        layers, nxt = [], 1
        for s in sizes:
            layers.append(list(range(nxt, nxt + s)))
            nxt += s
        for a, la in enumerate(layers):
            for b in range(a + 1, len(layers)):
                p = kind.rho_e if b == a + 1 else kind.rho_s
                draws = rng.random((len(la), len(layers[b])))
                edges.extend((u, v) for iu, u in enumerate(la)
                             for iv, v in enumerate(layers[b]) if draws[iu, iv] < p)
    else:
        raise TypeError(f"unknown DAG kind {kind!r}")
    return edges


def duration_from_mixture(m: float) -> int:
    """``round(100 * max(m, 0)) + 1``."""
    return int(np.rint(100 * max(m, 0.0))) + 1


def gen_durations_gmm(n: int, seed: int) -> list[int]:
    """Durations from the equal-weight four-component mixture, clamped at 0."""
    rng = np.random.default_rng(seed)
    comp = rng.integers(0, len(GMM_MEANS), size=n)
    m = rng.normal(np.asarray(GMM_MEANS)[comp], np.asarray(GMM_SDS)[comp])
    return [int(d) for d in np.rint(100 * np.maximum(m, 0.0)).astype(int) + 1]


# heterogeneity profiles ----------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    """How to turn a bare DAG into a heterogeneous instance.

    ``demands[l]`` lists the values resource ``l`` is drawn from uniformly;
    ``None`` means the value must come from ``base_demands`` (or, failing
    that, uniformly from ``fallback_range``).
    """

    name: str
    type_probs: tuple[float, ...]
    demands: tuple[tuple[float, ...] | None, ...]
    pools: tuple[tuple[tuple[float, ...], int], ...]
    compat: Mapping[tuple[int, int], float]
    fallback_range: tuple[int, int] = (1, 593)

    def check(self) -> None:
        if not self.pools:
            raise ProfileError("profile has no pools")
        if abs(sum(self.type_probs) - 1.0) > 1e-9 or any(p < 0 for p in self.type_probs):
            raise ProfileError("task type probabilities must be a distribution")
        r = len(self.demands)
        if any(len(cap) != r for cap, _ in self.pools):
            raise ProfileError("pool capacities and demands disagree on resource count")
        worst = [max(ch) if ch else self.fallback_range[1] for ch in self.demands]
        for tt, p in enumerate(self.type_probs):
            if p == 0:
                continue
            if not any(self.compat.get((tt, pt), 0.0) > 0 and fits(worst, cap)
                       for cap, pt in self.pools):
                raise ProfileError(f"task type {tt} has no pool that is compatible and large enough")


TPCH = Profile(
    name="tpch",
    type_probs=(1 / 3, 1 / 3, 1 / 3),
    demands=(None, (30.0, 40.0, 50.0)),
    pools=(((600.0, 260.0), 0), ((800.0, 240.0), 1), ((500.0, 240.0), 1)),
    compat={(0, 0): 1.0, (1, 0): 1 / 0.8, (2, 0): 1 / 0.7,
            (0, 1): 0.0, (1, 1): 1 / 1.0, (2, 1): 1 / 1.1},
)

COMPGRAPH = Profile(
    name="compgraph",
    type_probs=(1 / 6, 1 / 6, 2 / 3),
    demands=((2.0, 4.0, 8.0, 16.0), (1.0, 2.0, 3.0)),
    pools=(((16.0, 15.0), 0), ((12.0, 20.0), 1), ((64.0, 50.0), 1)),
    compat={(0, 0): 1.0, (1, 0): 1 / 0.8, (2, 0): 1 / 1.2,
            (0, 1): 0.0, (1, 1): 1 / 1.2, (2, 1): 1 / 0.8},
)

HOMOGENEOUS = Profile(
    name="homogeneous",
    type_probs=(1.0,),
    demands=((1.0,),),
    pools=(((4.0,), 0),),
    compat={(0, 0): 1.0},
)

PROFILES = {p.name: p for p in (TPCH, COMPGRAPH, HOMOGENEOUS)}


def profile_from_json(data: Mapping) -> Profile:
    """Profile from ``{"type_probs", "demands", "pools": [{"capacity","type"}], "compat": [[tt,pt,k]]}``."""
    try:
        return Profile(
            name=str(data.get("name", "custom")),
            type_probs=tuple(float(p) for p in data["type_probs"]),
            demands=tuple(None if d is None else tuple(float(x) for x in d) for d in data["demands"]),
            pools=tuple((tuple(float(c) for c in p["capacity"]), int(p.get("type", 0)))
                        for p in data["pools"]),
            compat={(int(a), int(b)): float(k) for a, b, k in data["compat"]},
            fallback_range=tuple(data.get("fallback_range", (1, 593))),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProfileError(f"malformed profile: {exc}") from exc


def load_profile(name: str) -> Profile:
    """Built-in profile name or path to a profile JSON file."""
    if name in PROFILES:
        return PROFILES[name]
    with open(name) as fh:
        return profile_from_json(json.load(fh))


def augment_heterogeneous(edges: Sequence[tuple[int, int]], durations: Sequence[float] | Mapping[int, float],
                          profile: Profile, seed: int,
                          base_demands: Mapping[int, float] | None = None) -> Instance:
    """Sample task types and demands, attach pools and the compatibility table.

    Task ids are ``1..n`` when ``durations`` is a sequence.
    """
    profile.check()
    times = dict(durations) if isinstance(durations, Mapping) else {
        i + 1: t for i, t in enumerate(durations)}
    ids = sorted(times)
    rng = np.random.default_rng(seed)
    types = rng.choice(len(profile.type_probs), size=len(ids), p=profile.type_probs)
    cols = []
    for choices in profile.demands:
        if choices is None:
            if base_demands is not None:
                cols.append([float(base_demands[v]) for v in ids])
            else:
                lo, hi = profile.fallback_range
                cols.append([float(x) for x in rng.integers(lo, hi + 1, size=len(ids))])
        else:
            cols.append([float(x) for x in rng.choice(np.asarray(choices), size=len(ids))])
    tasks = [Task(v, float(times[v]), tuple(col[i] for col in cols), int(types[i]))
             for i, v in enumerate(ids)]
    pools = [Pool(i + 1, cap, pt) for i, (cap, pt) in enumerate(profile.pools)]
    inst = Instance(tasks, pools, tuple(edges), CompatTable(profile.compat))
    problems = validate_instance(inst)
    if problems:
        raise ProfileError("; ".join(problems))
    return inst


def make_dag_kind(kind: str, **params: float) -> DagKind:
    table = {"layered": Layered, "er": ErdosRenyi, "sbm": StochasticBlock}
    if kind not in table:
        raise ValueError(f"unknown DAG kind {kind!r}")
    return table[kind](**params)


def generate_instance(kind: str, n: int, seed: int, profile: Profile | str = "compgraph") -> Instance:
    """DAG, mixture durations and profile, all driven by one seed."""
    ss = np.random.SeedSequence(seed)
    s_dag, s_dur, s_aug = (int(c.generate_state(1)[0]) for c in ss.spawn(3))
    prof = load_profile(profile) if isinstance(profile, str) else profile
    edges = gen_dag(make_dag_kind(kind), n, s_dag)
    return augment_heterogeneous(edges, gen_durations_gmm(n, s_dur), prof, s_aug)


def random_instance(seed: int, n_range: tuple[int, int] = (2, 6), max_pools: int = 2,
                    edge_p: float = 0.3, incompat_p: float = 0.2) -> Instance:
    """Small instance with exact float arithmetic, for exhaustive checks.

    Integer durations and demands, dyadic coefficients in {0.5, 1, 2} and a
    third pool only when the instance has at most four tasks.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    hi = max_pools if n <= 4 else min(max_pools, 2)
    m = int(rng.integers(1, hi + 1))
    r = int(rng.integers(1, 3))
    pools = [Pool(c, tuple(float(rng.integers(2, 5)) for _ in range(r))) for c in range(1, m + 1)]
    tasks = []
    for v in range(1, n + 1):
        demand = tuple(float(rng.integers(0 if r > 1 else 1, 3)) for _ in range(r))
        tasks.append(Task(v, float(rng.integers(1, 5)), demand))
    overrides = {}
    for v in range(1, n + 1):
        ks = [float(rng.choice([0.5, 1.0, 2.0])) if rng.random() >= incompat_p else 0.0
              for _ in range(m)]
        if not any(k > 0 and fits(tasks[v - 1].demand, pools[c].capacity) for c, k in enumerate(ks)):
            ok = [c for c in range(m) if fits(tasks[v - 1].demand, pools[c].capacity)]
            ks[ok[int(rng.integers(len(ok)))]] = 1.0
        for c, k in enumerate(ks):
            overrides[(v, c + 1)] = k
    edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if rng.random() < edge_p]
    return Instance(tasks, pools, tuple(edges), CompatTable({}, overrides))


# longest directed distance ------------------------------------------------------


def ldd_raw(inst: Instance) -> np.ndarray:
    """Signed longest-path hop counts with ``+inf`` / ``-inf`` for the two non-path classes."""
    ids = list(inst.task_ids)
    idx = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    order = topological_sort(ids, inst.edges)
    if order is None:
        raise ValueError("edge relation has a cycle")
    longest = np.full((n, n), -1, dtype=np.int64)
    for s in ids:
        row = longest[idx[s]]
        row[idx[s]] = 0
        for v in order:
            if row[idx[v]] < 0:
                continue
            for w in inst.succs[v]:
                row[idx[w]] = max(row[idx[w]], row[idx[v]] + 1)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in inst.edges:
        parent[find(idx[u])] = find(idx[v])
    out = np.empty((n, n), dtype=float)
    for i in range(n):
        for j in range(n):
            if longest[i, j] >= 0:
                out[i, j] = longest[i, j]
            elif longest[j, i] >= 0:
                out[i, j] = -longest[j, i]
            elif find(i) == find(j):
                out[i, j] = np.inf
            else:
                out[i, j] = -np.inf
    return out


def fold_distance(d: float, d_max: int = D_MAX) -> int:
    if d == np.inf:
        return d_max
    if d == -np.inf:
        return -d_max
    return int(max(-(d_max - 1), min(d_max - 1, d)))


def ldd_matrix(inst: Instance, d_max: int = D_MAX) -> np.ndarray:
    """Folded distances, rows and columns in ascending task id order."""
    raw = ldd_raw(inst)
    return np.vectorize(lambda d: fold_distance(d, d_max), otypes=[np.int64])(raw)


__all__ = ["COMPGRAPH", "D_MAX", "ErdosRenyi", "GMM_MEANS", "GMM_SDS", "HOMOGENEOUS", "Layered",
           "PROFILES", "Profile", "StochasticBlock", "TPCH", "augment_heterogeneous",
           "duration_from_mixture", "fold_distance", "gen_dag", "gen_durations_gmm",
           "generate_instance", "ldd_matrix", "ldd_raw", "load_profile", "make_dag_kind",
           "profile_from_json", "random_instance"]
