"""Independent brute-force oracles used to freeze expected test values.

Everything here works directly on vertex/edge lists with exponential or
exhaustive algorithms and deliberately shares no logic with the package's
kernel-based pipeline or its log-space DP: these are the refereeing
implementations, kept slow and obvious.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import networkx as nx

from degwin.graph import Graph, components


def brute_longest_path(g: Graph, verts) -> int:
    """Longest simple path (edge count) inside the induced subgraph."""
    verts = set(verts)
    adj = {v: [w for w in g.adj[v] if w in verts] for v in verts}
    best = 0

    def dfs(v, visited, length):
        nonlocal best
        best = max(best, length)
        for w in adj[v]:
            if w not in visited:
                visited.add(w)
                dfs(w, visited, length + 1)
                visited.remove(w)

    for v in sorted(verts):
        dfs(v, {v}, 0)
    return best


def brute_circumference(g: Graph, verts) -> int:
    """Longest simple cycle (edge count) inside the induced subgraph."""
    verts = set(verts)
    adj = {v: [w for w in g.adj[v] if w in verts] for v in verts}
    best = 0

    def dfs(start, v, visited, length):
        nonlocal best
        for w in adj[v]:
            if w == start and length >= 2:
                best = max(best, length + 1)
            elif w not in visited and w > start:
                visited.add(w)
                dfs(start, w, visited, length + 1)
                visited.remove(w)

    for v in sorted(verts):
        dfs(v, v, {v}, 0)
    return best


def brute_diameter(g: Graph, verts) -> int:
    """Largest BFS eccentricity over the induced components; -1 if empty."""
    verts = set(verts)
    best = -1
    for comp in components(g):
        cv = set(comp.vertices) & verts
        if not cv:
            continue
        for s in cv:
            dist = {s: 0}
            queue = [s]
            for v in queue:
                for w in g.adj[v]:
                    if w in cv and w not in dist:
                        dist[w] = dist[v] + 1
                        queue.append(w)
            best = max(best, max(dist.values()))
    return best


def brute_planar(g: Graph, verts) -> bool:
    """Planarity of the induced subgraph via the library planarity test."""
    verts = set(verts)
    G = nx.Graph()
    G.add_nodes_from(verts)
    G.add_edges_from((u, v) for u, v in g.edges if u in verts and v in verts)
    return nx.check_planarity(G)[0]


def complex_vertices(g: Graph) -> set[int]:
    """Vertices of all components with excess >= 1."""
    out: set[int] = set()
    for comp in components(g):
        if comp.is_complex:
            out.update(comp.vertices)
    return out


def random_simple_graph(rng: random.Random, n: int, m: int) -> Graph:
    all_pairs = list(itertools.combinations(range(1, n + 1), 2))
    return Graph(n, rng.sample(all_pairs, m))


def random_complex_graph(rng: random.Random, n_lo: int = 4, n_hi: int = 12) -> Graph:
    """A random simple graph guaranteed to contain a complex part."""
    while True:
        n = rng.randint(n_lo, n_hi)
        m = min(rng.randint(n + 1, n + 5), n * (n - 1) // 2)
        g = random_simple_graph(rng, n, m)
        if complex_vertices(g):
            return g


def enumerate_sequences(degrees, n: int):
    """All degree sequences over `degrees` of length n, bucketed by their sum,
    with their sampling weights prod 1/d_i! as exact rationals."""
    buckets: dict[int, dict[tuple[int, ...], Fraction]] = {}
    inv_fact = {d: Fraction(1, math.factorial(d)) for d in degrees}
    for seq in itertools.product(sorted(degrees), repeat=n):
        w = Fraction(1)
        for d in seq:
            w *= inv_fact[d]
        buckets.setdefault(sum(seq), {})[seq] = w
    return buckets


def sequence_marginals(degrees, n: int, two_m: int) -> dict[int, Fraction]:
    """P(first drawn degree = d), for each d, by exhaustive enumeration."""
    table = enumerate_sequences(degrees, n).get(two_m, {})
    total = sum(table.values(), Fraction(0))
    if total == 0:
        return {}
    by_first: dict[int, Fraction] = {}
    for seq, w in table.items():
        by_first[seq[0]] = by_first.get(seq[0], Fraction(0)) + w
    return {d: w / total for d, w in by_first.items()}


def enumerate_matchings(owners: list[int]) -> list[tuple[tuple[int, int], ...]]:
    """All perfect matchings of the given stub-owner list, as sorted edge
    tuples (u <= v vertex pairs, one per matched stub pair)."""
    if len(owners) % 2:
        raise ValueError("odd number of stubs")

    def rec(idx: tuple[int, ...]):
        if not idx:
            yield ()
            return
        first, rest = idx[0], idx[1:]
        for k, j in enumerate(rest):
            u, v = owners[first], owners[j]
            edge = (min(u, v), max(u, v))
            for tail in rec(rest[:k] + rest[k + 1:]):
                yield (edge,) + tail

    return [tuple(sorted(m)) for m in rec(tuple(range(len(owners))))]


def enumerate_simple_graphs(seq: tuple[int, ...]) -> list[frozenset[tuple[int, int]]]:
    """All simple graphs (edge sets) on 1..len(seq) with the given degrees."""
    n = len(seq)
    m = sum(seq) // 2
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    found = []
    for chosen in itertools.combinations(pairs, m):
        deg = [0] * (n + 1)
        for u, v in chosen:
            deg[u] += 1
            deg[v] += 1
        if tuple(deg[1:]) == tuple(seq):
            found.append(frozenset(chosen))
    return found


def oracle_window_series(c2: float, c3: float, y: float, mu: float):
    """Direct high-precision sum of the window series.

    Same series as the library's adaptive evaluator, summed the obvious way
    with no incremental coefficient updates and no precision negotiation; the
    working precision is simply twice the worst-case cancellation (terms peak
    near exp((4/27)|x|^3)) plus slack.  Returns an mpf.
    """
    import mpmath as mp

    x_abs = abs(c2 * c3 ** (-2.0 / 3.0) * mu)
    dps = 60 + int(0.15 * x_abs**3)
    with mp.workdps(dps):
        x = mp.mpf(c2) * mp.mpf(c3) ** (mp.mpf(-2) / 3) * mp.mpf(mu)
        total = mp.mpf(0)
        peak = mp.mpf(0)
        quiet = 0
        for k in range(30000):
            term = x**k / mp.factorial(k) * mp.rgamma((mp.mpf(y) + 1 - 2 * k) / 3)
            total += term
            peak = max(peak, abs(term))
            # Terms this far below the peak are beneath the cancellation noise
            # floor the precision was budgeted for; the tail cannot matter.
            if peak > 0 and abs(term) < peak * mp.mpf(10) ** (20 - dps):
                quiet += 1
                if quiet >= 8:
                    break
            else:
                quiet = 0
        else:
            raise RuntimeError("oracle series did not settle")
        return mp.mpf(c3) ** ((mp.mpf(y) - 2) / 3) / 3 * total
