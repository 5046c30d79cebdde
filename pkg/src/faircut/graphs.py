"""Graphs, named families, filtered random instances and brute-force oracles."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import networkx as nx
import numpy as np

from . import _bits
from .errors import BudgetError, GenerationError, ParameterError

ENUMERATION_LIMIT = 30
ER_MAX_ATTEMPTS = 10_000


@dataclass(frozen=True)
class Graph:
    """Undirected weighted simple graph on vertices ``0..n-1``.

    Edges are stored as ``(u, v, w)`` with ``u < v`` in the order given.
    Instances are immutable; derived lookups are cached on first access.
    """

    n: int
    edges: tuple = ()

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError("vertex count must be non-negative")
        canon = []
        seen = set()
        for e in self.edges:
            if len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ParameterError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if u < 0 or v >= self.n:
                raise ParameterError(f"edge ({u}, {v}) outside [0, {self.n})")
            if not w > 0:
                raise ParameterError(f"edge ({u}, {v}) has non-positive weight {w}")
            if (u, v) in seen:
                raise ParameterError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            canon.append((u, v, w))
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def n_vertices(self):
        return self.n

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def edge_pairs(self):
        return tuple((u, v) for u, v, _ in self.edges)

    @cached_property
    def edge_array(self):
        return np.array(self.edge_pairs, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def weights(self):
        return np.array([w for _, _, w in self.edges], dtype=np.float64)

    @cached_property
    def adjacency(self):
        nbrs = [set() for _ in range(self.n)]
        for u, v, _ in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def degrees(self):
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @cached_property
    def edge_lookup(self):
        return {(u, v): i for i, (u, v) in enumerate(self.edge_pairs)}

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self.edge_lookup

    def adjacency_matrix(self, weighted=False):
        A = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            A[u, v] = A[v, u] = w if weighted else 1.0
        return A

    def to_networkx(self):
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_weighted_edges_from(self.edges)
        return G

    @cached_property
    def components(self):
        return tuple(sorted(tuple(sorted(c)) for c in nx.connected_components(self.to_networkx())))

    def is_connected(self):
        return self.n > 0 and len(self.components) == 1

    def is_path_or_cycle(self):
        if not self.is_connected() or self.n < 2:
            return False
        if self.degrees.max() > 2:
            return False
        return self.n_edges in (self.n - 1, self.n)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.n_edges})"


def from_networkx(G):
    nodes = sorted(G.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    edges = [(index[u], index[v], d.get("weight", 1.0)) for u, v, d in G.edges(data=True)]
    return Graph(len(nodes), tuple(edges))


# ---------------------------------------------------------------------------
# Named families


@dataclass(frozen=True)
class GraphFamily:
    """A named graph family with its parameters, e.g. ``GraphFamily("paley", (13,))``."""

    name: str
    params: tuple = field(default=())

    _ARITY = {
        "complete": 1,
        "cycle": 1,
        "path": 1,
        "kneser": 2,
        "petersen": 0,
        "clebsch": 0,
        "paley": 1,
        "shrikhande": 0,
        "erdos_renyi": 4,
    }

    def __post_init__(self):
        name = self.name.lower().replace("-", "_")
        if name not in self._ARITY:
            raise ParameterError(f"unknown graph family {self.name!r}")
        if len(self.params) != self._ARITY[name]:
            raise ParameterError(f"family {name} takes {self._ARITY[name]} parameters, got {len(self.params)}")
        object.__setattr__(self, "name", name)

    @classmethod
    def parse(cls, text):
        """Parse ``"complete:4"``, ``"kneser:5,2"``, ``"petersen"`` and the like."""
        name, _, rest = text.partition(":")
        params = []
        for tok in filter(None, rest.split(",")):
            num = float(tok)
            params.append(int(num) if num.is_integer() and "." not in tok else num)
        return cls(name, tuple(params))

    def __str__(self):
        if not self.params:
            return self.name
        return f"{self.name}:{','.join(str(p) for p in self.params)}"


def complete_graph(n):
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


def cycle_graph(n):
    if n < 3:
        raise ParameterError("cycle needs at least 3 vertices")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path_graph(n):
    if n < 1:
        raise ParameterError("path needs at least 1 vertex")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def kneser_graph(n, k):
    """Vertices are the ``k``-subsets of ``[n]`` in lexicographic order; adjacent iff disjoint."""
    if k < 1 or n < 2 * k:
        raise ParameterError("Kneser graph needs k >= 1 and n >= 2k")
    subsets = [frozenset(c) for c in itertools.combinations(range(n), k)]
    edges = [(i, j) for i, j in itertools.combinations(range(len(subsets)), 2) if not subsets[i] & subsets[j]]
    return Graph(len(subsets), tuple(edges))


def petersen_graph():
    return kneser_graph(5, 2)


def clebsch_graph():
    """Folded 5-cube: vertices of ``{0,1}^4``, adjacent at Hamming distance 1 or 4."""
    edges = [(a, b) for a, b in itertools.combinations(range(16), 2) if bin(a ^ b).count("1") in (1, 4)]
    return Graph(16, tuple(edges))


def _is_prime(q):
    return q >= 2 and all(q % d for d in range(2, int(q**0.5) + 1))


def paley_graph(q):
    if not _is_prime(q) or q % 4 != 1:
        raise ParameterError(f"Paley graph needs a prime q = 1 mod 4, got {q}")
    residues = {(x * x) % q for x in range(1, q)}
    edges = [(a, b) for a, b in itertools.combinations(range(q), 2) if (b - a) % q in residues]
    return Graph(q, tuple(edges))


def shrikhande_graph():
    """Cayley graph on Z4 x Z4 with connection set {+-(1,0), +-(0,1), +-(1,1)}; vertex ``4a + b``."""
    conn = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    edges = []
    for i, j in itertools.combinations(range(16), 2):
        d = ((j // 4 - i // 4) % 4, (j % 4 - i % 4) % 4)
        if d in conn:
            edges.append((i, j))
    return Graph(16, tuple(edges))


def build_named(family):
    """Build the graph for a :class:`GraphFamily` (or its string form)."""
    if isinstance(family, str):
        family = GraphFamily.parse(family)
    name, p = family.name, family.params
    if name == "complete":
        if p[0] < 1:
            raise ParameterError("complete graph needs n >= 1")
        return complete_graph(int(p[0]))
    if name == "cycle":
        return cycle_graph(int(p[0]))
    if name == "path":
        return path_graph(int(p[0]))
    if name == "kneser":
        return kneser_graph(int(p[0]), int(p[1]))
    if name == "petersen":
        return petersen_graph()
    if name == "clebsch":
        return clebsch_graph()
    if name == "paley":
        return paley_graph(int(p[0]))
    if name == "shrikhande":
        return shrikhande_graph()
    n, prob, target, seed = p
    return generate_er_filtered(int(n), float(prob), int(target), int(seed))


# ---------------------------------------------------------------------------
# Brute-force oracles


def max_cut_bruteforce(g, q=None):
    """Exact weighted MaxCut by enumerating the ``2**(n-1)`` canonical cuts.

    Parameters
    ----------
    g : Graph
    q : array_like, optional
        Per-edge weights aligned with ``g.edges``; defaults to the graph weights.

    Returns
    -------
    value : float
    mask : int
        Lexicographically smallest maximizing canonical mask.
    """
    if g.n > ENUMERATION_LIMIT:
        raise BudgetError(f"MaxCut enumeration limited to {ENUMERATION_LIMIT} vertices, got {g.n}")
    weights = g.weights if q is None else np.asarray(q, dtype=np.float64)
    if weights.shape != (g.n_edges,):
        raise ParameterError("edge weight vector does not match the edge list")
    return _bits.max_cut_blocks(g.n, g.edge_pairs, weights)


def max_clique(g):
    """Clique number by maximal-clique enumeration."""
    if g.n > ENUMERATION_LIMIT:
        raise BudgetError(f"clique search limited to {ENUMERATION_LIMIT} vertices, got {g.n}")
    if g.n == 0:
        return 0
    return max(len(c) for c in nx.find_cliques(g.to_networkx()))


def subgraph(g, keep_vertices=None, keep_edges=None):
    """Induced or edge-deleted subgraph, reindexed.

    With only ``keep_vertices`` the induced subgraph is returned. With
    ``keep_edges`` (pairs ``(u, v)`` of ``g``) only those edges survive; their
    endpoints must lie in ``keep_vertices`` when both are given.

    Returns
    -------
    (Graph, dict)
        The subgraph and the map from old to new vertex indices.
    """
    if keep_vertices is None:
        keep_vertices = range(g.n)
    verts = sorted(set(int(v) for v in keep_vertices))
    if not verts:
        raise ParameterError("subgraph must keep at least one vertex")
    if verts[0] < 0 or verts[-1] >= g.n:
        raise ParameterError("kept vertex outside the graph")
    index = {v: i for i, v in enumerate(verts)}
    if keep_edges is None:
        chosen = [(u, v, w) for u, v, w in g.edges if u in index and v in index]
    else:
        chosen = []
        for u, v in keep_edges:
            key = (min(u, v), max(u, v))
            if key not in g.edge_lookup:
                raise ParameterError(f"edge {key} is not in the graph")
            if key[0] not in index or key[1] not in index:
                raise ParameterError(f"edge {key} has an endpoint outside the kept vertices")
            chosen.append(g.edges[g.edge_lookup[key]])
    return Graph(len(verts), tuple((index[u], index[v], w) for u, v, w in chosen)), index


def relabel(g, perm):
    """Graph with vertex ``v`` renamed ``perm[v]``."""
    return Graph(g.n, tuple((perm[u], perm[v], w) for u, v, w in g.edges))


# ---------------------------------------------------------------------------
# Random instances


def _er_sample(n, p, rng):
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return set(zip(iu[keep].tolist(), ju[keep].tolist()))


def generate_er_filtered(n, p, clique_target, seed, max_attempts=ER_MAX_ATTEMPTS):
    """Connected Erdos-Renyi graph whose clique number is exactly ``clique_target``.

    Each attempt samples ``G(n, p)``; if the clique number is too small a clique
    of the target size is planted on a random vertex subset. Attempts whose
    clique number overshoots or that end up disconnected are discarded.
    """
    if n < 3:
        raise ParameterError("need n >= 3")
    if not 0 < p < 1:
        raise ParameterError("edge probability must lie in (0, 1)")
    if clique_target < 2:
        raise ParameterError("clique target must be at least 2")
    if clique_target > n:
        raise GenerationError(f"K_{n} cannot contain a clique of size {clique_target}", attempts=0)
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        edges = _er_sample(n, p, rng)
        g = Graph(n, tuple(sorted(edges)))
        omega = max_clique(g) if edges else 1
        if omega > clique_target:
            continue
        if omega < clique_target:
            planted = sorted(rng.choice(n, size=clique_target, replace=False).tolist())
            edges |= set(itertools.combinations(planted, 2))
            g = Graph(n, tuple(sorted(edges)))
            if max_clique(g) != clique_target:
                continue
        if g.is_connected():
            return g
    raise GenerationError(
        f"no connected G({n}, {p}) with clique number {clique_target} after {max_attempts} attempts",
        attempts=max_attempts,
    )


def isomorphism_certificate(g):
    """Heuristic invariant: sorted degrees plus the adjacency spectrum rounded to 1e-9."""
    spectrum = np.round(np.linalg.eigvalsh(g.adjacency_matrix()), 9) + 0.0
    return tuple(sorted(g.degrees.tolist())), tuple(spectrum.tolist())


def generate_er_instances(n, p, clique_target, count, seed, max_attempts=ER_MAX_ATTEMPTS):
    """``count`` filtered instances with pairwise distinct isomorphism certificates."""
    ss = np.random.SeedSequence(seed)
    out, certs = [], set()
    tries = 0
    while len(out) < count:
        if tries >= max_attempts:
            raise GenerationError(f"only {len(out)} distinct instances after {tries} draws", attempts=tries)
        child = int(ss.spawn(1)[0].generate_state(1)[0])
        tries += 1
        g = generate_er_filtered(n, p, clique_target, child, max_attempts)
        cert = isomorphism_certificate(g)
        if cert not in certs:
            certs.add(cert)
            out.append(g)
    return out


# ---------------------------------------------------------------------------
# File formats


def graph_to_dict(g):
    return {"n": g.n, "edges": [[u, v, w] for u, v, w in g.edges]}


def graph_from_dict(data):
    return Graph(int(data["n"]), tuple(tuple(e) for e in data["edges"]))


def parse_edge_list(text):
    """Whitespace edge list ``u v [w]`` per line, 0-based; ``#`` starts a comment."""
    edges = []
    n = 0
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParameterError(f"malformed edge line {line!r}")
        u, v = int(parts[0]), int(parts[1])
        w = float(parts[2]) if len(parts) == 3 else 1.0
        edges.append((u, v, w))
        n = max(n, u + 1, v + 1)
    return Graph(n, tuple(edges))


def load_graph(path):
    """Read a graph from a JSON file or a plain edge list."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return graph_from_dict(json.loads(text))
    return parse_edge_list(text)


def save_graph(g, path):
    Path(path).write_text(json.dumps(graph_to_dict(g)) + "\n")
