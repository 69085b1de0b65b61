"""Shared random generators and independent oracles for the test suite.

The oracles deliberately avoid the library's own algorithms: paths come
from breadth-first search over an undirected adjacency list, partitions
from direct upward walks, and tree checks from union-find.
"""

from collections import deque

import numpy as np

from pathrel.depgraph import DependencyTree, Token

POS_POOL = ("NOUN", "VERB", "ADJ", "ADP", "PUNCT", "ADV")
REL_POOL = ("nsubj", "dobj", "nmod", "amod", "case", "punct", "advmod")


def random_tree(rng, n=None) -> DependencyTree:
    """Uniformly shaped random tree: heads may point in either direction."""
    if n is None:
        n = int(rng.integers(1, 16))
    order = [int(x) + 1 for x in rng.permutation(n)]
    head = {order[0]: 0}
    for k in range(1, n):
        head[order[k]] = order[int(rng.integers(k))]
    tokens = tuple(
        Token(
            i,
            f"w{i}",
            str(rng.choice(POS_POOL)),
            head[i],
            "root" if head[i] == 0 else str(rng.choice(REL_POOL)),
        )
        for i in range(1, n + 1)
    )
    return DependencyTree(tokens)


def random_cut_set(rng, tree) -> set:
    root = tree.root
    candidates = [i for i in range(1, tree.n + 1) if i != root]
    if not candidates:
        return set()
    k = int(rng.integers(0, len(candidates) + 1))
    return {int(i) for i in rng.choice(candidates, size=k, replace=False)}


def bfs_path(structure, a, b):
    """Shortest path by BFS over the undirected parent edges.

    Returns (nodes, edges) in the same annotation convention as the
    library: (label, "UP") when stepping child -> parent, else DOWN.
    """
    parents, labels = structure.path_parents()
    adj = {i: [] for i in parents}
    for child, parent in parents.items():
        if parent != 0:
            adj[child].append(parent)
            adj[parent].append(child)
    prev = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            break
        for v in adj[u]:
            if v not in prev:
                prev[v] = u
                queue.append(v)
    nodes = []
    cur = b
    while cur is not None:
        nodes.append(cur)
        cur = prev[cur]
    nodes.reverse()
    edges = []
    for u, v in zip(nodes, nodes[1:]):
        if parents[u] == v:
            edges.append((labels[u], "UP"))
        else:
            assert parents[v] == u, f"nodes {u}, {v} not adjacent"
            edges.append((labels[v], "DOWN"))
    return nodes, edges


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        """False when a and b were already connected (joining would cycle)."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True

    def component_count(self):
        return len({self.find(x) for x in self.parent})


def components_by_walk(tree, cut_nodes):
    """Partition oracle: walk each token up to its nearest component root."""
    roots = set(cut_nodes) | {tree.root}
    groups = {}
    for tok in tree.tokens:
        cur = tok.index
        while cur not in roots:
            cur = tree.token(cur).head
        groups.setdefault(cur, set()).add(tok.index)
    return groups


def check_lined_tree(tree, rt):
    """Union-find oracle: residual + link edges form one acyclic component."""
    uf = UnionFind(range(1, tree.n + 1))
    edge_count = 0
    for tok in tree.tokens:
        if tok.index in rt.cut_nodes or tok.head == 0:
            continue
        assert uf.union(tok.index, tok.head), "cycle in residual edges"
        edge_count += 1
    for lo, hi in rt.link_edges:
        assert uf.union(lo, hi), "cycle introduced by a link edge"
        edge_count += 1
    assert edge_count == tree.n - 1
    assert uf.component_count() == 1
