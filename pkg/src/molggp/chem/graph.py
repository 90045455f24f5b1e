from __future__ import annotations

from collections import deque

import numpy as np

from .smiles import Molecule

# distance between atoms in different components
UNREACHABLE = np.iinfo(np.int32).max


def shortest_paths(m: Molecule) -> np.ndarray:
    """All-pairs bond-count distances by one BFS per atom."""
    n = len(m)
    dist = np.full((n, n), UNREACHABLE, dtype=np.int64)
    adj = m.neighbors
    for s in range(n):
        row = dist[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = row[u] + 1
            for v, _ in adj[u]:
                if row[v] == UNREACHABLE:
                    row[v] = du
                    queue.append(v)
    return dist
