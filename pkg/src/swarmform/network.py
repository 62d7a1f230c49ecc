"""Range-based communication graph and synchronous parameter exchange.

The graph is rebuilt from true positions every tick (O(N^2) pairwise, fine
at desk scale) and the exchange delivers each robot exactly its neighbours'
parameter vectors — nothing else ever crosses the robot boundary, which is
what the planner's decentralization contract relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CommGraph:
    """Undirected proximity graph over robot indices.

    An edge joins two distinct robots whose distance is at most `r_c`
    (boundary inclusive).  `r_d` is the range within which communication is
    assumed degradation-free; it is carried in configs for forward
    compatibility but does not alter delivery.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    r_c: float
    r_d: float
    neighbors: tuple[tuple[int, ...], ...] = field(repr=False)

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])


def build_graph(positions, r_c: float, r_d: float) -> CommGraph:
    """Build the communication graph from current positions.

    Edges are exactly the pairs within `r_c`, inclusive of the boundary.
    Requires r_c > 0 and 0 < r_d <= r_c.
    """
    if not r_c > 0.0:
        raise ValueError(f"r_c must be > 0, got {r_c}")
    if not 0.0 < r_d <= r_c:
        raise ValueError(f"r_d must satisfy 0 < r_d <= r_c, got {r_d}")
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(pts)
    diff = pts[:, None, :] - pts[None, :, :]
    dist2 = np.einsum("ijk,ijk->ij", diff, diff)
    within = dist2 <= r_c * r_c
    edges = []
    neighbors: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if within[i, j]:
                edges.append((i, j))
                neighbors[i].append(j)
                neighbors[j].append(i)
    return CommGraph(
        n=n,
        edges=frozenset(edges),
        r_c=float(r_c),
        r_d=float(r_d),
        neighbors=tuple(tuple(nb) for nb in neighbors),
    )


def exchange(graph: CommGraph, all_eta):
    """Deliver to each robot the parameter vectors of its neighbours.

    Entry i holds exactly the eta of every j adjacent to i, ordered by
    robot id.  This is the only path by which parameter data moves between
    robots.
    """
    if len(all_eta) != graph.n:
        raise ValueError(
            f"expected {graph.n} parameter vectors, got {len(all_eta)}"
        )
    return [[all_eta[j] for j in nbrs] for nbrs in graph.neighbors]
