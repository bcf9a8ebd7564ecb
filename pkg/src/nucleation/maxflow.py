"""Dinic maximum flow with residual reachability queries.

Capacities may be ints (exact) or floats; ``eps`` is the residual capacity
treated as zero.
"""
from __future__ import annotations

from collections import deque


class FlowNetwork:
    def __init__(self, size: int):
        self.size = size
        self.head: list[list[int]] = [[] for _ in range(size)]
        self.to: list[int] = []
        self.cap: list = []

    def add_edge(self, u: int, v: int, cap, rev_cap=0) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(rev_cap)

    def _levels(self, s: int, t: int, eps) -> list[int] | None:
        level = [-1] * self.size
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if level[v] < 0 and self.cap[e] > eps:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def max_flow(self, s: int, t: int, eps=0):
        total = 0
        head, to, cap = self.head, self.to, self.cap
        while True:
            level = self._levels(s, t, eps)
            if level is None:
                return total
            it = [0] * self.size
            while True:
                path: list[int] = []
                u = s
                while u != t:
                    edges = head[u]
                    while it[u] < len(edges):
                        e = edges[it[u]]
                        if cap[e] > eps and level[to[e]] == level[u] + 1:
                            break
                        it[u] += 1
                    if it[u] < len(edges):
                        e = edges[it[u]]
                        path.append(e)
                        u = to[e]
                        continue
                    if u == s:
                        break
                    level[u] = -1
                    e = path.pop()
                    u = to[e ^ 1]
                    it[u] += 1
                if u != t:
                    break
                f = min(cap[e] for e in path)
                for e in path:
                    cap[e] -= f
                    cap[e ^ 1] += f
                total += f

    def source_side(self, s: int, eps=0) -> set[int]:
        """Nodes reachable from s in the residual network."""
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if v not in seen and self.cap[e] > eps:
                    seen.add(v)
                    queue.append(v)
        return seen

    def sink_side(self, t: int, eps=0) -> set[int]:
        """Nodes that can still reach t in the residual network."""
        seen = {t}
        queue = deque([t])
        while queue:
            v = queue.popleft()
            for e in self.head[v]:
                u = self.to[e]
                # e runs v -> u, so e ^ 1 is the residual arc u -> v
                if u not in seen and self.cap[e ^ 1] > eps:
                    seen.add(u)
                    queue.append(u)
        return seen
