"""Immutable undirected simple graphs and structural-parameter computation.

Vertices are dense integer indices ``0..n-1``.  Neighbor lists are kept
sorted and mirrored as bitmasks so that set operations (common neighbors,
degrees restricted to an alive-mask) are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class GraphFormatError(ValueError):
    """Malformed graph input.  ``line_no`` is 1-based when known."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class VcBudgetExceeded(RuntimeError):
    """Exact vertex cover search would exceed the configured budget."""


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def iter_mask(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """Static undirected simple graph.

    Invariants: no self-loops, no parallel edges, adjacency symmetric,
    neighbor lists sorted ascending, ``m`` equals half the degree sum.
    """

    n: int
    adj: tuple[tuple[int, ...], ...]
    masks: tuple[int, ...]
    m: int

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise ValueError("negative vertex count")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if v in nbrs[u]:
                raise ValueError(f"duplicate edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
            m += 1
        adj = tuple(tuple(sorted(s)) for s in nbrs)
        masks = tuple(mask_of(s) for s in nbrs)
        return Graph(n=n, adj=adj, masks=masks, m=m)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (self.masks[u] >> v) & 1 == 1

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def edge_counts(self, s: Iterable[int]) -> tuple[int, int]:
        """Return ``(m_in, m_out)``: edges inside ``s`` and edges leaving it."""
        smask = s if isinstance(s, int) else mask_of(s)
        inside2 = 0
        out = 0
        for v in iter_mask(smask):
            hits = self.masks[v] & smask
            inside2 += hits.bit_count()
            out += self.degree(v) - hits.bit_count()
        return inside2 // 2, out

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Subgraph induced by ``vertices`` plus the old-index map (new -> old)."""
        keep = sorted(set(vertices))
        index = {old: new for new, old in enumerate(keep)}
        edges = []
        for old_u in keep:
            for old_v in self.adj[old_u]:
                if old_v > old_u and old_v in index:
                    edges.append((index[old_u], index[old_v]))
        return Graph.from_edges(len(keep), edges), tuple(keep)

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        return all(self.has_edge(u, v) for i, u in enumerate(vs) for v in vs[i + 1:])

    def is_independent_set(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        return not any(self.has_edge(u, v) for i, u in enumerate(vs) for v in vs[i + 1:])


@dataclass(frozen=True)
class ParameterProfile:
    """Structural parameters with witnesses.

    ``degeneracy_ordering`` is the min-degree peeling order (ties broken by
    smallest index); every vertex has at most ``degeneracy`` neighbors among
    its successors.  ``vertex_cover`` is an exact minimum cover when the
    bounded search succeeded, else ``None``.
    """

    max_degree: int
    degeneracy: int
    degeneracy_ordering: tuple[int, ...]
    h_index: int
    c_closure: int
    vertex_cover: tuple[int, ...] | None
    vc: int | None


def parse_graph(text: str, fmt: str = "edgelist") -> Graph:
    """Parse an edge-list or DIMACS description into a :class:`Graph`.

    Edge list: first non-comment line ``n m``, then m lines ``u v`` with
    ``0 <= u < v < n``; ``#`` starts a comment.  DIMACS: ``p edge n m``
    header, then ``e u v`` with 1-indexed endpoints; ``c`` lines are comments.
    """
    if fmt == "edgelist":
        return _parse_edgelist(text)
    if fmt == "dimacs":
        return _parse_dimacs(text)
    raise ValueError(f"unknown graph format {fmt!r}")


def sniff_format(text: str) -> str:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith(("p ", "c ", "e ")) or line in ("p", "c", "e"):
            return "dimacs"
        return "edgelist"
    return "edgelist"


def _data_lines(text: str) -> Iterator[tuple[int, str]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _parse_edgelist(text: str) -> Graph:
    lines = _data_lines(text)
    try:
        no, head = next(lines)
    except StopIteration:
        raise GraphFormatError("empty input, expected 'n m' header") from None
    parts = head.split()
    if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
        raise GraphFormatError(f"expected 'n m' header, got {head!r}", no)
    n, m = int(parts[0]), int(parts[1])
    if n < 0 or m < 0:
        raise GraphFormatError("negative n or m", no)
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for no, line in lines:
        parts = line.split()
        if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
            raise GraphFormatError(f"expected edge 'u v', got {line!r}", no)
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise GraphFormatError(f"self-loop {u}", no)
        if not (0 <= u < v < n):
            raise GraphFormatError(f"edge ({u}, {v}) violates 0 <= u < v < n={n}", no)
        if (u, v) in seen:
            raise GraphFormatError(f"duplicate edge ({u}, {v})", no)
        seen.add((u, v))
        edges.append((u, v))
    if len(edges) != m:
        raise GraphFormatError(f"declared {m} edges but found {len(edges)}")
    return Graph.from_edges(n, edges)


def _parse_dimacs(text: str) -> Graph:
    n = m = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for no, line in _data_lines(text):
        parts = line.split()
        tag = parts[0]
        if tag == "c":
            continue
        if tag == "p":
            if n is not None:
                raise GraphFormatError("second 'p' line", no)
            if len(parts) != 4 or parts[1] != "edge":
                raise GraphFormatError(f"expected 'p edge n m', got {line!r}", no)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphFormatError(f"bad 'p edge' numbers in {line!r}", no) from None
            continue
        if tag == "e":
            if n is None:
                raise GraphFormatError("'e' line before 'p edge' header", no)
            if len(parts) != 3:
                raise GraphFormatError(f"expected 'e u v', got {line!r}", no)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError(f"bad endpoints in {line!r}", no) from None
            if u == v:
                raise GraphFormatError(f"self-loop {u}", no)
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"edge ({u}, {v}) out of range 1..{n}", no)
            a, b = min(u, v) - 1, max(u, v) - 1
            if (a, b) in seen:
                raise GraphFormatError(f"duplicate edge ({u}, {v})", no)
            seen.add((a, b))
            edges.append((a, b))
            continue
        raise GraphFormatError(f"unknown DIMACS line tag {tag!r}", no)
    if n is None:
        raise GraphFormatError("missing 'p edge' header")
    if len(edges) != m:
        raise GraphFormatError(f"declared {m} edges but found {len(edges)}")
    return Graph.from_edges(n, edges)


def degeneracy_ordering(g: Graph) -> tuple[tuple[int, ...], int]:
    """Min-degree peeling order and the degeneracy it witnesses."""
    alive = mask_of(range(g.n))
    deg = [g.degree(v) for v in range(g.n)]
    order: list[int] = []
    d = 0
    for _ in range(g.n):
        best = -1
        for v in iter_mask(alive):
            if best < 0 or deg[v] < deg[best]:
                best = v
        d = max(d, deg[best])
        order.append(best)
        alive ^= 1 << best
        for u in iter_mask(g.masks[best] & alive):
            deg[u] -= 1
    return tuple(order), d


def h_index(g: Graph) -> int:
    degs = sorted((g.degree(v) for v in range(g.n)), reverse=True)
    h = 0
    for i, deg in enumerate(degs, start=1):
        if deg >= i:
            h = i
    return h


def c_closure(g: Graph) -> int:
    best = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if not g.has_edge(u, v):
                best = max(best, (g.masks[u] & g.masks[v]).bit_count())
    return best + 1


def minimum_vertex_cover(g: Graph, budget: int = 25) -> tuple[int, ...]:
    """Exact minimum vertex cover via bounded search-tree branching.

    Branches on the endpoints of an uncovered edge.  Raises
    :class:`VcBudgetExceeded` when no cover of size <= budget exists.
    """
    for size in range(0, min(budget, g.n) + 1):
        cover = _vc_decide(g, 0, size)
        if cover is not None:
            return tuple(sorted(iter_mask(cover)))
    raise VcBudgetExceeded(f"no vertex cover of size <= {budget}")


def _vc_decide(g: Graph, cover: int, remaining: int) -> int | None:
    edge = None
    for u in range(g.n):
        if (cover >> u) & 1:
            continue
        free = g.masks[u] & ~cover
        if free:
            edge = (u, (free & -free).bit_length() - 1)
            break
    if edge is None:
        return cover
    if remaining == 0:
        return None
    u, v = edge
    got = _vc_decide(g, cover | (1 << u), remaining - 1)
    if got is not None:
        return got
    return _vc_decide(g, cover | (1 << v), remaining - 1)


def compute_profile(g: Graph, want_vc: bool = False, vc_budget: int = 25) -> ParameterProfile:
    """Compute all structural parameters; the exact cover only on request.

    When the cover search would exceed ``vc_budget`` the profile is returned
    with ``vertex_cover=None`` instead of failing.
    """
    order, d = degeneracy_ordering(g)
    delta = max((g.degree(v) for v in range(g.n)), default=0)
    cover: tuple[int, ...] | None = None
    if want_vc:
        try:
            cover = minimum_vertex_cover(g, budget=vc_budget)
        except VcBudgetExceeded:
            cover = None
    return ParameterProfile(
        max_degree=delta,
        degeneracy=d,
        degeneracy_ordering=order,
        h_index=h_index(g),
        c_closure=c_closure(g),
        vertex_cover=cover,
        vc=None if cover is None else len(cover),
    )
