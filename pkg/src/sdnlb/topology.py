"""Network graph: GraphML ingestion, the embedded OS3E topology, and
all-pairs hop distances.

Hop counts (not link weights) are the distance measure everywhere in this
package; GraphML edge attributes are deliberately ignored. Node order is
lexicographic so the hop matrix layout is reproducible across runs.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import TopologyError

_GRAPHML_NS = "{http://graphml.graphdrawing.org/xmlns}"


@dataclass(frozen=True, eq=False)
class Topology:
    """Immutable undirected graph with a precomputed hop matrix.

    nodes are sorted lexicographically and define the row/column order of
    hop_matrix. links are normalized (a, b) pairs with a < b, deduplicated.
    """

    nodes: tuple[str, ...]
    links: tuple[tuple[str, str], ...]
    hop_matrix: np.ndarray
    _index: dict[str, int] = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_links(self) -> int:
        return len(self.links)

    def node_index(self, node: str) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise TopologyError(f"unknown node {node!r}") from None

    def hops(self, a: str, b: str) -> int:
        return int(self.hop_matrix[self.node_index(a), self.node_index(b)])

    def has_node(self, node: str) -> bool:
        return node in self._index

    def to_graphml(self) -> str:
        """Serialize back to a minimal GraphML document (round-trip safe)."""
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
            '  <graph edgedefault="undirected">',
        ]
        out += [f'    <node id="{n}"/>' for n in self.nodes]
        out += [f'    <edge source="{a}" target="{b}"/>' for a, b in self.links]
        out += ["  </graph>", "</graphml>", ""]
        return "\n".join(out)


def build_topology(nodes, links) -> Topology:
    """Construct and validate a Topology from node ids and undirected links.

    Rejects self-loops, duplicate links, links to unknown nodes, and
    disconnected graphs. Parallel (duplicate) links must be collapsed by the
    caller; the GraphML parser does this automatically.
    """
    node_list = sorted(set(nodes))
    if len(node_list) != len(list(nodes)):
        raise TopologyError("duplicate node ids")
    if not node_list:
        raise TopologyError("topology has no nodes")
    index = {n: i for i, n in enumerate(node_list)}

    norm = []
    seen = set()
    for a, b in links:
        if a not in index or b not in index:
            raise TopologyError(f"link ({a!r}, {b!r}) references an unknown node")
        if a == b:
            raise TopologyError(f"self-loop on node {a!r}")
        key = (a, b) if a < b else (b, a)
        if key in seen:
            raise TopologyError(f"duplicate link ({key[0]!r}, {key[1]!r})")
        seen.add(key)
        norm.append(key)
    norm.sort()

    matrix = _all_pairs_hops_bfs(node_list, index, norm)
    return Topology(tuple(node_list), tuple(norm), matrix, index)


def _all_pairs_hops_bfs(nodes, index, links) -> np.ndarray:
    n = len(nodes)
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in links:
        ia, ib = index[a], index[b]
        adj[ia].append(ib)
        adj[ib].append(ia)

    matrix = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        matrix[src, src] = 0
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            d = matrix[src, cur]
            for nxt in adj[cur]:
                if matrix[src, nxt] < 0:
                    matrix[src, nxt] = d + 1
                    queue.append(nxt)

    if (matrix < 0).any():
        comps = _components(n, adj)
        named = [sorted(nodes[i] for i in comp) for comp in comps]
        raise TopologyError(
            f"graph is disconnected; components: {named}"
        )
    return matrix


def _components(n, adj):
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            cur = queue.popleft()
            comp.append(cur)
            for nxt in adj[cur]:
                if not seen[nxt]:
                    seen[nxt] = True
                    queue.append(nxt)
        comps.append(comp)
    return comps


def all_pairs_hops(t: Topology) -> np.ndarray:
    """Breadth-first shortest hop counts for every ordered node pair.

    Recomputes from the link list (idempotent; equals t.hop_matrix).
    """
    return _all_pairs_hops_bfs(list(t.nodes), dict(t._index), list(t.links))


def parse_graphml(text: str) -> Topology:
    """Parse a GraphML document (Topology Zoo dialect) into a Topology.

    Edge direction is ignored, parallel edges are collapsed, self-loops are
    dropped. Raises TopologyError naming the offending element for malformed
    documents and listing components for disconnected graphs.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise TopologyError(f"malformed GraphML document: {exc}") from exc

    ns = _GRAPHML_NS if root.tag.startswith(_GRAPHML_NS) else ""
    graph = root.find(f"{ns}graph")
    if graph is None:
        raise TopologyError("malformed GraphML: no <graph> element")

    nodes = []
    for el in graph.iter(f"{ns}node"):
        node_id = el.get("id")
        if node_id is None:
            raise TopologyError("malformed GraphML: <node> element without an id")
        nodes.append(node_id)
    if not nodes:
        raise TopologyError("malformed GraphML: no <node> elements")
    node_set = set(nodes)
    if len(node_set) != len(nodes):
        raise TopologyError("malformed GraphML: duplicate <node> ids")

    links = set()
    for el in graph.iter(f"{ns}edge"):
        src, dst = el.get("source"), el.get("target")
        if src is None or dst is None:
            raise TopologyError(
                f"malformed GraphML: <edge> missing source/target "
                f"(source={src!r}, target={dst!r})"
            )
        if src not in node_set or dst not in node_set:
            raise TopologyError(
                f"malformed GraphML: <edge source={src!r} target={dst!r}> "
                f"references an unknown node"
            )
        if src == dst:
            continue
        links.add((src, dst) if src < dst else (dst, src))

    return build_topology(nodes, sorted(links))


def load_graphml_file(path) -> Topology:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise TopologyError(f"cannot read topology file {path}: {exc}") from exc
    return parse_graphml(text)


def builtin_os3e() -> Topology:
    """The embedded Internet2 OS3E topology: 34 nodes, 42 links."""
    text = resources.files("sdnlb.data").joinpath("os3e.graphml").read_text()
    return parse_graphml(text)
