"""
Per-node edge lengths under which BGP preferences become shortest-path orders.

Both encodings accept instances shaped like the BGP image of a preference game:
each node lists up to three two-hop paths ``(U, V, T)`` with strict preferences,
followed by its direct path ``(U, T)``.

The metric encoding first replaces every direct path ``(U, T)`` with
``(U, U', T)`` through a fresh node ``U'`` and restricts routing to a template
graph: no edge from an original node straight to ``T``, and no edge into ``U'``
other than from ``U``.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import networkx as nx

from flowgames.errors.exceptions import InputError
from flowgames.games.bgp import BGPInstance, NodeId, Path
from flowgames.reductions.artifact import ReductionArtifact
from flowgames.reductions.pref_reductions import fresh_name

logger = logging.getLogger(__name__)

Edge = tuple[NodeId, NodeId]

MAX_INTERMEDIATES = 3

# Metric tables by number of intermediates. Roles: U is the node, T the
# destination, V/W/Z the intermediates in preference order, a trailing quote
# their inserted copies.
_METRIC_TABLES: dict[int, tuple[dict[tuple[str, str], int], int]] = {
    0: ({("U", "U'"): 1, ("U'", "T"): 1}, 3),
    1: (
        {
            ("U", "V"): 1, ("V", "V'"): 1, ("V'", "T"): 1,
            ("U", "U'"): 2, ("U'", "T"): 2,
        },
        3,
    ),
    2: (
        {
            ("U", "V"): 2, ("V", "V'"): 1, ("V'", "T"): 1,
            ("U", "W"): 2, ("W", "W'"): 2, ("W'", "T"): 1,
            ("U", "U'"): 3, ("U'", "T"): 3,
            ("V", "W"): 4, ("W", "V"): 4,
        },
        5,
    ),
    3: (
        {
            ("U", "V"): 3, ("V", "V'"): 1, ("V'", "T"): 1,
            ("U", "W"): 3, ("W", "W'"): 2, ("W'", "T"): 1,
            ("U", "Z"): 2, ("Z", "Z'"): 3, ("Z'", "T"): 2,
            ("U", "U'"): 4, ("U'", "T"): 4,
            ("V", "W"): 6, ("W", "V"): 6,
            ("V", "Z"): 5, ("Z", "V"): 5, ("W", "Z"): 5, ("Z", "W"): 5,
        },
        5,
    ),
}  # fmt: skip

_ROLES = ("V", "W", "Z")


@dataclass(frozen=True)
class LengthTable:
    """
    Lengths one node uses, over its local subgraph.

    ``template`` is the set of usable edges, or ``None`` when every edge is.
    ``listed`` holds the node's paths in preference order.
    """

    node: NodeId
    dest: NodeId
    lengths: Mapping[Edge, int]
    default: int
    local_nodes: tuple[NodeId, ...]
    listed: tuple[Path, ...]
    template: frozenset[Edge] | None = None

    def length(self, x: NodeId, y: NodeId) -> int:
        return self.lengths.get((x, y), self.default)

    def permits(self, x: NodeId, y: NodeId) -> bool:
        return x != y and (self.template is None or (x, y) in self.template)

    def path_length(self, path: Path) -> int:
        return sum(self.length(x, y) for x, y in zip(path, path[1:]))


@dataclass(frozen=True)
class LengthEncoding:
    tables: dict[NodeId, LengthTable]
    instance: BGPInstance
    artifact: ReductionArtifact | None = None


@dataclass(frozen=True)
class RankingIssue:
    node: NodeId
    path: Path
    length: int
    bound: int


@dataclass(frozen=True)
class TriangleIssue:
    node: NodeId
    triple: tuple[NodeId, NodeId, NodeId]
    direct: int
    detour: int


def two_hop_lists(inst: BGPInstance) -> dict[NodeId, list[NodeId]]:
    """
    Intermediates of each node in preference order.

    Raises:
        InputError: ties, more than three intermediates, a path that is neither
            two-hop nor direct, or a missing or misplaced direct path.
    """
    shapes: dict[NodeId, list[NodeId]] = {}
    for v in inst.nodes:
        classes = inst.prefs[v]
        if any(len(cls) != 1 for cls in classes):
            raise InputError(
                "Length encodings need strict preference lists", details={"node": v}
            )
        ordered = [inst.paths[v][cls[0]] for cls in classes]
        if ordered[-1] != (v, inst.dest):
            raise InputError(
                "Direct path must be listed last", details={"node": v}
            )
        middles: list[NodeId] = []
        for path in ordered[:-1]:
            if len(path) != 3:
                raise InputError(
                    "Only two-hop paths may precede the direct path",
                    details={"node": v, "path": list(path)},
                )
            middles.append(path[1])
        if len(middles) > MAX_INTERMEDIATES:
            raise InputError(
                "Unsupported preference list length",
                details={"node": v, "entries": len(ordered)},
            )
        shapes[v] = middles
    return shapes


def bgp_shortest_path_lengths(inst: BGPInstance) -> LengthEncoding:
    """
    Lengths where the ``k``-th intermediate costs ``k`` to reach and 1 to leave
    and every other edge costs one more than the direct path needs.
    """
    tables: dict[NodeId, LengthTable] = {}
    for v, middles in two_hop_lists(inst).items():
        lengths: dict[Edge, int] = {}
        for k, m in enumerate(middles, start=1):
            lengths[(v, m)] = k
            lengths[(m, inst.dest)] = 1
        default = len(middles) + 2 if middles else 1
        tables[v] = LengthTable(
            node=v,
            dest=inst.dest,
            lengths=lengths,
            default=default,
            local_nodes=(v, *middles, inst.dest),
            listed=tuple((v, m, inst.dest) for m in middles) + ((v, inst.dest),),
        )
    logger.debug("Shortest-path lengths emitted for %s nodes", len(tables))
    return LengthEncoding(tables=tables, instance=inst)


def _template(nodes, originals, primes: dict[NodeId, NodeId], dest) -> frozenset[Edge]:
    owner_of = {p: v for v, p in primes.items()}
    edges = set()
    for x, y in itertools.permutations(nodes, 2):
        if y == dest and x in originals:
            continue
        if y in owner_of and owner_of[y] != x:
            continue
        edges.add((x, y))
    return frozenset(edges)


def bgp_metric_lengths(inst: BGPInstance) -> LengthEncoding:
    """
    Metric lengths over the template graph of the primed instance.

    The returned artifact maps assignments of ``inst`` onto the primed instance;
    every inserted node puts its whole unit on its direct path.
    """
    shapes = two_hop_lists(inst)
    taken = set(inst.nodes) | {inst.dest}
    primes: dict[NodeId, NodeId] = {}
    for v in inst.nodes:
        primes[v] = fresh_name(f"{v}'", taken)
        taken.add(primes[v])
    dest = inst.dest

    paths: dict[NodeId, tuple[Path, ...]] = {}
    for v, middles in shapes.items():
        paths[v] = tuple((v, m, primes[m], dest) for m in middles) + (
            (v, primes[v], dest),
        )
    for v in inst.nodes:
        paths[primes[v]] = ((primes[v], dest),)
    prefs = {v: tuple((k,) for k in range(len(listed))) for v, listed in paths.items()}
    primed = BGPInstance(dest=dest, paths=paths, prefs=prefs)

    all_nodes = tuple(paths) + (dest,)
    template = _template(all_nodes, set(inst.nodes), primes, dest)
    tables: dict[NodeId, LengthTable] = {}
    for v, middles in shapes.items():
        lengths_by_role, default = _METRIC_TABLES[len(middles)]
        names = {"U": v, "U'": primes[v], "T": dest}
        for role, m in zip(_ROLES, middles):
            names[role] = m
            names[role + "'"] = primes[m]
        lengths = {(names[x], names[y]): n for (x, y), n in lengths_by_role.items()}
        local = (v, primes[v], *middles, *(primes[m] for m in middles), dest)
        tables[v] = LengthTable(
            node=v,
            dest=dest,
            lengths=lengths,
            default=default,
            local_nodes=local,
            listed=paths[v],
            template=frozenset(
                (x, y) for x, y in template if x in local and y in local
            ),
        )

    forward = {
        (v, k): (v, k) for v in inst.nodes for k in range(len(inst.paths[v]))
    }
    artifact = ReductionArtifact(
        source_kind="bgp",
        source=inst,
        target_kind="bgp",
        target=primed,
        forward_table=forward,
        source_owners=inst.nodes,
        target_owners=primed.nodes,
        constants={primes[v]: {0: Fraction(1)} for v in inst.nodes},
    )
    logger.debug("Metric lengths emitted for %s nodes", len(tables))
    return LengthEncoding(tables=tables, instance=primed, artifact=artifact)


def _local_graph(table: LengthTable) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(table.local_nodes)
    for x, y in itertools.permutations(table.local_nodes, 2):
        if table.permits(x, y):
            graph.add_edge(x, y, length=table.length(x, y))
    return graph


def audit_ranking(table: LengthTable) -> list[RankingIssue]:
    """
    Listed paths must get strictly increasing lengths, and every other usable
    simple path in the local subgraph must be strictly longer than the last one.
    """
    issues: list[RankingIssue] = []
    previous: int | None = None
    for path in table.listed:
        length = table.path_length(path)
        usable = all(table.permits(x, y) for x, y in zip(path, path[1:]))
        if not usable or (previous is not None and length <= previous):
            issues.append(RankingIssue(table.node, path, length, previous or 0))
        previous = length
    bound = previous or 0
    listed = set(table.listed)
    graph = _local_graph(table)
    for nodes in nx.all_simple_paths(graph, table.node, table.dest):
        path = tuple(nodes)
        if path in listed:
            continue
        length = table.path_length(path)
        if length <= bound:
            issues.append(RankingIssue(table.node, path, length, bound))
    return issues


def audit_triangle(table: LengthTable) -> list[TriangleIssue]:
    """Exhaustive check of ``l(x, z) <= l(x, y) + l(y, z)`` over usable edges."""
    issues: list[TriangleIssue] = []
    for x, y, z in itertools.permutations(table.local_nodes, 3):
        if not (table.permits(x, y) and table.permits(y, z) and table.permits(x, z)):
            continue
        direct = table.length(x, z)
        detour = table.length(x, y) + table.length(y, z)
        if direct > detour:
            issues.append(TriangleIssue(table.node, (x, y, z), direct, detour))
    return issues
