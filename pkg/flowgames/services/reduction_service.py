"""
The ``reduce`` command: builds a reduction and serialises it as a bundle.

Bundles keep strategy ids verbatim. BGP path indices stay integers inside the
forward table and become strings only where they are mapping keys.
"""

import logging
from typing import Any

from flowgames.errors.exceptions import InputError, UnsupportedMethodError
from flowgames.models.games import BundleFile, edge_key, game_file_for
from flowgames.numerics.rational import format_rational
from flowgames.reductions.artifact import Direction, ReductionArtifact, map_solution
from flowgames.reductions.four_player import (
    FourPlayerReduction,
    check_synchronizer,
    graphical_to_four_player,
    project_to_graphical,
)
from flowgames.reductions.matrix_reductions import bbc_to_matrix, bgp_to_matrix
from flowgames.reductions.path_lengths import (
    LengthEncoding,
    audit_ranking,
    audit_triangle,
    bgp_metric_lengths,
    bgp_shortest_path_lengths,
)
from flowgames.reductions.pref_reductions import pref_to_bbc, pref_to_bgp
from flowgames.text_utils import format_profile

logger = logging.getLogger(__name__)

ARTIFACT_ROUTES = {
    ("preference", "bgp"): pref_to_bgp,
    ("preference", "bbc"): pref_to_bbc,
    ("bgp", "matrix"): bgp_to_matrix,
    ("bbc", "matrix"): bbc_to_matrix,
}
LENGTH_ROUTES = {
    ("bgp", "lengths"): bgp_shortest_path_lengths,
    ("bgp", "metric"): bgp_metric_lengths,
}
TARGETS = ("bgp", "bbc", "matrix", "lengths", "metric", "4player")


def _dump(kind: str, game: Any) -> dict[str, Any]:
    return game_file_for(kind, game).model_dump(mode="json", exclude_none=True)


def artifact_mapping(red: ReductionArtifact) -> dict[str, Any]:
    return {
        "forward": [
            {"source": [src[0], src[1]], "target": [dst[0], dst[1]]}
            for src, dst in red.forward_table.items()
        ],
        "slack": {owner: key for owner, key in red.slack.items()},
        "constants": {
            owner: {str(k): format_rational(v) for k, v in fixed.items()}
            for owner, fixed in red.constants.items()
        },
    }


def length_mapping(encoding: LengthEncoding) -> dict[str, Any]:
    tables: dict[str, Any] = {}
    ranking = triangle = 0
    for v, table in encoding.tables.items():
        entry: dict[str, Any] = {
            "default": table.default,
            "lengths": {edge_key(x, y): n for (x, y), n in table.lengths.items()},
            "listed": [list(p) for p in table.listed],
        }
        if table.template is not None:
            entry["template"] = sorted(edge_key(x, y) for x, y in table.template)
            triangle += len(audit_triangle(table))
        ranking += len(audit_ranking(table))
        tables[v] = entry
    mapping: dict[str, Any] = {
        "tables": tables,
        "audit": {"ranking_issues": ranking, "triangle_issues": triangle},
    }
    if encoding.artifact is not None:
        mapping.update(artifact_mapping(encoding.artifact))
    return mapping


def four_player_mapping(result: FourPlayerReduction) -> dict[str, Any]:
    return {
        "k": result.k,
        "M": format_rational(result.M),
        "pairs": {player: list(nodes) for player, nodes in result.pairs.items()},
        "copies": dict(result.copies),
        "coloring": dict(result.coloring),
        "rewired": _dump("graphical", result.graph),
        "equations": [
            {
                "left": eq.left,
                "left_strategies": list(eq.left_strategies),
                "right": eq.right,
                "right_strategies": list(eq.right_strategies),
            }
            for eq in result.equations
        ],
    }


class ReductionService:
    def reduce(
        self, kind: str, game: Any, target: str, profile: dict | None = None
    ) -> BundleFile:
        """
        Reduce ``game`` to ``target`` and bundle both sides with the tables.

        A profile given with an artifact route is forward-mapped; with the
        four-player route it is read as a profile of the four-player game and
        checked against the synchronizer equations.
        """
        route = (kind, target)
        if route in ARTIFACT_ROUTES:
            red = ARTIFACT_ROUTES[route](game)
            bundle = BundleFile(
                source=_dump(kind, game),
                target=_dump(red.target_kind, red.target),
                mapping=artifact_mapping(red),
            )
            if profile is not None:
                mapped = map_solution(red, Direction.FORWARD, profile)
                bundle.mapping["profile"] = format_profile(mapped)
        elif route in LENGTH_ROUTES:
            encoding = LENGTH_ROUTES[route](game)
            bundle = BundleFile(
                source=_dump(kind, game),
                target=_dump("bgp", encoding.instance),
                mapping=length_mapping(encoding),
            )
            if profile is not None:
                if encoding.artifact is None:
                    raise InputError(
                        "Shortest-path lengths keep the instance; nothing to map"
                    )
                mapped = map_solution(encoding.artifact, Direction.FORWARD, profile)
                bundle.mapping["profile"] = format_profile(mapped)
        elif route == ("graphical", "4player"):
            result = graphical_to_four_player(game)
            bundle = BundleFile(
                source=_dump(kind, game),
                target=_dump("matrix", result.game),
                mapping=four_player_mapping(result),
            )
            if profile is not None:
                violated = check_synchronizer(result, profile)
                bundle.mapping["sync_violations"] = len(violated)
                bundle.mapping["projected"] = format_profile(
                    project_to_graphical(result, profile)
                )
        else:
            raise UnsupportedMethodError(
                "No reduction between these kinds",
                details={"source": kind, "target": target},
            )
        logger.info("Reduced %s game to %s", kind, target)
        return bundle
