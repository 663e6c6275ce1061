"""File schemas of the game instances, profiles and circuits."""

from fractions import Fraction
from typing import Annotated, Any, Literal, Union

from pydantic import BaseModel, Field, RootModel, field_validator

from flowgames.errors.exceptions import InputError
from flowgames.gadgets.compiler import BitSpec, CircuitDescription, FeedbackSpec, Gate
from flowgames.gadgets.library import GadgetKind
from flowgames.games.bbc import BBCInstance
from flowgames.games.bgp import BGPInstance
from flowgames.games.personalized import MatrixGame
from flowgames.games.prefgame import PreferenceGame
from flowgames.numerics.rational import RationalStr
from flowgames.reductions.four_player import GraphicalGame


def edge_key(x: str, y: str) -> str:
    return f"{x},{y}"


def split_edge_key(key: str) -> tuple[str, str]:
    parts = key.split(",")
    if len(parts) != 2 or not all(p.strip() for p in parts):
        raise ValueError(f"edge keys look like 'x,y', got {key!r}")
    return parts[0].strip(), parts[1].strip()


class PreferenceGameFile(BaseModel):
    type: Literal["preference"] = "preference"
    players: list[str]
    prefs: dict[str, list[list[str]]] = {}

    def to_domain(self) -> PreferenceGame:
        return PreferenceGame(
            players=tuple(self.players),
            prefs={i: tuple(tuple(c) for c in cls) for i, cls in self.prefs.items()},
        )

    @classmethod
    def from_domain(cls, game: PreferenceGame) -> "PreferenceGameFile":
        return cls(
            players=list(game.players),
            prefs={i: [list(c) for c in game.classes(i)] for i in game.players},
        )


class BGPFile(BaseModel):
    type: Literal["bgp"] = "bgp"
    dest: str
    paths: dict[str, list[list[str]]]
    prefs: dict[str, list[list[int]]] = {}

    def to_domain(self) -> BGPInstance:
        return BGPInstance(
            dest=self.dest,
            paths={
                v: tuple(tuple(p) for p in listed) for v, listed in self.paths.items()
            },
            prefs={v: tuple(tuple(c) for c in cls) for v, cls in self.prefs.items()},
        )

    @classmethod
    def from_domain(cls, inst: BGPInstance) -> "BGPFile":
        return cls(
            dest=inst.dest,
            paths={v: [list(p) for p in inst.paths[v]] for v in inst.nodes},
            prefs={v: [list(c) for c in inst.prefs[v]] for v in inst.nodes},
        )


class BBCFile(BaseModel):
    type: Literal["bbc"] = "bbc"
    nodes: list[str] | None = None
    dest: str
    cost: dict[str, dict[str, int]] = {}
    budget: dict[str, int] = {}
    lengths: dict[str, dict[str, int]] = {}
    M: int

    @field_validator("lengths")
    @classmethod
    def validate_length_keys(cls, v: dict[str, dict[str, int]]):
        for table in v.values():
            for key in table:
                split_edge_key(key)
        return v

    def node_order(self) -> tuple[str, ...]:
        """Declared nodes, or every node mentioned, in first-mention order."""
        if self.nodes is not None:
            return tuple(self.nodes)
        seen: dict[str, None] = {}
        for u, links in self.cost.items():
            seen.setdefault(u)
            for v in links:
                seen.setdefault(v)
        for u in self.budget:
            seen.setdefault(u)
        for u, table in self.lengths.items():
            seen.setdefault(u)
            for key in table:
                for x in split_edge_key(key):
                    seen.setdefault(x)
        seen.pop(self.dest, None)
        return tuple(seen) + (self.dest,)

    def to_domain(self) -> BBCInstance:
        return BBCInstance(
            nodes=self.node_order(),
            dest=self.dest,
            cost=self.cost,
            budget=self.budget,
            lengths={
                u: {split_edge_key(k): n for k, n in table.items()}
                for u, table in self.lengths.items()
            },
            M=self.M,
        )

    @classmethod
    def from_domain(cls, inst: BBCInstance) -> "BBCFile":
        return cls(
            nodes=list(inst.nodes),
            dest=inst.dest,
            cost={u: dict(links) for u, links in inst.cost.items()},
            budget=dict(inst.budget),
            lengths={
                u: {edge_key(x, y): n for (x, y), n in table.items()}
                for u, table in inst.lengths.items()
            },
            M=inst.M,
        )


class UtilityEntry(BaseModel):
    edge: list[str]
    payoffs: dict[str, RationalStr]


class MatrixGameFile(BaseModel):
    type: Literal["matrix"] = "matrix"
    players: list[str]
    strategies: dict[str, list[str]]
    utilities: list[UtilityEntry] = []

    def to_domain(self) -> MatrixGame:
        utilities: dict[str, dict[tuple[str, ...], Fraction]] = {}
        for entry in self.utilities:
            for i, value in entry.payoffs.items():
                utilities.setdefault(i, {})[tuple(entry.edge)] = value
        return MatrixGame(
            players=tuple(self.players),
            strategies={i: tuple(s) for i, s in self.strategies.items()},
            utilities=utilities,
        )

    @classmethod
    def from_domain(cls, game: MatrixGame) -> "MatrixGameFile":
        by_edge: dict[tuple[str, ...], dict[str, Fraction]] = {}
        for i in game.players:
            for edge, value in game.utilities[i].items():
                by_edge.setdefault(edge, {})[i] = value
        ordered = [e for e in game.hyperedges() if e in by_edge]
        return cls(
            players=list(game.players),
            strategies={i: list(game.strategies[i]) for i in game.players},
            utilities=[UtilityEntry(edge=list(e), payoffs=by_edge[e]) for e in ordered],
        )


class PayoffEntry(BaseModel):
    own: Literal[0, 1]
    inputs: list[Literal[0, 1]] = []
    value: RationalStr


class GraphicalNode(BaseModel):
    inputs: list[str] = []
    payoffs: list[PayoffEntry] = []


class GraphicalGameFile(BaseModel):
    type: Literal["graphical"] = "graphical"
    nodes: dict[str, GraphicalNode]

    def to_domain(self) -> GraphicalGame:
        return GraphicalGame(
            nodes=tuple(self.nodes),
            inputs={x: tuple(node.inputs) for x, node in self.nodes.items()},
            payoffs={
                x: {(p.own, tuple(p.inputs)): p.value for p in node.payoffs}
                for x, node in self.nodes.items()
            },
        )

    @classmethod
    def from_domain(cls, game: GraphicalGame) -> "GraphicalGameFile":
        return cls(
            nodes={
                x: GraphicalNode(
                    inputs=list(game.inputs[x]),
                    payoffs=[
                        PayoffEntry(own=own, inputs=list(bits), value=value)
                        for (own, bits), value in sorted(game.payoffs[x].items())
                        if value != 0
                    ],
                )
                for x in game.nodes
            }
        )


GameFile = Annotated[
    Union[
        PreferenceGameFile, BGPFile, BBCFile, MatrixGameFile, GraphicalGameFile
    ],
    Field(discriminator="type"),
]


class GameDocument(RootModel[GameFile]):
    """Any game file, dispatched on its ``type`` field."""

    @property
    def kind(self) -> str:
        return self.root.type

    def to_domain(self) -> Any:
        return self.root.to_domain()


def game_file_for(kind: str, game: Any) -> BaseModel:
    writers = {
        "preference": PreferenceGameFile,
        "bgp": BGPFile,
        "bbc": BBCFile,
        "matrix": MatrixGameFile,
        "graphical": GraphicalGameFile,
    }
    return writers[kind].from_domain(game)


class ProfileFile(BaseModel):
    """Weights per owner; BGP assignments use path indices as keys."""

    weights: dict[str, dict[str, RationalStr]]

    def to_domain(self, index_keys: bool = False) -> dict[str, dict[Any, Fraction]]:
        if not index_keys:
            return {o: dict(d) for o, d in self.weights.items()}
        try:
            return {
                o: {int(k): w for k, w in d.items()} for o, d in self.weights.items()
            }
        except ValueError as e:
            raise InputError(
                "Assignment keys must be path indices", original_exception=e
            ) from e

    @classmethod
    def from_domain(cls, profile) -> "ProfileFile":
        return cls(
            weights={
                str(o): {
                    str(k): w
                    for k, w in sorted(d.items(), key=lambda i: str(i[0]))
                    if w != 0
                }
                for o, d in sorted(profile.items(), key=lambda i: str(i[0]))
            }
        )


class GateEntry(BaseModel):
    id: str
    kind: GadgetKind
    args: list[str] = []


class BitEntry(BaseModel):
    of: str
    n: int = Field(ge=1)


class FeedbackEntry(BaseModel):
    coordinates: list[str]
    vertices: list[list[str]]


class CircuitFile(BaseModel):
    inputs: list[str] = []
    gates: list[GateEntry] = []
    outputs: list[str] = []
    bits: BitEntry | None = None
    feedback: FeedbackEntry | None = None
    epsilon_l: RationalStr | None = None

    def to_domain(self) -> CircuitDescription:
        return CircuitDescription(
            inputs=tuple(self.inputs),
            gates=tuple(Gate(g.id, g.kind, tuple(g.args)) for g in self.gates),
            outputs=tuple(self.outputs),
            bits=BitSpec(self.bits.of, self.bits.n) if self.bits else None,
            feedback=(
                FeedbackSpec(
                    coordinates=tuple(self.feedback.coordinates),
                    vertices=tuple(tuple(v) for v in self.feedback.vertices),
                )
                if self.feedback
                else None
            ),
            eps_l=self.epsilon_l,
        )


class BundleFile(BaseModel):
    """Output of ``reduce``: both instances and the tables between them."""

    source: dict[str, Any]
    target: dict[str, Any]
    mapping: dict[str, Any]
