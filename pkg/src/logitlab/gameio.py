"""Reading and writing ``.game.json`` documents.

Layout::

    {"version": 1, "kind": "potential", "players": 2, "radices": [2, 2],
     "potential": [0.0, 1.0, 1.0, 0.0]}

Exactly one of ``utilities`` (one flat array per player), ``potential`` or
``coordination`` (``{"edges": [[u, v], ...], "a": .., "b": .., "c": .., "d": ..}``)
carries the payoffs.  A potential-kind game whose utilities are not ``-phi``
stores both ``utilities`` and ``potential``.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import (
    BudgetError,
    GameSchemaError,
    GameSemanticError,
    GameSyntaxError,
    GraphError,
    LogitLabError,
    UnsupportedError,
)
from .game import COORDINATION, GENERIC, KINDS, POTENTIAL, Game, SocialGraph, space_size, verify_potential
from .generators import gen_graphical_coordination

FORMAT_VERSION = 1
_PAYLOADS = ("utilities", "potential", "coordination")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise GameSchemaError(f"{where}: expected a number, got {type(value).__name__}")
    if not math.isfinite(value):
        raise GameSchemaError(f"{where}: numbers must be finite")
    return float(value)


def _vector(value, length: int, where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise GameSchemaError(f"{where}: expected a list")
    if len(value) != length:
        raise GameSchemaError(f"{where}: expected {length} entries, got {len(value)}")
    return np.array([_number(v, f"{where}[{k}]") for k, v in enumerate(value)])


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise GameSchemaError(f"{where}: expected an integer")
    return value


def parse_game(text: str | bytes) -> Game:
    """Validate a document and build the game it describes."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameSyntaxError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            exc.lineno,
            exc.colno,
            exc.pos,
        ) from exc
    if not isinstance(doc, dict):
        raise GameSchemaError("top level must be an object")
    for key in ("version", "kind", "radices"):
        if key not in doc:
            raise GameSchemaError(f"missing field {key!r}")
    if _integer(doc["version"], "version") != FORMAT_VERSION:
        raise GameSchemaError(f"unsupported version {doc['version']!r}")
    kind = doc["kind"]
    if kind not in KINDS:
        raise GameSchemaError(f"unknown kind {kind!r}")
    radices = doc["radices"]
    if not isinstance(radices, list) or not radices:
        raise GameSchemaError("radices must be a non-empty list")
    radices = tuple(_integer(m, f"radices[{k}]") for k, m in enumerate(radices))
    if any(m < 1 for m in radices):
        raise GameSchemaError("every radix must be >= 1")
    n = len(radices)
    if "players" in doc and _integer(doc["players"], "players") != n:
        raise GameSchemaError(f"players = {doc['players']} but {n} radices given")
    present = [k for k in _PAYLOADS if k in doc]
    allowed = {GENERIC: [["utilities"]], POTENTIAL: [["potential"], ["utilities", "potential"]], COORDINATION: [["coordination"]]}
    if present not in allowed[kind]:
        raise GameSchemaError(f"kind {kind!r} cannot carry payload fields {present}")

    try:
        if kind == COORDINATION:
            return _parse_coordination(doc["coordination"], radices)
        size = space_size(radices)
        util = None
        if "utilities" in doc:
            rows = doc["utilities"]
            if not isinstance(rows, list) or len(rows) != n:
                raise GameSchemaError(f"utilities must hold one array per player ({n})")
            util = np.stack([_vector(r, size, f"utilities[{i}]") for i, r in enumerate(rows)])
        if kind == GENERIC:
            return Game(radices, util, GENERIC)
        phi = _vector(doc["potential"], size, "potential")
        if util is None:
            util = np.tile(-phi, (n, 1))
        game = Game(radices, util, POTENTIAL, potential=phi)
        check = verify_potential(game, phi)
        if not check.ok:
            raise GameSemanticError(f"utilities do not admit the given potential (violation {check.violation:.3g})")
        return game
    except (GameSchemaError, GameSemanticError, BudgetError):
        raise
    except LogitLabError as exc:
        raise GameSemanticError(str(exc)) from exc


def _parse_coordination(block, radices) -> Game:
    if not isinstance(block, dict):
        raise GameSchemaError("coordination must be an object")
    for key in ("edges", "a", "b", "c", "d"):
        if key not in block:
            raise GameSchemaError(f"coordination: missing field {key!r}")
    a, b, c, d = (_number(block[k], f"coordination.{k}") for k in "abcd")
    if any(m != 2 for m in radices):
        raise GameSemanticError("coordination games need every radix equal to 2")
    edges = block["edges"]
    if not isinstance(edges, list):
        raise GameSchemaError("coordination.edges must be a list")
    pairs = []
    for k, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise GameSchemaError(f"coordination.edges[{k}] must be a pair")
        pairs.append(tuple(_integer(v, f"coordination.edges[{k}]") for v in e))
    if a - d <= 0 or b - c <= 0:
        raise GameSemanticError(f"coordination needs a-d > 0 and b-c > 0, got {a - d} and {b - c}")
    try:
        graph = SocialGraph.from_edges(len(radices), pairs)
    except GraphError as exc:
        raise GameSemanticError(str(exc)) from exc
    return gen_graphical_coordination(graph, a, b, c, d)


def _floats(arr) -> list[float]:
    return [float(v) for v in np.asarray(arr).ravel()]


def game_document(game: Game) -> dict:
    if game.utilities is None:
        raise UnsupportedError("callback-backed utilities have no table to serialise")
    doc = {"version": FORMAT_VERSION, "kind": game.kind, "players": game.n, "radices": list(game.radices)}
    if game.kind == COORDINATION:
        if game.graph is None or game.payoffs is None:
            raise UnsupportedError("coordination game without graph and payoffs")
        a, b, c, d = game.payoffs
        doc["coordination"] = {"edges": [list(e) for e in game.graph.edges], "a": a, "b": b, "c": c, "d": d}
    elif game.kind == POTENTIAL:
        if game.potential is None:
            raise UnsupportedError("potential-kind game without a potential table")
        if not np.array_equal(game.utilities, np.tile(-game.potential, (game.n, 1))):
            doc["utilities"] = [_floats(r) for r in game.utilities]
        doc["potential"] = _floats(game.potential)
    else:
        doc["utilities"] = [_floats(r) for r in game.utilities]
    return doc


def serialize_game(game: Game) -> str:
    """JSON text; floats use the shortest repr so parsing restores them exactly."""
    return json.dumps(game_document(game), indent=1) + "\n"


def load_game(path) -> Game:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_game(fh.read())


def save_game(game: Game, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_game(game))
