"""Bit-exact JSON file formats: chains, games, dependencies, automata.

All documents carry ``"format": "obg-v1"`` and a ``"kind"`` key.
Rationals are strings like ``"1/2"``, ``"0"``, ``"1"``; bare JSON
numbers are rejected to prevent silent float ingestion.  Serialization
is canonical (fixed key order, two-space indent, trailing newline), so
serialize - parse - serialize is byte-identical.

A document may carry a free-form ``"provenance"`` object describing
which of its numbers are externally stated and which were derived; it
is preserved verbatim on round-trips and ignored by the solvers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence

from .errors import InputFormatError
from .model import (GE, GT, LabeledMarkovChain, Obligation, ObligationGame,
                    Owner, format_rational, parse_rational, validate,
                    validate_chain)
from .obligations import Dependency
from .pautomata import (FF, TT, And, Formula, Or, PAutomaton, StateAtom,
                        Term, validate_automaton)

FORMAT = "obg-v1"


@dataclass(frozen=True)
class ChainDocument:
    chain: LabeledMarkovChain
    priority: Optional[tuple[int, ...]]
    obligations: tuple[Optional[Obligation], ...]
    provenance: Optional[dict]

    def priority_map(self) -> dict[str, int]:
        if self.priority is None:
            raise InputFormatError("chain file carries no priorities")
        return {n: p for n, p in zip(self.chain.names, self.priority)}

    def obligation_map(self) -> dict[str, Obligation]:
        return {n: o for n, o in zip(self.chain.names, self.obligations) if o is not None}


@dataclass(frozen=True)
class GameDocument:
    game: ObligationGame
    provenance: Optional[dict]


def _fail(message: str) -> "InputFormatError":
    return InputFormatError(message)


def loads(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict):
        raise _fail("top-level JSON value must be an object")
    if data.get("format") != FORMAT:
        raise _fail(f'missing or unsupported "format" (expected "{FORMAT}")')
    return data


def dumps(document: Mapping[str, Any]) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def _parse_obligation(raw: Any, where: str) -> Optional[Obligation]:
    if raw is None:
        return None
    if not isinstance(raw, dict) or set(raw) != {"cmp", "threshold"}:
        raise _fail(f'{where}: obligation must be null or {{"cmp", "threshold"}}')
    if raw["cmp"] not in (GE, GT):
        raise _fail(f"{where}: obligation comparator must be '>=' or '>'")
    return Obligation(raw["cmp"], parse_rational(raw["threshold"]))


def _obligation_json(ob: Optional[Obligation]) -> Any:
    if ob is None:
        return None
    return {"cmp": ob.cmp, "threshold": format_rational(ob.threshold)}


def _parse_row(raw: Any, names: Sequence[str], where: str) -> dict[str, Fraction]:
    if not isinstance(raw, dict) or not raw:
        raise _fail(f"{where}: transition row must be a non-empty object")
    row = {}
    for target, p in raw.items():
        if target not in names:
            raise _fail(f"{where}: unknown target {target!r}")
        row[target] = parse_rational(p)
    return row


# ---------------------------------------------------------------------------
# Chains


def parse_chain_document(text: str) -> ChainDocument:
    data = loads(text)
    if data.get("kind") != "chain":
        raise _fail('expected "kind": "chain"')
    locations = data.get("locations")
    if not isinstance(locations, list) or not locations:
        raise _fail('"locations" must be a non-empty list')
    names = []
    labels = {}
    priorities = []
    obligations = []
    has_priorities = False
    for entry in locations:
        if not isinstance(entry, dict) or "id" not in entry:
            raise _fail("every location needs an \"id\"")
        name = entry["id"]
        names.append(name)
        labels[name] = sorted(entry.get("labels", []))
        if "priority" in entry and entry["priority"] is not None:
            has_priorities = True
            priorities.append(int(entry["priority"]))
        else:
            priorities.append(None)
        obligations.append(_parse_obligation(entry.get("obligation"), f"location {name}"))
    if has_priorities and any(p is None for p in priorities):
        raise _fail("either all locations carry a priority or none does")
    if len(set(names)) != len(names):
        raise _fail("duplicate location ids")
    transitions = data.get("transitions")
    if not isinstance(transitions, dict):
        raise _fail('"transitions" must be an object')
    rows = {}
    for name in names:
        if name not in transitions:
            raise _fail(f"no transition row for location {name}")
        rows[name] = _parse_row(transitions[name], names, f"transitions of {name}")
    initial = data.get("initial")
    if initial not in names:
        raise _fail('"initial" must name a location')
    chain = LabeledMarkovChain(
        names=tuple(names),
        succ=tuple(tuple(sorted((names.index(t), p) for t, p in rows[n].items()))
                   for n in names),
        labels=tuple(frozenset(labels[n]) for n in names),
        initial=names.index(initial),
    )
    problems = validate_chain(chain)
    if problems:
        raise _fail("invalid chain: " + "; ".join(problems))
    return ChainDocument(
        chain=chain,
        priority=tuple(priorities) if has_priorities else None,
        obligations=tuple(obligations),
        provenance=data.get("provenance"),
    )


def chain_document_json(doc: ChainDocument) -> dict:
    mc = doc.chain
    locations = []
    for i, name in enumerate(mc.names):
        entry: dict[str, Any] = {"id": name, "labels": sorted(mc.labels[i])}
        if doc.priority is not None:
            entry["priority"] = doc.priority[i]
        entry["obligation"] = _obligation_json(doc.obligations[i])
        locations.append(entry)
    out: dict[str, Any] = {
        "format": FORMAT,
        "kind": "chain",
        "locations": locations,
        "initial": mc.names[mc.initial],
        "transitions": {
            name: {mc.names[t]: format_rational(p) for t, p in mc.succ[i]}
            for i, name in enumerate(mc.names)
        },
    }
    if doc.provenance is not None:
        out["provenance"] = doc.provenance
    return out


def serialize_chain_document(doc: ChainDocument) -> str:
    return dumps(chain_document_json(doc))


# ---------------------------------------------------------------------------
# Games

_OWNERS = {o.value: o for o in Owner}


def parse_game_document(text: str) -> GameDocument:
    data = loads(text)
    if data.get("kind") != "game":
        raise _fail('expected "kind": "game"')
    configurations = data.get("configurations")
    if not isinstance(configurations, list) or not configurations:
        raise _fail('"configurations" must be a non-empty list')
    names, owners, priorities, obligations = [], [], [], []
    for entry in configurations:
        if not isinstance(entry, dict) or "id" not in entry:
            raise _fail("every configuration needs an \"id\"")
        name = entry["id"]
        names.append(name)
        owner = entry.get("owner")
        if owner not in _OWNERS:
            raise _fail(f"configuration {name}: owner must be one of {sorted(_OWNERS)}")
        owners.append(_OWNERS[owner])
        if "priority" not in entry:
            raise _fail(f"configuration {name}: missing priority")
        priorities.append(int(entry["priority"]))
        obligations.append(_parse_obligation(entry.get("obligation"), f"configuration {name}"))
    if len(set(names)) != len(names):
        raise _fail("duplicate configuration ids")
    index = {n: i for i, n in enumerate(names)}
    edges_raw = data.get("edges")
    if not isinstance(edges_raw, list):
        raise _fail('"edges" must be a list of [source, target] pairs')
    succ_sets: list[set[int]] = [set() for _ in names]
    for pair in edges_raw:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise _fail("every edge must be a [source, target] pair")
        a, b = pair
        if a not in index or b not in index:
            raise _fail(f"edge {pair} mentions an unknown configuration")
        succ_sets[index[a]].add(index[b])
    kernel_raw = data.get("kernel", {})
    if not isinstance(kernel_raw, dict):
        raise _fail('"kernel" must be an object')
    kernel: list[Optional[tuple[tuple[int, Fraction], ...]]] = [None] * len(names)
    for name, row in kernel_raw.items():
        if name not in index:
            raise _fail(f"kernel mentions unknown configuration {name!r}")
        parsed = _parse_row(row, names, f"kernel of {name}")
        kernel[index[name]] = tuple(sorted((index[t], p) for t, p in parsed.items()))
    game = ObligationGame(
        names=tuple(names), owners=tuple(owners),
        succ=tuple(tuple(sorted(s)) for s in succ_sets),
        kernel=tuple(kernel), priority=tuple(priorities),
        obligation=tuple(obligations))
    problems = validate(game)
    if problems:
        raise _fail("invalid game: " + "; ".join(problems))
    return GameDocument(game=game, provenance=data.get("provenance"))


def game_document_json(doc: GameDocument) -> dict:
    game = doc.game
    out: dict[str, Any] = {
        "format": FORMAT,
        "kind": "game",
        "configurations": [
            {"id": name,
             "owner": game.owners[i].value,
             "priority": game.priority[i],
             "obligation": _obligation_json(game.obligation[i])}
            for i, name in enumerate(game.names)
        ],
        "edges": [[game.names[a], game.names[b]]
                  for a in range(len(game)) for b in game.succ[a]],
        "kernel": {
            game.names[i]: {game.names[t]: format_rational(p)
                            for t, p in game.kernel_row(i)}
            for i in range(len(game)) if game.owners[i] is Owner.PROBABILISTIC
        },
    }
    if doc.provenance is not None:
        out["provenance"] = doc.provenance
    return out


def serialize_game_document(doc: GameDocument) -> str:
    return dumps(game_document_json(doc))


# ---------------------------------------------------------------------------
# Dependencies.  null is bottom; [] is the empty set; the distinction is
# semantically load-bearing.


def parse_dependency_document(text: str, game: ObligationGame) -> Dependency:
    data = loads(text)
    if data.get("kind") != "dependency":
        raise _fail('expected "kind": "dependency"')
    deps = data.get("dependencies")
    if not isinstance(deps, dict):
        raise _fail('"dependencies" must be an object')
    mapping: dict[int, Optional[list[tuple[int, int]]]] = {}
    for name, row in deps.items():
        v = game.index(name)
        if row is None:
            mapping[v] = None
            continue
        if not isinstance(row, list):
            raise _fail(f"dependency of {name} must be null or a list of pairs")
        pairs = []
        for item in row:
            if not (isinstance(item, list) and len(item) == 2 and isinstance(item[1], int)):
                raise _fail(f"dependency of {name}: entries must be [target, priority] pairs")
            pairs.append((game.index(item[0]), item[1]))
        mapping[v] = pairs
    for v in game.obligation_indices():
        mapping.setdefault(v, None)
    return Dependency.from_mapping(game, mapping)


def dependency_document_json(dep: Dependency, game: ObligationGame) -> dict:
    deps: dict[str, Any] = {}
    for v, row in dep.entries:
        if row is None:
            deps[game.names[v]] = None
        else:
            deps[game.names[v]] = [[game.names[u], i] for u, i in row]
    return {"format": FORMAT, "kind": "dependency", "dependencies": deps}


def serialize_dependency_document(dep: Dependency, game: ObligationGame) -> str:
    return dumps(dependency_document_json(dep, game))


# ---------------------------------------------------------------------------
# p-automata


def _parse_formula(raw: Any, where: str) -> Formula:
    if not (isinstance(raw, list) and raw and isinstance(raw[0], str)):
        raise _fail(f"{where}: formula nodes are non-empty arrays headed by a tag")
    tag = raw[0]
    if tag == "tt":
        return TT
    if tag == "ff":
        return FF
    if tag == "state":
        if len(raw) != 2:
            raise _fail(f"{where}: [\"state\", name]")
        return StateAtom(raw[1])
    if tag == "term":
        if len(raw) != 4 or raw[2] not in (GE, GT):
            raise _fail(f"{where}: [\"term\", state, \">=\"|\">\", bound]")
        return Term(raw[1], raw[2], parse_rational(raw[3]))
    if tag in ("and", "or"):
        if len(raw) != 3:
            raise _fail(f"{where}: [\"{tag}\", left, right]")
        left = _parse_formula(raw[1], where)
        right = _parse_formula(raw[2], where)
        return And(left, right) if tag == "and" else Or(left, right)
    raise _fail(f"{where}: unknown formula tag {tag!r}")


def formula_json(f: Formula) -> list:
    if f == TT:
        return ["tt"]
    if f == FF:
        return ["ff"]
    if isinstance(f, StateAtom):
        return ["state", f.state]
    if isinstance(f, Term):
        return ["term", f.state, f.cmp, format_rational(f.bound)]
    if isinstance(f, And):
        return ["and", formula_json(f.left), formula_json(f.right)]
    if isinstance(f, Or):
        return ["or", formula_json(f.left), formula_json(f.right)]
    raise AssertionError(f"unknown formula {f!r}")


def _letter_key(letter: frozenset[str]) -> str:
    return ",".join(sorted(letter))


def _parse_letter(key: str, propositions: Sequence[str], where: str) -> frozenset[str]:
    if key == "":
        return frozenset()
    parts = key.split(",")
    for p in parts:
        if p not in propositions:
            raise _fail(f"{where}: unknown proposition {p!r}")
    return frozenset(parts)


def parse_automaton_document(text: str) -> PAutomaton:
    data = loads(text)
    if data.get("kind") != "pautomaton":
        raise _fail('expected "kind": "pautomaton"')
    propositions = data.get("propositions")
    if not isinstance(propositions, list):
        raise _fail('"propositions" must be a list')
    states_raw = data.get("states")
    if not isinstance(states_raw, list) or not states_raw:
        raise _fail('"states" must be a non-empty list')
    states, priority = [], {}
    for entry in states_raw:
        if not isinstance(entry, dict) or "id" not in entry or "priority" not in entry:
            raise _fail('every state needs "id" and "priority"')
        states.append(entry["id"])
        priority[entry["id"]] = int(entry["priority"])
    transitions = data.get("transitions", {})
    if not isinstance(transitions, dict):
        raise _fail('"transitions" must be an object')
    cases: dict[str, dict[frozenset[str], Formula]] = {}
    default: dict[str, Formula] = {q: FF for q in states}
    for q, table in transitions.items():
        if q not in states:
            raise _fail(f"transitions mention unknown state {q!r}")
        if not isinstance(table, dict):
            raise _fail(f"transitions of {q} must be an object")
        if "default" in table:
            default[q] = _parse_formula(table["default"], f"default of {q}")
        cases[q] = {}
        for key, raw in table.get("cases", {}).items():
            letter = _parse_letter(key, propositions, f"transition of {q}")
            cases[q][letter] = _parse_formula(raw, f"transition of {q} under {key!r}")
    initial = _parse_formula(data.get("initial"), "initial condition")
    aut = PAutomaton(propositions=tuple(propositions), states=tuple(states),
                     priority=priority, cases=cases, default=default,
                     initial=initial)
    problems = validate_automaton(aut)
    if problems:
        raise _fail("invalid automaton: " + "; ".join(problems))
    return aut


def automaton_document_json(aut: PAutomaton, provenance: Optional[dict] = None) -> dict:
    transitions: dict[str, Any] = {}
    for q in aut.states:
        table: dict[str, Any] = {"default": formula_json(aut.default[q])}
        if aut.cases.get(q):
            table["cases"] = {
                _letter_key(letter): formula_json(formula)
                for letter, formula in sorted(aut.cases[q].items(),
                                              key=lambda kv: _letter_key(kv[0]))
            }
        transitions[q] = table
    out: dict[str, Any] = {
        "format": FORMAT,
        "kind": "pautomaton",
        "propositions": list(aut.propositions),
        "states": [{"id": q, "priority": aut.priority[q]} for q in aut.states],
        "initial": formula_json(aut.initial),
        "transitions": transitions,
    }
    if provenance is not None:
        out["provenance"] = provenance
    return out


def serialize_automaton_document(aut: PAutomaton, provenance: Optional[dict] = None) -> str:
    return dumps(automaton_document_json(aut, provenance))


# ---------------------------------------------------------------------------
# Kind sniffing for the CLI


def detect_kind(text: str) -> str:
    data = loads(text)
    kind = data.get("kind")
    if kind not in ("chain", "game", "dependency", "pautomaton"):
        raise _fail(f'unknown document kind {kind!r}')
    return kind
