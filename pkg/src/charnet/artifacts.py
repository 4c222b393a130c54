"""Structural checks and JSON conversion for pipeline artifacts."""
from __future__ import annotations

from dataclasses import replace
from typing import Any, Sequence

from charnet.graph_extraction import CharacterNetwork, DynamicNetwork, Edge, NetworkSlice, Vertex
from charnet.ner import EntityMention, surface_of
from charnet.pipeline import ArtifactKey, MalformedArtifact, PipelineState
from charnet.preprocessing import SentenceSpan, Token
from charnet.quotes import Quote, SpeakerAttribution
from charnet.unification import Character, CorefChain

# artifacts holding token spans, checked once tokens are known
SPAN_KEYS = frozenset({ArtifactKey.ENTITIES, ArtifactKey.COREFS, ArtifactKey.QUOTES, ArtifactKey.SPEAKERS})

STATE_SCHEMA = "charnet.state/1"


def _check_span(first: int, last: int, n_tokens: int | None, what: str) -> None:
    if not (isinstance(first, int) and isinstance(last, int)):
        raise MalformedArtifact(f"{what}: span bounds must be integers")
    if first < 0 or first > last:
        raise MalformedArtifact(f"{what}: invalid span ({first}, {last})")
    if n_tokens is not None and last >= n_tokens:
        raise MalformedArtifact(f"{what}: span ({first}, {last}) beyond last token {n_tokens - 1}")


def check_entities(value: Sequence[EntityMention], tokens: Sequence | None) -> tuple[EntityMention, ...]:
    n = len(tokens) if tokens is not None else None
    out = []
    prev_last = -1
    for i, m in enumerate(sorted(value, key=lambda m: (m.first_token, m.last_token))):
        if not isinstance(m, EntityMention):
            raise MalformedArtifact(f"entity {i}: expected EntityMention, got {type(m).__name__}")
        _check_span(m.first_token, m.last_token, n, f"entity {i}")
        if m.first_token <= prev_last:
            raise MalformedArtifact(f"entity {i}: span ({m.first_token}, {m.last_token}) overlaps the previous one")
        prev_last = m.last_token
        if tokens is not None:
            m = replace(m, surface=surface_of(tokens, m.first_token, m.last_token))
        out.append(m)
    return tuple(out)


def check_corefs(value: Sequence[CorefChain], tokens: Sequence | None) -> tuple[CorefChain, ...]:
    n = len(tokens) if tokens is not None else None
    for i, chain in enumerate(value):
        if not isinstance(chain, CorefChain):
            raise MalformedArtifact(f"coref chain {i}: expected CorefChain")
        for first, last in chain.mentions:
            _check_span(first, last, n, f"coref chain {i}")
    return tuple(value)


def check_quotes(value: Sequence[Quote], tokens: Sequence | None) -> tuple[Quote, ...]:
    n = len(tokens) if tokens is not None else None
    out = []
    prev_last = -1
    for i, q in enumerate(sorted(value, key=lambda q: q.first_token)):
        if not isinstance(q, Quote):
            raise MalformedArtifact(f"quote {i}: expected Quote")
        _check_span(q.first_token, q.last_token, n, f"quote {i}")
        if q.first_token <= prev_last:
            raise MalformedArtifact(f"quote {i}: overlaps the previous quote")
        prev_last = q.last_token
        if tokens is not None and not (q.open_mark and q.close_mark):
            q = replace(q, open_mark=tokens[q.first_token].text, close_mark=tokens[q.last_token].text)
        out.append(q)
    return tuple(out)


def check_tokens(value: Sequence[Token]) -> tuple[Token, ...]:
    prev_end = 0
    for i, t in enumerate(value):
        if not isinstance(t, Token) or t.index != i or not (prev_end <= t.start < t.end):
            raise MalformedArtifact(f"token {i}: tokens must be indexed, ordered and non-overlapping")
        prev_end = t.end
    return tuple(value)


def check_artifact(key: ArtifactKey, value: Any, tokens: Sequence | None) -> Any:
    """Validate ``value`` for ``key``; span artifacts are range-checked when ``tokens`` is given."""
    if key is ArtifactKey.ENTITIES:
        return check_entities(value, tokens)
    if key is ArtifactKey.COREFS:
        return check_corefs(value, tokens)
    if key is ArtifactKey.QUOTES:
        return check_quotes(value, tokens)
    if key is ArtifactKey.TOKENS:
        return check_tokens(value)
    if key is ArtifactKey.SPEAKERS:
        if any(not isinstance(a, SpeakerAttribution) for a in value):
            raise MalformedArtifact("speakers: expected SpeakerAttribution records")
        return tuple(value)
    if key is ArtifactKey.SENTENCES:
        if any(not isinstance(s, SentenceSpan) for s in value):
            raise MalformedArtifact("sentences: expected SentenceSpan records")
        return tuple(value)
    if key is ArtifactKey.CHARACTERS:
        if any(not isinstance(c, Character) for c in value):
            raise MalformedArtifact("characters: expected Character records")
        return tuple(value)
    if key is ArtifactKey.CHARACTER_NETWORK:
        if not isinstance(value, (CharacterNetwork, DynamicNetwork)):
            raise MalformedArtifact("character_network: expected a CharacterNetwork or DynamicNetwork")
        return value
    raise MalformedArtifact(f"{key.value} cannot be injected")


# --- JSON conversion ----------------------------------------------------------


def _mention_to_json(m: EntityMention) -> dict:
    return {"first_token": m.first_token, "last_token": m.last_token, "surface": m.surface, "label": m.label}


def _mention_from_json(d: dict) -> EntityMention:
    return EntityMention(d["first_token"], d["last_token"], d.get("surface", ""), d.get("label", "PER"))


def network_to_json(network: CharacterNetwork) -> dict:
    return {
        "vertices": [
            {"id": v.id, "canonical": v.canonical, "mention_count": v.mention_count,
             "degree": v.degree, "names": list(v.names)}
            for v in network.vertices
        ],
        "edges": [{"source": e.a, "target": e.b, "weight": e.weight} for e in network.edges],
    }


def network_from_json(d: dict) -> CharacterNetwork:
    vertices = tuple(sorted(
        Vertex(v["id"], v["canonical"], v["mention_count"], v["degree"], tuple(v.get("names", ())))
        for v in d["vertices"]
    ))
    edges = tuple(sorted(Edge(e["source"], e["target"], e["weight"]) for e in d["edges"]))
    return CharacterNetwork(vertices, edges)


def any_network_to_json(network: CharacterNetwork | DynamicNetwork) -> dict:
    if isinstance(network, DynamicNetwork):
        return {
            "kind": "dynamic",
            "slices": [{"start": s.start, "end": s.end, **network_to_json(s.network)} for s in network.slices],
        }
    return {"kind": "static", **network_to_json(network)}


def any_network_from_json(d: dict) -> CharacterNetwork | DynamicNetwork:
    if d.get("kind") == "dynamic":
        return DynamicNetwork(tuple(NetworkSlice(s["start"], s["end"], network_from_json(s)) for s in d["slices"]))
    return network_from_json(d)


_ENCODERS = {
    ArtifactKey.TEXT: lambda v: v,
    ArtifactKey.TOKENS: lambda v: [[t.text, t.start, t.end] for t in v],
    ArtifactKey.SENTENCES: lambda v: [[s.first_token, s.last_token] for s in v],
    ArtifactKey.ENTITIES: lambda v: [_mention_to_json(m) for m in v],
    ArtifactKey.COREFS: lambda v: [[list(s) for s in c.mentions] for c in v],
    ArtifactKey.QUOTES: lambda v: [[q.first_token, q.last_token, q.open_mark, q.close_mark] for q in v],
    ArtifactKey.SPEAKERS: lambda v: [
        {"quote_index": a.quote_index, "method": a.method,
         "mention": _mention_to_json(a.mention) if a.mention is not None else None}
        for a in v
    ],
    ArtifactKey.CHARACTERS: lambda v: [
        {"id": c.id, "canonical": c.canonical, "names": sorted(c.names),
         "mentions": [_mention_to_json(m) for m in c.mentions]}
        for c in v
    ],
    ArtifactKey.CHARACTER_NETWORK: any_network_to_json,
}

_DECODERS = {
    ArtifactKey.TEXT: lambda v: v,
    ArtifactKey.TOKENS: lambda v: tuple(Token(i, t, s, e) for i, (t, s, e) in enumerate(v)),
    ArtifactKey.SENTENCES: lambda v: tuple(SentenceSpan(a, b) for a, b in v),
    ArtifactKey.ENTITIES: lambda v: tuple(_mention_from_json(m) for m in v),
    ArtifactKey.COREFS: lambda v: tuple(CorefChain(tuple(tuple(s) for s in c)) for c in v),
    ArtifactKey.QUOTES: lambda v: tuple(Quote(*q) for q in v),
    ArtifactKey.SPEAKERS: lambda v: tuple(
        SpeakerAttribution(a["quote_index"], _mention_from_json(a["mention"]) if a["mention"] else None, a["method"])
        for a in v
    ),
    ArtifactKey.CHARACTERS: lambda v: tuple(
        Character(c["id"], frozenset(c["names"]), c["canonical"], tuple(_mention_from_json(m) for m in c["mentions"]))
        for c in v
    ),
    ArtifactKey.CHARACTER_NETWORK: any_network_from_json,
}


def state_to_json(state: PipelineState) -> dict:
    return {
        "schema": STATE_SCHEMA,
        "language": state.language,
        "provenance": {k.value: p for k, p in sorted(state.provenance.items())},
        "artifacts": {k.value: _ENCODERS[k](v) for k, v in sorted(state.artifacts.items())},
    }


def state_from_json(d: dict) -> PipelineState:
    if d.get("schema") != STATE_SCHEMA:
        raise MalformedArtifact(f"unsupported state schema {d.get('schema')!r}")
    state = PipelineState(d["language"])
    for name, value in d["artifacts"].items():
        key = ArtifactKey(name)
        state.set(key, _DECODERS[key](value), d["provenance"].get(name, "injected"))
    return state
