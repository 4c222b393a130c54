"""Character network extraction: co-occurrence (static or dynamic) and conversation graphs."""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from charnet.pipeline import ArtifactKey, PipelineStep
from charnet.quotes import DEFAULT_CONVERSATION_GAP, Quote, SpeakerAttribution, segment_conversations
from charnet.unification import Character, character_of_mentions


@dataclass(frozen=True, order=True)
class Vertex:
    id: int
    canonical: str
    mention_count: int
    degree: int
    names: tuple[str, ...] = ()


@dataclass(frozen=True, order=True)
class Edge:
    a: int
    b: int
    weight: int


@dataclass(frozen=True)
class CharacterNetwork:
    vertices: tuple[Vertex, ...] = ()
    edges: tuple[Edge, ...] = ()

    @classmethod
    def build(cls, vertices: Iterable[tuple[int, str, int, Iterable[str]]], weights: dict[tuple[int, int], int]) -> "CharacterNetwork":
        """Assemble a network from ``(id, canonical, mention_count, names)`` rows and pair weights."""
        degree: Counter = Counter()
        edges = []
        for (a, b), w in weights.items():
            if a == b or w <= 0:
                continue
            a, b = min(a, b), max(a, b)
            edges.append(Edge(a, b, w))
            degree[a] += 1
            degree[b] += 1
        verts = tuple(sorted(
            Vertex(vid, canonical, count, degree[vid], tuple(sorted(names)))
            for vid, canonical, count, names in vertices
        ))
        return cls(verts, tuple(sorted(edges)))

    def vertex(self, vid: int) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def weight(self, a: int, b: int) -> int:
        a, b = min(a, b), max(a, b)
        for e in self.edges:
            if (e.a, e.b) == (a, b):
                return e.weight
        return 0

    def weights(self) -> dict[tuple[int, int], int]:
        return {(e.a, e.b): e.weight for e in self.edges}

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        for v in self.vertices:
            g.add_node(v.id, canonical=v.canonical, mention_count=v.mention_count, names=list(v.names))
        for e in self.edges:
            g.add_edge(e.a, e.b, weight=e.weight)
        return g


@dataclass(frozen=True)
class NetworkSlice:
    start: int
    end: int
    network: CharacterNetwork


@dataclass(frozen=True)
class DynamicNetwork:
    slices: tuple[NetworkSlice, ...] = ()

    def __len__(self) -> int:
        return len(self.slices)

    def __iter__(self):
        return iter(self.slices)

    def to_networkx(self) -> list:
        return [s.network.to_networkx() for s in self.slices]


@dataclass(frozen=True)
class ExtractionConfig:
    co_occurrences_dist: int = 10
    dynamic: bool = False
    dynamic_window: int | None = None
    dynamic_overlap: int = 0

    def __post_init__(self):
        if self.co_occurrences_dist < 1:
            raise ValueError("co_occurrences_dist must be >= 1")
        if self.dynamic:
            if self.dynamic_window is None or self.dynamic_window < 1:
                raise ValueError("dynamic extraction needs dynamic_window >= 1")
            if not 0 <= self.dynamic_overlap < self.dynamic_window:
                raise ValueError("dynamic_overlap must satisfy 0 <= overlap < dynamic_window")


def _cooccurrence_weights(tagged: list[tuple[int, int, int]], dist: int) -> dict[tuple[int, int], int]:
    """``tagged`` holds (first_token, last_token, character_id) sorted by first_token."""
    weights: dict[tuple[int, int], int] = defaultdict(int)
    n = len(tagged)
    for i in range(n):
        _, last_i, ci = tagged[i]
        for j in range(i + 1, n):
            first_j, _, cj = tagged[j]
            gap = first_j - last_i
            if gap > dist:
                break
            if gap >= 0 and ci != cj:
                weights[(min(ci, cj), max(ci, cj))] += 1
    return weights


def _tag_mentions(characters: Iterable[Character]) -> list[tuple[int, int, int]]:
    return sorted((m.first_token, m.last_token, c.id) for c in characters for m in c.mentions)


def extract_cooccurrence_static(characters: Sequence[Character], config: ExtractionConfig | None = None) -> CharacterNetwork:
    config = config or ExtractionConfig()
    weights = _cooccurrence_weights(_tag_mentions(characters), config.co_occurrences_dist)
    rows = [(c.id, c.canonical, len(c.mentions), c.names) for c in characters]
    return CharacterNetwork.build(rows, weights)


def dynamic_windows(token_count: int, window: int, overlap: int = 0) -> list[tuple[int, int]]:
    """Windows ``[k*(window-overlap), k*(window-overlap)+window)`` until the last token is covered, clipped to the text."""
    step = window - overlap
    out = []
    start = 0
    while True:
        end = start + window
        out.append((start, min(end, token_count) if token_count > 0 else end))
        if end >= token_count:
            break
        start += step
    return out


def extract_cooccurrence_dynamic(
    characters: Sequence[Character],
    config: ExtractionConfig,
    token_count: int | None = None,
) -> DynamicNetwork:
    """One co-occurrence graph per token window.

    A mention belongs to a window only when it lies fully inside it, so pairs
    straddling a window boundary are counted in no slice.
    """
    tagged = _tag_mentions(characters)
    if token_count is None:
        token_count = max((last for _, last, _ in tagged), default=-1) + 1
    by_id = {c.id: c for c in characters}
    slices = []
    for start, end in dynamic_windows(token_count, config.dynamic_window, config.dynamic_overlap):
        inside = [t for t in tagged if t[0] >= start and t[1] < end]
        weights = _cooccurrence_weights(inside, config.co_occurrences_dist)
        counts = Counter(cid for _, _, cid in inside)
        rows = [(cid, by_id[cid].canonical, n, by_id[cid].names) for cid, n in counts.items()]
        slices.append(NetworkSlice(start, end, CharacterNetwork.build(rows, weights)))
    return DynamicNetwork(tuple(slices))


def extract_conversational(
    quotes: Sequence[Quote],
    attributions: Sequence[SpeakerAttribution],
    characters: Sequence[Character],
    conversation_gap: int = DEFAULT_CONVERSATION_GAP,
    pairing: str = "consecutive",
) -> CharacterNetwork:
    """Link speakers who talk to each other.

    With ``pairing="consecutive"`` each pair of successive attributed quotes
    by different speakers adds one to their edge; with ``pairing="all"`` every
    pair of distinct speakers of a conversation adds one. Unattributed quotes
    are skipped without ending the conversation.
    """
    if pairing not in ("consecutive", "all"):
        raise ValueError(f"unknown pairing {pairing!r}")
    owner = character_of_mentions(characters)
    speaker: dict[int, int] = {}
    for att in attributions:
        if att.mention is not None and att.mention.span in owner:
            speaker[att.quote_index] = owner[att.mention.span].id

    weights: dict[tuple[int, int], int] = defaultdict(int)
    for conversation in segment_conversations(quotes, conversation_gap):
        speakers = [speaker[qi] for qi in conversation if qi in speaker]
        if pairing == "consecutive":
            for a, b in zip(speakers, speakers[1:]):
                if a != b:
                    weights[(min(a, b), max(a, b))] += 1
        else:
            for a, b in itertools.combinations(sorted(set(speakers)), 2):
                weights[(a, b)] += 1
    rows = [(c.id, c.canonical, len(c.mentions), c.names) for c in characters]
    return CharacterNetwork.build(rows, weights)


class CoOccurrencesGraphExtractor(PipelineStep):
    name = "cooccurrence_extractor"

    def __init__(
        self,
        co_occurrences_dist: int = 10,
        dynamic: bool = False,
        dynamic_window: int | None = None,
        dynamic_overlap: int = 0,
    ):
        self.config = ExtractionConfig(co_occurrences_dist, dynamic, dynamic_window, dynamic_overlap)

    def needs(self):
        return {ArtifactKey.CHARACTERS}

    def optional_needs(self):
        return {ArtifactKey.TOKENS}

    def production(self):
        return {ArtifactKey.CHARACTER_NETWORK}

    def __call__(self, language, characters, tokens=None):
        if self.config.dynamic:
            count = len(tokens) if tokens is not None else None
            network = extract_cooccurrence_dynamic(characters, self.config, count)
        else:
            network = extract_cooccurrence_static(characters, self.config)
        return {ArtifactKey.CHARACTER_NETWORK: network}


class ConversationalGraphExtractor(PipelineStep):
    name = "conversational_extractor"

    def __init__(self, conversation_gap: int = DEFAULT_CONVERSATION_GAP, pairing: str = "consecutive"):
        if pairing not in ("consecutive", "all"):
            raise ValueError(f"unknown pairing {pairing!r}")
        self.conversation_gap = conversation_gap
        self.pairing = pairing

    def needs(self):
        return {ArtifactKey.QUOTES, ArtifactKey.SPEAKERS, ArtifactKey.CHARACTERS}

    def production(self):
        return {ArtifactKey.CHARACTER_NETWORK}

    def __call__(self, language, quotes, speakers, characters):
        network = extract_conversational(quotes, speakers, characters, self.conversation_gap, self.pairing)
        return {ArtifactKey.CHARACTER_NETWORK: network}
