"""Character unification: grouping person mentions into characters.

Two strategies are available. :func:`unify_naive` groups mentions by their
case-folded surface. :func:`unify_graph_rules` parses each distinct surface
into a :class:`HumanName`, links compatible variants (shared first name,
shared surname, nickname, containment, injected coreference) and forbids
links between incompatible ones (gender of titles, different surnames,
different first names).
"""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from charnet import resources
from charnet.ner import EntityMention
from charnet.pipeline import ArtifactKey, MissingResource, PipelineStep

DEFAULT_MIN_APPEARANCE = 10


@dataclass(frozen=True)
class HumanName:
    raw: str
    title: str | None = None
    first: str | None = None
    middle: tuple[str, ...] = ()
    last: str | None = None
    gender: str | None = None

    @property
    def parseable(self) -> bool:
        return self.first is not None or self.last is not None

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(self.raw.split())


@dataclass(frozen=True)
class CorefChain:
    mentions: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Character:
    id: int
    names: frozenset[str]
    canonical: str
    mentions: tuple[EntityMention, ...] = field(default=(), compare=True)

    def __len__(self) -> int:
        return len(self.mentions)


def parse_human_name(
    surface: str,
    honorifics: Iterable[str] | None = None,
    gendered_titles: Mapping[str, str] | None = None,
    given_names: Mapping[str, str] | None = None,
) -> HumanName:
    """Split ``surface`` into title, first, middle and last name.

    Gender comes from the title; ``given_names`` (name -> gender) supplies it
    for untitled names with a known first name.
    """
    honorifics = frozenset(resources.load_honorifics() if honorifics is None else honorifics)
    gendered_titles = resources.load_gendered_titles() if gendered_titles is None else gendered_titles
    parts = surface.split()
    titles = []
    while parts and parts[0] in honorifics:
        titles.append(parts.pop(0))
    title = " ".join(titles) or None
    gender = next((gendered_titles[t] for t in titles if t in gendered_titles), None)
    if not parts:
        return HumanName(surface, title=title, gender=gender)
    if len(parts) == 1:
        if title is not None:
            return HumanName(surface, title=title, last=parts[0], gender=gender)
        return HumanName(surface, first=parts[0], gender=(given_names or {}).get(parts[0]))
    if gender is None and given_names:
        gender = given_names.get(parts[0])
    return HumanName(surface, title=title, first=parts[0], middle=tuple(parts[1:-1]), last=parts[-1], gender=gender)


# ---------------------------------------------------------------------------


def _fold(s: str | None) -> str | None:
    return s.casefold() if s is not None else None


class _NameRules:
    """Pairwise link / cannot-link rules over parsed name variants."""

    def __init__(self, hypocorisms: Mapping[str, Iterable[str]]):
        self.full_names: dict[str, frozenset[str]] = {}
        for nick, fulls in hypocorisms.items():
            self.full_names[nick.casefold()] = frozenset(f.casefold() for f in fulls)

    def expansions(self, first: str) -> frozenset[str]:
        first = first.casefold()
        return self.full_names.get(first, frozenset()) | {first}

    def is_hypocorism(self, nick: str, full: str) -> bool:
        return full.casefold() in self.full_names.get(nick.casefold(), ())

    def compatible_firsts(self, a: str, b: str) -> bool:
        return bool(self.expansions(a) & self.expansions(b))

    def links(self, x: HumanName, y: HumanName) -> list[str]:
        """Rules linking ``x`` to ``y`` (one direction)."""
        rules = []
        if x.first is not None and x.last is None and y.first is not None and _fold(x.first) == _fold(y.first):
            rules.append("L1")
        elif _titled_single(x) and y.first is not None and y.last is not None and _fold(x.last) == _fold(y.first):
            # "Miss Elizabeth" addresses Elizabeth Bennet by her given name
            rules.append("L1")
        if (
            x.first is None
            and x.last is not None
            and y.last is not None
            and _fold(x.last) == _fold(y.last)
            and not self.gender_conflict(x, y)
        ):
            rules.append("L2")
        if x.first is not None and y.first is not None and self.is_hypocorism(x.first, y.first):
            rules.append("L3")
        xt, yt = x.tokens, y.tokens
        if len(xt) < len(yt) and any(yt[i:i + len(xt)] == xt for i in range(len(yt) - len(xt) + 1)):
            rules.append("L4")
        return rules

    @staticmethod
    def gender_conflict(x: HumanName, y: HumanName) -> bool:
        return x.gender is not None and y.gender is not None and x.gender != y.gender

    def cannot_link(self, x: HumanName, y: HumanName) -> bool:
        if self.gender_conflict(x, y):
            return True
        if x.last is not None and y.last is not None and _fold(x.last) != _fold(y.last):
            # a titled single token may be a given name ("Miss Elizabeth" vs "Elizabeth Bennet")
            if not (self._titled_given(x, y) or self._titled_given(y, x)):
                return True
        if x.first is not None and y.first is not None and not self.compatible_firsts(x.first, y.first):
            # a bare single token may be a surname ("Darcy" vs "Fitzwilliam Darcy")
            if not (self._bare_surname(x, y) or self._bare_surname(y, x)):
                return True
        return False

    @staticmethod
    def _bare_surname(x: HumanName, y: HumanName) -> bool:
        return x.title is None and x.last is None and y.last is not None and _fold(x.first) == _fold(y.last)

    def _titled_given(self, x: HumanName, y: HumanName) -> bool:
        return _titled_single(x) and y.first is not None and self.compatible_firsts(x.last, y.first)


def _titled_single(x: HumanName) -> bool:
    return x.title is not None and x.first is None and x.last is not None


def _specificity(x: HumanName) -> tuple[int, int, bool]:
    return (int(x.first is not None) + int(x.last is not None), len(x.middle), x.title is not None)


def _canonical(counts: Counter) -> str:
    best = max(counts.values())
    top = [name for name, c in counts.items() if c == best]
    longest = max(len(n) for n in top)
    return min(n for n in top if len(n) == longest)


def _build_characters(groups: Iterable[list[EntityMention]], min_appearance: int) -> list[Character]:
    kept = [sorted(g) for g in groups if len(g) >= min_appearance and g]
    kept.sort(key=lambda g: (g[0].first_token, g[0].last_token))
    out = []
    for i, group in enumerate(kept):
        counts = Counter(m.surface for m in group)
        out.append(Character(i, frozenset(counts), _canonical(counts), tuple(group)))
    return out


def unify_naive(mentions: Sequence[EntityMention], min_appearance: int = DEFAULT_MIN_APPEARANCE) -> list[Character]:
    groups: dict[str, list[EntityMention]] = defaultdict(list)
    for m in mentions:
        groups[m.surface.casefold()].append(m)
    return _build_characters(groups.values(), min_appearance)


# link edges are merged strongest-first
_RULE_PRIORITY = {"L4": 0, "L3": 1, "L1": 2, "L2": 3, "coref": 4}


def link_variants(
    variants: Sequence[str],
    hypocorisms: Mapping[str, Iterable[str]],
    honorifics: Iterable[str] | None = None,
    gendered_titles: Mapping[str, str] | None = None,
    coref_groups: Iterable[Iterable[str]] = (),
    given_names: Mapping[str, str] | None = None,
) -> list[frozenset[str]]:
    """Partition name variants into characters.

    ``variants`` may repeat; repetition counts decide the merge order among
    links of equal strength. Returns one frozenset of variants per character. Every pair inside a set
    satisfies the cannot-link rules; variants pulled towards incompatible
    groups are left on their own.
    """
    honorifics = frozenset(resources.load_honorifics() if honorifics is None else honorifics)
    gendered_titles = resources.load_gendered_titles() if gendered_titles is None else gendered_titles
    rules = _NameRules(hypocorisms)
    frequency = Counter(variants)
    names = sorted(frequency)
    parsed = {v: parse_human_name(v, honorifics, gendered_titles, given_names) for v in names}
    usable = [v for v in names if parsed[v].parseable]

    cannot: set[tuple[str, str]] = set()
    edges: dict[tuple[str, str], int] = {}

    def add_edge(a: str, b: str, rule: str) -> None:
        key = (a, b) if a < b else (b, a)
        prio = _RULE_PRIORITY[rule]
        if key not in edges or prio < edges[key]:
            edges[key] = prio

    for a, b in itertools.combinations(usable, 2):
        x, y = parsed[a], parsed[b]
        if rules.cannot_link(x, y):
            cannot.add((a, b))
            continue
        for rule in rules.links(x, y) + rules.links(y, x):
            add_edge(a, b, rule)

    for group in coref_groups:
        members = sorted({v for v in group if v in parsed and parsed[v].parseable})
        for a, b in itertools.combinations(members, 2):
            if (a, b) not in cannot:
                add_edge(a, b, "coref")

    def conflict(a: str, b: str) -> bool:
        return ((a, b) if a < b else (b, a)) in cannot

    neighbours: dict[str, set[str]] = defaultdict(set)
    for a, b in edges:
        neighbours[a].add(b)
        neighbours[b].add(a)

    parent = {v: v for v in names}
    members = {v: {v} for v in names}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    # merge strongest links first, and among equals the best attested ones,
    # refusing any merge that joins a cannot-link pair
    def order(item):
        (a, b), prio = item
        return prio, -(frequency[a] + frequency[b]), a, b

    blocked = []
    for (a, b), _prio in sorted(edges.items(), key=order):
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if any(conflict(p, q) for p in members[ra] for q in members[rb]):
            blocked.append((a, b))
            continue
        if ra > rb:
            ra, rb = rb, ra
        parent[rb] = ra
        members[ra] |= members.pop(rb)

    # the less specific end of a refused link is ambiguous when its links
    # reach two groups; it is detached and kept as a singleton
    def reach(v: str) -> set[str]:
        out = {find(n) for n in neighbours[v]}
        if len(members[find(v)]) > 1:
            out.add(find(v))
        return out

    ambiguous: set[str] = set()
    for a, b in blocked:
        sa, sb = _specificity(parsed[a]), _specificity(parsed[b])
        for v in ([a] if sa < sb else [b] if sb < sa else [a, b]):
            if len(reach(v)) > 1:
                ambiguous.add(v)

    groups: dict[str, set[str]] = defaultdict(set)
    for v in names:
        groups[find(v)].add(v)
    out: list[frozenset[str]] = []
    for vs in groups.values():
        inner = vs - ambiguous
        if len(inner) < len(vs):
            out.extend(frozenset({v}) for v in vs & ambiguous)
            out.extend(_components(inner, edges, ambiguous))
        else:
            out.append(frozenset(vs))
    return sorted(out, key=lambda s: sorted(s))


def _components(vertices: set[str], edges: Mapping[tuple[str, str], int], ambiguous: set[str]) -> list[frozenset[str]]:
    adj: dict[str, set[str]] = {v: set() for v in vertices}
    for a, b in edges:
        if a in adj and b in adj and a not in ambiguous and b not in ambiguous:
            adj[a].add(b)
            adj[b].add(a)
    seen: set[str] = set()
    out = []
    for v in sorted(vertices):
        if v in seen:
            continue
        comp = set()
        stack = [v]
        while stack:
            u = stack.pop()
            if u in comp:
                continue
            comp.add(u)
            stack.extend(adj[u] - comp)
        seen |= comp
        out.append(frozenset(comp))
    return out


def unify_graph_rules(
    mentions: Sequence[EntityMention],
    min_appearance: int = DEFAULT_MIN_APPEARANCE,
    hypocorisms: Mapping[str, Iterable[str]] | None = None,
    gendered_titles: Mapping[str, str] | None = None,
    honorifics: Iterable[str] | None = None,
    corefs: Sequence[CorefChain] | None = None,
    given_names: Mapping[str, str] | None = None,
) -> list[Character]:
    if hypocorisms is None:
        raise MissingResource("a hypocorism table is required for graph-rules unification")
    by_span = {m.span: m for m in mentions}
    coref_groups = []
    for chain in corefs or ():
        coref_groups.append([by_span[s].surface for s in chain.mentions if s in by_span])

    partition = link_variants(
        [m.surface for m in mentions],
        hypocorisms,
        honorifics=honorifics,
        gendered_titles=gendered_titles,
        coref_groups=coref_groups,
        given_names=given_names,
    )
    group_of = {v: i for i, vs in enumerate(partition) for v in vs}
    groups: dict[int, list[EntityMention]] = defaultdict(list)
    for m in mentions:
        groups[group_of[m.surface]].append(m)
    return _build_characters(groups.values(), min_appearance)


def character_of_mentions(characters: Iterable[Character]) -> dict[tuple[int, int], Character]:
    """Map each mention span to the character it belongs to."""
    return {m.span: c for c in characters for m in c.mentions}


class NaiveCharacterUnifier(PipelineStep):
    name = "naive_unifier"

    def __init__(self, min_appearance: int = DEFAULT_MIN_APPEARANCE):
        self.min_appearance = min_appearance

    def needs(self):
        return {ArtifactKey.ENTITIES}

    def production(self):
        return {ArtifactKey.CHARACTERS}

    def __call__(self, language, entities):
        return {ArtifactKey.CHARACTERS: tuple(unify_naive(entities, self.min_appearance))}


class GraphRulesCharacterUnifier(PipelineStep):
    name = "graph_rules_unifier"

    def __init__(
        self,
        min_appearance: int = DEFAULT_MIN_APPEARANCE,
        hypocorisms: Mapping[str, Iterable[str]] | None = None,
        gendered_titles: Mapping[str, str] | None = None,
        honorifics: Iterable[str] | None = None,
        given_names: Mapping[str, str] | None = None,
    ):
        self.min_appearance = min_appearance
        self.hypocorisms = hypocorisms
        self.given_names = given_names
        self.gendered_titles = gendered_titles
        self.honorifics = frozenset(honorifics) if honorifics is not None else None

    def needs(self):
        return {ArtifactKey.ENTITIES}

    def optional_needs(self):
        return {ArtifactKey.COREFS}

    def production(self):
        return {ArtifactKey.CHARACTERS}

    def supported_langs(self):
        return {"eng", "fra"}

    def __call__(self, language, entities, corefs=None):
        hypocorisms = self.hypocorisms
        if hypocorisms is None:
            try:
                hypocorisms = resources.load_hypocorisms(language)
            except resources.ResourceNotFound:
                raise MissingResource(f"no hypocorism table for language {language!r}") from None
        characters = unify_graph_rules(
            entities,
            self.min_appearance,
            hypocorisms=hypocorisms,
            gendered_titles=self.gendered_titles,
            honorifics=self.honorifics,
            corefs=corefs,
            given_names=self.given_names if self.given_names is not None else resources.load_given_names(language),
        )
        return {ArtifactKey.CHARACTERS: tuple(characters)}
