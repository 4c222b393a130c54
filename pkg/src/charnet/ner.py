"""Rule-based person-name recognition and BIO tag conversion."""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from charnet import resources
from charnet.pipeline import ArtifactKey, PipelineStep


class LengthMismatch(ValueError):
    pass


class BioTag(str, enum.Enum):
    B_PER = "B-PER"
    I_PER = "I-PER"
    O = "O"


@dataclass(frozen=True, order=True)
class EntityMention:
    first_token: int
    last_token: int
    surface: str = ""
    label: str = "PER"

    @property
    def span(self) -> tuple[int, int]:
        return (self.first_token, self.last_token)

    def __len__(self) -> int:
        return self.last_token - self.first_token + 1


def surface_of(tokens: Sequence, first: int, last: int) -> str:
    return " ".join(t.text for t in tokens[first:last + 1])


# punctuation after which a capital letter carries no evidence
_WEAK_PREDECESSORS = frozenset('"“‘«([—–:.!?…') | {"--", "...", "'", "’"}


def _is_namelike(text: str, stopwords: frozenset[str]) -> bool:
    if not text[0].isalpha() or not text[0].isupper():
        return False
    if len(text) > 1 and text.isupper():
        return False
    return text not in stopwords


@dataclass(frozen=True)
class _Candidate:
    start: int          # first token, honorific included
    name_start: int     # first token after the honorific prefix
    end: int            # last token (inclusive)


def _candidates(tokens, sentences, honorifics, stopwords, lower_vocab):
    out = []
    for sent in sentences:
        i = sent.first_token
        last = sent.last_token
        while i <= last:
            j = i
            while j <= last and tokens[j].text in honorifics:
                j += 1
            k = j
            while k <= last and tokens[k].text not in honorifics and _is_namelike(tokens[k].text, stopwords):
                k += 1
            if k == j:
                i = max(j, i + 1)
                continue
            prev = tokens[i - 1].text if i > sent.first_token else None
            weak = prev is None or prev in _WEAK_PREDECESSORS
            start, name_start = i, j
            # a forced capital on an ordinary word ("Poor Jane") is not part of the name
            if weak and start == name_start and k - j > 1 and tokens[j].text.lower() in lower_vocab:
                start = name_start = j + 1
            out.append(_Candidate(start, name_start, k - 1))
            i = k
    return out


def recognize_entities(
    tokens: Sequence,
    sentences: Sequence,
    gazetteer: Iterable[str] | None = None,
    honorifics: Iterable[str] | None = None,
    stopwords: Iterable[str] | None = None,
    min_recurrence: int = 2,
    max_length: int = 8,
    lowercase_veto: bool = True,
) -> list[EntityMention]:
    """Tag maximal runs of capitalized tokens as person mentions.

    A run is kept when one of its tokens is in ``gazetteer``, when it follows
    an honorific (kept inside the mention), or when the same name recurs at
    least ``min_recurrence`` times in the text. The recurrence rule is vetoed
    for names whose lowercase form also appears in the text.
    """
    gazetteer = frozenset(resources.load_gazetteer() if gazetteer is None else gazetteer)
    honorifics = frozenset(resources.load_honorifics() if honorifics is None else honorifics)
    stopwords = frozenset(resources.load_stopwords() if stopwords is None else stopwords)

    lower_vocab = {t.text for t in tokens if t.text[:1].islower()} if lowercase_veto else set()
    cands = _candidates(tokens, sentences, honorifics, stopwords, lower_vocab)

    def name_of(c: _Candidate) -> tuple[str, ...]:
        return tuple(tokens[x].text for x in range(c.name_start, c.end + 1))

    counts = Counter(name_of(c) for c in cands)

    def recurring(name: tuple[str, ...]) -> bool:
        if counts[name] < min_recurrence:
            return False
        if lowercase_veto and all(t.lower() in lower_vocab for t in name):
            return False
        return True

    mentions = []
    for c in cands:
        if c.end - c.start + 1 > max_length:
            continue
        name = name_of(c)
        by_gazetteer = any(t in gazetteer for t in name)
        by_title = c.start < c.name_start
        if by_gazetteer or by_title or recurring(name):
            mentions.append(EntityMention(c.start, c.end, surface_of(tokens, c.start, c.end)))
    return mentions


def encode_bio(mentions: Iterable[EntityMention], n_tokens: int) -> list[BioTag]:
    tags = [BioTag.O] * n_tokens
    for m in mentions:
        if not 0 <= m.first_token <= m.last_token < n_tokens:
            raise ValueError(f"mention {m.span} outside 0..{n_tokens - 1}")
        tags[m.first_token] = BioTag.B_PER
        for i in range(m.first_token + 1, m.last_token + 1):
            tags[i] = BioTag.I_PER
    return tags


def decode_bio(tags: Sequence[BioTag | str], tokens: Sequence) -> list[EntityMention]:
    """Decode person spans; an ``I-PER`` with nothing to continue opens a new span."""
    if len(tags) != len(tokens):
        raise LengthMismatch(f"{len(tags)} tags for {len(tokens)} tokens")
    spans = []
    start = None
    for i, tag in enumerate(tags):
        tag = tag.value if isinstance(tag, BioTag) else str(tag)
        if tag == "B-PER" or (tag == "I-PER" and start is None):
            if start is not None:
                spans.append((start, i - 1))
            start = i
        elif tag == "I-PER":
            continue
        else:
            if start is not None:
                spans.append((start, i - 1))
            start = None
    if start is not None:
        spans.append((start, len(tags) - 1))
    return [EntityMention(a, b, surface_of(tokens, a, b)) for a, b in spans]


class NamedEntityRecognizer(PipelineStep):
    name = "ner"

    def __init__(
        self,
        gazetteer: Iterable[str] | None = None,
        honorifics: Iterable[str] | None = None,
        min_recurrence: int = 2,
        max_length: int = 8,
        lowercase_veto: bool = True,
    ):
        self.gazetteer = frozenset(gazetteer) if gazetteer is not None else None
        self.honorifics = frozenset(honorifics) if honorifics is not None else None
        self.min_recurrence = min_recurrence
        self.max_length = max_length
        self.lowercase_veto = lowercase_veto

    def needs(self):
        return {ArtifactKey.TOKENS, ArtifactKey.SENTENCES}

    def production(self):
        return {ArtifactKey.ENTITIES}

    def supported_langs(self):
        return {"eng"}

    def __call__(self, language, tokens, sentences):
        gazetteer = self.gazetteer if self.gazetteer is not None else resources.load_gazetteer(language)
        mentions = recognize_entities(
            tokens,
            sentences,
            gazetteer=gazetteer,
            honorifics=self.honorifics,
            min_recurrence=self.min_recurrence,
            max_length=self.max_length,
            lowercase_veto=self.lowercase_veto,
        )
        return {ArtifactKey.ENTITIES: tuple(mentions)}
