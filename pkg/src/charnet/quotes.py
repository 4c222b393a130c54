"""Quotation detection and heuristic speaker attribution."""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Sequence

from charnet import resources
from charnet.ner import EntityMention
from charnet.pipeline import ArtifactKey, PipelineStep

QUOTE_PAIRS = {"“": "”", "‘": "’", "«": "»", '"': '"'}
_CLOSERS = {close: open_ for open_, close in QUOTE_PAIRS.items()}

DEFAULT_MAX_QUOTE_LENGTH = 500
DEFAULT_WINDOW = 10
DEFAULT_CONVERSATION_GAP = 100

METHODS = ("trailing-said", "leading-said", "nearest", "alternation", "none")


@dataclass(frozen=True)
class Quote:
    first_token: int
    last_token: int
    open_mark: str
    close_mark: str

    @property
    def span(self) -> tuple[int, int]:
        return (self.first_token, self.last_token)


@dataclass(frozen=True)
class SpeakerAttribution:
    quote_index: int
    mention: EntityMention | None
    method: str = "none"


def detect_quotes(tokens: Sequence, max_length: int = DEFAULT_MAX_QUOTE_LENGTH) -> list[Quote]:
    """Pair quote delimiters into non-overlapping quotes.

    Curly quotes and guillemets are matched with one stack per pair type.
    Straight double quotes open and close alternately. Unclosed openings are
    dropped, as are quotes longer than ``max_length`` tokens and quotes nested
    in (or crossing) an earlier one.
    """
    stacks: dict[str, list[int]] = {open_: [] for open_ in QUOTE_PAIRS if open_ != '"'}
    straight_open: int | None = None
    pairs: list[tuple[int, int, str, str]] = []
    for tok in tokens:
        mark = tok.text
        if mark == '"':
            if straight_open is None:
                straight_open = tok.index
            else:
                pairs.append((straight_open, tok.index, '"', '"'))
                straight_open = None
        elif mark in stacks:
            stacks[mark].append(tok.index)
        elif mark in _CLOSERS:
            stack = stacks[_CLOSERS[mark]]
            if stack:
                pairs.append((stack.pop(), tok.index, _CLOSERS[mark], mark))

    pairs.sort()
    quotes: list[Quote] = []
    last_end = -1
    for first, last, open_mark, close_mark in pairs:
        if last - first + 1 > max_length or first <= last_end:
            continue
        quotes.append(Quote(first, last, open_mark, close_mark))
        last_end = last
    return quotes


def segment_conversations(quotes: Sequence[Quote], gap: int = DEFAULT_CONVERSATION_GAP) -> list[list[int]]:
    """Group quote indices into conversations: consecutive quotes at most ``gap`` tokens apart."""
    groups: list[list[int]] = []
    for i, q in enumerate(quotes):
        if groups and q.first_token - quotes[groups[-1][-1]].last_token <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _speaker_key(mention: EntityMention) -> str:
    return mention.surface.casefold()


def attribute_speakers(
    quotes: Sequence[Quote],
    mentions: Sequence[EntityMention],
    sentences: Sequence | None = None,
    window: int = DEFAULT_WINDOW,
    speech_verbs: Iterable[str] | None = None,
    conversation_gap: int = DEFAULT_CONVERSATION_GAP,
    tokens: Sequence | None = None,
) -> list[SpeakerAttribution]:
    """Attribute each quote to a person mention outside it.

    Rules, tried in order: a speech verb after the quote with a mention next
    to it; the same before the quote; the nearest mention within ``window``
    tokens; and finally, in a two-party exchange A, B, the speaker A again.
    Searches never cross into a neighbouring quote. ``tokens`` is needed for
    the speech-verb rules; without it only proximity and alternation apply.
    """
    verbs = frozenset(v.lower() for v in (resources.load_speech_verbs() if speech_verbs is None else speech_verbs))
    mentions = sorted(mentions, key=lambda m: m.first_token)
    by_start = {m.first_token: m for m in mentions}
    by_end = {m.last_token: m for m in mentions}
    starts = [m.first_token for m in mentions]

    def mentions_between(lo: int, hi: int) -> list[EntityMention]:
        i = bisect.bisect_left(starts, lo)
        out = []
        while i < len(mentions) and mentions[i].first_token <= hi:
            if mentions[i].last_token <= hi:
                out.append(mentions[i])
            i += 1
        return out

    def verb_adjacent(positions: Iterable[int], lo: int, hi: int) -> EntityMention | None:
        if tokens is None:
            return None
        for p in positions:
            if tokens[p].text.lower() not in verbs:
                continue
            after = by_start.get(p + 1)
            if after is not None and after.last_token <= hi:
                return after
            before = by_end.get(p - 1)
            if before is not None and before.first_token >= lo:
                return before
        return None

    results: list[SpeakerAttribution | None] = [None] * len(quotes)
    for qi, q in enumerate(quotes):
        # search areas stop at neighbouring quotes
        lo_after = q.last_token + 1
        hi_after = q.last_token + window
        if qi + 1 < len(quotes):
            hi_after = min(hi_after, quotes[qi + 1].first_token - 1)
        if tokens is not None:
            hi_after = min(hi_after, len(tokens) - 1)
        hi_before = q.first_token - 1
        lo_before = max(0, q.first_token - window)
        if qi > 0:
            lo_before = max(lo_before, quotes[qi - 1].last_token + 1)

        found = verb_adjacent(range(lo_after, hi_after + 1), lo_after, hi_after)
        if found is not None:
            results[qi] = SpeakerAttribution(qi, found, "trailing-said")
            continue
        found = verb_adjacent(range(hi_before, lo_before - 1, -1), lo_before, hi_before)
        if found is not None:
            results[qi] = SpeakerAttribution(qi, found, "leading-said")
            continue
        candidates = []
        for m in mentions_between(lo_after, hi_after):
            candidates.append((m.first_token - q.last_token, 0, m))
        for m in mentions_between(lo_before, hi_before):
            candidates.append((q.first_token - m.last_token, 1, m))
        if candidates:
            _, _, m = min(candidates, key=lambda c: (c[0], c[1]))
            results[qi] = SpeakerAttribution(qi, m, "nearest")

    for conversation in segment_conversations(quotes, conversation_gap):
        for pos, qi in enumerate(conversation):
            if results[qi] is not None:
                continue
            if pos >= 2:
                a = results[conversation[pos - 2]]
                b = results[conversation[pos - 1]]
                if a is not None and b is not None and _speaker_key(a.mention) != _speaker_key(b.mention):
                    results[qi] = SpeakerAttribution(qi, a.mention, "alternation")
                    continue
            results[qi] = SpeakerAttribution(qi, None, "none")
    return results  # type: ignore[return-value]


class QuoteDetector(PipelineStep):
    name = "quote_detector"

    def __init__(self, max_length: int = DEFAULT_MAX_QUOTE_LENGTH):
        self.max_length = max_length

    def needs(self):
        return {ArtifactKey.TOKENS}

    def production(self):
        return {ArtifactKey.QUOTES}

    def __call__(self, language, tokens):
        return {ArtifactKey.QUOTES: tuple(detect_quotes(tokens, self.max_length))}


class SpeakerDetector(PipelineStep):
    name = "speaker_detector"

    def __init__(
        self,
        window: int = DEFAULT_WINDOW,
        speech_verbs: Iterable[str] | None = None,
        conversation_gap: int = DEFAULT_CONVERSATION_GAP,
    ):
        self.window = window
        self.speech_verbs = frozenset(speech_verbs) if speech_verbs is not None else None
        self.conversation_gap = conversation_gap

    def needs(self):
        return {ArtifactKey.TOKENS, ArtifactKey.QUOTES, ArtifactKey.ENTITIES}

    def optional_needs(self):
        return {ArtifactKey.SENTENCES}

    def production(self):
        return {ArtifactKey.SPEAKERS}

    def supported_langs(self):
        return {"eng"}

    def __call__(self, language, tokens, quotes, entities, sentences=None):
        attributions = attribute_speakers(
            quotes,
            entities,
            sentences,
            window=self.window,
            speech_verbs=self.speech_verbs,
            conversation_gap=self.conversation_gap,
            tokens=tokens,
        )
        return {ArtifactKey.SPEAKERS: tuple(attributions)}
