"""Text normalization and tokenization.

Tokens keep character offsets into the (possibly substituted) text so that
every downstream span can be mapped back to the source.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from charnet import resources
from charnet.pipeline import ArtifactKey, PipelineStep


class InvalidPattern(ValueError):
    pass


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class SentenceSpan:
    first_token: int
    last_token: int


_GROUP_REF = re.compile(r"\\g<([^>]*)>|\\(\d{1,2})")


@dataclass(frozen=True)
class SubstitutionRule:
    pattern: str
    replacement: str
    regex: bool = True

    def compile(self) -> re.Pattern:
        source = self.pattern if self.regex else re.escape(self.pattern)
        try:
            compiled = re.compile(source)
        except re.error as exc:
            raise InvalidPattern(f"cannot compile {self.pattern!r}: {exc}") from exc
        if self.regex:
            for name, number in _GROUP_REF.findall(self.replacement):
                ref = name or number
                if ref.isdigit():
                    ok = int(ref) <= compiled.groups
                else:
                    ok = ref in compiled.groupindex
                if not ok:
                    raise InvalidPattern(
                        f"replacement {self.replacement!r} references unknown group {ref!r}"
                    )
        return compiled


def apply_substitutions(text: str, rules: Sequence[SubstitutionRule]) -> str:
    """Apply ``rules`` in order, each one globally."""
    compiled = [(rule.compile(), rule) for rule in rules]
    for pattern, rule in compiled:
        if rule.regex:
            text = pattern.sub(rule.replacement, text)
        else:
            text = pattern.sub(lambda _m, r=rule.replacement: r, text)
    return text


# --- tokenization -----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<word>[^\W_]+(?:['’\-][^\W_]+)*)   # words, with internal hyphens/apostrophes
    | (?P<dash>-{2,}|[—–])
    | (?P<ellipsis>\.{3,}|…)
    | (?P<other>\S)
    """,
    re.VERBOSE,
)
_POSSESSIVE = re.compile(r"^(.+?)(['’][sS])$")

QUOTE_CHARS = frozenset('"“”‘’«»„‟')
_OPENERS = frozenset('"“‘«„‟([')
_CLOSERS = frozenset('"”’»)]')
_TERMINALS = frozenset({".", "!", "?", "…", "...", "?!", "!?"})
_PARAGRAPH_BREAK = re.compile(r"\n[ \t\r\f\v]*\n")


def _raw_tokens(text: str, abbreviations: frozenset[str]) -> list[tuple[str, int, int]]:
    out: list[tuple[str, int, int]] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.search(text, pos)
        if m is None:
            break
        start, end = m.span()
        if m.lastgroup == "word":
            # abbreviation such as "Mr." keeps its period
            if end < n and text[end] == "." and text[start:end + 1].lower() in abbreviations:
                out.append((text[start:end + 1], start, end + 1))
                pos = end + 1
                continue
            word = text[start:end]
            poss = _POSSESSIVE.match(word)
            if poss:
                cut = start + len(poss.group(1))
                out.append((poss.group(1), start, cut))
                out.append((text[cut:end], cut, end))
            else:
                out.append((word, start, end))
        else:
            out.append((text[start:end], start, end))
        pos = end
    return out


def tokenize(
    text: str,
    language: str = "eng",
    abbreviations: Iterable[str] | None = None,
) -> tuple[list[Token], list[SentenceSpan]]:
    """Split ``text`` into tokens and sentences.

    Sentence boundaries follow terminal punctuation (plus any closing quotes or
    brackets right after it) when the next token does not start lowercase, and
    every paragraph break. Abbreviations never end a sentence by themselves.
    """
    if abbreviations is None:
        abbreviations = resources.load_abbreviations()
    abbrevs = frozenset(a.lower() for a in abbreviations)

    raw = _raw_tokens(text, abbrevs)
    tokens = [Token(i, t, s, e) for i, (t, s, e) in enumerate(raw)]
    if not tokens:
        return [], []

    sentences: list[SentenceSpan] = []
    first = 0
    i = 0
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        boundary = False
        last = i
        if tok.text in _TERMINALS:
            # absorb closing quotes/brackets glued to the terminal mark
            while last + 1 < n and tokens[last + 1].text in _CLOSERS and tokens[last + 1].start == tokens[last].end:
                last += 1
            if last + 1 >= n:
                boundary = True
            else:
                nxt = tokens[last + 1].text
                boundary = not nxt[0].islower()
        if last + 1 < n and _PARAGRAPH_BREAK.search(text, tokens[last].end, tokens[last + 1].start):
            boundary = True
        if boundary or last + 1 >= n:
            sentences.append(SentenceSpan(first, last))
            first = last + 1
        i = last + 1
    return tokens, sentences


class CustomSubstitutionPreprocessor(PipelineStep):
    name = "substitution_preprocessor"

    def __init__(self, rules: Sequence[SubstitutionRule | tuple[str, str]] = ()):
        self.rules = tuple(r if isinstance(r, SubstitutionRule) else SubstitutionRule(*r) for r in rules)
        for rule in self.rules:
            rule.compile()

    def needs(self):
        return {ArtifactKey.TEXT}

    def production(self):
        return {ArtifactKey.TEXT}

    def __call__(self, language, text):
        return {ArtifactKey.TEXT: apply_substitutions(text, self.rules)}


class Tokenizer(PipelineStep):
    name = "tokenizer"

    def __init__(self, abbreviations: Iterable[str] | None = None):
        self.abbreviations = frozenset(abbreviations) if abbreviations is not None else None

    def needs(self):
        return {ArtifactKey.TEXT}

    def production(self):
        return {ArtifactKey.TOKENS, ArtifactKey.SENTENCES}

    def __call__(self, language, text):
        tokens, sentences = tokenize(text, language, self.abbreviations)
        return {ArtifactKey.TOKENS: tuple(tokens), ArtifactKey.SENTENCES: tuple(sentences)}
