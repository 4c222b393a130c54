"""Shipped word lists and tables, overridable through a resource directory.

Set ``CHARNET_RESOURCES`` to a directory holding files with the same names
as the shipped ones to replace them (missing files fall back to the shipped
copies).
"""
from __future__ import annotations

import os
from functools import lru_cache
from importlib import resources as _ilr
from pathlib import Path

ENV_VAR = "CHARNET_RESOURCES"

ABBREVIATIONS = "abbreviations.txt"
HONORIFICS = "honorifics.txt"
GENDERED_TITLES = "gendered_titles.tsv"
SPEECH_VERBS = "speech_verbs.txt"
STOPWORDS = "capitalized_stopwords.txt"


def gazetteer_file(language: str) -> str:
    return f"gazetteer_{language}.txt"


def hypocorisms_file(language: str) -> str:
    return f"hypocorisms_{language}.tsv"


def given_names_file(language: str) -> str:
    return f"given_names_{language}.tsv"


class ResourceNotFound(FileNotFoundError):
    pass


def locate(name: str) -> Path:
    """Find a resource file, looking in ``$CHARNET_RESOURCES`` first."""
    override = os.environ.get(ENV_VAR)
    if override:
        candidate = Path(override) / name
        if candidate.is_file():
            return candidate
    shipped = _ilr.files(__name__) / name
    if shipped.is_file():
        return Path(str(shipped))
    raise ResourceNotFound(name)


def read_lines(path: str | os.PathLike) -> list[str]:
    """Non-empty, non-comment lines of a UTF-8 text file, stripped."""
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(line)
    return out


def read_word_list(path: str | os.PathLike) -> frozenset[str]:
    return frozenset(read_lines(path))


def read_hypocorisms(path: str | os.PathLike) -> dict[str, frozenset[str]]:
    """Parse ``nickname<TAB>fullname[,fullname...]`` records."""
    table: dict[str, set[str]] = {}
    for lineno, line in enumerate(_raw_lines(path), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected nickname<TAB>fullnames")
        nick, fulls = parts[0].strip(), [p.strip() for p in parts[1].split(",") if p.strip()]
        table.setdefault(nick, set()).update(fulls)
    return {k: frozenset(v) for k, v in table.items()}


def read_gendered_titles(path: str | os.PathLike) -> dict[str, str]:
    """Parse ``title<TAB>gender`` records (also used for ``name<TAB>gender``)."""
    table = {}
    for lineno, line in enumerate(_raw_lines(path), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected title<TAB>gender")
        table[parts[0].strip()] = parts[1].strip()
    return table


def _raw_lines(path):
    with open(path, encoding="utf-8") as f:
        yield from f


@lru_cache(maxsize=None)
def _cached(name: str, override: str | None):
    return locate(name)


def _path(name: str) -> Path:
    return _cached(name, os.environ.get(ENV_VAR))


def load_abbreviations() -> frozenset[str]:
    return read_word_list(_path(ABBREVIATIONS))


def load_honorifics() -> frozenset[str]:
    return read_word_list(_path(HONORIFICS))


def load_speech_verbs() -> frozenset[str]:
    return read_word_list(_path(SPEECH_VERBS))


def load_stopwords() -> frozenset[str]:
    return read_word_list(_path(STOPWORDS))


def load_gendered_titles() -> dict[str, str]:
    return read_gendered_titles(_path(GENDERED_TITLES))


def load_gazetteer(language: str = "eng") -> frozenset[str]:
    try:
        return read_word_list(_path(gazetteer_file(language)))
    except ResourceNotFound:
        return frozenset()


def load_hypocorisms(language: str = "eng") -> dict[str, frozenset[str]]:
    """Raises :class:`ResourceNotFound` when no table exists for ``language``."""
    return read_hypocorisms(_path(hypocorisms_file(language)))


def load_given_names(language: str = "eng") -> dict[str, str]:
    """Given name -> gender; empty when no table exists for ``language``."""
    try:
        return read_gendered_titles(_path(given_names_file(language)))
    except ResourceNotFound:
        return {}
