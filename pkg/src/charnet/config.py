"""Run configuration files and the step registry.

A run configuration is a YAML document mirroring a Python pipeline
definition one-to-one::

    version: 1
    input: my_doc.txt
    language: eng
    steps:
      - tokenizer
      - ner
      - name: graph_rules_unifier
        options: {min_appearance: 10}
      - name: cooccurrence_extractor
        options: {co_occurrences_dist: 10, dynamic: false}
    inject:                 # optional, artifact key -> injection file
      corefs: my_doc.corefs.tsv
    output:
      format: gexf          # gexf | graphml | dot | json
      path: my_doc.gexf
      styled: true
      state: my_doc.state.json   # optional full pipeline state dump
    resources: ./resources  # optional override directory

Relative paths are resolved against the configuration file's directory.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

import yaml

from charnet import resources
from charnet.graph_extraction import CoOccurrencesGraphExtractor, ConversationalGraphExtractor
from charnet.ner import NamedEntityRecognizer
from charnet.pipeline import ArtifactKey, Pipeline, PipelineStep, as_key
from charnet.preprocessing import CustomSubstitutionPreprocessor, SubstitutionRule, Tokenizer
from charnet.quotes import QuoteDetector, SpeakerDetector
from charnet.unification import GraphRulesCharacterUnifier, NaiveCharacterUnifier

CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


def _word_list(path):
    return resources.read_word_list(path)


def _rules(value):
    rules = []
    for item in value:
        if isinstance(item, dict):
            rules.append(SubstitutionRule(item["pattern"], item.get("replacement", ""), bool(item.get("regex", True))))
        else:
            pattern, replacement = item
            rules.append(SubstitutionRule(pattern, replacement))
    return rules


@dataclass(frozen=True)
class StepSpec:
    cls: type[PipelineStep]
    options: dict[str, type | Callable]
    # options holding file paths, with the loader that turns them into data
    files: dict[str, Callable] = field(default_factory=dict)


STEPS: dict[str, StepSpec] = {
    "substitution_preprocessor": StepSpec(CustomSubstitutionPreprocessor, {"rules": _rules}),
    "tokenizer": StepSpec(Tokenizer, {}, {"abbreviations": _word_list}),
    "quote_detector": StepSpec(QuoteDetector, {"max_length": int}),
    "ner": StepSpec(
        NamedEntityRecognizer,
        {"min_recurrence": int, "max_length": int, "lowercase_veto": bool},
        {"gazetteer": _word_list, "honorifics": _word_list},
    ),
    "naive_unifier": StepSpec(NaiveCharacterUnifier, {"min_appearance": int}),
    "graph_rules_unifier": StepSpec(
        GraphRulesCharacterUnifier,
        {"min_appearance": int},
        {"hypocorisms": resources.read_hypocorisms, "gendered_titles": resources.read_gendered_titles,
         "given_names": resources.read_gendered_titles, "honorifics": _word_list},
    ),
    "speaker_detector": StepSpec(
        SpeakerDetector, {"window": int, "conversation_gap": int}, {"speech_verbs": _word_list}
    ),
    "cooccurrence_extractor": StepSpec(
        CoOccurrencesGraphExtractor,
        {"co_occurrences_dist": int, "dynamic": bool, "dynamic_window": int, "dynamic_overlap": int},
    ),
    "conversational_extractor": StepSpec(ConversationalGraphExtractor, {"conversation_gap": int, "pairing": str}),
}


@dataclass(frozen=True)
class StepConfig:
    name: str
    options: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class RunConfig:
    steps: tuple[StepConfig, ...]
    input_path: Path | None = None
    language: str = "eng"
    inject: dict[ArtifactKey, Path] = field(default_factory=dict)
    output_format: str = "gexf"
    output_path: Path | None = None
    styled: bool = True
    state_path: Path | None = None
    resources_dir: Path | None = None

    def with_overrides(self, **scalars) -> "RunConfig":
        return replace(self, **{k: v for k, v in scalars.items() if v is not None})

    def with_step_option(self, option: str, value: Any) -> "RunConfig":
        """Set ``option`` on every step that accepts it."""
        if value is None:
            return self
        steps = []
        for s in self.steps:
            spec = STEPS[s.name]
            if option in spec.options or option in spec.files:
                s = StepConfig(s.name, {**s.options, option: value})
            steps.append(s)
        return replace(self, steps=tuple(steps))


def _resolve(base: Path, value) -> Path | None:
    if value is None:
        return None
    p = Path(os.path.expanduser(str(value)))
    return p if p.is_absolute() else base / p


def parse_config(doc: Any, base_dir: str | os.PathLike = ".") -> RunConfig:
    base = Path(base_dir)
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    version = doc.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported configuration version {version!r} (expected {CONFIG_VERSION})")
    unknown = set(doc) - {"version", "input", "language", "steps", "inject", "output", "resources"}
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")

    steps = []
    for i, item in enumerate(doc.get("steps") or []):
        if isinstance(item, str):
            name, options = item, {}
        elif isinstance(item, dict) and "name" in item:
            name, options = item["name"], dict(item.get("options") or {})
        else:
            raise ConfigError(f"step {i}: expected a step name or a mapping with 'name'")
        if name not in STEPS:
            raise ConfigError(f"step {i}: unknown step {name!r} (known: {', '.join(STEPS)})")
        spec = STEPS[name]
        bad = set(options) - set(spec.options) - set(spec.files)
        if bad:
            raise ConfigError(f"step {i} ({name}): unknown options {', '.join(sorted(bad))}")
        for opt in spec.files:
            if opt in options:
                options[opt] = _resolve(base, options[opt])
        steps.append(StepConfig(name, options))

    inject = {}
    for key, path in (doc.get("inject") or {}).items():
        try:
            inject[as_key(key)] = _resolve(base, path)
        except KeyError as exc:
            raise ConfigError(f"inject: {exc.args[0]}") from None

    output = doc.get("output") or {}
    fmt = output.get("format", "gexf")
    return RunConfig(
        steps=tuple(steps),
        input_path=_resolve(base, doc.get("input")),
        language=str(doc.get("language", "eng")),
        inject=inject,
        output_format=fmt,
        output_path=_resolve(base, output.get("path")),
        styled=bool(output.get("styled", True)),
        state_path=_resolve(base, output.get("state")),
        resources_dir=_resolve(base, doc.get("resources")),
    )


def load_config(path: str | os.PathLike) -> RunConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            doc = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(doc, path.parent)


def build_step(step: StepConfig) -> PipelineStep:
    spec = STEPS[step.name]
    kwargs = {}
    for opt, value in step.options.items():
        try:
            if opt in spec.files:
                kwargs[opt] = spec.files[opt](value)
            else:
                kwargs[opt] = spec.options[opt](value)
        except (OSError, ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"{step.name}: option {opt!r}: {exc}") from exc
    try:
        return spec.cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{step.name}: {exc}") from exc


def build_pipeline(config: RunConfig) -> Pipeline:
    return Pipeline([build_step(s) for s in config.steps], lang=config.language)
