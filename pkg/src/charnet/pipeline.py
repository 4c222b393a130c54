"""Pipeline core: step signatures, state threading and pre-run validation.

A pipeline is an ordered list of steps. Each step declares the artifacts it
needs and the artifacts it produces, which lets a pipeline be checked before
any step runs.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

ANY_LANGUAGE = "any"
INJECTED = "injected"


class ArtifactKey(str, enum.Enum):
    TEXT = "text"
    TOKENS = "tokens"
    SENTENCES = "sentences"
    ENTITIES = "entities"
    COREFS = "corefs"
    QUOTES = "quotes"
    SPEAKERS = "speakers"
    CHARACTERS = "characters"
    CHARACTER_NETWORK = "character_network"

    def __str__(self) -> str:
        return self.value


def as_key(key: ArtifactKey | str) -> ArtifactKey:
    """Coerce a string to an :class:`ArtifactKey`, raising ``KeyError`` on unknown names."""
    if isinstance(key, ArtifactKey):
        return key
    try:
        return ArtifactKey(key)
    except ValueError:
        raise KeyError(f"unknown artifact key {key!r}") from None


class PipelineError(Exception):
    """Base class for pipeline failures."""


class ValidationError(PipelineError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(report.explain())


class StepError(PipelineError):
    def __init__(self, step_name: str, cause: BaseException | str):
        self.step_name = step_name
        self.cause = cause
        super().__init__(f"step {step_name!r} failed: {cause}")


class MalformedArtifact(PipelineError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingResource(PipelineError):
    pass


@dataclass(frozen=True)
class StepSignature:
    step_name: str
    needs: frozenset[ArtifactKey]
    produces: frozenset[ArtifactKey]
    optional_needs: frozenset[ArtifactKey] = frozenset()
    supported_languages: frozenset[str] = frozenset({ANY_LANGUAGE})

    def __post_init__(self):
        for name in ("needs", "produces", "optional_needs"):
            object.__setattr__(self, name, frozenset(as_key(k) for k in getattr(self, name)))
        object.__setattr__(self, "supported_languages", frozenset(self.supported_languages))
        if not self.produces:
            raise ValueError(f"step {self.step_name!r} must produce at least one artifact")
        if self.needs & self.optional_needs:
            raise ValueError(f"step {self.step_name!r}: optional needs overlap needs")

    def supports(self, language: str) -> bool:
        return ANY_LANGUAGE in self.supported_languages or language in self.supported_languages


@dataclass(frozen=True)
class Diagnostic:
    step_index: int
    step_name: str
    missing_keys: frozenset[ArtifactKey]
    language_mismatch: bool

    def explain(self, language: str | None = None) -> str:
        parts = []
        if self.missing_keys:
            missing = ", ".join(sorted(k.value for k in self.missing_keys))
            parts.append(f"missing {missing}")
        if self.language_mismatch:
            parts.append(f"language {language!r} not supported" if language else "language not supported")
        return f"step {self.step_index} ({self.step_name}): " + "; ".join(parts)


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...] = ()
    language: str = "eng"
    # available artifact set after each step, for display
    trace: tuple[tuple[str, frozenset[ArtifactKey]], ...] = ()

    @property
    def valid(self) -> bool:
        return not self.diagnostics

    def explain(self) -> str:
        if self.valid:
            return "pipeline is valid"
        lines = ["pipeline is invalid:"]
        lines.extend("  " + d.explain(self.language) for d in self.diagnostics)
        return "\n".join(lines)


def validate_pipeline(
    signatures: Sequence[StepSignature],
    language: str = "eng",
    injected: Iterable[ArtifactKey | str] = (),
) -> ValidationReport:
    """Simulate artifact availability across ``signatures``.

    Invalid pipelines are reported through the returned diagnostics, never
    raised.
    """
    available = {ArtifactKey.TEXT} | {as_key(k) for k in injected}
    diagnostics = []
    trace = [("<initial>", frozenset(available))]
    for index, sig in enumerate(signatures):
        missing = frozenset(sig.needs - available)
        mismatch = not sig.supports(language)
        if missing or mismatch:
            diagnostics.append(Diagnostic(index, sig.step_name, missing, mismatch))
        available |= sig.produces
        trace.append((sig.step_name, frozenset(available)))
    return ValidationReport(tuple(diagnostics), language, tuple(trace))


class PipelineStep:
    """Base class for pipeline steps.

    Subclasses set ``name``, declare their artifacts through :meth:`needs`,
    :meth:`production` (and optionally :meth:`optional_needs` and
    :meth:`supported_langs`) and implement :meth:`__call__`, which receives the
    declared artifacts as keyword arguments plus ``language`` and returns a
    mapping holding exactly the declared productions.
    """

    name = "step"

    def needs(self) -> set[ArtifactKey]:
        return set()

    def optional_needs(self) -> set[ArtifactKey]:
        return set()

    def production(self) -> set[ArtifactKey]:
        raise NotImplementedError

    def supported_langs(self) -> set[str]:
        return {ANY_LANGUAGE}

    def signature(self) -> StepSignature:
        return StepSignature(
            step_name=self.name,
            needs=frozenset(self.needs()),
            produces=frozenset(self.production()),
            optional_needs=frozenset(self.optional_needs()),
            supported_languages=frozenset(self.supported_langs()),
        )

    def __call__(self, language: str, **artifacts: Any) -> Mapping[str | ArtifactKey, Any]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


@dataclass
class PipelineState:
    language: str
    artifacts: dict[ArtifactKey, Any] = field(default_factory=dict)
    provenance: dict[ArtifactKey, str] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str, language: str = "eng") -> "PipelineState":
        return cls(language, {ArtifactKey.TEXT: text}, {ArtifactKey.TEXT: "text"})

    def set(self, key: ArtifactKey | str, value: Any, producer: str) -> None:
        key = as_key(key)
        self.artifacts[key] = value
        self.provenance[key] = producer

    def get(self, key: ArtifactKey | str, default: Any = None) -> Any:
        return self.artifacts.get(as_key(key), default)

    def __getitem__(self, key: ArtifactKey | str) -> Any:
        return self.artifacts[as_key(key)]

    def __contains__(self, key: object) -> bool:
        try:
            return as_key(key) in self.artifacts  # type: ignore[arg-type]
        except KeyError:
            return False

    # attribute access mirrors the artifact names: state.tokens, state.character_network
    def __getattr__(self, name: str) -> Any:
        if name.startswith("_") or name in ("language", "artifacts", "provenance"):
            raise AttributeError(name)
        try:
            key = ArtifactKey(name)
        except ValueError:
            raise AttributeError(name) from None
        return self.artifacts.get(key)


def inject_artifact(
    injected: Mapping[ArtifactKey | str, Any] | None,
    key: ArtifactKey | str,
    value: Any,
    tokens: Sequence | None = None,
) -> dict[ArtifactKey, Any]:
    """Return a copy of ``injected`` with ``value`` added under ``key``.

    The value is checked structurally now; spans are range-checked against
    ``tokens`` when given, otherwise once a step has produced tokens.
    """
    key = as_key(key)
    if key is ArtifactKey.TEXT:
        raise MalformedArtifact("the text artifact is reserved and cannot be injected")
    from charnet import artifacts as _artifacts

    value = _artifacts.check_artifact(key, value, tokens)
    out = {as_key(k): v for k, v in (injected or {}).items()}
    out[key] = value
    return out


class Pipeline:
    """An ordered, immutable sequence of steps applied to texts.

    >>> pipeline = Pipeline([Tokenizer(), NamedEntityRecognizer(),
    ...                      GraphRulesCharacterUnifier(min_appearance=10),
    ...                      CoOccurrencesGraphExtractor(co_occurrences_dist=10)])
    >>> out = pipeline(text)  # doctest: +SKIP
    """

    def __init__(self, steps: Sequence[PipelineStep], lang: str = "eng"):
        self.steps = tuple(steps)
        self.lang = lang
        self._signatures = tuple(step.signature() for step in self.steps)

    @property
    def signatures(self) -> tuple[StepSignature, ...]:
        return self._signatures

    def check_valid(self, injected: Iterable[ArtifactKey | str] = ()) -> ValidationReport:
        return validate_pipeline(self._signatures, self.lang, injected)

    def __call__(self, text: str, injected: Mapping[ArtifactKey | str, Any] | None = None) -> PipelineState:
        return run_pipeline(self.steps, text, injected, self.lang, signatures=self._signatures)

    def __repr__(self) -> str:
        return f"Pipeline({list(self.steps)!r}, lang={self.lang!r})"


def run_pipeline(
    steps: Sequence[PipelineStep],
    text: str,
    injected: Mapping[ArtifactKey | str, Any] | None = None,
    language: str = "eng",
    signatures: Sequence[StepSignature] | None = None,
) -> PipelineState:
    from charnet import artifacts as _artifacts

    if signatures is None:
        signatures = [step.signature() for step in steps]
    injected = {as_key(k): v for k, v in (injected or {}).items()}
    if ArtifactKey.TEXT in injected:
        raise MalformedArtifact("the text artifact is reserved and cannot be injected")

    report = validate_pipeline(signatures, language, injected)
    if not report.valid:
        raise ValidationError(report)

    state = PipelineState.from_text(text, language)
    injected_tokens = injected.get(ArtifactKey.TOKENS)
    if injected_tokens is not None:
        injected_tokens = _artifacts.check_artifact(ArtifactKey.TOKENS, injected_tokens, None)
    for key, value in injected.items():
        state.set(key, _artifacts.check_artifact(key, value, injected_tokens), INJECTED)
    pending = set() if injected_tokens is not None else set(injected) & _artifacts.SPAN_KEYS

    for step, sig in zip(steps, signatures):
        kwargs = {k.value: state.artifacts[k] for k in sig.needs}
        kwargs.update({k.value: state.artifacts[k] for k in sig.optional_needs if k in state.artifacts})
        logger.debug("running %s", sig.step_name)
        try:
            out = step(language=language, **kwargs)
        except Exception as exc:
            raise StepError(sig.step_name, exc) from exc

        try:
            produced = {as_key(k): v for k, v in dict(out).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise StepError(sig.step_name, f"invalid output: {exc}") from exc
        if set(produced) != set(sig.produces):
            extra = sorted(k.value for k in set(produced) - sig.produces)
            absent = sorted(k.value for k in sig.produces - set(produced))
            raise StepError(
                sig.step_name,
                f"output keys do not match declaration (undeclared: {extra}, not produced: {absent})",
            )
        for key, value in produced.items():
            state.set(key, value, sig.step_name)
            pending.discard(key)

        if pending and ArtifactKey.TOKENS in produced:
            tokens = state.artifacts[ArtifactKey.TOKENS]
            for key in sorted(pending):
                state.set(key, _artifacts.check_artifact(key, state.artifacts[key], tokens), INJECTED)
            pending.clear()
    return state
