"""Command-line interface: ``charnet run|validate|export``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager

from charnet import resources
from charnet.artifacts import state_from_json, state_to_json
from charnet.config import STEPS, ConfigError, RunConfig, build_pipeline, load_config
from charnet.graph_io import FORMATS, SerializationError, UnsupportedFormat, export_network, read_injection_file, write_atomic
from charnet.pipeline import ArtifactKey, MalformedArtifact, StepError, ValidationError, validate_pipeline

EXIT_OK = 0
EXIT_STEP_FAILURE = 1
EXIT_INVALID = 2

log = logging.getLogger("charnet")

# flags that override per-step options
_STEP_FLAGS = (
    "min_appearance", "co_occurrences_dist", "dynamic", "dynamic_window", "dynamic_overlap",
    "abbreviations", "speech_verbs", "conversation_gap",
)


def _error(msg: str) -> None:
    print(f"charnet: {msg}", file=sys.stderr)


@contextmanager
def _resource_dir(path):
    if path is None:
        yield
        return
    old = os.environ.get(resources.ENV_VAR)
    os.environ[resources.ENV_VAR] = str(path)
    try:
        yield
    finally:
        if old is None:
            os.environ.pop(resources.ENV_VAR, None)
        else:
            os.environ[resources.ENV_VAR] = old


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    config = config.with_overrides(
        input_path=args.input,
        language=args.language,
        output_format=args.format,
        output_path=args.output,
        styled=args.styled,
        state_path=args.state,
        resources_dir=args.resources,
    )
    for opt in _STEP_FLAGS:
        config = config.with_step_option(opt, getattr(args, opt))
    return config


def _print_trace(report, stream) -> None:
    for name, available in report.trace:
        keys = ", ".join(sorted(k.value for k in available))
        print(f"{name:28s} available: {keys}", file=stream)


def cmd_validate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    with _resource_dir(config.resources_dir):
        pipeline = build_pipeline(config)
    report = validate_pipeline(pipeline.signatures, config.language, config.inject)
    _print_trace(report, sys.stdout)
    if report.valid:
        print("pipeline is valid")
        return EXIT_OK
    for d in report.diagnostics:
        print(d.explain(config.language), file=sys.stderr)
    return EXIT_INVALID


def cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    if config.input_path is None:
        raise ConfigError("no input file given (config 'input' or --input)")
    if config.output_format not in FORMATS:
        raise UnsupportedFormat(f"unsupported format {config.output_format!r}")
    with _resource_dir(config.resources_dir):
        pipeline = build_pipeline(config)
        report = validate_pipeline(pipeline.signatures, config.language, config.inject)
        if not report.valid:
            for d in report.diagnostics:
                _error(d.explain(config.language))
            return EXIT_INVALID
        with open(config.input_path, encoding="utf-8") as f:
            text = f.read()
        injected = {key: read_injection_file(path, key) for key, path in config.inject.items()}
        state = pipeline(text, injected=injected)

    network = state.get(ArtifactKey.CHARACTER_NETWORK)
    if config.output_path is not None:
        if network is None:
            raise ConfigError("the pipeline produced no character network to write")
        write_atomic(config.output_path, export_network(network, config.output_format, config.styled))
        log.info("wrote %s", config.output_path)
    if config.state_path is not None:
        data = json.dumps(state_to_json(state), sort_keys=True, ensure_ascii=False).encode("utf-8")
        write_atomic(config.state_path, data + b"\n")
    if config.output_path is None and config.state_path is None and network is not None:
        sys.stdout.buffer.write(export_network(network, config.output_format, config.styled))
    return EXIT_OK


def cmd_export(args) -> int:
    with open(args.state, encoding="utf-8") as f:
        state = state_from_json(json.load(f))
    network = state.get(ArtifactKey.CHARACTER_NETWORK)
    if network is None:
        raise ConfigError(f"{args.state} holds no character network")
    data = export_network(network, args.format, args.styled)
    if args.output:
        write_atomic(args.output, data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def _bool_flag(parser, name: str, help: str) -> None:
    parser.add_argument(f"--{name}", dest=name.replace("-", "_"), action=argparse.BooleanOptionalAction,
                        default=None, help=help)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charnet", description="Extract character networks from narrative texts.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def config_command(name: str, help: str):
        p = sub.add_parser(name, help=help)
        p.add_argument("config", help="YAML run configuration")
        p.add_argument("--input", help="input text file")
        p.add_argument("--language", help="ISO 639-3 language code")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--output", help="network output path")
        p.add_argument("--state", help="write the full pipeline state as JSON")
        p.add_argument("--resources", help="resource directory (overrides $%s)" % resources.ENV_VAR)
        _bool_flag(p, "styled", "add size/color/thickness attributes")
        p.add_argument("--min-appearance", type=int)
        p.add_argument("--co-occurrences-dist", type=int)
        _bool_flag(p, "dynamic", "extract a dynamic network")
        p.add_argument("--dynamic-window", type=int)
        p.add_argument("--dynamic-overlap", type=int)
        p.add_argument("--abbreviations", help="abbreviation list, one per line")
        p.add_argument("--speech-verbs", help="speech verb list, one per line")
        p.add_argument("--conversation-gap", type=int)
        return p

    config_command("run", "run a pipeline").set_defaults(func=cmd_run)
    config_command("validate", "check a pipeline without running it").set_defaults(func=cmd_validate)

    p = sub.add_parser("export", help="convert a saved pipeline state to a graph format")
    p.add_argument("state", help="state JSON written by 'run --state'")
    p.add_argument("--format", choices=FORMATS, default="gexf")
    p.add_argument("--output")
    _bool_flag(p, "styled", "add size/color/thickness attributes")
    p.set_defaults(func=cmd_export)
    parser.epilog = "steps: " + ", ".join(STEPS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "styled", None) is None and args.command == "export":
        args.styled = False
    try:
        return args.func(args)
    except ValidationError as exc:
        _error(str(exc))
        return EXIT_INVALID
    except (ConfigError, MalformedArtifact, UnsupportedFormat) as exc:
        _error(str(exc))
        return EXIT_INVALID
    except OSError as exc:
        _error(str(exc))
        return EXIT_INVALID
    except (StepError, SerializationError) as exc:
        _error(str(exc))
        return EXIT_STEP_FAILURE
    except Exception as exc:  # a step raising outside the pipeline wrapper
        _error(f"{type(exc).__name__}: {exc}")
        return EXIT_STEP_FAILURE


if __name__ == "__main__":
    sys.exit(main())
