"""Run configuration: defaults, environment, INI config files, command line overrides and the
`# key=value` output headers, plus the parsers for the textual model, psi and grid specs.

Precedence, lowest first: RunConfig defaults, GLS_BOUNDS_WORKERS, the `[common]` section of
the config file, the section named after the command, command line flags."""

from __future__ import annotations

import configparser
import dataclasses
import logging
import math
import os
from pathlib import Path
from typing import Mapping

import numpy as np

from gls_bounds.data_models import (
    GeneratingFunction,
    MomentProfile,
    RandomVariableModel,
    RunConfig,
)
from gls_bounds.exceptions import ConfigError
from gls_bounds.models import storage
from gls_bounds.models.constants import (
    FLOAT_FORMAT,
    EnvironmentVariables,
    ModelKind,
    PsiFamily,
    TailFamily,
)

logger = logging.getLogger(__name__)

COMMANDS = ("moments", "glsnorm", "antinorm", "theta", "bound", "tails", "verify")
COMMON_SECTION = "common"
FIELDS = {field.name: field for field in dataclasses.fields(RunConfig)}
CONFIGURABLE_FIELDS = tuple(name for name in FIELDS if name != "command")
# Fields that change how a run executes but never what it computes.
EXECUTION_FIELDS = ("workers", "output", "plot_dir", "history")
TRUE_WORDS = ("1", "true", "yes", "on")
FALSE_WORDS = ("0", "false", "no", "off")
PSI_FILE_KIND = "file"


def convert_value(name: str, text: str, line: int | None = None) -> object:
    """Converts the text of a config value to the type of its RunConfig field.

    Args:
        name: Field name.
        text: The raw text.
        line: Line number for error messages.

    Returns:
        The typed value.
    """
    field_type = FIELDS[name].type
    text = text.strip()
    try:
        if field_type == "int":
            return int(text)
        if field_type == "float":
            return float(text)
    except ValueError as error:
        msg = f"Cannot read {text!r} as {field_type}"
        raise ConfigError(msg, line=line, field=name) from error

    if field_type == "bool":
        if text.lower() in TRUE_WORDS:
            return True
        if text.lower() in FALSE_WORDS:
            return False
        msg = f"Cannot read {text!r} as a boolean"
        raise ConfigError(msg, line=line, field=name)
    return text


def format_value(value: object) -> str:
    """Formats a RunConfig value for headers and config files."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def key_lines(text: str) -> dict[tuple[str, str], int]:
    """Maps (section, key) to the 1-based line where the key is set."""
    locations: dict[tuple[str, str], int] = {}
    section = ""
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            locations[(section, "")] = number
            continue
        for separator in ("=", ":"):
            if separator in line:
                key = line.split(separator, 1)[0].strip().lower()
                locations.setdefault((section, key), number)
                break
    return locations


def read_config_file(path: Path, command: str) -> dict[str, object]:
    """Reads the `[common]` and command sections of an INI config file.

    Args:
        path: The config file.
        command: The command whose section applies.

    Returns:
        Typed values, command section over common section.
    """
    text = path.read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.DuplicateOptionError as error:
        msg = f"Duplicate key in section [{error.section}]"
        raise ConfigError(msg, line=error.lineno, field=error.option) from error
    except configparser.DuplicateSectionError as error:
        msg = f"Duplicate section [{error.section}]"
        raise ConfigError(msg, line=error.lineno) from error
    except configparser.MissingSectionHeaderError as error:
        msg = "Config files start with a [section] header"
        raise ConfigError(msg, line=error.lineno) from error
    except configparser.ParsingError as error:
        line = error.errors[0][0] if error.errors else None
        msg = "Cannot parse the config file"
        raise ConfigError(msg, line=line) from error

    locations = key_lines(text)
    values: dict[str, object] = {}
    for section in parser.sections():
        if section not in (COMMON_SECTION, *COMMANDS):
            msg = f"Unknown section [{section}]"
            raise ConfigError(msg, line=locations.get((section, "")))
        for key in parser[section]:
            if key.replace("-", "_") not in CONFIGURABLE_FIELDS:
                msg = f"Unknown key in section [{section}]"
                raise ConfigError(msg, line=locations.get((section, key)), field=key)

    for section in (COMMON_SECTION, command):
        if not parser.has_section(section):
            continue
        for key, text_value in parser[section].items():
            name = key.replace("-", "_")
            values[name] = convert_value(name, text_value, locations.get((section, key)))
    return values


def environment_values(environ: Mapping[str, str]) -> dict[str, object]:
    """Values taken from environment variables."""
    workers = environ.get(EnvironmentVariables.WORKERS.value)
    if not workers:
        return {}
    try:
        return {"workers": int(workers)}
    except ValueError as error:
        msg = f"{EnvironmentVariables.WORKERS.value} must be an integer, got {workers!r}"
        raise ConfigError(msg, field="workers") from error


def resolve_config(
    command: str,
    flags: Mapping[str, object] | None = None,
    config_path: Path | None = None,
    environ: Mapping[str, str] | None = None,
) -> RunConfig:
    """Builds and validates the RunConfig of a run.

    Args:
        command: The subcommand.
        flags: Command line values, None entries are ignored.
        config_path: Optional INI config file.
        environ: Environment, default os.environ.

    Returns:
        The validated RunConfig.
    """
    if command not in COMMANDS:
        msg = f"Unknown command {command!r}"
        raise ConfigError(msg, field="command")

    values: dict[str, object] = {}
    values.update(environment_values(os.environ if environ is None else environ))
    if config_path is not None:
        values.update(read_config_file(config_path, command))
    for name, value in (flags or {}).items():
        if value is None:
            continue
        if name not in CONFIGURABLE_FIELDS:
            msg = "Unknown option"
            raise ConfigError(msg, field=name)
        values[name] = value

    config = RunConfig(command=command, **values)
    validate_config(config)
    return config


def validate_config(config: RunConfig) -> None:
    """Checks every value and parses every spec of a RunConfig, raising ConfigError on failure."""
    checks = {
        "count": config.count >= 1,
        "tail_count": config.tail_count >= 1,
        "workers": config.workers >= 1,
        "n": config.n >= 1,
        "seed": 0 <= config.seed < 2**64,
        "quad_epsabs": config.quad_epsabs > 0,
        "quad_epsrel": config.quad_epsrel > 0,
        "bisection_tol": config.bisection_tol > 0,
    }
    for name, valid in checks.items():
        if not valid:
            msg = f"Invalid value {getattr(config, name)!r}"
            raise ConfigError(msg, field=name)

    parsers = {
        "model": parse_model_spec,
        "psi": parse_psi_spec,
        "p_grid": parse_grid,
        "u_grid": parse_grid,
        "p_range": parse_range,
        "p": parse_reals,
        "q": parse_reals,
        "b": parse_real,
        "v": parse_reals,
        "family": parse_family,
    }
    for name, parser in parsers.items():
        try:
            parser(getattr(config, name))
        except (ValueError, KeyError) as error:
            msg = f"Invalid spec {getattr(config, name)!r}: {error}"
            raise ConfigError(msg, field=name) from error


def config_header(config: RunConfig) -> list[str]:
    """The `# key=value` lines echoing the result-determining fields of a RunConfig."""
    return [
        f"# {name}={format_value(getattr(config, name))}"
        for name in FIELDS
        if name not in EXECUTION_FIELDS
    ]


def config_from_header(lines: list[str]) -> RunConfig:
    """Re-parses the leading `key=value` block written by config_header.

    Args:
        lines: Header lines, with or without the `#` prefix.

    Returns:
        The RunConfig.
    """
    values: dict[str, object] = {}
    for raw_line in lines:
        line = raw_line.lstrip("#").strip()
        if "=" not in line:
            break
        name, text = line.split("=", 1)
        if name not in FIELDS or name in values:
            break
        values[name] = text if name == "command" else convert_value(name, text)

    if "command" not in values:
        msg = "The header has no command line"
        raise ConfigError(msg, field="command")
    return RunConfig(**values)


def parse_parameters(text: str) -> dict[str, float]:
    """Parses `name=value,name=value` into floats."""
    if not text:
        return {}
    parameters = {}
    for item in text.split(","):
        name, value = item.split("=", 1)
        parameters[name.strip()] = parse_real(value)
    return parameters


def split_spec(spec: str) -> tuple[str, str]:
    """Splits `kind:rest` into its two parts, rest empty when absent."""
    kind, _, rest = spec.strip().partition(":")
    return kind.strip(), rest.strip()


def parse_model_spec(spec: str) -> tuple[str, str]:
    """Checks the syntax of a model spec without reading files."""
    kind, rest = split_spec(spec)
    if kind == "file":
        if not rest:
            msg = "file: needs a path"
            raise ValueError(msg)
        return kind, rest
    if kind not in {model_kind.value for model_kind in ModelKind} - {ModelKind.EMPIRICAL.value}:
        msg = f"unknown model kind {kind!r}"
        raise ValueError(msg)
    if kind == ModelKind.FINITE_DISCRETE.value:
        parse_atoms(rest)
    elif kind == ModelKind.WEIBULL_SYM.value and "m" not in parse_parameters(rest):
        msg = "weibull needs m"
        raise ValueError(msg)
    else:
        parse_parameters(rest)
    return kind, rest


def parse_atoms(text: str) -> list[tuple[float, float]]:
    """Parses `value@probability,…` atoms."""
    atoms = []
    for item in text.split(","):
        value, probability = item.split("@", 1)
        atoms.append((parse_real(value), parse_real(probability)))
    return atoms


def build_model(spec: str) -> RandomVariableModel:
    """Builds the model of a spec such as `gaussian:sigma=2` or `file:data.txt`.

    Args:
        spec: The model spec.

    Returns:
        The model.
    """
    kind, rest = parse_model_spec(spec)
    if kind == "file":
        path = Path(rest)
        return RandomVariableModel.empirical(storage.read_samples(path), label=path.name)

    parameters = parse_parameters(rest) if kind != ModelKind.FINITE_DISCRETE.value else {}
    if kind == ModelKind.EXAMPLE_A.value:
        return RandomVariableModel.example_a()
    if kind == ModelKind.GAUSSIAN.value:
        return RandomVariableModel.gaussian(parameters.get("sigma", 1.0))
    if kind == ModelKind.RADEMACHER.value:
        return RandomVariableModel.rademacher()
    if kind == ModelKind.WEIBULL_SYM.value:
        return RandomVariableModel.weibull_sym(parameters["m"], parameters.get("scale", 1.0))
    return RandomVariableModel.finite_discrete(parse_atoms(rest))


def parse_psi_spec(spec: str) -> tuple[PsiFamily | None, dict[str, float], str]:
    """Checks the syntax of a psi spec without reading files. The family is None for `file:`."""
    kind, rest = split_spec(spec)
    if kind == PSI_FILE_KIND:
        if not rest:
            msg = "file: needs a path"
            raise ValueError(msg)
        return None, {}, rest
    family = PsiFamily(kind)
    if family == PsiFamily.TABULATED:
        if not rest:
            msg = "tabulated: needs a path"
            raise ValueError(msg)
        return family, {}, rest
    parameters = parse_parameters(rest)
    required = {
        PsiFamily.POWER: ("m",),
        PsiFamily.BLOWUP: ("b", "beta"),
        PsiFamily.DEGENERATE: ("r",),
        PsiFamily.NATURAL: (),
    }[family]
    missing = [name for name in required if name not in parameters]
    if missing:
        msg = f"{kind} needs {', '.join(missing)}"
        raise ValueError(msg)
    return family, parameters, rest


def build_psi(spec: str, natural_profile: MomentProfile | None = None) -> GeneratingFunction:
    """Builds the generating function of a spec such as `power:m=2` or `file:psi.json`.

    Args:
        spec: The psi spec.
        natural_profile: Moment profile used by `natural`.

    Returns:
        The generating function.
    """
    family, parameters, rest = parse_psi_spec(spec)
    if family is None:
        return storage.read_generating_function(Path(rest))
    if family == PsiFamily.POWER:
        return GeneratingFunction.power(parameters["m"])
    if family == PsiFamily.BLOWUP:
        return GeneratingFunction.blowup(parameters["b"], parameters["beta"])
    if family == PsiFamily.DEGENERATE:
        return GeneratingFunction.degenerate(parameters["r"])
    if family == PsiFamily.NATURAL:
        if natural_profile is None:
            msg = "The natural psi needs the model's moment profile"
            raise ConfigError(msg, field="psi")
        return GeneratingFunction.natural(natural_profile)
    grid, values = storage.read_psi_table(Path(rest))
    return GeneratingFunction.tabulated(grid, values)


def psi_upper_end(spec: str) -> float:
    """The endpoint b of a psi spec. Only `file:` specs are read from disk."""
    family, parameters, rest = parse_psi_spec(spec)
    if family is None:
        return storage.read_generating_function(Path(rest)).b
    if family == PsiFamily.BLOWUP:
        return parameters["b"]
    return math.inf


def parse_real(text: str) -> float:
    """Parses a real, accepting `inf`."""
    return float(text.strip())


def parse_reals(text: str) -> list[float]:
    """Parses a comma separated list of reals."""
    return [parse_real(item) for item in text.split(",") if item.strip()]


def parse_range(text: str) -> tuple[float, float] | None:
    """Parses `lo,hi`, None for an empty spec."""
    if not text:
        return None
    values = parse_reals(text)
    if len(values) != 2 or values[0] > values[1]:
        msg = "a range is `lo,hi` with lo <= hi"
        raise ValueError(msg)
    return values[0], values[1]


def parse_grid(spec: str) -> list[float] | None:
    """Parses `geom:lo,hi,N`, `range:lo,hi,step` or a list of reals, None for an empty spec.

    Args:
        spec: The grid spec.

    Returns:
        The increasing grid.
    """
    if not spec:
        return None
    kind, rest = split_spec(spec)
    if kind == "geom":
        lower, upper, points = parse_reals(rest)
        grid = list(np.geomspace(lower, upper, int(points)))
    elif kind == "range":
        lower, upper, step = parse_reals(rest)
        count = int(math.floor((upper - lower) / step + 1e-9)) + 1
        grid = [lower + index * step for index in range(count)]
    else:
        grid = parse_reals(spec)

    grid = [float(point) for point in grid]
    if not grid or any(later <= earlier for earlier, later in zip(grid, grid[1:])):
        msg = "grids are non-empty and strictly increasing"
        raise ValueError(msg)
    return grid


def parse_family(spec: str) -> tuple[TailFamily, float | None]:
    """Parses `subgaussian`, `weibull` or `weibull:m=1`."""
    kind, rest = split_spec(spec)
    family = TailFamily(kind)
    return family, parse_parameters(rest).get("m")
