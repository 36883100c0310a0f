"""Run configuration files: a flat key = value format with one section
per subcommand.

The serialized form is canonical (fixed section and key order, shortest
round-trip float repr), so serialize -> parse -> serialize is the
identity. Unknown sections or keys are rejected rather than ignored.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass

from .params import ModelParams, Strategy, canonical_strategies

_MODEL_FLOAT_KEYS = ("w", "p", "q", "r", "alpha", "gamma", "delta1", "delta2",
                     "c", "beta", "mu")
_MODEL_INT_KEYS = ("Z", "N")
_MODEL_KEYS = _MODEL_FLOAT_KEYS + _MODEL_INT_KEYS + ("strategies",)

_SECTION_KEYS = {
    "model": set(_MODEL_KEYS),
    "output": {"dir"},
    "sweep": {"axis1", "axis2", "mode", "outputs"},
    "premium": {"c_grid"},
    "mc": {"steps", "burnin", "thinning", "seed", "initial"},
}

#: Premium grid used when a premium run has no [premium] section.
DEFAULT_PREMIUM_GRID = "0.16:0.198:0.002"


class ConfigError(ValueError):
    """Configuration file or override could not be interpreted."""


@dataclass(frozen=True)
class SweepSection:
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    mode: tuple[Strategy, ...] | None = None
    outputs: tuple[str, ...] = ("adoption", "profit")


@dataclass(frozen=True)
class PremiumSection:
    c_grid: tuple[float, ...]


@dataclass(frozen=True)
class McSection:
    steps: int = 2_000_000
    burnin: int = 100_000
    thinning: int = 1
    seed: int = 12345
    initial: tuple[int, int] | None = None


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = ModelParams()
    output_dir: str = "out"
    sweep: SweepSection | None = None
    premium: PremiumSection | None = None
    mc: McSection | None = None


def parse_grid(text: str) -> tuple[float, ...]:
    """Parse a value grid: either "v1, v2, v3" or "start:stop:step"
    (inclusive of the endpoint up to rounding)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid range needs start:stop:step, got {text!r}")
        start, stop, step = (_parse_float(t) for t in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"bad grid range {text!r}")
        spans = (stop - start) / step
        count = round(spans) if abs(spans - round(spans)) < 1e-6 else int(spans)
        return tuple(start + i * step for i in range(count + 1))
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad grid value list {text!r}") from exc


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"not an integer: {text!r}") from exc


def parse_strategies(text: str) -> tuple[Strategy, ...]:
    try:
        return canonical_strategies(s.strip() for s in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad strategy set {text!r}: {exc}") from exc


def _parse_axis(text: str) -> tuple[str, tuple[float, ...]]:
    if ":" not in text:
        raise ConfigError(f"axis needs the form 'name: values', got {text!r}")
    name, _, rest = text.partition(":")
    return name.strip(), parse_grid(rest)


def parse_text(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    changes = {}
    if parser.has_section("model"):
        sec = parser["model"]
        for key in _MODEL_FLOAT_KEYS:
            if key in sec:
                changes[key] = _parse_float(sec[key])
        for key in _MODEL_INT_KEYS:
            if key in sec:
                changes[key] = _parse_int(sec[key])
        if "strategies" in sec:
            changes["strategies"] = parse_strategies(sec["strategies"])
    model = ModelParams().replace(**changes) if changes else ModelParams()

    output_dir = "out"
    if parser.has_section("output") and "dir" in parser["output"]:
        output_dir = parser["output"]["dir"].strip()

    sweep = None
    if parser.has_section("sweep"):
        sec = parser["sweep"]
        if "axis1" not in sec:
            raise ConfigError("[sweep] section needs at least axis1")
        axes = [_parse_axis(sec["axis1"])]
        if "axis2" in sec:
            axes.append(_parse_axis(sec["axis2"]))
        mode = parse_strategies(sec["mode"]) if "mode" in sec else None
        outputs = (tuple(o.strip() for o in sec["outputs"].split(","))
                   if "outputs" in sec else ("adoption", "profit"))
        sweep = SweepSection(axes=tuple(axes), mode=mode, outputs=outputs)

    premium = None
    if parser.has_section("premium"):
        premium = PremiumSection(c_grid=parse_grid(parser["premium"]["c_grid"]))

    mc = None
    if parser.has_section("mc"):
        sec = parser["mc"]
        fields = {}
        for key in ("steps", "burnin", "thinning", "seed"):
            if key in sec:
                fields[key] = _parse_int(sec[key])
        if "initial" in sec:
            parts = sec["initial"].split(",")
            if len(parts) != 2:
                raise ConfigError(f"initial state needs two counts, got {sec['initial']!r}")
            fields["initial"] = (_parse_int(parts[0]), _parse_int(parts[1]))
        mc = McSection(**fields)

    return RunConfig(model=model, output_dir=output_dir,
                     sweep=sweep, premium=premium, mc=mc)


def parse_file(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_text(fh.read())


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def strategies_label(strategies) -> str:
    return ",".join(s.value for s in strategies)


def serialize(config: RunConfig) -> str:
    """Canonical text form of a configuration."""
    out = io.StringIO()
    out.write("[model]\n")
    for key in _MODEL_FLOAT_KEYS + _MODEL_INT_KEYS:
        out.write(f"{key} = {_fmt(getattr(config.model, key))}\n")
    out.write(f"strategies = {strategies_label(config.model.strategies)}\n")
    out.write("\n[output]\n")
    out.write(f"dir = {config.output_dir}\n")
    if config.sweep is not None:
        out.write("\n[sweep]\n")
        for i, (name, values) in enumerate(config.sweep.axes, start=1):
            vals = ", ".join(_fmt(v) for v in values)
            out.write(f"axis{i} = {name}: {vals}\n")
        if config.sweep.mode is not None:
            out.write(f"mode = {strategies_label(config.sweep.mode)}\n")
        out.write(f"outputs = {','.join(config.sweep.outputs)}\n")
    if config.premium is not None:
        vals = ", ".join(_fmt(v) for v in config.premium.c_grid)
        out.write(f"\n[premium]\nc_grid = {vals}\n")
    if config.mc is not None:
        out.write("\n[mc]\n")
        for key in ("steps", "burnin", "thinning", "seed"):
            out.write(f"{key} = {getattr(config.mc, key)}\n")
        if config.mc.initial is not None:
            out.write(f"initial = {config.mc.initial[0]},{config.mc.initial[1]}\n")
    return out.getvalue()


def apply_overrides(params: ModelParams, assignments) -> ModelParams:
    """Apply "key=value" command-line overrides to model parameters."""
    changes = {}
    for item in assignments:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        if key in _MODEL_FLOAT_KEYS:
            changes[key] = _parse_float(raw)
        elif key in _MODEL_INT_KEYS:
            changes[key] = _parse_int(raw)
        elif key == "strategies":
            changes[key] = parse_strategies(raw)
        else:
            raise ConfigError(f"unknown parameter {key!r} in override")
    return params.replace(**changes) if changes else params


def params_dict(params: ModelParams) -> dict:
    """JSON-ready mapping of every effective parameter value."""
    data = dataclasses.asdict(params)
    data["strategies"] = [s.value for s in params.strategies]
    return data
