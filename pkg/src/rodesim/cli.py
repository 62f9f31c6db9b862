"""Configuration-driven experiment runner.

Experiments are described by small plain-text files (a model name plus
optional ``[model]``, ``[noise.i]``, and ``[harness]`` sections) so that
the exact settings of a run can be archived next to its outputs. The
``run`` verb executes the plan and writes ``errors.csv``, ``fit.json``,
``loglog.dat``, and optionally ``sample_paths.csv`` into the output
directory; ``validate`` just checks a file, ``dump-noise`` writes one
noise path, and ``list-models`` shows the registry.

Exit codes: 0 success, 1 configuration error, 2 computation error.
"""

from __future__ import annotations

import argparse
import dataclasses
import inspect
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .core import ConfigurationError, DivergenceError, GenerationError, TimeMesh, substream
from .convergence import (ExperimentPlan, expected_order, figure_paths, fit_table,
                          run_experiment, validate_plan)
from .models import MODELS, ModelSpec
from .noise import (Beta, CompoundPoisson, Constant, DistributionSpec, Exponential,
                    FractionalBM, Gamma, GeometricBM, HawkesExpDecay,
                    LinearItoHomogeneous, Normal, OrnsteinUhlenbeck, PoissonStep,
                    Transport, Uniform, Wiener, sample_noise)

OUTPUT_DIR_ENV = "RODESIM_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "rodesim-out"
FORMATS = ("csv", "json", "dat")

# keys of the [harness] section that override the model's plan defaults
_HARNESS_KEYS = ("samples", "resolutions", "n_target", "master_seed",
                 "output_dir", "workers", "sample_paths", "formats")
_PLAN_KEYS_IN_MODEL_SECTION = ("samples", "resolutions", "n_target")


@dataclass(frozen=True)
class ExperimentConfig:
    model_name: str
    model_params: tuple[tuple[str, object], ...] = ()
    noise_overrides: tuple[tuple[int, tuple[tuple[str, object], ...]], ...] = ()
    samples: int | None = None
    resolutions: tuple[int, ...] | None = None
    n_target: int | None = None
    master_seed: int = 12345
    output_dir: str | None = None
    workers: int = 1
    sample_paths: int = 0
    formats: tuple[str, ...] = FORMATS


class _ErrorSink:
    def __init__(self):
        self.errors: list[str] = []

    def add(self, lineno: int | None, message: str):
        where = f"line {lineno}: " if lineno is not None else ""
        self.errors.append(where + message)

    def raise_if_any(self):
        if self.errors:
            raise ConfigurationError("\n".join(self.errors))


_DIST_PARSERS = {
    "exponential": (Exponential, 1),
    "uniform": (Uniform, 2),
    "gamma": (Gamma, 2),
    "beta": (Beta, 2),
    "normal": (Normal, 2),
    "constant": (Constant, 1),
}

_DIST_FIELDS = ("jump_law", "step_law")


def _parse_token(token: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def _parse_value(raw: str):
    """Scalar, bare string, or whitespace-separated tuple of scalars."""
    tokens = raw.split()
    if len(tokens) == 1:
        return _parse_token(tokens[0])
    return tuple(_parse_token(t) for t in tokens)


def _parse_distribution(raw: str) -> DistributionSpec:
    tokens = raw.split()
    name = tokens[0].lower()
    if name not in _DIST_PARSERS:
        raise ConfigurationError(f"unknown distribution {tokens[0]!r} "
                                 f"(expected one of {sorted(_DIST_PARSERS)})")
    cls, arity = _DIST_PARSERS[name]
    if len(tokens) != arity + 1:
        raise ConfigurationError(f"distribution {name} takes {arity} parameter(s), "
                                 f"got {len(tokens) - 1}")
    return cls(*(float(t) for t in tokens[1:]))


def _format_distribution(spec: DistributionSpec) -> str:
    for name, (cls, _) in _DIST_PARSERS.items():
        if isinstance(spec, cls):
            values = [getattr(spec, f.name) for f in dataclasses.fields(spec)]
            return " ".join([name] + [repr(float(v)) for v in values])
    raise ConfigurationError(f"cannot format distribution {spec!r}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate an experiment file.

    All problems are collected and reported together, each with its line
    number; unknown sections or keys are hard errors.
    """
    sink = _ErrorSink()
    model_name = None
    model_params: list[tuple[str, object]] = []
    noise_overrides: dict[int, list[tuple[str, object]]] = {}
    harness: dict[str, object] = {}
    harness_lines: dict[str, int] = {}

    section = None
    seen: set[tuple[str | None, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name == "model" or name == "harness":
                section = name
            elif name.startswith("noise."):
                try:
                    idx = int(name.split(".", 1)[1])
                except ValueError:
                    sink.add(lineno, f"bad noise section {name!r}")
                    section = None
                    continue
                if idx < 1:
                    sink.add(lineno, f"noise sections are 1-based, got {idx}")
                    section = None
                    continue
                section = ("noise", idx)
                noise_overrides.setdefault(idx, [])
            else:
                sink.add(lineno, f"unknown section [{name}]")
                section = None
            continue
        if "=" not in line:
            sink.add(lineno, f"expected key = value, got {line!r}")
            continue
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if not raw_value:
            sink.add(lineno, f"empty value for key {key!r}")
            continue
        sec_tag = section if isinstance(section, str) or section is None else f"noise.{section[1]}"
        if (sec_tag, key) in seen:
            sink.add(lineno, f"duplicate key {key!r}")
            continue
        seen.add((sec_tag, key))

        if section is None:
            if key == "model":
                model_name = raw_value
            else:
                sink.add(lineno, f"unknown top-level key {key!r} (only 'model' allowed)")
        elif section == "model":
            if key in _PLAN_KEYS_IN_MODEL_SECTION:
                sink.add(lineno, f"{key!r} belongs in the [harness] section")
            else:
                model_params.append((key, _parse_value(raw_value)))
        elif section == "harness":
            if key not in _HARNESS_KEYS:
                sink.add(lineno, f"unknown harness key {key!r}")
            else:
                harness[key] = raw_value
                harness_lines[key] = lineno
        else:
            _, idx = section
            if key in _DIST_FIELDS:
                try:
                    noise_overrides[idx].append((key, _parse_distribution(raw_value)))
                except ConfigurationError as err:
                    sink.add(lineno, str(err))
            else:
                noise_overrides[idx].append((key, _parse_value(raw_value)))

    if model_name is None:
        sink.add(None, "model required")
        sink.raise_if_any()

    def _int_key(key: str, minimum: int, default):
        if key not in harness:
            return default
        value = _parse_value(str(harness[key]))
        if not isinstance(value, int) or value < minimum:
            sink.add(harness_lines[key], f"{key} must be an integer >= {minimum}, "
                                         f"got {harness[key]!r}")
            return default
        return value

    resolutions = None
    if "resolutions" in harness:
        value = _parse_value(str(harness["resolutions"]))
        values = value if isinstance(value, tuple) else (value,)
        if not all(isinstance(v, int) and v >= 1 for v in values):
            sink.add(harness_lines["resolutions"],
                     f"resolutions must be positive integers, got {harness['resolutions']!r}")
        else:
            resolutions = tuple(values)

    formats = FORMATS
    if "formats" in harness:
        value = str(harness["formats"]).split()
        bad = [v for v in value if v not in FORMATS]
        if bad:
            sink.add(harness_lines["formats"], f"unknown formats {bad} (choose from {FORMATS})")
        else:
            formats = tuple(value)

    config = ExperimentConfig(
        model_name=model_name,
        model_params=tuple(model_params),
        noise_overrides=tuple((idx, tuple(kvs)) for idx, kvs in sorted(noise_overrides.items())),
        samples=_int_key("samples", 2, None),
        resolutions=resolutions,
        n_target=_int_key("n_target", 2, None),
        master_seed=_int_key("master_seed", 0, 12345),
        output_dir=str(harness["output_dir"]) if "output_dir" in harness else None,
        workers=_int_key("workers", 1, os.cpu_count() or 1),  # default: all cores
        sample_paths=_int_key("sample_paths", 0, 0),
        formats=formats,
    )
    sink.raise_if_any()
    build_model(config)  # validates model name, params, and noise overrides
    make_plan(config)
    return config


def format_config(config: ExperimentConfig) -> str:
    """Canonical text for a config; parse(format(c)) == c."""
    lines = [f"model = {config.model_name}"]
    if config.model_params:
        lines += ["", "[model]"]
        for key, value in config.model_params:
            lines.append(f"{key} = {_format_value(value)}")
    for idx, kvs in config.noise_overrides:
        lines += ["", f"[noise.{idx}]"]
        for key, value in kvs:
            lines.append(f"{key} = {_format_value(value)}")
    lines += ["", "[harness]"]
    if config.samples is not None:
        lines.append(f"samples = {config.samples}")
    if config.resolutions is not None:
        lines.append(f"resolutions = {_format_value(config.resolutions)}")
    if config.n_target is not None:
        lines.append(f"n_target = {config.n_target}")
    lines.append(f"master_seed = {config.master_seed}")
    if config.output_dir is not None:
        lines.append(f"output_dir = {config.output_dir}")
    lines.append(f"workers = {config.workers}")
    lines.append(f"sample_paths = {config.sample_paths}")
    lines.append(f"formats = {' '.join(config.formats)}")
    return "\n".join(lines) + "\n"


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return " ".join(_format_value(v) for v in value)
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return _format_distribution(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def build_model(config: ExperimentConfig) -> ModelSpec:
    """Instantiate the named model with parameter and noise overrides."""
    builder = MODELS.get(config.model_name)
    if builder is None:
        raise ConfigurationError(f"unknown model {config.model_name!r} "
                                 f"(choose from {sorted(MODELS)})")
    signature = inspect.signature(builder)
    params = dict(config.model_params)
    unknown = [k for k in params if k not in signature.parameters]
    if unknown:
        raise ConfigurationError(f"unknown parameter(s) {unknown} for model {config.model_name}")
    # harness-level plan settings reach the builder too, so models that
    # derive internal structure from them (spatial pairings) stay consistent
    for key, value in (("samples", config.samples), ("resolutions", config.resolutions),
                       ("n_target", config.n_target)):
        if value is not None and key in signature.parameters:
            params[key] = value
    try:
        model = builder(**params)
    except TypeError as err:
        raise ConfigurationError(f"model {config.model_name}: {err}") from err

    if not config.noise_overrides:
        return model
    specs = list(model.noise_specs)
    for idx, kvs in config.noise_overrides:
        if idx > len(specs):
            raise ConfigurationError(f"[noise.{idx}]: model {config.model_name} has only "
                                     f"{len(specs)} noise component(s)")
        spec = specs[idx - 1]
        fields = {f.name for f in dataclasses.fields(spec)}
        for key, value in kvs:
            if key not in fields:
                raise ConfigurationError(
                    f"[noise.{idx}]: {type(spec).__name__} has no parameter {key!r}"
                )
            try:
                spec = dataclasses.replace(spec, **{key: value})
            except (TypeError, ValueError) as err:
                raise ConfigurationError(f"[noise.{idx}]: bad value for {key!r}: {err}") from err
        specs[idx - 1] = spec
    return dataclasses.replace(model, noise_specs=tuple(specs))


def make_plan(config: ExperimentConfig, model: ModelSpec | None = None) -> ExperimentPlan:
    model = model if model is not None else build_model(config)
    plan = ExperimentPlan(
        model=model,
        resolutions=config.resolutions if config.resolutions is not None else model.resolutions,
        n_target=config.n_target if config.n_target is not None else model.n_target,
        samples=config.samples if config.samples is not None else model.samples,
        master_seed=config.master_seed,
        workers=config.workers,
    )
    validate_plan(plan)
    if any(isinstance(s, FractionalBM) for s in model.noise_specs):
        n = plan.n_target
        if n & (n - 1) != 0:
            raise ConfigurationError(
                f"n_target={n} must be a power of two when the model carries "
                "fractional Brownian noise"
            )
    return plan


# --------------------------------------------------------------------------
# artifacts


def _fmt(x: float) -> str:
    # repr is the shortest digit string that round-trips the exact double,
    # so downstream fits are loss-free
    return repr(float(x))


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8")


def run(config: ExperimentConfig, dry_run: bool = False,
        stream=None) -> list[Path]:
    """Execute a config and write its artifacts; returns the written paths."""
    stream = stream if stream is not None else sys.stdout
    model = build_model(config)
    plan = make_plan(config, model)
    out_dir = Path(config.output_dir or os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR)

    if dry_run:
        print(f"model        {model.name}", file=stream)
        print(f"samples      {plan.samples}", file=stream)
        print(f"resolutions  {' '.join(str(n) for n in plan.resolutions)}", file=stream)
        print(f"n_target     {plan.n_target}", file=stream)
        print(f"master_seed  {plan.master_seed}", file=stream)
        print(f"workers      {plan.workers}", file=stream)
        print(f"output_dir   {out_dir}", file=stream)
        print(f"formats      {' '.join(config.formats)}", file=stream)
        return []

    table = run_experiment(plan)
    fit = fit_table(table)
    order = expected_order(model)

    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if "csv" in config.formats:
        lines = ["N,dt,error,std_err,eps_min,eps_max"]
        for i, n in enumerate(table.resolutions):
            lines.append(",".join([str(int(n)), _fmt(table.dts[i]), _fmt(table.errors[i]),
                                   _fmt(table.std_errs[i]), _fmt(table.eps_min[i]),
                                   _fmt(table.eps_max[i])]))
        path = out_dir / "errors.csv"
        _write(path, "\n".join(lines) + "\n")
        written.append(path)

    if "json" in config.formats:
        payload = {
            "p": fit.p,
            "ln_C": fit.ln_c,
            "p_min": fit.p_min,
            "p_max": fit.p_max,
            "expected_order": order,
            "seed": plan.master_seed,
            "M": plan.samples,
            "N_tgt": plan.n_target,
        }
        path = out_dir / "fit.json"
        _write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        written.append(path)

    if "dat" in config.formats:
        lines = ["# ln_dt ln_error ln_fit"]
        for i in range(len(table.resolutions)):
            ln_dt = math.log(table.dts[i])
            lines.append(" ".join([_fmt(ln_dt), _fmt(math.log(table.errors[i])),
                                   _fmt(fit.ln_c + fit.p * ln_dt)]))
        path = out_dir / "loglog.dat"
        _write(path, "\n".join(lines) + "\n")
        written.append(path)

    if config.sample_paths > 0:
        lines = ["sample,N,t,target,approx"]
        for m, n, nodes, target, approx in figure_paths(plan, config.sample_paths):
            for j in range(len(nodes)):
                lines.append(",".join([str(m), str(n), _fmt(nodes[j]),
                                       _fmt(target[j]), _fmt(approx[j])]))
        path = out_dir / "sample_paths.csv"
        _write(path, "\n".join(lines) + "\n")
        written.append(path)

    print(f"{model.name}: p = {fit.p:.4f}  CI [{fit.p_min:.4f}, {fit.p_max:.4f}]  "
          f"expected {order:.2f}", file=stream)
    for path in written:
        print(f"wrote {path}", file=stream)
    return written


# --------------------------------------------------------------------------
# noise dumping


_NOISE_DEFAULTS = {
    "wiener": Wiener,
    "ou": lambda: OrnsteinUhlenbeck(nu=0.3, sigma=0.5, y0=0.2),
    "gbm": lambda: GeometricBM(mu=0.3, sigma=0.5, y0=0.2),
    "linear_ito": lambda: LinearItoHomogeneous(mu1=0.5, mu2=0.3, sigma=0.5,
                                               theta=3.0 * math.pi, y0=0.2),
    "compound_poisson": lambda: CompoundPoisson(lam=5.0, jump_law=Exponential(0.5)),
    "poisson_step": lambda: PoissonStep(lam=5.0, step_law=Uniform(0.0, 1.0)),
    "hawkes": lambda: HawkesExpDecay(lambda0=3.0, a=2.0, delta=3.0,
                                     jump_law=Exponential(0.5)),
    "transport_sum_sin": Transport.sum_sin_cbrt,
    "transport_ground": Transport.ground_acceleration,
    "fbm": lambda: FractionalBM(hurst=0.6, y0=0.2),
}


def dump_noise(spec, mesh: TimeMesh, seed: int) -> str:
    """Two-column (t, value) text for one realization of a noise spec."""
    path = sample_noise(spec, mesh, substream(seed, 0))
    nodes = mesh.nodes()
    values = path.values[:, 0]
    return "\n".join(f"{_fmt(nodes[j])} {_fmt(values[j])}" for j in range(mesh.n + 1)) + "\n"


def _noise_spec_from_args(kind: str, params: list[str]):
    factory = _NOISE_DEFAULTS.get(kind)
    if factory is None:
        raise ConfigurationError(f"unknown noise kind {kind!r} "
                                 f"(choose from {sorted(_NOISE_DEFAULTS)})")
    spec = factory()
    for item in params:
        if "=" not in item:
            raise ConfigurationError(f"--param needs key=value, got {item!r}")
        key, _, raw = item.partition("=")
        key = key.strip()
        fields = {f.name for f in dataclasses.fields(spec)}
        if key not in fields:
            raise ConfigurationError(f"{type(spec).__name__} has no parameter {key!r}")
        value = _parse_distribution(raw) if key in _DIST_FIELDS else _parse_value(raw.strip())
        try:
            spec = dataclasses.replace(spec, **{key: value})
        except (TypeError, ValueError) as err:
            raise ConfigurationError(f"bad value for {key!r}: {err}") from err
    return spec


# --------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rodesim",
        description="Noise-driven ODE simulation and Euler strong-convergence benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config and write artifacts")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--dry-run", action="store_true",
                       help="validate and print the plan without computing")

    p_val = sub.add_parser("validate", help="check an experiment config")
    p_val.add_argument("config", type=Path)

    p_dump = sub.add_parser("dump-noise", help="write one noise path as (t, value) lines")
    p_dump.add_argument("kind", choices=sorted(_NOISE_DEFAULTS))
    p_dump.add_argument("--n", type=int, default=256, help="mesh steps (default 256)")
    p_dump.add_argument("--t0", type=float, default=0.0)
    p_dump.add_argument("--tf", type=float, default=1.0)
    p_dump.add_argument("--seed", type=int, default=0)
    p_dump.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    p_dump.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="override a spec parameter (repeatable)")

    sub.add_parser("list-models", help="show the benchmark model registry")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = parse_config(args.config.read_text(encoding="utf-8"))
            run(config, dry_run=args.dry_run)
            return 0
        if args.command == "validate":
            parse_config(args.config.read_text(encoding="utf-8"))
            print("OK")
            return 0
        if args.command == "dump-noise":
            spec = _noise_spec_from_args(args.kind, args.param)
            mesh = TimeMesh(args.t0, args.tf, args.n)
            text = dump_noise(spec, mesh, args.seed)
            if args.out is None:
                sys.stdout.write(text)
            else:
                args.out.parent.mkdir(parents=True, exist_ok=True)
                _write(args.out, text)
            return 0
        if args.command == "list-models":
            for name in sorted(MODELS):
                doc = (MODELS[name].__doc__ or "").strip().splitlines()
                summary = doc[0] if doc else ""
                print(f"{name:26s} {summary}")
            return 0
    except ConfigurationError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 1
    except (GenerationError, DivergenceError, OSError) as err:
        print(f"computation error: {err}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
