"""
Holoscheme CLI - Experiment runner for approximation schemes in holomorphic function spaces
JSON configs in, CSV tables and plotting scripts out
"""

import json
import logging
import os
import sys
from typing import Any, Callable, Dict, Optional

import click
import numpy as np
from pydantic import ValidationError

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import config
from descriptors import EmbedConfig, ExperimentConfig, HbDescriptorModel, NormsConfig, describe_space, parse_space
from errors import HoloschemeError
from experiment_engine import ExperimentEngine
from report_generator import ReportGenerator, UnrecognizedCsv

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _status(message: str) -> None:
    click.echo(message, err=True)


def _load_json(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        raise click.UsageError("this command needs --config PATH")
    with open(path) as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as e:
            raise click.UsageError(f"{path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise click.UsageError(f"{path} must hold a JSON object, got {type(data).__name__}")
    return data


def _with_horizon(data: Dict[str, Any], key: str, horizon: Optional[int]) -> Dict[str, Any]:
    """Fill a missing horizon in the nested descriptor from --horizon."""
    nested = data.get(key)
    if horizon is not None and isinstance(nested, dict) and nested.get("kind") != "gram":
        nested.setdefault("horizon", horizon)
    return data


def _run(ctx: click.Context, action: Callable[[], None]) -> None:
    """Run a command body under the exit-code contract."""
    try:
        action()
    except ValidationError as e:
        for error in e.errors():
            location = ".".join(str(part) for part in error["loc"]) or "<root>"
            _status(f"❌ Invalid config at {location}: {error['msg']}")
        ctx.exit(EXIT_CONFIG)
    except np.linalg.LinAlgError as e:
        _status(f"❌ LinAlgError: {e}")
        ctx.exit(EXIT_RUNTIME)
    except (FileNotFoundError, UnrecognizedCsv, ValueError) as e:
        _status(f"❌ {e}")
        ctx.exit(EXIT_CONFIG)
    except HoloschemeError as e:
        _status(f"❌ {e}")
        ctx.exit(EXIT_RUNTIME)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="JSON config file.")
@click.option("--seed", type=int, default=None, help="Random seed (default from HOLOSCHEME_SEED).")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Output file; stdout if omitted.")
@click.option("--horizon", type=click.IntRange(min=0), default=None, help="Truncation degree N for descriptors that omit it.")
@click.option("--log-level", default=None, type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.pass_context
def main(ctx, config_path, seed, output, horizon, log_level):
    """Approximation schemes in Banach spaces of holomorphic functions."""
    logging.basicConfig(
        level=(log_level or config.LOG_LEVEL).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj.update(config_path=config_path, seed=seed, output=output, horizon=horizon)


def _engine(ctx) -> ExperimentEngine:
    return ExperimentEngine(seed=ctx.obj["seed"])


@main.command()
@click.pass_context
def norms(ctx):
    """Tabulate ||z^n|| for n = 0..n_max."""

    def action():
        data = _with_horizon(_load_json(ctx.obj["config_path"]), "space", ctx.obj["horizon"])
        cfg = NormsConfig.model_validate(data)
        with _engine(ctx) as engine:
            frame = engine.run_norms(cfg)
        ReportGenerator().write_csv(frame, ctx.obj["output"])
        _status(f"✅ {len(frame)} monomial norms")

    _run(ctx, action)


@main.command("scheme-run")
@click.pass_context
def scheme_run(ctx):
    """Error curves and growth tags of a scheme on a list of inputs."""

    def action():
        data = _with_horizon(_load_json(ctx.obj["config_path"]), "space", ctx.obj["horizon"])
        cfg = ExperimentConfig.model_validate(data)
        with _engine(ctx) as engine:
            frame = engine.run_scheme(cfg)
        ReportGenerator().write_csv(frame, ctx.obj["output"] or cfg.output)
        tags = frame.groupby("input", sort=False)["tag"].first()
        for name, tag in tags.items():
            marker = "✅" if tag == "bounded" else "⚠️ "
            _status(f"{marker} {name}: {tag}")

    _run(ctx, action)


@main.command()
@click.option("--n", "n_list", type=click.IntRange(min=0), multiple=True, required=True, help="Degree; repeatable.")
@click.option("--quadrature", type=int, default=None, help="Total quadrature nodes per constant.")
@click.pass_context
def lebesgue(ctx, n_list, quadrature):
    """Lebesgue constants L_n of the analytic Dirichlet kernel."""

    def action():
        with _engine(ctx) as engine:
            frame = engine.run_lebesgue(list(n_list), quadrature)
        ReportGenerator().write_csv(frame, ctx.obj["output"])
        _status(f"✅ {len(frame)} Lebesgue constants")

    _run(ctx, action)


@main.command()
@click.pass_context
def embed(ctx):
    """Inclusion constants, property checks and membership bounds of X = J(Y)."""

    def action():
        data = _with_horizon(_load_json(ctx.obj["config_path"]), "spec", ctx.obj["horizon"])
        cfg = EmbedConfig.model_validate(data)
        with _engine(ctx) as engine:
            frame = engine.run_embed(cfg)
        ReportGenerator().write_csv(frame, ctx.obj["output"])
        flagged = frame[~frame["flag"].isin(["holds", "passes", "member", "tail-negligible"])]
        if flagged.empty:
            _status(f"✅ {len(frame)} checks")
        else:
            _status(f"⚠️  {len(flagged)} of {len(frame)} checks flagged")

    _run(ctx, action)


@main.command("hb-gram")
@click.pass_context
def hb_gram_command(ctx):
    """Dump the monomial Gram matrix of H(b)."""

    def action():
        data = _load_json(ctx.obj["config_path"])
        if ctx.obj["horizon"] is not None:
            data.setdefault("horizon", ctx.obj["horizon"])
        cfg = HbDescriptorModel.model_validate(data)
        with _engine(ctx) as engine:
            frame = engine.run_hb_gram(cfg)
        ReportGenerator().write_csv(frame, ctx.obj["output"])
        _status(f"✅ H(b) Gram matrix of size {cfg.horizon + 1}")

    _run(ctx, action)


@main.command()
@click.pass_context
def describe(ctx):
    """Write the resolved space descriptor (defaults and horizon filled in) as JSON."""

    def action():
        data = _with_horizon(_load_json(ctx.obj["config_path"]), "space", ctx.obj["horizon"])
        if "space" not in data:
            raise click.UsageError("config needs a 'space' descriptor")
        descriptor = parse_space(data["space"])
        with _engine(ctx) as engine:
            document = describe_space(engine.space_for(descriptor))
        text = json.dumps(document) + "\n"
        if ctx.obj["output"] is None:
            click.echo(text, nl=False)
        else:
            with open(ctx.obj["output"], "w") as handle:
                handle.write(text)
        _status(f"✅ {document['kind']} space descriptor")

    _run(ctx, action)


@main.command("plot-script")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def plot_script(ctx, csv_path):
    """Emit a matplotlib script for a result CSV (the script is not run)."""

    def action():
        script = ReportGenerator().generate_plot_script(csv_path)
        if ctx.obj["output"] is None:
            click.echo(script, nl=False)
        else:
            with open(ctx.obj["output"], "w") as handle:
                handle.write(script)
        _status(f"✅ plot script for {csv_path}")

    _run(ctx, action)


if __name__ == "__main__":
    main()
