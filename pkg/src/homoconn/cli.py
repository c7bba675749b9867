"""
Command-line entry point.

Usage:
    homoconn dims --n 1,2,3,4,5
    homoconn connection --sphere s7 --r 1 --q 1+0i --format json
    homoconn scan --sphere s7 --r-grid -1:1:0.25 --q-grid -1:1:0.25
    homoconn verify --seed 2024 --trials 100
"""

import contextlib
import json
import logging
from pathlib import Path
from typing import List, Optional

import click
from pydantic import ValidationError

from . import __version__
from .config import Config
from .errors import HomoconnError
from .models import ComplexValue, FamilyParams, ReportEnvelope, RunConfig
from .report import (
    cmd_connection,
    cmd_dims,
    cmd_einstein_scan,
    cmd_verify,
    parse_complex,
    parse_grid,
    parse_q_grid,
    render,
)

logger = logging.getLogger(__name__)

EXIT_VERIFICATION_FAILED = 3

SPHERES = click.Choice(["general_n", "s7", "s5", "s3"])
FORMATS = click.Choice(["json", "markdown"])
NAMED = click.Choice(
    ["levi_civita", "canonical", "natural", "tanaka", "characteristic"]
)

PARAMS_SHAPE = (
    '{"sphere_class": "s7", "kind": "metric", '
    '"q": [{"re": 1, "im": 0}, {"re": 0, "im": 0}], "t": -0.3333}'
)


class ComplexParamType(click.ParamType):
    """Complex numbers written as 1+0i, -0.5i, i or 2"""

    name = "complex"

    def convert(self, value, param, ctx):
        if isinstance(value, complex):
            return value
        try:
            return parse_complex(value)
        except HomoconnError as e:
            self.fail(str(e), param, ctx)


COMPLEX = ComplexParamType()


@contextlib.contextmanager
def usage_errors():
    """Turn library and validation errors into click usage errors (exit code 2)."""
    try:
        yield
    except ValidationError as e:
        raise click.UsageError(str(e)) from e
    except HomoconnError as e:
        raise click.UsageError(str(e)) from e


def emit(envelope: ReportEnvelope, output_format: str, out: Optional[str]) -> None:
    text = render(envelope, output_format)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        click.echo(f"wrote {path}", err=True)
    else:
        click.echo(text)


def _parse_n_list(values: tuple) -> List[int]:
    result = []
    for value in values:
        for part in value.split(","):
            part = part.strip()
            if part:
                try:
                    result.append(int(part))
                except ValueError:
                    raise click.BadParameter(
                        f"'{part}' is not an integer", param_hint="--n"
                    )
    return result


def _parse_params(text: Optional[str]) -> Optional[FamilyParams]:
    if text is None:
        return None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise click.UsageError(
            f"--params is not valid JSON ({e.msg}); expected e.g. {PARAMS_SHAPE}"
        ) from e
    try:
        return FamilyParams.model_validate(data)
    except ValidationError as e:
        raise click.UsageError(f"{e}\nexpected e.g. {PARAMS_SHAPE}") from e


# ---------------------------------------------------------------------------
# Command group
# ---------------------------------------------------------------------------


@click.group()
@click.option(
    "--log-level",
    default=None,
    help="Logging level (default from HOMOCONN_LOG_LEVEL, else WARNING).",
)
@click.version_option(version=__version__)
@click.pass_context
def main(ctx: click.Context, log_level: Optional[str]):
    """Invariant affine connections on odd-dimensional spheres."""
    with usage_errors():
        settings = Config()
    logging.basicConfig(
        level=(log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = settings


@main.command()
@click.option("--n", "n_values", multiple=True, required=True, help="e.g. 1,2,3,4,5")
@click.option("--format", "output_format", type=FORMATS, default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def dims(n_values: tuple, output_format: str, out: Optional[str]):
    """Dimensions of the invariant, metric and skew-torsion spaces."""
    with usage_errors():
        envelope = cmd_dims(_parse_n_list(n_values))
    emit(envelope, output_format, out)


@main.command()
@click.option("--sphere", type=SPHERES, default=None)
@click.option("--n", type=int, default=None, help="Sphere parameter for general_n.")
@click.option("--r", type=float, default=None, help="Skew-torsion parameter.")
@click.option("--q", type=COMPLEX, default=None, help="Complex skew parameter.")
@click.option("--params", default=None, help="Family member as JSON.")
@click.option("--named", type=NAMED, default=None)
@click.option("--tolerance", type=float, default=1e-8)
@click.option("--format", "output_format", type=FORMATS, default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def connection(sphere, n, r, q, params, named, tolerance, output_format, out):
    """Curvature report of one invariant connection."""
    family = _parse_params(params)
    with usage_errors():
        run = RunConfig(
            command="connection",
            sphere=sphere,
            n=n,
            r=r,
            q=ComplexValue.of(q) if q is not None else None,
            params=family,
            named=named,
            tolerance=tolerance,
            output_format=output_format,
        )
        envelope = cmd_connection(run)
    emit(envelope, output_format, out)


@main.command()
@click.option("--sphere", type=SPHERES, required=True)
@click.option("--n", type=int, default=None)
@click.option("--r-grid", required=True, help="a:b:step or a comma list.")
@click.option("--q-grid", default=None, help="Complex comma list or a:b:step.")
@click.option("--tolerance", type=float, default=1e-8)
@click.option("--workers", type=int, default=None)
@click.option("--format", "output_format", type=FORMATS, default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def scan(
    settings: Config,
    sphere,
    n,
    r_grid,
    q_grid,
    tolerance,
    workers,
    output_format,
    out,
):
    """Einstein locus of the skew-torsion family over a parameter grid."""
    with usage_errors():
        q_values = parse_q_grid(q_grid) if q_grid else []
        run = RunConfig(
            command="scan",
            sphere=sphere,
            n=n,
            r_grid=parse_grid(r_grid),
            q_grid=[ComplexValue.of(q) for q in q_values],
            tolerance=tolerance,
            output_format=output_format,
        )
        envelope = cmd_einstein_scan(run, workers=workers or settings.SCAN_WORKERS)
    emit(envelope, output_format, out)


@main.command()
@click.option("--seed", type=int, default=None, help="Default from HOMOCONN_SEED.")
@click.option("--trials", type=int, default=None)
@click.option("--battery", "batteries", multiple=True, help="Run only these batteries.")
@click.option("--format", "output_format", type=FORMATS, default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def verify(ctx: click.Context, seed, trials, batteries, output_format, out):
    """Run the verification batteries; exit code 3 if any fails."""
    settings: Config = ctx.obj
    with usage_errors():
        run = RunConfig(
            command="verify",
            seed=settings.SEED if seed is None else seed,
            trials=settings.TRIALS if trials is None else trials,
            output_format=output_format,
        )
        envelope = cmd_verify(run, list(batteries) or None)
    emit(envelope, output_format, out)
    if not envelope.verdicts["all_passed"]:
        ctx.exit(EXIT_VERIFICATION_FAILED)


if __name__ == "__main__":
    main()
