# Copyright 2020 Peter Bencze
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Command-line entry point.

Exit codes: 0 on success, 1 on errors, 2 when a solver stopped on its iteration limit. The environment variable
HSFOMO_THREADS caps the BLAS thread pools; it is read before numpy is imported.
"""

import os

_THREADS = os.environ.get('HSFOMO_THREADS')
if _THREADS:
    for _variable in ('OMP_NUM_THREADS', 'OPENBLAS_NUM_THREADS', 'MKL_NUM_THREADS'):
        os.environ[_variable] = _THREADS

import logging  # noqa: E402
from typing import Sequence  # noqa: E402

import click  # noqa: E402

from hsfomo import __version__  # noqa: E402
from hsfomo.errors import HsfomoError  # noqa: E402
from hsfomo.export import export_rosettes, export_table  # noqa: E402
from hsfomo.result_bundle import ResultBundle  # noqa: E402
from hsfomo.run_configuration import parse_config  # noqa: E402
from hsfomo.runner import run, sample_sets  # noqa: E402

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _fail(ctx: click.Context, error: Exception) -> None:
    click.echo(f'Error: {error}', err=True)
    ctx.exit(EXIT_ERROR)


@click.group()
@click.version_option(__version__, prog_name='hsfomo')
@click.option('--verbose', '-v', is_flag=True, help='Log solver details.')
@click.option('--quiet', '-q', is_flag=True, help='Log warnings and errors only.')
def main(verbose: bool, quiet: bool) -> None:
    """Free orthotropic material optimization with composite energy bounds."""

    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


@main.command()
@click.argument('config', type=click.Path(dir_okay=False))
@click.pass_context
def solve(ctx: click.Context, config: str) -> None:
    """Solves the run file CONFIG and writes the result bundle."""

    try:
        bundle = run(parse_config(config))
    except (HsfomoError, ValueError) as error:
        _fail(ctx, error)
        return

    click.echo(str(bundle))
    if not bundle.converged:
        logger.warning('Solver stopped with status %s', bundle.metadata['status'])
        ctx.exit(EXIT_NOT_CONVERGED)


@main.command(name='sample-sets')
@click.argument('config', type=click.Path(dir_okay=False))
@click.pass_context
def sample_sets_command(ctx: click.Context, config: str) -> None:
    """Samples the admissible set geometry of the run file CONFIG."""

    try:
        paths = sample_sets(parse_config(config))
    except (HsfomoError, ValueError) as error:
        _fail(ctx, error)
        return

    for path in paths:
        click.echo(path)


@main.command(name='export-rosettes')
@click.argument('bundle', type=click.Path())
@click.option('--angles', default=72, show_default=True, help='Number of angles per element.')
@click.option('--output', type=click.Path(dir_okay=False), default=None,
              help='Output CSV file, defaults to rosettes.csv next to the bundle.')
@click.pass_context
def export_rosettes_command(ctx: click.Context, bundle: str, angles: int, output: str) -> None:
    """Writes the directional energy rosettes of the result BUNDLE."""

    if output is None:
        directory = bundle if os.path.isdir(bundle) else os.path.dirname(bundle)
        output = os.path.join(directory, 'rosettes.csv')

    try:
        click.echo(export_rosettes(ResultBundle.load(bundle), angles, output))
    except (HsfomoError, ValueError) as error:
        _fail(ctx, error)


@main.command()
@click.argument('bundles', nargs=-1, type=click.Path())
@click.option('--output', type=click.Path(dir_okay=False), default='table.csv', show_default=True,
              help='Output CSV file.')
@click.pass_context
def table(ctx: click.Context, bundles: Sequence[str], output: str) -> None:
    """Writes the compliance comparison table of the result BUNDLES."""

    try:
        click.echo(export_table([ResultBundle.load(path) for path in bundles], output))
    except (HsfomoError, ValueError) as error:
        _fail(ctx, error)
