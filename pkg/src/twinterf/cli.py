# -*- coding: utf-8 -*-
"""
Command line front end. Every subcommand builds an :class:`ExperimentConfig`
from ``--config`` and its flags, runs it, prints a summary table and writes
the data file named by ``--out``.
"""
import json
import logging
import os
import sys

import click
import pandas as pd
from dotenv import find_dotenv, load_dotenv

from . import __version__, experiments, hbt, oracle, output
from .config import parse_config
from .errors import DomainError, TwinterfError, VerificationError
from .experiments import DiscretePattern
from .splitters import NetworkDescription, alternating_profile, compile_network

logger = logging.getLogger(__name__)

LOG_FMT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
VERIFY_TOL = 1e-10


def _error_json(name, message, exit_code):
    click.echo(json.dumps({'error': name, 'message': message, 'exit_code': exit_code},
                          sort_keys=True), err=True)


class TwinterfGroup(click.Group):
    """ Group that turns package errors into exit codes and error JSON """

    def main(self, args=None, prog_name=None, complete_var=None, **extra):
        extra.pop('standalone_mode', None)
        try:
            return super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as error:
            error.show()
            _error_json(type(error).__name__, error.format_message(), 1)
            sys.exit(1)
        except click.exceptions.Abort:
            _error_json('Abort', 'aborted', 1)
            sys.exit(1)
        except TwinterfError as error:
            logger.debug("Run failed", exc_info=True)
            _error_json(type(error).__name__, str(error), error.exit_code)
            sys.exit(error.exit_code)


_COMMON_OPTIONS = (
    click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                 default=None, help='YAML experiment file; flags override its values.'),
    click.option('--out', 'path', type=click.Path(dir_okay=False), default=None,
                 help='Data file to write.'),
    click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default=None),
    click.option('--units', type=click.Choice(['absolute', 'paper']), default=None,
                 help='paper rescales discrete probabilities by n^2/2.'),
)

_DISCRETE_OPTIONS = (
    click.option('--verify', is_flag=True, help='Cross-check against the oracle.'),
    click.option('--reference', type=int, default=None, help='1-based reference detector.'),
)

_GEOMETRY_OPTIONS = (
    click.option('--x0', type=float, default=None, help='Half source separation.'),
    click.option('--wavelength', type=float, default=None),
    click.option('--L', 'distance', type=float, default=None, help='Propagation distance.'),
    click.option('--sigma', type=float, default=None, help='Envelope width.'),
    click.option('--center', type=float, default=None, help='Envelope centre.'),
    click.option('--grid', type=str, default=None, help='min:max:points'),
    click.option('--slice-x1', type=float, default=None, help='Fixed x1 of a 1-D slice.'),
    click.option('--sampling', type=click.Choice(['cell', 'point']), default=None),
)


def _with(options):
    def decorator(func):
        for option in reversed(options):
            func = option(func)
        return func
    return decorator


common_options = _with(_COMMON_OPTIONS)
discrete_options = _with(_DISCRETE_OPTIONS)
geometry_options = _with(_GEOMETRY_OPTIONS)


def _execute(experiment, config_path, path, fmt, units, **params):
    flags = {key: value for key, value in params.items()
             if value is not False and value != ()}
    if 'distance' in flags:
        flags['L'] = flags.pop('distance')
    flags['experiment'] = experiment
    flags['output'] = {'path': path, 'format': fmt, 'units': units}
    config = parse_config(config_path, flags)
    logger.info("Running %s", config.experiment)
    run(config)


def _discrete_spec(config):
    """ Splitter spec of a discrete experiment and its output relabeling """
    if config.experiment == 'hom':
        return alternating_profile(2), None
    if config.experiment == 'extended-hom':
        permutation = experiments.TOPOLOGY_RELABELING[config.topology] if config.relabel else None
        return experiments.extended_hom_spec(config.topology), permutation
    if config.experiment == 'nport':
        return alternating_profile(config.n), None
    net = NetworkDescription.load(config.network)
    return compile_network(net).spec, None


def verify(spec, distribution):
    """
    Compares the engine's distribution with the oracle for the same columns.

    :raises VerificationError: deviation above ``VERIFY_TOL``
    """
    result = oracle.oracle_coincidences(spec.col_a, spec.col_b)
    deviation = oracle.max_deviation(distribution, result)
    click.echo("max deviation from oracle: {:.3e}".format(deviation))
    if not deviation <= VERIFY_TOL:
        raise VerificationError(
            "Engine and oracle differ by {:.3e} > {:.0e}".format(deviation, VERIFY_TOL))
    return deviation


def run_discrete(config):
    spec, permutation = _discrete_spec(config)
    distribution = experiments.run_splitter(spec, config.allow_nonphysical)
    if config.verify:
        verify(spec, distribution)
    if permutation is not None:
        distribution = distribution.relabel(permutation)

    if config.reference > distribution.dim:
        raise DomainError("Reference detector {} outside 1..{}".format(
            config.reference, distribution.dim))
    pattern = DiscretePattern.from_distribution(distribution, config.reference)
    frame = output.discrete_frame(pattern, config.output.units)
    click.echo(output.summary(frame))

    report = experiments.analyze_fringes(pattern)
    click.echo("dark detectors: {}".format(
        ', '.join(str(d) for d in report.dark_indices) or 'none'))
    if report.visibility is not None:
        click.echo("visibility: {:.6g}".format(report.visibility))
    output.write(frame, output.metadata(config, spec.overlap), config.output)


def run_hbt(config):
    geom = hbt.HbtGeometry(config.x0, config.wavelength, config.L)
    env = hbt.Envelope(config.sigma, config.center)
    grid = config.grid_spec()
    if config.engine == 'nport':
        pattern = hbt.hbt_from_nport(geom, env, grid, config.slice_x1, config.sampling)
    else:
        pattern = hbt.scan(geom, env, grid, config.slice_x1)

    rows = [('expected fringe spacing', geom.fringe_spacing),
            ('overlap |s|', pattern.overlap)]
    if pattern.is_slice:
        rows.append(('slice x1', pattern.slice_x1))
        try:
            rows.append(('measured fringe spacing', hbt.fringe_spacing(pattern)))
        except DomainError as error:
            logger.warning("%s", error)
        rows.append(('visibility', hbt.continuous_visibility(pattern, env)))
    else:
        rows.append(('total probability', pattern.total_probability()))
    click.echo(output.summary(pd.DataFrame(rows, columns=['quantity', 'value'])))

    frame = output.continuous_frame(pattern)
    output.write(frame, output.metadata(config, pattern.overlap), config.output)


def run_convergence(config):
    geom = hbt.HbtGeometry(config.x0, config.wavelength, config.L)
    env = hbt.Envelope(config.sigma, config.center)
    grid = config.grid_spec()
    slice_x1 = 0.0 if config.slice_x1 is None else config.slice_x1
    results = hbt.convergence_study(geom, env, grid.min, grid.max, config.bins,
                                    slice_x1, config.sampling, progress=True)
    frame = output.convergence_frame(results)
    click.echo(output.summary(frame))
    overlap = abs(hbt.column_overlap(geom, env))
    output.write(frame, output.metadata(config, overlap), config.output)


def run(config):
    if config.experiment == 'hbt':
        run_hbt(config)
    elif config.experiment == 'convergence':
        run_convergence(config)
    else:
        run_discrete(config)


@click.group(cls=TwinterfGroup)
@click.version_option(__version__, prog_name='twinterf')
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None)
def cli(log_level):
    """ Two-particle interference experiments on n-port path-splitters """
    if log_level is not None:
        logging.getLogger().setLevel(log_level.upper())


@cli.command()
@common_options
@discrete_options
def hom(config_path, path, fmt, units, verify, reference):
    """ Balanced two-port (HOM dip) """
    _execute('hom', config_path, path, fmt, units, verify=verify, reference=reference)


@cli.command('extended-hom')
@common_options
@discrete_options
@click.option('--topology', type=click.Choice(experiments.TOPOLOGIES), default=None)
@click.option('--relabel', is_flag=True, help='Map network outputs onto the eq6 labeling.')
def extended_hom(config_path, path, fmt, units, verify, reference, topology, relabel):
    """ Four-port two-particle interference """
    _execute('extended-hom', config_path, path, fmt, units, verify=verify,
             reference=reference, topology=topology, relabel=relabel)


@cli.command()
@common_options
@discrete_options
@click.option('--n', type=int, default=None, help='Even channel count.')
def nport(config_path, path, fmt, units, verify, reference, n):
    """ Alternating n-port coincidence pattern """
    _execute('nport', config_path, path, fmt, units, verify=verify, reference=reference, n=n)


@cli.command()
@common_options
@discrete_options
@click.option('--network', 'network_path', type=click.Path(dir_okay=False), default=None,
              help='JSON network description.')
@click.option('--allow-nonphysical', is_flag=True)
def network(config_path, path, fmt, units, verify, reference, network_path, allow_nonphysical):
    """ Arbitrary beam-splitter network """
    _execute('network', config_path, path, fmt, units, verify=verify, reference=reference,
             network=network_path, allow_nonphysical=allow_nonphysical)


@cli.command('hbt')
@common_options
@geometry_options
@click.option('--engine', type=click.Choice(['closed-form', 'nport']), default=None)
def hbt_command(config_path, path, fmt, units, x0, wavelength, distance, sigma, center,
                grid, slice_x1, sampling, engine):
    """ Continuous-limit coincidence density """
    _execute('hbt', config_path, path, fmt, units, x0=x0, wavelength=wavelength,
             distance=distance, sigma=sigma, center=center, grid=grid,
             slice_x1=slice_x1, sampling=sampling, engine=engine)


@cli.command()
@common_options
@geometry_options
@click.option('--bins', type=int, multiple=True, help='Bin count; repeat for several.')
def convergence(config_path, path, fmt, units, x0, wavelength, distance, sigma, center,
                grid, slice_x1, sampling, bins):
    """ Deviation of the n-port route from the closed form per bin count """
    _execute('convergence', config_path, path, fmt, units, x0=x0, wavelength=wavelength,
             distance=distance, sigma=sigma, center=center, grid=grid,
             slice_x1=slice_x1, sampling=sampling, bins=tuple(bins))


def main():
    # find .env automagically by walking up directories until it's found
    load_dotenv(find_dotenv(usecwd=True))
    level = os.environ.get('TWINTERF_LOG_LEVEL', 'INFO').upper()
    known = level in LOG_LEVELS
    logging.basicConfig(level=level if known else 'INFO', format=LOG_FMT, stream=sys.stderr)
    if not known:
        logger.warning("Unknown TWINTERF_LOG_LEVEL %r, using INFO", level)
    cli()


if __name__ == '__main__':
    main()
