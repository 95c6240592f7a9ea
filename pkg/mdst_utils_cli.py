#!/usr/bin/env python3
"""
mdst-utils - simulate minimal directed spanning trees and check their limit laws

Single entry point with one subcommand per experiment. Result tables go to
stdout as CSV (default) or JSON; logging and progress go to stderr.

Exit status: 0 success, 1 a requested check failed, 2 usage or parameter error.
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from mdst_utils.config import ExperimentConfig, load_config
from mdst_utils.dickman import (FIXPOINT, RECORDS, DEFAULT_TAIL_TOL, recompose_max_dickman,
                                sample_max_dickman_batch, sample_qmax1_batch)
from mdst_utils.errors import MdstError
from mdst_utils.fixed_point import FAMILIES, recompose_fixed_point, sample_fixed_point_batch
from mdst_utils.geometry import PROCESSES
from mdst_utils.graphs import STRATEGIES, build_mdst
from mdst_utils.limit_laws import MonteCarloBudget, limit_constants, lln_constant, mu_prime
from mdst_utils.montecarlo import (FULL, REGION_MODES, cloud_for, coupling_experiment,
                                   run_longest_edge_experiment, run_phase_transition_experiment,
                                   run_weight_experiment)
from mdst_utils.reporting import FORMATS, format_rows, write_graph_csv, write_plot_series, write_points_csv
from mdst_utils.rng import replicate_rng
from mdst_utils.spinner import Spinner
from mdst_utils.statistics import EmpiricalDistribution, ks_critical_value, ks_two_sample
from mdst_utils.verification import run_property_suite
from mdst_utils.version import __version__

QMAX1 = 'qmax1'

TOOLS = [
    {
        'name': 'simulate',
        'description': 'Scaled MDST weight over replicates, per intensity and region',
        'example': 'mdst-utils simulate --d 2 --alpha 1 --n 1000 10000 --reps 50',
    },
    {
        'name': 'constants',
        'description': 'Limit constants (LLN, mu(1,alpha), mu\'(d,alpha), 2/v_d, quadrature mean)',
        'example': 'mdst-utils constants --d 2 --alpha 2',
    },
    {
        'name': 'dickman',
        'description': 'Max-Dickman and Q_max(1) samples or summary statistics',
        'example': 'mdst-utils dickman --samples 1000000 --stat mean',
    },
    {
        'name': 'fixedpoint',
        'description': 'Samples of the J, H and G fixed-point laws',
        'example': 'mdst-utils fixedpoint --family G --alpha 2 --samples 10000 --stat summary',
    },
    {
        'name': 'verify',
        'description': 'Property suite: oracle equivalence, record and decomposition identities, coupling',
        'example': 'mdst-utils verify --quick',
    },
    {
        'name': 'couple',
        'description': 'Boundary coupling of the slab MDST with the projected ONG',
        'example': 'mdst-utils couple --d 2 --alpha 1 --n 1000 10000 --reps 200',
    },
    {
        'name': 'longest',
        'description': 'Longest MDST edge, compared with its Q_max(d-1) limit',
        'example': 'mdst-utils longest --n 10000 --reps 200',
    },
    {
        'name': 'phase',
        'description': 'Finite-n phase-transition diagnostics of the centred weight',
        'example': 'mdst-utils phase --alphas 0.5 1 2 --n 10000 --reps 300',
    },
]

WEIGHT_COLUMNS = ['n', 'region', 'scale', 'count', 'mean', 'variance', 'stderr', 'min', 'q05',
                  'median', 'q95', 'max', 'max_decomposition_error']
CONSTANT_COLUMNS = ['name', 'd', 'alpha', 'value', 'exact', 'stderr', 'extrapolated', 'sample_sizes']
COUPLING_COLUMNS = ['n', 't_n', 'replicates', 'inequality_violations', 'per_edge_violations',
                    'slab_bound_violations', 'mean_abs_difference', 'stderr', 'mean_beta',
                    'max_per_edge_excess', 'decreasing']
LONGEST_COLUMNS = ['n', 'count', 'mean', 'variance', 'stderr', 'min', 'q05', 'median', 'q95', 'max',
                   'monotonicity_violations', 'ks_limit', 'reference', 'label']
PHASE_COLUMNS = ['alpha', 'n', 'regime', 'replicates', 'mean', 'scaled_variance', 'skew',
                 'excess_kurtosis', 'ks_normal', 'ks_limit', 'reference', 'passed', 'label', 'centering']
CHECK_COLUMNS = ['name', 'passed', 'cases', 'failures', 'detail']


def print_tools_list():
    """Print a formatted list of all subcommands."""
    print("\nAvailable subcommands:\n")
    for tool in TOOLS:
        print(f"  {tool['name']}")
        print(f"    {tool['description']}")
        print(f"    e.g. {tool['example']}")
        print()


def common_options() -> argparse.ArgumentParser:
    """Flags shared by every subcommand; None means 'use the config value'."""
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('experiment')
    group.add_argument('--d', type=int, help='Dimension (default: 2)')
    group.add_argument('--alpha', type=float, help='Edge-weight exponent (default: 1)')
    group.add_argument('--n', type=float, nargs='+', metavar='N', help='Intensity grid (default: 10000)')
    group.add_argument('--reps', type=int, help='Replicates per intensity (default: 100)')
    group.add_argument('--epsilon', type=float, help='Slab exponent epsilon in (0, 1/(2d)) (default: 0.05)')
    group.add_argument('--seed', type=int, help='Master seed (default: 0)')
    group.add_argument('--process', choices=PROCESSES, help='Point process (default: poisson)')
    group.add_argument('--strategy', choices=STRATEGIES, help='Nearest-neighbour search (default: indexed)')
    group.add_argument('--workers', type=int, help='Worker processes for replicates (default: 1)')
    group.add_argument('--config', metavar='PATH', help='YAML experiment config; flags override it')
    output = parent.add_argument_group('output')
    output.add_argument('--format', choices=FORMATS, default='csv', help='Table format (default: csv)')
    output.add_argument('-v', '--verbose', action='store_true', help='Debug logging on stderr')
    return parent


def plot_options() -> argparse.ArgumentParser:
    """--emit-plot, for the subcommands that produce a series."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument_group('output').add_argument(
        '--emit-plot', metavar='PATH', help='Write x/y series for external plotting')
    return parent


def dump_options() -> argparse.ArgumentParser:
    """--dump-points and --dump-graph, for the subcommands that build MDSTs."""
    parent = argparse.ArgumentParser(add_help=False)
    output = parent.add_argument_group('output')
    output.add_argument('--dump-points', metavar='PATH', help='Write the first replicate\'s points as CSV')
    output.add_argument('--dump-graph', metavar='PATH', help='Write the first replicate\'s MDST edges as CSV')
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mdst-utils',
        description='Minimal directed spanning trees, on-line nearest-neighbour graphs and their limit laws.',
        epilog='Exit status: 0 success, 1 failed check, 2 usage error.',
    )
    parser.add_argument('--version', action='version', version=f'mdst-utils {__version__}')
    parser.add_argument('--list', action='store_true', help='List all subcommands')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    parent = common_options()
    plot = plot_options()
    dump = dump_options()

    def add(name, help_text, columns=None, extra=()):
        epilog = f"CSV columns: {','.join(columns)}" if columns else None
        p = sub.add_parser(name, parents=[parent, *extra], help=help_text, description=help_text,
                           epilog=epilog)
        p.set_defaults(command_parser=p)
        return p

    p = add('simulate', 'Scaled MDST weight over replicates', WEIGHT_COLUMNS, (plot, dump))
    p.add_argument('--region', choices=REGION_MODES, default=FULL, help='Restrict edges by source region')
    p.add_argument('--boundary-height', type=float, help='Force the base-slab height t_n')
    p.add_argument('--check', action='store_true', help='Compare the largest-n mean with its limit constant')

    p = add('constants', 'Limit constants at (d, alpha)', CONSTANT_COLUMNS)
    p.add_argument('--mc-sizes', type=int, nargs=2, metavar=('M1', 'M2'),
                   help='ONG point counts for the d >= 3 estimate of mu(d-1, alpha)')

    p = add('dickman', 'Max-Dickman or Q_max(1) samples')
    p.add_argument('--samples', type=int, default=10000, help='Number of draws (default: 10000)')
    p.add_argument('--method', choices=[RECORDS, FIXPOINT, QMAX1], default=RECORDS)
    p.add_argument('--tail-tol', type=float, default=DEFAULT_TAIL_TOL)
    p.add_argument('--stat', choices=['none', 'mean', 'summary'], default='none',
                   help='Print draws (none) or a statistic of them')
    p.add_argument('--self-check', action='store_true',
                   help='KS test of the draws against one-step recomposition')

    p = add('fixedpoint', 'Samples of the J, H, G fixed-point laws')
    p.add_argument('--family', choices=FAMILIES, default='G')
    p.add_argument('--samples', type=int, default=1000, help='Number of draws (default: 1000)')
    p.add_argument('--coeff-tol', type=float, help='Bound on the discarded coefficient mass of each draw')
    p.add_argument('--stat', choices=['none', 'mean', 'summary'], default='none')
    p.add_argument('--recompose', action='store_true', help='Print one-step recomposed draws instead')
    p.add_argument('--self-check', action='store_true',
                   help='KS test against recomposition and a mean-zero test')

    p = add('verify', 'Run the property suite', CHECK_COLUMNS)
    p.add_argument('--quick', action='store_true', help='Small instances only (n <= 500)')

    p = add('couple', 'Boundary coupling experiment', COUPLING_COLUMNS, (plot, dump))
    p.add_argument('--boundary-height', type=float, help='Force the base-slab height t_n')

    p = add('longest', 'Longest-edge experiment', LONGEST_COLUMNS, (plot, dump))
    p.add_argument('--reference-samples', type=int, help='Q_max(d-1) reference draws (default: 10000)')
    p.add_argument('--check', action='store_true', help='Fail if KS against Q_max(d-1) exceeds the tolerance')

    p = add('phase', 'Phase-transition diagnostics', PHASE_COLUMNS, (plot,))
    p.add_argument('--alphas', type=float, nargs='+', help='Exponents to report (default: --alpha)')
    p.add_argument('--reference-samples', type=int, help='Limit-law reference draws (default: 10000)')
    p.add_argument('--coeff-tol', type=float, help='Discarded-mass bound of the G sampler')
    p.add_argument('--check', action='store_true', help='Fail if a soft check misses its tolerance')
    return parser


def check_combinations(args) -> None:
    """Reject flag combinations under which a requested check could not run."""
    if args.command == 'simulate' and args.check and args.region != FULL:
        args.command_parser.error('--check compares the full weight with its limit and needs --region full')
    if args.command == 'dickman' and args.self_check and args.method == QMAX1:
        args.command_parser.error('--self-check recomposes max-Dickman draws and is not available '
                                  'with --method qmax1')


def resolve_config(args) -> ExperimentConfig:
    base = load_config(args.config) if args.config else ExperimentConfig()
    return base.with_overrides(
        d=args.d,
        alpha=args.alpha,
        intensity_grid=args.n,
        replicates=args.reps,
        epsilon=args.epsilon,
        master_seed=args.seed,
        process=args.process,
        strategy=args.strategy,
        workers=args.workers,
        boundary_height=getattr(args, 'boundary_height', None),
        coeff_tol=getattr(args, 'coeff_tol', None),
        reference_samples=getattr(args, 'reference_samples', None),
    )


def emit(rows: Sequence[Dict], columns: Optional[List[str]], fmt: str) -> None:
    sys.stdout.write(format_rows(rows, columns, fmt))


def report_failures(failures: List[Dict], fmt: str) -> int:
    """Print a failure record and return the check-failure exit status."""
    if not failures:
        return 0
    sys.stdout.write(format_rows([dict(record='failure', **f) for f in failures], None, fmt))
    return 1


def dump_first_replicate(args, config: ExperimentConfig) -> None:
    if not (args.dump_points or args.dump_graph):
        return
    cloud = cloud_for(config, config.intensity_grid[0], 0)
    if args.dump_points:
        write_points_csv(args.dump_points, cloud)
    if args.dump_graph:
        write_graph_csv(args.dump_graph, build_mdst(cloud, config.strategy))


def cmd_simulate(args, config: ExperimentConfig) -> int:
    with Spinner("Simulating MDST weights"):
        rows = run_weight_experiment(config, args.region)
    emit([r.as_row() for r in rows], WEIGHT_COLUMNS, args.format)
    dump_first_replicate(args, config)
    if args.emit_plot:
        write_plot_series(args.emit_plot, {'mean': [(r.n, r.distribution.mean) for r in rows],
                                           'stderr': [(r.n, r.distribution.stderr) for r in rows]})
    failures = [{'check': 'decomposition_identity', 'n': r.n, 'observed': r.max_decomposition_error,
                 'expected': 0.0, 'tolerance': 1e-10}
                for r in rows if r.max_decomposition_error >= 1e-10]
    if args.check:
        last = rows[-1]
        if config.alpha < config.d:
            expected, tolerance = lln_constant(config.d, config.alpha), config.tolerances.lln_relative
        else:
            expected = mu_prime(config.d, config.alpha, seed=config.master_seed).value
            tolerance = config.tolerances.expectation_relative
        error = abs(last.distribution.mean - expected) / expected
        if error >= tolerance:
            failures.append({'check': 'limit_constant', 'n': last.n, 'observed': last.distribution.mean,
                             'expected': expected, 'tolerance': tolerance})
    return report_failures(failures, args.format)


def cmd_constants(args, config: ExperimentConfig) -> int:
    budget = None
    if args.mc_sizes:
        budget = MonteCarloBudget(m_small=args.mc_sizes[0], m_large=args.mc_sizes[1])
    with Spinner("Evaluating constants"):
        rows = limit_constants(config.d, config.alpha, budget, config.master_seed)
    emit([c.as_row() for c in rows], CONSTANT_COLUMNS, args.format)
    return 0


def _emit_samples(args, values: np.ndarray, extra: Optional[Dict[str, np.ndarray]] = None) -> None:
    if args.stat == 'none':
        columns = ['value'] + list(extra or {})
        rows = [{'value': v} for v in values.tolist()]
        for name, column in (extra or {}).items():
            for row, x in zip(rows, column.tolist()):
                row[name] = x
        emit(rows, columns, args.format)
        return
    dist = EmpiricalDistribution.from_samples(values)
    if args.stat == 'mean':
        emit([{'statistic': 'mean', 'value': dist.mean, 'stderr': dist.stderr, 'samples': dist.size}],
             None, args.format)
    else:
        emit([dist.summary()], None, args.format)


def cmd_dickman(args, config: ExperimentConfig) -> int:
    rng = replicate_rng(config.master_seed, 0)
    if args.method == QMAX1:
        values = sample_qmax1_batch(args.samples, rng, args.tail_tol)
    else:
        values = sample_max_dickman_batch(args.samples, rng, args.tail_tol, args.method)
    _emit_samples(args, values)
    if not args.self_check:
        return 0
    recomposed = recompose_max_dickman(args.samples, replicate_rng(config.master_seed, 1), args.tail_tol)
    ks = ks_two_sample(values, recomposed)
    critical = ks_critical_value(args.samples, args.samples, 0.01)
    if ks >= critical:
        return report_failures([{'check': 'max_dickman_recomposition', 'observed': ks,
                                 'expected': 0.0, 'tolerance': critical}], args.format)
    return 0


def cmd_fixedpoint(args, config: ExperimentConfig) -> int:
    family, alpha, tol = args.family, config.alpha, config.coeff_tol
    with Spinner(f"Sampling {family}"):
        batch = sample_fixed_point_batch(family, alpha, args.samples, config.master_seed, tol)
        recomposed = None
        if args.recompose or args.self_check:
            recomposed = recompose_fixed_point(family, alpha, args.samples, config.master_seed + 1, tol)
    if args.recompose:
        _emit_samples(args, recomposed)
    else:
        _emit_samples(args, batch.values, {'max_depth': batch.max_depth, 'discarded': batch.discarded})
    if not args.self_check:
        return 0
    failures = []
    ks = ks_two_sample(batch.values, recomposed)
    critical = ks_critical_value(args.samples, args.samples, 0.01)
    if ks >= critical:
        failures.append({'check': 'fixed_point_recomposition', 'observed': ks, 'expected': 0.0,
                         'tolerance': critical})
    dist = EmpiricalDistribution.from_samples(batch.values)
    if abs(dist.mean) > 3 * dist.stderr:
        failures.append({'check': 'mean_zero', 'observed': dist.mean, 'expected': 0.0,
                         'tolerance': 3 * dist.stderr})
    return report_failures(failures, args.format)


def cmd_verify(args, config: ExperimentConfig) -> int:
    with Spinner("Running property suite"):
        results = run_property_suite(quick=args.quick, seed=config.master_seed)
    emit([r.as_row() for r in results], CHECK_COLUMNS, args.format)
    return 0 if all(r.passed for r in results) else 1


def cmd_couple(args, config: ExperimentConfig) -> int:
    with Spinner("Coupling slab MDSTs with projected ONGs"):
        summary = coupling_experiment(config)
    decreasing = summary.decreasing
    emit([dict(r.as_row(), decreasing=decreasing) for r in summary.rows], COUPLING_COLUMNS, args.format)
    dump_first_replicate(args, config)
    if args.emit_plot:
        write_plot_series(args.emit_plot, {'mean_abs_difference': [(r.n, r.mean_abs_difference)
                                                                   for r in summary.rows]})
    return report_failures([{'check': 'coupling_bounds', 'n': r.n, 'observed': r.inequality_violations
                             + r.per_edge_violations + r.slab_bound_violations, 'expected': 0,
                             'tolerance': 0} for r in summary.rows
                            if r.inequality_violations or r.per_edge_violations or r.slab_bound_violations],
                           args.format)


def cmd_longest(args, config: ExperimentConfig) -> int:
    with Spinner("Measuring longest edges"):
        rows = run_longest_edge_experiment(config)
    emit([r.as_row() for r in rows], LONGEST_COLUMNS, args.format)
    dump_first_replicate(args, config)
    if args.emit_plot:
        write_plot_series(args.emit_plot, {'mean': [(r.n, r.distribution.mean) for r in rows]})
    failures = [{'check': 'ong_longest_edge_monotone', 'n': r.n, 'observed': r.monotonicity_violations,
                 'expected': 0, 'tolerance': 0} for r in rows if r.monotonicity_violations]
    if args.check:
        tolerance = config.tolerances.ks_longest
        failures += [{'check': 'ks_longest', 'n': r.n, 'observed': r.ks_limit, 'expected': 0.0,
                      'tolerance': tolerance} for r in rows if r.ks_limit >= tolerance]
    return report_failures(failures, args.format)


def cmd_phase(args, config: ExperimentConfig) -> int:
    with Spinner("Running phase-transition diagnostics"):
        reports = run_phase_transition_experiment(config, args.alphas)
    emit([r.as_row() for r in reports], PHASE_COLUMNS, args.format)
    if args.emit_plot:
        write_plot_series(args.emit_plot, {'ks_normal': [(r.alpha, r.diagnostics['ks_normal']) for r in reports]})
    if not args.check:
        return 0
    return report_failures([{'check': f'phase_{r.regime}', 'alpha': r.alpha,
                             'observed': r.ks_limit if r.regime == 'boundary' else r.diagnostics['ks_normal'],
                             'expected': 0.0,
                             'tolerance': config.tolerances.ks_limit if r.regime == 'boundary'
                             else config.tolerances.ks_normal}
                            for r in reports if r.passed is False], args.format)


COMMANDS = {
    'simulate': cmd_simulate,
    'constants': cmd_constants,
    'dickman': cmd_dickman,
    'fixedpoint': cmd_fixedpoint,
    'verify': cmd_verify,
    'couple': cmd_couple,
    'longest': cmd_longest,
    'phase': cmd_phase,
}


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format='%(levelname)s %(name)s: %(message)s',
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the mdst-utils command."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command:
            check_combinations(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    if args.list:
        print_tools_list()
        return 0
    if args.command is None:
        print(f"mdst-utils v{__version__}")
        print_tools_list()
        print("Run 'mdst-utils COMMAND --help' for the options of a subcommand.")
        return 0

    setup_logging(args.verbose)
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](args, config)
    except MdstError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
